//! Admissible interaction kernels: radial nonincreasing profiles supported
//! in [0,1] with unit mass, a slope floor on [0, 3/4] and a sup bound, both
//! expressed through one admissibility constant `k`.
//!
//! For lattice work the kernel is sampled on the cell offsets within range
//! and rescaled so that the discrete mass `sum_o w_o h^d` is exactly one;
//! that normalization is what makes the nonlocal-perimeter identity and the
//! `F containing E + B_1` saturation exact to round-off.

use crate::convolve::Stencil;
use crate::error::{Error, Result};
use crate::grid::MAX_DIM;
use crate::report::VerificationReport;
use crate::scalar::{lit, powi, unit_ball_volume, Scalar};

#[derive(Clone, Debug)]
pub struct Kernel<T: Scalar = f64> {
    dim: usize,
    /// Admissibility constant: `sup J <= k` and `-J' >= r/k` on [0, 3/4].
    k: T,
    /// Profile samples at `r_i = i/(n-1)` on [0, 1], linearly interpolated.
    samples: Vec<T>,
}

impl<T: Scalar> Kernel<T> {
    /// The cone profile `J(r) = c (1 - r)` with `c = (d+1)/omega_d` fixed by
    /// unit mass; the admissibility constant is the smallest legal one, or
    /// `k_target` if that is larger.
    pub fn cone(dim: usize, k_target: T) -> Result<Self> {
        if !(1..=MAX_DIM).contains(&dim) {
            return Err(Error::InvalidArgument(format!("unsupported dimension {dim}")));
        }
        let c = (T::from_usize(dim + 1).unwrap()) / unit_ball_volume::<T>(dim);
        let k_min = c.max(lit::<T>(0.75) / c);
        let k = k_min.max(k_target);
        let n = 257;
        let samples = (0..n)
            .map(|i| c * (T::one() - T::from_usize(i).unwrap() / T::from_usize(n - 1).unwrap()))
            .collect();
        Ok(Self { dim, k, samples })
    }

    pub fn from_samples(dim: usize, k: T, samples: Vec<T>) -> Result<Self> {
        if !(1..=MAX_DIM).contains(&dim) {
            return Err(Error::InvalidArgument(format!("unsupported dimension {dim}")));
        }
        if samples.len() < 2 {
            return Err(Error::InvalidArgument("need at least two profile samples".into()));
        }
        Ok(Self { dim, k, samples })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn admissibility(&self) -> T {
        self.k
    }
    pub fn samples(&self) -> &[T] {
        &self.samples
    }
    pub fn samples_mut(&mut self) -> &mut [T] {
        &mut self.samples
    }

    /// Profile value at radius `r`, zero beyond the unit support.
    pub fn eval(&self, r: T) -> T {
        if r < T::zero() || r >= T::one() {
            return if r == T::one() { *self.samples.last().unwrap() } else { T::zero() };
        }
        let n = self.samples.len();
        let x = r * T::from_usize(n - 1).unwrap();
        let i = x.floor().to_usize().unwrap().min(n - 2);
        let t = x - T::from_usize(i).unwrap();
        self.samples[i] * (T::one() - t) + self.samples[i + 1] * t
    }

    /// Largest backward-difference slope magnitude of the profile.
    pub fn lipschitz(&self) -> T {
        let n = self.samples.len();
        let dr = T::one() / T::from_usize(n - 1).unwrap();
        let mut m = T::zero();
        for w in self.samples.windows(2) {
            m = m.max(((w[1] - w[0]) / dr).abs());
        }
        m
    }

    /// Check the four admissibility invariants, one report each:
    /// unit mass (within 1e-6), nonnegative and nonincreasing samples, the
    /// slope floor `-J' >= r/k` at sample midpoints on [0, 3/4], and
    /// `sup J <= k`.
    pub fn validate(&self) -> Vec<VerificationReport<T>> {
        let d = self.dim;
        let n = self.samples.len();
        let dr = T::one() / T::from_usize(n - 1).unwrap();
        let mut out = Vec::new();
        // unit mass: d omega_d int J(r) r^{d-1} dr by fine trapezoid
        let omega = unit_ball_volume::<T>(d);
        let dd = T::from_usize(d).unwrap();
        let fine = 16 * (n - 1);
        let mut mass = T::zero();
        let step = T::one() / T::from_usize(fine).unwrap();
        for i in 0..fine {
            let r0 = step * T::from_usize(i).unwrap();
            let r1 = r0 + step;
            let f0 = self.eval(r0) * powi(r0, d - 1);
            let f1 = self.eval(r1) * powi(r1, d - 1);
            mass += (f0 + f1) * step * lit(0.5);
        }
        mass = mass * dd * omega;
        out.push(
            VerificationReport::new("kernel_unit_mass", d, dr)
                .check_leq((mass - T::one()).abs(), T::zero(), lit(1e-6)),
        );
        // nonnegative, nonincreasing
        let monotone = self.samples.windows(2).all(|w| w[1] <= w[0])
            && self.samples.iter().all(|&v| v >= T::zero());
        let mut rep = VerificationReport::new("kernel_monotone", d, dr);
        rep.pass = monotone;
        out.push(rep);
        // slope floor on [0, 3/4]
        let mut slope_ok = true;
        let mut worst = T::zero();
        for i in 1..n {
            let mid = dr * (T::from_usize(i).unwrap() - lit(0.5));
            if mid > lit(0.75) {
                break;
            }
            let neg_slope = (self.samples[i - 1] - self.samples[i]) / dr;
            let need = mid / self.k;
            if neg_slope < need {
                slope_ok = false;
                worst = worst.max(need - neg_slope);
            }
        }
        let mut rep = VerificationReport::new("kernel_slope_floor", d, dr).check_leq(
            worst,
            T::zero(),
            lit(1e-12),
        );
        rep.pass = slope_ok;
        out.push(rep);
        // sup bound
        let sup = self.samples.iter().fold(T::zero(), |m, &v| m.max(v));
        out.push(
            VerificationReport::new("kernel_sup_bound", d, dr).check_leq(sup, self.k, lit(1e-12)),
        );
        out
    }

    pub fn is_admissible(&self) -> bool {
        self.validate().iter().all(|r| r.pass)
    }

    /// Lattice sampling within unit range, rescaled to exact discrete unit
    /// mass: `sum_o w_o h^d = 1`.
    pub fn discretize(&self, h: T) -> DiscreteKernel<T> {
        let raw = crate::rearrange::radial_stencil(self.dim, h, T::one(), |r| self.eval(r));
        let hv = powi(h, self.dim);
        let total: T = raw.offsets.iter().map(|(_, w)| *w).fold(T::zero(), |a, b| a + b) * hv;
        let offsets = raw
            .offsets
            .into_iter()
            .map(|(o, w)| (o, w / total))
            .collect();
        DiscreteKernel { dim: self.dim, h, k: self.k, stencil: Stencil::new(offsets) }
    }

    /// Plain text: dim, admissibility constant, sample count, samples.
    pub fn to_text(&self) -> String {
        let mut s = String::from("kernel v1\n");
        s.push_str(&format!("dim {}\n", self.dim));
        s.push_str(&format!("k {}\n", self.k));
        s.push_str(&format!("samples {}\n", self.samples.len()));
        for v in &self.samples {
            s.push_str(&format!("{v}\n"));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let magic = lines.next().ok_or_else(|| Error::Parse("empty kernel file".into()))?;
        if magic.trim() != "kernel v1" {
            return Err(Error::Parse(format!("bad kernel magic {magic:?}")));
        }
        let mut dim = None;
        let mut k: Option<T> = None;
        let mut count = None;
        for line in lines.by_ref() {
            let mut it = line.split_whitespace();
            match it.next() {
                Some("dim") => {
                    dim = Some(
                        it.next()
                            .ok_or_else(|| Error::Parse("missing dim".into()))?
                            .parse()
                            .map_err(|_| Error::Parse("bad dim".into()))?,
                    )
                }
                Some("k") => {
                    k = Some(
                        it.next()
                            .ok_or_else(|| Error::Parse("missing k".into()))?
                            .parse::<T>()
                            .map_err(|_| Error::Parse("bad k".into()))?,
                    )
                }
                Some("samples") => {
                    count = Some(
                        it.next()
                            .ok_or_else(|| Error::Parse("missing sample count".into()))?
                            .parse::<usize>()
                            .map_err(|_| Error::Parse("bad sample count".into()))?,
                    );
                    break;
                }
                other => return Err(Error::Parse(format!("unexpected kernel field {other:?}"))),
            }
        }
        let dim = dim.ok_or_else(|| Error::Parse("missing dim".into()))?;
        let k = k.ok_or_else(|| Error::Parse("missing k".into()))?;
        let count = count.ok_or_else(|| Error::Parse("missing samples".into()))?;
        let mut samples = Vec::with_capacity(count);
        for line in lines {
            let t = line.trim();
            if t.is_empty() {
                continue;
            }
            samples.push(t.parse::<T>().map_err(|_| Error::Parse("bad sample".into()))?);
        }
        if samples.len() != count {
            return Err(Error::Parse(format!(
                "expected {count} samples, found {}",
                samples.len()
            )));
        }
        Self::from_samples(dim, k, samples)
    }
}

/// A kernel sampled on lattice offsets with exact discrete unit mass.
#[derive(Clone, Debug)]
pub struct DiscreteKernel<T: Scalar = f64> {
    pub dim: usize,
    pub h: T,
    pub k: T,
    pub stencil: Stencil<T>,
}

impl<T: Scalar> DiscreteKernel<T> {
    /// `sum_o w_o h^d`, exactly one by construction.
    pub fn discrete_mass(&self) -> T {
        self.stencil.weight_sum() * powi(self.h, self.dim)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cone_constants_match_the_normalization_integral() {
        // c = (d+1)/omega_d: 1 in d=1, 3/pi in d=2 (and minimal k = c there).
        let k1 = Kernel::<f64>::cone(1, 0.0).unwrap();
        assert!((k1.eval(0.0) - 1.0).abs() < 1e-12);
        assert!((k1.admissibility() - 1.0).abs() < 1e-12);
        let k2 = Kernel::<f64>::cone(2, 0.0).unwrap();
        let c = 3.0 / std::f64::consts::PI;
        assert!((k2.eval(0.0) - c).abs() < 1e-12, "c = {}", k2.eval(0.0));
        assert!((k2.admissibility() - c).abs() < 1e-12);
        assert!(c > 0.75 / c, "sup bound binds before the slope bound in d=2");
        // requesting a larger k keeps it
        let k2b = Kernel::<f64>::cone(2, 5.0).unwrap();
        assert_eq!(k2b.admissibility(), 5.0);
    }

    #[test]
    fn cone_is_admissible_and_tophat_is_not() {
        let cone = Kernel::<f64>::cone(2, 0.0).unwrap();
        assert!(cone.is_admissible());
        // top-hat: constant on [0,1), unit continuum mass, but flat slope
        let flat = 1.0 / std::f64::consts::PI;
        let hat = Kernel::from_samples(2, 1.0, vec![flat; 65]).unwrap();
        let reports = hat.validate();
        assert!(!hat.is_admissible());
        let slope = reports.iter().find(|r| r.check == "kernel_slope_floor").unwrap();
        assert!(!slope.pass, "flat profile must fail the slope floor");
        // unnormalized cone fails the mass check
        let mut bad = Kernel::<f64>::cone(2, 0.0).unwrap();
        for v in bad.samples_mut().iter_mut() {
            *v *= 1.5;
        }
        let mass = bad.validate().into_iter().find(|r| r.check == "kernel_unit_mass").unwrap();
        assert!(!mass.pass);
    }

    #[test]
    fn discrete_normalization_is_exact() {
        let cone = Kernel::<f64>::cone(2, 0.0).unwrap();
        for h in [1.0 / 8.0, 1.0 / 32.0] {
            let dk = cone.discretize(h);
            assert!((dk.discrete_mass() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn kernel_file_round_trip() {
        let cone = Kernel::<f64>::cone(3, 1.25).unwrap();
        let text = cone.to_text();
        let back = Kernel::<f64>::from_text(&text).unwrap();
        assert_eq!(back.to_text(), text);
        assert_eq!(back.dim(), 3);
        assert_eq!(back.admissibility(), 1.25);
        assert!(Kernel::<f64>::from_text("garbage").is_err());
    }
}
