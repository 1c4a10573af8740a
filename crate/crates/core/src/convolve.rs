//! Lattice correlations against sparse radial stencils.
//!
//! Interaction energies, local density counts and nonlocal perimeters all
//! reduce to `out(x) = sum_o w(o) f(x + o)` with a finitely supported weight
//! stencil. Small problems run the direct sum; above [`DIRECT_LIMIT`]
//! nonzero cells the zero-padded FFT path takes over. Both paths must agree
//! to 1e-9 relative on shared cases, which the tests pin.

use crate::error::Result;
use crate::field::ScalarField;
use crate::grid::MAX_DIM;
use crate::scalar::Scalar;
use rayon::prelude::*;
use rustfft::{num_complex::Complex, FftPlanner};

/// Nonzero-cell count above which correlation switches to the FFT path.
pub const DIRECT_LIMIT: usize = 100_000;

/// Finitely supported weights on lattice offsets.
#[derive(Clone, Debug)]
pub struct Stencil<T: Scalar = f64> {
    pub offsets: Vec<([i64; MAX_DIM], T)>,
}

impl<T: Scalar> Stencil<T> {
    pub fn new(offsets: Vec<([i64; MAX_DIM], T)>) -> Self {
        Self { offsets }
    }

    pub fn weight_sum(&self) -> T {
        self.offsets.iter().map(|(_, w)| *w).fold(T::zero(), |a, b| a + b)
    }

    fn bounds(&self) -> ([i64; MAX_DIM], [i64; MAX_DIM]) {
        let mut lo = [0i64; MAX_DIM];
        let mut hi = [0i64; MAX_DIM];
        for (o, _) in &self.offsets {
            for a in 0..MAX_DIM {
                lo[a] = lo[a].min(o[a]);
                hi[a] = hi[a].max(o[a]);
            }
        }
        (lo, hi)
    }
}

/// Direct correlation evaluated on a caller-chosen window.
pub fn correlate_on<T: Scalar>(
    f: &ScalarField<T>,
    st: &Stencil<T>,
    origin: [i64; MAX_DIM],
    extent: [usize; MAX_DIM],
) -> Result<ScalarField<T>> {
    let mut out = ScalarField::zeros(f.dim(), f.spacing(), extent, origin)?;
    let vals: Vec<T> = (0..extent[0] * extent[1] * extent[2])
        .into_par_iter()
        .map(|idx| {
            let ix = idx % extent[0];
            let iy = (idx / extent[0]) % extent[1];
            let iz = idx / (extent[0] * extent[1]);
            let g = [origin[0] + ix as i64, origin[1] + iy as i64, origin[2] + iz as i64];
            let mut acc = T::zero();
            for (o, w) in &st.offsets {
                acc += *w * f.get_global([g[0] + o[0], g[1] + o[1], g[2] + o[2]]);
            }
            acc
        })
        .collect();
    out.values_mut().copy_from_slice(&vals);
    Ok(out)
}

/// Correlation over the full support window, picking the path by size.
pub fn correlate_full<T: Scalar>(f: &ScalarField<T>, st: &Stencil<T>) -> Result<ScalarField<T>> {
    let nnz = f.values().iter().filter(|v| **v != T::zero()).count();
    let (slo, shi) = st.bounds();
    let mut origin = f.origin();
    let mut extent = f.extent();
    for a in 0..f.dim() {
        origin[a] -= shi[a].max(0);
        extent[a] += (shi[a].max(0) - slo[a].min(0)) as usize;
    }
    if nnz <= DIRECT_LIMIT {
        correlate_on(f, st, origin, extent)
    } else {
        correlate_fft_on(f, st, origin, extent)
    }
}

/// Zero-padded FFT correlation, computed in f64 and cast back.
pub fn correlate_fft_on<T: Scalar>(
    f: &ScalarField<T>,
    st: &Stencil<T>,
    origin: [i64; MAX_DIM],
    extent: [usize; MAX_DIM],
) -> Result<ScalarField<T>> {
    let dim = f.dim();
    let (slo, shi) = st.bounds();
    // Dense reflected stencil: correlation is convolution with w(-z).
    let mut s_org = [0i64; MAX_DIM];
    let mut s_ext = [1usize; MAX_DIM];
    for a in 0..dim {
        s_org[a] = -shi[a];
        s_ext[a] = (shi[a] - slo[a] + 1) as usize;
    }
    let f_ext = f.extent();
    let f_org = f.origin();
    let mut n = [1usize; MAX_DIM];
    for a in 0..dim {
        n[a] = (f_ext[a] + s_ext[a] - 1).next_power_of_two();
    }
    let total = n[0] * n[1] * n[2];
    let mut fa = vec![Complex::new(0.0f64, 0.0); total];
    let mut fb = vec![Complex::new(0.0f64, 0.0); total];
    let flat = |ix: usize, iy: usize, iz: usize| ix + n[0] * (iy + n[1] * iz);
    for iz in 0..f_ext[2] {
        for iy in 0..f_ext[1] {
            for ix in 0..f_ext[0] {
                fa[flat(ix, iy, iz)].re =
                    f.get_index([ix, iy, iz]).to_f64().unwrap_or(0.0);
            }
        }
    }
    for (o, w) in &st.offsets {
        let ix = (-o[0] - s_org[0]) as usize;
        let iy = (-o[1] - s_org[1]) as usize;
        let iz = (-o[2] - s_org[2]) as usize;
        fb[flat(ix, iy, iz)].re += w.to_f64().unwrap_or(0.0);
    }
    fft_nd(&mut fa, n, dim, false);
    fft_nd(&mut fb, n, dim, false);
    for (a, b) in fa.iter_mut().zip(&fb) {
        *a *= *b;
    }
    fft_nd(&mut fa, n, dim, true);
    let scale = 1.0 / total as f64;
    // Convolution support starts at f_org + s_org.
    let mut out = ScalarField::zeros(dim, f.spacing(), extent, origin)?;
    for iz in 0..extent[2] {
        for iy in 0..extent[1] {
            for ix in 0..extent[0] {
                let gx = origin[0] + ix as i64 - (f_org[0] + s_org[0]);
                let gy = origin[1] + iy as i64 - (f_org[1] + s_org[1]);
                let gz = origin[2] + iz as i64 - (f_org[2] + s_org[2]);
                if gx < 0 || gy < 0 || gz < 0 {
                    continue;
                }
                let (gx, gy, gz) = (gx as usize, gy as usize, gz as usize);
                if gx >= n[0] || gy >= n[1] || gz >= n[2] {
                    continue;
                }
                let v = fa[flat(gx, gy, gz)].re * scale;
                out.set_index([ix, iy, iz], T::from_f64(v).unwrap());
            }
        }
    }
    Ok(out)
}

fn fft_nd(data: &mut [Complex<f64>], n: [usize; MAX_DIM], dim: usize, inverse: bool) {
    let mut planner = FftPlanner::new();
    for axis in 0..dim {
        let len = n[axis];
        if len == 1 {
            continue;
        }
        let fft = if inverse { planner.plan_fft_inverse(len) } else { planner.plan_fft_forward(len) };
        let stride = match axis {
            0 => 1,
            1 => n[0],
            _ => n[0] * n[1],
        };
        let planes: [usize; 2] = match axis {
            0 => [n[1], n[2]],
            1 => [n[0], n[2]],
            _ => [n[0], n[1]],
        };
        let mut line = vec![Complex::new(0.0, 0.0); len];
        for j in 0..planes[1] {
            for i in 0..planes[0] {
                let base = match axis {
                    0 => n[0] * (i + n[1] * j),
                    1 => i + n[0] * n[1] * j,
                    _ => i + n[0] * j,
                };
                for p in 0..len {
                    line[p] = data[base + p * stride];
                }
                fft.process(&mut line);
                for p in 0..len {
                    data[base + p * stride] = line[p];
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cone_stencil(h: f64, radius: f64) -> Stencil<f64> {
        let r_cells = (radius / h).ceil() as i64;
        let mut offsets = Vec::new();
        for oy in -r_cells..=r_cells {
            for ox in -r_cells..=r_cells {
                let r = ((ox * ox + oy * oy) as f64).sqrt() * h;
                if r <= radius {
                    offsets.push(([ox, oy, 0], (radius - r).max(0.0)));
                }
            }
        }
        Stencil::new(offsets)
    }

    #[test]
    fn direct_and_fft_agree() {
        let h = 1.0 / 16.0;
        let f = ScalarField::from_fn(2, h, [40, 33, 1], [-7, 3, 0], |g| {
            let x = g[0] as f64;
            let y = g[1] as f64;
            ((x * 0.37).sin() * (y * 0.21).cos()).abs()
        })
        .unwrap();
        let st = cone_stencil(h, 0.5);
        let d = correlate_full(&f, &st).unwrap();
        let q = correlate_fft_on(&f, &st, d.origin(), d.extent()).unwrap();
        let mut max_rel: f64 = 0.0;
        let mut max_abs: f64 = 0.0;
        for (a, b) in d.values().iter().zip(q.values()) {
            max_abs = max_abs.max((a - b).abs());
            if a.abs() > 1e-6 {
                max_rel = max_rel.max((a - b).abs() / a.abs());
            }
        }
        assert!(max_rel < 1e-9, "direct vs fft relative gap {max_rel}");
        assert!(max_abs < 1e-9, "direct vs fft absolute gap {max_abs}");
    }

    #[test]
    fn correlation_of_indicator_counts_neighbors() {
        // unit weights on the 4-neighborhood: out = number of occupied
        // neighbors
        let mut f = ScalarField::<f64>::zeros(2, 1.0, [3, 3, 1], [0, 0, 0]).unwrap();
        f.set_global([1, 1, 0], 1.0).unwrap();
        let st = Stencil::new(vec![
            ([1, 0, 0], 1.0),
            ([-1, 0, 0], 1.0),
            ([0, 1, 0], 1.0),
            ([0, -1, 0], 1.0),
        ]);
        let out = correlate_full(&f, &st).unwrap();
        assert_eq!(out.get_global([0, 1, 0]), 1.0);
        assert_eq!(out.get_global([1, 1, 0]), 0.0);
        assert_eq!(out.get_global([2, 1, 0]), 1.0);
        assert_eq!(out.get_global([1, 0, 0]), 1.0);
        assert_eq!(out.get_global([0, 0, 0]), 0.0);
    }
}
