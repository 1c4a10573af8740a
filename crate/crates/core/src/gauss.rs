//! Gaussian measure, half-space calculus, and the quantitative concentration
//! check.
//!
//! Cell masses are exact products of one-axis Gaussian integrals (error
//! function differences); cells count as fully occupied, so the only
//! discretization error is the geometric boundary band, which every check
//! folds into its slack. Sets must stay inside the truncation box
//! `[-R, R]^d` with `R = 6` (per-axis tail below 1e-8); any operation whose
//! result reaches the box boundary errors out instead of silently losing
//! mass.
//!
//! The Gaussian perimeter here is the dilation derivative normalized so that
//! `P(H(s)) = exp(-s^2/2)` for half-spaces, i.e. `sqrt(2 pi)` times the
//! derivative of measure along ball dilations.

use crate::dist::{erosion_depth_field, gauge_distance_field, DistanceField};
use crate::error::{Error, Result};
use crate::gauge::GaugeBody;
use crate::grid::{GridSet, MAX_DIM};
use crate::report::VerificationReport;
use crate::scalar::{lit, Scalar};
use rayon::prelude::*;

/// Half-width of the truncation box.
pub const TRUNCATION_RADIUS: f64 = 6.0;

/// Slack coefficient for Gaussian checks, matching the geometric one.
pub const SLACK_COEFF: f64 = 4.0;

/// One-dimensional standard Gaussian CDF.
pub fn phi<T: Scalar>(s: T) -> T {
    let inv_sqrt2 = T::FRAC_1_SQRT_2();
    lit::<T>(0.5) * (-s * inv_sqrt2).erfc()
}

/// Standard Gaussian density.
pub fn phi_density<T: Scalar>(s: T) -> T {
    (-s * s * lit::<T>(0.5)).exp() / (lit::<T>(2.0) * T::PI()).sqrt()
}

/// Inverse Gaussian CDF: rational initial guess refined by Newton steps
/// until the round trip `|phi(phi_inv(v)) - v|` sits at machine level
/// (well below the 1e-12 contract).
pub fn phi_inv<T: Scalar>(v: T) -> Result<T> {
    let vf = v.to_f64().ok_or_else(|| Error::InvalidArgument("bad probability".into()))?;
    if !(0.0 < vf && vf < 1.0) {
        return Err(Error::InvalidArgument(format!("probability {vf} outside (0,1)")));
    }
    let mut x = lit::<T>(acklam(vf));
    for _ in 0..3 {
        let err = phi(x) - v;
        let d = phi_density(x);
        if d > T::zero() {
            x = x - err / d;
        }
    }
    Ok(x)
}

/// Acklam's rational approximation to the probit function.
fn acklam(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    let p_low = 0.02425;
    if p < p_low {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - p_low {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    }
}

/// Per-axis Gaussian cell masses over a lattice window.
pub struct GaussTable<T: Scalar = f64> {
    origin: [i64; MAX_DIM],
    axis: [Vec<T>; MAX_DIM],
    dim: usize,
}

impl<T: Scalar> GaussTable<T> {
    pub fn new(dim: usize, h: T, origin: [i64; MAX_DIM], extent: [usize; MAX_DIM]) -> Self {
        let mut axis: [Vec<T>; MAX_DIM] = [Vec::new(), Vec::new(), Vec::new()];
        for a in 0..dim {
            axis[a] = (0..extent[a])
                .map(|i| {
                    let lo = h * T::from_i64(origin[a] + i as i64).unwrap();
                    let hi = lo + h;
                    phi(hi) - phi(lo)
                })
                .collect();
        }
        Self { origin, axis, dim }
    }

    #[inline]
    pub fn cell_mass(&self, g: [i64; MAX_DIM]) -> T {
        let mut m = T::one();
        for a in 0..self.dim {
            m = m * self.axis[a][(g[a] - self.origin[a]) as usize];
        }
        m
    }
}

fn check_in_box<T: Scalar>(e: &GridSet<T>) -> Result<()> {
    let h = e.spacing().to_f64().unwrap();
    if let Some((lo, hi)) = e.bounding_box() {
        for a in 0..e.dim() {
            if (lo[a] as f64) * h < -TRUNCATION_RADIUS - 1e-12
                || ((hi[a] + 1) as f64) * h > TRUNCATION_RADIUS + 1e-12
            {
                return Err(Error::TruncationOverflow);
            }
        }
    }
    Ok(())
}

/// Gaussian measure of a lattice set, exact per cell.
pub fn gaussian_measure<T: Scalar>(e: &GridSet<T>) -> Result<T> {
    check_in_box(e)?;
    let (lo, hi) = match e.bounding_box() {
        Some(b) => b,
        None => return Ok(T::zero()),
    };
    let mut extent = [1usize; MAX_DIM];
    for a in 0..e.dim() {
        extent[a] = (hi[a] - lo[a] + 1) as usize;
    }
    let table = GaussTable::new(e.dim(), e.spacing(), lo, extent);
    let mut total = T::zero();
    for g in e.occupied_cells() {
        total += table.cell_mass(g);
    }
    Ok(total)
}

/// The quantile `s_E` with `gamma(E) = phi(s_E)`.
pub fn quantile<T: Scalar>(e: &GridSet<T>) -> Result<T> {
    let m = gaussian_measure(e)?;
    let mf = m.to_f64().unwrap();
    if !(0.0 < mf && mf < 1.0) {
        return Err(Error::InvalidArgument(format!("degenerate Gaussian measure {mf}")));
    }
    phi_inv(m)
}

/// Gaussian mass along the Euclidean dilation family of `E`: cumulative mass
/// as a function of the dilation radius, from one distance field.
pub struct GaussDilationCurve<T: Scalar = f64> {
    levels: Vec<T>,
    cum: Vec<T>,
    pub r_max: T,
}

impl<T: Scalar> GaussDilationCurve<T> {
    /// gamma(E + rB); the staircase is exact on aligned sets.
    pub fn measure_within(&self, r: T) -> T {
        let k = self.levels.partition_point(|&v| v <= r);
        if k == 0 {
            T::zero()
        } else {
            self.cum[k - 1]
        }
    }

    /// Smallest radius at which the cumulative mass reaches `lambda`.
    pub fn radius_reaching(&self, lambda: T) -> Option<T> {
        let k = self.cum.partition_point(|&m| m < lambda);
        self.levels.get(k).copied()
    }
}

/// Build the mass-vs-radius curve for `E + rB`, `r <= r_max`. Dilations clip
/// at the truncation box: the lost mass is below the per-axis tail (1e-8 at
/// R = 6) and is folded into every consumer's slack.
pub fn gauss_dilation_curve<T: Scalar>(
    e: &GridSet<T>,
    r_max: T,
) -> Result<GaussDilationCurve<T>> {
    check_in_box(e)?;
    let ball = GaugeBody::unit_ball(e.dim());
    let field = gauge_distance_field(e, &ball, r_max)?;
    curve_from_field(&field, r_max)
}

fn curve_from_field<T: Scalar>(
    field: &DistanceField<T>,
    r_max: T,
) -> Result<GaussDilationCurve<T>> {
    let table = GaussTable::new(field.dim(), field.spacing(), field.origin(), field.extent());
    let h = field.spacing().to_f64().unwrap();
    let mut pairs: Vec<(T, T)> = Vec::new();
    'cells: for (g, d) in field.iter() {
        if d <= r_max {
            for a in 0..field.dim() {
                if (g[a] as f64) * h < -TRUNCATION_RADIUS - 1e-12
                    || ((g[a] + 1) as f64) * h > TRUNCATION_RADIUS + 1e-12
                {
                    continue 'cells; // clip at the box; tail mass only
                }
            }
            pairs.push((d, table.cell_mass(g)));
        }
    }
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut levels = Vec::with_capacity(pairs.len());
    let mut cum = Vec::with_capacity(pairs.len());
    let mut acc = T::zero();
    for (d, m) in pairs {
        acc += m;
        levels.push(d);
        cum.push(acc);
    }
    Ok(GaussDilationCurve { levels, cum, r_max })
}

/// Gaussian perimeter: `sqrt(2 pi)` times the symmetric dilation quotient at
/// `e = 2h`, so that half-spaces give `exp(-s^2/2)` exactly up to O(e^2).
pub fn gaussian_perimeter<T: Scalar>(e: &GridSet<T>) -> Result<T> {
    check_in_box(e)?;
    if e.is_empty() {
        return Err(Error::EmptySet);
    }
    let h = e.spacing();
    let eps = lit::<T>(2.0) * h;
    let curve = gauss_dilation_curve(e, eps)?;
    let m_plus = curve.measure_within(eps);
    let ball = GaugeBody::unit_ball(e.dim());
    let depth = erosion_depth_field(e, &ball, eps + eps)?;
    let table = GaussTable::new(depth.dim(), depth.spacing(), depth.origin(), depth.extent());
    let mut m_minus = T::zero();
    for (g, d) in depth.iter() {
        if e.contains_global(g) && d > eps {
            m_minus += table.cell_mass(g);
        }
    }
    let sqrt2pi = (lit::<T>(2.0) * T::PI()).sqrt();
    Ok(sqrt2pi * (m_plus - m_minus) / (eps + eps))
}

/// Rasterized half-space `{ x . nu < s }` inside the truncation box.
pub fn halfspace_set<T: Scalar>(dim: usize, h: T, nu: [f64; MAX_DIM], s: f64) -> Result<GridSet<T>> {
    let hf = h.to_f64().unwrap();
    let n = (TRUNCATION_RADIUS / hf).floor() as i64;
    let mut origin = [0i64; MAX_DIM];
    let mut extent = [1usize; MAX_DIM];
    for a in 0..dim {
        origin[a] = -n;
        extent[a] = (2 * n) as usize;
    }
    GridSet::from_fn(dim, h, extent, origin, |g| {
        let mut dot = 0.0;
        for a in 0..dim {
            dot += nu[a] * hf * (g[a] as f64 + 0.5);
        }
        dot < s
    })
}

/// Direction-minimized Gaussian asymmetry
/// `alpha_gamma(E) = inf_nu gamma(E delta H_nu(s_E))`, evaluated through
/// `gamma(E) + phi(s_E) - 2 gamma(E inter H_nu(s_E))` so only the cells of
/// `E` are touched per direction.
pub fn gaussian_asymmetry<T: Scalar>(e: &GridSet<T>) -> Result<(T, [f64; MAX_DIM])> {
    check_in_box(e)?;
    let d = e.dim();
    let s_e = quantile(e)?;
    let gamma_e = gaussian_measure(e)?;
    let (lo, hi) = e.bounding_box().ok_or(Error::EmptySet)?;
    let mut extent = [1usize; MAX_DIM];
    for a in 0..d {
        extent[a] = (hi[a] - lo[a] + 1) as usize;
    }
    let table = GaussTable::new(d, e.spacing(), lo, extent);
    let h = e.spacing().to_f64().unwrap();
    let cells: Vec<([f64; MAX_DIM], T)> = e
        .occupied_cells()
        .into_iter()
        .map(|g| {
            let mut c = [0.0; MAX_DIM];
            for a in 0..d {
                c[a] = h * (g[a] as f64 + 0.5);
            }
            (c, table.cell_mass(g))
        })
        .collect();
    let sf = s_e.to_f64().unwrap();
    let value = |nu: [f64; MAX_DIM]| -> T {
        let mut inter = T::zero();
        for (c, m) in &cells {
            let mut dot = 0.0;
            for a in 0..d {
                dot += c[a] * nu[a];
            }
            if dot < sf {
                inter += *m;
            }
        }
        gamma_e + phi(s_e) - lit::<T>(2.0) * inter
    };
    let dirs: Vec<[f64; MAX_DIM]> = match d {
        1 => vec![[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0]],
        2 => (0..720)
            .map(|i| {
                let th = std::f64::consts::TAU * i as f64 / 720.0;
                [th.cos(), th.sin(), 0.0]
            })
            .collect(),
        _ => icosphere_directions(),
    };
    let scored: Vec<(T, usize)> = dirs
        .par_iter()
        .enumerate()
        .map(|(i, &nu)| (value(nu), i))
        .collect();
    let (mut best_v, best_i) = scored
        .iter()
        .cloned()
        .reduce(|a, b| if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a })
        .unwrap();
    let mut best_nu = dirs[best_i];
    // Golden-section refinement in angle space (d = 2), or a local spherical
    // patch scan (d = 3). The functional is a staircase in the direction, so
    // this only sharpens the upper bound; ties keep the smaller angle.
    if d == 2 {
        let th0 = std::f64::consts::TAU * best_i as f64 / 720.0;
        let w = std::f64::consts::TAU / 720.0;
        let (mut a, mut b) = (th0 - w, th0 + w);
        let golden = 0.5 * (3.0 - 5f64.sqrt());
        for _ in 0..40 {
            let x1 = a + golden * (b - a);
            let x2 = b - golden * (b - a);
            let v1 = value([x1.cos(), x1.sin(), 0.0]);
            let v2 = value([x2.cos(), x2.sin(), 0.0]);
            if v1 <= v2 {
                b = x2;
            } else {
                a = x1;
            }
        }
        let th = 0.5 * (a + b);
        let v = value([th.cos(), th.sin(), 0.0]);
        if v < best_v {
            best_v = v;
            best_nu = [th.cos(), th.sin(), 0.0];
        }
    } else if d == 3 {
        let mut step = 0.08;
        for _ in 0..3 {
            let mut local_best = (best_v, best_nu);
            for i in -2i32..=2 {
                for j in -2i32..=2 {
                    let nu = perturb_direction(best_nu, i as f64 * step, j as f64 * step);
                    let v = value(nu);
                    if v < local_best.0 {
                        local_best = (v, nu);
                    }
                }
            }
            best_v = local_best.0;
            best_nu = local_best.1;
            step /= 4.0;
        }
    }
    Ok((best_v.max(T::zero()), best_nu))
}

fn perturb_direction(nu: [f64; MAX_DIM], da: f64, db: f64) -> [f64; MAX_DIM] {
    // small rotation in two orthogonal tangent directions
    let up = if nu[2].abs() < 0.9 { [0.0, 0.0, 1.0] } else { [1.0, 0.0, 0.0] };
    let t1 = normalize(cross(nu, up));
    let t2 = cross(nu, t1);
    normalize([
        nu[0] + da * t1[0] + db * t2[0],
        nu[1] + da * t1[1] + db * t2[1],
        nu[2] + da * t1[2] + db * t2[2],
    ])
}

fn cross(a: [f64; MAX_DIM], b: [f64; MAX_DIM]) -> [f64; MAX_DIM] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn normalize(v: [f64; MAX_DIM]) -> [f64; MAX_DIM] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

/// Icosahedron subdivided twice and projected to the sphere: 162 directions.
fn icosphere_directions() -> Vec<[f64; MAX_DIM]> {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let mut verts: Vec<[f64; 3]> = vec![
        [-1.0, phi, 0.0],
        [1.0, phi, 0.0],
        [-1.0, -phi, 0.0],
        [1.0, -phi, 0.0],
        [0.0, -1.0, phi],
        [0.0, 1.0, phi],
        [0.0, -1.0, -phi],
        [0.0, 1.0, -phi],
        [phi, 0.0, -1.0],
        [phi, 0.0, 1.0],
        [-phi, 0.0, -1.0],
        [-phi, 0.0, 1.0],
    ];
    for v in verts.iter_mut() {
        *v = normalize(*v);
    }
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..2 {
        let mut new_faces = Vec::new();
        let mut midcache: std::collections::HashMap<(usize, usize), usize> =
            std::collections::HashMap::new();
        for f in &faces {
            let mut mid = |a: usize, b: usize, verts: &mut Vec<[f64; 3]>| -> usize {
                let key = (a.min(b), a.max(b));
                if let Some(&i) = midcache.get(&key) {
                    return i;
                }
                let m = normalize([
                    (verts[a][0] + verts[b][0]) / 2.0,
                    (verts[a][1] + verts[b][1]) / 2.0,
                    (verts[a][2] + verts[b][2]) / 2.0,
                ]);
                verts.push(m);
                let i = verts.len() - 1;
                midcache.insert(key, i);
                i
            };
            let ab = mid(f[0], f[1], &mut verts);
            let bc = mid(f[1], f[2], &mut verts);
            let ca = mid(f[2], f[0], &mut verts);
            new_faces.push([f[0], ab, ca]);
            new_faces.push([f[1], bc, ab]);
            new_faces.push([f[2], ca, bc]);
            new_faces.push([ab, bc, ca]);
        }
        faces = new_faces;
    }
    verts
}

/// The concentration deficit
/// `max{1, 1/r} sup_{0<t<r} gamma(E + B_t) - gamma(H(s_E) + B_t)`, with the
/// sup over the lattice-step grid and the half-space side analytic.
#[derive(Clone, Debug)]
pub struct GaussDeficit<T: Scalar = f64> {
    pub delta: T,
    pub s_e: T,
    /// Slack derived from the boundary band of the dilation masses.
    pub slack: T,
    /// The t at which the sup was attained.
    pub argmax_t: T,
}

pub fn gaussian_deficit<T: Scalar>(e: &GridSet<T>, r: T) -> Result<GaussDeficit<T>> {
    if r <= T::zero() {
        return Err(Error::InvalidArgument("deficit radius must be positive".into()));
    }
    let s_e = quantile(e)?;
    let h = e.spacing();
    let eps = lit::<T>(2.0) * h;
    let curve = gauss_dilation_curve(e, r + eps)?;
    let mut ts: Vec<T> = Vec::new();
    let mut t = h;
    while t < r {
        ts.push(t);
        t += h;
    }
    if ts.is_empty() {
        ts.push(r * lit(0.5));
    }
    let mut sup = T::neg_infinity();
    let mut arg = ts[0];
    let mut max_quot = T::zero();
    for &t in &ts {
        let m = curve.measure_within(t);
        let gap = m - phi(s_e + t);
        if gap > sup {
            sup = gap;
            arg = t;
        }
        let quot = (curve.measure_within(t + eps) - m) / eps;
        max_quot = max_quot.max(quot);
    }
    let weight = T::one().max(T::one() / r);
    let slack = lit::<T>(SLACK_COEFF) * h * max_quot * weight;
    Ok(GaussDeficit { delta: weight * sup, s_e, slack, argmax_t: arg })
}

/// `r_E(lambda) = sup { r > 0 : gamma(E + rB) < lambda }`, resolved exactly
/// on the sorted dilation levels (sharper than the h/4 bisection contract).
pub fn concentration_radius<T: Scalar>(e: &GridSet<T>, lambda: T) -> Result<T> {
    let gamma_e = gaussian_measure(e)?;
    if !(gamma_e < lambda && lambda < T::one()) {
        return Err(Error::InvalidArgument(format!(
            "lambda {lambda} outside (gamma(E), 1) = ({gamma_e}, 1)"
        )));
    }
    let s_e = quantile(e)?;
    let mut r_max = (phi_inv(lambda)? - s_e).max(T::one());
    for _ in 0..6 {
        let curve = gauss_dilation_curve(e, r_max)?;
        if let Some(r) = curve.radius_reaching(lambda) {
            return Ok(r);
        }
        r_max = r_max + r_max;
    }
    Err(Error::InvalidArgument("concentration radius out of reach".into()))
}

/// `C_*(v) = (5 + 1280 pi^3)^2 (1 + phi^{-1}(v))^2`.
pub fn concentration_constant<T: Scalar>(v: T) -> Result<T> {
    let q = phi_inv(v)?;
    let base = lit::<T>(5.0) + lit::<T>(1280.0) * T::PI() * T::PI() * T::PI();
    Ok(base * base * (T::one() + q) * (T::one() + q))
}

/// Full quantitative concentration pipeline report.
#[derive(Clone, Debug)]
pub struct GaussReport<T: Scalar = f64> {
    pub s_e: T,
    pub alpha_gamma: T,
    pub deficit: T,
    pub lambda: T,
    pub r_lambda: T,
    pub c_star: T,
    pub slack: T,
    pub tolerance: T,
    pub pass: bool,
    pub witness_nu: [f64; MAX_DIM],
}

impl<T: Scalar> GaussReport<T> {
    pub fn to_report(&self, name: &str, dim: usize, h: T) -> VerificationReport<T> {
        let lhs = crate::scalar::powi(self.alpha_gamma, 4);
        let mut r = VerificationReport::new(name, dim, h)
            .check_leq(lhs, self.c_star * self.deficit, self.tolerance)
            .with_constant(self.c_star);
        r.slack = self.slack;
        r.s_e = Some(self.s_e);
        r.lambda = Some(self.lambda);
        r.r_lambda = Some(self.r_lambda);
        r.nu = Some(format!(
            "({} {} {})",
            self.witness_nu[0], self.witness_nu[1], self.witness_nu[2]
        ));
        r
    }
}

/// Check `alpha_gamma(E)^4 <= C_*(lambda) delta^{r_E(lambda)}(E)` with the
/// boundary-band slack. The measured asymmetry is an upper bound of the true
/// infimum and sits on the small side, so the check stays one-sided.
pub fn check_gaussian_stability<T: Scalar>(e: &GridSet<T>, lambda: T) -> Result<GaussReport<T>> {
    let gamma_e = gaussian_measure(e)?;
    if !(lambda > gamma_e && lambda < T::one()) {
        return Err(Error::InvalidArgument("lambda must lie in (gamma(E), 1)".into()));
    }
    let (alpha, nu) = gaussian_asymmetry(e)?;
    let r_lambda = concentration_radius(e, lambda)?;
    let def = gaussian_deficit(e, r_lambda)?;
    let c_star = concentration_constant(lambda)?;
    let h = e.spacing();
    // alpha's own band slack: boundary of E plus the half-space layer
    let p_gamma = gaussian_perimeter(e)?;
    let sqrt2pi = (lit::<T>(2.0) * T::PI()).sqrt();
    let alpha_slack = lit::<T>(SLACK_COEFF) * h
        * (p_gamma + (-def.s_e * def.s_e * lit::<T>(0.5)).exp())
        / sqrt2pi;
    let tolerance =
        c_star * def.slack + lit::<T>(4.0) * crate::scalar::powi(alpha, 3) * alpha_slack;
    let lhs = crate::scalar::powi(alpha, 4);
    Ok(GaussReport {
        s_e: def.s_e,
        alpha_gamma: alpha,
        deficit: def.delta,
        lambda,
        r_lambda,
        c_star,
        slack: def.slack,
        tolerance,
        pass: lhs <= c_star * def.delta + tolerance,
        witness_nu: nu,
    })
}

/// The CDF/density bridge `|e^{-b^2/2} - e^{-a^2/2}| <=
/// sqrt(2 pi) max{a,b} |phi(a) - phi(b)|` for positive a, b.
pub fn check_cdf_density_bridge<T: Scalar>(a: T, b: T) -> Result<VerificationReport<T>> {
    if a <= T::zero() || b <= T::zero() {
        return Err(Error::InvalidArgument("bridge check needs positive arguments".into()));
    }
    let half = lit::<T>(0.5);
    let lhs = ((-b * b * half).exp() - (-a * a * half).exp()).abs();
    let sqrt2pi = (lit::<T>(2.0) * T::PI()).sqrt();
    let rhs = sqrt2pi * a.max(b) * (phi(a) - phi(b)).abs();
    Ok(VerificationReport::new("cdf_density_bridge", 1, T::one())
        .check_leq(lhs, rhs, lit(1e-14)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::setlib;

    #[test]
    fn phi_round_trip_is_tight() {
        for i in 1..200 {
            let v = i as f64 / 200.0;
            let s = phi_inv(v).unwrap();
            assert!((phi(s) - v).abs() < 1e-12, "v={v} round trip {}", (phi(s) - v).abs());
        }
        assert_eq!(phi(0.0f64), 0.5);
        assert!((phi_inv(0.5f64).unwrap()).abs() < 1e-15);
        assert!(phi_inv(0.0f64).is_err());
        assert!(phi_inv(1.0f64).is_err());
        for s in [-3.0f64, -0.7, 0.4, 2.5] {
            assert!((phi(s) + phi(-s) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn box_halfspace_and_quarter_measures() {
        let h = 1.0 / 16.0;
        let n = (TRUNCATION_RADIUS / h) as i64;
        let full = crate::grid::GridSet::<f64>::from_fn(
            2,
            h,
            [(2 * n) as usize, (2 * n) as usize, 1],
            [-n, -n, 0],
            |_| true,
        )
        .unwrap();
        let m = gaussian_measure(&full).unwrap();
        assert!((m - 1.0).abs() < 1e-8, "box mass {m}");
        let hs = halfspace_set::<f64>(2, h, [1.0, 0.0, 0.0], 0.0).unwrap();
        assert!((gaussian_measure(&hs).unwrap() - 0.5).abs() < 1e-8);
        let q = crate::grid::GridSet::<f64>::from_fn(
            2,
            h,
            [(2 * n) as usize, (2 * n) as usize, 1],
            [-n, -n, 0],
            |g| g[0] < 0 && g[1] < 0,
        )
        .unwrap();
        assert!((gaussian_measure(&q).unwrap() - 0.25).abs() < 1e-8);
    }

    #[test]
    fn truncation_overflow_is_an_error() {
        let h = 0.5;
        let far =
            crate::grid::GridSet::<f64>::from_fn(1, h, [4, 1, 1], [11, 0, 0], |_| true).unwrap();
        assert!(matches!(gaussian_measure(&far), Err(Error::TruncationOverflow)));
    }

    #[test]
    fn quantile_matches_halfspace_level() {
        let h = 1.0 / 32.0;
        let hs = halfspace_set::<f64>(1, h, [1.0, 0.0, 0.0], 1.0).unwrap();
        let s = quantile(&hs).unwrap();
        assert!((s - 1.0).abs() < 1e-7, "s_E = {s}");
        let mut rng = setlib::rng_from_seed(2);
        let e = setlib::random_blob::<f64>(2, h, 1.0, &mut rng).unwrap();
        let m = gaussian_measure(&e).unwrap();
        let s = quantile(&e).unwrap();
        assert!((phi(s) - m).abs() < 1e-10);
    }

    #[test]
    fn halfspace_perimeter_matches_density_formula() {
        let h = 1.0 / 32.0;
        for s in [-1.0f64, 0.0, 1.0] {
            let hs = halfspace_set::<f64>(2, h, [1.0, 0.0, 0.0], s).unwrap();
            let p = gaussian_perimeter(&hs).unwrap();
            let expect = (-s * s / 2.0).exp();
            assert!((p - expect).abs() < 0.05 * expect, "s={s}: P={p} vs {expect}");
        }
        // non-monotone in s: both tails drop below the center value
        let p0 = gaussian_perimeter(&halfspace_set::<f64>(2, h, [1.0, 0.0, 0.0], 0.0).unwrap())
            .unwrap();
        let pm = gaussian_perimeter(&halfspace_set::<f64>(2, h, [1.0, 0.0, 0.0], -2.0).unwrap())
            .unwrap();
        let pp = gaussian_perimeter(&halfspace_set::<f64>(2, h, [1.0, 0.0, 0.0], 2.0).unwrap())
            .unwrap();
        assert!(pm < p0 && pp < p0);
    }

    #[test]
    fn gaussian_isoperimetry_on_blobs() {
        let h = 1.0 / 32.0;
        let mut rng = setlib::rng_from_seed(12);
        for _ in 0..5 {
            let e = setlib::random_blob::<f64>(2, h, 1.2, &mut rng).unwrap();
            let p = gaussian_perimeter(&e).unwrap();
            let s = quantile(&e).unwrap();
            let bound = (-s * s / 2.0).exp();
            let slack = SLACK_COEFF * h * (p + bound);
            assert!(p >= bound - slack, "P {p} vs half-space {bound}");
        }
    }

    #[test]
    fn asymmetry_of_halfspaces_and_witness_recovery() {
        let h = 1.0 / 32.0;
        let hs = halfspace_set::<f64>(2, h, [1.0, 0.0, 0.0], 0.5).unwrap();
        let (a, nu) = gaussian_asymmetry(&hs).unwrap();
        assert!(a < 1e-7, "aligned half-space alpha {a}");
        assert!(nu[0] > 0.99, "witness direction {nu:?}");
        let hs2 = halfspace_set::<f64>(2, h, [-1.0, 0.0, 0.0], 0.25).unwrap();
        let (a2, nu2) = gaussian_asymmetry(&hs2).unwrap();
        assert!(a2 < 1e-7);
        assert!(nu2[0] < -0.99, "witness direction {nu2:?}");
    }

    #[test]
    fn centered_ball_asymmetry_is_one_half() {
        // gamma-measure-1/2 ball: alpha = gamma(B delta H(0)) = 1/2 for every
        // direction (independently derived value).
        let h = 1.0 / 64.0;
        let rho = (2.0 * (2.0f64).ln()).sqrt();
        let e = setlib::disk::<f64>(2, h, [0.0; MAX_DIM], rho).unwrap();
        let m = gaussian_measure(&e).unwrap();
        assert!((m - 0.5).abs() < 2e-3, "ball mass {m}");
        let (a, _) = gaussian_asymmetry(&e).unwrap();
        assert!((a - 0.5).abs() < 5e-3, "alpha {a}");
    }

    #[test]
    fn deficit_vanishes_on_halfspaces_and_radius_identity() {
        let h = 1.0 / 32.0;
        let hs = halfspace_set::<f64>(2, h, [1.0, 0.0, 0.0], 0.5).unwrap();
        let def = gaussian_deficit(&hs, 1.0).unwrap();
        assert!(def.delta.abs() <= 1e-7, "half-space deficit {}", def.delta);
        let lam = 0.9;
        let r = concentration_radius(&hs, lam).unwrap();
        let expect = phi_inv(lam).unwrap() - 0.5;
        assert!((r - expect).abs() <= h, "r_E = {r} vs {expect}");
        let curve = gauss_dilation_curve(&hs, r + 0.1).unwrap();
        assert!(curve.measure_within(r) >= lam - 1e-12);
        assert!(curve.measure_within(r - 2.0 * h) < lam);
    }

    #[test]
    fn deficit_is_nonnegative_within_slack_on_blobs() {
        let h = 1.0 / 32.0;
        let mut rng = setlib::rng_from_seed(21);
        for _ in 0..5 {
            let e = setlib::random_blob::<f64>(2, h, 1.0, &mut rng).unwrap();
            let def = gaussian_deficit(&e, 1.0).unwrap();
            assert!(def.delta >= -def.slack, "delta {} slack {}", def.delta, def.slack);
        }
    }

    #[test]
    fn sigma_grows_at_least_linearly() {
        // s_{E + B_t} >= s_E + t along the dilation family.
        let h = 1.0 / 32.0;
        let mut rng = setlib::rng_from_seed(4);
        let e = setlib::random_blob::<f64>(2, h, 1.2, &mut rng).unwrap();
        let s_e = quantile(&e).unwrap();
        let curve = gauss_dilation_curve(&e, 1.0).unwrap();
        for k in 1..=8 {
            let t = k as f64 * 0.1;
            let m = curve.measure_within(t);
            let sigma = phi_inv(m).unwrap();
            assert!(sigma >= s_e + t - 1e-9, "t={t}: sigma {sigma} vs {}", s_e + t);
        }
    }

    #[test]
    fn concentration_constant_values() {
        // C*(1/2) = (5 + 1280 pi^3)^2, independently evaluated.
        let c = concentration_constant::<f64>(0.5).unwrap();
        assert!((c / 1575536960.0952864 - 1.0).abs() < 1e-9, "C*(1/2) = {c}");
        assert!(concentration_constant::<f64>(0.999).unwrap() > c);
    }

    #[test]
    fn stability_check_on_halfspace_and_ball() {
        let h = 1.0 / 32.0;
        let hs = halfspace_set::<f64>(2, h, [1.0, 0.0, 0.0], 0.0).unwrap();
        let rep = check_gaussian_stability(&hs, 0.9).unwrap();
        assert!(rep.pass, "half-space must pass");
        assert!(rep.alpha_gamma < 1e-7);
        let rho = (2.0 * (2.0f64).ln()).sqrt();
        let ball = setlib::disk::<f64>(2, h, [0.0; MAX_DIM], rho).unwrap();
        let rep = check_gaussian_stability(&ball, 0.9).unwrap();
        assert!(
            rep.pass,
            "ball: lhs {} rhs {}",
            rep.alpha_gamma.powi(4),
            rep.c_star * rep.deficit
        );
        assert!(rep.deficit > 0.0, "a ball is no half-space");
    }

    #[test]
    fn bridge_inequality_samples() {
        assert!(check_cdf_density_bridge(1.0f64, 1.0).unwrap().pass);
        let r = check_cdf_density_bridge(1.0f64, 2.0).unwrap();
        assert!(r.pass && r.lhs < r.rhs, "strict at (1,2)");
        let mut rng = setlib::rng_from_seed(8);
        use rand::Rng;
        for _ in 0..1000 {
            let a = rng.gen_range(1e-6..6.0);
            let b = rng.gen_range(1e-6..6.0);
            assert!(check_cdf_density_bridge(a, b).unwrap().pass, "failed at ({a},{b})");
        }
    }
}
