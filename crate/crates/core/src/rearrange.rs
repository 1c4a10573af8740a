//! Symmetric decreasing rearrangement of sets and functions, layer-cake
//! machinery, and the Riesz-triple check.
//!
//! The canonical cell order (increasing Euclidean center distance, ties
//! lexicographic) makes rearrangement deterministic, exactly
//! measure-preserving and idempotent: `E*` is the prefix of that order with
//! `|E|` cells, and `f*` places the sorted value multiset onto the same
//! prefix, so equimeasurability holds level by level with no quadrature.

use crate::convolve::{correlate_fft_on, correlate_on, Stencil, DIRECT_LIMIT};
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::grid::{GridSet, MAX_DIM};
use crate::report::VerificationReport;
use crate::scalar::{lit, unit_ball_volume, Scalar};

/// Slack coefficient shared with the geometric checks.
pub const SLACK_COEFF: f64 = 4.0;

/// The first `count` cells in the canonical order: increasing
/// `|center|^2 = sum (2 g_a + 1)^2` (an exact integer), ties broken
/// lexicographically on the coordinate triple.
pub fn canonical_cells(dim: usize, count: usize) -> Vec<[i64; MAX_DIM]> {
    if count == 0 {
        return Vec::new();
    }
    let omega = unit_ball_volume::<f64>(dim);
    let rho = (count as f64 / omega).powf(1.0 / dim as f64);
    let m = rho.ceil() as i64 + 3;
    let range = |used: bool| if used { -m..m } else { 0..1i64 };
    let mut cells: Vec<([i64; MAX_DIM], i64)> = Vec::new();
    for gz in range(dim >= 3) {
        for gy in range(dim >= 2) {
            for gx in -m..m {
                let g = [gx, gy, gz];
                let mut key = 0i64;
                for v in g.iter().take(dim) {
                    key += (2 * v + 1) * (2 * v + 1);
                }
                cells.push((g, key));
            }
        }
    }
    cells.sort_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)));
    assert!(cells.len() >= count, "canonical window too small");
    cells.truncate(count);
    cells.into_iter().map(|(g, _)| g).collect()
}

/// The centered quasi-ball with exactly as many cells as `E`.
pub fn rearrange_set<T: Scalar>(e: &GridSet<T>) -> GridSet<T> {
    let count = e.count_occupied();
    let cells = canonical_cells(e.dim(), count);
    let mut lo = [0i64; MAX_DIM];
    let mut hi = [0i64; MAX_DIM];
    for g in &cells {
        for a in 0..MAX_DIM {
            lo[a] = lo[a].min(g[a]);
            hi[a] = hi[a].max(g[a]);
        }
    }
    let mut extent = [1usize; MAX_DIM];
    for a in 0..e.dim() {
        extent[a] = (hi[a] - lo[a] + 1).max(1) as usize;
    }
    let mut out = GridSet::new(e.dim(), e.spacing(), extent, lo).unwrap();
    for g in cells {
        out.set_global(g, true).unwrap();
    }
    out
}

/// Symmetric decreasing rearrangement of a nonnegative field: the exact
/// value multiset is placed onto the canonical prefix.
pub fn rearrange_field<T: Scalar>(f: &ScalarField<T>) -> Result<ScalarField<T>> {
    let mut vals: Vec<T> = Vec::new();
    for &v in f.values() {
        if v < T::zero() {
            return Err(Error::InvalidArgument("rearrangement needs nonnegative values".into()));
        }
        if v > T::zero() {
            vals.push(v);
        }
    }
    vals.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let cells = canonical_cells(f.dim(), vals.len());
    let mut lo = [0i64; MAX_DIM];
    let mut hi = [0i64; MAX_DIM];
    for g in &cells {
        for a in 0..MAX_DIM {
            lo[a] = lo[a].min(g[a]);
            hi[a] = hi[a].max(g[a]);
        }
    }
    let mut extent = [1usize; MAX_DIM];
    for a in 0..f.dim() {
        extent[a] = (hi[a] - lo[a] + 1).max(1) as usize;
    }
    let mut out = ScalarField::zeros(f.dim(), f.spacing(), extent, lo)?;
    for (g, v) in cells.into_iter().zip(vals) {
        out.set_global(g, v)?;
    }
    Ok(out)
}

/// Super-level decomposition over the exact set of distinct positive values:
/// `f = sum_i w_i 1_{S_i}` with nested slices and telescoping weights.
pub struct LevelDecomposition<T: Scalar = f64> {
    pub thresholds: Vec<T>,
    pub slices: Vec<GridSet<T>>,
    pub weights: Vec<T>,
}

pub fn level_decomposition<T: Scalar>(f: &ScalarField<T>) -> Result<LevelDecomposition<T>> {
    let mut levels: Vec<T> = f.values().iter().copied().filter(|v| *v > T::zero()).collect();
    levels.sort_by(|a, b| a.partial_cmp(b).unwrap());
    levels.dedup();
    let mut thresholds = Vec::with_capacity(levels.len());
    let mut slices = Vec::with_capacity(levels.len());
    let mut weights = Vec::with_capacity(levels.len());
    let mut prev = T::zero();
    for &v in &levels {
        thresholds.push(v);
        slices.push(f.super_level_set(prev));
        weights.push(v - prev);
        prev = v;
    }
    Ok(LevelDecomposition { thresholds, slices, weights })
}

/// Rebuild the field from its decomposition; exact up to float addition.
pub fn reconstruct<T: Scalar>(ld: &LevelDecomposition<T>, like: &ScalarField<T>) -> ScalarField<T> {
    let mut out = ScalarField::zeros(like.dim(), like.spacing(), like.extent(), like.origin())
        .expect("valid lattice");
    for (slice, &w) in ld.slices.iter().zip(&ld.weights) {
        for g in slice.occupied_cells() {
            let v = out.get_global(g) + w;
            out.set_global(g, v).unwrap();
        }
    }
    out
}

/// A radial profile extracted from a lattice field: values per distinct
/// center radius, increasing.
pub struct RadialProfile<T: Scalar = f64> {
    pub radii: Vec<T>,
    pub values: Vec<T>,
}

/// Extract the radial profile of a field centered at the origin; errors if
/// two cells at the same center radius carry different values.
pub fn radial_profile<T: Scalar>(f: &ScalarField<T>) -> Result<RadialProfile<T>> {
    use std::collections::BTreeMap;
    let mut bins: BTreeMap<i64, T> = BTreeMap::new();
    for (i, g) in f.cells().enumerate() {
        let v = f.values()[i];
        let mut key = 0i64;
        for a in 0..f.dim() {
            key += (2 * g[a] + 1) * (2 * g[a] + 1);
        }
        match bins.get(&key) {
            None => {
                bins.insert(key, v);
            }
            Some(&u) => {
                if (u - v).abs() > lit::<T>(1e-12) * (T::one() + u.abs()) {
                    return Err(Error::InvalidArgument(format!(
                        "field is not radial at squared key {key}"
                    )));
                }
            }
        }
    }
    let h = f.spacing();
    let half = lit::<T>(0.5);
    let mut radii = Vec::with_capacity(bins.len());
    let mut values = Vec::with_capacity(bins.len());
    for (key, v) in bins {
        radii.push(h * half * T::from_i64(key).unwrap().sqrt());
        values.push(v);
    }
    Ok(RadialProfile { radii, values })
}

/// Whether every centered lattice ball is a super-level set of the radial
/// field `g`, i.e. its profile is strictly decreasing on its support (up to
/// lattice resolution). Plateaus disqualify.
pub fn lieb_condition<T: Scalar>(g: &ScalarField<T>) -> Result<bool> {
    let prof = radial_profile(g)?;
    // trim trailing zeros (outside the support)
    let mut last = prof.values.len();
    while last > 0 && prof.values[last - 1] == T::zero() {
        last -= 1;
    }
    if last == 0 {
        return Ok(false);
    }
    for i in 1..last {
        if !(prof.values[i] < prof.values[i - 1]) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Radial kernel weights (exact center-distance evaluation) as a stencil.
pub fn radial_stencil<T: Scalar>(
    dim: usize,
    h: T,
    range: T,
    mut profile: impl FnMut(T) -> T,
) -> Stencil<T> {
    let rc = (range / h).to_f64().unwrap().ceil() as i64;
    let mut offsets = Vec::new();
    let used = |a: usize| if a < dim { -rc..=rc } else { 0..=0i64 };
    for oz in used(2) {
        for oy in used(1) {
            for ox in used(0) {
                let mut d2 = T::zero();
                for &o in &[ox, oy, oz] {
                    let of = T::from_i64(o).unwrap() * h;
                    d2 += of * of;
                }
                let r = d2.sqrt();
                if r <= range {
                    let w = profile(r);
                    if w != T::zero() {
                        offsets.push(([ox, oy, oz], w));
                    }
                }
            }
        }
    }
    Stencil::new(offsets)
}

/// The triple sum `h^{2d} sum_{x,y} f(x) g(x - y) q(y)` for a radial `g`
/// given as a stencil over lattice offsets.
pub fn riesz_triple<T: Scalar>(
    f: &ScalarField<T>,
    g: &Stencil<T>,
    q: &ScalarField<T>,
) -> Result<T> {
    if !f.same_lattice(q) {
        return Err(Error::LatticeMismatch("riesz triple fields".into()));
    }
    let nnz = q.values().iter().filter(|v| **v != T::zero()).count();
    let conv = if nnz <= DIRECT_LIMIT {
        correlate_on(q, g, f.origin(), f.extent())?
    } else {
        correlate_fft_on(q, g, f.origin(), f.extent())?
    };
    let mut acc = T::zero();
    for (fv, cv) in f.values().iter().zip(conv.values()) {
        acc += *fv * *cv;
    }
    Ok(acc * f.cell_volume() * q.cell_volume())
}

/// Riesz rearrangement check: the original triple never exceeds the
/// rearranged one beyond the quadrature slack. `g` must be radial
/// nonincreasing (it is its own rearrangement); `lip_g` is its Lipschitz
/// constant for the slack model.
pub fn check_riesz_triple<T: Scalar>(
    f: &ScalarField<T>,
    g: &Stencil<T>,
    q: &ScalarField<T>,
    lip_g: T,
) -> Result<VerificationReport<T>> {
    let original = riesz_triple(f, g, q)?;
    let fr = rearrange_field(f)?;
    let qr = rearrange_field(q)?;
    let rearranged = riesz_triple(&fr, g, &qr)?;
    let h = f.spacing();
    let d = f.dim();
    let sqrt_d = T::from_usize(d).unwrap().sqrt();
    let l1f = f.integral();
    let l1q = q.integral();
    let supmax = f
        .values()
        .iter()
        .chain(q.values())
        .fold(T::zero(), |m, &v| m.max(v))
        .max(T::one());
    let slack = lit::<T>(SLACK_COEFF) * h * lip_g * sqrt_d * l1f.min(l1q) * supmax;
    Ok(VerificationReport::new("riesz_triple", d, h).check_leq(original, rearranged, slack))
}
