//! Bounded open convex bodies containing the origin, exposed through their
//! gauge ("Minkowski functional") and dual gauge (support function).
//!
//! Bodies are exact analytic objects and are never rasterized internally, so
//! scaling `K -> rK` is error free. The gauge of `K = {x : ||x|| < 1}` is
//! positively 1-homogeneous; the dual gauge `||y||_* = sup { x.y : ||x|| < 1 }`
//! is the surface weight of the anisotropic perimeter.

use crate::error::{Error, Result};
use crate::grid::{GridSet, MAX_DIM};
use crate::scalar::{lit, powi, unit_ball_volume, Scalar};

#[derive(Clone, Debug)]
pub enum GaugeBody<T: Scalar = f64> {
    /// Euclidean ball of a given radius.
    Ball { dim: usize, radius: T },
    /// Axis-aligned box `prod_a (lo_a, hi_a)` with `lo_a < 0 < hi_a`.
    Boxy { dim: usize, lo: [T; MAX_DIM], hi: [T; MAX_DIM] },
    /// Axis-aligned ellipse/ellipsoid with the given semi-axes.
    Ellipse { dim: usize, semi_axes: [T; MAX_DIM] },
    /// Intersection of half-spaces `n_i . x < c_i`, `c_i > 0`.
    Polytope { dim: usize, halfspaces: Vec<([T; MAX_DIM], T)> },
}

impl<T: Scalar> GaugeBody<T> {
    pub fn ball(dim: usize, radius: T) -> Result<Self> {
        if radius <= T::zero() {
            return Err(Error::InvalidArgument("ball radius must be positive".into()));
        }
        Ok(Self::Ball { dim, radius })
    }

    pub fn unit_ball(dim: usize) -> Self {
        Self::Ball { dim, radius: T::one() }
    }

    /// Box centered on the interval data: requires `lo < 0 < hi` per used axis.
    pub fn boxy(dim: usize, lo: [T; MAX_DIM], hi: [T; MAX_DIM]) -> Result<Self> {
        for a in 0..dim {
            if !(lo[a] < T::zero() && hi[a] > T::zero()) {
                return Err(Error::InvalidArgument("box must contain 0 strictly".into()));
            }
        }
        Ok(Self::Boxy { dim, lo, hi })
    }

    /// Cube `(-s/2, s/2)^d`.
    pub fn cube(dim: usize, side: T) -> Result<Self> {
        let half = side * lit(0.5);
        if half <= T::zero() {
            return Err(Error::InvalidArgument("cube side must be positive".into()));
        }
        let mut lo = [T::zero(); MAX_DIM];
        let mut hi = [T::zero(); MAX_DIM];
        for a in 0..dim {
            lo[a] = -half;
            hi[a] = half;
        }
        Self::boxy(dim, lo, hi)
    }

    pub fn ellipse(dim: usize, semi_axes: [T; MAX_DIM]) -> Result<Self> {
        for a in 0..dim {
            if semi_axes[a] <= T::zero() {
                return Err(Error::InvalidArgument("semi-axes must be positive".into()));
            }
        }
        Ok(Self::Ellipse { dim, semi_axes })
    }

    pub fn polytope(dim: usize, halfspaces: Vec<([T; MAX_DIM], T)>) -> Result<Self> {
        if halfspaces.len() < dim + 1 {
            return Err(Error::InvalidArgument("need at least d+1 half-spaces".into()));
        }
        for (_, c) in &halfspaces {
            if *c <= T::zero() {
                return Err(Error::InvalidArgument(
                    "half-space offsets must be positive (0 interior)".into(),
                ));
            }
        }
        let body = Self::Polytope { dim, halfspaces };
        // Boundedness: every vertex must exist and every sampled direction
        // must see a positive gauge.
        if body.vertices().is_empty() {
            return Err(Error::InvalidArgument("degenerate polytope".into()));
        }
        for dir in sample_directions::<T>(dim) {
            if body.gauge(dir) <= T::zero() {
                return Err(Error::InvalidArgument("polytope is unbounded".into()));
            }
        }
        Ok(body)
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Ball { dim, .. }
            | Self::Boxy { dim, .. }
            | Self::Ellipse { dim, .. }
            | Self::Polytope { dim, .. } => *dim,
        }
    }

    /// The gauge `||x||`: positively 1-homogeneous, zero only at the origin.
    pub fn gauge(&self, x: [T; MAX_DIM]) -> T {
        match self {
            Self::Ball { dim, radius } => {
                let mut s = T::zero();
                for a in 0..*dim {
                    s += x[a] * x[a];
                }
                s.sqrt() / *radius
            }
            Self::Boxy { dim, lo, hi } => {
                let mut m = T::zero();
                for a in 0..*dim {
                    let q = (x[a] / hi[a]).max(x[a] / lo[a]);
                    m = m.max(q);
                }
                m
            }
            Self::Ellipse { dim, semi_axes } => {
                let mut s = T::zero();
                for a in 0..*dim {
                    let q = x[a] / semi_axes[a];
                    s += q * q;
                }
                s.sqrt()
            }
            Self::Polytope { dim, halfspaces } => {
                let mut m = T::zero();
                for (n, c) in halfspaces {
                    let mut dot = T::zero();
                    for a in 0..*dim {
                        dot += n[a] * x[a];
                    }
                    m = m.max(dot / *c);
                }
                m
            }
        }
    }

    /// The dual gauge `||y||_* = sup { x.y : ||x|| < 1 }`.
    pub fn dual_gauge(&self, y: [T; MAX_DIM]) -> T {
        match self {
            Self::Ball { dim, radius } => {
                let mut s = T::zero();
                for a in 0..*dim {
                    s += y[a] * y[a];
                }
                *radius * s.sqrt()
            }
            Self::Boxy { dim, lo, hi } => {
                let mut s = T::zero();
                for a in 0..*dim {
                    s += (hi[a] * y[a]).max(lo[a] * y[a]);
                }
                s
            }
            Self::Ellipse { dim, semi_axes } => {
                let mut s = T::zero();
                for a in 0..*dim {
                    let q = semi_axes[a] * y[a];
                    s += q * q;
                }
                s.sqrt()
            }
            Self::Polytope { .. } => {
                // Attained at a vertex of the polytope.
                let mut m = T::neg_infinity();
                for v in self.vertices() {
                    let mut dot = T::zero();
                    for a in 0..self.dim() {
                        dot += v[a] * y[a];
                    }
                    m = m.max(dot);
                }
                m.max(T::zero())
            }
        }
    }

    /// Volume of the body; analytic except for 3-d polytopes, which are
    /// grid-measured with one Richardson refinement.
    pub fn volume(&self) -> T {
        match self {
            Self::Ball { dim, radius } => unit_ball_volume::<T>(*dim) * powi(*radius, *dim),
            Self::Boxy { dim, lo, hi } => {
                let mut v = T::one();
                for a in 0..*dim {
                    v = v * (hi[a] - lo[a]);
                }
                v
            }
            Self::Ellipse { dim, semi_axes } => {
                let mut v = unit_ball_volume::<T>(*dim);
                for a in 0..*dim {
                    v = v * semi_axes[a];
                }
                v
            }
            Self::Polytope { dim, .. } => match dim {
                1 => {
                    let (lo, hi) = self.extent_axis(0);
                    hi - lo
                }
                2 => {
                    // Shoelace on the angularly sorted vertex hull.
                    let mut vs = self.vertices();
                    vs.sort_by(|p, q| {
                        let ap = p[1].to_f64().unwrap().atan2(p[0].to_f64().unwrap());
                        let aq = q[1].to_f64().unwrap().atan2(q[0].to_f64().unwrap());
                        ap.partial_cmp(&aq).unwrap()
                    });
                    let mut area = T::zero();
                    let n = vs.len();
                    for i in 0..n {
                        let p = vs[i];
                        let q = vs[(i + 1) % n];
                        area += p[0] * q[1] - q[0] * p[1];
                    }
                    (area * lit(0.5)).abs()
                }
                _ => self.grid_volume(),
            },
        }
    }

    fn grid_volume(&self) -> T {
        let coarse = self.raster_count(96);
        let fine = self.raster_count(192);
        // First-order Richardson: error ~ h, halved on refinement.
        fine + fine - coarse
    }

    fn raster_count(&self, n: usize) -> T {
        let d = self.dim();
        let mut reach = T::zero();
        for a in 0..d {
            let (lo, hi) = self.extent_axis(a);
            reach = reach.max(hi.abs().max(lo.abs()));
        }
        let h = reach * lit(2.0) / T::from_usize(n).unwrap();
        let half = n as i64 / 2 + 1;
        let mut count = 0usize;
        let hb = if d >= 2 { half } else { 0 };
        let hc = if d >= 3 { half } else { 0 };
        for iz in -hc..=hc {
            for iy in -hb..=hb {
                for ix in -half..=half {
                    let x = [
                        h * (T::from_i64(ix).unwrap() + lit(0.5)),
                        h * (T::from_i64(iy).unwrap() + lit(0.5)),
                        h * (T::from_i64(iz).unwrap() + lit(0.5)),
                    ];
                    if self.gauge(x) < T::one() {
                        count += 1;
                    }
                }
            }
        }
        T::from_usize(count).unwrap() * powi(h, d)
    }

    /// `rK`: the homothetic copy with gauge `||x||/r`.
    pub fn scale(&self, r: T) -> Self {
        match self {
            Self::Ball { dim, radius } => Self::Ball { dim: *dim, radius: *radius * r },
            Self::Boxy { dim, lo, hi } => {
                let mut l = *lo;
                let mut u = *hi;
                for a in 0..*dim {
                    l[a] = l[a] * r;
                    u[a] = u[a] * r;
                }
                Self::Boxy { dim: *dim, lo: l, hi: u }
            }
            Self::Ellipse { dim, semi_axes } => {
                let mut s = *semi_axes;
                for a in 0..*dim {
                    s[a] = s[a] * r;
                }
                Self::Ellipse { dim: *dim, semi_axes: s }
            }
            Self::Polytope { dim, halfspaces } => Self::Polytope {
                dim: *dim,
                halfspaces: halfspaces.iter().map(|(n, c)| (*n, *c * r)).collect(),
            },
        }
    }

    /// The reflected body `-K`, with gauge `x -> ||-x||`.
    pub fn reflect(&self) -> Self {
        match self {
            Self::Ball { .. } | Self::Ellipse { .. } => self.clone(),
            Self::Boxy { dim, lo, hi } => {
                let mut l = [T::zero(); MAX_DIM];
                let mut u = [T::zero(); MAX_DIM];
                for a in 0..*dim {
                    l[a] = -hi[a];
                    u[a] = -lo[a];
                }
                Self::Boxy { dim: *dim, lo: l, hi: u }
            }
            Self::Polytope { dim, halfspaces } => Self::Polytope {
                dim: *dim,
                halfspaces: halfspaces
                    .iter()
                    .map(|(n, c)| {
                        let mut m = [T::zero(); MAX_DIM];
                        for a in 0..*dim {
                            m[a] = -n[a];
                        }
                        (m, *c)
                    })
                    .collect(),
            },
        }
    }

    /// Reach of the body along axis `a`: `(inf x_a, sup x_a)` over `K`.
    pub fn extent_axis(&self, a: usize) -> (T, T) {
        match self {
            Self::Ball { radius, .. } => (-*radius, *radius),
            Self::Boxy { lo, hi, .. } => (lo[a], hi[a]),
            Self::Ellipse { semi_axes, .. } => (-semi_axes[a], semi_axes[a]),
            Self::Polytope { .. } => {
                let mut lo = T::zero();
                let mut hi = T::zero();
                for v in self.vertices() {
                    lo = lo.min(v[a]);
                    hi = hi.max(v[a]);
                }
                (lo, hi)
            }
        }
    }

    /// Vertices of a polytope body (empty for the other families).
    pub fn vertices(&self) -> Vec<[T; MAX_DIM]> {
        let Self::Polytope { dim, halfspaces } = self else {
            return Vec::new();
        };
        let d = *dim;
        let m = halfspaces.len();
        let mut out: Vec<[T; MAX_DIM]> = Vec::new();
        let eps = lit::<T>(1e-9);
        let mut subsets: Vec<Vec<usize>> = Vec::new();
        match d {
            1 => {
                for i in 0..m {
                    subsets.push(vec![i]);
                }
            }
            2 => {
                for i in 0..m {
                    for j in i + 1..m {
                        subsets.push(vec![i, j]);
                    }
                }
            }
            _ => {
                for i in 0..m {
                    for j in i + 1..m {
                        for k in j + 1..m {
                            subsets.push(vec![i, j, k]);
                        }
                    }
                }
            }
        }
        for sub in subsets {
            if let Some(x) = solve_active(halfspaces, &sub, d) {
                let feasible = halfspaces.iter().all(|(n, c)| {
                    let mut dot = T::zero();
                    for a in 0..d {
                        dot += n[a] * x[a];
                    }
                    dot <= *c * (T::one() + eps) + eps
                });
                if feasible && !out.iter().any(|v| close(v, &x, d, eps)) {
                    out.push(x);
                }
            }
        }
        out
    }
}

fn close<T: Scalar>(a: &[T; MAX_DIM], b: &[T; MAX_DIM], d: usize, eps: T) -> bool {
    (0..d).all(|i| (a[i] - b[i]).abs() <= eps * (T::one() + a[i].abs() + b[i].abs()))
}

/// Solve the d x d system given by the active constraints, by Gaussian
/// elimination with partial pivoting. None if singular.
fn solve_active<T: Scalar>(
    halfspaces: &[([T; MAX_DIM], T)],
    active: &[usize],
    d: usize,
) -> Option<[T; MAX_DIM]> {
    let mut a = [[T::zero(); 4]; MAX_DIM];
    for (row, &i) in active.iter().enumerate() {
        let (n, c) = &halfspaces[i];
        for col in 0..d {
            a[row][col] = n[col];
        }
        a[row][3] = *c;
    }
    for col in 0..d {
        let mut piv = col;
        for r in col + 1..d {
            if a[r][col].abs() > a[piv][col].abs() {
                piv = r;
            }
        }
        if a[piv][col].abs() < lit(1e-13) {
            return None;
        }
        a.swap(col, piv);
        for r in 0..d {
            if r != col {
                let f = a[r][col] / a[col][col];
                for c in 0..4 {
                    a[r][c] = a[r][c] - f * a[col][c];
                }
            }
        }
    }
    let mut x = [T::zero(); MAX_DIM];
    for i in 0..d {
        x[i] = a[i][3] / a[i][i];
    }
    Some(x)
}

fn sample_directions<T: Scalar>(dim: usize) -> Vec<[T; MAX_DIM]> {
    let mut dirs = Vec::new();
    for a in 0..dim {
        for s in [T::one(), -T::one()] {
            let mut e = [T::zero(); MAX_DIM];
            e[a] = s;
            dirs.push(e);
        }
    }
    let n = 16;
    for i in 0..n {
        let th = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
        let mut e = [T::zero(); MAX_DIM];
        e[0] = lit(th.cos());
        if dim >= 2 {
            e[1] = lit(th.sin());
        }
        dirs.push(e);
    }
    dirs
}

/// Rasterize the open body `rK` onto a lattice: cells whose center satisfies
/// `gauge(center) < r`. The window is tight around the body.
pub fn rasterize<T: Scalar>(k: &GaugeBody<T>, r: T, h: T) -> Result<GridSet<T>> {
    if r <= T::zero() {
        return Err(Error::InvalidArgument("rasterization radius must be positive".into()));
    }
    let d = k.dim();
    let mut origin = [0i64; MAX_DIM];
    let mut extent = [1usize; MAX_DIM];
    for a in 0..d {
        let (lo, hi) = k.extent_axis(a);
        let lo_cell = ((lo * r) / h).to_f64().unwrap().floor() as i64 - 1;
        let hi_cell = ((hi * r) / h).to_f64().unwrap().ceil() as i64 + 1;
        origin[a] = lo_cell;
        extent[a] = (hi_cell - lo_cell + 1) as usize;
    }
    let mut s = GridSet::new(d, h, extent, origin)?;
    let half = lit::<T>(0.5);
    for iz in 0..extent[2] {
        for iy in 0..extent[1] {
            for ix in 0..extent[0] {
                let g = [origin[0] + ix as i64, origin[1] + iy as i64, origin[2] + iz as i64];
                let mut c = [T::zero(); MAX_DIM];
                for a in 0..d {
                    c[a] = h * (T::from_i64(g[a]).unwrap() + half);
                }
                if k.gauge(c) < r {
                    s.set_index([ix, iy, iz], true);
                }
            }
        }
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bodies() -> Vec<GaugeBody<f64>> {
        vec![
            GaugeBody::ball(2, 1.0).unwrap(),
            GaugeBody::ball(2, 0.7).unwrap(),
            GaugeBody::boxy(2, [-0.5, -0.25, 0.0], [0.5, 0.75, 0.0]).unwrap(),
            GaugeBody::ellipse(2, [1.5, 0.5, 0.0]).unwrap(),
            // right triangle-ish polytope containing 0
            GaugeBody::polytope(
                2,
                vec![
                    ([1.0, 0.0, 0.0], 1.0),
                    ([0.0, 1.0, 0.0], 1.0),
                    ([-1.0, -1.0, 0.0], 0.5),
                ],
            )
            .unwrap(),
        ]
    }

    #[test]
    fn gauge_is_positively_homogeneous() {
        for k in bodies() {
            for x in [[0.3, -0.2, 0.0], [1.0, 2.0, 0.0], [-0.7, 0.1, 0.0]] {
                let g1 = k.gauge(x);
                for t in [0.5, 2.0, 7.3] {
                    let xt = [x[0] * t, x[1] * t, 0.0];
                    assert!((k.gauge(xt) - t * g1).abs() < 1e-12 * (1.0 + t * g1));
                }
            }
            assert_eq!(k.gauge([0.0; 3]), 0.0);
            assert!(k.gauge([0.1, 0.0, 0.0]) > 0.0);
        }
    }

    #[test]
    fn duality_inequality_holds_on_samples() {
        for k in bodies() {
            for x in [[0.4, 0.3, 0.0], [-1.0, 0.2, 0.0], [0.05, -0.9, 0.0]] {
                for y in [[1.0, 0.0, 0.0], [0.3, -0.8, 0.0], [-0.5, -0.5, 0.0]] {
                    let dot = x[0] * y[0] + x[1] * y[1];
                    assert!(
                        dot <= k.gauge(x) * k.dual_gauge(y) + 1e-12,
                        "duality failed for {k:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn volumes_and_scaling() {
        let b = GaugeBody::ball(2, 1.0).unwrap();
        assert!((b.volume() - std::f64::consts::PI).abs() < 1e-14);
        let c = GaugeBody::<f64>::cube(3, 2.0).unwrap();
        assert!((c.volume() - 8.0).abs() < 1e-14);
        for k in bodies() {
            let v = k.volume();
            for r in [0.5, 2.0] {
                let vr = k.scale(r).volume();
                assert!(
                    (vr - r.powi(k.dim() as i32) * v).abs() < 1e-10 * (1.0 + vr),
                    "|rK| = r^d |K| failed for {k:?}"
                );
            }
            // scale by 1 is identity on the gauge
            let x = [0.3, -0.4, 0.0];
            assert!((k.scale(1.0).gauge(x) - k.gauge(x)).abs() < 1e-15);
        }
    }

    #[test]
    fn polytope_vertices_of_a_square() {
        let k = GaugeBody::<f64>::polytope(
            2,
            vec![
                ([1.0, 0.0, 0.0], 0.5),
                ([-1.0, 0.0, 0.0], 0.5),
                ([0.0, 1.0, 0.0], 0.5),
                ([0.0, -1.0, 0.0], 0.5),
            ],
        )
        .unwrap();
        let vs = k.vertices();
        assert_eq!(vs.len(), 4);
        assert!((k.volume() - 1.0).abs() < 1e-12);
        // dual gauge of the unit square at (1,1) is 1
        assert!((k.dual_gauge([1.0, 1.0, 0.0]) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn aligned_box_rasterizes_exactly() {
        let k = GaugeBody::cube(2, 1.0).unwrap();
        let e = rasterize(&k, 1.0, 1.0 / 64.0).unwrap();
        assert_eq!(e.measure(), 1.0);
    }

    #[test]
    fn disk_measure_converges_to_pi() {
        // Richardson extrapolation over two refinements as an independent
        // oracle for the measure of the unit disk.
        let k = GaugeBody::ball(2, 1.0).unwrap();
        let v1 = rasterize(&k, 1.0, 1.0 / 64.0).unwrap().measure();
        let v2 = rasterize(&k, 1.0, 1.0 / 128.0).unwrap().measure();
        assert!((v2 - std::f64::consts::PI).abs() < 0.02 * std::f64::consts::PI);
        let extrap = v2 + (v2 - v1);
        assert!((extrap - std::f64::consts::PI).abs() < 0.005 * std::f64::consts::PI);
    }
}
