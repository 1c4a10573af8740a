//! Seeded generators for the verification set libraries: rasterized shapes,
//! random blobs, nested pairs, and perforated balls.
//!
//! All randomness flows through a caller-supplied ChaCha stream so that every
//! library is reproducible bit-for-bit across runs and platforms.

use crate::error::{Error, Result};
use crate::grid::{GridSet, MAX_DIM};
use crate::scalar::{powi, unit_ball_volume, Scalar};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Rasterize the set of points within `radius` of `center` (open ball).
pub fn disk<T: Scalar>(dim: usize, h: T, center: [f64; MAX_DIM], radius: f64) -> Result<GridSet<T>> {
    balls_union(dim, h, &[(center, radius)])
}

/// Union of open balls, on one lattice window covering all of them.
pub fn balls_union<T: Scalar>(
    dim: usize,
    h: T,
    balls: &[([f64; MAX_DIM], f64)],
) -> Result<GridSet<T>> {
    let hf = h.to_f64().unwrap();
    let mut lo = [i64::MAX; MAX_DIM];
    let mut hi = [i64::MIN; MAX_DIM];
    for (c, r) in balls {
        for a in 0..dim {
            lo[a] = lo[a].min(((c[a] - r) / hf).floor() as i64 - 1);
            hi[a] = hi[a].max(((c[a] + r) / hf).ceil() as i64 + 1);
        }
    }
    let mut origin = [0i64; MAX_DIM];
    let mut extent = [1usize; MAX_DIM];
    for a in 0..dim {
        origin[a] = lo[a];
        extent[a] = (hi[a] - lo[a] + 1) as usize;
    }
    GridSet::from_fn(dim, h, extent, origin, |g| {
        let mut x = [0.0; MAX_DIM];
        for a in 0..dim {
            x[a] = hf * (g[a] as f64 + 0.5);
        }
        balls.iter().any(|(c, r)| {
            let mut s = 0.0;
            for a in 0..dim {
                s += (x[a] - c[a]) * (x[a] - c[a]);
            }
            s < r * r
        })
    })
}

/// Axis-aligned solid box `prod [lo_a, hi_a)`.
pub fn solid_box<T: Scalar>(
    dim: usize,
    h: T,
    lo: [f64; MAX_DIM],
    hi: [f64; MAX_DIM],
) -> Result<GridSet<T>> {
    let hf = h.to_f64().unwrap();
    let mut origin = [0i64; MAX_DIM];
    let mut extent = [1usize; MAX_DIM];
    for a in 0..dim {
        origin[a] = (lo[a] / hf).floor() as i64 - 1;
        extent[a] = ((hi[a] / hf).ceil() as i64 - origin[a] + 1) as usize;
    }
    GridSet::from_fn(dim, h, extent, origin, |g| {
        (0..dim).all(|a| {
            let c = hf * (g[a] as f64 + 0.5);
            c > lo[a] && c < hi[a]
        })
    })
}

/// Centered square/cube of the given side.
pub fn centered_cube<T: Scalar>(dim: usize, h: T, side: f64) -> Result<GridSet<T>> {
    let mut lo = [0.0; MAX_DIM];
    let mut hi = [0.0; MAX_DIM];
    for a in 0..dim {
        lo[a] = -side / 2.0;
        hi[a] = side / 2.0;
    }
    solid_box(dim, h, lo, hi)
}

/// L-shape: square of the given side minus its upper-right quadrant.
pub fn l_shape<T: Scalar>(h: T, side: f64) -> Result<GridSet<T>> {
    let full = centered_cube(2, h, side)?;
    let hf = h.to_f64().unwrap();
    let mut out = GridSet::new(2, h, full.extent(), full.origin())?;
    for g in full.occupied_cells() {
        let x = hf * (g[0] as f64 + 0.5);
        let y = hf * (g[1] as f64 + 0.5);
        if !(x > 0.0 && y > 0.0) {
            out.set_global(g, true)?;
        }
    }
    Ok(out)
}

/// Annulus with the given inner and outer radii, centered at the origin.
pub fn annulus<T: Scalar>(h: T, inner: f64, outer: f64) -> Result<GridSet<T>> {
    let hf = h.to_f64().unwrap();
    let o = ((-outer / hf).floor() as i64) - 1;
    let n = (((outer / hf).ceil() as i64) - o + 1) as usize;
    GridSet::from_fn(2, h, [n, n, 1], [o, o, 0], |g| {
        let x = hf * (g[0] as f64 + 0.5);
        let y = hf * (g[1] as f64 + 0.5);
        let r2 = x * x + y * y;
        r2 > inner * inner && r2 < outer * outer
    })
}

/// The two-interval family: `[0,1] u [1+gap, 2+gap]` in d = 1.
pub fn two_intervals<T: Scalar>(h: T, gap: f64) -> Result<GridSet<T>> {
    let hf = h.to_f64().unwrap();
    let o = -2i64;
    let n = (((2.0 + gap) / hf).ceil() as i64 - o + 2) as usize;
    GridSet::from_fn(1, h, [n, 1, 1], [o, 0, 0], |g| {
        let c = hf * (g[0] as f64 + 0.5);
        (c > 0.0 && c < 1.0) || (c > 1.0 + gap && c < 2.0 + gap)
    })
}

/// Random blob: union of 3..=6 disks with seeded centers and radii, scaled
/// to live inside a box of roughly the given size.
pub fn random_blob<T: Scalar>(dim: usize, h: T, size: f64, rng: &mut ChaCha8Rng) -> Result<GridSet<T>> {
    let n = rng.gen_range(3..=6);
    let mut balls = Vec::with_capacity(n);
    for _ in 0..n {
        let mut c = [0.0; MAX_DIM];
        for ca in c.iter_mut().take(dim) {
            *ca = rng.gen_range(-0.3 * size..0.3 * size);
        }
        let r = rng.gen_range(0.15 * size..0.35 * size);
        balls.push((c, r));
    }
    balls_union(dim, h, &balls)
}

/// Random nested pair `E subset F`: a blob and its union with extra disks.
pub fn random_nested_pair<T: Scalar>(
    dim: usize,
    h: T,
    size: f64,
    rng: &mut ChaCha8Rng,
) -> Result<(GridSet<T>, GridSet<T>)> {
    let e = random_blob(dim, h, size, rng)?;
    let extra = rng.gen_range(1..=3);
    let mut balls = Vec::new();
    for _ in 0..extra {
        let mut c = [0.0; MAX_DIM];
        for ca in c.iter_mut().take(dim) {
            *ca = rng.gen_range(-0.4 * size..0.4 * size);
        }
        balls.push((c, rng.gen_range(0.1 * size..0.3 * size)));
    }
    let add = balls_union(dim, h, &balls)?;
    let f = e.union(&add)?;
    Ok((e, f))
}

/// Disk with a seeded radial wobble `r(theta) = rho (1 + amp * sum_k c_k cos(k theta + phi_k))`.
pub fn wobbly_disk<T: Scalar>(
    h: T,
    rho: f64,
    amplitude: f64,
    rng: &mut ChaCha8Rng,
) -> Result<GridSet<T>> {
    let modes: Vec<(f64, f64, f64)> = (2..5)
        .map(|k| (k as f64, rng.gen_range(0.3..1.0), rng.gen_range(0.0..std::f64::consts::TAU)))
        .collect();
    let hf = h.to_f64().unwrap();
    let reach = rho * (1.0 + 3.0 * amplitude) + 2.0 * hf;
    let o = ((-reach / hf).floor() as i64) - 1;
    let n = (((reach / hf).ceil() as i64) - o + 1) as usize;
    GridSet::from_fn(2, h, [n, n, 1], [o, o, 0], |g| {
        let x = hf * (g[0] as f64 + 0.5);
        let y = hf * (g[1] as f64 + 0.5);
        let th = y.atan2(x);
        let mut r = 1.0;
        for (k, c, p) in &modes {
            r += amplitude * c * (k * th + p).cos();
        }
        x * x + y * y < (rho * r) * (rho * r)
    })
}

/// Perforated ball: carve disjoint holes (largest-first, seeded tie-breaks)
/// out of a centered ball of radius `base_radius` until the measure is within
/// 1% of `target`. Hole radii never exceed `max_hole_radius`; at most
/// `max_holes` are used. The holes are disjoint as continuum balls and stay
/// inside the base ball.
pub fn perforated_ball<T: Scalar>(
    dim: usize,
    h: T,
    base_radius: f64,
    target: f64,
    max_holes: usize,
    max_hole_radius: f64,
    seed: u64,
) -> Result<GridSet<T>> {
    let mut rng = rng_from_seed(seed);
    let hf = h.to_f64().unwrap();
    let mut center = [0.0; MAX_DIM];
    center[..dim].fill(0.0);
    let mut e = disk::<T>(dim, h, center, base_radius)?;
    let cell_vol = powi(h, dim).to_f64().unwrap();
    let tol = 0.01 * target;
    if e.measure().to_f64().unwrap() < target - tol {
        return Err(Error::InfeasiblePacking(format!(
            "base ball measure {} below target {target}",
            e.measure()
        )));
    }
    // Clearance per cell: distance to the sphere boundary, shrunk by every
    // carved hole. Negative outside the placeable region.
    let cells = e.occupied_cells();
    let centers: Vec<[f64; MAX_DIM]> = cells
        .iter()
        .map(|g| {
            let mut x = [0.0; MAX_DIM];
            for a in 0..dim {
                x[a] = hf * (g[a] as f64 + 0.5);
            }
            x
        })
        .collect();
    let mut clearance: Vec<f64> = centers
        .iter()
        .map(|x| {
            let r = (0..dim).map(|a| x[a] * x[a]).sum::<f64>().sqrt();
            base_radius - r
        })
        .collect();
    let omega = unit_ball_volume::<f64>(dim);
    let mut holes: Vec<([f64; MAX_DIM], f64)> = Vec::new();
    let mut count = e.count_occupied();
    loop {
        let excess = count as f64 * cell_vol - target;
        if excess.abs() <= tol || excess < 0.0 {
            break;
        }
        if holes.len() >= max_holes {
            return Err(Error::InfeasiblePacking(format!(
                "hole budget {max_holes} exhausted with excess {excess}"
            )));
        }
        // Pick among near-maximal clearances with the seeded stream.
        let best = clearance.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if best < 2.5 * hf {
            return Err(Error::InfeasiblePacking(format!(
                "no room left for holes (clearance {best}), excess {excess}"
            )));
        }
        let cands: Vec<usize> = (0..clearance.len())
            .filter(|&i| clearance[i] >= 0.95 * best)
            .collect();
        let pick = cands[rng.gen_range(0..cands.len())];
        let c = centers[pick];
        // Leave a sliver so continuum holes stay strictly disjoint; cap by
        // the requested maximum and by what the remaining excess needs.
        let mut rho = (clearance[pick] - hf / 8.0).min(max_hole_radius);
        let rho_needed = (excess / omega).powf(1.0 / dim as f64);
        rho = rho.min(rho_needed);
        if rho < 1.5 * hf {
            rho = 1.5 * hf;
        }
        // Carve.
        let rho2 = rho * rho;
        for (i, x) in centers.iter().enumerate() {
            let mut d2 = 0.0;
            for a in 0..dim {
                d2 += (x[a] - c[a]) * (x[a] - c[a]);
            }
            if d2 < rho2 && e.contains_global(cells[i]) {
                e.set_global(cells[i], false)?;
                count -= 1;
            }
            let d = d2.sqrt() - rho;
            if d < clearance[i] {
                clearance[i] = d;
            }
        }
        holes.push((c, rho));
    }
    let m = e.measure().to_f64().unwrap();
    if (m - target).abs() > tol {
        return Err(Error::InfeasiblePacking(format!(
            "final measure {m} misses target {target} by more than 1%"
        )));
    }
    Ok(e)
}
