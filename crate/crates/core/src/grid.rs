//! Occupancy masks on a uniform lattice.
//!
//! A cell with global integer coordinates `g` covers the cube
//! `h*g + [0,h]^d` and has its center at `h*(g + 1/2)`. A [`GridSet`] stores a
//! finite window of such cells as a bitmask; the measure of the set is exactly
//! `h^d` times the number of occupied cells, so Boolean operations and
//! symmetric differences are free of discretization error.

use crate::error::{Error, Result};
use crate::scalar::{powi, Scalar};

pub const MAX_DIM: usize = 3;

#[derive(Clone, Debug)]
pub struct GridSet<T: Scalar = f64> {
    dim: usize,
    h: T,
    extent: [usize; MAX_DIM],
    origin: [i64; MAX_DIM],
    words: Vec<u64>,
}

impl<T: Scalar> GridSet<T> {
    /// Empty mask over a given window. Unused axes must have extent 1.
    pub fn new(dim: usize, h: T, extent: [usize; MAX_DIM], origin: [i64; MAX_DIM]) -> Result<Self> {
        if !(1..=MAX_DIM).contains(&dim) {
            return Err(Error::InvalidArgument(format!("dim must be 1..=3, got {dim}")));
        }
        if !(h > T::zero()) || !h.is_finite() {
            return Err(Error::InvalidArgument("spacing h must be positive".into()));
        }
        for a in 0..MAX_DIM {
            if extent[a] == 0 {
                return Err(Error::InvalidArgument("extents must be >= 1".into()));
            }
            if a >= dim && extent[a] != 1 {
                return Err(Error::InvalidArgument("unused axes must have extent 1".into()));
            }
        }
        let ncells = extent[0] * extent[1] * extent[2];
        Ok(Self { dim, h, extent, origin, words: vec![0; ncells.div_ceil(64)] })
    }

    /// Mask built from a predicate on global cell coordinates.
    pub fn from_fn(
        dim: usize,
        h: T,
        extent: [usize; MAX_DIM],
        origin: [i64; MAX_DIM],
        mut f: impl FnMut([i64; MAX_DIM]) -> bool,
    ) -> Result<Self> {
        let mut s = Self::new(dim, h, extent, origin)?;
        for iz in 0..extent[2] {
            for iy in 0..extent[1] {
                for ix in 0..extent[0] {
                    let g = [origin[0] + ix as i64, origin[1] + iy as i64, origin[2] + iz as i64];
                    if f(g) {
                        s.set_index([ix, iy, iz], true);
                    }
                }
            }
        }
        Ok(s)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn spacing(&self) -> T {
        self.h
    }
    pub fn extent(&self) -> [usize; MAX_DIM] {
        self.extent
    }
    pub fn origin(&self) -> [i64; MAX_DIM] {
        self.origin
    }
    pub fn cell_volume(&self) -> T {
        powi(self.h, self.dim)
    }

    #[inline]
    fn flat(&self, idx: [usize; MAX_DIM]) -> usize {
        idx[0] + self.extent[0] * (idx[1] + self.extent[1] * idx[2])
    }

    #[inline]
    pub fn get_index(&self, idx: [usize; MAX_DIM]) -> bool {
        let f = self.flat(idx);
        self.words[f >> 6] >> (f & 63) & 1 == 1
    }

    #[inline]
    pub fn set_index(&mut self, idx: [usize; MAX_DIM], v: bool) {
        let f = self.flat(idx);
        if v {
            self.words[f >> 6] |= 1 << (f & 63);
        } else {
            self.words[f >> 6] &= !(1 << (f & 63));
        }
    }

    /// Membership by global cell coordinates; cells outside the window are empty.
    #[inline]
    pub fn contains_global(&self, g: [i64; MAX_DIM]) -> bool {
        let mut idx = [0usize; MAX_DIM];
        for a in 0..MAX_DIM {
            let r = g[a] - self.origin[a];
            if r < 0 || r >= self.extent[a] as i64 {
                return false;
            }
            idx[a] = r as usize;
        }
        self.get_index(idx)
    }

    #[inline]
    pub fn set_global(&mut self, g: [i64; MAX_DIM], v: bool) -> Result<()> {
        let mut idx = [0usize; MAX_DIM];
        for a in 0..MAX_DIM {
            let r = g[a] - self.origin[a];
            if r < 0 || r >= self.extent[a] as i64 {
                return Err(Error::InvalidArgument("cell outside the mask window".into()));
            }
            idx[a] = r as usize;
        }
        self.set_index(idx, v);
        Ok(())
    }

    /// Center of the cell with global coordinates `g`.
    #[inline]
    pub fn center(&self, g: [i64; MAX_DIM]) -> [T; MAX_DIM] {
        let half = T::from_f64(0.5).unwrap();
        let mut c = [T::zero(); MAX_DIM];
        for a in 0..self.dim {
            c[a] = self.h * (T::from_i64(g[a]).unwrap() + half);
        }
        c
    }

    pub fn count_occupied(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Lebesgue measure: exactly `h^d` per occupied cell.
    pub fn measure(&self) -> T {
        T::from_usize(self.count_occupied()).unwrap() * self.cell_volume()
    }

    /// Global coordinates of all occupied cells, in row-major order.
    pub fn occupied_cells(&self) -> Vec<[i64; MAX_DIM]> {
        let mut out = Vec::with_capacity(self.count_occupied());
        for iz in 0..self.extent[2] {
            for iy in 0..self.extent[1] {
                let base = self.extent[0] * (iy + self.extent[1] * iz);
                for ix in 0..self.extent[0] {
                    let f = base + ix;
                    if self.words[f >> 6] >> (f & 63) & 1 == 1 {
                        out.push([
                            self.origin[0] + ix as i64,
                            self.origin[1] + iy as i64,
                            self.origin[2] + iz as i64,
                        ]);
                    }
                }
            }
        }
        out
    }

    /// Occupied cells that have at least one unoccupied axis neighbor.
    pub fn boundary_cells(&self) -> Vec<[i64; MAX_DIM]> {
        self.occupied_cells()
            .into_iter()
            .filter(|&g| {
                (0..self.dim).any(|a| {
                    let mut p = g;
                    p[a] += 1;
                    let mut m = g;
                    m[a] -= 1;
                    !self.contains_global(p) || !self.contains_global(m)
                })
            })
            .collect()
    }

    /// Smallest and largest occupied global coordinates, or None if empty.
    pub fn bounding_box(&self) -> Option<([i64; MAX_DIM], [i64; MAX_DIM])> {
        let mut lo = [i64::MAX; MAX_DIM];
        let mut hi = [i64::MIN; MAX_DIM];
        let mut any = false;
        for g in self.occupied_cells() {
            any = true;
            for a in 0..MAX_DIM {
                lo[a] = lo[a].min(g[a]);
                hi[a] = hi[a].max(g[a]);
            }
        }
        if any {
            Some((lo, hi))
        } else {
            None
        }
    }

    pub fn same_lattice(&self, other: &Self) -> bool {
        self.dim == other.dim && self.h == other.h
    }

    fn require_same_lattice(&self, other: &Self) -> Result<()> {
        if !self.same_lattice(other) {
            return Err(Error::LatticeMismatch(format!(
                "dim {} h {} vs dim {} h {}",
                self.dim, self.h, other.dim, other.h
            )));
        }
        Ok(())
    }

    /// Exact translation by a lattice vector.
    pub fn translate(&self, shift: [i64; MAX_DIM]) -> Self {
        let mut out = self.clone();
        for a in 0..MAX_DIM {
            out.origin[a] += shift[a];
        }
        out
    }

    /// |E Δ F|, exact on the common lattice.
    pub fn symm_diff_measure(&self, other: &Self) -> Result<T> {
        self.require_same_lattice(other)?;
        let overlap = self.overlap_count(other, [0, 0, 0]);
        let n = self.count_occupied() + other.count_occupied() - 2 * overlap;
        Ok(T::from_usize(n).unwrap() * self.cell_volume())
    }

    /// Number of cells occupied both in `self` and in `other` translated by `shift`.
    pub fn overlap_count(&self, other: &Self, shift: [i64; MAX_DIM]) -> usize {
        // Iterate the smaller mask for speed; exact either way.
        if other.count_occupied() <= self.count_occupied() {
            other
                .occupied_cells()
                .iter()
                .filter(|&&g| {
                    self.contains_global([g[0] + shift[0], g[1] + shift[1], g[2] + shift[2]])
                })
                .count()
        } else {
            self.occupied_cells()
                .iter()
                .filter(|&&g| {
                    other.contains_global([g[0] - shift[0], g[1] - shift[1], g[2] - shift[2]])
                })
                .count()
        }
    }

    fn merged_window(&self, other: &Self) -> ([i64; MAX_DIM], [usize; MAX_DIM]) {
        let mut origin = [0i64; MAX_DIM];
        let mut extent = [1usize; MAX_DIM];
        for a in 0..MAX_DIM {
            let lo = self.origin[a].min(other.origin[a]);
            let hi = (self.origin[a] + self.extent[a] as i64)
                .max(other.origin[a] + other.extent[a] as i64);
            origin[a] = lo;
            extent[a] = (hi - lo) as usize;
        }
        (origin, extent)
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        self.require_same_lattice(other)?;
        let (origin, extent) = self.merged_window(other);
        let mut out = Self::new(self.dim, self.h, extent, origin)?;
        for g in self.occupied_cells() {
            out.set_global(g, true)?;
        }
        for g in other.occupied_cells() {
            out.set_global(g, true)?;
        }
        Ok(out)
    }

    pub fn intersection(&self, other: &Self) -> Result<Self> {
        self.require_same_lattice(other)?;
        let mut out = Self::new(self.dim, self.h, self.extent, self.origin)?;
        for g in self.occupied_cells() {
            if other.contains_global(g) {
                out.set_global(g, true)?;
            }
        }
        Ok(out)
    }

    /// Cells of `self` not in `other`.
    pub fn difference(&self, other: &Self) -> Result<Self> {
        self.require_same_lattice(other)?;
        let mut out = Self::new(self.dim, self.h, self.extent, self.origin)?;
        for g in self.occupied_cells() {
            if !other.contains_global(g) {
                out.set_global(g, true)?;
            }
        }
        Ok(out)
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.same_lattice(other)
            && self.occupied_cells().iter().all(|&g| other.contains_global(g))
    }

    /// Shrink the window to the occupied bounding box (plus a one-cell margin
    /// is NOT added; the window is tight). Empty sets keep a 1-cell window.
    pub fn tighten(&self) -> Self {
        match self.bounding_box() {
            None => Self::new(self.dim, self.h, [1; MAX_DIM], [0; MAX_DIM]).unwrap(),
            Some((lo, hi)) => {
                let mut extent = [1usize; MAX_DIM];
                for a in 0..self.dim {
                    extent[a] = (hi[a] - lo[a] + 1) as usize;
                }
                let mut out = Self::new(self.dim, self.h, extent, lo).unwrap();
                for g in self.occupied_cells() {
                    out.set_global(g, true).unwrap();
                }
                out
            }
        }
    }

    /// Plain-text serialization: header plus run-length encoded mask rows.
    /// The float spacing is printed with the shortest round-trip
    /// representation, so read-back is bit-exact.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str("gridset v1\n");
        out.push_str(&format!("dim {}\n", self.dim));
        out.push_str(&format!("h {}\n", self.h));
        out.push_str(&format!("extent {} {} {}\n", self.extent[0], self.extent[1], self.extent[2]));
        out.push_str(&format!("origin {} {} {}\n", self.origin[0], self.origin[1], self.origin[2]));
        out.push_str("mask\n");
        for iz in 0..self.extent[2] {
            for iy in 0..self.extent[1] {
                // Runs alternate starting with unoccupied cells.
                let mut runs: Vec<usize> = Vec::new();
                let mut current = false;
                let mut len = 0usize;
                for ix in 0..self.extent[0] {
                    let v = self.get_index([ix, iy, iz]);
                    if v == current {
                        len += 1;
                    } else {
                        runs.push(len);
                        current = v;
                        len = 1;
                    }
                }
                runs.push(len);
                let line: Vec<String> = runs.iter().map(|r| r.to_string()).collect();
                out.push_str(&line.join(" "));
                out.push('\n');
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let magic = lines.next().ok_or_else(|| Error::Parse("empty input".into()))?;
        if magic.trim() != "gridset v1" {
            return Err(Error::Parse(format!("bad magic line {magic:?}")));
        }
        let mut dim = None;
        let mut h: Option<T> = None;
        let mut extent = None;
        let mut origin = None;
        loop {
            let line = lines.next().ok_or_else(|| Error::Parse("truncated header".into()))?;
            let mut it = line.split_whitespace();
            match it.next() {
                Some("dim") => dim = Some(parse_next::<usize>(&mut it, "dim")?),
                Some("h") => {
                    let tok = it.next().ok_or_else(|| Error::Parse("missing h value".into()))?;
                    h = Some(tok.parse::<T>().map_err(|_| Error::Parse("bad h value".into()))?)
                }
                Some("extent") => {
                    extent = Some([
                        parse_next::<usize>(&mut it, "extent")?,
                        parse_next::<usize>(&mut it, "extent")?,
                        parse_next::<usize>(&mut it, "extent")?,
                    ])
                }
                Some("origin") => {
                    origin = Some([
                        parse_next::<i64>(&mut it, "origin")?,
                        parse_next::<i64>(&mut it, "origin")?,
                        parse_next::<i64>(&mut it, "origin")?,
                    ])
                }
                Some("mask") => break,
                other => return Err(Error::Parse(format!("unexpected header field {other:?}"))),
            }
        }
        let dim = dim.ok_or_else(|| Error::Parse("missing dim".into()))?;
        let h = h.ok_or_else(|| Error::Parse("missing h".into()))?;
        let extent = extent.ok_or_else(|| Error::Parse("missing extent".into()))?;
        let origin = origin.ok_or_else(|| Error::Parse("missing origin".into()))?;
        let mut s = Self::new(dim, h, extent, origin)?;
        for iz in 0..extent[2] {
            for iy in 0..extent[1] {
                let line = lines.next().ok_or_else(|| Error::Parse("truncated mask".into()))?;
                let mut ix = 0usize;
                let mut occupied = false;
                for tok in line.split_whitespace() {
                    let run: usize =
                        tok.parse().map_err(|_| Error::Parse(format!("bad run {tok:?}")))?;
                    if occupied {
                        for k in 0..run {
                            s.set_index([ix + k, iy, iz], true);
                        }
                    }
                    ix += run;
                    occupied = !occupied;
                }
                if ix != extent[0] {
                    return Err(Error::Parse(format!("row length {ix} != extent {}", extent[0])));
                }
            }
        }
        Ok(s)
    }
}

fn parse_next<U: std::str::FromStr>(
    it: &mut std::str::SplitWhitespace<'_>,
    what: &str,
) -> Result<U> {
    it.next()
        .ok_or_else(|| Error::Parse(format!("missing {what} value")))?
        .parse::<U>()
        .map_err(|_| Error::Parse(format!("bad {what} value")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> GridSet<f64> {
        let mut e = GridSet::new(2, 0.5, [4, 3, 1], [-1, 0, 0]).unwrap();
        e.set_global([-1, 0, 0], true).unwrap();
        e.set_global([2, 2, 0], true).unwrap();
        e.set_global([0, 1, 0], true).unwrap();
        e
    }

    #[test]
    fn measure_is_count_times_cell_volume() {
        let e = small();
        assert_eq!(e.count_occupied(), 3);
        assert_eq!(e.measure(), 3.0 * 0.25);
        let empty = GridSet::<f64>::new(1, 1.0, [5, 1, 1], [0, 0, 0]).unwrap();
        assert_eq!(empty.measure(), 0.0);
    }

    #[test]
    fn symm_diff_cases() {
        let e = small();
        assert_eq!(e.symm_diff_measure(&e).unwrap(), 0.0);
        // disjoint
        let f = e.translate([10, 0, 0]);
        assert_eq!(e.symm_diff_measure(&f).unwrap(), e.measure() + f.measure());
        // nested
        let mut g = e.clone();
        g.set_global([1, 1, 0], true).unwrap();
        assert!((e.symm_diff_measure(&g).unwrap() - (g.measure() - e.measure())).abs() < 1e-15);
        // mismatched lattice
        let other = GridSet::<f64>::new(2, 0.25, [4, 3, 1], [-1, 0, 0]).unwrap();
        assert!(e.symm_diff_measure(&other).is_err());
    }

    #[test]
    fn translate_is_exact() {
        let e = small();
        let f = e.translate([3, -2, 0]);
        assert_eq!(f.count_occupied(), 3);
        assert!(f.contains_global([2, -2, 0]));
        let back = f.translate([-3, 2, 0]);
        assert_eq!(e.symm_diff_measure(&back).unwrap(), 0.0);
        // zero shift is identity
        assert_eq!(e.symm_diff_measure(&e.translate([0, 0, 0])).unwrap(), 0.0);
    }

    #[test]
    fn boolean_ops() {
        let e = small();
        let f = e.translate([1, 0, 0]);
        let u = e.union(&f).unwrap();
        let i = e.intersection(&f).unwrap();
        let n_e = e.count_occupied() as f64;
        let n_f = f.count_occupied() as f64;
        assert!(
            (u.measure() + i.measure() - (n_e + n_f) * e.cell_volume()).abs() < 1e-15,
            "inclusion-exclusion"
        );
        assert!(i.is_subset_of(&e) && i.is_subset_of(&f));
        assert!(e.is_subset_of(&u));
    }

    #[test]
    fn text_round_trip_is_bit_exact() {
        let e = small();
        let text = e.to_text();
        let back = GridSet::<f64>::from_text(&text).unwrap();
        assert_eq!(back.to_text(), text);
        assert_eq!(back.spacing().to_bits(), e.spacing().to_bits());
        assert_eq!(e.symm_diff_measure(&back).unwrap(), 0.0);

        // An awkward spacing still round-trips through shortest decimal.
        let mut f = GridSet::<f64>::new(1, 0.1 + 1e-17, [7, 1, 1], [-3, 0, 0]).unwrap();
        f.set_global([-3, 0, 0], true).unwrap();
        f.set_global([3, 0, 0], true).unwrap();
        let back = GridSet::<f64>::from_text(&f.to_text()).unwrap();
        assert_eq!(back.spacing().to_bits(), f.spacing().to_bits());
        assert_eq!(back.to_text(), f.to_text());
    }

    #[test]
    fn boundary_cells_of_a_block() {
        let e = GridSet::<f64>::from_fn(2, 1.0, [5, 5, 1], [0, 0, 0], |_| true).unwrap();
        let b = e.boundary_cells();
        assert_eq!(b.len(), 16); // 5x5 block has a 16-cell rim
    }
}
