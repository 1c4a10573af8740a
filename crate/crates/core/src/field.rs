//! Real-valued functions on the lattice (distance fields, phase fields,
//! rearranged profiles). Same cell conventions as [`crate::grid::GridSet`].

use crate::error::{Error, Result};
use crate::grid::{GridSet, MAX_DIM};
use crate::scalar::Scalar;

#[derive(Clone, Debug)]
pub struct ScalarField<T: Scalar = f64> {
    dim: usize,
    h: T,
    extent: [usize; MAX_DIM],
    origin: [i64; MAX_DIM],
    values: Vec<T>,
}

impl<T: Scalar> ScalarField<T> {
    pub fn zeros(dim: usize, h: T, extent: [usize; MAX_DIM], origin: [i64; MAX_DIM]) -> Result<Self> {
        // Reuse the GridSet validation of the lattice parameters.
        GridSet::<T>::new(dim, h, extent, origin)?;
        let n = extent[0] * extent[1] * extent[2];
        Ok(Self { dim, h, extent, origin, values: vec![T::zero(); n] })
    }

    pub fn from_fn(
        dim: usize,
        h: T,
        extent: [usize; MAX_DIM],
        origin: [i64; MAX_DIM],
        mut f: impl FnMut([i64; MAX_DIM]) -> T,
    ) -> Result<Self> {
        let mut out = Self::zeros(dim, h, extent, origin)?;
        for iz in 0..extent[2] {
            for iy in 0..extent[1] {
                for ix in 0..extent[0] {
                    let g = [origin[0] + ix as i64, origin[1] + iy as i64, origin[2] + iz as i64];
                    let v = f(g);
                    let fl = out.flat([ix, iy, iz]);
                    out.values[fl] = v;
                }
            }
        }
        Ok(out)
    }

    /// Indicator function of a set, as a field on the same window.
    pub fn indicator(e: &GridSet<T>) -> Self {
        let mut out =
            Self::zeros(e.dim(), e.spacing(), e.extent(), e.origin()).expect("valid lattice");
        for g in e.occupied_cells() {
            out.set_global(g, T::one()).unwrap();
        }
        out
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
    pub fn len(&self) -> usize {
        self.values.len()
    }
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
    pub fn values(&self) -> &[T] {
        &self.values
    }
    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }
    pub fn cell_volume(&self) -> T {
        crate::scalar::powi(self.h, self.dim)
    }

    #[inline]
    pub fn flat(&self, idx: [usize; MAX_DIM]) -> usize {
        idx[0] + self.extent[0] * (idx[1] + self.extent[1] * idx[2])
    }

    #[inline]
    pub fn get_index(&self, idx: [usize; MAX_DIM]) -> T {
        self.values[self.flat(idx)]
    }

    #[inline]
    pub fn set_index(&mut self, idx: [usize; MAX_DIM], v: T) {
        let f = self.flat(idx);
        self.values[f] = v;
    }

    fn local(&self, g: [i64; MAX_DIM]) -> Option<[usize; MAX_DIM]> {
        let mut idx = [0usize; MAX_DIM];
        for a in 0..MAX_DIM {
            let r = g[a] - self.origin[a];
            if r < 0 || r >= self.extent[a] as i64 {
                return None;
            }
            idx[a] = r as usize;
        }
        Some(idx)
    }

    /// Value at global coordinates; zero outside the window.
    #[inline]
    pub fn get_global(&self, g: [i64; MAX_DIM]) -> T {
        match self.local(g) {
            Some(idx) => self.get_index(idx),
            None => T::zero(),
        }
    }

    pub fn set_global(&mut self, g: [i64; MAX_DIM], v: T) -> Result<()> {
        match self.local(g) {
            Some(idx) => {
                self.set_index(idx, v);
                Ok(())
            }
            None => Err(Error::InvalidArgument("cell outside the field window".into())),
        }
    }

    #[inline]
    pub fn center(&self, g: [i64; MAX_DIM]) -> [T; MAX_DIM] {
        let half = T::from_f64(0.5).unwrap();
        let mut c = [T::zero(); MAX_DIM];
        for a in 0..self.dim {
            c[a] = self.h * (T::from_i64(g[a]).unwrap() + half);
        }
        c
    }

    /// Global coordinates of every cell, row-major.
    pub fn cells(&self) -> impl Iterator<Item = [i64; MAX_DIM]> + '_ {
        let e = self.extent;
        let o = self.origin;
        (0..e[2]).flat_map(move |iz| {
            (0..e[1]).flat_map(move |iy| {
                (0..e[0]).map(move |ix| [o[0] + ix as i64, o[1] + iy as i64, o[2] + iz as i64])
            })
        })
    }

    /// Strict super-level set {f > t}.
    pub fn super_level_set(&self, t: T) -> GridSet<T> {
        let mut s = GridSet::new(self.dim, self.h, self.extent, self.origin).unwrap();
        for (i, g) in self.cells().enumerate() {
            if self.values[i] > t {
                s.set_global(g, true).unwrap();
            }
        }
        s
    }

    /// Sum of the values times the cell volume (the integral of the
    /// piecewise-constant extension).
    pub fn integral(&self) -> T {
        let s: T = self.values.iter().copied().fold(T::zero(), |a, b| a + b);
        s * self.cell_volume()
    }

    pub fn same_lattice(&self, other: &Self) -> bool {
        self.dim == other.dim
            && self.h == other.h
    }

    /// Plain-text serialization: header then flat values row-major, one row
    /// per line, shortest round-trip float formatting.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str("field v1\n");
        out.push_str(&format!("dim {}\n", self.dim));
        out.push_str(&format!("h {}\n", self.h));
        out.push_str(&format!("extent {} {} {}\n", self.extent[0], self.extent[1], self.extent[2]));
        out.push_str(&format!("origin {} {} {}\n", self.origin[0], self.origin[1], self.origin[2]));
        out.push_str("values\n");
        for iz in 0..self.extent[2] {
            for iy in 0..self.extent[1] {
                let row: Vec<String> = (0..self.extent[0])
                    .map(|ix| format!("{}", self.get_index([ix, iy, iz])))
                    .collect();
                out.push_str(&row.join(" "));
                out.push('\n');
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let magic = lines.next().ok_or_else(|| Error::Parse("empty input".into()))?;
        if magic.trim() != "field v1" {
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
                Some("dim") => {
                    dim = Some(
                        it.next()
                            .ok_or_else(|| Error::Parse("missing dim".into()))?
                            .parse::<usize>()
                            .map_err(|_| Error::Parse("bad dim".into()))?,
                    )
                }
                Some("h") => {
                    let tok = it.next().ok_or_else(|| Error::Parse("missing h".into()))?;
                    h = Some(tok.parse::<T>().map_err(|_| Error::Parse("bad h".into()))?)
                }
                Some("extent") => {
                    let mut e = [0usize; MAX_DIM];
                    for v in e.iter_mut() {
                        *v = it
                            .next()
                            .ok_or_else(|| Error::Parse("missing extent".into()))?
                            .parse()
                            .map_err(|_| Error::Parse("bad extent".into()))?;
                    }
                    extent = Some(e);
                }
                Some("origin") => {
                    let mut o = [0i64; MAX_DIM];
                    for v in o.iter_mut() {
                        *v = it
                            .next()
                            .ok_or_else(|| Error::Parse("missing origin".into()))?
                            .parse()
                            .map_err(|_| Error::Parse("bad origin".into()))?;
                    }
                    origin = Some(o);
                }
                Some("values") => break,
                other => return Err(Error::Parse(format!("unexpected header field {other:?}"))),
            }
        }
        let dim = dim.ok_or_else(|| Error::Parse("missing dim".into()))?;
        let h = h.ok_or_else(|| Error::Parse("missing h".into()))?;
        let extent = extent.ok_or_else(|| Error::Parse("missing extent".into()))?;
        let origin = origin.ok_or_else(|| Error::Parse("missing origin".into()))?;
        let mut out = Self::zeros(dim, h, extent, origin)?;
        for iz in 0..extent[2] {
            for iy in 0..extent[1] {
                let line = lines.next().ok_or_else(|| Error::Parse("truncated values".into()))?;
                let mut ix = 0usize;
                for tok in line.split_whitespace() {
                    if ix >= extent[0] {
                        return Err(Error::Parse("row too long".into()));
                    }
                    let v = tok.parse::<T>().map_err(|_| Error::Parse("bad value".into()))?;
                    out.set_index([ix, iy, iz], v);
                    ix += 1;
                }
                if ix != extent[0] {
                    return Err(Error::Parse("row too short".into()));
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indicator_and_level_sets() {
        let mut e = GridSet::<f64>::new(2, 0.5, [3, 3, 1], [0, 0, 0]).unwrap();
        e.set_global([1, 1, 0], true).unwrap();
        e.set_global([2, 0, 0], true).unwrap();
        let f = ScalarField::indicator(&e);
        assert_eq!(f.integral(), e.measure());
        let s = f.super_level_set(0.5);
        assert_eq!(s.symm_diff_measure(&e).unwrap(), 0.0);
        assert!(f.super_level_set(1.0).is_empty());
    }

    #[test]
    fn text_round_trip_bits() {
        let f = ScalarField::from_fn(2, 0.25, [4, 2, 1], [-1, 3, 0], |g| {
            (g[0] as f64 * 0.3).sin() + g[1] as f64 / 7.0
        })
        .unwrap();
        let text = f.to_text();
        let back = ScalarField::<f64>::from_text(&text).unwrap();
        assert_eq!(back.to_text(), text);
        for (a, b) in f.values().iter().zip(back.values()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}
