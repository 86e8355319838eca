//! Uniform tensor grids in one or two dimensions.

use crate::error::{Error, Result};

/// A point in the plane; the second coordinate is unused (and kept at zero) when `d == 1`.
pub type Point = [f64; 2];

/// Integer lattice displacement, same convention as [`Point`].
pub type Offset = [i64; 2];

/// Uniform tensor grid with `n` nodes per axis.
///
/// Node `i` along an axis sits at `origin + i * spacing`, `spacing = extent / n`. Periodic
/// grids identify coordinates modulo `extent` and stand in for the whole space.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    d: usize,
    n: usize,
    origin: Point,
    extent: f64,
    periodic: bool,
}

impl Grid {
    /// Builds a grid after checking `d ∈ {1, 2}`, `n` a power of two with `n ≥ 16`, and
    /// a positive finite extent.
    pub fn new(d: usize, n: usize, periodic: bool, origin: Point, extent: f64) -> Result<Self> {
        if d != 1 && d != 2 {
            return Err(Error::param(format!("dimension must be 1 or 2, got {d}")));
        }
        if !n.is_power_of_two() {
            return Err(Error::param(format!("nodes per axis must be a power of two, got {n}")));
        }
        if n < 16 {
            return Err(Error::param(format!("nodes per axis must be at least 16, got {n}")));
        }
        if !(extent.is_finite() && extent > 0.0) {
            return Err(Error::param(format!("extent must be positive and finite, got {extent}")));
        }
        if origin.iter().take(d).any(|c| !c.is_finite()) {
            return Err(Error::param("origin must be finite"));
        }
        let mut origin = origin;
        if d == 1 {
            origin[1] = 0.0;
        }
        Ok(Grid { d, n, origin, extent, periodic })
    }

    /// Unit torus `[0, 1)^d` with nodes at `i / n`.
    pub fn unit_torus(d: usize, n: usize) -> Result<Self> {
        Grid::new(d, n, true, [0.0, 0.0], 1.0)
    }

    /// Non-periodic grid whose nodes are the cell midpoints of `[lo, lo + extent)^d`.
    pub fn cell_centered(d: usize, n: usize, lo: Point, extent: f64) -> Result<Self> {
        let half = extent / (2 * n) as f64;
        Grid::new(d, n, false, [lo[0] + half, lo[1] + half], extent)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn origin(&self) -> Point {
        self.origin
    }

    pub fn extent(&self) -> f64 {
        self.extent
    }

    pub fn is_periodic(&self) -> bool {
        self.periodic
    }

    pub fn spacing(&self) -> f64 {
        self.extent / self.n as f64
    }

    pub fn node_count(&self) -> usize {
        self.n.pow(self.d as u32)
    }

    /// Volume of one grid cell, the quadrature weight of every node.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.d as i32)
    }

    /// Multi-index of a flat (row-major) node index.
    pub fn multi_index(&self, idx: usize) -> [usize; 2] {
        if self.d == 1 {
            [idx, 0]
        } else {
            [idx / self.n, idx % self.n]
        }
    }

    pub fn flat_index(&self, multi: [usize; 2]) -> usize {
        if self.d == 1 {
            multi[0]
        } else {
            multi[0] * self.n + multi[1]
        }
    }

    pub fn coords(&self, idx: usize) -> Point {
        let m = self.multi_index(idx);
        let h = self.spacing();
        let mut x = [0.0; 2];
        for a in 0..self.d {
            x[a] = self.origin[a] + m[a] as f64 * h;
        }
        x
    }

    /// Node reached from `idx` by the lattice displacement `off`. Periodic grids wrap;
    /// otherwise `None` when the target leaves the grid.
    pub fn shift(&self, idx: usize, off: Offset) -> Option<usize> {
        let m = self.multi_index(idx);
        let n = self.n as i64;
        let mut out = [0usize; 2];
        for a in 0..self.d {
            let mut k = m[a] as i64 + off[a];
            if self.periodic {
                k = k.rem_euclid(n);
            } else if k < 0 || k >= n {
                return None;
            }
            out[a] = k as usize;
        }
        Some(self.flat_index(out))
    }

    /// Physical vector of a lattice displacement.
    pub fn offset_vector(&self, off: Offset) -> Point {
        let h = self.spacing();
        let mut v = [0.0; 2];
        for a in 0..self.d {
            v[a] = off[a] as f64 * h;
        }
        v
    }

    /// Displacement `y - x`, reduced to the minimal image on periodic grids.
    pub fn displacement(&self, x: Point, y: Point) -> Point {
        let mut v = [0.0; 2];
        for a in 0..self.d {
            let mut dv = y[a] - x[a];
            if self.periodic {
                dv -= self.extent * (dv / self.extent).round();
            }
            v[a] = dv;
        }
        v
    }

    /// Whether the point lies in the closed bounding box of the nodes (always true when
    /// periodic).
    pub fn contains(&self, x: Point) -> bool {
        if self.periodic {
            return true;
        }
        let hi = self.origin_max();
        (0..self.d).all(|a| x[a] >= self.origin[a] - 1e-12 && x[a] <= hi[a] + 1e-12)
    }

    fn origin_max(&self) -> Point {
        let span = (self.n - 1) as f64 * self.spacing();
        [self.origin[0] + span, self.origin[1] + if self.d == 2 { span } else { 0.0 }]
    }

    /// Node nearest to `x`, if it lies within the grid.
    pub fn nearest_node(&self, x: Point) -> Option<usize> {
        let h = self.spacing();
        let n = self.n as i64;
        let mut m = [0usize; 2];
        for a in 0..self.d {
            let mut k = ((x[a] - self.origin[a]) / h).round() as i64;
            if self.periodic {
                k = k.rem_euclid(n);
            } else if k < 0 || k >= n {
                return None;
            }
            m[a] = k as usize;
        }
        Some(self.flat_index(m))
    }

    /// Lattice displacement corresponding to a physical step, if the step is grid-aligned.
    pub fn lattice_offset(&self, step: &[f64]) -> Result<Offset> {
        if step.len() != self.d {
            return Err(Error::param(format!(
                "step has {} components, grid dimension is {}",
                step.len(),
                self.d
            )));
        }
        let h = self.spacing();
        let mut off = [0i64; 2];
        for (a, &c) in step.iter().enumerate() {
            let k = c / h;
            let r = k.round();
            if !k.is_finite() || (k - r).abs() > 1e-9 * k.abs().max(1.0) {
                return Err(Error::param(format!("step component {c} is not a multiple of the spacing {h}")));
            }
            off[a] = r as i64;
        }
        Ok(off)
    }

    pub fn norm(&self, v: Point) -> f64 {
        (0..self.d).map(|a| v[a] * v[a]).sum::<f64>().sqrt()
    }
}
