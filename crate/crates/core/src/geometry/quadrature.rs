//! Midpoint-rule quadrature over `B(x, t) ∩ Ω`.
//!
//! Every grid node inside the open ball and inside the domain carries the full cell
//! volume; there are no partial cells.

use super::domain::DomainShape;
use crate::error::Result;
use crate::model::{Grid, Offset, Point};

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureSet {
    /// Node indices, increasing.
    pub nodes: Vec<usize>,
    /// `y − x` for each node (minimal image on periodic grids).
    pub offsets: Vec<Point>,
    pub weights: Vec<f64>,
}

impl QuadratureSet {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Discrete measure of the region.
    pub fn measure(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Grid nodes `y ∈ Ω` with `|y − x| < t`.
pub fn ball_quadrature(domain: &DomainShape, grid: &Grid, x: Point, t: f64) -> Result<QuadratureSet> {
    domain.check_grid(grid)?;
    let d = grid.dim();
    let n = grid.n() as i64;
    let h = grid.spacing();
    let reach = t / h;

    // per axis: (index, offset in units of h)
    let mut axes: [Vec<(usize, f64)>; 2] = [Vec::new(), Vec::new()];
    if d == 1 {
        axes[1].push((0, 0.0));
    }
    for a in 0..d {
        let mut xr = (x[a] - grid.origin()[a]) / h;
        if (xr - xr.round()).abs() < 1e-9 {
            xr = xr.round();
        }
        let lo = (xr - reach).ceil() as i64;
        let hi = (xr + reach).floor() as i64;
        let cand = &mut axes[a];
        if grid.is_periodic() {
            let half = (n / 2) as f64;
            let reduce = |delta: f64| {
                let r = delta.rem_euclid(n as f64);
                if r > half {
                    r - n as f64
                } else {
                    r
                }
            };
            if hi - lo + 1 >= n {
                cand.extend((0..n).map(|i| (i as usize, reduce(i as f64 - xr))));
            } else {
                cand.extend((lo..=hi).map(|i| (i.rem_euclid(n) as usize, reduce(i as f64 - xr))));
            }
        } else {
            cand.extend((lo.max(0)..=hi.min(n - 1)).map(|i| (i as usize, i as f64 - xr)));
        }
    }

    let cell = grid.cell_volume();
    let mut found: Vec<(usize, Point)> = Vec::new();
    for &(i0, o0) in &axes[0] {
        for &(i1, o1) in &axes[1] {
            let off = [o0 * h, o1 * h];
            if off[0] * off[0] + off[1] * off[1] >= t * t {
                continue;
            }
            let node = grid.flat_index([i0, i1]);
            if domain.membership(grid.coords(node)) {
                found.push((node, off));
            }
        }
    }
    found.sort_by_key(|e| e.0);
    let weights = vec![cell; found.len()];
    let (nodes, offsets) = found.into_iter().unzip();
    Ok(QuadratureSet { nodes, offsets, weights })
}

/// Lattice offsets of the open ball of radius `r` around a node, as used by the
/// node-centred sums. On periodic grids each node appears once (offsets in `(−n/2, n/2]`).
///
/// The ball is also kept as rows: runs of consecutive offsets along the last axis, so
/// that sums over a ball become sums over contiguous slices of row-major data.
#[derive(Debug, Clone)]
pub(crate) struct BallStencil {
    /// `(row offset, first, last)` along the contiguous axis; one row in 1d.
    rows: Vec<(i64, i64, i64)>,
}

impl BallStencil {
    pub fn new(grid: &Grid, r: f64) -> Self {
        let n = grid.n() as i64;
        let h = grid.spacing();
        let reach = (r / h).ceil() as i64;
        let (lo, hi) = if grid.is_periodic() {
            ((-reach).max(-n / 2 + 1), reach.min(n / 2))
        } else {
            ((-reach).max(-(n - 1)), reach.min(n - 1))
        };
        let second = if grid.dim() == 2 { lo..=hi } else { 0..=0 };
        let mut offsets = Vec::new();
        for m0 in lo..=hi {
            for m1 in second.clone() {
                let (a, b) = (m0 as f64 * h, m1 as f64 * h);
                if a * a + b * b < r * r {
                    offsets.push([m0, m1]);
                }
            }
        }
        let mut rows: Vec<(i64, i64, i64)> = Vec::new();
        if grid.dim() == 1 {
            if let (Some(first), Some(last)) = (offsets.first(), offsets.last()) {
                rows.push((0, first[0], last[0]));
            }
        } else {
            for m in &offsets {
                match rows.last_mut() {
                    Some(row) if row.0 == m[0] => row.2 = m[1],
                    _ => rows.push((m[0], m[1], m[1])),
                }
            }
        }
        BallStencil { rows }
    }

    /// Calls `visit(start, len, offset)` for runs of consecutive flat indices covering the
    /// ball on the grid; `offset` is the lattice offset of `start` from `center`.
    pub fn for_each_run(&self, grid: &Grid, center: usize, mut visit: impl FnMut(usize, usize, Offset)) {
        let n = grid.n() as i64;
        let periodic = grid.is_periodic();
        let two_d = grid.dim() == 2;
        let [c0, c1] = grid.multi_index(center).map(|i| i as i64);
        let (row_c, col_c) = if two_d { (c0, c1) } else { (0, c0) };
        for &(m0, lo, hi) in &self.rows {
            let mut row = row_c + m0;
            if periodic {
                row = row.rem_euclid(n);
            } else if row < 0 || row >= n {
                continue;
            }
            let base = if two_d { row * n } else { 0 };
            let offset = |col: i64| if two_d { [m0, col - col_c] } else { [col - col_c, 0] };
            let (a, b) = (col_c + lo, col_c + hi);
            if !periodic {
                let (a, b) = (a.max(0), b.min(n - 1));
                if a <= b {
                    visit((base + a) as usize, (b - a + 1) as usize, offset(a));
                }
                continue;
            }
            // at most one wrap since the run is shorter than n
            let mut start = a;
            while start <= b {
                let end = b.min(start.div_euclid(n) * n + n - 1);
                visit((base + start.rem_euclid(n)) as usize, (end - start + 1) as usize, offset(start));
                start = end + 1;
            }
        }
    }

    /// `Σ_{B(center)} values`, with values already zero outside the domain.
    pub fn sum(&self, grid: &Grid, values: &[f64], center: usize) -> f64 {
        let mut acc = 0.0;
        self.for_each_run(grid, center, |s, len, _| acc += values[s..s + len].iter().sum::<f64>());
        acc
    }

    /// `max_{B(center)} values`.
    pub fn max(&self, grid: &Grid, values: &[f64], center: usize) -> f64 {
        let mut acc: f64 = 0.0;
        self.for_each_run(grid, center, |s, len, _| acc = values[s..s + len].iter().fold(acc, |m, &v| m.max(v)));
        acc
    }
}
