//! Discrete admissible step sets `V^N(x, t)`.

use super::domain::DomainShape;
use crate::error::{Error, Result};
use crate::model::{Grid, Offset};

/// Lattice steps `h` with `|h| < t` such that `x + ℓh ∈ Ω` for every `0 ≤ ℓ ≤ N`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepSet {
    pub x: usize,
    pub t: f64,
    pub order: usize,
    pub steps: Vec<Offset>,
    /// Cell volume; every step carries the same weight.
    pub weight: f64,
}

impl StepSet {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// All lattice offsets `m` with `|m·spacing| < t`, without any periodic reduction: a step
/// longer than the period is a different step. On non-periodic grids offsets are capped
/// at the grid size since longer ones leave the grid.
#[derive(Debug, Clone)]
pub(crate) struct StepStencil {
    pub offsets: Vec<Offset>,
}

impl StepStencil {
    pub fn new(grid: &Grid, t: f64) -> Self {
        let h = grid.spacing();
        let mut reach = (t / h).ceil() as i64;
        if !grid.is_periodic() {
            reach = reach.min(grid.n() as i64 - 1);
        }
        let second = if grid.dim() == 2 { -reach..=reach } else { 0..=0 };
        let mut offsets = Vec::new();
        for m0 in -reach..=reach {
            for m1 in second.clone() {
                let (a, b) = (m0 as f64 * h, m1 as f64 * h);
                if a * a + b * b < t * t {
                    offsets.push([m0, m1]);
                }
            }
        }
        StepStencil { offsets }
    }
}

/// `x + ℓ·step` stays on the grid and inside the domain for `ℓ = 0..=order`.
pub(crate) fn lattice_admissible(grid: &Grid, mask: &[bool], x: usize, step: Offset, order: usize) -> bool {
    (0..=order as i64).all(|l| match grid.shift(x, [l * step[0], l * step[1]]) {
        Some(j) => mask[j],
        None => false,
    })
}

pub fn admissible_steps(domain: &DomainShape, grid: &Grid, x: usize, t: f64, order: usize) -> Result<StepSet> {
    if order == 0 {
        return Err(Error::param("order must be at least 1"));
    }
    if !(t > 0.0) {
        return Err(Error::param(format!("radius must be positive, got {t}")));
    }
    let mask = domain.node_mask(grid)?;
    if x >= grid.node_count() || !mask[x] {
        return Err(Error::geometry(format!("node {x} is not inside the domain")));
    }
    let stencil = StepStencil::new(grid, t);
    let steps = if domain.is_torus() {
        stencil.offsets
    } else {
        stencil
            .offsets
            .into_iter()
            .filter(|&m| lattice_admissible(grid, &mask, x, m, order))
            .collect()
    };
    Ok(StepSet { x, t, order, steps, weight: grid.cell_volume() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn torus_steps_are_full_ball() {
        let g = Grid::unit_torus(1, 64).unwrap();
        let s = admissible_steps(&DomainShape::full_torus(), &g, 5, 0.1, 2).unwrap();
        // |m| / 64 < 0.1  <=>  |m| <= 6
        assert_eq!(s.len(), 13);
        assert_eq!(s.weight, 1.0 / 64.0);
    }

    #[test]
    fn interval_steps_near_right_end() {
        let g = Grid::cell_centered(1, 64, [0.0, 0.0], 1.0).unwrap();
        let dom = DomainShape::interval(0.0, 1.0).unwrap();
        let x = g.nearest_node([0.9, 0.0]).unwrap();
        let xc = g.coords(x)[0];
        let s = admissible_steps(&dom, &g, x, 0.2, 1).unwrap();
        // brute-force: lattice steps h with |h| < 0.2, 0 < x + h < 1
        let h = g.spacing();
        let expected: Vec<[i64; 2]> = (-64i64..64)
            .filter(|&m| (m as f64 * h).abs() < 0.2 && xc + m as f64 * h > 0.0 && xc + m as f64 * h < 1.0)
            .map(|m| [m, 0])
            .collect();
        assert_eq!(s.steps, expected);
        assert!(s.steps.iter().all(|m| m[0] as f64 * h < 1.0 - 0.9));
    }

    #[test]
    fn convex_domain_endpoint_rule_agrees() {
        let dom = DomainShape::pentagon();
        let g = dom.default_grid(2, 32).unwrap();
        let mask = dom.node_mask(&g).unwrap();
        for x in (0..g.node_count()).filter(|&i| mask[i]).step_by(5) {
            for order in 1..=3 {
                let s = admissible_steps(&dom, &g, x, 0.3, order).unwrap();
                let ends: Vec<Offset> = StepStencil::new(&g, 0.3)
                    .offsets
                    .into_iter()
                    .filter(|&m| {
                        let l = order as i64;
                        g.shift(x, [l * m[0], l * m[1]]).is_some_and(|j| mask[j])
                    })
                    .collect();
                assert_eq!(s.steps, ends);
            }
        }
    }

    proptest! {
        #[test]
        fn nested_in_radius(node in 0usize..1024, t1 in 0.01f64..0.5, dt in 0.0f64..0.5, order in 1usize..4) {
            let dom = DomainShape::pentagon();
            let g = dom.default_grid(2, 32).unwrap();
            let mask = dom.node_mask(&g).unwrap();
            prop_assume!(mask[node]);
            let a = admissible_steps(&dom, &g, node, t1, order).unwrap();
            let b = admissible_steps(&dom, &g, node, t1 + dt, order).unwrap();
            prop_assert!(a.steps.iter().all(|m| b.steps.contains(m)));
        }

        #[test]
        fn torus_steps_symmetric(node in 0usize..256, t in 0.01f64..1.5) {
            let g = Grid::unit_torus(2, 16).unwrap();
            let s = admissible_steps(&DomainShape::full_torus(), &g, node, t, 2).unwrap();
            prop_assert!(s.steps.iter().all(|m| s.steps.contains(&[-m[0], -m[1]])));
        }
    }
}
