//! Discrete Morrey norms and local-average base terms.
//!
//! The norm of a nonnegative node field `g` is
//!
//! ```text
//! max_{y ∈ Ω ∩ grid} max_{r ∈ ladder} r^{d(1/u − 1/p)} (Σ_{B(y,r) ∩ Ω} g^p · w)^{1/p}
//! ```
//!
//! The weight `r^{d(1/u−1/p)}` is used on the torus as well; it differs from the
//! `|B(y,r)|^{1/u−1/p}` convention by the constant `ω_d^{1/u−1/p}`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::quadrature::BallStencil;
use crate::geometry::DomainShape;
use crate::model::{ExtendedReal, Grid, SampledFunction};

/// Dyadic radii `2^{-j} · extent` for `j = jmin..=jmax`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiusLadder {
    jmin: u32,
    jmax: u32,
    extent: f64,
}

impl RadiusLadder {
    pub fn new(jmin: u32, jmax: u32, extent: f64) -> Result<Self> {
        if jmin > jmax {
            return Err(Error::param(format!("empty ladder: jmin={jmin} > jmax={jmax}")));
        }
        if !(extent.is_finite() && extent > 0.0) {
            return Err(Error::param("ladder extent must be positive"));
        }
        Ok(RadiusLadder { jmin, jmax, extent })
    }

    /// Every radius from the grid extent down to two grid spacings.
    pub fn full(grid: &Grid) -> Self {
        RadiusLadder { jmin: 0, jmax: grid.n().trailing_zeros() - 1, extent: grid.extent() }
    }

    /// Full ladder with a larger `jmin`.
    pub fn starting_at(grid: &Grid, jmin: u32) -> Result<Self> {
        let full = RadiusLadder::full(grid);
        RadiusLadder::new(jmin, full.jmax, full.extent)
    }

    pub fn jmin(&self) -> u32 {
        self.jmin
    }

    pub fn jmax(&self) -> u32 {
        self.jmax
    }

    pub fn len(&self) -> usize {
        (self.jmax - self.jmin + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn radius(&self, j: u32) -> f64 {
        self.extent * 0.5f64.powi(j as i32)
    }

    /// Radii in decreasing order.
    pub fn radii(&self) -> Vec<f64> {
        (self.jmin..=self.jmax).map(|j| self.radius(j)).collect()
    }

    /// Rejects ladders whose smallest radius is below two grid spacings.
    pub fn check(&self, grid: &Grid) -> Result<()> {
        let smallest = self.radius(self.jmax);
        if smallest < 2.0 * grid.spacing() * (1.0 - 1e-12) {
            return Err(Error::param(format!(
                "smallest ladder radius {smallest} is below two grid spacings ({})",
                2.0 * grid.spacing()
            )));
        }
        Ok(())
    }
}

/// `a^e` with the common exponents 1 and 2 done exactly.
pub(crate) fn powr(a: f64, e: f64) -> f64 {
    if e == 1.0 {
        a
    } else if e == 2.0 {
        a * a
    } else {
        a.powf(e)
    }
}

/// `a^{1/e}`, the inverse of [`powr`].
pub(crate) fn rootr(a: f64, e: f64) -> f64 {
    if e == 1.0 {
        a
    } else if e == 2.0 {
        a.sqrt()
    } else {
        a.powf(1.0 / e)
    }
}

fn check_exponents(p: f64, u: f64) -> Result<()> {
    if !(p > 0.0 && p.is_finite() && u.is_finite() && p <= u) {
        return Err(Error::param(format!("Morrey exponents need 0 < p <= u < inf, got p={p} u={u}")));
    }
    Ok(())
}

/// Morrey norm of a nonnegative node field; entries outside `Ω` are ignored.
pub fn morrey_norm_field(
    grid: &Grid,
    domain: &DomainShape,
    field: &[f64],
    p: f64,
    u: f64,
    ladder: &RadiusLadder,
) -> Result<f64> {
    check_exponents(p, u)?;
    ladder.check(grid)?;
    if field.len() != grid.node_count() {
        return Err(Error::param("field length does not match the grid"));
    }
    let mask = domain.node_mask(grid)?;
    let powered: Vec<f64> = field
        .iter()
        .zip(&mask)
        .map(|(&g, &inside)| if inside { powr(g.abs(), p) } else { 0.0 })
        .collect();
    let centers: Vec<usize> = (0..grid.node_count()).filter(|&i| mask[i]).collect();
    let cell = grid.cell_volume();
    let d = grid.dim() as f64;

    let mut best: f64 = 0.0;
    for r in ladder.radii() {
        let weight = r.powf(d * (1.0 / u - 1.0 / p));
        let stencil = BallStencil::new(grid, r);
        let sums: Vec<f64> = centers
            .par_iter()
            .map(|&c| stencil.sum(grid, &powered, c))
            .collect();
        for s in sums {
            best = best.max(weight * rootr(s * cell, p));
        }
    }
    Ok(best)
}

pub fn morrey_norm(f: &SampledFunction, domain: &DomainShape, p: f64, u: f64, ladder: &RadiusLadder) -> Result<f64> {
    morrey_norm_field(f.grid(), domain, &f.abs_values(), p, u, ladder)
}

/// `x ↦ (Σ_{B(x,R) ∩ Ω} |f|^v w)^{1/v}` on the nodes of `Ω` (max over the ball for
/// `v = ∞`); zero outside `Ω`.
pub fn local_average_field(f: &SampledFunction, domain: &DomainShape, v: ExtendedReal, radius: f64) -> Result<Vec<f64>> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::param(format!("average radius must be positive, got {radius}")));
    }
    let grid = f.grid();
    let mask = domain.node_mask(grid)?;
    let abs: Vec<f64> = f.abs_values().into_iter().zip(&mask).map(|(a, &m)| if m { a } else { 0.0 }).collect();
    let powered: Vec<f64> = match v {
        ExtendedReal::Infinity => abs,
        ExtendedReal::Finite(v) => abs.iter().map(|&a| powr(a, v)).collect(),
    };
    let stencil = BallStencil::new(grid, radius);
    let cell = grid.cell_volume();
    let field = (0..grid.node_count())
        .into_par_iter()
        .map(|x| {
            if !mask[x] {
                return 0.0;
            }
            match v {
                ExtendedReal::Infinity => stencil.max(grid, &powered, x),
                ExtendedReal::Finite(v) => rootr(stencil.sum(grid, &powered, x) * cell, v),
            }
        })
        .collect();
    Ok(field)
}

/// Morrey norm of the local `L_v` averages over balls of radius `R`.
pub fn local_average_term(
    f: &SampledFunction,
    domain: &DomainShape,
    v: ExtendedReal,
    radius: f64,
    p: f64,
    u: f64,
    ladder: &RadiusLadder,
) -> Result<f64> {
    check_exponents(p, u)?;
    let g = local_average_field(f, domain, v, radius)?;
    morrey_norm_field(f.grid(), domain, &g, p, u, ladder)
}

/// `(‖f | M^u_p‖, ‖ |f|^μ | M^{u/μ}_{p/μ} ‖^{1/μ})`; both sides agree exactly in exact
/// arithmetic.
pub fn power_identity_check(
    f: &SampledFunction,
    domain: &DomainShape,
    p: f64,
    u: f64,
    mu: f64,
    ladder: &RadiusLadder,
) -> Result<(f64, f64)> {
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::param(format!("power must be positive, got {mu}")));
    }
    let lhs = morrey_norm(f, domain, p, u, ladder)?;
    let powered: Vec<f64> = f.abs_values().iter().map(|a| a.powf(mu)).collect();
    let rhs = morrey_norm_field(f.grid(), domain, &powered, p / mu, u / mu, ladder)?.powf(1.0 / mu);
    Ok((lhs, rhs))
}

/// Zero extension of `f|_Ω` to the periodic grid with the same nodes.
pub fn zero_extension(f: &SampledFunction, domain: &DomainShape) -> Result<SampledFunction> {
    let g = f.grid();
    let mask = domain.node_mask(g)?;
    let torus = Grid::new(g.dim(), g.n(), true, g.origin(), g.extent())?;
    let values: Vec<num_complex::Complex64> =
        (0..f.len()).map(|i| if mask[i] { f.value(i) } else { 0.0.into() }).collect();
    if f.is_complex() {
        SampledFunction::complex(torus, values)
    } else {
        SampledFunction::real(torus, values.iter().map(|z| z.re).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{sample, CorpusSpec};

    fn torus(n: usize) -> (Grid, DomainShape, RadiusLadder) {
        let g = Grid::unit_torus(1, n).unwrap();
        let l = RadiusLadder::full(&g);
        (g, DomainShape::full_torus(), l)
    }

    #[test]
    fn ladder_bounds() {
        let g = Grid::unit_torus(1, 256).unwrap();
        let l = RadiusLadder::full(&g);
        assert_eq!(l.len(), 8);
        assert_eq!(*l.radii().last().unwrap(), 2.0 / 256.0);
        assert!(RadiusLadder::new(0, 8, 1.0).unwrap().check(&g).is_err());
        assert!(RadiusLadder::new(3, 2, 1.0).is_err());
    }

    #[test]
    fn constant_on_torus_is_one() {
        let (g, dom, l) = torus(256);
        let f = sample(&CorpusSpec::constant(1.0), &g).unwrap();
        let m = morrey_norm(&f, &dom, 2.0, 2.0, &l).unwrap();
        assert!((m - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_on_interval_dense_oracle() {
        // sup_r r^{-1/2} min(2r, 1): dense sweep puts the maximum sqrt(2) at r = 1/2
        let dense = (1..=100_000)
            .map(|i| {
                let r = i as f64 * 1e-5;
                r.powf(-0.5) * (2.0 * r).min(1.0)
            })
            .fold(0.0, f64::max);
        assert!((dense - 2f64.sqrt()).abs() < 1e-4);

        let dom = DomainShape::interval(0.0, 1.0).unwrap();
        let g = dom.default_grid(1, 256).unwrap();
        let f = sample(&CorpusSpec::constant(1.0), &g).unwrap();
        let m = morrey_norm(&f, &dom, 1.0, 2.0, &RadiusLadder::full(&g)).unwrap();
        // r = 1/2 is on the ladder; the discrete ball holds at most 2r·n − 1 nodes
        assert!((m - dense).abs() < 2.0 * g.spacing() * 2f64.sqrt(), "m={m}");
    }

    #[test]
    fn zero_function() {
        let (g, dom, l) = torus(64);
        let f = SampledFunction::zeros(g);
        assert_eq!(morrey_norm(&f, &dom, 1.0, 3.0, &l).unwrap(), 0.0);
    }

    #[test]
    fn rejects_p_above_u() {
        let (g, dom, l) = torus(64);
        let f = SampledFunction::zeros(g);
        assert!(matches!(morrey_norm(&f, &dom, 3.0, 2.0, &l), Err(Error::Parameter(_))));
    }

    #[test]
    fn homogeneity_is_exact_for_powers_of_two() {
        let (g, dom, l) = torus(128);
        let f = sample(&CorpusSpec::random(5, 6), &g).unwrap();
        let a = morrey_norm(&f, &dom, 1.5, 3.0, &l).unwrap();
        let b = morrey_norm(&f.scaled(-4.0), &dom, 1.5, 3.0, &l).unwrap();
        assert!((b - 4.0 * a).abs() <= 1e-13 * b);
    }

    #[test]
    fn p_equals_u_is_lp() {
        let dom = DomainShape::pentagon();
        let g = dom.default_grid(2, 32).unwrap();
        let f = sample(&CorpusSpec::random(2, 5), &g).unwrap();
        let mask = dom.node_mask(&g).unwrap();
        let lp: f64 = (0..g.node_count())
            .filter(|&i| mask[i])
            .map(|i| f.abs(i).powi(3) * g.cell_volume())
            .sum::<f64>()
            .powf(1.0 / 3.0);
        let m = morrey_norm(&f, &dom, 3.0, 3.0, &RadiusLadder::full(&g)).unwrap();
        assert!((m - lp).abs() <= 1e-10 * lp);
    }

    #[test]
    fn power_identity() {
        let (g, dom, l) = torus(128);
        let f = sample(&CorpusSpec::random(9, 7), &g).unwrap();
        for mu in [0.5, 1.0, 2.0, 3.0] {
            let (lhs, rhs) = power_identity_check(&f, &dom, 1.0, 2.5, mu, &l).unwrap();
            assert!((lhs - rhs).abs() <= 1e-12 * lhs, "mu={mu}");
        }
    }

    #[test]
    fn local_average_of_constant() {
        let (g, dom, l) = torus(128);
        let f = sample(&CorpusSpec::constant(-3.0), &g).unwrap();
        let g_field = local_average_field(&f, &dom, 1.0.into(), 0.5).unwrap();
        // R = 1/2 reaches every node but the antipode (open ball)
        assert!(g_field.iter().all(|&v| (v - 3.0 * 127.0 / 128.0).abs() < 1e-12));
        let full = local_average_term(&f, &dom, 1.0.into(), 1.0, 2.0, 2.0, &l).unwrap();
        let base = morrey_norm(&f, &dom, 2.0, 2.0, &l).unwrap();
        assert!((full - base).abs() < 1e-12);
        let sup = local_average_term(&f, &dom, ExtendedReal::Infinity, 0.1, 2.0, 2.0, &l).unwrap();
        assert!((sup - base).abs() < 1e-12);
    }

    #[test]
    fn local_average_double_sum_oracle() {
        let (g, dom, l) = torus(64);
        let f = sample(&CorpusSpec::cos(3), &g).unwrap();
        let n = 64usize;
        let h = 1.0 / n as f64;
        // independent double sum over periodic distances
        let gx: Vec<f64> = (0..n)
            .map(|i| {
                (0..n)
                    .filter(|&j| {
                        let k = (j as i64 - i as i64).rem_euclid(n as i64);
                        (k.min(n as i64 - k) as f64) * h < 0.25
                    })
                    .map(|j| f.re()[j].powi(2) * h)
                    .sum::<f64>()
                    .sqrt()
            })
            .collect();
        let mut expected: f64 = 0.0;
        for r in l.radii() {
            for c in 0..n {
                let s: f64 = (0..n)
                    .filter(|&j| {
                        let k = (j as i64 - c as i64).rem_euclid(n as i64);
                        (k.min(n as i64 - k) as f64) * h < r
                    })
                    .map(|j| gx[j].powi(2) * h)
                    .sum();
                expected = expected.max(s.sqrt());
            }
        }
        let term = local_average_term(&f, &dom, 2.0.into(), 0.25, 2.0, 2.0, &l).unwrap();
        assert!((term - expected).abs() <= 1e-12 * expected);
    }

    #[test]
    fn zero_extension_bound() {
        let dom = DomainShape::interval(0.25, 0.75).unwrap();
        let g = Grid::cell_centered(1, 128, [0.0, 0.0], 1.0).unwrap();
        let l = RadiusLadder::full(&g);
        for spec in [CorpusSpec::cos(2), CorpusSpec::random(4, 9), CorpusSpec::constant(1.0)] {
            let f = sample(&spec, &g).unwrap();
            let inner = morrey_norm(&f, &dom, 1.0, 2.0, &l).unwrap();
            let ext = zero_extension(&f, &dom).unwrap();
            let outer = morrey_norm(&ext, &DomainShape::full_torus(), 1.0, 2.0, &l).unwrap();
            // the balls over Ω see the same mass; only centers outside Ω are added
            assert!(outer >= inner * (1.0 - 1e-12));
            assert!(outer <= 2.0 * inner, "{spec}: {outer} vs {inner}");
        }
    }
}
