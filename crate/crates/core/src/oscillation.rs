//! Local polynomial approximation on balls and the oscillation quasi-norms.
//!
//! On `B(x,t) ∩ Ω` the inner product is `⟨f,g⟩_{x,t} = t^{-d} Σ f·conj(g)·w`. The
//! monomials of degree `< N` in local coordinates `(y − x)/t` are orthonormalized by
//! modified Gram-Schmidt with one reorthogonalization pass, and `Πf = Σ ⟨f,p_i⟩ p_i`.
//! `osc_v` is the `L_v` size of `f − Πf` under the same normalization; for `v ≠ 2` this
//! stands in for the best approximation in `L_v`.

use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::differences::{base_term, check_dim};
use crate::error::{Error, Result};
use crate::geometry::quadrature::{ball_quadrature, BallStencil};
use crate::geometry::DomainShape;
use crate::model::{monomial, monomial_exponents, space_dimension, ExtendedReal, Grid, Offset, Point, SampledFunction, ValidatedParams};
use crate::morrey::{local_average_field, morrey_norm_field, powr, rootr, RadiusLadder};
use crate::profile::ScaleProfile;
use crate::report::{BaseTerm, NormReport, Route};

const RANK_TOL: f64 = 1e-8;
const GRAM_TOL: f64 = 1e-8;

/// Orthonormal basis of polynomials of degree `< order` on one ball.
#[derive(Debug, Clone)]
pub struct LocalPolyBasis {
    pub dim: usize,
    pub center: Point,
    pub radius: f64,
    pub order: usize,
    /// Quadrature nodes of the ball.
    pub nodes: Vec<usize>,
    /// `(y − x)/t` for every node.
    pub local: Vec<Point>,
    /// Cell volume of each node.
    pub weight: f64,
    pub exponents: Vec<[u32; 2]>,
    /// `change[i][k]`: coefficient of monomial `k` in basis element `i` (lower triangular).
    pub change: Vec<Vec<f64>>,
    /// `values[i][m]`: basis element `i` at node `m`.
    pub values: Vec<Vec<f64>>,
    /// Max over nodes of `|p_i|`.
    pub sup_norms: Vec<f64>,
    /// `max |⟨p_i,p_j⟩ − δ_ij|`.
    pub gram_residual: f64,
}

impl LocalPolyBasis {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn scale(&self) -> f64 {
        self.radius.powi(-(self.dim as i32)) * self.weight
    }

    /// `t^{-d} |B ∩ Ω|_w`.
    pub fn normalized_measure(&self) -> f64 {
        self.scale() * self.nodes.len() as f64
    }

    /// `c₁ = Σ_i sup |p_i|²`, so that `|Πf(y)| ≤ c₁ · t^{-d} Σ |f| w` on the ball.
    pub fn c1(&self) -> f64 {
        self.sup_norms.iter().map(|s| s * s).sum()
    }

    /// `1 + c₁ · t^{-d}|B ∩ Ω|_w`, the quasi-optimality constant of `Π` in `L_1`.
    pub fn quasi_optimality_bound(&self) -> f64 {
        1.0 + self.c1() * self.normalized_measure()
    }

    /// `⟨a, b⟩_{x,t}` for values at the basis nodes.
    pub fn inner(&self, a: &[Complex64], b: &[Complex64]) -> Complex64 {
        a.iter().zip(b).map(|(x, y)| x * y.conj()).sum::<Complex64>() * self.scale()
    }

    /// Values of a node field on the ball.
    pub fn gather(&self, f: &SampledFunction) -> Vec<Complex64> {
        self.nodes.iter().map(|&j| f.value(j)).collect()
    }

    /// `Πg` for values `g` at the basis nodes.
    pub fn project_values(&self, g: &[Complex64]) -> LocalPolynomial {
        let coeffs: Vec<Complex64> = self
            .values
            .iter()
            .map(|p| g.iter().zip(p).map(|(a, &b)| a * b).sum::<Complex64>() * self.scale())
            .collect();
        let mut mono = vec![Complex64::new(0.0, 0.0); self.exponents.len()];
        for (c, row) in coeffs.iter().zip(&self.change) {
            for (m, &r) in mono.iter_mut().zip(row) {
                *m += c * r;
            }
        }
        LocalPolynomial { center: self.center, radius: self.radius, exponents: self.exponents.clone(), coeffs, monomial: mono }
    }

    /// A polynomial evaluated at the basis nodes.
    pub fn evaluate(&self, poly: &LocalPolynomial) -> Vec<Complex64> {
        (0..self.nodes.len())
            .map(|m| poly.coeffs.iter().zip(&self.values).map(|(c, p)| c * p[m]).sum())
            .collect()
    }
}

/// A polynomial of degree `< N` attached to a ball.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalPolynomial {
    pub center: Point,
    pub radius: f64,
    pub exponents: Vec<[u32; 2]>,
    /// Coefficients in the orthonormal basis it came from.
    pub coeffs: Vec<Complex64>,
    /// Coefficients of the monomials in `(y − x)/t`.
    pub monomial: Vec<Complex64>,
}

impl LocalPolynomial {
    pub fn degree_bound(&self) -> usize {
        self.exponents.iter().map(|e| (e[0] + e[1]) as usize + 1).max().unwrap_or(0)
    }

    /// Value at local coordinates `z = (y − x)/t`.
    pub fn eval_local(&self, z: Point) -> Complex64 {
        self.exponents.iter().zip(&self.monomial).map(|(&e, c)| c * monomial(e, z)).sum()
    }

    /// Value at a point of the grid (minimal image on periodic grids).
    pub fn eval(&self, grid: &Grid, y: Point) -> Complex64 {
        let off = grid.displacement(self.center, y);
        self.eval_local([off[0] / self.radius, off[1] / self.radius])
    }
}

/// The orthonormalized monomials at a fixed set of local coordinates.
struct Fit {
    change: Vec<Vec<f64>>,
    values: Vec<Vec<f64>>,
    gram_residual: f64,
}

fn orthonormalize(local: &[Point], scale: f64, exponents: &[[u32; 2]]) -> Result<Fit> {
    let needed = exponents.len();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>() * scale;
    let mut values: Vec<Vec<f64>> = Vec::with_capacity(needed);
    let mut change: Vec<Vec<f64>> = Vec::with_capacity(needed);
    for (k, &e) in exponents.iter().enumerate() {
        let mut v: Vec<f64> = local.iter().map(|&z| monomial(e, z)).collect();
        let mut c = vec![0.0; needed];
        c[k] = 1.0;
        let original = dot(&v, &v).sqrt();
        for _pass in 0..2 {
            for (q, qc) in values.iter().zip(&change) {
                let r = dot(&v, q);
                v.iter_mut().zip(q).for_each(|(a, b)| *a -= r * b);
                c.iter_mut().zip(qc).for_each(|(a, b)| *a -= r * b);
            }
        }
        let norm = dot(&v, &v).sqrt();
        if !(original > 0.0 && norm > RANK_TOL * original) {
            continue;
        }
        v.iter_mut().for_each(|a| *a /= norm);
        c.iter_mut().for_each(|a| *a /= norm);
        values.push(v);
        change.push(c);
    }
    if values.len() < needed {
        return Err(Error::DegenerateBall { rank: values.len(), needed });
    }
    let mut gram_residual: f64 = 0.0;
    for i in 0..needed {
        for j in 0..=i {
            let target = if i == j { 1.0 } else { 0.0 };
            gram_residual = gram_residual.max((dot(&values[i], &values[j]) - target).abs());
        }
    }
    if gram_residual > GRAM_TOL {
        return Err(Error::DegenerateBall { rank: needed - 1, needed });
    }
    Ok(Fit { change, values, gram_residual })
}

fn assemble(center: Point, radius: f64, order: usize, d: usize, nodes: Vec<usize>, local: Vec<Point>, weight: f64) -> Result<LocalPolyBasis> {
    let exponents = monomial_exponents(d, order);
    let scale = radius.powi(-(d as i32)) * weight;
    let fit = orthonormalize(&local, scale, &exponents)?;
    let sup_norms = fit.values.iter().map(|p| p.iter().fold(0.0, |m: f64, a| m.max(a.abs()))).collect();
    Ok(LocalPolyBasis {
        dim: d,
        center,
        radius,
        order,
        nodes,
        local,
        weight,
        exponents,
        change: fit.change,
        values: fit.values,
        sup_norms,
        gram_residual: fit.gram_residual,
    })
}

/// Orthonormal basis on `B(x,t) ∩ Ω`; `DegenerateBall` when the ball's nodes do not
/// determine polynomials of degree `< order`.
pub fn build_local_basis(domain: &DomainShape, grid: &Grid, x: Point, t: f64, order: usize) -> Result<LocalPolyBasis> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::param(format!("radius must be positive, got {t}")));
    }
    if order == 0 {
        return Err(Error::param("polynomial order must be at least 1"));
    }
    let q = ball_quadrature(domain, grid, x, t)?;
    let local = q.offsets.iter().map(|o| [o[0] / t, o[1] / t]).collect();
    assemble(x, t, order, grid.dim(), q.nodes, local, grid.cell_volume())
}

/// `Π^{N-1}_{x,t} f`.
pub fn project(f: &SampledFunction, basis: &LocalPolyBasis) -> LocalPolynomial {
    basis.project_values(&basis.gather(f))
}

fn residual_size(g: &[Complex64], fitted: &[Complex64], scale: f64, v: ExtendedReal) -> f64 {
    let r = g.iter().zip(fitted).map(|(a, b)| (a - b).norm());
    match v {
        ExtendedReal::Infinity => r.fold(0.0, f64::max),
        ExtendedReal::Finite(v) => rootr(r.map(|a| powr(a, v)).sum::<f64>() * scale, v),
    }
}

/// Builds the basis at the largest feasible order `≤ order`; `None` for an empty ball.
fn basis_with_fallback(
    build: impl Fn(usize) -> Result<LocalPolyBasis>,
    order: usize,
) -> Result<Option<LocalPolyBasis>> {
    for n in (1..=order).rev() {
        match build(n) {
            Ok(b) => return Ok(Some(b)),
            Err(Error::DegenerateBall { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(None)
}

fn osc_of(basis: &LocalPolyBasis, g: &[Complex64], v: ExtendedReal) -> f64 {
    let fitted = basis.evaluate(&basis.project_values(g));
    residual_size(g, &fitted, basis.scale(), v)
}

/// `osc^{N−1}_v f(x,t)` on `B(x,t) ∩ Ω`, with the order reduced on degenerate balls.
pub fn osc(f: &SampledFunction, domain: &DomainShape, x: Point, t: f64, order: usize, v: ExtendedReal) -> Result<f64> {
    if !domain.membership(x) {
        return Err(Error::geometry(format!("{x:?} is not inside the domain")));
    }
    let grid = f.grid();
    match basis_with_fallback(|n| build_local_basis(domain, grid, x, t, n), order)? {
        Some(b) => Ok(osc_of(&b, &b.gather(f), v)),
        None => Ok(0.0),
    }
}

/// Orthonormalized graded-lex monomials at `local`, cut to the largest order `≤ order`
/// whose monomials are independent there. Same sweep as [`build_local_basis`] without
/// the change-of-basis bookkeeping.
fn orthonormal_prefix(local: &[Point], scale: f64, d: usize, order: usize) -> Vec<Vec<f64>> {
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>() * scale;
    let mut q: Vec<Vec<f64>> = Vec::new();
    for e in monomial_exponents(d, order) {
        let mut v: Vec<f64> = local.iter().map(|&z| monomial(e, z)).collect();
        let original = dot(&v, &v).sqrt();
        for _pass in 0..2 {
            for p in &q {
                let r = dot(&v, p);
                v.iter_mut().zip(p).for_each(|(a, b)| *a -= r * b);
            }
        }
        let norm = dot(&v, &v).sqrt();
        if !(original > 0.0 && norm > RANK_TOL * original) {
            break;
        }
        v.iter_mut().for_each(|a| *a /= norm);
        q.push(v);
    }
    let feasible = (1..=order).map(|n| space_dimension(d, n)).filter(|&k| k <= q.len()).max().unwrap_or(0);
    q.truncate(feasible);
    q
}

/// `L_v` size of `g − Σ ⟨g,q_i⟩ q_i` for real and imaginary parts given separately.
fn projection_residual(re: &[f64], im: Option<&[f64]>, q: &[Vec<f64>], scale: f64, v: ExtendedReal) -> f64 {
    let fit = |g: &[f64]| -> Vec<f64> {
        let mut r = g.to_vec();
        for p in q {
            let c = g.iter().zip(p).map(|(a, b)| a * b).sum::<f64>() * scale;
            r.iter_mut().zip(p).for_each(|(a, b)| *a -= c * b);
        }
        r
    };
    let rr = fit(re);
    let ri = im.map(fit);
    let sizes = (0..rr.len()).map(|m| match &ri {
        None => rr[m].abs(),
        Some(ri) => rr[m].hypot(ri[m]),
    });
    match v {
        ExtendedReal::Infinity => sizes.fold(0.0, f64::max),
        ExtendedReal::Finite(v) => rootr(sizes.map(|a| powr(a, v)).sum::<f64>() * scale, v),
    }
}

/// Pivots of the Gram matrix below this (relative, squared) send the fit back to
/// Gram-Schmidt, which makes the rank decision.
const CHOLESKY_TOL: f64 = 1e-6;

/// Same `L_2` projection residual as [`projection_residual`], via the normal equations.
#[allow(clippy::too_many_arguments)]
fn normal_equation_residual(
    ball: &BallStencil,
    grid: &Grid,
    mask: &[bool],
    x: usize,
    inv_t: f64,
    exps: &[[u32; 2]],
    re: &[f64],
    im: Option<&[f64]>,
    scale: f64,
    v: ExtendedReal,
) -> Option<f64> {
    let k = exps.len();
    let two_d = grid.dim() == 2;
    // exponents split into the across-run part and the along-run part
    let split: Vec<(usize, usize)> =
        exps.iter().map(|e| if two_d { (e[0] as usize, e[1] as usize) } else { (0, e[0] as usize) }).collect();
    let deg = split.iter().map(|&(a, b)| a.max(b)).max().unwrap_or(0);
    let pow = |z: f64, n: usize| -> Vec<f64> {
        let mut out = vec![1.0; n + 1];
        for i in 1..=n {
            out[i] = out[i - 1] * z;
        }
        out
    };
    // the run's fixed coordinate and the along-run coordinate of its first node
    let run_coords = |m: Offset| if two_d { (m[0] as f64 * inv_t, m[1] as f64 * inv_t) } else { (0.0, m[0] as f64 * inv_t) };
    let mut g = vec![0.0; k * k];
    let mut b = vec![0.0; 2 * k];
    let mut sums = vec![0.0; 2 * deg + 1];
    let mut fr = vec![0.0; deg + 1];
    let mut fi = vec![0.0; deg + 1];
    ball.for_each_run(grid, x, |s, len, m| {
        let (zr, zc) = run_coords(m);
        sums.iter_mut().for_each(|a| *a = 0.0);
        fr.iter_mut().for_each(|a| *a = 0.0);
        fi.iter_mut().for_each(|a| *a = 0.0);
        for i in 0..len {
            let j = s + i;
            if !mask[j] {
                continue;
            }
            let z = zc + i as f64 * inv_t;
            let (vr, vi) = (re[j], im.map_or(0.0, |im| im[j]));
            let mut zp = 1.0;
            for q in 0..=2 * deg {
                sums[q] += zp;
                if q <= deg {
                    fr[q] += zp * vr;
                    fi[q] += zp * vi;
                }
                zp *= z;
            }
        }
        let rp = pow(zr, 2 * deg);
        for a in 0..k {
            let (ar, ac) = split[a];
            for c in a..k {
                let (cr, cc) = split[c];
                g[a * k + c] += rp[ar + cr] * sums[ac + cc];
            }
            b[a] += rp[ar] * fr[ac];
            b[k + a] += rp[ar] * fi[ac];
        }
    });
    // Cholesky, lower factor stored in the lower triangle
    for a in 0..k {
        let diag = g[a * k + a];
        let mut piv = diag;
        for c in 0..a {
            piv -= g[a * k + c] * g[a * k + c];
        }
        if !(diag > 0.0 && piv > CHOLESKY_TOL * diag) {
            return None;
        }
        let l = piv.sqrt();
        g[a * k + a] = l;
        for r in a + 1..k {
            let mut acc = g[a * k + r];
            for c in 0..a {
                acc -= g[r * k + c] * g[a * k + c];
            }
            g[r * k + a] = acc / l;
        }
    }
    let solve = |rhs: &mut [f64]| {
        for a in 0..k {
            let mut acc = rhs[a];
            for c in 0..a {
                acc -= g[a * k + c] * rhs[c];
            }
            rhs[a] = acc / g[a * k + a];
        }
        for a in (0..k).rev() {
            let mut acc = rhs[a];
            for c in a + 1..k {
                acc -= g[c * k + a] * rhs[c];
            }
            rhs[a] = acc / g[a * k + a];
        }
    };
    let (cr, ci) = b.split_at_mut(k);
    solve(cr);
    if im.is_some() {
        solve(ci);
    }
    let mut acc = 0.0_f64;
    let mut pr = vec![0.0; deg + 1];
    let mut pi = vec![0.0; deg + 1];
    ball.for_each_run(grid, x, |s, len, m| {
        let (zr, zc) = run_coords(m);
        let rp = pow(zr, deg);
        pr.iter_mut().for_each(|a| *a = 0.0);
        pi.iter_mut().for_each(|a| *a = 0.0);
        for a in 0..k {
            let (ar, ac) = split[a];
            pr[ac] += cr[a] * rp[ar];
            pi[ac] += ci[a] * rp[ar];
        }
        let horner = |p: &[f64], z: f64| p.iter().rev().fold(0.0, |h, &c| h * z + c);
        for i in 0..len {
            let j = s + i;
            if !mask[j] {
                continue;
            }
            let z = zc + i as f64 * inv_t;
            let size = match im {
                None => (re[j] - horner(&pr, z)).abs(),
                Some(im) => (re[j] - horner(&pr, z)).hypot(im[j] - horner(&pi, z)),
            };
            acc = match v {
                ExtendedReal::Infinity => acc.max(size),
                ExtendedReal::Finite(v) => acc + powr(size, v),
            };
        }
    });
    Some(match v {
        ExtendedReal::Infinity => acc,
        ExtendedReal::Finite(v) => rootr(acc * scale, v),
    })
}

/// `osc_v(f, x, t)` at every node of `Ω` (zero elsewhere) for every ladder radius.
pub fn osc_profile(f: &SampledFunction, domain: &DomainShape, order: usize, v: ExtendedReal, ladder: &RadiusLadder) -> Result<ScaleProfile> {
    let grid = f.grid();
    ladder.check(grid)?;
    let radii = ladder.radii();
    let levels = radii
        .iter()
        .map(|&t| osc_level(f, domain, order, v, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(ScaleProfile { radii, levels })
}

fn osc_level(f: &SampledFunction, domain: &DomainShape, order: usize, v: ExtendedReal, t: f64) -> Result<Vec<f64>> {
    if order == 0 {
        return Err(Error::param("polynomial order must be at least 1"));
    }
    let grid = f.grid();
    let d = grid.dim();
    let mask = domain.node_mask(grid)?;
    let stencil = BallStencil::new(grid, t);
    let scale = t.powi(-(d as i32)) * grid.cell_volume();
    let h = grid.spacing();
    let to_local = |m: Offset| [m[0] as f64 * h / t, m[1] as f64 * h / t];
    let (re, im) = (f.re(), f.im());
    let ball_values = |nodes: &[usize]| -> (Vec<f64>, Option<Vec<f64>>) {
        (nodes.iter().map(|&j| re[j]).collect(), im.map(|im| nodes.iter().map(|&j| im[j]).collect()))
    };
    let step = |m: Offset, k: usize| if d == 2 { [m[0], m[1] + k as i64] } else { [m[0] + k as i64, 0] };
    let ball = |x: usize| -> (Vec<usize>, Vec<Point>) {
        let mut nodes = Vec::new();
        let mut local = Vec::new();
        stencil.for_each_run(grid, x, |s, len, m| {
            for k in 0..len {
                if mask[s + k] {
                    nodes.push(s + k);
                    local.push(to_local(step(m, k)));
                }
            }
        });
        (nodes, local)
    };
    if domain.is_torus() {
        // every ball is a translate of the one at node 0, visited in the same order
        let (_, local) = ball(0);
        let q = orthonormal_prefix(&local, scale, d, order);
        return Ok((0..grid.node_count())
            .into_par_iter()
            .map(|x| {
                let (nodes, _) = ball(x);
                let (gr, gi) = ball_values(&nodes);
                projection_residual(&gr, gi.as_deref(), &q, scale, v)
            })
            .collect());
    }
    let exps = monomial_exponents(d, order);
    let inv_t = h / t;
    Ok((0..grid.node_count())
        .into_par_iter()
        .map(|x| {
            if !mask[x] {
                return 0.0;
            }
            if let Some(r) = normal_equation_residual(&stencil, grid, &mask, x, inv_t, &exps, re, im, scale, v) {
                return r;
            }
            let (nodes, local) = ball(x);
            let q = orthonormal_prefix(&local, scale, d, order);
            let (gr, gi) = ball_values(&nodes);
            projection_residual(&gr, gi.as_deref(), &q, scale, v)
        })
        .collect())
}

/// `|f|_{osc}`: Morrey norm of the dyadic `dt/t` integral of `t^{-s} osc_v`.
pub fn osc_seminorm(f: &SampledFunction, domain: &DomainShape, params: &ValidatedParams, ladder: &RadiusLadder) -> Result<f64> {
    check_dim(f, params)?;
    let profile = osc_profile(f, domain, params.order, params.v, ladder)?;
    let g = profile.time_integral(params.s, params.q, params.t_max)?;
    morrey_norm_field(f.grid(), domain, &g, params.p, params.u, ladder)
}

pub fn osc_quasinorm(
    f: &SampledFunction,
    domain: &DomainShape,
    params: &ValidatedParams,
    base: BaseTerm,
    ladder: &RadiusLadder,
) -> Result<NormReport> {
    let start = Instant::now();
    let base_value = base_term(f, domain, params, base, ladder)?;
    let seminorm = osc_seminorm(f, domain, params, ladder)?;
    Ok(NormReport {
        route: Route::Osc,
        base_kind: base,
        base: base_value,
        seminorm,
        total: base_value + seminorm,
        params: params.clone(),
        grid: f.grid().clone(),
        domain: domain.to_string(),
        wall_time: start.elapsed(),
    })
}

/// Finest level `j` with `2^{-j}` at least two grid spacings.
pub fn clubsuit_max_level(grid: &Grid) -> u32 {
    let mut j = 0;
    while 0.5f64.powi(j as i32 + 1) >= 2.0 * grid.spacing() * (1.0 - 1e-12) {
        j += 1;
    }
    j
}

/// The ♣-norm on the torus: Morrey norm of
/// `[ (Σ_{B(·,1)} |f|^v w)^{q/v} + Σ_{j=1}^{j_max} 2^{jq(s+d/v)} (Σ_{B(·,2^{-j})} |f − Πf|^v w)^{q/v} ]^{1/q}`.
pub fn clubsuit_norm(f: &SampledFunction, params: &ValidatedParams, j_max: u32, ladder: &RadiusLadder) -> Result<f64> {
    check_dim(f, params)?;
    let grid = f.grid();
    if !grid.is_periodic() {
        return Err(Error::geometry("the ♣-norm is defined on the torus only"));
    }
    let finest = clubsuit_max_level(grid);
    if j_max > finest {
        return Err(Error::param(format!("j_max={j_max} exceeds the grid resolution (finest level {finest})")));
    }
    let torus = DomainShape::full_torus();
    let d = grid.dim() as i32;
    let base = local_average_field(f, &torus, params.v, 1.0)?;
    // (Σ_{B(x,t)} |r|^v w)^{1/v} = t^{d/v} osc_v, so each term is 2^{js} osc_v(x, 2^{-j})
    let levels = (1..=j_max)
        .map(|j| {
            let t = 0.5f64.powi(j as i32);
            let factor = match params.v {
                ExtendedReal::Infinity => 2f64.powf(j as f64 * params.s),
                ExtendedReal::Finite(v) => 2f64.powf(j as f64 * (params.s + d as f64 / v)) * t.powf(d as f64 / v),
            };
            osc_level(f, &torus, params.order, params.v, t).map(|l| l.into_iter().map(|o| factor * o).collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>>>()?;
    let g: Vec<f64> = (0..grid.node_count())
        .map(|x| {
            let terms = std::iter::once(base[x]).chain(levels.iter().map(|l| l[x]));
            match params.q {
                ExtendedReal::Infinity => terms.fold(0.0, f64::max),
                ExtendedReal::Finite(q) => terms.map(|a| a.powf(q)).sum::<f64>().powf(1.0 / q),
            }
        })
        .collect();
    morrey_norm_field(grid, &torus, &g, params.p, params.u, ladder)
}

/// Per-node basis diagnostics at one radius: `(node, c₁, gram residual, order used)`.
pub fn basis_diagnostics(domain: &DomainShape, grid: &Grid, t: f64, order: usize) -> Result<Vec<(usize, f64, f64, usize)>> {
    let nodes = domain.interior_nodes(grid)?;
    let rows: Vec<Option<(usize, f64, f64, usize)>> = nodes
        .into_par_iter()
        .map(|x| {
            let b = basis_with_fallback(|n| build_local_basis(domain, grid, grid.coords(x), t, n), order)?;
            Ok(b.map(|b| (x, b.c1(), b.gram_residual, b.order)))
        })
        .collect::<Result<_>>()?;
    Ok(rows.into_iter().flatten().collect())
}

/// Number of basis elements for the given order.
pub fn basis_size(d: usize, order: usize) -> usize {
    space_dimension(d, order)
}
