//! Higher-order differences and the difference quasi-norms.
//!
//! `Δ^N_h f(x) = Σ_k (−1)^{N−k} C(N,k) f(x + kh)` for lattice steps `h`. The inner mean
//! at scale `t` is
//!
//! ```text
//! D_t(x) = (t^{-d} Σ_{h ∈ V^N(x,t)} |Δ^N_h f(x)|^v · w)^{1/v}
//! ```
//!
//! with `w` the cell volume, and the maximum over `V^N(x,t)` for `v = ∞`.

use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::steps::StepStencil;
use crate::geometry::DomainShape;
use crate::model::{ExtendedReal, Grid, Offset, SampledFunction, ValidatedParams};
use crate::morrey::{local_average_term, morrey_norm, morrey_norm_field, powr, rootr, RadiusLadder};
use crate::profile::ScaleProfile;
use crate::report::{BaseTerm, NormReport, Route};

/// Signed binomial weights `(−1)^{N−k} C(N,k)`, `k = 0..=N`.
pub fn difference_weights(order: usize) -> Vec<f64> {
    let mut c = vec![1.0f64; order + 1];
    for k in 1..=order {
        c[k] = c[k - 1] * (order - k + 1) as f64 / k as f64;
    }
    c.iter()
        .enumerate()
        .map(|(k, &b)| if (order - k) % 2 == 0 { b } else { -b })
        .collect()
}

/// `Δ^N_m f(x)` for a lattice step; `None` when some `x + km` leaves a non-periodic grid.
pub(crate) fn delta_lattice(f: &SampledFunction, weights: &[f64], x: usize, m: Offset) -> Option<Complex64> {
    let grid = f.grid();
    let mut re = 0.0;
    let mut im = 0.0;
    for (k, &c) in weights.iter().enumerate() {
        let k = k as i64;
        let j = grid.shift(x, [k * m[0], k * m[1]])?;
        re += c * f.re()[j];
        if let Some(fi) = f.im() {
            im += c * fi[j];
        }
    }
    Some(Complex64::new(re, im))
}

/// `Δ^N_h f(x)` at node `x` for a grid-aligned physical step `h`.
pub fn delta_n(f: &SampledFunction, x: usize, h: &[f64], order: usize) -> Result<Complex64> {
    if order == 0 {
        return Err(Error::param("difference order must be at least 1"));
    }
    let m = f.grid().lattice_offset(h)?;
    delta_lattice(f, &difference_weights(order), x, m)
        .ok_or_else(|| Error::geometry(format!("x + k·h leaves the grid for node {x}")))
}

/// `Δ^N_{h,Ω} f(x)`: `Δ^N_h f(x)` when the segment `[x, x + Nh]` lies in `Ω`, else 0.
///
/// Convex domains test the far endpoint only; other domains test `4N + 1` equispaced
/// points of the segment.
pub fn delta_n_domain(f: &SampledFunction, domain: &DomainShape, x: usize, h: &[f64], order: usize) -> Result<Complex64> {
    let grid = f.grid();
    domain.check_grid(grid)?;
    if !domain.membership(grid.coords(x)) {
        return Err(Error::geometry(format!("node {x} is not inside the domain")));
    }
    if order == 0 {
        return Err(Error::param("difference order must be at least 1"));
    }
    let m = grid.lattice_offset(h)?;
    if domain.is_torus() {
        return delta_n(f, x, h, order);
    }
    if !segment_inside(domain, f, x, m, order) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    Ok(delta_lattice(f, &difference_weights(order), x, m).unwrap_or_default())
}

pub(crate) fn segment_inside(domain: &DomainShape, f: &SampledFunction, x: usize, m: Offset, order: usize) -> bool {
    let grid = f.grid();
    let l = order as i64;
    let Some(end) = grid.shift(x, [l * m[0], l * m[1]]) else {
        return false;
    };
    if domain.is_convex() {
        return domain.membership(grid.coords(end));
    }
    let x0 = grid.coords(x);
    let v = grid.offset_vector([l * m[0], l * m[1]]);
    let samples = 4 * order;
    (0..=samples).all(|k| {
        let s = k as f64 / samples as f64;
        domain.membership([x0[0] + s * v[0], x0[1] + s * v[1]])
    })
}

/// `D_t(x)` at node `x`; zero for an empty step set.
pub fn diff_local_mean(
    f: &SampledFunction,
    domain: &DomainShape,
    x: usize,
    t: f64,
    order: usize,
    v: ExtendedReal,
) -> Result<f64> {
    let grid = f.grid();
    let mask = domain.node_mask(grid)?;
    if x >= grid.node_count() || !mask[x] {
        return Err(Error::geometry(format!("node {x} is not inside the domain")));
    }
    if order == 0 {
        return Err(Error::param("difference order must be at least 1"));
    }
    let steps = LevelSteps::new(grid, t);
    Ok(local_mean(f, domain.is_torus(), &mask, &difference_weights(order), &steps, x, t, v))
}

/// Step offsets of one radius with their row-major linear form.
pub(crate) struct LevelSteps {
    offsets: Vec<Offset>,
    linear: Vec<i64>,
}

impl LevelSteps {
    pub(crate) fn new(grid: &Grid, t: f64) -> Self {
        let offsets = StepStencil::new(grid, t).offsets;
        let stride = if grid.dim() == 2 { grid.n() as i64 } else { 1 };
        let linear = offsets.iter().map(|m| m[0] * stride + m[1]).collect();
        LevelSteps { offsets, linear }
    }
}

/// `|Δ^N_m f(x)|` for every admissible step of the level.
fn admissible_differences<'a>(
    f: &'a SampledFunction,
    torus: bool,
    mask: &'a [bool],
    weights: &'a [f64],
    steps: &'a LevelSteps,
    x: usize,
) -> impl Iterator<Item = f64> + 'a {
    let grid = f.grid();
    let order = weights.len() as i64 - 1;
    let n = grid.n() as i64;
    let second = if grid.dim() == 2 { n } else { 1 };
    let [i0, i1] = grid.multi_index(x).map(|i| i as i64);
    let (re, im) = (f.re(), f.im());
    steps.offsets.iter().zip(&steps.linear).filter_map(move |(&m, &lin)| {
        if torus {
            return delta_lattice(f, weights, x, m).map(|z| z.norm());
        }
        let (e0, e1) = (i0 + order * m[0], i1 + order * m[1]);
        if e0 < 0 || e0 >= n || e1 < 0 || e1 >= second {
            return None;
        }
        let base = x as i64;
        if !(1..=order).all(|l| mask[(base + l * lin) as usize]) {
            return None;
        }
        let at = |k: usize| (base + k as i64 * lin) as usize;
        let r: f64 = weights.iter().enumerate().map(|(k, &c)| c * re[at(k)]).sum();
        Some(match im {
            None => r.abs(),
            Some(im) => {
                let i: f64 = weights.iter().enumerate().map(|(k, &c)| c * im[at(k)]).sum();
                r.hypot(i)
            }
        })
    })
}

#[allow(clippy::too_many_arguments)]
fn local_mean(
    f: &SampledFunction,
    torus: bool,
    mask: &[bool],
    weights: &[f64],
    steps: &LevelSteps,
    x: usize,
    t: f64,
    v: ExtendedReal,
) -> f64 {
    let grid = f.grid();
    let diffs = admissible_differences(f, torus, mask, weights, steps, x);
    match v {
        ExtendedReal::Infinity => diffs.fold(0.0, f64::max),
        ExtendedReal::Finite(v) => {
            let sum: f64 = diffs.map(|a| powr(a, v)).sum();
            rootr(t.powi(-(grid.dim() as i32)) * sum * grid.cell_volume(), v)
        }
    }
}

/// `D_t` on every node of `Ω` (zero elsewhere) for every ladder radius.
pub type DifferenceProfile = ScaleProfile;

pub fn difference_profile(
    f: &SampledFunction,
    domain: &DomainShape,
    order: usize,
    v: ExtendedReal,
    ladder: &RadiusLadder,
) -> Result<DifferenceProfile> {
    if order == 0 {
        return Err(Error::param("difference order must be at least 1"));
    }
    let grid = f.grid();
    ladder.check(grid)?;
    let mask = domain.node_mask(grid)?;
    let torus = domain.is_torus();
    let weights = difference_weights(order);
    let radii = ladder.radii();
    let levels = radii
        .iter()
        .map(|&t| {
            let steps = LevelSteps::new(grid, t);
            (0..grid.node_count())
                .into_par_iter()
                .map(|x| if mask[x] { local_mean(f, torus, &mask, &weights, &steps, x, t, v) } else { 0.0 })
                .collect()
        })
        .collect();
    Ok(ScaleProfile { radii, levels })
}

/// `|f|_{Δ}`: Morrey norm of the dyadic `dt/t` integral of `t^{-s} D_t`.
pub fn diff_seminorm(f: &SampledFunction, domain: &DomainShape, params: &ValidatedParams, ladder: &RadiusLadder) -> Result<f64> {
    check_dim(f, params)?;
    let profile = difference_profile(f, domain, params.order, params.v, ladder)?;
    let g = profile.time_integral(params.s, params.q, params.t_max)?;
    morrey_norm_field(f.grid(), domain, &g, params.p, params.u, ladder)
}

pub(crate) fn check_dim(f: &SampledFunction, params: &ValidatedParams) -> Result<()> {
    if f.grid().dim() != params.d {
        return Err(Error::param(format!(
            "parameters are for d={}, function lives in d={}",
            params.d,
            f.grid().dim()
        )));
    }
    Ok(())
}

/// Base term selected by `base`.
pub fn base_term(
    f: &SampledFunction,
    domain: &DomainShape,
    params: &ValidatedParams,
    base: BaseTerm,
    ladder: &RadiusLadder,
) -> Result<f64> {
    match base {
        BaseTerm::Plain => morrey_norm(f, domain, params.p, params.u, ladder),
        BaseTerm::LocalAverage => local_average_term(f, domain, params.v, params.radius, params.p, params.u, ladder),
    }
}

pub fn diff_quasinorm(
    f: &SampledFunction,
    domain: &DomainShape,
    params: &ValidatedParams,
    base: BaseTerm,
    ladder: &RadiusLadder,
) -> Result<NormReport> {
    let start = Instant::now();
    let base_value = base_term(f, domain, params, base, ladder)?;
    let seminorm = diff_seminorm(f, domain, params, ladder)?;
    Ok(NormReport {
        route: Route::Diff,
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
