//! Route comparisons, equivalence sweeps, Whitney checks and refinement studies.

use std::fmt;
use std::path::Path;

use rayon::prelude::*;

use crate::differences::{diff_quasinorm, difference_weights, segment_inside};
use crate::error::{Error, Result};
use crate::geometry::steps::StepStencil;
use crate::geometry::DomainShape;
use crate::lp::{build_partition, lp_quasinorm};
use crate::model::io::write_atomic;
use crate::model::{sample, validate_params, CorpusSpec, ExtendedReal, Grid, KeyValueConfig, SampledFunction, SmoothnessParams, ValidatedParams};
use crate::morrey::{powr, rootr, RadiusLadder};
use crate::oscillation::{build_local_basis, clubsuit_max_level, clubsuit_norm, osc_quasinorm};
use crate::report::{BaseTerm, NormReport, Route};

/// Relative size below which a Whitney side counts as zero.
pub const WHITNEY_ZERO_TOL: f64 = 1e-10;

/// Quotient of two nonnegative totals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Ratio {
    Value(f64),
    /// Both totals vanish.
    BothZero,
    /// One total vanishes or is not finite.
    Undefined,
}

impl Ratio {
    pub fn of(a: f64, b: f64) -> Ratio {
        if !(a.is_finite() && b.is_finite() && a >= 0.0 && b >= 0.0) {
            Ratio::Undefined
        } else if a == 0.0 && b == 0.0 {
            Ratio::BothZero
        } else if a == 0.0 || b == 0.0 {
            Ratio::Undefined
        } else {
            Ratio::Value(a / b)
        }
    }

    pub fn value(self) -> Option<f64> {
        match self {
            Ratio::Value(r) => Some(r),
            _ => None,
        }
    }

    pub fn inverse(self) -> Ratio {
        match self {
            Ratio::Value(r) => Ratio::Value(1.0 / r),
            other => other,
        }
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ratio::Value(r) => write!(f, "{r:.10e}"),
            Ratio::BothZero => f.write_str("both-zero"),
            Ratio::Undefined => f.write_str("undefined"),
        }
    }
}

/// The grid a domain is sampled on: the unit torus or the bounding box midpoints.
pub fn grid_for(domain: &DomainShape, d: usize, n: usize) -> Result<Grid> {
    domain.default_grid(d, n)
}

fn require_torus(domain: &DomainShape, route: Route) -> Result<()> {
    if route.needs_torus() && !domain.is_torus() {
        return Err(Error::geometry(format!("route {route} is defined on the torus only, not on {domain}")));
    }
    Ok(())
}

/// One route's report. `base` applies to `diff` and `osc` only.
pub fn compute_norm(
    f: &SampledFunction,
    domain: &DomainShape,
    params: &ValidatedParams,
    route: Route,
    base: BaseTerm,
    ladder: &RadiusLadder,
) -> Result<NormReport> {
    require_torus(domain, route)?;
    match route {
        Route::Diff => diff_quasinorm(f, domain, params, base, ladder),
        Route::Osc => osc_quasinorm(f, domain, params, base, ladder),
        Route::Lp => lp_quasinorm(f, params, &build_partition(f.grid())?, ladder),
        Route::Clubsuit => {
            let start = std::time::Instant::now();
            let value = clubsuit_norm(f, params, clubsuit_max_level(f.grid()), ladder)?;
            Ok(NormReport {
                route,
                base_kind: BaseTerm::LocalAverage,
                base: value,
                seminorm: 0.0,
                total: value,
                params: params.clone(),
                grid: f.grid().clone(),
                domain: domain.to_string(),
                wall_time: start.elapsed(),
            })
        }
    }
}

#[derive(Debug, Clone)]
pub struct Comparison {
    pub a: NormReport,
    pub b: NormReport,
    /// `a.total / b.total`.
    pub ratio: Ratio,
    pub window_ok: bool,
}

pub fn compare_norms(
    f: &SampledFunction,
    domain: &DomainShape,
    params: &ValidatedParams,
    route_a: Route,
    route_b: Route,
    base: BaseTerm,
    ladder: &RadiusLadder,
) -> Result<Comparison> {
    require_torus(domain, route_a)?;
    require_torus(domain, route_b)?;
    let a = compute_norm(f, domain, params, route_a, base, ladder)?;
    let b = compute_norm(f, domain, params, route_b, base, ladder)?;
    let ratio = Ratio::of(a.total, b.total);
    Ok(Comparison { a, b, ratio, window_ok: params.window_ok })
}

/// Everything a sweep needs.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub domain: DomainShape,
    pub d: usize,
    pub corpus: Vec<CorpusSpec>,
    pub params: Vec<SmoothnessParams>,
    pub sizes: Vec<usize>,
    pub routes: Vec<Route>,
    pub base: BaseTerm,
    /// First ladder level; `0` starts at the grid extent.
    pub ladder_jmin: u32,
}

fn parse_list<T: std::str::FromStr>(cfg: &KeyValueConfig, key: &str, default: &str) -> Result<Vec<T>> {
    let raw = cfg.get(key).unwrap_or(default);
    raw.split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<T>().map_err(|_| Error::param(format!("bad value '{s}' for '{key}'"))))
        .collect()
}

impl SweepConfig {
    /// Keys: the `domain.*` family, `d`, `corpus`, `sizes`, `routes`, `base`, `ladder.jmin`,
    /// and `s p u q v order t_max radius`, each a `;`-list whose cross product (in that
    /// key order) forms the parameter grid.
    pub fn from_config(cfg: &KeyValueConfig) -> Result<Self> {
        let domain = DomainShape::from_config(cfg)?;
        let d: usize = cfg.parse_or("d", domain.dim().unwrap_or(1))?;
        let corpus = cfg.list("corpus").into_iter().map(str::parse).collect::<Result<Vec<CorpusSpec>>>()?;
        let sizes: Vec<usize> = parse_list(cfg, "sizes", "256")?;
        let routes = match cfg.get("routes") {
            Some(_) => cfg.list("routes").into_iter().map(str::parse).collect::<Result<Vec<Route>>>()?,
            None if domain.is_torus() => vec![Route::Lp, Route::Diff, Route::Osc],
            None => vec![Route::Diff, Route::Osc],
        };
        let base: BaseTerm = cfg.get("base").unwrap_or("plain").parse()?;
        let ladder_jmin = cfg.parse_or("ladder.jmin", 0u32)?;

        let s: Vec<f64> = parse_list(cfg, "s", "0.7")?;
        let p: Vec<f64> = parse_list(cfg, "p", "2")?;
        let u: Vec<f64> = parse_list(cfg, "u", "")?;
        let q: Vec<ExtendedReal> = parse_list(cfg, "q", "2")?;
        let v: Vec<ExtendedReal> = parse_list(cfg, "v", "2")?;
        let order: Vec<usize> = parse_list(cfg, "order", "2")?;
        let t_max: Vec<ExtendedReal> = parse_list(cfg, "t_max", "1")?;
        let radius: Vec<f64> = parse_list(cfg, "radius", "1")?;
        let mut params = Vec::new();
        for &s in &s {
            for &p in &p {
                let us = if u.is_empty() { vec![p] } else { u.clone() };
                for &u in &us {
                    for &q in &q {
                        for &v in &v {
                            for &order in &order {
                                for &t_max in &t_max {
                                    for &radius in &radius {
                                        params.push(SmoothnessParams { d, s, u, p, q, v, order, t_max, radius });
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(SweepConfig { domain, d, corpus, params, sizes, routes, base, ladder_jmin })
    }

    /// The config echoed back in key-value form.
    pub fn to_config(&self) -> KeyValueConfig {
        let mut cfg = KeyValueConfig::default();
        cfg.set("domain", &self.domain);
        cfg.set("d", self.d);
        cfg.set("corpus", join(&self.corpus));
        cfg.set("sizes", join(&self.sizes));
        cfg.set("routes", join(&self.routes));
        cfg.set("base", self.base);
        cfg.set("ladder.jmin", self.ladder_jmin);
        cfg.set("param_sets", self.params.len());
        cfg
    }
}

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

/// One `(function, params, grid)` cell with the outcome of every route.
#[derive(Debug, Clone)]
pub struct SweepCell {
    pub function: String,
    pub param_set: usize,
    pub params: SmoothnessParams,
    pub n: usize,
    pub window_ok: bool,
    pub results: Vec<(Route, std::result::Result<NormReport, String>)>,
}

impl SweepCell {
    pub fn total(&self, route: Route) -> Option<f64> {
        self.results.iter().find(|(r, _)| *r == route).and_then(|(_, res)| res.as_ref().ok()).map(|rep| rep.total)
    }
}

/// Ratio statistics of one route pair over the in-window cells.
#[derive(Debug, Clone, PartialEq)]
pub struct PairStats {
    pub a: Route,
    pub b: Route,
    pub count: usize,
    pub both_zero: usize,
    pub min: f64,
    pub max: f64,
    pub median: f64,
    /// Largest `max(r₁/r₂, r₂/r₁)` between the two finest sizes.
    pub drift: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct EquivalenceReport {
    pub config: SweepConfig,
    pub cells: Vec<SweepCell>,
    pub pairs: Vec<PairStats>,
}

/// CSV columns, one row per cell and route.
pub const CSV_COLUMNS: [&str; 20] = [
    "function", "param_set", "n", "d", "domain", "s", "p", "u", "q", "v", "order", "t_max", "radius", "window_ok",
    "route", "base_kind", "base", "seminorm", "total", "status",
];

pub fn sweep(config: &SweepConfig) -> Result<EquivalenceReport> {
    if config.corpus.is_empty() {
        return Err(Error::param("sweep needs a nonempty corpus"));
    }
    if config.params.is_empty() || config.sizes.is_empty() || config.routes.is_empty() {
        return Err(Error::param("sweep needs parameter sets, grid sizes and routes"));
    }
    for &route in &config.routes {
        require_torus(&config.domain, route)?;
    }
    let mut jobs = Vec::new();
    for (fi, spec) in config.corpus.iter().enumerate() {
        for (pi, params) in config.params.iter().enumerate() {
            for &n in &config.sizes {
                jobs.push((fi, spec, pi, params, n));
            }
        }
    }
    let cells: Vec<SweepCell> = jobs
        .par_iter()
        .map(|&(_, spec, pi, params, n)| run_cell(config, spec, pi, params, n))
        .collect();
    let pairs = pair_statistics(config, &cells);
    Ok(EquivalenceReport { config: config.clone(), cells, pairs })
}

fn run_cell(config: &SweepConfig, spec: &CorpusSpec, param_set: usize, params: &SmoothnessParams, n: usize) -> SweepCell {
    let prepared = (|| -> Result<(SampledFunction, ValidatedParams, RadiusLadder)> {
        let grid = grid_for(&config.domain, config.d, n)?;
        let f = sample(spec, &grid)?;
        let vp = validate_params(params.clone())?;
        let ladder = RadiusLadder::starting_at(&grid, config.ladder_jmin)?;
        Ok((f, vp, ladder))
    })();
    let (window_ok, results) = match prepared {
        Ok((f, vp, ladder)) => (
            vp.window_ok,
            config
                .routes
                .iter()
                .map(|&r| (r, compute_norm(&f, &config.domain, &vp, r, config.base, &ladder).map_err(|e| e.to_string())))
                .collect(),
        ),
        Err(e) => (false, config.routes.iter().map(|&r| (r, Err(e.to_string()))).collect()),
    };
    SweepCell { function: spec.to_string(), param_set, params: params.clone(), n, window_ok, results }
}

fn pair_statistics(config: &SweepConfig, cells: &[SweepCell]) -> Vec<PairStats> {
    let finest: Vec<usize> = {
        let mut s = config.sizes.clone();
        s.sort_unstable();
        s.dedup();
        s.iter().rev().take(2).copied().collect()
    };
    let mut out = Vec::new();
    for (i, &a) in config.routes.iter().enumerate() {
        for &b in &config.routes[i + 1..] {
            let mut values = Vec::new();
            let mut both_zero = 0;
            for c in cells.iter().filter(|c| c.window_ok) {
                if let (Some(x), Some(y)) = (c.total(a), c.total(b)) {
                    match Ratio::of(x, y) {
                        Ratio::Value(r) => values.push(r),
                        Ratio::BothZero => both_zero += 1,
                        Ratio::Undefined => {}
                    }
                }
            }
            let drift = if finest.len() == 2 {
                let ratio_at = |c: &SweepCell| c.total(a).zip(c.total(b)).and_then(|(x, y)| Ratio::of(x, y).value());
                cells
                    .iter()
                    .filter(|c| c.window_ok && c.n == finest[0])
                    .filter_map(|fine| {
                        let coarse = cells.iter().find(|c| {
                            c.n == finest[1] && c.function == fine.function && c.param_set == fine.param_set
                        })?;
                        let (r1, r2) = (ratio_at(fine)?, ratio_at(coarse)?);
                        Some((r1 / r2).max(r2 / r1))
                    })
                    .reduce(f64::max)
            } else {
                None
            };
            values.sort_by(f64::total_cmp);
            let (min, max, median) = if values.is_empty() {
                (f64::NAN, f64::NAN, f64::NAN)
            } else {
                (values[0], values[values.len() - 1], values[values.len() / 2])
            };
            out.push(PairStats { a, b, count: values.len(), both_zero, min, max, median, drift });
        }
    }
    out
}

fn fmt_num(x: f64) -> String {
    format!("{x:.17e}")
}

impl EquivalenceReport {
    /// Smallest `C` with every in-window ratio of every pair inside `[1/C, C]`.
    pub fn common_constant(&self) -> f64 {
        self.pairs
            .iter()
            .filter(|p| p.count > 0)
            .map(|p| p.max.max(1.0 / p.min))
            .fold(1.0, f64::max)
    }

    pub fn max_drift(&self) -> Option<f64> {
        self.pairs.iter().filter_map(|p| p.drift).reduce(f64::max)
    }

    pub fn failed_cells(&self) -> usize {
        self.cells.iter().filter(|c| c.results.iter().any(|(_, r)| r.is_err())).count()
    }

    /// CSV with the columns of [`CSV_COLUMNS`]; wall times are left out so that
    /// identical runs give identical bytes.
    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let csv_err = |e: csv::Error| Error::format(e.to_string());
        w.write_record(CSV_COLUMNS).map_err(csv_err)?;
        for c in &self.cells {
            let p = &c.params;
            for (route, res) in &c.results {
                let (base_kind, base, semi, total, status) = match res {
                    Ok(r) => (r.base_kind.to_string(), fmt_num(r.base), fmt_num(r.seminorm), fmt_num(r.total), "ok".to_string()),
                    Err(e) => (String::new(), String::new(), String::new(), String::new(), format!("error: {e}")),
                };
                w.write_record([
                    c.function.clone(),
                    c.param_set.to_string(),
                    c.n.to_string(),
                    p.d.to_string(),
                    self.config.domain.to_string(),
                    p.s.to_string(),
                    p.p.to_string(),
                    p.u.to_string(),
                    p.q.to_string(),
                    p.v.to_string(),
                    p.order.to_string(),
                    p.t_max.to_string(),
                    p.radius.to_string(),
                    c.window_ok.to_string(),
                    route.to_string(),
                    base_kind,
                    base,
                    semi,
                    total,
                    status,
                ])
                .map_err(csv_err)?;
            }
        }
        w.into_inner().map_err(|e| Error::format(e.to_string()))
    }

    /// The sweep config with derived quantities.
    pub fn manifest(&self) -> KeyValueConfig {
        let mut m = self.config.to_config();
        m.set("csv.columns", CSV_COLUMNS.join(","));
        m.set("cells", self.cells.len());
        m.set("cells.failed", self.failed_cells());
        for (i, p) in self.config.params.iter().enumerate() {
            let key = format!("param_set.{i}");
            m.set(&key, format!("s={} p={} u={} q={} v={} N={} T={} R={}", p.s, p.p, p.u, p.q, p.v, p.order, p.t_max, p.radius));
            if let Ok(vp) = validate_params(p.clone()) {
                m.set(format!("{key}.lower_bound"), vp.lower_bound);
                m.set(format!("{key}.tau"), vp.tau);
                m.set(format!("{key}.window_ok"), vp.window_ok);
            }
        }
        for p in &self.pairs {
            let key = format!("ratio.{}_{}", p.a, p.b);
            m.set(format!("{key}.count"), p.count);
            m.set(format!("{key}.both_zero"), p.both_zero);
            m.set(format!("{key}.min"), fmt_num(p.min));
            m.set(format!("{key}.median"), fmt_num(p.median));
            m.set(format!("{key}.max"), fmt_num(p.max));
            if let Some(d) = p.drift {
                m.set(format!("{key}.drift"), fmt_num(d));
            }
        }
        m.set("common_constant", fmt_num(self.common_constant()));
        m
    }

    /// Writes `<path>` (CSV) and `<path>.manifest` atomically.
    pub fn write(&self, path: &Path) -> Result<()> {
        write_with_manifest(path, &self.to_csv()?, &self.manifest())
    }
}

impl fmt::Display for EquivalenceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} cells ({} with failures) on {}", self.cells.len(), self.failed_cells(), self.config.domain)?;
        for p in &self.pairs {
            write!(f, "{}/{}: n={} min={:.4} median={:.4} max={:.4}", p.a, p.b, p.count, p.min, p.median, p.max)?;
            if let Some(d) = p.drift {
                write!(f, " drift={d:.4}")?;
            }
            writeln!(f)?;
        }
        write!(f, "common constant C = {:.4}", self.common_constant())
    }
}

/// Columns of [`reports_to_csv`].
pub const REPORT_COLUMNS: [&str; 17] = [
    "route", "domain", "d", "n", "s", "p", "u", "q", "v", "order", "t_max", "radius", "window_ok", "base_kind", "base",
    "seminorm", "total",
];

/// One CSV row per report, without wall times.
pub fn reports_to_csv(reports: &[NormReport]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::format(e.to_string());
    w.write_record(REPORT_COLUMNS).map_err(csv_err)?;
    for r in reports {
        let p = &r.params;
        w.write_record([
            r.route.to_string(),
            r.domain.clone(),
            r.grid.dim().to_string(),
            r.grid.n().to_string(),
            p.s.to_string(),
            p.p.to_string(),
            p.u.to_string(),
            p.q.to_string(),
            p.v.to_string(),
            p.order.to_string(),
            p.t_max.to_string(),
            p.radius.to_string(),
            p.window_ok.to_string(),
            r.base_kind.to_string(),
            fmt_num(r.base),
            fmt_num(r.seminorm),
            fmt_num(r.total),
        ])
        .map_err(csv_err)?;
    }
    w.into_inner().map_err(|e| Error::format(e.to_string()))
}

/// Writes `<path>` and `<path>.manifest` atomically.
pub fn write_with_manifest(path: &Path, csv: &[u8], manifest: &KeyValueConfig) -> Result<()> {
    write_atomic(path, csv)?;
    let mut m = path.as_os_str().to_owned();
    m.push(".manifest");
    write_atomic(Path::new(&m), manifest.to_string().as_bytes())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WhitneyRecord {
    /// `(Σ_Ω |f − Πf|^v w)^{1/v}` with `Π` the global projection onto `𝒫_{N−1}`.
    pub lhs: f64,
    /// `max_{0<|h|≤diam} (Σ_Ω |Δ^N_{h,Ω} f|^v w)^{1/v}` over lattice steps.
    pub rhs: f64,
    /// `lhs / rhs`, 0 when `lhs` vanishes.
    pub ratio: f64,
}

fn lv_size(values: impl Iterator<Item = f64>, w: f64, v: ExtendedReal) -> f64 {
    match v {
        ExtendedReal::Infinity => values.fold(0.0, f64::max),
        ExtendedReal::Finite(v) => rootr(values.map(|a| powr(a, v)).sum::<f64>() * w, v),
    }
}

/// Both sides of the Whitney estimate on a bounded convex domain. Sides below
/// [`WHITNEY_ZERO_TOL`] times `‖f‖_{L_v(Ω)}` count as zero.
pub fn whitney_check(f: &SampledFunction, domain: &DomainShape, order: usize, v: ExtendedReal) -> Result<WhitneyRecord> {
    let (diam, convex) = domain.metrics()?;
    if !convex {
        return Err(Error::geometry(format!("the Whitney check needs a convex domain, got {domain}")));
    }
    if order == 0 {
        return Err(Error::param("order must be at least 1"));
    }
    let grid = f.grid();
    let mask = domain.node_mask(grid)?;
    let w = grid.cell_volume();
    let (lo, extent) = domain.bounding_box();
    let center = if grid.dim() == 1 { [lo[0] + extent / 2.0, 0.0] } else { [lo[0] + extent / 2.0, lo[1] + extent / 2.0] };
    let basis = build_local_basis(domain, grid, center, diam, order)?;
    let vals = basis.gather(f);
    let fitted = basis.evaluate(&basis.project_values(&vals));
    let norm = lv_size(vals.iter().map(|z| z.norm()), w, v);
    let mut lhs = lv_size(vals.iter().zip(&fitted).map(|(a, b)| (a - b).norm()), w, v);

    let weights = difference_weights(order);
    let stencil = StepStencil::new(grid, diam * (1.0 + 1e-12) + grid.spacing() * 1e-9);
    let nodes: Vec<usize> = (0..grid.node_count()).filter(|&i| mask[i]).collect();
    let mut rhs = stencil
        .offsets
        .par_iter()
        .filter(|m| grid.norm(grid.offset_vector(**m)) <= diam * (1.0 + 1e-12))
        .map(|&m| {
            let diffs = nodes.iter().filter(|&&x| segment_inside(domain, f, x, m, order)).map(|&x| {
                let mut acc = num_complex::Complex64::new(0.0, 0.0);
                for (k, &c) in weights.iter().enumerate() {
                    let j = grid.shift(x, [k as i64 * m[0], k as i64 * m[1]]).expect("segment inside the grid");
                    acc += f.value(j) * c;
                }
                acc.norm()
            });
            lv_size(diffs, w, v)
        })
        .collect::<Vec<f64>>()
        .into_iter()
        .fold(0.0, f64::max);
    if lhs <= WHITNEY_ZERO_TOL * norm {
        lhs = 0.0;
    }
    if rhs <= WHITNEY_ZERO_TOL * norm {
        rhs = 0.0;
    }
    let ratio = if lhs == 0.0 { 0.0 } else if rhs == 0.0 { f64::INFINITY } else { lhs / rhs };
    Ok(WhitneyRecord { lhs, rhs, ratio })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefinementRecord {
    pub sizes: Vec<usize>,
    pub totals: Vec<f64>,
    /// `totals[i+1] / totals[i]`.
    pub ratios: Vec<Ratio>,
    /// The finest pair differs by more than a factor 2.
    pub drift_flag: bool,
}

#[allow(clippy::too_many_arguments)]
pub fn refinement_study(
    spec: &CorpusSpec,
    domain: &DomainShape,
    d: usize,
    route: Route,
    params: &ValidatedParams,
    base: BaseTerm,
    sizes: &[usize],
    ladder_jmin: u32,
) -> Result<RefinementRecord> {
    if sizes.len() < 3 || sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::param("refinement needs at least three increasing grid sizes"));
    }
    let totals = sizes
        .iter()
        .map(|&n| {
            let grid = grid_for(domain, d, n)?;
            let f = sample(spec, &grid)?;
            let ladder = RadiusLadder::starting_at(&grid, ladder_jmin)?;
            Ok(compute_norm(&f, domain, params, route, base, &ladder)?.total)
        })
        .collect::<Result<Vec<f64>>>()?;
    let ratios: Vec<Ratio> = totals.windows(2).map(|w| Ratio::of(w[1], w[0])).collect();
    let drift_flag = match ratios.last() {
        Some(Ratio::Value(r)) => !(0.5..=2.0).contains(r),
        Some(Ratio::BothZero) => false,
        _ => true,
    };
    Ok(RefinementRecord { sizes: sizes.to_vec(), totals, ratios, drift_flag })
}
