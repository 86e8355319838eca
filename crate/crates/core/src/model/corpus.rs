//! Closed-form test functions with known or controllable smoothness.
//!
//! Trigonometric, cusp, Weierstrass and random kinds are 1-periodic in every coordinate,
//! so they are genuinely periodic on unit tori. Specs have a compact text form, e.g.
//! `cos:3`, `cusp:0.5@0.3`, `random:7,8`, used by the CLI and by config files.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::function::SampledFunction;
use super::grid::{Grid, Point};
use super::poly::{monomial, monomial_exponents};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrigKind {
    Cos,
    Sin,
    /// Complex exponential `exp(2πi k·x)`.
    Exp,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CorpusSpec {
    /// Coefficients of the graded-lexicographic monomials in absolute coordinates.
    Polynomial { coeffs: Vec<f64> },
    TrigMode { k: [i64; 2], kind: TrigKind },
    /// `|x − c|^α`; on periodic grids `(Σ sin²(π(x_a − c_a)))^{α/2}`.
    Cusp { alpha: f64, center: Point },
    /// `Σ_{k < levels} a^k Σ_axis cos(2π b^k x_axis)`.
    Weierstrass { a: f64, b: u32, levels: u32 },
    /// Indicator of the open box `(lo, hi)`.
    Indicator { lo: Point, hi: Point },
    /// Seeded trigonometric polynomial with frequencies up to `cutoff` and
    /// coefficients decaying like `(1 + |k|)^{-2}`.
    RandomSmooth { seed: u64, cutoff: usize },
}

impl CorpusSpec {
    pub fn constant(c: f64) -> Self {
        CorpusSpec::Polynomial { coeffs: vec![c] }
    }

    pub fn cos(k: i64) -> Self {
        CorpusSpec::TrigMode { k: [k, 0], kind: TrigKind::Cos }
    }

    pub fn sin(k: i64) -> Self {
        CorpusSpec::TrigMode { k: [k, 0], kind: TrigKind::Sin }
    }

    pub fn exp(k: i64) -> Self {
        CorpusSpec::TrigMode { k: [k, 0], kind: TrigKind::Exp }
    }

    pub fn random(seed: u64, cutoff: usize) -> Self {
        CorpusSpec::RandomSmooth { seed, cutoff }
    }

    fn validate(&self, grid: &Grid) -> Result<()> {
        match self {
            CorpusSpec::Polynomial { coeffs } if coeffs.is_empty() => {
                Err(Error::param("polynomial needs at least one coefficient"))
            }
            CorpusSpec::Cusp { alpha, .. } if !(*alpha > 0.0 && alpha.is_finite()) => {
                Err(Error::param(format!("cusp exponent must be positive, got {alpha}")))
            }
            CorpusSpec::Weierstrass { a, b, .. } if !(*a > 0.0 && *a < 1.0) || *b < 2 => {
                Err(Error::param(format!("weierstrass needs 0 < a < 1 and b >= 2, got a={a} b={b}")))
            }
            CorpusSpec::RandomSmooth { cutoff, .. } if 2 * cutoff >= grid.n() => {
                Err(Error::param(format!("random_smooth cutoff {cutoff} must be below n/2 = {}", grid.n() / 2)))
            }
            CorpusSpec::Indicator { lo, hi } if (0..2).any(|a| !(lo[a] < hi[a])) => {
                Err(Error::param("indicator box needs lo < hi"))
            }
            _ => Ok(()),
        }
    }
}

/// Samples `spec` at every node of `grid`. Deterministic, including the seeded kind.
pub fn sample(spec: &CorpusSpec, grid: &Grid) -> Result<SampledFunction> {
    spec.validate(grid)?;
    let d = grid.dim();
    let count = grid.node_count();
    let nodes = (0..count).map(|i| grid.coords(i));

    if let CorpusSpec::TrigMode { k, kind: TrigKind::Exp } = spec {
        let values = nodes
            .map(|x| num_complex::Complex64::from_polar(1.0, 2.0 * PI * dot(d, *k, x)))
            .collect();
        return SampledFunction::complex(grid.clone(), values);
    }

    let values: Vec<f64> = match spec {
        CorpusSpec::Polynomial { coeffs } => {
            let exps = monomial_exponents(d, coeffs.len() + 1);
            nodes.map(|x| coeffs.iter().zip(&exps).map(|(c, &e)| c * monomial(e, x)).sum()).collect()
        }
        CorpusSpec::TrigMode { k, kind } => nodes
            .map(|x| {
                let phase = 2.0 * PI * dot(d, *k, x);
                match kind {
                    TrigKind::Sin => phase.sin(),
                    _ => phase.cos(),
                }
            })
            .collect(),
        CorpusSpec::Cusp { alpha, center } => nodes
            .map(|x| {
                let r2: f64 = (0..d)
                    .map(|a| {
                        let t = x[a] - center[a];
                        if grid.is_periodic() {
                            (PI * t).sin().powi(2)
                        } else {
                            t * t
                        }
                    })
                    .sum();
                r2.powf(alpha / 2.0)
            })
            .collect(),
        CorpusSpec::Weierstrass { a, b, levels } => nodes
            .map(|x| {
                (0..*levels)
                    .map(|k| {
                        let freq = (*b as f64).powi(k as i32);
                        a.powi(k as i32) * (0..d).map(|ax| (2.0 * PI * freq * x[ax]).cos()).sum::<f64>()
                    })
                    .sum()
            })
            .collect(),
        CorpusSpec::Indicator { lo, hi } => nodes
            .map(|x| if (0..d).all(|a| lo[a] < x[a] && x[a] < hi[a]) { 1.0 } else { 0.0 })
            .collect(),
        CorpusSpec::RandomSmooth { seed, cutoff } => {
            let terms = random_terms(d, *seed, *cutoff);
            nodes
                .map(|x| {
                    terms
                        .iter()
                        .map(|t| {
                            let phase = 2.0 * PI * dot(d, t.k, x);
                            t.a * phase.cos() + t.b * phase.sin()
                        })
                        .sum()
                })
                .collect()
        }
    };
    SampledFunction::real(grid.clone(), values)
}

fn dot(d: usize, k: [i64; 2], x: Point) -> f64 {
    (0..d).map(|a| k[a] as f64 * x[a]).sum()
}

struct Term {
    k: [i64; 2],
    a: f64,
    b: f64,
}

fn random_terms(d: usize, seed: u64, cutoff: usize) -> Vec<Term> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c = cutoff as i64;
    let mut freqs = Vec::new();
    if d == 1 {
        freqs.extend((0..=c).map(|k| [k, 0]));
    } else {
        for k2 in 0..=c {
            for k1 in -c..=c {
                if k2 == 0 && k1 < 0 {
                    continue;
                }
                freqs.push([k1, k2]);
            }
        }
    }
    freqs
        .into_iter()
        .map(|k| {
            let mag = ((k[0] * k[0] + k[1] * k[1]) as f64).sqrt();
            let decay = (1.0 + mag).powi(-2);
            let a = rng.gen_range(-1.0..1.0) * decay;
            let b = rng.gen_range(-1.0..1.0) * decay;
            let b = if k == [0, 0] { 0.0 } else { b };
            Term { k, a, b }
        })
        .collect()
}

impl fmt::Display for CorpusSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CorpusSpec::Polynomial { coeffs } => write!(f, "poly:{}", join(coeffs)),
            CorpusSpec::TrigMode { k, kind } => {
                let name = match kind {
                    TrigKind::Cos => "cos",
                    TrigKind::Sin => "sin",
                    TrigKind::Exp => "exp",
                };
                if k[1] == 0 {
                    write!(f, "{name}:{}", k[0])
                } else {
                    write!(f, "{name}:{},{}", k[0], k[1])
                }
            }
            CorpusSpec::Cusp { alpha, center } => {
                if center[1] == 0.0 {
                    write!(f, "cusp:{alpha}@{}", center[0])
                } else {
                    write!(f, "cusp:{alpha}@{},{}", center[0], center[1])
                }
            }
            CorpusSpec::Weierstrass { a, b, levels } => write!(f, "weierstrass:{a},{b},{levels}"),
            CorpusSpec::Indicator { lo, hi } => {
                if lo[1].is_infinite() {
                    write!(f, "indicator:{},{}", lo[0], hi[0])
                } else {
                    write!(f, "indicator:{},{},{},{}", lo[0], lo[1], hi[0], hi[1])
                }
            }
            CorpusSpec::RandomSmooth { seed, cutoff } => write!(f, "random:{seed},{cutoff}"),
        }
    }
}

fn join(xs: &[f64]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn numbers(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| Error::param(format!("bad number '{t}' in function spec"))))
        .collect()
}

impl FromStr for CorpusSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (kind, args) = s
            .split_once(':')
            .ok_or_else(|| Error::param(format!("function spec '{s}' must look like kind:args")))?;
        let bad = || Error::param(format!("malformed function spec '{s}'"));
        let trig = |kind: TrigKind| -> Result<CorpusSpec> {
            let k = numbers(args)?;
            match k.as_slice() {
                [k0] => Ok(CorpusSpec::TrigMode { k: [*k0 as i64, 0], kind }),
                [k0, k1] => Ok(CorpusSpec::TrigMode { k: [*k0 as i64, *k1 as i64], kind }),
                _ => Err(bad()),
            }
        };
        match kind {
            "poly" => Ok(CorpusSpec::Polynomial { coeffs: numbers(args)? }),
            "const" => Ok(CorpusSpec::constant(numbers(args)?.first().copied().ok_or_else(bad)?)),
            "cos" => trig(TrigKind::Cos),
            "sin" => trig(TrigKind::Sin),
            "exp" => trig(TrigKind::Exp),
            "cusp" => {
                let (alpha, center) = args.split_once('@').unwrap_or((args, "0"));
                let alpha = alpha.trim().parse().map_err(|_| bad())?;
                let c = numbers(center)?;
                let center = match c.as_slice() {
                    [c0] => [*c0, 0.0],
                    [c0, c1] => [*c0, *c1],
                    _ => return Err(bad()),
                };
                Ok(CorpusSpec::Cusp { alpha, center })
            }
            "weierstrass" => match numbers(args)?.as_slice() {
                [a, b, l] => Ok(CorpusSpec::Weierstrass { a: *a, b: *b as u32, levels: *l as u32 }),
                _ => Err(bad()),
            },
            "indicator" => match numbers(args)?.as_slice() {
                [a, b] => Ok(CorpusSpec::Indicator {
                    lo: [*a, f64::NEG_INFINITY],
                    hi: [*b, f64::INFINITY],
                }),
                [a0, a1, b0, b1] => Ok(CorpusSpec::Indicator { lo: [*a0, *a1], hi: [*b0, *b1] }),
                _ => Err(bad()),
            },
            "random" => match numbers(args)?.as_slice() {
                [seed, cutoff] => Ok(CorpusSpec::RandomSmooth { seed: *seed as u64, cutoff: *cutoff as usize }),
                _ => Err(bad()),
            },
            _ => Err(Error::param(format!("unknown function kind '{kind}'"))),
        }
    }
}
