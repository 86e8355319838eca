use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use crate::error::Error;
use crate::model::{Grid, ValidatedParams};

/// Which characterization computed a norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Route {
    Lp,
    Diff,
    Osc,
    Clubsuit,
}

impl Route {
    pub const ALL: [Route; 4] = [Route::Lp, Route::Diff, Route::Osc, Route::Clubsuit];

    pub fn name(self) -> &'static str {
        match self {
            Route::Lp => "lp",
            Route::Diff => "diff",
            Route::Osc => "osc",
            Route::Clubsuit => "clubsuit",
        }
    }

    /// Routes defined only on the torus.
    pub fn needs_torus(self) -> bool {
        matches!(self, Route::Lp | Route::Clubsuit)
    }
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Route {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Route::ALL
            .into_iter()
            .find(|r| r.name() == s.trim())
            .ok_or_else(|| Error::param(format!("unknown route '{s}' (lp|diff|osc|clubsuit)")))
    }
}

/// Base term of the difference and oscillation quasi-norms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BaseTerm {
    /// `‖f | M^u_p‖`
    #[default]
    Plain,
    /// `‖(∫_{B(·,R) ∩ Ω} |f|^v)^{1/v} | M^u_p‖`
    LocalAverage,
}

impl fmt::Display for BaseTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BaseTerm::Plain => "plain",
            BaseTerm::LocalAverage => "avg",
        })
    }
}

impl FromStr for BaseTerm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.trim() {
            "plain" => Ok(BaseTerm::Plain),
            "avg" | "local_average" => Ok(BaseTerm::LocalAverage),
            other => Err(Error::param(format!("unknown base term '{other}' (plain|avg)"))),
        }
    }
}

/// One norm evaluation with its components. For the single-term routes (`lp`,
/// `clubsuit`) the whole value sits in `base` and `seminorm` is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct NormReport {
    pub route: Route,
    pub base_kind: BaseTerm,
    pub base: f64,
    pub seminorm: f64,
    pub total: f64,
    pub params: ValidatedParams,
    pub grid: Grid,
    pub domain: String,
    pub wall_time: Duration,
}

impl fmt::Display for NormReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "route={} base[{}]={:.10e} seminorm={:.10e} total={:.10e} (d={} n={} domain={} window_ok={} time={:.3}s)",
            self.route,
            self.base_kind,
            self.base,
            self.seminorm,
            self.total,
            self.grid.dim(),
            self.grid.n(),
            self.domain,
            self.params.window_ok,
            self.wall_time.as_secs_f64()
        )
    }
}
