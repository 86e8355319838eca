//! Smoothness parameter records and the admissibility window for `s`.

use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A value in `(0, ∞]`. Infinity is a variant of its own: the `q = ∞` / `v = ∞` cases
/// switch integrals to suprema and must branch, not take a limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedReal {
    Finite(f64),
    Infinity,
}

impl ExtendedReal {
    pub fn is_infinite(self) -> bool {
        matches!(self, ExtendedReal::Infinity)
    }

    /// `1/x`, with `1/∞ = 0`.
    pub fn recip(self) -> f64 {
        match self {
            ExtendedReal::Finite(x) => 1.0 / x,
            ExtendedReal::Infinity => 0.0,
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtendedReal::Finite(x) => Some(x),
            ExtendedReal::Infinity => None,
        }
    }

    /// Comparison against a real threshold, with `∞` above everything.
    pub fn ge(self, x: f64) -> bool {
        match self {
            ExtendedReal::Finite(y) => y >= x,
            ExtendedReal::Infinity => true,
        }
    }

    fn is_positive(self) -> bool {
        match self {
            ExtendedReal::Finite(x) => x.is_finite() && x > 0.0,
            ExtendedReal::Infinity => true,
        }
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedReal::Finite(x) => write!(f, "{x}"),
            ExtendedReal::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for ExtendedReal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinity") || t == "∞" {
            return Ok(ExtendedReal::Infinity);
        }
        t.parse::<f64>()
            .map(ExtendedReal::Finite)
            .map_err(|_| Error::param(format!("cannot parse '{s}' as a real or 'inf'")))
    }
}

impl From<f64> for ExtendedReal {
    fn from(x: f64) -> Self {
        ExtendedReal::Finite(x)
    }
}

/// Raw parameter record `(s, u, p, q, v, N, T, R)` in dimension `d`.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothnessParams {
    pub d: usize,
    pub s: f64,
    pub u: f64,
    pub p: f64,
    pub q: ExtendedReal,
    /// Inner integrability of local averages, oscillations and difference means.
    pub v: ExtendedReal,
    /// Difference order; oscillations use polynomials of degree below it.
    pub order: usize,
    /// Outer cutoff of the `dt/t` integral.
    pub t_max: ExtendedReal,
    /// Radius of the local-average base term.
    pub radius: f64,
}

impl SmoothnessParams {
    /// The common `p = q = v = 2` Hilbert setting, `T = R = 1`.
    pub fn hilbert(d: usize, s: f64, order: usize) -> Self {
        SmoothnessParams {
            d,
            s,
            u: 2.0,
            p: 2.0,
            q: ExtendedReal::Finite(2.0),
            v: ExtendedReal::Finite(2.0),
            order,
            t_max: ExtendedReal::Finite(1.0),
            radius: 1.0,
        }
    }
}

/// Parameters that passed validation, with the derived thresholds.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidatedParams {
    raw: SmoothnessParams,
    /// `d · max{0, 1/p − 1}`
    pub sigma_p: f64,
    /// `d · max{0, 1/p − 1, 1/q − 1}`
    pub sigma_pq: f64,
    /// Quasi-triangle exponent `min{1, p, q}`.
    pub tau: f64,
    /// Lower end of the window for `s`.
    pub lower_bound: f64,
    /// `lower_bound < s < N`. Advisory only: norms stay computable outside the window.
    pub window_ok: bool,
}

impl Deref for ValidatedParams {
    type Target = SmoothnessParams;

    fn deref(&self) -> &SmoothnessParams {
        &self.raw
    }
}

impl ValidatedParams {
    pub fn raw(&self) -> &SmoothnessParams {
        &self.raw
    }
}

pub fn validate_params(raw: SmoothnessParams) -> Result<ValidatedParams> {
    if raw.d != 1 && raw.d != 2 {
        return Err(Error::param(format!("dimension must be 1 or 2, got {}", raw.d)));
    }
    if !raw.s.is_finite() {
        return Err(Error::param("s must be finite"));
    }
    if !(raw.p.is_finite() && raw.p > 0.0) {
        return Err(Error::param(format!("p must be positive and finite, got {}", raw.p)));
    }
    if !raw.u.is_finite() || raw.u < raw.p {
        return Err(Error::param(format!("need 0 < p <= u < inf, got p={} u={}", raw.p, raw.u)));
    }
    if !raw.q.is_positive() {
        return Err(Error::param(format!("q must lie in (0, inf], got {}", raw.q)));
    }
    if !raw.v.is_positive() {
        return Err(Error::param(format!("v must lie in (0, inf], got {}", raw.v)));
    }
    if !raw.t_max.is_positive() {
        return Err(Error::param(format!("T must lie in (0, inf], got {}", raw.t_max)));
    }
    if raw.order == 0 {
        return Err(Error::param("order N must be at least 1"));
    }
    if !(raw.radius.is_finite() && raw.radius > 0.0) {
        return Err(Error::param(format!("R must be positive and finite, got {}", raw.radius)));
    }

    let d = raw.d as f64;
    let ip = 1.0 / raw.p;
    let iq = raw.q.recip();
    let iv = raw.v.recip();
    let sigma_p = d * (ip - 1.0).max(0.0);
    let sigma_pq = d * (ip - 1.0).max(iq - 1.0).max(0.0);
    let lower_bound = d * [0.0, ip - 1.0, iq - 1.0, ip - iv, iq - iv]
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    let tau = match raw.q {
        ExtendedReal::Finite(q) => 1f64.min(raw.p).min(q),
        ExtendedReal::Infinity => 1f64.min(raw.p),
    };
    let window_ok = lower_bound < raw.s && raw.s < raw.order as f64;
    Ok(ValidatedParams { raw, sigma_p, sigma_pq, tau, lower_bound, window_ok })
}
