//! Littlewood-Paley reference norm on the torus.
//!
//! `φ₀` is radial, equal to 1 on `|ξ| ≤ a` and 0 on `|ξ| ≥ b` with the `exp(−1/x)`
//! smooth step in between; `φ_j(ξ) = φ₀(2^{-j}ξ) − φ₀(2^{-j+1}ξ)`. Bands are
//! `F^{-1}[φ_j F f]` on the integer frequency lattice of the unit torus, `j = 0..=J`
//! with `2^{J+1} ≤ n/2`.

use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::differences::check_dim;
use crate::error::{Error, Result};
use crate::geometry::DomainShape;
use crate::model::{ExtendedReal, Grid, SampledFunction, ValidatedParams};
use crate::morrey::{morrey_norm_field, RadiusLadder};
use crate::report::{BaseTerm, NormReport, Route};

/// Radial cutoff `φ₀` with transition on `(inner, outer)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffProfile {
    pub inner: f64,
    pub outer: f64,
}

impl Default for CutoffProfile {
    fn default() -> Self {
        CutoffProfile { inner: 1.0, outer: 1.5 }
    }
}

fn smooth_bump(x: f64) -> f64 {
    if x > 0.0 {
        (-1.0 / x).exp()
    } else {
        0.0
    }
}

impl CutoffProfile {
    pub fn new(inner: f64, outer: f64) -> Result<Self> {
        if !(inner > 0.0 && outer > inner && outer <= 2.0 * inner) {
            return Err(Error::param(format!(
                "cutoff transition ({inner}, {outer}) must satisfy 0 < inner < outer <= 2·inner"
            )));
        }
        Ok(CutoffProfile { inner, outer })
    }

    pub fn phi0(&self, r: f64) -> f64 {
        if r <= self.inner {
            return 1.0;
        }
        if r >= self.outer {
            return 0.0;
        }
        let a = smooth_bump(self.outer - r);
        let b = smooth_bump(r - self.inner);
        a / (a + b)
    }

    /// `φ_j` at frequency radius `r`.
    pub fn phi(&self, j: u32, r: f64) -> f64 {
        if j == 0 {
            self.phi0(r)
        } else {
            let s = 0.5f64.powi(j as i32);
            self.phi0(s * r) - self.phi0(2.0 * s * r)
        }
    }
}

/// Band symbols on the frequency lattice of one grid.
#[derive(Debug, Clone)]
pub struct DyadicPartition {
    pub profile: CutoffProfile,
    pub d: usize,
    pub n: usize,
    /// Finest level `J`.
    pub levels: u32,
    /// `symbols[j][i]` at the DFT index `i` (row-major).
    pub symbols: Vec<Vec<f64>>,
}

/// Signed frequency of DFT index `i`.
pub fn frequency(i: usize, n: usize) -> i64 {
    if i <= n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

fn frequency_radius(idx: usize, d: usize, n: usize) -> f64 {
    if d == 1 {
        return frequency(idx, n).abs() as f64;
    }
    let k0 = frequency(idx / n, n) as f64;
    let k1 = frequency(idx % n, n) as f64;
    (k0 * k0 + k1 * k1).sqrt()
}

pub fn build_partition(grid: &Grid) -> Result<DyadicPartition> {
    build_partition_with(grid, CutoffProfile::default())
}

pub fn build_partition_with(grid: &Grid, profile: CutoffProfile) -> Result<DyadicPartition> {
    if !grid.is_periodic() {
        return Err(Error::geometry("the Littlewood-Paley route needs a periodic grid"));
    }
    let (d, n) = (grid.dim(), grid.n());
    let levels = n.trailing_zeros().saturating_sub(2);
    if levels < 2 {
        return Err(Error::param(format!("n={n} is too small for two dyadic levels")));
    }
    let radii: Vec<f64> = (0..grid.node_count()).map(|i| frequency_radius(i, d, n)).collect();
    let symbols = (0..=levels).map(|j| radii.iter().map(|&r| profile.phi(j, r)).collect()).collect();
    Ok(DyadicPartition { profile, d, n, levels, symbols })
}

impl DyadicPartition {
    /// Largest frequency radius on which the bands sum to one.
    pub fn resolvable_radius(&self) -> f64 {
        self.profile.inner * 2f64.powi(self.levels as i32)
    }

    fn check(&self, grid: &Grid) -> Result<()> {
        if grid.dim() != self.d || grid.n() != self.n || !grid.is_periodic() {
            return Err(Error::param("partition was built for a different grid"));
        }
        Ok(())
    }
}

/// In-place DFT over the `d`-dimensional row-major array.
fn fft(data: &mut [Complex64], d: usize, n: usize, inverse: bool) {
    let mut planner = FftPlanner::<f64>::new();
    let plan = if inverse { planner.plan_fft_inverse(n) } else { planner.plan_fft_forward(n) };
    if d == 1 {
        plan.process(data);
    } else {
        for row in data.chunks_mut(n) {
            plan.process(row);
        }
        let mut col = vec![Complex64::new(0.0, 0.0); n];
        for c in 0..n {
            for r in 0..n {
                col[r] = data[r * n + c];
            }
            plan.process(&mut col);
            for r in 0..n {
                data[r * n + c] = col[r];
            }
        }
    }
    if inverse {
        let scale = 1.0 / data.len() as f64;
        data.iter_mut().for_each(|z| *z *= scale);
    }
}

fn spectrum(f: &SampledFunction) -> Vec<Complex64> {
    let mut data = f.to_complex();
    fft(&mut data, f.grid().dim(), f.grid().n(), false);
    data
}

fn band_from_spectrum(spec: &[Complex64], partition: &DyadicPartition, j: u32) -> Vec<Complex64> {
    let mut data: Vec<Complex64> = spec.iter().zip(&partition.symbols[j as usize]).map(|(z, &s)| z * s).collect();
    fft(&mut data, partition.d, partition.n, true);
    data
}

/// `F^{-1}[φ_j F f]`.
pub fn lp_band(f: &SampledFunction, partition: &DyadicPartition, j: u32) -> Result<SampledFunction> {
    partition.check(f.grid())?;
    if j > partition.levels {
        return Err(Error::param(format!("band {j} exceeds the finest level {}", partition.levels)));
    }
    let band = band_from_spectrum(&spectrum(f), partition, j);
    if f.is_complex() {
        SampledFunction::complex(f.grid().clone(), band)
    } else {
        SampledFunction::real(f.grid().clone(), band.iter().map(|z| z.re).collect())
    }
}

/// `|band_j|` for every level.
fn band_moduli(f: &SampledFunction, partition: &DyadicPartition) -> Vec<Vec<f64>> {
    let spec = spectrum(f);
    (0..=partition.levels)
        .into_par_iter()
        .map(|j| band_from_spectrum(&spec, partition, j).iter().map(|z| z.norm()).collect())
        .collect()
}

/// `Σ |band_j|² w` per level.
pub fn band_energies(f: &SampledFunction, partition: &DyadicPartition) -> Result<Vec<f64>> {
    partition.check(f.grid())?;
    let w = f.grid().cell_volume();
    Ok(band_moduli(f, partition).iter().map(|b| b.iter().map(|a| a * a).sum::<f64>() * w).collect())
}

/// Morrey norm of `x ↦ (Σ_j 2^{jsq} |band_j(x)|^q)^{1/q}`.
pub fn lp_norm(f: &SampledFunction, params: &ValidatedParams, partition: &DyadicPartition, ladder: &RadiusLadder) -> Result<f64> {
    check_dim(f, params)?;
    partition.check(f.grid())?;
    let bands = band_moduli(f, partition);
    let s = params.s;
    let g: Vec<f64> = (0..f.len())
        .map(|x| {
            let terms = bands.iter().enumerate().map(|(j, b)| 2f64.powf(j as f64 * s) * b[x]);
            match params.q {
                ExtendedReal::Infinity => terms.fold(0.0, f64::max),
                ExtendedReal::Finite(q) => terms.map(|a| a.powf(q)).sum::<f64>().powf(1.0 / q),
            }
        })
        .collect();
    morrey_norm_field(f.grid(), &DomainShape::full_torus(), &g, params.p, params.u, ladder)
}

/// [`lp_norm`] as a report; the whole value is the base term.
pub fn lp_quasinorm(f: &SampledFunction, params: &ValidatedParams, partition: &DyadicPartition, ladder: &RadiusLadder) -> Result<NormReport> {
    let start = Instant::now();
    let value = lp_norm(f, params, partition, ladder)?;
    Ok(NormReport {
        route: Route::Lp,
        base_kind: BaseTerm::Plain,
        base: value,
        seminorm: 0.0,
        total: value,
        params: params.clone(),
        grid: f.grid().clone(),
        domain: DomainShape::full_torus().to_string(),
        wall_time: start.elapsed(),
    })
}
