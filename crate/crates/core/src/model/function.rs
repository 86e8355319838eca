use num_complex::Complex64;

use super::grid::Grid;
use crate::error::{Error, Result};

/// Samples of a real or complex function on every node of a [`Grid`], row-major.
///
/// Complex data is held as separate real and imaginary channels so that the real case,
/// by far the common one, pays nothing for the complex one.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    grid: Grid,
    re: Vec<f64>,
    im: Option<Vec<f64>>,
}

impl SampledFunction {
    pub fn real(grid: Grid, values: Vec<f64>) -> Result<Self> {
        check_len(&grid, values.len())?;
        check_finite(&values)?;
        Ok(SampledFunction { grid, re: values, im: None })
    }

    pub fn complex(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        check_len(&grid, values.len())?;
        let re: Vec<f64> = values.iter().map(|z| z.re).collect();
        let im: Vec<f64> = values.iter().map(|z| z.im).collect();
        check_finite(&re)?;
        check_finite(&im)?;
        Ok(SampledFunction { grid, re, im: Some(im) })
    }

    pub fn zeros(grid: Grid) -> Self {
        let re = vec![0.0; grid.node_count()];
        SampledFunction { grid, re, im: None }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.re.len()
    }

    pub fn is_empty(&self) -> bool {
        self.re.is_empty()
    }

    pub fn is_complex(&self) -> bool {
        self.im.is_some()
    }

    pub fn re(&self) -> &[f64] {
        &self.re
    }

    pub fn im(&self) -> Option<&[f64]> {
        self.im.as_deref()
    }

    pub fn value(&self, idx: usize) -> Complex64 {
        Complex64::new(self.re[idx], self.im.as_ref().map_or(0.0, |im| im[idx]))
    }

    pub fn abs(&self, idx: usize) -> f64 {
        match &self.im {
            None => self.re[idx].abs(),
            Some(im) => self.re[idx].hypot(im[idx]),
        }
    }

    pub fn abs_values(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.abs(i)).collect()
    }

    pub fn to_complex(&self) -> Vec<Complex64> {
        (0..self.len()).map(|i| self.value(i)).collect()
    }

    /// `c * self` for a real scalar.
    pub fn scaled(&self, c: f64) -> SampledFunction {
        SampledFunction {
            grid: self.grid.clone(),
            re: self.re.iter().map(|x| c * x).collect(),
            im: self.im.as_ref().map(|im| im.iter().map(|x| c * x).collect()),
        }
    }

    /// Pointwise sum; both functions must live on the same grid.
    pub fn add(&self, other: &SampledFunction) -> Result<SampledFunction> {
        if self.grid != other.grid {
            return Err(Error::param("cannot add functions sampled on different grids"));
        }
        let re = self.re.iter().zip(&other.re).map(|(a, b)| a + b).collect();
        let im = match (&self.im, &other.im) {
            (None, None) => None,
            _ => Some((0..self.len()).map(|i| self.value(i).im + other.value(i).im).collect()),
        };
        Ok(SampledFunction { grid: self.grid.clone(), re, im })
    }

    /// Real function `op(|f|)` on the same grid.
    pub fn map_abs(&self, op: impl Fn(f64) -> f64) -> Result<SampledFunction> {
        let values = (0..self.len()).map(|i| op(self.abs(i))).collect();
        SampledFunction::real(self.grid.clone(), values)
    }

    /// Same samples viewed on another grid with the same node count (used for the
    /// zero-extension to the torus).
    pub fn with_grid(&self, grid: Grid) -> Result<SampledFunction> {
        check_len(&grid, self.len())?;
        Ok(SampledFunction { grid, re: self.re.clone(), im: self.im.clone() })
    }
}

fn check_len(grid: &Grid, len: usize) -> Result<()> {
    if len != grid.node_count() {
        return Err(Error::format(format!(
            "expected {} samples for the grid, got {len}",
            grid.node_count()
        )));
    }
    Ok(())
}

fn check_finite(values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(Error::format(format!("non-finite sample at node {i}"))),
        None => Ok(()),
    }
}
