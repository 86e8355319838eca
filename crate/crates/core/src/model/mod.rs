//! Grids, sampled functions, parameter records, the test-function corpus and file I/O.

pub mod config;
pub mod corpus;
pub mod function;
pub mod grid;
pub mod io;
pub mod params;
pub mod poly;

pub use config::KeyValueConfig;
pub use corpus::{sample, CorpusSpec, TrigKind};
pub use function::SampledFunction;
pub use grid::{Grid, Offset, Point};
pub use io::{read_gridfun, write_gridfun};
pub use poly::{monomial, monomial_exponents, space_dimension};
pub use params::{validate_params, ExtendedReal, SmoothnessParams, ValidatedParams};

/// Free-function form of [`Grid::new`].
pub fn make_grid(d: usize, n: usize, periodic: bool, origin: Point, extent: f64) -> crate::Result<Grid> {
    Grid::new(d, n, periodic, origin, extent)
}
