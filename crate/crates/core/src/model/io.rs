//! Binary grid-function files.
//!
//! ```text
//! SMNORM1 d=<d> n=<n> periodic=<0|1> origin=<x[,y]> extent=<e> dtype=<f64|c64>\n
//! <n^d little-endian f64 scalars, or (re, im) pairs for c64, row-major>
//! ```

use std::fs;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;

use super::function::SampledFunction;
use super::grid::Grid;
use crate::error::{Error, Result};

const MAGIC: &str = "SMNORM1";

pub fn encode_gridfun(f: &SampledFunction) -> Vec<u8> {
    let g = f.grid();
    let origin = if g.dim() == 1 {
        g.origin()[0].to_string()
    } else {
        format!("{},{}", g.origin()[0], g.origin()[1])
    };
    let dtype = if f.is_complex() { "c64" } else { "f64" };
    let header = format!(
        "{MAGIC} d={} n={} periodic={} origin={origin} extent={} dtype={dtype}\n",
        g.dim(),
        g.n(),
        u8::from(g.is_periodic()),
        g.extent()
    );
    let width = if f.is_complex() { 16 } else { 8 };
    let mut out = Vec::with_capacity(header.len() + width * f.len());
    out.extend_from_slice(header.as_bytes());
    match f.im() {
        None => {
            for v in f.re() {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        Some(im) => {
            for (re, im) in f.re().iter().zip(im) {
                out.extend_from_slice(&re.to_le_bytes());
                out.extend_from_slice(&im.to_le_bytes());
            }
        }
    }
    out
}

pub fn decode_gridfun(bytes: &[u8]) -> Result<SampledFunction> {
    let nl = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| Error::format("missing header line"))?;
    let header = std::str::from_utf8(&bytes[..nl]).map_err(|_| Error::format("header is not UTF-8"))?;
    let payload = &bytes[nl + 1..];

    let mut tokens = header.split_ascii_whitespace();
    if tokens.next() != Some(MAGIC) {
        return Err(Error::format(format!("header must start with {MAGIC}")));
    }
    let (mut d, mut n, mut periodic, mut origin, mut extent, mut dtype) = (None, None, None, None, None, None);
    for tok in tokens {
        let (key, value) = tok
            .split_once('=')
            .ok_or_else(|| Error::format(format!("header token '{tok}' is not key=value")))?;
        let bad = || Error::format(format!("bad header value {key}={value}"));
        match key {
            "d" => d = Some(value.parse::<usize>().map_err(|_| bad())?),
            "n" => n = Some(value.parse::<usize>().map_err(|_| bad())?),
            "periodic" => {
                periodic = Some(match value {
                    "0" => false,
                    "1" => true,
                    _ => return Err(bad()),
                })
            }
            "origin" => {
                let parts = value
                    .split(',')
                    .map(|p| p.parse::<f64>().map_err(|_| bad()))
                    .collect::<Result<Vec<_>>>()?;
                origin = Some(parts);
            }
            "extent" => extent = Some(value.parse::<f64>().map_err(|_| bad())?),
            "dtype" => {
                dtype = Some(match value {
                    "f64" => false,
                    "c64" => true,
                    _ => return Err(bad()),
                })
            }
            _ => return Err(Error::format(format!("unknown header key '{key}'"))),
        }
    }
    let missing = |k: &str| Error::format(format!("header lacks '{k}'"));
    let d = d.ok_or_else(|| missing("d"))?;
    let n = n.ok_or_else(|| missing("n"))?;
    let periodic = periodic.ok_or_else(|| missing("periodic"))?;
    let origin = origin.ok_or_else(|| missing("origin"))?;
    let extent = extent.ok_or_else(|| missing("extent"))?;
    let complex = dtype.ok_or_else(|| missing("dtype"))?;
    if origin.len() != d {
        return Err(Error::format(format!("origin has {} components, d={d}", origin.len())));
    }
    let grid = Grid::new(d, n, periodic, [origin[0], origin.get(1).copied().unwrap_or(0.0)], extent)
        .map_err(|e| Error::format(format!("invalid grid in header: {e}")))?;

    let width = if complex { 16 } else { 8 };
    let expected = grid.node_count() * width;
    if payload.len() != expected {
        return Err(Error::format(format!(
            "header declares {} nodes ({expected} bytes), payload has {} bytes",
            grid.node_count(),
            payload.len()
        )));
    }
    let scalars: Vec<f64> = payload
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect();
    if complex {
        let values = scalars.chunks_exact(2).map(|c| Complex64::new(c[0], c[1])).collect();
        SampledFunction::complex(grid, values)
    } else {
        SampledFunction::real(grid, scalars)
    }
}

pub fn read_gridfun(path: impl AsRef<Path>) -> Result<SampledFunction> {
    decode_gridfun(&fs::read(path)?)
}

pub fn write_gridfun(f: &SampledFunction, path: impl AsRef<Path>) -> Result<()> {
    write_atomic(path.as_ref(), &encode_gridfun(f))
}

/// Writes through a sibling temporary file and a rename, so readers never see a
/// partially written file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = std::path::PathBuf::from(tmp);
    {
        let mut file = fs::File::create(&tmp)?;
        file.write_all(bytes)?;
        file.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}
