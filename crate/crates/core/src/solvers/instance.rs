//! Recovery instances and their CSV interchange layout.
//!
//! The layout is a flexible-width CSV:
//!
//! ```text
//! m,n
//! 3,4
//! phi,<m·n values, column-major>
//! y,<m values>
//! x,<n values>        (optional)
//! ```
//!
//! Values are written with the shortest representation that round-trips, so
//! a write/read cycle is lossless.

use std::io::{Read, Write};
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use crate::error::{Error, Result};

/// A sensing problem together with the signal that generated it.
#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryInstance {
    pub phi: DMatrix<f64>,
    pub x_true: DVector<f64>,
    /// Sorted ascending.
    pub support: Vec<usize>,
    /// `sgn(x_true)` on `support`, entry by entry.
    pub beta: Vec<f64>,
    pub z: DVector<f64>,
    pub y_clean: DVector<f64>,
    pub y_noisy: DVector<f64>,
    pub sigma_z: f64,
    /// `ℓ1` norm of `x_true` off the support.
    pub best_k_error: f64,
}

impl RecoveryInstance {
    /// Builds the measurements `y = Φx` and `ỹ = y + z`. The support is the
    /// given index set, which need not contain every nonzero of `x_true`.
    pub fn new(phi: DMatrix<f64>, x_true: DVector<f64>, mut support: Vec<usize>, z: DVector<f64>, sigma_z: f64) -> Result<Self> {
        let (m, n) = phi.shape();
        if x_true.len() != n {
            return Err(Error::InvalidDimensions(format!("x has length {}, Phi has {n} columns", x_true.len())));
        }
        if z.len() != m {
            return Err(Error::InvalidDimensions(format!("z has length {}, Phi has {m} rows", z.len())));
        }
        support.sort_unstable();
        support.dedup();
        if let Some(&bad) = support.iter().find(|&&i| i >= n) {
            return Err(Error::IndexOutOfRange { index: bad, len: n });
        }
        let beta = support.iter().map(|&i| if x_true[i] < 0.0 { -1.0 } else { 1.0 }).collect();
        let mut on_support = vec![false; n];
        for &i in &support {
            on_support[i] = true;
        }
        let best_k_error = (0..n).filter(|&i| !on_support[i]).map(|i| x_true[i].abs()).sum();
        let y_clean = &phi * &x_true;
        let y_noisy = &y_clean + &z;
        Ok(Self {
            phi,
            x_true,
            support,
            beta,
            z,
            y_clean,
            y_noisy,
            sigma_z,
            best_k_error,
        })
    }

    pub fn k(&self) -> usize {
        self.support.len()
    }
}

/// Contents of an instance file.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceData {
    pub phi: DMatrix<f64>,
    pub y: DVector<f64>,
    pub x: Option<DVector<f64>>,
}

pub fn write_instance_to<W: Write>(w: W, data: &InstanceData) -> Result<()> {
    let (m, n) = data.phi.shape();
    let mut out = csv::WriterBuilder::new().flexible(true).from_writer(w);
    out.write_record(["m", "n"])?;
    out.write_record([m.to_string(), n.to_string()])?;
    let row = |tag: &str, vals: &[f64]| {
        std::iter::once(tag.to_string())
            .chain(vals.iter().map(|v| v.to_string()))
            .collect::<Vec<_>>()
    };
    out.write_record(row("phi", data.phi.as_slice()))?;
    out.write_record(row("y", data.y.as_slice()))?;
    if let Some(x) = &data.x {
        out.write_record(row("x", x.as_slice()))?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_instance(path: &Path, data: &InstanceData) -> Result<()> {
    write_instance_to(std::fs::File::create(path)?, data)
}

fn parse_values(rec: &csv::StringRecord, expected: usize, line: u64) -> Result<Vec<f64>> {
    let vals = rec
        .iter()
        .skip(1)
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("line {line}: {e}")))
        })
        .collect::<Result<Vec<_>>>()?;
    if vals.len() != expected {
        return Err(Error::Parse(format!(
            "line {line}: expected {expected} values for '{}', found {}",
            &rec[0],
            vals.len()
        )));
    }
    Ok(vals)
}

pub fn read_instance_from<R: Read>(r: R) -> Result<InstanceData> {
    let mut rdr = csv::ReaderBuilder::new().flexible(true).has_headers(true).from_reader(r);
    let header = rdr.headers()?.clone();
    if header.len() != 2 || &header[0] != "m" || &header[1] != "n" {
        return Err(Error::Parse("line 1: expected header 'm,n'".into()));
    }
    let mut records = rdr.records();
    let dims = records
        .next()
        .ok_or_else(|| Error::Parse("line 2: missing dimensions".into()))??;
    let dim = |i: usize| -> Result<usize> {
        dims.get(i)
            .and_then(|s| s.trim().parse().ok())
            .filter(|&v: &usize| v > 0)
            .ok_or_else(|| Error::Parse("line 2: dimensions must be positive integers".into()))
    };
    let (m, n) = (dim(0)?, dim(1)?);
    let (mut phi, mut y, mut x) = (None, None, None);
    for rec in records {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        match rec.get(0).map(str::trim) {
            Some("phi") => phi = Some(DMatrix::from_vec(m, n, parse_values(&rec, m * n, line)?)),
            Some("y") => y = Some(DVector::from_vec(parse_values(&rec, m, line)?)),
            Some("x") => x = Some(DVector::from_vec(parse_values(&rec, n, line)?)),
            Some(other) => return Err(Error::Parse(format!("line {line}: unknown field '{other}'"))),
            None => {}
        }
    }
    Ok(InstanceData {
        phi: phi.ok_or_else(|| Error::Parse("missing 'phi' row".into()))?,
        y: y.ok_or_else(|| Error::Parse("missing 'y' row".into()))?,
        x,
    })
}

pub fn read_instance(path: &Path) -> Result<InstanceData> {
    read_instance_from(std::fs::File::open(path)?)
}
