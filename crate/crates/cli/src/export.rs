//! Plane slices of a field sampled on a regular lattice, as CSV.

use std::f64::consts::PI;
use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use cylspec::transform::evaluate_at;
use cylspec::{CoeffTensor, TransformPlan};

use crate::error::{Error, Result};
use crate::field::FieldData;

/// A coordinate plane. Lattice coordinates are `(r, θ)` for `z = c`,
/// `(r, z)` for `θ = c` and `(θ, z)` for `r = c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Plane {
    Z(f64),
    Theta(f64),
    R(f64),
}

impl Plane {
    fn check(self) -> Result<()> {
        match self {
            Plane::Z(z) if !(-1.0..=1.0).contains(&z) => Err(Error::OutOfRange(format!("z = {z} outside [-1, 1]"))),
            Plane::R(r) if !(0.0..=1.0).contains(&r) => Err(Error::OutOfRange(format!("r = {r} outside [0, 1]"))),
            Plane::Theta(t) if !t.is_finite() => Err(Error::OutOfRange(format!("theta = {t}"))),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Plane {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Plane::Z(v) => write!(f, "z={v}"),
            Plane::Theta(v) => write!(f, "theta={v}"),
            Plane::R(v) => write!(f, "r={v}"),
        }
    }
}

impl FromStr for Plane {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (axis, value) = s
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("plane `{s}` is not of the form axis=value")))?;
        let v: f64 = value
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("bad plane coordinate `{value}`")))?;
        match axis.trim() {
            "z" => Ok(Plane::Z(v)),
            "theta" => Ok(Plane::Theta(v)),
            "r" => Ok(Plane::R(v)),
            a => Err(Error::Config(format!("unknown plane axis `{a}`"))),
        }
    }
}

fn lattice(lo: f64, hi: f64, count: usize) -> impl Iterator<Item = f64> {
    let step = if count > 1 { (hi - lo) / (count - 1) as f64 } else { 0.0 };
    (0..count).map(move |i| lo + step * i as f64)
}

fn angles(count: usize) -> impl Iterator<Item = f64> {
    (0..count).map(move |i| 2.0 * PI * i as f64 / count as f64)
}

/// Writes `resolution²` samples of the interpolant on `plane`.
pub fn write_slice_csv<W: Write>(coeffs: &CoeffTensor, plane: Plane, resolution: usize, mut out: W) -> Result<()> {
    plane.check()?;
    let mut rows = Vec::with_capacity(resolution * resolution);
    match plane {
        Plane::Z(z) => {
            for r in lattice(0.0, 1.0, resolution) {
                rows.extend(angles(resolution).map(|t| (r, t, (r, z, t))));
            }
        }
        Plane::Theta(t) => {
            for r in lattice(0.0, 1.0, resolution) {
                rows.extend(lattice(-1.0, 1.0, resolution).map(|z| (r, z, (r, z, t))));
            }
        }
        Plane::R(r) => {
            for t in angles(resolution) {
                rows.extend(lattice(-1.0, 1.0, resolution).map(|z| (t, z, (r, z, t))));
            }
        }
    }
    let io = |e| Error::Io {
        path: "<csv>".into(),
        source: e,
    };
    writeln!(out, "coord1,coord2,value").map_err(io)?;
    for (a, b, point) in rows {
        writeln!(out, "{a},{b},{}", evaluate_at(coeffs, point).re).map_err(io)?;
    }
    out.flush().map_err(io)
}

pub fn export_slice_csv(field: &FieldData, plane: Plane, resolution: usize, path: &Path) -> Result<()> {
    plane.check()?;
    let analyzed;
    let coeffs = match field {
        FieldData::Coeffs(c) => c,
        FieldData::Grid(g) => {
            analyzed = TransformPlan::new(*g.spec()).analyze(g)?;
            &analyzed
        }
    };
    let file = File::create(path).map_err(Error::io(path))?;
    write_slice_csv(coeffs, plane, resolution, BufWriter::new(file)).map_err(|e| match e {
        Error::Io { source, .. } => Error::Io {
            path: path.into(),
            source,
        },
        e => e,
    })
}
