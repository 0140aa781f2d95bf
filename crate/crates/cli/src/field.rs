//! Binary field files.
//!
//! Layout (little-endian): magic `CCF1`, version `u32`, kind `u8`
//! (0 = real grid values, 1 = complex coefficients), `m, n, p` as `u32`,
//! the payload as `f64` in `(ℓ, k, j)` order with `j` fastest (complex values
//! interleaved re, im), then the CRC32 of the payload bytes.

use std::fs;
use std::path::Path;

use cylspec::{CoeffTensor, GridField, GridSpec};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub const MAGIC: [u8; 4] = *b"CCF1";
pub const VERSION: u32 = 1;
const HEADER: usize = 4 + 4 + 1 + 12;

#[derive(Debug, Clone, PartialEq)]
pub enum FieldData {
    Grid(GridField),
    Coeffs(CoeffTensor),
}

impl FieldData {
    pub fn spec(&self) -> &GridSpec {
        match self {
            FieldData::Grid(g) => g.spec(),
            FieldData::Coeffs(c) => c.spec(),
        }
    }

    pub fn kind(&self) -> u8 {
        match self {
            FieldData::Grid(_) => 0,
            FieldData::Coeffs(_) => 1,
        }
    }
}

impl From<GridField> for FieldData {
    fn from(g: GridField) -> Self {
        FieldData::Grid(g)
    }
}

impl From<CoeffTensor> for FieldData {
    fn from(c: CoeffTensor) -> Self {
        FieldData::Coeffs(c)
    }
}

pub fn encode(data: &FieldData) -> Vec<u8> {
    let spec = data.spec();
    let mut payload = Vec::with_capacity(spec.len() * 16);
    match data {
        FieldData::Grid(g) => g.values().iter().for_each(|v| payload.extend_from_slice(&v.to_le_bytes())),
        FieldData::Coeffs(c) => c.data().iter().for_each(|v| {
            payload.extend_from_slice(&v.re.to_le_bytes());
            payload.extend_from_slice(&v.im.to_le_bytes());
        }),
    }
    let mut out = Vec::with_capacity(HEADER + payload.len() + 4);
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.push(data.kind());
    for d in [spec.m(), spec.n(), spec.p()] {
        out.extend_from_slice(&(d as u32).to_le_bytes());
    }
    out.extend_from_slice(&payload);
    out.extend_from_slice(&crc32fast::hash(&payload).to_le_bytes());
    out
}

fn u32_at(bytes: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(bytes[at..at + 4].try_into().unwrap())
}

pub fn decode(bytes: &[u8]) -> Result<FieldData> {
    if bytes.len() < HEADER {
        return Err(Error::LengthMismatch {
            expected: HEADER,
            found: bytes.len(),
        });
    }
    let magic: [u8; 4] = bytes[..4].try_into().unwrap();
    if magic != MAGIC {
        return Err(Error::BadMagic(magic));
    }
    let version = u32_at(bytes, 4);
    if version != VERSION {
        return Err(Error::UnsupportedVersion(version));
    }
    let kind = bytes[8];
    let width = match kind {
        0 => 1,
        1 => 2,
        k => return Err(Error::UnknownKind(k)),
    };
    let (m, n, p) = (u32_at(bytes, 9) as usize, u32_at(bytes, 13) as usize, u32_at(bytes, 17) as usize);
    let spec = GridSpec::new(m, n, p)?;
    let len = spec.len() * width * 8;
    let expected = HEADER + len + 4;
    if bytes.len() != expected {
        return Err(Error::LengthMismatch {
            expected,
            found: bytes.len(),
        });
    }
    let payload = &bytes[HEADER..HEADER + len];
    let stored = u32_at(bytes, HEADER + len);
    let computed = crc32fast::hash(payload);
    if stored != computed {
        return Err(Error::CrcMismatch { stored, computed });
    }
    let floats: Vec<f64> = payload
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok(match kind {
        0 => FieldData::Grid(GridField::new(spec, floats)?),
        _ => FieldData::Coeffs(CoeffTensor::from_vec(
            spec,
            floats.chunks_exact(2).map(|c| Complex64::new(c[0], c[1])).collect(),
        )?),
    })
}

pub fn write_field(path: &Path, data: &FieldData) -> Result<()> {
    fs::write(path, encode(data)).map_err(Error::io(path))
}

pub fn read_field(path: &Path) -> Result<FieldData> {
    decode(&fs::read(path).map_err(Error::io(path))?)
}
