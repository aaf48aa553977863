//! Field file format: one JSON header line `{"dim":..,"N":..,"B":..}` followed
//! by little-endian `f64` pairs `(re, im)` in lexicographic grid order.

use std::io::{BufRead, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{LpError, Result};
use crate::field::{GridSpec, SampledField};

#[derive(Debug, Serialize, Deserialize)]
struct Header {
    dim: usize,
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "B")]
    b: f64,
}

pub fn write_field<W: Write>(field: &SampledField, mut out: W) -> Result<()> {
    let g = field.grid();
    let header = Header { dim: g.dim(), n: g.points_per_axis(), b: g.box_length() };
    let line = serde_json::to_string(&header).map_err(|e| LpError::FieldFormat(e.to_string()))?;
    let mut bytes = Vec::with_capacity(line.len() + 1 + 16 * field.samples().len());
    bytes.extend_from_slice(line.as_bytes());
    bytes.push(b'\n');
    for z in field.samples() {
        bytes.extend_from_slice(&z.re.to_le_bytes());
        bytes.extend_from_slice(&z.im.to_le_bytes());
    }
    out.write_all(&bytes).map_err(|e| LpError::FieldFormat(e.to_string()))
}

pub fn read_field<R: BufRead>(mut input: R) -> Result<SampledField> {
    let mut line = String::new();
    input.read_line(&mut line).map_err(|e| LpError::FieldFormat(e.to_string()))?;
    let header: Header =
        serde_json::from_str(line.trim_end()).map_err(|e| LpError::FieldFormat(format!("header: {e}")))?;
    let grid = GridSpec::new(header.dim, header.n, header.b)?;
    let mut payload = Vec::new();
    input.read_to_end(&mut payload).map_err(|e| LpError::FieldFormat(e.to_string()))?;
    if payload.len() != 16 * grid.len() {
        return Err(LpError::ShapeMismatch { expected: grid.len(), actual: payload.len() / 16 });
    }
    let samples = payload
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().unwrap());
            let im = f64::from_le_bytes(c[8..].try_into().unwrap());
            Complex64::new(re, im)
        })
        .collect();
    SampledField::new(samples, grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_then_payload() {
        let g = GridSpec::new(1, 4, 1.0).unwrap();
        let f = SampledField::new(
            (0..4).map(|i| Complex64::new(i as f64, -(i as f64))).collect(),
            g,
        )
        .unwrap();
        let mut buf = Vec::new();
        write_field(&f, &mut buf).unwrap();
        let nl = buf.iter().position(|&b| b == b'\n').unwrap();
        assert_eq!(&buf[..nl], br#"{"dim":1,"N":4,"B":1.0}"#);
        assert_eq!(buf.len(), nl + 1 + 64);
        assert_eq!(read_field(&buf[..]).unwrap(), f);
    }

    #[test]
    fn truncated_payload_is_rejected() {
        let g = GridSpec::new(1, 4, 1.0).unwrap();
        let mut buf = Vec::new();
        write_field(&SampledField::zeros(g), &mut buf).unwrap();
        buf.truncate(buf.len() - 8);
        assert!(matches!(read_field(&buf[..]), Err(LpError::ShapeMismatch { .. })));
    }
}
