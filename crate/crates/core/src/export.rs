//! File formats. Text outputs start with a schema line; the binary matrix
//! format carries its version in the header.
//!
//! Binary generator matrix layout, all integers little-endian:
//!
//! | offset | size | field |
//! |---|---|---|
//! | 0 | 4 | magic `LRCM` |
//! | 4 | 2 | version (1) |
//! | 6 | 1 | symbol width `w` in bytes (1, 2 or 4) |
//! | 7 | 1 | reserved, 0 |
//! | 8 | 4 | n (columns) |
//! | 12 | 4 | k_nominal (rows) |
//! | 16 | 4 | m, the field is GF(2^m) |
//! | 20 | 4 | modulus, bit i is the coefficient of X^i |
//! | 24 | w*n*k | symbols, row-major |

use std::fmt::Write as _;

use serde_json::json;
use thiserror::Error;

use crate::galois::Field;
use crate::linalg::Matrix;
use crate::tower::{PlaceSet, SplitGraph};

pub const MATRIX_MAGIC: &[u8; 4] = b"LRCM";
pub const MATRIX_VERSION: u16 = 1;
pub const PLACES_SCHEMA: &str = "# lrclab-places v1";
pub const MATRIX_CSV_SCHEMA: &str = "# lrclab-matrix v1";
pub const GRAPH_SCHEMA: &str = "// lrclab-graph v1";

#[derive(Debug, Error)]
pub enum ExportError {
    #[error("not an LRCM file")]
    BadMagic,
    #[error("unsupported LRCM version {0}")]
    BadVersion(u16),
    #[error("truncated matrix file: need {need} bytes, have {have}")]
    Truncated { need: usize, have: usize },
    #[error("bad symbol width {0}")]
    BadWidth(u8),
}

fn hex_width(field: &Field) -> usize {
    (field.degree() as usize).div_ceil(4)
}

pub fn hex_symbol(field: &Field, a: u32) -> String {
    format!("{:0w$x}", a, w = hex_width(field))
}

/// One row per place: index, then one hex column per coordinate.
pub fn places_csv(places: &PlaceSet) -> String {
    let field = places.field();
    let mut out = format!("{PLACES_SCHEMA}\nindex");
    for i in 0..=places.depth() {
        write!(out, ",x{i}").unwrap();
    }
    out.push('\n');
    for p in places.places() {
        write!(out, "{}", p.index).unwrap();
        for &c in &p.coords {
            write!(out, ",{}", hex_symbol(field, c)).unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn places_json(places: &PlaceSet) -> serde_json::Value {
    let field = places.field();
    json!({
        "schema": "lrclab-places/1",
        "tower": places.tower().name(),
        "field": field.description(),
        "depth": places.depth(),
        "count": places.len(),
        "places": places.places().iter().map(|p| json!({
            "index": p.index,
            "coords": p.coords.iter().map(|&c| hex_symbol(field, c)).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
    })
}

pub fn graph_dot(field: &Field, graph: &SplitGraph) -> String {
    let mut out = format!("{GRAPH_SCHEMA}\ndigraph split {{\n");
    for &v in &graph.vertices {
        writeln!(out, "  \"{}\";", field.power_notation(v)).unwrap();
    }
    for &(a, b) in &graph.edges {
        writeln!(out, "  \"{}\" -> \"{}\";", field.power_notation(a), field.power_notation(b)).unwrap();
    }
    out.push_str("}\n");
    out
}

pub fn matrix_csv(field: &Field, m: &Matrix) -> String {
    let mut out = format!("{MATRIX_CSV_SCHEMA}\n# rows={} cols={} m={} modulus={:#x}\n", m.rows(), m.cols(), field.degree(), field.modulus());
    for row in m.iter_rows() {
        let cells: Vec<String> = row.iter().map(|&a| hex_symbol(field, a)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn symbol_width(m: u32) -> u8 {
    match m {
        0..=8 => 1,
        9..=16 => 2,
        _ => 4,
    }
}

pub fn matrix_binary(field: &Field, m: &Matrix) -> Vec<u8> {
    let w = symbol_width(field.degree());
    let mut out = Vec::with_capacity(24 + w as usize * m.as_flat().len());
    out.extend_from_slice(MATRIX_MAGIC);
    out.extend_from_slice(&MATRIX_VERSION.to_le_bytes());
    out.push(w);
    out.push(0);
    for v in [m.cols() as u32, m.rows() as u32, field.degree(), field.modulus()] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    for &a in m.as_flat() {
        out.extend_from_slice(&a.to_le_bytes()[..w as usize]);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixFile {
    pub m: u32,
    pub modulus: u32,
    pub matrix: Matrix,
}

pub fn read_matrix_binary(bytes: &[u8]) -> Result<MatrixFile, ExportError> {
    let need = |n: usize| if bytes.len() < n { Err(ExportError::Truncated { need: n, have: bytes.len() }) } else { Ok(()) };
    need(24)?;
    if &bytes[..4] != MATRIX_MAGIC {
        return Err(ExportError::BadMagic);
    }
    let version = u16::from_le_bytes([bytes[4], bytes[5]]);
    if version != MATRIX_VERSION {
        return Err(ExportError::BadVersion(version));
    }
    let w = bytes[6];
    if ![1u8, 2, 4].contains(&w) {
        return Err(ExportError::BadWidth(w));
    }
    let word = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
    let (n, k, m, modulus) = (word(8) as usize, word(12) as usize, word(16), word(20));
    let w = w as usize;
    need(24 + w * n * k)?;
    let data = bytes[24..24 + w * n * k]
        .chunks_exact(w)
        .map(|c| {
            let mut b = [0u8; 4];
            b[..w].copy_from_slice(c);
            u32::from_le_bytes(b)
        })
        .collect();
    Ok(MatrixFile { m, modulus, matrix: Matrix::from_flat(k, n, data) })
}
