//! On-disk formats.
//!
//! Truth table: first line `n=<dim>`, second line either `2^n` characters
//! of `{0,1}` (character `i` is the value at the point with integer
//! encoding `i`) or `hex:` followed by `ceil(2^n / 4)` hex digits. In the
//! hex form, digit `j` packs indices `4j..4j+3` with index `4j` in the
//! most significant bit (the bit string chunked into 4-character groups,
//! each read MSB-first); any trailing pad bits must be zero.
//!
//! Mapping: first line `n=<dim>`, then `2^n` lines, line `i` holding the
//! integer encoding of the image of point `i`.
//!
//! Coordinate 1 is the lowest-order bit throughout, matching the
//! library's point encoding.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use lipcube::cube::{BooleanFunction, TruthTable, MAX_EXHAUSTIVE_DIM};
use lipcube::mappings::Mapping;

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: missing `n=<dim>` header")]
    MissingHeader { path: String },
    #[error("{path}: bad dimension `{value}` (need 1..={max})")]
    BadDimension { path: String, value: String, max: u32 },
    #[error("{path}: expected {expected} table entries, found {found}")]
    WrongLength {
        path: String,
        expected: u64,
        found: u64,
    },
    #[error("{path}: invalid character `{ch}` in table body")]
    BadChar { path: String, ch: char },
    #[error("{path}: line {line}: `{value}` is not a valid point encoding")]
    BadEntry {
        path: String,
        line: usize,
        value: String,
    },
    #[error("{path}: trailing pad bits must be zero")]
    DirtyPadding { path: String },
}

fn read_to_string(path: &Path) -> Result<String, FormatError> {
    fs::read_to_string(path).map_err(|source| FormatError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn parse_header(path: &Path, line: Option<&str>) -> Result<u32, FormatError> {
    let text = line
        .and_then(|l| l.trim().strip_prefix("n="))
        .ok_or_else(|| FormatError::MissingHeader {
            path: path.display().to_string(),
        })?;
    let dim: u32 = text.parse().map_err(|_| FormatError::BadDimension {
        path: path.display().to_string(),
        value: text.to_string(),
        max: MAX_EXHAUSTIVE_DIM,
    })?;
    if !(1..=MAX_EXHAUSTIVE_DIM).contains(&dim) {
        return Err(FormatError::BadDimension {
            path: path.display().to_string(),
            value: text.to_string(),
            max: MAX_EXHAUSTIVE_DIM,
        });
    }
    Ok(dim)
}

/// Reads a truth-table file into a boolean function.
pub fn read_truth_table(path: &Path) -> Result<BooleanFunction, FormatError> {
    let text = read_to_string(path)?;
    let mut lines = text.lines();
    let dim = parse_header(path, lines.next())?;
    let body = lines.next().unwrap_or("").trim();
    let len = 1u64 << dim;

    let mut table = TruthTable::zeros(dim);
    if let Some(hex) = body.strip_prefix("hex:") {
        let expected_digits = len.div_ceil(4);
        if hex.len() as u64 != expected_digits {
            return Err(FormatError::WrongLength {
                path: path.display().to_string(),
                expected: expected_digits,
                found: hex.len() as u64,
            });
        }
        for (j, ch) in hex.chars().enumerate() {
            let digit = ch.to_digit(16).ok_or(FormatError::BadChar {
                path: path.display().to_string(),
                ch,
            })? as u64;
            for k in 0..4u64 {
                let i = 4 * j as u64 + k;
                let bit = (digit >> (3 - k)) & 1 == 1;
                if i < len {
                    table.set(i, bit);
                } else if bit {
                    return Err(FormatError::DirtyPadding {
                        path: path.display().to_string(),
                    });
                }
            }
        }
    } else {
        if body.len() as u64 != len {
            return Err(FormatError::WrongLength {
                path: path.display().to_string(),
                expected: len,
                found: body.len() as u64,
            });
        }
        for (i, ch) in body.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => table.set(i as u64, true),
                _ => {
                    return Err(FormatError::BadChar {
                        path: path.display().to_string(),
                        ch,
                    })
                }
            }
        }
    }
    Ok(BooleanFunction::from_table(table))
}

/// Renders a truth table in the file format, binary or hex body.
pub fn render_truth_table(f: &BooleanFunction, hex: bool) -> String {
    let table = f.to_table();
    let len = table.len();
    let mut out = format!("n={}\n", table.dim());
    if hex {
        out.push_str("hex:");
        for j in 0..len.div_ceil(4) {
            let mut digit = 0u32;
            for k in 0..4u64 {
                let i = 4 * j + k;
                if i < len && table.get(i) {
                    digit |= 1 << (3 - k);
                }
            }
            write!(out, "{digit:x}").unwrap();
        }
    } else {
        for i in 0..len {
            out.push(if table.get(i) { '1' } else { '0' });
        }
    }
    out.push('\n');
    out
}

pub fn write_truth_table(path: &Path, f: &BooleanFunction, hex: bool) -> Result<(), FormatError> {
    fs::write(path, render_truth_table(f, hex)).map_err(|source| FormatError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Reads a mapping file as a raw image table; bijectivity is the
/// caller's question to ask (`Mapping::from_table` checks it).
pub fn read_mapping_table(path: &Path) -> Result<(u32, Vec<u64>), FormatError> {
    let text = read_to_string(path)?;
    let mut lines = text.lines();
    let dim = parse_header(path, lines.next())?;
    let len = 1u64 << dim;
    let mut table = Vec::with_capacity(len as usize);
    for (idx, line) in lines.enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let value: u64 = line.parse().map_err(|_| FormatError::BadEntry {
            path: path.display().to_string(),
            line: idx + 2,
            value: line.to_string(),
        })?;
        if value >= len {
            return Err(FormatError::BadEntry {
                path: path.display().to_string(),
                line: idx + 2,
                value: line.to_string(),
            });
        }
        table.push(value);
    }
    if table.len() as u64 != len {
        return Err(FormatError::WrongLength {
            path: path.display().to_string(),
            expected: len,
            found: table.len() as u64,
        });
    }
    Ok((dim, table))
}

/// Reads and validates a mapping file.
pub fn read_mapping(path: &Path, name: &str) -> Result<Mapping, FormatError> {
    let (dim, table) = read_mapping_table(path)?;
    Mapping::from_table(name.to_string(), dim, table).map_err(|_| FormatError::BadEntry {
        path: path.display().to_string(),
        line: 0,
        value: "image table is not a permutation".to_string(),
    })
}

pub fn render_mapping(m: &Mapping) -> String {
    let table = m.table().expect("mapping files need a materialized table");
    let mut out = format!("n={}\n", m.dim());
    for &y in table {
        writeln!(out, "{y}").unwrap();
    }
    out
}

pub fn write_mapping(path: &Path, m: &Mapping) -> Result<(), FormatError> {
    fs::write(path, render_mapping(m)).map_err(|source| FormatError::Io {
        path: path.display().to_string(),
        source,
    })
}
