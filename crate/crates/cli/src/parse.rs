//! Instance file readers.
//!
//! TSP files use a small TSPLIB subset:
//!
//! ```text
//! NAME : example
//! TYPE : TSP
//! COMMENT : anything
//! DIMENSION : 3
//! EDGE_WEIGHT_TYPE : EUC_2D
//! NODE_COORD_SECTION
//! 1 0.0 0.0
//! 2 1.0 0.0
//! 3 0.5 0.8660254037844386
//! EOF
//! ```
//!
//! Node indices are 1-based and may appear in any order. Distances are
//! full-precision Euclidean (no TSPLIB integer rounding).
//!
//! Bin packing files hold the item count on the first line, the bin
//! capacity on the second and one item size per following line. Sizes are
//! divided by the capacity so bins have unit capacity. Blank lines and
//! lines starting with `#` are ignored in both formats.

use std::fs;
use std::path::Path;

use stochopt::problems::{BinPackingInstance, Rounding, TspInstance};

#[derive(Debug, thiserror::Error)]
pub enum ParseError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("invalid instance: {0}")]
    Instance(#[from] stochopt::Error),
}

fn syntax<T>(line: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError::Syntax { line, message: message.into() })
}

fn read(path: &Path) -> Result<String, ParseError> {
    fs::read_to_string(path).map_err(|source| ParseError::Io { path: path.display().to_string(), source })
}

/// Meaningful lines with their 1-based numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

pub fn parse_tsp_file(path: &Path) -> Result<TspInstance<f64>, ParseError> {
    parse_tsp(&read(path)?)
}

pub fn parse_tsp(text: &str) -> Result<TspInstance<f64>, ParseError> {
    let mut dimension: Option<usize> = None;
    let mut coords: Vec<Option<(f64, f64)>> = Vec::new();
    let mut in_coords = false;
    let mut section_line = 0;
    let mut last_line = 0;
    let mut read_coords = 0usize;

    for (no, line) in content_lines(text) {
        last_line = no;
        if line == "EOF" {
            break;
        }
        if in_coords {
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 {
                // a keyword after the section ends it
                if fields.first().is_some_and(|f| f.chars().all(|c| c.is_ascii_uppercase() || c == '_')) {
                    in_coords = false;
                } else {
                    return syntax(no, "NODE_COORD_SECTION: expected `index x y`");
                }
            } else {
                let idx: usize = fields[0]
                    .parse()
                    .map_err(|_| ParseError::Syntax { line: no, message: format!("bad node index `{}`", fields[0]) })?;
                let num = |s: &str| {
                    s.parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .ok_or_else(|| ParseError::Syntax { line: no, message: format!("bad coordinate `{s}`") })
                };
                let (x, y) = (num(fields[1])?, num(fields[2])?);
                if idx == 0 || idx > coords.len() {
                    return syntax(no, format!("node index {idx} outside 1..={}", coords.len()));
                }
                if coords[idx - 1].replace((x, y)).is_some() {
                    return syntax(no, format!("node {idx} listed twice"));
                }
                read_coords += 1;
                continue;
            }
        }
        if line == "NODE_COORD_SECTION" {
            let Some(n) = dimension else {
                return syntax(no, "NODE_COORD_SECTION before DIMENSION");
            };
            coords = vec![None; n];
            in_coords = true;
            section_line = no;
            continue;
        }
        let Some((key, value)) = line.split_once(':') else {
            return syntax(no, format!("expected `KEY : value`, got `{line}`"));
        };
        let (key, value) = (key.trim(), value.trim());
        match key {
            "NAME" | "COMMENT" => {}
            "TYPE" if value == "TSP" => {}
            "TYPE" => return syntax(no, format!("unsupported TYPE `{value}`")),
            "DIMENSION" => {
                let n: usize = value
                    .parse()
                    .map_err(|_| ParseError::Syntax { line: no, message: format!("bad DIMENSION `{value}`") })?;
                if n < 2 {
                    return syntax(no, "DIMENSION must be at least 2");
                }
                dimension = Some(n);
            }
            "EDGE_WEIGHT_TYPE" if value == "EUC_2D" => {}
            "EDGE_WEIGHT_TYPE" => return syntax(no, format!("unknown EDGE_WEIGHT_TYPE `{value}`")),
            _ => return syntax(no, format!("unknown keyword `{key}`")),
        }
    }
    let Some(n) = dimension else {
        return syntax(last_line.max(1), "missing DIMENSION");
    };
    if coords.is_empty() {
        return syntax(last_line.max(1), "missing NODE_COORD_SECTION");
    }
    if read_coords != n {
        return syntax(
            section_line,
            format!("NODE_COORD_SECTION: DIMENSION is {n} but {read_coords} coordinates were given"),
        );
    }
    let points = coords.into_iter().map(|c| c.expect("all nodes counted")).collect();
    Ok(TspInstance::from_coords(points, Rounding::Exact)?)
}

pub fn parse_binpacking_file(path: &Path) -> Result<BinPackingInstance<f64>, ParseError> {
    parse_binpacking(&read(path)?)
}

pub fn parse_binpacking(text: &str) -> Result<BinPackingInstance<f64>, ParseError> {
    let mut lines = content_lines(text);
    let number = |no: usize, s: &str, what: &str| {
        s.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| ParseError::Syntax { line: no, message: format!("bad {what} `{s}`") })
    };
    let Some((no, count)) = lines.next() else {
        return syntax(1, "missing item count");
    };
    let count: usize =
        count.parse().map_err(|_| ParseError::Syntax { line: no, message: format!("bad item count `{count}`") })?;
    let Some((no, cap)) = lines.next() else {
        return syntax(no + 1, "missing capacity");
    };
    let capacity = number(no, cap, "capacity")?;
    if capacity <= 0.0 {
        return syntax(no, "capacity must be positive");
    }
    let mut sizes = Vec::with_capacity(count);
    let mut last = no;
    for (no, line) in lines {
        last = no;
        let s = number(no, line, "size")?;
        if s <= 0.0 || s > capacity {
            return syntax(no, format!("size {s} outside (0, {capacity}]"));
        }
        sizes.push(s / capacity);
    }
    if sizes.len() != count {
        return syntax(last, format!("expected {count} sizes, found {}", sizes.len()));
    }
    Ok(BinPackingInstance::new(sizes)?)
}
