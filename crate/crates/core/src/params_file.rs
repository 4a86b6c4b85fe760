//! Plain-text genome files.
//!
//! ```text
//! neuromod-params v1 <dim>
//! <value 0>
//! ...
//! <value dim-1>
//! ```
//!
//! Values use shortest round-trip scientific notation (`{:e}`), so a
//! write → read → write cycle is byte-identical.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::policy::ParameterVector;

const MAGIC: &str = "neuromod-params";
const VERSION: &str = "v1";

pub fn format_params(params: &ParameterVector) -> String {
    let mut out = format!("{MAGIC} {VERSION} {}\n", params.len());
    for v in params.as_slice() {
        writeln!(out, "{v:e}").expect("writing to a String");
    }
    out
}

/// Parses file contents; `path` is only used in error messages.
pub fn parse_params(text: &str, path: &Path) -> Result<ParameterVector> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::parse(path, 1, "empty parameter file"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let dim = match fields.as_slice() {
        [MAGIC, VERSION, dim] => dim
            .parse::<usize>()
            .map_err(|e| Error::parse(path, 1, format!("bad dimension {dim:?}: {e}")))?,
        _ => {
            return Err(Error::parse(
                path,
                1,
                format!("expected header \"{MAGIC} {VERSION} <dim>\", got {header:?}"),
            ))
        }
    };
    let mut values = Vec::with_capacity(dim);
    for (i, line) in lines.enumerate() {
        let line_no = i + 2;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let v: f64 = trimmed
            .parse()
            .map_err(|e| Error::parse(path, line_no, format!("bad value {trimmed:?}: {e}")))?;
        if !v.is_finite() {
            return Err(Error::parse(path, line_no, "non-finite parameter"));
        }
        values.push(v);
    }
    if values.len() != dim {
        return Err(Error::parse(
            path,
            values.len() + 2,
            format!("header declares {dim} values, found {}", values.len()),
        ));
    }
    ParameterVector::new(values)
}

pub fn write_params(path: &Path, params: &ParameterVector) -> Result<()> {
    std::fs::write(path, format_params(params)).map_err(|e| Error::io(path, e))
}

pub fn read_params(path: &Path) -> Result<ParameterVector> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_params(&text, path)
}
