//! Plain-text tensor files.
//!
//! The first line holds `N1 N2 N3`; the remaining whitespace-separated
//! tokens are the entries with `n1` outermost and `n3` innermost.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::tensor::{Dims, Tensor3};

/// Renders `a` with 17 significant digits per entry, one tube per line.
pub fn format_tensor(a: &Tensor3) -> String {
    let Dims { n1, n2, n3 } = a.dims();
    let mut out = format!("{n1} {n2} {n3}\n");
    for tube in a.as_slice().chunks(n3.max(1)) {
        let mut first = true;
        for v in tube {
            if !first {
                out.push(' ');
            }
            first = false;
            write!(out, "{v:.16e}").expect("writing to a String");
        }
        out.push('\n');
    }
    out
}

pub fn parse_tensor(text: &str) -> Result<Tensor3> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (hline, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        detail: "missing dimension header".into(),
    })?;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::Parse {
            line: hline + 1,
            detail: format!("bad dimension: {e}"),
        })?;
    let &[n1, n2, n3] = dims.as_slice() else {
        return Err(Error::Parse {
            line: hline + 1,
            detail: format!("expected 3 dimensions, found {}", dims.len()),
        });
    };
    if n1 == 0 || n2 == 0 || n3 == 0 {
        return Err(Error::Parse {
            line: hline + 1,
            detail: "dimensions must be positive".into(),
        });
    }
    let dims = Dims::new(n1, n2, n3);
    let mut data = Vec::with_capacity(dims.len());
    for (ln, line) in lines {
        for tok in line.split_whitespace() {
            let v: f64 = tok.parse().map_err(|e| Error::Parse {
                line: ln + 1,
                detail: format!("bad value `{tok}`: {e}"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    line: ln + 1,
                    detail: format!("non-finite value `{tok}`"),
                });
            }
            data.push(v);
        }
    }
    if data.len() != dims.len() {
        return Err(Error::Parse {
            line: text.lines().count(),
            detail: format!("expected {} values for {dims}, found {}", dims.len(), data.len()),
        });
    }
    Tensor3::from_vec(dims, data)
}

pub fn read_tensor(path: impl AsRef<Path>) -> Result<Tensor3> {
    parse_tensor(&fs::read_to_string(path)?)
}

pub fn write_tensor(path: impl AsRef<Path>, a: &Tensor3) -> Result<()> {
    fs::write(path, format_tensor(a))?;
    Ok(())
}
