//! Plain-text file formats.
//!
//! * Edge lists: a `# d=<n>` line, an `i,j,weight` header, then one row per
//!   pair with weight above [`EDGE_EPS`].
//! * Signal streams: `t,x_1,...,x_d` header, one row per round, `t` from 1.
//! * Dense matrices: comma-separated rows, no header.
//!
//! Floats are written in Rust's shortest round-trip form (exponent notation
//! for very large or small magnitudes), so values read back are bit-identical.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::graph::{edge_count, pair_index, pairs, GraphVector};
use crate::learner::RunTrace;

/// Edges at or below this weight are omitted from edge lists.
pub const EDGE_EPS: f64 = 1e-12;

fn parse_f64(s: &str, line: usize) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| Error::parse(line, format!("not a number: {s:?}")))?;
    if !v.is_finite() {
        return Err(Error::parse(line, format!("non-finite value {s:?}")));
    }
    Ok(v)
}

fn parse_usize(s: &str, line: usize) -> Result<usize> {
    s.trim()
        .parse()
        .map_err(|_| Error::parse(line, format!("not an index: {s:?}")))
}

/// Non-empty lines with their 1-based line numbers.
fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty())
}

pub fn format_edge_list(w: &GraphVector) -> String {
    let mut out = format!("# d={}\ni,j,weight\n", w.nodes());
    for (k, i, j) in pairs(w.nodes()) {
        let x = w.as_slice()[k];
        if x > EDGE_EPS {
            let _ = writeln!(out, "{i},{j},{x:?}");
        }
    }
    out
}

pub fn parse_edge_list(text: &str) -> Result<GraphVector> {
    let mut it = lines(text);
    let (ln, meta) = it
        .next()
        .ok_or_else(|| Error::parse(1, "empty edge list"))?;
    let d = meta
        .trim()
        .strip_prefix('#')
        .map(str::trim)
        .and_then(|m| m.strip_prefix("d="))
        .ok_or_else(|| Error::parse(ln, "expected `# d=<n>`"))?;
    let d = parse_usize(d, ln)?;
    if d < 2 {
        return Err(Error::parse(ln, format!("need at least 2 nodes, got {d}")));
    }
    // reject sizes whose dense vector would not fit comfortably in memory
    if d > 100_000 {
        return Err(Error::parse(ln, format!("node count {d} is too large")));
    }
    let (ln, header) = it
        .next()
        .ok_or_else(|| Error::parse(ln + 1, "missing header"))?;
    if header.trim() != "i,j,weight" {
        return Err(Error::parse(ln, "expected header `i,j,weight`"));
    }
    let mut w = vec![0.0; edge_count(d)];
    let mut seen = vec![false; w.len()];
    for (ln, row) in it {
        let fields: Vec<&str> = row.split(',').collect();
        if fields.len() != 3 {
            return Err(Error::parse(
                ln,
                format!("expected 3 fields, got {}", fields.len()),
            ));
        }
        let i = parse_usize(fields[0], ln)?;
        let j = parse_usize(fields[1], ln)?;
        let x = parse_f64(fields[2], ln)?;
        if x < 0.0 {
            return Err(Error::parse(ln, format!("negative weight {x}")));
        }
        let k = pair_index(d, i, j).map_err(|e| Error::parse(ln, e.to_string()))?;
        if std::mem::replace(&mut seen[k], true) {
            return Err(Error::parse(ln, format!("duplicate edge ({i}, {j})")));
        }
        w[k] = x;
    }
    GraphVector::new(d, w)
}

pub fn format_signals(signals: &[Vec<f64>]) -> Result<String> {
    let d = signals.first().map_or(0, Vec::len);
    let mut out = String::from("t");
    for i in 1..=d {
        let _ = write!(out, ",x_{i}");
    }
    out.push('\n');
    for (t, x) in signals.iter().enumerate() {
        if x.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: x.len(),
            });
        }
        let _ = write!(out, "{}", t + 1);
        for v in x {
            let _ = write!(out, ",{v:?}");
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn parse_signals(text: &str) -> Result<Vec<Vec<f64>>> {
    let mut it = lines(text);
    let (ln, header) = it
        .next()
        .ok_or_else(|| Error::parse(1, "empty signal file"))?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    if cols.first() != Some(&"t") || cols.len() < 3 {
        return Err(Error::parse(
            ln,
            "expected header `t,x_1,...,x_d` with d >= 2",
        ));
    }
    for (i, c) in cols[1..].iter().enumerate() {
        if *c != format!("x_{}", i + 1) {
            return Err(Error::parse(ln, format!("unexpected column {c:?}")));
        }
    }
    let d = cols.len() - 1;
    let mut out = Vec::new();
    for (ln, row) in it {
        let fields: Vec<&str> = row.split(',').collect();
        if fields.len() != d + 1 {
            return Err(Error::parse(
                ln,
                format!("expected {} fields, got {}", d + 1, fields.len()),
            ));
        }
        let t = parse_usize(fields[0], ln)?;
        if t != out.len() + 1 {
            return Err(Error::parse(
                ln,
                format!("expected round {}, got {t}", out.len() + 1),
            ));
        }
        out.push(
            fields[1..]
                .iter()
                .map(|f| parse_f64(f, ln))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    if out.is_empty() {
        return Err(Error::parse(ln, "signal file has no rounds"));
    }
    Ok(out)
}

pub fn format_matrix(m: &DMatrix<f64>) -> String {
    let mut out = String::new();
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            if c > 0 {
                out.push(',');
            }
            let _ = write!(out, "{:?}", m[(r, c)]);
        }
        out.push('\n');
    }
    out
}

pub fn parse_matrix(text: &str) -> Result<DMatrix<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (ln, row) in lines(text) {
        let vals = row
            .split(',')
            .map(|f| parse_f64(f, ln))
            .collect::<Result<Vec<_>>>()?;
        if let Some(first) = rows.first() {
            if first.len() != vals.len() {
                return Err(Error::parse(
                    ln,
                    format!("row has {} columns, expected {}", vals.len(), first.len()),
                ));
            }
        }
        rows.push(vals);
    }
    let ncols = rows.first().map_or(0, Vec::len);
    if ncols == 0 {
        return Err(Error::parse(1, "empty matrix"));
    }
    Ok(DMatrix::from_row_iterator(
        rows.len(),
        ncols,
        rows.into_iter().flatten(),
    ))
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:?}")).unwrap_or_default()
}

/// Per-round trace: `t,eta,loss,rel_error,regret_increment,path_var_increment`.
/// Quantities that were not computed are left empty.
pub fn format_trace(trace: &RunTrace) -> String {
    let mut out = String::from("t,eta,loss,rel_error,regret_increment,path_var_increment\n");
    for r in &trace.records {
        let _ = writeln!(
            out,
            "{},{:?},{:?},{},{},{}",
            r.t,
            r.eta,
            r.loss,
            opt(r.rel_error),
            opt(r.regret_increment),
            opt(r.path_var_increment)
        );
    }
    out
}

pub fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    fs::write(path, contents).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })
}
