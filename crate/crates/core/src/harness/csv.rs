//! CSV output of sweep results.
//!
//! Numbers are written in the shortest form that parses back to the same
//! `f64`, so a write/parse round trip is exact.

use std::fmt::Write as _;
use std::path::Path;

use super::config::{Scheme, XKind};
use super::sweep::SweepRow;
use crate::error::{Error, Result};

pub const HEADER: &str = "scheme,user,k_db,n,x_db,x_kind,ber_sim,ci99,bep_theory,bep_se,bits,wall_s";

fn num(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-4..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// Renders rows with the header line; every line ends with `\n`.
pub fn to_csv_string(rows: &[SweepRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.scheme.name(),
            r.user,
            num(r.k_db),
            r.n,
            num(r.x_db),
            r.x_kind.name(),
            num(r.ber_sim),
            num(r.ci99),
            num(r.bep_theory),
            num(r.bep_se),
            r.bits,
            num(r.wall_s),
        );
    }
    out
}

/// Writes `rows` to `path`. An empty result set is an error and creates no
/// file.
pub fn write_csv(rows: &[SweepRow], path: &Path) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::Parameter("no results to write".into()));
    }
    std::fs::write(path, to_csv_string(rows)).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Parses text produced by [`to_csv_string`].
pub fn parse_csv(text: &str) -> Result<Vec<SweepRow>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == HEADER => {}
        _ => return Err(Error::Parameter("missing or unexpected CSV header".into())),
    }
    lines
        .enumerate()
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, line)| parse_row(line).map_err(|m| Error::Parameter(format!("line {}: {m}", i + 2))))
        .collect()
}

fn parse_row(line: &str) -> std::result::Result<SweepRow, String> {
    let f: Vec<&str> = line.split(',').collect();
    if f.len() != 12 {
        return Err(format!("expected 12 fields, got {}", f.len()));
    }
    let float = |i: usize| f[i].parse::<f64>().map_err(|_| format!("bad number '{}'", f[i]));
    Ok(SweepRow {
        scheme: f[0].parse::<Scheme>().map_err(|e| e.to_string())?,
        user: f[1].to_string(),
        k_db: float(2)?,
        n: f[3].parse().map_err(|_| format!("bad n '{}'", f[3]))?,
        x_db: float(4)?,
        x_kind: XKind::parse(f[5]).ok_or_else(|| format!("bad x_kind '{}'", f[5]))?,
        ber_sim: float(6)?,
        ci99: float(7)?,
        bep_theory: float(8)?,
        bep_se: float(9)?,
        bits: f[10].parse().map_err(|_| format!("bad bits '{}'", f[10]))?,
        wall_s: float(11)?,
    })
}
