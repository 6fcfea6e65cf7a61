//! Plain-text field dumps and tables.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::cli::config::FieldFormat;
use crate::error::{Error, Result};
use crate::gas::GasModel;
use crate::solver::{ResidualRecord, StructuredField};

pub const FIELD_HEADER: &str = "i,j,x,y,rho,u,v,p,pbar";

/// One cell of a field dump.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldRow {
    pub i: usize,
    pub j: usize,
    pub x: f64,
    pub y: f64,
    pub rho: f64,
    pub u: f64,
    pub v: f64,
    pub p: f64,
    pub pbar: f64,
}

/// `(p - p_min) / (p_max - p_min)`; zero for a uniform pressure.
pub fn nondimensional_pressure(p: &[f64]) -> Vec<f64> {
    let max = p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = p.iter().copied().fold(f64::INFINITY, f64::min);
    let span = max - min;
    p.iter().map(|&x| if span > 0.0 { (x - min) / span } else { 0.0 }).collect()
}

/// Interior cells in row-major order, `i` fastest.
pub fn field_rows(field: &StructuredField, gas: &GasModel) -> Vec<FieldRow> {
    let g = field.grid();
    let w = field.interior_primitives(gas);
    let p: Vec<f64> = w.iter().map(|s| s[3]).collect();
    let pbar = nondimensional_pressure(&p);
    w.iter()
        .enumerate()
        .map(|(k, s)| {
            let (i, j) = (k % g.ni, k / g.ni);
            let [x, y] = g.center(i as isize, j as isize);
            FieldRow {
                i,
                j,
                x,
                y,
                rho: s[0],
                u: s[1],
                v: s[2],
                p: s[3],
                pbar: pbar[k],
            }
        })
        .collect()
}

/// Seventeen significant digits, enough to reproduce any double.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn field_csv(rows: &[FieldRow]) -> String {
    let mut t = String::with_capacity(rows.len() * 200);
    t.push_str(FIELD_HEADER);
    t.push('\n');
    for r in rows {
        let _ = writeln!(
            t,
            "{},{},{},{},{},{},{},{},{}",
            r.i,
            r.j,
            num(r.x),
            num(r.y),
            num(r.rho),
            num(r.u),
            num(r.v),
            num(r.p),
            num(r.pbar)
        );
    }
    t
}

/// One gnuplot matrix block per variable (rows are `j`, columns `i`),
/// separated by blank line pairs so that `index n` selects a variable.
pub fn field_plot(rows: &[FieldRow], ni: usize) -> String {
    type Column = (&'static str, fn(&FieldRow) -> f64);
    let vars: [Column; 7] = [
        ("x", |r| r.x),
        ("y", |r| r.y),
        ("rho", |r| r.rho),
        ("u", |r| r.u),
        ("v", |r| r.v),
        ("p", |r| r.p),
        ("pbar", |r| r.pbar),
    ];
    let mut t = String::new();
    for (n, (name, get)) in vars.iter().enumerate() {
        if n > 0 {
            t.push_str("\n\n");
        }
        let _ = writeln!(t, "# {name}");
        for row in rows.chunks(ni) {
            let line: Vec<String> = row.iter().map(|r| num(get(r))).collect();
            t.push_str(&line.join(" "));
            t.push('\n');
        }
    }
    t
}

pub fn emit_field(field: &StructuredField, gas: &GasModel, path: &Path, format: FieldFormat) -> Result<()> {
    let rows = field_rows(field, gas);
    let text = match format {
        FieldFormat::Csv => field_csv(&rows),
        FieldFormat::Plot => field_plot(&rows, field.grid().ni),
    };
    fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn parse_field_csv(text: &str) -> Result<Vec<FieldRow>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == FIELD_HEADER => {}
        _ => {
            return Err(Error::Parse {
                line: 1,
                column: 1,
                message: format!("expected header '{FIELD_HEADER}'"),
            })
        }
    }
    let mut rows = Vec::new();
    for (n, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let bad = |message: String| Error::Parse {
            line: n + 2,
            column: 1,
            message,
        };
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 9 {
            return Err(bad(format!("expected 9 columns, found {}", cols.len())));
        }
        let int = |s: &str| s.trim().parse::<usize>().map_err(|_| bad(format!("bad index '{s}'")));
        let real = |s: &str| s.trim().parse::<f64>().map_err(|_| bad(format!("bad number '{s}'")));
        rows.push(FieldRow {
            i: int(cols[0])?,
            j: int(cols[1])?,
            x: real(cols[2])?,
            y: real(cols[3])?,
            rho: real(cols[4])?,
            u: real(cols[5])?,
            v: real(cols[6])?,
            p: real(cols[7])?,
            pbar: real(cols[8])?,
        });
    }
    Ok(rows)
}

pub fn read_field_csv(path: &Path) -> Result<Vec<FieldRow>> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_field_csv(&text)
}

/// Residual history, keeping every `every`-th record and the last one.
pub fn residual_csv(records: &[ResidualRecord], every: usize) -> String {
    let mut t = String::from("iter,residual,dt\n");
    let every = every.max(1);
    for (k, r) in records.iter().enumerate() {
        if r.iteration % every == 0 || k + 1 == records.len() {
            let _ = writeln!(t, "{},{},{}", r.iteration, num(r.residual), num(r.dt));
        }
    }
    t
}

/// Two-column table with a header.
pub fn table_csv(header: &str, rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut t = format!("{header}\n");
    for r in rows {
        let line: Vec<String> = r.into_iter().map(num).collect();
        t.push_str(&line.join(","));
        t.push('\n');
    }
    t
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::StructuredGrid;
    use std::sync::Arc;

    fn wavy() -> (StructuredField, GasModel) {
        let gas = GasModel::inviscid();
        let grid = Arc::new(StructuredGrid::cartesian(6, 5, 1.0, 0.7).unwrap());
        let f = StructuredField::from_fn(grid, &gas, |x, y| {
            [1.0 + 0.1 * x, 0.3 * y, -0.2 * x * y, 0.7 + 0.01 * (7.0 * x).sin() + y / 3.0]
        })
        .unwrap();
        (f, gas)
    }

    #[test]
    fn uniform_two_by_two_has_four_rows() {
        let gas = GasModel::inviscid();
        let nodes = (-2..=4)
            .flat_map(|j| (-2..=4).map(move |i| [0.5 * i as f64, 0.5 * j as f64]))
            .collect();
        let grid = Arc::new(StructuredGrid::from_nodes(2, 2, 2, crate::mesh::Topology::Cartesian, nodes).unwrap());
        let f = StructuredField::uniform(grid, &gas, 1.0, 0.1, 0.0, 0.7).unwrap();
        let csv = field_csv(&field_rows(&f, &gas));
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[0], FIELD_HEADER);
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let (f, gas) = wavy();
        let rows = field_rows(&f, &gas);
        let back = parse_field_csv(&field_csv(&rows)).unwrap();
        assert_eq!(back, rows);
    }

    #[test]
    fn pbar_spans_unit_interval() {
        let (f, gas) = wavy();
        let rows = field_rows(&f, &gas);
        let lo = rows.iter().map(|r| r.pbar).fold(f64::INFINITY, f64::min);
        let hi = rows.iter().map(|r| r.pbar).fold(f64::NEG_INFINITY, f64::max);
        assert_eq!((lo, hi), (0.0, 1.0));
    }

    #[test]
    fn plot_blocks() {
        let (f, gas) = wavy();
        let text = field_plot(&field_rows(&f, &gas), 6);
        assert_eq!(text.matches("# ").count(), 7);
        let rho_block: Vec<&str> = text.split("\n\n\n").nth(2).unwrap().lines().skip(1).collect();
        assert_eq!(rho_block.len(), 5);
        assert_eq!(rho_block[0].split(' ').count(), 6);
    }

    #[test]
    fn residual_table_keeps_last() {
        let recs: Vec<ResidualRecord> = (1..=7)
            .map(|n| ResidualRecord { iteration: n, residual: 1.0 / n as f64, dt: 0.1 })
            .collect();
        let t = residual_csv(&recs, 3);
        let iters: Vec<&str> = t.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
        assert_eq!(iters, ["3", "6", "7"]);
    }

    #[test]
    fn malformed_csv_is_rejected() {
        assert!(parse_field_csv("a,b\n").is_err());
        let e = parse_field_csv(&format!("{FIELD_HEADER}\n0,0,1,2\n")).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
    }
}
