//! Batch front end: run a configured case and write its data files.

pub mod config;
pub mod output;

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Serialize;

pub use config::{build_config, parse_config, to_config_text, ConfigDocument, DiagnosticToggles, FieldFormat, RunConfig};
pub use output::{emit_field, parse_field_csv, read_field_csv, FieldRow};

use crate::cases::{CaseId, CaseManifest};
use crate::diagnostics::{
    cavity_reference_re400, checkerboard_metric, divergence_residual, extract_centerline, fit_scaling_slope, ind_p,
    l1_error, profile_rms, CenterlineAxis, Primitive1d, RiemannExact, ScalingSeries,
};
use crate::error::{Error, Result};
use crate::mesh::StructuredGrid;
use crate::solver::StructuredField;

/// Machine-readable outcome of one solve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseSummary {
    pub case: String,
    pub dissipation: String,
    pub central: String,
    pub mach: f64,
    pub iterations: usize,
    pub converged: bool,
    pub final_residual: f64,
    pub time: f64,
    pub ind_p: Option<f64>,
    pub checkerboard: Option<f64>,
    pub divergence: Option<f64>,
    pub centerline_rms: Option<f64>,
    pub density_l1: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSummary {
    pub points: Vec<CaseSummary>,
    /// Log-log slope of `Ind(p)` against Mach number.
    pub slope: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum RunSummary {
    Single(CaseSummary),
    Sweep(SweepSummary),
}

/// A finished solve and its diagnostics.
pub struct Solution {
    pub field: StructuredField,
    pub summary: CaseSummary,
}

/// Marches a manifest to `t_final` or to a steady state.
pub fn solve(m: &CaseManifest, diagnostics: &DiagnosticToggles) -> Result<Solution> {
    m.validate()?;
    let grid = m.build_grid()?;
    solve_on(m, grid, diagnostics)
}

fn solve_on(m: &CaseManifest, grid: Arc<StructuredGrid>, d: &DiagnosticToggles) -> Result<Solution> {
    let cfg = m.solver_config();
    let mut field = m.initial_field(grid)?;
    let (iterations, converged, final_residual) = match m.run.t_final {
        Some(t) => {
            let n = field.run_until(&cfg, t, m.run.max_iter)?;
            let r = field.residuals().last().map_or(0.0, |r| r.residual);
            (n, true, r)
        }
        None => {
            let out = field.run_steady(&cfg, m.run.tol, m.run.max_iter)?;
            (out.iterations, out.converged, out.final_residual)
        }
    };
    let summary = summarize(m, &field, d, iterations, converged, final_residual)?;
    Ok(Solution { field, summary })
}

fn summarize(
    m: &CaseManifest,
    field: &StructuredField,
    d: &DiagnosticToggles,
    iterations: usize,
    converged: bool,
    final_residual: f64,
) -> Result<CaseSummary> {
    let g = field.grid();
    let w = field.interior_primitives(&m.gas);
    let p: Vec<f64> = w.iter().map(|s| s[3]).collect();
    let two_d = g.ni >= 4 && g.nj >= 4;
    let cavity = m.case == CaseId::Cavity;
    let divergence = if d.divergence && two_d {
        let u: Vec<f64> = w.iter().map(|s| s[1]).collect();
        let v: Vec<f64> = w.iter().map(|s| s[2]).collect();
        Some(divergence_residual(&u, &v, g.ni, g.nj, m.mach)?)
    } else {
        None
    };
    let centerline_rms = if d.centerline && cavity && m.reynolds == Some(400.0) {
        let prof = extract_centerline(field, &m.gas, CenterlineAxis::UAlongY, m.mach)?;
        Some(profile_rms(&prof, &cavity_reference_re400()))
    } else {
        None
    };
    let density_l1 = if m.case == CaseId::Sod { Some(sod_profile(m, field)?.1) } else { None };
    Ok(CaseSummary {
        case: m.case.to_string(),
        dissipation: m.scheme.dissipation.to_string(),
        central: m.scheme.central.to_string(),
        mach: m.mach,
        iterations,
        converged,
        final_residual,
        time: field.time(),
        ind_p: if d.ind_p { Some(ind_p(&p)?) } else { None },
        checkerboard: if d.checkerboard && two_d { Some(checkerboard_metric(&p, g.ni, g.nj)?) } else { None },
        divergence,
        centerline_rms,
        density_l1,
    })
}

/// Computed and exact shock-tube profiles `x, rho, u, p, rho_e, u_e, p_e`
/// and the L1 density error.
pub fn sod_profile(m: &CaseManifest, field: &StructuredField) -> Result<(Vec<[f64; 7]>, f64)> {
    let crate::cases::InitialCondition::Jump { x0, left, right } = m.initial else {
        return Err(Error::Config("shock-tube profile needs a jump initial condition".into()));
    };
    let exact = RiemannExact::solve(
        Primitive1d::new(left[0], left[1], left[3]),
        Primitive1d::new(right[0], right[1], right[3]),
        m.gas.gamma,
    )?;
    let g = field.grid();
    let w = field.interior_primitives(&m.gas);
    let xs: Vec<f64> = (0..g.ni).map(|i| g.center(i as isize, 0)[0]).collect();
    let ex = exact.profile(&xs, x0, field.time());
    let rows: Vec<[f64; 7]> = (0..g.ni)
        .map(|i| [xs[i], w[i][0], w[i][1], w[i][3], ex[i].rho, ex[i].u, ex[i].p])
        .collect();
    let rho: Vec<f64> = rows.iter().map(|r| r[1]).collect();
    let rho_e: Vec<f64> = rows.iter().map(|r| r[4]).collect();
    Ok((rows, l1_error(&xs, &rho, &rho_e)))
}

/// Body-ring pressure `theta, p, pbar` with `theta` measured from the
/// upstream stagnation point, sorted by angle; `pbar` is normalised over
/// the ring.
pub fn surface_pressure(m: &CaseManifest, field: &StructuredField) -> Vec<[f64; 3]> {
    let g = field.grid();
    let w = field.interior_primitives(&m.gas);
    let p: Vec<f64> = (0..g.ni).map(|i| w[i][3]).collect();
    let pbar = output::nondimensional_pressure(&p);
    let mut rows: Vec<[f64; 3]> = (0..g.ni)
        .map(|i| {
            let [x, y] = g.center(i as isize, 0);
            let theta = y.atan2(-x).rem_euclid(std::f64::consts::TAU);
            [theta, p[i], pbar[i]]
        })
        .collect();
    rows.sort_by(|a, b| a[0].total_cmp(&b[0]));
    rows
}

/// Rebuilds a field on `grid` from a dumped CSV.
pub fn restore_field(m: &CaseManifest, grid: Arc<StructuredGrid>, rows: &[FieldRow]) -> Result<StructuredField> {
    if rows.len() != grid.ni * grid.nj {
        return Err(Error::InvalidState(format!(
            "field dump has {} cells, grid has {}",
            rows.len(),
            grid.ni * grid.nj
        )));
    }
    let mut f = m.initial_field(grid)?;
    for r in rows {
        let q = m.gas.primitive_to_conservative(r.rho, r.u, r.v, r.p)?;
        f.set_conserved(r.i as isize, r.j as isize, q);
    }
    Ok(f)
}

fn write_case_outputs(cfg: &RunConfig, dir: &Path, sol: &Solution) -> Result<()> {
    let m = &cfg.manifest;
    for fmt in &cfg.formats {
        let name = match fmt {
            FieldFormat::Csv => "field.csv",
            FieldFormat::Plot => "field.plot",
        };
        emit_field(&sol.field, &m.gas, &dir.join(name), *fmt)?;
    }
    output::write_text(&dir.join("residuals.csv"), &output::residual_csv(sol.field.residuals(), m.run.output_every))?;
    if m.case == CaseId::Sod {
        let (rows, _) = sod_profile(m, &sol.field)?;
        let text = output::table_csv("x,rho,u,p,rho_exact,u_exact,p_exact", rows.iter().map(|r| r.to_vec()));
        output::write_text(&dir.join("profile.csv"), &text)?;
    }
    if m.case == CaseId::Cylinder {
        let text = output::table_csv("theta,p,pbar", surface_pressure(m, &sol.field).into_iter().map(|r| r.to_vec()));
        output::write_text(&dir.join("surface.csv"), &text)?;
    }
    if cfg.diagnostics.centerline && m.case == CaseId::Cavity {
        let prof = extract_centerline(&sol.field, &m.gas, CenterlineAxis::UAlongY, m.mach)?;
        let text = output::table_csv("y,u", prof.iter().map(|&(y, u)| vec![y, u]));
        output::write_text(&dir.join("centerline.csv"), &text)?;
    }
    Ok(())
}

fn write_json(path: &Path, s: &RunSummary) -> Result<()> {
    let text = serde_json::to_string_pretty(s).map_err(|e| Error::Io(e.to_string()))?;
    output::write_text(path, &(text + "\n"))
}

/// Executes a configuration and writes all files into its output
/// directory. A blow-up is returned as an error after nothing is written.
pub fn run(cfg: &RunConfig, log: &mut dyn FnMut(&str)) -> Result<RunSummary> {
    let dir = PathBuf::from(&cfg.output_dir);
    std::fs::create_dir_all(&dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    let summary = match &cfg.sweep {
        None => {
            let sol = solve(&cfg.manifest, &cfg.diagnostics)?;
            log(&describe(&sol.summary));
            write_case_outputs(cfg, &dir, &sol)?;
            RunSummary::Single(sol.summary)
        }
        Some(list) => {
            let grid = cfg.manifest.build_grid()?;
            let diag = DiagnosticToggles {
                ind_p: true,
                ..cfg.diagnostics
            };
            let mut points = Vec::new();
            for &mach in list {
                let m = cfg.manifest.at_mach(mach)?;
                m.validate()?;
                let sol = solve_on(&m, grid.clone(), &diag)?;
                log(&describe(&sol.summary));
                points.push(sol.summary);
            }
            let series = ScalingSeries {
                points: points.iter().map(|p| (p.mach, p.ind_p.unwrap_or(f64::NAN))).collect(),
            };
            let table = output::table_csv("mach,ind_p", series.points.iter().map(|&(m, i)| vec![m, i]));
            output::write_text(&dir.join("scaling.csv"), &table)?;
            let slope = fit_scaling_slope(&series).ok();
            if let Some(s) = slope {
                log(&format!("ind_p slope {s:.4}"));
            }
            RunSummary::Sweep(SweepSummary { points, slope })
        }
    };
    write_json(&dir.join("summary.json"), &summary)?;
    Ok(summary)
}

fn describe(s: &CaseSummary) -> String {
    let mut t = format!(
        "{} {}/{} M={} iterations={} residual={:.3e}",
        s.case, s.dissipation, s.central, s.mach, s.iterations, s.final_residual
    );
    if !s.converged {
        t.push_str(" (not converged)");
    }
    for (name, v) in [
        ("ind_p", s.ind_p),
        ("checkerboard", s.checkerboard),
        ("divergence", s.divergence),
        ("centerline_rms", s.centerline_rms),
        ("density_l1", s.density_l1),
    ] {
        if let Some(v) = v {
            t.push_str(&format!(" {name}={v:.4e}"));
        }
    }
    t
}
