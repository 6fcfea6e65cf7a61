//! Explicit finite-volume time marching on a structured grid.
//!
//! Each step refreshes the ghost layers, assembles face fluxes (inviscid
//! interface flux minus the laminar viscous flux) into per-cell residuals,
//! and advances with forward Euler or a three-stage SSP Runge-Kutta scheme.

pub mod boundary;
pub mod reconstruct;
pub mod viscous;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use boundary::{apply_boundaries, BoundaryCondition, BoundarySpec, Edge};

use crate::error::{Error, Result};
use crate::gas::{Conserved, FaceGeometry, FlowState, GasModel};
use crate::mesh::{polygon_gradient, StructuredGrid};
use crate::schemes::cutoff::{pseudo_sound_speed, theta_global};
use crate::schemes::{coefficients, interface_flux, Central, FaceHistory, SchemeConfig};
use viscous::{diamond_gradients, viscous_face_flux, ViscousPoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TimeStepping {
    /// One step size for every cell (time accurate).
    Global,
    /// Each cell advances at its own stable step (steady runs only).
    Local,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Integrator {
    ForwardEuler,
    Ssp3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Reconstruction {
    FirstOrder,
    Muscl,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverSettings {
    pub cfl: f64,
    pub time_stepping: TimeStepping,
    pub integrator: Integrator,
    pub reconstruction: Reconstruction,
    /// Low-Mach preconditioning of the pseudo-time derivative for steady
    /// runs; the converged state is unaffected.
    pub preconditioned: bool,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            cfl: 0.8,
            time_stepping: TimeStepping::Global,
            integrator: Integrator::ForwardEuler,
            reconstruction: Reconstruction::FirstOrder,
            preconditioned: false,
        }
    }
}

/// Everything a step needs besides the field itself.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub gas: GasModel,
    pub scheme: SchemeConfig,
    pub boundaries: BoundarySpec,
    pub settings: SolverSettings,
}

impl SolverConfig {
    pub fn validate(&self, grid: &StructuredGrid) -> Result<()> {
        self.gas.validate()?;
        self.scheme.validate()?;
        self.boundaries.validate(grid)?;
        if !(self.settings.cfl > 0.0) {
            return Err(Error::Config(format!("cfl must be positive, got {}", self.settings.cfl)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualRecord {
    pub iteration: usize,
    /// RMS over interior cells of the density time derivative.
    pub residual: f64,
    /// Global step; the smallest cell step under local time stepping.
    pub dt: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyOutcome {
    pub converged: bool,
    pub iterations: usize,
    pub final_residual: f64,
}

#[derive(Debug, Clone, Copy)]
struct Face {
    l: usize,
    r: usize,
    ll: usize,
    rr: usize,
    geom: FaceGeometry,
    /// Interior node-lattice indices of the two face end points.
    na: usize,
    nb: usize,
    pa: [f64; 2],
    pb: [f64; 2],
    l_interior: bool,
    r_interior: bool,
    /// Boundary edge the face lies on, if any.
    edge: Option<Edge>,
}

/// Pressure gradient over density at the previous time level.
#[derive(Debug, Clone, Default)]
struct PressureHistory {
    cell: Vec<[f64; 2]>,
    face: Vec<[f64; 2]>,
    /// Step size per cell used to reach the current level.
    dt: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct StructuredField {
    grid: Arc<StructuredGrid>,
    q: Vec<Conserved>,
    history: PressureHistory,
    pending: PressureHistory,
    iteration: usize,
    time: f64,
    residuals: Vec<ResidualRecord>,
    faces: Vec<Face>,
    interior: Vec<usize>,
    prim: Vec<[f64; 4]>,
    states: Vec<FlowState>,
    nodes: Vec<[f64; 4]>,
    rhs: Vec<Conserved>,
    dt_cell: Vec<f64>,
    q0: Vec<Conserved>,
}

fn is_wall(bc: BoundaryCondition) -> bool {
    matches!(
        bc,
        BoundaryCondition::NoSlipWall | BoundaryCondition::MovingLid { .. } | BoundaryCondition::SlipWall
    )
}

impl StructuredField {
    /// Field initialised cell by cell from primitives `(rho, u, v, p)` at the
    /// cell centre.
    pub fn from_fn(
        grid: Arc<StructuredGrid>,
        gas: &GasModel,
        init: impl Fn(f64, f64) -> [f64; 4],
    ) -> Result<Self> {
        let n = grid.ext_ni() * grid.ext_nj();
        let mut q = vec![[0.0; 4]; n];
        let mut interior = Vec::with_capacity(grid.ni * grid.nj);
        for j in 0..grid.nj as isize {
            for i in 0..grid.ni as isize {
                let c = grid.cell(i, j);
                let [x, y] = grid.center(i, j);
                let [rho, u, v, p] = init(x, y);
                q[c] = gas.primitive_to_conservative(rho, u, v, p)?;
                interior.push(c);
            }
        }
        let nodes = (grid.ni + 1) * (grid.nj + 1);
        let mut field = Self {
            faces: Vec::new(),
            interior,
            prim: vec![[0.0; 4]; n],
            states: vec![gas.state(1.0, 0.0, 0.0, 1.0); n],
            nodes: vec![[0.0; 4]; nodes],
            rhs: vec![[0.0; 4]; n],
            dt_cell: vec![0.0; n],
            q0: Vec::new(),
            history: PressureHistory::default(),
            pending: PressureHistory::default(),
            iteration: 0,
            time: 0.0,
            residuals: Vec::new(),
            q,
            grid,
        };
        field.faces = field.build_faces();
        field.history = PressureHistory {
            cell: vec![[0.0; 2]; n],
            face: vec![[0.0; 2]; field.faces.len()],
            dt: vec![0.0; n],
        };
        field.pending = field.history.clone();
        Ok(field)
    }

    pub fn uniform(grid: Arc<StructuredGrid>, gas: &GasModel, rho: f64, u: f64, v: f64, p: f64) -> Result<Self> {
        Self::from_fn(grid, gas, |_, _| [rho, u, v, p])
    }

    fn build_faces(&self) -> Vec<Face> {
        let g = &self.grid;
        let (ni, nj) = (g.ni as isize, g.nj as isize);
        let nidx = |i: isize, j: isize| (i + j * (ni + 1)) as usize;
        let inside = |i: isize, j: isize| i >= 0 && i < ni && j >= 0 && j < nj;
        let edge = |k: isize, n: isize, lo: Edge, hi: Edge| {
            if k == 0 {
                Some(lo)
            } else if k == n {
                Some(hi)
            } else {
                None
            }
        };
        let mut faces = Vec::new();
        for j in 0..nj {
            for i in 0..=ni {
                faces.push(Face {
                    l: g.cell(i - 1, j),
                    r: g.cell(i, j),
                    ll: g.cell(i - 2, j),
                    rr: g.cell(i + 1, j),
                    geom: g.iface(i, j),
                    na: nidx(i, j),
                    nb: nidx(i, j + 1),
                    pa: g.node(i, j),
                    pb: g.node(i, j + 1),
                    l_interior: inside(i - 1, j),
                    r_interior: inside(i, j),
                    edge: edge(i, ni, Edge::IMin, Edge::IMax),
                });
            }
        }
        if !g.is_one_dimensional() {
            for j in 0..=nj {
                for i in 0..ni {
                    faces.push(Face {
                        l: g.cell(i, j - 1),
                        r: g.cell(i, j),
                        ll: g.cell(i, j - 2),
                        rr: g.cell(i, j + 1),
                        geom: g.jface(i, j),
                        // j-face nodes ordered so that (L, a, R, b) is a loop
                        na: nidx(i + 1, j),
                        nb: nidx(i, j),
                        pa: g.node(i + 1, j),
                        pb: g.node(i, j),
                        l_interior: inside(i, j - 1),
                        r_interior: inside(i, j),
                        edge: edge(j, nj, Edge::JMin, Edge::JMax),
                    });
                }
            }
        }
        faces
    }

    pub fn grid(&self) -> &StructuredGrid {
        &self.grid
    }

    pub fn grid_arc(&self) -> Arc<StructuredGrid> {
        Arc::clone(&self.grid)
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn residuals(&self) -> &[ResidualRecord] {
        &self.residuals
    }

    /// Ghost-extended conservative states.
    pub fn conserved_states(&self) -> &[Conserved] {
        &self.q
    }

    pub fn conserved(&self, i: isize, j: isize) -> Conserved {
        self.q[self.grid.cell(i, j)]
    }

    pub fn set_conserved(&mut self, i: isize, j: isize, q: Conserved) {
        let c = self.grid.cell(i, j);
        self.q[c] = q;
    }

    pub fn state(&self, gas: &GasModel, i: isize, j: isize) -> Result<FlowState> {
        gas.conservative_to_primitive(&self.conserved(i, j))
    }

    /// Interior primitives `(rho, u, v, p)`, row-major with `i` fastest.
    pub fn interior_primitives(&self, gas: &GasModel) -> Vec<[f64; 4]> {
        self.interior
            .iter()
            .map(|&c| {
                let q = &self.q[c];
                let u = q[1] / q[0];
                let v = q[2] / q[0];
                [q[0], u, v, (gas.gamma - 1.0) * (q[3] - 0.5 * q[0] * (u * u + v * v))]
            })
            .collect()
    }

    /// Volume-weighted sum of each conserved variable over the interior.
    pub fn totals(&self) -> Conserved {
        let mut t = [0.0; 4];
        for &c in &self.interior {
            let vol = self.grid.volume_at(c);
            for k in 0..4 {
                t[k] += self.q[c][k] * vol;
            }
        }
        t
    }

    /// Clears iteration count, time, residual history and the pressure
    /// history; the state is kept.
    pub fn reset_history(&mut self) {
        self.iteration = 0;
        self.time = 0.0;
        self.residuals.clear();
        self.history.cell.iter_mut().for_each(|g| *g = [0.0; 2]);
        self.history.face.iter_mut().for_each(|g| *g = [0.0; 2]);
        self.history.dt.iter_mut().for_each(|d| *d = 0.0);
        self.pending = self.history.clone();
    }

    /// Refreshes ghosts and primitive tables; fails on an invalid interior.
    fn prepare(&mut self, cfg: &SolverConfig) -> Result<()> {
        apply_boundaries(&cfg.gas, &self.grid, &mut self.q, &cfg.boundaries);
        let gm1 = cfg.gas.gamma - 1.0;
        for (c, q) in self.q.iter().enumerate() {
            let rho = q[0];
            let u = q[1] / rho;
            let v = q[2] / rho;
            let p = gm1 * (q[3] - 0.5 * rho * (u * u + v * v));
            self.prim[c] = [rho, u, v, p];
        }
        for &c in &self.interior {
            let [rho, u, v, p] = self.prim[c];
            if !(rho > 0.0) || !(p > 0.0) || !u.is_finite() || !v.is_finite() {
                let (i, j) = self.grid.cell_coords(c);
                return Err(Error::BlowUp {
                    iteration: self.iteration + 1,
                    i: i as usize,
                    j: j as usize,
                    reason: format!("rho = {rho:e}, p = {p:e}, u = {u:e}, v = {v:e}"),
                });
            }
        }
        for (c, w) in self.prim.iter().enumerate() {
            let [rho, u, v, p] = *w;
            if rho > 0.0 && p > 0.0 {
                self.states[c] = cfg.gas.state(rho, u, v, p);
            }
        }
        Ok(())
    }

    fn fill_nodes(&mut self) {
        let g = &self.grid;
        let (ni, nj) = (g.ni as isize, g.nj as isize);
        for j in 0..=nj {
            for i in 0..=ni {
                let mut acc = [0.0; 4];
                for c in [g.cell(i - 1, j - 1), g.cell(i, j - 1), g.cell(i - 1, j), g.cell(i, j)] {
                    let [rho, u, v, p] = self.prim[c];
                    acc[0] += u;
                    acc[1] += v;
                    acc[2] += p / rho;
                    acc[3] += p;
                }
                self.nodes[(i + j * (ni + 1)) as usize] = acc.map(|a| 0.25 * a);
            }
        }
    }

    /// Pressure gradients of the current level, stored for the next step.
    fn record_pressure_gradients(&mut self) {
        let g = Arc::clone(&self.grid);
        let (ni, nj) = (g.ni as isize, g.nj as isize);
        let p = |i: isize, j: isize| self.prim[g.cell(i, j)][3];
        for j in -1..=nj {
            for i in -1..=ni {
                let c = g.cell(i, j);
                let pc = self.prim[c][3];
                let mut grad = [0.0; 2];
                let faces = [
                    (g.iface(i + 1, j), p(i + 1, j), 1.0),
                    (g.iface(i, j), p(i - 1, j), -1.0),
                    (g.jface(i, j + 1), p(i, j + 1), 1.0),
                    (g.jface(i, j), p(i, j - 1), -1.0),
                ];
                for (f, pn, sign) in faces {
                    let pf = 0.5 * (pc + pn);
                    grad[0] += sign * pf * f.nx * f.len;
                    grad[1] += sign * pf * f.ny * f.len;
                }
                let s = 1.0 / (g.volume_at(c) * self.prim[c][0]);
                self.pending.cell[c] = [grad[0] * s, grad[1] * s];
            }
        }
        for (k, f) in self.faces.iter().enumerate() {
            let pts = [g.center_at(f.l), f.pa, g.center_at(f.r), f.pb];
            let vals = [self.prim[f.l][3], self.nodes[f.na][3], self.prim[f.r][3], self.nodes[f.nb][3]];
            let gp = polygon_gradient(&pts, &vals);
            let rho_f = 0.5 * (self.prim[f.l][0] + self.prim[f.r][0]);
            self.pending.face[k] = [gp[0] / rho_f, gp[1] / rho_f];
        }
    }

    /// Largest signal speed of the discrete operator along unit normal
    /// `(nx, ny)`: the acoustic speed, or the speed implied by the
    /// dissipation coefficients when these are stiffer. `theta` scales the
    /// pressure equation under pseudo-time preconditioning.
    fn signal_speed(s: &FlowState, nx: f64, ny: f64, cfg: &SchemeConfig, theta: f64) -> f64 {
        let un = s.u * nx + s.v * ny;
        let au = un.abs();
        let k = coefficients(s, un, cfg);
        let rc2 = s.rho * s.c * s.c;
        let mut du_dp = k.du_dp.abs();
        if cfg.central == Central::MimPressure {
            // enters the mass flux without the one-half of the dissipation
            du_dp += 2.0 * cfg.c2 / (cfg.rho_star * cfg.u_star);
        }
        let acoustic = 0.5 * (1.0 + theta) * au + pseudo_sound_speed(s.c, un, theta);
        let a = theta * (au + rc2 * du_dp);
        let b = theta * rc2 * k.du_du.abs();
        let c = k.dp_dp.abs() / s.rho;
        let d = au + k.dp_du.abs() / s.rho;
        let tr = 0.5 * (a + d);
        let disc = (0.25 * (a - d) * (a - d) + b * c).sqrt();
        (tr + disc).max(acoustic)
    }

    fn preconditioning_theta(s: &FlowState, cfg: &SolverConfig) -> f64 {
        if cfg.settings.preconditioned {
            theta_global(s.mach, cfg.scheme.m_ref, cfg.scheme.k)
        } else {
            1.0
        }
    }

    /// Fills per-cell stable steps and returns the global minimum.
    pub fn compute_dt(&mut self, cfg: &SolverConfig) -> Result<f64> {
        self.prepare(cfg)?;
        Ok(self.cell_steps(cfg))
    }

    fn cell_steps(&mut self, cfg: &SolverConfig) -> f64 {
        let g = Arc::clone(&self.grid);
        let one_d = g.is_one_dimensional();
        let cfl = cfg.settings.cfl;
        let mu = cfg.gas.mu;
        let mut dt_min = f64::INFINITY;
        for &c in &self.interior {
            let (i, j) = g.cell_coords(c);
            let s = &self.states[c];
            let theta = Self::preconditioning_theta(s, cfg);
            let vol = g.volume_at(c);
            let mut lam = 0.0;
            // time-marching smoothing acts like a pressure diffusion whose
            // strength grows with the step itself
            let mut march = 0.0;
            let dirs = [(g.iface(i, j), g.iface(i + 1, j)), (g.jface(i, j), g.jface(i, j + 1))];
            for &(a, b) in &dirs[..if one_d { 1 } else { 2 }] {
                let ax = 0.5 * (a.nx * a.len + b.nx * b.len);
                let ay = 0.5 * (a.ny * a.len + b.ny * b.len);
                let len = ax.hypot(ay);
                lam += Self::signal_speed(s, ax / len, ay / len, &cfg.scheme, theta) * len;
                march += 2.0 * theta * s.c * s.c * len * len / vol;
            }
            let mut dt = if cfg.scheme.central != Central::MimMarch {
                cfl * vol / lam
            } else if let Some(dt_mim) = cfg.scheme.dt_mim {
                cfl * vol / (lam + march * dt_mim)
            } else {
                // dt * (lam + march * dt) = cfl * vol
                2.0 * cfl * vol / (lam + (lam * lam + 4.0 * march * cfl * vol).sqrt())
            };
            if mu > 0.0 {
                let d = if one_d { g.volume_at(c) / g.iface(i, j).len } else { g.min_width(i, j) };
                dt = dt.min(cfl * 0.5 * s.rho * d * d / mu);
            }
            self.dt_cell[c] = dt;
            dt_min = dt_min.min(dt);
        }
        if cfg.settings.time_stepping == TimeStepping::Global {
            for &c in &self.interior {
                self.dt_cell[c] = dt_min;
            }
        }
        dt_min
    }

    /// Net flux out of every cell, summed over faces; expects `prepare`.
    fn assemble(&mut self, cfg: &SolverConfig, with_history: bool) -> Result<()> {
        self.assemble_fluxes(cfg, with_history)?;
        if cfg.settings.preconditioned {
            self.precondition_rhs(cfg);
        }
        Ok(())
    }

    fn assemble_fluxes(&mut self, cfg: &SolverConfig, with_history: bool) -> Result<()> {
        let gas = &cfg.gas;
        let scheme = &cfg.scheme;
        let viscous = gas.mu > 0.0;
        if viscous || with_history {
            self.fill_nodes();
        }
        self.rhs.iter_mut().for_each(|r| *r = [0.0; 4]);
        let muscl = cfg.settings.reconstruction == Reconstruction::Muscl;
        let march = scheme.central == Central::MimMarch;
        let wall_scheme = SchemeConfig { central: Central::MimZero, ..*scheme };
        for (k, f) in self.faces.iter().enumerate() {
            let wall = f.edge.is_some_and(|e| is_wall(cfg.boundaries.get(e)));
            let reconstructed;
            let (sl, sr) = if muscl {
                let (wl, wr) = reconstruct::face_states(&self.prim[f.ll], &self.prim[f.l], &self.prim[f.r], &self.prim[f.rr]);
                if wl[0] > 0.0 && wl[3] > 0.0 && wr[0] > 0.0 && wr[3] > 0.0 {
                    reconstructed = (gas.state(wl[0], wl[1], wl[2], wl[3]), gas.state(wr[0], wr[1], wr[2], wr[3]));
                    (&reconstructed.0, &reconstructed.1)
                } else {
                    (&self.states[f.l], &self.states[f.r])
                }
            } else {
                (&self.states[f.l], &self.states[f.r])
            };
            let face_cfg = if wall && scheme.central != Central::PlainAverage { &wall_scheme } else { scheme };
            let history = if march && !wall {
                let h = &self.history;
                let dt = match (f.l_interior, f.r_interior) {
                    (true, true) => 0.5 * (h.dt[f.l] + h.dt[f.r]),
                    (true, false) => h.dt[f.l],
                    _ => h.dt[f.r],
                };
                Some(FaceHistory { cell_left: h.cell[f.l], cell_right: h.cell[f.r], face: h.face[k], dt })
            } else {
                None
            };
            let mut flux = interface_flux(gas, sl, sr, &f.geom, face_cfg, history.as_ref())?;
            if viscous {
                let point = |c: usize| {
                    let [rho, u, v, p] = self.prim[c];
                    ViscousPoint { u, v, t: p / rho }
                };
                let node = |n: usize| {
                    let [u, v, t, _] = self.nodes[n];
                    ViscousPoint { u, v, t }
                };
                let (pl, pr) = (point(f.l), point(f.r));
                let pos = [self.grid.center_at(f.l), f.pa, self.grid.center_at(f.r), f.pb];
                let (gu, gv, gt) = diamond_gradients(pos, [pl, node(f.na), pr, node(f.nb)]);
                let mid = ViscousPoint { u: 0.5 * (pl.u + pr.u), v: 0.5 * (pl.v + pr.v), t: 0.5 * (pl.t + pr.t) };
                let fv = viscous_face_flux(gas, &f.geom, mid, gu, gv, gt);
                for m in 0..4 {
                    flux[m] -= fv[m];
                }
            }
            let len = f.geom.len;
            for m in 0..4 {
                let v = flux[m] * len;
                self.rhs[f.l][m] += v;
                self.rhs[f.r][m] -= v;
            }
        }
        Ok(())
    }

    /// Largest change of any conserved component over the last step.
    fn last_update(&self) -> f64 {
        self.interior
            .iter()
            .flat_map(|&c| (0..4).map(move |m| (self.q[c][m] - self.q0[c][m]).abs()))
            .fold(0.0, f64::max)
    }

    fn density_residual(&self) -> f64 {
        let sum: f64 = self
            .interior
            .iter()
            .map(|&c| {
                let r = self.rhs[c][0] / self.grid.volume_at(c);
                r * r
            })
            .sum();
        (sum / self.interior.len() as f64).sqrt()
    }

    /// Scales the pressure part of every interior residual by `theta`,
    /// holding velocity and entropy changes fixed.
    fn precondition_rhs(&mut self, cfg: &SolverConfig) {
        let gm1 = cfg.gas.gamma - 1.0;
        for &c in &self.interior {
            let s = &self.states[c];
            let theta = Self::preconditioning_theta(s, cfg);
            if theta >= 1.0 {
                continue;
            }
            let r = &mut self.rhs[c];
            let dp = gm1 * (r[3] - s.u * r[1] - s.v * r[2] + 0.5 * (s.u * s.u + s.v * s.v) * r[0]);
            let w = (theta - 1.0) * dp / (s.c * s.c);
            r[0] += w;
            r[1] += w * s.u;
            r[2] += w * s.v;
            r[3] += w * s.h;
        }
    }

    /// `q[c] = a * q0[c] + b * (q[c] - dt_c / vol_c * rhs[c])` over the interior.
    fn update(&mut self, a: f64, b: f64) {
        for &c in &self.interior {
            let s = self.dt_cell[c] / self.grid.volume_at(c);
            let q0 = self.q0[c];
            let q = &mut self.q[c];
            for m in 0..4 {
                q[m] = a * q0[m] + b * (q[m] - s * self.rhs[c][m]);
            }
        }
    }

    /// Advances one step; on failure the field keeps its previous state.
    pub fn step(&mut self, cfg: &SolverConfig) -> Result<ResidualRecord> {
        self.prepare(cfg)?;
        let dt = self.cell_steps(cfg);
        let march = cfg.scheme.central == Central::MimMarch;
        self.assemble_fluxes(cfg, march)?;
        if march {
            self.record_pressure_gradients();
        }
        let residual = self.density_residual();
        if cfg.settings.preconditioned {
            self.precondition_rhs(cfg);
        }
        if !residual.is_finite() {
            let c = self.interior.iter().copied().find(|&c| !self.rhs[c].iter().all(|x| x.is_finite())).unwrap_or(self.interior[0]);
            let (i, j) = self.grid.cell_coords(c);
            return Err(Error::BlowUp {
                iteration: self.iteration + 1,
                i: i as usize,
                j: j as usize,
                reason: "non-finite flux balance".into(),
            });
        }
        self.q0.clone_from(&self.q);
        let result = self.advance(cfg);
        if let Err(e) = result {
            self.q.clone_from(&self.q0);
            return Err(e);
        }
        if march {
            // gradients of the level just left become the next step's history
            for &c in &self.interior {
                self.pending.dt[c] = self.dt_cell[c];
            }
            std::mem::swap(&mut self.history, &mut self.pending);
        }
        self.iteration += 1;
        self.time += dt;
        let rec = ResidualRecord { iteration: self.iteration, residual, dt };
        self.residuals.push(rec);
        Ok(rec)
    }

    fn advance(&mut self, cfg: &SolverConfig) -> Result<()> {
        match cfg.settings.integrator {
            Integrator::ForwardEuler => {
                self.update(0.0, 1.0);
                self.check_interior()
            }
            Integrator::Ssp3 => {
                self.update(0.0, 1.0);
                self.prepare(cfg)?;
                self.assemble(cfg, false)?;
                self.update(0.75, 0.25);
                self.prepare(cfg)?;
                self.assemble(cfg, false)?;
                self.update(1.0 / 3.0, 2.0 / 3.0);
                self.check_interior()
            }
        }
    }

    fn check_interior(&self) -> Result<()> {
        for &c in &self.interior {
            let q = &self.q[c];
            let rho = q[0];
            let ke = 0.5 * (q[1] * q[1] + q[2] * q[2]) / rho;
            if !(rho > 0.0) || !(q[3] - ke > 0.0) || !q.iter().all(|x| x.is_finite()) {
                let (i, j) = self.grid.cell_coords(c);
                return Err(Error::BlowUp {
                    iteration: self.iteration + 1,
                    i: i as usize,
                    j: j as usize,
                    reason: format!("invalid state {q:?}"),
                });
            }
        }
        Ok(())
    }

    /// Steps until the residual falls to `tol` times its peak so far (or the
    /// residual and the whole-state update both fall below 1e-12), or
    /// `max_iter` steps have run.
    pub fn run_steady(&mut self, cfg: &SolverConfig, tol: f64, max_iter: usize) -> Result<SteadyOutcome> {
        self.run_steady_with(cfg, tol, max_iter, |_| {})
    }

    pub fn run_steady_with(
        &mut self,
        cfg: &SolverConfig,
        tol: f64,
        max_iter: usize,
        mut monitor: impl FnMut(&ResidualRecord),
    ) -> Result<SteadyOutcome> {
        if !(tol > 0.0) {
            return Err(Error::Config(format!("tolerance must be positive, got {tol}")));
        }
        cfg.validate(&self.grid)?;
        let mut peak = 0.0f64;
        let mut last = f64::NAN;
        for n in 1..=max_iter {
            let rec = self.step(cfg)?;
            monitor(&rec);
            last = rec.residual;
            peak = peak.max(rec.residual);
            let still = rec.residual < 1e-12 && self.last_update() < 1e-12;
            if still || (rec.residual > 0.0 && rec.residual <= tol * peak) {
                return Ok(SteadyOutcome { converged: true, iterations: n, final_residual: last });
            }
        }
        Ok(SteadyOutcome { converged: false, iterations: max_iter, final_residual: last })
    }

    /// Time-accurate march to `t_final` with global steps, shortening the
    /// last one to land exactly. Returns the number of steps taken.
    pub fn run_until(&mut self, cfg: &SolverConfig, t_final: f64, max_iter: usize) -> Result<usize> {
        cfg.validate(&self.grid)?;
        if cfg.settings.time_stepping != TimeStepping::Global || cfg.settings.preconditioned {
            return Err(Error::Config(
                "time-accurate runs need global, unpreconditioned time stepping".into(),
            ));
        }
        let mut n = 0;
        while self.time < t_final * (1.0 - 1e-14) {
            if n >= max_iter {
                return Err(Error::Numerical(format!(
                    "t_final = {t_final} not reached within {max_iter} steps (t = {})",
                    self.time
                )));
            }
            let remaining = t_final - self.time;
            let dt = self.compute_dt(cfg)?;
            let mut c = *cfg;
            if dt > remaining {
                c.settings.cfl *= remaining / dt;
            }
            self.step(&c)?;
            n += 1;
        }
        self.time = self.time.max(t_final);
        Ok(n)
    }

    /// Stable global step of the current state.
    pub fn stable_dt(&mut self, cfg: &SolverConfig) -> Result<f64> {
        self.compute_dt(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schemes::Dissipation;

    fn config(gas: GasModel, bc: BoundaryCondition) -> SolverConfig {
        SolverConfig {
            gas,
            scheme: SchemeConfig::default(),
            boundaries: BoundarySpec::uniform(bc),
            settings: SolverSettings::default(),
        }
    }

    #[test]
    fn one_dimensional_step_size() {
        let gas = GasModel::inviscid();
        let grid = Arc::new(StructuredGrid::cartesian(100, 1, 1.0, 0.01).unwrap());
        // rest gas with c = 1
        let mut f = StructuredField::uniform(grid, &gas, 1.0, 0.0, 0.0, 1.0 / 1.4).unwrap();
        let dt = f.compute_dt(&config(gas, BoundaryCondition::SlipWall)).unwrap();
        assert!((dt - 0.008).abs() < 1e-15, "{dt}");
    }

    #[test]
    fn cavity_step_size() {
        let gas = GasModel::inviscid();
        let grid = Arc::new(StructuredGrid::cartesian(160, 160, 1.0, 1.0).unwrap());
        let mut f = StructuredField::uniform(grid, &gas, 1.0, 0.0, 0.0, 1.0 / 1.4).unwrap();
        let dt = f.compute_dt(&config(gas, BoundaryCondition::NoSlipWall)).unwrap();
        assert!((dt - 2.5e-3).abs() < 1e-13, "{dt}");
    }

    #[test]
    fn doubling_resolution_halves_step() {
        let gas = GasModel::inviscid();
        let cfg = config(gas, BoundaryCondition::SlipWall);
        let dt = |n| {
            let grid = Arc::new(StructuredGrid::cartesian(n, 1, 1.0, 0.01).unwrap());
            let mut f = StructuredField::uniform(grid, &gas, 1.0, 0.3, 0.0, 1.0 / 1.4).unwrap();
            f.compute_dt(&cfg).unwrap()
        };
        assert!((dt(50) - 2.0 * dt(100)).abs() < 1e-15);
    }

    #[test]
    fn mass_is_conserved_on_first_sod_step() {
        let gas = GasModel::inviscid();
        let grid = Arc::new(StructuredGrid::cartesian(200, 1, 1.0, 0.005).unwrap());
        let mut f = StructuredField::from_fn(grid, &gas, |x, _| {
            if x < 0.5 { [1.0, 0.0, 0.0, 1.0] } else { [0.125, 0.0, 0.0, 0.1] }
        })
        .unwrap();
        let cfg = config(gas, BoundaryCondition::SlipWall);
        let before = f.totals();
        f.step(&cfg).unwrap();
        let after = f.totals();
        assert!((after[0] - before[0]).abs() <= 1e-13 * before[0]);
        assert!((after[3] - before[3]).abs() <= 1e-13 * before[3]);
    }

    #[test]
    fn uniform_flow_exits_at_first_iteration() {
        let gas = GasModel::inviscid();
        let grid = Arc::new(StructuredGrid::cartesian(8, 8, 1.0, 1.0).unwrap());
        let ff = BoundaryCondition::FarField { rho: 1.0, u: 0.1, v: 0.05, p: 1.0 / 1.4 };
        let mut f = StructuredField::uniform(grid, &gas, 1.0, 0.1, 0.05, 1.0 / 1.4).unwrap();
        let out = f.run_steady(&config(gas, ff), 1e-5, 50).unwrap();
        assert!(out.converged);
        assert_eq!(out.iterations, 1);
    }

    #[test]
    fn blow_up_reports_cell_and_keeps_state() {
        let gas = GasModel::inviscid();
        let grid = Arc::new(StructuredGrid::cartesian(8, 8, 1.0, 1.0).unwrap());
        let mut f = StructuredField::uniform(grid, &gas, 1.0, 0.0, 0.0, 1.0 / 1.4).unwrap();
        f.set_conserved(3, 5, [1.0, 0.0, 0.0, -1.0]);
        let err = f.step(&config(gas, BoundaryCondition::SlipWall)).unwrap_err();
        assert!(matches!(err, Error::BlowUp { i: 3, j: 5, iteration: 1, .. }), "{err:?}");
        assert_eq!(f.iteration(), 0);
    }

    #[test]
    fn rigid_rotation_has_no_viscous_stress() {
        let gas = GasModel::viscous(0.01);
        let grid = Arc::new(StructuredGrid::cartesian(8, 8, 1.0, 1.0).unwrap());
        let mut f = StructuredField::from_fn(grid, &gas, |x, y| {
            [1.0, -0.1 * (y - 0.5), 0.1 * (x - 0.5), 1.0 / 1.4]
        })
        .unwrap();
        let cfg = config(gas, BoundaryCondition::SlipWall);
        f.prepare(&cfg).unwrap();
        f.fill_nodes();
        let inner = |p: [f64; 2]| p.iter().all(|&x| x > 1e-9 && x < 1.0 - 1e-9);
        for face in f.faces.iter().filter(|fc| inner(fc.pa) && inner(fc.pb)) {
            let pt = |c: usize| {
                let [rho, u, v, p] = f.prim[c];
                ViscousPoint { u, v, t: p / rho }
            };
            let nd = |n: usize| ViscousPoint { u: f.nodes[n][0], v: f.nodes[n][1], t: f.nodes[n][2] };
            let pos = [f.grid.center_at(face.l), face.pa, f.grid.center_at(face.r), face.pb];
            let (gu, gv, _) = diamond_gradients(pos, [pt(face.l), nd(face.na), pt(face.r), nd(face.nb)]);
            let (txx, txy, tyy) = viscous::stress(gas.mu, gu, gv);
            assert!(txx.abs() < 1e-12 && txy.abs() < 1e-12 && tyy.abs() < 1e-12);
        }
    }

    #[test]
    fn preconditioned_dissipation_tightens_step() {
        let gas = GasModel::inviscid();
        let grid = Arc::new(StructuredGrid::cartesian(10, 10, 1.0, 1.0).unwrap());
        let mut f = StructuredField::uniform(grid, &gas, 1.0, 0.01, 0.0, 1.0 / 1.4).unwrap();
        let mut cfg = config(gas, BoundaryCondition::SlipWall);
        let roe = f.compute_dt(&cfg).unwrap();
        cfg.scheme = SchemeConfig { m_ref: 0.01, ..SchemeConfig::new(Dissipation::PRoe, Central::PlainAverage) };
        let pre = f.compute_dt(&cfg).unwrap();
        assert!(pre < 0.1 * roe, "{pre} vs {roe}");
    }
}
