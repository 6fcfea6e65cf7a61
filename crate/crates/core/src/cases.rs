//! Canonical test cases: grid, boundaries, initial state, gas and default
//! solver parameters for the shock tube, the lid-driven cavity and the
//! cylinder in uniform flow.

use std::f64::consts::TAU;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gas::GasModel;
use crate::mesh::{stretch_for_first_spacing, StructuredGrid};
use crate::schemes::{Central, Dissipation, SchemeConfig};
use crate::solver::{
    BoundaryCondition, BoundarySpec, Integrator, Reconstruction, SolverConfig, SolverSettings, StructuredField,
    TimeStepping,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseId {
    Sod,
    Cavity,
    Cylinder,
    /// Uniform flow through a box with free-stream boundaries.
    Uniform,
}

impl CaseId {
    pub const ALL: [CaseId; 4] = [CaseId::Sod, CaseId::Cavity, CaseId::Cylinder, CaseId::Uniform];

    pub fn name(self) -> &'static str {
        match self {
            CaseId::Sod => "sod",
            CaseId::Cavity => "cavity",
            CaseId::Cylinder => "cylinder",
            CaseId::Uniform => "uniform",
        }
    }
}

impl std::fmt::Display for CaseId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CaseId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        CaseId::ALL
            .into_iter()
            .find(|c| c.name() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| Error::Config(format!("unknown case '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GridSpec {
    Cartesian {
        ni: usize,
        nj: usize,
        lx: f64,
        ly: f64,
    },
    OGrid {
        n_circ: usize,
        n_rad: usize,
        r_cyl: f64,
        r_far: f64,
        /// Radial width of the first cell ring.
        first_spacing: f64,
    },
}

impl GridSpec {
    pub fn build(&self) -> Result<StructuredGrid> {
        match *self {
            GridSpec::Cartesian { ni, nj, lx, ly } => StructuredGrid::cartesian(ni, nj, lx, ly),
            GridSpec::OGrid {
                n_circ,
                n_rad,
                r_cyl,
                r_far,
                first_spacing,
            } => {
                let s = stretch_for_first_spacing(n_rad, r_cyl, r_far, first_spacing)?;
                StructuredGrid::ogrid(n_circ, n_rad, r_cyl, r_far, s)
            }
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        match *self {
            GridSpec::Cartesian { ni, nj, .. } => (ni, nj),
            GridSpec::OGrid { n_circ, n_rad, .. } => (n_circ, n_rad),
        }
    }
}

/// Initial primitive field `(rho, u, v, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum InitialCondition {
    Uniform([f64; 4]),
    /// Left state for `x < x0`, right state otherwise.
    Jump { x0: f64, left: [f64; 4], right: [f64; 4] },
}

impl InitialCondition {
    pub fn at(&self, x: f64, _y: f64) -> [f64; 4] {
        match *self {
            InitialCondition::Uniform(w) => w,
            InitialCondition::Jump { x0, left, right } => {
                if x < x0 {
                    left
                } else {
                    right
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunParams {
    /// End time of a time-accurate run; `None` marches to a steady state.
    pub t_final: Option<f64>,
    /// Relative residual drop that ends a steady run.
    pub tol: f64,
    pub max_iter: usize,
    /// Iterations between residual-history records.
    pub output_every: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CaseManifest {
    pub case: CaseId,
    /// Reference Mach number: lid, free-stream or jump-based.
    pub mach: f64,
    pub reynolds: Option<f64>,
    pub grid: GridSpec,
    pub boundaries: BoundarySpec,
    pub initial: InitialCondition,
    pub gas: GasModel,
    pub scheme: SchemeConfig,
    pub settings: SolverSettings,
    pub run: RunParams,
    /// Emit `pbar = (p - p_min) / (p_max - p_min)` next to `p`.
    pub pbar: bool,
}

/// Free-stream pressure with unit density and sound speed.
pub fn p_inf(gas: &GasModel) -> f64 {
    1.0 / gas.gamma
}

/// Whether pseudo-time preconditioning is stable with this scheme. Schemes
/// whose pressure-difference term in the momentum dissipation scales with
/// the preconditioned speed (P-Roe, A-Roe-new2, and anything carrying a
/// pressure-smoothed interface velocity) tolerate it; the rest do not gain.
pub fn supports_preconditioning(scheme: &SchemeConfig) -> bool {
    matches!(scheme.dissipation, Dissipation::PRoe | Dissipation::ARoeNew2)
        || matches!(scheme.central, Central::MimPressure | Central::MimMarch)
}

fn check_mach(m: f64) -> Result<()> {
    if !(m > 0.0 && m < 1.0) {
        return Err(Error::Config(format!("Mach number must lie in (0, 1), got {m}")));
    }
    Ok(())
}

fn steady_settings() -> SolverSettings {
    SolverSettings {
        time_stepping: TimeStepping::Local,
        integrator: Integrator::Ssp3,
        ..SolverSettings::default()
    }
}

/// Shock tube on 200 cells of the unit interval, diaphragm at `x = 0.5`.
pub fn make_sod() -> CaseManifest {
    let gas = GasModel::inviscid();
    CaseManifest {
        case: CaseId::Sod,
        mach: 1.0,
        reynolds: None,
        grid: GridSpec::Cartesian {
            ni: 200,
            nj: 1,
            lx: 1.0,
            ly: 1.0 / 200.0,
        },
        boundaries: BoundarySpec::uniform(BoundaryCondition::SlipWall),
        initial: InitialCondition::Jump {
            x0: 0.5,
            left: [1.0, 0.0, 0.0, 1.0],
            right: [0.125, 0.0, 0.0, 0.1],
        },
        gas,
        scheme: SchemeConfig {
            jump_mach: true,
            ..SchemeConfig::default()
        },
        settings: SolverSettings {
            reconstruction: Reconstruction::FirstOrder,
            ..SolverSettings::default()
        },
        run: RunParams {
            t_final: Some(0.2),
            tol: 0.0,
            max_iter: 100_000,
            output_every: 1,
        },
        pbar: false,
    }
}

/// Lid-driven unit cavity at rest, lid speed `M_lid` (sound speed one).
pub fn make_cavity(m_lid: f64, re: f64, ni: usize, nj: usize) -> Result<CaseManifest> {
    check_mach(m_lid)?;
    if !(re > 0.0) {
        return Err(Error::Config(format!("Reynolds number must be positive, got {re}")));
    }
    let gas = GasModel::viscous(m_lid / re);
    let mut boundaries = BoundarySpec::uniform(BoundaryCondition::NoSlipWall);
    boundaries.jmax = BoundaryCondition::MovingLid { u_lid: m_lid };
    let scheme = SchemeConfig {
        m_ref: m_lid,
        u_star: m_lid,
        ..SchemeConfig::default()
    };
    Ok(CaseManifest {
        case: CaseId::Cavity,
        mach: m_lid,
        reynolds: Some(re),
        grid: GridSpec::Cartesian { ni, nj, lx: 1.0, ly: 1.0 },
        boundaries,
        initial: InitialCondition::Uniform([1.0, 0.0, 0.0, p_inf(&gas)]),
        gas,
        scheme,
        settings: SolverSettings {
            preconditioned: supports_preconditioning(&scheme),
            ..steady_settings()
        },
        run: RunParams {
            t_final: None,
            tol: 1e-6,
            max_iter: 60_000,
            output_every: 10,
        },
        pbar: true,
    })
}

/// Inviscid flow past a cylinder of diameter one on an O-grid reaching
/// twenty diameters; first ring cells are square.
pub fn make_cylinder(m_inf: f64, n_circ: usize, n_rad: usize) -> Result<CaseManifest> {
    check_mach(m_inf)?;
    let gas = GasModel::inviscid();
    let free = [1.0, m_inf, 0.0, p_inf(&gas)];
    let r_cyl = 0.5;
    let scheme = SchemeConfig {
        m_ref: m_inf,
        u_star: m_inf,
        ..SchemeConfig::default()
    };
    Ok(CaseManifest {
        case: CaseId::Cylinder,
        mach: m_inf,
        reynolds: None,
        grid: GridSpec::OGrid {
            n_circ,
            n_rad,
            r_cyl,
            r_far: 20.0,
            first_spacing: TAU * r_cyl / n_circ.max(1) as f64,
        },
        boundaries: BoundarySpec {
            imin: BoundaryCondition::Periodic,
            imax: BoundaryCondition::Periodic,
            jmin: BoundaryCondition::SlipWall,
            jmax: BoundaryCondition::FarField {
                rho: free[0],
                u: free[1],
                v: free[2],
                p: free[3],
            },
        },
        initial: InitialCondition::Uniform(free),
        gas,
        scheme,
        settings: SolverSettings {
            preconditioned: supports_preconditioning(&scheme),
            ..steady_settings()
        },
        run: RunParams {
            t_final: None,
            tol: 1e-6,
            max_iter: 60_000,
            output_every: 10,
        },
        pbar: true,
    })
}

/// Uniform flow at Mach `m` through a Cartesian box; a smoke test whose
/// exact discrete solution is the initial field.
pub fn make_uniform(m: f64, ni: usize, nj: usize) -> Result<CaseManifest> {
    check_mach(m)?;
    let gas = GasModel::inviscid();
    let free = [1.0, m * 0.8, m * 0.6, p_inf(&gas)];
    Ok(CaseManifest {
        case: CaseId::Uniform,
        mach: m,
        reynolds: None,
        grid: GridSpec::Cartesian { ni, nj, lx: 1.0, ly: 1.0 },
        boundaries: BoundarySpec::uniform(BoundaryCondition::FarField {
            rho: free[0],
            u: free[1],
            v: free[2],
            p: free[3],
        }),
        initial: InitialCondition::Uniform(free),
        gas,
        scheme: SchemeConfig {
            m_ref: m,
            u_star: m,
            ..SchemeConfig::default()
        },
        settings: SolverSettings::default(),
        run: RunParams {
            t_final: None,
            tol: 1e-10,
            max_iter: 100,
            output_every: 1,
        },
        pbar: true,
    })
}

impl CaseManifest {
    /// Canned case at its desk-scale defaults.
    pub fn preset(case: CaseId) -> Self {
        match case {
            CaseId::Sod => make_sod(),
            CaseId::Cavity => make_cavity(0.005, 400.0, 64, 64).expect("valid cavity preset"),
            CaseId::Cylinder => make_cylinder(0.01, 36, 50).expect("valid cylinder preset"),
            CaseId::Uniform => make_uniform(0.1, 8, 8).expect("valid uniform preset"),
        }
    }

    /// Rebuilds the Mach-dependent parts (boundaries, initial state,
    /// viscosity, reference scales) for a new Mach number while keeping the
    /// grid, scheme selectors, solver settings and run parameters.
    pub fn at_mach(&self, m: f64) -> Result<Self> {
        let (ni, nj) = self.grid.dims();
        let mut base = match self.case {
            CaseId::Sod => return Err(Error::Config("the shock tube has no Mach parameter".into())),
            CaseId::Cavity => make_cavity(m, self.reynolds.unwrap_or(400.0), ni, nj)?,
            CaseId::Cylinder => make_cylinder(m, ni, nj)?,
            CaseId::Uniform => make_uniform(m, ni, nj)?,
        };
        base.grid = self.grid;
        base.scheme = SchemeConfig {
            m_ref: m,
            u_star: m,
            ..self.scheme
        };
        base.settings = self.settings;
        base.run = self.run;
        base.pbar = self.pbar;
        Ok(base)
    }

    /// Selects the dissipation and central terms, resetting the
    /// scheme-dependent pseudo-time preconditioning default.
    pub fn with_scheme(mut self, dissipation: Dissipation, central: Central) -> Self {
        self.scheme.dissipation = dissipation;
        self.scheme.central = central;
        self.settings.preconditioned = self.is_steady() && supports_preconditioning(&self.scheme);
        self
    }

    pub fn is_steady(&self) -> bool {
        self.run.t_final.is_none()
    }

    /// Largest initial or boundary speed over the free-stream sound speed.
    pub fn derived_mach(&self) -> f64 {
        let c = 1.0;
        let speed = |w: [f64; 4]| w[1].hypot(w[2]);
        let mut m: f64 = match self.initial {
            InitialCondition::Uniform(w) => speed(w),
            InitialCondition::Jump { left, right, .. } => {
                // strength of the diaphragm as a pressure-based Mach number
                let rho = 0.5 * (left[0] + right[0]);
                let cc = self.gas.gamma * 0.5 * (left[3] + right[3]) / rho;
                ((left[3] - right[3]).abs() / (rho * cc)).min(1.0).max(speed(left).max(speed(right)))
            }
        };
        for bc in [self.boundaries.imin, self.boundaries.imax, self.boundaries.jmin, self.boundaries.jmax] {
            match bc {
                BoundaryCondition::MovingLid { u_lid } => m = m.max(u_lid.abs() / c),
                BoundaryCondition::FarField { u, v, .. } => m = m.max(u.hypot(v) / c),
                _ => {}
            }
        }
        m
    }

    pub fn build_grid(&self) -> Result<Arc<StructuredGrid>> {
        Ok(Arc::new(self.grid.build()?))
    }

    pub fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            gas: self.gas,
            scheme: self.scheme,
            boundaries: self.boundaries,
            settings: self.settings,
        }
    }

    pub fn initial_field(&self, grid: Arc<StructuredGrid>) -> Result<StructuredField> {
        let init = self.initial;
        StructuredField::from_fn(grid, &self.gas, move |x, y| init.at(x, y))
    }

    pub fn validate(&self) -> Result<()> {
        self.gas.validate()?;
        self.scheme.validate()?;
        let grid = self.grid.build()?;
        self.solver_config().validate(&grid)?;
        if let Some(t) = self.run.t_final {
            if !(t > 0.0) {
                return Err(Error::Config(format!("t_final must be positive, got {t}")));
            }
        }
        if !(self.run.tol >= 0.0) || self.run.max_iter == 0 || self.run.output_every == 0 {
            return Err(Error::Config("run needs tol >= 0, max_iter > 0, output_every > 0".into()));
        }
        Ok(())
    }
}
