//! Interface fluxes: a central term plus a numerical dissipation term.
//!
//! The five literature schemes (Roe, preconditioned Roe, All-Speed Roe,
//! the T-Roe modification, LM-Roe) run through their characteristic matrix
//! form; the two newer schemes exist only as `(delta_u, delta_p)`
//! coefficient sets and run through the unified form.

pub mod central;
pub mod cutoff;
pub mod linalg;
pub mod matrix;
pub mod unified;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use central::{central_flux, FaceHistory};
pub use cutoff::Cutoffs;
pub use matrix::matrix_dissipation;
pub use unified::{coefficients, decompose, unified_dissipation, Coefficient, Coefficients, DissipationDecomposition};

use crate::error::{Error, Result};
use crate::gas::{Conserved, FaceGeometry, FlowState, GasModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Dissipation {
    Roe,
    PRoe,
    ARoe,
    TRoe,
    LmRoe,
    ARoeNew1,
    ARoeNew2,
}

impl Dissipation {
    pub const ALL: [Dissipation; 7] = [
        Dissipation::Roe,
        Dissipation::PRoe,
        Dissipation::ARoe,
        Dissipation::TRoe,
        Dissipation::LmRoe,
        Dissipation::ARoeNew1,
        Dissipation::ARoeNew2,
    ];

    pub const MATRIX: [Dissipation; 5] = [
        Dissipation::Roe,
        Dissipation::PRoe,
        Dissipation::ARoe,
        Dissipation::TRoe,
        Dissipation::LmRoe,
    ];

    pub fn has_matrix_form(self) -> bool {
        !matches!(self, Dissipation::ARoeNew1 | Dissipation::ARoeNew2)
    }

    pub fn name(self) -> &'static str {
        match self {
            Dissipation::Roe => "roe",
            Dissipation::PRoe => "p-roe",
            Dissipation::ARoe => "a-roe",
            Dissipation::TRoe => "t-roe",
            Dissipation::LmRoe => "lm-roe",
            Dissipation::ARoeNew1 => "a-roe-new1",
            Dissipation::ARoeNew2 => "a-roe-new2",
        }
    }
}

impl fmt::Display for Dissipation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Dissipation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Dissipation::ALL
            .into_iter()
            .find(|d| d.name() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| Error::Config(format!("unknown dissipation scheme '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Central {
    /// Average of the two face fluxes.
    PlainAverage,
    /// Interface-velocity form with no modification.
    MimZero,
    /// Interface velocity smoothed by the first pressure difference.
    MimPressure,
    /// Time-marching momentum interpolation (third pressure derivative).
    MimMarch,
}

impl Central {
    pub const ALL: [Central; 4] = [
        Central::PlainAverage,
        Central::MimZero,
        Central::MimPressure,
        Central::MimMarch,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Central::PlainAverage => "plain-average",
            Central::MimZero => "mim-zero",
            Central::MimPressure => "mim-pressure",
            Central::MimMarch => "mim-march",
        }
    }
}

impl fmt::Display for Central {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Central {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Central::ALL
            .into_iter()
            .find(|c| c.name() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| Error::Config(format!("unknown central term '{s}'")))
    }
}

/// Named scheme presets: either a bare dissipation name or one of the
/// All-Speed Roe variants `a-roe-c`, `a-roe-p`, `a-roe-m`.
pub fn parse_preset(s: &str) -> Result<(Dissipation, Option<Central>)> {
    match s.trim().to_ascii_lowercase().as_str() {
        "a-roe-c" => Ok((Dissipation::ARoe, Some(Central::PlainAverage))),
        "a-roe-p" => Ok((Dissipation::ARoe, Some(Central::MimPressure))),
        "a-roe-m" => Ok((Dissipation::ARoe, Some(Central::MimMarch))),
        other => Ok((other.parse()?, None)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchemeConfig {
    pub dissipation: Dissipation,
    pub central: Central,
    /// Cut-off constant on `M_ref^2`.
    pub k: f64,
    /// Global reference Mach number.
    pub m_ref: f64,
    /// Pressure-smoothing constant of the first-difference interpolation.
    pub c2: f64,
    pub rho_star: f64,
    pub u_star: f64,
    /// Time step inside the time-marching interpolation; `None` uses the
    /// previous solver step.
    pub dt_mim: Option<f64>,
    /// Entropy-fix width as a fraction of the sound speed.
    pub entropy_fix: Option<f64>,
    /// Keep the unmodified energy-row entries in the T-Roe eigenvectors.
    pub troe_original_energy: bool,
    /// Raise the face Mach number used by the cut-offs to `|dp| / (rho c^2)`,
    /// so strong pressure jumps at rest still see acoustic dissipation.
    pub jump_mach: bool,
}

impl Default for SchemeConfig {
    fn default() -> Self {
        Self {
            dissipation: Dissipation::Roe,
            central: Central::PlainAverage,
            k: 1.0,
            m_ref: 1.0,
            c2: 0.04,
            rho_star: 1.0,
            u_star: 1.0,
            dt_mim: None,
            entropy_fix: None,
            troe_original_energy: false,
            jump_mach: false,
        }
    }
}

impl SchemeConfig {
    pub fn new(dissipation: Dissipation, central: Central) -> Self {
        Self {
            dissipation,
            central,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.k > 0.0) {
            return Err(Error::Config(format!("k must be positive, got {}", self.k)));
        }
        if !(self.m_ref > 0.0 && self.m_ref <= 1.0) {
            return Err(Error::Config(format!("m_ref must be in (0, 1], got {}", self.m_ref)));
        }
        if !(self.c2 >= 0.0) {
            return Err(Error::Config(format!("c2 must be non-negative, got {}", self.c2)));
        }
        if !(self.rho_star > 0.0 && self.u_star > 0.0) {
            return Err(Error::Config("rho_star and u_star must be positive".into()));
        }
        if let Some(dt) = self.dt_mim {
            if !(dt > 0.0) {
                return Err(Error::Config(format!("dt_mim must be positive, got {dt}")));
            }
        }
        Ok(())
    }
}

/// Roe-averaged face state that the dissipation terms are evaluated at.
pub fn face_average(gas: &GasModel, left: &FlowState, right: &FlowState, cfg: &SchemeConfig) -> FlowState {
    let mut avg = gas.roe_average(left, right);
    if cfg.jump_mach {
        let m = (right.p - left.p).abs() / (avg.rho * avg.c * avg.c);
        avg.mach = avg.mach.max(m);
    }
    avg
}

/// Dissipation through the production path of the configured scheme.
pub fn dissipation_flux(
    gas: &GasModel,
    left: &FlowState,
    right: &FlowState,
    geom: &FaceGeometry,
    cfg: &SchemeConfig,
) -> Result<Conserved> {
    if cfg.dissipation.has_matrix_form() {
        matrix_dissipation(gas, left, right, geom, cfg)
    } else {
        Ok(unified_dissipation(gas, left, right, geom, cfg).0)
    }
}

/// Numerical flux per unit face length.
pub fn interface_flux(
    gas: &GasModel,
    left: &FlowState,
    right: &FlowState,
    geom: &FaceGeometry,
    cfg: &SchemeConfig,
    history: Option<&FaceHistory>,
) -> Result<Conserved> {
    let c = central_flux(left, right, geom, cfg, history)?;
    let d = dissipation_flux(gas, left, right, geom, cfg)?;
    Ok([c[0] + d[0], c[1] + d[1], c[2] + d[2], c[3] + d[3]])
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn names_round_trip() {
        for d in Dissipation::ALL {
            assert_eq!(d.name().parse::<Dissipation>().unwrap(), d);
        }
        for c in Central::ALL {
            assert_eq!(c.name().parse::<Central>().unwrap(), c);
        }
        assert_eq!(parse_preset("A-Roe-P").unwrap(), (Dissipation::ARoe, Some(Central::MimPressure)));
        assert_eq!(parse_preset("a-roe-new2").unwrap(), (Dissipation::ARoeNew2, None));
        assert!(parse_preset("hllc").is_err());
    }

    #[test]
    fn validation() {
        assert!(SchemeConfig::default().validate().is_ok());
        assert!(SchemeConfig { m_ref: 0.0, ..SchemeConfig::default() }.validate().is_err());
        assert!(SchemeConfig { k: -1.0, ..SchemeConfig::default() }.validate().is_err());
        assert!(SchemeConfig { c2: -0.1, ..SchemeConfig::default() }.validate().is_err());
    }

    #[test]
    fn consistency_for_every_combination() {
        let gas = GasModel::inviscid();
        let s = gas.state(1.1, 0.3, -0.2, 0.8);
        let n = FaceGeometry::unit(0.28, -0.96);
        let exact = s.face_flux(&n);
        let history = FaceHistory::default();
        for d in Dissipation::ALL {
            for c in Central::ALL {
                let cfg = SchemeConfig { m_ref: 0.2, ..SchemeConfig::new(d, c) };
                let f = interface_flux(&gas, &s, &s, &n, &cfg, Some(&history)).unwrap();
                for k in 0..4 {
                    assert!((f[k] - exact[k]).abs() <= 1e-14 * exact[k].abs().max(1.0), "{d}/{c}");
                }
            }
        }
    }

    #[test]
    fn preconditioned_roe_at_unit_theta_is_roe() {
        let gas = GasModel::inviscid();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..100 {
            let l = gas.state(rng.gen_range(0.5..2.0), rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5), rng.gen_range(0.5..2.0));
            let r = gas.state(rng.gen_range(0.5..2.0), rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5), rng.gen_range(0.5..2.0));
            let a: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let n = FaceGeometry::unit(a.cos(), a.sin());
            let roe = SchemeConfig::new(Dissipation::Roe, Central::PlainAverage);
            let pre = SchemeConfig { m_ref: 1.0, ..SchemeConfig::new(Dissipation::PRoe, Central::PlainAverage) };
            let fr = matrix_dissipation(&gas, &l, &r, &n, &roe).unwrap();
            let fp = matrix_dissipation(&gas, &l, &r, &n, &pre).unwrap();
            for k in 0..4 {
                assert!((fr[k] - fp[k]).abs() <= 1e-12, "{fr:?} vs {fp:?}");
            }
        }
    }

    #[test]
    fn every_scheme_is_roe_across_a_supersonic_face() {
        let gas = GasModel::inviscid();
        let l = gas.state(1.0, 1.3, 0.4, 0.7);
        let r = gas.state(1.05, 1.33, 0.39, 0.73);
        let n = FaceGeometry::unit(1.0, 0.0);
        let roe = dissipation_flux(&gas, &l, &r, &n, &SchemeConfig::default()).unwrap();
        for d in Dissipation::ALL {
            let cfg = SchemeConfig { m_ref: 0.1, ..SchemeConfig::new(d, Central::PlainAverage) };
            let f = dissipation_flux(&gas, &l, &r, &n, &cfg).unwrap();
            let u = unified_dissipation(&gas, &l, &r, &n, &cfg).0;
            for k in 0..4 {
                assert!((f[k] - roe[k]).abs() <= 1e-14, "{d}: {f:?} vs {roe:?}");
                assert!((u[k] - roe[k]).abs() <= 1e-14, "{d} unified: {u:?} vs {roe:?}");
            }
        }
    }

    #[test]
    fn sod_jump_first_step_is_finite() {
        let gas = GasModel::inviscid();
        let l = gas.state(1.0, 0.0, 0.0, 1.0);
        let r = gas.state(0.125, 0.0, 0.0, 0.1);
        let n = FaceGeometry::unit(1.0, 0.0);
        let f = interface_flux(&gas, &l, &r, &n, &SchemeConfig::default(), None).unwrap();
        assert!(f.iter().all(|x| x.is_finite()));
        assert!(f[0] > 0.0, "mass moves from high to low pressure");
    }
}
