//! Central part of the interface flux: plain flux averaging, or the
//! momentum-interpolation form with a modified normal interface velocity.

use super::{Central, SchemeConfig};
use crate::error::{Error, Result};
use crate::gas::{Conserved, FaceGeometry, FlowState};

/// Pressure gradients divided by density, at the previous time level, for
/// the two cells adjacent to a face and for the face itself.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FaceHistory {
    pub cell_left: [f64; 2],
    pub cell_right: [f64; 2],
    pub face: [f64; 2],
    /// Time step of the previous level.
    pub dt: f64,
}

impl FaceHistory {
    /// Third-derivative smoothing term of the time-marching interpolation.
    pub fn velocity_correction(&self, geom: &FaceGeometry, dt: f64) -> f64 {
        let sx = 0.5 * self.cell_left[0] + 0.5 * self.cell_right[0] - self.face[0];
        let sy = 0.5 * self.cell_left[1] + 0.5 * self.cell_right[1] - self.face[1];
        dt * (geom.nx * sx + geom.ny * sy)
    }
}

/// Interface-velocity modification for the momentum-interpolation variants.
pub fn velocity_modification(
    left: &FlowState,
    right: &FlowState,
    geom: &FaceGeometry,
    cfg: &SchemeConfig,
    history: Option<&FaceHistory>,
) -> Result<f64> {
    match cfg.central {
        Central::PlainAverage | Central::MimZero => Ok(0.0),
        Central::MimPressure => Ok(-cfg.c2 / (cfg.rho_star * cfg.u_star) * (right.p - left.p)),
        Central::MimMarch => {
            let h = history.ok_or_else(|| {
                Error::Config("mim-march needs the previous-level pressure gradients".into())
            })?;
            let dt = cfg.dt_mim.unwrap_or(h.dt);
            Ok(h.velocity_correction(geom, dt))
        }
    }
}

pub fn central_flux(
    left: &FlowState,
    right: &FlowState,
    geom: &FaceGeometry,
    cfg: &SchemeConfig,
    history: Option<&FaceHistory>,
) -> Result<Conserved> {
    let (nx, ny) = (geom.nx, geom.ny);
    if cfg.central == Central::PlainAverage {
        let fl = left.face_flux(geom);
        let fr = right.face_flux(geom);
        return Ok([
            0.5 * (fl[0] + fr[0]),
            0.5 * (fl[1] + fr[1]),
            0.5 * (fl[2] + fr[2]),
            0.5 * (fl[3] + fr[3]),
        ]);
    }
    let uf = 0.5 * (geom.normal_velocity(left) + geom.normal_velocity(right))
        + velocity_modification(left, right, geom, cfg, history)?;
    let ps = 0.5 * (left.p + right.p);
    Ok([
        0.5 * uf * (left.rho + right.rho),
        0.5 * uf * (left.rho * left.u + right.rho * right.u) + nx * ps,
        0.5 * uf * (left.rho * left.v + right.rho * right.v) + ny * ps,
        0.5 * uf * (left.rho * left.h + right.rho * right.h),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gas::GasModel;

    #[test]
    fn pressure_smoothing_example() {
        let gas = GasModel::inviscid();
        let l = gas.state(1.0, 0.0, 0.0, 1.0);
        let r = gas.state(1.0, 0.0, 0.0, 1.01);
        let cfg = SchemeConfig {
            central: Central::MimPressure,
            c2: 0.04,
            rho_star: 1.0,
            u_star: 1.0,
            ..SchemeConfig::default()
        };
        let du = velocity_modification(&l, &r, &FaceGeometry::unit(1.0, 0.0), &cfg, None).unwrap();
        assert!((du + 4e-4).abs() < 1e-15);
    }

    #[test]
    fn zero_c2_matches_mim_zero() {
        let gas = GasModel::inviscid();
        let l = gas.state(1.0, 0.1, 0.0, 1.0);
        let r = gas.state(0.9, 0.2, 0.1, 1.1);
        let n = FaceGeometry::unit(0.6, 0.8);
        let p = SchemeConfig { central: Central::MimPressure, c2: 0.0, ..SchemeConfig::default() };
        let z = SchemeConfig { central: Central::MimZero, ..SchemeConfig::default() };
        assert_eq!(central_flux(&l, &r, &n, &p, None).unwrap(), central_flux(&l, &r, &n, &z, None).unwrap());
    }

    #[test]
    fn march_requires_history() {
        let gas = GasModel::inviscid();
        let s = gas.state(1.0, 0.1, 0.0, 1.0);
        let cfg = SchemeConfig { central: Central::MimMarch, ..SchemeConfig::default() };
        let n = FaceGeometry::unit(1.0, 0.0);
        assert!(matches!(central_flux(&s, &s, &n, &cfg, None), Err(Error::Config(_))));
        let h = FaceHistory { cell_left: [1.0, 0.0], cell_right: [3.0, 0.0], face: [1.0, 5.0], dt: 0.1 };
        // 0.1 * (0.5 + 1.5 - 1.0)
        assert!((h.velocity_correction(&n, 0.1) - 0.1).abs() < 1e-15);
    }
}
