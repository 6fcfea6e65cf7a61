//! Perfect-gas thermodynamics, state conversions, and face-frame projections.
//!
//! All quantities are non-dimensional. The usual reference is free-stream
//! density and sound speed equal to one, so `p_inf = 1/gamma` and a velocity
//! reads directly as a Mach number.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Conservative vector `(rho, rho u, rho v, rho E)`.
pub type Conserved = [f64; 4];

/// Ratio of specific heats used by every canned case.
pub const GAMMA_AIR: f64 = 1.4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GasModel {
    pub gamma: f64,
    /// Dynamic viscosity; zero means inviscid.
    pub mu: f64,
    pub pr: f64,
}

impl Default for GasModel {
    fn default() -> Self {
        Self::inviscid()
    }
}

impl GasModel {
    pub fn inviscid() -> Self {
        Self {
            gamma: GAMMA_AIR,
            mu: 0.0,
            pr: 0.72,
        }
    }

    pub fn viscous(mu: f64) -> Self {
        Self {
            mu,
            ..Self::inviscid()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 1.0) || !(self.mu >= 0.0) || !(self.pr > 0.0) {
            return Err(Error::Config(format!(
                "gas model requires gamma > 1, mu >= 0, pr > 0 (got {self:?})"
            )));
        }
        Ok(())
    }

    /// Thermal conductivity `mu c_p / Pr` with unit gas constant.
    pub fn conductivity(&self) -> f64 {
        self.gamma * self.mu / ((self.gamma - 1.0) * self.pr)
    }

    /// Conservative vector from primitive `(rho, u, v, p)`.
    pub fn primitive_to_conservative(&self, rho: f64, u: f64, v: f64, p: f64) -> Result<Conserved> {
        if !(rho > 0.0) || !(p > 0.0) {
            return Err(Error::InvalidState(format!(
                "non-positive density or pressure (rho = {rho}, p = {p})"
            )));
        }
        let rho_e = p / (self.gamma - 1.0) + 0.5 * rho * (u * u + v * v);
        Ok([rho, rho * u, rho * v, rho_e])
    }

    pub fn conservative_to_primitive(&self, q: &Conserved) -> Result<FlowState> {
        let rho = q[0];
        if !(rho > 0.0) {
            return Err(Error::InvalidState(format!("non-positive density {rho}")));
        }
        let u = q[1] / rho;
        let v = q[2] / rho;
        let p = (self.gamma - 1.0) * (q[3] - 0.5 * rho * (u * u + v * v));
        if !(p > 0.0) {
            return Err(Error::InvalidState(format!("non-positive pressure {p}")));
        }
        Ok(self.state(rho, u, v, p))
    }

    /// Builds a state from primitives without validation; callers that accept
    /// external input must go through [`GasModel::primitive`].
    pub fn state(&self, rho: f64, u: f64, v: f64, p: f64) -> FlowState {
        let c = (self.gamma * p / rho).sqrt();
        let e = p / ((self.gamma - 1.0) * rho) + 0.5 * (u * u + v * v);
        FlowState {
            rho,
            u,
            v,
            p,
            e,
            h: e + p / rho,
            c,
            mach: (u * u + v * v).sqrt() / c,
        }
    }

    pub fn primitive(&self, rho: f64, u: f64, v: f64, p: f64) -> Result<FlowState> {
        if !(rho > 0.0) || !(p > 0.0) || !u.is_finite() || !v.is_finite() {
            return Err(Error::InvalidState(format!(
                "invalid primitive state (rho = {rho}, u = {u}, v = {v}, p = {p})"
            )));
        }
        Ok(self.state(rho, u, v, p))
    }

    /// Sqrt-density weighted Roe average. The sound speed is recomputed from
    /// the averaged enthalpy and velocity.
    pub fn roe_average(&self, left: &FlowState, right: &FlowState) -> FlowState {
        let sl = left.rho.sqrt();
        let sr = right.rho.sqrt();
        let inv = 1.0 / (sl + sr);
        let u = (sl * left.u + sr * right.u) * inv;
        let v = (sl * left.v + sr * right.v) * inv;
        let h = (sl * left.h + sr * right.h) * inv;
        let rho = sl * sr;
        let q2 = u * u + v * v;
        let c2 = ((self.gamma - 1.0) * (h - 0.5 * q2)).max(f64::MIN_POSITIVE);
        let c = c2.sqrt();
        let p = rho * c2 / self.gamma;
        FlowState {
            rho,
            u,
            v,
            p,
            e: h - p / rho,
            h,
            c,
            mach: q2.sqrt() / c,
        }
    }
}

/// Point state with the derived quantities every flux needs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowState {
    pub rho: f64,
    pub u: f64,
    pub v: f64,
    pub p: f64,
    /// Specific total energy.
    pub e: f64,
    /// Specific total enthalpy.
    pub h: f64,
    pub c: f64,
    pub mach: f64,
}

impl FlowState {
    pub fn conserved(&self) -> Conserved {
        [
            self.rho,
            self.rho * self.u,
            self.rho * self.v,
            self.rho * self.e,
        ]
    }

    pub fn speed(&self) -> f64 {
        (self.u * self.u + self.v * self.v).sqrt()
    }

    /// Exact Euler flux through a face with unit normal `geom.n`.
    pub fn face_flux(&self, geom: &FaceGeometry) -> Conserved {
        let un = geom.normal_velocity(self);
        let m = self.rho * un;
        [
            m,
            m * self.u + geom.nx * self.p,
            m * self.v + geom.ny * self.p,
            m * self.h,
        ]
    }
}

/// Unit normal and length of a cell interface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FaceGeometry {
    pub nx: f64,
    pub ny: f64,
    pub len: f64,
}

impl FaceGeometry {
    /// Face whose normal is `(dx, dy)` normalised; the length is the norm.
    pub fn from_area_vector(ax: f64, ay: f64) -> Result<Self> {
        let len = (ax * ax + ay * ay).sqrt();
        if !(len > 0.0) {
            return Err(Error::InvalidGrid("degenerate zero-length face".into()));
        }
        Ok(Self {
            nx: ax / len,
            ny: ay / len,
            len,
        })
    }

    pub fn unit(nx: f64, ny: f64) -> Self {
        let n = (nx * nx + ny * ny).sqrt();
        Self {
            nx: nx / n,
            ny: ny / n,
            len: 1.0,
        }
    }

    pub fn normal_velocity(&self, s: &FlowState) -> f64 {
        self.nx * s.u + self.ny * s.v
    }

    pub fn tangential_velocity(&self, s: &FlowState) -> f64 {
        self.nx * s.v - self.ny * s.u
    }

    /// Face-frame velocity `(U, V)`.
    pub fn project(&self, s: &FlowState) -> (f64, f64) {
        (self.normal_velocity(s), self.tangential_velocity(s))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gas() -> GasModel {
        GasModel::inviscid()
    }

    #[test]
    fn conversion_examples() {
        let g = gas();
        let q = g.primitive_to_conservative(1.0, 0.0, 0.0, 1.0).unwrap();
        assert_eq!(&q[..3], &[1.0, 0.0, 0.0]);
        assert!((q[3] - 2.5).abs() < 1e-15);
        let q = g.primitive_to_conservative(1.0, 1.0, 0.0, 1.0).unwrap();
        assert!((q[3] - 3.0).abs() < 1e-15 && q[1] == 1.0);

        let s = g.conservative_to_primitive(&[1.0, 0.0, 0.0, 2.5]).unwrap();
        assert!((s.p - 1.0).abs() < 1e-15);
        assert!((s.c - 1.4f64.sqrt()).abs() < 1e-15);
        assert!((s.c - 1.18322).abs() < 1e-5);
        let s = g.conservative_to_primitive(&[0.125, 0.0, 0.0, 0.25]).unwrap();
        assert!((s.p - 0.1).abs() < 1e-15);
        let s = g.conservative_to_primitive(&[1.0, 0.0, 0.0, 1.0]).unwrap();
        assert!((s.p - 0.4).abs() < 1e-15);
    }

    #[test]
    fn invalid_states_rejected() {
        let g = gas();
        assert!(g.primitive_to_conservative(0.0, 0.0, 0.0, 1.0).is_err());
        assert!(g.primitive_to_conservative(1.0, 0.0, 0.0, -1.0).is_err());
        // kinetic energy exceeds total energy
        assert!(matches!(
            g.conservative_to_primitive(&[1.0, 3.0, 0.0, 1.0]),
            Err(Error::InvalidState(_))
        ));
        assert!(g.conservative_to_primitive(&[-1.0, 0.0, 0.0, 1.0]).is_err());
    }

    #[test]
    fn roe_average_examples() {
        let g = gas();
        let a = g.state(1.3, 0.2, -0.1, 0.9);
        let avg = g.roe_average(&a, &a);
        for (x, y) in [(avg.rho, a.rho), (avg.u, a.u), (avg.v, a.v), (avg.h, a.h), (avg.p, a.p)] {
            assert!((x - y).abs() <= 1e-14 * y.abs().max(1.0));
        }
        let l = g.state(1.0, 0.0, 0.0, 1.0);
        let r = g.state(4.0, 3.0, 0.0, 1.0);
        let avg = g.roe_average(&l, &r);
        assert!((avg.rho - 2.0).abs() < 1e-15);
        assert!((avg.u - 2.0).abs() < 1e-15);
    }

    #[test]
    fn projection_examples() {
        let g = gas();
        let s = g.state(1.0, 1.0, 0.0, 1.0);
        assert_eq!(FaceGeometry::unit(1.0, 0.0).project(&s), (1.0, 0.0));
        // V = nx v - ny u, so a normal rotated to +y sees the x-velocity as -V
        assert_eq!(FaceGeometry::unit(0.0, 1.0).project(&s), (0.0, -1.0));
        let s = g.state(1.0, 3.0, 4.0, 1.0);
        let (un, vt) = FaceGeometry::unit(0.6, 0.8).project(&s);
        assert!((un - 5.0).abs() < 1e-14 && vt.abs() < 1e-14);
    }

    proptest! {
        #[test]
        fn conversion_round_trip(rho in 1e-3f64..1e3, u in -10.0f64..10.0, v in -10.0f64..10.0, p in 1e-3f64..1e3) {
            let g = gas();
            let q = g.primitive_to_conservative(rho, u, v, p).unwrap();
            let s = g.conservative_to_primitive(&q).unwrap();
            let scale = (u * u + v * v).sqrt().max(1e-300);
            prop_assert!(((s.rho - rho) / rho).abs() <= 1e-13);
            prop_assert!(((s.u - u) / scale.max(u.abs())).abs() <= 1e-13);
            prop_assert!(((s.v - v) / scale.max(v.abs())).abs() <= 1e-13);
            // pressure is recovered by subtracting kinetic energy, so the
            // relative error is bounded by the kinetic/internal ratio
            let kin = 0.5 * rho * (u * u + v * v) * 0.4;
            prop_assert!(((s.p - p) / p).abs() <= 1e-13 * (1.0 + kin / p));
            prop_assert!((s.h - (s.e + s.p / s.rho)).abs() <= 1e-12 * s.h.abs());
        }

        #[test]
        fn face_rotation_is_isometry(u in -5.0f64..5.0, v in -5.0f64..5.0, ang in 0.0f64..std::f64::consts::TAU) {
            let g = gas();
            let s = g.state(1.0, u, v, 1.0);
            let f = FaceGeometry::unit(ang.cos(), ang.sin());
            let (un, vt) = f.project(&s);
            let lhs = un * un + vt * vt;
            let rhs = u * u + v * v;
            prop_assert!((lhs - rhs).abs() <= 1e-14 * rhs.max(1.0));
        }
    }
}
