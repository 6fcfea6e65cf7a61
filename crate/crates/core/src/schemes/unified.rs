//! Unified dissipation form shared by every Roe-type scheme:
//!
//! ```text
//! F_d = -1/2 { |U| dQ + dU (rho, rho u, rho v, rho H) + dp (0, nx, ny, U) }
//! ```
//!
//! The schemes differ only in how the normal-velocity modification `dU` and
//! the interface-pressure modification `dp` weight the pressure jump and the
//! normal-velocity jump. Face quantities are taken at the Roe average.

use super::cutoff::Cutoffs;
use super::{Dissipation, SchemeConfig};
use crate::gas::{Conserved, FaceGeometry, FlowState, GasModel};

/// Weights of `dp = p_R - p_L` and `dU = U_R - U_L` in the two modifications:
/// `delta_u = du_dp * dp + du_du * dU`, `delta_p = dp_dp * dp + dp_du * dU`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Coefficients {
    pub du_dp: f64,
    pub du_du: f64,
    pub dp_dp: f64,
    pub dp_du: f64,
}

/// The evaluated `(delta_u, delta_p)` pair together with the row
/// coefficients of the continuity and normal-momentum equations.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DissipationDecomposition {
    pub du: f64,
    pub dp: f64,
    /// dU-coefficient in the continuity row.
    pub g_rho: f64,
    /// dp-coefficient in the continuity row.
    pub h_rho: f64,
    /// dU-coefficient in the normal-momentum row.
    pub g_rhou: f64,
    /// dp-coefficient in the normal-momentum row.
    pub h_rhou: f64,
    pub coefficients: Coefficients,
}

/// Which coefficient an order sweep tracks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coefficient {
    /// dp-coefficient inside `delta_u`.
    PressureInVelocity,
    /// dU-coefficient inside `delta_p`.
    VelocityInPressure,
    GRho,
    HRho,
    GRhou,
    HRhou,
}

/// Coefficients of the scheme at an interface state `s` with normal
/// velocity `un`.
pub fn coefficients(s: &FlowState, un: f64, cfg: &SchemeConfig) -> Coefficients {
    let c = s.c;
    let rho = s.rho;
    let au = un.abs();
    let k = Cutoffs::new(s.mach, cfg.m_ref, cfg.k, c, un);
    // (|U+c|+|U-c|)/2 and (|U+c|-|U-c|)/2c: c and U/c on subsonic faces,
    // so every scheme keeps the Roe eigenvalues once |U| exceeds c
    let speed = |x: f64| x.max(au);
    let ratio = |x: f64| x.clamp(-1.0, 1.0);
    let roe_du_dp = (speed(c) - au) / (rho * c * c);
    let local_dp_du = (speed(k.c_local) - au) * rho;
    let mach_n = ratio(un / c);
    match cfg.dissipation {
        Dissipation::Roe => Coefficients {
            du_dp: roe_du_dp,
            du_du: mach_n,
            dp_dp: mach_n,
            dp_du: (speed(c) - au) * rho,
        },
        Dissipation::PRoe => {
            let ct = k.c_global;
            let ut = k.u_precond;
            let th = k.theta;
            let mix = 0.5 * (1.0 - th) * un * ut / ct;
            Coefficients {
                du_dp: (speed(ct) - mix - th * au) / (rho * th * c * c),
                du_du: ratio(ut / ct),
                dp_dp: ratio(ut / ct),
                dp_du: (speed(ct) - au + mix) * rho,
            }
        }
        Dissipation::ARoe => Coefficients {
            du_dp: (speed(k.c_local) - au) / (rho * c * c),
            du_du: mach_n,
            dp_dp: mach_n,
            dp_du: local_dp_du,
        },
        Dissipation::TRoe => Coefficients {
            du_dp: roe_du_dp,
            du_du: mach_n,
            dp_dp: k.f * mach_n,
            dp_du: local_dp_du,
        },
        Dissipation::LmRoe => Coefficients {
            du_dp: roe_du_dp,
            du_du: k.f * mach_n,
            dp_dp: mach_n,
            dp_du: local_dp_du,
        },
        Dissipation::ARoeNew1 => Coefficients {
            du_dp: roe_du_dp,
            du_du: mach_n,
            dp_dp: mach_n,
            dp_du: local_dp_du,
        },
        Dissipation::ARoeNew2 => {
            // local values in the numerators, global cut-off in denominators
            let cl = speed(k.c_pseudo_local);
            let ul = k.u_precond_local;
            let thl = k.theta_local;
            let ct = k.c_global;
            let mix = 0.5 * (1.0 - thl) * un * ul / ct;
            Coefficients {
                du_dp: (cl - mix - thl * au) / (rho * k.theta * c * c),
                du_du: ratio(ul / ct),
                dp_dp: ratio(ul / ct),
                dp_du: (cl - au + mix) * rho,
            }
        }
    }
}

impl DissipationDecomposition {
    fn new(s: &FlowState, un: f64, k: Coefficients, d_p: f64, d_un: f64) -> Self {
        Self {
            du: k.du_dp * d_p + k.du_du * d_un,
            dp: k.dp_dp * d_p + k.dp_du * d_un,
            g_rho: s.rho * k.du_du,
            h_rho: s.rho * k.du_dp,
            g_rhou: s.rho * un * k.du_du + k.dp_du,
            h_rhou: s.rho * un * k.du_dp + k.dp_dp,
            coefficients: k,
        }
    }

    pub fn get(&self, which: Coefficient) -> f64 {
        match which {
            Coefficient::PressureInVelocity => self.coefficients.du_dp,
            Coefficient::VelocityInPressure => self.coefficients.dp_du,
            Coefficient::GRho => self.g_rho,
            Coefficient::HRho => self.h_rho,
            Coefficient::GRhou => self.g_rhou,
            Coefficient::HRhou => self.h_rhou,
        }
    }
}

/// Decomposition at an interface state for given jumps, without a flux.
pub fn decompose(s: &FlowState, geom: &FaceGeometry, cfg: &SchemeConfig, d_p: f64, d_un: f64) -> DissipationDecomposition {
    let un = geom.normal_velocity(s);
    DissipationDecomposition::new(s, un, coefficients(s, un, cfg), d_p, d_un)
}

/// Assembles the unified flux from an existing `(delta_u, delta_p)` pair.
pub fn reconstruct(s: &FlowState, geom: &FaceGeometry, dq: &Conserved, du: f64, dp: f64) -> Conserved {
    let un = geom.normal_velocity(s);
    let au = un.abs();
    let rho = s.rho;
    [
        -0.5 * (au * dq[0] + du * rho),
        -0.5 * (au * dq[1] + du * rho * s.u + dp * geom.nx),
        -0.5 * (au * dq[2] + du * rho * s.v + dp * geom.ny),
        -0.5 * (au * dq[3] + du * rho * s.h + dp * un),
    ]
}

pub fn unified_dissipation(
    gas: &GasModel,
    left: &FlowState,
    right: &FlowState,
    geom: &FaceGeometry,
    cfg: &SchemeConfig,
) -> (Conserved, DissipationDecomposition) {
    let avg = super::face_average(gas, left, right, cfg);
    let ql = left.conserved();
    let qr = right.conserved();
    let dq = [qr[0] - ql[0], qr[1] - ql[1], qr[2] - ql[2], qr[3] - ql[3]];
    let d_p = right.p - left.p;
    let d_un = geom.normal_velocity(right) - geom.normal_velocity(left);
    let dec = decompose(&avg, geom, cfg, d_p, d_un);
    (reconstruct(&avg, geom, &dq, dec.du, dec.dp), dec)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(d: Dissipation) -> SchemeConfig {
        SchemeConfig { dissipation: d, m_ref: 0.05, ..SchemeConfig::default() }
    }

    #[test]
    fn equal_states_give_zero() {
        let gas = GasModel::inviscid();
        let s = gas.state(1.0, 0.03, 0.01, 0.714);
        let n = FaceGeometry::unit(0.3, 0.7);
        for d in Dissipation::ALL {
            let (f, dec) = unified_dissipation(&gas, &s, &s, &n, &cfg(d));
            assert!(f.iter().all(|x| x.abs() < 1e-15), "{d}");
            assert_eq!((dec.du, dec.dp), (0.0, 0.0));
        }
    }

    #[test]
    fn roe_velocity_modification_at_rest() {
        let gas = GasModel::inviscid();
        let s = gas.state(1.3, 0.0, 0.0, 1.0);
        let n = FaceGeometry::unit(1.0, 0.0);
        let eps = 1e-3;
        let dec = decompose(&s, &n, &cfg(Dissipation::Roe), eps, 0.0);
        assert!((dec.du - eps / (s.rho * s.c)).abs() < 1e-16);
    }

    #[test]
    fn new2_reduces_to_roe_when_supersonic() {
        let gas = GasModel::inviscid();
        let s = gas.state(1.0, 1.6, 0.4, 0.714);
        let n = FaceGeometry::unit(0.8, 0.6);
        let a = coefficients(&s, n.normal_velocity(&s), &cfg(Dissipation::Roe));
        let b = coefficients(&s, n.normal_velocity(&s), &cfg(Dissipation::ARoeNew2));
        for (x, y) in [(a.du_dp, b.du_dp), (a.du_du, b.du_du), (a.dp_dp, b.dp_dp), (a.dp_du, b.dp_du)] {
            assert!((x - y).abs() <= 1e-14 * x.abs().max(1.0), "{x} vs {y}");
        }
    }

    #[test]
    fn lm_roe_scales_only_velocity_term() {
        let gas = GasModel::inviscid();
        let s = gas.state(1.0, 0.02, 0.01, 0.714);
        let n = FaceGeometry::unit(1.0, 0.0);
        let un = n.normal_velocity(&s);
        let roe = coefficients(&s, un, &cfg(Dissipation::Roe));
        let lm = coefficients(&s, un, &cfg(Dissipation::LmRoe));
        assert_eq!(roe.du_dp, lm.du_dp);
        assert!((lm.du_du - s.mach.min(1.0) * roe.du_du).abs() < 1e-18);
    }

    #[test]
    fn reconstruction_is_bitwise() {
        let gas = GasModel::inviscid();
        let l = gas.state(1.0, 0.02, 0.01, 0.714);
        let r = gas.state(1.01, 0.025, 0.0, 0.72);
        let n = FaceGeometry::unit(0.6, 0.8);
        for d in Dissipation::ALL {
            let (f, dec) = unified_dissipation(&gas, &l, &r, &n, &cfg(d));
            let avg = gas.roe_average(&l, &r);
            let (ql, qr) = (l.conserved(), r.conserved());
            let dq = [qr[0] - ql[0], qr[1] - ql[1], qr[2] - ql[2], qr[3] - ql[3]];
            assert_eq!(reconstruct(&avg, &n, &dq, dec.du, dec.dp), f);
        }
    }
}
