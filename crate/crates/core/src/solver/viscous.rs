//! Laminar viscous fluxes with face gradients from a diamond Green-Gauss
//! integral over the two adjacent cell centres and the two face nodes.

use crate::gas::{Conserved, FaceGeometry, GasModel};
use crate::mesh::polygon_gradient;

/// Velocity and temperature at one point; temperature is `p / rho`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ViscousPoint {
    pub u: f64,
    pub v: f64,
    pub t: f64,
}

/// Gradients of `u`, `v`, `T` over the quadrilateral
/// `left centre, node a, right centre, node b`.
pub fn diamond_gradients(
    pos: [[f64; 2]; 4],
    val: [ViscousPoint; 4],
) -> ([f64; 2], [f64; 2], [f64; 2]) {
    let gu = polygon_gradient(&pos, &val.map(|p| p.u));
    let gv = polygon_gradient(&pos, &val.map(|p| p.v));
    let gt = polygon_gradient(&pos, &val.map(|p| p.t));
    (gu, gv, gt)
}

/// Stress tensor `(tau_xx, tau_xy, tau_yy)` under the Stokes hypothesis.
pub fn stress(mu: f64, gu: [f64; 2], gv: [f64; 2]) -> (f64, f64, f64) {
    let div = gu[0] + gv[1];
    let txx = mu * (2.0 * gu[0] - 2.0 / 3.0 * div);
    let tyy = mu * (2.0 * gv[1] - 2.0 / 3.0 * div);
    let txy = mu * (gu[1] + gv[0]);
    (txx, txy, tyy)
}

/// Viscous flux per unit face length; `face` holds the face-averaged
/// velocity used in the work term.
pub fn viscous_face_flux(
    gas: &GasModel,
    geom: &FaceGeometry,
    face: ViscousPoint,
    gu: [f64; 2],
    gv: [f64; 2],
    gt: [f64; 2],
) -> Conserved {
    let (txx, txy, tyy) = stress(gas.mu, gu, gv);
    let k = gas.conductivity();
    let (nx, ny) = (geom.nx, geom.ny);
    let fx = txx * nx + txy * ny;
    let fy = txy * nx + tyy * ny;
    let qn = k * (gt[0] * nx + gt[1] * ny);
    [0.0, fx, fy, face.u * fx + face.v * fy + qn]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diamond(f: impl Fn(f64, f64) -> ViscousPoint) -> ([f64; 2], [f64; 2], [f64; 2]) {
        // j-face of a unit Cartesian cell pair: centres below and above
        let pos = [[0.5, -0.5], [1.0, 0.0], [0.5, 0.5], [0.0, 0.0]];
        diamond_gradients(pos, pos.map(|[x, y]| f(x, y)))
    }

    #[test]
    fn uniform_flow_has_no_viscous_flux() {
        let gas = GasModel::viscous(0.01);
        let (gu, gv, gt) = diamond(|_, _| ViscousPoint { u: 0.3, v: -0.1, t: 0.7 });
        let f = viscous_face_flux(&gas, &FaceGeometry::unit(0.0, 1.0), ViscousPoint { u: 0.3, v: -0.1, t: 0.7 }, gu, gv, gt);
        assert!(f.iter().all(|x| x.abs() < 1e-15));
    }

    #[test]
    fn pure_shear_stress() {
        let mu = 0.02;
        let (gu, gv, _) = diamond(|_, y| ViscousPoint { u: 0.4 * y, v: 0.0, t: 1.0 });
        let (_, txy, _) = stress(mu, gu, gv);
        assert!((txy - mu * 0.4).abs() < 1e-15);
    }

    #[test]
    fn rigid_rotation_is_shear_free() {
        let (gu, gv, _) = diamond(|x, y| ViscousPoint { u: -2.0 * y, v: 2.0 * x, t: 1.0 });
        let (txx, txy, tyy) = stress(1.0, gu, gv);
        assert!(txx.abs() < 1e-12 && txy.abs() < 1e-12 && tyy.abs() < 1e-12);
    }
}
