//! Dissipation terms in characteristic matrix form, `-1/2 R |Lambda| alpha`.

use super::cutoff::Cutoffs;
use super::linalg::{invert, mat_mul, mat_vec, scale_columns, Mat4, Vec4};
use super::{Dissipation, SchemeConfig};
use crate::error::{Error, Result};
use crate::gas::{Conserved, FaceGeometry, FlowState, GasModel};

/// Right eigenvectors of the face-normal flux Jacobian, one per column,
/// ordered (entropy, shear, U - c, U + c).
pub fn roe_right_eigenvectors(s: &FlowState, n: &FaceGeometry) -> Mat4 {
    acoustic_right_eigenvectors(s, n, s.c, s.c)
}

/// Roe eigenvectors with the acoustic speed replaced by `c_mom` in the
/// momentum rows and by `c_energy` in the energy row.
fn acoustic_right_eigenvectors(s: &FlowState, n: &FaceGeometry, c_mom: f64, c_energy: f64) -> Mat4 {
    let un = n.normal_velocity(s);
    let vt = n.tangential_velocity(s);
    let q2 = s.u * s.u + s.v * s.v;
    [
        [1.0, 0.0, 1.0, 1.0],
        [s.u, -n.ny, s.u - n.nx * c_mom, s.u + n.nx * c_mom],
        [s.v, n.nx, s.v - n.ny * c_mom, s.v + n.ny * c_mom],
        [0.5 * q2, vt, s.h - un * c_energy, s.h + un * c_energy],
    ]
}

/// Analytic inverse of [`roe_right_eigenvectors`]; rows map conservative
/// jumps to the wave strengths of the classical Roe decomposition.
pub fn roe_left_eigenvectors(s: &FlowState, n: &FaceGeometry, gamma: f64) -> Mat4 {
    let un = n.normal_velocity(s);
    let vt = n.tangential_velocity(s);
    let q2h = 0.5 * (s.u * s.u + s.v * s.v);
    let b = (gamma - 1.0) / (s.c * s.c);
    let ic = 1.0 / s.c;
    [
        [1.0 - b * q2h, b * s.u, b * s.v, -b],
        [-vt, -n.ny, n.nx, 0.0],
        [
            0.5 * (b * q2h + un * ic),
            0.5 * (-b * s.u - n.nx * ic),
            0.5 * (-b * s.v - n.ny * ic),
            0.5 * b,
        ],
        [
            0.5 * (b * q2h - un * ic),
            0.5 * (-b * s.u + n.nx * ic),
            0.5 * (-b * s.v + n.ny * ic),
            0.5 * b,
        ],
    ]
}

/// Right eigenvectors of `Gamma A` for the preconditioned system.
pub fn preconditioned_right_eigenvectors(s: &FlowState, n: &FaceGeometry, theta: f64, c_pseudo: f64) -> Mat4 {
    let un = n.normal_velocity(s);
    let vt = n.tangential_velocity(s);
    let q2 = s.u * s.u + s.v * s.v;
    let shift = (theta - 1.0) / (2.0 * theta);
    let ct = c_pseudo / theta;
    [
        [1.0, 0.0, 1.0, 1.0],
        [
            s.u,
            -n.ny,
            s.u - shift * n.nx * un - n.nx * ct,
            s.u - shift * n.nx * un + n.nx * ct,
        ],
        [
            s.v,
            n.nx,
            s.v - shift * n.ny * un - n.ny * ct,
            s.v - shift * n.ny * un + n.ny * ct,
        ],
        [
            0.5 * q2,
            vt,
            s.h - shift * un * un - un * ct,
            s.h - shift * un * un + un * ct,
        ],
    ]
}

/// Jacobian of the conservative vector with respect to `(p, u, v, s)`,
/// where `s = ln p - gamma ln rho`. The normalisation of the entropy column
/// cancels in `Gamma`, which only rescales the pressure direction.
pub fn conservative_from_primitive_jacobian(s: &FlowState, gamma: f64) -> Mat4 {
    let c2 = s.c * s.c;
    let q2h = 0.5 * (s.u * s.u + s.v * s.v);
    let rs = -s.rho / gamma;
    [
        [1.0 / c2, 0.0, 0.0, rs],
        [s.u / c2, s.rho, 0.0, rs * s.u],
        [s.v / c2, 0.0, s.rho, rs * s.v],
        [1.0 / (gamma - 1.0) + q2h / c2, s.rho * s.u, s.rho * s.v, rs * q2h],
    ]
}

/// Preconditioner `dQ/dW diag(theta, 1, 1, 1) dW/dQ` and its inverse.
pub fn preconditioner(s: &FlowState, gamma: f64, theta: f64) -> Result<(Mat4, Mat4)> {
    let j = conservative_from_primitive_jacobian(s, gamma);
    let j_inv = invert(&j)?;
    let gamma_m = mat_mul(&scale_columns(&j, &[theta, 1.0, 1.0, 1.0]), &j_inv);
    let gamma_inv = mat_mul(&scale_columns(&j, &[1.0 / theta, 1.0, 1.0, 1.0]), &j_inv);
    Ok((gamma_m, gamma_inv))
}

#[inline]
fn entropy_fixed(lambda: f64, delta: Option<f64>) -> f64 {
    let a = lambda.abs();
    match delta {
        Some(d) if d > 0.0 && a < d => 0.5 * (lambda * lambda + d * d) / d,
        _ => a,
    }
}

fn jump(left: &FlowState, right: &FlowState) -> Vec4 {
    let l = left.conserved();
    let r = right.conserved();
    [r[0] - l[0], r[1] - l[1], r[2] - l[2], r[3] - l[3]]
}

/// `-1/2 R |Lambda| alpha` for the five schemes that have a matrix form.
pub fn matrix_dissipation(
    gas: &GasModel,
    left: &FlowState,
    right: &FlowState,
    geom: &FaceGeometry,
    cfg: &SchemeConfig,
) -> Result<Conserved> {
    let avg = super::face_average(gas, left, right, cfg);
    let un = geom.normal_velocity(&avg);
    let c = avg.c;
    let k = Cutoffs::new(avg.mach, cfg.m_ref, cfg.k, c, un);
    let dq = jump(left, right);
    let fix = cfg.entropy_fix.map(|eps| eps * c);
    let abs_l = |l3: f64, l4: f64| [un.abs(), un.abs(), entropy_fixed(l3, fix), entropy_fixed(l4, fix)];

    let d = match cfg.dissipation {
        Dissipation::Roe | Dissipation::ARoe | Dissipation::TRoe | Dissipation::LmRoe => {
            let lmat = roe_left_eigenvectors(&avg, geom, gas.gamma);
            let mut alpha = mat_vec(&lmat, &dq);
            let (r, lam) = match cfg.dissipation {
                Dissipation::Roe => (roe_right_eigenvectors(&avg, geom), abs_l(un - c, un + c)),
                Dissipation::ARoe => (
                    roe_right_eigenvectors(&avg, geom),
                    abs_l(un - k.c_local, un + k.c_local),
                ),
                Dissipation::TRoe => {
                    let c_energy = if cfg.troe_original_energy { c } else { k.c_local };
                    (
                        acoustic_right_eigenvectors(&avg, geom, k.c_local, c_energy),
                        abs_l(un - c, un + c),
                    )
                }
                _ => {
                    // scale the rho dU / (2c) part of the acoustic strengths
                    let mean = 0.5 * (alpha[2] + alpha[3]);
                    let half = 0.5 * (alpha[3] - alpha[2]);
                    alpha[2] = mean - k.f * half;
                    alpha[3] = mean + k.f * half;
                    (roe_right_eigenvectors(&avg, geom), abs_l(un - c, un + c))
                }
            };
            let w = [lam[0] * alpha[0], lam[1] * alpha[1], lam[2] * alpha[2], lam[3] * alpha[3]];
            mat_vec(&r, &w)
        }
        Dissipation::PRoe => {
            let theta = k.theta;
            let r = preconditioned_right_eigenvectors(&avg, geom, theta, k.c_pseudo);
            let r_inv = invert(&r)?;
            let alpha = mat_vec(&r_inv, &dq);
            let lam = abs_l(k.u_precond - k.c_pseudo, k.u_precond + k.c_pseudo);
            let w = [lam[0] * alpha[0], lam[1] * alpha[1], lam[2] * alpha[2], lam[3] * alpha[3]];
            let (_, gamma_inv) = preconditioner(&avg, gas.gamma, theta)?;
            mat_vec(&gamma_inv, &mat_vec(&r, &w))
        }
        Dissipation::ARoeNew1 | Dissipation::ARoeNew2 => {
            return Err(Error::Config(format!(
                "{} is defined only through the unified dissipation form",
                cfg.dissipation
            )))
        }
    };
    Ok([-0.5 * d[0], -0.5 * d[1], -0.5 * d[2], -0.5 * d[3]])
}
