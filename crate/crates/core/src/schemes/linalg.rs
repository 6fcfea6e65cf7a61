//! Dense 4x4 helpers for the eigen-decomposed dissipation matrices.

use crate::error::{Error, Result};

pub type Mat4 = [[f64; 4]; 4];
pub type Vec4 = [f64; 4];

pub const IDENTITY: Mat4 = [
    [1.0, 0.0, 0.0, 0.0],
    [0.0, 1.0, 0.0, 0.0],
    [0.0, 0.0, 1.0, 0.0],
    [0.0, 0.0, 0.0, 1.0],
];

pub fn mat_vec(m: &Mat4, x: &Vec4) -> Vec4 {
    let mut y = [0.0; 4];
    for r in 0..4 {
        y[r] = m[r][0] * x[0] + m[r][1] * x[1] + m[r][2] * x[2] + m[r][3] * x[3];
    }
    y
}

pub fn mat_mul(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut c = [[0.0; 4]; 4];
    for r in 0..4 {
        for k in 0..4 {
            let a_rk = a[r][k];
            for col in 0..4 {
                c[r][col] += a_rk * b[k][col];
            }
        }
    }
    c
}

/// Right-multiplies by a diagonal matrix.
pub fn scale_columns(a: &Mat4, d: &Vec4) -> Mat4 {
    let mut c = *a;
    for row in c.iter_mut() {
        for (x, s) in row.iter_mut().zip(d) {
            *x *= s;
        }
    }
    c
}

/// Gauss-Jordan inverse with partial pivoting.
pub fn invert(m: &Mat4) -> Result<Mat4> {
    let mut a = *m;
    let mut inv = IDENTITY;
    let scale = m.iter().flatten().fold(0.0f64, |s, x| s.max(x.abs()));
    for col in 0..4 {
        let pivot = (col..4)
            .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
            .unwrap();
        if !(a[pivot][col].abs() > 1e-14 * scale) {
            return Err(Error::Numerical("singular 4x4 matrix".into()));
        }
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = 1.0 / a[col][col];
        for k in 0..4 {
            a[col][k] *= p;
            inv[col][k] *= p;
        }
        for r in 0..4 {
            if r != col {
                let f = a[r][col];
                if f != 0.0 {
                    for k in 0..4 {
                        a[r][k] -= f * a[col][k];
                        inv[r][k] -= f * inv[col][k];
                    }
                }
            }
        }
    }
    Ok(inv)
}

pub fn max_abs_diff(a: &Mat4, b: &Mat4) -> f64 {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_of_known_matrix() {
        let m = [
            [2.0, 0.0, 1.0, 0.0],
            [0.0, 3.0, 0.0, 1.0],
            [1.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 4.0],
        ];
        let inv = invert(&m).unwrap();
        assert!(max_abs_diff(&mat_mul(&m, &inv), &IDENTITY) < 1e-15);
    }

    #[test]
    fn singular_detected() {
        let mut m = IDENTITY;
        m[3] = m[2];
        assert!(invert(&m).is_err());
    }
}
