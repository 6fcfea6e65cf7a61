//! Limited piecewise-linear reconstruction of primitive variables.

#[inline]
pub fn minmod(a: f64, b: f64) -> f64 {
    if a * b <= 0.0 {
        0.0
    } else if a.abs() < b.abs() {
        a
    } else {
        b
    }
}

/// Face value extrapolated from cell `c` toward `up` (the downwind side),
/// using the minmod-limited slope of the stencil `(down, c, up)`.
#[inline]
pub fn extrapolate(down: &[f64; 4], c: &[f64; 4], up: &[f64; 4]) -> [f64; 4] {
    let mut out = [0.0; 4];
    for k in 0..4 {
        out[k] = c[k] + 0.5 * minmod(c[k] - down[k], up[k] - c[k]);
    }
    out
}

/// Left and right states at the face between `l` and `r`.
pub fn face_states(ll: &[f64; 4], l: &[f64; 4], r: &[f64; 4], rr: &[f64; 4]) -> ([f64; 4], [f64; 4]) {
    (extrapolate(ll, l, r), extrapolate(rr, r, l))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minmod_examples() {
        assert_eq!(minmod(1.0, 2.0), 1.0);
        assert_eq!(minmod(-1.0, 2.0), 0.0);
        assert_eq!(minmod(-3.0, -2.0), -2.0);
    }

    #[test]
    fn linear_field_is_exact() {
        let w = |x: f64| [1.0 + 0.1 * x, 0.2 * x, -0.1 * x, 2.0 + x];
        let (l, r) = face_states(&w(-1.5), &w(-0.5), &w(0.5), &w(1.5));
        let exact = w(0.0);
        for k in 0..4 {
            assert!((l[k] - exact[k]).abs() < 1e-15 && (r[k] - exact[k]).abs() < 1e-15);
        }
    }

    #[test]
    fn uniform_and_extremum() {
        let c = [1.0, 0.5, 0.0, 0.7];
        let (l, r) = face_states(&c, &c, &c, &c);
        assert_eq!((l, r), (c, c));
        // local maximum at the left cell: first order there
        let (l, _) = face_states(&[0.0; 4], &[1.0; 4], &[0.5; 4], &[0.0; 4]);
        assert_eq!(l, [1.0; 4]);
    }
}
