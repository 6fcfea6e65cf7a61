//! Mach-number cut-off functions and the pseudo sound speeds built from them.

/// Local scaling `f(M) = min(M, 1)`.
#[inline]
pub fn f_local(mach: f64) -> f64 {
    mach.min(1.0)
}

/// Globally cut-off scaling `min(max(M, M_ref), 1)`.
#[inline]
pub fn f_global(mach: f64, m_ref: f64) -> f64 {
    mach.max(m_ref).min(1.0)
}

/// Preconditioning factor `min(max(K M_ref^2, M^2), 1)`.
#[inline]
pub fn theta_global(mach: f64, m_ref: f64, k: f64) -> f64 {
    (k * m_ref * m_ref).max(mach * mach).min(1.0)
}

/// Preconditioning factor from local values only, `min(M^2, 1)`.
#[inline]
pub fn theta_local(mach: f64) -> f64 {
    (mach * mach).min(1.0)
}

/// Pseudo-acoustic speed of the preconditioned system,
/// `sqrt(4 c^2 theta + (1 - theta)^2 U^2) / 2`.
#[inline]
pub fn pseudo_sound_speed(c: f64, un: f64, theta: f64) -> f64 {
    0.5 * (4.0 * c * c * theta + (1.0 - theta).powi(2) * un * un).sqrt()
}

/// Everything the dissipation coefficients need from the cut-offs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cutoffs {
    pub f: f64,
    pub f_global: f64,
    pub theta: f64,
    pub theta_local: f64,
    /// `c' = f c`
    pub c_local: f64,
    /// `c~ = f~ c`
    pub c_global: f64,
    /// Pseudo-acoustic speed with the global `theta`.
    pub c_pseudo: f64,
    /// Pseudo-acoustic speed with the local `theta'`.
    pub c_pseudo_local: f64,
    /// `U~ = (1 + theta) U / 2`
    pub u_precond: f64,
    /// `U' = (1 + theta') U / 2`
    pub u_precond_local: f64,
}

impl Cutoffs {
    pub fn new(mach: f64, m_ref: f64, k: f64, c: f64, un: f64) -> Self {
        let f = f_local(mach);
        let fg = f_global(mach, m_ref);
        let theta = theta_global(mach, m_ref, k);
        let theta_l = theta_local(mach);
        Self {
            f,
            f_global: fg,
            theta,
            theta_local: theta_l,
            c_local: f * c,
            c_global: fg * c,
            c_pseudo: pseudo_sound_speed(c, un, theta),
            c_pseudo_local: pseudo_sound_speed(c, un, theta_l),
            u_precond: 0.5 * (1.0 + theta) * un,
            u_precond_local: 0.5 * (1.0 + theta_l) * un,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cutoff_examples() {
        assert_eq!(f_local(0.005), 0.005);
        assert_eq!(f_local(2.0), 1.0);
        assert_eq!(f_global(0.005, 0.01), 0.01);
        assert!((theta_global(0.005, 0.01, 1.0) - 1e-4).abs() < 1e-18);
        assert_eq!(pseudo_sound_speed(1.7, 0.3, 1.0), 1.7);
    }

    #[test]
    fn cutoffs_bundle() {
        let k = Cutoffs::new(0.02, 0.1, 1.0, 2.0, 0.03);
        assert_eq!(k.c_local, 0.04);
        assert!((k.c_global - 0.2).abs() < 1e-15);
        assert!((k.theta - 0.01).abs() < 1e-15);
        assert!((k.theta_local - 4e-4).abs() < 1e-15);
        assert!((k.u_precond - 0.5 * 1.01 * 0.03).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn global_is_max_of_local_and_reference(m in 0.0f64..3.0, mref in 1e-4f64..1.0) {
            prop_assert_eq!(f_global(m, mref), f_local(m).max(mref.min(1.0)));
            prop_assert!(f_global(m, mref) > 0.0 && f_global(m, mref) <= 1.0);
        }

        #[test]
        fn theta_coincides_with_local_when_tied(m in 0.0f64..3.0) {
            prop_assert_eq!(theta_global(m, m, 1.0), theta_local(m));
        }
    }
}
