//! Exact solution of the one-dimensional Riemann problem for a perfect gas.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Primitive1d {
    pub rho: f64,
    pub u: f64,
    pub p: f64,
}

impl Primitive1d {
    pub fn new(rho: f64, u: f64, p: f64) -> Self {
        Self { rho, u, p }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Wave {
    Shock,
    Rarefaction,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiemannExact {
    pub left: Primitive1d,
    pub right: Primitive1d,
    pub gamma: f64,
    pub p_star: f64,
    pub u_star: f64,
    pub left_wave: Wave,
    pub right_wave: Wave,
}

fn sound(gamma: f64, s: &Primitive1d) -> f64 {
    (gamma * s.p / s.rho).sqrt()
}

/// Pressure function of one side and its derivative in `p`.
fn side(gamma: f64, s: &Primitive1d, p: f64) -> (f64, f64) {
    let c = sound(gamma, s);
    if p > s.p {
        let a = 2.0 / ((gamma + 1.0) * s.rho);
        let b = (gamma - 1.0) / (gamma + 1.0) * s.p;
        let sq = (a / (p + b)).sqrt();
        ((p - s.p) * sq, sq * (1.0 - 0.5 * (p - s.p) / (p + b)))
    } else {
        let e = (gamma - 1.0) / (2.0 * gamma);
        let r = p / s.p;
        (2.0 * c / (gamma - 1.0) * (r.powf(e) - 1.0), r.powf(-(gamma + 1.0) / (2.0 * gamma)) / (s.rho * c))
    }
}

impl RiemannExact {
    pub fn solve(left: Primitive1d, right: Primitive1d, gamma: f64) -> Result<Self> {
        for s in [&left, &right] {
            if !(s.rho > 0.0 && s.p > 0.0) || !s.u.is_finite() {
                return Err(Error::InvalidState(format!("invalid Riemann state {s:?}")));
            }
        }
        let (cl, cr) = (sound(gamma, &left), sound(gamma, &right));
        let du = right.u - left.u;
        if 2.0 / (gamma - 1.0) * (cl + cr) <= du {
            return Err(Error::Numerical("Riemann data generate a vacuum".into()));
        }
        let f = |p: f64| {
            let (fl, dl) = side(gamma, &left, p);
            let (fr, dr) = side(gamma, &right, p);
            (fl + fr + du, dl + dr)
        };
        // two-rarefaction estimate, exact when both waves are rarefactions
        let e = (gamma - 1.0) / (2.0 * gamma);
        let pr = ((cl + cr - 0.5 * (gamma - 1.0) * du) / (cl / left.p.powf(e) + cr / right.p.powf(e))).powf(1.0 / e);
        let mut p = pr.max(1e-12 * left.p.min(right.p));
        let mut converged = false;
        for _ in 0..100 {
            let (val, der) = f(p);
            let next = (p - val / der).max(1e-14 * p);
            let change = 2.0 * (next - p).abs() / (next + p);
            p = next;
            if change < 1e-15 {
                converged = true;
                break;
            }
        }
        let (val, _) = f(p);
        if !converged && val.abs() > 1e-12 * (cl + cr) {
            return Err(Error::Numerical("star-pressure iteration did not converge".into()));
        }
        let (fl, _) = side(gamma, &left, p);
        let (fr, _) = side(gamma, &right, p);
        let u = 0.5 * (left.u + right.u) + 0.5 * (fr - fl);
        let wave = |s: &Primitive1d| if p > s.p { Wave::Shock } else { Wave::Rarefaction };
        Ok(Self {
            left,
            right,
            gamma,
            p_star: p,
            u_star: u,
            left_wave: wave(&left),
            right_wave: wave(&right),
        })
    }

    /// Residual of the star-pressure equation.
    pub fn star_residual(&self) -> f64 {
        let (fl, _) = side(self.gamma, &self.left, self.p_star);
        let (fr, _) = side(self.gamma, &self.right, self.p_star);
        fl + fr + self.right.u - self.left.u
    }

    /// Star-region density on the left (`true`) or right side.
    pub fn star_density(&self, left_side: bool) -> f64 {
        let g = self.gamma;
        let (s, wave) = if left_side { (&self.left, self.left_wave) } else { (&self.right, self.right_wave) };
        let r = self.p_star / s.p;
        match wave {
            Wave::Shock => {
                let k = (g - 1.0) / (g + 1.0);
                s.rho * (r + k) / (k * r + 1.0)
            }
            Wave::Rarefaction => s.rho * r.powf(1.0 / g),
        }
    }

    /// Similarity solution at `xi = (x - x0) / t`.
    pub fn sample(&self, xi: f64) -> Primitive1d {
        let g = self.gamma;
        let (ps, us) = (self.p_star, self.u_star);
        if xi <= us {
            let s = &self.left;
            let c = sound(g, s);
            match self.left_wave {
                Wave::Shock => {
                    let speed = s.u - c * ((g + 1.0) / (2.0 * g) * ps / s.p + (g - 1.0) / (2.0 * g)).sqrt();
                    if xi <= speed { *s } else { Primitive1d::new(self.star_density(true), us, ps) }
                }
                Wave::Rarefaction => {
                    let c_star = c * (ps / s.p).powf((g - 1.0) / (2.0 * g));
                    if xi <= s.u - c {
                        *s
                    } else if xi >= us - c_star {
                        Primitive1d::new(self.star_density(true), us, ps)
                    } else {
                        let k = 2.0 / (g + 1.0) + (g - 1.0) / ((g + 1.0) * c) * (s.u - xi);
                        Primitive1d::new(
                            s.rho * k.powf(2.0 / (g - 1.0)),
                            2.0 / (g + 1.0) * (c + 0.5 * (g - 1.0) * s.u + xi),
                            s.p * k.powf(2.0 * g / (g - 1.0)),
                        )
                    }
                }
            }
        } else {
            let s = &self.right;
            let c = sound(g, s);
            match self.right_wave {
                Wave::Shock => {
                    let speed = s.u + c * ((g + 1.0) / (2.0 * g) * ps / s.p + (g - 1.0) / (2.0 * g)).sqrt();
                    if xi >= speed { *s } else { Primitive1d::new(self.star_density(false), us, ps) }
                }
                Wave::Rarefaction => {
                    let c_star = c * (ps / s.p).powf((g - 1.0) / (2.0 * g));
                    if xi >= s.u + c {
                        *s
                    } else if xi <= us + c_star {
                        Primitive1d::new(self.star_density(false), us, ps)
                    } else {
                        let k = 2.0 / (g + 1.0) - (g - 1.0) / ((g + 1.0) * c) * (s.u - xi);
                        Primitive1d::new(
                            s.rho * k.powf(2.0 / (g - 1.0)),
                            2.0 / (g + 1.0) * (-c + 0.5 * (g - 1.0) * s.u + xi),
                            s.p * k.powf(2.0 * g / (g - 1.0)),
                        )
                    }
                }
            }
        }
    }

    /// Profile at time `t` for a diaphragm at `x0`.
    pub fn profile(&self, xs: &[f64], x0: f64, t: f64) -> Vec<Primitive1d> {
        xs.iter().map(|&x| self.sample((x - x0) / t)).collect()
    }

    /// Largest violation of the jump conditions across shocks (mass and
    /// momentum flux in the shock frame) and of isentropy across
    /// rarefactions, relative to the local scales.
    pub fn consistency_residual(&self) -> f64 {
        let g = self.gamma;
        let mut worst: f64 = 0.0;
        for left_side in [true, false] {
            let (s, wave) = if left_side { (self.left, self.left_wave) } else { (self.right, self.right_wave) };
            let star = Primitive1d::new(self.star_density(left_side), self.u_star, self.p_star);
            match wave {
                Wave::Shock => {
                    let c = sound(g, &s);
                    let m = ((g + 1.0) / (2.0 * g) * self.p_star / s.p + (g - 1.0) / (2.0 * g)).sqrt();
                    let w = if left_side { s.u - c * m } else { s.u + c * m };
                    let mass = s.rho * (s.u - w) - star.rho * (star.u - w);
                    let mom = s.rho * (s.u - w).powi(2) + s.p - star.rho * (star.u - w).powi(2) - star.p;
                    let h = |q: &Primitive1d| g / (g - 1.0) * q.p / q.rho + 0.5 * (q.u - w).powi(2);
                    let energy = h(&s) - h(&star);
                    let scale = s.rho * c + self.p_star + c * c;
                    worst = worst.max(mass.abs().max(mom.abs()).max(energy.abs()) / scale);
                }
                Wave::Rarefaction => {
                    let ent = s.p / s.rho.powf(g) - star.p / star.rho.powf(g);
                    let c = sound(g, &s);
                    let cs = sound(g, &star);
                    let riemann = if left_side {
                        s.u + 2.0 * c / (g - 1.0) - star.u - 2.0 * cs / (g - 1.0)
                    } else {
                        s.u - 2.0 * c / (g - 1.0) - star.u + 2.0 * cs / (g - 1.0)
                    };
                    worst = worst.max((ent / (s.p / s.rho.powf(g))).abs()).max(riemann.abs() / c);
                }
            }
        }
        worst
    }
}
