//! Verification instruments: exact Riemann oracle, checkerboard metric,
//! pressure-fluctuation index and its Mach scaling, coefficient-order
//! sweeps, discrete divergence and centreline profiles.

pub mod riemann;

use crate::error::{Error, Result};
use crate::gas::{FaceGeometry, GasModel};
use crate::schemes::{decompose, Coefficient, SchemeConfig};
use crate::solver::StructuredField;

pub use riemann::{Primitive1d, RiemannExact, Wave};

/// Reference centreline profile of the Re = 400 cavity, `(y, u / u_lid)`.
pub const CAVITY_RE400_U: &str = include_str!("../../data/cavity_re400_u.txt");

/// Normalised Nyquist-mode amplitude of a row-major (`i` fastest) field:
/// 1 for a pure alternating field, 0 for constant or smooth fields.
pub fn checkerboard_metric(p: &[f64], ni: usize, nj: usize) -> Result<f64> {
    if ni < 4 || nj < 4 || p.len() != ni * nj {
        return Err(Error::InvalidState(format!(
            "checkerboard metric needs a field of at least 4 x 4, got {} values for {ni} x {nj}",
            p.len()
        )));
    }
    let mean = p.iter().sum::<f64>() / p.len() as f64;
    let (mut alt, mut abs) = (0.0, 0.0);
    for j in 0..nj {
        for i in 0..ni {
            let d = p[i + j * ni] - mean;
            alt += if (i + j) % 2 == 0 { d } else { -d };
            abs += d.abs();
        }
    }
    if abs <= f64::MIN_POSITIVE * p.len() as f64 {
        return Ok(0.0);
    }
    Ok(alt.abs() / abs)
}

/// `(P_max - P_min) / P_max`.
pub fn ind_p(p: &[f64]) -> Result<f64> {
    if p.is_empty() {
        return Err(Error::InvalidState("empty pressure field".into()));
    }
    let max = p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = p.iter().copied().fold(f64::INFINITY, f64::min);
    Ok((max - min) / max)
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScalingSeries {
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerFit {
    pub slope: f64,
    pub intercept: f64,
}

/// Least-squares line through `(ln x, ln y)`.
pub fn fit_log_log(points: &[(f64, f64)]) -> Result<PowerFit> {
    if points.len() < 2 {
        return Err(Error::Numerical("a power-law fit needs at least two points".into()));
    }
    if points.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0)) {
        return Err(Error::Numerical("power-law fit needs positive values".into()));
    }
    let n = points.len() as f64;
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::Numerical("power-law fit needs distinct abscissae".into()));
    }
    let slope = sxy / sxx;
    Ok(PowerFit { slope, intercept: my - slope * mx })
}

/// Slope of `log Ind(p)` against `log M` over at least three points.
pub fn fit_scaling_slope(series: &ScalingSeries) -> Result<f64> {
    if series.points.len() < 3 {
        return Err(Error::Numerical("scaling fit needs at least three points".into()));
    }
    Ok(fit_log_log(&series.points)?.slope)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OrderFit {
    Slope(f64),
    /// The coefficient vanishes at every level of the sweep.
    ExactZero,
}

impl OrderFit {
    pub fn slope(self) -> Option<f64> {
        match self {
            OrderFit::Slope(s) => Some(s),
            OrderFit::ExactZero => None,
        }
    }
}

/// Sound-speed power of one dissipation coefficient. The velocity stays at
/// `(0.3, 0.4)` across the unit normal `(1, 0)` while `c` grows through
/// `levels`; the reference Mach number follows the local one, so global and
/// local cut-offs coincide.
pub fn coefficient_order_sweep(scheme: &SchemeConfig, which: Coefficient, levels: &[f64]) -> Result<OrderFit> {
    if levels.len() < 4 {
        return Err(Error::Numerical("order sweep needs at least four sound-speed levels".into()));
    }
    let gas = GasModel::inviscid();
    let geom = FaceGeometry::unit(1.0, 0.0);
    let (u, v) = (0.3, 0.4);
    let mut pts = Vec::with_capacity(levels.len());
    for &c in levels {
        let s = gas.primitive(1.0, u, v, c * c / gas.gamma)?;
        let cfg = SchemeConfig { m_ref: s.mach.min(1.0), ..*scheme };
        let value = decompose(&s, &geom, &cfg, 0.0, 0.0).get(which).abs();
        pts.push((c, value));
    }
    if pts.iter().all(|p| p.1 == 0.0) {
        return Ok(OrderFit::ExactZero);
    }
    Ok(OrderFit::Slope(fit_log_log(&pts)?.slope))
}

/// Default sweep levels: `M` from 0.05 down to 5e-5.
pub fn default_sweep_levels() -> Vec<f64> {
    [10.0, 30.0, 100.0, 300.0, 1000.0, 3000.0, 10000.0].to_vec()
}

/// Largest central-difference divergence
/// `u[i+1,j] - u[i-1,j] + v[i,j+1] - v[i,j-1]` over cells with four interior
/// neighbours, divided by `u_ref`.
pub fn divergence_residual(u: &[f64], v: &[f64], ni: usize, nj: usize, u_ref: f64) -> Result<f64> {
    if ni < 3 || nj < 3 || u.len() != ni * nj || v.len() != ni * nj {
        return Err(Error::InvalidState("divergence residual needs a field of at least 3 x 3".into()));
    }
    let at = |f: &[f64], i: usize, j: usize| f[i + j * ni];
    let mut worst: f64 = 0.0;
    for j in 1..nj - 1 {
        for i in 1..ni - 1 {
            let d = at(u, i + 1, j) - at(u, i - 1, j) + at(v, i, j + 1) - at(v, i, j - 1);
            worst = worst.max(d.abs());
        }
    }
    Ok(worst / u_ref)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CenterlineAxis {
    /// `u` along the vertical line through the box centre, against `y`.
    UAlongY,
    /// `v` along the horizontal line through the box centre, against `x`.
    VAlongX,
}

/// Velocity on the geometric centreline of a Cartesian field, normalised
/// by `u_ref`, including the two wall end points taken as ghost/interior
/// averages.
pub fn extract_centerline(
    field: &StructuredField,
    gas: &GasModel,
    axis: CenterlineAxis,
    u_ref: f64,
) -> Result<Vec<(f64, f64)>> {
    let g = field.grid();
    let (ni, nj) = (g.ni as isize, g.nj as isize);
    let vel = |i: isize, j: isize| -> Result<(f64, f64)> {
        let s = field.state(gas, i, j)?;
        Ok((s.u, s.v))
    };
    let (n_along, n_across) = match axis {
        CenterlineAxis::UAlongY => (nj, ni),
        CenterlineAxis::VAlongX => (ni, nj),
    };
    // cell (along, across) in grid indices
    let idx = |a: isize, b: isize| match axis {
        CenterlineAxis::UAlongY => (b, a),
        CenterlineAxis::VAlongX => (a, b),
    };
    let comp = |w: (f64, f64)| match axis {
        CenterlineAxis::UAlongY => w.0,
        CenterlineAxis::VAlongX => w.1,
    };
    let coord = |i: isize, j: isize, along: bool| {
        let c = g.center(i, j);
        match (axis, along) {
            (CenterlineAxis::UAlongY, true) | (CenterlineAxis::VAlongX, false) => c[1],
            _ => c[0],
        }
    };
    let lo = g.node(0, 0);
    let hi = g.node(ni, nj);
    let mid = match axis {
        CenterlineAxis::UAlongY => 0.5 * (lo[0] + hi[0]),
        CenterlineAxis::VAlongX => 0.5 * (lo[1] + hi[1]),
    };
    let (span_lo, span_hi) = match axis {
        CenterlineAxis::UAlongY => (lo[1], hi[1]),
        CenterlineAxis::VAlongX => (lo[0], hi[0]),
    };
    // bracketing columns around the centre line
    let mut b0 = 0;
    for b in 0..n_across - 1 {
        let (i, j) = idx(0, b + 1);
        if coord(i, j, false) >= mid {
            b0 = b;
            break;
        }
    }
    let value = |a: isize| -> Result<f64> {
        let (i0, j0) = idx(a, b0);
        let (i1, j1) = idx(a, b0 + 1);
        let (x0, x1) = (coord(i0, j0, false), coord(i1, j1, false));
        let w = (mid - x0) / (x1 - x0);
        Ok((1.0 - w) * comp(vel(i0, j0)?) + w * comp(vel(i1, j1)?))
    };
    let mut out = Vec::with_capacity(n_along as usize + 2);
    out.push((span_lo, 0.5 * (value(-1)? + value(0)?) / u_ref));
    for a in 0..n_along {
        let (i, j) = idx(a, b0);
        out.push((coord(i, j, true), value(a)? / u_ref));
    }
    out.push((span_hi, 0.5 * (value(n_along - 1)? + value(n_along)?) / u_ref));
    Ok(out)
}

/// Linear interpolation in a table sorted by abscissa; clamps outside.
pub fn interpolate(table: &[(f64, f64)], x: f64) -> f64 {
    match table.iter().position(|p| p.0 >= x) {
        None => table[table.len() - 1].1,
        Some(0) => table[0].1,
        Some(k) => {
            let (x0, y0) = table[k - 1];
            let (x1, y1) = table[k];
            y0 + (y1 - y0) * (x - x0) / (x1 - x0)
        }
    }
}

/// RMS of `profile - reference` at the reference abscissae.
pub fn profile_rms(profile: &[(f64, f64)], reference: &[(f64, f64)]) -> f64 {
    let mut sorted = profile.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let sum: f64 = reference.iter().map(|&(x, y)| (interpolate(&sorted, x) - y).powi(2)).sum();
    (sum / reference.len() as f64).sqrt()
}

/// Parses two-column `x y` text; `#` starts a comment line.
pub fn parse_reference_profile(text: &str) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = t.split_whitespace().collect();
        let parse = |s: &str| {
            s.parse::<f64>().map_err(|_| Error::Parse {
                line: n + 1,
                column: 1,
                message: format!("invalid number '{s}'"),
            })
        };
        if cols.len() != 2 {
            return Err(Error::Parse { line: n + 1, column: 1, message: "expected two columns".into() });
        }
        out.push((parse(cols[0])?, parse(cols[1])?));
    }
    Ok(out)
}

pub fn read_reference_profile(path: &std::path::Path) -> Result<Vec<(f64, f64)>> {
    parse_reference_profile(&std::fs::read_to_string(path)?)
}

pub fn cavity_reference_re400() -> Vec<(f64, f64)> {
    parse_reference_profile(CAVITY_RE400_U).expect("bundled reference profile parses")
}

/// Mean absolute density error `sum |rho - rho_exact| dx` over a 1D field.
pub fn l1_error(xs: &[f64], values: &[f64], exact: &[f64]) -> f64 {
    let n = xs.len();
    let dx = if n > 1 { (xs[n - 1] - xs[0]) / (n - 1) as f64 } else { 1.0 };
    values.iter().zip(exact).map(|(a, b)| (a - b).abs() * dx).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schemes::{Central, Dissipation};
    use proptest::prelude::*;

    #[test]
    fn checkerboard_examples() {
        let alt: Vec<f64> = (0..64).map(|k| if (k % 8 + k / 8) % 2 == 0 { 1.0 } else { -1.0 }).collect();
        assert!((checkerboard_metric(&alt, 8, 8).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(checkerboard_metric(&[3.0; 64], 8, 8).unwrap(), 0.0);
        let ramp: Vec<f64> = (0..64).map(|k| 0.3 * (k % 8) as f64 + 0.7 * (k / 8) as f64).collect();
        assert!(checkerboard_metric(&ramp, 8, 8).unwrap() <= 1e-12);
        assert!(checkerboard_metric(&[1.0; 9], 3, 3).is_err());
    }

    #[test]
    fn ind_p_examples() {
        assert!((ind_p(&[1.0, 1.02, 0.98]).unwrap() - 0.0392157).abs() < 1e-7);
        assert_eq!(ind_p(&[2.0; 5]).unwrap(), 0.0);
        let mut p = vec![1.0; 10];
        p[4] = 1.01;
        assert!((ind_p(&p).unwrap() - 0.009901).abs() < 1e-6);
        assert!(ind_p(&[]).is_err());
    }

    #[test]
    fn scaling_slopes() {
        let sq = ScalingSeries { points: [0.1, 0.05, 0.01].iter().map(|&m| (m, m * m)).collect() };
        assert!((fit_scaling_slope(&sq).unwrap() - 2.0).abs() < 1e-12);
        let lin = ScalingSeries { points: [0.1, 0.05, 0.01, 0.001].iter().map(|&m| (m, 0.5 * m)).collect() };
        assert!((fit_scaling_slope(&lin).unwrap() - 1.0).abs() < 1e-12);
        let bad = ScalingSeries { points: vec![(0.1, 0.0), (0.2, 1.0), (0.3, 1.0)] };
        assert!(fit_scaling_slope(&bad).is_err());
        assert!(fit_scaling_slope(&ScalingSeries { points: vec![(0.1, 1.0), (0.2, 2.0)] }).is_err());
    }

    #[test]
    fn coefficient_orders_match_the_mechanism_table() {
        let levels = default_sweep_levels();
        let slope = |d, which| {
            coefficient_order_sweep(&SchemeConfig::new(d, Central::PlainAverage), which, &levels)
                .unwrap()
                .slope()
                .unwrap()
        };
        use Dissipation::*;
        for (d, expect) in [(Roe, -1.0), (TRoe, -1.0), (LmRoe, -1.0), (ARoeNew1, -1.0), (ARoe, -2.0), (PRoe, 0.0), (ARoeNew2, 0.0)] {
            let s = slope(d, Coefficient::PressureInVelocity);
            assert!((s - expect).abs() <= 0.1, "{d}: {s}");
        }
        for (d, expect) in [(Roe, 1.0), (PRoe, 0.0), (ARoe, 0.0), (TRoe, 0.0), (LmRoe, 0.0), (ARoeNew1, 0.0), (ARoeNew2, 0.0)] {
            let s = slope(d, Coefficient::VelocityInPressure);
            assert!((s - expect).abs() <= 0.1, "{d}: {s}");
        }
        assert!(coefficient_order_sweep(&SchemeConfig::default(), Coefficient::GRho, &levels[..3]).is_err());
    }

    #[test]
    fn divergence_examples() {
        let (ni, nj) = (6, 5);
        let h = 0.1;
        let u: Vec<f64> = (0..ni * nj).map(|k| h * (k % ni) as f64).collect();
        let v: Vec<f64> = (0..ni * nj).map(|k| -h * (k / ni) as f64).collect();
        assert!(divergence_residual(&u, &v, ni, nj, 1.0).unwrap() <= 1e-12);
        assert_eq!(divergence_residual(&[0.2; 30], &[0.1; 30], ni, nj, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn bundled_reference_profile() {
        let g = cavity_reference_re400();
        assert_eq!(g.len(), 17);
        assert_eq!(g[0], (1.0, 1.0));
        assert_eq!(g[16], (0.0, 0.0));
        assert!(parse_reference_profile("# c\n0.1 0.2 0.3\n").is_err());
        assert!(matches!(parse_reference_profile("0.1 x\n"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn rms_of_identical_profiles_is_zero() {
        let g = cavity_reference_re400();
        assert!(profile_rms(&g, &g) < 1e-15);
    }

    proptest! {
        #[test]
        fn checkerboard_is_offset_and_scale_invariant(vals in proptest::collection::vec(-1.0f64..1.0, 36), a in -5.0f64..5.0, b in 0.1f64..10.0) {
            let m0 = checkerboard_metric(&vals, 6, 6).unwrap();
            let shifted: Vec<f64> = vals.iter().map(|x| b * x + a).collect();
            let m1 = checkerboard_metric(&shifted, 6, 6).unwrap();
            prop_assert!((m0 - m1).abs() < 1e-9);
            prop_assert!((0.0..=1.0 + 1e-12).contains(&m0));
        }

        #[test]
        fn exact_power_laws_are_recovered(k in -3.0f64..3.0, a in 0.1f64..10.0) {
            let pts: Vec<(f64, f64)> = [0.3, 0.1, 0.03, 0.01].iter().map(|&m: &f64| (m, a * m.powf(k))).collect();
            let s = fit_scaling_slope(&ScalingSeries { points: pts }).unwrap();
            prop_assert!((s - k).abs() < 1e-12);
        }
    }
}
