//! Ghost-layer boundary conditions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gas::{Conserved, GasModel};
use crate::mesh::StructuredGrid;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BoundaryCondition {
    /// Adiabatic no-slip wall.
    NoSlipWall,
    /// No-slip wall translating in x with speed `u_lid`.
    MovingLid { u_lid: f64 },
    /// Inviscid wall: only the normal velocity is reflected.
    SlipWall,
    /// Frozen free-stream primitives in the ghost cells.
    FarField { rho: f64, u: f64, v: f64, p: f64 },
    Periodic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Edge {
    IMin,
    IMax,
    JMin,
    JMax,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundarySpec {
    pub imin: BoundaryCondition,
    pub imax: BoundaryCondition,
    pub jmin: BoundaryCondition,
    pub jmax: BoundaryCondition,
}

impl BoundarySpec {
    pub fn uniform(bc: BoundaryCondition) -> Self {
        Self {
            imin: bc,
            imax: bc,
            jmin: bc,
            jmax: bc,
        }
    }

    pub fn get(&self, edge: Edge) -> BoundaryCondition {
        match edge {
            Edge::IMin => self.imin,
            Edge::IMax => self.imax,
            Edge::JMin => self.jmin,
            Edge::JMax => self.jmax,
        }
    }

    pub fn validate(&self, grid: &StructuredGrid) -> Result<()> {
        let per = |b: BoundaryCondition| matches!(b, BoundaryCondition::Periodic);
        if per(self.imin) != per(self.imax) || per(self.jmin) != per(self.jmax) {
            return Err(Error::Config("unmatched periodic boundary pair".into()));
        }
        if grid.is_periodic_i() && !per(self.imin) {
            return Err(Error::Config("o-grid requires periodic i-boundaries".into()));
        }
        for b in [self.imin, self.imax, self.jmin, self.jmax] {
            if let BoundaryCondition::FarField { rho, p, .. } = b {
                if !(rho > 0.0 && p > 0.0) {
                    return Err(Error::Config("far-field state must have positive rho, p".into()));
                }
            }
        }
        Ok(())
    }
}

fn prim(gas: &GasModel, q: &Conserved) -> [f64; 4] {
    let rho = q[0];
    let u = q[1] / rho;
    let v = q[2] / rho;
    let p = (gas.gamma - 1.0) * (q[3] - 0.5 * rho * (u * u + v * v));
    [rho, u, v, p]
}

fn cons(gas: &GasModel, w: [f64; 4]) -> Conserved {
    let [rho, u, v, p] = w;
    [rho, rho * u, rho * v, p / (gas.gamma - 1.0) + 0.5 * rho * (u * u + v * v)]
}

fn ghost_state(
    gas: &GasModel,
    bc: BoundaryCondition,
    interior: &Conserved,
    normal: (f64, f64),
) -> Conserved {
    let [rho, u, v, p] = prim(gas, interior);
    match bc {
        BoundaryCondition::NoSlipWall => cons(gas, [rho, -u, -v, p]),
        BoundaryCondition::MovingLid { u_lid } => cons(gas, [rho, 2.0 * u_lid - u, -v, p]),
        BoundaryCondition::SlipWall => {
            let (nx, ny) = normal;
            let un = u * nx + v * ny;
            cons(gas, [rho, u - 2.0 * un * nx, v - 2.0 * un * ny, p])
        }
        BoundaryCondition::FarField { rho, u, v, p } => cons(gas, [rho, u, v, p]),
        BoundaryCondition::Periodic => unreachable!("periodic edges are copied, not mirrored"),
    }
}

/// Refreshes every ghost cell from the interior. The j-edges are filled first
/// over interior columns; the i-edges then sweep all rows, ghost rows
/// included, which also fills the corner blocks.
pub fn apply_boundaries(gas: &GasModel, grid: &StructuredGrid, q: &mut [Conserved], spec: &BoundarySpec) {
    let g = grid.nghost as isize;
    let ni = grid.ni as isize;
    let nj = grid.nj as isize;

    for i in 0..ni {
        for k in 1..=g {
            // jmin
            let dst = grid.cell(i, -k);
            q[dst] = match spec.jmin {
                BoundaryCondition::Periodic => q[grid.cell(i, nj - k)],
                bc => {
                    let f = grid.jface(i, 0);
                    ghost_state(gas, bc, &q[grid.cell(i, k - 1)], (f.nx, f.ny))
                }
            };
            // jmax
            let dst = grid.cell(i, nj - 1 + k);
            q[dst] = match spec.jmax {
                BoundaryCondition::Periodic => q[grid.cell(i, k - 1)],
                bc => {
                    let f = grid.jface(i, nj);
                    ghost_state(gas, bc, &q[grid.cell(i, nj - k)], (f.nx, f.ny))
                }
            };
        }
    }
    for j in -g..nj + g {
        let jf = j.clamp(0, nj - 1);
        for k in 1..=g {
            let dst = grid.cell(-k, j);
            q[dst] = match spec.imin {
                BoundaryCondition::Periodic => q[grid.cell(ni - k, j)],
                bc => {
                    let f = grid.iface(0, jf);
                    ghost_state(gas, bc, &q[grid.cell(k - 1, j)], (f.nx, f.ny))
                }
            };
            let dst = grid.cell(ni - 1 + k, j);
            q[dst] = match spec.imax {
                BoundaryCondition::Periodic => q[grid.cell(k - 1, j)],
                bc => {
                    let f = grid.iface(ni, jf);
                    ghost_state(gas, bc, &q[grid.cell(ni - k, j)], (f.nx, f.ny))
                }
            };
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(spec: BoundarySpec) -> (GasModel, StructuredGrid, Vec<Conserved>) {
        let gas = GasModel::inviscid();
        let grid = StructuredGrid::cartesian(4, 4, 1.0, 1.0).unwrap();
        let mut q = vec![[0.0; 4]; grid.ext_ni() * grid.ext_nj()];
        for j in 0..4 {
            for i in 0..4 {
                q[grid.cell(i, j)] = gas.primitive_to_conservative(1.0, 0.3, 0.1, 0.7).unwrap();
            }
        }
        apply_boundaries(&gas, &grid, &mut q, &spec);
        (gas, grid, q)
    }

    fn vel(q: &Conserved) -> (f64, f64) {
        (q[1] / q[0], q[2] / q[0])
    }

    #[test]
    fn no_slip_reflects_velocity() {
        let (_, grid, q) = setup(BoundarySpec::uniform(BoundaryCondition::NoSlipWall));
        let (u, v) = vel(&q[grid.cell(1, -1)]);
        assert!((u + 0.3).abs() < 1e-15 && (v + 0.1).abs() < 1e-15);
        let (u, v) = vel(&q[grid.cell(1, -2)]);
        assert!((u + 0.3).abs() < 1e-15 && (v + 0.1).abs() < 1e-15);
    }

    #[test]
    fn lid_mirrors_about_lid_speed() {
        let mut spec = BoundarySpec::uniform(BoundaryCondition::NoSlipWall);
        spec.jmax = BoundaryCondition::MovingLid { u_lid: 0.005 };
        let (_, grid, q) = setup(spec);
        let (u, v) = vel(&q[grid.cell(2, 4)]);
        assert!((u + 0.29).abs() < 1e-15 && (v + 0.1).abs() < 1e-15);
    }

    #[test]
    fn slip_wall_flips_normal_component() {
        let (gas, grid, q) = setup(BoundarySpec::uniform(BoundaryCondition::SlipWall));
        let (u, v) = vel(&q[grid.cell(2, 4)]);
        assert!((u - 0.3).abs() < 1e-15 && (v + 0.1).abs() < 1e-15);
        let p = prim(&gas, &q[grid.cell(2, 4)])[3];
        assert!((p - 0.7).abs() < 1e-14);
    }

    #[test]
    fn far_field_and_periodic() {
        let ff = BoundaryCondition::FarField { rho: 1.0, u: 0.01, v: 0.0, p: 1.0 / 1.4 };
        let (_, grid, q) = setup(BoundarySpec { imin: BoundaryCondition::Periodic, imax: BoundaryCondition::Periodic, jmin: ff, jmax: ff });
        let (u, _) = vel(&q[grid.cell(0, -1)]);
        assert!((u - 0.01).abs() < 1e-15);
        assert_eq!(q[grid.cell(-1, 2)], q[grid.cell(3, 2)]);
        assert_eq!(q[grid.cell(4, 1)], q[grid.cell(0, 1)]);
        // corner block holds the periodic image of the far-field ghost
        assert_eq!(q[grid.cell(-1, -1)], q[grid.cell(3, -1)]);
    }

    #[test]
    fn unmatched_periodic_rejected() {
        let grid = StructuredGrid::cartesian(4, 4, 1.0, 1.0).unwrap();
        let mut spec = BoundarySpec::uniform(BoundaryCondition::SlipWall);
        spec.imin = BoundaryCondition::Periodic;
        assert!(spec.validate(&grid).is_err());
        spec.imax = BoundaryCondition::Periodic;
        assert!(spec.validate(&grid).is_ok());
    }
}
