//! Structured quadrilateral grids with ghost layers.
//!
//! Every table covers the ghost-extended lattice, so ghost cells carry real
//! geometry (mirrored across walls, continued across periodic seams). Cell
//! `(i, j)` uses signed indices with the interior at `0..ni` and `0..nj`.
//! The i-face `(i, j)` separates cells `(i-1, j)` and `(i, j)`; its normal
//! points toward increasing `i`. The j-face `(i, j)` separates `(i, j-1)`
//! and `(i, j)`.

use std::f64::consts::TAU;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gas::FaceGeometry;

/// Ghost layers on each side; MUSCL needs two.
pub const NGHOST: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Topology {
    Cartesian,
    /// O-grid around a body: `i` runs around the circumference and wraps.
    OGridPeriodicI,
}

#[derive(Debug, Clone)]
pub struct StructuredGrid {
    pub ni: usize,
    pub nj: usize,
    pub nghost: usize,
    pub topology: Topology,
    nodes: Vec<[f64; 2]>,
    centers: Vec<[f64; 2]>,
    volumes: Vec<f64>,
    ifaces: Vec<FaceGeometry>,
    jfaces: Vec<FaceGeometry>,
}

impl StructuredGrid {
    /// Uniform Cartesian box `[0, x_extent] x [0, y_extent]`. `nj == 1` gives
    /// a one-dimensional tube; the j-direction is then inactive.
    pub fn cartesian(ni: usize, nj: usize, x_extent: f64, y_extent: f64) -> Result<Self> {
        if !(x_extent > 0.0) || !(y_extent > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "extents must be positive (got {x_extent} x {y_extent})"
            )));
        }
        if ni < 4 || !(nj >= 4 || nj == 1) {
            return Err(Error::InvalidGrid(format!(
                "cartesian grid needs ni >= 4 and nj >= 4 (or nj = 1), got {ni} x {nj}"
            )));
        }
        let dx = x_extent / ni as f64;
        let dy = y_extent / nj as f64;
        Self::from_node_fn(ni, nj, NGHOST, Topology::Cartesian, |i, j| {
            [i as f64 * dx, j as f64 * dy]
        })
    }

    /// O-grid around a cylinder of radius `r_cyl` centred at the origin.
    /// Radial spacing grows geometrically by `stretch`; the `j = 0` face ring
    /// lies on the body. The circumferential index runs clockwise so that
    /// `(i, j)` is a right-handed frame.
    pub fn ogrid(n_circ: usize, n_rad: usize, r_cyl: f64, r_far: f64, stretch: f64) -> Result<Self> {
        if n_circ < 8 || n_rad < 2 {
            return Err(Error::InvalidGrid(format!(
                "o-grid needs n_circ >= 8 and n_rad >= 2, got {n_circ} x {n_rad}"
            )));
        }
        if !(r_cyl > 0.0) || !(r_far > r_cyl) {
            return Err(Error::InvalidGrid(format!(
                "invalid radii r_cyl = {r_cyl}, r_far = {r_far}"
            )));
        }
        if !(stretch >= 1.0) {
            return Err(Error::InvalidGrid(format!("stretch must be >= 1, got {stretch}")));
        }
        let radii = radial_distribution(n_rad, r_cyl, r_far, stretch);
        let g = NGHOST as isize;
        let n = n_rad as isize;
        let radius = |j: isize| -> f64 {
            if j < 0 {
                2.0 * radii[0] - radii[(-j) as usize]
            } else if j > n {
                2.0 * radii[n_rad] - radii[(2 * n - j) as usize]
            } else {
                radii[j as usize]
            }
        };
        if radius(-g) <= 0.0 {
            return Err(Error::InvalidGrid(
                "first radial cells too thick for the mirrored ghost layers".into(),
            ));
        }
        let nc = n_circ as isize;
        Self::from_node_fn(n_circ, n_rad, NGHOST, Topology::OGridPeriodicI, |i, j| {
            // angle index taken modulo n_circ so the seam wraps bitwise
            let k = (-i).rem_euclid(nc);
            let phi = TAU * k as f64 / n_circ as f64;
            let r = radius(j);
            [r * phi.cos(), r * phi.sin()]
        })
    }

    fn from_node_fn(
        ni: usize,
        nj: usize,
        nghost: usize,
        topology: Topology,
        node: impl Fn(isize, isize) -> [f64; 2],
    ) -> Result<Self> {
        let g = nghost as isize;
        let mut nodes = Vec::with_capacity((ni + 2 * nghost + 1) * (nj + 2 * nghost + 1));
        for j in -g..=(nj as isize + g) {
            for i in -g..=(ni as isize + g) {
                nodes.push(node(i, j));
            }
        }
        Self::from_nodes(ni, nj, nghost, topology, nodes)
    }

    /// Builds all metric tables from a ghost-extended node lattice stored
    /// row-major with `i` fastest.
    pub fn from_nodes(
        ni: usize,
        nj: usize,
        nghost: usize,
        topology: Topology,
        nodes: Vec<[f64; 2]>,
    ) -> Result<Self> {
        let ext_i = ni + 2 * nghost;
        let ext_j = nj + 2 * nghost;
        if nodes.len() != (ext_i + 1) * (ext_j + 1) {
            return Err(Error::InvalidGrid(format!(
                "expected {} nodes, got {}",
                (ext_i + 1) * (ext_j + 1),
                nodes.len()
            )));
        }
        let nd = |i: usize, j: usize| nodes[i + j * (ext_i + 1)];

        let mut centers = Vec::with_capacity(ext_i * ext_j);
        let mut volumes = Vec::with_capacity(ext_i * ext_j);
        for j in 0..ext_j {
            for i in 0..ext_i {
                let quad = [nd(i, j), nd(i + 1, j), nd(i + 1, j + 1), nd(i, j + 1)];
                let area = polygon_area(&quad);
                if !(area > 0.0) {
                    return Err(Error::InvalidGrid(format!(
                        "cell ({}, {}) has non-positive area {area}",
                        i as isize - nghost as isize,
                        j as isize - nghost as isize
                    )));
                }
                volumes.push(area);
                centers.push([
                    0.25 * (quad[0][0] + quad[1][0] + quad[2][0] + quad[3][0]),
                    0.25 * (quad[0][1] + quad[1][1] + quad[2][1] + quad[3][1]),
                ]);
            }
        }

        let mut ifaces = Vec::with_capacity((ext_i + 1) * ext_j);
        for j in 0..ext_j {
            for i in 0..=ext_i {
                let a = nd(i, j);
                let b = nd(i, j + 1);
                // edge a -> b rotated clockwise points toward +i
                ifaces.push(FaceGeometry::from_area_vector(b[1] - a[1], -(b[0] - a[0]))?);
            }
        }
        let mut jfaces = Vec::with_capacity(ext_i * (ext_j + 1));
        for j in 0..=ext_j {
            for i in 0..ext_i {
                let a = nd(i, j);
                let b = nd(i + 1, j);
                jfaces.push(FaceGeometry::from_area_vector(-(b[1] - a[1]), b[0] - a[0])?);
            }
        }

        Ok(Self {
            ni,
            nj,
            nghost,
            topology,
            nodes,
            centers,
            volumes,
            ifaces,
            jfaces,
        })
    }

    /// Width of the ghost-extended lattice in cells.
    pub fn ext_ni(&self) -> usize {
        self.ni + 2 * self.nghost
    }

    pub fn ext_nj(&self) -> usize {
        self.nj + 2 * self.nghost
    }

    pub fn is_one_dimensional(&self) -> bool {
        self.nj == 1
    }

    pub fn is_periodic_i(&self) -> bool {
        self.topology == Topology::OGridPeriodicI
    }

    /// Flat index of cell `(i, j)` into ghost-extended cell tables.
    #[inline]
    pub fn cell(&self, i: isize, j: isize) -> usize {
        let g = self.nghost as isize;
        debug_assert!(i >= -g && i < self.ni as isize + g);
        debug_assert!(j >= -g && j < self.nj as isize + g);
        ((i + g) + (j + g) * self.ext_ni() as isize) as usize
    }

    #[inline]
    pub fn node(&self, i: isize, j: isize) -> [f64; 2] {
        let g = self.nghost as isize;
        self.nodes[((i + g) + (j + g) * (self.ext_ni() as isize + 1)) as usize]
    }

    #[inline]
    pub fn center(&self, i: isize, j: isize) -> [f64; 2] {
        self.centers[self.cell(i, j)]
    }

    #[inline]
    pub fn center_at(&self, cell: usize) -> [f64; 2] {
        self.centers[cell]
    }

    #[inline]
    pub fn volume_at(&self, cell: usize) -> f64 {
        self.volumes[cell]
    }

    /// `(i, j)` of a flat cell index.
    pub fn cell_coords(&self, cell: usize) -> (isize, isize) {
        let g = self.nghost as isize;
        let w = self.ext_ni() as isize;
        let c = cell as isize;
        (c % w - g, c / w - g)
    }

    #[inline]
    pub fn volume(&self, i: isize, j: isize) -> f64 {
        self.volumes[self.cell(i, j)]
    }

    #[inline]
    pub fn iface(&self, i: isize, j: isize) -> FaceGeometry {
        let g = self.nghost as isize;
        self.ifaces[((i + g) + (j + g) * (self.ext_ni() as isize + 1)) as usize]
    }

    #[inline]
    pub fn jface(&self, i: isize, j: isize) -> FaceGeometry {
        let g = self.nghost as isize;
        self.jfaces[((i + g) + (j + g) * self.ext_ni() as isize) as usize]
    }

    /// Sum of outward normal times length over the four faces of a cell.
    pub fn closure_residual(&self, i: isize, j: isize) -> [f64; 2] {
        let e = self.iface(i + 1, j);
        let w = self.iface(i, j);
        let n = self.jface(i, j + 1);
        let s = self.jface(i, j);
        [
            e.nx * e.len - w.nx * w.len + n.nx * n.len - s.nx * s.len,
            e.ny * e.len - w.ny * w.len + n.ny * n.len - s.ny * s.len,
        ]
    }

    /// Smallest edge length of a cell.
    pub fn min_width(&self, i: isize, j: isize) -> f64 {
        self.iface(i, j)
            .len
            .min(self.iface(i + 1, j).len)
            .min(self.jface(i, j).len)
            .min(self.jface(i, j + 1).len)
    }

    /// Perimeter of the `j = 0` face ring, i.e. the discretised body.
    pub fn inner_ring_perimeter(&self) -> f64 {
        (0..self.ni as isize).map(|i| self.jface(i, 0).len).sum()
    }

    /// Writes interior node coordinates as one `x y` pair per line, row-major.
    pub fn write_nodes<W: Write>(&self, mut out: W) -> Result<()> {
        for j in 0..=self.nj as isize {
            for i in 0..=self.ni as isize {
                let [x, y] = self.node(i, j);
                writeln!(out, "{x:.17e} {y:.17e}")?;
            }
        }
        Ok(())
    }
}

/// Face radii `r_0 = r_cyl .. r_n = r_far` with geometric growth.
pub fn radial_distribution(n_rad: usize, r_cyl: f64, r_far: f64, stretch: f64) -> Vec<f64> {
    let span = r_far - r_cyl;
    (0..=n_rad)
        .map(|j| {
            let w = if stretch == 1.0 {
                j as f64 / n_rad as f64
            } else {
                (stretch.powi(j as i32) - 1.0) / (stretch.powi(n_rad as i32) - 1.0)
            };
            if j == n_rad {
                r_far
            } else {
                r_cyl + span * w
            }
        })
        .collect()
}

/// Geometric ratio whose first radial spacing equals `first`.
pub fn stretch_for_first_spacing(n_rad: usize, r_cyl: f64, r_far: f64, first: f64) -> Result<f64> {
    let span = r_far - r_cyl;
    if !(first > 0.0) || n_rad < 1 {
        return Err(Error::InvalidGrid("first spacing must be positive".into()));
    }
    if first * n_rad as f64 >= span {
        return Ok(1.0);
    }
    let spacing = |s: f64| span * (s - 1.0) / (s.powi(n_rad as i32) - 1.0);
    let (mut lo, mut hi) = (1.0 + 1e-12, 2.0);
    while spacing(hi) > first {
        hi *= 1.5;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if spacing(mid) > first {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn polygon_area(pts: &[[f64; 2]]) -> f64 {
    let n = pts.len();
    0.5 * (0..n)
        .map(|k| {
            let a = pts[k];
            let b = pts[(k + 1) % n];
            a[0] * b[1] - b[0] * a[1]
        })
        .sum::<f64>()
}

/// Green-Gauss gradient over a closed polygon with vertex values `phi`.
/// Orientation-agnostic: the signed area and the boundary sum flip together.
pub(crate) fn polygon_gradient(pts: &[[f64; 2]], phi: &[f64]) -> [f64; 2] {
    let n = pts.len();
    let mut gx = 0.0;
    let mut gy = 0.0;
    for k in 0..n {
        let a = pts[k];
        let b = pts[(k + 1) % n];
        let m = 0.5 * (phi[k] + phi[(k + 1) % n]);
        gx += m * (b[1] - a[1]);
        gy -= m * (b[0] - a[0]);
    }
    let area = polygon_area(pts);
    [gx / area, gy / area]
}
