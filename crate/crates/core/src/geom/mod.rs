//! Disks, ball domains and manifold shapes.
//!
//! A disk `D(p, omega, r)` is the open `(n - k)`-dimensional ball of radius `r`
//! centred at `p` inside the affine plane `p + [omega]^perp`. Its boundary is
//! the `(n - k - 1)`-sphere at distance `r` from `p` in that plane.

mod intersect;
mod shape;

pub use intersect::{
    boundary_touches_omega, boundary_touches_omega_anchored, parity_count, parity_count_anchored,
    plane_simplex_intersect, plane_sphere_intersect, AnchoredDisk, SimplexHit, SphereHits,
};
pub use shape::{
    FlatDiskK, Location, ManifoldShape, PointSet, SimplicialK, SphereK, SurfacePoint,
};

use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::linalg;
use crate::math;
use crate::xalg::Blade;

/// Relative tolerance used by every degeneracy test.
pub const DEGENERACY_TOL: f64 = 1e-9;

fn check_point(p: &[f64], n: usize, what: &str) -> Result<()> {
    if p.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: p.len(),
        });
    }
    if p.iter().any(|x| !x.is_finite()) {
        return Err(invalid(alloc::format!("{what} has non-finite coordinates")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Disk {
    center: Vec<f64>,
    normal: Blade,
    radius: f64,
}

impl Disk {
    pub fn new(center: Vec<f64>, normal: Blade, radius: f64) -> Result<Self> {
        check_point(&center, normal.dim(), "disk center")?;
        if normal.grade() >= normal.dim() {
            return Err(invalid("disk normal must have grade k < n"));
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(invalid("disk radius must be positive and finite"));
        }
        Ok(Self {
            center,
            normal,
            radius,
        })
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn normal(&self) -> &Blade {
        &self.normal
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn dim(&self) -> usize {
        self.normal.dim()
    }

    pub fn grade(&self) -> usize {
        self.normal.grade()
    }
}

/// Open ball `{x : |x - c| < R}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainBall {
    center: Vec<f64>,
    radius: f64,
}

impl DomainBall {
    pub fn new(center: Vec<f64>, radius: f64) -> Result<Self> {
        if center.is_empty() || center.len() > crate::xalg::MAX_DIM {
            return Err(Error::UnsupportedDimension(center.len()));
        }
        check_point(&center, center.len(), "domain center")?;
        if !(radius.is_finite() && radius > 0.0) {
            return Err(invalid("domain radius must be positive and finite"));
        }
        Ok(Self { center, radius })
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn diameter(&self) -> f64 {
        2.0 * self.radius
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        linalg::norm(&linalg::sub(x, &self.center)) < self.radius
    }

    /// Largest distance from the centre to the set `c + rho * U(V) `, or to the
    /// solid ball `c + rho * B(V)` (same value), where `V` is spanned by the
    /// orthonormal `basis`.
    pub(crate) fn farthest_on_round(&self, c: &[f64], rho: f64, basis: &[Vec<f64>]) -> f64 {
        let w = linalg::sub(c, &self.center);
        let par_sq: f64 = basis
            .iter()
            .map(|b| {
                let c = linalg::dot(&w, b);
                c * c
            })
            .sum();
        let perp_sq = (linalg::dot(&w, &w) - par_sq).max(0.0);
        let par = math::sqrt(par_sq) + rho;
        math::sqrt(perp_sq + par * par)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(count: usize) -> Self {
        if count % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// Why a parity query could not be trusted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Degeneracy {
    /// The disk plane is (nearly) tangent to the shape at an intersection,
    /// or parallel to a simplex.
    Tangent,
    /// An intersection lies on the boundary of the shape or on a simplex facet.
    ManifoldBoundary,
    /// An intersection lies on the boundary sphere of the disk.
    DiskBoundary,
    /// The intersection system is too ill-conditioned to trust its solution.
    NearSingular,
    /// Non-finite intermediate values.
    Numerical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParityResult {
    /// Number of intersection points of the open disk with the shape.
    pub count: usize,
    pub parity: Parity,
    pub degeneracy: Option<Degeneracy>,
}

impl ParityResult {
    pub fn is_degenerate(&self) -> bool {
        self.degeneracy.is_some()
    }

    pub fn is_odd(&self) -> bool {
        self.parity == Parity::Odd
    }

    /// Number of intersections with the closed disk. Boundary coincidences are
    /// reported as degenerate, so for a clean result this equals `count`.
    pub fn multiplicity(&self) -> usize {
        self.count
    }
}
