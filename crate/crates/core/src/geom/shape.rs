use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Exp1, StandardNormal};

use super::{check_point, DomainBall};
use crate::constants;
use crate::error::{invalid, Error, Result};
use crate::linalg;
use crate::math;
use crate::xalg::{Blade, MAX_DIM};

const ORTHONORMAL_TOL: f64 = 1e-12;
const MIN_SIMPLEX_VOLUME: f64 = 1e-12;

fn check_dim(n: usize) -> Result<()> {
    if n == 0 || n > MAX_DIM {
        Err(Error::UnsupportedDimension(n))
    } else {
        Ok(())
    }
}

fn check_orthonormal(basis: &[Vec<f64>], n: usize) -> Result<()> {
    for (i, u) in basis.iter().enumerate() {
        check_point(u, n, "basis vector")?;
        for v in &basis[..=i] {
            let target = if core::ptr::eq(u, v) { 1.0 } else { 0.0 };
            if math::abs(linalg::dot(u, v) - target) > ORTHONORMAL_TOL {
                return Err(invalid("basis is not orthonormal within 1e-12"));
            }
        }
    }
    Ok(())
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// Where a point sits on a shape.
#[derive(Debug, Clone, PartialEq)]
pub enum Location {
    /// Index into a point set.
    Atom(usize),
    /// Simplex index and barycentric coordinates (`k + 1` of them, vertex order).
    Simplex { index: usize, barycentric: Vec<f64> },
    /// Coordinates with respect to the shape's orthonormal basis, relative to
    /// its centre (`k + 1` for a sphere, `k` for a flat disk).
    Chart(Vec<f64>),
}

/// A point drawn uniformly with respect to `H^k` on a shape.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfacePoint {
    pub z: Vec<f64>,
    pub location: Location,
    /// Density with respect to `H^k`, i.e. `1 / H^k(shape)`.
    pub density: f64,
}

/// Finitely many distinct points (`k = 0`).
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    n: usize,
    points: Vec<Vec<f64>>,
}

impl PointSet {
    pub fn new(n: usize, points: Vec<Vec<f64>>) -> Result<Self> {
        check_dim(n)?;
        if points.is_empty() {
            return Err(Error::ZeroMeasure);
        }
        for (i, p) in points.iter().enumerate() {
            check_point(p, n, "point")?;
            if points[..i].iter().any(|q| q == p) {
                return Err(invalid("point set contains a repeated point"));
            }
        }
        Ok(Self { n, points })
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct SimplexData {
    pub v0: Vec<f64>,
    pub edges: Vec<Vec<f64>>,
    /// `|E_1 ^ ... ^ E_k|`, i.e. `k!` times the simplex volume.
    pub edge_volume: f64,
    pub tangent: Blade,
    pub centroid: Vec<f64>,
    /// Largest distance from the centroid to a vertex.
    pub bound: f64,
}

/// A simplicial k-complex given by vertices and `(k + 1)`-tuples of indices.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplicialK {
    n: usize,
    k: usize,
    vertices: Vec<Vec<f64>>,
    simplices: Vec<Vec<usize>>,
    pub(crate) data: Vec<SimplexData>,
    cumulative: Vec<f64>,
}

impl SimplicialK {
    pub fn new(n: usize, k: usize, vertices: Vec<Vec<f64>>, simplices: Vec<Vec<usize>>) -> Result<Self> {
        check_dim(n)?;
        if k == 0 || k >= n {
            return Err(invalid("simplicial shapes need 1 <= k < n (use a point set for k = 0)"));
        }
        if simplices.is_empty() {
            return Err(Error::ZeroMeasure);
        }
        for v in &vertices {
            check_point(v, n, "vertex")?;
        }
        let mut data = Vec::with_capacity(simplices.len());
        let mut cumulative = Vec::with_capacity(simplices.len());
        let mut total = 0.0;
        for (s, idx) in simplices.iter().enumerate() {
            if idx.len() != k + 1 {
                return Err(invalid(format!("simplex {s} needs {} vertex indices", k + 1)));
            }
            for (j, &i) in idx.iter().enumerate() {
                if i >= vertices.len() {
                    return Err(invalid(format!("simplex {s} references missing vertex {i}")));
                }
                if idx[..j].contains(&i) {
                    return Err(invalid(format!("simplex {s} repeats vertex {i}")));
                }
            }
            let v0 = vertices[idx[0]].clone();
            let edges: Vec<Vec<f64>> = idx[1..].iter().map(|&i| linalg::sub(&vertices[i], &v0)).collect();
            let (tangent, edge_volume) = match Blade::from_frame(n, &edges) {
                Ok(b) => b,
                Err(_) => return Err(invalid(format!("simplex {s} is degenerate"))),
            };
            if edge_volume / factorial(k) <= MIN_SIMPLEX_VOLUME {
                return Err(invalid(format!("simplex {s} is degenerate")));
            }
            let mut centroid = vec![0.0; n];
            for &i in idx {
                linalg::axpy(1.0 / (k + 1) as f64, &vertices[i], &mut centroid);
            }
            let bound = idx
                .iter()
                .map(|&i| linalg::norm(&linalg::sub(&vertices[i], &centroid)))
                .fold(0.0, f64::max);
            total += edge_volume / factorial(k);
            cumulative.push(total);
            data.push(SimplexData {
                v0,
                edges,
                edge_volume,
                tangent,
                centroid,
                bound,
            });
        }
        Ok(Self {
            n,
            k,
            vertices,
            simplices,
            data,
            cumulative,
        })
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    pub fn simplices(&self) -> &[Vec<usize>] {
        &self.simplices
    }

    pub fn simplex_volume(&self, s: usize) -> f64 {
        self.data[s].edge_volume / factorial(self.k)
    }

    fn total(&self) -> f64 {
        *self.cumulative.last().expect("at least one simplex")
    }
}

/// The round k-sphere `{c + rho w : w in U(V)}`, `V` spanned by `k + 1`
/// orthonormal vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereK {
    n: usize,
    k: usize,
    center: Vec<f64>,
    radius: f64,
    basis: Vec<Vec<f64>>,
}

impl SphereK {
    pub fn new(n: usize, k: usize, center: Vec<f64>, radius: f64, basis: Vec<Vec<f64>>) -> Result<Self> {
        check_dim(n)?;
        if k == 0 || k >= n {
            return Err(invalid("k-spheres need 1 <= k < n (use a point set for k = 0)"));
        }
        check_point(&center, n, "sphere center")?;
        if !(radius.is_finite() && radius > 0.0) {
            return Err(invalid("sphere radius must be positive and finite"));
        }
        if basis.len() != k + 1 {
            return Err(invalid(format!("a {k}-sphere needs {} basis vectors", k + 1)));
        }
        check_orthonormal(&basis, n)?;
        Ok(Self {
            n,
            k,
            center,
            radius,
            basis,
        })
    }

    /// The unit sphere `S^{n-1}` of `R^n` centred at the origin.
    pub fn unit(n: usize) -> Result<Self> {
        let basis = (0..n)
            .map(|i| {
                let mut e = vec![0.0; n];
                e[i] = 1.0;
                e
            })
            .collect();
        Self::new(n, n.saturating_sub(1), vec![0.0; n], 1.0, basis)
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn basis(&self) -> &[Vec<f64>] {
        &self.basis
    }
}

/// The flat k-disk `{c + B x : |x| < rho}`.
#[derive(Debug, Clone, PartialEq)]
pub struct FlatDiskK {
    n: usize,
    k: usize,
    center: Vec<f64>,
    radius: f64,
    basis: Vec<Vec<f64>>,
}

impl FlatDiskK {
    pub fn new(n: usize, k: usize, center: Vec<f64>, radius: f64, basis: Vec<Vec<f64>>) -> Result<Self> {
        check_dim(n)?;
        if k == 0 || k >= n {
            return Err(invalid("flat disks need 1 <= k < n"));
        }
        check_point(&center, n, "disk center")?;
        if !(radius.is_finite() && radius > 0.0) {
            return Err(invalid("disk radius must be positive and finite"));
        }
        if basis.len() != k {
            return Err(invalid(format!("a flat {k}-disk needs {k} basis vectors")));
        }
        check_orthonormal(&basis, n)?;
        Ok(Self {
            n,
            k,
            center,
            radius,
            basis,
        })
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn basis(&self) -> &[Vec<f64>] {
        &self.basis
    }
}

/// A bounded k-dimensional shape in `R^n`.
#[derive(Debug, Clone, PartialEq)]
pub enum ManifoldShape {
    PointSet(PointSet),
    Simplicial(SimplicialK),
    Sphere(SphereK),
    FlatDisk(FlatDiskK),
}

impl ManifoldShape {
    pub fn dim(&self) -> usize {
        match self {
            Self::PointSet(s) => s.n,
            Self::Simplicial(s) => s.n,
            Self::Sphere(s) => s.n,
            Self::FlatDisk(s) => s.n,
        }
    }

    pub fn grade(&self) -> usize {
        match self {
            Self::PointSet(_) => 0,
            Self::Simplicial(s) => s.k,
            Self::Sphere(s) => s.k,
            Self::FlatDisk(s) => s.k,
        }
    }

    /// `H^k` of the shape.
    pub fn hausdorff_k(&self) -> f64 {
        match self {
            Self::PointSet(s) => s.points.len() as f64,
            Self::Simplicial(s) => s.total(),
            Self::Sphere(s) => constants::sphere_area(s.k) * math::powf(s.radius, s.k as f64),
            Self::FlatDisk(s) => {
                let (alpha, _) = constants::unit_ball_geometry(s.k).expect("k >= 1");
                alpha * math::powf(s.radius, s.k as f64)
            }
        }
    }

    fn check_location(&self, loc: &Location) -> Result<()> {
        let off = |msg: &str| Err(Error::NotOnShape(msg.into()));
        match (self, loc) {
            (Self::PointSet(s), Location::Atom(i)) if *i < s.points.len() => Ok(()),
            (Self::Simplicial(s), Location::Simplex { index, barycentric }) => {
                if *index >= s.data.len() || barycentric.len() != s.k + 1 {
                    return off("simplex location does not match the complex");
                }
                let sum: f64 = barycentric.iter().sum();
                if barycentric.iter().any(|b| !(*b >= -1e-12)) || math::abs(sum - 1.0) > 1e-9 {
                    return off("barycentric coordinates outside the simplex");
                }
                Ok(())
            }
            (Self::Sphere(s), Location::Chart(x)) => {
                if x.len() != s.k + 1 || math::abs(linalg::norm(x) - s.radius) > 1e-9 * s.radius {
                    return off("chart point is not on the sphere");
                }
                Ok(())
            }
            (Self::FlatDisk(s), Location::Chart(x)) => {
                if x.len() != s.k || !(linalg::norm(x) <= s.radius) {
                    return off("chart point is not on the disk");
                }
                Ok(())
            }
            _ => off("location kind does not match the shape"),
        }
    }

    /// The point of `R^n` described by `loc`.
    pub fn point_at(&self, loc: &Location) -> Result<Vec<f64>> {
        self.check_location(loc)?;
        Ok(match (self, loc) {
            (Self::PointSet(s), Location::Atom(i)) => s.points[*i].clone(),
            (Self::Simplicial(s), Location::Simplex { index, barycentric }) => {
                let d = &s.data[*index];
                let mut z = d.v0.clone();
                for (b, e) in barycentric[1..].iter().zip(&d.edges) {
                    linalg::axpy(*b, e, &mut z);
                }
                z
            }
            (Self::Sphere(SphereK { center, basis, .. }), Location::Chart(x))
            | (Self::FlatDisk(FlatDiskK { center, basis, .. }), Location::Chart(x)) => {
                let mut z = center.clone();
                for (c, b) in x.iter().zip(basis) {
                    linalg::axpy(*c, b, &mut z);
                }
                z
            }
            _ => unreachable!("checked above"),
        })
    }

    /// Unit k-blade spanning the tangent space at `loc` (orientation
    /// arbitrary); the scalar `+1` for point sets.
    pub fn volume_form_at(&self, loc: &Location) -> Result<Blade> {
        self.check_location(loc)?;
        Ok(match (self, loc) {
            (Self::PointSet(s), _) => Blade::scalar(s.n, true)?,
            (Self::Simplicial(s), Location::Simplex { index, .. }) => s.data[*index].tangent.clone(),
            (Self::Sphere(s), Location::Chart(x)) => sphere_tangent(s, x),
            (Self::FlatDisk(s), _) => Blade::from_orthonormal_unchecked(s.n, s.basis.clone()),
            _ => unreachable!("checked above"),
        })
    }

    /// Distance of `loc` from the shape's boundary (or from a simplex facet),
    /// in units of the local scale; infinite for shapes without boundary.
    pub fn boundary_margin(&self, loc: &Location) -> f64 {
        match (self, loc) {
            (Self::Simplicial(_), Location::Simplex { barycentric, .. }) => {
                barycentric.iter().copied().fold(f64::INFINITY, f64::min)
            }
            (Self::FlatDisk(s), Location::Chart(x)) => (s.radius - linalg::norm(x)) / s.radius,
            _ => f64::INFINITY,
        }
    }

    /// Draws a point uniformly with respect to `H^k`.
    pub fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> SurfacePoint {
        let density = 1.0 / self.hausdorff_k();
        let location = match self {
            Self::PointSet(s) => Location::Atom(rng.random_range(0..s.points.len())),
            Self::Simplicial(s) => {
                let u: f64 = rng.random::<f64>() * s.total();
                let index = s.cumulative.partition_point(|c| *c <= u).min(s.data.len() - 1);
                let mut barycentric: Vec<f64> = (0..=s.k).map(|_| rng.sample::<f64, _>(Exp1)).collect();
                let sum: f64 = barycentric.iter().sum();
                for b in barycentric.iter_mut() {
                    *b /= sum;
                }
                Location::Simplex { index, barycentric }
            }
            Self::Sphere(s) => {
                let x = loop {
                    let g: Vec<f64> = (0..=s.k).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
                    let len = linalg::norm(&g);
                    if len > 1e-150 {
                        break linalg::scaled(s.radius / len, &g);
                    }
                };
                Location::Chart(x)
            }
            Self::FlatDisk(s) => {
                let x = loop {
                    let g: Vec<f64> = (0..s.k).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
                    let len = linalg::norm(&g);
                    if len > 1e-150 {
                        let u: f64 = rng.random();
                        let rad = s.radius * math::powf(u, 1.0 / s.k as f64);
                        break linalg::scaled(rad / len, &g);
                    }
                };
                Location::Chart(x)
            }
        };
        let z = self.point_at(&location).expect("sampled location lies on the shape");
        SurfacePoint { z, location, density }
    }

    /// Checks `shape subset Omega` (strictly, as Omega is open).
    pub fn check_inside(&self, omega: &DomainBall) -> Result<()> {
        if omega.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: omega.dim(),
            });
        }
        let outside = |what: &str| Err(Error::ShapeOutsideDomain(what.into()));
        match self {
            Self::PointSet(s) => {
                if s.points.iter().any(|p| !omega.contains(p)) {
                    return outside("a point lies outside the domain ball");
                }
            }
            Self::Simplicial(s) => {
                let used = s.simplices.iter().flatten();
                if used.into_iter().any(|&i| !omega.contains(&s.vertices[i])) {
                    return outside("a vertex lies outside the domain ball");
                }
            }
            Self::Sphere(SphereK { center, radius, basis, .. })
            | Self::FlatDisk(FlatDiskK { center, radius, basis, .. }) => {
                if !(omega.farthest_on_round(center, *radius, basis) < omega.radius()) {
                    return outside("the shape reaches outside the domain ball");
                }
            }
        }
        Ok(())
    }
}

/// Tangent blade of a sphere at chart point `x`: an orthonormal basis of
/// `V cap x^perp`, found by pivoted Gram-Schmidt in chart coordinates.
fn sphere_tangent(s: &SphereK, x: &[f64]) -> Blade {
    let m = s.k + 1;
    let xhat = linalg::scaled(1.0 / linalg::norm(x), x);
    let mut chosen: Vec<Vec<f64>> = vec![xhat];
    let mut used = vec![false; m];
    for _ in 0..s.k {
        let mut best: Option<(usize, Vec<f64>, f64)> = None;
        for i in (0..m).filter(|i| !used[*i]) {
            let mut w = vec![0.0; m];
            w[i] = 1.0;
            for _pass in 0..2 {
                for q in &chosen {
                    let c = linalg::dot(q, &w);
                    linalg::axpy(-c, q, &mut w);
                }
            }
            let len = linalg::norm(&w);
            if best.as_ref().map_or(true, |b| len > b.2) {
                best = Some((i, w, len));
            }
        }
        let (i, w, len) = best.expect("enough candidates");
        used[i] = true;
        chosen.push(linalg::scaled(1.0 / len, &w));
    }
    let frame = chosen[1..]
        .iter()
        .map(|c| {
            let mut u = vec![0.0; s.n];
            for (ci, b) in c.iter().zip(&s.basis) {
                linalg::axpy(*ci, b, &mut u);
            }
            u
        })
        .collect();
    Blade::from_orthonormal_unchecked(s.n, frame)
}
