//! Intersections of disk planes with shapes, parity counting and the
//! boundary-touch test.
//!
//! Every candidate intersection is classified from three scale-free numbers:
//! the margin inside the shape piece (`> 0` strictly inside), the radial
//! margin `(|y - p| - r) / r` (`< 0` strictly inside the disk) and the
//! tangency `|vol_M(y) . omega|`.

use alloc::vec;
use alloc::vec::Vec;

use super::shape::{FlatDiskK, Location, ManifoldShape, SimplicialK, SphereK};
use super::{Degeneracy, Disk, DomainBall, Parity, ParityResult, DEGENERACY_TOL as TOL};
use crate::error::{Error, Result};
use crate::linalg;
use crate::math;
use crate::xalg::Blade;

#[derive(Default)]
struct Tally {
    count: usize,
    degeneracy: Option<Degeneracy>,
}

impl Tally {
    fn flag(&mut self, kind: Degeneracy) {
        if self.degeneracy.is_none() {
            self.degeneracy = Some(kind);
        }
    }

    fn candidate(&mut self, inside: f64, radial: f64, tangency: f64) {
        if inside.is_nan() || radial.is_nan() || tangency.is_nan() {
            self.flag(Degeneracy::Numerical);
        } else if inside < -TOL || radial > TOL {
        } else if inside <= TOL {
            self.flag(Degeneracy::ManifoldBoundary);
        } else if radial >= -TOL {
            self.flag(Degeneracy::DiskBoundary);
        } else if tangency < TOL {
            self.flag(Degeneracy::Tangent);
        } else {
            self.count += 1;
        }
    }

    fn finish(self) -> ParityResult {
        ParityResult {
            count: self.count,
            parity: Parity::of(self.count),
            degeneracy: self.degeneracy,
        }
    }
}

fn radial_margin(y: &[f64], p: &[f64], r: f64) -> f64 {
    (linalg::norm(&linalg::sub(y, p)) - r) / r
}

/// `(|delta - xi a| - r) / min(r, |delta|)` from
/// `|delta|^2 - 2 xi a.delta - r^2 t (2 - t)`, which stays accurate when `r`
/// is tiny or `xi / r` is close to one. The gap is measured against the
/// smaller of the two length scales, since for `r >> |delta|` its rounding
/// error is of order `|delta|`, not `r`.
fn anchored_radial(delta: &[f64], anchor: &AnchoredDisk<'_>) -> f64 {
    let (xi, r, t) = (anchor.xi, anchor.r, anchor.t);
    let delta_sq = linalg::dot(delta, delta);
    let num = delta_sq - 2.0 * xi * linalg::dot(anchor.a, delta) - r * r * t * (2.0 - t);
    let mut dist_sq = 0.0;
    for (d, a) in delta.iter().zip(anchor.a) {
        let e = d - xi * a;
        dist_sq += e * e;
    }
    let den = (math::sqrt(dist_sq) + r) * r.min(math::sqrt(delta_sq));
    if den > 0.0 {
        num / den
    } else if num > 0.0 {
        f64::INFINITY
    } else {
        f64::NAN
    }
}

fn check_compatible(shape: &ManifoldShape, normal: &Blade) -> Result<()> {
    if shape.dim() != normal.dim() {
        return Err(Error::DimensionMismatch {
            expected: shape.dim(),
            found: normal.dim(),
        });
    }
    if shape.grade() != normal.grade() {
        return Err(Error::GradeMismatch {
            expected: shape.grade(),
            found: normal.grade(),
        });
    }
    Ok(())
}

/// `A_{ji} = f_j . v_i` for the rows `f` and columns `v`.
fn frame_matrix(f: &[Vec<f64>], v: &[Vec<f64>]) -> Vec<f64> {
    let mut m = Vec::with_capacity(f.len() * v.len());
    for fj in f {
        for vi in v {
            m.push(linalg::dot(fj, vi));
        }
    }
    m
}

fn frame_rhs(f: &[Vec<f64>], x: &[f64], base: &[f64]) -> Vec<f64> {
    f.iter()
        .map(|fj| fj.iter().zip(x).zip(base).map(|((a, b), c)| a * (b - c)).sum())
        .collect()
}

/// `|A x - b| <= 1e-9 (|A| |x| + |b|)`.
fn residual_ok(a: &[f64], x: &[f64], b: &[f64]) -> bool {
    let k = x.len();
    let mut res = 0.0;
    for j in 0..k {
        let row = &a[j * k..(j + 1) * k];
        let e = linalg::dot(row, x) - b[j];
        res += e * e;
    }
    math::sqrt(res) <= TOL * (linalg::norm(a) * linalg::norm(x) + linalg::norm(b))
}

/// Cofactor null vector of the `k x (k + 1)` matrix `m`:
/// `d_i = (-1)^i det(m without column i)`, so `|d|^2 = det(m m^T)`.
fn null_vector(m: &[f64], k: usize) -> Vec<f64> {
    let mut d = vec![0.0; k + 1];
    let mut minor = vec![0.0; k * k];
    for (i, di) in d.iter_mut().enumerate() {
        for j in 0..k {
            let mut c = 0;
            for col in (0..=k).filter(|col| *col != i) {
                minor[j * k + c] = m[j * (k + 1) + col];
                c += 1;
            }
        }
        let det = linalg::det_in_place(&mut minor, k);
        *di = if i % 2 == 0 { det } else { -det };
    }
    d
}

fn combine(basis: &[Vec<f64>], coords: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n];
    for (c, b) in coords.iter().zip(basis) {
        linalg::axpy(*c, b, &mut out);
    }
    out
}

/// Outcome of intersecting one simplex with a disk.
#[derive(Debug, Clone, PartialEq)]
pub enum SimplexHit {
    Miss,
    Hit {
        point: Vec<f64>,
        barycentric: Vec<f64>,
        /// Smallest distance to a constraint boundary: the smallest barycentric
        /// coordinate or the relative radial gap `(r - |z - p|) / r`.
        margin: f64,
    },
    Degenerate(Degeneracy),
}

struct SimplexSolve {
    lambda: Vec<f64>,
    tangency: f64,
    inside: f64,
    well_posed: bool,
}

/// Solves `f_j . (v0 + E lambda - base) = 0`.
fn solve_simplex(s: &SimplicialK, index: usize, frame: &[Vec<f64>], base: &[f64]) -> Option<SimplexSolve> {
    let d = &s.data[index];
    let k = frame.len();
    let a = frame_matrix(frame, &d.edges);
    let tangency = math::abs(linalg::det(&a, k)) / d.edge_volume;
    if !(tangency >= TOL) {
        return None;
    }
    let b = frame_rhs(frame, base, &d.v0);
    let lambda = linalg::solve(&a, &b, k)?;
    let well_posed = residual_ok(&a, &lambda, &b);
    let inside = lambda
        .iter()
        .copied()
        .fold(1.0 - lambda.iter().sum::<f64>(), f64::min);
    Some(SimplexSolve {
        lambda,
        tangency,
        inside,
        well_posed,
    })
}

/// Whether simplex `index` can meet the disk at all (bounding-ball test),
/// with the plane through `plane_point` and the disk centred at `p`.
fn simplex_near(s: &SimplicialK, index: usize, frame: &[Vec<f64>], plane_point: &[f64], p: &[f64], r: f64) -> bool {
    let d = &s.data[index];
    let slack = 1.0 + 1e-6;
    let g = linalg::sub(&d.centroid, plane_point);
    let off_plane: f64 = frame
        .iter()
        .map(|f| {
            let c = linalg::dot(f, &g);
            c * c
        })
        .sum();
    if math::sqrt(off_plane) > d.bound * slack {
        return false;
    }
    linalg::norm(&linalg::sub(&d.centroid, p)) - d.bound * slack < r * slack
}

/// Intersects simplex `index` of `shape` with the disk's affine plane and
/// filters by `|z - p| < r`.
pub fn plane_simplex_intersect(shape: &SimplicialK, index: usize, disk: &Disk) -> Result<SimplexHit> {
    let n = shape.vertices().first().map_or(0, |v| v.len());
    if disk.dim() != n || disk.grade() != shape.simplices()[index].len() - 1 {
        return Err(Error::GradeMismatch {
            expected: shape.simplices()[index].len() - 1,
            found: disk.grade(),
        });
    }
    let frame = disk.normal().frame();
    let Some(sol) = solve_simplex(shape, index, frame, disk.center()) else {
        return Ok(SimplexHit::Degenerate(Degeneracy::Tangent));
    };
    if !sol.well_posed {
        return Ok(SimplexHit::Degenerate(Degeneracy::NearSingular));
    }
    let d = &shape.data[index];
    let mut point = d.v0.clone();
    for (l, e) in sol.lambda.iter().zip(&d.edges) {
        linalg::axpy(*l, e, &mut point);
    }
    let radial = radial_margin(&point, disk.center(), disk.radius());
    if sol.inside < 0.0 || radial >= 0.0 {
        return Ok(SimplexHit::Miss);
    }
    let mut barycentric = Vec::with_capacity(sol.lambda.len() + 1);
    barycentric.push(1.0 - sol.lambda.iter().sum::<f64>());
    barycentric.extend_from_slice(&sol.lambda);
    Ok(SimplexHit::Hit {
        point,
        barycentric,
        margin: sol.inside.min(-radial),
    })
}

/// Intersection points of a k-sphere with a disk.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereHits {
    /// Points strictly inside the open disk.
    pub points: Vec<Vec<f64>>,
    pub degeneracy: Option<Degeneracy>,
}

/// Intersects the plane `c + V` of the sphere with the disk plane
/// `p + [omega]^perp` (generically a line), solves `|y - c| = rho` on it and
/// keeps the points with `|y - p| < r`.
pub fn plane_sphere_intersect(sphere: &SphereK, disk: &Disk) -> Result<SphereHits> {
    let k = sphere.basis().len() - 1;
    let n = sphere.center().len();
    if disk.dim() != n || disk.grade() != k {
        return Err(Error::GradeMismatch {
            expected: k,
            found: disk.grade(),
        });
    }
    let rho = sphere.radius();
    let p = disk.center();
    let r = disk.radius();
    let frame = disk.normal().frame();
    let m = frame_matrix(frame, sphere.basis());
    let d = null_vector(&m, k);
    let d_sq = linalg::dot(&d, &d);
    let mut tally = Tally::default();
    let mut points = Vec::new();
    let reachable = linalg::norm(&linalg::sub(p, sphere.center())) - rho < r * (1.0 + 1e-6);
    if !(math::sqrt(d_sq) >= TOL) {
        if reachable {
            tally.flag(Degeneracy::NearSingular);
        }
        return Ok(SphereHits {
            points,
            degeneracy: tally.degeneracy,
        });
    }
    // minimal-norm solution x0 = M^T (M M^T)^{-1} g, orthogonal to d
    let g = frame_rhs(frame, p, sphere.center());
    let mut mmt = vec![0.0; k * k];
    for i in 0..k {
        for j in 0..k {
            mmt[i * k + j] = linalg::dot(&m[i * (k + 1)..(i + 1) * (k + 1)], &m[j * (k + 1)..(j + 1) * (k + 1)]);
        }
    }
    let y = linalg::solve(&mmt, &g, k).unwrap_or_else(|| vec![f64::NAN; k]);
    let mut x0 = vec![0.0; k + 1];
    for (j, yj) in y.iter().enumerate() {
        linalg::axpy(*yj, &m[j * (k + 1)..(j + 1) * (k + 1)], &mut x0);
    }
    let disc = rho * rho - linalg::dot(&x0, &x0);
    if disc.is_nan() {
        tally.flag(Degeneracy::Numerical);
    } else if disc < -TOL * rho * rho {
    } else if disc <= TOL * rho * rho {
        let y = linalg::add_to(sphere.center(), &combine(sphere.basis(), &x0, n));
        if radial_margin(&y, p, r) <= TOL {
            tally.flag(Degeneracy::Tangent);
        }
    } else {
        let tangency = math::sqrt(d_sq * disc) / rho;
        for sign in [1.0, -1.0] {
            let t = sign * math::sqrt(disc / d_sq);
            let mut x = x0.clone();
            linalg::axpy(t, &d, &mut x);
            let y = linalg::add_to(sphere.center(), &combine(sphere.basis(), &x, n));
            let radial = radial_margin(&y, p, r);
            let before = tally.count;
            tally.candidate(f64::INFINITY, radial, tangency);
            if tally.count > before {
                points.push(y);
            }
        }
    }
    Ok(SphereHits {
        points,
        degeneracy: tally.degeneracy,
    })
}

fn flat_disk_candidate(s: &FlatDiskK, frame: &[Vec<f64>], p: &[f64], r: f64, tally: &mut Tally) {
    let k = frame.len();
    let a = frame_matrix(frame, s.basis());
    let tangency = math::abs(linalg::det(&a, k));
    let reachable = linalg::norm(&linalg::sub(p, s.center())) - s.radius() < r * (1.0 + 1e-6);
    if !(tangency >= TOL) {
        if reachable {
            tally.flag(Degeneracy::Tangent);
        }
        return;
    }
    let g = frame_rhs(frame, p, s.center());
    let Some(x) = linalg::solve(&a, &g, k) else {
        tally.flag(Degeneracy::NearSingular);
        return;
    };
    if !residual_ok(&a, &x, &g) {
        tally.flag(Degeneracy::NearSingular);
        return;
    }
    let inside = (s.radius() - linalg::norm(&x)) / s.radius();
    let y = linalg::add_to(s.center(), &combine(s.basis(), &x, s.center().len()));
    tally.candidate(inside, radial_margin(&y, p, r), tangency);
}

/// Counts the points of `shape` inside the open disk and flags every
/// situation in which that count is not stable under perturbation.
pub fn parity_count(shape: &ManifoldShape, disk: &Disk) -> Result<ParityResult> {
    check_compatible(shape, disk.normal())?;
    let p = disk.center();
    let r = disk.radius();
    let frame = disk.normal().frame();
    let mut tally = Tally::default();
    match shape {
        ManifoldShape::PointSet(s) => {
            for y in s.points() {
                tally.candidate(f64::INFINITY, radial_margin(y, p, r), 1.0);
            }
        }
        ManifoldShape::Simplicial(s) => {
            for index in 0..s.data.len() {
                if !simplex_near(s, index, frame, p, p, r) {
                    continue;
                }
                match solve_simplex(s, index, frame, p) {
                    None => tally.flag(Degeneracy::Tangent),
                    Some(sol) if !sol.well_posed => tally.flag(Degeneracy::NearSingular),
                    Some(sol) => {
                        let d = &s.data[index];
                        let mut y = d.v0.clone();
                        for (l, e) in sol.lambda.iter().zip(&d.edges) {
                            linalg::axpy(*l, e, &mut y);
                        }
                        tally.candidate(sol.inside, radial_margin(&y, p, r), sol.tangency);
                    }
                }
            }
        }
        ManifoldShape::Sphere(s) => {
            let hits = plane_sphere_intersect(s, disk)?;
            tally.count = hits.points.len();
            tally.degeneracy = hits.degeneracy;
        }
        ManifoldShape::FlatDisk(s) => flat_disk_candidate(s, frame, p, r, &mut tally),
    }
    Ok(tally.finish())
}

/// A disk built around a point `z` of the shape: centre `p = z + xi a` with
/// `a` a unit vector in `[omega]^perp`, radius `r > xi`, and `t = 1 - xi / r`
/// carried separately so that it keeps full relative precision.
///
/// By construction `z` lies in the open disk, and the disk plane is exactly
/// `z + [omega]^perp`.
#[derive(Debug, Clone, Copy)]
pub struct AnchoredDisk<'a> {
    pub z: &'a [f64],
    pub location: &'a Location,
    pub a: &'a [f64],
    pub normal: &'a Blade,
    pub xi: f64,
    pub r: f64,
    pub t: f64,
}

impl AnchoredDisk<'_> {
    pub fn center(&self) -> Vec<f64> {
        let mut p = self.z.to_vec();
        linalg::axpy(self.xi, self.a, &mut p);
        p
    }

    pub fn to_disk(&self) -> Result<Disk> {
        Disk::new(self.center(), self.normal.clone(), self.r)
    }
}

/// [`parity_count`] for an anchored disk. The anchor `z` is counted exactly;
/// all other intersections are located relative to `z`.
///
/// Also returns `|vol_M(z) . omega|`.
pub fn parity_count_anchored(shape: &ManifoldShape, disk: &AnchoredDisk<'_>) -> Result<(ParityResult, f64)> {
    check_compatible(shape, disk.normal)?;
    let frame = disk.normal.frame();
    let z = disk.z;
    let mut tally = Tally::default();
    let anchor_tangency = match (shape, disk.location) {
        (ManifoldShape::PointSet(s), Location::Atom(i)) => {
            for (j, y) in s.points().iter().enumerate() {
                if j != *i {
                    tally.candidate(f64::INFINITY, anchored_radial(&linalg::sub(y, z), disk), 1.0);
                }
            }
            1.0
        }
        (ManifoldShape::Simplicial(s), Location::Simplex { index, .. }) => {
            let p = disk.center();
            for other in (0..s.data.len()).filter(|o| o != index) {
                if !simplex_near(s, other, frame, z, &p, disk.r) {
                    continue;
                }
                match solve_simplex(s, other, frame, z) {
                    None => tally.flag(Degeneracy::Tangent),
                    Some(sol) if !sol.well_posed => tally.flag(Degeneracy::NearSingular),
                    Some(sol) => {
                        let d = &s.data[other];
                        let mut delta = linalg::sub(&d.v0, z);
                        for (l, e) in sol.lambda.iter().zip(&d.edges) {
                            linalg::axpy(*l, e, &mut delta);
                        }
                        tally.candidate(sol.inside, anchored_radial(&delta, disk), sol.tangency);
                    }
                }
            }
            math::abs(s.data[*index].tangent.inner(disk.normal)?)
        }
        (ManifoldShape::Sphere(s), Location::Chart(xz)) => {
            let k = frame.len();
            let m = frame_matrix(frame, s.basis());
            let d = null_vector(&m, k);
            let d_sq = linalg::dot(&d, &d);
            let xd = linalg::dot(xz, &d);
            let tangency = math::abs(xd) / s.radius();
            if tangency >= TOL {
                let t_star = -2.0 * xd / d_sq;
                let delta = combine(s.basis(), &linalg::scaled(t_star, &d), z.len());
                tally.candidate(f64::INFINITY, anchored_radial(&delta, disk), tangency);
            }
            tangency
        }
        (ManifoldShape::FlatDisk(s), Location::Chart(_)) => {
            let a = frame_matrix(frame, s.basis());
            math::abs(linalg::det(&a, frame.len()))
        }
        _ => return Err(Error::NotOnShape("anchor location does not match the shape".into())),
    };
    let inside = shape.boundary_margin(disk.location);
    if anchor_tangency.is_nan() {
        tally.flag(Degeneracy::Numerical);
    } else if inside <= TOL {
        tally.flag(Degeneracy::ManifoldBoundary);
    } else if anchor_tangency < TOL {
        tally.flag(Degeneracy::Tangent);
    } else {
        tally.count += 1;
    }
    Ok((tally.finish(), anchor_tangency))
}

fn touch_from_parts(par_sq: f64, perp_sq_minus_r_sq: f64, perp_sq: f64, r: f64, big_r: f64) -> bool {
    let perp = math::sqrt(perp_sq.max(0.0));
    let den = perp + r;
    let gap = if den > 0.0 { perp_sq_minus_r_sq / den } else { 0.0 };
    par_sq + gap * gap < big_r * big_r
}

/// Whether the boundary sphere of the disk meets the open ball `Omega`:
/// with `d_par = P_omega(c - p)` and `d_perp = P_omega^perp(c - p)`, the
/// closest boundary point is at distance `sqrt(|d_par|^2 + (|d_perp| - r)^2)`.
pub fn boundary_touches_omega(disk: &Disk, omega: &DomainBall) -> Result<bool> {
    if disk.dim() != omega.dim() {
        return Err(Error::DimensionMismatch {
            expected: disk.dim(),
            found: omega.dim(),
        });
    }
    let w = linalg::sub(omega.center(), disk.center());
    let par_sq = disk.normal().parallel_norm_sq(&w);
    let perp_sq = (linalg::dot(&w, &w) - par_sq).max(0.0);
    let r = disk.radius();
    Ok(touch_from_parts(par_sq, perp_sq - r * r, perp_sq, r, omega.radius()))
}

/// [`boundary_touches_omega`] for an anchored disk, computed relative to `z`.
pub fn boundary_touches_omega_anchored(disk: &AnchoredDisk<'_>, omega: &DomainBall) -> bool {
    let w = linalg::sub(omega.center(), disk.z);
    let par_sq = disk.normal.parallel_norm_sq(&w);
    let w_perp_sq = (linalg::dot(&w, &w) - par_sq).max(0.0);
    let (xi, r, t) = (disk.xi, disk.r, disk.t);
    let aw = linalg::dot(disk.a, &w);
    let perp_sq = w_perp_sq - 2.0 * xi * aw + xi * xi;
    let diff = w_perp_sq - 2.0 * xi * aw - r * r * t * (2.0 - t);
    touch_from_parts(par_sq, diff, perp_sq, r, omega.radius())
}
