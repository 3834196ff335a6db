//! Relative residuals of the exterior-algebra identities.
//!
//! Each function returns `|lhs - rhs|` divided by the natural scale of the
//! inputs, so a correct implementation yields values near machine precision.
//! [`random_trial`] evaluates all of them on one random instance.

use alloc::vec::Vec;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Result};
use crate::linalg;
use crate::math;
use crate::xalg::{basis_masks, Blade, LinearMap, MultiVector};

fn rel(diff: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        diff / scale
    } else {
        diff
    }
}

/// `|a|^2 |w|^2 = |a _| w|^2 + |a ^ w|^2`.
pub fn lagrange(a: &[f64], w: &MultiVector) -> Result<f64> {
    let av = MultiVector::from_vector(a)?;
    let inner = if w.grade() == 0 { 0.0 } else { av.interior_left(w)?.norm() };
    let outer = if w.grade() == w.dim() { 0.0 } else { av.wedge(w)?.norm() };
    let lhs = linalg::dot(a, a) * w.norm() * w.norm();
    Ok(rel(math::abs(lhs - inner * inner - outer * outer), lhs))
}

/// `a _| (b ^ w) + b ^ (a _| w) = (a . b) w`.
pub fn anticommutation(a: &[f64], b: &[f64], w: &MultiVector) -> Result<f64> {
    let (n, k) = (w.dim(), w.grade());
    let av = MultiVector::from_vector(a)?;
    let bv = MultiVector::from_vector(b)?;
    let first = if k == n { MultiVector::zero(n, k)? } else { av.interior_left(&bv.wedge(w)?)? };
    let second = if k == 0 { MultiVector::zero(n, k)? } else { bv.wedge(&av.interior_left(w)?)? };
    let lhs = first.add(&second)?;
    let rhs = w.scale(linalg::dot(a, b));
    Ok(rel(lhs.sub(&rhs)?.norm(), linalg::norm(a) * linalg::norm(b) * w.norm()))
}

/// `(w ^ l) _| m = l _| (w _| m)`.
pub fn nesting(w: &MultiVector, l: &MultiVector, m: &MultiVector) -> Result<f64> {
    if w.grade() + l.grade() > m.grade() {
        return Err(invalid("nesting requires grade(w) + grade(l) <= grade(m)"));
    }
    let lhs = w.wedge(l)?.interior_left(m)?;
    let rhs = l.interior_left(&w.interior_left(m)?)?;
    Ok(rel(lhs.sub(&rhs)?.norm(), w.norm() * l.norm() * m.norm()))
}

/// For an orthonormal frame, `b ^ (u_i _| u_1 ^ ... ^ u_k)` is the wedge with
/// `u_i` replaced by `b`.
pub fn replacement(frame: &[Vec<f64>], i: usize, b: &[f64]) -> Result<f64> {
    let n = b.len();
    if i >= frame.len() {
        return Err(invalid("replacement index out of range"));
    }
    let w = MultiVector::wedge_of_vectors(n, frame)?;
    let lhs = MultiVector::from_vector(b)?.wedge(&MultiVector::from_vector(&frame[i])?.interior_left(&w)?)?;
    let mut replaced = frame.to_vec();
    replaced[i] = b.to_vec();
    let rhs = MultiVector::wedge_of_vectors(n, &replaced)?;
    Ok(rel(lhs.sub(&rhs)?.norm(), linalg::norm(b)))
}

/// `|a _| mu| = |mu| |P_mu a|` for `mu = v_1 ^ ... ^ v_k`.
pub fn projection_interior(a: &[f64], vectors: &[Vec<f64>]) -> Result<f64> {
    let n = a.len();
    let mu = MultiVector::wedge_of_vectors(n, vectors)?;
    let (blade, _) = Blade::from_frame(n, vectors)?;
    let (par, _) = blade.project(a);
    let lhs = MultiVector::from_vector(a)?.interior_left(&mu)?.norm();
    let rhs = mu.norm() * linalg::norm(&par);
    Ok(rel(math::abs(lhs - rhs), linalg::norm(a) * mu.norm()))
}

/// `|a| |P_a^perp mu| = |mu| |P_mu^perp a|` for `mu = v_1 ^ ... ^ v_k`, with
/// `P_a^perp mu` the push-forward of `mu` by the projector onto `a^perp`.
pub fn projection_perp(a: &[f64], vectors: &[Vec<f64>]) -> Result<f64> {
    let n = a.len();
    let mu = MultiVector::wedge_of_vectors(n, vectors)?;
    let (blade, _) = Blade::from_frame(n, vectors)?;
    let (_, perp) = blade.project(a);
    let lhs = linalg::norm(a) * LinearMap::perp_projector(a)?.push_forward(&mu)?.norm();
    let rhs = mu.norm() * linalg::norm(&perp);
    Ok(rel(math::abs(lhs - rhs), linalg::norm(a) * mu.norm()))
}

/// Largest violation of `w . (v _| l) = (v ^ w) . l` over all basis triples
/// of `Lambda(R^n)`.
pub fn adjointness_exhaustive(n: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    let basis = |k: usize| -> Result<Vec<MultiVector>> {
        basis_masks(n, k)
            .into_iter()
            .map(|m| MultiVector::basis_blade(n, &(0..n).filter(|i| m & (1 << i) != 0).collect::<Vec<_>>()))
            .collect()
    };
    let all: Vec<Vec<MultiVector>> = (0..=n).map(basis).collect::<Result<_>>()?;
    for k in 0..=n {
        for l in 0..=k {
            for v in &all[l] {
                for lam in &all[k] {
                    let c = v.interior_left(lam)?;
                    for w in &all[k - l] {
                        let lhs = w.inner(&c)?;
                        let rhs = v.wedge(w)?.inner(lam)?;
                        worst = worst.max(math::abs(lhs - rhs));
                    }
                }
            }
        }
    }
    Ok(worst)
}

/// Residuals of one random instance.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TrialResiduals {
    pub lagrange: f64,
    pub anticommutation: f64,
    pub nesting: f64,
    pub replacement: f64,
    pub projection_interior: f64,
    pub projection_perp: f64,
}

impl TrialResiduals {
    pub fn max(&self) -> f64 {
        [
            self.lagrange,
            self.anticommutation,
            self.nesting,
            self.replacement,
            self.projection_interior,
            self.projection_perp,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    pub fn max_with(&mut self, other: &Self) {
        self.lagrange = self.lagrange.max(other.lagrange);
        self.anticommutation = self.anticommutation.max(other.anticommutation);
        self.nesting = self.nesting.max(other.nesting);
        self.replacement = self.replacement.max(other.replacement);
        self.projection_interior = self.projection_interior.max(other.projection_interior);
        self.projection_perp = self.projection_perp.max(other.projection_perp);
    }
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.sample(StandardNormal)).collect()
}

fn random_multivector<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize) -> Result<MultiVector> {
    MultiVector::from_coeffs(n, k, gaussian(rng, linalg::binomial(n, k)))
}

/// Evaluates every identity on Gaussian inputs with ambient dimension `n` and
/// grade `k` (`1 <= k <= n`). Grades of the nesting factors are split
/// randomly; the simple k-vectors come from Gaussian frames.
pub fn random_trial<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<TrialResiduals> {
    if !(1 <= k && k <= n) {
        return Err(invalid("random trials require 1 <= k <= n"));
    }
    let a = gaussian(rng, n);
    let b = gaussian(rng, n);
    let w = random_multivector(rng, n, k)?;
    let g1 = rng.random_range(0..=k);
    let g2 = rng.random_range(0..=k - g1);
    let outer = random_multivector(rng, n, g1)?;
    let inner = random_multivector(rng, n, g2)?;
    let vectors: Vec<Vec<f64>> = (0..k).map(|_| gaussian(rng, n)).collect();
    let frame = linalg::gram_schmidt(&vectors).frame;
    let i = rng.random_range(0..k);
    Ok(TrialResiduals {
        lagrange: lagrange(&a, &w)?,
        anticommutation: anticommutation(&a, &b, &w)?,
        nesting: nesting(&outer, &inner, &w)?,
        replacement: replacement(&frame, i, &b)?,
        projection_interior: projection_interior(&a, &vectors)?,
        projection_perp: projection_perp(&a, &vectors)?,
    })
}
