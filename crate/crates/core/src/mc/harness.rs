//! Monte-Carlo checks of the integral identities behind the constants.

use alloc::vec::Vec;

use rand::Rng;

use super::sampling::{sample_orthonormal_frame, sample_unit_vector, sample_w};
use super::stats::{zscore, MeanEstimate, Welford};
use super::stream_rng;
use crate::constants::{self, gamma, sphere_area};
use crate::error::{invalid, Error, Result};
use crate::math;
use crate::xalg::{Blade, MultiVector};

/// Mean and standard error of `|nu . omega|` for `(a, omega)` drawn from the
/// invariant probability on `W(n, k)`. Multiplying by
/// [`constants::w_measure`] estimates the integral of `|nu . omega|` over `W`.
pub fn mc_w_integral(n: usize, k: usize, nu: &Blade, samples: u64, seed: u64) -> Result<MeanEstimate> {
    if nu.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: nu.dim(),
        });
    }
    if nu.grade() != k {
        return Err(Error::GradeMismatch {
            expected: k,
            found: nu.grade(),
        });
    }
    let mut rng = stream_rng(seed, 0);
    let mut acc = Welford::new();
    for _ in 0..samples {
        let (_, omega) = sample_w(n, k, &mut rng)?;
        acc.push(math::abs(nu.inner(&omega)?));
    }
    Ok(MeanEstimate::from_welford(&acc))
}

/// Both sides of the frame-contraction reduction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StiefelCheck {
    /// Integral of `|(u_1 ^ ... ^ u_p) -| mu|` over orthonormal p-frames.
    pub lhs: MeanEstimate,
    /// Reduction factor times the same integral over (p-1)-frames.
    pub rhs: MeanEstimate,
    pub zscore: f64,
}

/// `2^{(p+1)/2} pi^{(q-p+1)/2} Gamma((k-p+2)/2) / (Gamma((k-p+1)/2) Gamma((q-p+2)/2))`.
pub fn contraction_factor(q: usize, k: usize, p: usize) -> Result<f64> {
    let (q, k, p) = (q as f64, k as f64, p as f64);
    Ok(math::powf(2.0, (p + 1.0) / 2.0) * math::powf(core::f64::consts::PI, (q - p + 1.0) / 2.0) * gamma((k - p + 2.0) / 2.0)?
        / (gamma((k - p + 1.0) / 2.0)? * gamma((q - p + 2.0) / 2.0)?))
}

fn frame_contraction<R: Rng + ?Sized>(rng: &mut R, q: usize, p: usize, mu: &MultiVector, samples: u64) -> Result<MeanEstimate> {
    let mut acc = Welford::new();
    if p == 0 {
        acc.push(mu.norm());
        return Ok(MeanEstimate::from_welford(&acc));
    }
    for _ in 0..samples {
        let frame = sample_orthonormal_frame(rng, q, p);
        let u = MultiVector::wedge_of_vectors(q, &frame)?;
        acc.push(u.interior_left(mu)?.norm());
    }
    Ok(MeanEstimate::from_welford(&acc).scaled(constants::stiefel_measure(q, p)?))
}

/// Compares the integral over orthonormal p-frames of `R^q` of
/// `|(u_1 ^ ... ^ u_p) -| mu|` with its reduction to (p-1)-frames. The two
/// sides use independent streams.
pub fn mc_stiefel_contraction(q: usize, k: usize, p: usize, mu: &MultiVector, samples: u64, seed: u64) -> Result<StiefelCheck> {
    if !(1 <= p && p <= k && k <= q) {
        return Err(invalid("requires 1 <= p <= k <= q"));
    }
    if mu.dim() != q || mu.grade() != k {
        return Err(Error::GradeMismatch {
            expected: k,
            found: mu.grade(),
        });
    }
    let lhs = frame_contraction(&mut stream_rng(seed, 0), q, p, mu, samples)?;
    let rhs = frame_contraction(&mut stream_rng(seed, 1), q, p - 1, mu, samples)?.scaled(contraction_factor(q, k, p)?);
    Ok(StiefelCheck {
        lhs,
        rhs,
        zscore: lhs.zscore_between(&rhs),
    })
}

/// Test integrands on the unit sphere.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SphereIntegrand {
    One,
    AbsFirst,
    FirstSquared,
}

impl SphereIntegrand {
    pub fn eval(self, x: &[f64]) -> f64 {
        match self {
            Self::One => 1.0,
            Self::AbsFirst => math::abs(x[0]),
            Self::FirstSquared => x[0] * x[0],
        }
    }

    /// Exact integral over `S^{d-1}`.
    pub fn exact(self, d: usize) -> Result<f64> {
        let area = sphere_area(d - 1);
        let df = d as f64;
        Ok(match self {
            Self::One => area,
            Self::FirstSquared => area / df,
            Self::AbsFirst => {
                area * gamma(df / 2.0)? / (math::sqrt(core::f64::consts::PI) * gamma((df + 1.0) / 2.0)?)
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereSplit {
    /// Uniform sampling on `S^{d-1}`.
    pub direct: MeanEstimate,
    /// Iterated form over `(y, y', theta)`.
    pub iterated: MeanEstimate,
    pub exact: f64,
    pub zscore: f64,
}

/// Integrates `g` over `S^{d-1}` directly and through the splitting
/// `x = cos(theta) y + sin(theta) y'` with `y` in the first `l` coordinates,
/// `y'` in the remaining `d - l` and weight `cos^{l-1} sin^{d-l-1}`.
pub fn mc_sphere_split(d: usize, l: usize, g: SphereIntegrand, samples: u64, seed: u64) -> Result<SphereSplit> {
    if !(l >= 1 && d > l) {
        return Err(invalid("requires 1 <= l < d"));
    }
    let mut rng = stream_rng(seed, 0);
    let mut direct = Welford::new();
    for _ in 0..samples {
        direct.push(g.eval(&sample_unit_vector(&mut rng, d)));
    }
    let mut rng = stream_rng(seed, 1);
    let mut iterated = Welford::new();
    let half_pi = core::f64::consts::FRAC_PI_2;
    let mut x = Vec::with_capacity(d);
    for _ in 0..samples {
        let y = sample_unit_vector(&mut rng, l);
        let y2 = sample_unit_vector(&mut rng, d - l);
        let theta = half_pi * rng.random::<f64>();
        let (c, s) = (math::cos(theta), math::sin(theta));
        x.clear();
        x.extend(y.iter().map(|v| c * v));
        x.extend(y2.iter().map(|v| s * v));
        let w = math::powf(c, (l - 1) as f64) * math::powf(s, (d - l - 1) as f64);
        iterated.push(g.eval(&x) * w);
    }
    let direct = MeanEstimate::from_welford(&direct).scaled(sphere_area(d - 1));
    let iterated = MeanEstimate::from_welford(&iterated).scaled(sphere_area(l - 1) * sphere_area(d - l - 1) * half_pi);
    Ok(SphereSplit {
        direct,
        iterated,
        exact: g.exact(d)?,
        zscore: zscore(direct.mean - iterated.mean, math::sqrt(direct.stderr * direct.stderr + iterated.stderr * iterated.stderr)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::vfbound_constant;

    fn random_unit_blade(n: usize, k: usize, seed: u64) -> Blade {
        let mut rng = stream_rng(seed, 99);
        Blade::from_orthonormal(n, sample_orthonormal_frame(&mut rng, n, k)).unwrap()
    }

    #[test]
    fn w_integral_matches_closed_form() {
        for (n, k) in [(2, 1), (3, 1), (3, 2), (4, 2)] {
            let nu = random_unit_blade(n, k, 7);
            let est = mc_w_integral(n, k, &nu, 100_000, 11).unwrap().scaled(constants::w_measure(n, k).unwrap());
            let z = est.zscore_against(vfbound_constant(n, k).unwrap());
            assert!(z.abs() < 4.0, "({n},{k}) z = {z}");
        }
    }

    #[test]
    fn w_integral_of_a_point_is_exact() {
        let nu = Blade::scalar(1, true).unwrap();
        let est = mc_w_integral(1, 0, &nu, 1000, 1).unwrap().scaled(constants::w_measure(1, 0).unwrap());
        assert_eq!(est.mean, 4.0);
        assert_eq!(est.stderr, 0.0);
    }

    #[test]
    fn w_integral_plane_value() {
        let nu = random_unit_blade(2, 1, 3);
        let est = mc_w_integral(2, 1, &nu, 100_000, 5).unwrap().scaled(constants::w_measure(2, 1).unwrap());
        assert!(est.zscore_against(8.0 * 2f64.sqrt()).abs() < 4.0);
    }

    #[test]
    fn contraction_factor_values() {
        assert!((contraction_factor(3, 2, 1).unwrap() - core::f64::consts::PI.powi(2)).abs() < 1e-12);
        // p = k = 1: 2 pi^{q/2} / (Gamma(1/2) Gamma((q+1)/2))
        for q in 2..7 {
            let qf = q as f64;
            let want = 2.0 * core::f64::consts::PI.powf(qf / 2.0)
                / (core::f64::consts::PI.sqrt() * gamma((qf + 1.0) / 2.0).unwrap());
            assert!((contraction_factor(q, 1, 1).unwrap() - want).abs() < 1e-12 * want);
        }
    }

    #[test]
    fn stiefel_contraction_is_consistent() {
        let mut rng = stream_rng(2, 5);
        let mu = MultiVector::from_coeffs(3, 2, (0..3).map(|_| rng.random::<f64>() - 0.5).collect()).unwrap();
        let check = mc_stiefel_contraction(3, 2, 1, &mu, 100_000, 9).unwrap();
        assert!(check.zscore.abs() < 4.0, "{check:?}");
        let mu = MultiVector::from_coeffs(4, 2, (0..6).map(|_| rng.random::<f64>() - 0.5).collect()).unwrap();
        let check = mc_stiefel_contraction(4, 2, 2, &mu, 50_000, 10).unwrap();
        assert!(check.zscore.abs() < 4.0, "{check:?}");
    }

    #[test]
    fn stiefel_contraction_single_vector() {
        let mu = MultiVector::from_vector(&[0.0, 0.6, 0.8, 0.0]).unwrap();
        let check = mc_stiefel_contraction(4, 1, 1, &mu, 100_000, 4).unwrap();
        assert_eq!(check.rhs.stderr, 0.0);
        assert!((check.rhs.mean - contraction_factor(4, 1, 1).unwrap()).abs() < 1e-12);
        assert!(check.zscore.abs() < 4.0);
    }

    #[test]
    fn stiefel_contraction_of_zero() {
        let mu = MultiVector::zero(3, 2).unwrap();
        let check = mc_stiefel_contraction(3, 2, 1, &mu, 100, 1).unwrap();
        assert_eq!((check.lhs.mean, check.rhs.mean, check.zscore), (0.0, 0.0, 0.0));
        assert!(mc_stiefel_contraction(3, 2, 3, &mu, 10, 1).is_err());
    }

    #[test]
    fn sphere_split_agrees() {
        for (d, l, g) in [
            (3, 1, SphereIntegrand::One),
            (4, 2, SphereIntegrand::AbsFirst),
            (5, 2, SphereIntegrand::FirstSquared),
            (2, 1, SphereIntegrand::AbsFirst),
        ] {
            let s = mc_sphere_split(d, l, g, 100_000, 21).unwrap();
            assert!(s.zscore.abs() < 4.0, "{d} {l} {g:?} {s:?}");
            assert!(s.iterated.zscore_against(s.exact).abs() < 4.0, "{s:?}");
            assert!(s.direct.zscore_against(s.exact).abs() < 4.0, "{s:?}");
        }
        assert!(mc_sphere_split(3, 3, SphereIntegrand::One, 1, 1).is_err());
    }

    #[test]
    fn constant_integrand_direct_is_exact() {
        let s = mc_sphere_split(3, 1, SphereIntegrand::One, 100, 1).unwrap();
        assert!((s.direct.mean - 4.0 * core::f64::consts::PI).abs() < 1e-12);
    }
}
