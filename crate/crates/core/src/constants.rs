//! Gamma and beta functions and the closed-form measure constants.
//!
//! Everything beyond [`gamma`] and [`beta`] is accumulated as a logarithm and
//! exponentiated once, so products of gamma values stay finite for `n <= 12`
//! and well beyond.

use crate::error::{invalid, Error, Result};
use crate::math;

const LN_PI: f64 = 1.144_729_885_849_400_2;
const LN_2: f64 = core::f64::consts::LN_2;
const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

// Lanczos approximation, g = 7, nine terms.
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

fn lanczos_sum(z: f64) -> f64 {
    let mut a = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (z + i as f64);
    }
    a
}

fn check_positive(x: f64, what: &str) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(invalid(alloc::format!("{what} requires a positive finite argument, got {x}")))
    }
}

/// Integer and half-integer arguments up to 40 are evaluated exactly by
/// recurrence from `Gamma(1) = 1` and `Gamma(1/2) = sqrt(pi)`.
fn gamma_by_recurrence(x: f64) -> Option<f64> {
    let twice = 2.0 * x;
    if x > 40.0 || twice != math::floor(twice) {
        return None;
    }
    let (mut t, mut g) = if twice % 2.0 == 0.0 {
        (1.0, 1.0)
    } else {
        (0.5, math::sqrt(core::f64::consts::PI))
    };
    while t < x {
        g *= t;
        t += 1.0;
    }
    Some(g)
}

/// `Gamma(x)` for `x > 0`.
pub fn gamma(x: f64) -> Result<f64> {
    check_positive(x, "gamma")?;
    if let Some(g) = gamma_by_recurrence(x) {
        return Ok(g);
    }
    if x < 0.5 {
        // reflection keeps the Lanczos sum in its accurate range
        let pi = core::f64::consts::PI;
        return Ok(pi / (math::sin(pi * x) * gamma(1.0 - x)?));
    }
    if x > 171.7 {
        return Ok(f64::INFINITY);
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    Ok(math::sqrt(2.0 * core::f64::consts::PI) * math::powf(t, z + 0.5) * math::exp(-t) * lanczos_sum(z))
}

/// `ln Gamma(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    check_positive(x, "ln_gamma")?;
    if x < 20.0 {
        return Ok(math::ln(gamma(x)?));
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    Ok(HALF_LN_2PI + (z + 0.5) * math::ln(t) - t + math::ln(lanczos_sum(z)))
}

/// `B(x, y) = Gamma(x) Gamma(y) / Gamma(x + y)`.
pub fn beta(x: f64, y: f64) -> Result<f64> {
    check_positive(x, "beta")?;
    check_positive(y, "beta")?;
    if x + y < 150.0 {
        Ok(gamma(x)? * gamma(y)? / gamma(x + y)?)
    } else {
        Ok(math::exp(ln_gamma(x)? + ln_gamma(y)? - ln_gamma(x + y)?))
    }
}

fn lg(x: f64) -> f64 {
    ln_gamma(x).expect("positive argument")
}

/// `ln omega_m`, the log-area of the unit sphere `S^m`.
fn ln_sphere(m: usize) -> f64 {
    let h = (m as f64 + 1.0) / 2.0;
    LN_2 + h * LN_PI - lg(h)
}

fn ln_ball(n: usize) -> f64 {
    let h = n as f64 / 2.0;
    h * LN_PI - lg(1.0 + h)
}

/// Area of the unit sphere `S^m` (so `sphere_area(n - 1)` is `omega_{n-1}`).
pub fn sphere_area(m: usize) -> f64 {
    math::exp(ln_sphere(m))
}

/// `(alpha_n, omega_{n-1})`: volume of the unit ball in `R^n` and area of its
/// boundary sphere.
pub fn unit_ball_geometry(n: usize) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(invalid("unit ball geometry requires n >= 1"));
    }
    Ok((math::exp(ln_ball(n)), sphere_area(n - 1)))
}

fn ln_so(n: usize) -> f64 {
    let mut acc = (n * (n - 1)) as f64 / 4.0 * LN_2;
    for j in 1..n {
        acc += ln_sphere(j);
    }
    acc
}

/// `H^{n(n-1)/2}(SO(n)) = 2^{n(n-1)/4} prod_{j=1}^{n-1} omega_j`.
pub fn so_measure(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(invalid("SO(n) measure requires n >= 1"));
    }
    Ok(math::exp(ln_so(n)))
}

fn ln_stiefel(q: usize, k: usize) -> f64 {
    let mut acc = (k * k.saturating_sub(1)) as f64 / 4.0 * LN_2;
    for p in 1..=k {
        acc += ln_sphere(q - p);
    }
    acc
}

fn check_grade(q: usize, k: usize) -> Result<()> {
    if k > q {
        Err(Error::GradeOverflow { k, l: 0, n: q })
    } else {
        Ok(())
    }
}

fn check_codim(n: usize, k: usize) -> Result<()> {
    if n == 0 || k >= n {
        Err(invalid(alloc::format!("requires 0 <= k < n, got n = {n}, k = {k}")))
    } else {
        Ok(())
    }
}

/// Measure of the orthonormal k-frames in `R^q`,
/// `2^{k(k-1)/4} prod_{p=1}^{k} omega_{q-p}`.
pub fn stiefel_measure(q: usize, k: usize) -> Result<f64> {
    check_grade(q, k)?;
    Ok(math::exp(ln_stiefel(q, k)))
}

fn ln_blade_manifold(q: usize, k: usize) -> f64 {
    if k == 0 {
        LN_2
    } else {
        ln_stiefel(q, k) - ln_so(k)
    }
}

/// Measure of the unit simple k-vectors of `R^q`: Stiefel measure over
/// `H(SO(k))`, and 2 for `k = 0` (the two signs).
pub fn blade_manifold_measure(q: usize, k: usize) -> Result<f64> {
    check_grade(q, k)?;
    if q == 0 {
        return Err(invalid("blade manifold measure requires q >= 1"));
    }
    Ok(math::exp(ln_blade_manifold(q, k)))
}

fn ln_w(n: usize, k: usize) -> f64 {
    k as f64 / 2.0 * LN_2 + ln_sphere(n - 1) + ln_blade_manifold(n - 1, k)
}

/// `H^m(W)` for the incidence space `W = {(a, omega) : a in [omega]^perp}`,
/// `m = n - 1 + k(n - k - 1)`.
pub fn w_measure(n: usize, k: usize) -> Result<f64> {
    check_codim(n, k)?;
    if k == 0 {
        return Ok(2.0 * sphere_area(n - 1));
    }
    Ok(math::exp(ln_w(n, k)))
}

/// Dimension `m = n - 1 + k(n - k - 1)` of `W`.
pub fn w_dimension(n: usize, k: usize) -> usize {
    n - 1 + k * (n - k - 1)
}

/// The gamma-function part shared by [`vfbound_constant`] and
/// [`limit_constant`], i.e. everything except the leading power of two.
fn ln_vf_core(n: usize, k: usize) -> f64 {
    let nf = n as f64;
    let kf = k as f64;
    let mut acc = (nf + 2.0) * (kf + 1.0) / 2.0 * LN_PI + lg((nf - kf + 1.0) / 2.0)
        - 0.5 * LN_PI
        - lg((nf + 1.0) / 2.0);
    for i in 1..=k + 1 {
        let fi = i as f64;
        acc += lg(fi / 2.0) - fi * LN_PI - lg((nf - fi + 1.0) / 2.0);
    }
    acc
}

/// `int_W |nu . omega| dH^m(a, omega)` for any unit simple k-vector `nu`.
pub fn vfbound_constant(n: usize, k: usize) -> Result<f64> {
    check_codim(n, k)?;
    Ok(math::exp((k as f64 + 4.0) / 2.0 * LN_2 + ln_vf_core(n, k)))
}

/// `C(n, k) = lim_{sigma -> 1} (1 - sigma) Meas^k_sigma(M, Omega) / H^k(M)`.
pub fn limit_constant(n: usize, k: usize) -> Result<f64> {
    check_codim(n, k)?;
    Ok(math::exp(math::ln(4.0 / (n - k) as f64) + ln_vf_core(n, k)))
}

/// Constant of the earlier fractional length functional,
/// `4 pi^{n-1} / (Gamma((n+1)/2) Gamma((n-1)/2) (n-1))`, for `n >= 2`.
pub fn fractional_length_constant(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(invalid("fractional length constant requires n >= 2"));
    }
    let nf = n as f64;
    Ok(math::exp(
        math::ln(4.0) + (nf - 1.0) * LN_PI
            - lg((nf + 1.0) / 2.0)
            - lg((nf - 1.0) / 2.0)
            - math::ln(nf - 1.0),
    ))
}

/// Every constant attached to a pair `(n, k)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantsReport {
    pub n: usize,
    pub k: usize,
    pub alpha_n: f64,
    pub omega_nm1: f64,
    pub so_measure: f64,
    pub stiefel_measure: f64,
    pub blade_manifold_measure: f64,
    pub w_measure: f64,
    pub vfbound_constant: f64,
    pub limit_constant: f64,
}

impl ConstantsReport {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        check_codim(n, k)?;
        let (alpha_n, omega_nm1) = unit_ball_geometry(n)?;
        Ok(Self {
            n,
            k,
            alpha_n,
            omega_nm1,
            so_measure: so_measure(n)?,
            stiefel_measure: stiefel_measure(n - 1, k)?,
            blade_manifold_measure: blade_manifold_measure(n - 1, k).unwrap_or(2.0),
            w_measure: w_measure(n, k)?,
            vfbound_constant: vfbound_constant(n, k)?,
            limit_constant: limit_constant(n, k)?,
        })
    }

    /// `limit / (2^{-k/2} vfbound / (n - k))`, which is 1 up to rounding.
    pub fn consistency_ratio(&self) -> f64 {
        let expected = math::powf(2.0, -(self.k as f64) / 2.0) * self.vfbound_constant
            / (self.n - self.k) as f64;
        self.limit_constant / expected
    }

    pub fn is_consistent(&self, tol: f64) -> bool {
        math::abs(self.consistency_ratio() - 1.0) <= tol
    }
}
