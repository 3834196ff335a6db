use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::constants;
use crate::error::{invalid, Result};
use crate::linalg;
use crate::math;
use crate::xalg::Blade;

pub(crate) fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

/// Uniform unit vector in `R^n` (normalized Gaussian).
pub fn sample_unit_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    loop {
        let g = gaussian_vector(rng, n);
        let len = linalg::norm(&g);
        if len > 1e-150 {
            return linalg::scaled(1.0 / len, &g);
        }
    }
}

/// Uniform orthonormal p-frame in `R^q`: Gram-Schmidt applied to Gaussian
/// vectors.
pub fn sample_orthonormal_frame<R: Rng + ?Sized>(rng: &mut R, q: usize, p: usize) -> Vec<Vec<f64>> {
    loop {
        let raw: Vec<Vec<f64>> = (0..p).map(|_| gaussian_vector(rng, q)).collect();
        let o = linalg::gram_schmidt(&raw);
        if o.min_relative_residual > 1e-8 {
            return o.frame;
        }
    }
}

/// Draws `(a, omega)` from the rotation-invariant probability on
/// `W = {(a, omega) : a in [omega]^perp}`.
///
/// `a` is a normalized Gaussian; `omega` spans the orthonormalization of `k`
/// further Gaussian vectors against `a`. For `k = 0`, `omega` is a uniform sign.
pub fn sample_w<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<(Vec<f64>, Blade)> {
    if n == 0 || k >= n {
        return Err(invalid("sampling W requires 0 <= k < n"));
    }
    let a = sample_unit_vector(rng, n);
    if k == 0 {
        return Ok((a, Blade::scalar(n, rng.random::<bool>())?));
    }
    loop {
        let mut raw = Vec::with_capacity(k + 1);
        raw.push(a.clone());
        for _ in 0..k {
            raw.push(gaussian_vector(rng, n));
        }
        let o = linalg::gram_schmidt(&raw);
        if o.min_relative_residual > 1e-8 {
            let frame = o.frame.into_iter().skip(1).collect();
            return Ok((a, Blade::from_orthonormal_unchecked(n, frame)));
        }
    }
}

/// One draw of the radial variables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialDraw {
    pub xi: f64,
    pub r: f64,
    /// `1 - xi / r`, computed without cancellation.
    pub t: f64,
    /// `w(xi, r) / q(xi, r)` where `w = xi^{m-1} r^{-sigma}` on the support and
    /// `q` is the proposal density; see [`RadialProposal`].
    pub weight: f64,
}

/// Proposal for `(xi, r)` on the support `0 <= xi < r <= xi + D`.
///
/// After the Jacobian, the radial part of the integrand is
/// `r^{k-n-sigma} xi^{n-k-1}`. With `s = xi / r` it becomes
/// `s^{m-1} r^{-sigma}` (`m = n - k`) on `{0 <= s < 1, 0 < r <= D / (1 - s)}`,
/// whose total mass is `I = D^{1-sigma} B(m, sigma) / (1 - sigma)`.
///
/// `s` is drawn from its exact marginal `Beta(m, sigma)` (as a ratio of gamma
/// variables, so that `t = 1 - s` keeps full precision), and given `s`,
/// `r = (D / t) U^{1/gamma}` has density proportional to `r^{gamma - 1}`.
/// The tail parameter `alpha > 0` sets `gamma = (1 - sigma) 2 alpha / (1 + alpha)`;
/// `alpha = 1` reproduces the integrand exactly (constant weight `I`), and
/// every `alpha` keeps `gamma < 2 (1 - sigma)`, so the weight has finite
/// variance.
#[derive(Debug, Clone)]
pub struct RadialProposal {
    sigma: f64,
    codim: f64,
    diam: f64,
    gamma: f64,
    ln_diam: f64,
    mass: f64,
    shape_t: Gamma<f64>,
    shape_s: Gamma<f64>,
}

impl RadialProposal {
    pub fn new(sigma: f64, codim: usize, diam: f64, alpha: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma < 1.0) {
            return Err(invalid("sigma must lie in (0, 1)"));
        }
        if codim == 0 {
            return Err(invalid("the codimension n - k must be positive"));
        }
        if !(diam.is_finite() && diam > 0.0) {
            return Err(invalid("the domain diameter must be positive"));
        }
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(invalid("the proposal tail parameter must be positive"));
        }
        let gamma = (1.0 - sigma) * 2.0 * alpha / (1.0 + alpha);
        let mass = math::powf(diam, 1.0 - sigma) * constants::beta(codim as f64, sigma)? / (1.0 - sigma);
        Ok(Self {
            sigma,
            codim: codim as f64,
            diam,
            gamma,
            ln_diam: math::ln(diam),
            mass,
            shape_t: Gamma::new(sigma, 1.0).map_err(|_| invalid("bad gamma shape"))?,
            shape_s: Gamma::new(codim as f64, 1.0).map_err(|_| invalid("bad gamma shape"))?,
        })
    }

    /// Total mass `I` of the radial integrand.
    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn diam(&self) -> f64 {
        self.diam
    }

    /// Exponent `gamma` of the conditional law of `r`.
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Joint density of the proposal at `(xi, r)` with respect to `dxi dr`.
    pub fn density(&self, xi: f64, r: f64) -> f64 {
        if !(xi >= 0.0 && r > xi && r <= xi + self.diam) {
            return 0.0;
        }
        let m = self.codim;
        let s = xi / r;
        let t = 1.0 - s;
        let beta = constants::beta(m, self.sigma).expect("valid parameters");
        let f_s = math::powf(s, m - 1.0) * math::powf(t, self.sigma - 1.0) / beta;
        let big_r = self.diam / t;
        let f_r = self.gamma * math::powf(r, self.gamma - 1.0) / math::powf(big_r, self.gamma);
        // d(xi) = r ds at fixed r
        f_s * f_r / r
    }

    /// Returns `None` when a draw is numerically unusable (for instance `t`
    /// underflowing to zero); the caller resamples.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<RadialDraw> {
        let x: f64 = self.shape_t.sample(rng);
        let y: f64 = self.shape_s.sample(rng);
        let sum = x + y;
        let t = x / sum;
        let s = y / sum;
        if !(t > 0.0 && t.is_finite() && s.is_finite()) {
            return None;
        }
        let u = 1.0 - rng.random::<f64>();
        let ln_u = math::ln(u);
        let ln_r = self.ln_diam - math::ln(t) + ln_u / self.gamma;
        let r = math::exp(ln_r);
        if !r.is_finite() {
            return None;
        }
        let one_minus_sigma = 1.0 - self.sigma;
        let ratio = one_minus_sigma / self.gamma * math::exp((one_minus_sigma - self.gamma) * ln_u / self.gamma);
        let weight = self.mass * ratio;
        if !weight.is_finite() {
            return None;
        }
        Some(RadialDraw {
            xi: s * r,
            r,
            t,
            weight,
        })
    }
}
