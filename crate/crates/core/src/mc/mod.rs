//! Monte-Carlo estimation of `Meas^k_sigma(M, Omega)` for `M` inside a ball.
//!
//! A disk `D(p, omega, r)` is parametrized by a point `z` of `M`, a pair
//! `(a, omega)` of the incidence space `W`, and the radial variables
//! `(xi, r)` through `p = z + xi a`. The change of variables has Jacobian
//! `xi^{n-k-1} 2^{-k/2} |vol_M(z) . omega|`, and each disk is reached once per
//! intersection point of `M` with its closure, so the estimator divides by
//! that multiplicity.
//!
//! Per stream, samples are generated by a ChaCha8 generator seeded from the
//! user seed with stream id `(sigma_index << 32) | stream`. Stream summaries
//! are merged in stream order, so results depend only on the seed and the
//! configuration, never on scheduling.

mod harness;
mod sampling;
mod stats;

pub use harness::{contraction_factor, mc_sphere_split, mc_stiefel_contraction, mc_w_integral, SphereIntegrand, SphereSplit, StiefelCheck};
pub use sampling::{sample_orthonormal_frame, sample_unit_vector, sample_w, RadialDraw, RadialProposal};
pub use stats::{MeanEstimate, Welford};

use alloc::vec::Vec;
use core::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::constants;
use crate::error::{invalid, Error, Result};
use crate::geom::{
    boundary_touches_omega_anchored, parity_count_anchored, AnchoredDisk, Degeneracy, DomainBall, ManifoldShape,
};
use crate::math;
use crate::xalg::Blade;

/// Configuration of one estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorConfig {
    pub sigma: f64,
    pub samples: u64,
    pub seed: u64,
    pub streams: u32,
    /// Tail parameter of the radial proposal; see [`RadialProposal`].
    pub xi_alpha: f64,
    pub max_degenerate_fraction: f64,
}

impl EstimatorConfig {
    pub fn new(sigma: f64, samples: u64, seed: u64) -> Self {
        Self {
            sigma,
            samples,
            seed,
            streams: 1,
            xi_alpha: 1.0,
            max_degenerate_fraction: 1e-3,
        }
    }

    pub fn with_streams(mut self, streams: u32) -> Self {
        self.streams = streams;
        self
    }

    pub fn with_xi_alpha(mut self, alpha: f64) -> Self {
        self.xi_alpha = alpha;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0 && self.sigma < 1.0) {
            return Err(invalid("sigma must lie in (0, 1)"));
        }
        if self.samples == 0 {
            return Err(invalid("the sample count must be positive"));
        }
        if self.streams == 0 {
            return Err(invalid("the stream count must be positive"));
        }
        if !(self.xi_alpha.is_finite() && self.xi_alpha > 0.0) {
            return Err(invalid("the proposal tail parameter must be positive"));
        }
        if !(self.max_degenerate_fraction >= 0.0 && self.max_degenerate_fraction < 1.0) {
            return Err(invalid("the degenerate fraction limit must lie in [0, 1)"));
        }
        Ok(())
    }

    /// Number of samples assigned to `stream`.
    pub fn stream_samples(&self, stream: u32) -> u64 {
        let s = u64::from(self.streams);
        self.samples / s + u64::from(u64::from(stream) < self.samples % s)
    }
}

/// One draw of the estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleDraw {
    pub z: Vec<f64>,
    pub a: Vec<f64>,
    pub omega: Blade,
    pub xi: f64,
    pub r: f64,
    /// `1 - xi / r`.
    pub t: f64,
    /// Contribution of the draw (zero when not accepted).
    pub weight: f64,
    /// Odd intersection count and boundary meeting `Omega`.
    pub accepted: bool,
    /// Number of intersection points of the shape with the closed disk.
    pub multiplicity: usize,
}

/// Resampled draws broken down by cause.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DegeneracyCounts {
    pub tangent: u64,
    pub manifold_boundary: u64,
    pub disk_boundary: u64,
    pub near_singular: u64,
    pub numerical: u64,
}

impl DegeneracyCounts {
    pub fn record(&mut self, kind: Degeneracy) {
        match kind {
            Degeneracy::Tangent => self.tangent += 1,
            Degeneracy::ManifoldBoundary => self.manifold_boundary += 1,
            Degeneracy::DiskBoundary => self.disk_boundary += 1,
            Degeneracy::NearSingular => self.near_singular += 1,
            Degeneracy::Numerical => self.numerical += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.tangent + self.manifold_boundary + self.disk_boundary + self.near_singular + self.numerical
    }

    pub fn merge(&mut self, other: &Self) {
        self.tangent += other.tangent;
        self.manifold_boundary += other.manifold_boundary;
        self.disk_boundary += other.disk_boundary;
        self.near_singular += other.near_singular;
        self.numerical += other.numerical;
    }
}

/// Partial result of one stream.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StreamSummary {
    pub stats: Welford,
    pub degenerate: DegeneracyCounts,
    pub accepted: u64,
    pub max_weight: f64,
}

impl StreamSummary {
    pub fn merge(&mut self, other: &Self) {
        self.stats.merge(&other.stats);
        self.degenerate.merge(&other.degenerate);
        self.accepted += other.accepted;
        self.max_weight = self.max_weight.max(other.max_weight);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateResult {
    pub mean: f64,
    pub stderr: f64,
    pub samples: u64,
    pub degenerate_resampled: u64,
    pub degenerate: DegeneracyCounts,
    pub accepted: u64,
    pub sigma: f64,
    /// `(1 - sigma) * mean`.
    pub scaled_mean: f64,
    /// `(1 - sigma) * stderr`.
    pub scaled_stderr: f64,
    /// `limit_constant(n, k) * H^k(M)`.
    pub target: Option<f64>,
    pub config_hash: u64,
    pub seed: u64,
    pub streams: u32,
    pub xi_alpha: f64,
    /// Largest single contribution.
    pub max_weight: f64,
}

impl EstimateResult {
    /// Fraction of draws that were resampled.
    pub fn degenerate_fraction(&self) -> f64 {
        let total = self.samples + self.degenerate_resampled;
        if total == 0 {
            0.0
        } else {
            self.degenerate_resampled as f64 / total as f64
        }
    }

    /// Share of the total taken by the largest single contribution.
    pub fn max_share(&self) -> f64 {
        let total = self.mean * self.samples as f64;
        if total > 0.0 {
            self.max_weight / total
        } else {
            0.0
        }
    }

    /// `|scaled_mean - target| / target`.
    pub fn relative_error(&self) -> Option<f64> {
        self.target.map(|t| math::abs(self.scaled_mean - t) / t)
    }
}

struct Fnv1a(u64);

impl core::fmt::Write for Fnv1a {
    fn write_str(&mut self, s: &str) -> core::fmt::Result {
        for b in s.bytes() {
            self.0 ^= u64::from(b);
            self.0 = self.0.wrapping_mul(0x0000_0100_0000_01b3);
        }
        Ok(())
    }
}

/// 64-bit FNV-1a hash of the `Debug` rendering of `value`.
pub fn fnv1a_debug<T: core::fmt::Debug + ?Sized>(value: &T) -> u64 {
    let mut h = Fnv1a(0xcbf2_9ce4_8422_2325);
    let _ = write!(h, "{value:?}");
    h.0
}

/// Seeds the generator of one stream.
pub fn stream_rng(seed: u64, stream_id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_id);
    rng
}

/// Estimator for one shape, domain and configuration.
///
/// [`Estimator::run_stream`] may be called for the streams in any order or in
/// parallel; [`Estimator::finish`] merges the summaries in the order given.
#[derive(Debug, Clone)]
pub struct Estimator<'a> {
    shape: &'a ManifoldShape,
    omega: &'a DomainBall,
    cfg: EstimatorConfig,
    sigma_index: u32,
    proposal: RadialProposal,
    factor: f64,
    target: f64,
    config_hash: u64,
}

impl<'a> Estimator<'a> {
    pub fn new(shape: &'a ManifoldShape, omega: &'a DomainBall, cfg: &EstimatorConfig) -> Result<Self> {
        Self::for_sweep(shape, omega, cfg, 0)
    }

    /// As [`Estimator::new`], drawing from the substreams reserved for the
    /// `sigma_index`-th value of a sweep.
    pub fn for_sweep(
        shape: &'a ManifoldShape,
        omega: &'a DomainBall,
        cfg: &EstimatorConfig,
        sigma_index: u32,
    ) -> Result<Self> {
        cfg.validate()?;
        shape.check_inside(omega)?;
        let (n, k) = (shape.dim(), shape.grade());
        let h = shape.hausdorff_k();
        if !(h > 0.0) {
            return Err(Error::ZeroMeasure);
        }
        let proposal = RadialProposal::new(cfg.sigma, n - k, omega.diameter(), cfg.xi_alpha)?;
        let factor = math::powf(2.0, -(k as f64) / 2.0) * h * constants::w_measure(n, k)?;
        let target = constants::limit_constant(n, k)? * h;
        let config_hash = fnv1a_debug(&(shape, omega, cfg, sigma_index));
        Ok(Self {
            shape,
            omega,
            cfg: cfg.clone(),
            sigma_index,
            proposal,
            factor,
            target,
            config_hash,
        })
    }

    pub fn config(&self) -> &EstimatorConfig {
        &self.cfg
    }

    pub fn config_hash(&self) -> u64 {
        self.config_hash
    }

    pub fn proposal(&self) -> &RadialProposal {
        &self.proposal
    }

    pub fn stream_id(&self, stream: u32) -> u64 {
        (u64::from(self.sigma_index) << 32) | u64::from(stream)
    }

    /// One draw; `Err(kind)` when the draw is degenerate and must be
    /// resampled.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<core::result::Result<SampleDraw, Degeneracy>> {
        let (n, k) = (self.shape.dim(), self.shape.grade());
        let point = self.shape.sample_point(rng);
        let (a, omega) = sample_w(n, k, rng)?;
        let Some(radial) = self.proposal.sample(rng) else {
            return Ok(Err(Degeneracy::Numerical));
        };
        let disk = AnchoredDisk {
            z: &point.z,
            location: &point.location,
            a: &a,
            normal: &omega,
            xi: radial.xi,
            r: radial.r,
            t: radial.t,
        };
        let mut weight = 0.0;
        let mut accepted = false;
        let mut multiplicity = 0;
        if boundary_touches_omega_anchored(&disk, self.omega) {
            let (parity, tangency) = parity_count_anchored(self.shape, &disk)?;
            if let Some(kind) = parity.degeneracy {
                return Ok(Err(kind));
            }
            multiplicity = parity.multiplicity();
            if parity.is_odd() {
                weight = self.factor * radial.weight * tangency / multiplicity as f64;
                if !weight.is_finite() {
                    return Ok(Err(Degeneracy::Numerical));
                }
                accepted = true;
            }
        }
        let draw = SampleDraw {
            z: point.z,
            a,
            omega,
            xi: radial.xi,
            r: radial.r,
            t: radial.t,
            weight,
            accepted,
            multiplicity,
        };
        Ok(Ok(draw))
    }

    /// Runs the samples assigned to `stream`.
    pub fn run_stream(&self, stream: u32) -> Result<StreamSummary> {
        let mut rng = stream_rng(self.cfg.seed, self.stream_id(stream));
        let target = self.cfg.stream_samples(stream);
        let abort_after = 100 + (10.0 * self.cfg.max_degenerate_fraction * target as f64) as u64;
        let mut out = StreamSummary::default();
        while out.stats.count() < target {
            match self.draw(&mut rng)? {
                Ok(d) => {
                    out.stats.push(d.weight);
                    if d.accepted {
                        out.accepted += 1;
                        out.max_weight = out.max_weight.max(d.weight);
                    }
                }
                Err(kind) => {
                    out.degenerate.record(kind);
                    if out.degenerate.total() > abort_after {
                        let total = out.degenerate.total();
                        return Err(Error::TooManyDegenerate {
                            fraction: total as f64 / (total + out.stats.count()) as f64,
                            limit: self.cfg.max_degenerate_fraction,
                            degenerate: total,
                        });
                    }
                }
            }
        }
        Ok(out)
    }

    /// Merges stream summaries (in the order given) into the final result.
    pub fn finish<I: IntoIterator<Item = StreamSummary>>(&self, summaries: I) -> Result<EstimateResult> {
        let mut total = StreamSummary::default();
        for s in summaries {
            total.merge(&s);
        }
        let deg = total.degenerate.total();
        let samples = total.stats.count();
        let fraction = if samples + deg == 0 {
            0.0
        } else {
            deg as f64 / (samples + deg) as f64
        };
        if fraction > self.cfg.max_degenerate_fraction {
            return Err(Error::TooManyDegenerate {
                fraction,
                limit: self.cfg.max_degenerate_fraction,
                degenerate: deg,
            });
        }
        let scale = 1.0 - self.cfg.sigma;
        let mean = total.stats.mean();
        let stderr = total.stats.stderr();
        Ok(EstimateResult {
            mean,
            stderr,
            samples,
            degenerate_resampled: deg,
            degenerate: total.degenerate,
            accepted: total.accepted,
            sigma: self.cfg.sigma,
            scaled_mean: scale * mean,
            scaled_stderr: scale * stderr,
            target: Some(self.target),
            config_hash: self.config_hash,
            seed: self.cfg.seed,
            streams: self.cfg.streams,
            xi_alpha: self.cfg.xi_alpha,
            max_weight: total.max_weight,
        })
    }

    /// Runs every stream sequentially.
    pub fn run(&self) -> Result<EstimateResult> {
        let mut summaries = Vec::with_capacity(self.cfg.streams as usize);
        for s in 0..self.cfg.streams {
            summaries.push(self.run_stream(s)?);
        }
        self.finish(summaries)
    }
}

/// Estimates `Meas^k_sigma(shape, omega)`.
pub fn estimate_measure(shape: &ManifoldShape, omega: &DomainBall, cfg: &EstimatorConfig) -> Result<EstimateResult> {
    Estimator::new(shape, omega, cfg)?.run()
}

/// Checks that `sigmas` is a strictly increasing list in `(0, 1)`.
pub fn validate_sweep(sigmas: &[f64]) -> Result<()> {
    if sigmas.is_empty() {
        return Err(invalid("the sigma list is empty"));
    }
    if sigmas.len() > u32::MAX as usize {
        return Err(invalid("too many sigma values"));
    }
    if sigmas.iter().any(|s| !(*s > 0.0 && *s < 1.0)) {
        return Err(invalid("every sigma must lie in (0, 1)"));
    }
    if sigmas.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid("sigma values must be strictly increasing"));
    }
    Ok(())
}

/// One estimate per value of `sigmas`, each on its own family of substreams.
/// The `sigma` field of `cfg` is ignored.
pub fn converge_sweep(
    shape: &ManifoldShape,
    omega: &DomainBall,
    sigmas: &[f64],
    cfg: &EstimatorConfig,
) -> Result<Vec<EstimateResult>> {
    validate_sweep(sigmas)?;
    sigmas
        .iter()
        .enumerate()
        .map(|(i, &sigma)| {
            let c = EstimatorConfig { sigma, ..cfg.clone() };
            Estimator::for_sweep(shape, omega, &c, i as u32)?.run()
        })
        .collect()
}
