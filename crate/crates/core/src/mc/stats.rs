use crate::math;

/// Running mean and sum of squared deviations (Welford), mergeable with
/// Chan's pairwise update.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Welford {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Welford {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &Self) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let n_a = self.count as f64;
        let n_b = other.count as f64;
        let n = n_a + n_b;
        let delta = other.mean - self.mean;
        self.mean += delta * n_b / n;
        self.m2 += other.m2 + delta * delta * n_a * n_b / n;
        self.count += other.count;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance; zero for fewer than two samples.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            (self.m2 / (self.count - 1) as f64).max(0.0)
        }
    }

    /// `sd / sqrt(count)`.
    pub fn stderr(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            math::sqrt(self.variance() / self.count as f64)
        }
    }
}

/// A Monte-Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: u64,
}

impl MeanEstimate {
    pub fn from_welford(w: &Welford) -> Self {
        Self {
            mean: w.mean(),
            stderr: w.stderr(),
            samples: w.count(),
        }
    }

    pub fn scaled(self, c: f64) -> Self {
        Self {
            mean: self.mean * c,
            stderr: self.stderr * math::abs(c),
            samples: self.samples,
        }
    }

    /// `(self - value) / stderr`; infinite when the error is zero and the
    /// values differ.
    pub fn zscore_against(&self, value: f64) -> f64 {
        zscore(self.mean - value, self.stderr)
    }

    /// z-score of the difference of two independent estimates.
    pub fn zscore_between(&self, other: &Self) -> f64 {
        let s = math::sqrt(self.stderr * self.stderr + other.stderr * other.stderr);
        zscore(self.mean - other.mean, s)
    }
}

pub(crate) fn zscore(diff: f64, s: f64) -> f64 {
    if s > 0.0 {
        diff / s
    } else if diff == 0.0 {
        0.0
    } else {
        f64::INFINITY.copysign(diff)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn welford_matches_two_pass() {
        let xs = [1.0, 4.0, -2.5, 7.25, 0.0, 3.0, 3.0];
        let mut w = Welford::new();
        for x in xs {
            w.push(x);
        }
        let mean: f64 = xs.iter().sum::<f64>() / xs.len() as f64;
        let var: f64 = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (xs.len() - 1) as f64;
        assert!((w.mean() - mean).abs() < 1e-14);
        assert!((w.variance() - var).abs() < 1e-12);
    }

    #[test]
    fn merge_equals_single_pass() {
        let xs: Vec<f64> = (0..101).map(|i| ((i * 37) % 17) as f64 * 0.3 - 1.0).collect();
        let mut whole = Welford::new();
        xs.iter().for_each(|x| whole.push(*x));
        let mut parts = Welford::new();
        for chunk in xs.chunks(13) {
            let mut w = Welford::new();
            chunk.iter().for_each(|x| w.push(*x));
            parts.merge(&w);
        }
        assert_eq!(parts.count(), whole.count());
        assert!((parts.mean() - whole.mean()).abs() < 1e-14);
        assert!((parts.variance() - whole.variance()).abs() < 1e-12);
        let mut empty = Welford::new();
        empty.merge(&Welford::new());
        assert_eq!(empty.count(), 0);
        assert_eq!(empty.stderr(), 0.0);
    }

    #[test]
    fn zscores() {
        let a = MeanEstimate { mean: 1.0, stderr: 0.3, samples: 10 };
        let b = MeanEstimate { mean: 0.0, stderr: 0.4, samples: 10 };
        assert!((a.zscore_between(&b) - 2.0).abs() < 1e-12);
        assert_eq!(a.scaled(-2.0).stderr, 0.6);
        assert_eq!(zscore(0.0, 0.0), 0.0);
        assert!(zscore(-1.0, 0.0).is_infinite());
    }
}
