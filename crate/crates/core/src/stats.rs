//! Interval estimates used by the Monte Carlo procedures.

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

/// Two-sided 95% standard normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct Frequency {
    pub successes: u64,
    pub trials: u64,
    pub value: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl Frequency {
    pub fn new(successes: u64, trials: u64) -> Frequency {
        let (ci_low, ci_high) = wilson_interval(successes, trials, Z95);
        let value = if trials == 0 { 0.0 } else { successes as f64 / trials as f64 };
        Frequency { successes, trials, value, ci_low, ci_high }
    }

    /// Binomial standard error of the observed frequency.
    pub fn stderr(&self) -> f64 {
        if self.trials == 0 {
            return 0.0;
        }
        (self.value * (1.0 - self.value) / self.trials as f64).sqrt()
    }
}

/// Wilson score interval for a binomial proportion.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let phat = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (phat + z2 / (2.0 * n)) / denom;
    let half = z * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    // the interval endpoints are exactly 0 and 1 at the extremes
    let lo = if successes == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if successes == trials { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct MeanEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub samples: u64,
}

impl MeanEstimate {
    /// Sample mean with a normal-approximation 95% interval.
    pub fn from_samples(xs: impl IntoIterator<Item = f64>) -> MeanEstimate {
        let mut sum = KahanSum::default();
        let mut sq = KahanSum::default();
        let mut n = 0u64;
        for x in xs {
            sum.add(x);
            sq.add(x * x);
            n += 1;
        }
        if n == 0 {
            return MeanEstimate { mean: 0.0, stderr: 0.0, ci_low: 0.0, ci_high: 0.0, samples: 0 };
        }
        let mean = sum.total() / n as f64;
        let var = if n > 1 { ((sq.total() - n as f64 * mean * mean) / (n - 1) as f64).max(0.0) } else { 0.0 };
        let stderr = (var / n as f64).sqrt();
        MeanEstimate { mean, stderr, ci_low: mean - Z95 * stderr, ci_high: mean + Z95 * stderr, samples: n }
    }
}

/// Compensated summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    carry: f64,
}

impl KahanSum {
    pub fn add(&mut self, x: f64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum
    }
}

impl FromIterator<f64> for KahanSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> KahanSum {
        let mut k = KahanSum::default();
        iter.into_iter().for_each(|x| k.add(x));
        k
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn wilson_reference_values() {
        // 8 of 10: textbook Wilson interval (0.4902, 0.9433)
        let (lo, hi) = wilson_interval(8, 10, Z95);
        assert_abs_diff_eq!(lo, 0.4902, epsilon = 1e-4);
        assert_abs_diff_eq!(hi, 0.9433, epsilon = 1e-4);
        let (lo, hi) = wilson_interval(0, 50, Z95);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.08);
    }

    #[test]
    fn mean_interval() {
        let m = MeanEstimate::from_samples([1.0, 2.0, 3.0, 4.0]);
        assert_abs_diff_eq!(m.mean, 2.5);
        assert_abs_diff_eq!(m.stderr, (5.0f64 / 3.0 / 4.0).sqrt(), epsilon = 1e-12);
        let c = MeanEstimate::from_samples([0.7; 10]);
        assert_eq!((c.stderr, c.ci_low, c.ci_high), (0.0, 0.7, 0.7));
    }

    #[test]
    fn kahan_beats_naive() {
        let xs = std::iter::once(1.0).chain(std::iter::repeat_n(1e-16, 10_000));
        let k: KahanSum = xs.collect();
        assert_abs_diff_eq!(k.total(), 1.0 + 1e-12, epsilon = 1e-15);
    }
}
