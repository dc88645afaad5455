//! Synthetic fault distributions: a flat noise carpet with Gumbel-shaped peaks.
//!
//! Every random number comes from a ChaCha8 stream seeded with the configured
//! seed. Uniform reals take the top 53 bits of a `u64` draw and normals use
//! Box-Muller, so a seed reproduces the same histogram everywhere.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::distribution::FaultDistribution;
use crate::error::{Error, Result};

pub const RNG_ALGORITHM: &str = "chacha8";
pub const GENERATOR_ID: &str = "carpet-gumbel-v1";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SynthParams {
    /// Length of the time axis; the distribution spans `[0, steps)`.
    pub steps: u64,
    pub carpet_height: u64,
    /// Log-normal `(mu, sigma)` of the peak count.
    pub peak_count_lognormal: (f64, f64),
    /// Clamp applied to the drawn peak count.
    pub peak_count_range: (u64, u64),
    /// Peak height as a multiple of the carpet height.
    pub height_factor_range: (f64, f64),
    /// Width of the central 99% of a peak's mass, as a fraction of `steps`.
    pub width_fraction_range: (f64, f64),
    pub seed: u64,
}

impl Default for SynthParams {
    fn default() -> Self {
        SynthParams {
            steps: 10_000,
            carpet_height: 4,
            peak_count_lognormal: (2.5, 0.8),
            peak_count_range: (2, 100),
            height_factor_range: (2.0, 5.0),
            width_fraction_range: (0.02, 0.10),
            seed: 0,
        }
    }
}

impl SynthParams {
    pub fn with_seed(seed: u64) -> Self {
        SynthParams {
            seed,
            ..SynthParams::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::Parameter(msg.to_string()));
        if self.steps < 100 {
            return bad("steps must be at least 100");
        }
        if self.carpet_height == 0 {
            return bad("carpet_height must be positive");
        }
        let (lo, hi) = self.peak_count_range;
        if lo > hi {
            return bad("empty peak_count_range");
        }
        let (lo, hi) = self.height_factor_range;
        if !(lo <= hi && lo >= 0.0) {
            return bad("height_factor_range must be a non-empty, non-negative range");
        }
        let (lo, hi) = self.width_fraction_range;
        if !(lo <= hi && lo > 0.0) {
            return bad("width_fraction_range must be a non-empty, positive range");
        }
        let (mu, sigma) = self.peak_count_lognormal;
        if !(mu.is_finite() && sigma.is_finite() && sigma >= 0.0) {
            return bad("peak_count_lognormal needs finite mu and sigma >= 0");
        }
        Ok(())
    }

    /// `key=value` lines recording every parameter, for file headers.
    pub fn provenance(&self) -> Vec<String> {
        vec![
            format!(
                "generator={GENERATOR_ID} rng={RNG_ALGORITHM} seed={}",
                self.seed
            ),
            format!("steps={} carpet_height={}", self.steps, self.carpet_height),
            format!(
                "peak_count_lognormal={},{} peak_count_range={},{}",
                self.peak_count_lognormal.0,
                self.peak_count_lognormal.1,
                self.peak_count_range.0,
                self.peak_count_range.1
            ),
            format!(
                "height_factor_range={},{} width_fraction_range={},{}",
                self.height_factor_range.0,
                self.height_factor_range.1,
                self.width_fraction_range.0,
                self.width_fraction_range.1
            ),
        ]
    }
}

/// One Gumbel bump: `amplitude * exp(1 - z - exp(-z))` with
/// `z = (t - location) / scale`, which peaks at `amplitude` when `t = location`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Peak {
    pub location: f64,
    pub scale: f64,
    pub amplitude: f64,
}

impl Peak {
    pub fn height_at(&self, t: f64) -> f64 {
        let z = (t - self.location) / self.scale;
        self.amplitude * (1.0 - z - (-z).exp()).exp()
    }
}

/// Distance between the 0.5% and 99.5% quantiles of the standard Gumbel.
fn central_99_width() -> f64 {
    let q = |p: f64| -(-p.ln()).ln();
    q(0.995) - q(0.005)
}

struct Draws(ChaCha8Rng);

impl Draws {
    fn unit(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    fn uniform(&mut self, (lo, hi): (f64, f64)) -> f64 {
        lo + (hi - lo) * self.unit()
    }

    fn normal(&mut self) -> f64 {
        // 1 - u keeps the logarithm finite
        let u1 = 1.0 - self.unit();
        let u2 = self.unit();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }
}

pub fn generate(p: &SynthParams) -> Result<FaultDistribution> {
    generate_with_peaks(p).map(|(d, _)| d)
}

/// Like [`generate`], also returning the peaks that were overlaid.
pub fn generate_with_peaks(p: &SynthParams) -> Result<(FaultDistribution, Vec<Peak>)> {
    p.validate()?;
    let mut draws = Draws(ChaCha8Rng::seed_from_u64(p.seed));
    let (mu, sigma) = p.peak_count_lognormal;
    let raw = (mu + sigma * draws.normal()).exp().round();
    let (lo, hi) = p.peak_count_range;
    let count = (raw.clamp(lo as f64, hi as f64)) as usize;

    let span = p.steps as f64;
    let carpet = p.carpet_height as f64;
    let peaks: Vec<Peak> = (0..count)
        .map(|_| {
            let location = draws.uniform((0.0, span));
            let width = draws.uniform(p.width_fraction_range) * span;
            let factor = draws.uniform(p.height_factor_range);
            Peak {
                location,
                scale: width / central_99_width(),
                amplitude: factor * carpet,
            }
        })
        .collect();

    let counts: Vec<u64> = (0..p.steps)
        .map(|t| {
            let bumps: f64 = peaks.iter().map(|pk| pk.height_at(t as f64)).sum();
            p.carpet_height + bumps.round() as u64
        })
        .collect();
    Ok((FaultDistribution::from_counts(&counts, 0)?, peaks))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::wfft;

    #[test]
    fn gumbel_shape() {
        let pk = Peak {
            location: 10.0,
            scale: 2.0,
            amplitude: 8.0,
        };
        assert!((pk.height_at(10.0) - 8.0).abs() < 1e-12);
        assert!(pk.height_at(9.0) < 8.0 && pk.height_at(11.0) < 8.0);
        // right-skewed: the tail is heavier after the mode
        assert!(pk.height_at(16.0) > pk.height_at(4.0));
        assert!((central_99_width() - 6.9634).abs() < 1e-3);
    }

    #[test]
    fn forced_zero_peaks_is_flat() {
        let p = SynthParams {
            peak_count_range: (0, 0),
            steps: 1000,
            ..SynthParams::with_seed(3)
        };
        let (d, peaks) = generate_with_peaks(&p).unwrap();
        assert!(peaks.is_empty());
        assert!(d.entries().iter().all(|&(_, c)| c == 4));
        assert_eq!(d.entries().len(), 1000);
        assert_eq!(wfft(&d).value, 0.0);
    }

    #[test]
    fn deterministic_per_seed() {
        let p = SynthParams::with_seed(7);
        assert_eq!(generate(&p).unwrap(), generate(&p).unwrap());
        assert_ne!(
            generate(&p).unwrap(),
            generate(&SynthParams::with_seed(8)).unwrap()
        );
    }

    #[test]
    fn invalid_params() {
        let short = SynthParams {
            steps: 99,
            ..SynthParams::default()
        };
        assert!(generate(&short).is_err());
        let empty = SynthParams {
            height_factor_range: (5.0, 2.0),
            ..SynthParams::default()
        };
        assert!(generate(&empty).is_err());
    }
}
