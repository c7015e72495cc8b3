//! Seeded Monte Carlo estimates of the cyclic-product probabilities and of
//! `S(k,a)`.
//!
//! Trials are split over a fixed number of substreams. Substream `s` of seed
//! `σ` is the ChaCha8 keystream for key `σ` and stream id `s`, so every draw
//! is a pure function of `(σ, s, counter)`. Each substream returns an integer
//! hit count, so the reduction is exact and independent of thread count.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{scale_factor, validate_spec, EvalResult, Method, SeriesSpec};
use crate::special::{ClosedForm, DistributionKind, Kind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct McConfig {
    pub seed: u64,
    pub samples: u64,
    pub streams: u32,
}

impl McConfig {
    pub const DEFAULT_STREAMS: u32 = 64;

    pub fn new(seed: u64, samples: u64) -> Self {
        McConfig {
            seed,
            samples,
            streams: Self::DEFAULT_STREAMS,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.samples < 1 {
            return Err(Error::invalid("samples", "must be >= 1"));
        }
        if self.streams < 1 {
            return Err(Error::invalid("streams", "must be >= 1"));
        }
        Ok(())
    }

    fn trials_in_stream(&self, stream: u32) -> u64 {
        let streams = u64::from(self.streams);
        self.samples / streams + u64::from(u64::from(stream) < self.samples % streams)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: u64,
    pub seed: u64,
}

impl McEstimate {
    pub fn to_eval_result(&self) -> EvalResult {
        EvalResult::new(self.mean, self.std_error, Method::MonteCarlo, self.samples)
    }
}

/// Generator for substream `stream` of `seed`.
pub fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform draw on the open interval `(0, 1)`.
pub fn open_uniform<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

pub fn sample_xi(a: u32, u: f64) -> Result<f64> {
    ClosedForm::new(a)?.inverse_xi(u)
}

/// `Θ` has the law of `1/Ξ`.
pub fn sample_theta(a: u32, u: f64) -> Result<f64> {
    let form = ClosedForm::new(a)?;
    draw(&form, Kind::Theta, u)
}

fn draw(form: &ClosedForm, kind: Kind, u: f64) -> Result<f64> {
    match kind {
        Kind::Xi => form.inverse_xi(u),
        Kind::Theta => {
            if !(u > 0.0 && u < 1.0) {
                return Err(Error::invalid("u", format!("must lie in (0, 1), got {u}")));
            }
            Ok(1.0 / form.inverse_xi(1.0 - u)?)
        }
    }
}

/// `n` draws from stream 0 of `seed`.
pub fn sample_stream(d: DistributionKind, n: usize, seed: u64) -> Result<Vec<f64>> {
    let form = ClosedForm::new(d.a)?;
    let mut rng = substream(seed, 0);
    (0..n)
        .map(|_| draw(&form, d.kind, open_uniform(&mut rng)))
        .collect()
}

fn stream_id(kind: Kind, stream: u32) -> u64 {
    let tag = match kind {
        Kind::Xi => 0u64,
        Kind::Theta => 1u64,
    };
    tag << 32 | u64::from(stream)
}

/// One trial: draw variates in cyclic order and stop at the first product
/// that reaches 1.
fn trial<R: RngCore>(form: &ClosedForm, kind: Kind, k: u32, rng: &mut R) -> Result<bool> {
    let first = draw(form, kind, open_uniform(rng))?;
    let mut prev = first;
    for _ in 1..k {
        let next = draw(form, kind, open_uniform(rng))?;
        if prev * next >= 1.0 {
            return Ok(false);
        }
        prev = next;
    }
    Ok(prev * first < 1.0)
}

/// `P(X_i X_{i+1} < 1 for all i, cyclically)` with `X` i.i.d. `Ξ` or `Θ`.
pub fn estimate_cyclic_probability(
    d: DistributionKind,
    k: u32,
    cfg: &McConfig,
) -> Result<McEstimate> {
    cfg.validate()?;
    if k < 1 {
        return Err(Error::invalid("k", "must be >= 1"));
    }
    let form = ClosedForm::new(d.a)?;
    let hits: Vec<Result<u64>> = (0..cfg.streams)
        .into_par_iter()
        .map(|s| {
            let mut rng = substream(cfg.seed, stream_id(d.kind, s));
            let mut hits = 0u64;
            for _ in 0..cfg.trials_in_stream(s) {
                hits += u64::from(trial(&form, d.kind, k, &mut rng)?);
            }
            Ok(hits)
        })
        .collect();
    let mut total = 0u64;
    for h in hits {
        total += h?;
    }
    let n = cfg.samples as f64;
    let mean = total as f64 / n;
    let variance = if cfg.samples > 1 {
        mean * (1.0 - mean) * n / (n - 1.0)
    } else {
        0.0
    };
    Ok(McEstimate {
        mean,
        std_error: (variance / n).sqrt(),
        samples: cfg.samples,
        seed: cfg.seed,
    })
}

/// `S ≈ ((π/a)csc(π/a))^k · (P̂_Ξ + P̂_Θ)` from independent substreams.
#[allow(non_snake_case)]
pub fn estimate_S(spec: &SeriesSpec, cfg: &McConfig) -> Result<McEstimate> {
    validate_spec(spec)?;
    let xi = estimate_cyclic_probability(DistributionKind::xi(spec.a)?, spec.k, cfg)?;
    let theta = estimate_cyclic_probability(DistributionKind::theta(spec.a)?, spec.k, cfg)?;
    let scale = scale_factor(spec.a).powi(spec.k as i32);
    Ok(McEstimate {
        mean: scale * (xi.mean + theta.mean),
        std_error: scale * xi.std_error.hypot(theta.std_error),
        samples: cfg.samples,
        seed: cfg.seed,
    })
}

/// Kolmogorov–Smirnov distance between the empirical law of `samples` and
/// `cdf`. Sorts `samples` in place.
pub fn ks_statistic(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples.iter().enumerate().fold(0.0, |d: f64, (i, &x)| {
        let f = cdf(x);
        let above = (i as f64 + 1.0) / n - f;
        let below = f - i as f64 / n;
        d.max(above).max(below)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn sampler_examples() {
        assert!((sample_xi(2, 0.5).unwrap() - 1.0).abs() < 1e-12);
        assert!((sample_xi(2, 0.25).unwrap() - (PI / 8.0).tan()).abs() < 1e-11);
        assert!(sample_xi(3, 1e-12).unwrap() < 1e-11);
        assert!((sample_theta(2, 0.5).unwrap() - 1.0).abs() < 1e-12);
        for &u in &[0.1, 0.3, 0.77] {
            let x = sample_xi(2, u).unwrap();
            let t = sample_theta(2, 1.0 - u).unwrap();
            assert!((x * t - 1.0).abs() < 1e-11);
        }
        assert!(sample_theta(2, 1.0).is_err());
    }

    #[test]
    fn open_uniform_stays_inside() {
        let mut rng = substream(1, 0);
        for _ in 0..10_000 {
            let u = open_uniform(&mut rng);
            assert!(u > 0.0 && u < 1.0);
        }
    }

    #[test]
    fn single_variable_probability_is_psi_one() {
        let cfg = McConfig::new(7, 200_000);
        for a in [2, 3, 5] {
            let est =
                estimate_cyclic_probability(DistributionKind::xi(a).unwrap(), 1, &cfg).unwrap();
            let want = ClosedForm::new(a).unwrap().psi(1.0);
            assert!((est.mean - want).abs() <= 4.0 * est.std_error, "a={a}");
        }
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let cfg = McConfig::new(42, 10_001);
        let spec = SeriesSpec { k: 3, a: 3 };
        assert_eq!(
            estimate_S(&spec, &cfg).unwrap(),
            estimate_S(&spec, &cfg).unwrap()
        );
        let other = McConfig::new(43, 10_001);
        assert_ne!(
            estimate_S(&spec, &cfg).unwrap(),
            estimate_S(&spec, &other).unwrap()
        );
        assert_eq!(
            sample_stream(DistributionKind::xi(2).unwrap(), 3, 42).unwrap(),
            sample_stream(DistributionKind::xi(2).unwrap(), 3, 42).unwrap()
        );
    }

    #[test]
    fn trial_split_covers_all_samples() {
        let cfg = McConfig {
            seed: 0,
            samples: 1003,
            streams: 10,
        };
        let total: u64 = (0..10).map(|s| cfg.trials_in_stream(s)).sum();
        assert_eq!(total, 1003);
    }

    #[test]
    fn rejects_zero_samples() {
        let cfg = McConfig::new(1, 0);
        assert!(estimate_S(&SeriesSpec { k: 2, a: 2 }, &cfg).is_err());
    }

    #[test]
    fn ks_statistic_of_perfect_grid() {
        let mut xs: Vec<f64> = (0..100).map(|i| (i as f64 + 0.5) / 100.0).collect();
        assert!((ks_statistic(&mut xs, |x| x) - 0.005).abs() < 1e-12);
    }
}
