//! Globally adaptive 21-point Gauss–Kronrod quadrature.
//!
//! The integrand may carry an error of its own (for nested integrals the
//! inner value is itself an estimate). That error is integrated with the
//! Kronrod weights and added to the reported error, but only the rule error
//! drives subdivision.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::params::QuadConfig;

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689,
    0.973_906_528_517_171_720_077_964_012_084,
    0.930_157_491_355_708_226_001_207_180_060,
    0.865_063_366_688_984_510_732_096_688_423,
    0.780_817_726_586_416_897_063_717_578_345,
    0.679_409_568_299_024_406_234_327_365_115,
    0.562_757_134_668_604_683_339_000_099_273,
    0.433_395_394_129_247_190_799_265_943_166,
    0.294_392_862_701_460_198_131_126_603_104,
    0.148_874_338_981_631_210_884_826_001_130,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062,
    0.032_558_162_307_964_727_478_818_972_459,
    0.054_755_896_574_351_996_031_381_300_245,
    0.075_039_674_810_919_952_767_043_140_916,
    0.093_125_454_583_697_605_535_065_465_083,
    0.109_387_158_802_297_641_899_210_590_326,
    0.123_491_976_262_065_851_077_208_136_193,
    0.134_709_217_311_473_325_928_054_001_772,
    0.142_775_938_577_060_080_797_094_273_139,
    0.147_739_104_901_338_491_374_841_515_972,
    0.149_445_554_002_916_905_664_936_468_390,
];

// Gauss weights for XGK[1], XGK[3], ..., XGK[9].
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893,
    0.149_451_349_150_580_593_145_776_339_658,
    0.219_086_362_515_982_043_995_534_934_228,
    0.269_266_719_309_996_355_091_226_921_569,
    0.295_524_224_714_752_870_173_892_994_651,
];

/// Integrand value together with its own error estimate.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Sample {
    pub value: f64,
    pub error: f64,
}

impl From<f64> for Sample {
    fn from(value: f64) -> Self {
        Sample { value, error: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub evaluations: u64,
    pub intervals: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    lo: f64,
    hi: f64,
    value: f64,
    rule_error: f64,
    /// Smallest error the rule can report for this segment.
    roundoff: f64,
    carried_error: f64,
}

impl Segment {
    fn splittable(&self) -> bool {
        let mid = 0.5 * (self.lo + self.hi);
        mid > self.lo
            && mid < self.hi
            && (self.hi - self.lo) > 1e3 * f64::EPSILON * mid.abs().max(f64::MIN_POSITIVE)
    }
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.rule_error.total_cmp(&other.rule_error)
    }
}

fn roundoff_floor(resabs: f64) -> f64 {
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        50.0 * f64::EPSILON * resabs
    } else {
        0.0
    }
}

fn rescale_error(err: f64, resabs: f64, resasc: f64) -> f64 {
    let mut err = err.abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    err.max(roundoff_floor(resabs))
}

fn apply_rule<F>(f: &mut F, lo: f64, hi: f64) -> Result<Segment>
where
    F: FnMut(f64) -> Result<Sample>,
{
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let mut values = [0.0; 21];
    let mut errors = [0.0; 21];
    let mut sample = |x: f64| -> Result<Sample> {
        let s = f(x)?;
        if !s.value.is_finite() {
            return Err(Error::NonFinite { at: x });
        }
        Ok(s)
    };
    for i in 0..10 {
        let dx = half * XGK[i];
        let left = sample(center - dx)?;
        let right = sample(center + dx)?;
        values[i] = left.value;
        values[20 - i] = right.value;
        errors[i] = left.error;
        errors[20 - i] = right.error;
    }
    let mid = sample(center)?;
    values[10] = mid.value;
    errors[10] = mid.error;

    let mut kronrod = WGK[10] * values[10];
    let mut gauss = 0.0;
    let mut resabs = WGK[10] * values[10].abs();
    let mut carried = WGK[10] * errors[10].abs();
    for i in 0..10 {
        let pair = values[i] + values[20 - i];
        kronrod += WGK[i] * pair;
        resabs += WGK[i] * (values[i].abs() + values[20 - i].abs());
        carried += WGK[i] * (errors[i].abs() + errors[20 - i].abs());
        if i % 2 == 1 {
            gauss += WG[i / 2] * pair;
        }
    }
    let mean = 0.5 * kronrod;
    let mut resasc = WGK[10] * (values[10] - mean).abs();
    for i in 0..10 {
        resasc += WGK[i] * ((values[i] - mean).abs() + (values[20 - i] - mean).abs());
    }

    let scale = half.abs();
    let value = kronrod * half;
    let rule_error = rescale_error((kronrod - gauss) * half, resabs * scale, resasc * scale);
    Ok(Segment {
        lo,
        hi,
        value,
        rule_error,
        roundoff: roundoff_floor(resabs * scale),
        carried_error: carried * scale,
    })
}

/// Adaptive quadrature over a finite interval for an integrand that reports
/// its own error.
pub fn adaptive<F>(mut f: F, lo: f64, hi: f64, cfg: &QuadConfig) -> Result<Integral>
where
    F: FnMut(f64) -> Result<Sample>,
{
    cfg.validate()?;
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(Error::invalid(
            "bounds",
            "adaptive() requires finite bounds",
        ));
    }
    if lo == hi {
        return Ok(Integral {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
            intervals: 0,
        });
    }

    let mut evaluations = 21u64;
    let first = apply_rule(&mut f, lo, hi)?;
    let mut active = BinaryHeap::new();
    let mut frozen: Vec<Segment> = Vec::new();
    // error of frozen segments already at their roundoff floor
    let mut resolved = 0.0;
    active.push(first);

    loop {
        let (value, rule_error, carried) = active
            .iter()
            .chain(frozen.iter())
            .fold((0.0, 0.0, 0.0), |(v, e, c), s| {
                (v + s.value, e + s.rule_error, c + s.carried_error)
            });
        let target = cfg.abs_tol.max(cfg.rel_tol * value.abs()) + resolved;
        let intervals = active.len() + frozen.len();
        if rule_error <= target {
            return Ok(Integral {
                value,
                error: rule_error + carried,
                evaluations,
                intervals,
            });
        }
        let worst = match active.pop() {
            Some(s) if intervals < cfg.max_subdivisions => s,
            _ => {
                return Err(Error::NonConvergence {
                    context: format!("quadrature on [{lo:e}, {hi:e}]"),
                    value,
                    error: rule_error + carried,
                    subdivisions: intervals,
                })
            }
        };
        if worst.rule_error <= worst.roundoff {
            resolved += worst.rule_error;
            frozen.push(worst);
            continue;
        }
        if !worst.splittable() {
            frozen.push(worst);
            continue;
        }
        let mid = 0.5 * (worst.lo + worst.hi);
        active.push(apply_rule(&mut f, worst.lo, mid)?);
        active.push(apply_rule(&mut f, mid, worst.hi)?);
        evaluations += 42;
    }
}

/// `∫_lo^hi f`, where `hi` may be `+∞` (mapped by `t = lo + s/(1-s)`).
pub fn integrate_1d<F>(f: F, lo: f64, hi: f64, cfg: &QuadConfig) -> Result<Integral>
where
    F: Fn(f64) -> f64,
{
    integrate_with_error(|x| Ok(Sample::from(f(x))), lo, hi, cfg)
}

/// Like [`integrate_1d`] for integrands carrying their own error estimate.
pub fn integrate_with_error<F>(mut f: F, lo: f64, hi: f64, cfg: &QuadConfig) -> Result<Integral>
where
    F: FnMut(f64) -> Result<Sample>,
{
    if lo.is_nan() || hi.is_nan() || !lo.is_finite() {
        return Err(Error::invalid("bounds", "lower bound must be finite"));
    }
    if hi < lo {
        return Err(Error::invalid("bounds", "upper bound below lower bound"));
    }
    if hi == f64::INFINITY {
        adaptive(
            |s| {
                let w = 1.0 - s;
                let t = lo + s / w;
                let inner = f(t)?;
                let jac = 1.0 / (w * w);
                Ok(Sample {
                    value: inner.value * jac,
                    error: inner.error * jac,
                })
            },
            0.0,
            1.0,
            cfg,
        )
    } else {
        adaptive(f, lo, hi, cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn cfg(tol: f64) -> QuadConfig {
        QuadConfig::with_tol(tol).unwrap()
    }

    #[test]
    fn weights_and_exactness() {
        let kronrod: f64 = WGK[10] + 2.0 * WGK[..10].iter().sum::<f64>();
        let gauss: f64 = 2.0 * WG.iter().sum::<f64>();
        assert!((kronrod - 2.0).abs() < 1e-15);
        assert!((gauss - 2.0).abs() < 1e-15);
        // Kronrod part is exact through degree 31 on a single interval.
        let mut f = |x: f64| Ok(Sample::from(x.powi(30)));
        let s = apply_rule(&mut f, 0.0, 1.0).unwrap();
        assert!((s.value - 1.0 / 31.0).abs() < 1e-15);
    }

    #[test]
    fn constant_is_exact() {
        let r = integrate_1d(|_| 1.0, 0.0, 1.0, &cfg(1e-12)).unwrap();
        assert!((r.value - 1.0).abs() <= 4.0 * f64::EPSILON);
    }

    #[test]
    fn semi_infinite_arctan() {
        let r = integrate_1d(|x| 1.0 / (1.0 + x * x), 0.0, f64::INFINITY, &cfg(1e-12)).unwrap();
        assert!((r.value - PI / 2.0).abs() < 1e-12);
        assert!(r.error <= 1e-12);
    }

    #[test]
    fn endpoint_log_singularity() {
        let r = integrate_1d(|x| x.ln(), 0.0, 1.0, &cfg(1e-10)).unwrap();
        assert!((r.value + 1.0).abs() < 1e-10);
    }

    #[test]
    fn reports_nonconvergence_with_best_estimate() {
        let tight = QuadConfig::new(1e-14, 1e-14, 3).unwrap();
        match integrate_1d(|x| x.sqrt(), 0.0, 1.0, &tight) {
            Err(Error::NonConvergence { value, .. }) => assert!((value - 2.0 / 3.0).abs() < 1e-4),
            other => panic!("expected nonconvergence, got {other:?}"),
        }
    }

    #[test]
    fn carried_error_is_integrated() {
        let r = integrate_with_error(
            |_| {
                Ok(Sample {
                    value: 1.0,
                    error: 1e-6,
                })
            },
            0.0,
            2.0,
            &cfg(1e-12),
        )
        .unwrap();
        assert!((r.error - 2e-6).abs() < 1e-12);
    }
}
