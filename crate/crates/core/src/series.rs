//! Ground-truth evaluation of `S(k,a) = Σ_{n∈Z} (-1)^{nk} / (an+1)^k` by
//! symmetric summation.
//!
//! The `n` and `-n` terms are always handled together. Writing
//! `g(x) = (ax-1)^{-k} + (ax+1)^{-k}` and `h(x) = (ax-1)^{-k} - (ax+1)^{-k}`,
//! the pair at `n ≥ 1` equals `g(n)` for even `k` and `(-1)^{n+1} h(n)` for
//! odd `k`. Both are completely monotone on `x > 1/a`, which gives two-sided
//! rigorous brackets for the truncated tail:
//!
//! * even `k`: convexity of `g` traps `Σ_{n>N} g(n)` between the trapezoid
//!   and midpoint comparisons with `∫ g`;
//! * odd `k`: the Euler transform of the alternating tail has a remainder in
//!   `[0, Δ^p h(N+1) / 2^p]`.
//!
//! The returned value is the bracket midpoint and the error estimate is the
//! bracket half-width plus a floating-point allowance.

use crate::error::{Error, Result};
use crate::params::{validate_spec, EvalResult, Method, SeriesSpec};

/// Smallest tolerance `evaluate_series` accepts.
pub const MIN_SERIES_TOL: f64 = 1e-13;

/// Largest truncation radius `evaluate_series` will try.
pub const MAX_TERMS: u64 = 1_000_000_000;

const EULER_ORDER: usize = 6;

/// A symmetric partial sum over `n ∈ [-radius, radius]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartialSum {
    pub radius: u64,
    pub value: f64,
}

/// Neumaier-compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
    abs_total: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
        self.abs_total += x.abs();
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }

    /// Sum of magnitudes of everything added so far.
    pub fn abs_total(&self) -> f64 {
        self.abs_total
    }
}

fn term(spec: &SeriesSpec, n: i64) -> f64 {
    let base = f64::from(spec.a) * n as f64 + 1.0;
    let sign = if spec.k % 2 == 1 && n % 2 != 0 {
        -1.0
    } else {
        1.0
    };
    sign / base.powi(spec.k as i32)
}

/// `(ax-1)^{-k}` and `(ax+1)^{-k}`.
fn reciprocal_powers(spec: &SeriesSpec, x: f64) -> (f64, f64) {
    let ax = f64::from(spec.a) * x;
    let k = spec.k as i32;
    ((ax - 1.0).powi(-k), (ax + 1.0).powi(-k))
}

fn odd_envelope(spec: &SeriesSpec, x: f64) -> f64 {
    if spec.k == 1 {
        let ax = f64::from(spec.a) * x;
        2.0 / (ax * ax - 1.0)
    } else {
        let (minus, plus) = reciprocal_powers(spec, x);
        minus - plus
    }
}

fn accumulate(spec: &SeriesSpec, radius: u64) -> CompensatedSum {
    let mut acc = CompensatedSum::default();
    for n in (1..=radius).rev() {
        let n = n as i64;
        if spec.k == 1 {
            let an = f64::from(spec.a) * n as f64;
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            acc.add(sign * 2.0 / (1.0 - an * an));
        } else {
            acc.add(term(spec, -n));
            acc.add(term(spec, n));
        }
    }
    acc.add(1.0);
    acc
}

/// Symmetric partial sum over `n ∈ [-radius, radius]`, smallest terms first.
/// For `k = 1` each `±n` pair is added as `(-1)^n·2/(1 - a²n²)`.
pub fn partial_sum(spec: &SeriesSpec, radius: u64) -> Result<PartialSum> {
    validate_spec(spec)?;
    Ok(PartialSum {
        radius,
        value: accumulate(spec, radius).value(),
    })
}

/// Plain integral-comparison bound on `Σ_{|n|>N} |an+1|^{-k}`, valid for
/// `k ≥ 2` and `N ≥ 1`.
pub fn integral_tail_bound(spec: &SeriesSpec, radius: u64) -> f64 {
    let a = f64::from(spec.a);
    let k = f64::from(spec.k);
    let shifted = radius as f64 - 1.0 / a;
    2.0 / ((k - 1.0) * a.powf(k) * shifted.powf(k - 1.0))
}

/// Bracket `(midpoint, half_width)` for the tail beyond `radius` pairs.
fn tail_bracket(spec: &SeriesSpec, radius: u64) -> (f64, f64) {
    let m = radius as f64 + 1.0;
    if spec.k.is_multiple_of(2) {
        let a = f64::from(spec.a);
        let k = spec.k as i32;
        let antiderivative = |x: f64| {
            let ax = a * x;
            ((ax - 1.0).powi(1 - k) + (ax + 1.0).powi(1 - k)) / (a * f64::from(k - 1))
        };
        let g_m = {
            let (minus, plus) = reciprocal_powers(spec, m);
            minus + plus
        };
        let lower = antiderivative(m) + 0.5 * g_m;
        let upper = antiderivative(m - 0.5);
        let slack = 4.0 * f64::EPSILON * upper;
        (0.5 * (lower + upper), 0.5 * (upper - lower).abs() + slack)
    } else {
        let samples: Vec<f64> = (0..=EULER_ORDER)
            .map(|j| odd_envelope(spec, m + j as f64))
            .collect();
        let mut estimate = 0.0;
        let mut diffs = samples.clone();
        let mut weight = 0.5;
        for _ in 0..EULER_ORDER {
            estimate += weight * diffs[0];
            diffs = diffs.windows(2).map(|w| w[0] - w[1]).collect();
            weight *= 0.5;
        }
        // diffs[0] is Δ^p h(m); remainder lies in [0, Δ^p h(m) / 2^p].
        let remainder_cap = 2.0 * weight * diffs[0].max(0.0);
        let rounding = (1u32 << EULER_ORDER) as f64 * 4.0 * f64::EPSILON * samples[0];
        estimate += 0.5 * remainder_cap;
        let sign = if radius.is_multiple_of(2) { 1.0 } else { -1.0 };
        (sign * estimate, 0.5 * remainder_cap + rounding)
    }
}

/// Evaluate `S(k,a)` to within `tol`, with a rigorous error estimate.
pub fn evaluate_series(spec: &SeriesSpec, tol: f64) -> Result<EvalResult> {
    validate_spec(spec)?;
    if !(tol.is_finite() && tol >= MIN_SERIES_TOL) {
        return Err(Error::invalid(
            "tol",
            format!("must be a finite value >= {MIN_SERIES_TOL:e}, got {tol:e}"),
        ));
    }

    // Generous a-priori rounding allowance; the final estimate uses the
    // actual magnitude total.
    let rounding_budget = 64.0 * f64::EPSILON;
    let mut radius: u64 = 16;
    let (tail, tail_err) = loop {
        let (mid, half) = tail_bracket(spec, radius);
        if half + rounding_budget <= tol {
            break (mid, half);
        }
        if radius >= MAX_TERMS {
            return Err(Error::ToleranceUnachievable {
                tol,
                max_terms: MAX_TERMS,
            });
        }
        radius = (radius * 2).min(MAX_TERMS);
    };

    let acc = accumulate(spec, radius);
    let head = acc.value();
    let rounding = 8.0 * f64::EPSILON * (acc.abs_total() + head.abs());
    Ok(EvalResult::new(
        head + tail,
        tail_err + rounding,
        Method::Series,
        2 * radius + 1,
    ))
}

/// `Σ_{n≥0} 1/(2n+1)²`, half of the two-sided `S(2,2)`.
pub fn odd_square_sum(tol: f64) -> Result<f64> {
    let spec = SeriesSpec { k: 2, a: 2 };
    Ok(0.5 * evaluate_series(&spec, (2.0 * tol).max(MIN_SERIES_TOL))?.value)
}

/// `ζ(2)` from the even/odd split `ζ(2) = ζ(2)/4 + Σ_{n≥0} 1/(2n+1)²`.
pub fn zeta2_reconstruction(tol: f64) -> Result<f64> {
    if tol.is_nan() || tol < 1e-12 {
        return Err(Error::invalid(
            "tol",
            format!("must be >= 1e-12, got {tol:e}"),
        ));
    }
    // ζ(2) = (4/3)·odd, so the odd sum needs tol·3/4.
    Ok(4.0 / 3.0 * odd_square_sum(0.75 * tol)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn spec(k: u32, a: u32) -> SeriesSpec {
        SeriesSpec { k, a }
    }

    /// Plain left-to-right sum over n in [-radius, radius].
    fn naive(spec: &SeriesSpec, radius: i64) -> f64 {
        (-radius..=radius).map(|n| term(spec, n)).sum()
    }

    #[test]
    fn partial_sum_examples() {
        assert_eq!(partial_sum(&spec(2, 2), 0).unwrap().value, 1.0);
        // n=0, n=1, n=-1: 1 - 1/3 + 1
        let p = partial_sum(&spec(1, 2), 1).unwrap().value;
        assert!((p - 5.0 / 3.0).abs() < 1e-15);
        let p = partial_sum(&spec(2, 2), 1000).unwrap().value;
        assert!(p < PI * PI / 4.0 && p > 2.4669);
    }

    #[test]
    fn partial_sum_matches_naive_order() {
        for (k, a) in [(2, 2), (3, 3), (4, 5), (5, 2)] {
            let s = spec(k, a);
            let p = partial_sum(&s, 200).unwrap().value;
            assert!((p - naive(&s, 200)).abs() < 1e-13, "k={k} a={a}");
        }
    }

    #[test]
    fn series_examples() {
        let cases = [
            (1, 2, PI / 2.0),
            (2, 2, PI * PI / 4.0),
            (3, 2, PI.powi(3) / 16.0),
            // (π/a)csc(π/a) for k=1
            (1, 3, PI / 3.0 / (PI / 3.0).sin()),
            (1, 5, PI / 5.0 / (PI / 5.0).sin()),
        ];
        for (k, a, want) in cases {
            let r = evaluate_series(&spec(k, a), 1e-12).unwrap();
            assert!(
                (r.value - want).abs() <= 1e-12,
                "k={k} a={a}: {} vs {want}",
                r.value
            );
            assert!(r.error_estimate <= 1e-12);
            assert_eq!(r.method, Method::Series);
        }
    }

    #[test]
    fn error_estimate_brackets_truth() {
        // Compare a loose evaluation with a tight one.
        for k in 1..=6 {
            for a in 2..=6 {
                let s = spec(k, a);
                let loose = evaluate_series(&s, 1e-6).unwrap();
                let tight = evaluate_series(&s, 1e-13).unwrap();
                assert!(
                    (loose.value - tight.value).abs()
                        <= loose.error_estimate + tight.error_estimate,
                    "k={k} a={a}"
                );
            }
        }
    }

    #[test]
    fn rejects_tiny_tolerance() {
        assert!(matches!(
            evaluate_series(&spec(2, 2), 1e-14),
            Err(Error::InvalidParameter { field: "tol", .. })
        ));
    }

    #[test]
    fn integral_bound_dominates_tail() {
        let s = spec(3, 3);
        let tight = evaluate_series(&s, 1e-13).unwrap().value;
        let mut abs_tail = 0.0;
        for n in (51..200_000i64).rev() {
            abs_tail += term(&s, n).abs() + term(&s, -n).abs();
        }
        assert!(abs_tail <= integral_tail_bound(&s, 50));
        let p = partial_sum(&s, 50).unwrap().value;
        assert!((tight - p).abs() <= integral_tail_bound(&s, 50));
    }

    #[test]
    fn zeta2() {
        let z = zeta2_reconstruction(1e-10).unwrap();
        assert!((z - PI * PI / 6.0).abs() <= 1e-10);
        let z = zeta2_reconstruction(1e-6).unwrap();
        assert!((z - 1.644934).abs() <= 1e-6);
        assert!((odd_square_sum(1e-12).unwrap() - PI * PI / 8.0).abs() <= 1e-12);
        assert!(zeta2_reconstruction(1e-13).is_err());
    }

    #[test]
    fn modulus_two_symmetry() {
        // S(k,2) = 2·Σ_{n≥0} (-1)^{nk}/(2n+1)^k
        for k in 3..=7 {
            let s = spec(k, 2);
            let two_sided = evaluate_series(&s, 1e-12).unwrap().value;
            let mut acc = CompensatedSum::default();
            for n in (0..2_000_000i64).rev() {
                acc.add(term(&s, n));
            }
            assert!((two_sided - 2.0 * acc.value()).abs() < 1e-10, "k={k}");
        }
    }
}
