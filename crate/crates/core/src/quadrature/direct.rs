//! Direct integration of `I_{k,a}` over the unit cube.
//!
//! With `x_i = u_i^a` the integrand becomes
//! `(1 + P^{a-2}) / (1 - (-1)^k P^a)`, `P = ∏u_i`, which is bounded except
//! near the corner `u = (1, …, 1)` for even `k`. Each coordinate is
//! integrated as `v = 1 - u`, which puts that corner at the origin where
//! floating point resolves the peak.

use crate::error::{Error, Result};
use crate::params::{validate_spec, EvalResult, Method, QuadConfig, SeriesSpec};

use super::adaptive::{integrate_with_error, Integral, Sample};

/// Largest dimension handled by tensor-product quadrature.
pub const DIRECT_MAX_K: u32 = 3;

struct CubeIntegrand {
    a: i32,
    k: usize,
    even: bool,
}

impl CubeIntegrand {
    /// `log_sum` is `Σ ln u_i`, kept in log form so `1 - P^a` stays
    /// accurate next to the corner.
    fn eval(&self, log_sum: f64) -> f64 {
        let product = log_sum.exp();
        let numerator = 1.0 + product.powi(self.a - 2);
        let denominator = if self.even {
            -(f64::from(self.a) * log_sum).exp_m1()
        } else {
            1.0 + product.powi(self.a)
        };
        numerator / denominator
    }

    fn level(
        &self,
        depth: usize,
        log_sum: f64,
        cfg: &QuadConfig,
        evals: &mut u64,
    ) -> Result<Integral> {
        let last = depth + 1 == self.k;
        let inner_cfg = cfg.inner();
        let integral = integrate_with_error(
            |v| {
                let log_u = (-v).ln_1p();
                if last {
                    *evals += 1;
                    Ok(Sample::from(self.eval(log_sum + log_u)))
                } else {
                    let inner = self.level(depth + 1, log_sum + log_u, &inner_cfg, evals)?;
                    Ok(Sample {
                        value: inner.value,
                        error: inner.error,
                    })
                }
            },
            0.0,
            1.0,
            cfg,
        )?;
        Ok(integral)
    }
}

/// `I_{k,a}` by nested adaptive quadrature, for `k ≤ 3`.
pub fn direct_i(spec: &SeriesSpec, cfg: &QuadConfig) -> Result<EvalResult> {
    validate_spec(spec)?;
    cfg.validate()?;
    if spec.k > DIRECT_MAX_K {
        return Err(Error::UnsupportedDimension {
            k: spec.k,
            max: DIRECT_MAX_K,
            method: "direct quadrature",
        });
    }
    let integrand = CubeIntegrand {
        a: spec.a as i32,
        k: spec.k as usize,
        even: spec.k.is_multiple_of(2),
    };
    let mut evals = 0u64;
    let integral = integrand
        .level(0, 0.0, cfg, &mut evals)
        .map_err(|e| e.within(format!("direct I for {spec}")))?;
    Ok(EvalResult::new(
        integral.value,
        integral.error,
        Method::DirectQuad,
        evals,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn one_dimensional_is_arctan() {
        let r = direct_i(&SeriesSpec { k: 1, a: 2 }, &QuadConfig::default()).unwrap();
        assert!((r.value - PI / 2.0).abs() < 1e-12);
        assert_eq!(r.method, Method::DirectQuad);
    }

    #[test]
    fn corner_singularity_at_k2() {
        let r = direct_i(
            &SeriesSpec { k: 2, a: 2 },
            &QuadConfig::with_tol(1e-9).unwrap(),
        )
        .unwrap();
        assert!((r.value - PI * PI / 4.0).abs() < 1e-7, "{}", r.value);
    }

    #[test]
    fn rejects_large_dimension() {
        assert!(matches!(
            direct_i(&SeriesSpec { k: 4, a: 2 }, &QuadConfig::default()),
            Err(Error::UnsupportedDimension { k: 4, .. })
        ));
    }
}
