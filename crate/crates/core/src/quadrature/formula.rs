//! The polytope formula: `S(k,a) = ((π/a)csc(π/a))^k · (P_Ξ + P_Θ)`, where
//! `P_Ξ = P(Ξ_i Ξ_{i+1} < 1 ∀i)` is split by the set of indices with
//! `Ξ_i ≥ 1`:
//!
//! ```text
//! P_Ξ = ψ(1)^k + Σ_{admissible tuples r} J_r,    P_Θ = φ(1)^k + Σ_r K_r.
//! ```
//!
//! `J_r` integrates `c_a ψ(1/ξ_j)^{α_j} / (1 + ξ_j^a)` over the ordered
//! region `ξ_{r_1} ≥ … ≥ ξ_{r_n} ≥ 1` and carries `ψ(1)^{k-n-Σα}`; `K_r` is
//! the same with the `Θ` density and `φ`.
//!
//! Every level is integrated in `w = 1/ξ`, which maps the ordered region to
//! `0 < w_1 ≤ w_2 ≤ … ≤ w_n ≤ 1`. The per-variable weights become
//! `c_a w^{a-2} ψ(w)^α / (1 + w^a)` for `J` and `c_a φ(w)^α / (1 + w^a)` for
//! `K`, both bounded on `[0, 1]`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{all_admissible_tuples, AdmissibleTuple};
use crate::error::{Error, Result};
use crate::params::{scale_factor, validate_spec, EvalResult, Method, QuadConfig, SeriesSpec};
use crate::series::CompensatedSum;
use crate::special::{ClosedForm, Kind};

use super::adaptive::{integrate_with_error, Integral, Sample};

/// Largest `k` the nested formula supports (nesting depth `⌊k/2⌋ ≤ 3`).
pub const FORMULA_MAX_K: u32 = 6;

/// Per-variable constant used inside `J` and `K`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TupleConstant {
    /// The density normalization `c_a = (a/π)·sin(π/a)`.
    #[default]
    Density,
    /// `(π/a)·sin(π/a)`. Diagnostic only:
    /// it does not reproduce the series.
    Printed,
}

impl TupleConstant {
    fn value(self, a: u32) -> f64 {
        let a = f64::from(a);
        match self {
            TupleConstant::Density => a / PI * (PI / a).sin(),
            TupleConstant::Printed => PI / a * (PI / a).sin(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TupleContribution {
    pub tuple: AdmissibleTuple,
    pub j: f64,
    pub k: f64,
    pub j_error: f64,
    pub k_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityBreakdown {
    pub spec: SeriesSpec,
    pub constant: TupleConstant,
    pub easy_xi: f64,
    pub easy_theta: f64,
    pub contributions: Vec<TupleContribution>,
    pub total_probability: f64,
    pub assembled_s: f64,
    pub error_estimate: f64,
    pub evaluations: u64,
}

impl ProbabilityBreakdown {
    pub fn to_eval_result(&self) -> EvalResult {
        EvalResult::new(
            self.assembled_s,
            self.error_estimate,
            Method::PolytopeFormula,
            self.evaluations,
        )
    }
}

struct OrderedIntegrand<'a> {
    form: &'a ClosedForm,
    kind: Kind,
    alphas: &'a [u32],
    constant: f64,
}

impl OrderedIntegrand<'_> {
    fn weight(&self, level: usize, w: f64) -> f64 {
        let a = self.form.modulus() as i32;
        let alpha = self.alphas[level] as i32;
        let w_a = w.powi(a);
        match self.kind {
            Kind::Xi => self.constant * w.powi(a - 2) * self.form.psi(w).powi(alpha) / (1.0 + w_a),
            Kind::Theta => self.constant * self.form.phi(w).powi(alpha) / (1.0 + w_a),
        }
    }

    fn level(
        &self,
        level: usize,
        lower: f64,
        cfg: &QuadConfig,
        evals: &mut u64,
    ) -> Result<Integral> {
        let last = level + 1 == self.alphas.len();
        let inner_cfg = cfg.inner();
        integrate_with_error(
            |w| {
                let outer = self.weight(level, w);
                *evals += 1;
                if last {
                    return Ok(Sample::from(outer));
                }
                let inner = self.level(level + 1, w, &inner_cfg, evals)?;
                Ok(Sample {
                    value: outer * inner.value,
                    error: outer.abs() * inner.error,
                })
            },
            lower,
            1.0,
            cfg,
        )
    }
}

fn tuple_integral(
    spec: &SeriesSpec,
    tuple: &AdmissibleTuple,
    kind: Kind,
    constant: TupleConstant,
    cfg: &QuadConfig,
) -> Result<(Integral, u64)> {
    validate_spec(spec)?;
    cfg.validate()?;
    if tuple.k != spec.k as usize || tuple.is_empty() {
        return Err(Error::invalid(
            "tuple",
            format!(
                "tuple {:?} does not belong to k = {}",
                tuple.indices, spec.k
            ),
        ));
    }
    let form = ClosedForm::new(spec.a)?;
    let integrand = OrderedIntegrand {
        form: &form,
        kind,
        alphas: &tuple.alphas,
        constant: constant.value(spec.a),
    };
    let mut evals = 0;
    let label = match kind {
        Kind::Xi => "J",
        Kind::Theta => "K",
    };
    let integral = integrand
        .level(0, 0.0, cfg, &mut evals)
        .map_err(|e| e.within(format!("{label}{:?} for {spec}", tuple.indices)))?;
    let free = form.cdf(kind, 1.0).powi(tuple.free_exponent() as i32);
    Ok((
        Integral {
            value: free * integral.value,
            error: free * integral.error,
            ..integral
        },
        evals,
    ))
}

/// `J_r`, the probability that exactly the indices of `r` have `Ξ ≥ 1`,
/// ordered as in `r`, and every cyclic product stays below one.
pub fn j_integral(
    spec: &SeriesSpec,
    tuple: &AdmissibleTuple,
    cfg: &QuadConfig,
) -> Result<Integral> {
    tuple_integral(spec, tuple, Kind::Xi, TupleConstant::Density, cfg).map(|r| r.0)
}

/// `K_r`, the `Θ` counterpart of [`j_integral`].
pub fn k_integral(
    spec: &SeriesSpec,
    tuple: &AdmissibleTuple,
    cfg: &QuadConfig,
) -> Result<Integral> {
    tuple_integral(spec, tuple, Kind::Theta, TupleConstant::Density, cfg).map(|r| r.0)
}

pub fn assemble_formula(spec: &SeriesSpec, cfg: &QuadConfig) -> Result<ProbabilityBreakdown> {
    assemble_formula_with(spec, cfg, TupleConstant::Density)
}

/// Assemble the polytope formula with the chosen per-variable constant.
/// Tuples are integrated in parallel and summed in lexicographic order.
pub fn assemble_formula_with(
    spec: &SeriesSpec,
    cfg: &QuadConfig,
    constant: TupleConstant,
) -> Result<ProbabilityBreakdown> {
    validate_spec(spec)?;
    cfg.validate()?;
    if spec.k > FORMULA_MAX_K {
        return Err(Error::UnsupportedDimension {
            k: spec.k,
            max: FORMULA_MAX_K,
            method: "polytope formula",
        });
    }
    let k = spec.k as usize;
    let tuples = if k >= 2 {
        all_admissible_tuples(k)?
    } else {
        Vec::new()
    };

    let computed: Vec<Result<(TupleContribution, u64)>> = tuples
        .into_par_iter()
        .map(|tuple| {
            let (j, j_evals) = tuple_integral(spec, &tuple, Kind::Xi, constant, cfg)?;
            let (kk, k_evals) = tuple_integral(spec, &tuple, Kind::Theta, constant, cfg)?;
            Ok((
                TupleContribution {
                    tuple,
                    j: j.value,
                    k: kk.value,
                    j_error: j.error,
                    k_error: kk.error,
                },
                j_evals + k_evals,
            ))
        })
        .collect();

    let form = ClosedForm::new(spec.a)?;
    let easy_xi = form.psi(1.0).powi(k as i32);
    let easy_theta = form.phi(1.0).powi(k as i32);

    let mut total = CompensatedSum::default();
    total.add(easy_xi);
    total.add(easy_theta);
    let mut error = 0.0;
    let mut evaluations = 0;
    let mut contributions = Vec::with_capacity(computed.len());
    for item in computed {
        let (c, evals) = item?;
        total.add(c.j);
        total.add(c.k);
        error += c.j_error + c.k_error;
        evaluations += evals;
        contributions.push(c);
    }
    let total_probability = total.value();
    let scale = scale_factor(spec.a).powi(k as i32);
    let rounding = 16.0 * f64::EPSILON * total.abs_total();
    Ok(ProbabilityBreakdown {
        spec: *spec,
        constant,
        easy_xi,
        easy_theta,
        contributions,
        total_probability,
        assembled_s: scale * total_probability,
        error_estimate: scale * (error + rounding),
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> QuadConfig {
        QuadConfig::with_tol(1e-11).unwrap()
    }

    #[test]
    fn single_tuple_k2_a2_is_one_eighth() {
        let spec = SeriesSpec { k: 2, a: 2 };
        let t = AdmissibleTuple::new(2, vec![1]).unwrap();
        let j = j_integral(&spec, &t, &cfg()).unwrap();
        assert!((j.value - 0.125).abs() < 1e-11, "{}", j.value);
        let k = k_integral(&spec, &t, &cfg()).unwrap();
        assert!((k.value - 0.125).abs() < 1e-11);
    }

    #[test]
    fn k1_has_no_tuples() {
        let spec = SeriesSpec { k: 1, a: 5 };
        let b = assemble_formula(&spec, &cfg()).unwrap();
        assert!(b.contributions.is_empty());
        assert!((b.total_probability - 1.0).abs() < 1e-15);
        assert!((b.assembled_s - scale_factor(5)).abs() < 1e-14);
    }

    #[test]
    fn k2_a2_breakdown() {
        let spec = SeriesSpec { k: 2, a: 2 };
        let b = assemble_formula(&spec, &cfg()).unwrap();
        assert!((b.easy_xi - 0.25).abs() < 1e-15);
        assert!((b.easy_theta - 0.25).abs() < 1e-15);
        assert_eq!(b.contributions.len(), 2);
        assert!((b.total_probability - 1.0).abs() < 1e-10);
        assert!((b.assembled_s - PI * PI / 4.0).abs() < 1e-9);
    }

    #[test]
    fn printed_constant_misses() {
        let spec = SeriesSpec { k: 2, a: 2 };
        let b = assemble_formula_with(&spec, &cfg(), TupleConstant::Printed).unwrap();
        let printed = (PI / 2.0).powi(2) * (0.5 + PI * PI / 8.0);
        assert!((b.assembled_s - printed).abs() < 1e-9);
    }

    #[test]
    fn rejects_foreign_tuple_and_large_k() {
        let spec = SeriesSpec { k: 3, a: 2 };
        let t = AdmissibleTuple::new(4, vec![1, 3]).unwrap();
        assert!(j_integral(&spec, &t, &cfg()).is_err());
        assert!(matches!(
            assemble_formula(&SeriesSpec { k: 7, a: 2 }, &cfg()),
            Err(Error::UnsupportedDimension { .. })
        ));
    }
}
