//! Shared domain types: the `(k, a)` pair, evaluation results and quadrature
//! settings, plus the density normalization constant used by every route.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The pair `(k, a)` selecting the series `Σ_{n∈Z} (-1)^{nk} / (an+1)^k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeriesSpec {
    pub k: u32,
    pub a: u32,
}

impl SeriesSpec {
    /// Build a validated spec.
    pub fn new(k: u32, a: u32) -> Result<Self> {
        let spec = SeriesSpec { k, a };
        validate_spec(&spec)?;
        Ok(spec)
    }

    /// `(-1)^k`.
    pub fn parity_sign(&self) -> f64 {
        if self.k.is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }
}

impl fmt::Display for SeriesSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "S(k={}, a={})", self.k, self.a)
    }
}

pub fn validate_spec(spec: &SeriesSpec) -> Result<()> {
    if spec.k < 1 {
        return Err(Error::invalid("k", format!("must be >= 1, got {}", spec.k)));
    }
    validate_modulus(spec.a)
}

pub(crate) fn validate_modulus(a: u32) -> Result<()> {
    if a < 2 {
        return Err(Error::invalid("a", format!("must be >= 2, got {a}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Series,
    DirectQuad,
    PolytopeFormula,
    MonteCarlo,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Series => "series",
            Method::DirectQuad => "direct_quad",
            Method::PolytopeFormula => "polytope_formula",
            Method::MonteCarlo => "monte_carlo",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A value with an error estimate. `work` counts terms summed, integrand
/// evaluations or samples, depending on the method.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub value: f64,
    pub error_estimate: f64,
    pub method: Method,
    pub work: u64,
}

impl EvalResult {
    pub(crate) fn new(value: f64, error_estimate: f64, method: Method, work: u64) -> Self {
        debug_assert!(error_estimate >= 0.0);
        EvalResult {
            value,
            error_estimate,
            method,
            work: work.max(1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl QuadConfig {
    pub fn new(abs_tol: f64, rel_tol: f64, max_subdivisions: usize) -> Result<Self> {
        let cfg = QuadConfig {
            abs_tol,
            rel_tol,
            max_subdivisions,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Same absolute and relative tolerance.
    pub fn with_tol(tol: f64) -> Result<Self> {
        Self::new(tol, tol, Self::DEFAULT_SUBDIVISIONS)
    }

    pub const DEFAULT_SUBDIVISIONS: usize = 2000;

    /// Defaults for nested integrals of depth two or more.
    pub fn nested() -> Self {
        QuadConfig {
            abs_tol: 1e-7,
            rel_tol: 1e-7,
            max_subdivisions: Self::DEFAULT_SUBDIVISIONS,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return Err(Error::invalid(
                "abs_tol",
                "must be a positive finite number",
            ));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return Err(Error::invalid(
                "rel_tol",
                "must be a positive finite number",
            ));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::invalid("max_subdivisions", "must be >= 1"));
        }
        Ok(())
    }

    /// Tolerances for an integral nested one level deeper.
    pub(crate) fn inner(&self) -> Self {
        const TIGHTEN: f64 = 1e-2;
        const FLOOR: f64 = 1e-14;
        QuadConfig {
            abs_tol: (self.abs_tol * TIGHTEN).max(FLOOR),
            rel_tol: (self.rel_tol * TIGHTEN).max(FLOOR),
            max_subdivisions: self.max_subdivisions,
        }
    }
}

impl Default for QuadConfig {
    /// One-dimensional defaults.
    fn default() -> Self {
        QuadConfig {
            abs_tol: 1e-9,
            rel_tol: 1e-9,
            max_subdivisions: Self::DEFAULT_SUBDIVISIONS,
        }
    }
}

/// `c_a = (a/π)·sin(π/a)`, the normalizing constant of both densities.
pub fn normalization_constant(a: u32) -> Result<f64> {
    validate_modulus(a)?;
    Ok(density_constant(a))
}

pub(crate) fn density_constant(a: u32) -> f64 {
    let a = f64::from(a);
    a / PI * (PI / a).sin()
}

/// `(π/a)·csc(π/a) = 1/c_a`, the total mass of `1/(1+t^a)` on `[0, ∞)`.
pub(crate) fn scale_factor(a: u32) -> f64 {
    let a = f64::from(a);
    PI / a / (PI / a).sin()
}
