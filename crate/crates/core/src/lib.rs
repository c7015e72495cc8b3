//! Evaluation of the alternating series
//! `S(k,a) = Σ_{n∈Z} (-1)^{nk} / (an+1)^k` by four independent routes:
//! direct summation, quadrature over the unit cube, an assembled formula
//! over a hyperbolic polytope, and Monte Carlo.

pub mod cli;
pub mod combinatorics;
pub mod error;
pub mod monte_carlo;
pub mod params;
pub mod polytope;
pub mod quadrature;
pub mod series;
pub mod special;

pub use error::{Error, Result};
pub use params::{
    normalization_constant, validate_spec, EvalResult, Method, QuadConfig, SeriesSpec,
};
