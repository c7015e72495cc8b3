//! Quadrature: the adaptive 1-D engine, direct integration over the unit
//! cube and the nested integrals of the polytope formula.

mod adaptive;
mod direct;
mod formula;

pub use adaptive::{integrate_1d, integrate_with_error, Integral, Sample};
pub use direct::{direct_i, DIRECT_MAX_K};
pub use formula::{
    assemble_formula, assemble_formula_with, j_integral, k_integral, ProbabilityBreakdown,
    TupleConstant, TupleContribution, FORMULA_MAX_K,
};
