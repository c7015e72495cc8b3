//! Densities and distribution functions of the two variates.
//!
//! `Ξ` has density `c_a / (1 + t^a)` and `Θ` has density
//! `c_a·t^{a-2} / (1 + t^a)` on `[0, ∞)`, with `c_a = (a/π)·sin(π/a)`.
//! Their CDFs are `ψ` and `φ`. `ψ` comes from the closed-form antiderivative
//!
//! ```text
//! G_a(x) = -(2/a) Σ_j P_j(x) cos θ_j + (2/a) Σ_j Q_j(x) sin θ_j  [+ (1/a) ln(1+x), a odd]
//! θ_j = (2j+1)π/a,  j = 0..=⌊a/2 - 1⌋
//! P_j(x) = ½ ln(x² - 2x cos θ_j + 1),  Q_j(x) = arctan((x - cos θ_j) / sin θ_j)
//! ```
//!
//! shifted by a constant so that `G_a(∞) = 0` and `G_a(0) = -(π/a)csc(π/a)`.
//! Then `ψ(t) = 1 + c_a G_a(t)` and `φ(t) = 1 - ψ(1/t)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{density_constant, validate_modulus, QuadConfig};
use crate::quadrature::integrate_1d;

/// Residual target of the inverse-CDF search.
pub const INVERSE_TOL: f64 = 1e-12;
const MAX_ROOT_ITERATIONS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Xi,
    Theta,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DistributionKind {
    pub kind: Kind,
    pub a: u32,
}

impl DistributionKind {
    pub fn new(kind: Kind, a: u32) -> Result<Self> {
        validate_modulus(a)?;
        Ok(DistributionKind { kind, a })
    }

    pub fn xi(a: u32) -> Result<Self> {
        Self::new(Kind::Xi, a)
    }

    pub fn theta(a: u32) -> Result<Self> {
        Self::new(Kind::Theta, a)
    }
}

/// A CDF evaluation `u = F(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CdfValue {
    pub t: f64,
    pub u: f64,
}

/// Precomputed closed form for one modulus `a`.
#[derive(Debug, Clone)]
pub struct ClosedForm {
    a: u32,
    c: f64,
    /// `(cos θ_j, sin θ_j)` for `j = 0..=⌊a/2 - 1⌋`.
    angles: Vec<(f64, f64)>,
}

impl ClosedForm {
    pub fn new(a: u32) -> Result<Self> {
        validate_modulus(a)?;
        let terms = a / 2;
        let angles = (0..terms)
            .map(|j| {
                let theta = f64::from(2 * j + 1) * std::f64::consts::PI / f64::from(a);
                (theta.cos(), theta.sin())
            })
            .collect();
        Ok(ClosedForm {
            a,
            c: density_constant(a),
            angles,
        })
    }

    pub fn modulus(&self) -> u32 {
        self.a
    }

    /// `c_a`.
    pub fn constant(&self) -> f64 {
        self.c
    }

    /// Antiderivative of `1/(1+x^a)` normalized to vanish at infinity.
    ///
    /// For `x > 1` the logarithms are evaluated after factoring out `x`;
    /// the `ln x` parts cancel exactly because `Σ cos θ_j` is `0` for even
    /// `a` and `½` for odd `a`.
    pub fn antiderivative(&self, x: f64) -> f64 {
        let a = f64::from(self.a);
        let odd = self.a % 2 == 1;
        let mut logs = 0.0;
        let mut arcs = 0.0;
        if x <= 1.0 {
            for &(c, s) in &self.angles {
                logs += c * (x - c).hypot(s).ln();
                // Q_j(x) - π/2 = -atan2(s, x - c) since s > 0
                arcs += s * s.atan2(x - c);
            }
            let mut g = -2.0 / a * (logs + arcs);
            if odd {
                g += x.ln_1p() / a;
            }
            g
        } else {
            let r = 1.0 / x;
            for &(c, s) in &self.angles {
                logs += c * (1.0 - c * r).hypot(s * r).ln();
                arcs += s * s.atan2(x - c);
            }
            let mut g = -2.0 / a * (logs + arcs);
            if odd {
                g += r.ln_1p() / a;
            }
            g
        }
    }

    pub fn density_xi(&self, t: f64) -> f64 {
        self.c / (1.0 + t.powi(self.a as i32))
    }

    pub fn density_theta(&self, t: f64) -> f64 {
        self.c * t.powi(self.a as i32 - 2) / (1.0 + t.powi(self.a as i32))
    }

    /// `ψ(t)`.
    pub fn psi(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        (1.0 + self.c * self.antiderivative(t)).clamp(0.0, 1.0)
    }

    /// `1 - ψ(t)` without cancellation for large `t`.
    pub fn psi_complement(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 1.0;
        }
        (-self.c * self.antiderivative(t)).clamp(0.0, 1.0)
    }

    /// `φ(t) = 1 - ψ(1/t)`.
    pub fn phi(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        self.psi_complement(1.0 / t)
    }

    pub fn cdf(&self, kind: Kind, t: f64) -> f64 {
        match kind {
            Kind::Xi => self.psi(t),
            Kind::Theta => self.phi(t),
        }
    }

    pub fn density(&self, kind: Kind, t: f64) -> f64 {
        match kind {
            Kind::Xi => self.density_xi(t),
            Kind::Theta => self.density_theta(t),
        }
    }

    /// Solve `ψ(t) = u` by safeguarded Newton iteration inside an expanding
    /// bracket. For `u > ½` the residual is taken on the complement.
    pub fn inverse_xi(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::invalid("u", format!("must lie in (0, 1), got {u}")));
        }
        let upper_half = u > 0.5;
        let complement = 1.0 - u;
        // Increasing in t in both branches.
        let residual = |t: f64| {
            if upper_half {
                complement - self.psi_complement(t)
            } else {
                self.psi(t) - u
            }
        };

        let mut lo = 0.0;
        let mut hi = 1.0;
        while residual(hi) < 0.0 {
            lo = hi;
            hi *= 2.0;
            if !hi.is_finite() {
                return Err(Error::RootSearch {
                    u,
                    reason: "upper bracket overflowed".into(),
                });
            }
        }

        let mut t = 0.5 * (lo + hi);
        for _ in 0..MAX_ROOT_ITERATIONS {
            let r = residual(t);
            if r.abs() <= 0.1 * INVERSE_TOL {
                return Ok(t);
            }
            if r < 0.0 {
                lo = t;
            } else {
                hi = t;
            }
            if hi - lo <= 2.0 * f64::EPSILON * hi {
                return Ok(t);
            }
            let step = r / self.density_xi(t);
            let newton = t - step;
            t = if newton > lo && newton < hi && step.is_finite() {
                newton
            } else {
                0.5 * (lo + hi)
            };
        }
        Err(Error::RootSearch {
            u,
            reason: format!("no convergence in {MAX_ROOT_ITERATIONS} iterations"),
        })
    }
}

fn check_argument(t: f64) -> Result<()> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::invalid("t", format!("must be >= 0, got {t}")));
    }
    Ok(())
}

pub fn density(d: DistributionKind, t: f64) -> Result<f64> {
    check_argument(t)?;
    Ok(ClosedForm::new(d.a)?.density(d.kind, t))
}

/// `G_a(x)`, the antiderivative of `1/(1+x^a)` with `G_a(∞) = 0`.
pub fn antiderivative_g(a: u32, x: f64) -> Result<f64> {
    check_argument(x)?;
    Ok(ClosedForm::new(a)?.antiderivative(x))
}

/// `ψ(t)` for `Ξ`, `φ(t)` for `Θ`.
pub fn cdf(d: DistributionKind, t: f64) -> Result<f64> {
    check_argument(t)?;
    Ok(ClosedForm::new(d.a)?.cdf(d.kind, t))
}

pub fn inverse_cdf_xi(a: u32, u: f64) -> Result<f64> {
    ClosedForm::new(a)?.inverse_xi(u)
}

/// Largest deviation between the closed-form CDFs and direct quadrature of
/// the densities, over both variates and every grid point.
pub fn verify_cdf_numeric(a: u32, grid: &[f64], cfg: &QuadConfig) -> Result<f64> {
    let form = ClosedForm::new(a)?;
    let mut worst: f64 = 0.0;
    for &t in grid {
        check_argument(t)?;
        for kind in [Kind::Xi, Kind::Theta] {
            let quad = integrate_1d(|x| form.density(kind, x), 0.0, t, cfg)?;
            worst = worst.max((form.cdf(kind, t) - quad.value).abs());
        }
    }
    Ok(worst)
}
