//! The algebraic change of variables from the hyperbolic polytope
//! `H^k = {ξ : ξ_i > 0, ξ_i ξ_{i+1} < 1 cyclically}` onto the unit cube,
//!
//! ```text
//! x_i = ξ_i^a (1 + ξ_{i+1}^a) / (1 + ξ_i^a),   ξ_{k+1} := ξ_1,
//! ```
//!
//! with its closed-form Jacobian determinant and a finite-difference check.

use rand::Rng;

use crate::error::{Error, Result};
use crate::params::validate_modulus;
use crate::special::ClosedForm;

/// Attempt cap for rejection sampling of polytope points.
pub const MAX_REJECTION_ATTEMPTS: usize = 1_000_000;

/// True iff every coordinate is positive and every cyclic neighbour
/// product is below one. For `k = 1` the neighbour of `ξ_1` is itself.
pub fn in_polytope(xi: &[f64]) -> bool {
    if xi.is_empty() || xi.iter().any(|&v| !(v.is_finite() && v > 0.0)) {
        return false;
    }
    cyclic_products(xi).all(|p| p < 1.0)
}

fn cyclic_products(xi: &[f64]) -> impl Iterator<Item = f64> + '_ {
    let k = xi.len();
    (0..k).map(move |i| xi[i] * xi[(i + 1) % k])
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolytopePoint(Vec<f64>);

impl PolytopePoint {
    pub fn new(xi: Vec<f64>) -> Result<Self> {
        if !in_polytope(&xi) {
            return Err(Error::DomainViolation(format!("{xi:?}")));
        }
        Ok(PolytopePoint(xi))
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Distance of the largest cyclic product from the boundary value 1.
    pub fn margin(&self) -> f64 {
        cyclic_products(&self.0).fold(f64::INFINITY, |m, p| m.min(1.0 - p))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CubePoint(Vec<f64>);

impl CubePoint {
    pub fn coords(&self) -> &[f64] {
        &self.0
    }
}

fn map_coords(a: u32, xi: &[f64]) -> Vec<f64> {
    let k = xi.len();
    let pow: Vec<f64> = xi.iter().map(|v| v.powi(a as i32)).collect();
    (0..k)
        .map(|i| pow[i] * (1.0 + pow[(i + 1) % k]) / (1.0 + pow[i]))
        .collect()
}

pub fn forward_map(a: u32, p: &PolytopePoint) -> Result<CubePoint> {
    validate_modulus(a)?;
    let x = map_coords(a, p.coords());
    debug_assert!(x.iter().all(|&v| v > 0.0 && v < 1.0), "{x:?}");
    Ok(CubePoint(x))
}

/// `a·ξ_1^{a-1}` for `k = 1`; otherwise
/// `a^k (∏ξ)^{a-1} (1 - (-1)^k (∏ξ)^a) / ∏(1 + ξ_i^a)`.
pub fn jacobian_det_closed(a: u32, p: &PolytopePoint) -> Result<f64> {
    validate_modulus(a)?;
    let xi = p.coords();
    let af = f64::from(a);
    if xi.len() == 1 {
        return Ok(af * xi[0].powi(a as i32 - 1));
    }
    let k = xi.len() as i32;
    let product: f64 = xi.iter().product();
    let denominator: f64 = xi.iter().map(|v| 1.0 + v.powi(a as i32)).product();
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    Ok(
        af.powi(k) * product.powi(a as i32 - 1) * (1.0 - sign * product.powi(a as i32))
            / denominator,
    )
}

/// Determinant of the central-difference Jacobian. Coordinate `i` is
/// perturbed by `h·ξ_i`, so `h` is a relative step.
pub fn jacobian_det_numeric(a: u32, p: &PolytopePoint, h: f64) -> Result<f64> {
    validate_modulus(a)?;
    if !(h > 0.0 && h < 0.5) {
        return Err(Error::invalid(
            "h",
            format!("must lie in (0, 0.5), got {h}"),
        ));
    }
    let xi = p.coords();
    let k = xi.len();
    let mut matrix = vec![vec![0.0; k]; k];
    let mut probe = xi.to_vec();
    for j in 0..k {
        let step = h * xi[j];
        probe[j] = xi[j] + step;
        if !in_polytope(&probe) {
            return Err(Error::DomainViolation(format!(
                "step h = {h} leaves the polytope at coordinate {j}"
            )));
        }
        let plus = map_coords(a, &probe);
        probe[j] = xi[j] - step;
        let minus = map_coords(a, &probe);
        probe[j] = xi[j];
        for i in 0..k {
            matrix[i][j] = (plus[i] - minus[i]) / (2.0 * step);
        }
    }
    Ok(determinant(matrix))
}

/// Gaussian elimination with partial pivoting.
fn determinant(mut m: Vec<Vec<f64>>) -> f64 {
    let n = m.len();
    let mut det = 1.0;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&r, &s| m[r][col].abs().total_cmp(&m[s][col].abs()))
            .unwrap_or(col);
        if m[pivot][col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        det *= m[col][col];
        for row in col + 1..n {
            let factor = m[row][col] / m[col][col];
            let (upper, lower) = m.split_at_mut(row);
            for (target, &pivot_entry) in lower[0][col..].iter_mut().zip(&upper[col][col..]) {
                *target -= factor * pivot_entry;
            }
        }
    }
    det
}

/// Rejection-sample a point of `H^k` whose coordinates are i.i.d. `Ξ` draws,
/// keeping only points with every cyclic product at most `1 - margin`.
pub fn sample_polytope_point<R: Rng + ?Sized>(
    a: u32,
    k: usize,
    margin: f64,
    rng: &mut R,
) -> Result<PolytopePoint> {
    if k == 0 {
        return Err(Error::invalid("k", "must be >= 1"));
    }
    let form = ClosedForm::new(a)?;
    let mut xi = vec![0.0; k];
    for _ in 0..MAX_REJECTION_ATTEMPTS {
        for v in xi.iter_mut() {
            let u: f64 = rng.gen_range(f64::EPSILON..1.0);
            *v = form.inverse_xi(u)?;
        }
        if in_polytope(&xi) && cyclic_products(&xi).all(|p| p <= 1.0 - margin) {
            return Ok(PolytopePoint(xi));
        }
    }
    Err(Error::DomainViolation(format!(
        "no polytope point accepted in {MAX_REJECTION_ATTEMPTS} attempts"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn point(xi: &[f64]) -> PolytopePoint {
        PolytopePoint::new(xi.to_vec()).unwrap()
    }

    #[test]
    fn membership_examples() {
        assert!(in_polytope(&[0.5, 1.9]));
        assert!(!in_polytope(&[1.0, 1.0, 0.1]));
        assert!(!in_polytope(&[2.0, 0.4, 2.0]));
        assert!(!in_polytope(&[0.5, 0.0]));
        assert!(!in_polytope(&[]));
        assert!(in_polytope(&[0.7]));
        assert!(!in_polytope(&[1.0]));
        assert!(matches!(
            PolytopePoint::new(vec![2.0, 0.4, 2.0]),
            Err(Error::DomainViolation(_))
        ));
    }

    #[test]
    fn forward_map_examples() {
        let x = forward_map(2, &point(&[0.5, 0.5, 0.5])).unwrap();
        for v in x.coords() {
            assert!((v - 0.25).abs() < 1e-15);
        }
        let x = forward_map(3, &point(&[0.7])).unwrap();
        assert!((x.coords()[0] - 0.343).abs() < 1e-15);
        let x = forward_map(2, &point(&[0.5, 1.2])).unwrap();
        assert!((x.coords()[0] - 0.488).abs() < 1e-15);
        assert!((x.coords()[1] - 1.44 * 1.25 / 2.44).abs() < 1e-15);
    }

    #[test]
    fn closed_determinant_examples() {
        assert!((jacobian_det_closed(2, &point(&[0.5])).unwrap() - 1.0).abs() < 1e-15);

        let p = point(&[0.5, 1.2]);
        let x = forward_map(2, &p).unwrap();
        let (x1, x2) = (x.coords()[0], x.coords()[1]);
        let two_dim = 4.0 * (x1 * x2).sqrt() * (1.0 - x1 * x2) / ((1.0 + 0.25) * (1.0 + 1.44));
        assert!((jacobian_det_closed(2, &p).unwrap() - two_dim).abs() < 1e-14);

        // 8·(1/8)·(1 + 1/64) / 1.25³
        let d = jacobian_det_closed(2, &point(&[0.5, 0.5, 0.5])).unwrap();
        assert!((d - 0.52).abs() < 1e-14, "{d}");
        let n = jacobian_det_numeric(2, &point(&[0.5, 0.5, 0.5]), 1e-5).unwrap();
        assert!((n - 0.52).abs() < 1e-8);
    }

    #[test]
    fn numeric_determinant_examples() {
        let n = jacobian_det_numeric(2, &point(&[0.5]), 1e-5).unwrap();
        assert!((n - 1.0).abs() < 1e-9);
        let p = point(&[0.5, 1.2]);
        let c = jacobian_det_closed(2, &p).unwrap();
        let n = jacobian_det_numeric(2, &p, 1e-5).unwrap();
        assert!(((c - n) / c).abs() < 1e-8);

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p = sample_polytope_point(4, 5, 1e-3, &mut rng).unwrap();
        let c = jacobian_det_closed(4, &p).unwrap();
        let n = jacobian_det_numeric(4, &p, 1e-5).unwrap();
        assert!(((c - n) / c).abs() < 1e-6);
    }

    #[test]
    fn numeric_step_leaving_polytope_is_rejected() {
        let p = point(&[0.999_999, 1.0]);
        assert!(matches!(
            jacobian_det_numeric(2, &p, 1e-3),
            Err(Error::DomainViolation(_))
        ));
    }

    #[test]
    fn two_dim_identity_at_random_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let p = sample_polytope_point(2, 2, 0.0, &mut rng).unwrap();
            let (s1, s2) = (p.coords()[0], p.coords()[1]);
            let x = forward_map(2, &p).unwrap();
            let prod = x.coords()[0] * x.coords()[1];
            let want = 4.0 * prod.sqrt() * (1.0 - prod) / ((1.0 + s1 * s1) * (1.0 + s2 * s2));
            let got = jacobian_det_closed(2, &p).unwrap();
            assert!(((got - want) / want).abs() < 1e-12);
        }
    }

    #[test]
    fn sampled_points_map_into_cube_and_are_distinct() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for a in [2, 3, 4] {
            for k in 1..=6 {
                let mut images = Vec::new();
                for _ in 0..100 {
                    let p = sample_polytope_point(a, k, 0.0, &mut rng).unwrap();
                    let x = forward_map(a, &p).unwrap();
                    assert!(x.coords().iter().all(|&v| v > 0.0 && v < 1.0));
                    assert!(jacobian_det_closed(a, &p).unwrap() > 0.0);
                    images.push((p, x));
                }
                for w in images.windows(2) {
                    if w[0].0 != w[1].0 {
                        assert_ne!(w[0].1, w[1].1);
                    }
                }
            }
        }
    }

    #[test]
    fn determinant_of_known_matrix() {
        let m = vec![
            vec![0.0, 2.0, 1.0],
            vec![1.0, 0.0, 0.0],
            vec![3.0, 1.0, 4.0],
        ];
        // expand along row 2: -1·(2·4 - 1·1) = -7
        assert!((determinant(m) + 7.0).abs() < 1e-14);
    }
}
