//! Plug-in estimates of `σ²`, `S` and `λ⋆` from a measured training-risk curve.
//!
//! The training risk is flat at both ends of the `λ` axis: it tends to
//! `σ²(1−c)` as `λ → 0` (for `c < 1`) and to `S/q + σ²` as `λ → ∞`. Reading the
//! curve at one small and one large `λ` and inverting those two values gives
//! `σ̂²` and `Ŝ`, which feed the closed-form `λ⋆`.

use alloc::format;

use crate::error::{invalid, Error, Result};
use crate::theory::{closed_form_lambda_star, LambdaStar};

/// Default "small λ" anchor.
pub const SMALL_LAMBDA_ANCHOR: f64 = 1e-6;
/// Default "large λ" anchor.
pub const LARGE_LAMBDA_ANCHOR: f64 = 1e4;

/// A measured point `(λ, R̂_train(λ))` on the training curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Anchor {
    pub lambda: f64,
    pub train_risk: f64,
}

/// `σ̂² = R̂_train(λ→0) / (1 − c)`.
pub fn estimate_sigma2(r_train_small_lambda: f64, c: f64) -> Result<f64> {
    if !(c.is_finite() && c > 0.0) {
        return Err(invalid!("aspect ratio must be positive, got {c}"));
    }
    if c >= 1.0 {
        return Err(Error::UnsupportedRegime(format!(
            "the small-lambda training risk does not identify sigma2 for c = {c} >= 1"
        )));
    }
    if !(r_train_small_lambda.is_finite() && r_train_small_lambda >= 0.0) {
        return Err(invalid!("training risk must be finite and nonnegative, got {r_train_small_lambda}"));
    }
    Ok(r_train_small_lambda / (1.0 - c))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MismatchEstimate {
    /// `max(0, raw)`.
    pub value: f64,
    /// `q (R̂_train(λ≫1) − σ̂²)` before clipping.
    pub raw: f64,
    pub clipped: bool,
}

/// `Ŝ = q (R̂_train(λ≫1) − σ̂²)`, clipped at zero with a flag.
pub fn estimate_mismatch(r_train_large_lambda: f64, sigma2_hat: f64, q: usize) -> MismatchEstimate {
    let raw = q as f64 * (r_train_large_lambda - sigma2_hat);
    MismatchEstimate { value: raw.max(0.0), raw, clipped: raw < 0.0 }
}

/// Plug-in `λ̂⋆` from the closed form. An estimated `Ŝ = 0` yields
/// [`LambdaStar::PriorExact`].
pub fn estimate_lambda_star(sigma2_hat: f64, s_hat: f64, c: f64) -> Result<LambdaStar> {
    closed_form_lambda_star(sigma2_hat, s_hat, c)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimationResult {
    pub sigma2_hat: f64,
    pub s_hat: MismatchEstimate,
    pub lambda_star_hat: LambdaStar,
    pub small: Anchor,
    pub large: Anchor,
}

/// Full pipeline from the two anchors.
pub fn estimate_from_anchors(small: Anchor, large: Anchor, c: f64, q: usize) -> Result<EstimationResult> {
    if !(small.lambda < large.lambda) {
        return Err(invalid!(
            "small anchor (lambda = {}) must lie below the large one (lambda = {})",
            small.lambda,
            large.lambda
        ));
    }
    let sigma2_hat = estimate_sigma2(small.train_risk, c)?;
    let s_hat = estimate_mismatch(large.train_risk, sigma2_hat, q);
    let lambda_star_hat = estimate_lambda_star(sigma2_hat, s_hat.value, c)?;
    Ok(EstimationResult { sigma2_hat, s_hat, lambda_star_hat, small, large })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theory::{asymptotic_risks_identity, AsymptoticRegime};
    use proptest::prelude::*;

    #[test]
    fn sigma2_inversion() {
        assert_eq!(estimate_sigma2(0.25, 0.5).unwrap(), 0.5);
        assert_eq!(estimate_sigma2(0.0, 0.3).unwrap(), 0.0);
        assert!(matches!(estimate_sigma2(0.1, 1.0), Err(Error::UnsupportedRegime(_))));
        assert!(matches!(estimate_sigma2(0.1, 2.0), Err(Error::UnsupportedRegime(_))));
    }

    #[test]
    fn mismatch_inversion_and_clipping() {
        let s = estimate_mismatch(0.7, 0.5, 10);
        assert!((s.value - 2.0).abs() < 1e-14 && !s.clipped);
        assert_eq!(estimate_mismatch(0.5, 0.5, 10).value, 0.0);
        let neg = estimate_mismatch(0.45, 0.5, 10);
        assert!(neg.clipped);
        assert_eq!(neg.value, 0.0);
        assert!(neg.raw < 0.0);
    }

    #[test]
    fn lambda_star_plug_in() {
        assert_eq!(estimate_lambda_star(0.5, 1.0, 0.5).unwrap(), LambdaStar::Finite(1.0));
        assert_eq!(estimate_lambda_star(1.0, 1.0, 0.5).unwrap(), LambdaStar::Finite(2.0));
        assert_eq!(estimate_lambda_star(0.5, 0.0, 0.5).unwrap(), LambdaStar::PriorExact);
    }

    #[test]
    fn anchors_must_be_ordered() {
        let a = Anchor { lambda: 1.0, train_risk: 0.3 };
        assert!(estimate_from_anchors(a, a, 0.5, 1).is_err());
    }

    proptest! {
        #[test]
        fn round_trip_through_theory(c in 0.05f64..0.95, s in 0.01f64..50.0, sigma2 in 0.01f64..5.0, q in 1usize..20) {
            let regime = AsymptoticRegime::new(c, q, sigma2).unwrap();
            let small = asymptotic_risks_identity(s, 1e-8, &regime).unwrap().train();
            let large = asymptotic_risks_identity(s, 1e8, &regime).unwrap().train();
            let est = estimate_from_anchors(
                Anchor { lambda: 1e-8, train_risk: small },
                Anchor { lambda: 1e8, train_risk: large },
                c,
                q,
            ).unwrap();
            prop_assert!((est.sigma2_hat - sigma2).abs() <= 1e-4 * sigma2);
            prop_assert!((est.s_hat.value - s).abs() <= 1e-4 * s);
        }

        #[test]
        fn lambda_star_scale_invariant(sigma2 in 0.01f64..5.0, s in 0.01f64..50.0, c in 0.01f64..0.99, k in 0.1f64..10.0) {
            let a = estimate_lambda_star(sigma2, s, c).unwrap().value().unwrap();
            let b = estimate_lambda_star(k * sigma2, k * s, c).unwrap().value().unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * a);
        }
    }
}
