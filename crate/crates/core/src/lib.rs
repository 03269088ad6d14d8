//! Exact high-dimensional risks of MAP linear regression with a Gaussian prior
//! centred at an informed guess `Θ₀`.
//!
//! The crate is `no_std` (it needs `alloc`) and holds the numerical core:
//!
//! - [`model`]: the teacher–student generator, the MAP estimator and its
//!   empirical risks;
//! - [`theory`]: the self-consistent `δ` fixed point, the asymptotic train/test
//!   risks for identity and general covariance, limits, slopes and the optimal
//!   regularisation strength;
//! - [`estimation`]: plug-in estimators of `σ²`, the prior mismatch `S` and `λ⋆`
//!   from a measured training-risk curve.
//!
//! IO, Monte Carlo sweeps and the command line live in the `mapridge-tools` crate.
#![no_std]

extern crate alloc;
#[cfg(any(test, feature = "std"))]
extern crate std;

pub mod error;
pub mod estimation;
pub mod model;
pub mod optimize;
pub mod rng;
pub mod spectrum;
pub mod stats;
pub mod theory;

pub use error::{Error, Result};
pub use estimation::{EstimationResult, MismatchEstimate};
pub use model::{Dataset, MapSolver, MismatchProfile, ProblemSpec, TeacherConfig, TestSample};
pub use spectrum::{Atom, CovarianceModel, Spectrum};
pub use theory::{
    AsymptoticRegime, FixedPointSolution, LambdaStar, LimitKind, OptimalLambda, RiskModel,
    RiskPrediction, RiskTerms,
};

pub type Matrix = nalgebra::DMatrix<f64>;
