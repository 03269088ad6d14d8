//! Deterministic high-dimensional risk predictions.
//!
//! Everything here is a function of the covariance spectrum `{μ_i}`, the
//! mismatch profile `{s_i}`, the sample count `n`, the output count `q`, the
//! noise variance `σ²` and the regularisation `λ`. The random design enters
//! only through the scalar `δ ≥ 0` solving
//!
//! ```text
//! δ = f(δ) = (1+δ)/n · Σ_i μ_i / (μ_i + λ(1+δ))
//! ```
//!
//! together with `κ = λ(1+δ)` and `α = (1/n) Σ_i μ_i² / (μ_i + κ)²`.

use alloc::format;
use alloc::vec;

use crate::error::{invalid, mismatch, Error, Result};
use crate::model::{MismatchProfile, ProblemSpec};
use crate::optimize::golden_section;
use crate::spectrum::Spectrum;

/// Convergence target for `|f(δ) − δ| / (1 + δ)`.
pub const FIXED_POINT_TOL: f64 = 1e-12;
pub const DAMPING: f64 = 0.5;
pub const MAX_ITERATIONS: usize = 10_000;
/// Smallest admissible `1 − α` before the variance terms are declared singular.
pub const MIN_ONE_MINUS_ALPHA: f64 = 1e-14;

const NEWTON_POLISH_STEPS: usize = 4;
const BISECTION_STEPS: usize = 400;

/// The parameters the identity-covariance formulas depend on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticRegime {
    /// Aspect ratio `d/n`.
    pub c: f64,
    pub q: usize,
    pub sigma2: f64,
}

impl AsymptoticRegime {
    pub fn new(c: f64, q: usize, sigma2: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(invalid!("aspect ratio must be positive and finite, got {c}"));
        }
        if q == 0 {
            return Err(invalid!("q must be positive"));
        }
        if !(sigma2.is_finite() && sigma2 >= 0.0) {
            return Err(invalid!("noise variance must be finite and nonnegative, got {sigma2}"));
        }
        Ok(Self { c, q, sigma2 })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    ClosedForm,
    DampedIteration,
    Bisection,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPointSolution {
    pub lambda: f64,
    pub delta: f64,
    /// Effective regularisation `λ(1+δ)`.
    pub kappa: f64,
    pub alpha: f64,
    /// `1 − α`, evaluated as `1/(1+δ) + (κ/n) Σ μ/(μ+κ)²` so it stays accurate
    /// as `α → 1`.
    pub one_minus_alpha: f64,
    pub iterations: usize,
    /// `|f(δ) − δ|` at the returned `δ`.
    pub residual: f64,
    pub method: SolveMethod,
}

/// Spectrum normalised by the sample count: every sum below is `(1/n) Σ_i`.
struct Measure<'a> {
    spectrum: &'a Spectrum,
    inv_n: f64,
}

impl Measure<'_> {
    fn f(&self, lambda: f64, delta: f64) -> f64 {
        let kappa = lambda * (1.0 + delta);
        (1.0 + delta) * self.inv_n * self.spectrum.weighted_sum(|mu| mu / (mu + kappa))
    }

    /// `f'(δ) = α(κ)`; used only as a Newton slope.
    fn alpha(&self, kappa: f64) -> f64 {
        self.inv_n * self.spectrum.weighted_sum(|mu| {
            let r = mu / (mu + kappa);
            r * r
        })
    }

    fn solution(&self, lambda: f64, delta: f64, iterations: usize, method: SolveMethod) -> FixedPointSolution {
        let kappa = lambda * (1.0 + delta);
        let alpha = self.alpha(kappa);
        let tail = self.inv_n * self.spectrum.weighted_sum(|mu| mu / ((mu + kappa) * (mu + kappa)));
        FixedPointSolution {
            lambda,
            delta,
            kappa,
            alpha,
            one_minus_alpha: 1.0 / (1.0 + delta) + kappa * tail,
            iterations,
            residual: (self.f(lambda, delta) - delta).abs(),
            method,
        }
    }

    /// Newton steps on `g(δ) = f(δ) − δ` (slope `α − 1`), kept only while they
    /// reduce the residual.
    fn polish(&self, lambda: f64, mut delta: f64) -> f64 {
        let mut residual = (self.f(lambda, delta) - delta).abs();
        for _ in 0..NEWTON_POLISH_STEPS {
            if residual == 0.0 {
                break;
            }
            let g = self.f(lambda, delta) - delta;
            let slope = 1.0 - self.alpha(lambda * (1.0 + delta));
            if !(slope > 0.0) {
                break;
            }
            let candidate = (delta + g / slope).max(0.0);
            let r = (self.f(lambda, candidate) - candidate).abs();
            if r < residual {
                delta = candidate;
                residual = r;
            } else {
                break;
            }
        }
        delta
    }
}

fn converged(residual: f64, delta: f64) -> bool {
    residual <= FIXED_POINT_TOL * (1.0 + delta)
}

/// Solve the fixed point for `δ` with the default start `max(c/λ, 1)`.
///
/// `n` is the sample count; it may be fractional when `spectrum` is a
/// normalised measure (e.g. weight `c` with `n = 1`).
pub fn solve_delta(spectrum: &Spectrum, lambda: f64, n: f64) -> Result<FixedPointSolution> {
    let c = spectrum.dimension() / n;
    solve_delta_from(spectrum, lambda, n, (c / lambda).max(1.0))
}

/// [`solve_delta`] from an explicit starting value.
///
/// Runs the damped iteration `δ ← (1−ω)δ + ω f(δ)` with `ω = 0.5`; if it does
/// not reach tolerance within the budget, falls back to bisection on
/// `f(δ) − δ`, which is positive at zero and negative for large `δ`. The
/// result is finished with a few Newton steps.
pub fn solve_delta_from(spectrum: &Spectrum, lambda: f64, n: f64, start: f64) -> Result<FixedPointSolution> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(invalid!("lambda must be positive and finite, got {lambda}"));
    }
    if !(n.is_finite() && n > 0.0) {
        return Err(invalid!("sample count must be positive, got {n}"));
    }
    if !(start.is_finite() && start >= 0.0) {
        return Err(invalid!("starting value must be finite and nonnegative, got {start}"));
    }
    let measure = Measure { spectrum, inv_n: 1.0 / n };

    let mut delta = start;
    for iteration in 1..=MAX_ITERATIONS {
        let next = (1.0 - DAMPING) * delta + DAMPING * measure.f(lambda, delta);
        delta = next;
        let residual = (measure.f(lambda, delta) - delta).abs();
        if converged(residual, delta) {
            let delta = measure.polish(lambda, delta);
            return Ok(measure.solution(lambda, delta, iteration, SolveMethod::DampedIteration));
        }
    }

    let (mut lo, mut hi) = (0.0_f64, start.max(1.0));
    while measure.f(lambda, hi) - hi >= 0.0 {
        lo = hi;
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::NoConvergence { iterations: MAX_ITERATIONS, residual: f64::INFINITY });
        }
    }
    let mut steps = 0;
    while steps < BISECTION_STEPS && hi - lo > f64::EPSILON * hi {
        let mid = 0.5 * (lo + hi);
        if measure.f(lambda, mid) - mid > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        steps += 1;
    }
    let delta = measure.polish(lambda, 0.5 * (lo + hi));
    let sol = measure.solution(lambda, delta, MAX_ITERATIONS + steps, SolveMethod::Bisection);
    if converged(sol.residual, sol.delta) {
        Ok(sol)
    } else {
        Err(Error::NoConvergence { iterations: sol.iterations, residual: sol.residual })
    }
}

/// `δ` for `Σ = I` in closed form:
/// `δ = [−(1+λ−c) + √((1+λ−c)² + 4λc)] / (2λ)`.
///
/// When `1+λ−c > 0` the algebraically equal `2c / ((1+λ−c) + √…)` is used to
/// avoid cancellation.
pub fn delta_identity_closed_form(lambda: f64, c: f64) -> Result<FixedPointSolution> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(invalid!("lambda must be positive and finite, got {lambda}"));
    }
    if !(c.is_finite() && c > 0.0) {
        return Err(invalid!("aspect ratio must be positive and finite, got {c}"));
    }
    let b = 1.0 + lambda - c;
    let root = libm::sqrt(b * b + 4.0 * lambda * c);
    let delta = if b > 0.0 { 2.0 * c / (b + root) } else { (root - b) / (2.0 * lambda) };
    let kappa = lambda * (1.0 + delta);
    let denom = (1.0 + kappa) * (1.0 + kappa);
    Ok(FixedPointSolution {
        lambda,
        delta,
        kappa,
        alpha: c / denom,
        one_minus_alpha: 1.0 / (1.0 + delta) + c * kappa / denom,
        iterations: 0,
        residual: (c * (1.0 + delta) / (1.0 + kappa) - delta).abs(),
        method: SolveMethod::ClosedForm,
    })
}

/// A risk split into the part driven by the prior mismatch and the part
/// driven by the noise variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiskTerms {
    pub signal: f64,
    pub noise: f64,
}

impl RiskTerms {
    pub fn total(&self) -> f64 {
        self.signal + self.noise
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiskPrediction {
    pub fixed_point: FixedPointSolution,
    pub train_terms: RiskTerms,
    pub test_terms: RiskTerms,
}

impl RiskPrediction {
    pub fn lambda(&self) -> f64 {
        self.fixed_point.lambda
    }

    pub fn train(&self) -> f64 {
        self.train_terms.total()
    }

    pub fn test(&self) -> f64 {
        self.test_terms.total()
    }
}

/// Risks from the fixed point and `w = Σ μ s/(μ+κ)²`.
///
/// The expanded expressions (see [`asymptotic_risks_general`]) subtract terms
/// of size `(1+δ) ~ 1/λ` when `c > 1`. With `m₁ = α + κ m₂` and the fixed-point
/// identity `1 − α = 1/(1+δ) + κ m₂` they reduce to
///
/// ```text
/// R_test  = κ² w / (q(1−α)) + σ² / (1−α)
/// R_train = R_test / (1+δ)²
/// ```
///
/// which has no cancellation at any `λ`.
fn assemble(sol: FixedPointSolution, weighted_signal: f64, q: usize, sigma2: f64) -> Result<RiskPrediction> {
    let oma = sol.one_minus_alpha;
    if !(oma >= MIN_ONE_MINUS_ALPHA) {
        return Err(Error::NearSingularVariance { one_minus_alpha: oma });
    }
    let shrink = 1.0 / (1.0 + sol.delta);
    let test_signal = sol.kappa * sol.kappa * weighted_signal / (q as f64 * oma);
    let test_noise = sigma2 / oma;
    Ok(RiskPrediction {
        fixed_point: sol,
        train_terms: RiskTerms { signal: test_signal * shrink * shrink, noise: test_noise * shrink * shrink },
        test_terms: RiskTerms { signal: test_signal, noise: test_noise },
    })
}

/// Asymptotic train and test risks for a general covariance.
///
/// With `m₁ = (1/n) Σ μ/(μ+κ)` and `m₂ = (1/n) Σ μ/(μ+κ)²`:
///
/// ```text
/// R_train = λ²(1+δ)/q [Σ s/(μ+κ) − κ(Σ s/(μ+κ)² + m₂ Σ μs/(μ+κ)² / (1−α))]
///         + σ² [1 − m₁ − λ m₂/(1−α)]
/// R_test  = κ²/(q(1−α)) Σ μs/(μ+κ)²
///         + σ² [1 + (1+δ) m₁ − λ(1+δ)² m₂/(1−α)]
/// ```
///
/// `mismatch` must be aligned with the atoms of `spectrum` (for a weighted
/// atom, its entry is the mismatch summed over that eigenspace).
pub fn asymptotic_risks_general(
    spectrum: &Spectrum,
    mismatch: &MismatchProfile,
    lambda: f64,
    spec: &ProblemSpec,
) -> Result<RiskPrediction> {
    if mismatch.len() != spectrum.len() {
        return Err(mismatch!(
            "mismatch profile has {} entries but the spectrum has {} atoms",
            mismatch.len(),
            spectrum.len()
        ));
    }
    let dim = spectrum.dimension();
    if (dim - spec.d as f64).abs() > 1e-9 * spec.d as f64 {
        return Err(mismatch!("spectrum has dimension {dim} but d = {}", spec.d));
    }
    let n = spec.n as f64;
    let sol = solve_delta(spectrum, lambda, n)?;
    Ok(general_from_solution(spectrum, mismatch, sol, spec)?)
}

fn general_from_solution(
    spectrum: &Spectrum,
    mismatch: &MismatchProfile,
    sol: FixedPointSolution,
    spec: &ProblemSpec,
) -> Result<RiskPrediction> {
    let kappa = sol.kappa;
    let weighted_signal = spectrum
        .atoms()
        .iter()
        .zip(mismatch.components())
        .map(|(atom, &s)| {
            let r = 1.0 / (atom.value + kappa);
            atom.value * s * r * r
        })
        .sum();
    assemble(sol, weighted_signal, spec.q, spec.sigma2)
}

/// Asymptotic risks for `Σ = I` with total mismatch `S`, using the closed-form `δ`.
///
/// This is the general expression specialised to a unit spectrum:
///
/// ```text
/// R_train = (1+δ)/q [λ² S/(1+κ) − λ³(1+δ) S/((1−α)(1+κ)²)]
///         + σ² [1 − c/(1+κ) − λc/((1−α)(1+κ)²)]
/// R_test  = κ² S/(q(1−α)(1+κ)²)
///         + σ² [1 + c(1+δ)/(1+κ) − λc(1+δ)²/((1−α)(1+κ)²)]
/// ```
pub fn asymptotic_risks_identity(
    total_mismatch: f64,
    lambda: f64,
    regime: &AsymptoticRegime,
) -> Result<RiskPrediction> {
    if !(total_mismatch.is_finite() && total_mismatch >= 0.0) {
        return Err(invalid!("mismatch must be finite and nonnegative, got {total_mismatch}"));
    }
    let c = regime.c;
    let sol = delta_identity_closed_form(lambda, c)?;
    let r = 1.0 / (1.0 + sol.kappa);
    assemble(sol, total_mismatch * r * r, regime.q, regime.sigma2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitKind {
    LambdaToZero,
    LambdaToInfinity,
}

/// Closed-form extremal risks `(train, test)` for `Σ = I`:
///
/// - `λ → 0`: `(σ²(1−c), σ²(1+c))`;
/// - `λ → ∞`: `(S/q + σ², S/q + σ²)`.
///
/// The `λ → 0` pair is the first-order form in `c`. The train value is the
/// exact limit of [`asymptotic_risks_identity`] for `c < 1` (and is negative,
/// hence meaningless, for `c > 1`). The exact test limit of the same formula is
/// `σ²/(1−c) = σ²(1 + c + c² + …)`; see [`exact_limit_risks`].
pub fn limit_risks(total_mismatch: f64, regime: &AsymptoticRegime, kind: LimitKind) -> (f64, f64) {
    let AsymptoticRegime { c, q, sigma2 } = *regime;
    match kind {
        LimitKind::LambdaToZero => (sigma2 * (1.0 - c), sigma2 * (1.0 + c)),
        LimitKind::LambdaToInfinity => {
            let r = total_mismatch / q as f64 + sigma2;
            (r, r)
        }
    }
}

/// The exact `λ → 0` and `λ → ∞` limits of [`asymptotic_risks_identity`].
///
/// For `λ → 0`: `(σ²(1−c), σ²/(1−c))` when `c < 1`, and
/// `(0, (S/q)(c−1)/c + σ²c/(c−1))` when `c > 1`. Diverges at `c = 1`.
pub fn exact_limit_risks(total_mismatch: f64, regime: &AsymptoticRegime, kind: LimitKind) -> Result<(f64, f64)> {
    let AsymptoticRegime { c, q, sigma2 } = *regime;
    match kind {
        LimitKind::LambdaToInfinity => Ok(limit_risks(total_mismatch, regime, kind)),
        LimitKind::LambdaToZero if c < 1.0 => Ok((sigma2 * (1.0 - c), sigma2 / (1.0 - c))),
        LimitKind::LambdaToZero if c > 1.0 => Ok((
            0.0,
            total_mismatch / q as f64 * (c - 1.0) / c + sigma2 * c / (c - 1.0),
        )),
        LimitKind::LambdaToZero => Err(Error::UnsupportedRegime(format!(
            "risks diverge as lambda -> 0 at the interpolation threshold c = {c}"
        ))),
    }
}

/// Signed boundary slopes `(dR_train/dλ, dR_test/dλ)` at `λ → 0⁺` from the
/// closed-form display `−dR_train/dλ = dR_test/dλ = σ² c/(1−c)` for `c < 1`
/// and `σ²` for `c > 1`.
///
/// These are not the derivatives of [`asymptotic_risks_identity`]: that
/// formula's train risk is flat at `λ = 0` and its test risk has slope
/// `−2σ²c/(1−c)³` for `c < 1`.
pub fn boundary_slopes(sigma2: f64, c: f64) -> Result<(f64, f64)> {
    if !(c.is_finite() && c > 0.0) {
        return Err(invalid!("aspect ratio must be positive and finite, got {c}"));
    }
    if c == 1.0 {
        return Err(Error::UnsupportedRegime(format!(
            "boundary slopes are singular at the interpolation threshold c = 1"
        )));
    }
    let magnitude = if c < 1.0 { sigma2 * c / (1.0 - c) } else { sigma2 };
    Ok((-magnitude, magnitude))
}

/// A risk surface indexed by `λ`.
#[derive(Debug, Clone, PartialEq)]
pub enum RiskModel {
    Identity { total_mismatch: f64, regime: AsymptoticRegime },
    General { spectrum: Spectrum, mismatch: MismatchProfile, spec: ProblemSpec },
}

impl RiskModel {
    pub fn predict(&self, lambda: f64) -> Result<RiskPrediction> {
        match self {
            Self::Identity { total_mismatch, regime } => asymptotic_risks_identity(*total_mismatch, lambda, regime),
            Self::General { spectrum, mismatch, spec } => asymptotic_risks_general(spectrum, mismatch, lambda, spec),
        }
    }

    pub fn regime(&self) -> AsymptoticRegime {
        match self {
            Self::Identity { regime, .. } => *regime,
            Self::General { spec, .. } => spec.regime(),
        }
    }

    pub fn total_mismatch(&self) -> f64 {
        match self {
            Self::Identity { total_mismatch, .. } => *total_mismatch,
            Self::General { mismatch, .. } => mismatch.total(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LambdaStar {
    Finite(f64),
    /// The prior centre is exact (`S = 0`): the risk keeps decreasing as `λ → ∞`.
    PriorExact,
}

impl LambdaStar {
    pub fn value(&self) -> Option<f64> {
        match self {
            Self::Finite(v) => Some(*v),
            Self::PriorExact => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalLambda {
    pub lambda_star: LambdaStar,
    /// Test risk at `λ⋆` (the `λ → ∞` limit for [`LambdaStar::PriorExact`]).
    pub test_risk: f64,
    /// The numeric search ended on an edge of its interval.
    pub at_boundary: bool,
}

/// `λ⋆ = σ²/S · 1/(1−c)` for identity covariance and `c < 1`.
pub fn closed_form_lambda_star(sigma2: f64, total_mismatch: f64, c: f64) -> Result<LambdaStar> {
    if !(c.is_finite() && c > 0.0 && c < 1.0) {
        return Err(Error::UnsupportedRegime(format!(
            "the closed-form optimum needs 0 < c < 1, got c = {c}"
        )));
    }
    if !(total_mismatch.is_finite() && total_mismatch >= 0.0) {
        return Err(invalid!("mismatch must be finite and nonnegative, got {total_mismatch}"));
    }
    if !(sigma2.is_finite() && sigma2 > 0.0) {
        return Err(Error::UnsupportedRegime(format!(
            "the closed-form optimum needs sigma2 > 0, got {sigma2}"
        )));
    }
    if total_mismatch == 0.0 {
        return Ok(LambdaStar::PriorExact);
    }
    Ok(LambdaStar::Finite(sigma2 / total_mismatch / (1.0 - c)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// Bracket width at which the search stops, in `ln λ`.
    pub log_tol: f64,
    pub max_iter: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self { lambda_min: 1e-6, lambda_max: 1e6, log_tol: 1e-4, max_iter: 500 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OptimizationMode {
    ClosedForm,
    Numeric(SearchOptions),
}

/// Regularisation strength minimising the asymptotic test risk of `model`.
///
/// `ClosedForm` only applies to [`RiskModel::Identity`] with `c < 1`.
/// `Numeric` runs a golden-section search over `ln λ`.
pub fn optimal_lambda(model: &RiskModel, mode: OptimizationMode) -> Result<OptimalLambda> {
    match mode {
        OptimizationMode::ClosedForm => {
            let RiskModel::Identity { total_mismatch, regime } = model else {
                return Err(Error::UnsupportedRegime(
                    "the closed-form optimum requires identity covariance".into(),
                ));
            };
            match closed_form_lambda_star(regime.sigma2, *total_mismatch, regime.c)? {
                LambdaStar::PriorExact => Ok(OptimalLambda {
                    lambda_star: LambdaStar::PriorExact,
                    test_risk: limit_risks(0.0, regime, LimitKind::LambdaToInfinity).1,
                    at_boundary: false,
                }),
                LambdaStar::Finite(lambda) => Ok(OptimalLambda {
                    lambda_star: LambdaStar::Finite(lambda),
                    test_risk: model.predict(lambda)?.test(),
                    at_boundary: false,
                }),
            }
        }
        OptimizationMode::Numeric(opts) => numeric_optimum(model, &opts),
    }
}

fn numeric_optimum(model: &RiskModel, opts: &SearchOptions) -> Result<OptimalLambda> {
    if !(opts.lambda_min > 0.0 && opts.lambda_max > opts.lambda_min) {
        return Err(invalid!(
            "search interval [{}, {}] must be positive and nonempty",
            opts.lambda_min,
            opts.lambda_max
        ));
    }
    let (lo, hi) = (libm::log(opts.lambda_min), libm::log(opts.lambda_max));
    let mut failure = None;
    let best = golden_section(
        |t| match model.predict(libm::exp(t)) {
            Ok(p) => p.test(),
            Err(e) => {
                failure.get_or_insert(e);
                f64::INFINITY
            }
        },
        lo,
        hi,
        opts.log_tol,
        opts.max_iter,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let at_boundary = (best.x - lo).abs() <= opts.log_tol || (hi - best.x).abs() <= opts.log_tol;
    Ok(OptimalLambda {
        lambda_star: LambdaStar::Finite(libm::exp(best.x)),
        test_risk: best.value,
        at_boundary,
    })
}

/// `count` log-spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Result<alloc::vec::Vec<f64>> {
    if !(lo > 0.0 && hi >= lo && lo.is_finite() && hi.is_finite()) {
        return Err(invalid!("log grid needs 0 < lo <= hi, got [{lo}, {hi}]"));
    }
    match count {
        0 => Err(invalid!("grid needs at least one point")),
        1 => Ok(vec![lo]),
        _ => {
            let (a, b) = (libm::log10(lo), libm::log10(hi));
            let step = (b - a) / (count - 1) as f64;
            Ok((0..count)
                .map(|i| if i + 1 == count { hi } else { libm::pow(10.0, a + step * i as f64) })
                .collect())
        }
    }
}

/// Log grid with `per_decade` points per factor of ten (plus the end point).
pub fn log_grid_per_decade(lo: f64, hi: f64, per_decade: usize) -> Result<alloc::vec::Vec<f64>> {
    if per_decade == 0 {
        return Err(invalid!("points per decade must be positive"));
    }
    let decades = libm::log10(hi / lo);
    let count = libm::round(decades * per_decade as f64) as usize + 1;
    log_grid(lo, hi, count)
}
