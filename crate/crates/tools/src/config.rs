//! Sweep configuration, its JSON form and the built-in presets.

use std::path::Path;

use mapridge_core::theory::log_grid;
use mapridge_core::{CovarianceModel, ProblemSpec};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{usage, Result, RunError};
use crate::spectrum_file;

/// A one-dimensional grid of sweep coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Grid {
    Log { lo: f64, hi: f64, count: usize },
    Linear { lo: f64, hi: f64, count: usize },
    Values(Vec<f64>),
}

impl Grid {
    pub fn points(&self) -> Result<Vec<f64>> {
        let points = match *self {
            Grid::Log { lo, hi, count } => log_grid(lo, hi, count)?,
            Grid::Linear { lo, hi, count } => {
                if !(lo.is_finite() && hi.is_finite() && hi >= lo) || count == 0 {
                    return Err(usage!("linear grid needs lo <= hi and count >= 1"));
                }
                if count == 1 {
                    vec![lo]
                } else {
                    let step = (hi - lo) / (count - 1) as f64;
                    (0..count).map(|i| if i + 1 == count { hi } else { lo + step * i as f64 }).collect()
                }
            }
            Grid::Values(ref v) => v.clone(),
        };
        if points.is_empty() {
            return Err(usage!("grid is empty"));
        }
        Ok(points)
    }
}

impl std::str::FromStr for Grid {
    type Err = String;

    /// `lo:hi:Nlog`, `lo:hi:Nlin` or a comma-separated list.
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let s = s.trim();
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("'{t}' is not a number"));
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() == 3 {
            let (lo, hi) = (num(parts[0])?, num(parts[1])?);
            let spec = parts[2].trim();
            let (count, kind) = spec
                .find(|ch: char| !ch.is_ascii_digit())
                .map(|i| spec.split_at(i))
                .ok_or_else(|| format!("grid '{s}' needs a 'log' or 'lin' suffix"))?;
            let count: usize = count.parse().map_err(|_| format!("bad point count in '{s}'"))?;
            return match kind {
                "log" => Ok(Grid::Log { lo, hi, count }),
                "lin" => Ok(Grid::Linear { lo, hi, count }),
                _ => Err(format!("unknown grid kind '{kind}' in '{s}'")),
            };
        }
        let values = s.split(',').map(num).collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(Grid::Values(values))
    }
}

/// A covariance description that can be instantiated for any `d`, except for
/// explicit eigenvalue lists.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CovarianceSpec {
    Identity,
    Ar1 { rho: f64 },
    /// First half of the eigenvalues at `low`, the rest at `high`.
    TwoAtom { low: f64, high: f64 },
    /// `(value, multiplicity)` pairs; fixes `d` to the total multiplicity.
    Eigenvalues(Vec<(f64, usize)>),
}

impl CovarianceSpec {
    pub fn from_file(path: &Path) -> Result<Self> {
        Ok(Self::Eigenvalues(spectrum_file::read(path)?))
    }

    /// The fixed dimension of an explicit spectrum.
    pub fn fixed_dim(&self) -> Option<usize> {
        match self {
            Self::Eigenvalues(pairs) => Some(pairs.iter().map(|p| p.1).sum()),
            _ => None,
        }
    }

    pub fn build(&self, d: usize) -> Result<CovarianceModel> {
        let model = match self {
            Self::Identity => CovarianceModel::identity(d)?,
            Self::Ar1 { rho } => CovarianceModel::ar1(d, *rho)?,
            Self::TwoAtom { low, high } => CovarianceModel::two_atom(d, *low, *high)?,
            Self::Eigenvalues(pairs) => {
                let dim = self.fixed_dim().unwrap_or(0);
                if dim != d {
                    return Err(usage!("spectrum has {dim} eigenvalues but d = {d}"));
                }
                let values = pairs.iter().flat_map(|&(v, m)| std::iter::repeat(v).take(m)).collect();
                CovarianceModel::diagonal(values)?
            }
        };
        Ok(model)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepKind {
    Lambda,
    Contour,
    DoubleDescent,
    Estimator,
}

/// How the test risk of a fitted estimate is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestRiskMode {
    /// Exact over the test distribution given the estimate.
    Exact,
    /// Averaged over `n_test` fresh pairs.
    Sampled,
}

/// Scale of the teacher entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TeacherScale {
    /// Standard normal entries, `‖Θ⋆‖² ≈ dq`.
    Unit,
    /// Entries of variance `1/d`, `‖Θ⋆‖² ≈ q` whatever `d` is.
    PerOutput,
}

impl TeacherScale {
    pub fn entry_std(self, d: usize) -> f64 {
        match self {
            Self::Unit => 1.0,
            Self::PerOutput => 1.0 / (d as f64).sqrt(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemTemplate {
    pub d: usize,
    pub n: usize,
    pub q: usize,
    pub sigma2: f64,
}

impl ProblemTemplate {
    pub fn spec(&self) -> Result<ProblemSpec> {
        Ok(ProblemSpec::new(self.d, self.n, self.q, self.sigma2)?)
    }

    /// The problem at aspect ratio `c` with `n` held fixed, `d = round(c n)`.
    pub fn at_ratio(&self, c: f64) -> Result<ProblemSpec> {
        let d = (c * self.n as f64).round();
        if !(d >= 1.0) {
            return Err(usage!("aspect ratio {c} gives d < 1 at n = {}", self.n));
        }
        Ok(ProblemSpec::new(d as usize, self.n, self.q, self.sigma2)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TeacherOptions {
    /// Mismatch `S` of the informative prior centre.
    pub mismatch: f64,
    pub scale: TeacherScale,
    /// Redraw `Θ⋆` for every trial instead of keeping one teacher.
    pub fresh_per_trial: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DoubleDescentOptions {
    pub small_lambda: f64,
    pub large_lambda: f64,
    /// Mismatch of the well-informed prior.
    pub good_mismatch: f64,
    /// Mismatch of the poorly-informed prior.
    pub poor_mismatch: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorOptions {
    pub small_anchor: f64,
    pub large_anchor: f64,
    /// Grid on which the reference minimum of the test risk is taken.
    pub reference_grid: Grid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub kind: SweepKind,
    pub problem: ProblemTemplate,
    pub covariance: CovarianceSpec,
    pub lambda_grid: Grid,
    /// Aspect ratios for the double-descent and estimator sweeps.
    pub ratio_grid: Grid,
    /// `‖Θ⋆ − Θ₀‖_F` values (not squared) for the contour grid.
    pub mismatch_norm_grid: Grid,
    pub teacher: TeacherOptions,
    pub double_descent: DoubleDescentOptions,
    pub estimator: EstimatorOptions,
    pub trials: usize,
    pub base_seed: u64,
    pub n_test: usize,
    pub test_risk: TestRiskMode,
}

/// `0.1, 0.2, …, 3.0` with the step refined to `0.02` on `[0.8, 1.2]`.
pub fn default_ratio_grid() -> Vec<f64> {
    let mut c: Vec<f64> = (1..=30).map(|i| i as f64 / 10.0).filter(|c| !(0.8..=1.2).contains(c)).collect();
    c.extend((40..=60).map(|i| i as f64 / 50.0));
    c.sort_by(f64::total_cmp);
    c
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            kind: SweepKind::Lambda,
            problem: ProblemTemplate { d: 100, n: 200, q: 10, sigma2: 0.5 },
            covariance: CovarianceSpec::Identity,
            lambda_grid: Grid::Log { lo: 1e-4, hi: 1e3, count: 40 },
            ratio_grid: Grid::Values(default_ratio_grid()),
            mismatch_norm_grid: Grid::Linear { lo: 0.0, hi: 5.0, count: 40 },
            teacher: TeacherOptions { mismatch: 2.0, scale: TeacherScale::Unit, fresh_per_trial: false },
            double_descent: DoubleDescentOptions {
                small_lambda: 1e-3,
                large_lambda: 1.0,
                good_mismatch: 0.1,
                poor_mismatch: 20.0,
            },
            estimator: EstimatorOptions {
                small_anchor: mapridge_core::estimation::SMALL_LAMBDA_ANCHOR,
                large_anchor: mapridge_core::estimation::LARGE_LAMBDA_ANCHOR,
                reference_grid: Grid::Log { lo: 1e-6, hi: 1e6, count: 361 },
            },
            trials: 20,
            base_seed: 0,
            n_test: 10_000,
            test_risk: TestRiskMode::Sampled,
        }
    }
}

impl SweepConfig {
    /// The setting of figure `figure` (1–4).
    pub fn preset(figure: u8) -> Result<Self> {
        let base = Self::default();
        let cfg = match figure {
            1 => base,
            2 => Self { kind: SweepKind::Contour, trials: 0, ..base },
            3 => Self {
                kind: SweepKind::DoubleDescent,
                teacher: TeacherOptions { scale: TeacherScale::PerOutput, ..base.teacher.clone() },
                test_risk: TestRiskMode::Exact,
                ..base
            },
            4 => Self {
                kind: SweepKind::Estimator,
                ratio_grid: Grid::Linear { lo: 0.1, hi: 0.9, count: 9 },
                ..base
            },
            _ => return Err(usage!("figure must be 1, 2, 3 or 4, got {figure}")),
        };
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.problem.spec()?;
        if self.n_test == 0 && self.trials > 0 && self.test_risk == TestRiskMode::Sampled {
            return Err(usage!("n_test must be positive for sampled test risks"));
        }
        for (name, grid) in [
            ("lambda", &self.lambda_grid),
            ("ratio", &self.ratio_grid),
            ("mismatch norm", &self.mismatch_norm_grid),
            ("reference", &self.estimator.reference_grid),
        ] {
            let points = grid.points()?;
            if name != "mismatch norm" && points.iter().any(|&p| !(p > 0.0 && p.is_finite())) {
                return Err(usage!("{name} grid values must be positive and finite"));
            }
            if name == "mismatch norm" && points.iter().any(|&p| !(p >= 0.0 && p.is_finite())) {
                return Err(usage!("mismatch norm grid values must be nonnegative and finite"));
            }
        }
        if let Some(d) = self.covariance.fixed_dim() {
            if matches!(self.kind, SweepKind::DoubleDescent | SweepKind::Estimator) {
                return Err(usage!("an explicit spectrum fixes d and cannot be used for an aspect-ratio sweep"));
            }
            if d != self.problem.d {
                return Err(usage!("spectrum has {d} eigenvalues but d = {}", self.problem.d));
            }
        }
        Ok(())
    }

    /// Overlay a JSON document onto `self`. Objects merge key by key; any
    /// other value replaces, and so does an enum written as a one-key object
    /// naming a different variant. A run manifest is accepted and its `config` used.
    pub fn merge_json(&self, doc: &Value) -> Result<Self> {
        let doc = match doc.get("config") {
            Some(inner) if doc.get("subcommand").is_some() => inner,
            _ => doc,
        };
        let mut base = serde_json::to_value(self).expect("config serialises");
        merge(&mut base, doc);
        serde_json::from_value(base).map_err(|e| usage!("config: {e}"))
    }

    pub fn merge_file(&self, path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| RunError::io(path, e))?;
        let doc: Value = serde_json::from_str(&text).map_err(|e| usage!("{}: {e}", path.display()))?;
        self.merge_json(&doc)
    }
}

fn merge(base: &mut Value, over: &Value) {
    match (base, over) {
        (Value::Object(b), Value::Object(o)) if !switches_variant(b, o) => {
            for (k, v) in o {
                match b.get_mut(k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k.clone(), v.clone());
                    }
                }
            }
        }
        (slot, v) => *slot = v.clone(),
    }
}

fn switches_variant(base: &Map<String, Value>, over: &Map<String, Value>) -> bool {
    base.len() == 1 && over.len() == 1 && base.keys().next() != over.keys().next()
}
