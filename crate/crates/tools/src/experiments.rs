//! Monte Carlo harness and the four sweeps: risk-vs-λ curves, the (S, λ)
//! contour, double descent in `c = d/n`, and the plug-in estimator pipeline.
//!
//! Trial `t` draws its training set from seed `base_seed + t` and, for sampled
//! test risks, its test set from the same seed on a separate stream. The
//! teacher comes from `base_seed` (or `base_seed + t` when redrawn per trial).
//! Trials run in parallel on the ambient rayon pool and are collected in
//! trial order, so records do not depend on scheduling.

use std::time::Instant;

use mapridge_core::estimation::{estimate_from_anchors, Anchor};
use mapridge_core::model::{empirical_train_risk, exact_test_risk, generate_dataset};
use mapridge_core::stats::Summary;
use mapridge_core::theory::{closed_form_lambda_star, optimal_lambda, OptimizationMode, SearchOptions};
use mapridge_core::{
    CovarianceModel, LambdaStar, MapSolver, MismatchProfile, ProblemSpec, RiskModel, TeacherConfig, TestSample,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{SweepConfig, TestRiskMode};
use crate::error::Result;
use crate::records::{Coord, Empirical, FlatTable, SweepRecord, Table};

/// Asymptotic risk surface for a concrete teacher: the identity closed form
/// when `Σ = I`, otherwise the general form with the teacher's per-direction
/// mismatch.
pub fn theory_model(spec: &ProblemSpec, cov: &CovarianceModel, teacher: &TeacherConfig) -> Result<RiskModel> {
    if cov.is_identity() {
        Ok(RiskModel::Identity { total_mismatch: teacher.total_mismatch(), regime: spec.regime() })
    } else {
        Ok(RiskModel::General {
            spectrum: cov.spectrum(),
            mismatch: MismatchProfile::from_teacher(teacher, cov)?,
            spec: *spec,
        })
    }
}

/// One `(teacher, λ)` evaluation inside a trial. All teachers of a batch
/// share `Θ⋆`, so one training set serves every cell.
#[derive(Debug, Clone, Copy)]
struct Cell {
    teacher: usize,
    lambda: f64,
}

#[derive(Debug, Clone, Default)]
struct CellSamples {
    train: Vec<f64>,
    test: Vec<f64>,
    theory_train: Vec<f64>,
    theory_test: Vec<f64>,
    error: Option<String>,
}

type TeacherFactory<'a> = dyn Fn(u64) -> Result<Vec<TeacherConfig>> + Sync + 'a;

struct Batch<'a> {
    spec: ProblemSpec,
    cov: &'a CovarianceModel,
    teachers: &'a TeacherFactory<'a>,
    cells: Vec<Cell>,
    cfg: &'a SweepConfig,
}

impl Batch<'_> {
    fn teacher_seed(&self, trial: usize) -> u64 {
        if self.cfg.teacher.fresh_per_trial {
            self.cfg.base_seed.wrapping_add(trial as u64)
        } else {
            self.cfg.base_seed
        }
    }

    /// Per-cell `(train, test)` risks of one trial.
    fn trial(&self, t: usize) -> std::result::Result<Vec<std::result::Result<(f64, f64), String>>, String> {
        let seed = self.cfg.base_seed.wrapping_add(t as u64);
        let teachers = (self.teachers)(self.teacher_seed(t)).map_err(|e| e.to_string())?;
        let truth = &teachers[0];
        let data = generate_dataset(&self.spec, self.cov, truth, seed).map_err(|e| e.to_string())?;
        let solver = MapSolver::new(&data).map_err(|e| e.to_string())?;
        let sample = match self.cfg.test_risk {
            TestRiskMode::Sampled => Some(
                TestSample::draw(truth, self.cov, self.spec.sigma2, self.cfg.n_test, seed).map_err(|e| e.to_string())?,
            ),
            TestRiskMode::Exact => None,
        };
        Ok(self
            .cells
            .iter()
            .map(|cell| {
                let teacher = &teachers[cell.teacher];
                let theta = solver.solve(cell.lambda, teacher.theta_0())?;
                let train = empirical_train_risk(&data, &theta)?;
                let test = match &sample {
                    Some(s) => s.risk(&theta)?,
                    None => exact_test_risk(&theta, teacher, self.cov, self.spec.sigma2)?,
                };
                Ok((train, test))
            })
            .map(|r: mapridge_core::Result<_>| r.map_err(|e| e.to_string()))
            .collect())
    }

    fn theory(&self, teachers: &[TeacherConfig]) -> Vec<std::result::Result<(f64, f64), String>> {
        self.cells
            .iter()
            .map(|cell| {
                let model = theory_model(&self.spec, self.cov, &teachers[cell.teacher]).map_err(|e| e.to_string())?;
                let p = model.predict(cell.lambda).map_err(|e| e.to_string())?;
                Ok((p.train(), p.test()))
            })
            .collect()
    }

    fn run(&self) -> Result<(Vec<CellSamples>, f64)> {
        let start = Instant::now();
        let trials = self.cfg.trials;
        let mut cells = vec![CellSamples::default(); self.cells.len()];

        // Theory for the fixed teacher, or averaged over the trial teachers.
        let theory_seeds: Vec<u64> = if self.cfg.teacher.fresh_per_trial && trials > 0 {
            (0..trials).map(|t| self.teacher_seed(t)).collect()
        } else {
            vec![self.cfg.base_seed]
        };
        for seed in theory_seeds {
            let teachers = (self.teachers)(seed)?;
            for (slot, r) in cells.iter_mut().zip(self.theory(&teachers)) {
                match r {
                    Ok((tr, te)) => {
                        slot.theory_train.push(tr);
                        slot.theory_test.push(te);
                    }
                    Err(e) => {
                        slot.error.get_or_insert(format!("theory: {e}"));
                    }
                }
            }
        }

        let outcomes: Vec<_> = (0..trials).into_par_iter().map(|t| self.trial(t)).collect();
        for (t, outcome) in outcomes.into_iter().enumerate() {
            match outcome {
                Ok(per_cell) => {
                    for (slot, r) in cells.iter_mut().zip(per_cell) {
                        match r {
                            Ok((tr, te)) => {
                                slot.train.push(tr);
                                slot.test.push(te);
                            }
                            Err(e) => {
                                slot.error.get_or_insert(format!("trial {t}: {e}"));
                            }
                        }
                    }
                }
                Err(e) => {
                    for slot in &mut cells {
                        slot.error.get_or_insert(format!("trial {t}: {e}"));
                    }
                }
            }
        }
        let per_cell = start.elapsed().as_secs_f64() / self.cells.len().max(1) as f64;
        Ok((cells, per_cell))
    }
}

fn summarise(values: &[f64]) -> Option<Summary> {
    match values.len() {
        0 => None,
        1 => Some(Summary { mean: values[0], std: 0.0, count: 1 }),
        _ => Summary::of(values),
    }
}

fn record(coords: Vec<Coord>, samples: CellSamples, trials: usize, wall_time_s: f64) -> SweepRecord {
    let mean = |v: &[f64]| summarise(v).map(|s| s.mean);
    let empirical = match (summarise(&samples.train), summarise(&samples.test)) {
        (Some(tr), Some(te)) if samples.error.is_none() => Some(Empirical::new(tr, te)),
        _ => None,
    };
    SweepRecord {
        coords,
        theory_train: mean(&samples.theory_train),
        theory_test: mean(&samples.theory_test),
        empirical,
        trials,
        error: samples.error,
        wall_time_s,
    }
}

/// Risk curves over the λ grid for a prior centred at zero (`prior = none`)
/// and an informative prior at the configured mismatch (`prior = informative`).
/// Returns one table per prior setting with coordinates `(s, lambda)`, where
/// `s` is the realised mismatch of the teacher.
pub fn run_lambda_sweep(cfg: &SweepConfig) -> Result<Vec<Table>> {
    cfg.validate()?;
    let spec = cfg.problem.spec()?;
    let cov = cfg.covariance.build(spec.d)?;
    let lambdas = cfg.lambda_grid.points()?;
    let scale = cfg.teacher.scale.entry_std(spec.d);
    let factory = |seed: u64| -> Result<Vec<TeacherConfig>> {
        let informative = TeacherConfig::draw_scaled(spec.d, spec.q, scale, cfg.teacher.mismatch, seed)?;
        Ok(vec![informative.without_prior(), informative])
    };
    let cells: Vec<Cell> =
        (0..2).flat_map(|teacher| lambdas.iter().map(move |&lambda| Cell { teacher, lambda })).collect();
    let batch = Batch { spec, cov: &cov, teachers: &factory, cells, cfg };
    let (samples, wall) = batch.run()?;

    let reference = factory(cfg.base_seed)?;
    let mut tables = vec![Table::new("lambda_no_prior", &["s", "lambda"]), Table::new("lambda_prior", &["s", "lambda"])];
    for (cell, s) in batch.cells.iter().zip(samples) {
        let mismatch = reference[cell.teacher].total_mismatch();
        let coords = vec![mismatch.into(), cell.lambda.into()];
        tables[cell.teacher].records.push(record(coords, s, cfg.trials, wall));
    }
    Ok(tables)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContourOutput {
    /// Theory risks on the `(‖Θ⋆ − Θ₀‖, λ)` grid, coordinates
    /// `(mismatch_norm, s, lambda)`.
    pub grid: Table,
    /// Per mismatch column: the grid argmin of the test risk, the numeric
    /// optimum and the closed form (empty where it does not apply).
    pub argmin: FlatTable,
}

/// Theory-only risk landscape over prior mismatch and λ.
pub fn run_contour(cfg: &SweepConfig) -> Result<ContourOutput> {
    cfg.validate()?;
    let spec = cfg.problem.spec()?;
    let cov = cfg.covariance.build(spec.d)?;
    let lambdas = cfg.lambda_grid.points()?;
    let norms = cfg.mismatch_norm_grid.points()?;
    let spectrum = cov.spectrum();
    let weights: Vec<f64> = spectrum.atoms().iter().map(|a| a.weight).collect();

    let mut grid = Table::new("contour", &["mismatch_norm", "s", "lambda"]);
    let mut argmin = FlatTable::new(
        "contour_argmin",
        &["mismatch_norm", "s", "lambda_argmin", "test_min", "lambda_star_numeric", "lambda_star_closed_form", "status"],
    );
    for &norm in &norms {
        let s = norm * norm;
        let start = Instant::now();
        let model = if cov.is_identity() {
            RiskModel::Identity { total_mismatch: s, regime: spec.regime() }
        } else {
            RiskModel::General { spectrum: spectrum.clone(), mismatch: MismatchProfile::isotropic(s, &weights)?, spec }
        };
        let column: Vec<_> = lambdas.par_iter().map(|&l| model.predict(l)).collect();
        let wall = start.elapsed().as_secs_f64() / lambdas.len() as f64;
        let mut best: Option<(f64, f64)> = None;
        let mut column_error = None;
        for (&lambda, p) in lambdas.iter().zip(column) {
            let (tt, te, error) = match p {
                Ok(p) => (Some(p.train()), Some(p.test()), None),
                Err(e) => (None, None, Some(e.to_string())),
            };
            if let Some(test) = te {
                if best.is_none_or(|b| test < b.1) {
                    best = Some((lambda, test));
                }
            }
            if let Some(e) = &error {
                column_error.get_or_insert(e.clone());
            }
            grid.records.push(SweepRecord {
                coords: vec![norm.into(), s.into(), lambda.into()],
                theory_train: tt,
                theory_test: te,
                empirical: None,
                trials: 0,
                error,
                wall_time_s: wall,
            });
        }
        let numeric = optimal_lambda(&model, OptimizationMode::Numeric(SearchOptions::default()));
        let closed = if cov.is_identity() {
            closed_form_lambda_star(spec.sigma2, s, spec.c()).ok()
        } else {
            None
        };
        let num = |v: Option<f64>| v.map(Coord::Num).unwrap_or(Coord::Text(String::new()));
        let status = match (&column_error, &numeric) {
            (None, Ok(_)) => "ok".to_owned(),
            (Some(e), _) => format!("failed: {e}"),
            (None, Err(e)) => format!("failed: {e}"),
        };
        argmin.push(vec![
            norm.into(),
            s.into(),
            num(best.map(|b| b.0)),
            num(best.map(|b| b.1)),
            num(numeric.ok().and_then(|o| o.lambda_star.value())),
            match closed {
                Some(LambdaStar::Finite(v)) => v.into(),
                Some(LambdaStar::PriorExact) => "inf".into(),
                None => "".into(),
            },
            Coord::Text(status),
        ]);
    }
    Ok(ContourOutput { grid, argmin })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    /// `Θ₀ = 0` with the small λ.
    NoPrior,
    /// Small mismatch with the large λ.
    GoodPrior,
    /// Large mismatch with the large λ.
    PoorPrior,
}

impl Scenario {
    pub const ALL: [Scenario; 3] = [Scenario::NoPrior, Scenario::GoodPrior, Scenario::PoorPrior];

    pub fn label(self) -> &'static str {
        match self {
            Self::NoPrior => "no_prior",
            Self::GoodPrior => "good_prior",
            Self::PoorPrior => "poor_prior",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DoubleDescentOutput {
    /// Coordinates `(scenario, lambda, s, c, d)`; `c = d/n` after rounding `d`.
    pub table: Table,
    /// Aspect ratio at the largest theory test risk of [`Scenario::NoPrior`].
    pub peak_c: Option<f64>,
}

/// Risks along the aspect-ratio grid for the three prior/regularisation
/// scenarios, with `n` held fixed and `d = round(c n)`.
pub fn run_double_descent(cfg: &SweepConfig) -> Result<DoubleDescentOutput> {
    cfg.validate()?;
    let ratios = cfg.ratio_grid.points()?;
    let dd = &cfg.double_descent;
    let mut table = Table::new("double_descent", &["scenario", "lambda", "s", "c", "d"]);
    let mut peak: Option<(f64, f64)> = None;
    for &c_target in &ratios {
        let spec = cfg.problem.at_ratio(c_target)?;
        let cov = cfg.covariance.build(spec.d)?;
        let scale = cfg.teacher.scale.entry_std(spec.d);
        let factory = |seed: u64| -> Result<Vec<TeacherConfig>> {
            let good = TeacherConfig::draw_scaled(spec.d, spec.q, scale, dd.good_mismatch, seed)?;
            let poor = good.with_mismatch(dd.poor_mismatch, seed.wrapping_add(1))?;
            Ok(vec![good.without_prior(), good, poor])
        };
        let cells = vec![
            Cell { teacher: 0, lambda: dd.small_lambda },
            Cell { teacher: 1, lambda: dd.large_lambda },
            Cell { teacher: 2, lambda: dd.large_lambda },
        ];
        let batch = Batch { spec, cov: &cov, teachers: &factory, cells, cfg };
        let (samples, wall) = batch.run()?;
        let reference = factory(cfg.base_seed)?;
        for ((scenario, cell), s) in Scenario::ALL.iter().zip(&batch.cells).zip(samples) {
            let coords = vec![
                scenario.label().into(),
                cell.lambda.into(),
                reference[cell.teacher].total_mismatch().into(),
                spec.c().into(),
                (spec.d as f64).into(),
            ];
            let rec = record(coords, s, cfg.trials, wall);
            if *scenario == Scenario::NoPrior && rec.ok() {
                if let Some(t) = rec.theory_test {
                    if peak.is_none_or(|p| t > p.1) {
                        peak = Some((spec.c(), t));
                    }
                }
            }
            table.records.push(rec);
        }
    }
    Ok(DoubleDescentOutput { table, peak_c: peak.map(|p| p.0) })
}

/// One aspect ratio of the estimator pipeline.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimatorRow {
    pub c: f64,
    pub d: usize,
    pub sigma2: f64,
    pub s_true: f64,
    pub train_small: f64,
    pub train_large: f64,
    pub sigma2_hat: f64,
    pub s_hat: f64,
    pub s_clipped: bool,
    /// Plug-in `λ̂⋆` (`None` when the estimated mismatch is zero).
    pub lambda_star_hat: Option<f64>,
    /// Minimiser of the true theory test risk by golden-section search.
    pub lambda_star_numeric: f64,
    /// Argmin of the true theory test risk over the reference grid.
    pub lambda_star_grid: f64,
    pub test_at_hat: Option<f64>,
    pub test_min_grid: f64,
    pub trials: usize,
    pub error: Option<String>,
}

impl EstimatorRow {
    pub fn sigma2_rel_err(&self) -> f64 {
        (self.sigma2_hat - self.sigma2).abs() / self.sigma2
    }

    pub fn s_rel_err(&self) -> f64 {
        (self.s_hat - self.s_true).abs() / self.s_true
    }

    /// `R_test(λ̂⋆) / min_grid R_test`.
    pub fn risk_ratio(&self) -> Option<f64> {
        self.test_at_hat.map(|t| t / self.test_min_grid)
    }
}

pub const ESTIMATOR_COLUMNS: [&str; 21] = [
    "c",
    "d",
    "sigma2",
    "s_true",
    "train_small",
    "train_large",
    "sigma2_hat",
    "s_hat",
    "s_clipped",
    "lambda_star_hat",
    "lambda_star_numeric",
    "lambda_star_grid",
    "test_at_hat",
    "test_min_grid",
    "sigma2_rel_err",
    "s_rel_err",
    "risk_ratio",
    "small_anchor",
    "large_anchor",
    "trials",
    "status",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimatorOutput {
    pub rows: Vec<EstimatorRow>,
    pub table: FlatTable,
}

/// For each aspect ratio: measure the mean training risk at the two anchors,
/// estimate `(σ², S, λ⋆)`, and compare `λ̂⋆` against the optimum of the true
/// asymptotic test risk.
pub fn run_estimator_validation(cfg: &SweepConfig) -> Result<EstimatorOutput> {
    cfg.validate()?;
    if cfg.trials == 0 {
        return Err(crate::error::usage!("the estimator pipeline needs at least one trial"));
    }
    let ratios = cfg.ratio_grid.points()?;
    let reference = cfg.estimator.reference_grid.points()?;
    let (small, large) = (cfg.estimator.small_anchor, cfg.estimator.large_anchor);
    let mut rows = Vec::new();
    let mut table = FlatTable::new("estimator", &ESTIMATOR_COLUMNS);
    for &c_target in &ratios {
        let spec = cfg.problem.at_ratio(c_target)?;
        let cov = cfg.covariance.build(spec.d)?;
        let scale = cfg.teacher.scale.entry_std(spec.d);
        let factory =
            |seed: u64| Ok(vec![TeacherConfig::draw_scaled(spec.d, spec.q, scale, cfg.teacher.mismatch, seed)?]);
        let cells = vec![Cell { teacher: 0, lambda: small }, Cell { teacher: 0, lambda: large }];
        let batch = Batch { spec, cov: &cov, teachers: &factory, cells, cfg };
        let (samples, _) = batch.run()?;
        let teacher = &factory(cfg.base_seed)?[0];
        let row = estimator_row(&spec, &cov, teacher, &samples, &reference, small, large, cfg.trials);
        let num = |v: Option<f64>| v.map(Coord::Num).unwrap_or(Coord::Text(String::new()));
        let ok = row.error.is_none();
        table.push(vec![
            row.c.into(),
            (row.d as f64).into(),
            row.sigma2.into(),
            row.s_true.into(),
            num(ok.then_some(row.train_small)),
            num(ok.then_some(row.train_large)),
            num(ok.then_some(row.sigma2_hat)),
            num(ok.then_some(row.s_hat)),
            Coord::Text(row.s_clipped.to_string()),
            num(row.lambda_star_hat),
            num(ok.then_some(row.lambda_star_numeric)),
            num(ok.then_some(row.lambda_star_grid)),
            num(row.test_at_hat),
            num(ok.then_some(row.test_min_grid)),
            num(ok.then(|| row.sigma2_rel_err())),
            num(ok.then(|| row.s_rel_err())),
            num(row.risk_ratio()),
            small.into(),
            large.into(),
            (row.trials as f64).into(),
            Coord::Text(row.error.as_ref().map_or("ok".into(), |e| format!("failed: {e}"))),
        ]);
        rows.push(row);
    }
    Ok(EstimatorOutput { rows, table })
}

#[allow(clippy::too_many_arguments)]
fn estimator_row(
    spec: &ProblemSpec,
    cov: &CovarianceModel,
    teacher: &TeacherConfig,
    samples: &[CellSamples],
    reference: &[f64],
    small: f64,
    large: f64,
    trials: usize,
) -> EstimatorRow {
    let mut row = EstimatorRow {
        c: spec.c(),
        d: spec.d,
        sigma2: spec.sigma2,
        s_true: teacher.total_mismatch(),
        train_small: f64::NAN,
        train_large: f64::NAN,
        sigma2_hat: f64::NAN,
        s_hat: f64::NAN,
        s_clipped: false,
        lambda_star_hat: None,
        lambda_star_numeric: f64::NAN,
        lambda_star_grid: f64::NAN,
        test_at_hat: None,
        test_min_grid: f64::NAN,
        trials,
        error: samples.iter().find_map(|s| s.error.clone()),
    };
    if row.error.is_some() {
        return row;
    }
    let result = (|| -> Result<()> {
        row.train_small = summarise(&samples[0].train).map_or(f64::NAN, |s| s.mean);
        row.train_large = summarise(&samples[1].train).map_or(f64::NAN, |s| s.mean);
        let est = estimate_from_anchors(
            Anchor { lambda: small, train_risk: row.train_small },
            Anchor { lambda: large, train_risk: row.train_large },
            spec.c(),
            spec.q,
        )?;
        row.sigma2_hat = est.sigma2_hat;
        row.s_hat = est.s_hat.value;
        row.s_clipped = est.s_hat.clipped;
        row.lambda_star_hat = est.lambda_star_hat.value();

        let model = theory_model(spec, cov, teacher)?;
        let numeric = optimal_lambda(&model, OptimizationMode::Numeric(SearchOptions::default()))?;
        row.lambda_star_numeric = numeric.lambda_star.value().unwrap_or(f64::INFINITY);
        let (mut arg, mut min) = (f64::NAN, f64::INFINITY);
        for &l in reference {
            let t = model.predict(l)?.test();
            if t < min {
                (arg, min) = (l, t);
            }
        }
        row.lambda_star_grid = arg;
        row.test_min_grid = min;
        if let Some(l) = row.lambda_star_hat {
            row.test_at_hat = Some(model.predict(l)?.test());
        }
        Ok(())
    })();
    if let Err(e) = result {
        row.error = Some(e.to_string());
    }
    row
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{Grid, SweepKind};

    fn small_config() -> SweepConfig {
        let mut cfg = SweepConfig::default();
        cfg.problem.d = 20;
        cfg.problem.n = 40;
        cfg.problem.q = 2;
        cfg.lambda_grid = Grid::Values(vec![1e-2, 1.0]);
        cfg.trials = 4;
        cfg.n_test = 500;
        cfg
    }

    #[test]
    fn theory_only_sweep_has_no_empirical_fields() {
        let cfg = SweepConfig { trials: 0, ..small_config() };
        let tables = run_lambda_sweep(&cfg).unwrap();
        assert_eq!(tables.len(), 2);
        for t in &tables {
            assert_eq!(t.records.len(), 2);
            assert!(t.records.iter().all(|r| r.empirical.is_none() && r.theory_test.is_some() && r.ok()));
        }
    }

    #[test]
    fn sweep_is_independent_of_thread_count() {
        let cfg = small_config();
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let strip = |mut t: Vec<Table>| {
            for table in &mut t {
                for r in &mut table.records {
                    r.wall_time_s = 0.0;
                }
            }
            t
        };
        let a = strip(one.install(|| run_lambda_sweep(&cfg)).unwrap());
        let b = strip(four.install(|| run_lambda_sweep(&cfg)).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn failing_cells_are_marked_not_fatal() {
        // λ = 0 with d > n: the Gram matrix is singular and the theory needs λ > 0.
        let mut cfg = small_config();
        cfg.problem.d = 50;
        cfg.trials = 2;
        let spec = cfg.problem.spec().unwrap();
        let cov = cfg.covariance.build(spec.d).unwrap();
        let factory = |seed: u64| Ok(vec![TeacherConfig::draw(spec.d, spec.q, 1.0, seed)?]);
        let cells = vec![Cell { teacher: 0, lambda: 0.0 }, Cell { teacher: 0, lambda: 1.0 }];
        let batch = Batch { spec, cov: &cov, teachers: &factory, cells, cfg: &cfg };
        let (samples, _) = batch.run().unwrap();
        let records: Vec<_> = samples.into_iter().map(|s| record(vec![], s, 2, 0.0)).collect();
        assert!(!records[0].ok());
        assert!(records[0].status().starts_with("failed: "), "{}", records[0].status());
        assert!(records[0].empirical.is_none());
        assert!(records[1].ok() && records[1].empirical.is_some());
    }

    #[test]
    fn contour_argmin_moves_down_as_mismatch_grows() {
        let mut cfg = SweepConfig::preset(2).unwrap();
        cfg.kind = SweepKind::Contour;
        let out = run_contour(&cfg).unwrap();
        assert_eq!(out.grid.records.len(), 40 * 40);
        let col = out.argmin.column("lambda_argmin").unwrap();
        let trace: Vec<f64> = out.argmin.rows.iter().map(|r| r[col].as_f64().unwrap()).collect();
        // S = 0: the risk decreases all the way to the top of the grid.
        assert_eq!(trace[0], 1e3);
        assert!(trace.windows(2).all(|w| w[1] <= w[0]), "{trace:?}");
    }

    #[test]
    fn double_descent_peaks_near_one() {
        let mut cfg = SweepConfig::preset(3).unwrap();
        cfg.trials = 0;
        let out = run_double_descent(&cfg).unwrap();
        assert_eq!(out.table.records.len(), 3 * cfg.ratio_grid.points().unwrap().len());
        let peak = out.peak_c.unwrap();
        assert!((0.8..=1.2).contains(&peak), "{peak}");
    }
}
