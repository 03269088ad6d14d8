//! The `mapridge` command line.
//!
//! Settings resolve as flags > `--config` JSON document > built-in defaults
//! (the figure preset for `reproduce`). Every run that writes files also writes
//! `manifest.json` with the merged configuration; passing that manifest back
//! through `--config` replays the run.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use mapridge_core::estimation::{estimate_from_anchors, Anchor};
use mapridge_core::theory::{asymptotic_risks_general, asymptotic_risks_identity};
use mapridge_core::{AsymptoticRegime, MismatchProfile, RiskPrediction, Spectrum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{CovarianceSpec, Grid, SweepConfig, SweepKind, TestRiskMode};
use crate::error::{usage, Result, RunError};
use crate::experiments::{run_contour, run_double_descent, run_estimator_validation, run_lambda_sweep};
use crate::records::{fmt_sig9, write_json, Coord, FlatTable, Table};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = "mapridge", version, about = "Asymptotic and simulated risks of MAP linear regression with an informative Gaussian prior")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the asymptotic risks on a λ grid (no simulation).
    Theory(TheoryArgs),
    /// Monte Carlo risk curves over λ, with and without the prior.
    Simulate(SweepArgs),
    /// Any sweep kind: lambda, contour, double-descent or estimator.
    Sweep(SweepArgs),
    /// Estimate σ², S and λ⋆ from two training-risk anchors, or run the
    /// simulated estimator pipeline over aspect ratios.
    Estimate(EstimateArgs),
    /// Regenerate the records behind one of the four figures.
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Base seed; trial t uses seed + t [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads [default: machine parallelism]
    #[arg(long)]
    pub threads: Option<usize>,
    /// Output directory [default: ./out; `theory` prints to stdout only]
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// JSON config document or run manifest
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Monte Carlo trials per cell, 0 for theory only [default: 20]
    #[arg(long)]
    pub trials: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct ProblemArgs {
    /// Input dimension [default: 100]
    #[arg(long)]
    pub d: Option<usize>,
    /// Training samples [default: 200]
    #[arg(long)]
    pub n: Option<usize>,
    /// Output dimension [default: 10]
    #[arg(long)]
    pub q: Option<usize>,
    /// Noise variance σ² [default: 0.5]
    #[arg(long)]
    pub sigma2: Option<f64>,
    /// Aspect ratio d/n; sets d = round(c n)
    #[arg(long)]
    pub c: Option<f64>,
}

#[derive(Debug, Clone, Args)]
#[group(multiple = false)]
pub struct SpectrumArgs {
    /// Identity covariance [default]
    #[arg(long)]
    pub identity: bool,
    /// Eigenvalue file: one value, or `value,multiplicity`, per line
    #[arg(long, value_name = "FILE")]
    pub spectrum_file: Option<PathBuf>,
    /// AR(1) covariance Σ_ij = ρ^|i−j|
    #[arg(long, value_name = "RHO")]
    pub ar1: Option<f64>,
    /// Half the eigenvalues at LOW, half at HIGH
    #[arg(long, value_name = "LOW,HIGH", value_parser = parse_pair)]
    pub two_atom: Option<(f64, f64)>,
}

#[derive(Debug, Clone, Args)]
pub struct TheoryArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[command(flatten)]
    pub spectrum: SpectrumArgs,
    /// Total prior mismatch S = ‖Θ⋆ − Θ₀‖²_F, spread in proportion to the
    /// eigenvalue multiplicities [default: 0]
    #[arg(long = "S", visible_alias = "mismatch")]
    pub mismatch: Option<f64>,
    /// Per-eigenvalue mismatch s_i, one per line, aligned with --spectrum-file
    #[arg(long, value_name = "FILE", conflicts_with = "mismatch")]
    pub mismatch_profile: Option<PathBuf>,
    /// Single regularisation strength
    #[arg(long, conflicts_with = "lambda_grid", allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    /// λ grid: `lo:hi:Nlog`, `lo:hi:Nlin` or `a,b,…` [default: 1e-4:1e3:40log]
    #[arg(long, value_name = "GRID")]
    pub lambda_grid: Option<Grid>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Lambda,
    Contour,
    DoubleDescent,
    Estimator,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TestRiskArg {
    Exact,
    Sampled,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[command(flatten)]
    pub spectrum: SpectrumArgs,
    /// Sweep kind (`sweep` only) [default: lambda]
    #[arg(long, value_enum)]
    pub kind: Option<KindArg>,
    /// Mismatch S of the informative prior [default: 2]
    #[arg(long = "S", visible_alias = "mismatch")]
    pub mismatch: Option<f64>,
    /// λ grid [default: 1e-4:1e3:40log]
    #[arg(long, value_name = "GRID")]
    pub lambda_grid: Option<Grid>,
    /// Aspect-ratio grid [default: 0.1..3 by 0.1, by 0.02 on [0.8, 1.2]]
    #[arg(long, value_name = "GRID")]
    pub ratio_grid: Option<Grid>,
    /// ‖Θ⋆ − Θ₀‖ grid for contours [default: 0:5:40lin]
    #[arg(long, value_name = "GRID")]
    pub mismatch_norm_grid: Option<Grid>,
    /// Test points per trial for sampled test risks [default: 10000]
    #[arg(long)]
    pub n_test: Option<usize>,
    /// Test risk measurement [default: sampled]
    #[arg(long, value_enum)]
    pub test_risk: Option<TestRiskArg>,
    /// Redraw the teacher for every trial [default: fixed teacher]
    #[arg(long)]
    pub fresh_teacher: bool,
}

#[derive(Debug, Clone, Args)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// Measured train risk at the small-λ anchor (with --train-large: no simulation)
    #[arg(long, requires = "train_large")]
    pub train_small: Option<f64>,
    /// Measured train risk at the large-λ anchor
    #[arg(long, requires = "train_small")]
    pub train_large: Option<f64>,
    /// True mismatch S used in the simulated pipeline [default: 2]
    #[arg(long = "S", visible_alias = "mismatch")]
    pub mismatch: Option<f64>,
    /// Aspect ratios of the simulated pipeline [default: 0.1:0.9:9lin]
    #[arg(long, value_name = "GRID")]
    pub ratio_grid: Option<Grid>,
    /// Small-λ anchor [default: 1e-6]
    #[arg(long)]
    pub small_anchor: Option<f64>,
    /// Large-λ anchor [default: 1e4]
    #[arg(long)]
    pub large_anchor: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct ReproduceArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Figure number
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
    pub figure: u8,
}

fn parse_pair(s: &str) -> std::result::Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected LOW,HIGH, got '{s}'"))?;
    let p = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("'{t}' is not a number"));
    Ok((p(a)?, p(b)?))
}

impl SpectrumArgs {
    fn resolve(&self) -> Result<Option<CovarianceSpec>> {
        Ok(if let Some(path) = &self.spectrum_file {
            Some(CovarianceSpec::from_file(path)?)
        } else if let Some(rho) = self.ar1 {
            Some(CovarianceSpec::Ar1 { rho })
        } else if let Some((low, high)) = self.two_atom {
            Some(CovarianceSpec::TwoAtom { low, high })
        } else if self.identity {
            Some(CovarianceSpec::Identity)
        } else {
            None
        })
    }
}

impl ProblemArgs {
    fn apply(&self, cfg: &mut SweepConfig) -> Result<()> {
        let p = &mut cfg.problem;
        if let Some(v) = self.n {
            p.n = v;
        }
        if let Some(v) = self.q {
            p.q = v;
        }
        if let Some(v) = self.sigma2 {
            p.sigma2 = v;
        }
        match (self.d, self.c) {
            (Some(_), Some(_)) => return Err(usage!("give either --d or --c, not both")),
            (Some(d), None) => p.d = d,
            (None, Some(c)) => p.d = p.at_ratio(c)?.d,
            (None, None) => {}
        }
        Ok(())
    }
}

impl CommonArgs {
    /// Defaults, then the config document, then these flags.
    fn base(&self, defaults: SweepConfig) -> Result<SweepConfig> {
        let mut cfg = match &self.config {
            Some(path) => defaults.merge_file(path)?,
            None => defaults,
        };
        if let Some(s) = self.seed {
            cfg.base_seed = s;
        }
        if let Some(t) = self.trials {
            cfg.trials = t;
        }
        Ok(cfg)
    }

    fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("out"))
    }
}

/// What a run wrote, with everything needed to rerun it.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub config: Value,
    pub outputs: Vec<String>,
    pub base_seed: u64,
    pub threads: Option<usize>,
    pub timestamp_unix: u64,
    pub version: &'static str,
}

struct Outputs {
    dir: PathBuf,
    written: Vec<String>,
    failed: usize,
    total: usize,
}

impl Outputs {
    fn new(dir: PathBuf) -> Result<Self> {
        std::fs::create_dir_all(&dir).map_err(|e| RunError::io(&dir, e))?;
        Ok(Self { dir, written: Vec::new(), failed: 0, total: 0 })
    }

    fn table(&mut self, file: &str, t: &Table) -> Result<()> {
        t.write_csv(&self.dir.join(file))?;
        self.failed += t.failed();
        self.total += t.records.len();
        self.written.push(file.into());
        Ok(())
    }

    fn flat(&mut self, file: &str, t: &FlatTable) -> Result<()> {
        t.write_csv(&self.dir.join(file))?;
        if let Some(col) = t.column("status") {
            self.failed += t.rows.iter().filter(|r| !matches!(&r[col], Coord::Text(s) if s == "ok")).count();
            self.total += t.rows.len();
        }
        self.written.push(file.into());
        Ok(())
    }

    fn json(&mut self, file: &str, value: &Value) -> Result<()> {
        write_json(&self.dir.join(file), value)?;
        self.written.push(file.into());
        Ok(())
    }

    fn finish(mut self, subcommand: &str, config: Value, seed: u64, threads: Option<usize>) -> Result<()> {
        self.written.push("manifest.json".into());
        let manifest = RunManifest {
            subcommand: subcommand.into(),
            config,
            outputs: self.written.clone(),
            base_seed: seed,
            threads,
            timestamp_unix: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
            version: VERSION,
        };
        write_json(&self.dir.join("manifest.json"), &manifest)?;
        for f in &self.written {
            eprintln!("wrote {}", self.dir.join(f).display());
        }
        if self.failed > 0 {
            return Err(RunError::FailedCells { failed: self.failed, total: self.total });
        }
        Ok(())
    }
}

fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| usage!("thread pool: {e}"))?;
    pool.install(f)
}

/// Run `cfg` and write its records under `out` with file-name `prefix`.
fn run_sweep(cfg: &SweepConfig, out: &mut Outputs, prefix: &str) -> Result<Value> {
    let mut doc = json!({ "version": VERSION, "config": cfg });
    match cfg.kind {
        SweepKind::Lambda => {
            let tables = run_lambda_sweep(cfg)?;
            for t in &tables {
                out.table(&format!("{prefix}_{}.csv", t.name), t)?;
            }
            doc["records"] = json!(tables);
        }
        SweepKind::Contour => {
            let c = run_contour(cfg)?;
            out.table(&format!("{prefix}_contour.csv"), &c.grid)?;
            out.flat(&format!("{prefix}_contour_argmin.csv"), &c.argmin)?;
            doc["records"] = json!(c);
        }
        SweepKind::DoubleDescent => {
            let dd = run_double_descent(cfg)?;
            out.table(&format!("{prefix}_double_descent.csv"), &dd.table)?;
            doc["records"] = json!(dd);
        }
        SweepKind::Estimator => {
            let est = run_estimator_validation(cfg)?;
            out.flat(&format!("{prefix}_estimator.csv"), &est.table)?;
            doc["records"] = json!(est.rows);
        }
    }
    Ok(doc)
}

fn sweep_command(name: &str, args: &SweepArgs, force_kind: Option<SweepKind>) -> Result<()> {
    let mut cfg = args.common.base(SweepConfig::default())?;
    args.problem.apply(&mut cfg)?;
    if let Some(cov) = args.spectrum.resolve()? {
        if let Some(d) = cov.fixed_dim() {
            if args.problem.d.is_none() && args.problem.c.is_none() {
                cfg.problem.d = d;
            }
        }
        cfg.covariance = cov;
    }
    if let Some(k) = args.kind {
        if force_kind.is_some() {
            return Err(usage!("--kind is only accepted by `sweep`"));
        }
        cfg.kind = match k {
            KindArg::Lambda => SweepKind::Lambda,
            KindArg::Contour => SweepKind::Contour,
            KindArg::DoubleDescent => SweepKind::DoubleDescent,
            KindArg::Estimator => SweepKind::Estimator,
        };
    }
    if let Some(k) = force_kind {
        cfg.kind = k;
    }
    if let Some(s) = args.mismatch {
        cfg.teacher.mismatch = s;
    }
    if let Some(g) = &args.lambda_grid {
        cfg.lambda_grid = g.clone();
    }
    if let Some(g) = &args.ratio_grid {
        cfg.ratio_grid = g.clone();
    }
    if let Some(g) = &args.mismatch_norm_grid {
        cfg.mismatch_norm_grid = g.clone();
    }
    if let Some(n) = args.n_test {
        cfg.n_test = n;
    }
    if let Some(m) = args.test_risk {
        cfg.test_risk = match m {
            TestRiskArg::Exact => TestRiskMode::Exact,
            TestRiskArg::Sampled => TestRiskMode::Sampled,
        };
    }
    if args.fresh_teacher {
        cfg.teacher.fresh_per_trial = true;
    }
    cfg.validate()?;
    let mut out = Outputs::new(args.common.out_dir())?;
    let doc = with_threads(args.common.threads, || run_sweep(&cfg, &mut out, name))?;
    out.json(&format!("{name}.json"), &doc)?;
    out.finish(name, json!(cfg), cfg.base_seed, args.common.threads)
}

fn reproduce(args: &ReproduceArgs) -> Result<()> {
    let cfg = args.common.base(SweepConfig::preset(args.figure)?)?;
    cfg.validate()?;
    let prefix = format!("fig{}", args.figure);
    let mut out = Outputs::new(args.common.out_dir())?;
    let mut doc = with_threads(args.common.threads, || run_sweep(&cfg, &mut out, &prefix))?;
    if args.figure == 4 {
        // Right panel: test risk over λ at c = 0.5 with the informative prior.
        let curve = SweepConfig { kind: SweepKind::Lambda, ..cfg.clone() };
        let extra = with_threads(args.common.threads, || run_sweep(&curve, &mut out, &prefix))?;
        doc["lambda_records"] = extra["records"].clone();
    }
    out.json(&format!("{prefix}.json"), &doc)?;
    out.finish("reproduce", json!({ "figure": args.figure, "config": cfg }), cfg.base_seed, args.common.threads)
}

fn estimate(args: &EstimateArgs) -> Result<()> {
    let mut cfg = args.common.base(SweepConfig::preset(4)?)?;
    args.problem.apply(&mut cfg)?;
    if let Some(v) = args.small_anchor {
        cfg.estimator.small_anchor = v;
    }
    if let Some(v) = args.large_anchor {
        cfg.estimator.large_anchor = v;
    }
    if let (Some(small), Some(large)) = (args.train_small, args.train_large) {
        let c = cfg.problem.d as f64 / cfg.problem.n as f64;
        let c = args.problem.c.unwrap_or(c);
        let est = estimate_from_anchors(
            Anchor { lambda: cfg.estimator.small_anchor, train_risk: small },
            Anchor { lambda: cfg.estimator.large_anchor, train_risk: large },
            c,
            cfg.problem.q,
        )?;
        let mut stdout = std::io::stdout().lock();
        let line = format!(
            "c,q,sigma2_hat,s_hat,s_clipped,lambda_star_hat\n{},{},{},{},{},{}\n",
            fmt_sig9(c),
            cfg.problem.q,
            fmt_sig9(est.sigma2_hat),
            fmt_sig9(est.s_hat.value),
            est.s_hat.clipped,
            est.lambda_star_hat.value().map_or("inf".into(), fmt_sig9),
        );
        stdout.write_all(line.as_bytes()).map_err(|e| RunError::io("<stdout>", e))?;
        return Ok(());
    }
    if let Some(s) = args.mismatch {
        cfg.teacher.mismatch = s;
    }
    if let Some(g) = &args.ratio_grid {
        cfg.ratio_grid = g.clone();
    }
    cfg.kind = SweepKind::Estimator;
    cfg.validate()?;
    let mut out = Outputs::new(args.common.out_dir())?;
    let doc = with_threads(args.common.threads, || run_sweep(&cfg, &mut out, "estimate"))?;
    out.json("estimate.json", &doc)?;
    out.finish("estimate", json!(cfg), cfg.base_seed, args.common.threads)
}

const THEORY_COLUMNS: [&str; 11] = [
    "lambda",
    "delta",
    "kappa",
    "alpha",
    "train_signal",
    "train_noise",
    "test_signal",
    "test_noise",
    "theory_train",
    "theory_test",
    "status",
];

fn theory_row(lambda: f64, p: &mapridge_core::Result<RiskPrediction>) -> Vec<String> {
    match p {
        Ok(p) => {
            let fp = &p.fixed_point;
            let mut row: Vec<String> = [
                lambda,
                fp.delta,
                fp.kappa,
                fp.alpha,
                p.train_terms.signal,
                p.train_terms.noise,
                p.test_terms.signal,
                p.test_terms.noise,
                p.train(),
                p.test(),
            ]
            .into_iter()
            .map(fmt_sig9)
            .collect();
            row.push("ok".into());
            row
        }
        Err(e) => {
            let mut row = vec![fmt_sig9(lambda)];
            row.extend(std::iter::repeat_n(String::new(), 9));
            row.push(format!("failed: {e}"));
            row
        }
    }
}

fn read_profile(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path).map_err(|e| RunError::io(path, e))?;
    let mut values = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        match line.parse::<f64>() {
            Ok(v) if v.is_finite() && v >= 0.0 => values.push(v),
            _ => return Err(usage!("{}: line {}: '{line}' is not a nonnegative number", path.display(), i + 1)),
        }
    }
    Ok(values)
}

fn theory(args: &TheoryArgs) -> Result<()> {
    let mut cfg = args.common.base(SweepConfig::default())?;
    if let Some(cov) = args.spectrum.resolve()? {
        cfg.covariance = cov;
    }
    let fixed = cfg.covariance.fixed_dim();
    match (fixed, args.problem.c) {
        // An explicit spectrum fixes d, so --c sets n instead.
        (Some(d), Some(c)) => {
            let problem = ProblemArgs { c: None, d: None, ..args.problem.clone() };
            problem.apply(&mut cfg)?;
            if !(c > 0.0 && c.is_finite()) {
                return Err(usage!("--c must be positive, got {c}"));
            }
            cfg.problem.d = d;
            cfg.problem.n = ((d as f64 / c).round() as usize).max(1);
        }
        (Some(d), None) => {
            args.problem.apply(&mut cfg)?;
            if args.problem.d.is_none() {
                cfg.problem.d = d;
            }
        }
        (None, _) => {
            let problem = ProblemArgs { c: None, ..args.problem.clone() };
            problem.apply(&mut cfg)?;
        }
    }
    let lambdas = match (args.lambda, &args.lambda_grid) {
        (Some(l), _) => vec![l],
        (None, Some(g)) => g.points()?,
        (None, None) => cfg.lambda_grid.points()?,
    };
    if let Some(bad) = lambdas.iter().find(|l| !(**l > 0.0 && l.is_finite())) {
        return Err(usage!("lambda must be positive and finite, got {bad}"));
    }
    let total = args.mismatch.unwrap_or(0.0);
    if !(total >= 0.0 && total.is_finite()) {
        return Err(usage!("--S must be nonnegative, got {total}"));
    }

    let predictions: Vec<_> = if cfg.covariance == CovarianceSpec::Identity && args.mismatch_profile.is_none() {
        let c = args.problem.c.unwrap_or(cfg.problem.d as f64 / cfg.problem.n as f64);
        let regime = AsymptoticRegime::new(c, cfg.problem.q, cfg.problem.sigma2)?;
        lambdas.iter().map(|&l| asymptotic_risks_identity(total, l, &regime)).collect()
    } else {
        let spec = cfg.problem.spec()?;
        let cov = cfg.covariance.build(spec.d)?;
        let spectrum: Spectrum = cov.spectrum();
        let profile = match &args.mismatch_profile {
            Some(path) => {
                if fixed.is_none() && cfg.covariance != CovarianceSpec::Identity {
                    return Err(usage!("--mismatch-profile needs --spectrum-file or --identity"));
                }
                let s = read_profile(path)?;
                if s.len() != spec.d {
                    return Err(usage!("mismatch profile has {} values but d = {}", s.len(), spec.d));
                }
                MismatchProfile::new(s)?
            }
            None => {
                let weights: Vec<f64> = spectrum.atoms().iter().map(|a| a.weight).collect();
                MismatchProfile::isotropic(total, &weights)?
            }
        };
        lambdas.iter().map(|&l| asymptotic_risks_general(&spectrum, &profile, l, &spec)).collect()
    };

    let mut buf = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| RunError::io("<csv>", std::io::Error::other(e.to_string()));
    buf.write_record(THEORY_COLUMNS).map_err(io)?;
    for (&l, p) in lambdas.iter().zip(&predictions) {
        buf.write_record(theory_row(l, p)).map_err(io)?;
    }
    let bytes = buf.into_inner().map_err(|e| RunError::io("<csv>", std::io::Error::other(e.to_string())))?;
    std::io::stdout().lock().write_all(&bytes).map_err(|e| RunError::io("<stdout>", e))?;

    let failed = predictions.iter().filter(|p| p.is_err()).count();
    if let Some(dir) = &args.common.out {
        let mut out = Outputs::new(dir.clone())?;
        let path = dir.join("theory.csv");
        std::fs::write(&path, &bytes).map_err(|e| RunError::io(&path, e))?;
        out.written.push("theory.csv".into());
        out.failed = failed;
        out.total = predictions.len();
        let resolved = json!({
            "problem": cfg.problem,
            "covariance": cfg.covariance,
            "mismatch": total,
            "mismatch_profile": args.mismatch_profile,
            "lambdas": lambdas,
        });
        return out.finish("theory", resolved, cfg.base_seed, args.common.threads);
    }
    if failed > 0 {
        return Err(RunError::FailedCells { failed, total: predictions.len() });
    }
    Ok(())
}

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Theory(a) => theory(a),
        Command::Simulate(a) => sweep_command("simulate", a, Some(SweepKind::Lambda)),
        Command::Sweep(a) => sweep_command("sweep", a, None),
        Command::Estimate(a) => estimate(a),
        Command::Reproduce(a) => reproduce(a),
    }
}

/// Parse `args`, run, and map the outcome to an exit status
/// (0 success, 2 usage, 3 I/O, 4 numerical failure).
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
