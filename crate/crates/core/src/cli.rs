//! Command-line front end: problem documents in, CSV or JSON out.
//!
//! A problem document is JSON:
//!
//! ```json
//! {
//!   "prior": [0.5, 0.5],
//!   "loss": [[0, 1], [1, 0]],
//!   "leakage": {"type": "sibson", "alpha": 0.5},
//!   "beta_grid": {"min": 0.05, "max": 5, "steps": 30, "scale": "log"},
//!   "epsilon": 1e-9,
//!   "max_iter": 100000,
//!   "seed": 7
//! }
//! ```
//!
//! `leakage.type` is one of `shannon`, `f`, `arimoto`, `sibson`, `csiszar`;
//! `f` takes `f_kind` (`kl`, `reverse_kl`, `squared_hellinger`,
//! `pearson_chi2`, `neyman_chi2`, `hellinger_order`, `alpha_divergence`)
//! and the last two as well as the Rényi-type measures take `alpha`. A
//! single `beta` may replace `beta_grid`. An optional `channel` (rows = x)
//! is the input of the `leakage` and `gain` subcommands. With a `seed` the
//! solver starts from a seeded random channel instead of the uniform one.
//!
//! Exit codes: 0 success, 1 input error, 2 some solve hit its iteration cap.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::curve::{
    average_gain, build_mechanism, trace_curve_results, verify_achievability, BetaGrid, CurveConfig,
    CurvePoint,
};
use crate::error::VoiError;
use crate::generator::FGenerator;
use crate::leakage::leakage;
use crate::oracle::{ChannelTable, GridSpec};
use crate::problem::{Channel, LeakageSpec, LossMatrix, Order, Prior, Problem};
use crate::solver::{SolverConfig, SolverResult};

const MERGE_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid problem: {0}")]
    Validation(#[from] VoiError),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        1
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct LeakageDoc {
    #[serde(rename = "type")]
    kind: String,
    f_kind: Option<String>,
    alpha: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProblemDoc {
    prior: Vec<f64>,
    loss: Vec<Vec<f64>>,
    leakage: LeakageDoc,
    beta: Option<f64>,
    beta_grid: Option<BetaGrid>,
    epsilon: Option<f64>,
    max_iter: Option<usize>,
    seed: Option<u64>,
    channel: Option<Vec<Vec<f64>>>,
}

/// A parsed problem document.
#[derive(Debug, Clone)]
pub struct ProblemFile {
    pub problem: Problem,
    /// Solver settings from the document; `beta` is filled per run.
    pub solver: SolverConfig,
    pub beta: Option<f64>,
    pub beta_grid: Option<BetaGrid>,
    pub seed: Option<u64>,
    pub channel: Option<Channel>,
}

fn parse_spec(doc: &LeakageDoc) -> Result<LeakageSpec, CliError> {
    let alpha = || {
        doc.alpha.ok_or_else(|| CliError::Parse(format!("leakage.alpha required for type \"{}\"", doc.kind)))
    };
    let order = |a: f64| Order::new(a).map_err(CliError::Validation);
    Ok(match doc.kind.as_str() {
        "shannon" => LeakageSpec::Shannon,
        "arimoto" => LeakageSpec::Arimoto(order(alpha()?)?),
        "sibson" => LeakageSpec::Sibson(order(alpha()?)?),
        "csiszar" => LeakageSpec::Csiszar(order(alpha()?)?),
        "f" => {
            let kind = doc
                .f_kind
                .as_deref()
                .ok_or_else(|| CliError::Parse("leakage.f_kind required for type \"f\"".into()))?;
            let g = match kind {
                "kl" => FGenerator::Kl,
                "reverse_kl" => FGenerator::ReverseKl,
                "squared_hellinger" => FGenerator::SquaredHellinger,
                "pearson_chi2" => FGenerator::PearsonChi2,
                "neyman_chi2" => FGenerator::NeymanChi2,
                "hellinger_order" => FGenerator::HellingerOrder(alpha()?),
                "alpha_divergence" => FGenerator::AlphaDivergence(alpha()?),
                other => return Err(CliError::Parse(format!("leakage.f_kind: unknown kind \"{other}\""))),
            };
            LeakageSpec::F(g.validated()?)
        }
        other => return Err(CliError::Parse(format!("leakage.type: unknown measure \"{other}\""))),
    })
}

/// Parses and validates a problem document.
pub fn parse_problem_str(text: &str) -> Result<ProblemFile, CliError> {
    let doc: ProblemDoc = serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
    let spec = parse_spec(&doc.leakage)?;
    let problem = Problem::new(Prior::new(doc.prior)?, LossMatrix::new(doc.loss)?, spec)?;
    let mut solver = SolverConfig::new(doc.beta.unwrap_or(0.0));
    if let Some(e) = doc.epsilon {
        solver.epsilon = e;
    }
    if let Some(m) = doc.max_iter {
        solver.max_iter = m;
    }
    if let Some(grid) = &doc.beta_grid {
        grid.betas()?;
    }
    let channel = doc.channel.map(Channel::from_rows).transpose()?;
    if let Some(ch) = &channel {
        if ch.n_inputs() != problem.n_inputs() {
            return Err(CliError::Validation(VoiError::DimensionMismatch(
                "channel rows do not match the prior".into(),
            )));
        }
    }
    Ok(ProblemFile { problem, solver, beta: doc.beta, beta_grid: doc.beta_grid, seed: doc.seed, channel })
}

pub fn parse_problem_file(path: &Path) -> Result<ProblemFile, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
    parse_problem_str(&text)
}

/// Row-stochastic channel with i.i.d. uniform weights, reproducible from
/// `seed`.
pub fn seeded_channel(seed: u64, n_inputs: usize, n_actions: usize) -> Channel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = (0..n_inputs * n_actions).map(|_| rng.gen_range(0.05..1.0)).collect();
    Channel::from_weights(n_inputs, n_actions, data)
}

/// SHA-256 of a canonical rendering of prior, loss and measure.
pub fn problem_hash(problem: &Problem) -> String {
    let canon = serde_json::json!({
        "prior": problem.prior.probs(),
        "loss": problem.loss.to_rows(),
        "leakage": problem.leakage.name(),
    });
    hex::encode(Sha256::digest(canon.to_string().as_bytes()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Problem document (JSON).
    #[arg(long)]
    pub problem: PathBuf,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Overrides the document's β.
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Overrides the document's seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Report leakage in bits instead of nats.
    #[arg(long)]
    pub bits: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve at one β, or along the document's β grid.
    Solve(CommonArgs),
    /// Trace the value-of-information curve over a β grid.
    Curve {
        #[command(flatten)]
        common: CommonArgs,
        /// Solve every β from scratch (in parallel) instead of warm-starting.
        #[arg(long)]
        no_warm_start: bool,
    },
    /// Compare solver points against exhaustive grid search.
    Oracle {
        #[command(flatten)]
        common: CommonArgs,
        /// Only report the grid value of U at this leakage budget (nats).
        #[arg(long)]
        rate: Option<f64>,
        #[arg(long, default_value_t = 0.002)]
        resolution: f64,
    },
    /// Evaluate the leakage of the document's channel.
    Leakage(CommonArgs),
    /// Evaluate the average gain of the document's channel.
    Gain(CommonArgs),
}

#[derive(Debug, Parser)]
#[command(name = "voi", version, about = "Value of information under leakage constraints")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Default sweep when a document names neither `beta` nor `beta_grid`.
pub const DEFAULT_GRID: BetaGrid =
    BetaGrid { min: 0.05, max: 5.0, steps: 30, scale: crate::curve::GridScale::Log };

struct Outcome {
    text: String,
    all_converged: bool,
}

fn fmt(v: f64) -> String {
    format!("{v:.11e}")
}

fn load(common: &CommonArgs) -> Result<ProblemFile, CliError> {
    let mut pf = parse_problem_file(&common.problem)?;
    if let Some(e) = common.epsilon {
        pf.solver.epsilon = e;
    }
    if common.beta.is_some() {
        pf.beta = common.beta;
    }
    if common.seed.is_some() {
        pf.seed = common.seed;
    }
    if let Some(seed) = pf.seed {
        pf.solver.p_init = Some(seeded_channel(seed, pf.problem.n_inputs(), pf.problem.n_actions()));
    }
    Ok(pf)
}

fn rate_scale(bits: bool) -> f64 {
    if bits {
        1.0 / std::f64::consts::LN_2
    } else {
        1.0
    }
}

#[derive(Serialize)]
struct MechanismSummary {
    map: Vec<Vec<f64>>,
    class_of: Vec<usize>,
    n_outputs: usize,
    achievability: Option<String>,
}

#[derive(Serialize)]
struct Solution {
    beta: f64,
    channel: Vec<Vec<f64>>,
    q: Vec<f64>,
    multipliers_rows: Vec<f64>,
    multiplier_q: f64,
    mechanism: MechanismSummary,
}

#[derive(Serialize)]
struct ConfigSummary {
    epsilon: f64,
    max_iter: usize,
    seed: Option<u64>,
    warm_start: bool,
}

/// Structured result of a `solve` or `curve` run.
#[derive(Serialize)]
struct RunRecord {
    problem_hash: String,
    spec: String,
    rate_unit: &'static str,
    config: ConfigSummary,
    points: Vec<CurvePoint>,
    solutions: Vec<Solution>,
    max_identity_gap: f64,
    wall_time_s: f64,
}

fn solution_of(pf: &ProblemFile, res: &SolverResult, converged: bool) -> Result<Solution, CliError> {
    let mech = build_mechanism(res, &pf.problem.prior, MERGE_TOL)?;
    let achievability =
        (converged && res.certified).then(|| match verify_achievability(&pf.problem, res, &mech) {
            Ok(rep) => format!("ok: gain {} leakage {}", rep.gain, rep.leakage),
            Err(e) => e.to_string(),
        });
    Ok(Solution {
        beta: res.beta,
        channel: res.channel.to_rows(),
        q: res.q.probs().to_vec(),
        multipliers_rows: res.multipliers.rows.clone(),
        multiplier_q: res.multipliers.q,
        mechanism: MechanismSummary {
            map: mech.map.to_rows(),
            class_of: mech.class_of.clone(),
            n_outputs: mech.n_outputs(),
            achievability,
        },
    })
}

fn identity_gap(p: &CurvePoint) -> f64 {
    (p.u + p.beta * p.r - p.f_final).abs()
}

fn run_points(
    pf: &ProblemFile,
    common: &CommonArgs,
    betas: &[f64],
    warm_start: bool,
) -> Result<Outcome, CliError> {
    let start = Instant::now();
    let cfg = CurveConfig { solver: pf.solver.clone(), warm_start, dedup_tol: 1e-9 };
    let solved = trace_curve_results(&pf.problem, betas, &cfg)?;
    let all_converged = solved.iter().all(|(p, _)| p.converged);
    let scale = rate_scale(common.bits);
    let text = match common.format {
        Format::Csv => {
            let mut s = format!(
                "beta,{},u,v,f_final,iterations,kkt_p,kkt_q,certified,identity_gap\n",
                if common.bits { "r_bits" } else { "r_nats" }
            );
            for (p, _) in &solved {
                s.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{},{}\n",
                    fmt(p.beta),
                    fmt(p.r * scale),
                    fmt(p.u),
                    fmt(p.v),
                    fmt(p.f_final),
                    p.iterations,
                    fmt(p.kkt_p),
                    fmt(p.kkt_q),
                    p.certified,
                    fmt(identity_gap(p)),
                ));
            }
            s
        }
        Format::Json => {
            let solutions =
                solved.iter().map(|(p, r)| solution_of(pf, r, p.converged)).collect::<Result<Vec<_>, _>>()?;
            let max_identity_gap = solved.iter().map(|(p, _)| identity_gap(p)).fold(0.0, f64::max);
            let points = solved.iter().map(|(p, _)| CurvePoint { r: p.r * scale, ..p.clone() }).collect();
            let record = RunRecord {
                problem_hash: problem_hash(&pf.problem),
                spec: pf.problem.leakage.name(),
                rate_unit: if common.bits { "bits" } else { "nats" },
                config: ConfigSummary {
                    epsilon: pf.solver.epsilon,
                    max_iter: pf.solver.max_iter,
                    seed: pf.seed,
                    warm_start,
                },
                points,
                solutions,
                max_identity_gap,
                wall_time_s: start.elapsed().as_secs_f64(),
            };
            serde_json::to_string_pretty(&record).expect("record serializes") + "\n"
        }
    };
    Ok(Outcome { text, all_converged })
}

fn betas_of(pf: &ProblemFile, prefer_grid: bool) -> Result<Vec<f64>, CliError> {
    match (pf.beta, pf.beta_grid) {
        (Some(b), None) => Ok(vec![b]),
        (Some(b), Some(_)) if !prefer_grid => Ok(vec![b]),
        (_, Some(g)) => Ok(g.betas()?),
        (None, None) if prefer_grid => Ok(DEFAULT_GRID.betas()?),
        (None, None) => {
            Err(CliError::Usage("no beta given: pass --beta or add beta/beta_grid to the problem".into()))
        }
    }
}

fn run_oracle(
    pf: &ProblemFile,
    common: &CommonArgs,
    rate: Option<f64>,
    resolution: f64,
) -> Result<Outcome, CliError> {
    let grid = GridSpec::new(resolution)?;
    let table = ChannelTable::build(&pf.problem, &grid)?;
    let scale = rate_scale(common.bits);
    let unit = if common.bits { "bits" } else { "nats" };
    if let Some(r) = rate {
        let u = table.min_loss(r)?;
        let text = match common.format {
            Format::Csv => format!("r_{unit},u_oracle\n{},{}\n", fmt(r * scale), fmt(u)),
            Format::Json => serde_json::json!({ "rate": r * scale, "rate_unit": unit, "u_oracle": u, "resolution": resolution })
                .to_string() + "\n",
        };
        return Ok(Outcome { text, all_converged: true });
    }
    let betas = betas_of(pf, false)?;
    let cfg = CurveConfig { solver: pf.solver.clone(), warm_start: true, dedup_tol: 0.0 };
    let solved = trace_curve_results(&pf.problem, &betas, &cfg)?;
    let mut rows = Vec::new();
    for (p, _) in &solved {
        let u_oracle = table.min_loss(p.r)?;
        rows.push((p.clone(), u_oracle, (p.u - u_oracle).abs()));
    }
    let text = match common.format {
        Format::Csv => {
            let mut s = format!("beta,r_{unit},u_solver,u_oracle,gap\n");
            for (p, uo, gap) in &rows {
                s.push_str(&format!(
                    "{},{},{},{},{}\n",
                    fmt(p.beta),
                    fmt(p.r * scale),
                    fmt(p.u),
                    fmt(*uo),
                    fmt(*gap)
                ));
            }
            s
        }
        Format::Json => {
            let items: Vec<_> = rows
                .iter()
                .map(|(p, uo, gap)| serde_json::json!({"beta": p.beta, "r": p.r * scale, "u_solver": p.u, "u_oracle": uo, "gap": gap}))
                .collect();
            serde_json::json!({"rate_unit": unit, "resolution": resolution, "rows": items}).to_string() + "\n"
        }
    };
    Ok(Outcome { text, all_converged: solved.iter().all(|(p, _)| p.converged) })
}

fn require_channel(pf: &ProblemFile) -> Result<&Channel, CliError> {
    pf.channel.as_ref().ok_or_else(|| CliError::Usage("the problem document has no \"channel\" field".into()))
}

fn run_leakage(pf: &ProblemFile, common: &CommonArgs) -> Result<Outcome, CliError> {
    let ch = require_channel(pf)?;
    let l = leakage(&pf.problem.leakage, &pf.problem.prior, ch)? * rate_scale(common.bits);
    let unit = if common.bits { "bits" } else { "nats" };
    let text = match common.format {
        Format::Csv => format!("measure,leakage_{unit}\n{},{}\n", pf.problem.leakage.name(), fmt(l)),
        Format::Json => {
            serde_json::json!({"measure": pf.problem.leakage.name(), "leakage": l, "unit": unit}).to_string()
                + "\n"
        }
    };
    Ok(Outcome { text, all_converged: true })
}

fn run_gain(pf: &ProblemFile, common: &CommonArgs) -> Result<Outcome, CliError> {
    let ch = require_channel(pf)?;
    if ch.n_inputs() != pf.problem.n_inputs() {
        return Err(CliError::Usage("channel and loss disagree on |X|".into()));
    }
    let (gain, rule) = average_gain(&pf.problem.prior, ch, &pf.problem.loss)?;
    let text = match common.format {
        Format::Csv => {
            let choice: Vec<String> = rule.choice.iter().map(usize::to_string).collect();
            format!("gain,decision_rule\n{},{}\n", fmt(gain), choice.join(" "))
        }
        Format::Json => serde_json::json!({"gain": gain, "decision_rule": rule.choice}).to_string() + "\n",
    };
    Ok(Outcome { text, all_converged: true })
}

fn dispatch(cli: &Cli) -> Result<(Outcome, &CommonArgs), CliError> {
    match &cli.command {
        Command::Solve(c) => {
            let pf = load(c)?;
            let betas = betas_of(&pf, false)?;
            Ok((run_points(&pf, c, &betas, true)?, c))
        }
        Command::Curve { common, no_warm_start } => {
            let pf = load(common)?;
            let betas = betas_of(&pf, true)?;
            Ok((run_points(&pf, common, &betas, !no_warm_start)?, common))
        }
        Command::Oracle { common, rate, resolution } => {
            let pf = load(common)?;
            Ok((run_oracle(&pf, common, *rate, *resolution)?, common))
        }
        Command::Leakage(c) => Ok((run_leakage(&load(c)?, c)?, c)),
        Command::Gain(c) => Ok((run_gain(&load(c)?, c)?, c)),
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => {
            std::fs::write(path, text).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
        }
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Io { path: "<stdout>".into(), source }),
    }
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = dispatch(&cli).and_then(|(outcome, common)| {
        emit(&outcome.text, common.out.as_deref())?;
        Ok(outcome.all_converged)
    });
    match result {
        Ok(true) => 0,
        Ok(false) => {
            eprintln!("voi: at least one solve stopped at the iteration cap without converging");
            2
        }
        Err(e) => {
            eprintln!("voi: {e}");
            e.exit_code()
        }
    }
}
