//! Turns configurations into finished runs: builds the strategies, drives
//! the engine, writes the CSV/JSON artifacts, and (on request) measures
//! each run against its applicable theoretical bound.

use std::env;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::blackwell::{BlackwellError, DeltaRow};
use crate::config::{AliceSpec, BobSpec, BobTie, ConfigError, MyopicTie, RunConfig, SweepConfig};
use crate::engine::{
    bob_regret, run_game, stackelberg_regret, AliceStrategy, BobStrategy, Choice, EngineError,
    GameMode, History,
};
use crate::spiral::{self, SpiralSeries};
use crate::strategies::alice::{
    BinarySearchAlice, BlackwellAlice, ExploreCommitAlice, FictitiousAlice, FixedCutAlice,
};
use crate::strategies::bob::{
    BobTieBreak, DeceptiveBob, FakeMidpointBob, FictitiousBob, FixedChoiceBob,
    IntervalAlternatingBob, MyopicBob, MyopicTieBreak, RandomBob, ThresholdSwitchBob,
};
use crate::valuation::Valuation;

/// Default output directory when the config does not name one.
pub const OUTPUT_DIR_ENV: &str = "CAKE_GAME_OUTPUT_DIR";

#[derive(Debug, Error)]
pub enum RunnerError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Blackwell(#[from] BlackwellError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("bad trajectory: {0}")]
    BadTrajectory(String),
    #[error("bad input: {0}")]
    BadInput(String),
}

impl RunnerError {
    /// CLI exit code: 2 for anything the user can fix in their inputs,
    /// 1 for internal failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunnerError::Config(_) | RunnerError::BadTrajectory(_) | RunnerError::BadInput(_) => 2,
            RunnerError::Engine(EngineError::NoRounds)
            | RunnerError::Engine(EngineError::ModeMismatch { .. }) => 2,
            _ => 1,
        }
    }
}

/// Stable seed combiner for sweep cells (splitmix64 steps folded over the
/// parts), so every (T, instance, seed-index) cell gets an independent,
/// reproducible stream.
pub fn mix_seed(parts: &[u64]) -> u64 {
    fn splitmix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    let mut acc = 0u64;
    for &p in parts {
        acc = splitmix(acc ^ p);
    }
    acc
}

/// A constructed Alice. The balancing strategy stays concrete so its
/// per-round diagnostics remain reachable after the run.
pub enum BuiltAlice {
    Boxed(Box<dyn AliceStrategy>),
    Balancing(BlackwellAlice),
}

impl AliceStrategy for BuiltAlice {
    fn begin(&mut self, seed: u64) {
        match self {
            BuiltAlice::Boxed(a) => a.begin(seed),
            BuiltAlice::Balancing(a) => a.begin(seed),
        }
    }

    fn cut(&mut self, past: &History) -> f64 {
        match self {
            BuiltAlice::Boxed(a) => a.cut(past),
            BuiltAlice::Balancing(a) => a.cut(past),
        }
    }

    fn observe(&mut self, cut: f64, choice: Choice) {
        match self {
            BuiltAlice::Boxed(a) => a.observe(cut, choice),
            BuiltAlice::Balancing(a) => a.observe(cut, choice),
        }
    }
}

/// Side information about a built Alice that outlives the type erasure.
pub struct AliceMeta {
    /// The explore-commit schedule value `f(T)`, for normalizing regret.
    pub explore_f: Option<f64>,
}

pub fn build_alice(
    spec: &AliceSpec,
    v_alice: &Valuation,
    t_rounds: usize,
    record_delta: bool,
) -> Result<(BuiltAlice, AliceMeta), RunnerError> {
    let mut meta = AliceMeta { explore_f: None };
    let alice = match spec {
        AliceSpec::BinarySearch => {
            BuiltAlice::Boxed(Box::new(BinarySearchAlice::new(v_alice.clone(), t_rounds)))
        }
        AliceSpec::ExploreCommit { alpha } => {
            let a = match alpha {
                Some(al) => ExploreCommitAlice::known_alpha(v_alice.clone(), t_rounds, *al),
                None => ExploreCommitAlice::unknown_alpha(v_alice.clone(), t_rounds),
            };
            meta.explore_f = Some(a.f_of_t());
            BuiltAlice::Boxed(Box::new(a))
        }
        AliceSpec::Blackwell { n_max, eps_root } => {
            let mut a = BlackwellAlice::new(v_alice.clone(), *n_max, *eps_root)?;
            if record_delta {
                a = a.with_diagnostics();
            }
            BuiltAlice::Balancing(a)
        }
        AliceSpec::Fictitious { tie_break } => {
            BuiltAlice::Boxed(Box::new(FictitiousAlice::new(v_alice.clone(), *tie_break)))
        }
        AliceSpec::Fixed { x } => BuiltAlice::Boxed(Box::new(FixedCutAlice::new(*x))),
    };
    Ok((alice, meta))
}

pub fn build_bob(
    spec: &BobSpec,
    v_alice: &Valuation,
    v_bob: &Valuation,
    t_rounds: usize,
) -> Box<dyn BobStrategy> {
    match spec {
        BobSpec::Myopic { tie_break } => {
            let tie = match tie_break {
                MyopicTie::L => MyopicTieBreak::Fixed(Choice::L),
                MyopicTie::R => MyopicTieBreak::Fixed(Choice::R),
                MyopicTie::TowardAlice => MyopicTieBreak::TowardAlice(v_alice.clone()),
                MyopicTie::SeededRandom => MyopicTieBreak::SeededRandom,
            };
            Box::new(MyopicBob::new(v_bob.clone(), tie))
        }
        BobSpec::Deceptive { alpha } => Box::new(DeceptiveBob::new(v_bob, *alpha, t_rounds)),
        BobSpec::ThresholdSwitch { r, beta } => {
            Box::new(ThresholdSwitchBob::new(v_alice, *r, *beta, t_rounds))
        }
        BobSpec::IntervalAlternating => Box::new(IntervalAlternatingBob::new(v_bob, t_rounds)),
        BobSpec::Random => Box::new(RandomBob::new()),
        BobSpec::Fictitious { tie_break } => {
            let tie = match tie_break {
                BobTie::L => BobTieBreak::Fixed(Choice::L),
                BobTie::R => BobTieBreak::Fixed(Choice::R),
                BobTie::SeededRandom => BobTieBreak::SeededRandom,
            };
            Box::new(FictitiousBob::new(v_bob.clone(), tie))
        }
        BobSpec::RemarkUnboundedFaker { alpha } => Box::new(FakeMidpointBob::new(*alpha, t_rounds)),
        BobSpec::Fixed { choice } => Box::new(FixedChoiceBob::new(*choice)),
    }
}

/// Everything a single run produces before any file is written.
pub struct CompletedRun {
    pub history: History,
    pub meta: AliceMeta,
    pub delta_rows: Option<Vec<DeltaRow>>,
}

/// Runs one configured game in memory.
pub fn run_once(cfg: &RunConfig) -> Result<CompletedRun, RunnerError> {
    cfg.validate()?;
    let (mut alice, meta) = build_alice(
        &cfg.alice,
        &cfg.v_alice,
        cfg.t_rounds,
        cfg.diagnostics.blackwell_delta,
    )?;
    let mut bob = build_bob(&cfg.bob, &cfg.v_alice, &cfg.v_bob, cfg.t_rounds);
    let history = run_game(
        &mut alice,
        bob.as_mut(),
        &cfg.v_alice,
        &cfg.v_bob,
        cfg.t_rounds,
        cfg.mode,
        cfg.seed,
    )?;
    let delta_rows = match alice {
        BuiltAlice::Balancing(a) if cfg.diagnostics.blackwell_delta => {
            Some(a.diagnostic_rows().to_vec())
        }
        _ => None,
    };
    Ok(CompletedRun {
        history,
        meta,
        delta_rows,
    })
}

fn fmt(x: f64) -> String {
    format!("{x:.11e}")
}

fn resolve_output_dir(dir: &Option<PathBuf>) -> PathBuf {
    if let Some(d) = dir {
        return d.clone();
    }
    env::var_os(OUTPUT_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."))
}

fn write_trajectory(path: &Path, h: &History) -> Result<(), RunnerError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["t", "a_t", "b_t", "u_A_t", "u_B_t", "cum_u_A", "cum_u_B"])?;
    let (mut cum_a, mut cum_b) = (0.0f64, 0.0f64);
    for t in 0..h.len() {
        cum_a += h.alice_payoffs[t];
        cum_b += h.bob_payoffs[t];
        w.write_record([
            (t + 1).to_string(),
            fmt(h.cuts[t]),
            h.choices[t].to_string(),
            fmt(h.alice_payoffs[t]),
            fmt(h.bob_payoffs[t]),
            fmt(cum_a),
            fmt(cum_b),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn write_spiral(path: &Path, s: &SpiralSeries) -> Result<(), RunnerError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["t", "alpha", "beta", "rho", "is_axis_crossing"])?;
    for t in 0..s.len() {
        w.write_record([
            t.to_string(),
            s.alpha[t].to_string(),
            fmt(s.beta[t]),
            fmt(s.rho[t]),
            s.is_axis_crossing(t).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn write_delta(path: &Path, rows: &[DeltaRow]) -> Result<(), RunnerError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["t", "delta_t", "cut_t", "max_coordinate_id", "max_Ubar"])?;
    for r in rows {
        w.write_record([
            r.t.to_string(),
            fmt(r.delta_t),
            fmt(r.cut_t),
            r.max_coordinate_id.clone(),
            fmt(r.max_ubar),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct RunSummary {
    pub mode: GameMode,
    #[serde(rename = "T")]
    pub t_rounds: usize,
    pub seed: u64,
    pub total_u_alice: f64,
    pub total_u_bob: f64,
    pub avg_u_alice: f64,
    pub avg_u_bob: f64,
    pub stackelberg_regret: f64,
    pub bob_regret: f64,
    pub trajectory_csv: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spiral_csv: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_csv: Option<String>,
}

pub struct RunArtifacts {
    pub history: History,
    pub summary: RunSummary,
    pub summary_path: PathBuf,
}

/// Runs one game and writes the trajectory CSV, optional diagnostics, and
/// the summary JSON into the resolved output directory.
pub fn execute_run(cfg: &RunConfig) -> Result<RunArtifacts, RunnerError> {
    let done = run_once(cfg)?;
    let h = &done.history;
    let dir = resolve_output_dir(&cfg.output.dir);
    fs::create_dir_all(&dir)?;

    let name = |given: &Option<String>, fallback: &str| -> String {
        given.clone().unwrap_or_else(|| fallback.to_string())
    };
    let trajectory_name = name(&cfg.output.trajectory, "trajectory.csv");
    write_trajectory(&dir.join(&trajectory_name), h)?;

    let spiral_name = if cfg.diagnostics.spiral {
        let s = spiral::compute_series(h, &cfg.v_bob);
        let file = name(&cfg.output.spiral, "spiral.csv");
        write_spiral(&dir.join(&file), &s)?;
        Some(file)
    } else {
        None
    };

    let delta_name = match &done.delta_rows {
        Some(rows) => {
            let file = name(&cfg.output.delta, "delta.csv");
            write_delta(&dir.join(&file), rows)?;
            Some(file)
        }
        None => None,
    };

    let t = h.len() as f64;
    let summary = RunSummary {
        mode: cfg.mode,
        t_rounds: h.len(),
        seed: cfg.seed,
        total_u_alice: h.total_alice(),
        total_u_bob: h.total_bob(),
        avg_u_alice: h.total_alice() / t,
        avg_u_bob: h.total_bob() / t,
        stackelberg_regret: stackelberg_regret(h, &cfg.v_alice, &cfg.v_bob),
        bob_regret: bob_regret(h, &cfg.v_bob),
        trajectory_csv: trajectory_name,
        spiral_csv: spiral_name,
        delta_csv: delta_name,
    };
    let summary_path = dir.join(name(&cfg.output.summary, "summary.json"));
    fs::write(&summary_path, serde_json::to_string_pretty(&summary)?)?;
    Ok(RunArtifacts {
        history: done.history,
        summary,
        summary_path,
    })
}

/// One sweep cell's results, in grid order.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub t_rounds: usize,
    pub instance: usize,
    pub seed_index: usize,
    pub seed: u64,
    pub total_u_alice: f64,
    pub total_u_bob: f64,
    pub stackelberg_regret: f64,
    pub bob_regret: f64,
    /// Stackelberg regret over `ln T`: flat for the halving searcher.
    pub regret_per_log_t: f64,
    /// Stackelberg regret over `sqrt(f(T) T) ln T`: flat for explore-commit.
    pub regret_per_explore_budget: Option<f64>,
    /// `|u_A/T - 1/2| sqrt(T)`.
    pub alice_gap_sqrt_t: f64,
    /// `|u_B/T - 1/2| sqrt(T)`.
    pub bob_gap_sqrt_t: f64,
    /// Largest `delta_t * t` over `t >= 2`, when delta diagnostics ran.
    pub max_delta_times_t: Option<f64>,
}

pub struct SweepOutcome {
    pub rows: Vec<SweepRow>,
    pub csv_path: Option<PathBuf>,
    /// Bound violations, empty unless `check_bounds` was set and a run
    /// beat its guarantee.
    pub violations: Vec<String>,
}

/// Theoretical ceilings/floors applicable to a run, by strategy kind.
/// Returns human-readable violation messages. These flag runs whose
/// nominal guarantee failed to hold, which a correct strategy can only
/// do when the guarantee's own preconditions were broken (for example a
/// lying Bob against the halving searcher).
fn bound_violations(cfg: &RunConfig, row: &SweepRow, explore_f: Option<f64>) -> Vec<String> {
    let mut out = Vec::new();
    let t = row.t_rounds as f64;
    let label = format!(
        "T={} instance={} seed_index={}",
        row.t_rounds, row.instance, row.seed_index
    );
    match &cfg.alice {
        AliceSpec::BinarySearch => {
            let tau = t.ln().ceil();
            let bound =
                tau + (t - tau) * (2f64.powf(1.0 - tau) + cfg.v_alice.density_upper_bound() / t);
            if row.stackelberg_regret > bound {
                out.push(format!(
                    "{label}: binary-search regret {:.6} > {:.6}",
                    row.stackelberg_regret, bound
                ));
            }
        }
        AliceSpec::ExploreCommit { .. } => {
            // The guarantee only binds while Bob's own regret stays within
            // the exploration budget f(T).
            let within_budget = explore_f.is_some_and(|f| row.bob_regret <= f);
            if let (true, Some(norm)) = (within_budget, row.regret_per_explore_budget) {
                let cap = 5.0 / std::f64::consts::LN_2 + 6.0;
                if norm > cap {
                    out.push(format!(
                        "{label}: explore-commit normalized regret {norm:.6} > {cap:.6}"
                    ));
                }
            }
        }
        AliceSpec::Blackwell { .. } => {
            if row.t_rounds >= 3 {
                let alice_floor = 0.5 - 4.0 / (t - 1.0).sqrt();
                let bob_cap =
                    0.5 + (5.0 * cfg.v_bob.density_upper_bound() + 11.0) / (2.0 * t / 5.0).ln();
                if row.total_u_alice / t < alice_floor {
                    out.push(format!(
                        "{label}: balancing Alice average {:.6} < {:.6}",
                        row.total_u_alice / t,
                        alice_floor
                    ));
                }
                if row.total_u_bob / t > bob_cap {
                    out.push(format!(
                        "{label}: Bob average {:.6} > {:.6} against balancing Alice",
                        row.total_u_bob / t,
                        bob_cap
                    ));
                }
            }
        }
        AliceSpec::Fictitious { .. } | AliceSpec::Fixed { .. } => {}
    }
    match &cfg.bob {
        BobSpec::IntervalAlternating => {
            if let Some(delta) = cfg.v_bob.density_lower_bound() {
                let bob_floor = 0.5 - 1.0 / t.sqrt();
                let alice_cap =
                    0.5 + (cfg.v_bob.density_upper_bound() / (2.0 * delta) + 2.0) / t.sqrt();
                if row.total_u_bob / t < bob_floor {
                    out.push(format!(
                        "{label}: interval Bob average {:.6} < {:.6}",
                        row.total_u_bob / t,
                        bob_floor
                    ));
                }
                if row.total_u_alice / t > alice_cap {
                    out.push(format!(
                        "{label}: Alice average {:.6} > {:.6} against interval Bob",
                        row.total_u_alice / t,
                        alice_cap
                    ));
                }
            }
        }
        BobSpec::Fictitious { .. }
            if matches!(cfg.alice, AliceSpec::Fictitious { .. }) && row.t_rounds >= 5 =>
        {
            let sqrt10 = 10.0f64.sqrt();
            if row.alice_gap_sqrt_t > 2.0 * sqrt10 {
                out.push(format!(
                    "{label}: Alice gap {:.6} > {:.6}",
                    row.alice_gap_sqrt_t,
                    2.0 * sqrt10
                ));
            }
            if row.bob_gap_sqrt_t > sqrt10 {
                out.push(format!(
                    "{label}: Bob gap {:.6} > {:.6}",
                    row.bob_gap_sqrt_t, sqrt10
                ));
            }
        }
        _ => {}
    }
    out
}

/// Runs the whole grid in parallel, in a deterministic order, and writes
/// the aggregate CSV when configured.
pub fn execute_sweep(cfg: &SweepConfig) -> Result<SweepOutcome, RunnerError> {
    cfg.validate()?;

    // Instance valuations are sampled up front so every T and seed sees
    // the same instances (the sampler stream depends only on the base
    // seed and the instance index).
    let pairs: Vec<(Valuation, Valuation)> = match &cfg.instances {
        Some(spec) => {
            use rand_chacha::rand_core::SeedableRng;
            let sampler = spec.sampler();
            (0..spec.count)
                .map(|i| {
                    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(mix_seed(&[
                        cfg.base.seed,
                        0x1157,
                        i as u64,
                    ]));
                    let v_a = if spec.randomize_v_alice {
                        sampler.sample(&mut rng)
                    } else {
                        cfg.base.v_alice.clone()
                    };
                    let v_b = if spec.randomize_v_bob {
                        sampler.sample(&mut rng)
                    } else {
                        cfg.base.v_bob.clone()
                    };
                    (v_a, v_b)
                })
                .collect()
        }
        None => vec![(cfg.base.v_alice.clone(), cfg.base.v_bob.clone())],
    };

    let mut cells = Vec::new();
    for &t in &cfg.t_values {
        for instance in 0..pairs.len() {
            for seed_index in 0..cfg.seed_count {
                cells.push((t, instance, seed_index));
            }
        }
    }

    let results: Result<Vec<(SweepRow, Vec<String>)>, RunnerError> = cells
        .par_iter()
        .map(|&(t_rounds, instance, seed_index)| {
            let mut run_cfg = cfg.base.clone();
            run_cfg.t_rounds = t_rounds;
            run_cfg.seed = mix_seed(&[
                cfg.base.seed,
                t_rounds as u64,
                instance as u64,
                seed_index as u64,
            ]);
            run_cfg.v_alice = pairs[instance].0.clone();
            run_cfg.v_bob = pairs[instance].1.clone();
            run_cfg.output = Default::default();

            let done = run_once(&run_cfg)?;
            let h = &done.history;
            let t = t_rounds as f64;
            let regret = stackelberg_regret(h, &run_cfg.v_alice, &run_cfg.v_bob);
            let row = SweepRow {
                t_rounds,
                instance,
                seed_index,
                seed: run_cfg.seed,
                total_u_alice: h.total_alice(),
                total_u_bob: h.total_bob(),
                stackelberg_regret: regret,
                bob_regret: bob_regret(h, &run_cfg.v_bob),
                regret_per_log_t: regret / t.ln().max(1.0),
                regret_per_explore_budget: done
                    .meta
                    .explore_f
                    .map(|f| regret / ((f * t).sqrt() * t.ln())),
                alice_gap_sqrt_t: (h.total_alice() / t - 0.5).abs() * t.sqrt(),
                bob_gap_sqrt_t: (h.total_bob() / t - 0.5).abs() * t.sqrt(),
                max_delta_times_t: done.delta_rows.as_ref().map(|rows| {
                    rows.iter()
                        .filter(|r| r.t >= 2)
                        .map(|r| r.delta_t * r.t as f64)
                        .fold(0.0, f64::max)
                }),
            };
            let violations = if cfg.check_bounds {
                bound_violations(&run_cfg, &row, done.meta.explore_f)
            } else {
                Vec::new()
            };
            Ok((row, violations))
        })
        .collect();
    let results = results?;

    let mut rows = Vec::with_capacity(results.len());
    let mut violations = Vec::new();
    for (row, v) in results {
        rows.push(row);
        violations.extend(v);
    }

    let csv_path = match &cfg.output {
        Some(file) => {
            let dir = resolve_output_dir(&cfg.base.output.dir);
            fs::create_dir_all(&dir)?;
            let path = dir.join(file);
            write_sweep_csv(&path, &rows)?;
            Some(path)
        }
        None => None,
    };

    Ok(SweepOutcome {
        rows,
        csv_path,
        violations,
    })
}

fn write_sweep_csv(path: &Path, rows: &[SweepRow]) -> Result<(), RunnerError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "T",
        "instance",
        "seed_index",
        "seed",
        "total_u_A",
        "total_u_B",
        "stackelberg_regret",
        "bob_regret",
        "regret_per_log_T",
        "regret_per_explore_budget",
        "alice_gap_sqrt_T",
        "bob_gap_sqrt_T",
        "max_delta_times_t",
    ])?;
    for r in rows {
        w.write_record([
            r.t_rounds.to_string(),
            r.instance.to_string(),
            r.seed_index.to_string(),
            r.seed.to_string(),
            fmt(r.total_u_alice),
            fmt(r.total_u_bob),
            fmt(r.stackelberg_regret),
            fmt(r.bob_regret),
            fmt(r.regret_per_log_t),
            r.regret_per_explore_budget.map(fmt).unwrap_or_default(),
            fmt(r.alice_gap_sqrt_t),
            fmt(r.bob_gap_sqrt_t),
            r.max_delta_times_t.map(fmt).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct CheckLine {
    pub name: String,
    pub fp_only: bool,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct PayoffLine {
    pub applicable: bool,
    pub bob_payoff_drift: f64,
    pub welfare_drift: f64,
    pub alice_avg_gap: f64,
    pub bob_avg_gap: f64,
    pub middle_cut_count: usize,
    pub middle_cut_limit: f64,
    pub terminal_radius_ratio: f64,
    pub exceedances: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct SpiralSummary {
    pub rho_final: f64,
    pub axis_crossings: usize,
    pub checks: Vec<CheckLine>,
    pub payoff_bounds: PayoffLine,
}

#[derive(Debug, Serialize)]
pub struct AnalyzeReport {
    #[serde(rename = "T")]
    pub t_rounds: usize,
    pub total_u_alice: f64,
    pub total_u_bob: f64,
    pub avg_u_alice: f64,
    pub avg_u_bob: f64,
    pub bob_regret: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stackelberg_regret: Option<f64>,
    pub spiral: SpiralSummary,
}

/// Reads a trajectory CSV back into a history. Columns are located by
/// name, so extra columns (the cumulative sums) are tolerated.
pub fn read_trajectory(path: &Path) -> Result<History, RunnerError> {
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| RunnerError::BadInput(format!("{}: {e}", path.display())))?;
    let headers = reader
        .headers()
        .map_err(|e| RunnerError::BadTrajectory(e.to_string()))?
        .clone();
    let col = |name: &str| -> Result<usize, RunnerError> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| RunnerError::BadTrajectory(format!("missing column {name}")))
    };
    let (ca, cb, cua, cub) = (col("a_t")?, col("b_t")?, col("u_A_t")?, col("u_B_t")?);
    let mut h = History::default();
    for (i, record) in reader.records().enumerate() {
        let record =
            record.map_err(|e| RunnerError::BadTrajectory(format!("row {}: {e}", i + 1)))?;
        let field = |c: usize| -> Result<&str, RunnerError> {
            record
                .get(c)
                .ok_or_else(|| RunnerError::BadTrajectory(format!("row {}: short record", i + 1)))
        };
        let parse = |c: usize| -> Result<f64, RunnerError> {
            let s = field(c)?;
            s.parse::<f64>()
                .map_err(|_| RunnerError::BadTrajectory(format!("row {}: bad float {s:?}", i + 1)))
        };
        let cut = parse(ca)?;
        if !(cut.is_finite() && (0.0..=1.0).contains(&cut)) {
            return Err(RunnerError::BadTrajectory(format!(
                "row {}: cut {cut} outside [0, 1]",
                i + 1
            )));
        }
        let choice = match field(cb)? {
            "L" => Choice::L,
            "R" => Choice::R,
            other => {
                return Err(RunnerError::BadTrajectory(format!(
                    "row {}: choice {other:?} is neither L nor R",
                    i + 1
                )))
            }
        };
        h.cuts.push(cut);
        h.choices.push(choice);
        h.alice_payoffs.push(parse(cua)?);
        h.bob_payoffs.push(parse(cub)?);
    }
    if h.is_empty() {
        return Err(RunnerError::BadTrajectory("no rounds".to_string()));
    }
    Ok(h)
}

/// Recomputes regrets and the full spiral diagnostics from a stored
/// trajectory, to the precision the CSV retained.
pub fn analyze_trajectory(
    trajectory: &Path,
    v_bob: &Valuation,
    v_alice: Option<&Valuation>,
) -> Result<AnalyzeReport, RunnerError> {
    let h = read_trajectory(trajectory)?;
    let s = spiral::compute_series(&h, v_bob);
    let report = spiral::check_spiral_invariants(&s, &h);
    let bounds = spiral::payoff_bounds_report(&h, &s);
    let t = h.len() as f64;
    Ok(AnalyzeReport {
        t_rounds: h.len(),
        total_u_alice: h.total_alice(),
        total_u_bob: h.total_bob(),
        avg_u_alice: h.total_alice() / t,
        avg_u_bob: h.total_bob() / t,
        bob_regret: bob_regret(&h, v_bob),
        stackelberg_regret: v_alice.map(|va| stackelberg_regret(&h, va, v_bob)),
        spiral: SpiralSummary {
            rho_final: s.rho[h.len()],
            axis_crossings: s.axis_crossings.len(),
            checks: report
                .checks
                .into_iter()
                .map(|c| CheckLine {
                    name: c.name.to_string(),
                    fp_only: c.fp_only,
                    passed: c.passed,
                    detail: c.detail,
                })
                .collect(),
            payoff_bounds: PayoffLine {
                applicable: bounds.applicable,
                bob_payoff_drift: bounds.bob_payoff_drift,
                welfare_drift: bounds.welfare_drift,
                alice_avg_gap: bounds.alice_avg_gap,
                bob_avg_gap: bounds.bob_avg_gap,
                middle_cut_count: bounds.middle_cut_count,
                middle_cut_limit: bounds.middle_cut_limit,
                terminal_radius_ratio: bounds.terminal_radius_ratio,
                exceedances: bounds.exceedances.iter().map(|s| s.to_string()).collect(),
            },
        },
    })
}
