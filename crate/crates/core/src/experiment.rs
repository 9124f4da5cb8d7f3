//! End-to-end drivers behind the command line: simulate a stream, run one
//! learner on it, or benchmark several predictors over many seeds.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;

use crate::config::{ExperimentConfig, PredictorSpec};
use crate::error::{Error, Result};
use crate::graph::{DistanceVector, GraphVector};
use crate::io;
use crate::learner::{aggregate_sequence, run, Evaluation, RunTrace, StepRule};
use crate::metrics::{regret_bound, rounds_to_recover, total_variation};
use crate::objective::{gradient_bound, step_size_fixed, ObjectiveParams};
use crate::predictor::Predictor;
use crate::sim::{generate_stream, GraphModel};
use crate::solver::comparator_sequence;

pub const SIGNALS_FILE: &str = "signals.csv";
pub const GRAPHS_DIR: &str = "graphs";
pub const AR_MATRIX_FILE: &str = "ar_matrix.csv";
pub const TRANSITION_TARGET_FILE: &str = "transition_target.csv";

/// Environment variable holding the benchmark worker count.
pub const WORKERS_ENV: &str = "OGLP_WORKERS";

pub fn snapshot_name(t: usize) -> String {
    format!("t_{t:06}.csv")
}

/// Observations a learner consumes, plus whatever ground truth is known.
#[derive(Debug, Clone)]
pub struct StreamData {
    pub signals: Vec<Vec<f64>>,
    pub distances: Vec<DistanceVector>,
    pub truth: Option<Vec<GraphVector>>,
    /// The generating model as a predictor, when it has an explicit form.
    pub true_prior: Option<Predictor>,
    pub switch_times: Vec<usize>,
}

impl StreamData {
    pub fn simulate(cfg: &ExperimentConfig, seed: u64) -> Result<Self> {
        let stream = generate_stream(&cfg.trajectory(seed), &cfg.signal)?;
        Ok(Self {
            true_prior: stream.dynamics.true_predictor(),
            switch_times: cfg.graph.model.switch_times(cfg.rounds),
            signals: stream.signals,
            distances: stream.distances,
            truth: Some(stream.truth),
        })
    }

    /// Loads a stream written by [`simulate`]. Ground truth is used only
    /// when a snapshot exists for every round.
    pub fn replay(cfg: &ExperimentConfig, dir: &Path) -> Result<Self> {
        let signals = io::parse_signals(&io::read_to_string(&dir.join(SIGNALS_FILE))?)?;
        if signals.len() != cfg.rounds {
            return Err(Error::Config(format!(
                "replay has {} rounds, config expects {}",
                signals.len(),
                cfg.rounds
            )));
        }
        if signals[0].len() != cfg.graph.nodes {
            return Err(Error::Config(format!(
                "replay has {} nodes, config expects {}",
                signals[0].len(),
                cfg.graph.nodes
            )));
        }
        let distances = signals
            .iter()
            .map(|x| DistanceVector::from_signal(x))
            .collect::<Result<Vec<_>>>()?;
        let graphs = dir.join(GRAPHS_DIR);
        let mut truth = Vec::with_capacity(cfg.rounds);
        for t in 1..=cfg.rounds {
            let path = graphs.join(snapshot_name(t));
            if !path.exists() {
                break;
            }
            let w = io::parse_edge_list(&io::read_to_string(&path)?)?;
            io_check_nodes(&w, cfg.graph.nodes)?;
            truth.push(w);
        }
        let truth = (truth.len() == cfg.rounds).then_some(truth);
        let w_max = cfg.objective.w_max;
        let true_prior = match &cfg.graph.model {
            GraphModel::Static => Some(Predictor::Identity),
            GraphModel::Ar { .. } => {
                let path = dir.join(AR_MATRIX_FILE);
                let m = io::parse_matrix(&io::read_to_string(&path)?)?;
                Some(Predictor::ar(m)?)
            }
            GraphModel::Transition { rate } => {
                let path = dir.join(TRANSITION_TARGET_FILE);
                let target = io::parse_edge_list(&io::read_to_string(&path)?)?;
                io_check_nodes(&target, cfg.graph.nodes)?;
                Some(Predictor::transition(*rate, target, w_max)?)
            }
            GraphModel::Switching { .. } => None,
        };
        Ok(Self {
            signals,
            distances,
            truth,
            true_prior,
            switch_times: cfg.graph.model.switch_times(cfg.rounds),
        })
    }

    pub fn predictor(&self, spec: &PredictorSpec) -> Result<Predictor> {
        match spec {
            PredictorSpec::TruePrior => self.true_prior.clone().ok_or_else(|| {
                Error::Config("true_prior needs an ar, transition or static model".into())
            }),
            other => other.build(None),
        }
    }
}

fn io_check_nodes(w: &GraphVector, nodes: usize) -> Result<()> {
    if w.nodes() != nodes {
        return Err(Error::Config(format!(
            "graph file has {} nodes, config expects {nodes}",
            w.nodes()
        )));
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct SimulationSummary {
    pub model: &'static str,
    pub nodes: usize,
    pub rounds: usize,
    pub seed: u64,
    pub max_data_norm: f64,
    pub min_true_degree: f64,
    pub snapshots: usize,
}

/// Simulates one seed and writes `signals.csv`, `graphs/t_*.csv` and, for
/// the AR and transition models, the model parameters.
pub fn simulate(cfg: &ExperimentConfig, seed: u64, out: &Path) -> Result<SimulationSummary> {
    let stream = generate_stream(&cfg.trajectory(seed), &cfg.signal)?;
    io::write_file(
        &out.join(SIGNALS_FILE),
        &io::format_signals(&stream.signals)?,
    )?;
    let mut snapshots = 0;
    if cfg.snapshot_interval > 0 {
        for (idx, w) in stream.truth.iter().enumerate() {
            if idx % cfg.snapshot_interval == 0 {
                let path = out.join(GRAPHS_DIR).join(snapshot_name(idx + 1));
                io::write_file(&path, &io::format_edge_list(w))?;
                snapshots += 1;
            }
        }
    }
    if let Some(a) = stream.dynamics.ar_matrix() {
        io::write_file(&out.join(AR_MATRIX_FILE), &io::format_matrix(a))?;
    }
    if let Some((_, target)) = stream.dynamics.transition_target() {
        io::write_file(
            &out.join(TRANSITION_TARGET_FILE),
            &io::format_edge_list(target),
        )?;
    }
    Ok(SimulationSummary {
        model: cfg.graph.model.name(),
        nodes: cfg.graph.nodes,
        rounds: cfg.rounds,
        seed,
        max_data_norm: stream.max_data_norm(),
        min_true_degree: stream
            .truth
            .iter()
            .map(GraphVector::min_degree)
            .fold(f64::INFINITY, f64::min),
        snapshots,
    })
}

/// Starting iterate of every learner.
pub fn learner_start(cfg: &ExperimentConfig) -> Result<GraphVector> {
    let w0 = cfg.init_weight.unwrap_or(cfg.objective.w_max / 2.0);
    GraphVector::filled(cfg.graph.nodes, w0)
}

/// Per-round batch minimizers `u_t` of the stream's objectives.
pub fn comparators(
    cfg: &ExperimentConfig,
    params: &ObjectiveParams,
    distances: &[DistanceVector],
) -> Result<Vec<GraphVector>> {
    let zbars = aggregate_sequence(distances, params.gamma)?;
    Ok(comparator_sequence(
        &zbars,
        params,
        cfg.benchmark.solver_tol,
        cfg.benchmark.solver_max_iter,
    )?
    .into_iter()
    .map(|r| r.w_star)
    .collect())
}

/// One summary row.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub predictor: String,
    pub seed: u64,
    pub beta: f64,
    pub status: String,
    pub final_rel_error: Option<f64>,
    pub tail_rel_error: Option<f64>,
    pub regret: Option<f64>,
    pub path_variation: Option<f64>,
    /// The dynamic-regret bound, for constant steps and context-free priors.
    pub regret_bound: Option<f64>,
    pub rel_error_tv: Option<f64>,
}

impl RunSummary {
    pub const HEADER: &'static str = "predictor,seed,beta,status,final_rel_error,tail_rel_error,regret,path_variation,regret_bound,bound_satisfied,rel_error_tv";

    fn failed(predictor: &str, seed: u64, beta: f64, err: &Error) -> Self {
        Self {
            predictor: predictor.to_string(),
            seed,
            beta,
            status: status_of(err).to_string(),
            final_rel_error: None,
            tail_rel_error: None,
            regret: None,
            path_variation: None,
            regret_bound: None,
            rel_error_tv: None,
        }
    }

    pub fn bound_satisfied(&self) -> Option<bool> {
        Some(self.regret? <= self.regret_bound?)
    }

    pub fn csv_row(&self) -> String {
        let f = |v: Option<f64>| v.map(|x| format!("{x:?}")).unwrap_or_default();
        format!(
            "{},{},{:?},{},{},{},{},{},{},{},{}",
            self.predictor,
            self.seed,
            self.beta,
            self.status,
            f(self.final_rel_error),
            f(self.tail_rel_error),
            f(self.regret),
            f(self.path_variation),
            f(self.regret_bound),
            self.bound_satisfied()
                .map(|b| b.to_string())
                .unwrap_or_default(),
            f(self.rel_error_tv),
        )
    }
}

pub fn status_of(err: &Error) -> &'static str {
    match err {
        Error::BarrierBreach { .. } => "barrier_breach",
        Error::NotConverged { .. } => "not_converged",
        _ => "error",
    }
}

pub fn format_summary(rows: &[RunSummary]) -> String {
    let mut out = format!("{}\n", RunSummary::HEADER);
    for r in rows {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}

/// A completed run with its summary and wall-clock cost.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub trace: RunTrace,
    pub summary: RunSummary,
    pub micros_per_round: f64,
}

/// Runs one learner and scores it.
pub fn run_learner(
    cfg: &ExperimentConfig,
    params: &ObjectiveParams,
    spec: &PredictorSpec,
    data: &StreamData,
    comparators: Option<&[GraphVector]>,
    seed: u64,
) -> Result<RunOutcome> {
    let predictor = data.predictor(spec)?;
    let start = Instant::now();
    let trace = run(
        &data.distances,
        &predictor,
        params,
        learner_start(cfg)?,
        cfg.step_rule,
        Evaluation {
            truth: data.truth.as_deref(),
            comparators,
        },
    )?;
    let micros_per_round = start.elapsed().as_secs_f64() * 1e6 / trace.rounds() as f64;
    let d = cfg.graph.nodes;
    let eta = match cfg.step_rule {
        StepRule::Fixed => Some(step_size_fixed(params, d)),
        StepRule::Constant(eta) => Some(eta),
        StepRule::Adaptive => None,
    };
    let context_free = !matches!(predictor, Predictor::DataDriven { .. });
    let (regret, path_variation, bound) = match &trace.regret {
        Some(ledger) => {
            let bound = match eta {
                Some(eta) if context_free => {
                    // the gradient bound needs a degree floor the iterates respect
                    let floor = params.deg_min.min(trace.min_degree());
                    let p = ObjectiveParams {
                        deg_min: floor,
                        ..*params
                    };
                    let l = gradient_bound(&p, d, trace.max_data_norm);
                    Some(regret_bound(
                        params,
                        d,
                        trace.rounds(),
                        ledger.path_variation(),
                        eta,
                        l,
                    ))
                }
                _ => None,
            };
            (Some(ledger.regret()), Some(ledger.path_variation()), bound)
        }
        None => (None, None, None),
    };
    let summary = RunSummary {
        predictor: spec.label(),
        seed,
        beta: params.beta,
        status: "ok".into(),
        final_rel_error: trace.final_rel_error(),
        tail_rel_error: trace.tail_rel_error(cfg.tail_fraction),
        regret,
        path_variation,
        regret_bound: bound,
        rel_error_tv: trace.rel_errors().map(|e| total_variation(&e)),
    };
    Ok(RunOutcome {
        trace,
        summary,
        micros_per_round,
    })
}

pub enum Source<'a> {
    Fresh,
    Replay(&'a Path),
}

/// Runs the first predictor on the first seed and writes `trace.csv`,
/// `summary.csv` and learner snapshots under `snapshots/`.
pub fn learn(cfg: &ExperimentConfig, source: Source<'_>, out: &Path) -> Result<RunOutcome> {
    let seed = cfg.seeds[0];
    let data = match source {
        Source::Fresh => StreamData::simulate(cfg, seed)?,
        Source::Replay(dir) => StreamData::replay(cfg, dir)?,
    };
    let comps = match cfg.regret {
        true => Some(comparators(cfg, &cfg.objective, &data.distances)?),
        false => None,
    };
    let outcome = run_learner(
        cfg,
        &cfg.objective,
        &cfg.predictors[0],
        &data,
        comps.as_deref(),
        seed,
    )?;
    io::write_file(&out.join("trace.csv"), &io::format_trace(&outcome.trace))?;
    io::write_file(
        &out.join("summary.csv"),
        &format_summary(std::slice::from_ref(&outcome.summary)),
    )?;
    if cfg.snapshot_interval > 0 {
        for (idx, w) in outcome.trace.corrected.iter().enumerate() {
            if idx % cfg.snapshot_interval == 0 {
                let path = out.join("snapshots").join(snapshot_name(idx + 1));
                io::write_file(&path, &io::format_edge_list(w))?;
            }
        }
    }
    Ok(outcome)
}

#[derive(Debug, Clone, Default)]
pub struct BenchmarkOptions {
    pub search_beta: bool,
    /// Worker threads; `None` uses all cores.
    pub workers: Option<usize>,
}

impl BenchmarkOptions {
    /// Reads the worker count from [`WORKERS_ENV`].
    pub fn workers_from_env() -> Result<Option<usize>> {
        match std::env::var(WORKERS_ENV) {
            Ok(v) => match v.trim().parse::<usize>() {
                Ok(n) if n > 0 => Ok(Some(n)),
                _ => Err(Error::Config(format!(
                    "{WORKERS_ENV} must be a positive integer, got {v:?}"
                ))),
            },
            Err(_) => Ok(None),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BetaSearchRow {
    pub predictor: String,
    pub beta: f64,
    /// Mean final relative error over the seeds that completed.
    pub mean_final_rel_error: Option<f64>,
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryRow {
    pub predictor: String,
    pub switch_t: usize,
    /// `None` when the mean curve never recovers before the next switch.
    pub rounds: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct BenchmarkOutcome {
    pub summaries: Vec<RunSummary>,
    /// Per-predictor `beta` used for the reported runs.
    pub betas: Vec<(String, f64)>,
    pub beta_search: Vec<BetaSearchRow>,
    /// Seed-mean relative-error curve per predictor over successful runs.
    pub mean_curves: Vec<(String, Vec<f64>)>,
    pub recovery: Vec<RecoveryRow>,
    /// `(predictor, seed, curve)` for every successful run.
    pub curves: Vec<(String, u64, Vec<f64>)>,
    /// `(predictor, seed, microseconds per round)`; kept out of the
    /// deterministic CSVs.
    pub timings: Vec<(String, u64, f64)>,
}

impl BenchmarkOutcome {
    pub fn all_failed(&self) -> bool {
        self.summaries.iter().all(|r| r.status != "ok")
    }
}

impl BenchmarkOutcome {
    pub fn mean_curve(&self, label: &str) -> Option<&[f64]> {
        self.mean_curves
            .iter()
            .find(|(l, _)| l == label)
            .map(|(_, c)| c.as_slice())
    }

    pub fn rows_for<'a>(&'a self, label: &'a str) -> impl Iterator<Item = &'a RunSummary> + 'a {
        self.summaries.iter().filter(move |r| r.predictor == label)
    }

    pub fn recovery_for<'a>(
        &'a self,
        label: &'a str,
    ) -> impl Iterator<Item = &'a RecoveryRow> + 'a {
        self.recovery.iter().filter(move |r| r.predictor == label)
    }
}

/// Runs every predictor on every seed. With `search_beta`, each predictor
/// first picks the grid `beta` with the fewest failed seeds, breaking ties
/// by the lowest mean final error over completed seeds. Failed runs are
/// reported with their status and left out of the mean curves.
pub fn benchmark(
    cfg: &ExperimentConfig,
    opts: &BenchmarkOptions,
    out: Option<&Path>,
) -> Result<BenchmarkOutcome> {
    cfg.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = opts.workers {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    pool.install(|| benchmark_inner(cfg, opts, out))
}

fn benchmark_inner(
    cfg: &ExperimentConfig,
    opts: &BenchmarkOptions,
    out: Option<&Path>,
) -> Result<BenchmarkOutcome> {
    let streams: Vec<StreamData> = cfg
        .seeds
        .par_iter()
        .map(|&seed| StreamData::simulate(cfg, seed))
        .collect::<Result<_>>()?;
    let with_beta = |beta: f64| ObjectiveParams {
        beta,
        ..cfg.objective
    };

    let mut beta_search = Vec::new();
    let mut betas = Vec::new();
    for spec in &cfg.predictors {
        let label = spec.label();
        if !opts.search_beta {
            betas.push((label, cfg.objective.beta));
            continue;
        }
        let grid = &cfg.benchmark.beta_grid;
        let jobs: Vec<(usize, usize)> = (0..grid.len())
            .flat_map(|b| (0..streams.len()).map(move |s| (b, s)))
            .collect();
        let finals: Vec<Option<f64>> = jobs
            .par_iter()
            .map(|&(b, s)| {
                let params = with_beta(grid[b]);
                let mut quiet = cfg.clone();
                quiet.regret = false;
                run_learner(&quiet, &params, spec, &streams[s], None, cfg.seeds[s])
                    .ok()
                    .and_then(|o| o.summary.final_rel_error)
            })
            .collect();
        // fewest failed seeds first, then lowest mean over completed seeds
        let mut best: Option<(f64, usize, f64)> = None;
        for (b, &beta) in grid.iter().enumerate() {
            let row = &finals[b * streams.len()..(b + 1) * streams.len()];
            let failures = row.iter().filter(|x| x.is_none()).count();
            let done = row.len() - failures;
            let mean = (done > 0).then(|| row.iter().flatten().sum::<f64>() / done as f64);
            if let Some(m) = mean {
                if best.is_none_or(|(_, bf, bm)| (failures, m) < (bf, bm)) {
                    best = Some((beta, failures, m));
                }
            }
            beta_search.push(BetaSearchRow {
                predictor: label.clone(),
                beta,
                mean_final_rel_error: mean,
                failures,
            });
        }
        // if every grid value failed, the configured beta's failures are reported below
        let beta = best.map_or(cfg.objective.beta, |(b, _, _)| b);
        betas.push((label, beta));
    }

    // comparators depend only on beta and the stream
    let mut comparator_cache: BTreeMap<(u64, usize), Vec<GraphVector>> = BTreeMap::new();
    if cfg.regret {
        let mut keys: Vec<(f64, usize)> = Vec::new();
        for (_, beta) in &betas {
            for s in 0..streams.len() {
                if !keys.iter().any(|&(b, k)| b == *beta && k == s) {
                    keys.push((*beta, s));
                }
            }
        }
        let solved: Vec<Result<Vec<GraphVector>>> = keys
            .par_iter()
            .map(|&(beta, s)| comparators(cfg, &with_beta(beta), &streams[s].distances))
            .collect();
        for ((beta, s), res) in keys.into_iter().zip(solved) {
            comparator_cache.insert((beta.to_bits(), s), res?);
        }
    }

    let jobs: Vec<(usize, usize)> = (0..cfg.predictors.len())
        .flat_map(|p| (0..streams.len()).map(move |s| (p, s)))
        .collect();
    // per job: the summary, plus the error curve and timing when it completed
    type JobResult = (RunSummary, Option<(Vec<f64>, f64)>);
    let results: Vec<JobResult> = jobs
        .par_iter()
        .map(|&(p, s)| {
            let spec = &cfg.predictors[p];
            let beta = betas[p].1;
            let seed = cfg.seeds[s];
            let comps = comparator_cache
                .get(&(beta.to_bits(), s))
                .map(Vec::as_slice);
            match run_learner(cfg, &with_beta(beta), spec, &streams[s], comps, seed) {
                Ok(o) => {
                    let curve = o.trace.rel_errors().unwrap_or_default();
                    (o.summary, Some((curve, o.micros_per_round)))
                }
                Err(e) => (RunSummary::failed(&spec.label(), seed, beta, &e), None),
            }
        })
        .collect();

    let mut summaries = Vec::with_capacity(results.len());
    let mut curves = Vec::new();
    let mut timings = Vec::new();
    for (summary, done) in results {
        if let Some((c, micros)) = done {
            timings.push((summary.predictor.clone(), summary.seed, micros));
            curves.push((summary.predictor.clone(), summary.seed, c));
        }
        summaries.push(summary);
    }
    let mut mean_curves = Vec::new();
    for (label, _) in &betas {
        let mine: Vec<&Vec<f64>> = curves
            .iter()
            .filter(|(l, _, _)| l == label)
            .map(|(_, _, c)| c)
            .collect();
        if mine.is_empty() {
            continue;
        }
        let mut mean = vec![0.0; cfg.rounds];
        for c in &mine {
            for (m, x) in mean.iter_mut().zip(c.iter()) {
                *m += x / mine.len() as f64;
            }
        }
        mean_curves.push((label.clone(), mean));
    }
    let recovery = recovery_rows(cfg, &streams[0].switch_times, &mean_curves)?;

    let outcome = BenchmarkOutcome {
        summaries,
        betas,
        beta_search,
        mean_curves,
        recovery,
        curves,
        timings,
    };
    if let Some(dir) = out {
        write_benchmark(&outcome, dir)?;
    }
    Ok(outcome)
}

/// Rounds to recover after each switch, on the seed-mean curve. The
/// pre-switch window is clipped to the rounds since the previous switch and
/// recovery is searched up to the next switch.
fn recovery_rows(
    cfg: &ExperimentConfig,
    switch_times: &[usize],
    mean_curves: &[(String, Vec<f64>)],
) -> Result<Vec<RecoveryRow>> {
    let mut rows = Vec::new();
    for (label, curve) in mean_curves {
        for (k, &s) in switch_times.iter().enumerate() {
            // round s sits at index s - 1
            let idx = s - 1;
            let prev = if k == 0 { 0 } else { switch_times[k - 1] - 1 };
            let window = cfg.benchmark.recovery_window.min(idx - prev);
            let until = switch_times.get(k + 1).map_or(curve.len(), |&n| n - 1);
            rows.push(RecoveryRow {
                predictor: label.clone(),
                switch_t: s,
                rounds: rounds_to_recover(
                    curve,
                    idx,
                    window,
                    cfg.benchmark.recovery_factor,
                    until,
                )?,
            });
        }
    }
    Ok(rows)
}

fn write_benchmark(o: &BenchmarkOutcome, dir: &Path) -> Result<()> {
    io::write_file(&dir.join("summary.csv"), &format_summary(&o.summaries))?;

    let mut long = String::from("predictor,seed,t,rel_error\n");
    for (label, seed, curve) in &o.curves {
        for (i, e) in curve.iter().enumerate() {
            let _ = writeln!(long, "{label},{seed},{},{e:?}", i + 1);
        }
    }
    io::write_file(&dir.join("rel_error_long.csv"), &long)?;

    let mut mean = String::from("predictor,t,mean_rel_error\n");
    for (label, curve) in &o.mean_curves {
        for (i, e) in curve.iter().enumerate() {
            let _ = writeln!(mean, "{label},{},{e:?}", i + 1);
        }
    }
    io::write_file(&dir.join("mean_curves.csv"), &mean)?;

    let mut betas = String::from("predictor,beta\n");
    for (label, b) in &o.betas {
        let _ = writeln!(betas, "{label},{b:?}");
    }
    io::write_file(&dir.join("betas.csv"), &betas)?;

    if !o.beta_search.is_empty() {
        let mut s = String::from("predictor,beta,mean_final_rel_error,failures\n");
        for r in &o.beta_search {
            let m = r
                .mean_final_rel_error
                .map(|x| format!("{x:?}"))
                .unwrap_or_default();
            let _ = writeln!(s, "{},{:?},{m},{}", r.predictor, r.beta, r.failures);
        }
        io::write_file(&dir.join("beta_search.csv"), &s)?;
    }
    let mut timing = String::from("predictor,seed,us_per_round\n");
    for (label, seed, us) in &o.timings {
        let _ = writeln!(timing, "{label},{seed},{us:.3}");
    }
    io::write_file(&dir.join("timing.csv"), &timing)?;

    if !o.recovery.is_empty() {
        let mut s = String::from("predictor,switch_t,rounds_to_recover\n");
        for r in &o.recovery {
            let n = r.rounds.map(|x| x.to_string()).unwrap_or_default();
            let _ = writeln!(s, "{},{},{n}", r.predictor, r.switch_t);
        }
        io::write_file(&dir.join("recovery.csv"), &s)?;
    }
    Ok(())
}
