//! The online learner: forgetting-factor data aggregation, a projected
//! gradient correction step, then a prediction step through a [`Predictor`].

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::graph::{project_in_place, DistanceVector, GraphVector};
use crate::metrics::{relative_error, RegretLedger};
use crate::objective::{gradient, loss, step_size_adaptive, step_size_fixed, ObjectiveParams};
use crate::predictor::{PredictionContext, Predictor};

/// Runs abort when an iterate's minimum degree drops below this.
pub const DEGREE_FLOOR: f64 = 1e-12;

/// Exponentially weighted running aggregate `zbar_t = gamma zbar_{t-1} + (1 - gamma) z_t`.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceAggregate {
    zbar: DistanceVector,
    prev: DistanceVector,
    gamma: f64,
    rounds: usize,
}

impl DistanceAggregate {
    pub fn new(p: usize, gamma: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&gamma) {
            return Err(Error::InvalidParameter(format!(
                "gamma must lie in [0, 1), got {gamma}"
            )));
        }
        Ok(Self {
            zbar: DistanceVector::zeros(p),
            prev: DistanceVector::zeros(p),
            gamma,
            rounds: 0,
        })
    }

    pub fn update(&mut self, z: &DistanceVector) -> Result<()> {
        check_len(self.zbar.len(), z.len())?;
        let g = self.gamma;
        let next = self
            .zbar
            .as_slice()
            .iter()
            .zip(z.as_slice())
            .map(|(a, b)| g * a + (1.0 - g) * b)
            .collect();
        self.prev = std::mem::replace(&mut self.zbar, DistanceVector::new(next)?);
        self.rounds += 1;
        Ok(())
    }

    pub fn zbar(&self) -> &DistanceVector {
        &self.zbar
    }

    /// The aggregate before the most recent update.
    pub fn previous(&self) -> &DistanceVector {
        &self.prev
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }
}

/// Aggregates of a whole stream, one per round.
pub fn aggregate_sequence(stream: &[DistanceVector], gamma: f64) -> Result<Vec<DistanceVector>> {
    let p = stream.first().map_or(0, |z| z.len());
    let mut agg = DistanceAggregate::new(p, gamma)?;
    stream
        .iter()
        .map(|z| {
            agg.update(z)?;
            Ok(agg.zbar().clone())
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepRule {
    /// `(4 beta + 2 alpha (d-1) / deg_min^2)^-1` with the configured `deg_min`.
    Fixed,
    /// Same formula with the current iterate's minimum degree.
    Adaptive,
    /// A caller-chosen constant.
    Constant(f64),
}

impl StepRule {
    pub fn step(&self, w: &GraphVector, params: &ObjectiveParams) -> Result<f64> {
        match *self {
            StepRule::Fixed => Ok(step_size_fixed(params, w.nodes())),
            StepRule::Adaptive => step_size_adaptive(w, params),
            StepRule::Constant(eta) => Ok(eta),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let StepRule::Constant(eta) = *self {
            if !(eta > 0.0 && eta.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "constant step must be > 0, got {eta}"
                )));
            }
        }
        Ok(())
    }
}

/// `Pi(w - eta * grad f(w))`.
pub fn correction_step(
    w: &GraphVector,
    zbar: &DistanceVector,
    params: &ObjectiveParams,
    eta: f64,
) -> Result<GraphVector> {
    let g = gradient(w, zbar, params)?;
    let mut out = w.clone();
    for (x, gk) in out.as_mut_slice().iter_mut().zip(&g) {
        *x -= eta * gk;
    }
    project_in_place(&mut out, params.w_max);
    Ok(out)
}

/// Everything produced by one round.
#[derive(Debug, Clone)]
pub struct RoundOutput {
    pub t: usize,
    pub eta: f64,
    /// `w_t`, the iterate the round started from.
    pub entering: GraphVector,
    /// The corrected estimate reported for this round.
    pub corrected: GraphVector,
    /// `w_{t+1}`, the predictor's output.
    pub next: GraphVector,
    pub loss_entering: f64,
    pub loss_corrected: f64,
    pub grad_norm: f64,
    pub min_degree: f64,
}

#[derive(Debug, Clone)]
pub struct LearnerState {
    w: GraphVector,
    aggregate: DistanceAggregate,
    params: ObjectiveParams,
    step_rule: StepRule,
    round: usize,
}

impl LearnerState {
    pub fn new(w_init: GraphVector, params: ObjectiveParams, step_rule: StepRule) -> Result<Self> {
        params.validate()?;
        step_rule.validate()?;
        if !w_init.is_feasible(params.w_max) {
            return Err(Error::InvalidParameter(
                "initial graph is outside the box".into(),
            ));
        }
        let min = w_init.min_degree();
        if !(min > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "initial graph has a node of degree {min}"
            )));
        }
        let aggregate = DistanceAggregate::new(w_init.len(), params.gamma)?;
        Ok(Self {
            w: w_init,
            aggregate,
            params,
            step_rule,
            round: 1,
        })
    }

    /// Default start: every weight at `w_max / 2`.
    pub fn default_start(d: usize, params: &ObjectiveParams) -> Result<GraphVector> {
        GraphVector::filled(d, params.w_max / 2.0)
    }

    pub fn current(&self) -> &GraphVector {
        &self.w
    }

    pub fn aggregate(&self) -> &DistanceAggregate {
        &self.aggregate
    }

    pub fn params(&self) -> &ObjectiveParams {
        &self.params
    }

    pub fn round(&self) -> usize {
        self.round
    }

    /// One round: aggregate `z`, correct, predict.
    pub fn step(&mut self, z: &DistanceVector, predictor: &Predictor) -> Result<RoundOutput> {
        let t = self.round;
        let min_degree = self.w.min_degree();
        if !(min_degree >= DEGREE_FLOOR) {
            return Err(Error::BarrierBreach {
                round: t,
                min_degree,
            });
        }
        self.aggregate.update(z)?;
        let zbar = self.aggregate.zbar();
        let eta = self.step_rule.step(&self.w, &self.params)?;
        let g = gradient(&self.w, zbar, &self.params)?;
        let grad_norm = crate::graph::norm(&g);
        let mut corrected = self.w.clone();
        for (x, gk) in corrected.as_mut_slice().iter_mut().zip(&g) {
            *x -= eta * gk;
        }
        project_in_place(&mut corrected, self.params.w_max);

        let corrected_min = corrected.min_degree();
        if !(corrected_min >= DEGREE_FLOOR) {
            return Err(Error::BarrierBreach {
                round: t,
                min_degree: corrected_min,
            });
        }
        let ctx = PredictionContext {
            zbar_now: zbar,
            zbar_prev: self.aggregate.previous(),
            params: &self.params,
        };
        let next = predictor.predict(&corrected, &ctx)?;

        let loss_entering = loss(&self.w, zbar, &self.params)?;
        let loss_corrected = loss(&corrected, zbar, &self.params)?;
        let entering = std::mem::replace(&mut self.w, next.clone());
        self.round += 1;
        Ok(RoundOutput {
            t,
            eta,
            entering,
            corrected,
            next,
            loss_entering,
            loss_corrected,
            grad_norm,
            min_degree,
        })
    }
}

/// Per-round summary written to the trace CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundRecord {
    pub t: usize,
    pub eta: f64,
    /// `f_t(w_t)` at the entering iterate.
    pub loss: f64,
    pub loss_corrected: f64,
    pub rel_error: Option<f64>,
    pub regret_increment: Option<f64>,
    pub path_var_increment: Option<f64>,
    pub grad_norm: f64,
    pub min_degree: f64,
}

#[derive(Debug, Clone)]
pub struct RunTrace {
    pub records: Vec<RoundRecord>,
    pub entering: Vec<GraphVector>,
    pub corrected: Vec<GraphVector>,
    /// Largest `||z_t||` seen, the empirical data bound.
    pub max_data_norm: f64,
    pub regret: Option<RegretLedger>,
}

impl RunTrace {
    pub fn rounds(&self) -> usize {
        self.records.len()
    }

    pub fn rel_errors(&self) -> Option<Vec<f64>> {
        self.records.iter().map(|r| r.rel_error).collect()
    }

    pub fn final_rel_error(&self) -> Option<f64> {
        self.records.last().and_then(|r| r.rel_error)
    }

    /// Mean relative error over the last `fraction` of rounds (at least one).
    pub fn tail_rel_error(&self, fraction: f64) -> Option<f64> {
        let errs = self.rel_errors()?;
        let n = ((errs.len() as f64 * fraction).ceil() as usize).clamp(1, errs.len().max(1));
        let tail = &errs[errs.len().checked_sub(n)?..];
        Some(tail.iter().sum::<f64>() / tail.len() as f64)
    }

    pub fn max_grad_norm(&self) -> f64 {
        self.records.iter().map(|r| r.grad_norm).fold(0.0, f64::max)
    }

    /// Smallest degree over all entering iterates.
    pub fn min_degree(&self) -> f64 {
        self.records
            .iter()
            .map(|r| r.min_degree)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Optional quantities scored alongside a run.
#[derive(Debug, Clone, Copy, Default)]
pub struct Evaluation<'a> {
    /// Ground-truth graph of every round.
    pub truth: Option<&'a [GraphVector]>,
    /// Comparator sequence `u_t` for dynamic regret.
    pub comparators: Option<&'a [GraphVector]>,
}

/// Runs the learner over the whole stream.
pub fn run(
    stream: &[DistanceVector],
    predictor: &Predictor,
    params: &ObjectiveParams,
    w_init: GraphVector,
    step_rule: StepRule,
    eval: Evaluation<'_>,
) -> Result<RunTrace> {
    if stream.is_empty() {
        return Err(Error::InvalidParameter("stream has no rounds".into()));
    }
    let rounds = stream.len();
    for seq in [eval.truth, eval.comparators].into_iter().flatten() {
        check_len(rounds, seq.len())?;
    }
    let mut state = LearnerState::new(w_init, *params, step_rule)?;
    let mut records = Vec::with_capacity(rounds);
    let mut entering = Vec::with_capacity(rounds);
    let mut corrected = Vec::with_capacity(rounds);
    let mut max_data_norm: f64 = 0.0;
    let mut learner_losses = Vec::new();
    let mut comparator_losses = Vec::new();
    let mut path_increments = Vec::new();
    // aggregates of the previous round, for replaying phi on u_{t-1}
    let mut last_ctx: Option<(DistanceVector, DistanceVector)> = None;

    for (idx, z) in stream.iter().enumerate() {
        max_data_norm = max_data_norm.max(z.norm());
        let out = state.step(z, predictor)?;
        let rel_error = match eval.truth {
            Some(truth) => Some(relative_error(&out.corrected, &truth[idx])?),
            None => None,
        };
        let (regret_increment, path_var_increment) = match eval.comparators {
            Some(us) => {
                let zbar = state.aggregate().zbar();
                let u_loss = loss(&us[idx], zbar, params)?;
                let path = match (&last_ctx, idx) {
                    (Some((now, prev)), i) if i > 0 => {
                        let ctx = PredictionContext {
                            zbar_now: now,
                            zbar_prev: prev,
                            params,
                        };
                        us[idx].distance(&predictor.predict(&us[idx - 1], &ctx)?)
                    }
                    _ => 0.0,
                };
                learner_losses.push(out.loss_entering);
                comparator_losses.push(u_loss);
                path_increments.push(path);
                last_ctx = Some((zbar.clone(), state.aggregate().previous().clone()));
                (Some(out.loss_entering - u_loss), Some(path))
            }
            None => (None, None),
        };
        records.push(RoundRecord {
            t: out.t,
            eta: out.eta,
            loss: out.loss_entering,
            loss_corrected: out.loss_corrected,
            rel_error,
            regret_increment,
            path_var_increment,
            grad_norm: out.grad_norm,
            min_degree: out.min_degree,
        });
        entering.push(out.entering);
        corrected.push(out.corrected);
    }
    let regret = match eval.comparators {
        Some(_) => Some(RegretLedger::new(
            learner_losses,
            comparator_losses,
            path_increments,
        )?),
        None => None,
    };
    Ok(RunTrace {
        records,
        entering,
        corrected,
        max_data_norm,
        regret,
    })
}
