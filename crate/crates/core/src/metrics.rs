//! Tracking and regret metrics.

use crate::error::{check_len, Error, Result};
use crate::graph::GraphVector;
use crate::objective::ObjectiveParams;

/// `||W_hat - W*||_F / ||W*||_F`, computed on the edge vectors (the factor
/// `sqrt(2)` of the symmetric matrices cancels).
pub fn relative_error(w_hat: &GraphVector, w_true: &GraphVector) -> Result<f64> {
    check_len(w_true.len(), w_hat.len())?;
    let denom = w_true.norm();
    if denom == 0.0 {
        return Err(Error::InvalidParameter(
            "relative error against the empty graph is undefined".into(),
        ));
    }
    Ok(w_hat.distance(w_true) / denom)
}

/// `sum_t (f_t(w_t) - f_t(u_t))`.
pub fn dynamic_regret(learner_losses: &[f64], comparator_losses: &[f64]) -> Result<f64> {
    check_len(learner_losses.len(), comparator_losses.len())?;
    Ok(learner_losses
        .iter()
        .zip(comparator_losses)
        .map(|(a, b)| a - b)
        .sum())
}

/// `sum_{t >= 2} ||u_t - phi_{t-1}(u_{t-1})||`, where `phi(t, u)` applies
/// the dynamic model in effect after round `t` (0-based).
pub fn path_variation<F>(comparators: &[GraphVector], mut phi: F) -> Result<f64>
where
    F: FnMut(usize, &GraphVector) -> Result<GraphVector>,
{
    if comparators.len() < 2 {
        return Err(Error::InvalidParameter(
            "path variation needs at least two comparators".into(),
        ));
    }
    let mut total = 0.0;
    for t in 1..comparators.len() {
        let predicted = phi(t - 1, &comparators[t - 1])?;
        total += comparators[t].distance(&predicted);
    }
    Ok(total)
}

/// Right-hand side of the dynamic regret bound:
///
/// `d(d-1) w_max^2 / (4 eta) + sqrt(2 d (d-1)) w_max / (2 eta) * C + eta T L^2 / 2`
pub fn regret_bound(
    params: &ObjectiveParams,
    d: usize,
    rounds: usize,
    path_variation: f64,
    eta: f64,
    grad_bound: f64,
) -> f64 {
    let df = d as f64;
    let pairs = df * (df - 1.0);
    pairs * params.w_max * params.w_max / (4.0 * eta)
        + (2.0 * pairs).sqrt() * params.w_max / (2.0 * eta) * path_variation
        + eta * rounds as f64 * grad_bound * grad_bound / 2.0
}

/// Per-round regret and path-variation bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct RegretLedger {
    learner_losses: Vec<f64>,
    comparator_losses: Vec<f64>,
    /// Entry 0 is zero; entry `t` is `||u_t - phi(u_{t-1})||`.
    path_increments: Vec<f64>,
}

impl RegretLedger {
    pub fn new(
        learner_losses: Vec<f64>,
        comparator_losses: Vec<f64>,
        path_increments: Vec<f64>,
    ) -> Result<Self> {
        check_len(learner_losses.len(), comparator_losses.len())?;
        check_len(learner_losses.len(), path_increments.len())?;
        Ok(Self {
            learner_losses,
            comparator_losses,
            path_increments,
        })
    }

    pub fn rounds(&self) -> usize {
        self.learner_losses.len()
    }

    pub fn regret_increments(&self) -> impl Iterator<Item = f64> + '_ {
        self.learner_losses
            .iter()
            .zip(&self.comparator_losses)
            .map(|(a, b)| a - b)
    }

    pub fn path_increments(&self) -> &[f64] {
        &self.path_increments
    }

    pub fn regret(&self) -> f64 {
        self.regret_increments().sum()
    }

    pub fn path_variation(&self) -> f64 {
        self.path_increments.iter().sum()
    }

    pub fn cumulative_regret(&self) -> Vec<f64> {
        self.regret_increments()
            .scan(0.0, |acc, x| {
                *acc += x;
                Some(*acc)
            })
            .collect()
    }
}

/// Sum of absolute consecutive differences of a curve.
pub fn total_variation(curve: &[f64]) -> f64 {
    curve.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
}

/// Rounds after `switch` (a 0-based index into `curve`) until the curve
/// first drops to `factor` times its mean over the `window` rounds before
/// the switch. Returns `None` if it never does before `until`.
pub fn rounds_to_recover(
    curve: &[f64],
    switch: usize,
    window: usize,
    factor: f64,
    until: usize,
) -> Result<Option<usize>> {
    if window == 0 || window > switch || until > curve.len() || switch >= until {
        return Err(Error::InvalidParameter(format!(
            "bad recovery window: switch {switch}, window {window}, until {until}, len {}",
            curve.len()
        )));
    }
    let pre: f64 = curve[switch - window..switch].iter().sum::<f64>() / window as f64;
    let threshold = factor * pre;
    Ok(curve[switch..until].iter().position(|&x| x <= threshold))
}
