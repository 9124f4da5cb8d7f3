//! Dynamic models applied after each correction step.

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{check_len, Error, Result};
use crate::graph::{project_box, project_in_place, DistanceVector, GraphVector};
use crate::objective::{
    gradient, hessian_apply, step_size_adaptive, temporal_gradient_diff, ObjectiveParams,
};

/// Default number of inner iterations of the data-driven predictor.
pub const DEFAULT_PREDICTION_ITERATIONS: usize = 3;

/// Inputs the data-driven predictor needs beyond the corrected iterate.
#[derive(Debug, Clone, Copy)]
pub struct PredictionContext<'a> {
    pub zbar_now: &'a DistanceVector,
    pub zbar_prev: &'a DistanceVector,
    pub params: &'a ObjectiveParams,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Predictor {
    /// No prior; the online projected-gradient baseline.
    Identity,
    /// `w -> Pi(A w)`.
    Ar { matrix: DMatrix<f64> },
    /// `w -> Pi(a w + (1 - a) target)`.
    Transition { a: f64, target: GraphVector },
    /// A few projected-gradient steps on a frozen second-order model of the
    /// next objective. `step = None` uses the adaptive step at the
    /// corrected iterate.
    DataDriven {
        iterations: usize,
        step: Option<f64>,
    },
}

impl Predictor {
    pub fn ar(matrix: DMatrix<f64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::InvalidParameter(format!(
                "AR matrix must be square, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Predictor::Ar { matrix })
    }

    pub fn transition(a: f64, target: GraphVector, w_max: f64) -> Result<Self> {
        if !(a > 0.0 && a < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "transition rate must lie in (0, 1), got {a}"
            )));
        }
        if !target.is_feasible(w_max) {
            return Err(Error::InvalidParameter(
                "transition target is outside the box".into(),
            ));
        }
        Ok(Predictor::Transition { a, target })
    }

    pub fn data_driven(iterations: usize, step: Option<f64>) -> Result<Self> {
        if iterations == 0 {
            return Err(Error::InvalidParameter(
                "data-driven predictor needs at least one iteration".into(),
            ));
        }
        if let Some(a) = step {
            if !(a > 0.0 && a.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "prediction step must be > 0, got {a}"
                )));
            }
        }
        Ok(Predictor::DataDriven { iterations, step })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Predictor::Identity => "identity",
            Predictor::Ar { .. } => "ar",
            Predictor::Transition { .. } => "transition",
            Predictor::DataDriven { .. } => "data_driven",
        }
    }

    /// Applies the model; the result is always inside the box.
    pub fn predict(&self, w: &GraphVector, ctx: &PredictionContext<'_>) -> Result<GraphVector> {
        let w_max = ctx.params.w_max;
        let mut out = match self {
            Predictor::Identity => predict_identity(w),
            Predictor::Ar { matrix } => predict_ar(w, matrix, w_max)?,
            Predictor::Transition { a, target } => predict_transition(w, *a, target, w_max)?,
            Predictor::DataDriven { iterations, step } => {
                predict_data_driven(w, ctx, *iterations, *step)?
            }
        };
        project_in_place(&mut out, w_max);
        Ok(out)
    }
}

pub fn predict_identity(w: &GraphVector) -> GraphVector {
    w.clone()
}

pub fn predict_ar(w: &GraphVector, a: &DMatrix<f64>, w_max: f64) -> Result<GraphVector> {
    check_len(w.len(), a.ncols())?;
    check_len(w.len(), a.nrows())?;
    let aw = a * DVector::from_column_slice(w.as_slice());
    project_box(aw.as_slice(), w.nodes(), w_max)
}

pub fn predict_transition(
    w: &GraphVector,
    a: f64,
    target: &GraphVector,
    w_max: f64,
) -> Result<GraphVector> {
    check_len(w.len(), target.len())?;
    let mixed: Vec<f64> = w
        .as_slice()
        .iter()
        .zip(target.as_slice())
        .map(|(x, y)| a * x + (1.0 - a) * y)
        .collect();
    project_box(&mixed, w.nodes(), w_max)
}

/// Runs `iterations` projected-gradient steps on the quadratic model
///
/// `m(v) = <g + tdiff, v - w> + 1/2 (v - w)^T H (v - w)`
///
/// with gradient `g`, Hessian `H` frozen at the corrected iterate `w` and
/// `tdiff` the temporal gradient difference. Starts from `w`.
pub fn predict_data_driven(
    w: &GraphVector,
    ctx: &PredictionContext<'_>,
    iterations: usize,
    step: Option<f64>,
) -> Result<GraphVector> {
    if iterations == 0 {
        return Err(Error::InvalidParameter(
            "data-driven predictor needs at least one iteration".into(),
        ));
    }
    let params = ctx.params;
    let g = gradient(w, ctx.zbar_now, params)?;
    let tdiff = temporal_gradient_diff(ctx.zbar_now, ctx.zbar_prev)?;
    let a = match step {
        Some(a) => a,
        None => step_size_adaptive(w, params)?,
    };
    let linear: Vec<f64> = g.iter().zip(&tdiff).map(|(x, y)| x + y).collect();
    let mut cur = w.clone();
    let mut offset = vec![0.0; w.len()];
    for _ in 0..iterations {
        for ((o, c), base) in offset.iter_mut().zip(cur.as_slice()).zip(w.as_slice()) {
            *o = c - base;
        }
        let h = hessian_apply(w, params, &offset)?;
        for ((c, hk), lk) in cur.as_mut_slice().iter_mut().zip(&h).zip(&linear) {
            *c -= a * (hk + lk);
        }
        project_in_place(&mut cur, params.w_max);
    }
    Ok(cur)
}

/// Largest observed ratio `||phi(u) - phi(v)|| / ||u - v||` over random
/// feasible pairs with entries in `[0.05 w_max, w_max]`.
pub fn contraction_estimate(
    predictor: &Predictor,
    d: usize,
    ctx: &PredictionContext<'_>,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    let p = crate::graph::edge_count(d);
    let w_max = ctx.params.w_max;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| -> Result<GraphVector> {
        GraphVector::new(
            d,
            (0..p)
                .map(|_| rng.random_range(0.05 * w_max..=w_max))
                .collect(),
        )
    };
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let u = draw(&mut rng)?;
        let v = draw(&mut rng)?;
        let gap = u.distance(&v);
        if gap == 0.0 {
            continue;
        }
        let ratio = predictor
            .predict(&u, ctx)?
            .distance(&predictor.predict(&v, ctx)?)
            / gap;
        worst = worst.max(ratio);
    }
    Ok(worst)
}

/// Random AR transition matrix `(1 - mixing) I + mixing * mean(P_1..P_k)`
/// over `k` random permutation matrices.
///
/// The result is doubly stochastic: its spectral norm is exactly 1, it maps
/// `[0, w_max]^p` into itself and it preserves total edge weight.
pub fn random_ar_matrix(
    p: usize,
    mixing: f64,
    permutations: usize,
    rng: &mut impl Rng,
) -> Result<DMatrix<f64>> {
    if !(0.0..=1.0).contains(&mixing) {
        return Err(Error::InvalidParameter(format!(
            "AR mixing must lie in [0, 1], got {mixing}"
        )));
    }
    if permutations == 0 {
        return Err(Error::InvalidParameter(
            "AR generator needs at least one permutation".into(),
        ));
    }
    let mut a = DMatrix::identity(p, p) * (1.0 - mixing);
    let share = mixing / permutations as f64;
    let mut perm: Vec<usize> = (0..p).collect();
    for _ in 0..permutations {
        perm.shuffle(rng);
        for (row, &col) in perm.iter().enumerate() {
            a[(row, col)] += share;
        }
    }
    Ok(a)
}
