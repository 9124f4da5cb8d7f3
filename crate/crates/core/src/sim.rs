//! Synthetic dynamic graphs and smooth signals drawn from them.
//!
//! Signals follow `x ~ N(0, L^+ + sigma^2 I)` where `L` is the combinatorial
//! Laplacian of the current graph; the pseudo-inverse drops the constant
//! mode.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{edge_count, pairs, DistanceVector, GraphVector};
use crate::predictor::{random_ar_matrix, Predictor};

const INIT_ATTEMPTS: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitGraph {
    /// Each pair is an edge with probability `p_edge`, weight uniform in
    /// `[weight_min, weight_max]`.
    ErdosRenyi {
        p_edge: f64,
        weight_min: f64,
        weight_max: f64,
    },
    /// Nodes uniform in the unit square, weight `exp(-dist^2 / (2 bandwidth^2))`,
    /// edges below `threshold` dropped.
    Rbf { bandwidth: f64, threshold: f64 },
}

impl Default for InitGraph {
    fn default() -> Self {
        InitGraph::ErdosRenyi {
            p_edge: 0.3,
            weight_min: 0.1,
            weight_max: 1.0,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GraphModel {
    #[default]
    Static,
    /// `w_{t+1} = Pi(A w_t)` with a random doubly stochastic
    /// `A = (1 - mixing) I + mixing * mean of random permutations`.
    Ar {
        #[serde(default = "default_mixing")]
        mixing: f64,
        #[serde(default = "default_permutations")]
        permutations: usize,
    },
    /// `w_{t+1} = Pi(a w_t + (1 - a) target)` with a random target graph.
    Transition {
        #[serde(default = "default_rate")]
        rate: f64,
    },
    /// Piecewise constant; at each switch time the graph jumps to the next
    /// graph of a random library (cyclically). Times default to `T/6, T/2`.
    Switching {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        times: Option<Vec<usize>>,
        #[serde(default = "default_library")]
        library_size: usize,
    },
}

fn default_mixing() -> f64 {
    0.01
}
fn default_permutations() -> usize {
    3
}
fn default_rate() -> f64 {
    0.995
}
fn default_library() -> usize {
    2
}

impl GraphModel {
    pub fn name(&self) -> &'static str {
        match self {
            GraphModel::Static => "static",
            GraphModel::Ar { .. } => "ar",
            GraphModel::Transition { .. } => "transition",
            GraphModel::Switching { .. } => "switching",
        }
    }

    /// Switch times in effect for `rounds` rounds.
    pub fn switch_times(&self, rounds: usize) -> Vec<usize> {
        match self {
            GraphModel::Switching { times: Some(t), .. } => t.clone(),
            GraphModel::Switching { times: None, .. } => {
                let mut t = vec![rounds / 6, rounds / 2];
                t.retain(|&x| x >= 2);
                t.dedup();
                t
            }
            _ => Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryConfig {
    pub nodes: usize,
    pub rounds: usize,
    pub model: GraphModel,
    pub init: InitGraph,
    /// Box bound every ground-truth graph respects.
    pub w_max: f64,
    pub seed: u64,
}

impl TrajectoryConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.nodes < 2 {
            return bad(format!("need at least 2 nodes, got {}", self.nodes));
        }
        if self.rounds == 0 {
            return bad("rounds must be >= 1".into());
        }
        if !(self.w_max > 0.0) {
            return bad(format!("w_max must be > 0, got {}", self.w_max));
        }
        match self.init {
            InitGraph::ErdosRenyi {
                p_edge,
                weight_min,
                weight_max,
            } => {
                if !(0.0..=1.0).contains(&p_edge) {
                    return bad(format!("p_edge must lie in [0, 1], got {p_edge}"));
                }
                if !(weight_min > 0.0 && weight_min <= weight_max && weight_max <= self.w_max) {
                    return bad(format!(
                        "need 0 < weight_min <= weight_max <= w_max, got {weight_min}, {weight_max}, {}",
                        self.w_max
                    ));
                }
            }
            InitGraph::Rbf {
                bandwidth,
                threshold,
            } => {
                if !(bandwidth > 0.0) || !(0.0..1.0).contains(&threshold) {
                    return bad("rbf needs bandwidth > 0 and threshold in [0, 1)".into());
                }
                if self.w_max < 1.0 {
                    return bad("rbf weights reach 1, so w_max must be >= 1".into());
                }
            }
        }
        match &self.model {
            GraphModel::Static => {}
            GraphModel::Ar {
                mixing,
                permutations,
            } => {
                if !(0.0..=1.0).contains(mixing) || *permutations == 0 {
                    return bad("ar needs mixing in [0, 1] and permutations >= 1".into());
                }
            }
            GraphModel::Transition { rate } => {
                if !(*rate > 0.0 && *rate < 1.0) {
                    return bad(format!("transition rate must lie in (0, 1), got {rate}"));
                }
            }
            GraphModel::Switching { library_size, .. } => {
                if *library_size < 2 {
                    return bad("switching needs a library of at least 2 graphs".into());
                }
                let times = self.model.switch_times(self.rounds);
                if times.is_empty() {
                    return bad("switching model has no switch times".into());
                }
                if times.windows(2).any(|w| w[0] >= w[1]) {
                    return bad(format!(
                        "switch times {times:?} are not strictly increasing"
                    ));
                }
                if times[0] < 2 || *times.last().unwrap() > self.rounds {
                    return bad(format!(
                        "switch times {times:?} must lie within [2, {}]",
                        self.rounds
                    ));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SignalConfig {
    pub noise_sigma: f64,
    /// Laplacian eigenvalues at or below this are treated as zero.
    pub pseudo_inverse_tol: f64,
}

impl Default for SignalConfig {
    fn default() -> Self {
        Self {
            noise_sigma: 0.1,
            pseudo_inverse_tol: 1e-9,
        }
    }
}

impl SignalConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(Error::Config(format!(
                "noise_sigma must be >= 0, got {}",
                self.noise_sigma
            )));
        }
        if !(self.pseudo_inverse_tol > 0.0) {
            return Err(Error::Config(format!(
                "pseudo_inverse_tol must be > 0, got {}",
                self.pseudo_inverse_tol
            )));
        }
        Ok(())
    }
}

/// Draws a random connected graph.
pub fn init_graph(init: &InitGraph, d: usize, rng: &mut impl Rng) -> Result<GraphVector> {
    for _ in 0..INIT_ATTEMPTS {
        let w = match *init {
            InitGraph::ErdosRenyi {
                p_edge,
                weight_min,
                weight_max,
            } => (0..edge_count(d))
                .map(|_| {
                    if rng.random_bool(p_edge) {
                        rng.random_range(weight_min..=weight_max)
                    } else {
                        0.0
                    }
                })
                .collect(),
            InitGraph::Rbf {
                bandwidth,
                threshold,
            } => {
                let pos: Vec<(f64, f64)> = (0..d)
                    .map(|_| (rng.random::<f64>(), rng.random::<f64>()))
                    .collect();
                pairs(d)
                    .map(|(_, i, j)| {
                        let (dx, dy) = (pos[i].0 - pos[j].0, pos[i].1 - pos[j].1);
                        let w = (-(dx * dx + dy * dy) / (2.0 * bandwidth * bandwidth)).exp();
                        if w >= threshold {
                            w
                        } else {
                            0.0
                        }
                    })
                    .collect()
            }
        };
        let g = GraphVector::new(d, w)?;
        if g.is_connected() {
            return Ok(g);
        }
    }
    Err(Error::InitGraphFailed(INIT_ATTEMPTS))
}

#[derive(Debug, Clone)]
enum ModelState {
    Static,
    Ar(DMatrix<f64>),
    Transition {
        rate: f64,
        target: GraphVector,
    },
    Switching {
        times: Vec<usize>,
        library: Vec<GraphVector>,
    },
}

/// A realized dynamic model: the initial graph plus every random parameter
/// of the evolution, drawn once from the trajectory seed.
#[derive(Debug, Clone)]
pub struct Dynamics {
    initial: GraphVector,
    state: ModelState,
    w_max: f64,
}

impl Dynamics {
    pub fn new(cfg: &TrajectoryConfig) -> Result<Self> {
        cfg.validate()?;
        let mut rng = trajectory_rng(cfg.seed);
        let d = cfg.nodes;
        let initial = init_graph(&cfg.init, d, &mut rng)?;
        let state = match &cfg.model {
            GraphModel::Static => ModelState::Static,
            GraphModel::Ar {
                mixing,
                permutations,
            } => ModelState::Ar(random_ar_matrix(
                edge_count(d),
                *mixing,
                *permutations,
                &mut rng,
            )?),
            GraphModel::Transition { rate } => ModelState::Transition {
                rate: *rate,
                target: init_graph(&cfg.init, d, &mut rng)?,
            },
            GraphModel::Switching { library_size, .. } => {
                let mut library = vec![initial.clone()];
                for _ in 1..*library_size {
                    library.push(init_graph(&cfg.init, d, &mut rng)?);
                }
                ModelState::Switching {
                    times: cfg.model.switch_times(cfg.rounds),
                    library,
                }
            }
        };
        Ok(Self {
            initial,
            state,
            w_max: cfg.w_max,
        })
    }

    pub fn initial(&self) -> &GraphVector {
        &self.initial
    }

    /// Ground truth for round `t` (1-based) given round `t - 1`.
    pub fn evolve(&self, w: &GraphVector, t: usize) -> Result<GraphVector> {
        match &self.state {
            ModelState::Static => Ok(w.clone()),
            ModelState::Ar(a) => crate::predictor::predict_ar(w, a, self.w_max),
            ModelState::Transition { rate, target } => {
                crate::predictor::predict_transition(w, *rate, target, self.w_max)
            }
            ModelState::Switching { times, library } => match times.iter().position(|&s| s == t) {
                Some(k) => Ok(library[(k + 1) % library.len()].clone()),
                None => Ok(w.clone()),
            },
        }
    }

    /// The generating model as a learner-side predictor, when it has an
    /// explicit form.
    pub fn true_predictor(&self) -> Option<Predictor> {
        match &self.state {
            ModelState::Static => Some(Predictor::Identity),
            ModelState::Ar(a) => Some(Predictor::Ar { matrix: a.clone() }),
            ModelState::Transition { rate, target } => Some(Predictor::Transition {
                a: *rate,
                target: target.clone(),
            }),
            ModelState::Switching { .. } => None,
        }
    }

    pub fn ar_matrix(&self) -> Option<&DMatrix<f64>> {
        match &self.state {
            ModelState::Ar(a) => Some(a),
            _ => None,
        }
    }

    pub fn transition_target(&self) -> Option<(f64, &GraphVector)> {
        match &self.state {
            ModelState::Transition { rate, target } => Some((*rate, target)),
            _ => None,
        }
    }

    /// Ground-truth graphs for rounds `1..=rounds`.
    pub fn trajectory(&self, rounds: usize) -> Result<Vec<GraphVector>> {
        let mut out = Vec::with_capacity(rounds);
        let mut w = self.initial.clone();
        for t in 1..=rounds {
            if t > 1 {
                w = self.evolve(&w, t)?;
            }
            out.push(w.clone());
        }
        Ok(out)
    }
}

pub(crate) fn trajectory_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub(crate) fn signal_rng(seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    rng
}

/// Combinatorial Laplacian `diag(S w) - W`.
pub fn laplacian(w: &GraphVector) -> DMatrix<f64> {
    let mut l = -w.to_matrix();
    for (i, deg) in w.degrees().into_iter().enumerate() {
        l[(i, i)] = deg;
    }
    l
}

/// Moore-Penrose pseudo-inverse of a Laplacian, cutting eigenvalues `<= tol`.
pub fn laplacian_pinv(w: &GraphVector, tol: f64) -> DMatrix<f64> {
    let eig = SymmetricEigen::new(laplacian(w));
    let d = w.nodes();
    let mut out = DMatrix::zeros(d, d);
    for (i, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda > tol {
            let v = eig.eigenvectors.column(i);
            out += (v * v.transpose()) / lambda;
        }
    }
    out
}

/// One smooth signal on the graph.
pub fn sample_signal(w: &GraphVector, cfg: &SignalConfig, rng: &mut impl Rng) -> Result<Vec<f64>> {
    if let Some(node) = w.degrees().iter().position(|&x| !(x > 0.0)) {
        return Err(Error::IsolatedNode(node));
    }
    let d = w.nodes();
    let eig = SymmetricEigen::new(laplacian(w));
    let coeffs: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
    let noise: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
    let mut x = vec![0.0; d];
    for (i, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda > cfg.pseudo_inverse_tol {
            let scale = coeffs[i] / lambda.sqrt();
            for (xk, vk) in x.iter_mut().zip(eig.eigenvectors.column(i).iter()) {
                *xk += scale * vk;
            }
        }
    }
    for (xk, n) in x.iter_mut().zip(&noise) {
        *xk += cfg.noise_sigma * n;
    }
    Ok(x)
}

/// A simulated run: ground truth, raw signals and their distance vectors.
#[derive(Debug, Clone)]
pub struct Stream {
    pub dynamics: Dynamics,
    pub truth: Vec<GraphVector>,
    pub signals: Vec<Vec<f64>>,
    pub distances: Vec<DistanceVector>,
}

impl Stream {
    pub fn max_data_norm(&self) -> f64 {
        self.distances.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

pub fn generate_stream(cfg: &TrajectoryConfig, scfg: &SignalConfig) -> Result<Stream> {
    scfg.validate()?;
    let dynamics = Dynamics::new(cfg)?;
    let truth = dynamics.trajectory(cfg.rounds)?;
    let mut rng = signal_rng(cfg.seed);
    let signals = truth
        .iter()
        .map(|w| sample_signal(w, scfg, &mut rng))
        .collect::<Result<Vec<_>>>()?;
    let distances = signals
        .iter()
        .map(|x| DistanceVector::from_signal(x))
        .collect::<Result<Vec<_>>>()?;
    Ok(Stream {
        dynamics,
        truth,
        signals,
        distances,
    })
}
