//! The per-round smoothness objective
//!
//! `f_t(w) = 2 <zbar, w> - alpha * sum_i log((S w)_i) + 2 beta ||w||^2`
//!
//! together with its gradient `2 zbar + 4 beta w - alpha S^T (S w)^-1`, the
//! Hessian action, and the step-size and gradient-bound formulas that go
//! with them. The quadratic coefficient is `2 beta` so that the loss and the
//! `4 beta w` gradient term agree.

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::graph::{degree_adjoint, degree_operator_norm, DistanceVector, GraphVector};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ObjectiveParams {
    /// Log-degree barrier weight.
    pub alpha: f64,
    /// Quadratic (edge density) weight.
    pub beta: f64,
    /// Forgetting factor of the distance aggregate, in `[0, 1)`.
    pub gamma: f64,
    /// Upper bound of every edge weight.
    pub w_max: f64,
    /// Degree floor used by the fixed step size and the gradient bound.
    pub deg_min: f64,
}

impl Default for ObjectiveParams {
    fn default() -> Self {
        Self {
            alpha: 2.0,
            beta: 0.5,
            gamma: 0.9,
            w_max: 2.0,
            deg_min: 0.1,
        }
    }
}

impl ObjectiveParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("w_max", self.w_max),
            ("deg_min", self.deg_min),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be finite and > 0, got {v}"
                )));
            }
        }
        if !(0.0..1.0).contains(&self.gamma) {
            return Err(Error::InvalidParameter(format!(
                "gamma must lie in [0, 1), got {}",
                self.gamma
            )));
        }
        Ok(())
    }
}

fn positive_degrees(w: &GraphVector) -> Result<Vec<f64>> {
    let deg = w.degrees();
    if let Some((node, &degree)) = deg.iter().enumerate().find(|(_, &x)| !(x > 0.0)) {
        return Err(Error::NonPositiveDegree { node, degree });
    }
    Ok(deg)
}

/// Objective value; `+inf` when some node has non-positive degree.
pub fn loss(w: &GraphVector, zbar: &DistanceVector, params: &ObjectiveParams) -> Result<f64> {
    check_len(w.len(), zbar.len())?;
    let deg = w.degrees();
    if deg.iter().any(|&x| !(x > 0.0)) {
        return Ok(f64::INFINITY);
    }
    let data: f64 = w
        .as_slice()
        .iter()
        .zip(zbar.as_slice())
        .map(|(a, b)| a * b)
        .sum();
    let barrier: f64 = deg.iter().map(|x| x.ln()).sum();
    let quad: f64 = w.as_slice().iter().map(|x| x * x).sum();
    Ok(2.0 * data - params.alpha * barrier + 2.0 * params.beta * quad)
}

pub fn gradient(
    w: &GraphVector,
    zbar: &DistanceVector,
    params: &ObjectiveParams,
) -> Result<Vec<f64>> {
    check_len(w.len(), zbar.len())?;
    let deg = positive_degrees(w)?;
    let inv: Vec<f64> = deg.iter().map(|x| 1.0 / x).collect();
    let barrier = degree_adjoint(&inv, w.nodes())?;
    Ok(w.as_slice()
        .iter()
        .zip(zbar.as_slice())
        .zip(&barrier)
        .map(|((wk, zk), bk)| 2.0 * zk + 4.0 * params.beta * wk - params.alpha * bk)
        .collect())
}

/// `H v = 4 beta v + alpha S^T ((S w)^-2 * (S v))`.
pub fn hessian_apply(w: &GraphVector, params: &ObjectiveParams, v: &[f64]) -> Result<Vec<f64>> {
    check_len(w.len(), v.len())?;
    let deg = positive_degrees(w)?;
    let d = w.nodes();
    // S v, reusing the graph type's degree kernel
    let sv = GraphVector::new(d, v.to_vec())?.degrees();
    let scaled: Vec<f64> = sv.iter().zip(&deg).map(|(s, g)| s / (g * g)).collect();
    let barrier = degree_adjoint(&scaled, d)?;
    Ok(v.iter()
        .zip(&barrier)
        .map(|(vk, bk)| 4.0 * params.beta * vk + params.alpha * bk)
        .collect())
}

/// One-step estimate of the time derivative of the gradient, `2 (zbar_now - zbar_prev)`.
///
/// Only the data term of the gradient depends on time, so this is exact up
/// to the backward difference. The sample interval is folded in.
pub fn temporal_gradient_diff(
    zbar_now: &DistanceVector,
    zbar_prev: &DistanceVector,
) -> Result<Vec<f64>> {
    check_len(zbar_now.len(), zbar_prev.len())?;
    Ok(zbar_now
        .as_slice()
        .iter()
        .zip(zbar_prev.as_slice())
        .map(|(a, b)| 2.0 * (a - b))
        .collect())
}

/// Upper bound `L` on the gradient norm over the feasible set, given data
/// norm at most `b_z` and degrees at least `params.deg_min`.
pub fn gradient_bound(params: &ObjectiveParams, d: usize, b_z: f64) -> f64 {
    let df = d as f64;
    2.0 * b_z
        + 2.0 * 2f64.sqrt() * params.beta * (df * (df - 1.0)).sqrt() * params.w_max
        + params.alpha * degree_operator_norm(d) * df.sqrt() / params.deg_min
}

fn step_for_degree(params: &ObjectiveParams, d: usize, degree: f64) -> f64 {
    1.0 / (4.0 * params.beta + 2.0 * params.alpha * (d as f64 - 1.0) / (degree * degree))
}

/// `(4 beta + 2 alpha (d - 1) / deg_min^2)^-1`
pub fn step_size_fixed(params: &ObjectiveParams, d: usize) -> f64 {
    step_for_degree(params, d, params.deg_min)
}

/// Same formula with `deg_min` replaced by the current minimum degree.
pub fn step_size_adaptive(w: &GraphVector, params: &ObjectiveParams) -> Result<f64> {
    let deg = w.degrees();
    let (node, min) = deg
        .iter()
        .copied()
        .enumerate()
        .fold(
            (0, f64::INFINITY),
            |acc, (i, x)| if x < acc.1 { (i, x) } else { acc },
        );
    if !(min > 0.0) {
        return Err(Error::NonPositiveDegree { node, degree: min });
    }
    Ok(step_for_degree(params, w.nodes(), min))
}
