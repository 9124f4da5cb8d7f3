//! High-accuracy minimization of a single round's objective by fixed-step
//! projected gradient descent.
//!
//! The step is `(4 beta + 2 alpha (d-1) / m^2)^-1`, the inverse Lipschitz
//! constant of the gradient on `{w : S w >= m}`. The degree floor `m`
//! starts at half the start point's minimum degree and is halved whenever a
//! step would leave that region, so each accepted step is a descent step.

use crate::error::{Error, Result};
use crate::graph::{project_in_place, DistanceVector, GraphVector};
use crate::objective::{gradient, ObjectiveParams};

pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_MAX_ITER: usize = 200_000;

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub w_star: GraphVector,
    pub iterations: usize,
    /// `||w - Pi(w - eta grad f(w))||_inf` at `w_star` with the final step.
    pub kkt_residual: f64,
    pub converged: bool,
    pub step: f64,
}

fn step_for(params: &ObjectiveParams, d: usize, floor: f64) -> f64 {
    1.0 / (4.0 * params.beta + 2.0 * params.alpha * (d as f64 - 1.0) / (floor * floor))
}

fn projected_step(w: &GraphVector, g: &[f64], eta: f64, w_max: f64) -> GraphVector {
    let mut next = w.clone();
    for (x, gk) in next.as_mut_slice().iter_mut().zip(g) {
        *x -= eta * gk;
    }
    project_in_place(&mut next, w_max);
    next
}

fn sup_distance(a: &GraphVector, b: &GraphVector) -> f64 {
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Solves from the default start (all weights `w_max / 2`).
pub fn solve(
    zbar: &DistanceVector,
    params: &ObjectiveParams,
    tol: f64,
    max_iter: usize,
) -> Result<SolveReport> {
    let d = nodes_for(zbar.len())?;
    solve_from(
        GraphVector::filled(d, params.w_max / 2.0)?,
        zbar,
        params,
        tol,
        max_iter,
    )
}

pub fn solve_from(
    start: GraphVector,
    zbar: &DistanceVector,
    params: &ObjectiveParams,
    tol: f64,
    max_iter: usize,
) -> Result<SolveReport> {
    solve_observed(start, zbar, params, tol, max_iter, |_| {})
}

/// [`solve_from`], calling `observe` on every iterate including the start.
pub fn solve_observed(
    start: GraphVector,
    zbar: &DistanceVector,
    params: &ObjectiveParams,
    tol: f64,
    max_iter: usize,
    mut observe: impl FnMut(&GraphVector),
) -> Result<SolveReport> {
    if !(tol > 0.0) || max_iter == 0 {
        return Err(Error::InvalidParameter(format!(
            "solver needs tol > 0 and max_iter >= 1 (got {tol}, {max_iter})"
        )));
    }
    params.validate()?;
    let d = start.nodes();
    let mut w = start;
    project_in_place(&mut w, params.w_max);
    let start_min = w.min_degree();
    if !(start_min > 0.0) {
        return Err(Error::InvalidParameter(
            "solver start has an isolated node".into(),
        ));
    }
    let mut floor = start_min / 2.0;
    let mut eta = step_for(params, d, floor);
    let mut iterations = 0;
    loop {
        observe(&w);
        let g = gradient(&w, zbar, params)?;
        let mut next = projected_step(&w, &g, eta, params.w_max);
        // keep both endpoints inside {S w >= floor}
        while next.min_degree() < floor {
            floor /= 2.0;
            eta = step_for(params, d, floor);
            next = projected_step(&w, &g, eta, params.w_max);
        }
        let residual = sup_distance(&w, &next);
        if residual <= tol {
            return Ok(SolveReport {
                w_star: w,
                iterations,
                kkt_residual: residual,
                converged: true,
                step: eta,
            });
        }
        if iterations == max_iter {
            return Ok(SolveReport {
                w_star: w,
                iterations,
                kkt_residual: residual,
                converged: false,
                step: eta,
            });
        }
        w = next;
        iterations += 1;
    }
}

/// Gradient-mapping residual of `w` with step `eta`, recomputed from scratch.
pub fn kkt_residual(
    w: &GraphVector,
    zbar: &DistanceVector,
    params: &ObjectiveParams,
    eta: f64,
) -> Result<f64> {
    let g = gradient(w, zbar, params)?;
    Ok(sup_distance(w, &projected_step(w, &g, eta, params.w_max)))
}

/// Per-round minimizers, each solve warm-started from the previous one.
pub fn comparator_sequence(
    zbars: &[DistanceVector],
    params: &ObjectiveParams,
    tol: f64,
    max_iter: usize,
) -> Result<Vec<SolveReport>> {
    let first = zbars
        .first()
        .ok_or_else(|| Error::InvalidParameter("empty aggregate sequence".into()))?;
    let d = nodes_for(first.len())?;
    let mut start = GraphVector::filled(d, params.w_max / 2.0)?;
    let mut out = Vec::with_capacity(zbars.len());
    for (round, zbar) in zbars.iter().enumerate() {
        let report = solve_from(start, zbar, params, tol, max_iter)?;
        if !report.converged {
            return Err(Error::NotConverged {
                round: round + 1,
                residual: report.kkt_residual,
            });
        }
        start = report.w_star.clone();
        out.push(report);
    }
    Ok(out)
}

pub(crate) fn nodes_for(p: usize) -> Result<usize> {
    // p = d(d-1)/2  =>  d = (1 + sqrt(1 + 8p)) / 2
    let d = ((1.0 + (1.0 + 8.0 * p as f64).sqrt()) / 2.0).round() as usize;
    if d < 2 || crate::graph::edge_count(d) != p {
        return Err(Error::InvalidParameter(format!(
            "{p} is not a valid edge count"
        )));
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::loss;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn params(alpha: f64, beta: f64, w_max: f64) -> ObjectiveParams {
        ObjectiveParams {
            alpha,
            beta,
            gamma: 0.0,
            w_max,
            deg_min: 1.0,
        }
    }

    #[test]
    fn nodes_from_edges() {
        assert_eq!(nodes_for(1).unwrap(), 2);
        assert_eq!(nodes_for(190).unwrap(), 20);
        assert!(nodes_for(4).is_err());
        assert!(nodes_for(0).is_err());
    }

    #[test]
    fn d2_closed_form() {
        let p = params(2.0, 1.0, 5.0);
        let report = solve(&DistanceVector::zeros(1), &p, 1e-10, DEFAULT_MAX_ITER).unwrap();
        assert!(report.converged);
        assert!((report.w_star.as_slice()[0] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn d2_huge_distance_matches_grid_search() {
        let p = params(1.0, 1.0, 0.5);
        let z = DistanceVector::new(vec![1e3]).unwrap();
        let report = solve(&z, &p, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        assert!(report.converged);
        assert!(report.kkt_residual <= DEFAULT_TOL);
        // oracle: fine grid over (0, w_max]
        let n = 200_000;
        let best = (1..=n)
            .map(|k| p.w_max * k as f64 / n as f64)
            .min_by(|a, b| {
                let fa = loss(&GraphVector::new(2, vec![*a]).unwrap(), &z, &p).unwrap();
                let fb = loss(&GraphVector::new(2, vec![*b]).unwrap(), &z, &p).unwrap();
                fa.partial_cmp(&fb).unwrap()
            })
            .unwrap();
        assert!((report.w_star.as_slice()[0] - best).abs() <= 2.0 * p.w_max / n as f64);
    }

    #[test]
    fn warm_restart_is_immediate() {
        let p = params(2.0, 0.5, 3.0);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let z = DistanceVector::new((0..10).map(|_| rng.random_range(0.0..2.0)).collect()).unwrap();
        let first = solve(&z, &p, 1e-8, DEFAULT_MAX_ITER).unwrap();
        assert!(first.converged);
        let again = solve_from(first.w_star.clone(), &z, &p, 1e-8, DEFAULT_MAX_ITER).unwrap();
        assert!(again.iterations <= 1, "{}", again.iterations);
    }

    #[test]
    fn loss_never_increases() {
        let p = params(2.0, 0.2, 2.0);
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let z = DistanceVector::new((0..15).map(|_| rng.random_range(0.0..4.0)).collect()).unwrap();
        let mut losses = Vec::new();
        let start = GraphVector::filled(6, 1.0).unwrap();
        let report = solve_observed(start, &z, &p, 1e-10, DEFAULT_MAX_ITER, |w| {
            losses.push(loss(w, &z, &p).unwrap())
        })
        .unwrap();
        assert!(report.converged);
        assert!(losses.len() > 10);
        for pair in losses.windows(2) {
            assert!(pair[1] <= pair[0] + 1e-12, "{} > {}", pair[1], pair[0]);
        }
    }

    #[test]
    fn comparator_sequence_behaviour() {
        let p = params(2.0, 0.5, 3.0);
        let z = DistanceVector::new(vec![0.5, 1.0, 2.0]).unwrap();
        let seq = comparator_sequence(
            &[z.clone(), z.clone(), z.clone()],
            &p,
            1e-9,
            DEFAULT_MAX_ITER,
        )
        .unwrap();
        for r in &seq[1..] {
            assert!(r.w_star.distance(&seq[0].w_star) <= 1e-7);
        }
        let single =
            comparator_sequence(std::slice::from_ref(&z), &p, 1e-9, DEFAULT_MAX_ITER).unwrap();
        assert_eq!(single[0], solve(&z, &p, 1e-9, DEFAULT_MAX_ITER).unwrap());
        assert!(comparator_sequence(&[], &p, 1e-9, 10).is_err());
        assert!(matches!(
            comparator_sequence(&[z], &p, 1e-14, 1),
            Err(Error::NotConverged { round: 1, .. })
        ));
    }
}
