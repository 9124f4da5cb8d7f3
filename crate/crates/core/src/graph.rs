//! Vectorized undirected graphs.
//!
//! A graph on `d` nodes is stored as the `p = d(d-1)/2` upper-triangle
//! weights of its adjacency matrix, ordered row-major over pairs `(i, j)`
//! with `i < j`. The degree operator `S` (with `S w = W 1`) and its adjoint
//! are applied matrix-free.

use nalgebra::DMatrix;

use crate::error::{check_len, Error, Result};

/// Absolute tolerance for symmetry and zero-diagonal checks on dense input.
pub const ADJACENCY_TOL: f64 = 1e-9;

/// Number of upper-triangle pairs for `d` nodes.
pub fn edge_count(d: usize) -> usize {
    d * d.saturating_sub(1) / 2
}

fn check_nodes(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::TooFewNodes(d));
    }
    Ok(())
}

/// Linear index of the pair `(i, j)`, `i < j`.
pub fn pair_index(d: usize, i: usize, j: usize) -> Result<usize> {
    check_nodes(d)?;
    if i >= j || j >= d {
        return Err(Error::PairOutOfRange { i, j, d });
    }
    Ok(i * d - i * (i + 1) / 2 + (j - i - 1))
}

/// Inverse of [`pair_index`].
pub fn index_pair(d: usize, k: usize) -> Result<(usize, usize)> {
    check_nodes(d)?;
    if k >= edge_count(d) {
        return Err(Error::IndexOutOfRange { k, d });
    }
    let mut start = 0;
    for i in 0..d - 1 {
        let row_len = d - 1 - i;
        if k < start + row_len {
            return Ok((i, i + 1 + (k - start)));
        }
        start += row_len;
    }
    unreachable!("k < p always lands in some row")
}

/// Iterator over `(k, i, j)` in storage order.
pub fn pairs(d: usize) -> impl Iterator<Item = (usize, usize, usize)> {
    (0..d)
        .flat_map(move |i| (i + 1..d).map(move |j| (i, j)))
        .enumerate()
        .map(|(k, (i, j))| (k, i, j))
}

/// Upper-triangle edge weights of a graph on `d` nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphVector {
    d: usize,
    w: Vec<f64>,
}

impl GraphVector {
    pub fn new(d: usize, w: Vec<f64>) -> Result<Self> {
        check_nodes(d)?;
        check_len(edge_count(d), w.len())?;
        Ok(Self { d, w })
    }

    pub fn zeros(d: usize) -> Result<Self> {
        Self::filled(d, 0.0)
    }

    pub fn filled(d: usize, value: f64) -> Result<Self> {
        check_nodes(d)?;
        Ok(Self {
            d,
            w: vec![value; edge_count(d)],
        })
    }

    pub fn nodes(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.w
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.w
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.w
    }

    pub fn is_feasible(&self, w_max: f64) -> bool {
        self.w.iter().all(|&x| (0.0..=w_max).contains(&x))
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.d, self.d);
        for (k, i, j) in pairs(self.d) {
            m[(i, j)] = self.w[k];
            m[(j, i)] = self.w[k];
        }
        m
    }

    /// Extracts the upper triangle of a symmetric, zero-diagonal,
    /// nonnegative matrix.
    pub fn from_matrix(m: &DMatrix<f64>) -> Result<Self> {
        let d = m.nrows();
        if m.ncols() != d {
            return Err(Error::InvalidAdjacency(format!(
                "matrix is {}x{}, not square",
                d,
                m.ncols()
            )));
        }
        check_nodes(d)?;
        for i in 0..d {
            if m[(i, i)].abs() > ADJACENCY_TOL {
                return Err(Error::InvalidAdjacency(format!(
                    "diagonal entry ({i}, {i}) = {}",
                    m[(i, i)]
                )));
            }
        }
        let mut w = Vec::with_capacity(edge_count(d));
        for (_, i, j) in pairs(d) {
            let (a, b) = (m[(i, j)], m[(j, i)]);
            if !a.is_finite() || (a - b).abs() > ADJACENCY_TOL {
                return Err(Error::InvalidAdjacency(format!(
                    "entries ({i}, {j}) = {a} and ({j}, {i}) = {b} differ"
                )));
            }
            if a < -ADJACENCY_TOL {
                return Err(Error::InvalidAdjacency(format!(
                    "negative weight {a} at ({i}, {j})"
                )));
            }
            w.push(a.max(0.0));
        }
        Ok(Self { d, w })
    }

    /// Node degrees `S w`.
    pub fn degrees(&self) -> Vec<f64> {
        let mut deg = vec![0.0; self.d];
        for (k, i, j) in pairs(self.d) {
            deg[i] += self.w[k];
            deg[j] += self.w[k];
        }
        deg
    }

    pub fn min_degree(&self) -> f64 {
        self.degrees().into_iter().fold(f64::INFINITY, f64::min)
    }

    /// True when every node is reachable through positive-weight edges.
    pub fn is_connected(&self) -> bool {
        let mut adj = vec![Vec::new(); self.d];
        for (k, i, j) in pairs(self.d) {
            if self.w[k] > 0.0 {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
        let mut seen = vec![false; self.d];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(i) = stack.pop() {
            for &j in &adj[i] {
                if !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        seen.into_iter().all(|x| x)
    }

    pub fn norm(&self) -> f64 {
        norm(&self.w)
    }

    pub fn distance(&self, other: &GraphVector) -> f64 {
        self.w
            .iter()
            .zip(&other.w)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

/// Adjoint of the degree operator: entry `(i, j)` is `v_i + v_j`.
pub fn degree_adjoint(v: &[f64], d: usize) -> Result<Vec<f64>> {
    check_nodes(d)?;
    check_len(d, v.len())?;
    Ok(pairs(d).map(|(_, i, j)| v[i] + v[j]).collect())
}

/// Closed-form spectral norm of `S`, `sqrt(2(d-1))`.
pub fn degree_operator_norm(d: usize) -> f64 {
    (2.0 * (d as f64 - 1.0)).sqrt()
}

/// Dense `d x p` matrix of `S`. Only meant for checks on small `d`.
pub fn degree_operator_matrix(d: usize) -> Result<DMatrix<f64>> {
    check_nodes(d)?;
    let mut s = DMatrix::zeros(d, edge_count(d));
    for (k, i, j) in pairs(d) {
        s[(i, k)] = 1.0;
        s[(j, k)] = 1.0;
    }
    Ok(s)
}

/// Squared pairwise differences of a node signal, one entry per pair.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceVector(Vec<f64>);

impl DistanceVector {
    pub fn new(z: Vec<f64>) -> Result<Self> {
        if let Some(k) = z.iter().position(|&x| !(x >= 0.0) || !x.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "distance entry {k} is {} (must be finite and nonnegative)",
                z[k]
            )));
        }
        Ok(Self(z))
    }

    pub fn zeros(p: usize) -> Self {
        Self(vec![0.0; p])
    }

    pub fn from_signal(x: &[f64]) -> Result<Self> {
        let d = x.len();
        check_nodes(d)?;
        Ok(Self(
            pairs(d)
                .map(|(_, i, j)| (x[i] - x[j]) * (x[i] - x[j]))
                .collect(),
        ))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        norm(&self.0)
    }
}

/// Clamps every entry into `[0, w_max]`, the Euclidean projection onto the box.
pub fn project_box(v: &[f64], d: usize, w_max: f64) -> Result<GraphVector> {
    GraphVector::new(d, v.iter().map(|&x| x.clamp(0.0, w_max)).collect())
}

pub(crate) fn project_in_place(w: &mut GraphVector, w_max: f64) {
    for x in w.as_mut_slice() {
        *x = x.clamp(0.0, w_max);
    }
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[cfg(test)]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Largest singular value by power iteration on `M^T M`.
pub fn spectral_norm(m: &DMatrix<f64>, tol: f64, max_iter: usize) -> f64 {
    let n = m.ncols();
    if n == 0 || m.nrows() == 0 {
        return 0.0;
    }
    // Deterministic, generic start vector.
    let mut v = nalgebra::DVector::from_fn(n, |i, _| 1.0 + (i as f64 * 0.618_033_988_7).fract());
    v /= v.norm();
    let mut sigma: f64 = 0.0;
    for _ in 0..max_iter {
        let mv = m * &v;
        let next = m.transpose() * &mv;
        let nn = next.norm();
        if nn == 0.0 {
            return 0.0;
        }
        v = next / nn;
        let est = (m * &v).norm();
        let done = (est - sigma).abs() <= tol * est.max(1.0);
        sigma = est;
        if done {
            break;
        }
    }
    sigma
}
