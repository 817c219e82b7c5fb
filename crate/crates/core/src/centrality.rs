//! Katz centrality on the collapsed adjacency view.
//!
//! For a node `i` the score is the damped count of all walks ending at `i`:
//! `C(i) = sum_{k>=1} sum_j alpha^k (A^k)_{ji}`. The series is evaluated as
//! the fixed point of `x <- alpha * A^T (x + 1)`, which converges whenever
//! `alpha * lambda_max < 1`. The attenuation is therefore expressed relative
//! to the spectral radius: `alpha = alpha_scale / lambda_max`.

use std::cmp::Ordering;

use thiserror::Error;

use crate::graph::{EntityType, KnowledgeGraph};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CentralityError {
    #[error("iteration did not converge within {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error("alpha_scale must lie strictly between 0 and 1, got {0}")]
    InvalidAlphaScale(String),
    #[error("Katz centrality needs at least one node")]
    EmptyGraph,
}

pub const DEFAULT_ALPHA_SCALE: f64 = 0.85;
pub const DEFAULT_MAX_ITERS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KatzParams<T> {
    alpha_scale: T,
    pub normalize: bool,
    /// Bound on the L-infinity distance between successive iterates.
    pub tol: T,
    pub max_iters: usize,
}

impl<T: Scalar> KatzParams<T> {
    pub fn new(alpha_scale: T) -> Result<Self, CentralityError> {
        if !(alpha_scale > T::zero() && alpha_scale < T::one()) {
            return Err(CentralityError::InvalidAlphaScale(alpha_scale.to_string()));
        }
        Ok(KatzParams {
            alpha_scale,
            normalize: true,
            tol: T::KATZ_TOL,
            max_iters: DEFAULT_MAX_ITERS,
        })
    }

    pub fn alpha_scale(&self) -> T {
        self.alpha_scale
    }

    pub fn normalized(mut self, on: bool) -> Self {
        self.normalize = on;
        self
    }

    pub fn with_tol(mut self, tol: T) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }
}

impl<T: Scalar> Default for KatzParams<T> {
    fn default() -> Self {
        KatzParams::new(T::lit(DEFAULT_ALPHA_SCALE)).expect("default alpha_scale is in (0, 1)")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CentralityResult<T> {
    /// Indexed by node index of the graph the result was computed on.
    pub scores: Vec<T>,
    pub alpha_used: T,
    pub lambda_max: T,
    pub iterations: usize,
    pub normalized: bool,
}

/// Largest eigenvalue of the collapsed adjacency by power iteration.
///
/// Iterates on `A + I` from the all-ones vector. The shift makes the Perron
/// root strictly dominant even on bipartite graphs, where `A` alone has
/// `-lambda_max` as an equally large eigenvalue and the iterates oscillate.
/// Stops once the Rayleigh quotient moves by less than `tol` and the
/// extrapolated remaining change is below `tol` as well.
pub fn spectral_radius<T: Scalar>(
    graph: &KnowledgeGraph,
    tol: T,
    max_iters: usize,
) -> Result<T, CentralityError> {
    let adj = graph.adjacency();
    let n = adj.node_count();
    if adj.edge_count() == 0 {
        return Ok(T::zero());
    }
    let mut x = vec![T::one() / T::from_usize(n).unwrap().sqrt(); n];
    let mut y = vec![T::zero(); n];
    let mut previous: Option<T> = None;
    let mut last_delta: Option<T> = None;
    for _ in 0..max_iters {
        adj.mul_vec(&x, &mut y);
        // x is unit length, so x.(A x) is the Rayleigh quotient of A.
        let mut rq = T::zero();
        let mut norm2 = T::zero();
        for (yi, &xi) in y.iter_mut().zip(&x) {
            rq = rq + xi * *yi;
            *yi = *yi + xi;
            norm2 = norm2 + *yi * *yi;
        }
        let norm = norm2.sqrt();
        for (xi, &yi) in x.iter_mut().zip(&y) {
            *xi = yi / norm;
        }
        if let Some(p) = previous {
            let delta = (rq - p).abs();
            if delta < tol && remaining_error(delta, last_delta) < tol {
                return Ok(rq);
            }
            last_delta = Some(delta);
        }
        previous = Some(rq);
    }
    Err(CentralityError::NoConvergence {
        iterations: max_iters,
    })
}

/// Distance still to go under geometric convergence, extrapolated from
/// the last two increments. Once the increments stop shrinking the estimate
/// is at the rounding floor and the latest increment is returned as is.
fn remaining_error<T: Scalar>(delta: T, previous: Option<T>) -> T {
    match previous {
        Some(p) if delta < p => {
            let ratio = delta / p;
            delta * ratio / (T::one() - ratio)
        }
        Some(_) => delta,
        None => T::infinity(),
    }
}

/// Katz scores for every node.
///
/// An edgeless graph has no spectral radius to scale by; `alpha_scale` is
/// then used directly as `alpha` and every score is zero.
pub fn katz_centrality<T: Scalar>(
    graph: &KnowledgeGraph,
    params: &KatzParams<T>,
) -> Result<CentralityResult<T>, CentralityError> {
    let adj = graph.adjacency();
    let n = adj.node_count();
    if n == 0 {
        return Err(CentralityError::EmptyGraph);
    }
    // alpha inherits the relative error of lambda_max, so resolve it well
    // below the fixed-point tolerance.
    let lambda_tol = (params.tol * T::lit(1e-2)).max(T::epsilon() * T::lit(64.0));
    let lambda_max = spectral_radius(graph, lambda_tol, params.max_iters)?;
    let alpha = if lambda_max > T::zero() {
        params.alpha_scale / lambda_max
    } else {
        params.alpha_scale
    };

    let mut x = vec![T::one(); n];
    let mut shifted = vec![T::zero(); n];
    let mut next = vec![T::zero(); n];
    let mut iterations = 0;
    loop {
        if iterations == params.max_iters {
            return Err(CentralityError::NoConvergence { iterations });
        }
        iterations += 1;
        for (s, &xi) in shifted.iter_mut().zip(&x) {
            *s = xi + T::one();
        }
        // A is symmetric, so A^T (x + 1) = A (x + 1).
        adj.mul_vec(&shifted, &mut next);
        let mut delta = T::zero();
        for (ni, &xi) in next.iter_mut().zip(&x) {
            *ni = alpha * *ni;
            delta = delta.max((*ni - xi).abs());
        }
        std::mem::swap(&mut x, &mut next);
        if delta < params.tol {
            break;
        }
    }

    if params.normalize {
        let norm = x.iter().fold(T::zero(), |acc, &v| acc + v * v).sqrt();
        if norm > T::zero() {
            x.iter_mut().for_each(|v| *v = *v / norm);
        }
    }
    Ok(CentralityResult {
        scores: x,
        alpha_used: alpha,
        lambda_max,
        iterations,
        normalized: params.normalize,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankedEntity<'g, T> {
    pub rank: usize,
    pub id: &'g str,
    pub etype: EntityType,
    pub score: T,
}

/// Top `top_k` nodes by descending score, ties broken by ascending id.
///
/// With a type filter the ranking is recomputed within that type only,
/// starting again from rank 1.
pub fn rank<'g, T: Scalar>(
    result: &CentralityResult<T>,
    graph: &'g KnowledgeGraph,
    top_k: usize,
    filter: Option<EntityType>,
) -> Vec<RankedEntity<'g, T>> {
    assert_eq!(
        result.scores.len(),
        graph.node_count(),
        "centrality result computed on a different graph"
    );
    let mut order: Vec<usize> = (0..graph.node_count())
        .filter(|&i| filter.is_none_or(|t| graph.entity(i).etype() == t))
        .collect();
    // Node indices follow id order, so index order is the id tie-break.
    order.sort_by(|&a, &b| {
        result.scores[b]
            .partial_cmp(&result.scores[a])
            .unwrap_or(Ordering::Equal)
            .then(a.cmp(&b))
    });
    order
        .into_iter()
        .take(top_k)
        .enumerate()
        .map(|(pos, i)| {
            let e = graph.entity(i);
            RankedEntity {
                rank: pos + 1,
                id: e.id(),
                etype: e.etype(),
                score: result.scores[i],
            }
        })
        .collect()
}
