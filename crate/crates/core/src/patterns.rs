//! Comment patterns: density-based clustering of one account's comments over
//! a precomputed distance matrix, and the Gini inequality of cluster sizes.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;
use crate::textsim::DistanceMatrix;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PatternError {
    #[error("eps must lie in (0, 1]")]
    InvalidEps,
    #[error("min_samples must be at least 1")]
    InvalidMinSamples,
    #[error("gini needs at least one value")]
    EmptyInput,
    #[error("gini is undefined when every value is zero")]
    AllZero,
    #[error("gini needs non-negative finite values")]
    NegativeValue,
}

/// DBSCAN parameters. Neighborhoods are `{j : d(i, j) <= eps}` and include
/// the point itself.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClusteringParams<T> {
    eps: T,
    min_samples: usize,
}

impl<T: Scalar> ClusteringParams<T> {
    pub fn new(eps: T, min_samples: usize) -> Result<Self, PatternError> {
        if !(eps > T::zero() && eps <= T::one()) {
            return Err(PatternError::InvalidEps);
        }
        if min_samples == 0 {
            return Err(PatternError::InvalidMinSamples);
        }
        Ok(Self { eps, min_samples })
    }

    pub fn eps(&self) -> T {
        self.eps
    }

    pub fn min_samples(&self) -> usize {
        self.min_samples
    }
}

impl<T: Scalar> Default for ClusteringParams<T> {
    fn default() -> Self {
        Self {
            eps: T::one().half(),
            min_samples: 1,
        }
    }
}

/// Pattern label per comment, numbered by first occurrence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternAssignment {
    labels: Vec<usize>,
    pattern_count: usize,
}

impl PatternAssignment {
    /// Renumbers arbitrary labels by order of first occurrence.
    pub fn from_raw_labels(raw: &[usize]) -> Self {
        let mut mapping = std::collections::HashMap::new();
        let labels = raw
            .iter()
            .map(|r| {
                let next = mapping.len();
                *mapping.entry(*r).or_insert(next)
            })
            .collect();
        Self {
            labels,
            pattern_count: mapping.len(),
        }
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn pattern_count(&self) -> usize {
        self.pattern_count
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// DBSCAN over precomputed distances. Points left as noise become singleton
/// patterns, so every comment belongs to exactly one pattern.
pub fn cluster_comments<T: Scalar>(
    distances: &DistanceMatrix<T>,
    params: &ClusteringParams<T>,
) -> PatternAssignment {
    let n = distances.len();
    let neighbors: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            distances
                .row(i)
                .iter()
                .enumerate()
                .filter(|(_, &d)| d <= params.eps)
                .map(|(j, _)| j)
                .collect()
        })
        .collect();
    let is_core: Vec<bool> = neighbors
        .iter()
        .map(|nb| nb.len() >= params.min_samples)
        .collect();

    let mut raw: Vec<Option<usize>> = vec![None; n];
    let mut next_label = 0;
    let mut queue = VecDeque::new();
    for seed in 0..n {
        if raw[seed].is_some() || !is_core[seed] {
            continue;
        }
        raw[seed] = Some(next_label);
        queue.push_back(seed);
        while let Some(p) = queue.pop_front() {
            for &q in &neighbors[p] {
                if raw[q].is_none() {
                    raw[q] = Some(next_label);
                    if is_core[q] {
                        queue.push_back(q);
                    }
                }
            }
        }
        next_label += 1;
    }

    let raw: Vec<usize> = raw
        .into_iter()
        .map(|l| {
            l.unwrap_or_else(|| {
                next_label += 1;
                next_label - 1
            })
        })
        .collect();
    PatternAssignment::from_raw_labels(&raw)
}

/// Number of comments in each pattern, indexed by pattern label.
pub fn pattern_sizes(assignment: &PatternAssignment) -> Vec<usize> {
    let mut sizes = vec![0; assignment.pattern_count];
    for &l in &assignment.labels {
        sizes[l] += 1;
    }
    sizes
}

/// Relative mean absolute difference `ΣᵢΣⱼ|xᵢ − xⱼ| / (2n²x̄)`.
///
/// Evaluated in O(n log n) from the sorted values as
/// `Σₖ (2k − n − 1)·x₍ₖ₎ / (n·Σx)`.
pub fn gini<T: Scalar>(values: &[T]) -> Result<T, PatternError> {
    if values.is_empty() {
        return Err(PatternError::EmptyInput);
    }
    if values.iter().any(|v| !(*v >= T::zero())) {
        return Err(PatternError::NegativeValue);
    }
    let total = values.iter().fold(T::zero(), |acc, &v| acc + v);
    if total == T::zero() {
        return Err(PatternError::AllZero);
    }
    if values.iter().all(|v| *v == values[0]) {
        return Ok(T::zero());
    }

    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    let n = sorted.len();
    let mut weighted = T::zero();
    for (k, &x) in sorted.iter().enumerate() {
        let rank = 2 * (k + 1);
        if rank > n + 1 {
            weighted = weighted + T::from_count(rank - n - 1) * x;
        } else {
            weighted = weighted - T::from_count(n + 1 - rank) * x;
        }
    }
    let g = weighted / (T::from_count(n) * total);
    Ok(if g < T::zero() { T::zero() } else { g })
}
