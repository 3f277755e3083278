//! Result type shared by every δ-type minimization.

use serde::{Deserialize, Serialize};

/// Additive slack used when a computed minimum is compared to a bound.
pub const BOUND_SLACK: f64 = 1e-9;

/// Two candidate words tie when their values agree within this.
pub const TIE_TOL: f64 = 1e-12;

/// Two group elements count as distinct when they are farther apart than this.
pub const DISTINCT_TOL: f64 = 1e-8;

/// Which word attained the minimum.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Argmin {
    /// Index pair {i, j} of a finite set, i < j.
    Pair { i: usize, j: usize },
    /// Exponent of a single generator.
    Power { n: u64 },
    /// Exponents of a two-letter word a^j b^k.
    Word2 { j: i64, k: i64 },
    /// Exponents of a three-letter word a^j b^k c^l.
    Word3 { j: i64, k: i64, l: i64 },
    /// Integer coefficients of a lattice combination.
    Lattice { coeffs: Vec<i64> },
}

/// Whether the attached bound is proven or merely conjectured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Proven,
    Conjectural,
}

/// Outcome of a δ-type minimization together with the applicable bound.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchResult {
    /// The minimal displacement found.
    pub delta: f64,
    /// Word attaining the minimum; ties resolve to the first word in the
    /// canonical enumeration order.
    pub argmin: Argmin,
    /// Number of displacement evaluations performed.
    pub evaluations: u64,
    /// The applicable upper bound for `delta`.
    pub bound: f64,
    pub bound_kind: BoundKind,
    /// delta <= bound + BOUND_SLACK.
    pub satisfied: bool,
    /// Set when the search hit a numerically-zero word (duplicate elements or
    /// a relation inside the box); `delta` is clamped to 0 in that case.
    pub degenerate: bool,
}

impl SearchResult {
    pub(crate) fn finish(
        raw_min: f64,
        argmin: Argmin,
        evaluations: u64,
        bound: f64,
        bound_kind: BoundKind,
        zero_tol: f64,
    ) -> Self {
        let degenerate = raw_min <= zero_tol;
        let delta = if degenerate { 0.0 } else { raw_min };
        SearchResult {
            delta,
            argmin,
            evaluations,
            bound,
            bound_kind,
            satisfied: delta <= bound + BOUND_SLACK,
            degenerate,
        }
    }
}

/// Streaming tracker for (minimum, first argmin within tie tolerance) along a
/// fixed enumeration order. Candidates within `TIE_TOL` of the running minimum
/// are retained, so the final argmin is exactly the first word in enumeration
/// order attaining the global minimum within the tolerance.
#[derive(Debug, Clone)]
pub(crate) struct MinTracker<K> {
    pub min: f64,
    /// (sequence index, key, value) of surviving tie candidates, ascending.
    candidates: Vec<(u64, K, f64)>,
}

impl<K: Clone> MinTracker<K> {
    pub fn new() -> Self {
        Self {
            min: f64::INFINITY,
            candidates: Vec::new(),
        }
    }

    pub fn push(&mut self, order: u64, key: K, value: f64) {
        if value < self.min {
            self.min = value;
            self.candidates.retain(|&(_, _, v)| v <= self.min + TIE_TOL);
        }
        if value <= self.min + TIE_TOL {
            self.candidates.push((order, key, value));
        }
    }

    pub fn merge(mut self, other: Self) -> Self {
        self.min = self.min.min(other.min);
        self.candidates.extend(other.candidates);
        self.candidates
            .retain(|&(_, _, v)| v <= self.min + TIE_TOL);
        self
    }

    /// First candidate in enumeration order attaining min within TIE_TOL.
    pub fn argmin(&self) -> Option<K> {
        self.candidates
            .iter()
            .filter(|&&(_, _, v)| v <= self.min + TIE_TOL)
            .min_by_key(|&&(order, _, _)| order)
            .map(|(_, k, _)| k.clone())
    }
}
