//! Finite groups acting on finite metric spaces, in exact rational
//! arithmetic.
//!
//! Haar measure degenerates to normalized counting measure here, so every
//! quantity — φ, the distribution function, δ over subsets, the word-box
//! minima — is computed by enumeration with no tolerance at all. This module
//! is the ground-truth oracle for the floating-point machinery: the
//! separation inequality Φ(δ/2) ≤ |𝒜|⁻¹ (and Φ(δ) ≤ |𝒜|⁻¹ on
//! nonarchimedean spaces) is checked as an exact rational comparison, which
//! is the only way its equality cases are falsifiable.

use std::collections::HashMap;

use num_rational::Ratio;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::seeded_rng;

/// Exact rational scalar. i128 components keep every catalog computation
/// (distances ≤ group order, denominators ≤ 2·order) far from overflow.
pub type Rat = Ratio<i128>;

pub fn rat(num: i128, den: i128) -> Rat {
    Ratio::new(num, den)
}

/// Group given by its multiplication table.
#[derive(Debug, Clone)]
pub struct FiniteGroup {
    order: usize,
    mul: Vec<Vec<usize>>,
    inv: Vec<usize>,
    identity: usize,
}

impl FiniteGroup {
    /// Validate a multiplication table: closure, a two-sided identity,
    /// inverses, and associativity (exhaustive up to order 64, 10⁵ seeded
    /// random triples above).
    pub fn from_table(mul: Vec<Vec<usize>>) -> Result<Self> {
        let order = mul.len();
        if order == 0 {
            return Err(Error::InvalidInput("empty multiplication table".into()));
        }
        for row in &mul {
            if row.len() != order {
                return Err(Error::InvalidInput("multiplication table is not square".into()));
            }
            if row.iter().any(|&v| v >= order) {
                return Err(Error::InvalidInput("table entry out of range".into()));
            }
        }
        let identity = (0..order)
            .find(|&e| (0..order).all(|g| mul[e][g] == g && mul[g][e] == g))
            .ok_or_else(|| Error::InvalidInput("no identity element".into()))?;
        let mut inv = vec![usize::MAX; order];
        for g in 0..order {
            inv[g] = (0..order)
                .find(|&h| mul[g][h] == identity && mul[h][g] == identity)
                .ok_or_else(|| Error::InvalidInput(format!("element {g} has no inverse")))?;
        }
        if order <= 64 {
            for a in 0..order {
                for b in 0..order {
                    for c in 0..order {
                        if mul[mul[a][b]][c] != mul[a][mul[b][c]] {
                            return Err(Error::InvalidInput(format!(
                                "associativity fails at ({a}, {b}, {c})"
                            )));
                        }
                    }
                }
            }
        } else {
            let mut rng = seeded_rng(0x61737363, 0);
            for _ in 0..100_000 {
                let a = rng.random_range(0..order);
                let b = rng.random_range(0..order);
                let c = rng.random_range(0..order);
                if mul[mul[a][b]][c] != mul[a][mul[b][c]] {
                    return Err(Error::InvalidInput(format!(
                        "associativity fails at ({a}, {b}, {c})"
                    )));
                }
            }
        }
        Ok(Self {
            order,
            mul,
            inv,
            identity,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a][b]
    }

    pub fn inv(&self, g: usize) -> usize {
        self.inv[g]
    }
}

/// Finite metric space given by its distance table.
#[derive(Debug, Clone)]
pub struct FiniteMetricSpace {
    size: usize,
    dist: Vec<Vec<Rat>>,
    nonarchimedean: bool,
}

impl FiniteMetricSpace {
    /// Validate the metric axioms exhaustively and record whether the strong
    /// triangle inequality holds.
    pub fn new(dist: Vec<Vec<Rat>>) -> Result<Self> {
        let size = dist.len();
        if size == 0 || dist.iter().any(|row| row.len() != size) {
            return Err(Error::InvalidInput("distance table is not square".into()));
        }
        let zero = Rat::from_integer(0);
        for x in 0..size {
            for y in 0..size {
                if dist[x][y] < zero {
                    return Err(Error::InvalidInput(format!("negative distance at ({x}, {y})")));
                }
                if (dist[x][y] == zero) != (x == y) {
                    return Err(Error::InvalidInput(format!(
                        "identity of indiscernibles fails at ({x}, {y})"
                    )));
                }
                if dist[x][y] != dist[y][x] {
                    return Err(Error::InvalidInput(format!("asymmetric at ({x}, {y})")));
                }
            }
        }
        let mut nonarchimedean = true;
        for x in 0..size {
            for y in 0..size {
                for z in 0..size {
                    if dist[x][y] > dist[x][z] + dist[z][y] {
                        return Err(Error::InvalidInput(format!(
                            "triangle inequality fails at ({x}, {y}, {z})"
                        )));
                    }
                    if dist[x][y] > dist[x][z].max(dist[z][y]) {
                        nonarchimedean = false;
                    }
                }
            }
        }
        Ok(Self {
            size,
            dist,
            nonarchimedean,
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn dist(&self, x: usize, y: usize) -> Rat {
        self.dist[x][y]
    }

    pub fn nonarchimedean(&self) -> bool {
        self.nonarchimedean
    }
}

/// A validated faithful action of a finite group on a finite metric space.
#[derive(Debug, Clone)]
pub struct FiniteAction {
    group: FiniteGroup,
    space: FiniteMetricSpace,
    act: Vec<Vec<usize>>,
    isometric: bool,
    /// φ(g) = max_x dist(gx, x), precomputed for every element.
    phis: Vec<Rat>,
    sorted_phis: Vec<Rat>,
}

impl FiniteAction {
    pub fn new(group: FiniteGroup, space: FiniteMetricSpace, act: Vec<Vec<usize>>) -> Result<Self> {
        let order = group.order();
        let size = space.size();
        if act.len() != order || act.iter().any(|row| row.len() != size) {
            return Err(Error::InvalidInput(format!(
                "action table must be {order} x {size}"
            )));
        }
        if act.iter().flatten().any(|&p| p >= size) {
            return Err(Error::InvalidInput("action entry out of range".into()));
        }
        // Each element must act by a bijection.
        for (g, row) in act.iter().enumerate() {
            let mut seen = vec![false; size];
            for &p in row {
                if seen[p] {
                    return Err(Error::InvalidInput(format!("element {g} does not act bijectively")));
                }
                seen[p] = true;
            }
        }
        let e = group.identity();
        if (0..size).any(|x| act[e][x] != x) {
            return Err(Error::InvalidInput("identity does not act trivially".into()));
        }
        for g in 0..order {
            for h in 0..order {
                let gh = group.mul(g, h);
                for x in 0..size {
                    if act[gh][x] != act[g][act[h][x]] {
                        return Err(Error::InvalidInput(format!(
                            "action incompatible with multiplication at (g={g}, h={h}, x={x})"
                        )));
                    }
                }
            }
        }
        // Faithfulness: no nonidentity element may fix every point.
        let kernel: Vec<usize> = (0..order)
            .filter(|&g| g != e && (0..size).all(|x| act[g][x] == x))
            .collect();
        if !kernel.is_empty() {
            return Err(Error::InvalidInput(format!(
                "action is not faithful; kernel elements {kernel:?}"
            )));
        }
        let isometric = (0..order).all(|g| {
            (0..size).all(|x| (0..size).all(|y| space.dist(act[g][x], act[g][y]) == space.dist(x, y)))
        });
        let phis: Vec<Rat> = (0..order)
            .map(|g| {
                (0..size)
                    .map(|x| space.dist(act[g][x], x))
                    .max()
                    .expect("nonempty space")
            })
            .collect();
        let mut sorted_phis = phis.clone();
        sorted_phis.sort();
        Ok(Self {
            group,
            space,
            act,
            isometric,
            phis,
            sorted_phis,
        })
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn space(&self) -> &FiniteMetricSpace {
        &self.space
    }

    pub fn apply(&self, g: usize, x: usize) -> usize {
        self.act[g][x]
    }

    pub fn isometric(&self) -> bool {
        self.isometric
    }

    /// φ(g) = max_x dist(gx, x), exact.
    pub fn phi(&self, g: usize) -> Rat {
        self.phis[g]
    }

    /// Φ(t) = |{g : φ(g) < t}| / |G|, exact, strict inequality.
    pub fn phi_cdf(&self, t: Rat) -> Rat {
        let hits = self.sorted_phis.partition_point(|p| *p < t);
        rat(hits as i128, self.group.order() as i128)
    }

    /// δ(𝒜) = min φ(ab⁻¹) over distinct pairs of the subset, exact.
    pub fn delta(&self, subset: &[usize]) -> Result<Rat> {
        if subset.len() < 2 {
            return Err(Error::Cardinality(subset.len()));
        }
        let order = self.group.order();
        if subset.iter().any(|&g| g >= order) {
            return Err(Error::InvalidInput("subset index out of range".into()));
        }
        let mut sorted = subset.to_vec();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidInput("subset indices must be distinct".into()));
        }
        let mut min: Option<Rat> = None;
        for (i, &a) in subset.iter().enumerate() {
            for &b in &subset[i + 1..] {
                let q = self.group.mul(a, self.group.inv(b));
                let v = self.phis[q];
                min = Some(match min {
                    None => v,
                    Some(m) => m.min(v),
                });
            }
        }
        Ok(min.expect("at least one pair"))
    }

    /// Exact check of the separation inequality for one subset:
    /// Φ(δ/2) ≤ |𝒜|⁻¹ always, and Φ(δ) ≤ |𝒜|⁻¹ when the metric is
    /// nonarchimedean. Returns both sides and the equality flags.
    pub fn verify_separation(&self, subset: &[usize]) -> Result<SeparationCheck> {
        let delta = self.delta(subset)?;
        let bound = rat(1, subset.len() as i128);
        let phi_half_delta = self.phi_cdf(delta / 2);
        let (phi_delta, nonarch_ok, nonarch_equality) = if self.space.nonarchimedean() {
            let pd = self.phi_cdf(delta);
            (Some(pd), Some(pd <= bound), Some(pd == bound))
        } else {
            (None, None, None)
        };
        Ok(SeparationCheck {
            subset_size: subset.len(),
            delta,
            bound,
            phi_half_delta,
            arch_ok: phi_half_delta <= bound,
            arch_equality: phi_half_delta == bound,
            phi_delta,
            nonarch_ok,
            nonarch_equality,
        })
    }

    /// Exact two-letter word search δ_{M,N}(a,b) with its separation checks.
    /// Requires an isometric action — the word collapse behind the reduction
    /// to the subset bound needs it.
    pub fn verify_word_bound(&self, a: usize, b: usize, m_max: u32, n_max: u32) -> Result<FiniteWordCheck> {
        if !self.isometric {
            return Err(Error::NotIsometric(
                "word-bound verification requires an isometric action".into(),
            ));
        }
        if m_max == 0 || n_max == 0 {
            return Err(Error::Domain("box sides must be at least 1".into()));
        }
        let order = self.group.order();
        if a >= order || b >= order {
            return Err(Error::InvalidInput("element index out of range".into()));
        }
        let e = self.group.identity();
        let power = |g: usize, k: i64| -> usize {
            let base = if k < 0 { self.group.inv(g) } else { g };
            let mut acc = e;
            for _ in 0..k.unsigned_abs() {
                acc = self.group.mul(acc, base);
            }
            acc
        };
        let mut delta: Option<Rat> = None;
        let mut argmin = (0i64, 0i64);
        let mut degenerate = false;
        for m in -(m_max as i64)..=(m_max as i64) {
            let am = power(a, m);
            for n in -(n_max as i64)..=(n_max as i64) {
                if m == 0 && n == 0 {
                    continue;
                }
                let word = self.group.mul(am, power(b, n));
                if word == e {
                    degenerate = true;
                }
                let v = self.phis[word];
                if delta.map_or(true, |d| v < d) {
                    delta = Some(v);
                    argmin = (m, n);
                }
            }
        }
        let delta = delta.expect("nonempty box");
        let bound = rat(1, (m_max as i128 + 1) * (n_max as i128 + 1));
        let phi_half_delta = self.phi_cdf(delta / 2);
        let (phi_delta, nonarch_ok) = if self.space.nonarchimedean() {
            let pd = self.phi_cdf(delta);
            (Some(pd), Some(pd <= bound))
        } else {
            (None, None)
        };
        Ok(FiniteWordCheck {
            delta,
            argmin,
            bound,
            degenerate,
            phi_half_delta,
            arch_ok: phi_half_delta <= bound,
            phi_delta,
            nonarch_ok,
        })
    }
}

/// Both sides of the exact separation inequality for one subset.
#[derive(Debug, Clone)]
pub struct SeparationCheck {
    pub subset_size: usize,
    pub delta: Rat,
    pub bound: Rat,
    pub phi_half_delta: Rat,
    pub arch_ok: bool,
    pub arch_equality: bool,
    pub phi_delta: Option<Rat>,
    pub nonarch_ok: Option<bool>,
    pub nonarch_equality: Option<bool>,
}

impl SeparationCheck {
    pub fn passed(&self) -> bool {
        self.arch_ok && self.nonarch_ok.unwrap_or(true)
    }
}

/// Result of the exact two-letter word check.
#[derive(Debug, Clone)]
pub struct FiniteWordCheck {
    pub delta: Rat,
    pub argmin: (i64, i64),
    pub bound: Rat,
    pub degenerate: bool,
    pub phi_half_delta: Rat,
    pub arch_ok: bool,
    pub phi_delta: Option<Rat>,
    pub nonarch_ok: Option<bool>,
}

impl FiniteWordCheck {
    pub fn passed(&self) -> bool {
        self.arch_ok && self.nonarch_ok.unwrap_or(true)
    }
}

/// Metric to pair with a catalog action.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricKind {
    /// min(|x−y|, n−|x−y|) on n cyclically arranged points; archimedean
    /// for n ≥ 4.
    Circular,
    /// 1 off the diagonal; the canonical nonarchimedean metric.
    Discrete,
}

fn circular_metric(n: usize) -> Result<FiniteMetricSpace> {
    let dist = (0..n)
        .map(|x| {
            (0..n)
                .map(|y| {
                    let d = x.abs_diff(y);
                    Rat::from_integer(d.min(n - d) as i128)
                })
                .collect()
        })
        .collect();
    FiniteMetricSpace::new(dist)
}

fn discrete_metric(n: usize) -> Result<FiniteMetricSpace> {
    let dist = (0..n)
        .map(|x| {
            (0..n)
                .map(|y| Rat::from_integer(i128::from(x != y)))
                .collect()
        })
        .collect();
    FiniteMetricSpace::new(dist)
}

fn metric_for(kind: MetricKind, n: usize) -> Result<FiniteMetricSpace> {
    match kind {
        MetricKind::Circular => circular_metric(n),
        MetricKind::Discrete => discrete_metric(n),
    }
}

/// ℤ_n acting on itself by translation.
pub fn cyclic_action(n: usize, metric: MetricKind) -> Result<FiniteAction> {
    if n < 2 {
        return Err(Error::InvalidInput("cyclic action needs n >= 2".into()));
    }
    let mul = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
    let act = (0..n).map(|g| (0..n).map(|x| (g + x) % n).collect()).collect();
    FiniteAction::new(FiniteGroup::from_table(mul)?, metric_for(metric, n)?, act)
}

fn permutations_lex(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..n).collect();
    let mut used = vec![false; n];
    fn rec(n: usize, depth: usize, current: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if depth == n {
            out.push(current.clone());
            return;
        }
        for v in 0..n {
            if !used[v] {
                used[v] = true;
                current[depth] = v;
                rec(n, depth + 1, current, used, out);
                used[v] = false;
            }
        }
    }
    rec(n, 0, &mut current, &mut used, &mut out);
    out
}

/// S_n acting naturally on {0, …, n−1} with the discrete metric.
pub fn symmetric_action(n: usize) -> Result<FiniteAction> {
    if n < 2 || n > 7 {
        return Err(Error::InvalidInput("symmetric action supports 2 <= n <= 7".into()));
    }
    let perms = permutations_lex(n);
    let index: HashMap<&[usize], usize> =
        perms.iter().enumerate().map(|(i, p)| (p.as_slice(), i)).collect();
    let order = perms.len();
    let mut mul = vec![vec![0usize; order]; order];
    for (gi, g) in perms.iter().enumerate() {
        for (hi, h) in perms.iter().enumerate() {
            // (g·h)(x) = g(h(x)), matching act[mul[g][h]] = act[g] ∘ act[h].
            let composed: Vec<usize> = (0..n).map(|x| g[h[x]]).collect();
            mul[gi][hi] = index[composed.as_slice()];
        }
    }
    let act = perms.clone();
    FiniteAction::new(FiniteGroup::from_table(mul)?, discrete_metric(n)?, act)
}

/// Dihedral group D_n acting on the n-cycle.
pub fn dihedral_action(n: usize, metric: MetricKind) -> Result<FiniteAction> {
    if n < 3 {
        return Err(Error::InvalidInput("dihedral action needs n >= 3".into()));
    }
    let order = 2 * n;
    // Element s*n + r acts by x -> r + (-1)^s x.
    let idx = |r: usize, s: usize| s * n + r;
    let mut mul = vec![vec![0usize; order]; order];
    for s1 in 0..2 {
        for r1 in 0..n {
            for s2 in 0..2 {
                for r2 in 0..n {
                    let r = if s1 == 0 { (r1 + r2) % n } else { (r1 + n - r2 % n) % n };
                    mul[idx(r1, s1)][idx(r2, s2)] = idx(r, s1 ^ s2);
                }
            }
        }
    }
    let mut act = vec![vec![0usize; n]; order];
    for s in 0..2 {
        for r in 0..n {
            for x in 0..n {
                act[idx(r, s)][x] = if s == 0 { (r + x) % n } else { (r + n - x % n) % n };
            }
        }
    }
    FiniteAction::new(FiniteGroup::from_table(mul)?, metric_for(metric, n)?, act)
}

/// The built-in catalog: cyclic groups with the circular metric, symmetric
/// groups with the discrete metric, dihedral groups on the cycle. Exercises
/// both metric branches and the isometry hypothesis.
pub fn catalog() -> Vec<(String, FiniteAction)> {
    let mut out = Vec::new();
    for n in 2..=24 {
        out.push((format!("z{n}"), cyclic_action(n, MetricKind::Circular).unwrap()));
    }
    for n in 2..=5 {
        out.push((format!("s{n}"), symmetric_action(n).unwrap()));
    }
    for n in 3..=8 {
        out.push((format!("d{n}"), dihedral_action(n, MetricKind::Circular).unwrap()));
    }
    out
}

/// Build a named catalog action, e.g. "z12", "s4", "d5", with an optional
/// metric override.
pub fn catalog_action(name: &str, metric: Option<MetricKind>) -> Result<FiniteAction> {
    let (kind, num) = name.split_at(1);
    let n: usize = num
        .parse()
        .map_err(|_| Error::InvalidInput(format!("cannot parse group size in {name:?}")))?;
    match kind {
        "z" => cyclic_action(n, metric.unwrap_or(MetricKind::Circular)),
        "s" => {
            if metric == Some(MetricKind::Circular) {
                return Err(Error::InvalidInput(
                    "symmetric groups do not preserve the circular metric".into(),
                ));
            }
            symmetric_action(n)
        }
        "d" => dihedral_action(n, metric.unwrap_or(MetricKind::Circular)),
        _ => Err(Error::InvalidInput(format!(
            "unknown group {name:?}; expected zN, sN or dN"
        ))),
    }
}

/// Aggregate outcome of a separation sweep over subsets of one size.
#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub subset_size: usize,
    pub subsets_checked: u64,
    pub sampled: bool,
    pub violations: u64,
    pub arch_equalities: u64,
    pub nonarch_equalities: u64,
}

/// Check the separation inequality over subsets of the given size:
/// exhaustively when there are at most `max_exhaustive` subsets, otherwise on
/// `sample_count` subsets drawn uniformly from stream 0 of `seed`.
pub fn sweep_separation(
    action: &FiniteAction,
    subset_size: usize,
    max_exhaustive: u64,
    sample_count: u64,
    seed: u64,
) -> Result<SweepReport> {
    let order = action.group().order();
    if subset_size < 2 || subset_size > order {
        return Err(Error::Cardinality(subset_size));
    }
    let total = binomial(order as u64, subset_size as u64);
    let mut violations = 0u64;
    let mut arch_eq = 0u64;
    let mut nonarch_eq = 0u64;
    let mut checked = 0u64;
    let run = |subset: &[usize], violations: &mut u64, arch_eq: &mut u64, nonarch_eq: &mut u64| -> Result<()> {
        let check = action.verify_separation(subset)?;
        if !check.passed() {
            *violations += 1;
        }
        if check.arch_equality {
            *arch_eq += 1;
        }
        if check.nonarch_equality == Some(true) {
            *nonarch_eq += 1;
        }
        Ok(())
    };
    let sampled = total > max_exhaustive;
    if !sampled {
        let mut subset: Vec<usize> = (0..subset_size).collect();
        loop {
            run(&subset, &mut violations, &mut arch_eq, &mut nonarch_eq)?;
            checked += 1;
            if !next_combination(&mut subset, order) {
                break;
            }
        }
    } else {
        let mut rng = seeded_rng(seed, 0);
        let mut pool: Vec<usize> = (0..order).collect();
        for _ in 0..sample_count {
            // Partial Fisher-Yates: the first subset_size entries are a
            // uniform subset.
            for i in 0..subset_size {
                let j = rng.random_range(i..order);
                pool.swap(i, j);
            }
            let mut subset = pool[..subset_size].to_vec();
            subset.sort_unstable();
            run(&subset, &mut violations, &mut arch_eq, &mut nonarch_eq)?;
            checked += 1;
        }
    }
    Ok(SweepReport {
        subset_size,
        subsets_checked: checked,
        sampled,
        violations,
        arch_equalities: arch_eq,
        nonarch_equalities: nonarch_eq,
    })
}

/// Advance to the next k-combination of {0, …, order−1} in lexicographic
/// order; false when `subset` was the last one.
fn next_combination(subset: &mut [usize], order: usize) -> bool {
    let k = subset.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if subset[i] < order - k + i {
            subset[i] += 1;
            for j in (i + 1)..k {
                subset[j] = subset[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut result = 1u64;
    for i in 0..k {
        result = result.saturating_mul(n - i) / (i + 1);
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_phi_and_cdf() {
        let z12 = cyclic_action(12, MetricKind::Circular).unwrap();
        assert_eq!(z12.phi(0), rat(0, 1));
        // Rotation by 3 moves every point by exactly 3.
        assert_eq!(z12.phi(3), rat(3, 1));
        assert_eq!(z12.phi(9), rat(3, 1));
        // Φ(3/2) counts {0, 1, 11}.
        assert_eq!(z12.phi_cdf(rat(3, 2)), rat(1, 4));
        assert_eq!(z12.phi_cdf(rat(0, 1)), rat(0, 1));
        assert!(!z12.space().nonarchimedean());
        assert!(z12.isometric());
    }

    #[test]
    fn symmetric_phi_and_cdf() {
        let s3 = symmetric_action(3).unwrap();
        assert_eq!(s3.group().order(), 6);
        assert!(s3.space().nonarchimedean());
        assert!(s3.isometric());
        for g in 0..6 {
            let expected = if g == s3.group().identity() { rat(0, 1) } else { rat(1, 1) };
            assert_eq!(s3.phi(g), expected);
        }
        // Only the identity has φ < 1.
        assert_eq!(s3.phi_cdf(rat(1, 1)), rat(1, 6));
    }

    #[test]
    fn delta_examples() {
        let z12 = cyclic_action(12, MetricKind::Circular).unwrap();
        // Pairwise differences of {0, 3, 6, 9} are {3, 6, 9} with φ {3, 6, 3}.
        assert_eq!(z12.delta(&[0, 3, 6, 9]).unwrap(), rat(3, 1));

        let s3 = symmetric_action(3).unwrap();
        let all: Vec<usize> = (0..6).collect();
        assert_eq!(s3.delta(&all).unwrap(), rat(1, 1));
        // {e, g}: the only quotient is g (or its inverse).
        for g in 1..6 {
            assert_eq!(s3.delta(&[s3.group().identity(), g]).unwrap(), s3.phi(g));
        }
        assert!(matches!(s3.delta(&[2]), Err(Error::Cardinality(1))));
        assert!(s3.delta(&[2, 2]).is_err());
    }

    #[test]
    fn separation_equality_cases() {
        // S3 with the discrete metric: the nonarchimedean inequality holds
        // with equality on the full group.
        let s3 = symmetric_action(3).unwrap();
        let all: Vec<usize> = (0..6).collect();
        let check = s3.verify_separation(&all).unwrap();
        assert!(check.passed());
        assert_eq!(check.phi_delta, Some(rat(1, 6)));
        assert_eq!(check.nonarch_equality, Some(true));

        // Z12 circular with {0,3,6,9}: archimedean equality.
        let z12 = cyclic_action(12, MetricKind::Circular).unwrap();
        let check = z12.verify_separation(&[0, 3, 6, 9]).unwrap();
        assert!(check.passed());
        assert_eq!(check.phi_half_delta, rat(1, 4));
        assert!(check.arch_equality);
    }

    #[test]
    fn word_bound_examples() {
        let z12 = cyclic_action(12, MetricKind::Circular).unwrap();
        let check = z12.verify_word_bound(4, 3, 1, 1).unwrap();
        // 4 − 3 = 1 is in the box: δ = φ(1) = 1, Φ(1/2) = 1/12 ≤ 1/4.
        assert_eq!(check.delta, rat(1, 1));
        assert_eq!(check.phi_half_delta, rat(1, 12));
        assert!(check.arch_ok);
        assert!(!check.degenerate);

        // a = b = e: the word (1, 0) is already the identity.
        let check = z12.verify_word_bound(0, 0, 1, 1).unwrap();
        assert_eq!(check.delta, rat(0, 1));
        assert!(check.degenerate);

        // S3: a = transposition, b = 3-cycle, a² = e inside the box.
        let s3 = symmetric_action(3).unwrap();
        let perms = permutations_lex(3);
        let transposition = perms.iter().position(|p| p == &[1, 0, 2]).unwrap();
        let three_cycle = perms.iter().position(|p| p == &[1, 2, 0]).unwrap();
        let check = s3.verify_word_bound(transposition, three_cycle, 2, 2).unwrap();
        assert!(check.degenerate);
        assert_eq!(check.delta, rat(0, 1));
        assert!(check.passed());
    }

    #[test]
    fn exact_phi_identities() {
        for (_, action) in catalog() {
            let g = action.group();
            let order = g.order();
            let stride = (order / 7).max(1);
            for a in (0..order).step_by(stride) {
                assert_eq!(action.phi(a), action.phi(g.inv(a)));
                for b in (0..order).step_by(stride) {
                    let q = g.mul(a, g.inv(b));
                    assert!(action.phi(q) <= action.phi(a) + action.phi(b));
                    if action.space().nonarchimedean() {
                        assert!(action.phi(q) <= action.phi(a).max(action.phi(b)));
                    }
                    if action.isometric() {
                        assert_eq!(action.phi(g.mul(a, b)), action.phi(g.mul(b, a)));
                        let conj = g.mul(g.mul(a, b), g.inv(a));
                        assert_eq!(action.phi(conj), action.phi(b));
                    }
                }
            }
        }
    }

    #[test]
    fn non_faithful_action_is_rejected() {
        // Z4 "acting" through Z2: 0 and 2 both act trivially.
        let n = 4;
        let mul: Vec<Vec<usize>> = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        let act: Vec<Vec<usize>> = (0..n).map(|g| (0..2).map(|x| (g + x) % 2).collect()).collect();
        let group = FiniteGroup::from_table(mul).unwrap();
        let space = discrete_metric(2).unwrap();
        let err = FiniteAction::new(group, space, act).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("kernel"), "{msg}");
        assert!(msg.contains('2'), "{msg}");
    }

    #[test]
    fn sweep_is_clean_on_small_catalog() {
        let z8 = cyclic_action(8, MetricKind::Circular).unwrap();
        for size in 2..=4 {
            let report = sweep_separation(&z8, size, 100_000, 1000, 1).unwrap();
            assert_eq!(report.violations, 0);
            assert!(!report.sampled);
            assert_eq!(report.subsets_checked, binomial(8, size as u64));
        }
        let s4 = symmetric_action(4).unwrap();
        let report = sweep_separation(&s4, 3, 100_000, 1000, 1).unwrap();
        assert_eq!(report.violations, 0);
    }

    #[test]
    fn sampled_sweep_on_s5() {
        let s5 = symmetric_action(5).unwrap();
        let report = sweep_separation(&s5, 4, 100_000, 500, 9).unwrap();
        assert!(report.sampled);
        assert_eq!(report.subsets_checked, 500);
        assert_eq!(report.violations, 0);
    }

    #[test]
    fn rho_is_an_exact_metric() {
        let d5 = dihedral_action(5, MetricKind::Circular).unwrap();
        let g = d5.group();
        let order = g.order();
        let rho = |a: usize, b: usize| d5.phi(g.mul(a, g.inv(b)));
        for a in 0..order {
            for b in 0..order {
                assert_eq!(rho(a, b) == rat(0, 1), a == b);
                assert_eq!(rho(a, b), rho(b, a));
                for c in 0..order {
                    assert!(rho(a, b) <= rho(a, c) + rho(c, b));
                }
            }
        }
    }

    #[test]
    fn catalog_action_lookup() {
        assert!(catalog_action("z12", None).is_ok());
        assert!(catalog_action("s4", Some(MetricKind::Discrete)).is_ok());
        assert!(catalog_action("s4", Some(MetricKind::Circular)).is_err());
        assert!(catalog_action("d6", Some(MetricKind::Discrete)).is_ok());
        assert!(catalog_action("q8", None).is_err());
    }
}
