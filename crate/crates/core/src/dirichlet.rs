//! δ-type minimizations over finite sets and word boxes in U(N), with the
//! pigeonhole upper bounds they must satisfy.
//!
//! * `delta_set`: min φ(AB⁻¹) over distinct pairs of a finite set, against
//!   the bound 2π|𝒜|^{−1/N²}.
//! * `delta_powers`: min φ(aⁿ), 1 ≤ n ≤ N_max, against 2π(N_max+1)^{−1/N²}.
//! * `delta_jk`: min φ(A^j B^k) over a box of exponents, against
//!   2π(J+1)^{−1/N²}(K+1)^{−1/N²}.
//! * `delta_jkl`: the three-letter analogue, for which no bound is proven;
//!   the product-form bound is attached as conjectural and never asserted.
//!
//! Searches are brute force by design: the budgets are desk-scale (≤ 10⁷
//! words) and an unconditional minimum is the point. φ(g⁻¹) = φ(g) halves
//! every enumeration; ties resolve to the first word in canonical order.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::displacement::phi_value;
use crate::error::{Error, Result};
use crate::haar::haar_sample_with_rng;
use crate::linalg::{matrix_power, UnitaryMatrix};
use crate::rng::seeded_rng;
use crate::search::{Argmin, BoundKind, MinTracker, SearchResult, DISTINCT_TOL};

const WORD_BUDGET: u64 = 10_000_000;

fn check_same_dim(mats: &[&UnitaryMatrix]) -> Result<usize> {
    let n = mats[0].dim();
    for m in mats {
        if m.dim() != n {
            return Err(Error::Dimension(format!(
                "mixed dimensions {} and {}",
                n,
                m.dim()
            )));
        }
    }
    Ok(n)
}

fn pigeonhole_bound(n: usize, set_size: f64) -> f64 {
    2.0 * std::f64::consts::PI * set_size.powf(-1.0 / (n * n) as f64)
}

/// δ(𝒜) = min φ(ab⁻¹) over unordered pairs of distinct elements, with the
/// bound 2π|𝒜|^{−1/N²}. Exactly |𝒜|(|𝒜|−1)/2 displacement evaluations.
pub fn delta_set(elements: &[UnitaryMatrix]) -> Result<SearchResult> {
    if elements.len() < 2 {
        return Err(Error::Cardinality(elements.len()));
    }
    let refs: Vec<&UnitaryMatrix> = elements.iter().collect();
    let n = check_same_dim(&refs)?;
    let mut tracker = MinTracker::new();
    let mut evaluations = 0u64;
    let mut order = 0u64;
    for i in 0..elements.len() {
        let inv = elements[i].adjoint();
        for j in (i + 1)..elements.len() {
            let value = phi_value(&elements[j].compose(&inv)?);
            tracker.push(order, Argmin::Pair { i, j }, value);
            order += 1;
            evaluations += 1;
        }
    }
    let argmin = tracker.argmin().expect("at least one pair");
    Ok(SearchResult::finish(
        tracker.min,
        argmin,
        evaluations,
        pigeonhole_bound(n, elements.len() as f64),
        BoundKind::Proven,
        DISTINCT_TOL,
    ))
}

/// δ over the powers a, a², …, a^{n_max}, with the bound coming from the set
/// {aⁿ : 0 ≤ n ≤ n_max}: 2π(n_max+1)^{−1/N²}. Powers are built incrementally
/// with drift-triggered re-unitarization.
pub fn delta_powers(a: &UnitaryMatrix, n_max: u64) -> Result<SearchResult> {
    if n_max == 0 {
        return Err(Error::Domain("n_max must be at least 1".into()));
    }
    if n_max > WORD_BUDGET {
        return Err(Error::Resource(format!("n_max {n_max} exceeds {WORD_BUDGET}")));
    }
    let dim = a.dim();
    let mut tracker = MinTracker::new();
    let mut power = a.clone();
    for n in 1..=n_max {
        tracker.push(n - 1, Argmin::Power { n }, phi_value(&power));
        if n < n_max {
            power = power.compose(a)?;
        }
    }
    Ok(SearchResult::finish(
        tracker.min,
        tracker.argmin().expect("n_max >= 1"),
        n_max,
        pigeonhole_bound(dim, (n_max + 1) as f64),
        BoundKind::Proven,
        DISTINCT_TOL,
    ))
}

/// δ_{J,K}(A,B) = min φ(A^j B^k) over |j| ≤ J, |k| ≤ K, (j,k) ≠ (0,0).
///
/// φ(A^{−j}B^{−k}) = φ((A^j B^k)⁻¹) = φ(A^j B^k), so only one representative
/// per ± pair is evaluated: j = 0 with k ≥ 1, then j ≥ 1 with any k — exactly
/// K + J(2K+1) evaluations, in that canonical order.
pub fn delta_jk(a: &UnitaryMatrix, b: &UnitaryMatrix, j_max: u64, k_max: u64) -> Result<SearchResult> {
    let n = check_same_dim(&[a, b])?;
    if j_max == 0 || k_max == 0 {
        return Err(Error::Domain("J and K must be at least 1".into()));
    }
    if j_max.saturating_mul(k_max) > WORD_BUDGET {
        return Err(Error::Resource(format!(
            "J*K = {} exceeds {WORD_BUDGET}",
            j_max as u128 * k_max as u128
        )));
    }

    // j = 0 slice: words B, B², …, B^K, built incrementally.
    let mut tracker = MinTracker::new();
    let mut word = b.clone();
    for k in 1..=k_max {
        tracker.push(k - 1, Argmin::Word2 { j: 0, k: k as i64 }, phi_value(&word));
        if k < k_max {
            word = word.compose(b)?;
        }
    }

    // j >= 1 slices, chunked for parallelism. Each chunk seeds its own A^j by
    // fast exponentiation and walks the box incrementally; the global order
    // index keeps tie-breaking independent of the chunking.
    let chunk = (j_max / 64).max(1);
    let starts: Vec<u64> = (1..=j_max).step_by(chunk as usize).collect();
    let b_minus_k = matrix_power(b, -(k_max as i64))?;
    let slice_trackers: Vec<Result<MinTracker<Argmin>>> = starts
        .par_iter()
        .map(|&j0| {
            let j1 = (j0 + chunk - 1).min(j_max);
            let mut local = MinTracker::new();
            let mut a_pow = matrix_power(a, j0 as i64)?;
            for j in j0..=j1 {
                let mut w = a_pow.compose(&b_minus_k)?;
                let base = k_max + (j - 1) * (2 * k_max + 1);
                for (step, k) in (-(k_max as i64)..=(k_max as i64)).enumerate() {
                    local.push(
                        base + step as u64,
                        Argmin::Word2 { j: j as i64, k },
                        phi_value(&w),
                    );
                    if k < k_max as i64 {
                        w = w.compose(b)?;
                    }
                }
                if j < j1 {
                    a_pow = a_pow.compose(a)?;
                }
            }
            Ok(local)
        })
        .collect();
    for st in slice_trackers {
        tracker = tracker.merge(st?);
    }

    let evaluations = k_max + j_max * (2 * k_max + 1);
    let bound = 2.0 * std::f64::consts::PI
        * ((j_max + 1) as f64).powf(-1.0 / (n * n) as f64)
        * ((k_max + 1) as f64).powf(-1.0 / (n * n) as f64);
    Ok(SearchResult::finish(
        tracker.min,
        tracker.argmin().expect("nonempty box"),
        evaluations,
        bound,
        BoundKind::Proven,
        DISTINCT_TOL,
    ))
}

/// Exploratory three-letter search δ_{J,K,L}(A,B,C). No analogue of the
/// two-letter bound is proven; the product form attached here is flagged
/// conjectural and the search only gathers evidence about it.
pub fn delta_jkl(
    a: &UnitaryMatrix,
    b: &UnitaryMatrix,
    c: &UnitaryMatrix,
    j_max: u64,
    k_max: u64,
    l_max: u64,
) -> Result<SearchResult> {
    let n = check_same_dim(&[a, b, c])?;
    if j_max == 0 || k_max == 0 || l_max == 0 {
        return Err(Error::Domain("J, K and L must be at least 1".into()));
    }
    if j_max
        .saturating_mul(k_max)
        .saturating_mul(l_max)
        > WORD_BUDGET
    {
        return Err(Error::Resource(format!(
            "J*K*L = {} exceeds {WORD_BUDGET}",
            j_max as u128 * k_max as u128 * l_max as u128
        )));
    }

    // Representatives of the (j,k,l) <-> (-j,-k,-l) pairing, in canonical
    // order: (0,0,l>0), then (0,k>0,*), then (j>0,*,*).
    let mut tracker = MinTracker::new();
    let mut order = 0u64;
    let mut word = c.clone();
    for l in 1..=l_max {
        tracker.push(order, Argmin::Word3 { j: 0, k: 0, l: l as i64 }, phi_value(&word));
        order += 1;
        if l < l_max {
            word = word.compose(c)?;
        }
    }
    let c_minus_l = matrix_power(c, -(l_max as i64))?;
    let scan_l = |j: i64,
                  k: i64,
                  prefix: &UnitaryMatrix,
                  tracker: &mut MinTracker<Argmin>,
                  order: &mut u64|
     -> Result<()> {
        let mut w = prefix.compose(&c_minus_l)?;
        for l in -(l_max as i64)..=(l_max as i64) {
            tracker.push(*order, Argmin::Word3 { j, k, l }, phi_value(&w));
            *order += 1;
            if l < l_max as i64 {
                w = w.compose(c)?;
            }
        }
        Ok(())
    };

    let mut b_pow = b.clone();
    for k in 1..=k_max as i64 {
        scan_l(0, k, &b_pow, &mut tracker, &mut order)?;
        if k < k_max as i64 {
            b_pow = b_pow.compose(b)?;
        }
    }
    let b_minus_k = matrix_power(b, -(k_max as i64))?;
    let mut a_pow = a.clone();
    for j in 1..=j_max as i64 {
        let mut jk = a_pow.compose(&b_minus_k)?;
        for k in -(k_max as i64)..=(k_max as i64) {
            scan_l(j, k, &jk, &mut tracker, &mut order)?;
            if k < k_max as i64 {
                jk = jk.compose(b)?;
            }
        }
        if j < j_max as i64 {
            a_pow = a_pow.compose(a)?;
        }
    }

    let nn = (n * n) as f64;
    let bound = 2.0 * std::f64::consts::PI
        * ((j_max + 1) as f64).powf(-1.0 / nn)
        * ((k_max + 1) as f64).powf(-1.0 / nn)
        * ((l_max + 1) as f64).powf(-1.0 / nn);
    Ok(SearchResult::finish(
        tracker.min,
        tracker.argmin().expect("nonempty box"),
        order,
        bound,
        BoundKind::Conjectural,
        DISTINCT_TOL,
    ))
}

/// One trial that failed its bound.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Violation {
    pub trial: u32,
    pub delta: f64,
    pub bound: f64,
}

/// Outcome of a randomized bound-verification run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundReport {
    /// 1 for the finite-set bound, 2 for the two-letter-word bound.
    pub theorem: u8,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cardinality: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j_max: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_max: Option<u64>,
    pub trials: u32,
    pub violations: Vec<Violation>,
    /// Largest observed delta/bound ratio; must stay at or below 1.
    pub max_ratio: f64,
}

impl BoundReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Draw `trials` Haar-random sets of the given cardinality and check
/// δ(𝒜) ≤ 2π|𝒜|^{−1/N²} on each.
pub fn verify_set_bound(
    n: usize,
    cardinality: usize,
    trials: u32,
    seed: u64,
) -> Result<BoundReport> {
    if cardinality < 2 {
        return Err(Error::Cardinality(cardinality));
    }
    let mut rng = seeded_rng(seed, 0);
    let mut violations = Vec::new();
    let mut max_ratio = 0.0f64;
    for trial in 0..trials {
        let set: Vec<UnitaryMatrix> = (0..cardinality)
            .map(|_| haar_sample_with_rng(n, &mut rng))
            .collect::<Result<_>>()?;
        let result = delta_set(&set)?;
        max_ratio = max_ratio.max(result.delta / result.bound);
        if !result.satisfied {
            violations.push(Violation {
                trial,
                delta: result.delta,
                bound: result.bound,
            });
        }
    }
    Ok(BoundReport {
        theorem: 1,
        n,
        cardinality: Some(cardinality),
        j_max: None,
        k_max: None,
        trials,
        violations,
        max_ratio,
    })
}

/// Draw `trials` Haar-random pairs (A, B) and check
/// δ_{J,K}(A,B) ≤ 2π(J+1)^{−1/N²}(K+1)^{−1/N²} on each.
pub fn verify_word_bound(
    n: usize,
    j_max: u64,
    k_max: u64,
    trials: u32,
    seed: u64,
) -> Result<BoundReport> {
    let mut rng = seeded_rng(seed, 0);
    let mut violations = Vec::new();
    let mut max_ratio = 0.0f64;
    for trial in 0..trials {
        let a = haar_sample_with_rng(n, &mut rng)?;
        let b = haar_sample_with_rng(n, &mut rng)?;
        let result = delta_jk(&a, &b, j_max, k_max)?;
        max_ratio = max_ratio.max(result.delta / result.bound);
        if !result.satisfied {
            violations.push(Violation {
                trial,
                delta: result.delta,
                bound: result.bound,
            });
        }
    }
    Ok(BoundReport {
        theorem: 2,
        n,
        cardinality: None,
        j_max: Some(j_max),
        k_max: Some(k_max),
        trials,
        violations,
        max_ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::haar::haar_sample;
    use crate::linalg::e;
    use num_complex::Complex64;

    fn u1(x: f64) -> UnitaryMatrix {
        UnitaryMatrix::diagonal_phases(&[x])
    }

    #[test]
    fn two_element_set() {
        // {I, −I} in U(1): one pair, delta 2, bound 2π/2 = π.
        let result = delta_set(&[u1(0.0), u1(0.5)]).unwrap();
        assert!((result.delta - 2.0).abs() < 1e-12);
        assert!((result.bound - std::f64::consts::PI).abs() < 1e-12);
        assert!(result.satisfied);
        assert_eq!(result.evaluations, 1);
        assert_eq!(result.argmin, Argmin::Pair { i: 0, j: 1 });
    }

    #[test]
    fn eighth_roots_of_unity() {
        let set: Vec<UnitaryMatrix> = (0..8).map(|k| u1(k as f64 / 8.0)).collect();
        // Independent brute-force oracle over the same points.
        let mut oracle = f64::INFINITY;
        for i in 0..8 {
            for j in (i + 1)..8 {
                oracle = oracle.min((e(i as f64 / 8.0) - e(j as f64 / 8.0)).norm());
            }
        }
        let result = delta_set(&set).unwrap();
        assert!((result.delta - oracle).abs() < 1e-12);
        assert!((result.delta - 2.0 * (std::f64::consts::PI / 8.0).sin()).abs() < 1e-12);
        assert!((result.bound - std::f64::consts::PI / 4.0).abs() < 1e-12);
        assert!(result.satisfied);
        assert_eq!(result.evaluations, 28);
        assert_eq!(result.argmin, Argmin::Pair { i: 0, j: 1 });
    }

    #[test]
    fn duplicate_elements_flag_degeneracy() {
        let a = haar_sample(2, 3).unwrap();
        let result = delta_set(&[a.clone(), a]).unwrap();
        assert_eq!(result.delta, 0.0);
        assert!(result.degenerate);
    }

    #[test]
    fn cardinality_error() {
        let a = haar_sample(2, 3).unwrap();
        assert!(matches!(delta_set(&[a]), Err(Error::Cardinality(1))));
    }

    #[test]
    fn mixed_dimensions_rejected() {
        let a = haar_sample(2, 3).unwrap();
        let b = haar_sample(3, 3).unwrap();
        assert!(matches!(delta_set(&[a, b]), Err(Error::Dimension(_))));
    }

    #[test]
    fn powers_of_identity() {
        let result = delta_powers(&UnitaryMatrix::identity(2), 5).unwrap();
        assert_eq!(result.delta, 0.0);
        assert!(result.degenerate);
        assert_eq!(result.argmin, Argmin::Power { n: 1 });
    }

    #[test]
    fn powers_of_seventh_root() {
        // All powers of e(1/7) up to 6 lie at angle distance >= 1/7.
        let result = delta_powers(&u1(1.0 / 7.0), 6).unwrap();
        let expected = 2.0 * (std::f64::consts::PI / 7.0).sin();
        assert!((result.delta - expected).abs() < 1e-12);
        assert_eq!(result.evaluations, 6);
    }

    #[test]
    fn powers_of_golden_rotation() {
        let golden = (5.0_f64.sqrt() - 1.0) / 2.0;
        // Oracle: direct complex arithmetic over the eight candidates.
        let mut oracle = f64::INFINITY;
        let mut oracle_n = 0;
        for n in 1..=8u64 {
            let v = (e(n as f64 * golden) - Complex64::new(1.0, 0.0)).norm();
            if v < oracle {
                oracle = v;
                oracle_n = n;
            }
        }
        assert_eq!(oracle_n, 8, "Fibonacci denominator should win");
        let result = delta_powers(&u1(golden), 8).unwrap();
        assert!((result.delta - oracle).abs() < 1e-12);
        assert_eq!(result.argmin, Argmin::Power { n: 8 });
    }

    #[test]
    fn jk_identity_pair_is_degenerate() {
        let i2 = UnitaryMatrix::identity(2);
        let result = delta_jk(&i2, &i2, 2, 2).unwrap();
        assert_eq!(result.delta, 0.0);
        assert!(result.degenerate);
    }

    #[test]
    fn jk_u1_third_and_half_rotation() {
        // Words: (0,1) -> e(1/2), (1,-1) -> e(-1/6), (1,0) -> e(1/3),
        // (1,1) -> e(5/6); minimum 2 sin(π/6) = 1 at (1,-1) and (1,1),
        // resolved to the first in canonical order.
        let result = delta_jk(&u1(1.0 / 3.0), &u1(0.5), 1, 1).unwrap();
        assert!((result.delta - 1.0).abs() < 1e-12);
        assert_eq!(result.evaluations, 4);
        assert_eq!(result.argmin, Argmin::Word2 { j: 1, k: -1 });
        assert!((result.bound - std::f64::consts::PI / 2.0).abs() < 1e-12);
        assert!(result.satisfied);
    }

    #[test]
    fn jk_haar_pair_meets_bound() {
        let a = haar_sample(2, 21).unwrap();
        let b = haar_sample(2, 22).unwrap();
        let result = delta_jk(&a, &b, 6, 6).unwrap();
        let expected_bound = 2.0 * std::f64::consts::PI * 49.0_f64.powf(-0.25);
        assert!((result.bound - expected_bound).abs() < 1e-12);
        assert!(result.satisfied, "delta {} bound {}", result.delta, result.bound);
        assert_eq!(result.evaluations, 6 + 6 * 13);
    }

    #[test]
    fn jk_argmin_reevaluates_to_delta() {
        let a = haar_sample(2, 31).unwrap();
        let b = haar_sample(2, 32).unwrap();
        let result = delta_jk(&a, &b, 4, 5).unwrap();
        if let Argmin::Word2 { j, k } = result.argmin {
            let word = matrix_power(&a, j)
                .unwrap()
                .compose(&matrix_power(&b, k).unwrap())
                .unwrap();
            assert!((phi_value(&word) - result.delta).abs() < 1e-9);
        } else {
            panic!("wrong argmin variant");
        }
    }

    #[test]
    fn jk_equals_set_of_generated_words() {
        // With full cardinality (J+1)(K+1), the word search and the plain set
        // search agree: every quotient collapses to a word in the box.
        let a = haar_sample(2, 41).unwrap();
        let b = haar_sample(2, 42).unwrap();
        let (jm, km) = (2u64, 2u64);
        let mut words = Vec::new();
        for j in 0..=jm as i64 {
            for k in 0..=km as i64 {
                words.push(
                    matrix_power(&a, j)
                        .unwrap()
                        .compose(&matrix_power(&b, k).unwrap())
                        .unwrap(),
                );
            }
        }
        let via_set = delta_set(&words).unwrap();
        let via_words = delta_jk(&a, &b, jm, km).unwrap();
        assert!(
            (via_set.delta - via_words.delta).abs() < 1e-9,
            "set {} vs words {}",
            via_set.delta,
            via_words.delta
        );
    }

    #[test]
    fn word_collapse_identity() {
        // φ(A^{j1}B^{k1}(A^{j2}B^{k2})*) = φ(A^{j1-j2}B^{k1-k2}): the isometric
        // action lets inner powers of A slide past B-blocks.
        let a = haar_sample(3, 51).unwrap();
        let b = haar_sample(3, 52).unwrap();
        for &(j1, k1, j2, k2) in &[(2i64, 1i64, 1i64, 3i64), (0, 2, 3, 1), (4, -2, -1, 2)] {
            let w1 = matrix_power(&a, j1)
                .unwrap()
                .compose(&matrix_power(&b, k1).unwrap())
                .unwrap();
            let w2 = matrix_power(&a, j2)
                .unwrap()
                .compose(&matrix_power(&b, k2).unwrap())
                .unwrap();
            let quotient = w1.compose(&w2.adjoint()).unwrap();
            let collapsed = matrix_power(&a, j1 - j2)
                .unwrap()
                .compose(&matrix_power(&b, k1 - k2).unwrap())
                .unwrap();
            assert!((phi_value(&quotient) - phi_value(&collapsed)).abs() < 1e-9);
        }
    }

    #[test]
    fn jkl_degenerate_letter() {
        let a = haar_sample(2, 61).unwrap();
        let b = haar_sample(2, 62).unwrap();
        // C = I puts the identity word (0,0,1) in the box.
        let result = delta_jkl(&a, &b, &UnitaryMatrix::identity(2), 2, 2, 2).unwrap();
        assert_eq!(result.delta, 0.0);
        assert!(result.degenerate);
        assert_eq!(result.argmin, Argmin::Word3 { j: 0, k: 0, l: 1 });
    }

    #[test]
    fn jkl_reports_conjectural_bound() {
        let a = haar_sample(2, 71).unwrap();
        let b = haar_sample(2, 72).unwrap();
        let c = haar_sample(2, 73).unwrap();
        let result = delta_jkl(&a, &b, &c, 3, 3, 3).unwrap();
        assert_eq!(result.bound_kind, BoundKind::Conjectural);
        assert_eq!(result.evaluations, 3 + 3 * 7 + 3 * 7 * 7);
        assert!(result.delta > 0.0);
    }

    #[test]
    fn verify_reports_are_clean() {
        let r1 = verify_set_bound(1, 2, 100, 5).unwrap();
        assert!(r1.passed());
        assert!(r1.max_ratio <= 1.0);

        let r2 = verify_set_bound(2, 16, 20, 5).unwrap();
        assert!(r2.passed());
        let expected_bound = std::f64::consts::PI; // 2π · 16^{-1/4}
        let set: Vec<UnitaryMatrix> = (0..16).map(|s| haar_sample(2, s).unwrap()).collect();
        assert!((delta_set(&set).unwrap().bound - expected_bound).abs() < 1e-12);

        let r3 = verify_word_bound(1, 1, 1, 100, 6).unwrap();
        assert!(r3.passed());

        let r4 = verify_word_bound(2, 3, 3, 10, 7).unwrap();
        assert!(r4.passed());
    }

    #[test]
    fn search_is_deterministic() {
        let a = haar_sample(2, 81).unwrap();
        let b = haar_sample(2, 82).unwrap();
        let r1 = delta_jk(&a, &b, 5, 5).unwrap();
        let r2 = delta_jk(&a, &b, 5, 5).unwrap();
        assert_eq!(r1.delta, r2.delta);
        assert_eq!(r1.argmin, r2.argmin);
    }
}
