//! The classical case: the torus (ℝ/ℤ)^L acting on itself by translation.
//!
//! Here the displacement of a translation g is simply max_l ‖g_l‖ with ‖·‖
//! the distance to the nearest integer, the distribution function has the
//! closed form Φ(t) = (2t)^L, and the lattice search over
//! j₁α₁ + ⋯ + j_Mα_M recovers the classical pigeonhole bound
//! δ^L ≤ ∏(K_m + 1)^{−1}.

use rand_chacha::ChaCha8Rng;
use rand::Rng;

use crate::error::{Error, Result};
use crate::search::{Argmin, BoundKind, MinTracker, SearchResult};

/// Degeneracy threshold: a combination this close to 0 counts as an exact
/// relation. Far below any δ the bound can force at permitted box sizes.
pub const TORUS_ZERO_TOL: f64 = 1e-12;

/// Distance from x to the nearest integer, in [0, 1/2].
pub fn dist_nearest_int(x: f64) -> f64 {
    let r = x - x.floor();
    let r = if r >= 1.0 { 0.0 } else { r };
    r.min(1.0 - r)
}

/// Point of (ℝ/ℤ)^L, coordinates reduced to [0, 1) at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusPoint {
    coords: Vec<f64>,
}

impl TorusPoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Dimension("torus point needs at least one coordinate".into()));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFiniteEntry);
        }
        let coords = coords
            .into_iter()
            .map(|c| {
                let r = c - c.floor();
                if r >= 1.0 {
                    0.0
                } else {
                    r
                }
            })
            .collect();
        Ok(Self { coords })
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn uniform_with_rng(dim: usize, rng: &mut ChaCha8Rng) -> Self {
        Self {
            coords: (0..dim).map(|_| rng.random::<f64>()).collect(),
        }
    }
}

/// φ(g) = max_l ‖g_l‖: translations move every point by the same amount, so
/// the sup over the space needs no sampling.
pub fn phi_torus(g: &TorusPoint) -> f64 {
    g.coords
        .iter()
        .map(|&c| dist_nearest_int(c))
        .fold(0.0, f64::max)
}

/// Closed-form distribution function Φ(t) = (2t)^L for 0 ≤ t ≤ 1/2.
pub fn torus_phi_cdf(t: f64, dim: usize) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 0.5 {
        1.0
    } else {
        (2.0 * t).powi(dim as i32)
    }
}

/// Minimal displacement of j₁α₁ + ⋯ + j_Mα_M over the integer box
/// |j_m| ≤ K_m, j ≠ 0, with the ±j symmetry halving the enumeration.
///
/// The bound field is (∏(K_m+1))^{−1/L}, the L-th root of the classical
/// pigeonhole inequality δ^L ∏(K_m+1) ≤ 1. A combination within
/// [`TORUS_ZERO_TOL`] of zero sets the degeneracy flag — the exact-relation
/// branch of the dichotomy.
pub fn torus_delta(alphas: &[TorusPoint], ks: &[u32]) -> Result<SearchResult> {
    if alphas.is_empty() {
        return Err(Error::Cardinality(0));
    }
    if alphas.len() != ks.len() {
        return Err(Error::Dimension(format!(
            "{} generators but {} box sizes",
            alphas.len(),
            ks.len()
        )));
    }
    if ks.iter().any(|&k| k == 0) {
        return Err(Error::Domain("box sizes must be at least 1".into()));
    }
    let dim = alphas[0].dim();
    if alphas.iter().any(|a| a.dim() != dim) {
        return Err(Error::Dimension("generators of mixed dimension".into()));
    }
    let mut box_size = 1u128;
    for &k in ks {
        box_size = box_size.saturating_mul(2 * k as u128 + 1);
    }
    if box_size > 100_000_000 {
        return Err(Error::Resource(format!(
            "box of {box_size} words exceeds 10^8"
        )));
    }

    // Walk representatives (first nonzero coefficient positive) in
    // lexicographic order, maintaining the partial sum so each step costs
    // O(L): for leading index m, j_m runs 1..=K_m while the trailing
    // coefficients sweep their full boxes.
    let m = alphas.len();
    let mut tracker: MinTracker<Vec<i64>> = MinTracker::new();
    let mut order = 0u64;
    let mut evaluations = 0u64;
    let mut coeffs = vec![0i64; m];
    let mut point = vec![0f64; dim];

    // Recursive odometer over positions lead..m with the accumulated point.
    fn sweep(
        lead: usize,
        pos: usize,
        alphas: &[TorusPoint],
        ks: &[u32],
        coeffs: &mut Vec<i64>,
        point: &mut Vec<f64>,
        tracker: &mut MinTracker<Vec<i64>>,
        order: &mut u64,
        evaluations: &mut u64,
    ) {
        if pos == alphas.len() {
            let phi = point
                .iter()
                .map(|&c| dist_nearest_int(c))
                .fold(0.0, f64::max);
            tracker.push(*order, coeffs.clone(), phi);
            *order += 1;
            *evaluations += 1;
            return;
        }
        let (lo, hi) = if pos == lead {
            (1i64, ks[pos] as i64)
        } else {
            (-(ks[pos] as i64), ks[pos] as i64)
        };
        // Move to the start of the range, sweep, then restore.
        for (i, &a) in alphas[pos].coords().iter().enumerate() {
            point[i] += lo as f64 * a;
        }
        let mut j = lo;
        loop {
            coeffs[pos] = j;
            sweep(
                lead,
                pos + 1,
                alphas,
                ks,
                coeffs,
                point,
                tracker,
                order,
                evaluations,
            );
            if j == hi {
                break;
            }
            j += 1;
            for (i, &a) in alphas[pos].coords().iter().enumerate() {
                point[i] += a;
            }
        }
        for (i, &a) in alphas[pos].coords().iter().enumerate() {
            point[i] -= hi as f64 * a;
        }
        coeffs[pos] = 0;
    }

    for lead in 0..m {
        // coeffs[0..lead] stay 0; coeffs[lead] >= 1.
        sweep(
            lead,
            lead,
            alphas,
            ks,
            &mut coeffs,
            &mut point,
            &mut tracker,
            &mut order,
            &mut evaluations,
        );
    }

    let product: f64 = ks.iter().map(|&k| (k + 1) as f64).product();
    let bound = product.powf(-1.0 / dim as f64);
    let coeffs = tracker.argmin().expect("box is nonempty");
    Ok(SearchResult::finish(
        tracker.min,
        Argmin::Lattice { coeffs },
        evaluations,
        bound,
        BoundKind::Proven,
        TORUS_ZERO_TOL,
    ))
}
