//! Haar sampling on U(N) and estimators for the displacement distribution
//! function Φ(t) = μ{A : φ(A) < t}.
//!
//! Sampling uses the Ginibre/QR construction with the diagonal-phase
//! correction (raw QR is *not* Haar-distributed). Φ is estimated two
//! independent ways: Monte Carlo counting of φ(A) < t, and, for N ≤ 3,
//! deterministic Gauss–Legendre quadrature of the eigen-angle density
//! |E(x)|²/N! over the cube (−w, w)^N, where t = 2 sin πw. The two routes
//! cross-check each other; the closed form at N = 1,
//! Φ₁(t) = 2 arcsin(t/2)/π, anchors both.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::displacement::phi_value;
use crate::error::{Error, Result};
use crate::linalg::{e, reunitarize, ComplexMatrix, UnitaryMatrix};
use crate::quad::gauss_legendre;
use crate::rng::{seeded_rng, split_quotas};

/// Haar-distributed unitary drawn from the given generator.
pub fn haar_sample_with_rng(n: usize, rng: &mut ChaCha8Rng) -> Result<UnitaryMatrix> {
    if n == 0 || n > 64 {
        return Err(Error::Domain(format!("dimension {n} outside 1..=64")));
    }
    if n == 1 {
        // QR of a 1x1 Ginibre matrix reduces to the phase of one Gaussian.
        loop {
            let z = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
            let r = z.norm();
            if r > 1e-300 {
                let u = z / r;
                let residual = (u.norm_sqr() - 1.0).abs();
                return Ok(UnitaryMatrix::from_parts_unchecked(
                    ComplexMatrix::diagonal(&[u]),
                    residual,
                ));
            }
        }
    }
    let ginibre = nalgebra::DMatrix::<Complex64>::from_fn(n, n, |_, _| {
        Complex64::new(
            rng.sample::<f64, _>(StandardNormal),
            rng.sample::<f64, _>(StandardNormal),
        ) * std::f64::consts::FRAC_1_SQRT_2
    });
    let (q, r) = ginibre.qr().unpack();
    // Multiply column i by phase(r_ii): this makes the distribution exactly
    // Haar instead of QR-convention-dependent.
    let mut u = q;
    for i in 0..n {
        let d = r[(i, i)];
        let m = d.norm();
        let phase = if m > 0.0 {
            d / m
        } else {
            Complex64::new(1.0, 0.0)
        };
        for k in 0..n {
            u[(k, i)] *= phase;
        }
    }
    let m = ComplexMatrix::new(u)?;
    let residual = m.unitarity_residual();
    if residual <= 1e-12 * n as f64 {
        Ok(UnitaryMatrix::from_parts_unchecked(m, residual))
    } else {
        reunitarize(&m)
    }
}

/// Haar-distributed unitary for a seed; identical on every call.
pub fn haar_sample(n: usize, seed: u64) -> Result<UnitaryMatrix> {
    haar_sample_with_rng(n, &mut seeded_rng(seed, 0))
}

/// Monte Carlo estimate of Φ(t) with a 95% Wilson interval.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct DistributionEstimate {
    pub t: f64,
    pub n_samples: u64,
    pub hits: u64,
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// 95% Wilson score interval for `hits` successes out of `n` trials.
///
/// Chosen over the Wald interval because Φ(t) sits near zero exactly where
/// the lower-bound checks bite, and Wald intervals collapse there.
pub fn wilson_interval(hits: u64, n: u64) -> (f64, f64) {
    let z = 1.959963984540054_f64;
    let n = n as f64;
    let p = hits as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    // The interval always contains p mathematically; enforce it through
    // rounding so ci_low <= estimate <= ci_high holds exactly.
    (
        (center - half).max(0.0).min(p),
        (center + half).min(1.0).max(p),
    )
}

impl DistributionEstimate {
    pub fn from_hits(t: f64, hits: u64, n_samples: u64) -> Self {
        let (ci_low, ci_high) = wilson_interval(hits, n_samples);
        Self {
            t,
            n_samples,
            hits,
            estimate: hits as f64 / n_samples as f64,
            ci_low,
            ci_high,
        }
    }
}

/// Monte Carlo estimate of Φ(t) over Haar samples, split across `workers`
/// ChaCha streams. Bit-reproducible for a fixed (seed, workers) pair; the hit
/// count is a sum, so the reduction is order-independent.
pub fn phi_distribution_mc_workers(
    n: usize,
    t: f64,
    n_samples: u64,
    seed: u64,
    workers: u32,
) -> Result<DistributionEstimate> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("threshold t = {t} must be >= 0")));
    }
    if n_samples < 100 {
        return Err(Error::Domain(format!(
            "need at least 100 samples, got {n_samples}"
        )));
    }
    let quotas = split_quotas(n_samples, workers);
    let hits: u64 = quotas
        .par_iter()
        .enumerate()
        .map(|(w, &quota)| {
            let mut rng = seeded_rng(seed, w as u64);
            let mut local = 0u64;
            for _ in 0..quota {
                let a = haar_sample_with_rng(n, &mut rng).expect("dimension already validated");
                // Strict inequality: Φ is the measure of the open set φ < t.
                if phi_value(&a) < t {
                    local += 1;
                }
            }
            local
        })
        .sum();
    Ok(DistributionEstimate::from_hits(t, hits, n_samples))
}

/// Single-worker form of [`phi_distribution_mc_workers`].
pub fn phi_distribution_mc(n: usize, t: f64, n_samples: u64, seed: u64) -> Result<DistributionEstimate> {
    phi_distribution_mc_workers(n, t, n_samples, seed, 1)
}

/// φ values of `count` Haar samples, in deterministic (seed, workers) order.
pub fn sample_phi_values(n: usize, count: u64, seed: u64, workers: u32) -> Result<Vec<f64>> {
    if n == 0 || n > 64 {
        return Err(Error::Domain(format!("dimension {n} outside 1..=64")));
    }
    let quotas = split_quotas(count, workers);
    let chunks: Vec<Vec<f64>> = quotas
        .par_iter()
        .enumerate()
        .map(|(w, &quota)| {
            let mut rng = seeded_rng(seed, w as u64);
            (0..quota)
                .map(|_| {
                    let a = haar_sample_with_rng(n, &mut rng).expect("dimension validated");
                    phi_value(&a)
                })
                .collect()
        })
        .collect();
    Ok(chunks.into_iter().flatten().collect())
}

/// The pigeonhole lower bound (t/π)^{N²} ≤ Φ(t), valid for 0 < t ≤ 2.
pub fn phi_lower_bound(n: usize, t: f64) -> Result<f64> {
    if !(t > 0.0 && t <= 2.0) {
        return Err(Error::Domain(format!("t = {t} outside (0, 2]")));
    }
    Ok((t / std::f64::consts::PI).powi((n * n) as i32))
}

/// The unique w in [0, 1/2] with t = 2 sin πw.
pub fn w_of_t(t: f64) -> Result<f64> {
    if !(0.0..=2.0).contains(&t) {
        return Err(Error::Domain(format!("t = {t} outside [0, 2]")));
    }
    Ok((t / 2.0).asin() / std::f64::consts::PI)
}

/// Closed form for the N = 1 distribution: Φ₁(t) = 2 arcsin(t/2)/π.
///
/// At N = 1 the eigen-angle integral is just the length of (−w, w), so this
/// is the oracle every other Φ estimator is checked against.
pub fn phi_cdf_n1(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 2.0 {
        1.0
    } else {
        2.0 * (t / 2.0).asin() / std::f64::consts::PI
    }
}

/// Point of eigen-angles on the torus, componentwise in (−1/2, 1/2].
#[derive(Debug, Clone, PartialEq)]
pub struct WeylPoint {
    x: Vec<f64>,
}

impl WeylPoint {
    pub fn new(x: Vec<f64>) -> Result<Self> {
        if x.is_empty() {
            return Err(Error::Domain("empty eigen-angle vector".into()));
        }
        for &v in &x {
            if !(v > -0.5 && v <= 0.5) {
                return Err(Error::Domain(format!("angle {v} outside (-1/2, 1/2]")));
            }
        }
        Ok(Self { x })
    }

    pub fn coords(&self) -> &[f64] {
        &self.x
    }

    /// Uniform point of the torus in the canonical cube.
    pub fn uniform_with_rng(n: usize, rng: &mut ChaCha8Rng) -> Self {
        let x = (0..n)
            .map(|_| {
                let u: f64 = rng.random();
                if u > 0.5 {
                    u - 1.0
                } else {
                    u
                }
            })
            .collect();
        Self { x }
    }
}

/// |E(x)|² = ∏_{m<n} |e(x_n) − e(x_m)|², evaluated in product form.
pub fn vandermonde_sq(point: &WeylPoint) -> f64 {
    vandermonde_sq_angles(point.coords())
}

pub(crate) fn vandermonde_sq_angles(x: &[f64]) -> f64 {
    let n = x.len();
    let mut prod = 1.0;
    for m in 0..n {
        for k in (m + 1)..n {
            // |e(a) − e(b)|² = 4 sin²(π(a − b))
            let s = (std::f64::consts::PI * (x[k] - x[m])).sin();
            prod *= 4.0 * s * s;
        }
    }
    prod
}

/// |det(e((n−1)x_m))|², the determinant route to the same quantity.
/// Kept as an independent cross-check of the product form.
pub fn vandermonde_det_sq(point: &WeylPoint) -> f64 {
    let x = point.coords();
    let n = x.len();
    let m = nalgebra::DMatrix::<Complex64>::from_fn(n, n, |row, col| e(col as f64 * x[row]));
    m.determinant().norm_sqr()
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Φ(t) by tensor-product Gauss–Legendre quadrature of |E(y)|²/N! over the
/// cube (−w, w)^N. Deterministic; restricted to N ≤ 3 where the tensor grid
/// is affordable.
pub fn weyl_phi_quadrature(n: usize, t: f64, grid_points: usize) -> Result<f64> {
    if n == 0 || n > 3 {
        return Err(Error::Domain(format!(
            "quadrature supports 1 <= N <= 3, got {n}"
        )));
    }
    if !(t > 0.0 && t <= 2.0) {
        return Err(Error::Domain(format!("t = {t} outside (0, 2]")));
    }
    if grid_points == 0 {
        return Err(Error::Domain("grid_points must be positive".into()));
    }
    if (grid_points as f64).powi(n as i32) > 1e8 {
        return Err(Error::Resource(format!(
            "grid {grid_points}^{n} exceeds 10^8 integrand evaluations"
        )));
    }
    let w = w_of_t(t)?;
    let (nodes, weights) = gauss_legendre(grid_points);
    // Map [−1, 1] onto (−w, w).
    let y: Vec<f64> = nodes.iter().map(|&xi| w * xi).collect();
    let wt: Vec<f64> = weights.iter().map(|&wi| w * wi).collect();

    let total = match n {
        1 => wt.iter().sum::<f64>(),
        2 => {
            let mut acc = 0.0;
            for i in 0..grid_points {
                for j in 0..grid_points {
                    let s = (std::f64::consts::PI * (y[j] - y[i])).sin();
                    acc += wt[i] * wt[j] * 4.0 * s * s;
                }
            }
            acc
        }
        3 => {
            let mut acc = 0.0;
            for i in 0..grid_points {
                for j in 0..grid_points {
                    let sij = (std::f64::consts::PI * (y[j] - y[i])).sin();
                    let fij = 4.0 * sij * sij;
                    let wij = wt[i] * wt[j];
                    for k in 0..grid_points {
                        let sik = (std::f64::consts::PI * (y[k] - y[i])).sin();
                        let sjk = (std::f64::consts::PI * (y[k] - y[j])).sin();
                        acc += wij * wt[k] * fij * (4.0 * sik * sik) * (4.0 * sjk * sjk);
                    }
                }
            }
            acc
        }
        _ => unreachable!(),
    };
    // Rounding can push the whole-group mass a few ulps past 1.
    Ok((total / factorial(n)).clamp(0.0, 1.0))
}

/// Monte Carlo mean of |E(x)|²/N! over uniform torus points, with its
/// standard error. The Fourier expansion forces the mean to 1.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ParsevalEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n_samples: u64,
}

pub fn parseval_check(n: usize, n_samples: u64, seed: u64) -> Result<ParsevalEstimate> {
    if n == 0 || n > 6 {
        return Err(Error::Domain(format!(
            "Parseval check supports 1 <= N <= 6, got {n}"
        )));
    }
    if n_samples == 0 {
        return Err(Error::Domain("need at least one sample".into()));
    }
    let mut rng = seeded_rng(seed, 0);
    let inv_fact = 1.0 / factorial(n);
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..n_samples {
        let p = WeylPoint::uniform_with_rng(n, &mut rng);
        let v = vandermonde_sq(&p) * inv_fact;
        sum += v;
        sum_sq += v * v;
    }
    let m = n_samples as f64;
    let mean = sum / m;
    let var = ((sum_sq - sum * sum / m) / (m - 1.0).max(1.0)).max(0.0);
    Ok(ParsevalEstimate {
        mean,
        std_error: (var / m).sqrt(),
        n_samples,
    })
}

/// The contraction inequality (2w)²|e(x) − e(y)|² ≤ |e(2wx) − e(2wy)|² on the
/// cube |w|, |x|, |y| ≤ 1/2, tested with additive slack 1e-12. It must always
/// hold; the function exists as a property-test target.
pub fn sine_inequality_holds(w: f64, x: f64, y: f64) -> Result<bool> {
    for (name, v) in [("w", w), ("x", x), ("y", y)] {
        if !(-0.5..=0.5).contains(&v) {
            return Err(Error::Domain(format!("{name} = {v} outside [-1/2, 1/2]")));
        }
    }
    let pi = std::f64::consts::PI;
    let lhs = (2.0 * w).powi(2) * 4.0 * (pi * (x - y)).sin().powi(2);
    let rhs = 4.0 * (2.0 * pi * w * (x - y)).sin().powi(2);
    Ok(lhs <= rhs + 1e-12)
}
