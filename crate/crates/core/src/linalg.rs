//! Dense complex matrix arithmetic at small dimension.
//!
//! Everything downstream — displacement values, Haar sampling, word searches —
//! runs on the two types defined here: [`ComplexMatrix`] (square, finite
//! entries) and [`UnitaryMatrix`] (a `ComplexMatrix` carrying a certified
//! unitarity residual `‖A*A − I‖_F`). Eigenvalue work is done exclusively
//! through Hermitian solves: unitary matrices are normal, so their spectrum is
//! recovered from the Hermitian and skew-Hermitian parts.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Global unitarity tolerance ε_u for an N × N matrix.
///
/// Loose enough to survive ~10⁶-fold products with drift-triggered
/// re-projection, tight enough that displacement errors stay below 1e-8.
pub fn unitarity_tol(n: usize) -> f64 {
    1e-10 * n as f64
}

/// e(x) = exp(2πix), the unit-circle parametrization used throughout.
pub fn e(x: f64) -> Complex64 {
    let t = std::f64::consts::TAU * x;
    Complex64::new(t.cos(), t.sin())
}

/// Reduce an angle to the canonical fundamental domain (−1/2, 1/2].
pub fn canonical_angle(x: f64) -> f64 {
    let mut r = x - x.round();
    // x.round() ties away from zero, so r lands in [-1/2, 1/2]; fold -1/2 over.
    if r <= -0.5 {
        r += 1.0;
    }
    r
}

/// Square matrix of finite complex entries.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    data: DMatrix<Complex64>,
}

impl ComplexMatrix {
    /// Wrap a dense matrix, rejecting non-square shapes and NaN/Inf entries.
    pub fn new(data: DMatrix<Complex64>) -> Result<Self> {
        if data.nrows() != data.ncols() || data.nrows() == 0 {
            return Err(Error::Dimension(format!(
                "expected nonempty square matrix, got {}x{}",
                data.nrows(),
                data.ncols()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFiniteEntry);
        }
        Ok(Self { data })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            data: DMatrix::identity(n, n),
        }
    }

    /// Diagonal matrix from the given diagonal entries.
    pub fn diagonal(diag: &[Complex64]) -> Self {
        let n = diag.len();
        Self {
            data: DMatrix::from_fn(n, n, |i, j| {
                if i == j {
                    diag[i]
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }),
        }
    }

    /// Diagonal unitary diag(e(x_1), …, e(x_n)) from angles.
    pub fn diagonal_phases(angles: &[f64]) -> Self {
        let diag: Vec<Complex64> = angles.iter().map(|&x| e(x)).collect();
        Self::diagonal(&diag)
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        Self {
            data: DMatrix::from_fn(n, n, f),
        }
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[(i, j)]
    }

    pub fn raw(&self) -> &DMatrix<Complex64> {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self {
            data: self.data.adjoint(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.dim(),
                self.dim(),
                other.dim(),
                other.dim()
            )));
        }
        Ok(Self {
            data: &self.data * &other.data,
        })
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.norm()
    }

    pub fn determinant(&self) -> Complex64 {
        self.data.determinant()
    }

    /// ‖M*M − I‖_F, the defect from unitarity.
    pub fn unitarity_residual(&self) -> f64 {
        let n = self.dim();
        let mut g = self.data.adjoint() * &self.data;
        for i in 0..n {
            g[(i, i)] -= Complex64::new(1.0, 0.0);
        }
        g.norm()
    }

    /// ‖M − M*‖_F, the defect from hermiticity.
    pub fn hermiticity_residual(&self) -> f64 {
        (&self.data - self.data.adjoint()).norm()
    }

    /// Hermitian part (M + M*)/2. Exactly Hermitian in floating point.
    pub fn hermitian_part(&self) -> Self {
        Self {
            data: (&self.data + self.data.adjoint()).scale(0.5),
        }
    }

    /// Skew part divided by i: (M − M*)/(2i). Also exactly Hermitian.
    pub fn skew_part_over_i(&self) -> Self {
        let half_over_i = Complex64::new(0.0, -0.5);
        Self {
            data: (&self.data - self.data.adjoint()) * half_over_i,
        }
    }
}

/// Unitary matrix with a certified residual `‖A*A − I‖_F ≤ ε_u`.
#[derive(Debug, Clone)]
pub struct UnitaryMatrix {
    matrix: ComplexMatrix,
    residual: f64,
}

impl UnitaryMatrix {
    pub fn identity(n: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(n),
            residual: 0.0,
        }
    }

    /// Crate-internal constructor for matrices whose residual the caller has
    /// already measured (hot sampling paths skip the determinant check).
    pub(crate) fn from_parts_unchecked(matrix: ComplexMatrix, residual: f64) -> Self {
        debug_assert!(residual <= unitarity_tol(matrix.dim()));
        Self { matrix, residual }
    }

    /// Diagonal unitary from eigen-angles; residual is zero by construction.
    pub fn diagonal_phases(angles: &[f64]) -> Self {
        Self {
            matrix: ComplexMatrix::diagonal_phases(angles),
            residual: 0.0,
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// A*, which is also A⁻¹; the residual is recomputed.
    pub fn adjoint(&self) -> Self {
        let matrix = self.matrix.adjoint();
        let residual = matrix.unitarity_residual();
        Self { matrix, residual }
    }

    /// Product of two certified unitaries. Re-projects onto the unitary group
    /// when accumulated drift exceeds ε_u / 2, so the residual invariant holds
    /// along arbitrarily long chains.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        let product = self.matrix.mul(&other.matrix)?;
        let residual = product.unitarity_residual();
        if residual > unitarity_tol(product.dim()) / 2.0 {
            reunitarize(&product)
        } else {
            Ok(Self {
                matrix: product,
                residual,
            })
        }
    }
}

/// Certify that `m` is unitary within `tol`, returning it with its residual.
pub fn check_unitary(m: &ComplexMatrix, tol: f64) -> Result<UnitaryMatrix> {
    let residual = m.unitarity_residual();
    if residual > tol {
        return Err(Error::NotUnitary { residual, tol });
    }
    let det_mod = m.determinant().norm();
    if (det_mod - 1.0).abs() > 1e-8 {
        return Err(Error::InvalidInput(format!(
            "determinant modulus {det_mod} is not within 1e-8 of 1"
        )));
    }
    Ok(UnitaryMatrix {
        matrix: m.clone(),
        residual,
    })
}

/// Smallest eigenvalue of the symmetrized matrix (M + M*)/2 together with a
/// unit eigenvector.
///
/// The input must already be Hermitian within `1e-10 · N`; symmetrization only
/// removes floating-point asymmetry.
pub fn hermitian_min_eigenpair(m: &ComplexMatrix) -> Result<(f64, Vec<Complex64>)> {
    let n = m.dim();
    if m.hermiticity_residual() > 1e-10 * n as f64 {
        return Err(Error::Domain(format!(
            "matrix is not Hermitian within {:.1e}",
            1e-10 * n as f64
        )));
    }
    let h = m.hermitian_part();
    let eig = h.data.clone().symmetric_eigen();
    let mut min_idx = 0;
    for i in 1..n {
        if eig.eigenvalues[i] < eig.eigenvalues[min_idx] {
            min_idx = i;
        }
    }
    let value = eig.eigenvalues[min_idx];
    if !value.is_finite() {
        return Err(Error::EigensolverFailure(
            "non-finite eigenvalue from Hermitian solve".into(),
        ));
    }
    let mut vec: DVector<Complex64> = eig.eigenvectors.column(min_idx).into_owned();
    let norm = vec.norm();
    if norm == 0.0 || !norm.is_finite() {
        return Err(Error::EigensolverFailure("degenerate eigenvector".into()));
    }
    vec /= Complex64::new(norm, 0.0);
    Ok((value, vec.iter().copied().collect()))
}

/// Smallest eigenvalue of the symmetrized matrix, without the eigenvector.
pub fn hermitian_min_eigenvalue(m: &ComplexMatrix) -> Result<f64> {
    hermitian_min_eigenpair(m).map(|(v, _)| v)
}

/// Eigen-angles of a unitary matrix, sorted ascending in (−1/2, 1/2].
#[derive(Debug, Clone, PartialEq)]
pub struct EigenvalueSet {
    angles: Vec<f64>,
}

impl EigenvalueSet {
    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    /// The eigenvalues e(x_n); unit modulus holds exactly since only the
    /// angles are stored.
    pub fn values(&self) -> Vec<Complex64> {
        self.angles.iter().map(|&x| e(x)).collect()
    }
}

/// Eigen-angles x_n of a unitary matrix A, with e(x_n) its eigenvalues.
///
/// A unitary matrix is normal, so it is diagonalized by jointly diagonalizing
/// its commuting Hermitian and skew-Hermitian parts: eigenvectors of
/// H = (A+A*)/2 are refined inside each eigenvalue cluster by the restriction
/// of K = (A−A*)/(2i), which separates the conjugate pair e(±x). The result is
/// certified by the reconstruction residual ‖A − V diag(e(x)) V*‖_F.
pub fn unitary_eigen_angles(a: &UnitaryMatrix) -> Result<EigenvalueSet> {
    let n = a.dim();
    let h = a.matrix().hermitian_part();
    let k = a.matrix().skew_part_over_i();

    let eig = h.data.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let mut vectors = eig.eigenvectors.select_columns(&order);
    let sorted_vals: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();

    // Refine each cluster of near-equal Re-eigenvalues against K.
    let cluster_tol = 1e-7;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && sorted_vals[end] - sorted_vals[end - 1] <= cluster_tol {
            end += 1;
        }
        if end - start > 1 {
            let basis = vectors.columns(start, end - start).into_owned();
            let small = basis.adjoint() * &k.data * &basis;
            let small = (&small + small.adjoint()).scale(0.5);
            let sub = small.symmetric_eigen();
            let rotated = &basis * &sub.eigenvectors;
            vectors.columns_mut(start, end - start).copy_from(&rotated);
        }
        start = end;
    }

    // Rayleigh quotients give the eigenvalues; project onto the unit circle.
    let mut angles = Vec::with_capacity(n);
    for j in 0..n {
        let v = vectors.column(j);
        let av = a.matrix().raw() * &v;
        let lambda: Complex64 = v.dotc(&av);
        let mut x = lambda.im.atan2(lambda.re) / std::f64::consts::TAU;
        if x <= -0.5 {
            x += 1.0;
        }
        angles.push(x);
    }

    // Certify: A must equal V diag(e(x)) V* to working accuracy.
    let mut recon = DMatrix::<Complex64>::zeros(n, n);
    for j in 0..n {
        let v = vectors.column(j);
        let scaled = v.map(|z| z * e(angles[j]));
        recon += scaled * v.adjoint();
    }
    let err = (a.matrix().raw() - recon).norm();
    if err > 1e-8 * n as f64 {
        return Err(Error::EigensolverFailure(format!(
            "reconstruction residual {err:.3e} exceeds {:.3e}",
            1e-8 * n as f64
        )));
    }

    angles.sort_by(f64::total_cmp);
    Ok(EigenvalueSet { angles })
}

/// A^k by repeated squaring; negative exponents go through A⁻¹ = A*.
///
/// Every intermediate product re-projects when its residual crosses ε_u / 2,
/// keeping long power chains certified.
pub fn matrix_power(a: &UnitaryMatrix, k: i64) -> Result<UnitaryMatrix> {
    if k.unsigned_abs() > 1_000_000 {
        return Err(Error::Domain(format!("|exponent| {k} exceeds 10^6")));
    }
    let n = a.dim();
    if k == 0 {
        return Ok(UnitaryMatrix::identity(n));
    }
    let mut base = if k < 0 { a.adjoint() } else { a.clone() };
    let mut exp = k.unsigned_abs();
    let mut acc: Option<UnitaryMatrix> = None;
    loop {
        if exp & 1 == 1 {
            acc = Some(match acc {
                None => base.clone(),
                Some(r) => r.compose(&base)?,
            });
        }
        exp >>= 1;
        if exp == 0 {
            break;
        }
        base = base.compose(&base)?;
    }
    Ok(acc.expect("nonzero exponent always sets the accumulator"))
}

/// Nearest unitary to `m` via the polar factor, computed by the Newton
/// iteration X ← (X + X⁻*)/2 down to residual 1e-14 · N.
pub fn reunitarize(m: &ComplexMatrix) -> Result<UnitaryMatrix> {
    let input_residual = m.unitarity_residual();
    if input_residual >= 0.1 {
        return Err(Error::Domain(format!(
            "matrix too far from unitary for polar projection (residual {input_residual:.3e})"
        )));
    }
    let n = m.dim();
    let target = 1e-14 * n as f64;
    let mut x = m.raw().clone();
    for _ in 0..50 {
        let candidate = ComplexMatrix { data: x.clone() };
        let residual = candidate.unitarity_residual();
        if residual <= target {
            return Ok(UnitaryMatrix {
                matrix: candidate,
                residual,
            });
        }
        let inv_adj = x
            .adjoint()
            .try_inverse()
            .ok_or(Error::ConvergenceFailure(50))?;
        x = (x + inv_adj).scale(0.5);
    }
    Err(Error::ConvergenceFailure(50))
}
