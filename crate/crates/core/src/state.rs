//! Density matrices and the basic matrix algebra around them.
//!
//! Basis ordering for a bipartite space of factor dimensions `(N, K)` is
//! row-major Kronecker: the index of `|i⟩⊗|j⟩` is `i·K + j`. Every
//! partial trace, partial transpose and tensor product in the crate relies
//! on this convention.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tolerance::{Tolerances, TOL_PSD};

pub type ComplexMatrix = DMatrix<Complex64>;
pub type ComplexVector = DVector<Complex64>;

/// Which factor of `H₁⊗H₂` an operation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Subsystem {
    First,
    Second,
}

/// A validated density matrix: Hermitian, unit trace, positive semidefinite,
/// optionally tagged with a bipartite split `(N, K)` where `N·K = dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    factor_dims: Option<(usize, usize)>,
}

impl DensityMatrix {
    /// Validates `matrix` against the default tolerances.
    pub fn new(matrix: ComplexMatrix, factor_dims: Option<(usize, usize)>) -> Result<Self> {
        Self::new_with(matrix, factor_dims, &Tolerances::default())
    }

    pub fn new_with(matrix: ComplexMatrix, factor_dims: Option<(usize, usize)>, tol: &Tolerances) -> Result<Self> {
        let (rows, cols) = matrix.shape();
        if rows != cols {
            return Err(Error::NotSquare { rows, cols });
        }
        check_finite(&matrix)?;
        if let Some((n, k)) = factor_dims {
            if n * k != rows {
                return Err(Error::DimMismatch { expected: rows, actual: n * k });
            }
        }
        let max_violation = hermitian_violation(&matrix);
        if max_violation > tol.herm {
            return Err(Error::NotHermitian { max_violation });
        }
        let deviation = (matrix.trace() - Complex64::new(1.0, 0.0)).norm();
        if deviation > tol.trace {
            return Err(Error::TraceNotOne { deviation });
        }
        let min_eigenvalue = eigh(&hermitian_part(&matrix)).0[0];
        if min_eigenvalue < -tol.psd {
            return Err(Error::NotPositive { min_eigenvalue });
        }
        Ok(Self { matrix, factor_dims })
    }

    /// Wraps a matrix that is a state by construction (images of states under
    /// positive trace-preserving linear maps, convex mixtures of states).
    pub(crate) fn from_trusted(matrix: ComplexMatrix, factor_dims: Option<(usize, usize)>) -> Self {
        debug_assert!(matrix.is_square());
        Self { matrix, factor_dims }
    }

    /// `|ψ⟩⟨ψ|` for a normalized vector.
    pub fn pure(psi: &ComplexVector, factor_dims: Option<(usize, usize)>) -> Result<Self> {
        let norm = psi.norm();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::NotNormalized { norm });
        }
        Self::new(psi * psi.adjoint(), factor_dims)
    }

    /// `I/d`.
    pub fn maximally_mixed(dim: usize, factor_dims: Option<(usize, usize)>) -> Self {
        let matrix = ComplexMatrix::identity(dim, dim) / Complex64::new(dim as f64, 0.0);
        Self::from_trusted(matrix, factor_dims)
    }

    /// `|i⟩⟨i|` in the computational basis.
    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(index < dim, "basis index {index} out of range for dim {dim}");
        let mut matrix = ComplexMatrix::zeros(dim, dim);
        matrix[(index, index)] = Complex64::new(1.0, 0.0);
        Self::from_trusted(matrix, None)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn factor_dims(&self) -> Option<(usize, usize)> {
        self.factor_dims
    }

    pub fn require_factor_dims(&self) -> Result<(usize, usize)> {
        self.factor_dims.ok_or(Error::NoFactorDims)
    }

    /// Re-tags the state with a bipartite split.
    pub fn with_factor_dims(mut self, factor_dims: Option<(usize, usize)>) -> Result<Self> {
        if let Some((n, k)) = factor_dims {
            if n * k != self.dim() {
                return Err(Error::DimMismatch { expected: self.dim(), actual: n * k });
            }
        }
        self.factor_dims = factor_dims;
        Ok(self)
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        eigh(&self.matrix).0
    }

    /// `x·self + (1 − x)·other` for `x ∈ [0, 1]`.
    pub fn mix(&self, other: &DensityMatrix, x: f64) -> Result<DensityMatrix> {
        if self.dim() != other.dim() {
            return Err(Error::DimMismatch { expected: self.dim(), actual: other.dim() });
        }
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::BadParameter(format!("mixing weight {x} outside [0, 1]")));
        }
        let matrix = self.matrix.map(|z| z * x) + other.matrix.map(|z| z * (1.0 - x));
        Ok(Self::from_trusted(matrix, self.factor_dims.or(other.factor_dims)))
    }

    /// Hilbert–Schmidt distance `‖self − other‖_HS`.
    pub fn hs_distance(&self, other: &DensityMatrix) -> f64 {
        hs_norm_sq_unchecked(&(&self.matrix - &other.matrix)).sqrt()
    }

    /// Conjugates by a unitary: `U ρ U†`.
    pub(crate) fn conjugate_by(&self, u: &ComplexMatrix) -> DensityMatrix {
        Self::from_trusted(u * &self.matrix * u.adjoint(), self.factor_dims)
    }
}

/// Validates a raw matrix as a density matrix (see [`DensityMatrix::new`]).
pub fn validate_density(matrix: ComplexMatrix, factor_dims: Option<(usize, usize)>) -> Result<DensityMatrix> {
    DensityMatrix::new(matrix, factor_dims)
}

fn check_finite(m: &ComplexMatrix) -> Result<()> {
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let z = m[(i, j)];
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::NonFinite { row: i, col: j });
            }
        }
    }
    Ok(())
}

/// `max |a_ij − conj(a_ji)|`.
pub fn hermitian_violation(m: &ComplexMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub(crate) fn hermitian_part(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending and
/// eigenvectors as the matching columns.
pub fn eigh(m: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let n = m.nrows();
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

/// Kronecker product; block `(i, j)` of the result is `a_ij · b`.
pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// `ρ₁ ⊗ ρ₂`, tagged with factor dims `(dim ρ₁, dim ρ₂)`.
pub fn tensor_states(a: &DensityMatrix, b: &DensityMatrix) -> DensityMatrix {
    DensityMatrix::from_trusted(tensor_product(a.matrix(), b.matrix()), Some((a.dim(), b.dim())))
}

/// Partial trace of an arbitrary `NK × NK` operator, keeping one factor.
pub fn partial_trace_matrix(m: &ComplexMatrix, dims: (usize, usize), keep: Subsystem) -> ComplexMatrix {
    let (n, k) = dims;
    debug_assert_eq!(m.nrows(), n * k);
    match keep {
        Subsystem::First => ComplexMatrix::from_fn(n, n, |i, i2| (0..k).map(|j| m[(i * k + j, i2 * k + j)]).sum()),
        Subsystem::Second => ComplexMatrix::from_fn(k, k, |j, j2| (0..n).map(|i| m[(i * k + j, i * k + j2)]).sum()),
    }
}

/// Reduced state on the kept factor: `tr₂ρ` for `First`, `tr₁ρ` for `Second`.
pub fn partial_trace(rho: &DensityMatrix, keep: Subsystem) -> Result<DensityMatrix> {
    let dims = rho.require_factor_dims()?;
    Ok(DensityMatrix::from_trusted(partial_trace_matrix(rho.matrix(), dims, keep), None))
}

/// Partial transpose on the second factor:
/// `ρ^{T₂}_{(i,j),(i',j')} = ρ_{(i,j'),(i',j)}`.
pub fn partial_transpose_second(m: &ComplexMatrix, dims: (usize, usize)) -> ComplexMatrix {
    let (n, k) = dims;
    ComplexMatrix::from_fn(n * k, n * k, |r, c| {
        let (i, j) = (r / k, r % k);
        let (i2, j2) = (c / k, c % k);
        m[(i * k + j2, i2 * k + j)]
    })
}

/// `tr(A A†) = Σ|a_ij|²`.
pub fn hs_norm_sq(a: &ComplexMatrix) -> Result<f64> {
    if !a.is_square() {
        return Err(Error::NotSquare { rows: a.nrows(), cols: a.ncols() });
    }
    Ok(hs_norm_sq_unchecked(a))
}

pub(crate) fn hs_norm_sq_unchecked(a: &ComplexMatrix) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum()
}

/// `Re tr(A† B)`, the real Hilbert–Schmidt inner product.
pub fn hs_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x.conj() * y).re).sum()
}

/// Von Neumann entropy `−Σ λ ln λ` (natural log).
///
/// Eigenvalues at or below the PSD tolerance contribute nothing, and a state
/// of numerical rank one has entropy exactly zero.
pub fn vn_entropy(rho: &DensityMatrix) -> f64 {
    entropy_of_spectrum(&rho.eigenvalues())
}

pub(crate) fn entropy_of_spectrum(eigenvalues: &[f64]) -> f64 {
    let support: Vec<f64> = eigenvalues.iter().copied().filter(|&l| l > TOL_PSD).collect();
    if support.len() <= 1 {
        return 0.0;
    }
    let s: f64 = support.iter().map(|&l| -l * l.ln()).sum();
    s.max(0.0)
}

/// Quantum relative entropy `S(ρ‖σ) = tr ρ ln ρ − tr ρ ln σ`.
///
/// Returns `f64::INFINITY` when the support of `ρ` is not contained in the
/// support of `σ`.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimMismatch { expected: rho.dim(), actual: sigma.dim() });
    }
    Ok(relative_entropy_unchecked(rho.matrix(), sigma.matrix()))
}

pub(crate) fn relative_entropy_unchecked(rho: &ComplexMatrix, sigma: &ComplexMatrix) -> f64 {
    let (p, _) = eigh(rho);
    let (q, vecs) = eigh(sigma);
    let neg_entropy: f64 = p.iter().filter(|&&l| l > TOL_PSD).map(|&l| l * l.ln()).sum();
    let mut cross = 0.0;
    for (k, &qk) in q.iter().enumerate() {
        let e = vecs.column(k);
        let overlap = (e.adjoint() * rho * e)[(0, 0)].re;
        if qk <= TOL_PSD {
            if overlap > TOL_PSD {
                return f64::INFINITY;
            }
        } else {
            cross += overlap * qk.ln();
        }
    }
    (neg_entropy - cross).max(0.0)
}

/// Fails unless `U U† = I` within `tol`.
pub fn check_unitary(u: &ComplexMatrix, tol: f64) -> Result<()> {
    if !u.is_square() {
        return Err(Error::NotSquare { rows: u.nrows(), cols: u.ncols() });
    }
    let n = u.nrows();
    let residual = u * u.adjoint() - ComplexMatrix::identity(n, n);
    let max_violation = residual.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max_violation > tol {
        return Err(Error::NotUnitary { max_violation });
    }
    Ok(())
}
