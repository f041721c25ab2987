//! Generalized Gell-Mann bases, Fano decomposition of bipartite states and
//! the Schlienz–Mahler family of correlation measures.
//!
//! A state on `C^N ⊗ C^K` is expanded as
//!
//! ```text
//! ρ = 1/(NK) · ( 1 + Σ τᴬ_i σ_i⊗1 + Σ τᴮ_j 1⊗σ_j + Σ β_ij σ_i⊗σ_j )
//! ```
//!
//! with generators normalized to `tr(σ_i σ_j) = 2δ_ij`. Inverting gives
//! `τᴬ_i = (N/2)·tr(ρᴬ σ_i)`, `τᴮ_j = (K/2)·tr(ρᴮ σ_j)` and
//! `β_ij = (NK/4)·tr(ρ σ_i⊗σ_j)`. The correlation tensor is
//! `M_ij = β_ij − τᴬ_i τᴮ_j`.
//!
//! Since `ρ − ρᴬ⊗ρᴮ = 1/(NK) · Σ M_ij σ_i⊗σ_j`, the tensor and the
//! Hilbert–Schmidt measure are tied exactly by
//! `‖ρ − ρᴬ⊗ρᴮ‖²_HS = 4/(NK)² · tr(M Mᵀ)`; see [`m_tensor_scale`].

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::separability::omega;
use crate::state::{
    hs_norm_sq_unchecked, partial_trace_matrix, tensor_product, ComplexMatrix, DensityMatrix, Subsystem,
};

/// The `d² − 1` generalized Gell-Mann matrices of `su(d)`.
///
/// Order: symmetric off-diagonal `E_jk + E_kj` for `j < k` (lexicographic),
/// then antisymmetric `−i E_jk + i E_kj` in the same order, then the
/// `d − 1` diagonal generators. For `d = 2` this is `σ_x, σ_y, σ_z`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorBasis {
    dim: usize,
    generators: Vec<ComplexMatrix>,
}

impl GeneratorBasis {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[ComplexMatrix] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }
}

pub fn su_generators(d: usize) -> Result<GeneratorBasis> {
    if d < 2 {
        return Err(Error::DimTooSmall(d));
    }
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let mut generators = Vec::with_capacity(d * d - 1);
    let pairs: Vec<(usize, usize)> = (0..d).flat_map(|j| (j + 1..d).map(move |k| (j, k))).collect();
    for &(j, k) in &pairs {
        let mut m = ComplexMatrix::zeros(d, d);
        m[(j, k)] = one;
        m[(k, j)] = one;
        generators.push(m);
    }
    for &(j, k) in &pairs {
        let mut m = ComplexMatrix::zeros(d, d);
        m[(j, k)] = -i;
        m[(k, j)] = i;
        generators.push(m);
    }
    for l in 1..d {
        let scale = (2.0 / (l * (l + 1)) as f64).sqrt();
        let mut m = ComplexMatrix::zeros(d, d);
        for j in 0..l {
            m[(j, j)] = Complex64::new(scale, 0.0);
        }
        m[(l, l)] = Complex64::new(-(l as f64) * scale, 0.0);
        generators.push(m);
    }
    Ok(GeneratorBasis { dim: d, generators })
}

/// Bloch vectors, correlation matrix and SM tensor of a bipartite state.
#[derive(Debug, Clone, PartialEq)]
pub struct FanoDecomposition {
    dims: (usize, usize),
    tau_a: Vec<f64>,
    tau_b: Vec<f64>,
    beta: DMatrix<f64>,
    m_tensor: DMatrix<f64>,
}

impl FanoDecomposition {
    /// Builds a decomposition from its coefficient blocks; the tensor `M` is
    /// recomputed from them.
    pub fn from_parts(dims: (usize, usize), tau_a: Vec<f64>, tau_b: Vec<f64>, beta: DMatrix<f64>) -> Result<Self> {
        let (n, k) = dims;
        if n < 2 || k < 2 {
            return Err(Error::DimTooSmall(n.min(k)));
        }
        let (la, lb) = (n * n - 1, k * k - 1);
        if tau_a.len() != la {
            return Err(Error::DimMismatch { expected: la, actual: tau_a.len() });
        }
        if tau_b.len() != lb {
            return Err(Error::DimMismatch { expected: lb, actual: tau_b.len() });
        }
        if beta.shape() != (la, lb) {
            return Err(Error::DimMismatch { expected: la * lb, actual: beta.nrows() * beta.ncols() });
        }
        if tau_a.iter().chain(&tau_b).chain(beta.iter()).any(|x| !x.is_finite()) {
            return Err(Error::BadParameter("non-finite Fano coefficient".into()));
        }
        let m_tensor = DMatrix::from_fn(la, lb, |i, j| beta[(i, j)] - tau_a[i] * tau_b[j]);
        Ok(Self { dims, tau_a, tau_b, beta, m_tensor })
    }

    pub fn dims(&self) -> (usize, usize) {
        self.dims
    }

    pub fn tau_a(&self) -> &[f64] {
        &self.tau_a
    }

    pub fn tau_b(&self) -> &[f64] {
        &self.tau_b
    }

    pub fn beta(&self) -> &DMatrix<f64> {
        &self.beta
    }

    pub fn m_tensor(&self) -> &DMatrix<f64> {
        &self.m_tensor
    }

    /// `tr(M Mᵀ)`, the raw (unnormalized) SM tensor measure.
    pub fn m_tensor_norm_sq(&self) -> f64 {
        self.m_tensor.iter().map(|x| x * x).sum()
    }
}

/// Factor `c` with `‖ρ − ρᴬ⊗ρᴮ‖²_HS = c · tr(M Mᵀ)`, namely `4/(NK)²`.
pub fn m_tensor_scale(dims: (usize, usize)) -> f64 {
    let nk = (dims.0 * dims.1) as f64;
    4.0 / (nk * nk)
}

fn expectation(rho: &ComplexMatrix, op: &ComplexMatrix) -> f64 {
    // tr(ρ X) = Σ_ab ρ_ab X_ba
    let n = rho.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for a in 0..n {
        for b in 0..n {
            acc += rho[(a, b)] * op[(b, a)];
        }
    }
    acc.re
}

pub fn fano_decompose(rho: &DensityMatrix) -> Result<FanoDecomposition> {
    let (n, k) = rho.require_factor_dims()?;
    let gens_a = su_generators(n)?;
    let gens_b = su_generators(k)?;
    let m = rho.matrix();
    let rho_a = partial_trace_matrix(m, (n, k), Subsystem::First);
    let rho_b = partial_trace_matrix(m, (n, k), Subsystem::Second);
    let tau_a = gens_a.generators().iter().map(|s| 0.5 * n as f64 * expectation(&rho_a, s)).collect();
    let tau_b = gens_b.generators().iter().map(|s| 0.5 * k as f64 * expectation(&rho_b, s)).collect();
    let scale = 0.25 * (n * k) as f64;
    let beta = DMatrix::from_fn(gens_a.len(), gens_b.len(), |i, j| {
        scale * expectation(m, &tensor_product(&gens_a.generators()[i], &gens_b.generators()[j]))
    });
    FanoDecomposition::from_parts((n, k), tau_a, tau_b, beta)
}

/// Assembles the expansion back into a matrix; fails if the result is not a state.
pub fn fano_reconstruct(decomp: &FanoDecomposition) -> Result<DensityMatrix> {
    let (n, k) = decomp.dims;
    let gens_a = su_generators(n)?;
    let gens_b = su_generators(k)?;
    let id_a = ComplexMatrix::identity(n, n);
    let id_b = ComplexMatrix::identity(k, k);
    let mut acc = ComplexMatrix::identity(n * k, n * k);
    for (t, s) in decomp.tau_a.iter().zip(gens_a.generators()) {
        acc += tensor_product(s, &id_b) * Complex64::new(*t, 0.0);
    }
    for (t, s) in decomp.tau_b.iter().zip(gens_b.generators()) {
        acc += tensor_product(&id_a, s) * Complex64::new(*t, 0.0);
    }
    for (i, sa) in gens_a.generators().iter().enumerate() {
        for (j, sb) in gens_b.generators().iter().enumerate() {
            let b = decomp.beta[(i, j)];
            if b != 0.0 {
                acc += tensor_product(sa, sb) * Complex64::new(b, 0.0);
            }
        }
    }
    acc /= Complex64::new((n * k) as f64, 0.0);
    DensityMatrix::new(acc, Some((n, k)))
}

/// Schlienz–Mahler measure `‖ρ − ρᴬ⊗ρᴮ‖²_HS`.
pub fn sm_measure(rho: &DensityMatrix) -> Result<f64> {
    let product = omega(rho)?;
    Ok(hs_norm_sq_unchecked(&(rho.matrix() - product.matrix())))
}

/// `Σ_ij C²(σ_i, σ_j)` over Pauli pairs, with
/// `C = ⟨σ_i⊗σ_j⟩ − ⟨σ_i⊗1⟩⟨1⊗σ_j⟩`. Two-qubit states only.
pub fn correlation_sum(rho: &DensityMatrix) -> Result<f64> {
    let (n, k) = rho.require_factor_dims()?;
    if (n, k) != (2, 2) {
        return Err(Error::UnsupportedDims(n, k));
    }
    let paulis = su_generators(2)?;
    let id = ComplexMatrix::identity(2, 2);
    let m = rho.matrix();
    let single_a: Vec<f64> = paulis.generators().iter().map(|s| expectation(m, &tensor_product(s, &id))).collect();
    let single_b: Vec<f64> = paulis.generators().iter().map(|s| expectation(m, &tensor_product(&id, s))).collect();
    let mut total = 0.0;
    for (i, sa) in paulis.generators().iter().enumerate() {
        for (j, sb) in paulis.generators().iter().enumerate() {
            let c = expectation(m, &tensor_product(sa, sb)) - single_a[i] * single_b[j];
            total += c * c;
        }
    }
    Ok(total)
}

/// Matrix norm used by [`w_measure`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixNorm {
    /// `sqrt(tr(A A†))`
    HilbertSchmidt,
    /// Sum of singular values.
    Trace,
}

impl MatrixNorm {
    pub fn apply(self, a: &ComplexMatrix) -> f64 {
        match self {
            MatrixNorm::HilbertSchmidt => hs_norm_sq_unchecked(a).sqrt(),
            MatrixNorm::Trace => a.clone().svd(false, false).singular_values.iter().sum(),
        }
    }
}

/// `W(ρ) = ‖F(ρ − ρᴬ⊗ρᴮ)‖` for a caller-supplied linear map `F`.
pub fn w_measure<F>(rho: &DensityMatrix, transform: F, norm: MatrixNorm) -> Result<f64>
where
    F: Fn(&ComplexMatrix) -> ComplexMatrix,
{
    let product = omega(rho)?;
    let core = rho.matrix() - product.matrix();
    Ok(norm.apply(&transform(&core)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{make_bell, make_werner, random_bipartite_state_with, random_product_state_with, BellKind};
    use crate::state::tensor_states;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn qubit_generators_are_paulis() {
        let basis = su_generators(2).unwrap();
        let x = ComplexMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]);
        let y = ComplexMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]);
        let z = ComplexMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)]);
        assert_eq!(basis.generators(), &[x, y, z]);
    }

    #[test]
    fn generators_are_orthonormal_and_traceless() {
        for d in 2..6 {
            let basis = su_generators(d).unwrap();
            assert_eq!(basis.len(), d * d - 1);
            for (i, a) in basis.generators().iter().enumerate() {
                assert!(a.trace().norm() < 1e-12);
                assert!((a - a.adjoint()).iter().all(|z| z.norm() < 1e-12));
                for (j, b) in basis.generators().iter().enumerate() {
                    let g = (a * b).trace();
                    let expected = if i == j { 2.0 } else { 0.0 };
                    assert!((g - c(expected, 0.0)).norm() < 1e-12, "d={d} ({i},{j}) -> {g}");
                }
            }
        }
        assert_eq!(su_generators(1), Err(Error::DimTooSmall(1)));
    }

    #[test]
    fn maximally_mixed_has_zero_coefficients() {
        let f = fano_decompose(&DensityMatrix::maximally_mixed(4, Some((2, 2)))).unwrap();
        assert!(f.tau_a().iter().chain(f.tau_b()).all(|x| x.abs() < 1e-15));
        assert!(f.beta().iter().all(|x| x.abs() < 1e-15));
        assert!(f.m_tensor().iter().all(|x| x.abs() < 1e-15));
    }

    #[test]
    fn bell_correlations() {
        let f = fano_decompose(&make_bell(BellKind::PhiPlus)).unwrap();
        assert!(f.tau_a().iter().chain(f.tau_b()).all(|x| x.abs() < 1e-15));
        let expected = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, -1.0, 1.0]));
        assert!((f.beta() - expected).amax() < 1e-15);
    }

    #[test]
    fn product_states_have_zero_tensor() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for dims in [(2, 2), (2, 3), (3, 2), (3, 3)] {
            let rho = random_product_state_with(dims, &mut rng);
            let f = fano_decompose(&rho).unwrap();
            assert!(f.m_tensor().amax() < 1e-14);
        }
    }

    #[test]
    fn reconstruct_identity_term() {
        let f = FanoDecomposition::from_parts((2, 2), vec![0.0; 3], vec![0.0; 3], DMatrix::zeros(3, 3)).unwrap();
        let rho = fano_reconstruct(&f).unwrap();
        assert!(rho.hs_distance(&DensityMatrix::maximally_mixed(4, None)) < 1e-15);
    }

    #[test]
    fn reconstruct_rejects_swap_like_coefficients() {
        // (I + XX + YY + ZZ)/4 = SWAP/2 has eigenvalue -1/2
        let beta = DMatrix::identity(3, 3);
        let f = FanoDecomposition::from_parts((2, 2), vec![0.0; 3], vec![0.0; 3], beta).unwrap();
        match fano_reconstruct(&f) {
            Err(Error::NotPositive { min_eigenvalue }) => assert!((min_eigenvalue + 0.5).abs() < 1e-12),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn from_parts_checks_shapes() {
        assert!(FanoDecomposition::from_parts((2, 2), vec![0.0; 2], vec![0.0; 3], DMatrix::zeros(3, 3)).is_err());
        assert!(FanoDecomposition::from_parts((2, 3), vec![0.0; 3], vec![0.0; 8], DMatrix::zeros(3, 3)).is_err());
        assert!(FanoDecomposition::from_parts((2, 2), vec![f64::NAN; 3], vec![0.0; 3], DMatrix::zeros(3, 3)).is_err());
    }

    #[test]
    fn sm_golden_values() {
        assert!((sm_measure(&make_bell(BellKind::PhiPlus)).unwrap() - 0.75).abs() < 1e-12);
        assert!((sm_measure(&make_werner(0.5).unwrap()).unwrap() - 0.1875).abs() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let rho = random_product_state_with((3, 2), &mut rng);
        assert!(sm_measure(&rho).unwrap() < 1e-15);
        assert_eq!(sm_measure(&DensityMatrix::maximally_mixed(4, None)), Err(Error::NoFactorDims));
    }

    #[test]
    fn correlation_sum_values() {
        assert!((correlation_sum(&make_bell(BellKind::PhiPlus)).unwrap() - 3.0).abs() < 1e-12);
        let a = DensityMatrix::basis(2, 0);
        let b = DensityMatrix::maximally_mixed(2, None);
        assert!(correlation_sum(&tensor_states(&a, &b)).unwrap().abs() < 1e-15);
        let qutrit = DensityMatrix::maximally_mixed(6, Some((2, 3)));
        assert_eq!(correlation_sum(&qutrit), Err(Error::UnsupportedDims(2, 3)));
    }

    #[test]
    fn w_measure_values() {
        let bell = make_bell(BellKind::PhiPlus);
        let hs = w_measure(&bell, |m| m.clone(), MatrixNorm::HilbertSchmidt).unwrap();
        assert!((hs - 0.75_f64.sqrt()).abs() < 1e-12);
        let tr = w_measure(&bell, |m| m.clone(), MatrixNorm::Trace).unwrap();
        assert!((tr - 1.5).abs() < 1e-12);
        let prod = tensor_states(&DensityMatrix::basis(2, 1), &DensityMatrix::basis(2, 0));
        assert!(w_measure(&prod, |m| m.clone(), MatrixNorm::HilbertSchmidt).unwrap() < 1e-15);
    }

    #[test]
    fn m_tensor_matches_sm_measure() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for dims in [(2, 2), (2, 3), (3, 3)] {
            for _ in 0..20 {
                let rho = random_bipartite_state_with(dims, &mut rng);
                let f = fano_decompose(&rho).unwrap();
                let lhs = sm_measure(&rho).unwrap();
                let rhs = m_tensor_scale(dims) * f.m_tensor_norm_sq();
                assert!((lhs - rhs).abs() < 1e-12, "{dims:?}: {lhs} vs {rhs}");
            }
        }
    }
}
