//! Named states and random ensembles used by tests, the CLI and the FFI.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::error::{Error, Result};
use crate::separability::SeparableDecomposition;
use crate::state::{ComplexMatrix, ComplexVector, DensityMatrix};

/// The four maximally entangled two-qubit states.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BellKind {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

/// Bell state vector in the basis `|00⟩, |01⟩, |10⟩, |11⟩`.
pub fn bell_vector(kind: BellKind) -> ComplexVector {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let amps = match kind {
        BellKind::PhiPlus => [s, 0.0, 0.0, s],
        BellKind::PhiMinus => [s, 0.0, 0.0, -s],
        BellKind::PsiPlus => [0.0, s, s, 0.0],
        BellKind::PsiMinus => [0.0, s, -s, 0.0],
    };
    ComplexVector::from_iterator(4, amps.iter().map(|&a| Complex64::new(a, 0.0)))
}

pub fn make_bell(kind: BellKind) -> DensityMatrix {
    let psi = bell_vector(kind);
    DensityMatrix::from_trusted(&psi * psi.adjoint(), Some((2, 2)))
}

/// Werner state `p|Φ⁺⟩⟨Φ⁺| + (1 − p) I/4`.
pub fn make_werner(p: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::BadParameter(format!("Werner parameter {p} outside [0, 1]")));
    }
    let bell = make_bell(BellKind::PhiPlus);
    bell.mix(&DensityMatrix::maximally_mixed(4, Some((2, 2))), p)
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
}

fn ginibre<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    DMatrix::from_fn(d, d, |_, _| complex_gaussian(rng))
}

/// Hilbert–Schmidt ensemble: `G G† / tr(G G†)` with complex Gaussian `G`.
pub fn random_state_with<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DensityMatrix {
    let g = ginibre(d, rng);
    let w = &g * g.adjoint();
    let tr = w.trace().re;
    DensityMatrix::from_trusted(w / Complex64::new(tr, 0.0), None)
}

pub fn random_state(d: usize, seed: u64) -> Result<DensityMatrix> {
    if d == 0 {
        return Err(Error::BadParameter("dimension must be positive".into()));
    }
    Ok(random_state_with(d, &mut ChaCha8Rng::seed_from_u64(seed)))
}

/// Bipartite state from the Hilbert–Schmidt ensemble on `N·K` dimensions.
pub fn random_bipartite_state_with<R: Rng + ?Sized>(dims: (usize, usize), rng: &mut R) -> DensityMatrix {
    DensityMatrix::from_trusted(random_state_with(dims.0 * dims.1, rng).into_matrix(), Some(dims))
}

/// Haar-random unit vector.
pub fn random_pure_vector<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexVector {
    let v = ComplexVector::from_fn(d, |_, _| complex_gaussian(rng));
    let norm = v.norm();
    v / Complex64::new(norm, 0.0)
}

/// Haar-random pure state.
pub fn random_pure_state_with<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DensityMatrix {
    let psi = random_pure_vector(d, rng);
    DensityMatrix::from_trusted(&psi * psi.adjoint(), None)
}

/// Haar-random unitary: QR of a Ginibre matrix with the phases of `R`'s
/// diagonal moved into `Q`.
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    let qr = ginibre(d, rng).qr();
    let (mut q, r) = qr.unpack();
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Flat distribution on the probability simplex.
pub fn random_simplex_weights<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}

/// Random separable decomposition: flat simplex weights, factors from the
/// Hilbert–Schmidt ensemble of each subsystem.
pub fn random_separable_with<R: Rng + ?Sized>(
    n_terms: usize,
    dims: (usize, usize),
    rng: &mut R,
) -> Result<SeparableDecomposition> {
    if n_terms == 0 {
        return Err(Error::BadParameter("need at least one term".into()));
    }
    let weights = random_simplex_weights(n_terms, rng);
    let mut factors_a = Vec::with_capacity(n_terms);
    let mut factors_b = Vec::with_capacity(n_terms);
    for _ in 0..n_terms {
        factors_a.push(random_state_with(dims.0, rng));
        factors_b.push(random_state_with(dims.1, rng));
    }
    SeparableDecomposition::new(weights, factors_a, factors_b)
}

pub fn random_separable(n_terms: usize, dims: (usize, usize), seed: u64) -> Result<SeparableDecomposition> {
    random_separable_with(n_terms, dims, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Random separable decomposition whose factors are Haar-random pure states.
pub fn random_pure_separable_with<R: Rng + ?Sized>(
    n_terms: usize,
    dims: (usize, usize),
    rng: &mut R,
) -> Result<SeparableDecomposition> {
    if n_terms == 0 {
        return Err(Error::BadParameter("need at least one term".into()));
    }
    let weights = random_simplex_weights(n_terms, rng);
    let mut factors_a = Vec::with_capacity(n_terms);
    let mut factors_b = Vec::with_capacity(n_terms);
    for _ in 0..n_terms {
        factors_a.push(random_pure_state_with(dims.0, rng));
        factors_b.push(random_pure_state_with(dims.1, rng));
    }
    SeparableDecomposition::new(weights, factors_a, factors_b)
}

/// `ρ_A ⊗ ρ_B` with both factors from the Hilbert–Schmidt ensemble.
pub fn random_product_state_with<R: Rng + ?Sized>(dims: (usize, usize), rng: &mut R) -> DensityMatrix {
    let a = random_state_with(dims.0, rng);
    let b = random_state_with(dims.1, rng);
    crate::state::tensor_states(&a, &b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::check_unitary;

    #[test]
    fn werner_endpoints() {
        let w0 = make_werner(0.0).unwrap();
        assert!(w0.hs_distance(&DensityMatrix::maximally_mixed(4, None)) < 1e-15);
        let w1 = make_werner(1.0).unwrap();
        assert!(w1.hs_distance(&make_bell(BellKind::PhiPlus)) < 1e-15);
        assert!(make_werner(1.5).is_err());
        assert!(make_werner(-0.1).is_err());
        assert_eq!(w0.factor_dims(), Some((2, 2)));
    }

    #[test]
    fn bell_states_are_valid_and_orthogonal() {
        let kinds = [BellKind::PhiPlus, BellKind::PhiMinus, BellKind::PsiPlus, BellKind::PsiMinus];
        for (i, a) in kinds.iter().enumerate() {
            let rho = make_bell(*a);
            DensityMatrix::new(rho.matrix().clone(), Some((2, 2))).unwrap();
            for (j, b) in kinds.iter().enumerate() {
                let overlap = (bell_vector(*a).adjoint() * bell_vector(*b))[(0, 0)].norm();
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((overlap - expected).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn random_states_validate() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for d in 1..7 {
            let rho = random_state_with(d, &mut rng);
            DensityMatrix::new(rho.matrix().clone(), None).unwrap();
        }
        assert!(random_state(0, 1).is_err());
        assert_eq!(random_state(3, 5).unwrap(), random_state(3, 5).unwrap());
    }

    #[test]
    fn random_unitaries_are_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for d in 1..6 {
            check_unitary(&random_unitary(d, &mut rng), 1e-12).unwrap();
        }
    }

    #[test]
    fn simplex_weights_sum_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let w = random_simplex_weights(7, &mut rng);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(w.iter().all(|&x| x >= 0.0));
    }
}
