//! Separability verdicts and constructions built on `Ω(ρ) = ρᴬ⊗ρᴮ` and its
//! set-level extension `Λ∘τ`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{hull_membership, ProductPolytope};
use crate::state::{
    eigh, entropy_of_spectrum, hs_norm_sq_unchecked, partial_trace, partial_transpose_second, tensor_states,
    vn_entropy, ComplexVector, DensityMatrix, Subsystem,
};
use crate::tolerance::{Tolerances, TOL_ENTROPY, TOL_PRODUCT};

/// Pure factors may have a second eigenvalue at most this large.
pub const TOL_PURE_FACTOR: f64 = 1e-9;
/// Default number of uniformly spaced points on a segment scan.
pub const DEFAULT_SEGMENT_POINTS: usize = 101;

/// `ρ = Σ_k λ_k ρ_k¹ ⊗ ρ_k²`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparableDecomposition {
    weights: Vec<f64>,
    factors_a: Vec<DensityMatrix>,
    factors_b: Vec<DensityMatrix>,
}

impl SeparableDecomposition {
    pub fn new(weights: Vec<f64>, factors_a: Vec<DensityMatrix>, factors_b: Vec<DensityMatrix>) -> Result<Self> {
        let invalid = |msg: String| Err(Error::InvalidDecomposition(msg));
        if weights.is_empty() {
            return invalid("no terms".into());
        }
        if factors_a.len() != weights.len() || factors_b.len() != weights.len() {
            return invalid(format!(
                "{} weights but {} first and {} second factors",
                weights.len(),
                factors_a.len(),
                factors_b.len()
            ));
        }
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < -1e-12) {
            return invalid(format!("weight {w} is negative or non-finite"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return invalid(format!("weights sum to {total}"));
        }
        let (n, k) = (factors_a[0].dim(), factors_b[0].dim());
        if factors_a.iter().any(|f| f.dim() != n) || factors_b.iter().any(|f| f.dim() != k) {
            return invalid("factor dimensions differ between terms".into());
        }
        Ok(Self { weights, factors_a, factors_b })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn factors_a(&self) -> &[DensityMatrix] {
        &self.factors_a
    }

    pub fn factors_b(&self) -> &[DensityMatrix] {
        &self.factors_b
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn factor_dims(&self) -> (usize, usize) {
        (self.factors_a[0].dim(), self.factors_b[0].dim())
    }

    /// The state `Σ λ_k ρ_k¹⊗ρ_k²`.
    pub fn assemble(&self) -> DensityMatrix {
        let (n, k) = self.factor_dims();
        let mut acc = crate::state::ComplexMatrix::zeros(n * k, n * k);
        for ((w, a), b) in self.weights.iter().zip(&self.factors_a).zip(&self.factors_b) {
            acc += tensor_states(a, b).into_matrix() * Complex64::new(w.max(0.0), 0.0);
        }
        DensityMatrix::from_trusted(acc, Some((n, k)))
    }

    /// Applies `U₁ · U₁†` and `U₂ · U₂†` to every factor.
    pub fn transformed(&self, u1: &crate::state::ComplexMatrix, u2: &crate::state::ComplexMatrix) -> Result<Self> {
        crate::state::check_unitary(u1, 1e-9)?;
        crate::state::check_unitary(u2, 1e-9)?;
        let (n, k) = self.factor_dims();
        if u1.nrows() != n {
            return Err(Error::DimMismatch { expected: n, actual: u1.nrows() });
        }
        if u2.nrows() != k {
            return Err(Error::DimMismatch { expected: k, actual: u2.nrows() });
        }
        Ok(Self {
            weights: self.weights.clone(),
            factors_a: self.factors_a.iter().map(|f| f.conjugate_by(u1)).collect(),
            factors_b: self.factors_b.iter().map(|f| f.conjugate_by(u2)).collect(),
        })
    }
}

/// `Ω(ρ) = tr₂ρ ⊗ tr₁ρ`.
pub fn omega(rho: &DensityMatrix) -> Result<DensityMatrix> {
    let a = partial_trace(rho, Subsystem::First)?;
    let b = partial_trace(rho, Subsystem::Second)?;
    Ok(tensor_states(&a, &b))
}

/// `Ω(ρ) = ρ` within `TOL_PRODUCT` (HS distance).
pub fn is_product(rho: &DensityMatrix) -> Result<bool> {
    is_product_with(rho, TOL_PRODUCT)
}

pub fn is_product_with(rho: &DensityMatrix, tol_product: f64) -> Result<bool> {
    let w = omega(rho)?;
    Ok(hs_norm_sq_unchecked(&(rho.matrix() - w.matrix())) <= tol_product * tol_product)
}

/// All `n²` cross products `ρ_i¹⊗ρ_j²` of a decomposition's factors.
pub fn invariant_polytope(dec: &SeparableDecomposition) -> Result<ProductPolytope> {
    let mut vertices = Vec::with_capacity(dec.len() * dec.len());
    for a in &dec.factors_a {
        for b in &dec.factors_b {
            vertices.push(tensor_states(a, b));
        }
    }
    ProductPolytope::new(dec.factor_dims(), vertices)
}

/// Smallest eigenvalue of the partial transpose on the second factor.
pub fn ppt_min_eigenvalue(rho: &DensityMatrix) -> Result<f64> {
    let dims = rho.require_factor_dims()?;
    Ok(eigh(&partial_transpose_second(rho.matrix(), dims)).0[0])
}

/// Whether a nonnegative partial transpose proves separability for `dims`.
pub fn ppt_is_conclusive(dims: (usize, usize)) -> bool {
    let (n, k) = dims;
    n.min(k) == 1 || n * k <= 6
}

/// `n` uniformly spaced points `xρ + (1 − x)Ω(ρ)`, from `x = 0` to `x = 1`.
pub fn segment(rho: &DensityMatrix, n: usize) -> Result<Vec<DensityMatrix>> {
    rho.require_factor_dims()?;
    if n < 2 {
        return Err(Error::BadCount(n));
    }
    let base = omega(rho)?;
    Ok(segment_xs(n)
        .into_iter()
        .enumerate()
        .map(|(k, x)| match k {
            0 => base.clone(),
            _ if k == n - 1 => rho.clone(),
            _ => rho.mix(&base, x).expect("same dims"),
        })
        .collect())
}

fn segment_xs(n: usize) -> Vec<f64> {
    (0..n).map(|k| if k == n - 1 { 1.0 } else { k as f64 / (n - 1) as f64 }).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScanVerdict {
    EntangledDetected,
    NoViolationFound,
}

/// PPT verdicts along the segment between `Ω(ρ)` and `ρ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentScanReport {
    pub n_points: usize,
    pub factor_dims: (usize, usize),
    pub x_values: Vec<f64>,
    pub min_pt_eigenvalues: Vec<f64>,
    pub verdict: ScanVerdict,
    /// A detected violation always proves entanglement; absence of one
    /// proves separability only where PPT is complete.
    pub conclusive: bool,
}

impl SegmentScanReport {
    /// `x,min_pt_eigenvalue` rows with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,min_pt_eigenvalue\n");
        for (x, e) in self.x_values.iter().zip(&self.min_pt_eigenvalues) {
            out.push_str(&format!("{},{}\n", crate::report::fmt_f64(*x), crate::report::fmt_f64(*e)));
        }
        out
    }
}

pub fn segment_scan(rho: &DensityMatrix, n: usize) -> Result<SegmentScanReport> {
    segment_scan_with(rho, n, &Tolerances::default())
}

pub fn segment_scan_with(rho: &DensityMatrix, n: usize, tol: &Tolerances) -> Result<SegmentScanReport> {
    let dims = rho.require_factor_dims()?;
    let points = segment(rho, n)?;
    let min_pt_eigenvalues: Vec<f64> =
        points.par_iter().map(|p| ppt_min_eigenvalue(p).expect("segment points carry factor dims")).collect();
    let violated = min_pt_eigenvalues.iter().any(|&e| e < -tol.psd);
    let verdict = if violated { ScanVerdict::EntangledDetected } else { ScanVerdict::NoViolationFound };
    Ok(SegmentScanReport {
        n_points: n,
        factor_dims: dims,
        x_values: segment_xs(n),
        min_pt_eigenvalues,
        verdict,
        conclusive: violated || ppt_is_conclusive(dims),
    })
}

/// Separability of `|ψ⟩⟨ψ|` by reduced-state entropy, cross-checked against
/// the fixed-point condition `Ω(|ψ⟩⟨ψ|) = |ψ⟩⟨ψ|`.
pub fn pure_separability(psi: &ComplexVector, dims: (usize, usize)) -> Result<bool> {
    let norm = psi.norm();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::NotNormalized { norm });
    }
    if dims.0 * dims.1 != psi.len() {
        return Err(Error::DimMismatch { expected: psi.len(), actual: dims.0 * dims.1 });
    }
    let rho = DensityMatrix::from_trusted(psi * psi.adjoint(), Some(dims));
    let entropy = vn_entropy(&partial_trace(&rho, Subsystem::First)?);
    let by_entropy = entropy <= TOL_ENTROPY;
    let distance = hs_norm_sq_unchecked(&(rho.matrix() - omega(&rho)?.matrix())).sqrt();
    let by_fixed_point = distance <= TOL_PRODUCT;
    if by_entropy != by_fixed_point {
        return Err(Error::CriteriaDisagree { entropy, distance });
    }
    Ok(by_entropy)
}

fn second_eigenvalue(state: &DensityMatrix) -> f64 {
    let ev = state.eigenvalues();
    if ev.len() < 2 {
        0.0
    } else {
        ev[ev.len() - 2]
    }
}

/// Invariant polytope of a decomposition into pure factors; every vertex is
/// a product of pure states.
pub fn p_pure_polytope(dec: &SeparableDecomposition) -> Result<ProductPolytope> {
    for (subsystem, factors) in [(1u8, &dec.factors_a), (2u8, &dec.factors_b)] {
        for (index, f) in factors.iter().enumerate() {
            let second = second_eigenvalue(f);
            if second > TOL_PURE_FACTOR {
                return Err(Error::FactorNotPure { subsystem, index, second_eigenvalue: second });
            }
        }
    }
    invariant_polytope(dec)
}

/// Minimum von Neumann entropy over the hull. Entropy is concave, so the
/// minimum sits at a vertex.
pub fn min_entropy_over(p: &ProductPolytope) -> f64 {
    p.vertices_entropy_min()
}

impl ProductPolytope {
    fn vertices_entropy_min(&self) -> f64 {
        use crate::geometry::VertexSet;
        self.vertices().iter().map(|v| entropy_of_spectrum(&v.eigenvalues())).fold(f64::INFINITY, f64::min)
    }
}

/// Pure-product decomposition of `Werner(p)` for `p ≤ 1/3`, found by
/// projecting the state onto the hull of ten product projectors: the six
/// correlated Pauli eigenstate pairs `|n⟩⟨n| ⊗ |n'⟩⟨n'|` with
/// `n' = (n_x, −n_y, n_z)`, and the four computational basis products.
pub fn werner_separable_decomposition(p: f64) -> Result<SeparableDecomposition> {
    let target = crate::families::make_werner(p)?;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let kets: [[Complex64; 2]; 6] = [
        [c(s, 0.0), c(s, 0.0)],     // +x
        [c(s, 0.0), c(-s, 0.0)],    // -x
        [c(s, 0.0), c(0.0, s)],     // +y
        [c(s, 0.0), c(0.0, -s)],    // -y
        [c(1.0, 0.0), c(0.0, 0.0)], // +z
        [c(0.0, 0.0), c(1.0, 0.0)], // -z
    ];
    // n -> n' flips the y component
    let partner = [0usize, 1, 3, 2, 4, 5];
    let proj = |k: &[Complex64; 2]| {
        let v = ComplexVector::from_column_slice(k);
        DensityMatrix::from_trusted(&v * v.adjoint(), None)
    };
    let mut factors_a: Vec<DensityMatrix> = Vec::new();
    let mut factors_b: Vec<DensityMatrix> = Vec::new();
    for (i, &j) in partner.iter().enumerate() {
        factors_a.push(proj(&kets[i]));
        factors_b.push(proj(&kets[j]));
    }
    for i in 0..2 {
        for j in 0..2 {
            factors_a.push(DensityMatrix::basis(2, i));
            factors_b.push(DensityMatrix::basis(2, j));
        }
    }
    let candidates: Vec<DensityMatrix> = factors_a.iter().zip(&factors_b).map(|(a, b)| tensor_states(a, b)).collect();
    let hull = ProductPolytope::new((2, 2), candidates)?;
    let cert = hull_membership(&target, &hull)?;
    if !cert.inside {
        return Err(Error::BadParameter(format!(
            "Werner({p}) is not in the hull of the product candidates (residual {:e})",
            cert.residual
        )));
    }
    let weights = cert.coefficients.unwrap_or_default();
    let keep: Vec<usize> = (0..weights.len()).filter(|&i| weights[i] > 1e-15).collect();
    let total: f64 = keep.iter().map(|&i| weights[i]).sum();
    SeparableDecomposition::new(
        keep.iter().map(|&i| weights[i] / total).collect(),
        keep.iter().map(|&i| factors_a[i].clone()).collect(),
        keep.iter().map(|&i| factors_b[i].clone()).collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{make_bell, make_werner, random_pure_separable_with, random_separable_with, BellKind};
    use crate::geometry::{is_css, VertexSet};
    use crate::tolerance::TOL_PSD;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ket(d: usize, i: usize) -> DensityMatrix {
        DensityMatrix::basis(d, i)
    }

    fn classical_mixture() -> SeparableDecomposition {
        SeparableDecomposition::new(vec![0.5, 0.5], vec![ket(2, 0), ket(2, 1)], vec![ket(2, 0), ket(2, 1)]).unwrap()
    }

    #[test]
    fn decomposition_validation() {
        assert!(SeparableDecomposition::new(vec![], vec![], vec![]).is_err());
        assert!(SeparableDecomposition::new(vec![0.5, 0.6], vec![ket(2, 0), ket(2, 1)], vec![ket(2, 0), ket(2, 1)])
            .is_err());
        assert!(SeparableDecomposition::new(vec![1.5, -0.5], vec![ket(2, 0), ket(2, 1)], vec![ket(2, 0), ket(2, 1)])
            .is_err());
        assert!(SeparableDecomposition::new(vec![1.0], vec![ket(2, 0)], vec![]).is_err());
        assert!(SeparableDecomposition::new(vec![0.5, 0.5], vec![ket(2, 0), ket(3, 1)], vec![ket(2, 0), ket(2, 1)])
            .is_err());
    }

    #[test]
    fn omega_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let prod = crate::families::random_product_state_with((2, 3), &mut rng);
        assert!(omega(&prod).unwrap().hs_distance(&prod) < 1e-14);
        let w = omega(&make_bell(BellKind::PhiPlus)).unwrap();
        assert!(w.hs_distance(&DensityMatrix::maximally_mixed(4, None)) < 1e-15);
        let rho = crate::families::random_bipartite_state_with((3, 2), &mut rng);
        let once = omega(&rho).unwrap();
        assert!(omega(&once).unwrap().hs_distance(&once) < 1e-14);
    }

    #[test]
    fn product_test() {
        let prod = tensor_states(&ket(2, 0), &DensityMatrix::maximally_mixed(2, None));
        assert!(is_product(&prod).unwrap());
        assert!(!is_product(&make_bell(BellKind::PhiPlus)).unwrap());
        let mixture = classical_mixture().assemble();
        assert!(!is_product(&mixture).unwrap());
        let w = omega(&mixture).unwrap();
        for i in 0..4 {
            assert!((w.matrix()[(i, i)].re - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn invariant_polytope_examples() {
        let single = SeparableDecomposition::new(vec![1.0], vec![ket(2, 0)], vec![ket(2, 1)]).unwrap();
        let p = invariant_polytope(&single).unwrap();
        assert_eq!(p.len(), 1);
        assert!(p.vertices()[0].hs_distance(&single.assemble()) < 1e-15);

        let dec = classical_mixture();
        let p = invariant_polytope(&dec).unwrap();
        assert_eq!(p.len(), 4);
        assert!(is_css(&p));
        assert!(hull_membership(&dec.assemble(), &p).unwrap().inside);
    }

    #[test]
    fn ppt_examples() {
        let prod = tensor_states(&ket(2, 0), &ket(2, 1));
        assert!(ppt_min_eigenvalue(&prod).unwrap() >= -TOL_PSD);
        assert!((ppt_min_eigenvalue(&make_bell(BellKind::PhiPlus)).unwrap() + 0.5).abs() < 1e-12);
        for k in 0..=20 {
            let p = k as f64 / 20.0;
            let e = ppt_min_eigenvalue(&make_werner(p).unwrap()).unwrap();
            let expected = ((1.0 - 3.0 * p) / 4.0).min((1.0 + p) / 4.0);
            assert!((e - expected).abs() < 1e-12, "p={p}: {e} vs {expected}");
        }
        assert_eq!(ppt_min_eigenvalue(&DensityMatrix::maximally_mixed(4, None)), Err(Error::NoFactorDims));
    }

    #[test]
    fn segment_examples() {
        let prod = tensor_states(&ket(2, 0), &DensityMatrix::maximally_mixed(2, None));
        for pt in segment(&prod, 5).unwrap() {
            assert!(pt.hs_distance(&prod) < 1e-15);
        }
        let bell = make_bell(BellKind::PhiPlus);
        let seg = segment(&bell, 3).unwrap();
        let mixed = DensityMatrix::maximally_mixed(4, None);
        assert!(seg[0].hs_distance(&mixed) < 1e-15);
        assert_eq!(seg[2], bell);
        assert!(seg[1].hs_distance(&make_werner(0.5).unwrap()) < 1e-15);
        assert_eq!(segment(&bell, 1), Err(Error::BadCount(1)));
        assert_eq!(segment(&mixed, 3), Err(Error::NoFactorDims));
    }

    #[test]
    fn scan_examples() {
        let r = segment_scan(&make_werner(0.9).unwrap(), 101).unwrap();
        assert_eq!(r.verdict, ScanVerdict::EntangledDetected);
        assert!(r.conclusive);
        assert_eq!(r.x_values.len(), 101);
        assert_eq!((r.x_values[0], r.x_values[100]), (0.0, 1.0));
        let r = segment_scan(&make_werner(0.2).unwrap(), 101).unwrap();
        assert_eq!(r.verdict, ScanVerdict::NoViolationFound);
        assert!(r.conclusive);
        let r = segment_scan(&tensor_states(&ket(3, 0), &ket(3, 2)), 11).unwrap();
        assert_eq!(r.verdict, ScanVerdict::NoViolationFound);
        assert!(!r.conclusive);
    }

    #[test]
    fn scan_csv_shape() {
        let r = segment_scan(&make_werner(0.5).unwrap(), 3).unwrap();
        let csv = r.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "x,min_pt_eigenvalue");
        assert_eq!(lines.len(), 4);
        let last: Vec<f64> = lines[3].split(',').map(|s| s.parse().unwrap()).collect();
        assert_eq!(last[0], 1.0);
        assert!((last[1] + 0.125).abs() < 1e-15);
    }

    #[test]
    fn pure_state_examples() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let c = |x: f64| Complex64::new(x, 0.0);
        // |0⟩⊗|+⟩
        let plus = ComplexVector::from_vec(vec![c(s), c(s), c(0.0), c(0.0)]);
        assert!(pure_separability(&plus, (2, 2)).unwrap());
        assert!(!pure_separability(&crate::families::bell_vector(BellKind::PhiPlus), (2, 2)).unwrap());
        let skew = ComplexVector::from_vec(vec![c(0.9_f64.sqrt()), c(0.0), c(0.0), c(0.1_f64.sqrt())]);
        assert!(!pure_separability(&skew, (2, 2)).unwrap());
        let rho = DensityMatrix::from_trusted(&skew * skew.adjoint(), Some((2, 2)));
        let ent = vn_entropy(&partial_trace(&rho, Subsystem::First).unwrap());
        assert!((ent - 0.3250829733914482).abs() < 1e-12);
        let unnormalized = ComplexVector::from_vec(vec![c(1.0), c(1.0), c(0.0), c(0.0)]);
        assert!(matches!(pure_separability(&unnormalized, (2, 2)), Err(Error::NotNormalized { .. })));
    }

    #[test]
    fn p_pure_examples() {
        let p = p_pure_polytope(&classical_mixture()).unwrap();
        assert_eq!(p.len(), 4);
        assert_eq!(min_entropy_over(&p), 0.0);

        let mixed =
            SeparableDecomposition::new(vec![1.0], vec![DensityMatrix::maximally_mixed(2, None)], vec![ket(2, 0)])
                .unwrap();
        match p_pure_polytope(&mixed) {
            Err(Error::FactorNotPure { subsystem: 1, index: 0, second_eigenvalue }) => {
                assert!((second_eigenvalue - 0.5).abs() < 1e-12)
            }
            other => panic!("unexpected {other:?}"),
        }

        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let dec = random_pure_separable_with(3, (2, 3), &mut rng).unwrap();
        assert_eq!(min_entropy_over(&p_pure_polytope(&dec).unwrap()), 0.0);
    }

    #[test]
    fn werner_third_is_in_pure_product_hull() {
        let dec = werner_separable_decomposition(1.0 / 3.0).unwrap();
        let target = make_werner(1.0 / 3.0).unwrap();
        assert!(dec.assemble().hs_distance(&target) < 1e-7);
        let p = p_pure_polytope(&dec).unwrap();
        assert!(hull_membership(&target, &p).unwrap().inside);
        assert_eq!(min_entropy_over(&p), 0.0);
        assert!(werner_separable_decomposition(0.5).is_err());
    }

    #[test]
    fn min_entropy_examples() {
        let mixed = ProductPolytope::singleton(DensityMatrix::maximally_mixed(4, Some((2, 2)))).unwrap();
        assert!((min_entropy_over(&mixed) - 4.0_f64.ln()).abs() < 1e-12);
        let half = DensityMatrix::maximally_mixed(2, None);
        let p = ProductPolytope::new((2, 2), vec![tensor_states(&half, &half), tensor_states(&ket(2, 0), &ket(2, 0))])
            .unwrap();
        assert_eq!(min_entropy_over(&p), 0.0);
    }

    #[test]
    fn separable_states_are_ppt() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for dims in [(2, 2), (2, 3)] {
            for n in 1..5 {
                let rho = random_separable_with(n, dims, &mut rng).unwrap().assemble();
                assert!(ppt_min_eigenvalue(&rho).unwrap() >= -TOL_PSD);
            }
        }
    }
}
