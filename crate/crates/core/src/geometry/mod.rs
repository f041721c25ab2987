//! Vertex-represented convex subsets of state space and the maps between
//! them.
//!
//! A polytope is stored as a finite generator list; the set it stands for is
//! the convex hull of that list. `τ` takes vertex-wise partial traces (the
//! image hull of a linear map is the hull of the image generators), `Λ`
//! takes all pairwise tensor products of factor vertices, and a polytope is
//! a convex separable subset (CSS) when `Λ∘τ` maps it onto itself.

mod divergence;
mod hull;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::{
    check_unitary, partial_trace, tensor_product, tensor_states, ComplexMatrix, DensityMatrix, Subsystem,
};
use crate::tolerance::{Tolerances, TOL_HULL, TOL_PRUNE};

pub use divergence::{f_tilde, set_relative_entropy, SetDivergence, DEFAULT_STARTS};

/// Anything with a finite list of state vertices of a common dimension.
pub trait VertexSet {
    fn vertices(&self) -> &[DensityMatrix];
    fn state_dim(&self) -> usize;
}

/// Convex hull of finitely many states of one subsystem.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorPolytope {
    dim: usize,
    vertices: Vec<DensityMatrix>,
}

impl FactorPolytope {
    pub fn new(vertices: Vec<DensityMatrix>) -> Result<Self> {
        let dim = vertices.first().ok_or(Error::EmptyPolytope)?.dim();
        for v in &vertices {
            if v.dim() != dim {
                return Err(Error::DimMismatch { expected: dim, actual: v.dim() });
            }
        }
        Ok(Self { dim, vertices })
    }

    pub fn singleton(state: DensityMatrix) -> Self {
        Self { dim: state.dim(), vertices: vec![state] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Drops vertices within `TOL_PRUNE` (HS distance) of an earlier one.
    pub fn pruned(&self) -> Self {
        Self { dim: self.dim, vertices: prune(&self.vertices, TOL_PRUNE) }
    }
}

impl VertexSet for FactorPolytope {
    fn vertices(&self) -> &[DensityMatrix] {
        &self.vertices
    }

    fn state_dim(&self) -> usize {
        self.dim
    }
}

/// Convex hull of finitely many states on `H₁⊗H₂`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductPolytope {
    factor_dims: (usize, usize),
    vertices: Vec<DensityMatrix>,
}

impl ProductPolytope {
    /// Tags every vertex with `factor_dims`; fails on an empty list or a
    /// vertex of the wrong size.
    pub fn new(factor_dims: (usize, usize), vertices: Vec<DensityMatrix>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::EmptyPolytope);
        }
        let vertices =
            vertices.into_iter().map(|v| v.with_factor_dims(Some(factor_dims))).collect::<Result<Vec<_>>>()?;
        Ok(Self { factor_dims, vertices })
    }

    pub fn singleton(state: DensityMatrix) -> Result<Self> {
        let dims = state.require_factor_dims()?;
        Ok(Self { factor_dims: dims, vertices: vec![state] })
    }

    pub fn factor_dims(&self) -> (usize, usize) {
        self.factor_dims
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn into_vertices(self) -> Vec<DensityMatrix> {
        self.vertices
    }

    pub fn pruned(&self) -> Self {
        Self { factor_dims: self.factor_dims, vertices: prune(&self.vertices, TOL_PRUNE) }
    }

    /// Uniform mixture of the vertices.
    pub fn barycenter(&self) -> DensityMatrix {
        let w = vec![1.0 / self.len() as f64; self.len()];
        combine_states(&self.vertices, &w, Some(self.factor_dims))
    }
}

impl VertexSet for ProductPolytope {
    fn vertices(&self) -> &[DensityMatrix] {
        &self.vertices
    }

    fn state_dim(&self) -> usize {
        self.factor_dims.0 * self.factor_dims.1
    }
}

pub(crate) fn prune(vertices: &[DensityMatrix], tol: f64) -> Vec<DensityMatrix> {
    let mut kept: Vec<DensityMatrix> = Vec::with_capacity(vertices.len());
    for v in vertices {
        if !kept.iter().any(|k| k.hs_distance(v) <= tol) {
            kept.push(v.clone());
        }
    }
    kept
}

/// `Σ w_i v_i` for convex weights `w`.
pub(crate) fn combine_states(
    vertices: &[DensityMatrix],
    weights: &[f64],
    factor_dims: Option<(usize, usize)>,
) -> DensityMatrix {
    let d = vertices[0].dim();
    let mut acc = ComplexMatrix::zeros(d, d);
    for (v, &w) in vertices.iter().zip(weights) {
        if w != 0.0 {
            acc += v.matrix().map(|z| z * w);
        }
    }
    DensityMatrix::from_trusted(acc, factor_dims)
}

/// Isometric embedding of an `n×n` complex matrix into `R^{2n²}` under the
/// real Hilbert–Schmidt inner product.
fn embed(m: &ComplexMatrix) -> DVector<f64> {
    DVector::from_iterator(2 * m.len(), m.iter().flat_map(|z| [z.re, z.im]))
}

/// Membership certificate for a point against a vertex hull.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HullCertificate {
    pub inside: bool,
    /// Convex weights of the closest hull point, one per vertex.
    pub coefficients: Option<Vec<f64>>,
    /// HS distance from the query to the closest hull point.
    pub residual: f64,
}

/// Decides `x ∈ Conv(vertices)` by minimizing `‖Σλ_i v_i − x‖_HS` over the
/// simplex; inside means residual `≤ 1e-7`.
pub fn hull_membership<P: VertexSet + ?Sized>(x: &DensityMatrix, p: &P) -> Result<HullCertificate> {
    hull_membership_with(x, p, TOL_HULL)
}

pub fn hull_membership_with<P: VertexSet + ?Sized>(x: &DensityMatrix, p: &P, tol_hull: f64) -> Result<HullCertificate> {
    if x.dim() != p.state_dim() {
        return Err(Error::DimMismatch { expected: p.state_dim(), actual: x.dim() });
    }
    if p.vertices().is_empty() {
        return Err(Error::EmptyPolytope);
    }
    let points: Vec<DVector<f64>> = p.vertices().iter().map(|v| embed(&(v.matrix() - x.matrix()))).collect();
    let cp = hull::min_norm_point(&points);
    Ok(HullCertificate { inside: cp.distance <= tol_hull, coefficients: Some(cp.weights), residual: cp.distance })
}

/// `τ(P) = (τ₁(P), τ₂(P))`: vertex-wise reduced states, duplicates pruned.
pub fn tau(p: &ProductPolytope) -> (FactorPolytope, FactorPolytope) {
    let first: Vec<DensityMatrix> =
        p.vertices.iter().map(|v| partial_trace(v, Subsystem::First).expect("vertices carry factor dims")).collect();
    let second: Vec<DensityMatrix> =
        p.vertices.iter().map(|v| partial_trace(v, Subsystem::Second).expect("vertices carry factor dims")).collect();
    (
        FactorPolytope { dim: p.factor_dims.0, vertices: prune(&first, TOL_PRUNE) },
        FactorPolytope { dim: p.factor_dims.1, vertices: prune(&second, TOL_PRUNE) },
    )
}

/// Generators `{v_i ⊗ w_j}` of `C₁ ⊗̃ C₂`, first-factor index outermost.
pub fn quasi_tensor(c1: &FactorPolytope, c2: &FactorPolytope) -> Vec<DensityMatrix> {
    c1.vertices.iter().flat_map(|a| c2.vertices.iter().map(move |b| tensor_states(a, b))).collect()
}

/// `Λ(C₁, C₂) = Conv(C₁ ⊗̃ C₂)`.
pub fn lambda(c1: &FactorPolytope, c2: &FactorPolytope) -> ProductPolytope {
    ProductPolytope { factor_dims: (c1.dim, c2.dim), vertices: quasi_tensor(c1, c2) }
}

pub fn lambda_tau(p: &ProductPolytope) -> ProductPolytope {
    let (c1, c2) = tau(p);
    lambda(&c1, &c2)
}

/// Outcome of a mutual-inclusion test between two hulls.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolytopeComparison {
    pub equal: bool,
    /// Largest hull residual over all vertices of either side.
    pub max_residual: f64,
}

pub fn compare_polytopes(a: &ProductPolytope, b: &ProductPolytope, tol_hull: f64) -> Result<PolytopeComparison> {
    if a.factor_dims != b.factor_dims {
        return Err(Error::DimMismatch { expected: a.state_dim(), actual: b.state_dim() });
    }
    let mut max_residual = 0.0_f64;
    for (from, into) in [(a, b), (b, a)] {
        for v in &from.vertices {
            let cert = hull_membership_with(v, into, tol_hull)?;
            max_residual = max_residual.max(cert.residual);
        }
    }
    Ok(PolytopeComparison { equal: max_residual <= tol_hull, max_residual })
}

/// Hull equality by mutual vertex inclusion.
pub fn polytope_equal(a: &ProductPolytope, b: &ProductPolytope) -> Result<bool> {
    Ok(compare_polytopes(a, b, TOL_HULL)?.equal)
}

/// Everything the CSS check looked at.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CssReport {
    pub is_css: bool,
    pub max_residual: f64,
    pub vertex_count: usize,
    pub pruned_vertex_count: usize,
    pub image_vertex_count: usize,
}

pub fn css_report(p: &ProductPolytope, tol: &Tolerances) -> CssReport {
    let image = lambda_tau(p);
    let cmp = compare_polytopes(&image, p, tol.hull).expect("Λ∘τ preserves factor dims");
    CssReport {
        is_css: cmp.equal,
        max_residual: cmp.max_residual,
        vertex_count: p.len(),
        pruned_vertex_count: prune(&p.vertices, tol.prune).len(),
        image_vertex_count: image.len(),
    }
}

/// `Λ∘τ(P) = P` as sets.
pub fn is_css(p: &ProductPolytope) -> bool {
    css_report(p, &Tolerances::default()).is_css
}

/// `(Λ∘τ)²(P) = Λ∘τ(P)`; holds for every polytope.
pub fn css_projection_check(p: &ProductPolytope) -> bool {
    let once = lambda_tau(p);
    let twice = lambda_tau(&once);
    polytope_equal(&twice, &once).expect("Λ∘τ preserves factor dims")
}

/// Vertex-wise `(U₁⊗U₂) v (U₁⊗U₂)†`.
pub fn local_unitary_transform(p: &ProductPolytope, u1: &ComplexMatrix, u2: &ComplexMatrix) -> Result<ProductPolytope> {
    let (n, k) = p.factor_dims;
    for (u, d) in [(u1, n), (u2, k)] {
        check_unitary(u, 1e-9)?;
        if u.nrows() != d {
            return Err(Error::DimMismatch { expected: d, actual: u.nrows() });
        }
    }
    let u = tensor_product(u1, u2);
    Ok(ProductPolytope {
        factor_dims: p.factor_dims,
        vertices: p.vertices.iter().map(|v| v.conjugate_by(&u)).collect(),
    })
}
