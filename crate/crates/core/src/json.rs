//! JSON wire formats for states, polytopes, decompositions and Fano data.
//!
//! Matrices are row-major lists of `[re, im]` pairs. A state file carries
//! `"dims": [N, K]` for a bipartite split or `"dims": [d]` for a single
//! system. Malformed text or shapes map to [`Error::Parse`]; well-formed
//! input that is not a valid state maps to the usual validation errors.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fano::FanoDecomposition;
use crate::geometry::{ProductPolytope, VertexSet};
use crate::separability::SeparableDecomposition;
use crate::state::{ComplexMatrix, DensityMatrix};
use crate::tolerance::Tolerances;

/// Raw matrix as it appears on the wire.
pub type WireMatrix = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub dims: Vec<usize>,
    pub matrix: WireMatrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolytopeFile {
    pub factor_dims: [usize; 2],
    pub vertices: Vec<WireMatrix>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecompositionFile {
    pub weights: Vec<f64>,
    pub factors_a: Vec<WireMatrix>,
    pub factors_b: Vec<WireMatrix>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FanoFile {
    pub dims: [usize; 2],
    pub tau_a: Vec<f64>,
    pub tau_b: Vec<f64>,
    pub beta: Vec<Vec<f64>>,
    pub m: Vec<Vec<f64>>,
}

fn parse_text<'a, T: Deserialize<'a>>(text: &'a str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

pub fn matrix_from_wire(rows: &WireMatrix) -> Result<ComplexMatrix> {
    let n = rows.len();
    if n == 0 {
        return Err(Error::Parse("matrix has no rows".into()));
    }
    let cols = rows[0].len();
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != cols) {
        return Err(Error::Parse(format!("row {i} has {} entries, row 0 has {cols}", r.len())));
    }
    Ok(ComplexMatrix::from_fn(n, cols, |i, j| {
        let [re, im] = rows[i][j];
        Complex64::new(re, im)
    }))
}

pub fn matrix_to_wire(m: &ComplexMatrix) -> WireMatrix {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
}

fn dims_to_split(dims: &[usize]) -> Result<Option<(usize, usize)>> {
    match *dims {
        [_] => Ok(None),
        [n, k] => Ok(Some((n, k))),
        _ => Err(Error::Parse(format!("\"dims\" must have one or two entries, got {}", dims.len()))),
    }
}

pub fn parse_state(text: &str) -> Result<DensityMatrix> {
    parse_state_with(text, &Tolerances::default())
}

pub fn parse_state_with(text: &str, tol: &Tolerances) -> Result<DensityMatrix> {
    let file: StateFile = parse_text(text)?;
    let split = dims_to_split(&file.dims)?;
    let m = matrix_from_wire(&file.matrix)?;
    let declared: usize = file.dims.iter().product();
    if m.is_square() && declared != m.nrows() {
        return Err(Error::DimMismatch { expected: m.nrows(), actual: declared });
    }
    DensityMatrix::new_with(m, split, tol)
}

pub fn state_to_file(rho: &DensityMatrix) -> StateFile {
    let dims = match rho.factor_dims() {
        Some((n, k)) => vec![n, k],
        None => vec![rho.dim()],
    };
    StateFile { dims, matrix: matrix_to_wire(rho.matrix()) }
}

pub fn state_to_json(rho: &DensityMatrix) -> String {
    serde_json::to_string_pretty(&state_to_file(rho)).expect("plain data serializes")
}

pub fn parse_polytope(text: &str) -> Result<ProductPolytope> {
    parse_polytope_with(text, &Tolerances::default())
}

pub fn parse_polytope_with(text: &str, tol: &Tolerances) -> Result<ProductPolytope> {
    let file: PolytopeFile = parse_text(text)?;
    if file.vertices.is_empty() {
        return Err(Error::Parse("polytope has an empty vertex list".into()));
    }
    let dims = (file.factor_dims[0], file.factor_dims[1]);
    let vertices = file
        .vertices
        .iter()
        .map(|v| DensityMatrix::new_with(matrix_from_wire(v)?, Some(dims), tol))
        .collect::<Result<Vec<_>>>()?;
    ProductPolytope::new(dims, vertices)
}

pub fn polytope_to_file(p: &ProductPolytope) -> PolytopeFile {
    let (n, k) = p.factor_dims();
    PolytopeFile { factor_dims: [n, k], vertices: p.vertices().iter().map(|v| matrix_to_wire(v.matrix())).collect() }
}

pub fn polytope_to_json(p: &ProductPolytope) -> String {
    serde_json::to_string_pretty(&polytope_to_file(p)).expect("plain data serializes")
}

pub fn parse_decomposition(text: &str) -> Result<SeparableDecomposition> {
    parse_decomposition_with(text, &Tolerances::default())
}

pub fn parse_decomposition_with(text: &str, tol: &Tolerances) -> Result<SeparableDecomposition> {
    let file: DecompositionFile = parse_text(text)?;
    let load = |ms: &[WireMatrix]| {
        ms.iter().map(|m| DensityMatrix::new_with(matrix_from_wire(m)?, None, tol)).collect::<Result<Vec<_>>>()
    };
    SeparableDecomposition::new(file.weights, load(&file.factors_a)?, load(&file.factors_b)?)
}

pub fn decomposition_to_file(dec: &SeparableDecomposition) -> DecompositionFile {
    let wire = |fs: &[DensityMatrix]| fs.iter().map(|f| matrix_to_wire(f.matrix())).collect();
    DecompositionFile {
        weights: dec.weights().to_vec(),
        factors_a: wire(dec.factors_a()),
        factors_b: wire(dec.factors_b()),
    }
}

pub fn decomposition_to_json(dec: &SeparableDecomposition) -> String {
    serde_json::to_string_pretty(&decomposition_to_file(dec)).expect("plain data serializes")
}

fn rows_of(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

pub fn fano_to_file(f: &FanoDecomposition) -> FanoFile {
    let (n, k) = f.dims();
    FanoFile {
        dims: [n, k],
        tau_a: f.tau_a().to_vec(),
        tau_b: f.tau_b().to_vec(),
        beta: rows_of(f.beta()),
        m: rows_of(f.m_tensor()),
    }
}

pub fn fano_to_json(f: &FanoDecomposition) -> String {
    serde_json::to_string_pretty(&fano_to_file(f)).expect("plain data serializes")
}

/// Reads a Fano file back. `m` is recomputed from the other blocks and must
/// agree with the stored one.
pub fn parse_fano(text: &str) -> Result<FanoDecomposition> {
    let file: FanoFile = parse_text(text)?;
    let to_matrix = |rows: &[Vec<f64>], name: &str| -> Result<DMatrix<f64>> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Parse(format!("\"{name}\" rows have unequal lengths")));
        }
        Ok(DMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j]))
    };
    let beta = to_matrix(&file.beta, "beta")?;
    let m = to_matrix(&file.m, "m")?;
    let f = FanoDecomposition::from_parts((file.dims[0], file.dims[1]), file.tau_a, file.tau_b, beta)?;
    if m.shape() != f.m_tensor().shape() || (&m - f.m_tensor()).amax() > 1e-9 {
        return Err(Error::Parse("\"m\" is inconsistent with beta and the Bloch vectors".into()));
    }
    Ok(f)
}
