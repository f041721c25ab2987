//! Set-level relative entropy `S(C‖C') = inf_{ρ∈C, σ∈C'} S(ρ‖σ)` and the
//! derived `F̃(C) = S(Λ∘τ(C)‖C)`.
//!
//! The infimum has no closed form; the search below returns an upper bound.
//! Every exact vertex pair is scored first, then the best pairs seed an
//! exponentiated-gradient descent over both weight vectors with
//! backtracking. The best value seen along each trajectory is kept, so the
//! result never increases with a larger iteration budget.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{combine_states, lambda_tau, ProductPolytope, VertexSet};
use crate::error::{Error, Result};
use crate::state::{eigh, hs_inner, relative_entropy_unchecked, ComplexMatrix, DensityMatrix};
use crate::tolerance::TOL_PSD;

/// Number of descent starts.
pub const DEFAULT_STARTS: usize = 8;

/// Fraction of uniform weight blended into each vertex-pair start.
const START_BLEND: f64 = 0.1;
/// Eigenvalue floor inside matrix logarithms used for search directions.
const LOG_FLOOR: f64 = 1e-12;
const MAX_HALVINGS: usize = 40;

/// Result of the approximate infimum; `value` may be `f64::INFINITY`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetDivergence {
    #[serde(with = "crate::report::extended_f64")]
    pub value: f64,
    pub rho_weights: Vec<f64>,
    pub sigma_weights: Vec<f64>,
    pub approximate: bool,
}

/// Upper bound on `S(C‖C')` after `budget` descent iterations per start.
pub fn set_relative_entropy(c: &ProductPolytope, cprime: &ProductPolytope, budget: usize) -> Result<SetDivergence> {
    if c.factor_dims() != cprime.factor_dims() {
        return Err(Error::DimMismatch { expected: c.state_dim(), actual: cprime.state_dim() });
    }
    let rho_vs = c.vertices();
    let sigma_vs = cprime.vertices();
    let (nr, ns) = (rho_vs.len(), sigma_vs.len());

    // Every σ ∈ C' has support inside supp(barycenter of C'), and ρ = Σλ_i v_i
    // has support inside it iff each used v_i does. Other vertices only make
    // the objective infinite.
    let bary = cprime.barycenter();
    let (q, vecs) = eigh(bary.matrix());
    let null_cols: Vec<usize> = (0..q.len()).filter(|&k| q[k] <= TOL_PSD).collect();
    let feasible: Vec<usize> = (0..nr)
        .filter(|&i| {
            null_cols.iter().all(|&k| {
                let e = vecs.column(k);
                (e.adjoint() * rho_vs[i].matrix() * e)[(0, 0)].re <= TOL_PSD
            })
        })
        .collect();
    if feasible.is_empty() {
        return Ok(SetDivergence {
            value: f64::INFINITY,
            rho_weights: vec![1.0 / nr as f64; nr],
            sigma_weights: vec![1.0 / ns as f64; ns],
            approximate: true,
        });
    }

    let mut pairs: Vec<(f64, usize, usize)> = feasible
        .iter()
        .flat_map(|&i| (0..ns).map(move |j| (i, j)))
        .map(|(i, j)| (relative_entropy_unchecked(rho_vs[i].matrix(), sigma_vs[j].matrix()), i, j))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

    let search = Search { rho_vs, sigma_vs, feasible: &feasible };
    let best = pairs
        .par_iter()
        .take(DEFAULT_STARTS)
        .enumerate()
        .map(|(start, &(value, i, j))| (search.run(value, i, j, budget), start))
        .min_by(|a, b| a.0.value.total_cmp(&b.0.value).then(a.1.cmp(&b.1)))
        .map(|(r, _)| r)
        .expect("at least one start");
    Ok(best)
}

/// `F̃(C) = S(Λ∘τ(C)‖C)`.
pub fn f_tilde(c: &ProductPolytope, budget: usize) -> Result<SetDivergence> {
    set_relative_entropy(&lambda_tau(c), c, budget)
}

struct Search<'a> {
    rho_vs: &'a [DensityMatrix],
    sigma_vs: &'a [DensityMatrix],
    feasible: &'a [usize],
}

impl Search<'_> {
    fn objective(&self, lam: &[f64], mu: &[f64]) -> (f64, ComplexMatrix, ComplexMatrix) {
        let rho = combine_states(self.rho_vs, lam, None).into_matrix();
        let sigma = combine_states(self.sigma_vs, mu, None).into_matrix();
        (relative_entropy_unchecked(&rho, &sigma), rho, sigma)
    }

    fn run(&self, pair_value: f64, i: usize, j: usize, budget: usize) -> SetDivergence {
        let (nr, ns) = (self.rho_vs.len(), self.sigma_vs.len());
        let mut best = SetDivergence {
            value: pair_value,
            rho_weights: unit(nr, i),
            sigma_weights: unit(ns, j),
            approximate: true,
        };
        if budget == 0 || pair_value == 0.0 {
            return best;
        }

        let nf = self.feasible.len() as f64;
        let mut lam = vec![0.0; nr];
        for &f in self.feasible {
            lam[f] = START_BLEND / nf;
        }
        lam[i] += 1.0 - START_BLEND;
        let mut mu: Vec<f64> = vec![START_BLEND / ns as f64; ns];
        mu[j] += 1.0 - START_BLEND;

        let (mut value, mut rho, mut sigma) = self.objective(&lam, &mu);
        if value < best.value {
            best = SetDivergence { value, rho_weights: lam.clone(), sigma_weights: mu.clone(), approximate: true };
        }
        let mut step: f64 = 1.0;
        for _ in 0..budget {
            if !value.is_finite() {
                break;
            }
            let (g_lam, g_mu) = self.gradient(&rho, &sigma);
            let mut accepted = false;
            step = (step * 2.0).min(64.0);
            for _ in 0..MAX_HALVINGS {
                let new_lam = eg_step(&lam, &g_lam, step, Some(self.feasible));
                let new_mu = eg_step(&mu, &g_mu, step, None);
                let (v, r, s) = self.objective(&new_lam, &new_mu);
                if v < value {
                    lam = new_lam;
                    mu = new_mu;
                    value = v;
                    rho = r;
                    sigma = s;
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if !accepted {
                break;
            }
            if value < best.value {
                best = SetDivergence { value, rho_weights: lam.clone(), sigma_weights: mu.clone(), approximate: true };
            }
        }
        best
    }

    /// Partial derivatives of `tr ρ ln ρ − tr ρ ln σ` in the vertex weights,
    /// with logarithms floored at `LOG_FLOOR`.
    fn gradient(&self, rho: &ComplexMatrix, sigma: &ComplexMatrix) -> (Vec<f64>, Vec<f64>) {
        let log_rho = floored_log(rho);
        let (q, u) = eigh(sigma);
        let q: Vec<f64> = q.iter().map(|&x| x.max(LOG_FLOOR)).collect();
        let log_sigma =
            &u * ComplexMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
                q.len(),
                q.iter().map(|x| Complex64::new(x.ln(), 0.0)),
            )) * u.adjoint();
        let diff = log_rho - log_sigma;
        let g_lam = self.rho_vs.iter().map(|v| hs_inner(v.matrix(), &diff)).collect();

        // Daleckii–Krein: tr(ρ · D ln σ[W]) = Σ_kl f_kl Re(conj(ρ̃_kl) W̃_kl)
        // in σ's eigenbasis, with f the first divided difference of ln.
        let n = q.len();
        let rho_t = u.adjoint() * rho * &u;
        let divided = nalgebra::DMatrix::from_fn(n, n, |k, l| {
            let (a, b) = (q[k], q[l]);
            if (a - b).abs() <= 1e-12 * a.max(b) {
                1.0 / a
            } else {
                (a.ln() - b.ln()) / (a - b)
            }
        });
        let g_mu = self
            .sigma_vs
            .iter()
            .map(|w| {
                let w_t = u.adjoint() * w.matrix() * &u;
                let mut acc = 0.0;
                for k in 0..n {
                    for l in 0..n {
                        acc += divided[(k, l)] * (rho_t[(k, l)].conj() * w_t[(k, l)]).re;
                    }
                }
                -acc
            })
            .collect();
        (g_lam, g_mu)
    }
}

fn floored_log(m: &ComplexMatrix) -> ComplexMatrix {
    let (p, u) = eigh(m);
    let diag = nalgebra::DVector::from_iterator(p.len(), p.iter().map(|&x| Complex64::new(x.max(LOG_FLOOR).ln(), 0.0)));
    &u * ComplexMatrix::from_diagonal(&diag) * u.adjoint()
}

fn unit(n: usize, i: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[i] = 1.0;
    v
}

/// Multiplicative-weights step on the simplex, optionally restricted to an
/// index subset (other weights stay zero).
fn eg_step(w: &[f64], g: &[f64], step: f64, allowed: Option<&[usize]>) -> Vec<f64> {
    let idx: Vec<usize> = match allowed {
        Some(a) => a.to_vec(),
        None => (0..w.len()).collect(),
    };
    let g_min = idx.iter().map(|&i| g[i]).fold(f64::INFINITY, f64::min);
    let mut out = vec![0.0; w.len()];
    let mut total = 0.0;
    for &i in &idx {
        let v = w[i] * (-step * (g[i] - g_min)).exp();
        out[i] = v;
        total += v;
    }
    for &i in &idx {
        out[i] /= total;
    }
    out
}
