//! Closest point of a vertex hull to a target, via Wolfe's minimum-norm-point
//! algorithm on the translated points `v_i − x`.
//!
//! The active set ("corral") is kept affinely independent, so each affine
//! minimization is a small positive-definite solve. The method terminates
//! finitely in exact arithmetic; an iteration cap guards the floating-point
//! case.

use nalgebra::{DMatrix, DVector};

/// Relative optimality tolerance on the Wolfe gap.
const OPTIMALITY_TOL: f64 = 1e-13;
/// Weights at or below this are dropped from the corral.
const POSITIVITY_TOL: f64 = 1e-14;
/// Distances below this are treated as an exact hit.
const ZERO_DISTANCE: f64 = 1e-15;

/// Convex weights of the closest hull point and its distance to the target.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct ClosestPoint {
    pub weights: Vec<f64>,
    pub distance: f64,
}

/// Minimizes `‖Σ λ_i p_i‖` over the probability simplex.
pub(crate) fn min_norm_point(points: &[DVector<f64>]) -> ClosestPoint {
    assert!(!points.is_empty(), "min_norm_point needs at least one point");
    let n = points.len();
    let scale = points.iter().map(|p| p.norm_squared()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);

    let start = (0..n).min_by(|&a, &b| points[a].norm_squared().total_cmp(&points[b].norm_squared())).unwrap();
    let mut corral = vec![start];
    let mut weights = vec![1.0];
    let mut x = points[start].clone();

    let max_major = 50 * n + 100;
    for _ in 0..max_major {
        let x_sq = x.norm_squared();
        if x_sq.sqrt() <= ZERO_DISTANCE {
            break;
        }
        let (j, best) = (0..n).map(|j| (j, x.dot(&points[j]))).min_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
        if best > x_sq - OPTIMALITY_TOL * scale || corral.contains(&j) {
            break;
        }
        corral.push(j);
        weights.push(0.0);

        // minor cycle
        loop {
            let Some(alpha) = affine_minimizer(points, &corral) else {
                // numerically dependent corral; the current weights are still convex
                return finish(points, &corral, &weights, n);
            };
            if alpha.iter().all(|&a| a > POSITIVITY_TOL) {
                weights = alpha;
                break;
            }
            let theta = weights
                .iter()
                .zip(&alpha)
                .filter(|(_, &a)| a <= POSITIVITY_TOL)
                .map(|(&w, &a)| if w - a > 0.0 { w / (w - a) } else { 0.0 })
                .fold(1.0_f64, f64::min);
            for (w, a) in weights.iter_mut().zip(&alpha) {
                *w = theta * a + (1.0 - theta) * *w;
            }
            let mut keep = Vec::with_capacity(corral.len());
            let mut keep_w = Vec::with_capacity(corral.len());
            for (&idx, &w) in corral.iter().zip(&weights) {
                if w > POSITIVITY_TOL {
                    keep.push(idx);
                    keep_w.push(w);
                }
            }
            if keep.is_empty() {
                // cannot happen in exact arithmetic; keep the largest weight
                let (pos, _) = weights.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap();
                keep.push(corral[pos]);
                keep_w.push(1.0);
            }
            let total: f64 = keep_w.iter().sum();
            keep_w.iter_mut().for_each(|w| *w /= total);
            corral = keep;
            weights = keep_w;
        }
        x = combine(points, &corral, &weights);
    }
    finish(points, &corral, &weights, n)
}

fn combine(points: &[DVector<f64>], corral: &[usize], weights: &[f64]) -> DVector<f64> {
    let mut x = DVector::zeros(points[0].len());
    for (&i, &w) in corral.iter().zip(weights) {
        x.axpy(w, &points[i], 1.0);
    }
    x
}

fn finish(points: &[DVector<f64>], corral: &[usize], weights: &[f64], n: usize) -> ClosestPoint {
    let mut full = vec![0.0; n];
    for (&i, &w) in corral.iter().zip(weights) {
        full[i] = w;
    }
    let distance = combine(points, corral, weights).norm();
    ClosestPoint { weights: full, distance }
}

/// Weights `α` (summing to one) minimizing `‖Σ α_i p_i‖` over the affine
/// hull of the corral; `None` when the corral is affinely dependent.
fn affine_minimizer(points: &[DVector<f64>], corral: &[usize]) -> Option<Vec<f64>> {
    let s = corral.len();
    if s == 1 {
        return Some(vec![1.0]);
    }
    // G = PᵀP + 11ᵀ is positive definite iff the corral is affinely independent,
    // and the constrained minimizer is proportional to G⁻¹1.
    let gram = DMatrix::from_fn(s, s, |a, b| points[corral[a]].dot(&points[corral[b]]) + 1.0);
    let chol = gram.cholesky()?;
    let ones = DVector::from_element(s, 1.0);
    let y = chol.solve(&ones);
    let total: f64 = y.iter().sum();
    if !total.is_finite() || total.abs() < f64::EPSILON {
        return None;
    }
    let alpha: Vec<f64> = y.iter().map(|v| v / total).collect();
    alpha.iter().all(|a| a.is_finite()).then_some(alpha)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(xs)
    }

    #[test]
    fn origin_inside_triangle() {
        let pts = [v(&[1.0, 0.0]), v(&[-1.0, 1.0]), v(&[-1.0, -1.0])];
        let cp = min_norm_point(&pts);
        assert!(cp.distance < 1e-14);
        assert!((cp.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!((cp.weights[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn closest_point_on_edge() {
        let pts = [v(&[1.0, 1.0]), v(&[-1.0, 1.0]), v(&[0.0, 3.0])];
        let cp = min_norm_point(&pts);
        assert!((cp.distance - 1.0).abs() < 1e-14);
        assert!((cp.weights[0] - 0.5).abs() < 1e-12 && (cp.weights[1] - 0.5).abs() < 1e-12);
        assert_eq!(cp.weights[2], 0.0);
    }

    #[test]
    fn single_vertex() {
        let cp = min_norm_point(&[v(&[3.0, 4.0])]);
        assert_eq!(cp.weights, vec![1.0]);
        assert!((cp.distance - 5.0).abs() < 1e-15);
    }

    #[test]
    fn duplicated_and_dependent_points() {
        // square in the plane x = 1 with repeated vertices; closest point (1, 0, 0)
        let pts = [
            v(&[1.0, 1.0, 1.0]),
            v(&[1.0, -1.0, 1.0]),
            v(&[1.0, 1.0, -1.0]),
            v(&[1.0, -1.0, -1.0]),
            v(&[1.0, 1.0, 1.0]),
            v(&[1.0, 0.0, 1.0]),
        ];
        let cp = min_norm_point(&pts);
        assert!((cp.distance - 1.0).abs() < 1e-12);
        let x = pts.iter().zip(&cp.weights).fold(DVector::zeros(3), |acc, (p, &w)| acc + p * w);
        assert!((x - v(&[1.0, 0.0, 0.0])).norm() < 1e-12);
    }

    #[test]
    fn brute_force_agreement_on_random_clouds() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..200 {
            let pts: Vec<DVector<f64>> =
                (0..3).map(|_| v(&[rng.random_range(-1.0..1.0) + 0.3, rng.random_range(-1.0..1.0)])).collect();
            let cp = min_norm_point(&pts);
            // brute force over a fine simplex grid
            let steps = 200;
            let mut best = f64::INFINITY;
            for a in 0..=steps {
                for b in 0..=(steps - a) {
                    let (wa, wb) = (a as f64 / steps as f64, b as f64 / steps as f64);
                    let wc = 1.0 - wa - wb;
                    best = best.min((&pts[0] * wa + &pts[1] * wb + &pts[2] * wc).norm());
                }
            }
            assert!(cp.distance <= best + 1e-12);
            assert!(cp.distance >= best - 1e-2);
        }
    }
}
