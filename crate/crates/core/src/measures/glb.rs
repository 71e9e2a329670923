//! Greatest lower bound to reliability.
//!
//! The GLB is `1 - max sum(theta) / total_var` over error variances `theta`
//! that keep `cov - diag(theta)` positive semidefinite. It is solved here with
//! a log-determinant barrier and damped Newton steps: the barrier keeps every
//! iterate strictly feasible and the duality gap after each centering step is
//! exactly `m / t`, which gives a certified stopping rule.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, SymmetricEigen};
use serde::Serialize;

use crate::data::{summarize, ResponseMatrix, VarianceMode};
use crate::error::{Error, Result};

pub const DEFAULT_GLB_TOL: f64 = 1e-6;
pub const DEFAULT_GLB_MAX_ITER: usize = 500;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GlbEstimate {
    pub value: f64,
    /// Error variances at the solution, in the covariance's units.
    pub theta: Vec<f64>,
    pub converged: bool,
    /// Newton steps taken across all barrier stages.
    pub iterations: usize,
}

pub fn glb(m: &ResponseMatrix, tol: f64, max_iter: usize) -> Result<f64> {
    glb_estimate(m, tol, max_iter).map(|g| g.value)
}

pub fn glb_estimate(m: &ResponseMatrix, tol: f64, max_iter: usize) -> Result<GlbEstimate> {
    if m.n_items() < 2 {
        return Err(Error::SingleItem);
    }
    glb_from_covariance(&summarize(m, VarianceMode::Sample).covariance, tol, max_iter)
}

pub fn glb_from_covariance(cov: &DMatrix<f64>, tol: f64, max_iter: usize) -> Result<GlbEstimate> {
    let k = cov.nrows();
    if k < 2 {
        return Err(Error::SingleItem);
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidParameter("glb tolerance must be positive".into()));
    }
    let total = cov.sum();
    let trace = cov.diagonal().sum();
    if total <= f64::EPSILON * trace.abs().max(1.0) || trace <= 0.0 {
        return Err(Error::ZeroTotalVariance);
    }

    // Work on a copy scaled to unit mean variance.
    let scale = trace / k as f64;
    let sigma = cov / scale;
    let total_scaled = total / scale;

    let min_eig = SymmetricEigen::new(sigma.clone())
        .eigenvalues
        .iter()
        .fold(f64::INFINITY, |a, &v| a.min(v));
    // With a positive definite covariance the sign constraints get their own
    // barrier; otherwise no strictly positive theta is feasible and we solve
    // without them, clamping at the end.
    let positive = min_eig > 1e-9;
    let mut theta = if positive {
        DVector::from_element(k, 0.5 * min_eig)
    } else {
        DVector::from_element(k, -1.0)
    };
    let m_constraints = if positive { 2 * k } else { k } as f64;
    // The gap bounds the error in sum(theta), hence in the GLB itself.
    let gap_target = tol * total_scaled;

    let barrier = Barrier { sigma: &sigma, positive };
    let mut t = 1.0;
    let mut iterations = 0;
    let mut converged = false;
    'outer: loop {
        // Centering by damped Newton.
        'center: loop {
            if iterations >= max_iter {
                break 'outer;
            }
            let Some((grad, hess)) = barrier.derivatives(&theta, t) else {
                break 'outer;
            };
            let step = solve_spd(hess, &grad);
            let decrement = -grad.dot(&step);
            if decrement / 2.0 < 1e-9 {
                break;
            }
            iterations += 1;
            let f0 = barrier.value(&theta, t).expect("current iterate is feasible");
            let mut s = 1.0;
            loop {
                let cand = &theta + &step * s;
                if let Some(f) = barrier.value(&cand, t) {
                    if f <= f0 - 0.25 * s * decrement {
                        if cand == theta {
                            // The step is below the resolution of theta.
                            break 'center;
                        }
                        theta = cand;
                        break;
                    }
                }
                s *= 0.5;
                if s < 1e-14 {
                    // No representable progress: centered up to roundoff.
                    if decrement < 1e-6 {
                        break 'center;
                    }
                    break 'outer;
                }
            }
        }
        if m_constraints / t <= gap_target {
            converged = true;
            break;
        }
        t *= 8.0;
    }

    let theta: Vec<f64> = theta.iter().map(|&v| v.max(0.0) * scale).collect();
    let value = 1.0 - theta.iter().sum::<f64>() / total;
    Ok(GlbEstimate {
        value,
        theta,
        converged,
        iterations,
    })
}

struct Barrier<'a> {
    sigma: &'a DMatrix<f64>,
    positive: bool,
}

impl Barrier<'_> {
    fn common_part(&self, theta: &DVector<f64>) -> Option<Cholesky<f64, Dyn>> {
        if self.positive && theta.iter().any(|&v| v <= 0.0) {
            return None;
        }
        let mut c = self.sigma.clone();
        for i in 0..theta.len() {
            c[(i, i)] -= theta[i];
        }
        Cholesky::new(c)
    }

    /// `-t * sum(theta) - log det(cov - diag(theta)) [- sum(log theta)]`
    fn value(&self, theta: &DVector<f64>, t: f64) -> Option<f64> {
        let chol = self.common_part(theta)?;
        let logdet = 2.0 * chol.l().diagonal().iter().map(|d| d.ln()).sum::<f64>();
        let mut f = -t * theta.sum() - logdet;
        if self.positive {
            f -= theta.iter().map(|v| v.ln()).sum::<f64>();
        }
        Some(f)
    }

    fn derivatives(&self, theta: &DVector<f64>, t: f64) -> Option<(DVector<f64>, DMatrix<f64>)> {
        let inv = self.common_part(theta)?.inverse();
        let k = theta.len();
        let mut grad = DVector::from_fn(k, |i, _| inv[(i, i)] - t);
        let mut hess = inv.map(|v| v * v);
        if self.positive {
            for i in 0..k {
                grad[i] -= 1.0 / theta[i];
                hess[(i, i)] += 1.0 / (theta[i] * theta[i]);
            }
        }
        Some((grad, hess))
    }
}

/// Newton direction `-H^{-1} g`.
fn solve_spd(hess: DMatrix<f64>, grad: &DVector<f64>) -> DVector<f64> {
    match Cholesky::new(hess.clone()) {
        Some(ch) => -ch.solve(grad),
        None => -hess
            .lu()
            .solve(grad)
            .unwrap_or_else(|| grad.clone()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::factor::one_factor_covariance;

    #[test]
    fn identity_gives_zero() {
        let g = glb_from_covariance(&DMatrix::identity(4, 4), 1e-6, 500).unwrap();
        assert!(g.converged);
        assert!(g.value.abs() < 1e-6, "{}", g.value);
    }

    #[test]
    fn identical_items_give_one() {
        let cov = DMatrix::from_element(3, 3, 2.0);
        let g = glb_from_covariance(&cov, 1e-6, 500).unwrap();
        assert!((g.value - 1.0).abs() < 1e-6, "{}", g.value);
    }

    #[test]
    fn two_items_closed_form() {
        // Optimum at theta_i = v - c, so glb = 2c / (v + c).
        let (v, c) = (1.5, 0.6);
        let cov = DMatrix::from_row_slice(2, 2, &[v, c, c, v]);
        let g = glb_from_covariance(&cov, 1e-9, 500).unwrap();
        assert!((g.value - 2.0 * c / (v + c)).abs() < 1e-7, "{}", g.value);
    }

    #[test]
    fn bounds_conventional_omega_from_above() {
        let lambda = [0.4, 0.6, 0.7, 0.9, 0.5];
        let psi: Vec<f64> = lambda.iter().map(|l| 1.0 - l * l).collect();
        let cov = one_factor_covariance(&lambda, &psi);
        let g = glb_from_covariance(&cov, 1e-6, 500).unwrap();
        let s: f64 = lambda.iter().sum();
        let omega = s * s / (s * s + psi.iter().sum::<f64>());
        assert!(g.value >= omega - 1e-4, "glb {} omega {}", g.value, omega);
    }

    #[test]
    fn zero_total_variance() {
        let cov = DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0]);
        assert!(matches!(
            glb_from_covariance(&cov, 1e-6, 500),
            Err(Error::ZeroTotalVariance)
        ));
    }
}
