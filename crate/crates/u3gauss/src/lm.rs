//! Damped least squares (Levenberg-Marquardt) for small dense systems with
//! analytic Jacobians. The damping term uses Marquardt's column scaling and
//! each trial step solves the augmented least-squares problem
//! `min ||[J; sqrt(lambda) D] d + [r; 0]||` by QR, which stays well
//! conditioned when `J^T J` would not.

use crate::linalg::{inf_norm, least_squares, norm2_squared, Matrix};

#[derive(Debug, Clone, Copy)]
pub struct LmOptions {
    pub max_iterations: u32,
    /// Convergence threshold on the residual max norm.
    pub residual_tol: f64,
    /// Stop when the accepted step is this small relative to `x`.
    pub step_tol: f64,
}

impl Default for LmOptions {
    fn default() -> Self {
        LmOptions {
            max_iterations: 10_000,
            residual_tol: 1e-12,
            step_tol: 1e-14,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LmResult {
    pub x: Vec<f64>,
    pub residual_inf: f64,
    pub converged: bool,
}

/// Minimize `||f(x)||` from `x0`. `jacobian(x)` must return the matrix of
/// partial derivatives of `f` at `x` (rows = residuals, columns = variables).
pub fn minimize<F, J>(f: F, jacobian: J, x0: Vec<f64>, options: &LmOptions) -> LmResult
where
    F: Fn(&[f64]) -> Vec<f64>,
    J: Fn(&[f64]) -> Matrix,
{
    let n = x0.len();
    let mut x = x0;
    let mut r = f(&x);
    let mut cost = norm2_squared(&r);
    let mut lambda: f64 = 1e-3;
    let mut iterations = 0;

    while iterations < options.max_iterations {
        iterations += 1;
        if inf_norm(&r) <= options.residual_tol {
            break;
        }
        let jac = jacobian(&x);
        let m = jac.rows();

        // column scaling, kept away from zero so the damping always acts
        let scale: Vec<f64> = (0..n).map(|c| jac.column_norm(c).max(1e-10)).collect();

        let mut accepted = false;
        let mut step = vec![0.0; n];
        for _ in 0..40 {
            let mut augmented = Matrix::zeros(m + n, n);
            let mut rhs = vec![0.0; m + n];
            for i in 0..m {
                for c in 0..n {
                    augmented.set(i, c, jac.get(i, c));
                }
                rhs[i] = -r[i];
            }
            let damping = lambda.sqrt();
            for c in 0..n {
                augmented.set(m + c, c, damping * scale[c]);
            }
            let Some(delta) = least_squares(&augmented, &rhs) else {
                lambda *= 10.0;
                continue;
            };
            let trial: Vec<f64> = x.iter().zip(&delta).map(|(a, d)| a + d).collect();
            let trial_r = f(&trial);
            let trial_cost = norm2_squared(&trial_r);
            if trial_cost < cost {
                x = trial;
                r = trial_r;
                cost = trial_cost;
                step = delta;
                lambda = (lambda * 0.25).max(1e-14);
                accepted = true;
                break;
            }
            lambda *= 10.0;
            if lambda > 1e15 {
                break;
            }
        }
        if !accepted {
            break; // stagnated at a non-solution minimum
        }
        if inf_norm(&step) <= options.step_tol * (1.0 + inf_norm(&x)) {
            break;
        }
    }

    let residual_inf = inf_norm(&r);
    LmResult {
        x,
        residual_inf,
        converged: residual_inf <= options.residual_tol,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_a_small_polynomial_system() {
        // x^2 + y^2 = 5, x y = 2  =>  (1, 2) up to symmetry
        let f = |x: &[f64]| vec![x[0] * x[0] + x[1] * x[1] - 5.0, x[0] * x[1] - 2.0];
        let jac = |x: &[f64]| {
            let mut j = Matrix::zeros(2, 2);
            j.set(0, 0, 2.0 * x[0]);
            j.set(0, 1, 2.0 * x[1]);
            j.set(1, 0, x[1]);
            j.set(1, 1, x[0]);
            j
        };
        let result = minimize(f, jac, vec![0.3, 0.7], &LmOptions::default());
        assert!(result.converged, "residual {}", result.residual_inf);
        let (a, b) = (result.x[0].min(result.x[1]), result.x[0].max(result.x[1]));
        assert!((a - 1.0).abs() < 1e-10 && (b - 2.0).abs() < 1e-10);
    }

    #[test]
    fn reports_non_convergence_on_inconsistent_system() {
        // no real solution: x^2 = -1 together with x = 0
        let f = |x: &[f64]| vec![x[0] * x[0] + 1.0, x[0]];
        let jac = |x: &[f64]| {
            let mut j = Matrix::zeros(2, 1);
            j.set(0, 0, 2.0 * x[0]);
            j.set(1, 0, 1.0);
            j
        };
        let result = minimize(f, jac, vec![0.5], &LmOptions::default());
        assert!(!result.converged);
    }
}
