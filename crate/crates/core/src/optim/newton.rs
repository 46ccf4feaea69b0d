//! Newton's method with a central-difference Hessian. When the Hessian is
//! not positive definite, or the previous damped step was rejected, a
//! Levenberg term `λI` is added to its diagonal.

use nalgebra::{Cholesky, DMatrix, DVector};

use super::linesearch::backtrack;
use super::{central_gradient, central_hessian, inf_norm, Counted, LsConfig, OptResult, Termination};

const MAX_BACKTRACKS: usize = 30;
const MAX_DAMPING: f64 = 1e12;
const MIN_DAMPING: f64 = 1e-12;

pub(super) fn minimize(counted: &mut Counted<'_, '_>, x0: &[f64], f0: f64, cfg: &LsConfig) -> OptResult {
    let n = x0.len();
    let mut x = DVector::from_column_slice(x0);
    let mut fx = f0;
    let mut lambda = cfg.initial_damping;
    let mut force_damping = false;
    let mut trajectory = vec![f0];
    let mut termination = Termination::Budget;
    let mut iterations = 0;

    while iterations < cfg.max_iterations {
        let g = DVector::from_vec(central_gradient(
            &mut |p| counted.call(p),
            x.as_slice(),
            cfg.gradient_step,
        ));
        if inf_norm(g.as_slice()) < cfg.gtol {
            termination = Termination::Converged;
            break;
        }
        iterations += 1;
        let rows = central_hessian(&mut |p| counted.call(p), x.as_slice(), fx, cfg.hessian_step);
        let hess = DMatrix::from_fn(n, n, |i, j| rows[i][j]);

        let undamped = if force_damping { None } else { Cholesky::new(hess.clone()) };
        let (chol, damping) = match undamped {
            Some(c) => (c, 0.0),
            None => loop {
                let shifted = &hess + DMatrix::identity(n, n) * lambda;
                if let Some(c) = Cholesky::new(shifted) {
                    break (c, lambda);
                }
                lambda *= 10.0;
                if lambda > MAX_DAMPING {
                    break (
                        Cholesky::new(DMatrix::identity(n, n) * lambda).expect("identity is SPD"),
                        lambda,
                    );
                }
            },
        };
        let d = -chol.solve(&g);
        let slope = g.dot(&d);
        let step = if slope < 0.0 {
            let mut phi = |a: f64| counted.call((&x + &d * a).as_slice());
            backtrack(&mut phi, fx, slope, cfg.armijo, MAX_BACKTRACKS)
        } else {
            None
        };
        match step {
            Some(step) => {
                x += &d * step.alpha;
                fx = step.f;
                if damping > 0.0 {
                    lambda = (lambda / 10.0).max(MIN_DAMPING);
                }
                force_damping = false;
            }
            None => {
                if damping > 0.0 {
                    lambda *= 10.0;
                }
                force_damping = true;
                if lambda > MAX_DAMPING {
                    trajectory.push(fx);
                    termination = Termination::Stalled;
                    break;
                }
            }
        }
        trajectory.push(fx);
    }

    OptResult {
        theta: x.as_slice().to_vec(),
        f: fx,
        trajectory,
        evaluations: 0,
        iterations,
        wall_seconds: 0.0,
        termination,
    }
}
