//! Quasi-Newton BFGS on the inverse Hessian with central-difference
//! gradients and Armijo backtracking.

use nalgebra::{DMatrix, DVector};

use super::linesearch::backtrack;
use super::{central_gradient, inf_norm, Counted, LsConfig, OptResult, Termination};

const MAX_BACKTRACKS: usize = 40;

pub(super) fn minimize(counted: &mut Counted<'_, '_>, x0: &[f64], f0: f64, cfg: &LsConfig) -> OptResult {
    let n = x0.len();
    let mut x = DVector::from_column_slice(x0);
    let mut fx = f0;
    let mut g = DVector::from_vec(central_gradient(&mut |p| counted.call(p), x.as_slice(), cfg.gradient_step));
    let mut hinv = DMatrix::<f64>::identity(n, n);
    let mut first_update = true;
    let mut trajectory = vec![f0];
    let mut termination = Termination::Budget;
    let mut iterations = 0;

    loop {
        if inf_norm(g.as_slice()) < cfg.gtol {
            termination = Termination::Converged;
            break;
        }
        if iterations >= cfg.max_iterations {
            break;
        }
        iterations += 1;

        let mut d = -(&hinv * &g);
        let mut slope = g.dot(&d);
        if slope >= 0.0 {
            hinv = DMatrix::identity(n, n);
            d = -g.clone();
            slope = g.dot(&d);
        }
        let step = {
            let mut phi = |a: f64| counted.call((&x + &d * a).as_slice());
            backtrack(&mut phi, fx, slope, cfg.armijo, MAX_BACKTRACKS)
        };
        let Some(step) = step else {
            trajectory.push(fx);
            termination = Termination::Stalled;
            break;
        };
        let x_new = &x + &d * step.alpha;
        let g_new = DVector::from_vec(central_gradient(
            &mut |p| counted.call(p),
            x_new.as_slice(),
            cfg.gradient_step,
        ));
        let s = &x_new - &x;
        let y = &g_new - &g;
        let ys = y.dot(&s);
        if ys > 1e-12 * s.norm() * y.norm() {
            if first_update {
                hinv = DMatrix::identity(n, n) * (ys / y.dot(&y));
                first_update = false;
            }
            let rho = 1.0 / ys;
            let ident = DMatrix::<f64>::identity(n, n);
            let left = &ident - &s * y.transpose() * rho;
            let right = &ident - &y * s.transpose() * rho;
            hinv = left * hinv * right + &s * s.transpose() * rho;
        }
        x = x_new;
        fx = step.f;
        g = g_new;
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
