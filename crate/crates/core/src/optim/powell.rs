//! Powell's conjugate-direction method: successive Brent line searches along
//! a direction set, replacing the direction of largest decrease with the
//! net displacement when the extrapolation test allows it.

use super::linesearch::line_minimize;
use super::{Counted, LsConfig, OptResult, Termination};

fn along(x: &[f64], d: &[f64], alpha: f64) -> Vec<f64> {
    x.iter().zip(d).map(|(xi, di)| xi + alpha * di).collect()
}

fn line(counted: &mut Counted<'_, '_>, x: &[f64], fx: f64, d: &[f64], tol: f64) -> (Vec<f64>, f64) {
    let mut phi = |a: f64| counted.call(&along(x, d, a));
    let p = line_minimize(&mut phi, fx, tol);
    if p.alpha == 0.0 {
        (x.to_vec(), fx)
    } else {
        (along(x, d, p.alpha), p.f)
    }
}

pub(super) fn minimize(counted: &mut Counted<'_, '_>, x0: &[f64], f0: f64, cfg: &LsConfig) -> OptResult {
    let n = x0.len();
    let mut dirs: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let mut x = x0.to_vec();
    let mut fx = f0;
    let mut trajectory = vec![f0];
    let mut termination = Termination::Budget;
    let mut iterations = 0;

    while iterations < cfg.max_iterations {
        iterations += 1;
        let (x_start, f_start) = (x.clone(), fx);
        let mut big_drop = 0.0;
        let mut big_index = 0;
        for (i, d) in dirs.iter().enumerate() {
            let before = fx;
            (x, fx) = line(counted, &x, fx, d, cfg.xtol);
            if before - fx > big_drop {
                big_drop = before - fx;
                big_index = i;
            }
        }
        if 2.0 * (f_start - fx) <= cfg.ftol * (f_start.abs() + fx.abs()) + 1e-20 {
            trajectory.push(fx);
            termination = Termination::Converged;
            break;
        }
        let displacement: Vec<f64> = x.iter().zip(&x_start).map(|(a, b)| a - b).collect();
        let extrapolated: Vec<f64> = x.iter().zip(&displacement).map(|(a, d)| a + d).collect();
        let f_ext = counted.call(&extrapolated);
        if f_start > f_ext {
            let t = 2.0 * (f_start - 2.0 * fx + f_ext) * (f_start - fx - big_drop).powi(2)
                - big_drop * (f_start - f_ext).powi(2);
            if t < 0.0 {
                (x, fx) = line(counted, &x, fx, &displacement, cfg.xtol);
                dirs[big_index] = dirs[n - 1].clone();
                dirs[n - 1] = displacement;
            }
        }
        trajectory.push(fx);
    }

    OptResult {
        theta: x,
        f: fx,
        trajectory,
        evaluations: 0,
        iterations,
        wall_seconds: 0.0,
        termination,
    }
}
