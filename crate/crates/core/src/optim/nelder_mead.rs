use super::{Counted, LsConfig, OptResult, Termination};

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

fn affine(a: &[f64], wa: f64, b: &[f64], wb: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| wa * x + wb * y).collect()
}

pub(super) fn minimize(counted: &mut Counted<'_, '_>, x0: &[f64], f0: f64, cfg: &LsConfig) -> OptResult {
    let n = x0.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((x0.to_vec(), f0));
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += cfg.simplex_step;
        let fv = counted.call(&v);
        simplex.push((v, fv));
    }
    let mut trajectory = vec![f0];
    let mut termination = Termination::Budget;
    let mut iterations = 0;

    loop {
        // Stable sort keeps the incumbent first on ties.
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (best_x, best_f) = (&simplex[0].0, simplex[0].1);
        let f_spread = simplex[1..].iter().fold(0.0_f64, |m, (_, f)| m.max((f - best_f).abs()));
        let x_spread = simplex[1..].iter().fold(0.0_f64, |m, (v, _)| {
            v.iter().zip(best_x).fold(m, |m, (a, b)| m.max((a - b).abs()))
        });
        if f_spread <= cfg.ftol && x_spread <= cfg.xtol {
            termination = Termination::Converged;
            break;
        }
        if iterations >= cfg.max_iterations {
            break;
        }
        iterations += 1;

        let mut centroid = vec![0.0; n];
        for (v, _) in &simplex[..n] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / n as f64;
            }
        }
        let (worst, f_worst) = simplex[n].clone();
        let f_second = simplex[n - 1].1;

        let xr = affine(&centroid, 1.0 + REFLECT, &worst, -REFLECT);
        let fr = counted.call(&xr);
        let mut shrink = false;
        if fr < best_f {
            let xe = affine(&centroid, 1.0 + REFLECT * EXPAND, &worst, -REFLECT * EXPAND);
            let fe = counted.call(&xe);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < f_second {
            simplex[n] = (xr, fr);
        } else if fr < f_worst {
            let xc = affine(&centroid, 1.0 + CONTRACT * REFLECT, &worst, -CONTRACT * REFLECT);
            let fc = counted.call(&xc);
            if fc <= fr {
                simplex[n] = (xc, fc);
            } else {
                shrink = true;
            }
        } else {
            let xcc = affine(&centroid, 1.0 - CONTRACT, &worst, CONTRACT);
            let fcc = counted.call(&xcc);
            if fcc < f_worst {
                simplex[n] = (xcc, fcc);
            } else {
                shrink = true;
            }
        }
        if shrink {
            let anchor = simplex[0].0.clone();
            for vertex in simplex.iter_mut().skip(1) {
                let v = affine(&anchor, 1.0 - SHRINK, &vertex.0, SHRINK);
                let fv = counted.call(&v);
                *vertex = (v, fv);
            }
        }
        let best = simplex.iter().fold(f64::INFINITY, |m, (_, f)| m.min(*f));
        trajectory.push(best.min(*trajectory.last().unwrap()));
    }

    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (theta, f) = simplex.swap_remove(0);
    OptResult {
        theta,
        f,
        trajectory,
        evaluations: 0,
        iterations,
        wall_seconds: 0.0,
        termination,
    }
}
