//! Classical optimizers: the real-coded GA (REX crossover, JGG alternation),
//! four local searchers, and the GA-then-LS driver.

mod bfgs;
pub mod ga;
pub mod gmig;
mod linesearch;
mod nelder_mead;
mod newton;
mod powell;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use ga::{
    evaluate_population, ga_converged, ga_init, jgg_step, rex_child, rex_crossover, run_ga, sample_f_ini,
    GaConfig, GaRun, Individual, JggOutcome, Population,
};
pub use gmig::{gmig_vqe, ordinary_vqe, Candidate, GaSummary, GmigConfig, GmigOutcome, Selector};

/// Objective callable shared by every optimizer. Non-finite values are
/// treated as +∞ by the searchers.
pub type ObjectiveFn<'a> = dyn Fn(&[f64]) -> f64 + Sync + 'a;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LsMethod {
    Powell,
    Bfgs,
    NelderMead,
    Newton,
}

impl LsMethod {
    pub const ALL: [LsMethod; 4] = [LsMethod::Powell, LsMethod::Bfgs, LsMethod::NelderMead, LsMethod::Newton];

    pub fn as_str(self) -> &'static str {
        match self {
            LsMethod::Powell => "powell",
            LsMethod::Bfgs => "bfgs",
            LsMethod::NelderMead => "nelder-mead",
            LsMethod::Newton => "newton",
        }
    }
}

impl fmt::Display for LsMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LsMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "powell" => Ok(LsMethod::Powell),
            "bfgs" => Ok(LsMethod::Bfgs),
            "nelder-mead" | "nelder_mead" => Ok(LsMethod::NelderMead),
            "newton" => Ok(LsMethod::Newton),
            other => Err(Error::Parse(format!("unknown local search method {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// Method-specific convergence test met.
    Converged,
    /// Iteration budget exhausted; the best point so far is returned.
    Budget,
    /// No further decrease could be found (line search or damping exhausted).
    Stalled,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LsConfig {
    pub method: LsMethod,
    pub max_iterations: usize,
    /// Central-difference step for gradients.
    pub gradient_step: f64,
    /// Central-difference step for Hessians.
    pub hessian_step: f64,
    /// Powell line-search fractional tolerance / Nelder–Mead simplex size.
    pub xtol: f64,
    /// Powell relative decrease / Nelder–Mead simplex spread in F.
    pub ftol: f64,
    /// Gradient ∞-norm for BFGS and Newton.
    pub gtol: f64,
    /// Nelder–Mead initial simplex offset per coordinate.
    pub simplex_step: f64,
    /// Armijo sufficient-decrease constant.
    pub armijo: f64,
    /// Initial Levenberg damping for Newton.
    pub initial_damping: f64,
}

impl LsConfig {
    pub fn new(method: LsMethod, max_iterations: usize) -> Self {
        Self {
            method,
            max_iterations,
            gradient_step: 1e-5,
            hessian_step: 1e-4,
            xtol: 1e-4,
            ftol: 1e-4,
            gtol: match method {
                LsMethod::Bfgs => 1e-5,
                _ => 1e-8,
            },
            simplex_step: 0.05,
            armijo: 1e-4,
            initial_damping: 1e-3,
        }
    }

    /// Iteration budgets used with the GA front end.
    pub fn gmig(method: LsMethod) -> Self {
        let iters = match method {
            LsMethod::Powell => 500,
            LsMethod::Bfgs => 22,
            LsMethod::NelderMead => 1000,
            LsMethod::Newton => 1000,
        };
        Self::new(method, iters)
    }

    /// Iteration budgets for a single local search from a fixed start.
    pub fn ordinary(method: LsMethod) -> Self {
        let iters = match method {
            LsMethod::Powell => 2000,
            LsMethod::Bfgs => 50,
            LsMethod::NelderMead => 2000,
            LsMethod::Newton => 1000,
        };
        Self::new(method, iters)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptResult {
    pub theta: Vec<f64>,
    pub f: f64,
    /// Best F after each iteration, starting with F(θ₀).
    pub trajectory: Vec<f64>,
    pub evaluations: u64,
    pub iterations: usize,
    pub wall_seconds: f64,
    pub termination: Termination,
}

/// Wraps the objective: counts calls and maps non-finite values to +∞.
pub(crate) struct Counted<'a, 'f> {
    f: &'a ObjectiveFn<'f>,
    pub(crate) evals: u64,
}

impl<'a, 'f> Counted<'a, 'f> {
    pub(crate) fn new(f: &'a ObjectiveFn<'f>) -> Self {
        Self { f, evals: 0 }
    }

    pub(crate) fn call(&mut self, x: &[f64]) -> f64 {
        self.evals += 1;
        let v = (self.f)(x);
        if v.is_finite() {
            v
        } else {
            f64::INFINITY
        }
    }
}

/// Central-difference gradient.
pub fn central_gradient(f: &mut dyn FnMut(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|i| {
            probe[i] = x[i] + h;
            let fp = f(&probe);
            probe[i] = x[i] - h;
            let fm = f(&probe);
            probe[i] = x[i];
            (fp - fm) / (2.0 * h)
        })
        .collect()
}

/// Central-difference Hessian, symmetric by construction. `fx` is `f(x)`.
pub fn central_hessian(f: &mut dyn FnMut(&[f64]) -> f64, x: &[f64], fx: f64, h: f64) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut hess = vec![vec![0.0; n]; n];
    let mut probe = x.to_vec();
    for i in 0..n {
        probe[i] = x[i] + h;
        let fp = f(&probe);
        probe[i] = x[i] - h;
        let fm = f(&probe);
        probe[i] = x[i];
        hess[i][i] = (fp - 2.0 * fx + fm) / (h * h);
        for j in 0..i {
            let mut corner = |si: f64, sj: f64| {
                probe[i] = x[i] + si * h;
                probe[j] = x[j] + sj * h;
                let v = f(&probe);
                probe[i] = x[i];
                probe[j] = x[j];
                v
            };
            let v = (corner(1.0, 1.0) - corner(1.0, -1.0) - corner(-1.0, 1.0) + corner(-1.0, -1.0))
                / (4.0 * h * h);
            hess[i][j] = v;
            hess[j][i] = v;
        }
    }
    hess
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Minimizes `f` from `theta0` with the method in `config`.
pub fn local_search(f: &ObjectiveFn<'_>, theta0: &[f64], config: &LsConfig) -> Result<OptResult> {
    if theta0.iter().any(|v| !v.is_finite()) {
        return Err(Error::NumericInput("non-finite starting point".into()));
    }
    let f0 = f(theta0);
    if !f0.is_finite() {
        return Err(Error::NumericInput(format!("objective is {f0} at the starting point")));
    }
    if config.max_iterations == 0 {
        return Err(Error::Input("max_iterations must be at least 1".into()));
    }
    let start = Instant::now();
    if theta0.is_empty() {
        return Ok(OptResult {
            theta: Vec::new(),
            f: f0,
            trajectory: vec![f0],
            evaluations: 1,
            iterations: 0,
            wall_seconds: start.elapsed().as_secs_f64(),
            termination: Termination::Converged,
        });
    }
    let mut counted = Counted::new(f);
    counted.evals = 1;
    let mut result = match config.method {
        LsMethod::Powell => powell::minimize(&mut counted, theta0, f0, config),
        LsMethod::Bfgs => bfgs::minimize(&mut counted, theta0, f0, config),
        LsMethod::NelderMead => nelder_mead::minimize(&mut counted, theta0, f0, config),
        LsMethod::Newton => newton::minimize(&mut counted, theta0, f0, config),
    };
    result.evaluations = counted.evals;
    result.wall_seconds = start.elapsed().as_secs_f64();
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finite_differences_on_quadratic() {
        let mut f = |x: &[f64]| 3.0 * x[0] * x[0] + x[0] * x[1] - 2.0 * x[1] * x[1];
        let x = [0.5, -1.0];
        let g = central_gradient(&mut f, &x, 1e-5);
        assert!((g[0] - 2.0).abs() < 1e-8 && (g[1] - 4.5).abs() < 1e-8);
        let fx = f(&x);
        let h = central_hessian(&mut f, &x, fx, 1e-4);
        assert!((h[0][0] - 6.0).abs() < 1e-6);
        assert!((h[0][1] - 1.0).abs() < 1e-6 && h[0][1] == h[1][0]);
        assert!((h[1][1] + 4.0).abs() < 1e-6);
    }

    #[test]
    fn non_finite_start_rejected() {
        let f = |_: &[f64]| f64::NAN;
        for m in LsMethod::ALL {
            assert!(local_search(&f, &[0.0], &LsConfig::gmig(m)).is_err());
        }
        let g = |x: &[f64]| x[0];
        assert!(local_search(&g, &[f64::INFINITY], &LsConfig::gmig(LsMethod::Powell)).is_err());
    }

    #[test]
    fn method_names_round_trip() {
        for m in LsMethod::ALL {
            assert_eq!(m.as_str().parse::<LsMethod>().unwrap(), m);
        }
        assert_eq!(serde_json::to_string(&LsMethod::NelderMead).unwrap(), "\"nelder-mead\"");
    }

    #[test]
    fn budget_defaults() {
        assert_eq!(LsConfig::ordinary(LsMethod::Bfgs).max_iterations, 50);
        assert_eq!(LsConfig::gmig(LsMethod::Bfgs).max_iterations, 22);
        assert_eq!(LsConfig::gmig(LsMethod::Powell).max_iterations, 500);
        assert_eq!(LsConfig::ordinary(LsMethod::NelderMead).max_iterations, 2000);
    }
}
