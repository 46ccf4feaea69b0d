//! Real-coded GA: beta-mixture initialization, REX crossover and JGG
//! generation alternation with a normalized-variance stopping rule.
//!
//! All random draws happen on the calling thread in a fixed order; only the
//! fitness evaluations of a batch run in parallel, and their results are
//! merged by index, so a run is reproducible from its seed.

use rand::seq::index::sample;
use rand::Rng;
use rand_distr::{Beta, Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ObjectiveFn;
use crate::error::{Error, Result};

pub const BETA_SHAPE: f64 = 0.99;
pub const UNIFORM_MIX: f64 = 0.001;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GaConfig {
    /// Population size is this factor times the parameter count.
    pub population_factor: usize,
    pub n_parents: usize,
    pub n_children: usize,
    /// Standard deviation of the REX weights; `0.9/√N_p` when unset.
    pub xi_std: Option<f64>,
    /// Stop once `max_k σ_k / (UB_k − LB_k)` falls below this.
    pub convergence_threshold: f64,
    pub max_generations: usize,
    /// Individuals handed to local search.
    pub candidates: usize,
    /// Let the drafted parents compete with their children for replacement.
    pub include_parents_in_pool: bool,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population_factor: 10,
            n_parents: 2,
            n_children: 4,
            xi_std: None,
            convergence_threshold: 1e-16,
            max_generations: 300,
            candidates: 10,
            include_parents_in_pool: false,
        }
    }
}

impl GaConfig {
    pub fn population_size(&self, n_params: usize) -> usize {
        self.population_factor * n_params
    }

    pub fn xi_std(&self) -> f64 {
        self.xi_std.unwrap_or(0.9 / (self.n_parents as f64).sqrt())
    }

    pub fn validate(&self, n_params: usize) -> Result<()> {
        let pop = self.population_size(n_params);
        if self.n_parents < 2 || self.n_parents > pop {
            return Err(Error::Input(format!(
                "need 2 ≤ N_p ≤ population ({pop}), got {}",
                self.n_parents
            )));
        }
        if self.n_children < self.n_parents {
            return Err(Error::Input("N_c must be at least N_p".into()));
        }
        if !(self.xi_std() >= 0.0 && self.xi_std().is_finite()) {
            return Err(Error::Input("ξ standard deviation must be finite".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    pub theta: Vec<f64>,
    pub fitness: f64,
    /// Generation in which the individual was created.
    pub generation: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Population {
    pub individuals: Vec<Individual>,
    pub generation: usize,
}

impl Population {
    pub fn len(&self) -> usize {
        self.individuals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.individuals.is_empty()
    }

    pub fn best(&self) -> Option<&Individual> {
        self.individuals.iter().min_by(|a, b| a.fitness.total_cmp(&b.fitness))
    }

    /// Indices sorted by ascending fitness, ties by index.
    pub fn ranked(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.len()).collect();
        idx.sort_by(|&a, &b| self.individuals[a].fitness.total_cmp(&self.individuals[b].fitness));
        idx
    }
}

/// One draw of the initialization function `B(0.99, 0.99) + 0.001·U(0, 1)`.
pub fn sample_f_ini<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let beta = Beta::new(BETA_SHAPE, BETA_SHAPE).expect("valid shape");
    beta.sample(rng) + UNIFORM_MIX * rng.random::<f64>()
}

/// Initial parameter sets, `θ_j = (UB_j − LB_j)·f_ini + LB_j` per coordinate.
/// Coordinates with a pinned value take it verbatim.
pub fn ga_init<R: Rng + ?Sized>(
    config: &GaConfig,
    bounds: &[(f64, f64)],
    pinned: &[Option<f64>],
    rng: &mut R,
) -> Result<Vec<Vec<f64>>> {
    check_bounds(bounds)?;
    if pinned.len() != bounds.len() {
        return Err(Error::Dimension {
            expected: bounds.len(),
            found: pinned.len(),
        });
    }
    let size = config.population_size(bounds.len());
    Ok((0..size)
        .map(|_| {
            bounds
                .iter()
                .zip(pinned)
                .map(|(&(lo, hi), pin)| {
                    let draw = (hi - lo) * sample_f_ini(rng) + lo;
                    pin.unwrap_or(draw)
                })
                .collect()
        })
        .collect())
}

fn check_bounds(bounds: &[(f64, f64)]) -> Result<()> {
    for &(lo, hi) in bounds {
        if !(lo.is_finite() && hi.is_finite() && hi > lo) {
            return Err(Error::Bounds(format!("[{lo}, {hi}] has nonpositive or infinite range")));
        }
    }
    Ok(())
}

fn sanitize(v: f64) -> f64 {
    if v.is_finite() {
        v
    } else {
        f64::INFINITY
    }
}

/// Evaluates parameter sets in parallel; results stay in input order.
pub fn evaluate_population(thetas: Vec<Vec<f64>>, f: &ObjectiveFn<'_>, generation: usize) -> Population {
    let individuals = thetas
        .into_par_iter()
        .map(|theta| Individual {
            fitness: sanitize(f(&theta)),
            theta,
            generation,
        })
        .collect();
    Population {
        individuals,
        generation,
    }
}

/// `θ̄ + Σ_j ξ_j (θ_j − θ̄)` for one set of weights.
pub fn rex_child(parents: &[&[f64]], xi: &[f64]) -> Vec<f64> {
    let mean = parent_mean(parents);
    let mut child = mean.clone();
    for (p, &w) in parents.iter().zip(xi) {
        for ((c, &pk), &mk) in child.iter_mut().zip(p.iter()).zip(&mean) {
            *c += w * (pk - mk);
        }
    }
    child
}

fn parent_mean(parents: &[&[f64]]) -> Vec<f64> {
    let n = parents[0].len();
    let np = parents.len() as f64;
    (0..n).map(|k| parents.iter().map(|p| p[k]).sum::<f64>() / np).collect()
}

/// REX: `N_c` children with fresh `ξ ~ Normal(0, σ_ξ)` per child and parent.
pub fn rex_crossover<R: Rng + ?Sized>(parents: &[&[f64]], config: &GaConfig, rng: &mut R) -> Vec<Vec<f64>> {
    let normal = Normal::new(0.0, config.xi_std()).expect("finite standard deviation");
    (0..config.n_children)
        .map(|_| {
            let xi: Vec<f64> = parents.iter().map(|_| normal.sample(rng)).collect();
            rex_child(parents, &xi)
        })
        .collect()
}

/// What one JGG step drafted and kept.
#[derive(Clone, Debug, PartialEq)]
pub struct JggOutcome {
    pub parents: Vec<usize>,
    /// Family members that replaced the parents, best first. Indices below
    /// `N_c` are children; higher ones are the drafted parents (only when
    /// they are allowed in the pool).
    pub survivors: Vec<usize>,
    /// Best fitness in the family.
    pub family_best: f64,
}

/// One generation: draft `N_p` distinct parents, create `N_c` children,
/// and put the `N_p` best family members back in the parents' slots.
pub fn jgg_step<R: Rng + ?Sized>(
    population: &mut Population,
    config: &GaConfig,
    f: &ObjectiveFn<'_>,
    rng: &mut R,
) -> JggOutcome {
    let parents: Vec<usize> = sample(rng, population.len(), config.n_parents).into_vec();
    let children = {
        let refs: Vec<&[f64]> = parents.iter().map(|&i| population.individuals[i].theta.as_slice()).collect();
        rex_crossover(&refs, config, rng)
    };
    let generation = population.generation + 1;
    let mut family = evaluate_population(children, f, generation).individuals;
    if config.include_parents_in_pool {
        family.extend(parents.iter().map(|&i| population.individuals[i].clone()));
    }
    let mut order: Vec<usize> = (0..family.len()).collect();
    order.sort_by(|&a, &b| family[a].fitness.total_cmp(&family[b].fitness));
    let survivors: Vec<usize> = order[..config.n_parents].to_vec();
    let family_best = family[order[0]].fitness;
    for (&slot, &member) in parents.iter().zip(&survivors) {
        population.individuals[slot] = family[member].clone();
    }
    population.generation = generation;
    JggOutcome {
        parents,
        survivors,
        family_best,
    }
}

/// `max_k σ_k / (UB_k − LB_k) < threshold` with `σ_k` the population
/// variance of coordinate `k`, or the generation cap reached.
pub fn ga_converged(population: &Population, bounds: &[(f64, f64)], config: &GaConfig) -> bool {
    if population.generation >= config.max_generations {
        return true;
    }
    normalized_spread(population, bounds) < config.convergence_threshold
}

/// `max_k σ_k / (UB_k − LB_k)`.
pub fn normalized_spread(population: &Population, bounds: &[(f64, f64)]) -> f64 {
    let size = population.len() as f64;
    bounds
        .iter()
        .enumerate()
        .map(|(k, &(lo, hi))| {
            let mean = population.individuals.iter().map(|i| i.theta[k]).sum::<f64>() / size;
            let var = population
                .individuals
                .iter()
                .map(|i| (i.theta[k] - mean).powi(2))
                .sum::<f64>()
                / size;
            var / (hi - lo)
        })
        .fold(0.0, f64::max)
}

#[derive(Clone, Debug, PartialEq)]
pub struct GaRun {
    pub population: Population,
    pub converged: bool,
    /// Best fitness after each generation, starting with the initial population.
    pub best_history: Vec<f64>,
    pub evaluations: u64,
}

/// Initialization followed by JGG steps until the stopping rule fires.
pub fn run_ga<R: Rng + ?Sized>(
    config: &GaConfig,
    bounds: &[(f64, f64)],
    pinned: &[Option<f64>],
    f: &ObjectiveFn<'_>,
    rng: &mut R,
) -> Result<GaRun> {
    config.validate(bounds.len())?;
    let init = ga_init(config, bounds, pinned, rng)?;
    let mut evaluations = init.len() as u64;
    let mut population = evaluate_population(init, f, 0);
    let mut best_history = vec![population.best().map_or(f64::INFINITY, |b| b.fitness)];
    while !ga_converged(&population, bounds, config) {
        jgg_step(&mut population, config, f, rng);
        evaluations += config.n_children as u64;
        best_history.push(population.best().map_or(f64::INFINITY, |b| b.fitness));
    }
    let converged = normalized_spread(&population, bounds) < config.convergence_threshold;
    Ok(GaRun {
        population,
        converged,
        best_history,
        evaluations,
    })
}
