//! GA front end followed by local search from the best individuals.

use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ga::{run_ga, GaConfig};
use super::{local_search, LsConfig, ObjectiveFn, Termination};
use crate::error::{Error, Result};

/// How the winning candidate is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Selector {
    /// Smallest F.
    Production,
    /// Smallest `log10(|F − E_ref| / |E_ref|)`.
    Benchmark { reference: f64 },
}

impl Selector {
    pub fn score(&self, f: f64) -> f64 {
        match *self {
            Selector::Production => f,
            Selector::Benchmark { reference } => ((f - reference).abs() / reference.abs()).log10(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GmigConfig {
    pub ga: GaConfig,
    pub ls: LsConfig,
    /// Keep pinned coordinates fixed during local search as well.
    pub freeze_pinned_in_ls: bool,
}

impl Default for GmigConfig {
    fn default() -> Self {
        Self {
            ga: GaConfig::default(),
            ls: LsConfig::gmig(super::LsMethod::Newton),
            freeze_pinned_in_ls: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    /// Rank of the starting point in the final GA population (0 for ordinary runs).
    pub rank: usize,
    pub f_start: f64,
    pub theta: Vec<f64>,
    pub f: f64,
    pub score: f64,
    pub evaluations: u64,
    pub iterations: usize,
    pub termination: Option<Termination>,
    /// Filled when the population had too few distinct individuals.
    pub padded: bool,
    /// Why the candidate was dropped from selection.
    pub discarded: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaSummary {
    pub generations: usize,
    pub converged: bool,
    pub evaluations: u64,
    pub best_f: f64,
    pub wall_seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GmigOutcome {
    pub winner: usize,
    pub candidates: Vec<Candidate>,
    pub ga: Option<GaSummary>,
    pub padded: bool,
    pub ls_wall_seconds: f64,
}

impl GmigOutcome {
    pub fn best(&self) -> &Candidate {
        &self.candidates[self.winner]
    }

    pub fn evaluations(&self) -> u64 {
        self.ga.as_ref().map_or(0, |g| g.evaluations) + self.candidates.iter().map(|c| c.evaluations).sum::<u64>()
    }
}

/// Picks `count` starting points by ascending fitness, skipping exact
/// duplicates first and then padding with the best remaining individuals.
fn pick_starts(ranked: &[(Vec<f64>, f64)], count: usize) -> (Vec<(usize, bool)>, bool) {
    let mut chosen: Vec<(usize, bool)> = Vec::with_capacity(count);
    for (i, (theta, _)) in ranked.iter().enumerate() {
        if chosen.len() == count {
            break;
        }
        if chosen.iter().all(|&(j, _)| ranked[j].0 != *theta) {
            chosen.push((i, false));
        }
    }
    let padded = chosen.len() < count;
    let mut i = 0;
    while chosen.len() < count && !ranked.is_empty() {
        chosen.push((i % ranked.len(), true));
        i += 1;
    }
    (chosen, padded)
}

/// Where one local search begins.
struct Start<'a> {
    theta: &'a [f64],
    f: f64,
    rank: usize,
    padded: bool,
}

fn run_candidate(
    f: &ObjectiveFn<'_>,
    from: Start<'_>,
    pinned: &[Option<f64>],
    config: &GmigConfig,
    selector: &Selector,
) -> Candidate {
    let Start {
        theta: start,
        f: f_start,
        rank,
        padded,
    } = from;
    let free: Vec<usize> = if config.freeze_pinned_in_ls {
        (0..start.len()).filter(|&k| pinned.get(k).is_none_or(|p| p.is_none())).collect()
    } else {
        (0..start.len()).collect()
    };
    let embed = |sub: &[f64]| {
        let mut full = start.to_vec();
        for (&k, &v) in free.iter().zip(sub) {
            full[k] = v;
        }
        full
    };
    let sub_f = |sub: &[f64]| f(&embed(sub));
    let sub0: Vec<f64> = free.iter().map(|&k| start[k]).collect();
    match local_search(&sub_f, &sub0, &config.ls) {
        Ok(res) if res.f.is_finite() => Candidate {
            rank,
            f_start,
            theta: embed(&res.theta),
            f: res.f,
            score: selector.score(res.f),
            evaluations: res.evaluations,
            iterations: res.iterations,
            termination: Some(res.termination),
            padded,
            discarded: None,
        },
        Ok(res) => Candidate {
            rank,
            f_start,
            theta: embed(&res.theta),
            f: res.f,
            score: f64::NAN,
            evaluations: res.evaluations,
            iterations: res.iterations,
            termination: Some(res.termination),
            padded,
            discarded: Some(format!("local search ended at non-finite F = {}", res.f)),
        },
        Err(e) => Candidate {
            rank,
            f_start,
            theta: start.to_vec(),
            f: f_start,
            score: f64::NAN,
            evaluations: 0,
            iterations: 0,
            termination: None,
            padded,
            discarded: Some(e.to_string()),
        },
    }
}

fn select(candidates: &[Candidate]) -> Result<usize> {
    candidates
        .iter()
        .enumerate()
        .filter(|(_, c)| c.discarded.is_none() && !c.score.is_nan())
        .min_by(|a, b| a.1.score.total_cmp(&b.1.score))
        .map(|(i, _)| i)
        .ok_or_else(|| Error::Convergence("every local-search candidate diverged".into()))
}

/// GA until convergence, then local search from the best distinct
/// individuals in parallel. `pinned` coordinates stay fixed during the GA.
pub fn gmig_vqe<R: Rng + ?Sized>(
    f: &ObjectiveFn<'_>,
    bounds: &[(f64, f64)],
    pinned: &[Option<f64>],
    config: &GmigConfig,
    selector: &Selector,
    rng: &mut R,
) -> Result<GmigOutcome> {
    let ga_start = Instant::now();
    let run = run_ga(&config.ga, bounds, pinned, f, rng)?;
    let ga = GaSummary {
        generations: run.population.generation,
        converged: run.converged,
        evaluations: run.evaluations,
        best_f: run.population.best().map_or(f64::INFINITY, |b| b.fitness),
        wall_seconds: ga_start.elapsed().as_secs_f64(),
    };
    let ranked: Vec<(Vec<f64>, f64)> = run
        .population
        .ranked()
        .into_iter()
        .map(|i| {
            let ind = &run.population.individuals[i];
            (ind.theta.clone(), ind.fitness)
        })
        .collect();
    let (starts, padded) = pick_starts(&ranked, config.ga.candidates);

    let ls_start = Instant::now();
    let candidates: Vec<Candidate> = starts
        .par_iter()
        .map(|&(rank, pad)| {
            let (theta, fit) = &ranked[rank];
            let from = Start {
                theta,
                f: *fit,
                rank,
                padded: pad,
            };
            run_candidate(f, from, pinned, config, selector)
        })
        .collect();
    let ls_wall_seconds = ls_start.elapsed().as_secs_f64();
    let winner = select(&candidates)?;
    Ok(GmigOutcome {
        winner,
        candidates,
        ga: Some(ga),
        padded,
        ls_wall_seconds,
    })
}

/// One local search from `theta0`, no GA.
pub fn ordinary_vqe(f: &ObjectiveFn<'_>, theta0: &[f64], ls: &LsConfig, selector: &Selector) -> Result<GmigOutcome> {
    let config = GmigConfig {
        ls: ls.clone(),
        ..Default::default()
    };
    let start = Instant::now();
    let f0 = f(theta0);
    let from = Start {
        theta: theta0,
        f: f0,
        rank: 0,
        padded: false,
    };
    let candidate = run_candidate(f, from, &[], &config, selector);
    let candidates = vec![candidate];
    let winner = match select(&candidates) {
        Ok(w) => w,
        Err(_) => {
            return Err(Error::Convergence(
                candidates[0].discarded.clone().unwrap_or_else(|| "local search failed".into()),
            ))
        }
    };
    Ok(GmigOutcome {
        winner,
        candidates,
        ga: None,
        padded: false,
        ls_wall_seconds: start.elapsed().as_secs_f64(),
    })
}
