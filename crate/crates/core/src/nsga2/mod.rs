//! NSGA-II: elitist multi-objective search over box-bounded real genes.
//!
//! Objectives are minimized. Candidate evaluation may run in parallel; every
//! random draw happens in the sequential selection/variation phase, so a run
//! is fully determined by its seed.

mod operators;
mod sort;

use std::collections::HashMap;
use std::fmt::Display;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use operators::{polynomial_mutation, sbx_pair};
pub use sort::{crowding_distance, dominates, fast_nondominated_sort};

/// Grid used to recognise duplicate genomes.
pub const MEMO_QUANTUM: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneBounds {
    pub low: f64,
    pub high: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    genes: Vec<GeneBounds>,
}

impl Bounds {
    /// `low == high` pins a gene to a single value.
    pub fn new(genes: Vec<(f64, f64)>) -> Result<Self> {
        if genes.is_empty() {
            return Err(Error::Config("bounds need at least one gene".into()));
        }
        for (i, &(low, high)) in genes.iter().enumerate() {
            if !(low.is_finite() && high.is_finite() && low <= high) {
                return Err(Error::Config(format!("gene {i}: invalid bounds [{low}, {high}]")));
            }
        }
        Ok(Self {
            genes: genes.into_iter().map(|(low, high)| GeneBounds { low, high }).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.genes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.genes.is_empty()
    }

    pub fn genes(&self) -> &[GeneBounds] {
        &self.genes
    }

    pub fn contains(&self, genes: &[f64]) -> bool {
        genes.len() == self.len() && genes.iter().zip(&self.genes).all(|(g, b)| (b.low..=b.high).contains(g))
    }

    fn clamp(&self, genes: &mut [f64]) {
        for (g, b) in genes.iter_mut().zip(&self.genes) {
            *g = g.clamp(b.low, b.high);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    pub genes: Vec<f64>,
    pub objectives: Option<Vec<f64>>,
    pub rank: Option<usize>,
    pub crowding: Option<f64>,
    /// Evaluation failed; objectives hold the worst-case sentinel.
    pub failed: bool,
}

impl Individual {
    fn new(genes: Vec<f64>) -> Self {
        Self {
            genes,
            objectives: None,
            rank: None,
            crowding: None,
            failed: false,
        }
    }

    fn objectives(&self) -> &[f64] {
        self.objectives.as_deref().expect("individual evaluated")
    }
}

/// Mutually non-dominated evaluated individuals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParetoFront {
    pub members: Vec<Individual>,
}

/// One distinct genome evaluated during a run, in evaluation order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub genes: Vec<f64>,
    pub objectives: Vec<f64>,
    pub generation: usize,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolveConfig {
    pub pop_size: usize,
    pub generations: usize,
    pub crossover_prob: f64,
    /// Per-gene mutation probability; `None` means `1 / n_genes`.
    pub mutation_prob: Option<f64>,
    pub eta_c: f64,
    pub eta_m: f64,
    pub seed: u64,
    pub n_objectives: usize,
}

impl Default for EvolveConfig {
    fn default() -> Self {
        Self {
            pop_size: 24,
            generations: 30,
            crossover_prob: 0.9,
            mutation_prob: None,
            eta_c: 15.0,
            eta_m: 20.0,
            seed: 0,
            n_objectives: 2,
        }
    }
}

impl EvolveConfig {
    pub fn validate(&self) -> Result<()> {
        if self.pop_size < 4 || !self.pop_size.is_multiple_of(2) {
            return Err(Error::Config(format!(
                "population size must be even and at least 4, got {}",
                self.pop_size
            )));
        }
        if !(0.0..=1.0).contains(&self.crossover_prob) {
            return Err(Error::Config("crossover probability must be within [0, 1]".into()));
        }
        if let Some(p) = self.mutation_prob {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Config("mutation probability must be within [0, 1]".into()));
            }
        }
        if self.n_objectives == 0 {
            return Err(Error::Config("at least one objective is required".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evolution {
    pub front: ParetoFront,
    pub population: Vec<Individual>,
    /// Every distinct genome evaluated, first occurrence order.
    pub archive: Vec<Evaluation>,
    pub failures: usize,
}

pub fn memo_key(genes: &[f64]) -> Vec<i64> {
    genes.iter().map(|g| (g / MEMO_QUANTUM).round() as i64).collect()
}

struct Evaluator<'a, F> {
    evaluate: &'a F,
    n_objectives: usize,
    memo: HashMap<Vec<i64>, (Vec<f64>, bool)>,
    archive: Vec<Evaluation>,
    failures: usize,
}

impl<F, E> Evaluator<'_, F>
where
    F: Fn(&[f64]) -> std::result::Result<Vec<f64>, E> + Sync,
    E: Display,
{
    fn evaluate_all(&mut self, individuals: &mut [Individual], generation: usize) {
        let mut pending: Vec<(Vec<i64>, Vec<f64>)> = Vec::new();
        for ind in individuals.iter() {
            let key = memo_key(&ind.genes);
            if !self.memo.contains_key(&key) && !pending.iter().any(|(k, _)| *k == key) {
                pending.push((key, ind.genes.clone()));
            }
        }
        let n_obj = self.n_objectives;
        let results: Vec<std::result::Result<Vec<f64>, String>> = pending
            .par_iter()
            .map(|(_, genes)| match (self.evaluate)(genes) {
                Ok(obj) if obj.len() == n_obj && obj.iter().all(|v| !v.is_nan()) => Ok(obj),
                Ok(obj) => Err(format!("evaluation returned invalid objectives {obj:?}")),
                Err(e) => Err(e.to_string()),
            })
            .collect();
        for ((key, genes), result) in pending.into_iter().zip(results) {
            let (objectives, error) = match result {
                Ok(obj) => (obj, None),
                Err(msg) => {
                    self.failures += 1;
                    (vec![f64::MAX; n_obj], Some(msg))
                }
            };
            self.memo.insert(key, (objectives.clone(), error.is_some()));
            self.archive.push(Evaluation {
                genes,
                objectives,
                generation,
                error,
            });
        }
        for ind in individuals.iter_mut() {
            let (obj, failed) = &self.memo[&memo_key(&ind.genes)];
            ind.objectives = Some(obj.clone());
            ind.failed = *failed;
        }
    }
}

/// Ranks and crowding for `pop`; returns its fronts.
fn assign_rank_and_crowding(pop: &mut [Individual]) -> Vec<Vec<usize>> {
    let objs: Vec<Vec<f64>> = pop.iter().map(|i| i.objectives().to_vec()).collect();
    let fronts = fast_nondominated_sort(&objs);
    for (rank, front) in fronts.iter().enumerate() {
        let crowd = crowding_distance(front, &objs);
        for (&i, c) in front.iter().zip(crowd) {
            pop[i].rank = Some(rank);
            pop[i].crowding = Some(c);
        }
    }
    fronts
}

/// Lower rank wins, then larger crowding distance; ties keep `a`.
fn crowded_better(a: &Individual, b: &Individual) -> bool {
    let (ra, rb) = (a.rank.unwrap_or(usize::MAX), b.rank.unwrap_or(usize::MAX));
    if ra != rb {
        return ra < rb;
    }
    a.crowding.unwrap_or(0.0) >= b.crowding.unwrap_or(0.0)
}

fn tournament<'p>(pop: &'p [Individual], rng: &mut ChaCha8Rng) -> &'p Individual {
    let a = &pop[rng.gen_range(0..pop.len())];
    let b = &pop[rng.gen_range(0..pop.len())];
    if crowded_better(a, b) {
        a
    } else {
        b
    }
}

/// Keeps `n` individuals: whole fronts in rank order, the last one cut by
/// descending crowding distance.
fn environmental_selection(mut combined: Vec<Individual>, n: usize) -> Vec<Individual> {
    let fronts = assign_rank_and_crowding(&mut combined);
    let mut keep: Vec<usize> = Vec::with_capacity(n);
    for front in fronts {
        if keep.len() + front.len() <= n {
            keep.extend(front);
            continue;
        }
        let mut last = front;
        last.sort_by(|&a, &b| {
            let (ca, cb) = (combined[a].crowding.unwrap_or(0.0), combined[b].crowding.unwrap_or(0.0));
            cb.total_cmp(&ca).then(a.cmp(&b))
        });
        keep.extend(last.into_iter().take(n - keep.len()));
        break;
    }
    keep.sort_unstable();
    let mut slots: Vec<Option<Individual>> = combined.into_iter().map(Some).collect();
    keep.into_iter().map(|i| slots[i].take().expect("kept once")).collect()
}

fn random_genes(bounds: &Bounds, rng: &mut ChaCha8Rng) -> Vec<f64> {
    bounds
        .genes()
        .iter()
        .map(|b| {
            if b.high > b.low {
                rng.gen_range(b.low..=b.high)
            } else {
                b.low
            }
        })
        .collect()
}

fn make_offspring(pop: &[Individual], bounds: &Bounds, cfg: &EvolveConfig, rng: &mut ChaCha8Rng) -> Vec<Individual> {
    let mutation_prob = cfg.mutation_prob.unwrap_or(1.0 / bounds.len() as f64);
    let mut children = Vec::with_capacity(cfg.pop_size);
    while children.len() < cfg.pop_size {
        let p1 = tournament(pop, rng).genes.clone();
        let p2 = tournament(pop, rng).genes.clone();
        let (mut c1, mut c2) = (p1.clone(), p2.clone());
        if rng.gen::<f64>() < cfg.crossover_prob {
            for g in 0..bounds.len() {
                let u: f64 = rng.gen();
                if (p1[g] - p2[g]).abs() > f64::EPSILON {
                    let (a, b) = sbx_pair(p1[g], p2[g], u, cfg.eta_c);
                    c1[g] = a;
                    c2[g] = b;
                }
            }
        }
        for child in [&mut c1, &mut c2] {
            for (g, b) in bounds.genes().iter().enumerate() {
                let roll: f64 = rng.gen();
                let u: f64 = rng.gen();
                if roll < mutation_prob {
                    child[g] = polynomial_mutation(child[g], b.low, b.high, u, cfg.eta_m);
                }
            }
            bounds.clamp(child);
        }
        children.push(Individual::new(c1));
        children.push(Individual::new(c2));
    }
    children.truncate(cfg.pop_size);
    children
}

/// Runs NSGA-II and returns the final first front (duplicate genomes
/// collapsed) together with the evaluation history.
///
/// A failing evaluation does not abort the run: the candidate receives
/// `f64::MAX` for every objective and is recorded in the archive with its
/// error message.
pub fn evolve<F, E>(evaluate: F, bounds: &Bounds, cfg: &EvolveConfig) -> Result<Evolution>
where
    F: Fn(&[f64]) -> std::result::Result<Vec<f64>, E> + Sync,
    E: Display,
{
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut evaluator = Evaluator {
        evaluate: &evaluate,
        n_objectives: cfg.n_objectives,
        memo: HashMap::new(),
        archive: Vec::new(),
        failures: 0,
    };

    let mut pop: Vec<Individual> = (0..cfg.pop_size)
        .map(|_| Individual::new(random_genes(bounds, &mut rng)))
        .collect();
    evaluator.evaluate_all(&mut pop, 0);
    assign_rank_and_crowding(&mut pop);

    for generation in 1..=cfg.generations {
        let mut offspring = make_offspring(&pop, bounds, cfg, &mut rng);
        evaluator.evaluate_all(&mut offspring, generation);
        pop.extend(offspring);
        pop = environmental_selection(pop, cfg.pop_size);
    }
    assign_rank_and_crowding(&mut pop);

    let mut seen = Vec::new();
    let members = pop
        .iter()
        .filter(|ind| ind.rank == Some(0))
        .filter(|ind| {
            let key = memo_key(&ind.genes);
            if seen.contains(&key) {
                false
            } else {
                seen.push(key);
                true
            }
        })
        .cloned()
        .collect();

    Ok(Evolution {
        front: ParetoFront { members },
        population: pop,
        archive: evaluator.archive,
        failures: evaluator.failures,
    })
}
