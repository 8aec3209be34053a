//! Self-adaptive Pareto differential evolution of controller genomes.
//!
//! Each generation keeps a parent pool made of whole non-dominated fronts
//! (the last front truncated by scalar fitness), deletes everyone else and
//! refills the population with children bred from three pool members:
//! a base parent plus a Gaussian-weighted difference of two supporting
//! parents, applied on one guaranteed random connection and elsewhere with
//! the base parent's crossover rate. Crossover and mutation rates travel in
//! the genome and are recombined and repaired like any other gene.

use rand::seq::index::sample;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::controller::{init_genome, Genome, HIDDEN, WEIGHT_GENES};
use crate::reward::Objectives;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionConfig {
    pub pop_size: usize,
    pub generations: usize,
    pub parent_pool_target: usize,
    pub parent_pool_min: usize,
    /// Standard deviation of the per-gene differential coefficient.
    pub diff_scale: f64,
    /// Standard deviation of a weight mutation.
    pub mut_sigma: f64,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        EvolutionConfig {
            pop_size: 50,
            generations: 250,
            parent_pool_target: 8,
            parent_pool_min: 3,
            diff_scale: 1.0,
            mut_sigma: 0.1,
        }
    }
}

impl EvolutionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.pop_size < 3 {
            return Err(Error::Config("evolution.pop_size must be at least 3".into()));
        }
        if !(self.parent_pool_min <= self.parent_pool_target && self.parent_pool_target <= self.pop_size) {
            return Err(Error::Config("need parent_pool_min <= parent_pool_target <= pop_size".into()));
        }
        if self.parent_pool_min < 3 {
            return Err(Error::Config("evolution.parent_pool_min must be at least 3".into()));
        }
        if !(self.diff_scale >= 0.0 && self.mut_sigma >= 0.0) {
            return Err(Error::Config("evolution scales must be non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Member {
    pub genome: Genome,
    pub objectives: Option<Objectives>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    pub members: Vec<Member>,
    pub generation: usize,
}

impl Population {
    /// Objectives of every member; panics if any member is unevaluated.
    pub fn objectives(&self) -> Vec<Objectives> {
        self.members
            .iter()
            .map(|m| m.objectives.clone().expect("member evaluated"))
            .collect()
    }
}

/// Pareto dominance under maximisation.
pub fn dominates(a: &Objectives, b: &Objectives) -> Result<bool> {
    if a.values.len() != b.values.len() {
        return Err(Error::ObjectiveLength(a.values.len(), b.values.len()));
    }
    Ok(dominates_values(&a.values, &b.values))
}

fn dominates_values(a: &[f64], b: &[f64]) -> bool {
    let mut strictly = false;
    for (x, y) in a.iter().zip(b) {
        if x < y {
            return false;
        }
        strictly |= x > y;
    }
    strictly
}

/// Partitions indices into successive non-dominated fronts, each sorted
/// ascending.
pub fn non_dominated_fronts(objectives: &[Objectives]) -> Vec<Vec<usize>> {
    let n = objectives.len();
    let mut dominated_by_me: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut count = vec![0usize; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let (a, b) = (&objectives[i].values, &objectives[j].values);
            if dominates_values(a, b) {
                dominated_by_me[i].push(j);
                count[j] += 1;
            } else if dominates_values(b, a) {
                dominated_by_me[j].push(i);
                count[i] += 1;
            }
        }
    }
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| count[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominated_by_me[i] {
                count[j] -= 1;
                if count[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(current);
        current = next;
    }
    fronts
}

/// Indices of the parent pool: whole fronts until the target is reached,
/// the overflowing front cut by descending scalar fitness (ties to the
/// lower index).
pub fn select_parent_pool(objectives: &[Objectives], config: &EvolutionConfig) -> Vec<usize> {
    let target = config.parent_pool_target.max(config.parent_pool_min).min(objectives.len());
    let mut pool = Vec::with_capacity(target);
    for front in non_dominated_fronts(objectives) {
        if pool.len() >= target {
            break;
        }
        let room = target - pool.len();
        if front.len() <= room {
            pool.extend(front);
        } else {
            let mut ranked = front;
            ranked.sort_by(|&a, &b| objectives[b].scalar().total_cmp(&objectives[a].scalar()).then(a.cmp(&b)));
            pool.extend(ranked.into_iter().take(room));
        }
    }
    pool
}

pub fn repair_rate(r: f64) -> f64 {
    if r.is_nan() {
        0.0
    } else {
        r.clamp(0.0, 1.0)
    }
}

/// Breeds one child from base parent `a1` and supporting parents `a2`, `a3`.
///
/// Random draws, in order: connection `z`; per weight gene a uniform and,
/// when crossed, a normal; per mask bit a uniform; normals for `cr` then
/// `mr`; per weight gene a uniform and, when mutated, a normal; per mask
/// bit a uniform.
pub fn breed_child<R: Rng + ?Sized>(a1: &Genome, a2: &Genome, a3: &Genome, config: &EvolutionConfig, rng: &mut R) -> Genome {
    let mut child = a1.clone();
    let z = rng.random_range(0..WEIGHT_GENES);
    for g in 0..WEIGHT_GENES {
        let u: f64 = rng.random();
        if g == z || u < a1.cr {
            let k: f64 = rng.sample::<f64, _>(StandardNormal) * config.diff_scale;
            *child.weight_mut(g) = a1.weight(g) + k * (a2.weight(g) - a3.weight(g));
        }
    }
    for j in 0..HIDDEN {
        if rng.random::<f64>() < a1.cr {
            child.mask[j] = a2.mask[j];
        }
    }
    let k: f64 = rng.sample(StandardNormal);
    child.cr = repair_rate(a1.cr + k * (a2.cr - a3.cr));
    let k: f64 = rng.sample(StandardNormal);
    child.mr = repair_rate(a1.mr + k * (a2.mr - a3.mr));

    for g in 0..WEIGHT_GENES {
        if rng.random::<f64>() < a1.mr {
            let k: f64 = rng.sample(StandardNormal);
            *child.weight_mut(g) += k * config.mut_sigma;
        }
    }
    for j in 0..HIDDEN {
        if rng.random::<f64>() < a1.mr {
            child.mask[j] = !child.mask[j];
        }
    }
    child
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenerationStats {
    pub generation: usize,
    pub min: f64,
    pub avg: f64,
    pub max: f64,
    pub success_count: usize,
}

impl GenerationStats {
    fn of(generation: usize, objectives: &[Objectives]) -> Self {
        let scalars: Vec<f64> = objectives.iter().map(Objectives::scalar).collect();
        GenerationStats {
            generation,
            min: scalars.iter().copied().fold(f64::INFINITY, f64::min),
            avg: scalars.iter().sum::<f64>() / scalars.len() as f64,
            max: scalars.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            success_count: objectives.iter().filter(|o| o.success).count(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct EvolutionOutcome {
    pub best: Genome,
    pub best_objectives: Objectives,
    /// One entry per generation, starting with the initial population.
    pub stats: Vec<GenerationStats>,
    pub population: Population,
}

/// Where a genome sits when it is evaluated; lets evaluators key episode
/// seeds independently of scheduling order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Slot {
    pub generation: usize,
    pub member: usize,
}

fn evaluate_all<F>(members: &mut [Member], generation: usize, evaluator: &F) -> Result<()>
where
    F: Fn(&Genome, Slot) -> Result<Objectives> + Sync,
{
    members
        .par_iter_mut()
        .enumerate()
        .filter(|(_, m)| m.objectives.is_none())
        .try_for_each(|(member, m)| {
            m.objectives = Some(evaluator(&m.genome, Slot { generation, member })?);
            Ok(())
        })
}

/// Runs the generation loop. Members are evaluated once, when first added;
/// `observer` sees every evaluated population and the best-so-far member.
pub fn evolve<F, R, O>(config: &EvolutionConfig, evaluator: F, rng: &mut R, mut observer: O) -> Result<EvolutionOutcome>
where
    F: Fn(&Genome, Slot) -> Result<Objectives> + Sync,
    R: Rng + ?Sized,
    O: FnMut(&Population, &Member),
{
    config.validate()?;
    let mut pop = Population {
        members: (0..config.pop_size).map(|_| Member { genome: init_genome(rng), objectives: None }).collect(),
        generation: 0,
    };
    evaluate_all(&mut pop.members, 0, &evaluator)?;

    let mut stats = Vec::with_capacity(config.generations + 1);
    let mut best: Option<Member> = None;
    let mut record = |pop: &Population, stats: &mut Vec<GenerationStats>, best: &mut Option<Member>| {
        let objs = pop.objectives();
        stats.push(GenerationStats::of(pop.generation, &objs));
        for (m, o) in pop.members.iter().zip(&objs) {
            let better = best
                .as_ref()
                .is_none_or(|b| o.scalar() > b.objectives.as_ref().expect("evaluated").scalar());
            if better {
                *best = Some(m.clone());
            }
        }
        observer(pop, best.as_ref().expect("non-empty population"));
    };
    record(&pop, &mut stats, &mut best);

    for generation in 1..=config.generations {
        let objs = pop.objectives();
        let pool = select_parent_pool(&objs, config);
        let parents: Vec<Member> = pool.iter().map(|&i| pop.members[i].clone()).collect();
        let mut members = parents.clone();
        while members.len() < config.pop_size {
            let (i, j, k) = if parents.len() >= 3 {
                let idx = sample(rng, parents.len(), 3);
                (idx.index(0), idx.index(1), idx.index(2))
            } else {
                let n = parents.len();
                (rng.random_range(0..n), rng.random_range(0..n), rng.random_range(0..n))
            };
            let child = breed_child(&parents[i].genome, &parents[j].genome, &parents[k].genome, config, rng);
            members.push(Member { genome: child, objectives: None });
        }
        evaluate_all(&mut members, generation, &evaluator)?;
        pop = Population { members, generation };
        record(&pop, &mut stats, &mut best);
    }

    let best = best.expect("non-empty population");
    Ok(EvolutionOutcome {
        best_objectives: best.objectives.clone().expect("evaluated"),
        best: best.genome,
        stats,
        population: pop,
    })
}
