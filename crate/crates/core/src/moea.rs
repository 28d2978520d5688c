//! Pareto machinery: dominance, non-dominated sorting, crowding distance,
//! rank/crowding fitness, binary tournament mating pool, environmental
//! selection and the non-dominated archive.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use rand::Rng as _;

use crate::error::{Error, Result};
use crate::metrics::ObjectivePoint;
use crate::model::ParamVector;
use crate::rng::{derive_seed, rng_from_seed};

/// Front rank (0 = non-dominated) and crowding distance within the front.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fitness {
    pub rank: usize,
    pub crowding: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub id: u64,
    pub params: ParamVector,
    pub objectives: Option<ObjectivePoint>,
    pub fitness: Option<Fitness>,
}

impl Individual {
    pub fn new(id: u64, params: ParamVector) -> Self {
        Individual {
            id,
            params,
            objectives: None,
            fitness: None,
        }
    }

    pub fn objectives(&self) -> Result<ObjectivePoint> {
        self.objectives.ok_or(Error::MissingObjectives(self.id))
    }

    pub fn fitness(&self) -> Result<Fitness> {
        self.fitness.ok_or(Error::MissingFitness(self.id))
    }
}

/// Minimization dominance: `a` no worse everywhere, strictly better somewhere.
pub fn dominates(a: &ObjectivePoint, b: &ObjectivePoint) -> bool {
    a.error <= b.error
        && a.delta_tpr <= b.delta_tpr
        && (a.error < b.error || a.delta_tpr < b.delta_tpr)
}

/// Fast non-dominated sort. Each front lists indices in ascending order.
pub fn nondominated_sort(points: &[ObjectivePoint]) -> Vec<Vec<usize>> {
    let n = points.len();
    let mut dominated_by: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut domination_count = vec![0usize; n];
    for i in 0..n {
        for j in (i + 1)..n {
            if dominates(&points[i], &points[j]) {
                dominated_by[i].push(j);
                domination_count[j] += 1;
            } else if dominates(&points[j], &points[i]) {
                dominated_by[j].push(i);
                domination_count[i] += 1;
            }
        }
    }
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| domination_count[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominated_by[i] {
                domination_count[j] -= 1;
                if domination_count[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(core::mem::take(&mut current));
        current = next;
    }
    fronts
}

/// Crowding distance of each point within one front.
///
/// Boundary points of every objective get `+∞`; fronts of at most two
/// points are all `+∞`; an objective with zero range contributes nothing.
pub fn crowding_distance(front: &[ObjectivePoint]) -> Vec<f64> {
    let n = front.len();
    if n <= 2 {
        return vec![f64::INFINITY; n];
    }
    let mut dist = vec![0.0; n];
    for obj in 0..2 {
        let value = |i: usize| front[i].as_array()[obj];
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| value(a).total_cmp(&value(b)).then(a.cmp(&b)));
        let range = value(order[n - 1]) - value(order[0]);
        if range <= 0.0 {
            continue;
        }
        dist[order[0]] = f64::INFINITY;
        dist[order[n - 1]] = f64::INFINITY;
        for k in 1..n - 1 {
            let i = order[k];
            if dist[i].is_finite() {
                dist[i] += (value(order[k + 1]) - value(order[k - 1])) / range;
            }
        }
    }
    dist
}

/// Fitness order: lower rank, then larger crowding, then lower id.
/// `Ordering::Less` means `a` is preferred.
pub fn compare_fitness(a: &Individual, b: &Individual) -> Result<Ordering> {
    let (fa, fb) = (a.fitness()?, b.fitness()?);
    Ok(fa
        .rank
        .cmp(&fb.rank)
        .then_with(|| fb.crowding.total_cmp(&fa.crowding))
        .then_with(|| a.id.cmp(&b.id)))
}

/// Sets `(front rank, crowding)` on every individual.
pub fn assign_fitness(pop: &mut [Individual]) -> Result<()> {
    let points = pop
        .iter()
        .map(Individual::objectives)
        .collect::<Result<Vec<_>>>()?;
    for (rank, front) in nondominated_sort(&points).into_iter().enumerate() {
        let front_points: Vec<ObjectivePoint> = front.iter().map(|&i| points[i]).collect();
        for (&i, crowding) in front.iter().zip(crowding_distance(&front_points)) {
            pop[i].fitness = Some(Fitness { rank, crowding });
        }
    }
    Ok(())
}

/// Indices of `k` binary-tournament winners. Both contestants are drawn
/// uniformly with replacement.
pub fn mating_pool(pop: &[Individual], k: usize, seed: u64) -> Result<Vec<usize>> {
    if pop.is_empty() {
        return Err(Error::Empty);
    }
    for ind in pop {
        ind.fitness()?;
    }
    let mut rng = rng_from_seed(derive_seed(seed, "tournament", 0, 0));
    (0..k)
        .map(|_| {
            let a = rng.random_range(0..pop.len());
            let b = rng.random_range(0..pop.len());
            Ok(match compare_fitness(&pop[a], &pop[b])? {
                Ordering::Greater => b,
                _ => a,
            })
        })
        .collect()
}

/// Environmental selection down to `target` individuals.
///
/// Whole fronts are admitted while they fit; the first front that does not
/// fit is truncated by crowding recomputed within it (ties to lower id).
/// Survivors keep their relative order from `union`.
pub fn pareto_selection(union: Vec<Individual>, target: usize) -> Result<Vec<Individual>> {
    if union.len() < target {
        return Err(Error::PopulationTooSmall {
            have: union.len(),
            want: target,
        });
    }
    let ranks = union
        .iter()
        .map(|ind| ind.fitness().map(|f| f.rank))
        .collect::<Result<Vec<_>>>()?;
    let max_rank = ranks.iter().copied().max().unwrap_or(0);
    let mut keep = vec![false; union.len()];
    let mut remaining = target;
    for rank in 0..=max_rank {
        if remaining == 0 {
            break;
        }
        let front: Vec<usize> = (0..union.len()).filter(|&i| ranks[i] == rank).collect();
        if front.len() <= remaining {
            for &i in &front {
                keep[i] = true;
            }
            remaining -= front.len();
            continue;
        }
        let points = front
            .iter()
            .map(|&i| union[i].objectives())
            .collect::<Result<Vec<_>>>()?;
        let crowding = crowding_distance(&points);
        let mut order: Vec<usize> = (0..front.len()).collect();
        order.sort_by(|&a, &b| {
            crowding[b]
                .total_cmp(&crowding[a])
                .then_with(|| union[front[a]].id.cmp(&union[front[b]].id))
        });
        for &k in order.iter().take(remaining) {
            keep[front[k]] = true;
        }
        remaining = 0;
    }
    Ok(union
        .into_iter()
        .zip(keep)
        .filter_map(|(ind, k)| k.then_some(ind))
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArchiveEntry {
    pub id: u64,
    pub objectives: ObjectivePoint,
    pub params: ParamVector,
}

/// Unbounded set of mutually non-dominated solutions. Among entries with
/// identical objectives the first inserted is kept.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Archive {
    entries: Vec<ArchiveEntry>,
}

impl Archive {
    pub fn new() -> Self {
        Archive::default()
    }

    pub fn entries(&self) -> &[ArchiveEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn points(&self) -> Vec<ObjectivePoint> {
        self.entries.iter().map(|e| e.objectives).collect()
    }

    /// Inserts one entry; returns whether it was admitted.
    pub fn insert(&mut self, entry: ArchiveEntry) -> bool {
        let p = entry.objectives;
        if self
            .entries
            .iter()
            .any(|e| e.objectives == p || dominates(&e.objectives, &p))
        {
            return false;
        }
        self.entries.retain(|e| !dominates(&p, &e.objectives));
        self.entries.push(entry);
        true
    }

    pub fn update(&mut self, newcomers: &[Individual]) -> Result<()> {
        for ind in newcomers {
            let objectives = ind.objectives()?;
            self.insert(ArchiveEntry {
                id: ind.id,
                objectives,
                params: ind.params.clone(),
            });
        }
        Ok(())
    }
}
