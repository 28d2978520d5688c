//! Property and oracle checks for the core algorithms.

use std::cmp::Ordering;

use fairfront_core::data::{Dataset, SynthConfig};
use fairfront_core::indicators::{hypervolume_2d, DEFAULT_REFERENCE};
use fairfront_core::metrics::ObjectivePoint;
use fairfront_core::model::{Activation, Architecture, ParamVector, TrainConfig};
use fairfront_core::moea::{
    assign_fitness, compare_fitness, dominates, mating_pool, nondominated_sort, pareto_selection,
    Archive, Individual,
};
use fairfront_core::variation::{gaussian_mutate, merge_crossover};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn point_strategy() -> impl Strategy<Value = ObjectivePoint> {
    // a coarse grid produces plenty of ties and duplicates
    prop_oneof![
        (0u32..=20, 0u32..=20).prop_map(|(a, b)| ObjectivePoint::new(a as f64 / 20.0, b as f64 / 20.0)),
        (0.0f64..1.0, 0.0f64..1.0).prop_map(|(a, b)| ObjectivePoint::new(a, b)),
    ]
}

fn brute_force_fronts(points: &[ObjectivePoint]) -> Vec<Vec<usize>> {
    let mut left: Vec<usize> = (0..points.len()).collect();
    let mut fronts = Vec::new();
    while !left.is_empty() {
        let front: Vec<usize> = left
            .iter()
            .copied()
            .filter(|&i| !left.iter().any(|&j| dominates(&points[j], &points[i])))
            .collect();
        left.retain(|i| !front.contains(i));
        fronts.push(front);
    }
    fronts
}

fn individuals(points: &[ObjectivePoint]) -> Vec<Individual> {
    let arch = Architecture::new(1, vec![], Activation::Relu).unwrap();
    points
        .iter()
        .enumerate()
        .map(|(i, p)| Individual {
            id: (points.len() - i) as u64 * 3,
            params: ParamVector::zeros(&arch),
            objectives: Some(*p),
            fitness: None,
        })
        .collect()
}

proptest! {
    #[test]
    fn sort_matches_dominance_depth(points in prop::collection::vec(point_strategy(), 1..120)) {
        prop_assert_eq!(nondominated_sort(&points), brute_force_fronts(&points));
    }

    #[test]
    fn selection_matches_comparator_oracle(
        points in prop::collection::vec(point_strategy(), 2..100),
        frac in 0.05f64..1.0,
    ) {
        let mut union = individuals(&points);
        assign_fitness(&mut union).unwrap();
        let target = ((points.len() as f64 * frac) as usize).max(1);
        let mut ranked = union.clone();
        ranked.sort_by(|a, b| compare_fitness(a, b).unwrap());
        let mut expect: Vec<u64> = ranked.iter().take(target).map(|i| i.id).collect();
        let mut got: Vec<u64> = pareto_selection(union.clone(), target).unwrap().iter().map(|i| i.id).collect();
        expect.sort_unstable();
        got.sort_unstable();
        prop_assert_eq!(got, expect);
    }

    #[test]
    fn selection_never_skips_front_zero(points in prop::collection::vec(point_strategy(), 2..80), target in 1usize..80) {
        let target = target.min(points.len());
        let mut union = individuals(&points);
        assign_fitness(&mut union).unwrap();
        let kept = pareto_selection(union.clone(), target).unwrap();
        let worst_kept = kept.iter().map(|i| i.fitness.unwrap().rank).max().unwrap();
        let kept_ids: Vec<u64> = kept.iter().map(|i| i.id).collect();
        for ind in &union {
            if ind.fitness.unwrap().rank < worst_kept {
                prop_assert!(kept_ids.contains(&ind.id));
            }
        }
    }

    #[test]
    fn archive_is_nondominated_subset_of_history(
        batches in prop::collection::vec(prop::collection::vec(point_strategy(), 1..15), 1..8),
    ) {
        let mut archive = Archive::new();
        let mut history: Vec<(u64, ObjectivePoint)> = Vec::new();
        let mut last_hv = 0.0;
        let arch = Architecture::new(1, vec![], Activation::Relu).unwrap();
        for batch in &batches {
            let inds: Vec<Individual> = batch
                .iter()
                .map(|p| {
                    let id = history.len() as u64;
                    history.push((id, *p));
                    Individual { id, params: ParamVector::zeros(&arch), objectives: Some(*p), fitness: None }
                })
                .collect();
            archive.update(&inds).unwrap();
            let pts = archive.points();
            for a in &pts {
                for b in &pts {
                    prop_assert!(!dominates(a, b));
                }
            }
            let hv = hypervolume_2d(&pts, DEFAULT_REFERENCE).unwrap();
            prop_assert!(hv >= last_hv);
            last_hv = hv;
        }
        // brute force: non-dominated over history, first of each duplicate group
        let mut expect: Vec<u64> = history
            .iter()
            .filter(|(id, p)| {
                !history.iter().any(|(_, q)| dominates(q, p))
                    && !history.iter().any(|(j, q)| q == p && j < id)
            })
            .map(|(id, _)| *id)
            .collect();
        let mut got: Vec<u64> = archive.entries().iter().map(|e| e.id).collect();
        expect.sort_unstable();
        got.sort_unstable();
        prop_assert_eq!(got, expect);
    }

    #[test]
    fn hypervolume_invariants(
        points in prop::collection::vec(point_strategy(), 0..40),
        extra in point_strategy(),
        seed in any::<u64>(),
    ) {
        let hv = hypervolume_2d(&points, DEFAULT_REFERENCE).unwrap();
        prop_assert!((0.0..=1.0).contains(&hv));
        let mut bigger = points.clone();
        bigger.push(extra);
        prop_assert!(hypervolume_2d(&bigger, DEFAULT_REFERENCE).unwrap() >= hv);
        let mut shuffled = points.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for i in (1..shuffled.len()).rev() {
            shuffled.swap(i, rng.random_range(0..=i));
        }
        prop_assert_eq!(hypervolume_2d(&shuffled, DEFAULT_REFERENCE).unwrap(), hv);
        if let Some(p) = points.first() {
            let mut dominated = points.clone();
            dominated.push(ObjectivePoint::new((p.error + 0.01).min(1.0), (p.delta_tpr + 0.01).min(1.0)));
            prop_assert_eq!(hypervolume_2d(&dominated, DEFAULT_REFERENCE).unwrap(), hv);
        }
    }

    #[test]
    fn merge_stays_between_parents(seed in any::<u64>(), alpha in 0.0f64..=1.0) {
        let arch = Architecture::new(3, vec![4], Activation::Tanh).unwrap();
        let a = ParamVector::init(&arch, seed);
        let b = ParamVector::init(&arch, seed ^ 0xdead);
        let child = merge_crossover(&a, &b, alpha).unwrap();
        prop_assert_eq!(child.arch(), &arch);
        for ((c, x), y) in child.values().iter().zip(a.values()).zip(b.values()) {
            prop_assert!(c.is_finite());
            prop_assert!(x.min(*y) <= *c && *c <= x.max(*y));
        }
    }

    #[test]
    fn split_is_a_stratified_partition(seed in any::<u64>(), n in 200usize..600) {
        let d = SynthConfig { n, seed, ..SynthConfig::default() }.generate().unwrap();
        let Ok((tr, va, te)) = d.split((0.6, 0.2, 0.2), seed) else {
            return Ok(());
        };
        prop_assert_eq!(tr.len() + va.len() + te.len(), d.len());
        let mut all: Vec<Vec<u64>> = Vec::new();
        for part in [&tr, &va, &te] {
            for i in 0..part.len() {
                all.push(part.row(i).iter().map(|v| v.to_bits()).collect());
            }
        }
        let mut orig: Vec<Vec<u64>> = (0..d.len()).map(|i| d.row(i).iter().map(|v| v.to_bits()).collect()).collect();
        all.sort();
        orig.sort();
        prop_assert_eq!(all, orig);
    }

    #[test]
    fn resampling_balances_cells(seed in any::<u64>()) {
        let d = SynthConfig { n: 300, seed, ..SynthConfig::default() }.generate().unwrap();
        let o = d.oversample(seed).unwrap();
        let u = d.undersample(seed).unwrap();
        let oc = o.cell_counts();
        let uc = u.cell_counts();
        let max = d.cell_counts().iter().flatten().copied().max().unwrap();
        let min = d.cell_counts().iter().flatten().copied().min().unwrap();
        prop_assert!(oc.iter().flatten().all(|&c| c == max));
        prop_assert!(uc.iter().flatten().all(|&c| c == min));
        let c = d.cda_augment().unwrap().cell_counts();
        prop_assert_eq!(c[0][0] + c[0][1], c[1][0] + c[1][1]);
    }
}

#[test]
fn comparator_is_a_strict_total_order() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..300 {
        let n = rng.random_range(1..=6);
        let points: Vec<ObjectivePoint> = (0..n)
            .map(|_| ObjectivePoint::new(rng.random_range(0..4) as f64 / 4.0, rng.random_range(0..4) as f64 / 4.0))
            .collect();
        let mut pop = individuals(&points);
        assign_fitness(&mut pop).unwrap();
        let cmp = |a: usize, b: usize| compare_fitness(&pop[a], &pop[b]).unwrap();
        for a in 0..n {
            assert_eq!(cmp(a, a), Ordering::Equal);
            for b in 0..n {
                if a != b {
                    assert_ne!(cmp(a, b), Ordering::Equal);
                    assert_eq!(cmp(a, b), cmp(b, a).reverse());
                }
                for c in 0..n {
                    if cmp(a, b) == Ordering::Less && cmp(b, c) == Ordering::Less {
                        assert_eq!(cmp(a, c), Ordering::Less);
                    }
                }
            }
        }
    }
}

#[test]
fn tournament_frequencies_match_analytic_probabilities() {
    // strict chain: order position k wins with probability ((4-k)^2 - (3-k)^2) / 16
    let points = [
        ObjectivePoint::new(0.1, 0.1),
        ObjectivePoint::new(0.2, 0.2),
        ObjectivePoint::new(0.3, 0.3),
        ObjectivePoint::new(0.4, 0.4),
    ];
    let mut pop = individuals(&points);
    assign_fitness(&mut pop).unwrap();
    let pool = mating_pool(&pop, 10_000, 77).unwrap();
    for (k, expect) in [7.0 / 16.0, 5.0 / 16.0, 3.0 / 16.0, 1.0 / 16.0].iter().enumerate() {
        let freq = pool.iter().filter(|&&i| i == k).count() as f64 / 10_000.0;
        assert!((freq - expect).abs() <= 0.02, "slot {k}: {freq} vs {expect}");
    }
}

#[test]
fn mutation_noise_scales_linearly_in_lambda() {
    let arch = Architecture::new(1000, vec![10], Activation::Relu).unwrap();
    let p = ParamVector::init(&arch, 3);
    let weight_std = {
        let t = p.tensor(0);
        let m = t.iter().sum::<f64>() / t.len() as f64;
        (t.iter().map(|x| (x - m).powi(2)).sum::<f64>() / t.len() as f64).sqrt()
    };
    for lambda in [0.01, 0.02, 0.04] {
        for seed in 0..3 {
            let q = gaussian_mutate(&p, lambda, seed).unwrap();
            let diffs: Vec<f64> = q.tensor(0).iter().zip(p.tensor(0)).map(|(a, b)| a - b).collect();
            let m = diffs.iter().sum::<f64>() / diffs.len() as f64;
            let s = (diffs.iter().map(|d| (d - m).powi(2)).sum::<f64>() / diffs.len() as f64).sqrt();
            let rel = s / (lambda * weight_std);
            assert!((rel - 1.0).abs() <= 0.05, "lambda {lambda} seed {seed}: ratio {rel}");
        }
    }
}

fn random_batch(rng: &mut ChaCha8Rng, dim: usize, n: usize) -> Dataset {
    let features = (0..n * dim).map(|_| rng.random_range(-2.0..2.0)).collect();
    let labels = (0..n).map(|_| rng.random_range(0..2)).collect();
    Dataset::new(features, dim, labels, vec![0; n]).unwrap()
}

#[test]
fn tune_is_pure_and_small_steps_reduce_loss() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for case in 0..20 {
        let dim = rng.random_range(1..6);
        let arch = Architecture::new(dim, vec![rng.random_range(1..8)], Activation::Tanh).unwrap();
        let p = ParamVector::init(&arch, case);
        let n = rng.random_range(4..30);
        let batch = random_batch(&mut rng, dim, n);
        let before = p.clone();
        let cfg = TrainConfig {
            learning_rate: 1e-3,
            batch_size: batch.len(),
            epochs_per_tune: 1,
            seed: case,
        };
        let a = p.tune(&batch, &cfg).unwrap();
        assert_eq!(p, before);
        assert_eq!(a, p.tune(&batch, &cfg).unwrap());
        assert!(a.loss(&batch).unwrap() < p.loss(&batch).unwrap(), "case {case}");
    }
}

#[test]
fn logistic_regression_gradient_is_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let arch = Architecture::new(4, vec![], Activation::Relu).unwrap();
    let values: Vec<f64> = (0..5).map(|_| rng.random_range(-1.0..1.0)).collect();
    let p = ParamVector::from_values(&arch, values).unwrap();
    let batch = random_batch(&mut rng, 4, 17);
    let g = p.gradient(&batch).unwrap();
    let mut expect = [0.0; 5];
    for i in 0..batch.len() {
        let r = p.forward(batch.row(i)).unwrap() - f64::from(batch.labels()[i]);
        for (e, x) in expect.iter_mut().zip(batch.row(i)) {
            *e += r * x / batch.len() as f64;
        }
        expect[4] += r / batch.len() as f64;
    }
    for (a, b) in g.values().iter().zip(&expect) {
        assert!((a - b).abs() <= 1e-12);
    }
}
