//! Offspring generation: weight-averaging merge crossover followed by
//! per-tensor, std-scaled Gaussian noise mutation.

use alloc::format;
use alloc::vec::Vec;

use rand::Rng as _;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::model::ParamVector;
use crate::rng::{derive_seed, rng_from_seed};

pub const DEFAULT_MERGE_ALPHA: f64 = 0.5;
pub const DEFAULT_MUTATION_LAMBDA: f64 = 0.02;

/// `alpha·p1 + (1 - alpha)·p2`, elementwise.
///
/// Equal coordinates are copied unchanged and every result is clamped to
/// the parents' interval, so the child never leaves the segment between them.
pub fn merge_crossover(p1: &ParamVector, p2: &ParamVector, alpha: f64) -> Result<ParamVector> {
    if !p1.same_arch(p2) {
        return Err(Error::ArchitectureMismatch);
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidConfig(format!("merge alpha {alpha} outside [0, 1]")));
    }
    let values = p1
        .values()
        .iter()
        .zip(p2.values())
        .map(|(&a, &b)| {
            if a == b {
                a
            } else {
                (alpha * a + (1.0 - alpha) * b).clamp(a.min(b), a.max(b))
            }
        })
        .collect();
    ParamVector::from_values(p1.arch(), values)
}

fn population_std(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    libm::sqrt(xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n)
}

/// Adds `Normal(0, (lambda·std(t))²)` noise to every entry of each tensor
/// `t`, where `std(t)` is the population standard deviation of that tensor.
/// Tensors with a single entry or zero spread are left untouched.
pub fn gaussian_mutate(p: &ParamVector, lambda: f64, seed: u64) -> Result<ParamVector> {
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(Error::InvalidConfig(format!("mutation lambda {lambda} must be >= 0")));
    }
    let mut out = p.clone();
    if lambda == 0.0 {
        return Ok(out);
    }
    let mut rng = rng_from_seed(derive_seed(seed, "mutation", 0, 0));
    for spec in p.layout() {
        let range = spec.range();
        if range.len() < 2 {
            continue;
        }
        let std = population_std(&p.values()[range.clone()]);
        if std == 0.0 {
            continue;
        }
        let noise = Normal::new(0.0, lambda * std).map_err(|_| Error::NonFinite("noise scale"))?;
        for v in &mut out.values_mut()[range] {
            *v += noise.sample(&mut rng);
        }
    }
    if !out.is_finite() {
        return Err(Error::NonFinite("mutated parameters"));
    }
    Ok(out)
}

/// Produces `count` offspring. Offspring `i` draws two distinct pool slots
/// and its noise from streams derived from `(seed, i)` only.
pub fn fgdg_generate(
    pool: &[&ParamVector],
    count: usize,
    lambda: f64,
    alpha: f64,
    seed: u64,
) -> Result<Vec<ParamVector>> {
    if pool.len() < 2 {
        return Err(Error::PopulationTooSmall {
            have: pool.len(),
            want: 2,
        });
    }
    (0..count as u64).map(|i| offspring(pool, i, lambda, alpha, seed)).collect()
}

/// The `index`-th offspring of [`fgdg_generate`], computable in isolation.
pub fn offspring(pool: &[&ParamVector], index: u64, lambda: f64, alpha: f64, seed: u64) -> Result<ParamVector> {
    if pool.len() < 2 {
        return Err(Error::PopulationTooSmall {
            have: pool.len(),
            want: 2,
        });
    }
    let mut rng = rng_from_seed(derive_seed(seed, "parents", index, 0));
    let a = rng.random_range(0..pool.len());
    let mut b = rng.random_range(0..pool.len() - 1);
    if b >= a {
        b += 1;
    }
    let child = merge_crossover(pool[a], pool[b], alpha)?;
    gaussian_mutate(&child, lambda, derive_seed(seed, "noise", index, 0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Activation, Architecture};
    use alloc::vec;

    fn lr(values: Vec<f64>) -> ParamVector {
        let arch = Architecture::new(values.len() - 1, vec![], Activation::Relu).unwrap();
        ParamVector::from_values(&arch, values).unwrap()
    }

    #[test]
    fn merge_cases() {
        let p = ParamVector::init(&Architecture::with_input_dim(5).unwrap(), 1);
        let q = ParamVector::init(&Architecture::with_input_dim(5).unwrap(), 2);
        for alpha in [0.0, 0.13, 0.5, 0.77, 1.0] {
            assert_eq!(merge_crossover(&p, &p, alpha).unwrap(), p);
        }
        assert_eq!(merge_crossover(&p, &q, 1.0).unwrap(), p);
        assert_eq!(merge_crossover(&p, &q, 0.0).unwrap(), q);
        let m = merge_crossover(&lr(vec![2.0, 4.0]), &lr(vec![4.0, 8.0]), 0.5).unwrap();
        assert_eq!(m.values(), &[3.0, 6.0]);
    }

    #[test]
    fn merge_rejects_mismatch() {
        let a = lr(vec![1.0, 2.0]);
        let b = lr(vec![1.0, 2.0, 3.0]);
        assert_eq!(merge_crossover(&a, &b, 0.5), Err(Error::ArchitectureMismatch));
    }

    #[test]
    fn zero_lambda_and_constant_tensors_are_untouched() {
        let p = ParamVector::init(&Architecture::with_input_dim(5).unwrap(), 1);
        assert_eq!(gaussian_mutate(&p, 0.0, 7).unwrap(), p);
        let c = lr(vec![0.3, 0.3, 0.3, 0.3]);
        assert_eq!(gaussian_mutate(&c, 0.5, 7).unwrap(), c);
        // bias tensors of a fresh init are all zero
        let m = gaussian_mutate(&p, 0.02, 7).unwrap();
        for (i, t) in p.layout().iter().enumerate() {
            if t.name.ends_with("bias") {
                assert_eq!(m.tensor(i), p.tensor(i));
            } else {
                assert_ne!(m.tensor(i), p.tensor(i));
            }
        }
        assert!(gaussian_mutate(&p, -0.1, 7).is_err());
    }

    #[test]
    fn generation_counts_and_determinism() {
        let arch = Architecture::with_input_dim(3).unwrap();
        let parents: Vec<ParamVector> = (0..4).map(|s| ParamVector::init(&arch, s)).collect();
        let pool: Vec<&ParamVector> = parents.iter().collect();
        let a = fgdg_generate(&pool, 50, 0.02, 0.5, 9).unwrap();
        assert_eq!(a.len(), 50);
        assert_eq!(a, fgdg_generate(&pool, 50, 0.02, 0.5, 9).unwrap());
        assert_eq!(a[17], offspring(&pool, 17, 0.02, 0.5, 9).unwrap());
        assert!(fgdg_generate(&pool[..1], 3, 0.02, 0.5, 9).is_err());
    }

    #[test]
    fn identical_parents_without_noise_reproduce_the_parent() {
        let p = ParamVector::init(&Architecture::with_input_dim(3).unwrap(), 4);
        let out = fgdg_generate(&[&p, &p], 10, 0.0, 0.5, 1).unwrap();
        assert!(out.iter().all(|c| *c == p));
    }
}
