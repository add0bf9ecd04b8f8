//! Discretizations of the nuisance prior measure.

use std::ops::Deref;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::SystematicsModel;
use crate::quadrature::{gauss_hermite_normal, HERMITE_MAX_NODES, HERMITE_MIN_NODES};
use crate::scalar::Real;
use crate::summation::pairwise_sum;

/// Largest tensor-product grid [`draw_samples`] will build.
pub const MAX_QUADRATURE_POINTS: usize = 1 << 22;

/// How the integral over the nuisance priors is discretized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Integrator {
    /// `n_samples` equal-weight draws from the priors.
    MonteCarlo { n_samples: usize, seed: u64 },
    /// Tensor-product Gauss–Hermite rule; normal-family priors only.
    GaussHermite { nodes_per_dim: usize },
}

impl Integrator {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Integrator::MonteCarlo { n_samples: 0, .. } => Err(Error::UnsupportedIntegrator(
                "Monte Carlo needs at least one sample".into(),
            )),
            Integrator::GaussHermite { nodes_per_dim }
                if !(HERMITE_MIN_NODES..=HERMITE_MAX_NODES).contains(&nodes_per_dim) =>
            {
                Err(Error::UnsupportedIntegrator(format!(
                    "Gauss-Hermite nodes per dimension must lie in [{HERMITE_MIN_NODES}, {HERMITE_MAX_NODES}], got {nodes_per_dim}"
                )))
            }
            _ => Ok(()),
        }
    }

    pub fn is_monte_carlo(&self) -> bool {
        matches!(self, Integrator::MonteCarlo { .. })
    }
}

/// One point of the discretized prior measure.
#[derive(Debug, Clone, PartialEq)]
pub struct NuisanceSample<T> {
    pub eta: Vec<T>,
    pub weight: T,
}

/// Ordered sample list with weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet<T> {
    samples: Vec<NuisanceSample<T>>,
    monte_carlo: bool,
}

impl<T: Real> SampleSet<T> {
    /// Wraps a caller-built sample list. `monte_carlo` marks equal-weight
    /// random draws, for which standard errors are reported.
    pub fn from_samples(samples: Vec<NuisanceSample<T>>, monte_carlo: bool) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidRequest("sample set is empty".into()));
        }
        let dim = samples[0].eta.len();
        for (k, s) in samples.iter().enumerate() {
            if s.eta.len() != dim {
                return Err(Error::InvalidRequest(format!("sample {k} has inconsistent dimension")));
            }
            if !s.weight.is_finite() || s.weight <= T::zero() {
                return Err(Error::InvalidRequest(format!("sample {k} has non-positive weight")));
            }
        }
        Ok(Self { samples, monte_carlo })
    }

    pub fn is_monte_carlo(&self) -> bool {
        self.monte_carlo
    }

    pub fn weight_sum(&self) -> T {
        let w: Vec<T> = self.samples.iter().map(|s| s.weight).collect();
        pairwise_sum(&w)
    }

    pub fn into_inner(self) -> Vec<NuisanceSample<T>> {
        self.samples
    }
}

impl<T> Deref for SampleSet<T> {
    type Target = [NuisanceSample<T>];

    fn deref(&self) -> &[NuisanceSample<T>] {
        &self.samples
    }
}

/// Discretizes `prod_j g(eta_j) d eta_j` for `systematics`.
///
/// Monte Carlo: sample `k` draws its standard normals from a ChaCha8 stream
/// selected by `(seed, k)`, one 2^32-word block per nuisance index, so every
/// variate is a pure function of `(seed, nuisance, sample)`. Correlated
/// Gaussian nuisances are mixed with the Cholesky factor before the
/// location-scale map.
///
/// Gauss–Hermite: tensor product of the one-dimensional rule with the first
/// nuisance varying slowest.
///
/// A model without nuisances gets a single sample of weight one.
pub fn draw_samples<T: Real>(systematics: &SystematicsModel<T>, integrator: &Integrator) -> Result<SampleSet<T>> {
    integrator.validate()?;
    let dim = systematics.len();
    if dim == 0 {
        return SampleSet::from_samples(
            vec![NuisanceSample {
                eta: Vec::new(),
                weight: T::one(),
            }],
            integrator.is_monte_carlo(),
        );
    }
    match *integrator {
        Integrator::MonteCarlo { n_samples, seed } => Ok(SampleSet {
            samples: monte_carlo(systematics, n_samples, seed),
            monte_carlo: true,
        }),
        Integrator::GaussHermite { nodes_per_dim } => Ok(SampleSet {
            samples: gauss_hermite(systematics, nodes_per_dim)?,
            monte_carlo: false,
        }),
    }
}

fn to_prior_space<T: Real>(systematics: &SystematicsModel<T>, mut z: Vec<T>) -> Vec<T> {
    if let Some(corr) = systematics.correlation() {
        let members = corr.members();
        let independent: Vec<T> = members.iter().map(|&j| z[j]).collect();
        for (&j, v) in members.iter().zip(corr.correlate(&independent)) {
            z[j] = v;
        }
    }
    systematics
        .nuisances()
        .iter()
        .zip(z)
        .map(|(n, zj)| n.prior.from_standard_normal(zj))
        .collect()
}

fn monte_carlo<T: Real>(systematics: &SystematicsModel<T>, n_samples: usize, seed: u64) -> Vec<NuisanceSample<T>> {
    let dim = systematics.len();
    let base = ChaCha8Rng::seed_from_u64(seed);
    let weight = T::one() / T::from_usize(n_samples).unwrap();
    (0..n_samples)
        .into_par_iter()
        .with_min_len(256)
        .map(|k| {
            let mut rng = base.clone();
            rng.set_stream(k as u64);
            let z: Vec<T> = (0..dim)
                .map(|j| {
                    rng.set_word_pos((j as u128) << 32);
                    T::lit(rng.sample::<f64, _>(StandardNormal))
                })
                .collect();
            NuisanceSample {
                eta: to_prior_space(systematics, z),
                weight,
            }
        })
        .collect()
}

fn gauss_hermite<T: Real>(systematics: &SystematicsModel<T>, nodes: usize) -> Result<Vec<NuisanceSample<T>>> {
    if let Some(n) = systematics.nuisances().iter().find(|n| !n.prior.is_gaussian()) {
        return Err(Error::UnsupportedIntegrator(format!(
            "Gauss-Hermite quadrature needs normal-family priors; nuisance `{}` is log-normal",
            n.name
        )));
    }
    let dim = systematics.len();
    let total = u32::try_from(dim)
        .ok()
        .and_then(|d| nodes.checked_pow(d))
        .filter(|&t| t <= MAX_QUADRATURE_POINTS)
        .ok_or_else(|| {
            Error::UnsupportedIntegrator(format!(
                "{nodes}^{dim} quadrature points exceed the limit of {MAX_QUADRATURE_POINTS}"
            ))
        })?;
    let rule = gauss_hermite_normal::<T>(nodes)?;
    Ok((0..total)
        .into_par_iter()
        .with_min_len(256)
        .map(|flat| {
            let mut z = vec![T::zero(); dim];
            let mut weight = T::one();
            let mut rest = flat;
            for j in (0..dim).rev() {
                let (node, w) = rule[rest % nodes];
                rest /= nodes;
                z[j] = node;
                weight = weight * w;
            }
            NuisanceSample {
                eta: to_prior_space(systematics, z),
                weight,
            }
        })
        .collect())
}
