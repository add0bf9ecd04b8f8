//! Hybrid CLs and marginal Bayesian limits.
//!
//! Both methods integrate fixed-nuisance quantities against the prior
//! measure, discretized by a [`SampleSet`] with weights `w_k`:
//!
//! ```text
//! hybrid CLs(mu) = sum_k w_k F(N; mu s_k + b_k) / sum_k w_k F(N; b_k)
//! Bayes tail(mu) = sum_k w_k Q(N+1, mu s_k + b_k) / s_k
//!                / sum_k w_k Q(N+1, b_k) / s_k
//! ```
//!
//! with `F` the Poisson CDF. When every `s_k` is the same the `1/s_k`
//! factors cancel and the two ratios coincide; with a shared sample set this
//! holds exactly, not just as the sample size grows.
//!
//! Every sum runs through [`pairwise_sum`] over per-sample terms collected
//! in sample order, so results do not depend on the rayon thread count.

mod samples;

pub use samples::{draw_samples, Integrator, NuisanceSample, SampleSet, MAX_QUADRATURE_POINTS};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::{LimitRequest, LimitResult};
use crate::model::CountingModel;
use crate::root::solve_decreasing;
use crate::scalar::Real;
use crate::special::{gamma_q, log_poisson_pmf_unchecked, poisson_cdf_unchecked};
use crate::summation::pairwise_sum;

const PAR_MIN_LEN: usize = 512;

/// Value with an optional Monte Carlo standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    pub stderr: Option<T>,
}

/// A model bound to one sample set, with per-sample yields cached.
#[derive(Debug, Clone)]
pub struct Marginal<'a, T> {
    model: &'a CountingModel<T>,
    signal: Vec<T>,
    background: Vec<T>,
    weights: Vec<T>,
    monte_carlo: bool,
    /// `F(N; b_k)` per sample and its weighted sum.
    clb_terms: Vec<T>,
    clb: T,
}

fn map_samples<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Real,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..len).into_par_iter().with_min_len(PAR_MIN_LEN).map(f).collect()
}

fn try_map_samples<T, F>(len: usize, f: F) -> Result<Vec<T>>
where
    T: Real,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    (0..len).into_par_iter().with_min_len(PAR_MIN_LEN).map(f).collect()
}

impl<'a, T: Real> Marginal<'a, T> {
    pub fn new(model: &'a CountingModel<T>, samples: &SampleSet<T>) -> Result<Self> {
        if samples.first().map(|s| s.eta.len()) != Some(model.n_nuisances()) {
            return Err(Error::InvalidRequest(format!(
                "sample dimension does not match the model's {} nuisances",
                model.n_nuisances()
            )));
        }
        let yields = samples
            .par_iter()
            .with_min_len(PAR_MIN_LEN)
            .enumerate()
            .map(|(k, sample)| {
                model.yields(&sample.eta).map_err(|e| match e {
                    Error::YieldNegative {
                        process, nuisance, eta, ..
                    } => Error::YieldNegative {
                        process,
                        nuisance,
                        eta,
                        sample: Some(k),
                    },
                    other => other,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let (signal, background): (Vec<T>, Vec<T>) = yields.into_iter().unzip();
        let weights: Vec<T> = samples.iter().map(|s| s.weight).collect();
        let n = model.n_obs();
        let clb_terms = map_samples(weights.len(), |k| poisson_cdf_unchecked(n, background[k]));
        let clb = pairwise_sum(&map_samples(weights.len(), |k| weights[k] * clb_terms[k]));
        Ok(Self {
            model,
            signal,
            background,
            weights,
            monte_carlo: samples.is_monte_carlo(),
            clb_terms,
            clb,
        })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn model(&self) -> &CountingModel<T> {
        self.model
    }

    /// Per-sample `(s_k, b_k)`.
    pub fn yields(&self) -> impl Iterator<Item = (T, T)> + '_ {
        self.signal.iter().copied().zip(self.background.iter().copied())
    }

    fn weighted_sum(&self, terms: &[T]) -> T {
        pairwise_sum(&map_samples(terms.len(), |k| self.weights[k] * terms[k]))
    }

    /// Standard error of `sum_k w_k a_k`, equal weights assumed.
    fn mean_stderr(&self, terms: &[T]) -> Option<T> {
        if !self.monte_carlo || terms.len() < 2 {
            return None;
        }
        let mean = self.weighted_sum(terms);
        let sq = map_samples(terms.len(), |k| (terms[k] - mean).powi(2));
        let n = T::from_usize(terms.len()).unwrap();
        Some((pairwise_sum(&sq) / (n * (n - T::one()))).sqrt())
    }

    /// Delta-method standard error of `sum w a / sum w c`.
    fn ratio_stderr(&self, num: &[T], den: &[T], ratio: T, den_sum: T) -> Option<T> {
        if !self.monte_carlo || num.len() < 2 {
            return None;
        }
        let resid = map_samples(num.len(), |k| num[k] - ratio * den[k]);
        self.mean_stderr(&resid).map(|se| se / den_sum.abs())
    }

    fn check_mu(mu: T) -> Result<()> {
        if mu.is_nan() || mu < T::zero() {
            return Err(Error::domain("signal strength", mu.to_f64_lossy()));
        }
        Ok(())
    }

    /// `L_m(mu; n) = sum_k w_k P(n; mu s_k + b_k)`.
    pub fn likelihood(&self, mu: T, n: u64) -> Result<T> {
        Self::check_mu(mu)?;
        let terms = map_samples(self.len(), |k| {
            log_poisson_pmf_unchecked(n, mu * self.signal[k] + self.background[k]).prob()
        });
        Ok(self.weighted_sum(&terms))
    }

    fn clsb_terms(&self, mu: T) -> Vec<T> {
        let n = self.model.n_obs();
        map_samples(self.len(), |k| {
            poisson_cdf_unchecked(n, mu * self.signal[k] + self.background[k])
        })
    }

    /// Marginalized `CL_{s+b}(mu)`.
    pub fn clsb(&self, mu: T) -> Result<Estimate<T>> {
        Self::check_mu(mu)?;
        let terms = self.clsb_terms(mu);
        Ok(Estimate {
            value: self.weighted_sum(&terms),
            stderr: self.mean_stderr(&terms),
        })
    }

    /// Marginalized `CL_b`.
    pub fn clb(&self) -> Estimate<T> {
        Estimate {
            value: self.clb,
            stderr: self.mean_stderr(&self.clb_terms),
        }
    }

    fn check_identified(&self) -> Result<()> {
        if self.signal.iter().all(|&s| s == T::zero()) {
            return Err(Error::Degenerate("signal yield is zero for every sample".into()));
        }
        if self.clb == T::zero() {
            return Err(Error::Degenerate("background-only p-value underflows to zero".into()));
        }
        Ok(())
    }

    /// Hybrid `CLs(mu)`.
    pub fn cls(&self, mu: T) -> Result<Estimate<T>> {
        self.cls_impl(mu, true)
    }

    fn cls_impl(&self, mu: T, with_stderr: bool) -> Result<Estimate<T>> {
        Self::check_mu(mu)?;
        self.check_identified()?;
        let terms = self.clsb_terms(mu);
        let value = self.weighted_sum(&terms) / self.clb;
        Ok(Estimate {
            value,
            stderr: if with_stderr {
                self.ratio_stderr(&terms, &self.clb_terms, value, self.clb)
            } else {
                None
            },
        })
    }

    /// `Q(N + 1, b_k) / s_k` per sample, failing on zero signal.
    fn bayes_den_terms(&self) -> Result<Vec<T>> {
        let a = T::from_count(self.model.n_obs()) + T::one();
        try_map_samples(self.len(), |k| {
            let s = self.signal[k];
            if s == T::zero() {
                return Err(Error::DegenerateSample { index: k });
            }
            Ok(gamma_q(a, self.background[k])? / s)
        })
    }

    fn bayes_num_terms(&self, mu: T) -> Result<Vec<T>> {
        let a = T::from_count(self.model.n_obs()) + T::one();
        try_map_samples(self.len(), |k| {
            let s = self.signal[k];
            if s == T::zero() {
                return Err(Error::DegenerateSample { index: k });
            }
            Ok(gamma_q(a, mu * s + self.background[k])? / s)
        })
    }

    /// Marginal posterior mass above `mu` (flat prior on `mu`).
    pub fn bayes_tail(&self, mu: T) -> Result<Estimate<T>> {
        Self::check_mu(mu)?;
        let den = self.bayes_den_terms()?;
        self.bayes_tail_with(mu, &den, self.weighted_sum(&den), true)
    }

    fn bayes_tail_with(&self, mu: T, den: &[T], den_sum: T, with_stderr: bool) -> Result<Estimate<T>> {
        if den_sum == T::zero() {
            return Err(Error::Degenerate("posterior normalization underflows to zero".into()));
        }
        let num = self.bayes_num_terms(mu)?;
        let value = self.weighted_sum(&num) / den_sum;
        Ok(Estimate {
            value,
            stderr: if with_stderr {
                self.ratio_stderr(&num, den, value, den_sum)
            } else {
                None
            },
        })
    }

    /// Marginal posterior density `L_m(mu; N_obs) / int_0^inf L_m`.
    pub fn posterior_density(&self, mu: T) -> Result<Estimate<T>> {
        Self::check_mu(mu)?;
        let den = self.bayes_den_terms()?;
        let den_sum = self.weighted_sum(&den);
        if den_sum == T::zero() {
            return Err(Error::Degenerate("posterior normalization underflows to zero".into()));
        }
        let n = self.model.n_obs();
        let num = map_samples(self.len(), |k| {
            log_poisson_pmf_unchecked(n, mu * self.signal[k] + self.background[k]).prob()
        });
        let value = self.weighted_sum(&num) / den_sum;
        Ok(Estimate {
            value,
            stderr: self.ratio_stderr(&num, &den, value, den_sum),
        })
    }

    /// `-d/dmu` of `sum_k w_k F(N; mu s_k + b_k)`.
    fn clsb_slope(&self, mu: T) -> T {
        let n = self.model.n_obs();
        let terms = map_samples(self.len(), |k| {
            let s = self.signal[k];
            s * log_poisson_pmf_unchecked(n, mu * s + self.background[k]).prob()
        });
        self.weighted_sum(&terms)
    }

    /// Solves hybrid `CLs(mu_up) = alpha` on this sample set.
    pub fn cls_upper_limit(&self, req: &LimitRequest<T>) -> Result<LimitResult<T>> {
        req.validate()?;
        self.check_identified()?;
        let alpha = req.alpha;
        let root = solve_decreasing(
            |mu| Ok(self.cls_impl(mu, false)?.value - alpha),
            req.rel_tol,
            req.max_iter,
        )?;
        let mut result = LimitResult::from_root(root, alpha);
        if self.monte_carlo {
            let at = self.cls(result.mu_up)?;
            result.criterion_stderr = at.stderr;
            let slope = self.clsb_slope(result.mu_up) / self.clb;
            result.mc_stderr = at.stderr.map(|se| se / slope);
        }
        Ok(result)
    }

    /// Solves marginal posterior tail `= alpha` on this sample set.
    pub fn bayes_upper_limit(&self, req: &LimitRequest<T>) -> Result<LimitResult<T>> {
        req.validate()?;
        self.check_identified()?;
        let den = self.bayes_den_terms()?;
        let den_sum = self.weighted_sum(&den);
        let alpha = req.alpha;
        let root = solve_decreasing(
            |mu| Ok(self.bayes_tail_with(mu, &den, den_sum, false)?.value - alpha),
            req.rel_tol,
            req.max_iter,
        )?;
        let mut result = LimitResult::from_root(root, alpha);
        if self.monte_carlo {
            let at = self.bayes_tail_with(result.mu_up, &den, den_sum, true)?;
            result.criterion_stderr = at.stderr;
            // d/dmu Q(N+1, mu s + b) / s = -P(N; mu s + b)
            let n = self.model.n_obs();
            let pmf = map_samples(self.len(), |k| {
                log_poisson_pmf_unchecked(n, result.mu_up * self.signal[k] + self.background[k]).prob()
            });
            let slope = self.weighted_sum(&pmf) / den_sum;
            result.mc_stderr = at.stderr.map(|se| se / slope);
        }
        Ok(result)
    }
}

/// `L_m(mu; n)`: the Poisson likelihood averaged over the sample set.
pub fn marginal_likelihood<T: Real>(model: &CountingModel<T>, mu: T, n: u64, samples: &SampleSet<T>) -> Result<T> {
    Marginal::new(model, samples)?.likelihood(mu, n)
}

/// Ratio of marginalized `CL_{s+b}(mu)` and `CL_b` over one sample set.
pub fn hybrid_cls<T: Real>(model: &CountingModel<T>, mu: T, samples: &SampleSet<T>) -> Result<T> {
    Ok(Marginal::new(model, samples)?.cls(mu)?.value)
}

/// Marginal Bayesian posterior tail above `mu` over one sample set.
pub fn marginal_posterior_tail<T: Real>(model: &CountingModel<T>, mu: T, samples: &SampleSet<T>) -> Result<T> {
    Ok(Marginal::new(model, samples)?.bayes_tail(mu)?.value)
}

/// Hybrid CLs limit; draws one sample set and reuses it for every `mu`.
pub fn hybrid_cls_upper_limit<T: Real>(
    model: &CountingModel<T>,
    req: &LimitRequest<T>,
    integrator: &Integrator,
) -> Result<LimitResult<T>> {
    let samples = draw_samples(model.systematics(), integrator)?;
    hybrid_cls_upper_limit_with(model, req, &samples)
}

pub fn hybrid_cls_upper_limit_with<T: Real>(
    model: &CountingModel<T>,
    req: &LimitRequest<T>,
    samples: &SampleSet<T>,
) -> Result<LimitResult<T>> {
    Marginal::new(model, samples)?.cls_upper_limit(req)
}

/// Marginal Bayesian limit with a flat prior on `mu`.
pub fn bayesian_marginal_upper_limit<T: Real>(
    model: &CountingModel<T>,
    req: &LimitRequest<T>,
    integrator: &Integrator,
) -> Result<LimitResult<T>> {
    let samples = draw_samples(model.systematics(), integrator)?;
    bayesian_marginal_upper_limit_with(model, req, &samples)
}

pub fn bayesian_marginal_upper_limit_with<T: Real>(
    model: &CountingModel<T>,
    req: &LimitRequest<T>,
    samples: &SampleSet<T>,
) -> Result<LimitResult<T>> {
    Marginal::new(model, samples)?.bayes_upper_limit(req)
}
