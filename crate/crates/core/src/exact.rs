//! Limits for perfectly known signal and background yields.
//!
//! With `nu(mu) = mu * s + b`:
//!
//! * CLs: `CLs(mu) = P(N <= N_obs; nu(mu)) / P(N <= N_obs; b)`, and the limit
//!   solves `CLs(mu_up) = alpha`.
//! * Bayesian, uniform prior on `mu >= 0`: the posterior tail above `mu_up`
//!   equals `Q(N_obs + 1, nu(mu_up)) / Q(N_obs + 1, b)`, and the limit sets it
//!   to `alpha`.
//!
//! The two criteria are the same function of `mu`, but they are evaluated by
//! different code paths (term sums vs. incomplete gamma). A third path
//! integrates the posterior numerically.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::CountingModel;
use crate::quadrature;
use crate::root::{solve_decreasing, Root};
use crate::scalar::Real;
use crate::special::{gamma_q, log_poisson_pmf, poisson_cdf};

/// Prior on the signal strength. Only the flat prior on `[0, inf)` exists.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MuPrior {
    #[default]
    Uniform,
}

pub const DEFAULT_REL_TOL: f64 = 1e-9;
pub const DEFAULT_MAX_ITER: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitRequest<T> {
    /// Exclusion threshold: `CLs(mu_up) = alpha`, posterior mass below `mu_up` is `1 - alpha`.
    pub alpha: T,
    pub mu_prior: MuPrior,
    /// Relative width of the final root bracket.
    pub rel_tol: T,
    pub max_iter: usize,
}

impl<T: Real> LimitRequest<T> {
    pub fn new(alpha: T) -> Result<Self> {
        let req = Self {
            alpha,
            mu_prior: MuPrior::Uniform,
            rel_tol: T::lit(DEFAULT_REL_TOL),
            max_iter: DEFAULT_MAX_ITER,
        };
        req.validate()?;
        Ok(req)
    }

    /// Request for confidence level `cl`, i.e. `alpha = 1 - cl`.
    pub fn from_cl(cl: T) -> Result<Self> {
        Self::new(T::one() - cl)
    }

    pub fn with_rel_tol(mut self, rel_tol: T) -> Result<Self> {
        self.rel_tol = rel_tol;
        self.validate()?;
        Ok(self)
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Result<Self> {
        self.max_iter = max_iter;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > T::zero() && self.alpha < T::one()) {
            return Err(Error::InvalidRequest(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        if !self.rel_tol.is_finite() || self.rel_tol <= T::zero() {
            return Err(Error::InvalidRequest(format!(
                "rel_tol must be positive, got {}",
                self.rel_tol
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidRequest("max_iter must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimitResult<T> {
    pub mu_up: T,
    /// CLs at `mu_up`, or the posterior tail mass above it.
    pub criterion_at_solution: T,
    pub iterations: usize,
    pub bracket: (T, T),
    /// Monte Carlo standard error of `mu_up` (delta method), when sampled.
    pub mc_stderr: Option<T>,
    /// Monte Carlo standard error of the criterion at `mu_up`.
    pub criterion_stderr: Option<T>,
}

impl<T: Real> LimitResult<T> {
    pub(crate) fn from_root(root: Root<T>, alpha: T) -> Self {
        Self {
            mu_up: root.x,
            criterion_at_solution: root.fx + alpha,
            iterations: root.iterations,
            bracket: root.bracket,
            mc_stderr: None,
            criterion_stderr: None,
        }
    }
}

/// Nominal `(s, b)` of a model without systematic responses.
pub fn nominal_yields<T: Real>(model: &CountingModel<T>) -> Result<(T, T)> {
    if model.has_systematics() {
        return Err(Error::InvalidRequest(
            "model has systematic responses; use the marginalized limits".into(),
        ));
    }
    Ok((model.s_nom(), model.b_nom_total()))
}

fn signal_for_limit<T: Real>(model: &CountingModel<T>) -> Result<(T, T)> {
    let (s, b) = nominal_yields(model)?;
    if s == T::zero() {
        return Err(Error::Degenerate("signal yield is zero; mu is not identified".into()));
    }
    Ok((s, b))
}

fn check_mu<T: Real>(mu: T) -> Result<()> {
    if mu.is_nan() || mu < T::zero() {
        return Err(Error::domain("signal strength", mu.to_f64_lossy()));
    }
    Ok(())
}

/// `CL_{s+b}(mu) = P(N <= N_obs; mu s + b)`.
pub fn clsb_value<T: Real>(model: &CountingModel<T>, mu: T) -> Result<T> {
    check_mu(mu)?;
    let (s, b) = nominal_yields(model)?;
    poisson_cdf(model.n_obs(), mu * s + b)
}

/// `CL_b = P(N <= N_obs; b)`.
pub fn clb_value<T: Real>(model: &CountingModel<T>) -> Result<T> {
    let (_, b) = nominal_yields(model)?;
    poisson_cdf(model.n_obs(), b)
}

/// `CLs(mu) = CL_{s+b}(mu) / CL_b`.
pub fn cls_value<T: Real>(model: &CountingModel<T>, mu: T) -> Result<T> {
    check_mu(mu)?;
    let (s, b) = signal_for_limit(model)?;
    let n = model.n_obs();
    let clb = poisson_cdf(n, b)?;
    if clb == T::zero() {
        return Err(Error::Degenerate("background-only p-value underflows to zero".into()));
    }
    Ok(poisson_cdf(n, mu * s + b)? / clb)
}

/// Solves `CLs(mu_up) = alpha`.
pub fn cls_upper_limit<T: Real>(model: &CountingModel<T>, req: &LimitRequest<T>) -> Result<LimitResult<T>> {
    req.validate()?;
    signal_for_limit(model)?;
    let alpha = req.alpha;
    let root = solve_decreasing(|mu| Ok(cls_value(model, mu)? - alpha), req.rel_tol, req.max_iter)?;
    Ok(LimitResult::from_root(root, alpha))
}

/// Posterior tail mass above `mu`: `Q(N_obs + 1, mu s + b) / Q(N_obs + 1, b)`.
pub fn posterior_tail<T: Real>(model: &CountingModel<T>, mu: T) -> Result<T> {
    check_mu(mu)?;
    let (s, b) = signal_for_limit(model)?;
    let a = T::from_count(model.n_obs()) + T::one();
    let denom = gamma_q(a, b)?;
    if denom == T::zero() {
        return Err(Error::Degenerate("posterior normalization underflows to zero".into()));
    }
    Ok(gamma_q(a, mu * s + b)? / denom)
}

/// Solves `Q(N_obs + 1, mu_up s + b) / Q(N_obs + 1, b) = alpha`.
pub fn bayesian_upper_limit_closed_form<T: Real>(
    model: &CountingModel<T>,
    req: &LimitRequest<T>,
) -> Result<LimitResult<T>> {
    req.validate()?;
    signal_for_limit(model)?;
    let alpha = req.alpha;
    let root = solve_decreasing(|mu| Ok(posterior_tail(model, mu)? - alpha), req.rel_tol, req.max_iter)?;
    Ok(LimitResult::from_root(root, alpha))
}

/// Posterior density of `mu` under the flat prior, normalized in closed form:
/// `p(mu) = s * P(N_obs; mu s + b) / Q(N_obs + 1, b)`.
pub fn posterior_density<T: Real>(model: &CountingModel<T>, mu: T) -> Result<T> {
    check_mu(mu)?;
    let (s, b) = signal_for_limit(model)?;
    let n = model.n_obs();
    let norm = gamma_q(T::from_count(n) + T::one(), b)?;
    if norm == T::zero() {
        return Err(Error::Degenerate("posterior normalization underflows to zero".into()));
    }
    Ok(s * log_poisson_pmf(n, mu * s + b)?.prob() / norm)
}

/// `int_{nu0}^inf P(n; nu) dnu` by adaptive quadrature.
///
/// The range is cut into panels one standard deviation of the `Gamma(n + 1)`
/// shape wide, out to forty deviations past the mean, so the integrand's peak
/// can never fall between the sample points of a single coarse panel.
fn pmf_tail_integral<T: Real>(n: u64, nu0: T) -> Result<T> {
    let nf = T::from_count(n);
    let width = (nf + T::one()).sqrt();
    let end = nf + T::one() + T::lit(40.0) * width + T::lit(40.0);
    let pmf = |nu: T| log_poisson_pmf(n, nu).map(|l| l.prob()).unwrap_or(T::zero());
    let rel = T::lit(1e-13);
    let floor = T::min_positive_value();

    let mut total = T::zero();
    let mut lo = nu0;
    while lo < end {
        let hi = (lo + width).min(end);
        total = total + quadrature::integrate(pmf, lo, hi, floor, rel)?.value;
        lo = hi;
    }
    total = total + quadrature::integrate_to_infinity(pmf, lo, floor, rel)?.value;
    Ok(total)
}

/// Posterior tail mass above `mu`, with both the tail and the normalization
/// integrated numerically (no incomplete gamma function involved).
pub fn posterior_tail_quadrature<T: Real>(model: &CountingModel<T>, mu: T) -> Result<T> {
    check_mu(mu)?;
    let (s, b) = signal_for_limit(model)?;
    let n = model.n_obs();
    let norm = pmf_tail_integral(n, b)?;
    if norm == T::zero() {
        return Err(Error::Degenerate("posterior normalization underflows to zero".into()));
    }
    Ok(pmf_tail_integral(n, mu * s + b)? / norm)
}

/// `int_0^mu p(mu') dmu'` by quadrature.
pub fn posterior_cdf_quadrature<T: Real>(model: &CountingModel<T>, mu: T) -> Result<T> {
    check_mu(mu)?;
    let (s, b) = signal_for_limit(model)?;
    let n = model.n_obs();
    let norm = pmf_tail_integral(n, b)?;
    let pmf = |nu: T| log_poisson_pmf(n, nu).map(|l| l.prob()).unwrap_or(T::zero());
    let width = (T::from_count(n) + T::one()).sqrt();
    let upper = mu * s + b;
    let mut total = T::zero();
    let mut lo = b;
    while lo < upper {
        let hi = (lo + width).min(upper);
        total = total + quadrature::integrate(pmf, lo, hi, T::min_positive_value(), T::lit(1e-13))?.value;
        lo = hi;
    }
    Ok(total / norm)
}

/// Bayesian limit from the numerically integrated posterior.
pub fn bayesian_upper_limit_quadrature<T: Real>(
    model: &CountingModel<T>,
    req: &LimitRequest<T>,
) -> Result<LimitResult<T>> {
    req.validate()?;
    let (s, b) = signal_for_limit(model)?;
    let n = model.n_obs();
    let norm = pmf_tail_integral(n, b)?;
    if norm == T::zero() {
        return Err(Error::Degenerate("posterior normalization underflows to zero".into()));
    }
    let alpha = req.alpha;
    let root = solve_decreasing(
        |mu| Ok(pmf_tail_integral(n, mu * s + b)? / norm - alpha),
        req.rel_tol,
        req.max_iter,
    )?;
    Ok(LimitResult::from_root(root, alpha))
}
