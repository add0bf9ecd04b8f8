//! Side-by-side hybrid CLs and marginal Bayesian limits on shared samples.

use serde::Serialize;

use crate::error::{MethodTag, Result};
use crate::exact::{LimitRequest, LimitResult};
use crate::marginal::{draw_samples, Integrator, Marginal, SampleSet};
use crate::model::CountingModel;
use crate::scalar::Real;

pub const DEFAULT_EQUIVALENCE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    EquivalentWithinTol,
    /// Limits differ and the signal yield carries a systematic response.
    DivergentAsExpected,
    /// Limits differ although the signal yield is perfectly known.
    UnexpectedDivergence,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceReport<T> {
    pub mu_up_cls: T,
    pub mu_up_bayes: T,
    /// `|a - b| / max(a, b)`.
    pub rel_diff: T,
    pub tol: T,
    pub signal_uncertain: bool,
    /// Standard error of the hybrid CLs limit, Monte Carlo only.
    pub mc_stderr: Option<T>,
    pub verdict: Verdict,
    #[serde(skip)]
    pub cls: LimitResult<T>,
    #[serde(skip)]
    pub bayes: LimitResult<T>,
}

/// Classifies a relative difference between the two limits.
pub fn classify<T: Real>(rel_diff: T, tol: T, signal_uncertain: bool) -> Verdict {
    if rel_diff <= tol {
        Verdict::EquivalentWithinTol
    } else if signal_uncertain {
        Verdict::DivergentAsExpected
    } else {
        Verdict::UnexpectedDivergence
    }
}

/// Draws one sample set and solves both limits on it.
pub fn compare_limits<T: Real>(
    model: &CountingModel<T>,
    req: &LimitRequest<T>,
    integrator: &Integrator,
    tol: T,
) -> Result<EquivalenceReport<T>> {
    let samples = draw_samples(model.systematics(), integrator)?;
    compare_limits_on(model, req, &samples, &samples, tol)
}

/// Solves hybrid CLs on `cls_samples` and the Bayesian limit on
/// `bayes_samples`. Passing two different sets breaks the shared-sample
/// contract, which is only useful for exercising the divergence path.
pub fn compare_limits_on<T: Real>(
    model: &CountingModel<T>,
    req: &LimitRequest<T>,
    cls_samples: &SampleSet<T>,
    bayes_samples: &SampleSet<T>,
    tol: T,
) -> Result<EquivalenceReport<T>> {
    let cls = Marginal::new(model, cls_samples)
        .and_then(|m| m.cls_upper_limit(req))
        .map_err(|e| e.in_method(MethodTag::Cls))?;
    let bayes = Marginal::new(model, bayes_samples)
        .and_then(|m| m.bayes_upper_limit(req))
        .map_err(|e| e.in_method(MethodTag::Bayes))?;

    let (a, b) = (cls.mu_up, bayes.mu_up);
    let rel_diff = (a - b).abs() / a.max(b);
    let signal_uncertain = model.signal_uncertain();
    Ok(EquivalenceReport {
        mu_up_cls: a,
        mu_up_bayes: b,
        rel_diff,
        tol,
        signal_uncertain,
        mc_stderr: cls.mc_stderr,
        verdict: classify(rel_diff, tol, signal_uncertain),
        cls,
        bayes,
    })
}
