//! Single-channel counting model with multiplicative systematic responses.
//!
//! The expected count at signal strength `mu` and nuisance vector `eta` is
//! `mu * s(eta) + b(eta)`, where
//!
//! ```text
//! s(eta) = s_nom * prod_j h_j(eta_j)
//! b(eta) = sum_i b_i_nom * prod_j h_ij(eta_j)
//! ```
//!
//! Nuisance vectors are positional: entry `j` belongs to the `j`-th declared
//! nuisance.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::special::log_poisson_pmf;
use crate::summation::CompensatedSum;

/// Constraint density `g(eta)` of one nuisance parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConstraintPrior<T> {
    StandardNormal,
    Normal {
        mean: T,
        sd: T,
    },
    /// `ln(eta) ~ N(mu, sigma^2)`.
    LogNormal {
        mu: T,
        sigma: T,
    },
}

impl<T: Real> ConstraintPrior<T> {
    fn validate(&self) -> Result<()> {
        match *self {
            ConstraintPrior::StandardNormal => Ok(()),
            ConstraintPrior::Normal { mean, sd } => {
                if !mean.is_finite() || !sd.is_finite() || sd <= T::zero() {
                    return Err(Error::InvalidModel(format!(
                        "normal prior needs finite mean and sd > 0 (got mean {mean}, sd {sd})"
                    )));
                }
                Ok(())
            }
            ConstraintPrior::LogNormal { mu, sigma } => {
                if !mu.is_finite() || !sigma.is_finite() || sigma <= T::zero() {
                    return Err(Error::InvalidModel(format!(
                        "log-normal prior needs finite mu and sigma > 0 (got mu {mu}, sigma {sigma})"
                    )));
                }
                Ok(())
            }
        }
    }

    /// Location and scale for the normal family, `None` for log-normal.
    pub fn location_scale(&self) -> Option<(T, T)> {
        match *self {
            ConstraintPrior::StandardNormal => Some((T::zero(), T::one())),
            ConstraintPrior::Normal { mean, sd } => Some((mean, sd)),
            ConstraintPrior::LogNormal { .. } => None,
        }
    }

    pub fn is_gaussian(&self) -> bool {
        self.location_scale().is_some()
    }

    /// Maps a standard-normal variate onto this prior.
    pub fn from_standard_normal(&self, z: T) -> T {
        match *self {
            ConstraintPrior::StandardNormal => z,
            ConstraintPrior::Normal { mean, sd } => mean + sd * z,
            ConstraintPrior::LogNormal { mu, sigma } => (mu + sigma * z).exp(),
        }
    }

    /// `ln g(eta)`.
    pub fn log_density(&self, eta: T) -> T {
        let half_ln_tau = T::lit(0.5) * T::TAU().ln();
        let half = T::lit(0.5);
        match *self {
            ConstraintPrior::StandardNormal => -half * eta * eta - half_ln_tau,
            ConstraintPrior::Normal { mean, sd } => {
                let z = (eta - mean) / sd;
                -half * z * z - sd.ln() - half_ln_tau
            }
            ConstraintPrior::LogNormal { mu, sigma } => {
                if eta <= T::zero() {
                    return T::neg_infinity();
                }
                let ln_eta = eta.ln();
                let z = (ln_eta - mu) / sigma;
                -half * z * z - ln_eta - sigma.ln() - half_ln_tau
            }
        }
    }
}

/// Multiplicative yield response `h(eta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ResponseFunction<T> {
    Identity,
    /// `h(eta) = kappa^eta`.
    LogNormal {
        kappa: T,
    },
    /// `h(eta) = 1 + delta * eta`; may reach zero or go negative.
    Linear {
        delta: T,
    },
}

impl<T: Real> ResponseFunction<T> {
    fn validate(&self) -> Result<()> {
        match *self {
            ResponseFunction::Identity => Ok(()),
            ResponseFunction::LogNormal { kappa } if kappa.is_finite() && kappa > T::zero() => Ok(()),
            ResponseFunction::LogNormal { kappa } => Err(Error::InvalidModel(format!(
                "log-normal response needs finite kappa > 0 (got {kappa})"
            ))),
            ResponseFunction::Linear { delta } if delta.is_finite() => Ok(()),
            ResponseFunction::Linear { delta } => Err(Error::InvalidModel(format!(
                "linear response needs a finite delta (got {delta})"
            ))),
        }
    }

    #[inline]
    pub fn factor(&self, eta: T) -> T {
        match *self {
            ResponseFunction::Identity => T::one(),
            ResponseFunction::LogNormal { kappa } => (eta * kappa.ln()).exp(),
            ResponseFunction::Linear { delta } => T::one() + delta * eta,
        }
    }

    pub fn is_identity(&self) -> bool {
        matches!(self, ResponseFunction::Identity)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Nuisance<T> {
    pub name: String,
    pub prior: ConstraintPrior<T>,
}

/// Responses keyed by nuisance index, ascending.
pub type Responses<T> = Vec<(usize, ResponseFunction<T>)>;

#[derive(Debug, Clone, PartialEq)]
pub struct BackgroundProcess<T> {
    name: String,
    b_nom: T,
    responses: Responses<T>,
}

impl<T: Real> BackgroundProcess<T> {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn nominal(&self) -> T {
        self.b_nom
    }

    pub fn responses(&self) -> &[(usize, ResponseFunction<T>)] {
        &self.responses
    }
}

/// Correlation among the Gaussian-prior nuisances, in declaration order.
#[derive(Debug, Clone, PartialEq)]
pub struct Correlation<T> {
    matrix: Vec<Vec<T>>,
    /// Lower-triangular Cholesky factor of `matrix`.
    cholesky: Vec<Vec<T>>,
    /// Nuisance indices covered by the matrix rows.
    members: Vec<usize>,
}

impl<T: Real> Correlation<T> {
    pub fn matrix(&self) -> &[Vec<T>] {
        &self.matrix
    }

    pub fn cholesky(&self) -> &[Vec<T>] {
        &self.cholesky
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    /// `y = L z` for a vector of independent standard normals.
    pub fn correlate(&self, z: &[T]) -> Vec<T> {
        self.cholesky
            .iter()
            .enumerate()
            .map(|(i, row)| (0..=i).fold(T::zero(), |acc, k| acc + row[k] * z[k]))
            .collect()
    }

    /// `ln` of the multivariate standard-normal density with this correlation.
    fn log_density(&self, z: &[T]) -> T {
        // Forward substitution L y = z, so z' R^-1 z = |y|^2.
        let n = z.len();
        let mut y = vec![T::zero(); n];
        let mut log_det_half = T::zero();
        for i in 0..n {
            let row = &self.cholesky[i];
            let partial = (0..i).fold(T::zero(), |acc, k| acc + row[k] * y[k]);
            y[i] = (z[i] - partial) / row[i];
            log_det_half = log_det_half + row[i].ln();
        }
        let quad = y.iter().fold(T::zero(), |acc, &v| acc + v * v);
        let dim = T::from_usize(n).unwrap();
        -T::lit(0.5) * (quad + dim * T::TAU().ln()) - log_det_half
    }
}

fn cholesky<T: Real>(matrix: &[Vec<T>]) -> Result<Vec<Vec<T>>> {
    let n = matrix.len();
    let mut l = vec![vec![T::zero(); n]; n];
    for i in 0..n {
        for j in 0..=i {
            let dot = (0..j).fold(T::zero(), |acc, k| acc + l[i][k] * l[j][k]);
            if i == j {
                let d = matrix[i][i] - dot;
                if d.is_nan() || d <= T::zero() {
                    return Err(Error::InvalidModel(
                        "correlation matrix is not positive definite".into(),
                    ));
                }
                l[i][i] = d.sqrt();
            } else {
                l[i][j] = (matrix[i][j] - dot) / l[j][j];
            }
        }
    }
    Ok(l)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystematicsModel<T> {
    nuisances: Vec<Nuisance<T>>,
    signal_responses: Responses<T>,
    correlation: Option<Correlation<T>>,
}

impl<T: Real> SystematicsModel<T> {
    pub fn nuisances(&self) -> &[Nuisance<T>] {
        &self.nuisances
    }

    pub fn len(&self) -> usize {
        self.nuisances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nuisances.is_empty()
    }

    pub fn signal_responses(&self) -> &[(usize, ResponseFunction<T>)] {
        &self.signal_responses
    }

    pub fn correlation(&self) -> Option<&Correlation<T>> {
        self.correlation.as_ref()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.nuisances.iter().position(|n| n.name == name)
    }

    pub fn all_gaussian(&self) -> bool {
        self.nuisances.iter().all(|n| n.prior.is_gaussian())
    }

    /// `sum_j ln g(eta_j)`, or the joint Gaussian density when correlated.
    pub fn log_prior_density(&self, eta: &[T]) -> T {
        match &self.correlation {
            None => self
                .nuisances
                .iter()
                .zip(eta)
                .fold(T::zero(), |acc, (n, &e)| acc + n.prior.log_density(e)),
            Some(corr) => {
                let mut total = T::zero();
                let mut z = Vec::with_capacity(corr.members.len());
                for &j in &corr.members {
                    let (loc, scale) = self.nuisances[j].prior.location_scale().expect("gaussian member");
                    z.push((eta[j] - loc) / scale);
                    total = total - scale.ln();
                }
                total = total + corr.log_density(&z);
                for (j, n) in self.nuisances.iter().enumerate() {
                    if !n.prior.is_gaussian() {
                        total = total + n.prior.log_density(eta[j]);
                    }
                }
                total
            }
        }
    }
}

/// `(s_nom, {b_i_nom}, N_obs)` plus the systematics acting on them.
#[derive(Debug, Clone, PartialEq)]
pub struct CountingModel<T> {
    s_nom: T,
    backgrounds: Vec<BackgroundProcess<T>>,
    n_obs: u64,
    systematics: SystematicsModel<T>,
}

impl<T: Real> CountingModel<T> {
    pub fn builder(s_nom: T, n_obs: u64) -> ModelBuilder<T> {
        ModelBuilder {
            s_nom,
            n_obs,
            nuisances: Vec::new(),
            signal_responses: Vec::new(),
            backgrounds: Vec::new(),
            correlation: None,
        }
    }

    /// Model without nuisances: one background process called `background`.
    pub fn simple(s: T, b: T, n_obs: u64) -> Result<Self> {
        Self::builder(s, n_obs).background("background", b).build()
    }

    pub fn s_nom(&self) -> T {
        self.s_nom
    }

    pub fn n_obs(&self) -> u64 {
        self.n_obs
    }

    pub fn backgrounds(&self) -> &[BackgroundProcess<T>] {
        &self.backgrounds
    }

    pub fn systematics(&self) -> &SystematicsModel<T> {
        &self.systematics
    }

    pub fn n_nuisances(&self) -> usize {
        self.systematics.nuisances.len()
    }

    /// Same model with a different observed count.
    pub fn with_n_obs(&self, n_obs: u64) -> Self {
        Self { n_obs, ..self.clone() }
    }

    pub fn b_nom_total(&self) -> T {
        let mut sum = CompensatedSum::new();
        for p in &self.backgrounds {
            sum.add(p.b_nom);
        }
        sum.value()
    }

    /// Any non-identity response on the signal.
    pub fn signal_uncertain(&self) -> bool {
        self.systematics.signal_responses.iter().any(|(_, r)| !r.is_identity())
    }

    /// Any non-identity response anywhere.
    pub fn has_systematics(&self) -> bool {
        self.signal_uncertain()
            || self
                .backgrounds
                .iter()
                .any(|p| p.responses.iter().any(|(_, r)| !r.is_identity()))
    }

    fn check_eta(&self, eta: &[T]) -> Result<()> {
        if eta.len() != self.n_nuisances() {
            return Err(Error::InvalidRequest(format!(
                "nuisance vector has {} entries, model declares {}",
                eta.len(),
                self.n_nuisances()
            )));
        }
        Ok(())
    }

    fn scaled(&self, process: &str, nominal: T, responses: &[(usize, ResponseFunction<T>)], eta: &[T]) -> Result<T> {
        let mut value = nominal;
        for &(j, ref response) in responses {
            let f = response.factor(eta[j]);
            if f.is_nan() || f < T::zero() {
                return Err(Error::YieldNegative {
                    process: process.to_string(),
                    nuisance: self.systematics.nuisances[j].name.clone(),
                    eta: eta[j].to_f64_lossy(),
                    sample: None,
                });
            }
            value = value * f;
        }
        Ok(value)
    }

    /// `s(eta) = s_nom * prod_j h_j(eta_j)`.
    pub fn signal_yield(&self, eta: &[T]) -> Result<T> {
        self.check_eta(eta)?;
        self.scaled("signal", self.s_nom, &self.systematics.signal_responses, eta)
    }

    /// `b(eta) = sum_i b_i_nom * prod_j h_ij(eta_j)`.
    pub fn background_yield(&self, eta: &[T]) -> Result<T> {
        self.check_eta(eta)?;
        let mut sum = CompensatedSum::new();
        for p in &self.backgrounds {
            sum.add(self.scaled(&p.name, p.b_nom, &p.responses, eta)?);
        }
        Ok(sum.value())
    }

    /// `(s(eta), b(eta))`.
    pub fn yields(&self, eta: &[T]) -> Result<(T, T)> {
        Ok((self.signal_yield(eta)?, self.background_yield(eta)?))
    }

    /// `ln L(mu, eta; n)`: Poisson term plus the nuisance constraint density.
    ///
    /// This is a log-density in `eta`, so unlike a log-probability it may be
    /// positive for narrow priors.
    pub fn log_full_likelihood(&self, mu: T, eta: &[T], n: u64) -> Result<T> {
        if mu.is_nan() || mu < T::zero() {
            return Err(Error::domain("signal strength", mu.to_f64_lossy()));
        }
        let (s, b) = self.yields(eta)?;
        let poisson = log_poisson_pmf(n, mu * s + b)?.value();
        Ok(poisson + self.systematics.log_prior_density(eta))
    }
}

type PendingBackground<T> = (String, T, Vec<(String, ResponseFunction<T>)>);

/// Incremental constructor; nuisances are referenced by name and resolved in
/// [`ModelBuilder::build`].
#[derive(Debug, Clone)]
pub struct ModelBuilder<T> {
    s_nom: T,
    n_obs: u64,
    nuisances: Vec<Nuisance<T>>,
    signal_responses: Vec<(String, ResponseFunction<T>)>,
    backgrounds: Vec<PendingBackground<T>>,
    correlation: Option<Vec<Vec<T>>>,
}

impl<T: Real> ModelBuilder<T> {
    pub fn nuisance(mut self, name: impl Into<String>, prior: ConstraintPrior<T>) -> Self {
        self.nuisances.push(Nuisance {
            name: name.into(),
            prior,
        });
        self
    }

    pub fn signal_response(mut self, nuisance: impl Into<String>, response: ResponseFunction<T>) -> Self {
        self.signal_responses.push((nuisance.into(), response));
        self
    }

    pub fn background(self, name: impl Into<String>, b_nom: T) -> Self {
        self.background_with(name, b_nom, std::iter::empty::<(String, ResponseFunction<T>)>())
    }

    pub fn background_with<S, I>(mut self, name: impl Into<String>, b_nom: T, responses: I) -> Self
    where
        S: Into<String>,
        I: IntoIterator<Item = (S, ResponseFunction<T>)>,
    {
        let responses = responses.into_iter().map(|(n, r)| (n.into(), r)).collect();
        self.backgrounds.push((name.into(), b_nom, responses));
        self
    }

    /// Correlation matrix over the Gaussian-prior nuisances in declaration order.
    pub fn correlation(mut self, matrix: Vec<Vec<T>>) -> Self {
        self.correlation = Some(matrix);
        self
    }

    pub fn build(self) -> Result<CountingModel<T>> {
        let invalid = |msg: String| Err(Error::InvalidModel(msg));

        if !self.s_nom.is_finite() || self.s_nom < T::zero() {
            return invalid(format!(
                "signal nominal yield must be finite and >= 0 (got {})",
                self.s_nom
            ));
        }

        let mut seen = HashSet::new();
        for n in &self.nuisances {
            if n.name.is_empty() {
                return invalid("nuisance names must be non-empty".into());
            }
            if !seen.insert(n.name.as_str()) {
                return invalid(format!("duplicate nuisance `{}`", n.name));
            }
            n.prior
                .validate()
                .map_err(|e| annotate(e, &format!("nuisance `{}`", n.name)))?;
        }
        let lookup = |owner: &str, name: &str| -> Result<usize> {
            self.nuisances
                .iter()
                .position(|n| n.name == name)
                .ok_or_else(|| Error::InvalidModel(format!("{owner} references unknown nuisance `{name}`")))
        };
        let resolve = |owner: &str, list: &[(String, ResponseFunction<T>)]| -> Result<Responses<T>> {
            let mut out: Responses<T> = Vec::with_capacity(list.len());
            for (name, response) in list {
                response.validate().map_err(|e| annotate(e, owner))?;
                let j = lookup(owner, name)?;
                if out.iter().any(|&(k, _)| k == j) {
                    return Err(Error::InvalidModel(format!("{owner} has two responses to `{name}`")));
                }
                out.push((j, *response));
            }
            out.sort_by_key(|&(j, _)| j);
            Ok(out)
        };

        let signal_responses = resolve("signal", &self.signal_responses)?;

        let mut names = HashSet::new();
        let mut backgrounds = Vec::with_capacity(self.backgrounds.len());
        for (name, b_nom, responses) in &self.backgrounds {
            if name.is_empty() {
                return invalid("background names must be non-empty".into());
            }
            if !names.insert(name.as_str()) {
                return invalid(format!("duplicate background `{name}`"));
            }
            if !b_nom.is_finite() || *b_nom < T::zero() {
                return invalid(format!(
                    "background `{name}` nominal yield must be finite and >= 0 (got {b_nom})"
                ));
            }
            backgrounds.push(BackgroundProcess {
                name: name.clone(),
                b_nom: *b_nom,
                responses: resolve(&format!("background `{name}`"), responses)?,
            });
        }

        let b_total = backgrounds.iter().fold(T::zero(), |acc, p| acc + p.b_nom);
        if self.s_nom == T::zero() && b_total == T::zero() {
            return invalid("signal and total background yields are both zero".into());
        }

        let correlation = match self.correlation {
            None => None,
            Some(matrix) => Some(build_correlation(&self.nuisances, matrix)?),
        };

        Ok(CountingModel {
            s_nom: self.s_nom,
            backgrounds,
            n_obs: self.n_obs,
            systematics: SystematicsModel {
                nuisances: self.nuisances,
                signal_responses,
                correlation,
            },
        })
    }
}

fn annotate(err: Error, owner: &str) -> Error {
    match err {
        Error::InvalidModel(msg) => Error::InvalidModel(format!("{owner}: {msg}")),
        other => other,
    }
}

fn build_correlation<T: Real>(nuisances: &[Nuisance<T>], matrix: Vec<Vec<T>>) -> Result<Correlation<T>> {
    let members: Vec<usize> = nuisances
        .iter()
        .enumerate()
        .filter(|(_, n)| n.prior.is_gaussian())
        .map(|(j, _)| j)
        .collect();
    let dim = members.len();
    if matrix.len() != dim || matrix.iter().any(|row| row.len() != dim) {
        return Err(Error::InvalidModel(format!(
            "correlation matrix must be {dim}x{dim} (one row per Gaussian-prior nuisance)"
        )));
    }
    let tol = T::lit(1e-12);
    for (i, row) in matrix.iter().enumerate() {
        if (row[i] - T::one()).abs() > tol {
            return Err(Error::InvalidModel(format!("correlation diagonal entry {i} is not 1")));
        }
        for (j, &value) in row.iter().enumerate().take(i) {
            if !value.is_finite() || (value - matrix[j][i]).abs() > tol {
                return Err(Error::InvalidModel(format!(
                    "correlation matrix is not symmetric at ({i}, {j})"
                )));
            }
        }
    }
    let cholesky = cholesky(&matrix)?;
    Ok(Correlation {
        matrix,
        cholesky,
        members,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn kappa(k: f64) -> ResponseFunction<f64> {
        ResponseFunction::LogNormal { kappa: k }
    }

    #[test]
    fn signal_yield_examples() {
        let m = CountingModel::simple(2.0, 1.0, 0).unwrap();
        assert_eq!(m.signal_yield(&[]).unwrap(), 2.0);

        let m = CountingModel::builder(1.0, 0)
            .nuisance("eff", ConstraintPrior::StandardNormal)
            .signal_response("eff", kappa(1.2))
            .background("bkg", 1.0)
            .build()
            .unwrap();
        assert_relative_eq!(m.signal_yield(&[1.0]).unwrap(), 1.2, max_relative = 1e-15);
        assert_relative_eq!(m.signal_yield(&[-2.0]).unwrap(), 1.0 / 1.44, max_relative = 1e-15);
        assert_eq!(m.signal_yield(&[0.0]).unwrap(), 1.0);
    }

    #[test]
    fn background_yield_examples() {
        let m = CountingModel::builder(1.0, 0)
            .background("a", 1.0)
            .background("b", 0.5)
            .build()
            .unwrap();
        assert_eq!(m.background_yield(&[]).unwrap(), 1.5);

        let m = CountingModel::builder(1.0, 0)
            .nuisance("x", ConstraintPrior::StandardNormal)
            .background_with("bkg", 1.5, [("x", ResponseFunction::Linear { delta: 0.2 })])
            .build()
            .unwrap();
        assert_relative_eq!(m.background_yield(&[1.0]).unwrap(), 1.8, max_relative = 1e-15);
        assert_eq!(m.background_yield(&[-5.0]).unwrap(), 0.0);
        match m.background_yield(&[-6.0]) {
            Err(Error::YieldNegative {
                process, nuisance, eta, ..
            }) => {
                assert_eq!(process, "bkg");
                assert_eq!(nuisance, "x");
                assert_eq!(eta, -6.0);
            }
            other => panic!("expected yield-negativity error, got {other:?}"),
        }
    }

    #[test]
    fn eta_dimension_is_checked() {
        let m = CountingModel::simple(1.0, 1.0, 0).unwrap();
        assert!(m.signal_yield(&[0.0]).is_err());
    }

    #[test]
    fn full_likelihood_examples() {
        let m = CountingModel::simple(1.0, 2.5, 0).unwrap();
        assert_relative_eq!(m.log_full_likelihood(0.0, &[], 0).unwrap(), -2.5, max_relative = 1e-15);

        let m = CountingModel::builder(1.0, 0)
            .nuisance("x", ConstraintPrior::StandardNormal)
            .background("bkg", 2.5)
            .build()
            .unwrap();
        let expected = -2.5 - 0.5 * std::f64::consts::TAU.ln();
        assert_relative_eq!(
            m.log_full_likelihood(0.0, &[0.0], 0).unwrap(),
            expected,
            max_relative = 1e-15
        );

        let m = CountingModel::simple(1.0, 1.5, 3).unwrap();
        assert_eq!(
            m.log_full_likelihood(1.0, &[], 3).unwrap(),
            log_poisson_pmf(3, 2.5).unwrap().value()
        );
        assert!(m.log_full_likelihood(-1.0, &[], 3).is_err());
    }

    #[test]
    fn correlated_prior_density_matches_bivariate_normal() {
        let rho: f64 = 0.3;
        let m = CountingModel::builder(1.0, 0)
            .nuisance("a", ConstraintPrior::StandardNormal)
            .nuisance("b", ConstraintPrior::Normal { mean: 1.0, sd: 2.0 })
            .background("bkg", 1.0)
            .correlation(vec![vec![1.0, rho], vec![rho, 1.0]])
            .build()
            .unwrap();
        let (x, y) = (0.4, -0.7);
        let zy = (y - 1.0) / 2.0;
        let q = (x * x - 2.0 * rho * x * zy + zy * zy) / (1.0 - rho * rho);
        let expected = -0.5 * q - (std::f64::consts::TAU * (1.0 - rho * rho).sqrt() * 2.0).ln();
        assert_relative_eq!(
            m.systematics().log_prior_density(&[x, y]),
            expected,
            max_relative = 1e-13
        );
    }

    #[test]
    fn model_validation() {
        assert!(CountingModel::<f64>::simple(0.0, 0.0, 1).is_err());
        assert!(CountingModel::<f64>::simple(-1.0, 1.0, 1).is_err());
        assert!(CountingModel::builder(1.0, 0)
            .background("a", 1.0)
            .background("a", 1.0)
            .build()
            .is_err());
        assert!(CountingModel::builder(1.0, 0)
            .background_with("a", 1.0, [("missing", kappa(1.1))])
            .build()
            .is_err());
        assert!(CountingModel::builder(1.0, 0)
            .nuisance("x", ConstraintPrior::Normal { mean: 0.0, sd: 0.0 })
            .build()
            .is_err());
        assert!(CountingModel::builder(1.0, 0)
            .nuisance("x", ConstraintPrior::StandardNormal)
            .signal_response("x", kappa(-1.0))
            .build()
            .is_err());
        // not positive definite
        assert!(CountingModel::builder(1.0, 0)
            .nuisance("x", ConstraintPrior::StandardNormal)
            .nuisance("y", ConstraintPrior::StandardNormal)
            .correlation(vec![vec![1.0, 1.0], vec![1.0, 1.0]])
            .build()
            .is_err());
        // wrong dimension: log-normal priors are not part of the matrix
        assert!(CountingModel::builder(1.0, 0)
            .nuisance("x", ConstraintPrior::StandardNormal)
            .nuisance("y", ConstraintPrior::LogNormal { mu: 0.0, sigma: 0.1 })
            .correlation(vec![vec![1.0, 0.5], vec![0.5, 1.0]])
            .build()
            .is_err());
    }
}
