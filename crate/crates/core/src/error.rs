use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Which limit-setting method an error came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodTag {
    Cls,
    Bayes,
}

impl std::fmt::Display for MethodTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MethodTag::Cls => f.write_str("hybrid CLs"),
            MethodTag::Bayes => f.write_str("marginal Bayesian"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {what} = {value}")]
    Domain { what: &'static str, value: f64 },

    #[error("{routine} did not converge after {iterations} iterations")]
    NoConvergence { routine: &'static str, iterations: usize },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid limit request: {0}")]
    InvalidRequest(String),

    #[error(
        "negative yield for {process}: response to nuisance `{nuisance}` at eta = {eta}{}",
        sample.map(|k| format!(" (sample {k})")).unwrap_or_default()
    )]
    YieldNegative {
        process: String,
        nuisance: String,
        eta: f64,
        sample: Option<usize>,
    },

    #[error("degenerate model: {0}")]
    Degenerate(String),

    #[error("degenerate nuisance sample {index}: signal yield is zero")]
    DegenerateSample { index: usize },

    #[error("no sign change found while bracketing the root (last upper edge {hi})")]
    BracketNotFound { hi: f64 },

    #[error("root solver stopped after {iterations} iterations with bracket [{lo}, {hi}]")]
    SolverFailed { iterations: usize, lo: f64, hi: f64 },

    #[error("unsupported integrator: {0}")]
    UnsupportedIntegrator(String),

    #[error("{method} limit failed: {source}")]
    Method {
        method: MethodTag,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn domain(what: &'static str, value: f64) -> Self {
        Error::Domain { what, value }
    }

    pub(crate) fn in_method(self, method: MethodTag) -> Self {
        Error::Method {
            method,
            source: Box::new(self),
        }
    }

    /// True for failures of the numerical solve rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::NoConvergence { .. }
            | Error::YieldNegative { .. }
            | Error::Degenerate(_)
            | Error::DegenerateSample { .. }
            | Error::BracketNotFound { .. }
            | Error::SolverFailed { .. } => true,
            Error::Method { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}
