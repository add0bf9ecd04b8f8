//! Upper limits on signal strength for single-channel Poisson counting
//! experiments.
//!
//! * [`exact`]: CLs and flat-prior Bayesian limits with known yields.
//! * [`marginal`]: hybrid CLs and marginal Bayesian limits, nuisance
//!   parameters integrated out by Monte Carlo or Gauss–Hermite quadrature.
//! * [`equivalence`]: runs both marginal methods on one sample set and
//!   classifies their agreement.
//!
//! All numerics are generic over [`Real`]; the `*64` aliases below fix the
//! scalar to `f64`, which is what the command-line tool uses.
//!
//! ```
//! use cls_limits::{exact, CountingModel64, LimitRequest64};
//!
//! let model = CountingModel64::simple(1.0, 1.5, 3).unwrap();
//! let req = LimitRequest64::from_cl(0.95).unwrap();
//! let cls = exact::cls_upper_limit(&model, &req).unwrap();
//! let bayes = exact::bayesian_upper_limit_closed_form(&model, &req).unwrap();
//! assert!((cls.mu_up - bayes.mu_up).abs() < 1e-7 * cls.mu_up);
//! ```

pub mod cli;
pub mod equivalence;
pub mod error;
pub mod exact;
pub mod marginal;
pub mod model;
pub mod quadrature;
pub mod root;
pub mod scalar;
pub mod special;
pub mod summation;

pub use equivalence::{compare_limits, EquivalenceReport, Verdict};
pub use error::{Error, MethodTag, Result};
pub use exact::{LimitRequest, LimitResult, MuPrior};
pub use marginal::{draw_samples, Integrator, NuisanceSample, SampleSet};
pub use model::{BackgroundProcess, ConstraintPrior, CountingModel, ResponseFunction, SystematicsModel};
pub use scalar::Real;
pub use special::LogProb;

pub type CountingModel64 = CountingModel<f64>;
pub type CountingModel32 = CountingModel<f32>;
pub type LimitRequest64 = LimitRequest<f64>;
pub type LimitResult64 = LimitResult<f64>;
pub type SampleSet64 = SampleSet<f64>;
pub type EquivalenceReport64 = EquivalenceReport<f64>;
