//! Poisson probabilities and the regularized incomplete gamma function.
//!
//! [`poisson_cdf`] and [`gamma_q`] are computed by unrelated algorithms even
//! though `poisson_cdf(n, x) == gamma_q(n + 1, x)` holds exactly; the test
//! suite uses that identity as a cross-check between them.

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::summation::CompensatedSum;

/// Iteration cap for the gamma series and continued fraction.
pub const GAMMA_MAX_ITER: usize = 500;

/// Natural-log probability. `-inf` encodes probability zero.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct LogProb<T>(T);

impl<T: Real> LogProb<T> {
    /// Wraps a log-probability, rejecting positive values and NaN.
    pub fn new(value: T) -> Result<Self> {
        if value.is_nan() || value > T::zero() {
            return Err(Error::domain("log-probability", value.to_f64_lossy()));
        }
        Ok(Self(value))
    }

    pub fn zero_prob() -> Self {
        Self(T::neg_infinity())
    }

    pub fn certain() -> Self {
        Self(T::zero())
    }

    #[inline]
    pub fn value(self) -> T {
        self.0
    }

    #[inline]
    pub fn prob(self) -> T {
        self.0.exp()
    }
}

// Lanczos approximation, g = 607/128, 15 terms (Godfrey).
const LANCZOS_G: f64 = 607.0 / 128.0;
const LANCZOS_COEFFS: [f64; 15] = [
    0.999_999_999_999_997_1,
    57.156_235_665_862_92,
    -59.597_960_355_475_49,
    14.136_097_974_741_747,
    -0.491_913_816_097_620_2,
    3.399_464_998_481_189e-5,
    4.652_362_892_704_858e-5,
    -9.837_447_530_487_956e-5,
    1.580_887_032_249_125e-4,
    -2.102_644_417_241_049e-4,
    2.174_396_181_152_126_4e-4,
    -1.643_181_065_367_639e-4,
    8.441_822_398_385_275e-5,
    -2.619_083_840_158_141e-5,
    3.689_918_265_953_162e-6,
];

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma<T: Real>(x: T) -> Result<T> {
    if x.is_nan() || x <= T::zero() || x.is_infinite() {
        return Err(Error::domain("ln_gamma argument", x.to_f64_lossy()));
    }
    Ok(ln_gamma_unchecked(x))
}

fn ln_gamma_unchecked<T: Real>(x: T) -> T {
    let half = T::lit(0.5);
    if x < half {
        // Shift up once; the Lanczos sum loses accuracy below 1/2.
        return ln_gamma_unchecked(x + T::one()) - x.ln();
    }
    let z = x - T::one();
    let mut acc = T::lit(LANCZOS_COEFFS[0]);
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc = acc + T::lit(c) / (z + T::from_usize(i).unwrap());
    }
    let t = z + T::lit(LANCZOS_G) + half;
    half * (T::TAU()).ln() + (z + half) * t.ln() - t + acc.ln()
}

fn check_mean<T: Real>(nu: T) -> Result<()> {
    if nu.is_nan() || nu < T::zero() || nu.is_infinite() {
        return Err(Error::domain("Poisson mean", nu.to_f64_lossy()));
    }
    Ok(())
}

/// `ln P(N = n; nu)` for a Poisson distribution with mean `nu`.
pub fn log_poisson_pmf<T: Real>(n: u64, nu: T) -> Result<LogProb<T>> {
    check_mean(nu)?;
    Ok(log_poisson_pmf_unchecked(n, nu))
}

pub(crate) fn log_poisson_pmf_unchecked<T: Real>(n: u64, nu: T) -> LogProb<T> {
    if nu == T::zero() {
        return if n == 0 {
            LogProb::certain()
        } else {
            LogProb::zero_prob()
        };
    }
    let nf = T::from_count(n);
    let value = nf * nu.ln() - nu - ln_gamma_unchecked(nf + T::one());
    // Rounding can push ln P(0; tiny nu) a hair above zero.
    LogProb(value.min(T::zero()))
}

/// `P(N = n; nu)`.
pub fn poisson_pmf<T: Real>(n: u64, nu: T) -> Result<T> {
    log_poisson_pmf(n, nu).map(LogProb::prob)
}

/// `P(N <= n_obs; nu)`, summed term by term.
///
/// The sum is anchored at the largest term `k = min(n_obs, floor(nu))`,
/// whose value comes from the log-space pmf. The other terms are reached by
/// the ratio recursion `P(k-1)/P(k) = k/nu` (downwards) and
/// `P(k+1)/P(k) = nu/(k+1)` (upwards) and accumulated with compensated
/// summation. Nothing overflows and only the anchor can underflow.
pub fn poisson_cdf<T: Real>(n_obs: u64, nu: T) -> Result<T> {
    check_mean(nu)?;
    Ok(poisson_cdf_unchecked(n_obs, nu))
}

pub(crate) fn poisson_cdf_unchecked<T: Real>(n_obs: u64, nu: T) -> T {
    if nu == T::zero() {
        return T::one();
    }
    let floor_nu = nu.floor().to_u64().unwrap_or(u64::MAX);
    let anchor = n_obs.min(floor_nu);
    let anchor_prob = log_poisson_pmf_unchecked(anchor, nu).prob();
    if anchor_prob == T::zero() {
        return T::zero();
    }

    let negligible = T::epsilon() * T::lit(1e-3);
    let mut sum = CompensatedSum::new();
    sum.add(T::one());

    let mut term = T::one();
    for k in (1..=anchor).rev() {
        term = term * T::from_count(k) / nu;
        sum.add(term);
        if term < negligible * sum.value() {
            break;
        }
    }

    let mut term = T::one();
    for k in anchor + 1..=n_obs {
        term = term * nu / T::from_count(k);
        sum.add(term);
        if term < negligible * sum.value() {
            break;
        }
    }

    (anchor_prob * sum.value()).min(T::one())
}

fn series_tolerance<T: Real>() -> T {
    T::epsilon().max(T::lit(1e-15))
}

/// Regularized upper incomplete gamma function `Q(a, x) = Γ(a, x) / Γ(a)`.
///
/// Uses the power series for the lower function when `x < a + 1` and a
/// modified-Lentz continued fraction for the upper function otherwise.
pub fn gamma_q<T: Real>(a: T, x: T) -> Result<T> {
    if a.is_nan() || a <= T::zero() || a.is_infinite() {
        return Err(Error::domain("gamma_q shape a", a.to_f64_lossy()));
    }
    if x.is_nan() || x < T::zero() {
        return Err(Error::domain("gamma_q argument x", x.to_f64_lossy()));
    }
    if x == T::zero() {
        return Ok(T::one());
    }
    if x.is_infinite() {
        return Ok(T::zero());
    }
    if x < a + T::one() {
        Ok((T::one() - lower_series(a, x)?).max(T::zero()))
    } else {
        upper_continued_fraction(a, x)
    }
}

/// Regularized lower incomplete gamma function `P(a, x) = 1 - Q(a, x)`.
pub fn gamma_p<T: Real>(a: T, x: T) -> Result<T> {
    if a.is_nan() || a <= T::zero() || a.is_infinite() {
        return Err(Error::domain("gamma_p shape a", a.to_f64_lossy()));
    }
    if x.is_nan() || x < T::zero() {
        return Err(Error::domain("gamma_p argument x", x.to_f64_lossy()));
    }
    if x == T::zero() {
        return Ok(T::zero());
    }
    if x < a + T::one() {
        lower_series(a, x)
    } else {
        Ok((T::one() - upper_continued_fraction(a, x)?).max(T::zero()))
    }
}

/// `x^a e^{-x} / Γ(a)` evaluated in log space.
fn gamma_prefactor<T: Real>(a: T, x: T) -> T {
    (a * x.ln() - x - ln_gamma_unchecked(a)).exp()
}

fn lower_series<T: Real>(a: T, x: T) -> Result<T> {
    let tol = series_tolerance::<T>();
    let mut denom = a;
    let mut term = T::one() / a;
    let mut sum = term;
    for _ in 0..GAMMA_MAX_ITER {
        denom = denom + T::one();
        term = term * x / denom;
        sum = sum + term;
        if term.abs() < sum.abs() * tol {
            return Ok((sum * gamma_prefactor(a, x)).min(T::one()));
        }
    }
    Err(Error::NoConvergence {
        routine: "incomplete gamma series",
        iterations: GAMMA_MAX_ITER,
    })
}

fn upper_continued_fraction<T: Real>(a: T, x: T) -> Result<T> {
    let tol = series_tolerance::<T>();
    let tiny = T::min_positive_value() / T::epsilon();
    let two = T::lit(2.0);

    let mut b = x + T::one() - a;
    let mut c = T::one() / tiny;
    let mut d = T::one() / b;
    let mut h = d;
    for i in 1..=GAMMA_MAX_ITER {
        let fi = T::from_usize(i).unwrap();
        let an = -fi * (fi - a);
        b = b + two;
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = T::one() / d;
        let delta = d * c;
        h = h * delta;
        if (delta - T::one()).abs() < tol {
            return Ok((gamma_prefactor(a, x) * h).min(T::one()));
        }
    }
    Err(Error::NoConvergence {
        routine: "incomplete gamma continued fraction",
        iterations: GAMMA_MAX_ITER,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn pmf_examples() {
        assert_eq!(log_poisson_pmf(0, 0.0).unwrap().value(), 0.0);
        assert_eq!(log_poisson_pmf(3, 0.0).unwrap().value(), f64::NEG_INFINITY);
        assert_relative_eq!(log_poisson_pmf(0, 2.5).unwrap().value(), -2.5, epsilon = 1e-15);
        // ln(0.5625) - 1.5
        assert_relative_eq!(
            log_poisson_pmf(3, 1.5).unwrap().value(),
            -2.075_364_144_903_561_8,
            max_relative = 1e-14
        );
    }

    #[test]
    fn pmf_rejects_bad_means() {
        assert!(matches!(log_poisson_pmf(1, -0.1), Err(Error::Domain { .. })));
        assert!(log_poisson_pmf(1, f64::NAN).is_err());
        assert!(poisson_cdf(1, -1.0).is_err());
    }

    #[test]
    fn pmf_large_arguments_stay_finite() {
        let lp = log_poisson_pmf(10_000, 10_000.0_f64).unwrap().value();
        assert!(lp.is_finite());
        // Stirling: ln P(n; n) ~ -0.5 ln(2 pi n)
        assert_relative_eq!(lp, -0.5 * (std::f64::consts::TAU * 1e4).ln(), max_relative = 1e-4);
    }

    #[test]
    fn cdf_examples() {
        assert_eq!(poisson_cdf(5, 0.0).unwrap(), 1.0);
        assert_relative_eq!(poisson_cdf(0, 2.0).unwrap(), (-2.0f64).exp(), max_relative = 1e-15);
        assert_relative_eq!(
            poisson_cdf(3, 1.5).unwrap(),
            0.934_357_545_621_549_9,
            max_relative = 1e-14
        );
    }

    #[test]
    fn gamma_q_examples() {
        assert_relative_eq!(gamma_q(1.0, 0.7).unwrap(), (-0.7f64).exp(), max_relative = 1e-14);
        assert_relative_eq!(gamma_q(1.0, std::f64::consts::LN_2).unwrap(), 0.5, max_relative = 1e-14);
        assert_eq!(gamma_q(4.0, 0.0).unwrap(), 1.0);
        assert_relative_eq!(
            gamma_q(4.0, 1.5).unwrap(),
            0.934_357_545_621_549_9,
            max_relative = 1e-14
        );
        assert!(matches!(gamma_q(0.0, 1.0), Err(Error::Domain { .. })));
        assert!(gamma_q(-1.0, 1.0).is_err());
        assert!(gamma_q(1.0, -1.0).is_err());
    }

    #[test]
    fn gamma_p_complements_q() {
        for &(a, x) in &[(0.5, 0.2), (3.0, 2.0), (10.0, 30.0), (50.0, 49.0)] {
            let p: f64 = gamma_p(a, x).unwrap();
            let q: f64 = gamma_q(a, x).unwrap();
            assert!((p + q - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn ln_gamma_matches_log_factorials() {
        let mut ln_fact = 0.0_f64;
        for n in 1..=170u32 {
            ln_fact += f64::from(n).ln();
            let got = ln_gamma(f64::from(n) + 1.0).unwrap();
            assert!((got - ln_fact).abs() <= 1e-13 * ln_fact.max(1.0), "n = {n}");
        }
        assert_relative_eq!(
            ln_gamma(0.5).unwrap(),
            0.5 * std::f64::consts::PI.ln(),
            max_relative = 1e-14
        );
        assert!(ln_gamma(0.0).is_err());
    }

    #[test]
    fn single_precision_is_usable() {
        let q: f32 = gamma_q(4.0, 1.5).unwrap();
        let c: f32 = poisson_cdf(3, 1.5).unwrap();
        assert!((q - c).abs() < 1e-5);
    }
}
