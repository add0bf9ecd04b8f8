//! One-dimensional quadrature: adaptive Gauss–Kronrod for smooth integrands
//! on finite or half-infinite ranges, and Gauss–Hermite rules for
//! expectations under a standard normal.

use crate::error::{Error, Result};
use crate::scalar::Real;

// 15-point Kronrod abscissae (non-negative half) and weights.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
// Embedded 7-point Gauss weights, at XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_DEPTH: u32 = 48;

/// Integral estimate with an absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    pub error: T,
}

fn kronrod15<T: Real, F: FnMut(T) -> T>(f: &mut F, a: T, b: T) -> Estimate<T> {
    let half = T::lit(0.5);
    let center = half * (a + b);
    let radius = half * (b - a);

    let fc = f(center);
    let mut kronrod = fc * T::lit(WGK[7]);
    let mut gauss = fc * T::lit(WG[3]);
    for i in 0..7 {
        let dx = radius * T::lit(XGK[i]);
        let pair = f(center - dx) + f(center + dx);
        kronrod = kronrod + pair * T::lit(WGK[i]);
        if i % 2 == 1 {
            gauss = gauss + pair * T::lit(WG[i / 2]);
        }
    }
    Estimate {
        value: kronrod * radius,
        error: ((kronrod - gauss) * radius).abs(),
    }
}

/// Adaptive Gauss–Kronrod (7/15) integration of `f` over `[a, b]`.
///
/// Intervals are bisected until each piece meets its share of
/// `max(abs_tol, rel_tol * |I|)`.
pub fn integrate<T, F>(mut f: F, a: T, b: T, abs_tol: T, rel_tol: T) -> Result<Estimate<T>>
where
    T: Real,
    F: FnMut(T) -> T,
{
    if a == b {
        return Ok(Estimate {
            value: T::zero(),
            error: T::zero(),
        });
    }
    let whole = kronrod15(&mut f, a, b);
    let tol = abs_tol.max(rel_tol * whole.value.abs());
    let est = refine(&mut f, a, b, whole, tol, 0)?;
    if est.value.is_finite() {
        Ok(est)
    } else {
        Err(Error::NoConvergence {
            routine: "adaptive quadrature",
            iterations: 0,
        })
    }
}

fn refine<T, F>(f: &mut F, a: T, b: T, whole: Estimate<T>, tol: T, depth: u32) -> Result<Estimate<T>>
where
    T: Real,
    F: FnMut(T) -> T,
{
    if whole.error <= tol {
        return Ok(whole);
    }
    if depth >= MAX_DEPTH {
        return Err(Error::NoConvergence {
            routine: "adaptive quadrature",
            iterations: depth as usize,
        });
    }
    let mid = T::lit(0.5) * (a + b);
    let left = kronrod15(f, a, mid);
    let right = kronrod15(f, mid, b);
    let half_tol = T::lit(0.5) * tol;
    let l = refine(f, a, mid, left, half_tol, depth + 1)?;
    let r = refine(f, mid, b, right, half_tol, depth + 1)?;
    Ok(Estimate {
        value: l.value + r.value,
        error: l.error + r.error,
    })
}

/// Integrates `f` over `[a, inf)` through the substitution `x = a + t / (1 - t)`.
pub fn integrate_to_infinity<T, F>(mut f: F, a: T, abs_tol: T, rel_tol: T) -> Result<Estimate<T>>
where
    T: Real,
    F: FnMut(T) -> T,
{
    integrate(
        |t: T| {
            let one_minus = T::one() - t;
            let x = a + t / one_minus;
            let v = f(x) / (one_minus * one_minus);
            if v.is_finite() {
                v
            } else {
                T::zero()
            }
        },
        T::zero(),
        T::one(),
        abs_tol,
        rel_tol,
    )
}

/// Smallest and largest supported Gauss–Hermite orders.
pub const HERMITE_MIN_NODES: usize = 2;
pub const HERMITE_MAX_NODES: usize = 64;

/// Gauss–Hermite rule for `E[f(Z)]`, `Z ~ N(0, 1)`.
///
/// Returns `(node, weight)` pairs in ascending node order with weights summing
/// to one. Nodes are the roots of the Hermite polynomial found by Newton
/// iteration on the orthonormal three-term recurrence, then rescaled from the
/// `exp(-x^2)` weight to the standard normal density.
pub fn gauss_hermite_normal<T: Real>(nodes: usize) -> Result<Vec<(T, T)>> {
    if !(HERMITE_MIN_NODES..=HERMITE_MAX_NODES).contains(&nodes) {
        return Err(Error::UnsupportedIntegrator(format!(
            "Gauss-Hermite order {nodes} outside [{HERMITE_MIN_NODES}, {HERMITE_MAX_NODES}]"
        )));
    }
    let n = nodes;
    let nf = T::from_usize(n).unwrap();
    let two = T::lit(2.0);
    let pi_m4 = T::PI().powf(T::lit(-0.25));
    let newton_tol = (T::epsilon() * T::lit(4.0)).max(T::lit(1e-15));

    let mut x = vec![T::zero(); n];
    let mut w = vec![T::zero(); n];
    let mut z = T::zero();
    for i in 0..n.div_ceil(2) {
        z = match i {
            0 => {
                let m = two * nf + T::one();
                m.sqrt() - T::lit(1.855_75) * m.powf(T::lit(-0.166_67))
            }
            1 => z - T::lit(1.14) * nf.powf(T::lit(0.426)) / z,
            2 => T::lit(1.86) * z - T::lit(0.86) * x[0],
            3 => T::lit(1.91) * z - T::lit(0.91) * x[1],
            _ => two * z - x[i - 2],
        };
        let mut derivative = T::one();
        let mut converged = false;
        for _ in 0..100 {
            let mut p1 = pi_m4;
            let mut p2 = T::zero();
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let jf = T::from_usize(j).unwrap();
                p1 = z * (two / (jf + T::one())).sqrt() * p2 - (jf / (jf + T::one())).sqrt() * p3;
            }
            derivative = (two * nf).sqrt() * p2;
            let step = p1 / derivative;
            z = z - step;
            if step.abs() <= newton_tol * z.abs().max(T::one()) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NoConvergence {
                routine: "Gauss-Hermite node search",
                iterations: 100,
            });
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = two / (derivative * derivative);
        w[n - 1 - i] = w[i];
    }

    let scale = T::SQRT_2();
    let norm = T::PI().sqrt();
    let mut rule: Vec<(T, T)> = x.into_iter().zip(w).map(|(xi, wi)| (xi * scale, wi / norm)).collect();
    rule.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite nodes"));
    Ok(rule)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronrod_integrates_polynomials_and_exponentials() {
        let est = integrate(|x: f64| x.powi(5) - 3.0 * x, 0.0, 2.0, 1e-14, 1e-14).unwrap();
        assert!((est.value - (64.0 / 6.0 - 6.0)).abs() < 1e-13);
        let est = integrate(|x: f64| (-x).exp(), 0.0, 30.0, 1e-15, 1e-14).unwrap();
        assert!((est.value - (1.0 - (-30f64).exp())).abs() < 1e-13);
    }

    #[test]
    fn half_infinite_range() {
        let est = integrate_to_infinity(|x: f64| x * x * (-x).exp(), 0.0, 1e-14, 1e-13).unwrap();
        assert!((est.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn hermite_two_node_rule_is_plus_minus_one() {
        let rule = gauss_hermite_normal::<f64>(2).unwrap();
        assert!((rule[0].0 + 1.0).abs() < 1e-15 && (rule[1].0 - 1.0).abs() < 1e-15);
        assert!((rule[0].1 - 0.5).abs() < 1e-15 && (rule[1].1 - 0.5).abs() < 1e-15);
    }

    #[test]
    fn hermite_order_bounds() {
        assert!(gauss_hermite_normal::<f64>(1).is_err());
        assert!(gauss_hermite_normal::<f64>(65).is_err());
        assert_eq!(gauss_hermite_normal::<f64>(64).unwrap().len(), 64);
    }
}
