//! Order-fixed summation helpers.
//!
//! Every reduction over nuisance samples goes through [`pairwise_sum`], whose
//! reduction tree depends only on the slice length. Results are therefore
//! bit-identical no matter how the per-sample terms were produced.

use crate::scalar::Real;

const PAIRWISE_BLOCK: usize = 16;

/// Pairwise (cascade) summation with a fixed split at `len / 2`.
pub fn pairwise_sum<T: Real>(values: &[T]) -> T {
    if values.len() <= PAIRWISE_BLOCK {
        return values.iter().fold(T::zero(), |acc, &v| acc + v);
    }
    let (left, right) = values.split_at(values.len() / 2);
    pairwise_sum(left) + pairwise_sum(right)
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum<T> {
    sum: T,
    carry: T,
}

impl<T: Real> CompensatedSum<T> {
    pub fn new() -> Self {
        Self {
            sum: T::zero(),
            carry: T::zero(),
        }
    }

    #[inline]
    pub fn add(&mut self, v: T) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.carry = self.carry + ((self.sum - t) + v);
        } else {
            self.carry = self.carry + ((v - t) + self.sum);
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> T {
        self.sum + self.carry
    }
}
