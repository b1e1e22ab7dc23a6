//! Compensated accumulators.
//!
//! The q-series in this crate alternate in sign with terms many orders of
//! magnitude above their sum, so every accumulation goes through one of these.

use std::iter::FromIterator;
use std::ops::AddAssign;

use twofloat::TwoFloat;

/// Kahan–Babuška–Neumaier summation.
#[derive(Debug, Default, Clone, Copy)]
pub struct NeumaierSum {
    sum: f64,
    compensation: f64,
    abs_sum: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
        self.abs_sum += value.abs();
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }

    /// Sum of the magnitudes of everything added so far.
    pub fn abs_sum(&self) -> f64 {
        self.abs_sum
    }
}

impl AddAssign<f64> for NeumaierSum {
    fn add_assign(&mut self, rhs: f64) {
        self.add(rhs);
    }
}

impl FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = NeumaierSum::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

/// Double-double accumulator built on error-free transformations.
#[derive(Debug, Clone, Copy)]
pub struct ExtendedSum {
    sum: TwoFloat,
    abs_sum: f64,
}

impl Default for ExtendedSum {
    fn default() -> Self {
        Self {
            sum: TwoFloat::from(0.0),
            abs_sum: 0.0,
        }
    }
}

impl ExtendedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: TwoFloat) {
        self.sum += value;
        self.abs_sum += value.hi().abs();
    }

    pub fn value(&self) -> TwoFloat {
        self.sum
    }

    pub fn abs_sum(&self) -> f64 {
        self.abs_sum
    }
}

pub fn neumaier_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    values.into_iter().collect::<NeumaierSum>().value()
}
