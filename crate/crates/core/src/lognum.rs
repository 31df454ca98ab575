//! Nonnegative reals stored by their natural logarithm.
//!
//! Expected hitting times of the chains studied here grow like `e^{cN}`, far
//! past `f64::MAX` for a few thousand nodes, so every product and sum in the
//! birth-death code goes through this type.

use std::cmp::Ordering;
use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign};

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct LogNumber {
    ln: f64,
}

impl LogNumber {
    pub const ZERO: LogNumber = LogNumber { ln: f64::NEG_INFINITY };
    pub const ONE: LogNumber = LogNumber { ln: 0.0 };

    /// Panics if `value` is negative or NaN.
    pub fn new(value: f64) -> Self {
        assert!(value >= 0.0, "LogNumber requires a nonnegative value, got {value}");
        LogNumber { ln: value.ln() }
    }

    pub fn from_ln(ln: f64) -> Self {
        assert!(!ln.is_nan(), "LogNumber log-value is NaN");
        LogNumber { ln }
    }

    pub fn ln(self) -> f64 {
        self.ln
    }

    /// Plain value; overflows to `inf` when the magnitude exceeds `f64`.
    pub fn value(self) -> f64 {
        self.ln.exp()
    }

    pub fn is_zero(self) -> bool {
        self.ln == f64::NEG_INFINITY
    }

    pub fn powi(self, n: i32) -> Self {
        if self.is_zero() {
            return if n == 0 { Self::ONE } else { Self::ZERO };
        }
        LogNumber { ln: self.ln * n as f64 }
    }

    pub fn max(self, other: Self) -> Self {
        if other.ln > self.ln {
            other
        } else {
            self
        }
    }
}

/// `ln(e^a + e^b)` without overflow.
pub fn ln_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// `ln Σ e^{x_i}`; `-inf` for an empty slice.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max.is_infinite() {
        return max;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

impl Add for LogNumber {
    type Output = LogNumber;
    fn add(self, rhs: Self) -> Self {
        LogNumber { ln: ln_add_exp(self.ln, rhs.ln) }
    }
}

impl AddAssign for LogNumber {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl Mul for LogNumber {
    type Output = LogNumber;
    fn mul(self, rhs: Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::ZERO;
        }
        LogNumber { ln: self.ln + rhs.ln }
    }
}

impl MulAssign for LogNumber {
    fn mul_assign(&mut self, rhs: Self) {
        *self = *self * rhs;
    }
}

impl Div for LogNumber {
    type Output = LogNumber;
    fn div(self, rhs: Self) -> Self {
        assert!(!rhs.is_zero(), "LogNumber division by zero");
        if self.is_zero() {
            return Self::ZERO;
        }
        LogNumber { ln: self.ln - rhs.ln }
    }
}

impl Sum for LogNumber {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        let lns: Vec<f64> = iter.map(|x| x.ln).collect();
        LogNumber { ln: log_sum_exp(&lns) }
    }
}

impl Product for LogNumber {
    fn product<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::ONE, |acc, x| acc * x)
    }
}

impl PartialOrd for LogNumber {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.ln.partial_cmp(&other.ln)
    }
}

impl fmt::Display for LogNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ln.abs() < 700.0 {
            write!(f, "{}", self.value())
        } else {
            write!(f, "exp({})", self.ln)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn zero_and_one() {
        assert_eq!((LogNumber::ZERO + LogNumber::ONE).ln(), 0.0);
        assert!((LogNumber::ZERO * LogNumber::new(5.0)).is_zero());
        assert_eq!(LogNumber::new(0.0), LogNumber::ZERO);
        assert!(LogNumber::ZERO < LogNumber::new(1e-300));
    }

    #[test]
    fn huge_sums_stay_finite() {
        let a = LogNumber::from_ln(2000.0);
        let s = a + a;
        assert!((s.ln() - (2000.0 + 2f64.ln())).abs() < 1e-12);
        assert_eq!(s.value(), f64::INFINITY);
        assert_eq!(log_sum_exp(&[]), f64::NEG_INFINITY);
    }

    proptest! {
        #[test]
        fn arithmetic_matches_reals(a in 1e-6f64..1e6, b in 1e-6f64..1e6) {
            let (x, y) = (LogNumber::new(a), LogNumber::new(b));
            prop_assert!(((x + y).value() - (a + b)).abs() <= 1e-12 * (a + b));
            prop_assert!(((x * y).value() - a * b).abs() <= 1e-12 * a * b);
            prop_assert!(((x / y).value() - a / b).abs() <= 1e-12 * a / b);
            prop_assert_eq!(x < y, a < b);
        }
    }
}
