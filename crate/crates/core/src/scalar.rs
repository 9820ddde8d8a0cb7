//! Numeric type used by scores and merge weights.
//!
//! Scores can be computed in floating point for reporting or in exact
//! rational arithmetic when a result has to be compared without tolerance.

use std::fmt::Debug;

use num_rational::Ratio;
use num_traits::{Num, ToPrimitive};

pub trait Scalar: Num + Copy + PartialOrd + Debug + ToPrimitive + Send + Sync {
    fn from_count(n: u64) -> Self;

    /// Parses a plain decimal literal such as `0.36` or `2`.
    fn parse_decimal(s: &str) -> Option<Self>;

    fn ratio(num: u64, den: u64) -> Self {
        Self::from_count(num) / Self::from_count(den)
    }

    fn as_f64(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    fn from_count(n: u64) -> Self {
        n as f64
    }

    fn parse_decimal(s: &str) -> Option<Self> {
        s.trim().parse().ok()
    }
}

impl Scalar for f32 {
    fn from_count(n: u64) -> Self {
        n as f32
    }

    fn parse_decimal(s: &str) -> Option<Self> {
        s.trim().parse().ok()
    }
}

impl Scalar for Ratio<i64> {
    fn from_count(n: u64) -> Self {
        Ratio::from_integer(n as i64)
    }

    fn parse_decimal(s: &str) -> Option<Self> {
        let s = s.trim();
        let (negative, digits) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
        if int_part.is_empty() && frac_part.is_empty() {
            return None;
        }
        if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
            return None;
        }
        let den = 10i64.checked_pow(u32::try_from(frac_part.len()).ok()?)?;
        let int: i64 = if int_part.is_empty() { 0 } else { int_part.parse().ok()? };
        let frac: i64 = if frac_part.is_empty() { 0 } else { frac_part.parse().ok()? };
        let num = int.checked_mul(den)?.checked_add(frac)?;
        let value = Ratio::new(num, den);
        Some(if negative { -value } else { value })
    }
}
