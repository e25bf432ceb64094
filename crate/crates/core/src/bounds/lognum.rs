//! Nonnegative reals stored as base-10 logarithms.
//!
//! Alphabet sizes such as `256^307200` and sample-size bounds such as
//! `10^369904` do not fit in an `f64`; their logarithms do. Multiplication,
//! division, powers and comparisons are exact in log-space. Addition and
//! subtraction use `ln_1p`, which keeps the relative error near machine
//! precision.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul};

use crate::error::{param, Result};

const LN_10: f64 = std::f64::consts::LN_10;

/// A nonnegative real `10^log10`, or exactly zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogNumber {
    log10: f64,
    zero: bool,
}

impl LogNumber {
    pub const ZERO: LogNumber = LogNumber {
        log10: f64::NEG_INFINITY,
        zero: true,
    };
    pub const ONE: LogNumber = LogNumber {
        log10: 0.0,
        zero: false,
    };

    pub fn from_log10(log10: f64) -> Result<Self> {
        if !log10.is_finite() {
            return Err(param("log10", format!("{log10} is not finite")));
        }
        Ok(Self { log10, zero: false })
    }

    pub fn from_f64(x: f64) -> Result<Self> {
        if !(x >= 0.0) || !x.is_finite() {
            return Err(param("value", format!("{x} is not a finite nonnegative number")));
        }
        if x == 0.0 {
            Ok(Self::ZERO)
        } else {
            Ok(Self {
                log10: x.log10(),
                zero: false,
            })
        }
    }

    pub fn is_zero(&self) -> bool {
        self.zero
    }

    /// `log10` of the value, `-inf` for zero.
    pub fn log10(&self) -> f64 {
        if self.zero {
            f64::NEG_INFINITY
        } else {
            self.log10
        }
    }

    /// Natural logarithm of the value, `-inf` for zero.
    pub fn ln(&self) -> f64 {
        self.log10() * LN_10
    }

    /// The value as an `f64`; `inf` once it exceeds the float range.
    pub fn to_f64(&self) -> f64 {
        if self.zero {
            0.0
        } else {
            10f64.powf(self.log10)
        }
    }

    pub fn powf(self, exponent: f64) -> Self {
        if self.zero {
            return if exponent == 0.0 { Self::ONE } else { Self::ZERO };
        }
        Self {
            log10: self.log10 * exponent,
            zero: false,
        }
    }

    pub fn sqrt(self) -> Self {
        self.powf(0.5)
    }

    /// `self - other`, or `None` when the difference would be negative.
    pub fn checked_sub(self, other: Self) -> Option<Self> {
        match self.partial_cmp(&other)? {
            Ordering::Less => None,
            Ordering::Equal => Some(Self::ZERO),
            Ordering::Greater if other.zero => Some(self),
            Ordering::Greater => {
                let ratio = 10f64.powf(other.log10 - self.log10);
                Some(Self {
                    log10: self.log10 + (-ratio).ln_1p() / LN_10,
                    zero: false,
                })
            }
        }
    }

    /// `floor(log10)` clamped below at zero; values below one report zero.
    pub fn exponent(&self) -> u64 {
        if self.zero || self.log10 < 0.0 {
            0
        } else {
            self.log10.floor() as u64
        }
    }
}

impl Add for LogNumber {
    type Output = LogNumber;

    fn add(self, rhs: LogNumber) -> LogNumber {
        if self.zero {
            return rhs;
        }
        if rhs.zero {
            return self;
        }
        let (hi, lo) = if self.log10 >= rhs.log10 {
            (self.log10, rhs.log10)
        } else {
            (rhs.log10, self.log10)
        };
        LogNumber {
            log10: hi + (10f64.powf(lo - hi)).ln_1p() / LN_10,
            zero: false,
        }
    }
}

impl Mul for LogNumber {
    type Output = LogNumber;

    fn mul(self, rhs: LogNumber) -> LogNumber {
        if self.zero || rhs.zero {
            return LogNumber::ZERO;
        }
        LogNumber {
            log10: self.log10 + rhs.log10,
            zero: false,
        }
    }
}

impl Div for LogNumber {
    type Output = LogNumber;

    /// Panics on division by zero.
    fn div(self, rhs: LogNumber) -> LogNumber {
        assert!(!rhs.zero, "LogNumber division by zero");
        if self.zero {
            return LogNumber::ZERO;
        }
        LogNumber {
            log10: self.log10 - rhs.log10,
            zero: false,
        }
    }
}

impl PartialOrd for LogNumber {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.log10().partial_cmp(&other.log10())
    }
}

impl fmt::Display for LogNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.zero {
            f.write_str("0")
        } else {
            write!(f, "10^{:.4}", self.log10)
        }
    }
}
