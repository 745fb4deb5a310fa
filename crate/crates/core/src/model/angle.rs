use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

fn gcd(mut a: i64, mut b: i64) -> i64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.abs()
}

/// An exact angle `(num / den) * pi`, reduced to lowest terms and to `[0, 2pi)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Angle {
    num: i64,
    den: i64,
}

impl Angle {
    pub fn new(num: i64, den: i64) -> Result<Self> {
        if den <= 0 {
            return Err(Error::Argument(format!("angle denominator must be positive, got {den}")));
        }
        let period = den
            .checked_mul(2)
            .ok_or_else(|| Error::Argument(format!("angle denominator {den} too large")))?;
        let num = num.rem_euclid(period);
        let g = gcd(num, den).max(1);
        Ok(Self { num: num / g, den: den / g })
    }

    /// `k * pi / 8`.
    pub fn pi_over_8(k: i64) -> Self {
        Self::new(k, 8).expect("denominator 8 is valid")
    }

    pub fn zero() -> Self {
        Self { num: 0, den: 1 }
    }

    pub fn num(&self) -> i64 {
        self.num
    }

    pub fn den(&self) -> i64 {
        self.den
    }

    pub fn radians(&self) -> f64 {
        self.num as f64 / self.den as f64 * PI
    }

    /// `Some(k)` with `k` in `0..16` when the angle is exactly `k * pi / 8`.
    pub fn pi_over_8_multiple(&self) -> Option<i64> {
        (8 % self.den == 0).then(|| self.num * (8 / self.den))
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Angle {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (n, d) = s
            .split_once('/')
            .ok_or_else(|| Error::Argument(format!("angle {s:?} is not of the form num/den")))?;
        let num = n.trim().parse::<i64>().map_err(|e| Error::Argument(format!("angle numerator {n:?}: {e}")))?;
        let den = d.trim().parse::<i64>().map_err(|e| Error::Argument(format!("angle denominator {d:?}: {e}")))?;
        Angle::new(num, den)
    }
}
