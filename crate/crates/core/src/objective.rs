//! The weighting parameter and the three objective values.
//!
//! `Z1` counts (route, modality) usages, `Z2` is total distance, and `Z3` is
//! their convex combination `(1 - lambda) * Z1 + lambda * Z2`, kept as an
//! exact rational.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LambdaError {
    #[error("lambda must lie in [0, 1], got {0}")]
    OutOfRange(String),
    #[error("cannot parse lambda `{0}` (expected a decimal or `n/d`)")]
    Unparsable(String),
}

/// Weight of distance in `Z3`, an exact rational in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Lambda {
    num: u64,
    den: u64,
}

impl Lambda {
    pub const ZERO: Lambda = Lambda { num: 0, den: 1 };
    pub const ONE: Lambda = Lambda { num: 1, den: 1 };

    pub fn new(num: u64, den: u64) -> Result<Self, LambdaError> {
        if den == 0 || num > den {
            return Err(LambdaError::OutOfRange(format!("{num}/{den}")));
        }
        let r = Ratio::new(num, den);
        Ok(Lambda { num: *r.numer(), den: *r.denom() })
    }

    pub fn numer(&self) -> u64 {
        self.num
    }

    pub fn denom(&self) -> u64 {
        self.den
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// `den * Z3`, the integer that orders solutions under this lambda.
    pub fn scaled(&self, z1: u64, z2: u64) -> u128 {
        u128::from(self.den - self.num) * u128::from(z1) + u128::from(self.num) * u128::from(z2)
    }

    pub fn z3(&self, z1: u64, z2: u64) -> Ratio<u128> {
        Ratio::new(self.scaled(z1, z2), u128::from(self.den))
    }

    /// Exact decimal rendering when the denominator has only factors 2 and 5
    /// and at most 15 fractional digits are needed.
    fn decimal(&self) -> Option<String> {
        if self.den == 1 {
            return Some(self.num.to_string());
        }
        let mut scale = 1u128;
        for digits in 1..=15u32 {
            scale *= 10;
            if scale.is_multiple_of(u128::from(self.den)) {
                let frac = u128::from(self.num) * (scale / u128::from(self.den));
                let text = format!("0.{:0width$}", frac, width = digits as usize);
                return Some(text.trim_end_matches('0').to_string());
            }
        }
        None
    }
}

impl Default for Lambda {
    fn default() -> Self {
        Lambda::ONE
    }
}

impl fmt::Display for Lambda {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.decimal() {
            Some(d) => f.write_str(&d),
            None => write!(f, "{}/{}", self.num, self.den),
        }
    }
}

impl FromStr for Lambda {
    type Err = LambdaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let text = s.trim();
        let bad = || LambdaError::Unparsable(s.to_string());
        if let Some((n, d)) = text.split_once('/') {
            let num: u64 = n.trim().parse().map_err(|_| bad())?;
            let den: u64 = d.trim().parse().map_err(|_| bad())?;
            return Lambda::new(num, den);
        }
        if text.starts_with('-') {
            return Err(LambdaError::OutOfRange(text.to_string()));
        }
        let (mantissa, exponent) = match text.find(['e', 'E']) {
            Some(pos) => (&text[..pos], text[pos + 1..].parse::<i32>().map_err(|_| bad())?),
            None => (text, 0),
        };
        let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
        if int.is_empty() && frac.is_empty() {
            return Err(bad());
        }
        if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let digits = format!("{int}{frac}");
        let digits = digits.trim_start_matches('0');
        let shift = exponent - frac.len() as i32;
        if digits.is_empty() {
            return Ok(Lambda::ZERO);
        }
        if digits.len() > 19 || !(-19..=0).contains(&shift) {
            return Err(LambdaError::OutOfRange(text.to_string()));
        }
        let value: u128 = digits.parse().map_err(|_| bad())?;
        let scale = 10u128.pow(shift.unsigned_abs());
        if value > scale {
            return Err(LambdaError::OutOfRange(text.to_string()));
        }
        let r = Ratio::new(value, scale);
        let num = u64::try_from(*r.numer()).map_err(|_| bad())?;
        let den = u64::try_from(*r.denom()).map_err(|_| bad())?;
        Lambda::new(num, den)
    }
}

impl Serialize for Lambda {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self.decimal().and_then(|d| d.parse::<serde_json::Number>().ok()) {
            Some(n) => n.serialize(serializer),
            None => serializer.serialize_str(&format!("{}/{}", self.num, self.den)),
        }
    }
}

impl<'de> Deserialize<'de> for Lambda {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let value = serde_json::Value::deserialize(deserializer)?;
        let text = match value {
            serde_json::Value::Number(n) => n.to_string(),
            serde_json::Value::String(s) => s,
            other => return Err(serde::de::Error::custom(format!("invalid lambda {other}"))),
        };
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Evaluated objectives of a solution under a given lambda.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Objectives {
    pub z1: u64,
    pub z2: u64,
    pub lambda: Lambda,
}

impl Objectives {
    pub fn new(z1: u64, z2: u64, lambda: Lambda) -> Self {
        Objectives { z1, z2, lambda }
    }

    pub fn z3(&self) -> Ratio<u128> {
        self.lambda.z3(self.z1, self.z2)
    }

    pub fn z3_f64(&self) -> f64 {
        let r = self.z3();
        *r.numer() as f64 / *r.denom() as f64
    }

    /// `Z3` as `n/d` (or `n` when integral).
    pub fn z3_exact(&self) -> String {
        let r = self.z3();
        if *r.denom() == 1 {
            r.numer().to_string()
        } else {
            format!("{}/{}", r.numer(), r.denom())
        }
    }
}

/// Computes `(Z1, Z2, Z3)` for the given counts under `lambda`.
pub fn objective(z1: u64, z2: u64, lambda: Lambda) -> Objectives {
    Objectives::new(z1, z2, lambda)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundaries() {
        let at_one = objective(3, 100, Lambda::ONE);
        assert_eq!(at_one.z3(), Ratio::from_integer(100));
        let at_zero = objective(3, 100, Lambda::ZERO);
        assert_eq!(at_zero.z3(), Ratio::from_integer(3));
    }

    #[test]
    fn half_weight() {
        let o = objective(3, 100, "0.5".parse().unwrap());
        assert_eq!(o.z3(), Ratio::new(103, 2));
        assert_eq!(o.z3_f64(), 51.5);
        assert_eq!(o.z3_exact(), "103/2");
    }

    #[test]
    fn parse_forms() {
        assert_eq!("1".parse::<Lambda>().unwrap(), Lambda::ONE);
        assert_eq!("0".parse::<Lambda>().unwrap(), Lambda::ZERO);
        assert_eq!("0.25".parse::<Lambda>().unwrap(), Lambda::new(1, 4).unwrap());
        assert_eq!("2/6".parse::<Lambda>().unwrap(), Lambda::new(1, 3).unwrap());
        assert_eq!("1e-1".parse::<Lambda>().unwrap(), Lambda::new(1, 10).unwrap());
        assert_eq!(".5".parse::<Lambda>().unwrap(), Lambda::new(1, 2).unwrap());
        assert!(matches!("1.5".parse::<Lambda>(), Err(LambdaError::OutOfRange(_))));
        assert!(matches!("-0.1".parse::<Lambda>(), Err(LambdaError::OutOfRange(_))));
        assert!(matches!("3/2".parse::<Lambda>(), Err(LambdaError::OutOfRange(_))));
        assert!(matches!("abc".parse::<Lambda>(), Err(LambdaError::Unparsable(_))));
    }

    #[test]
    fn json_round_trip() {
        for text in ["0", "1", "0.5", "0.125", "1/3", "0.3"] {
            let l: Lambda = text.parse().unwrap();
            let json = serde_json::to_string(&l).unwrap();
            let back: Lambda = serde_json::from_str(&json).unwrap();
            assert_eq!(back, l, "{text} -> {json}");
        }
        assert_eq!(serde_json::to_string(&Lambda::new(1, 3).unwrap()).unwrap(), "\"1/3\"");
        assert_eq!(serde_json::to_string(&Lambda::new(1, 4).unwrap()).unwrap(), "0.25");
    }
}
