//! Exact fuzzy degrees in `[0, 1]` and the Gödel operations on them.
//!
//! A [`Degree`] is a fixed-point decimal with eighteen fractional digits.
//! Degrees are parsed from decimal strings and never pass through floating
//! point, so two degrees written the same way always compare equal. Every
//! Gödel operation (min, max, residuum, biresiduum) returns one of its
//! operands or `0`/`1`, so results never leave the set of values a model
//! started with.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

const SCALE_DIGITS: usize = 18;
const SCALE: u64 = 1_000_000_000_000_000_000;

/// A fuzzy truth value in `[0, 1]`, stored exactly.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Degree(u64);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseDegreeError {
    #[error("empty degree")]
    Empty,
    #[error("malformed degree `{0}`")]
    Malformed(String),
    #[error("degree `{0}` has more than {SCALE_DIGITS} fractional digits")]
    TooPrecise(String),
    #[error("degree `{0}` is outside [0, 1]")]
    OutOfRange(String),
}

impl Degree {
    pub const ZERO: Degree = Degree(0);
    pub const ONE: Degree = Degree(SCALE);

    /// Builds `numerator / 10^digits`, e.g. `from_decimal(4, 1)` is `0.4`.
    pub fn from_decimal(numerator: u64, digits: u32) -> Option<Degree> {
        if digits as usize > SCALE_DIGITS {
            return None;
        }
        let factor = 10u64.pow(SCALE_DIGITS as u32 - digits);
        let raw = numerator.checked_mul(factor)?;
        (raw <= SCALE).then_some(Degree(raw))
    }

    /// Raw fixed-point representation (`ONE` is `10^18`).
    pub fn raw(self) -> u64 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    pub fn is_one(self) -> bool {
        self.0 == SCALE
    }

    /// Lossy conversion for reporting only.
    pub fn to_f64(self) -> f64 {
        self.0 as f64 / SCALE as f64
    }

    pub fn min(self, other: Degree) -> Degree {
        std::cmp::min(self, other)
    }

    pub fn max(self, other: Degree) -> Degree {
        std::cmp::max(self, other)
    }

    /// Gödel residuum `self ⇒ other`.
    pub fn residuum(self, other: Degree) -> Degree {
        godel_residuum(self, other)
    }

    /// Gödel biresiduum `self ⇔ other`.
    pub fn biresiduum(self, other: Degree) -> Degree {
        biresiduum(self, other)
    }
}

/// `1` if `x <= y`, otherwise `y`.
pub fn godel_residuum(x: Degree, y: Degree) -> Degree {
    if x <= y {
        Degree::ONE
    } else {
        y
    }
}

/// `(x ⇒ y) ∧ (y ⇒ x)`: `1` when the degrees are equal, their minimum otherwise.
pub fn biresiduum(x: Degree, y: Degree) -> Degree {
    godel_residuum(x, y).min(godel_residuum(y, x))
}

/// Infimum of a finite family; the empty infimum is `1`.
pub fn meet<I: IntoIterator<Item = Degree>>(values: I) -> Degree {
    values.into_iter().fold(Degree::ONE, Degree::min)
}

/// Supremum of a finite family; the empty supremum is `0`.
pub fn join<I: IntoIterator<Item = Degree>>(values: I) -> Degree {
    values.into_iter().fold(Degree::ZERO, Degree::max)
}

impl FromStr for Degree {
    type Err = ParseDegreeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let text = s.trim();
        if text.is_empty() {
            return Err(ParseDegreeError::Empty);
        }
        let malformed = || ParseDegreeError::Malformed(text.to_string());
        let (int_part, frac_part) = match text.split_once('.') {
            Some((i, f)) => (i, f),
            None => (text, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(malformed());
        }
        if !int_part.bytes().all(|b| b.is_ascii_digit())
            || !frac_part.bytes().all(|b| b.is_ascii_digit())
        {
            if text.starts_with('-') {
                return Err(ParseDegreeError::OutOfRange(text.to_string()));
            }
            return Err(malformed());
        }
        let frac_trimmed = frac_part.trim_end_matches('0');
        if frac_trimmed.len() > SCALE_DIGITS {
            return Err(ParseDegreeError::TooPrecise(text.to_string()));
        }
        let int_trimmed = int_part.trim_start_matches('0');
        let int_value: u64 = match int_trimmed {
            "" => 0,
            "1" => 1,
            _ => return Err(ParseDegreeError::OutOfRange(text.to_string())),
        };
        let mut frac_value: u64 = 0;
        for b in frac_trimmed.bytes() {
            frac_value = frac_value * 10 + u64::from(b - b'0');
        }
        frac_value *= 10u64.pow((SCALE_DIGITS - frac_trimmed.len()) as u32);
        let raw = int_value * SCALE + frac_value;
        if raw > SCALE {
            return Err(ParseDegreeError::OutOfRange(text.to_string()));
        }
        Ok(Degree(raw))
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let int = self.0 / SCALE;
        let frac = self.0 % SCALE;
        if frac == 0 {
            return write!(f, "{int}");
        }
        let digits = format!("{frac:0width$}", width = SCALE_DIGITS);
        write!(f, "{int}.{}", digits.trim_end_matches('0'))
    }
}

impl fmt::Debug for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Degree {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Degree {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// The sorted set of distinct degrees a model uses, extended with `0` and `1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreePool {
    values: Vec<Degree>,
}

impl DegreePool {
    pub fn new<I: IntoIterator<Item = Degree>>(values: I) -> Self {
        let mut values: Vec<Degree> = values.into_iter().collect();
        values.push(Degree::ZERO);
        values.push(Degree::ONE);
        values.sort_unstable();
        values.dedup();
        DegreePool { values }
    }

    pub fn values(&self) -> &[Degree] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn contains(&self, d: Degree) -> bool {
        self.values.binary_search(&d).is_ok()
    }

    /// Position of `d` in the pool, if present.
    pub fn rank(&self, d: Degree) -> Option<usize> {
        self.values.binary_search(&d).ok()
    }
}
