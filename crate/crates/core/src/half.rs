//! Half-integer spin quantum numbers.

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use crate::error::Error;

/// A half-integer value (total spin j or magnetic number m), stored as twice
/// its value so that arithmetic and comparisons stay exact.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Half(i32);

impl Half {
    pub const ZERO: Half = Half(0);
    pub const HALF: Half = Half(1);
    pub const ONE: Half = Half(2);
    pub const THREE_HALVES: Half = Half(3);
    pub const TWO: Half = Half(4);

    /// Builds from twice the value: `from_twice(3)` is 3/2.
    pub const fn from_twice(twice: i32) -> Self {
        Half(twice)
    }

    pub const fn from_int(k: i32) -> Self {
        Half(2 * k)
    }

    pub const fn twice(self) -> i32 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.0) / 2.0
    }

    pub fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    pub fn abs(self) -> Self {
        Half(self.0.abs())
    }

    /// j(j + 1), the S^2 eigenvalue for total spin j.
    pub fn casimir(self) -> f64 {
        let j = self.as_f64();
        j * (j + 1.0)
    }

    /// True when j1 and j2 can couple to j: |j1 - j2| <= j <= j1 + j2 with
    /// j1 + j2 + j integral.
    pub fn triangle(j1: Half, j2: Half, j: Half) -> bool {
        j.0 >= (j1.0 - j2.0).abs()
            && j.0 <= j1.0 + j2.0
            && (j1.0 + j2.0 + j.0) % 2 == 0
            && j.0 >= 0
    }

    /// All j reachable by coupling j1 and j2, ascending.
    pub fn couplings(j1: Half, j2: Half) -> impl Iterator<Item = Half> {
        let lo = (j1.0 - j2.0).abs();
        let hi = j1.0 + j2.0;
        (lo..=hi).step_by(2).map(Half)
    }

    /// m values -j ..= j in integer steps, ascending.
    pub fn m_values(self) -> impl Iterator<Item = Half> {
        (-self.0..=self.0).step_by(2).map(Half)
    }

    /// True when m is a valid magnetic number for this total spin.
    pub fn admits_m(self, m: Half) -> bool {
        m.0.abs() <= self.0 && (self.0 - m.0) % 2 == 0
    }
}

impl Add for Half {
    type Output = Half;
    fn add(self, rhs: Half) -> Half {
        Half(self.0 + rhs.0)
    }
}

impl Sub for Half {
    type Output = Half;
    fn sub(self, rhs: Half) -> Half {
        Half(self.0 - rhs.0)
    }
}

impl Neg for Half {
    type Output = Half;
    fn neg(self) -> Half {
        Half(-self.0)
    }
}

impl fmt::Display for Half {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl FromStr for Half {
    type Err = Error;

    /// Parses `"2"`, `"-1"`, or the half-integer form `"3/2"`.
    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        let bad = || Error::MalformedRational { text: s.to_string() };
        if let Some((num, den)) = s.split_once('/') {
            if den.trim() != "2" {
                return Err(bad());
            }
            let p: i32 = num.trim().parse().map_err(|_| bad())?;
            Ok(Half(p))
        } else {
            let k: i32 = s.parse().map_err(|_| bad())?;
            Ok(Half(2 * k))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_rule() {
        assert!(Half::triangle(Half::HALF, Half::HALF, Half::ZERO));
        assert!(Half::triangle(Half::HALF, Half::HALF, Half::ONE));
        assert!(!Half::triangle(Half::HALF, Half::HALF, Half::HALF));
        assert!(Half::triangle(Half::THREE_HALVES, Half::HALF, Half::ONE));
        assert!(!Half::triangle(Half::ONE, Half::ONE, Half::THREE_HALVES));
    }

    #[test]
    fn display_and_parse() {
        for (text, twice) in [("1/2", 1), ("3/2", 3), ("1", 2), ("0", 0), ("-1/2", -1)] {
            let h: Half = text.parse().unwrap();
            assert_eq!(h.twice(), twice);
            assert_eq!(h.to_string().parse::<Half>().unwrap(), h);
        }
        assert!("2/3".parse::<Half>().is_err());
    }

    #[test]
    fn m_range() {
        let ms: Vec<i32> = Half::THREE_HALVES.m_values().map(Half::twice).collect();
        assert_eq!(ms, vec![-3, -1, 1, 3]);
    }
}
