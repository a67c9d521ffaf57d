//! Exact rational pulse durations.
//!
//! Durations are measured in units of 1/(pi J) and live in the half-open
//! interval [0, 2). The phase factor e^{-i pi t} attached to the triplet
//! sector is evaluated exactly for the quarter-turn durations {0, 1/2, 1,
//! 3/2}, so SWAP and sqrt-SWAP algebra is exact in f64 arithmetic.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{Signed, Zero};

use crate::error::Error;

/// Largest denominator accepted for a duration, after reduction.
pub const DEFAULT_MAX_DENOMINATOR: i64 = 96;

/// An exchange-pulse duration: an exact rational in [0, 2).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Duration(Rational64);

impl Duration {
    /// Builds `numer/denom`, reduced, requiring 0 <= t < 2 and a reduced
    /// denominator no larger than [`DEFAULT_MAX_DENOMINATOR`].
    pub fn new(numer: i64, denom: i64) -> Result<Self, Error> {
        Self::with_max_denominator(numer, denom, DEFAULT_MAX_DENOMINATOR)
    }

    pub fn with_max_denominator(numer: i64, denom: i64, max: i64) -> Result<Self, Error> {
        if denom == 0 {
            return Err(Error::MalformedRational { text: format!("{numer}/{denom}") });
        }
        let r = Rational64::new(numer, denom);
        if r.is_negative() || r >= Rational64::from_integer(2) {
            return Err(Error::DurationRange { value: r.to_string() });
        }
        if *r.denom() > max {
            return Err(Error::DurationDenominator { denom: *r.denom(), max });
        }
        Ok(Duration(r))
    }

    pub fn from_ratio(r: Rational64) -> Result<Self, Error> {
        Self::new(*r.numer(), *r.denom())
    }

    pub fn zero() -> Self {
        Duration(Rational64::zero())
    }

    /// t = 1, the SWAP pulse.
    pub fn swap() -> Self {
        Duration(Rational64::from_integer(1))
    }

    /// t = 1/2, the sqrt-SWAP pulse.
    pub fn sqrt_swap() -> Self {
        Duration(Rational64::new(1, 2))
    }

    /// t = 3/2, the inverse sqrt-SWAP pulse.
    pub fn inv_sqrt_swap() -> Self {
        Duration(Rational64::new(3, 2))
    }

    pub fn ratio(self) -> Rational64 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        *self.0.numer() as f64 / *self.0.denom() as f64
    }

    /// The triplet-sector phase e^{-i pi t}. Exact for denominators 1 and 2.
    pub fn phase(self) -> Complex64 {
        match (*self.0.numer(), *self.0.denom()) {
            (0, _) => Complex64::new(1.0, 0.0),
            (1, 1) => Complex64::new(-1.0, 0.0),
            (1, 2) => Complex64::new(0.0, -1.0),
            (3, 2) => Complex64::new(0.0, 1.0),
            _ => {
                let t = self.as_f64();
                Complex64::new((std::f64::consts::PI * t).cos(), -(std::f64::consts::PI * t).sin())
            }
        }
    }

    /// Duration of the inverse pulse, (2 - t) mod 2.
    pub fn inverse(self) -> Self {
        if self.0.is_zero() {
            Duration::zero()
        } else {
            Duration(Rational64::from_integer(2) - self.0)
        }
    }

    /// Composition law on one pair: (t1 + t2) mod 2, exact.
    pub fn add_mod2(self, other: Self) -> Self {
        let two = Rational64::from_integer(2);
        let mut s = self.0 + other.0;
        if s >= two {
            s -= two;
        }
        Duration(s)
    }

    pub fn is_identity(self) -> bool {
        self.0.is_zero()
    }

    pub fn is_swap(self) -> bool {
        self.0 == Rational64::from_integer(1)
    }

    pub fn is_sqrt_swap(self) -> bool {
        self.0 == Rational64::new(1, 2)
    }

    pub fn is_inv_sqrt_swap(self) -> bool {
        self.0 == Rational64::new(3, 2)
    }

    /// True for r-pulses, t in {0, 1}: the pulses that square to the identity.
    pub fn is_trivial(self) -> bool {
        self.is_identity() || self.is_swap()
    }
}

impl fmt::Display for Duration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom() == &1 {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl FromStr for Duration {
    type Err = Error;

    /// Parses `"P/Q"` or an integer `"K"`.
    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        let bad = || Error::MalformedRational { text: s.to_string() };
        if let Some((num, den)) = s.split_once('/') {
            let p: i64 = num.trim().parse().map_err(|_| bad())?;
            let q: i64 = den.trim().parse().map_err(|_| bad())?;
            if q == 0 {
                return Err(bad());
            }
            Duration::new(p, q)
        } else {
            let k: i64 = s.parse().map_err(|_| bad())?;
            Duration::new(k, 1)
        }
    }
}

/// Best rational approximation to `x` (mod 2) with denominator at most
/// `max_denom`, via continued fractions. Used to snap refined roots back to
/// exact durations.
pub fn snap_to_rational(x: f64, max_denom: i64) -> Result<Duration, Error> {
    let x = x.rem_euclid(2.0);
    let (mut best_n, mut best_d, mut best_err) = (0i64, 1i64, (x - 0.0).abs());
    // Continued-fraction convergents of x.
    let (mut p0, mut q0, mut p1, mut q1) = (1i64, 0i64, x.floor() as i64, 1i64);
    let mut frac = x - x.floor();
    for _ in 0..40 {
        let err = (x - p1 as f64 / q1 as f64).abs();
        if q1 <= max_denom && err < best_err {
            best_n = p1;
            best_d = q1;
            best_err = err;
        }
        if frac.abs() < 1e-15 {
            break;
        }
        let a = (1.0 / frac).floor();
        frac = 1.0 / frac - a;
        let a = a as i64;
        let (p2, q2) = (a * p1 + p0, a * q1 + q0);
        if q2 > max_denom || q2 <= 0 {
            break;
        }
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
    }
    // Durations live mod 2, so a convergent at 2 wraps to 0.
    Duration::new(best_n.rem_euclid(2 * best_d), best_d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_checks() {
        assert!(Duration::new(1, 2).is_ok());
        assert!(Duration::new(0, 1).is_ok());
        assert!(Duration::new(2, 1).is_err());
        assert!(Duration::new(-1, 2).is_err());
        assert!(Duration::new(5, 2).is_err());
        assert!(Duration::new(1, 97).is_err());
        // 2/4 reduces to 1/2 before the denominator check.
        assert!(Duration::new(100, 200).is_ok());
    }

    #[test]
    fn quarter_turn_phases_are_exact() {
        assert_eq!(Duration::zero().phase(), Complex64::new(1.0, 0.0));
        assert_eq!(Duration::swap().phase(), Complex64::new(-1.0, 0.0));
        assert_eq!(Duration::sqrt_swap().phase(), Complex64::new(0.0, -1.0));
        assert_eq!(Duration::inv_sqrt_swap().phase(), Complex64::new(0.0, 1.0));
    }

    #[test]
    fn inverse_is_involutive() {
        for (p, q) in [(0, 1), (1, 1), (1, 2), (3, 2), (5, 7), (95, 96)] {
            let t = Duration::new(p, q).unwrap();
            assert_eq!(t.inverse().inverse(), t);
            assert!(t.add_mod2(t.inverse()).is_identity());
        }
    }

    #[test]
    fn composition_is_exact() {
        // 5/7 + 3/2 = 31/14 wraps to 3/14.
        let a = Duration::new(5, 7).unwrap();
        let b = Duration::new(3, 2).unwrap();
        assert_eq!(a.add_mod2(b), Duration::new(3, 14).unwrap());
        assert_eq!(
            Duration::sqrt_swap().add_mod2(Duration::sqrt_swap()),
            Duration::swap()
        );
    }

    #[test]
    fn parse_round_trip() {
        for text in ["0", "1", "1/2", "3/2", "5/7", "95/96"] {
            let t: Duration = text.parse().unwrap();
            assert_eq!(t.to_string(), text);
        }
        assert!("2".parse::<Duration>().is_err());
        assert!("1/0".parse::<Duration>().is_err());
        assert!("x/2".parse::<Duration>().is_err());
    }

    #[test]
    fn snapping() {
        let t = snap_to_rational(0.4999999999997, 96).unwrap();
        assert_eq!(t, Duration::sqrt_swap());
        let t = snap_to_rational(1.5000000000002, 96).unwrap();
        assert_eq!(t, Duration::inv_sqrt_swap());
        let t = snap_to_rational(1.9999999999999, 96).unwrap();
        assert!(t.is_identity());
    }
}
