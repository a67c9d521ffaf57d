//! Exchange pulses and pulse sequences.

use std::fmt;

use crate::duration::Duration;
use crate::error::{Error, Result};

/// A single exchange pulse of duration `t` between spins `i < j` (1-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ExchangePulse {
    pub i: usize,
    pub j: usize,
    pub t: Duration,
}

impl ExchangePulse {
    pub fn new(i: usize, j: usize, t: Duration) -> Result<Self> {
        if i == 0 || i >= j {
            return Err(Error::InvalidPair { i, j });
        }
        Ok(ExchangePulse { i, j, t })
    }

    /// The inverse pulse: same pair, duration (2 - t) mod 2.
    pub fn inverse(self) -> Self {
        ExchangePulse { t: self.t.inverse(), ..self }
    }

    pub fn acts_on(self, spin: usize) -> bool {
        self.i == spin || self.j == spin
    }

    pub fn is_nearest_neighbor(self) -> bool {
        self.j == self.i + 1
    }
}

impl fmt::Display for ExchangePulse {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "U{},{}({})", self.i, self.j, self.t)
    }
}

/// An ordered sequence of exchange pulses on `n` spins. Pulses are stored in
/// chronological order: the first element acts first, so the sequence unitary
/// is the right-to-left product of the individual pulse unitaries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PulseSequence {
    n: usize,
    pulses: Vec<ExchangePulse>,
}

impl PulseSequence {
    pub fn new(n: usize) -> Self {
        PulseSequence { n, pulses: Vec::new() }
    }

    pub fn with_pulses(n: usize, pulses: Vec<ExchangePulse>) -> Result<Self> {
        let mut seq = PulseSequence::new(n);
        for p in pulses {
            seq.push(p)?;
        }
        Ok(seq)
    }

    /// Convenience constructor from `(i, j, numer, denom)` tuples.
    pub fn from_tuples(n: usize, items: &[(usize, usize, i64, i64)]) -> Result<Self> {
        let mut seq = PulseSequence::new(n);
        for &(i, j, p, q) in items {
            seq.push(ExchangePulse::new(i, j, Duration::new(p, q)?)?)?;
        }
        Ok(seq)
    }

    pub fn push(&mut self, pulse: ExchangePulse) -> Result<()> {
        if pulse.j > self.n {
            return Err(Error::PulseOutOfRange { i: pulse.i, j: pulse.j, n: self.n });
        }
        self.pulses.push(pulse);
        Ok(())
    }

    pub fn extend(&mut self, other: &PulseSequence) -> Result<()> {
        for &p in other.pulses() {
            self.push(p)?;
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pulses(&self) -> &[ExchangePulse] {
        &self.pulses
    }

    pub fn len(&self) -> usize {
        self.pulses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pulses.is_empty()
    }

    /// The inverse sequence: reversed order, each pulse inverted. Composing
    /// with the original yields the identity exactly.
    pub fn inverted(&self) -> Self {
        PulseSequence {
            n: self.n,
            pulses: self.pulses.iter().rev().map(|p| p.inverse()).collect(),
        }
    }

    /// Re-homes the sequence on `new_n` spins with every index shifted by
    /// `offset` (e.g. offset 1 maps local spins 1..4 to global 2..5).
    pub fn reindexed(&self, new_n: usize, offset: isize) -> Result<Self> {
        let mut seq = PulseSequence::new(new_n);
        for p in &self.pulses {
            let i = p.i as isize + offset;
            let j = p.j as isize + offset;
            if i < 1 {
                return Err(Error::InvalidPair { i: 0, j: j.max(0) as usize });
            }
            seq.push(ExchangePulse::new(i as usize, j as usize, p.t)?)?;
        }
        Ok(seq)
    }

    pub fn all_nearest_neighbor(&self) -> bool {
        self.pulses.iter().all(|p| p.is_nearest_neighbor())
    }
}

impl fmt::Display for PulseSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} spins]", self.n)?;
        for p in &self.pulses {
            write!(f, " {p}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_validation() {
        assert!(ExchangePulse::new(1, 2, Duration::swap()).is_ok());
        assert!(ExchangePulse::new(2, 2, Duration::swap()).is_err());
        assert!(ExchangePulse::new(3, 2, Duration::swap()).is_err());
        assert!(ExchangePulse::new(0, 1, Duration::swap()).is_err());
    }

    #[test]
    fn sequence_bounds() {
        let mut seq = PulseSequence::new(3);
        assert!(seq.push(ExchangePulse::new(2, 3, Duration::zero()).unwrap()).is_ok());
        assert!(seq.push(ExchangePulse::new(3, 4, Duration::zero()).unwrap()).is_err());
    }

    #[test]
    fn invert_is_involution() {
        let seq = PulseSequence::from_tuples(4, &[(1, 2, 1, 2), (2, 3, 3, 2), (1, 2, 1, 1)]).unwrap();
        assert_eq!(seq.inverted().inverted(), seq);
        // Spec example: [U12(1/2)] inverts to [U12(3/2)].
        let single = PulseSequence::from_tuples(2, &[(1, 2, 1, 2)]).unwrap();
        let inv = single.inverted();
        assert_eq!(inv.pulses()[0].t, Duration::inv_sqrt_swap());
    }

    #[test]
    fn reindexing() {
        let seq = PulseSequence::from_tuples(4, &[(1, 2, 1, 2), (3, 4, 1, 1)]).unwrap();
        let shifted = seq.reindexed(6, 2).unwrap();
        assert_eq!(shifted.pulses()[0].i, 3);
        assert_eq!(shifted.pulses()[1].j, 6);
        assert!(seq.reindexed(3, 0).is_err());
    }
}
