//! The plain-text sequence file format.
//!
//! ```text
//! # optional comment lines
//! nspins 6
//! pulse 3 4 1/2
//! pulse 4 5 3/2
//! ```
//!
//! Pulses are listed in chronological order, one per line, with exact
//! rational durations `P/Q` (or an integer) in [0, 2) and 1-based spin
//! indices `I < J <= N`.

use crate::duration::Duration;
use crate::error::{Error, Result};
use crate::pulse::{ExchangePulse, PulseSequence};

/// Parses a sequence file; errors carry 1-based line numbers.
pub fn parse_sequence_file(text: &str) -> Result<PulseSequence> {
    let mut seq: Option<PulseSequence> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let err = |msg: String| Error::Parse { line: idx + 1, msg };
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens[0] {
            "nspins" => {
                if seq.is_some() {
                    return Err(err("repeated `nspins` header".into()));
                }
                let n: usize = tokens
                    .get(1)
                    .filter(|_| tokens.len() == 2)
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| err(format!("malformed header `{line}`")))?;
                if n == 0 || n > 16 {
                    return Err(err(format!("nspins {n} out of range 1..=16")));
                }
                seq = Some(PulseSequence::new(n));
            }
            "pulse" => {
                let seq = seq
                    .as_mut()
                    .ok_or_else(|| err("`pulse` before the `nspins` header".into()))?;
                if tokens.len() != 4 {
                    return Err(err(format!("malformed pulse line `{line}`")));
                }
                let i: usize = tokens[1]
                    .parse()
                    .map_err(|_| err(format!("bad spin index `{}`", tokens[1])))?;
                let j: usize = tokens[2]
                    .parse()
                    .map_err(|_| err(format!("bad spin index `{}`", tokens[2])))?;
                if i == j {
                    return Err(err(format!("i = j: pulse acts on a single spin {i}")));
                }
                if i > j {
                    return Err(err(format!("indices out of order: {i} > {j}")));
                }
                let t: Duration = tokens[3].parse().map_err(|e| match e {
                    Error::DurationRange { value } => {
                        err(format!("duration {value} out of range [0, 2)"))
                    }
                    Error::DurationDenominator { denom, max } => {
                        err(format!("duration denominator {denom} exceeds {max}"))
                    }
                    _ => err(format!("malformed rational `{}`", tokens[3])),
                })?;
                let pulse = ExchangePulse::new(i, j, t)?;
                seq.push(pulse).map_err(|_| {
                    err(format!("pulse ({i}, {j}) out of range for {} spins", seq.n()))
                })?;
            }
            other => return Err(err(format!("unknown directive `{other}`"))),
        }
    }
    seq.ok_or(Error::Parse { line: 0, msg: "missing `nspins` header".into() })
}

/// Writes a sequence in the file format; `parse_sequence_file` round-trips.
pub fn emit_sequence_file(seq: &PulseSequence) -> String {
    let mut out = format!("nspins {}\n", seq.n());
    for p in seq.pulses() {
        out.push_str(&format!("pulse {} {} {}\n", p.i, p.j, p.t));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let seq = PulseSequence::from_tuples(
            6,
            &[(3, 4, 1, 2), (4, 5, 3, 2), (2, 3, 1, 1), (5, 6, 0, 1)],
        )
        .unwrap();
        let text = emit_sequence_file(&seq);
        let parsed = parse_sequence_file(&text).unwrap();
        assert_eq!(parsed, seq);
        assert_eq!(emit_sequence_file(&parsed), text);
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = "# a demo\n\nnspins 3\n# interior comment\npulse 1 2 1/2\n";
        let seq = parse_sequence_file(text).unwrap();
        assert_eq!(seq.n(), 3);
        assert_eq!(seq.len(), 1);
    }

    #[test]
    fn named_errors() {
        let expect_msg = |text: &str, needle: &str| {
            match parse_sequence_file(text) {
                Err(Error::Parse { msg, .. }) => {
                    assert!(msg.contains(needle), "message `{msg}` lacks `{needle}`")
                }
                other => panic!("expected a parse error with `{needle}`, got {other:?}"),
            }
        };
        expect_msg("nspins 3\npulse 3 3 1/2\n", "i = j");
        expect_msg("nspins 3\npulse 1 2 5/2\n", "out of range [0, 2)");
        expect_msg("nspins 3\npulse 2 1 1/2\n", "out of order");
        expect_msg("nspins 3\npulse 1 4 1/2\n", "out of range for 3 spins");
        expect_msg("nspins 3\npulse 1 2 x/2\n", "malformed rational");
        expect_msg("nspins 3\npulse 1 2 1/97\n", "denominator");
        expect_msg("pulse 1 2 1/2\n", "before the `nspins` header");
        expect_msg("nspins 3\nnspins 4\n", "repeated");
        expect_msg("nspins 3\nwobble 1\n", "unknown directive");
        assert!(matches!(
            parse_sequence_file("# empty\n"),
            Err(Error::Parse { line: 0, .. })
        ));
    }

    #[test]
    fn line_numbers_in_errors() {
        let text = "# one\nnspins 3\npulse 1 2 1/2\npulse 3 3 1\n";
        match parse_sequence_file(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("expected parse error, got {other:?}"),
        }
    }
}
