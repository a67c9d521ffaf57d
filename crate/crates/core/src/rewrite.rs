//! Elementary sequence manipulations and their invariants.
//!
//! The supported steps are SWAP-pair insertion/removal, commutation of a
//! SWAP past a neighboring pulse (relabeling that pulse's pair through the
//! transposition), and fusion of a SWAP with an adjacent same-pair
//! sqrt-SWAP into an inverse sqrt-SWAP (and vice versa). Under the
//! singlet-fixed phase convention every step preserves the sequence unitary
//! exactly, with phase factor 1, so script replays reproduce the phase and
//! not just the ray. Each step also preserves the number of nontrivial
//! pulses (duration not in {0, 1}) and the parity of
//! #SWAP + #sqrt-SWAP.

use std::fmt;

use num_complex::Complex64;
use rand::Rng;

use crate::duration::Duration;
use crate::error::{Error, Result};
use crate::operator::{equal_up_to_global_phase, sequence_unitary};
use crate::pulse::{ExchangePulse, PulseSequence};
use crate::report::Check;

/// Pulse-type counts of a sequence, by exact rational duration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SequenceStats {
    pub n_swap: usize,
    pub n_sqrt: usize,
    pub n_invsqrt: usize,
    pub n_identity: usize,
    pub n_other: usize,
    /// Pulses with duration not in {0, 1}.
    pub n_nontrivial: usize,
    pub parity: Parity,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Parity::Even => write!(f, "even"),
            Parity::Odd => write!(f, "odd"),
        }
    }
}

pub fn sequence_stats(seq: &PulseSequence) -> SequenceStats {
    let mut s = SequenceStats {
        n_swap: 0,
        n_sqrt: 0,
        n_invsqrt: 0,
        n_identity: 0,
        n_other: 0,
        n_nontrivial: 0,
        parity: Parity::Even,
    };
    for p in seq.pulses() {
        if p.t.is_swap() {
            s.n_swap += 1;
        } else if p.t.is_sqrt_swap() {
            s.n_sqrt += 1;
        } else if p.t.is_inv_sqrt_swap() {
            s.n_invsqrt += 1;
        } else if p.t.is_identity() {
            s.n_identity += 1;
        } else {
            s.n_other += 1;
        }
        if !p.t.is_trivial() {
            s.n_nontrivial += 1;
        }
    }
    s.parity = if (s.n_swap + s.n_sqrt).is_multiple_of(2) { Parity::Even } else { Parity::Odd };
    s
}

/// One elementary manipulation at a chronological position.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RewriteStep {
    /// Insert the identity as a pair of SWAP pulses on (i, j) at `pos`.
    InsertPair { i: usize, j: usize, pos: usize },
    /// Remove two adjacent same-pair SWAP pulses at `pos`, `pos + 1`.
    RemovePair { pos: usize },
    /// Move the SWAP at `pos` one slot later, relabeling the pulse it
    /// crosses through the transposition.
    CommuteSwapRight { pos: usize },
    /// Move the SWAP at `pos` one slot earlier.
    CommuteSwapLeft { pos: usize },
    /// Fuse adjacent same-pair pulses at `pos`, `pos + 1`, exactly one of
    /// which is a SWAP and the other a (inverse) sqrt-SWAP.
    FuseSwapIntoPulse { pos: usize },
    /// Split a (inverse) sqrt-SWAP at `pos` into a SWAP followed by the
    /// complementary pulse.
    SplitPulseIntoSwap { pos: usize },
}

impl fmt::Display for RewriteStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RewriteStep::InsertPair { i, j, pos } => write!(f, "insert_pair {i} {j} at {pos}"),
            RewriteStep::RemovePair { pos } => write!(f, "remove_pair at {pos}"),
            RewriteStep::CommuteSwapRight { pos } => write!(f, "commute_right at {pos}"),
            RewriteStep::CommuteSwapLeft { pos } => write!(f, "commute_left at {pos}"),
            RewriteStep::FuseSwapIntoPulse { pos } => write!(f, "fuse at {pos}"),
            RewriteStep::SplitPulseIntoSwap { pos } => write!(f, "split at {pos}"),
        }
    }
}

fn reject(pos: usize, msg: impl Into<String>) -> Error {
    Error::StepRejected { pos, msg: msg.into() }
}

/// Conjugates a pulse by the transposition (i j): U_ij(1) U_kl(t) =
/// U_{s(k) s(l)}(t) U_ij(1) with s = (i j), exactly.
fn conjugate_by_swap(pulse: ExchangePulse, i: usize, j: usize) -> ExchangePulse {
    let map = |k: usize| {
        if k == i {
            j
        } else if k == j {
            i
        } else {
            k
        }
    };
    let (a, b) = (map(pulse.i), map(pulse.j));
    ExchangePulse::new(a.min(b), a.max(b), pulse.t).expect("transposition keeps indices distinct")
}

/// Applies one step, or rejects it when its pattern does not match.
pub fn apply_step(seq: &PulseSequence, step: &RewriteStep) -> Result<PulseSequence> {
    let pulses = seq.pulses();
    let mut out: Vec<ExchangePulse> = pulses.to_vec();
    match *step {
        RewriteStep::InsertPair { i, j, pos } => {
            if pos > pulses.len() {
                return Err(reject(pos, format!("position beyond length {}", pulses.len())));
            }
            let swap = ExchangePulse::new(i, j, Duration::swap())?;
            if j > seq.n() {
                return Err(Error::PulseOutOfRange { i, j, n: seq.n() });
            }
            out.insert(pos, swap);
            out.insert(pos, swap);
        }
        RewriteStep::RemovePair { pos } => {
            let [a, b] = window2(pulses, pos)?;
            if !(a.t.is_swap() && b.t.is_swap() && a.i == b.i && a.j == b.j) {
                return Err(reject(pos, "expected two adjacent SWAP pulses on one pair"));
            }
            out.drain(pos..pos + 2);
        }
        RewriteStep::CommuteSwapRight { pos } => {
            let [swap, other] = window2(pulses, pos)?;
            if !swap.t.is_swap() {
                return Err(reject(pos, "pulse to commute is not a SWAP"));
            }
            out[pos] = conjugate_by_swap(other, swap.i, swap.j);
            out[pos + 1] = swap;
        }
        RewriteStep::CommuteSwapLeft { pos } => {
            if pos == 0 {
                return Err(reject(pos, "no earlier pulse to commute past"));
            }
            let [other, swap] = window2(pulses, pos - 1)?;
            if !swap.t.is_swap() {
                return Err(reject(pos, "pulse to commute is not a SWAP"));
            }
            out[pos - 1] = swap;
            out[pos] = conjugate_by_swap(other, swap.i, swap.j);
        }
        RewriteStep::FuseSwapIntoPulse { pos } => {
            let [a, b] = window2(pulses, pos)?;
            if a.i != b.i || a.j != b.j {
                return Err(reject(pos, "fusion needs two pulses on the same pair"));
            }
            let swap_count = usize::from(a.t.is_swap()) + usize::from(b.t.is_swap());
            let partner_ok = |t: Duration| t.is_sqrt_swap() || t.is_inv_sqrt_swap();
            if swap_count != 1 || !(partner_ok(a.t) || partner_ok(b.t)) {
                return Err(reject(
                    pos,
                    "fusion needs one SWAP and one sqrt-SWAP or inverse sqrt-SWAP",
                ));
            }
            let fused = ExchangePulse::new(a.i, a.j, a.t.add_mod2(b.t))?;
            out[pos] = fused;
            out.remove(pos + 1);
        }
        RewriteStep::SplitPulseIntoSwap { pos } => {
            let p = *pulses
                .get(pos)
                .ok_or_else(|| reject(pos, format!("position beyond length {}", pulses.len())))?;
            if !(p.t.is_sqrt_swap() || p.t.is_inv_sqrt_swap()) {
                return Err(reject(pos, "split needs a sqrt-SWAP or inverse sqrt-SWAP"));
            }
            let remainder = p.t.add_mod2(Duration::swap());
            out[pos] = ExchangePulse::new(p.i, p.j, Duration::swap())?;
            out.insert(pos + 1, ExchangePulse::new(p.i, p.j, remainder)?);
        }
    }
    PulseSequence::with_pulses(seq.n(), out)
}

fn window2(pulses: &[ExchangePulse], pos: usize) -> Result<[ExchangePulse; 2]> {
    if pos + 1 >= pulses.len() {
        return Err(reject(pos, format!("need two pulses at {pos}, length {}", pulses.len())));
    }
    Ok([pulses[pos], pulses[pos + 1]])
}

pub fn apply_script(seq: &PulseSequence, steps: &[RewriteStep]) -> Result<PulseSequence> {
    let mut cur = seq.clone();
    for step in steps {
        cur = apply_step(&cur, step)?;
    }
    Ok(cur)
}

/// Outcome of comparing a rewritten sequence against its origin.
#[derive(Clone, Debug)]
pub struct InvariantReport {
    pub checks: Vec<Check>,
    pub phase: Option<Complex64>,
    pub pass: bool,
}

/// Asserts the rewrite invariants: unchanged nontrivial count, unchanged
/// parity, and unitaries equal up to a global phase within `tol`.
pub fn check_rewrite_invariants(
    before: &PulseSequence,
    after: &PulseSequence,
    tol: f64,
) -> Result<InvariantReport> {
    if before.n() != after.n() {
        return Err(Error::DimensionMismatch { lhs: before.n(), rhs: after.n() });
    }
    let sb = sequence_stats(before);
    let sa = sequence_stats(after);
    let phase = equal_up_to_global_phase(
        &sequence_unitary(before),
        &sequence_unitary(after),
        tol,
    )?;
    let checks = vec![
        Check::flag("nontrivial_count_preserved", sb.n_nontrivial == sa.n_nontrivial),
        Check::flag("parity_preserved", sb.parity == sa.parity),
        Check::flag("unitary_equal_up_to_phase", phase.is_some()),
    ];
    let pass = crate::report::all_pass(&checks);
    Ok(InvariantReport { checks, phase, pass })
}

/// Merges two adjacent same-pair pulses into U(t1 + t2 mod 2). Refused
/// unless neither operand is a SWAP and the result is nontrivial, which is
/// exactly the regime where the rewrite invariants survive for the
/// canonical duration set.
pub fn merge_adjacent(seq: &PulseSequence, pos: usize) -> Result<PulseSequence> {
    let pulses = seq.pulses();
    let [a, b] = window2(pulses, pos)?;
    if a.i != b.i || a.j != b.j {
        return Err(reject(pos, "merge needs two pulses on the same pair"));
    }
    if a.t.is_swap() || b.t.is_swap() {
        return Err(reject(pos, "merge refuses SWAP operands; use fuse"));
    }
    let sum = a.t.add_mod2(b.t);
    if sum.is_trivial() {
        return Err(reject(pos, "merge refuses results with duration 0 or 1"));
    }
    let mut out = pulses.to_vec();
    out[pos] = ExchangePulse::new(a.i, a.j, sum)?;
    out.remove(pos + 1);
    PulseSequence::with_pulses(seq.n(), out)
}

/// Left-to-right sweep applying `merge_adjacent` wherever it is allowed.
/// Returns the normalized sequence and the number of merges performed.
pub fn normalize_durations(seq: &PulseSequence) -> (PulseSequence, usize) {
    let mut cur = seq.clone();
    let mut merged = 0;
    let mut pos = 0;
    while pos + 1 < cur.len() {
        match merge_adjacent(&cur, pos) {
            Ok(next) => {
                cur = next;
                merged += 1;
                pos = pos.saturating_sub(1);
            }
            Err(_) => pos += 1,
        }
    }
    (cur, merged)
}

/// Gate-level agreement between two six-spin sequences.
#[derive(Clone, Debug)]
pub struct GateComparison {
    pub leakage_a: f64,
    pub leakage_b: f64,
    pub makhlin_a: Option<(Complex64, f64)>,
    pub makhlin_b: Option<(Complex64, f64)>,
    /// Both Makhlin pairs present and equal to 1e-9.
    pub makhlin_agree: Option<bool>,
}

#[derive(Clone, Debug)]
pub struct ComparisonReport {
    pub phase_equal: bool,
    pub phase: Option<Complex64>,
    pub stats_a: SequenceStats,
    pub stats_b: SequenceStats,
    pub parity_differs: bool,
    /// Present when both sequences live on the six-spin register.
    pub gate: Option<GateComparison>,
}

impl ComparisonReport {
    /// Equal up to phase, or locally equivalent at the gate level.
    pub fn equivalent(&self) -> bool {
        self.phase_equal || self.gate.as_ref().is_some_and(|g| g.makhlin_agree == Some(true))
    }
}

/// Compares two sequences: global-phase equality first and, failing that on
/// the six-spin register, local equivalence of the extracted gates via
/// Makhlin invariants, along with the parity difference of their stats.
pub fn compare_sequences(a: &PulseSequence, b: &PulseSequence, tol: f64) -> Result<ComparisonReport> {
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch { lhs: a.n(), rhs: b.n() });
    }
    let ua = sequence_unitary(a);
    let ub = sequence_unitary(b);
    let phase = equal_up_to_global_phase(&ua, &ub, tol)?;
    let stats_a = sequence_stats(a);
    let stats_b = sequence_stats(b);
    let gate = if a.n() == 6 {
        let ga = crate::encoding::extract_gate(&ua)?;
        let gb = crate::encoding::extract_gate(&ub)?;
        let makhlin_agree = match (ga.makhlin, gb.makhlin) {
            (Some((g1a, g2a)), Some((g1b, g2b))) => {
                Some((g1a - g1b).norm() <= 1e-9 && (g2a - g2b).abs() <= 1e-9)
            }
            _ => None,
        };
        Some(GateComparison {
            leakage_a: ga.leakage,
            leakage_b: gb.leakage,
            makhlin_a: ga.makhlin,
            makhlin_b: gb.makhlin,
            makhlin_agree,
        })
    } else {
        None
    };
    Ok(ComparisonReport {
        phase_equal: phase.is_some(),
        phase,
        stats_a,
        stats_b,
        parity_differs: stats_a.parity != stats_b.parity,
        gate,
    })
}

/// Parses a rewrite script: one step per line, `#` comments, blank lines
/// ignored.
pub fn parse_script(text: &str) -> Result<Vec<RewriteStep>> {
    let mut steps = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| Error::Parse { line: lineno + 1, msg };
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let parse_at = |tokens: &[&str], at_idx: usize| -> Result<usize> {
            if tokens.get(at_idx) != Some(&"at") {
                return Err(err(format!("expected `at`, got `{line}`")));
            }
            tokens
                .get(at_idx + 1)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| err(format!("bad position in `{line}`")))
        };
        let step = match tokens[0] {
            "insert_pair" => {
                let i: usize = tokens
                    .get(1)
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| err(format!("bad spin index in `{line}`")))?;
                let j: usize = tokens
                    .get(2)
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| err(format!("bad spin index in `{line}`")))?;
                RewriteStep::InsertPair { i, j, pos: parse_at(&tokens, 3)? }
            }
            "remove_pair" => RewriteStep::RemovePair { pos: parse_at(&tokens, 1)? },
            "commute_right" => RewriteStep::CommuteSwapRight { pos: parse_at(&tokens, 1)? },
            "commute_left" => RewriteStep::CommuteSwapLeft { pos: parse_at(&tokens, 1)? },
            "fuse" => RewriteStep::FuseSwapIntoPulse { pos: parse_at(&tokens, 1)? },
            "split" => RewriteStep::SplitPulseIntoSwap { pos: parse_at(&tokens, 1)? },
            other => return Err(err(format!("unknown step `{other}`"))),
        };
        steps.push(step);
    }
    Ok(steps)
}

/// Every step whose pattern matches the sequence, in deterministic order.
pub fn applicable_steps(seq: &PulseSequence) -> Vec<RewriteStep> {
    let pulses = seq.pulses();
    let len = pulses.len();
    let mut steps = Vec::new();
    for pos in 0..=len {
        for i in 1..seq.n() {
            for j in (i + 1)..=seq.n() {
                steps.push(RewriteStep::InsertPair { i, j, pos });
            }
        }
    }
    for pos in 0..len.saturating_sub(1) {
        let (a, b) = (pulses[pos], pulses[pos + 1]);
        if a.t.is_swap() && b.t.is_swap() && (a.i, a.j) == (b.i, b.j) {
            steps.push(RewriteStep::RemovePair { pos });
        }
        if (a.i, a.j) == (b.i, b.j)
            && usize::from(a.t.is_swap()) + usize::from(b.t.is_swap()) == 1
            && (a.t.is_sqrt_swap()
                || a.t.is_inv_sqrt_swap()
                || b.t.is_sqrt_swap()
                || b.t.is_inv_sqrt_swap())
        {
            steps.push(RewriteStep::FuseSwapIntoPulse { pos });
        }
    }
    for (pos, p) in pulses.iter().enumerate() {
        if p.t.is_swap() {
            if pos + 1 < len {
                steps.push(RewriteStep::CommuteSwapRight { pos });
            }
            if pos > 0 {
                steps.push(RewriteStep::CommuteSwapLeft { pos });
            }
        }
        if p.t.is_sqrt_swap() || p.t.is_inv_sqrt_swap() {
            steps.push(RewriteStep::SplitPulseIntoSwap { pos });
        }
    }
    steps
}

/// Draws one applicable step, choosing the step kind first so samples are
/// not swamped by the many possible insertions.
pub fn random_step<R: Rng>(seq: &PulseSequence, rng: &mut R) -> Option<RewriteStep> {
    let all = applicable_steps(seq);
    if all.is_empty() {
        return None;
    }
    let kind = |s: &RewriteStep| -> u8 {
        match s {
            RewriteStep::InsertPair { .. } => 0,
            RewriteStep::RemovePair { .. } => 1,
            RewriteStep::CommuteSwapRight { .. } => 2,
            RewriteStep::CommuteSwapLeft { .. } => 3,
            RewriteStep::FuseSwapIntoPulse { .. } => 4,
            RewriteStep::SplitPulseIntoSwap { .. } => 5,
        }
    };
    let mut kinds: Vec<u8> = all.iter().map(kind).collect();
    kinds.sort_unstable();
    kinds.dedup();
    let chosen_kind = kinds[rng.gen_range(0..kinds.len())];
    let of_kind: Vec<&RewriteStep> = all.iter().filter(|s| kind(s) == chosen_kind).collect();
    Some(*of_kind[rng.gen_range(0..of_kind.len())])
}
