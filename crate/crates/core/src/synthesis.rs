//! Synthesis of the 20-pulse controlled-(n.sigma) sequence from its
//! four-spin constraint.
//!
//! The pipeline: evaluate the constraint matrix element E(t1, t2) between
//! the two four-spin coupled states, extract its four phase coefficients
//! from the corner cases, solve |E| = 0 on a rational grid with exact
//! re-verification, assemble the six-pulse R block V^-1 U12(1) U34(1) V,
//! verify its sector structure, and interleave three R blocks with two
//! SWAPs into the full six-spin sequence.

use ndarray::Array2;
use num_complex::Complex64;
use num_rational::Rational64;

use crate::coupling::{constraint_states, coupled_state, compute_f, sector_projector, CouplingTree};
use crate::cyclotomic::phase_sum_is_zero;
use crate::duration::{snap_to_rational, Duration};
use crate::encoding::{
    elevated_structure, extract_gate, classify_controlled_nsigma, ElevatedBlockReport, GateReport,
};
use crate::error::{Error, Result};
use crate::half::Half;
use crate::operator::{
    apply_phase_pulse_to_vector, dagger, equal_up_to_global_phase, frobenius_norm, identity,
    max_abs_diff, sequence_unitary, unitarity_residual, CMat, CVec,
};
use crate::pulse::{ExchangePulse, PulseSequence};
use crate::report::{all_pass, Check};
use crate::rewrite::{sequence_stats, SequenceStats};

/// Default tolerance for synthesis verification checks.
pub const DEFAULT_TOL: f64 = 1e-10;
/// Default denominator of the constraint-solving grid.
pub const DEFAULT_GRID_DENOMINATOR: i64 = 24;
/// Upper bound on the pulse count explored by `search_v`.
pub const MAX_SEARCH_PULSES: usize = 3;

/// The pulse pairs available to V on the four local spins.
const V_PAIRS: [(usize, usize); 3] = [(1, 2), (2, 3), (3, 4)];

/// Evaluates the constraint matrix element
/// E = <((12)_1 (34)_1)_1 | W | (1 (234)_3/2)_1> for pulse words W on four
/// spins, holding the two fixed states.
pub struct ConstraintEvaluator {
    left: CVec,
    right: CVec,
}

impl Default for ConstraintEvaluator {
    fn default() -> Self {
        Self::new()
    }
}

impl ConstraintEvaluator {
    pub fn new() -> Self {
        let (left, right) = constraint_states(Half::ONE).expect("fixed trees are valid");
        ConstraintEvaluator { left: left.vector, right: right.vector }
    }

    /// E for a word of (pair, phase) pulses applied chronologically to the
    /// right state.
    pub fn eval_word_phases(&self, word: &[((usize, usize), Complex64)]) -> Complex64 {
        let mut v = self.right.clone();
        for &((i, j), z) in word {
            apply_phase_pulse_to_vector(4, i, j, z, &mut v);
        }
        self.left.iter().zip(v.iter()).map(|(l, x)| l.conj() * x).sum()
    }

    /// E(t1, t2) for the canonical two-pulse word V = U23(t2) U12(t1).
    pub fn eval(&self, t1: Duration, t2: Duration) -> Complex64 {
        self.eval_word_phases(&[((1, 2), t1.phase()), ((2, 3), t2.phase())])
    }

    pub fn eval_f64(&self, t1: f64, t2: f64) -> Complex64 {
        self.eval_word_phases(&[((1, 2), phase_of(t1)), ((2, 3), phase_of(t2))])
    }
}

fn phase_of(t: f64) -> Complex64 {
    Complex64::new((std::f64::consts::PI * t).cos(), -(std::f64::consts::PI * t).sin())
}

/// The constraint element E(t1, t2) for V = U23(t2) U12(t1).
pub fn constraint_element(t1: Duration, t2: Duration) -> Complex64 {
    ConstraintEvaluator::new().eval(t1, t2)
}

/// Coefficients of E(t1, t2) = alpha + beta e^{-i pi t1} + gamma e^{-i pi t2}
/// + delta e^{-i pi (t1 + t2)}, together with the overlap F = E(0, 0).
#[derive(Clone, Copy, Debug)]
pub struct ConstraintCoefficients {
    pub alpha: Complex64,
    pub beta: Complex64,
    pub gamma: Complex64,
    pub delta: Complex64,
    pub f: f64,
}

impl ConstraintCoefficients {
    pub fn eval(&self, t1: Duration, t2: Duration) -> Complex64 {
        self.eval_phases(t1.phase(), t2.phase())
    }

    pub fn eval_phases(&self, z1: Complex64, z2: Complex64) -> Complex64 {
        self.alpha + self.beta * z1 + self.gamma * z2 + self.delta * z1 * z2
    }

    /// Largest deviation from the pattern -alpha = beta = gamma = delta = F/2.
    pub fn pattern_residual(&self) -> f64 {
        let half_f = Complex64::new(self.f / 2.0, 0.0);
        [(-self.alpha - half_f), (self.beta - half_f), (self.gamma - half_f), (self.delta - half_f)]
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

/// Inverts the four corner evaluations t1 t2 = 00, 01, 10, 11 into the phase
/// coefficients.
pub fn extract_coefficients() -> ConstraintCoefficients {
    let ev = ConstraintEvaluator::new();
    let zero = Duration::zero();
    let one = Duration::swap();
    let e00 = ev.eval(zero, zero);
    let e01 = ev.eval(zero, one);
    let e10 = ev.eval(one, zero);
    let e11 = ev.eval(one, one);
    ConstraintCoefficients {
        alpha: (e00 + e01 + e10 + e11) / 4.0,
        beta: (e00 + e01 - e10 - e11) / 4.0,
        gamma: (e00 - e01 + e10 - e11) / 4.0,
        delta: (e00 - e01 - e10 + e11) / 4.0,
        f: compute_f(),
    }
}

/// A two-pulse solution of the constraint: V = U23(t2) U12(t1).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct VSolution {
    pub t1: Duration,
    pub t2: Duration,
}

impl VSolution {
    pub fn as_sequence(&self) -> PulseSequence {
        PulseSequence::with_pulses(
            4,
            vec![
                ExchangePulse::new(1, 2, self.t1).expect("valid pair"),
                ExchangePulse::new(2, 3, self.t2).expect("valid pair"),
            ],
        )
        .expect("V fits on four spins")
    }
}

/// Minimizes |A + B z| over unit-modulus z; returns (t, min) with
/// z = e^{-i pi t}, t in [0, 2).
fn minimize_affine(a: Complex64, b: Complex64, fallback: f64) -> (f64, f64) {
    if b.norm() < 1e-300 {
        return (fallback, a.norm());
    }
    let z = -(a / b);
    if z.norm() < 1e-300 {
        return (fallback, (a.norm() - b.norm()).abs());
    }
    let z = z / z.norm();
    // z = e^{-i pi t} means t = -arg(z)/pi mod 2.
    let t = (-z.arg() / std::f64::consts::PI).rem_euclid(2.0);
    (t, (a + b * z).norm())
}

/// Coordinate descent on |E| over the word's durations; each coordinate
/// minimization is exact because E is affine in each pulse phase.
fn refine_word(
    ev: &ConstraintEvaluator,
    pairs: &[(usize, usize)],
    ts: &mut [f64],
    iters: usize,
) -> f64 {
    let mut best = f64::INFINITY;
    for _ in 0..iters {
        for k in 0..ts.len() {
            let word = |tk: f64| -> Vec<((usize, usize), Complex64)> {
                pairs
                    .iter()
                    .zip(ts.iter())
                    .enumerate()
                    .map(|(idx, (&pair, &t))| (pair, phase_of(if idx == k { tk } else { t })))
                    .collect()
            };
            // E = A + B z_k: two evaluations at z_k = +-1 pin A and B.
            let e_plus = ev.eval_word_phases(&word(0.0));
            let e_minus = ev.eval_word_phases(&word(1.0));
            let a = (e_plus + e_minus) / 2.0;
            let b = (e_plus - e_minus) / 2.0;
            let (t_new, value) = minimize_affine(a, b, ts[k]);
            ts[k] = t_new;
            best = value;
        }
        if best < 1e-15 {
            break;
        }
    }
    best
}

/// All exact two-pulse solutions of the constraint on the default grid.
pub fn solve_two_pulse() -> Result<Vec<VSolution>> {
    solve_two_pulse_with_grid(DEFAULT_GRID_DENOMINATOR)
}

/// Scans the rational grid {p/d} x {p/d} over [0,2)^2, refines candidate
/// cells by coordinate descent, snaps the refined roots to low-denominator
/// rationals, and re-verifies each snapped pair exactly through the phase
/// identity -1 + z1 + z2 + z1 z2 = 0 (the coefficient pattern certified by
/// `extract_coefficients`). Returns solutions in lexicographic order.
pub fn solve_two_pulse_with_grid(d: i64) -> Result<Vec<VSolution>> {
    let ev = ConstraintEvaluator::new();
    let coeffs = extract_coefficients();
    if coeffs.pattern_residual() > 1e-12 {
        return Err(Error::Structural {
            name: "coefficient_pattern",
            residual: coeffs.pattern_residual(),
        });
    }
    let f_abs = coeffs.f.abs();
    // Any true zero has a grid neighbor within pi |F| sqrt(2) / d of zero;
    // be generous so no candidate cell is missed.
    let threshold = 2.0 * std::f64::consts::PI * f_abs / d as f64;
    let mut found: Vec<VSolution> = Vec::new();
    for p1 in 0..(2 * d) {
        for p2 in 0..(2 * d) {
            let (g1, g2) = (p1 as f64 / d as f64, p2 as f64 / d as f64);
            if ev.eval_f64(g1, g2).norm() > threshold {
                continue;
            }
            let mut ts = [g1, g2];
            let residual = refine_word(&ev, &[(1, 2), (2, 3)], &mut ts, 50);
            if residual > 1e-12 {
                continue; // a shallow minimum, not a zero
            }
            let t1 = snap_to_rational(ts[0], crate::duration::DEFAULT_MAX_DENOMINATOR)?;
            let t2 = snap_to_rational(ts[1], crate::duration::DEFAULT_MAX_DENOMINATOR)?;
            if !two_pulse_solution_is_exact(t1, t2) {
                continue;
            }
            let sol = VSolution { t1, t2 };
            if !found.contains(&sol) {
                found.push(sol);
            }
        }
    }
    if found.is_empty() {
        return Err(Error::NoSolutions);
    }
    found.sort();
    Ok(found)
}

/// Exact check of E(t1, t2) = 0 via the cyclotomic phase identity
/// -1 + z1 + z2 + z1 z2 = 0, z_k = e^{-i pi t_k}.
pub fn two_pulse_solution_is_exact(t1: Duration, t2: Duration) -> bool {
    let (r1, r2) = (t1.ratio(), t2.ratio());
    phase_sum_is_zero(&[
        (-1, Rational64::from_integer(0)),
        (1, r1),
        (1, r2),
        (1, r1 + r2),
    ])
}

/// Single-pulse analysis: E(t) = A + B e^{-i pi t} has a zero iff |A| = |B|.
#[derive(Clone, Copy, Debug)]
pub struct PairMinimality {
    pub pair: (usize, usize),
    pub a_abs: f64,
    pub b_abs: f64,
    /// | |A| - |B| | = min over t of |E(t)|; positive means no solution.
    pub gap: f64,
}

#[derive(Clone, Debug)]
pub struct MinimalityReport {
    pub pairs: Vec<PairMinimality>,
}

impl MinimalityReport {
    /// Smallest gap over all pairs.
    pub fn min_gap(&self) -> f64 {
        self.pairs.iter().map(|p| p.gap).fold(f64::INFINITY, f64::min)
    }
}

/// Shows that no single pulse V = U_ij(t) can satisfy the constraint: for
/// each pair, A and B are read off E(0) and E(1) and |A| != |B|.
pub fn verify_two_pulse_minimality() -> MinimalityReport {
    let ev = ConstraintEvaluator::new();
    let pairs = V_PAIRS
        .iter()
        .map(|&(i, j)| {
            let e0 = ev.eval_word_phases(&[((i, j), Complex64::new(1.0, 0.0))]);
            let e1 = ev.eval_word_phases(&[((i, j), Complex64::new(-1.0, 0.0))]);
            let a = (e0 + e1) / 2.0;
            let b = (e0 - e1) / 2.0;
            PairMinimality {
                pair: (i, j),
                a_abs: a.norm(),
                b_abs: b.norm(),
                gap: (a.norm() - b.norm()).abs(),
            }
        })
        .collect();
    MinimalityReport { pairs }
}

/// The six-pulse R block on four local spins, chronologically
/// V, U12(1), U34(1), V^-1 with V = U23(t2) U12(t1).
pub fn build_r(v: &VSolution) -> PulseSequence {
    build_r_from(&v.as_sequence()).expect("two-pulse V always fits")
}

/// R for an arbitrary constraint-satisfying pulse word V on four spins:
/// chronologically V, U12(1), U34(1), then V^-1.
pub fn build_r_from(v_sequence: &PulseSequence) -> Result<PulseSequence> {
    if v_sequence.n() != 4 {
        return Err(Error::Invalid(format!("V acts on 4 spins, got {}", v_sequence.n())));
    }
    let mut seq = v_sequence.clone();
    seq.push(ExchangePulse::new(1, 2, Duration::swap())?)?;
    seq.push(ExchangePulse::new(3, 4, Duration::swap())?)?;
    seq.extend(&v_sequence.inverted())?;
    Ok(seq)
}

/// Verification record for an R candidate.
#[derive(Clone, Debug)]
pub struct RVerification {
    pub checks: Vec<Check>,
    /// The 2x2 block on the (c = 1/2, d = 1) target space, relative to the
    /// d = 0 phase.
    pub m: CMat,
    /// Axis of M = n.sigma when the block checks pass.
    pub nhat: Option<[f64; 3]>,
    /// Phase of the d = 0 sector.
    pub d0_phase: Complex64,
    pub pass: bool,
}

fn c_half_d1_states() -> [CVec; 2] {
    // (1 ((23)_b 4)_1/2)_1 at sz = 1 for b = 0, 1: an orthonormal basis of
    // the (c = 1/2, d = 1) sector at fixed sz.
    core::array::from_fn(|b| {
        let pair_spin = if b == 0 { Half::ZERO } else { Half::ONE };
        let tree = CouplingTree::node(
            Half::ONE,
            CouplingTree::leaf(1),
            CouplingTree::node(
                Half::HALF,
                CouplingTree::pair(2, 3, pair_spin),
                CouplingTree::leaf(4),
            ),
        );
        coupled_state(&tree, Half::ONE, 4).expect("valid R basis tree").vector
    })
}

fn d0_states() -> [CVec; 2] {
    // ((12)_b (34)_b)_0 at sz = 0 for b = 0, 1 span the d = 0 sector.
    core::array::from_fn(|b| {
        let spin = if b == 0 { Half::ZERO } else { Half::ONE };
        let tree = CouplingTree::node(
            Half::ZERO,
            CouplingTree::pair(1, 2, spin),
            CouplingTree::pair(3, 4, spin),
        );
        coupled_state(&tree, Half::ZERO, 4).expect("valid d0 tree").vector
    })
}

/// Checks the defining properties of R on its four-spin register: it
/// commutes with the c = 3/2 projector of spins {2,3,4}, acts as the
/// identity (up to phase) on the d = 0 sector, multiplies the stretched
/// c = 3/2, d = 1 state by -1 relative to that phase, squares to the
/// identity up to phase, and restricts on the (c = 1/2, d = 1) block to a
/// unitary, Hermitian, traceless involution M = n.sigma.
pub fn verify_r(seq: &PulseSequence, tol: f64) -> Result<RVerification> {
    if seq.n() != 4 {
        return Err(Error::Invalid(format!("R acts on 4 spins, got {}", seq.n())));
    }
    let r = sequence_unitary(seq);
    let mut checks = Vec::new();

    // c preservation.
    let proj = sector_projector(4, &[2, 3, 4], Half::THREE_HALVES)?;
    let comm = frobenius_norm(&(r.dot(&proj) - proj.dot(&r)));
    checks.push(Check::new("r_preserves_c", comm, tol));

    // R^2 = identity up to global phase.
    let r2 = r.dot(&r);
    let square_residual = match equal_up_to_global_phase(&r2, &identity(16), tol)? {
        Some(_) => 0.0,
        None => max_abs_diff(&r2, &identity(16)),
    };
    checks.push(Check::new("r_squares_to_identity", square_residual, tol));

    // d = 0 sector acts as the identity up to one phase.
    let d0 = d0_states();
    let lambda = {
        let w = r.dot(&d0[0]);
        d0[0].iter().zip(w.iter()).map(|(p, x)| p.conj() * x).sum::<Complex64>()
    };
    let mut d0_residual = (lambda.norm() - 1.0).abs();
    for psi in &d0 {
        let w = r.dot(psi);
        let diff: f64 = w
            .iter()
            .zip(psi.iter())
            .map(|(x, p)| (x - p * lambda).norm_sqr())
            .sum::<f64>()
            .sqrt();
        d0_residual = d0_residual.max(diff);
    }
    checks.push(Check::new("r_d0_identity", d0_residual, tol));

    // The stretched c = 3/2, d = 1 state picks up -1 relative to lambda.
    let (_, stretched) = constraint_states(Half::ONE)?;
    let w = r.dot(&stretched.vector);
    let flip: f64 = w
        .iter()
        .zip(stretched.vector.iter())
        .map(|(x, p)| (x + p * lambda).norm_sqr())
        .sum::<f64>()
        .sqrt();
    checks.push(Check::new("r_c32_eigenvalue", flip, tol));

    // The (c = 1/2, d = 1) block, relative to lambda.
    let basis = c_half_d1_states();
    let mut m = Array2::from_elem((2, 2), Complex64::new(0.0, 0.0));
    let mut block_leakage: f64 = 0.0;
    for (col, psi) in basis.iter().enumerate() {
        let w = r.dot(psi);
        let mut inside = 0.0;
        for (row, phi) in basis.iter().enumerate() {
            let g: Complex64 = phi.iter().zip(w.iter()).map(|(p, x)| p.conj() * x).sum();
            m[(row, col)] = g / lambda;
            inside += g.norm_sqr();
        }
        let total: f64 = w.iter().map(|x| x.norm_sqr()).sum();
        block_leakage = block_leakage.max((total - inside).max(0.0).sqrt());
    }
    checks.push(Check::new("r_block_leakage", block_leakage, tol));
    checks.push(Check::new("r_block_unitary", unitarity_residual(&m), tol));
    checks.push(Check::new("r_block_hermitian", max_abs_diff(&m, &dagger(&m)), tol));
    checks.push(Check::new("r_block_traceless", (m[(0, 0)] + m[(1, 1)]).norm(), tol));
    checks.push(Check::new("r_block_involutive", max_abs_diff(&m.dot(&m), &identity(2)), tol));

    let pass = all_pass(&checks);
    let nhat = if pass {
        let axis = [m[(1, 0)].re, m[(1, 0)].im, m[(0, 0)].re];
        let norm = axis.iter().map(|x| x * x).sum::<f64>().sqrt();
        Some(axis.map(|x| x / norm))
    } else {
        None
    };
    Ok(RVerification { checks, m, nhat, d0_phase: lambda, pass })
}

/// Interleaves three copies of `inner` (shifted one spin down the chain)
/// with two SWAPs on the top pair: [inner', S12, inner', S12, inner'].
pub fn swap_interleaved(inner: &PulseSequence) -> Result<PulseSequence> {
    let n = inner.n() + 1;
    let shifted = inner.reindexed(n, 1)?;
    let mut seq = PulseSequence::new(n);
    let swap = ExchangePulse::new(1, 2, Duration::swap())?;
    seq.extend(&shifted)?;
    seq.push(swap)?;
    seq.extend(&shifted)?;
    seq.push(swap)?;
    seq.extend(&shifted)?;
    Ok(seq)
}

/// The three-spin five-pulse ladder: r-pulses on the bottom pair (2,3)
/// interleaved with SWAPs on the top pair (1,2). `swap` selects r = 1.
pub fn three_spin_base_sequence(swap: bool) -> PulseSequence {
    let r = if swap { Duration::swap() } else { Duration::zero() };
    let inner = PulseSequence::with_pulses(
        2,
        vec![ExchangePulse::new(1, 2, r).expect("valid pair")],
    )
    .expect("fits");
    swap_interleaved(&inner).expect("three-spin ladder is valid")
}

/// The full 20-pulse sequence on the six-spin register: R on global spins
/// (3,4,5,6) three times, interleaved with SWAPs on (2,3).
pub fn build_full_sequence(v: &VSolution) -> PulseSequence {
    build_full_sequence_from(&v.as_sequence()).expect("two-pulse V always fits")
}

/// The full two-qubit sequence for an arbitrary constraint-satisfying V.
pub fn build_full_sequence_from(v_sequence: &PulseSequence) -> Result<PulseSequence> {
    let five = swap_interleaved(&build_r_from(v_sequence)?)?;
    five.reindexed(6, 1)
}

/// End-to-end derivation record.
#[derive(Clone, Debug)]
pub struct DerivationReport {
    pub coefficients: ConstraintCoefficients,
    pub solutions: Vec<VSolution>,
    pub chosen: VSolution,
    pub minimality: MinimalityReport,
    pub r_sequence: PulseSequence,
    pub r_verification: RVerification,
    pub full_sequence: PulseSequence,
    pub gate: GateReport,
    pub elevated: ElevatedBlockReport,
    pub stats: SequenceStats,
    pub checks: Vec<Check>,
}

impl DerivationReport {
    pub fn pass(&self) -> bool {
        all_pass(&self.checks)
    }
}

/// Runs the whole construction: coefficients, solutions, minimality, R,
/// the full sequence, gate extraction, and the elevated block check.
/// Deterministic; the first solution in lexicographic order is used.
pub fn derive() -> Result<DerivationReport> {
    derive_with_tol(DEFAULT_TOL)
}

pub fn derive_with_tol(tol: f64) -> Result<DerivationReport> {
    let mut checks = Vec::new();

    let coefficients = extract_coefficients();
    checks.push(Check::new("coefficient_pattern", coefficients.pattern_residual(), 1e-12));
    checks.push(Check::new(
        "coefficient_f_magnitude",
        if coefficients.f.abs() > 0.1 { 0.0 } else { 0.1 - coefficients.f.abs() },
        0.0,
    ));

    let solutions = solve_two_pulse()?;
    checks.push(Check::flag("solution_count_is_two", solutions.len() == 2));
    let ev = ConstraintEvaluator::new();
    for (k, sol) in solutions.iter().enumerate() {
        checks.push(Check::new(
            format!("solution_{}_residual", k + 1),
            ev.eval(sol.t1, sol.t2).norm(),
            tol,
        ));
    }

    let minimality = verify_two_pulse_minimality();
    for p in &minimality.pairs {
        checks.push(Check::new(
            format!("single_pulse_gap_excess_{}{}", p.pair.0, p.pair.1),
            (1e-6 - p.gap).max(0.0),
            0.0,
        ));
    }

    let chosen = solutions[0];
    let r_sequence = build_r(&chosen);
    let r_verification = verify_r(&r_sequence, tol)?;
    checks.extend(r_verification.checks.iter().cloned());

    let full_sequence = build_full_sequence(&chosen);
    let u = sequence_unitary(&full_sequence);
    let gate = extract_gate(&u)?;
    checks.push(Check::new("gate_leakage", gate.leakage, tol));
    match classify_controlled_nsigma(&gate, tol) {
        Ok(nhat) => {
            let unit = (nhat.iter().map(|x| x * x).sum::<f64>().sqrt() - 1.0).abs();
            checks.push(Check::new("gate_controlled_nsigma_axis_unit", unit, tol));
        }
        Err(reason) => {
            checks.push(Check::flag(format!("gate_controlled_nsigma ({reason})"), false));
        }
    }
    match gate.makhlin {
        Some((g1, g2)) => {
            checks.push(Check::new("makhlin_g1_matches_cnot", g1.norm(), 1e-9));
            checks.push(Check::new("makhlin_g2_matches_cnot", (g2 - 1.0).abs(), 1e-9));
        }
        None => checks.push(Check::flag("makhlin_computable", false)),
    }

    let five_spin = swap_interleaved(&build_r(&chosen))?;
    let elevated = elevated_structure(&five_spin, tol)?;
    checks.push(Check::new("elevated_off_block_leakage", elevated.off_block_leakage, tol));
    checks.push(Check::new("elevated_b00_identity", elevated.b00_identity_residual, tol));
    checks.push(Check::new("elevated_same_m_across_f", elevated.b11_b33_residual, tol));

    let stats = sequence_stats(&full_sequence);
    checks.push(Check::flag(
        "stats_counts_8_6_6",
        (stats.n_swap, stats.n_sqrt, stats.n_invsqrt) == (8, 6, 6),
    ));
    checks.push(Check::flag("stats_nontrivial_12", stats.n_nontrivial == 12));
    checks.push(Check::flag("stats_parity_even", stats.parity == crate::rewrite::Parity::Even));
    checks.push(Check::flag("nearest_neighbor_only", full_sequence.all_nearest_neighbor()));

    Ok(DerivationReport {
        coefficients,
        solutions,
        chosen,
        minimality,
        r_sequence,
        r_verification,
        full_sequence,
        gate,
        elevated,
        stats,
        checks,
    })
}

/// Enumerates alternating-pair pulse words over {12, 23, 34} with up to
/// `max_pulses` pulses, scans the duration grid {p/d}, refines, snaps, and
/// returns every distinct solution with |E| <= tol as a four-spin sequence.
/// Results are ordered by word, then durations, lexicographically.
pub fn search_v(max_pulses: usize, grid_denominator: i64) -> Result<Vec<PulseSequence>> {
    if max_pulses > MAX_SEARCH_PULSES {
        return Err(Error::Invalid(format!(
            "search is bounded at {MAX_SEARCH_PULSES} pulses, got {max_pulses}"
        )));
    }
    if !(1..=crate::duration::DEFAULT_MAX_DENOMINATOR).contains(&grid_denominator) {
        return Err(Error::Invalid(format!("grid denominator {grid_denominator} out of range")));
    }
    let ev = ConstraintEvaluator::new();
    let f_abs = compute_f().abs();
    let tol = 1e-12;
    let mut results: Vec<PulseSequence> = Vec::new();

    for len in 1..=max_pulses {
        let mut words: Vec<Vec<(usize, usize)>> = vec![Vec::new()];
        for _ in 0..len {
            let mut next = Vec::new();
            for word in &words {
                for &pair in &V_PAIRS {
                    if word.last() != Some(&pair) {
                        let mut w = word.clone();
                        w.push(pair);
                        next.push(w);
                    }
                }
            }
            words = next;
        }
        words.sort();

        let d = grid_denominator;
        let threshold = 2.0 * std::f64::consts::PI * f_abs * len as f64 / d as f64;
        for word in words {
            let mut seen: Vec<Vec<Duration>> = Vec::new();
            let total = (2 * d as usize).pow(len as u32);
            for cell in 0..total {
                let mut ts: Vec<f64> = Vec::with_capacity(len);
                let mut rem = cell;
                for _ in 0..len {
                    ts.push((rem % (2 * d as usize)) as f64 / d as f64);
                    rem /= 2 * d as usize;
                }
                let phases: Vec<((usize, usize), Complex64)> =
                    word.iter().zip(&ts).map(|(&p, &t)| (p, phase_of(t))).collect();
                if ev.eval_word_phases(&phases).norm() > threshold {
                    continue;
                }
                let residual = refine_word(&ev, &word, &mut ts, 50);
                if residual > tol {
                    continue;
                }
                let snapped: Result<Vec<Duration>> = ts
                    .iter()
                    .map(|&t| snap_to_rational(t, crate::duration::DEFAULT_MAX_DENOMINATOR))
                    .collect();
                let Ok(snapped) = snapped else { continue };
                let phases: Vec<((usize, usize), Complex64)> =
                    word.iter().zip(&snapped).map(|(&p, &t)| (p, t.phase())).collect();
                if ev.eval_word_phases(&phases).norm() > tol {
                    continue;
                }
                if seen.contains(&snapped) {
                    continue;
                }
                seen.push(snapped);
            }
            seen.sort();
            for durations in seen {
                let pulses: Vec<ExchangePulse> = word
                    .iter()
                    .zip(&durations)
                    .map(|(&(i, j), &t)| ExchangePulse::new(i, j, t).expect("valid pair"))
                    .collect();
                results.push(PulseSequence::with_pulses(4, pulses)?);
            }
        }
    }
    Ok(results)
}
