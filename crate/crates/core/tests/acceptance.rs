//! Acceptance suite: every headline property of the gate construction, one
//! test per criterion, each printing a PASS line with its worst residual
//! (visible with `--nocapture`).

use ndarray::Array1;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spinseq::coupling::{
    compute_f, constraint_states, coupled_state, overlap, CouplingTree,
};
use spinseq::duration::Duration;
use spinseq::encoding::{
    classify_controlled_nsigma, elevated_structure, extract_gate, three_spin_structure,
};
use spinseq::half::Half;
use spinseq::operator::{
    equal_up_to_global_phase, exchange_projectors, identity, max_abs_diff, pulse_unitary,
    sequence_unitary, spin_bit, CVec,
};
use spinseq::pulse::PulseSequence;
use spinseq::rewrite::{
    apply_step, random_step, sequence_stats, Parity, RewriteStep,
};
use spinseq::synthesis::{
    build_full_sequence, build_r, extract_coefficients, solve_two_pulse,
    solve_two_pulse_with_grid, swap_interleaved, three_spin_base_sequence,
    verify_r, verify_two_pulse_minimality, ConstraintEvaluator, VSolution,
};

fn pass(criterion: &str, residual: f64) {
    println!("ACCEPTANCE {criterion}: PASS (worst residual {residual:.3e})");
}

#[test]
fn acceptance_01_pulse_spectrum() {
    // Eigenvalue 1 on the singlet sector, e^{-i pi t} on the triplet sector,
    // for each quarter-turn duration: U Pi_s = Pi_s, U Pi_t = z Pi_t.
    let mut worst: f64 = 0.0;
    for (p, q) in [(0i64, 1i64), (1, 2), (1, 1), (3, 2)] {
        let t = Duration::new(p, q).unwrap();
        for (n, i, j) in [(2usize, 1usize, 2usize), (3, 1, 2), (3, 2, 3)] {
            let u = pulse_unitary(n, i, j, t).unwrap();
            let (ps, pt) = exchange_projectors(n, i, j).unwrap();
            let z = t.phase();
            worst = worst.max(max_abs_diff(&u.dot(&ps), &ps));
            worst = worst.max(max_abs_diff(&u.dot(&pt), &pt.mapv(|x| x * z)));
        }
    }
    assert!(worst < 1e-12, "spectrum residual {worst}");
    pass("1 pulse spectrum", worst);
}

#[test]
fn acceptance_02_central_swaps_diagonal() {
    // U12(1) U34(1) in the coupled basis ordered b b' d = {000, 110 | 011,
    // 101, 111} equals diag(1, 1, -1, -1, 1).
    let spin = |x: u8| if x == 0 { Half::ZERO } else { Half::ONE };
    let labels: [(u8, u8, u8); 5] = [(0, 0, 0), (1, 1, 0), (0, 1, 1), (1, 0, 1), (1, 1, 1)];
    let states: Vec<CVec> = labels
        .iter()
        .map(|&(b, bp, d)| {
            let tree = CouplingTree::node(
                spin(d),
                CouplingTree::pair(1, 2, spin(bp)),
                CouplingTree::pair(3, 4, spin(b)),
            );
            coupled_state(&tree, Half::ZERO, 4).unwrap().vector
        })
        .collect();
    let seq = PulseSequence::from_tuples(4, &[(1, 2, 1, 1), (3, 4, 1, 1)]).unwrap();
    let u = sequence_unitary(&seq);
    let want = [1.0, 1.0, -1.0, -1.0, 1.0];
    let mut worst: f64 = 0.0;
    for (r, phi) in states.iter().enumerate() {
        for (c, psi) in states.iter().enumerate() {
            let w = u.dot(psi);
            let g: Complex64 = phi.iter().zip(w.iter()).map(|(p, x)| p.conj() * x).sum();
            let target = if r == c { Complex64::new(want[r], 0.0) } else { Complex64::new(0.0, 0.0) };
            worst = worst.max((g - target).norm());
        }
    }
    assert!(worst < 1e-10, "central-SWAP diagonal residual {worst}");
    pass("2 central SWAPs diagonal", worst);
}

/// Independent oracle for F: the spin-3/2 triple by symmetrization, outer
/// couplings by lowering operators plus orthogonality. No Clebsch-Gordan
/// machinery.
mod oracle {
    use super::*;

    fn bit(n: usize, i: usize) -> usize {
        1 << spin_bit(n, i)
    }

    fn zeros(n: usize) -> CVec {
        Array1::from_elem(1 << n, Complex64::new(0.0, 0.0))
    }

    fn lower(n: usize, spins: &[usize], v: &CVec) -> CVec {
        let mut out = zeros(n);
        for (idx, amp) in v.iter().enumerate() {
            if amp.norm_sqr() == 0.0 {
                continue;
            }
            for &s in spins {
                if idx & bit(n, s) == 0 {
                    out[idx | bit(n, s)] += amp;
                }
            }
        }
        out
    }

    fn normalized(v: &CVec) -> CVec {
        let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        v.mapv(|x| x / norm)
    }

    pub fn dot(a: &CVec, b: &CVec) -> Complex64 {
        a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
    }

    fn merge(a: &CVec, b: &CVec) -> CVec {
        let mut out = Array1::from_elem(a.len(), Complex64::new(0.0, 0.0));
        for (ia, va) in a.iter().enumerate() {
            if va.norm_sqr() == 0.0 {
                continue;
            }
            for (ib, vb) in b.iter().enumerate() {
                if vb.norm_sqr() == 0.0 {
                    continue;
                }
                out[ia | ib] += va * vb;
            }
        }
        out
    }

    fn symmetric_triple(n: usize, spins: &[usize; 3], twice_m: i32) -> CVec {
        let downs = ((3 - twice_m) / 2) as usize;
        let mut v = zeros(n);
        let mut count = 0usize;
        for pick in 0..8usize {
            if (pick as u32).count_ones() as usize != downs {
                continue;
            }
            let mut mask = 0usize;
            for (b, &s) in spins.iter().enumerate() {
                if pick & (1 << b) != 0 {
                    mask |= bit(n, s);
                }
            }
            v[mask] += Complex64::new(1.0, 0.0);
            count += 1;
        }
        v.mapv(|x| x / (count as f64).sqrt())
    }

    fn symmetric_pair(n: usize, i: usize, j: usize, twice_m: i32) -> CVec {
        let mut v = zeros(n);
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        match twice_m {
            2 => v[0] = Complex64::new(1.0, 0.0),
            0 => {
                v[bit(n, i)] = h;
                v[bit(n, j)] = h;
            }
            _ => v[bit(n, i) | bit(n, j)] = Complex64::new(1.0, 0.0),
        }
        v
    }

    fn orthogonal_j1m1(e1: &CVec, e2: &CVec, stretched: &CVec) -> CVec {
        let (c1, c2) = (dot(e1, stretched), dot(e2, stretched));
        let mut v = &e1.mapv(|x| x * c2.conj()) - &e2.mapv(|x| x * c1.conj());
        if dot(e1, &v).re < 0.0 {
            v = v.mapv(|x| -x);
        }
        normalized(&v)
    }

    /// F from scratch on four spins at M = 1.
    pub fn f_value() -> f64 {
        let n = 4;
        let mut up1 = zeros(n);
        up1[0] = Complex64::new(1.0, 0.0);
        let mut down1 = zeros(n);
        down1[bit(n, 1)] = Complex64::new(1.0, 0.0);

        let right = {
            let e1 = merge(&up1, &symmetric_triple(n, &[2, 3, 4], 1));
            let e2 = merge(&down1, &symmetric_triple(n, &[2, 3, 4], 3));
            let top = merge(&up1, &symmetric_triple(n, &[2, 3, 4], 3));
            let stretched = normalized(&lower(n, &[1, 2, 3, 4], &top));
            orthogonal_j1m1(&e1, &e2, &stretched)
        };
        let left = {
            let e1 = merge(&symmetric_pair(n, 1, 2, 2), &symmetric_pair(n, 3, 4, 0));
            let e2 = merge(&symmetric_pair(n, 1, 2, 0), &symmetric_pair(n, 3, 4, 2));
            let top = merge(&symmetric_pair(n, 1, 2, 2), &symmetric_pair(n, 3, 4, 2));
            let stretched = normalized(&lower(n, &[1, 2, 3, 4], &top));
            orthogonal_j1m1(&e1, &e2, &stretched)
        };
        let f = dot(&left, &right);
        assert!(f.im.abs() < 1e-14);
        f.re
    }
}

#[test]
fn acceptance_03_constraint_coefficients() {
    let c = extract_coefficients();
    let f_oracle = oracle::f_value();
    let mut worst = (c.f - f_oracle).abs();
    assert!(worst < 1e-12, "F disagrees with the oracle by {worst}");
    assert!(c.f.abs() > 0.1, "|F| = {} too small", c.f.abs());
    worst = worst.max(c.pattern_residual());
    assert!(c.pattern_residual() < 1e-12, "-alpha = beta = gamma = delta = F/2 violated");
    pass("3 constraint coefficients", worst);
}

#[test]
fn acceptance_04_two_pulse_solutions() {
    let expected = vec![
        VSolution { t1: Duration::new(1, 2).unwrap(), t2: Duration::new(3, 2).unwrap() },
        VSolution { t1: Duration::new(3, 2).unwrap(), t2: Duration::new(1, 2).unwrap() },
    ];
    let sols = solve_two_pulse().unwrap();
    assert_eq!(sols, expected, "default-grid solutions differ");
    let ev = ConstraintEvaluator::new();
    let mut worst: f64 = 0.0;
    for s in &sols {
        worst = worst.max(ev.eval(s.t1, s.t2).norm());
    }
    assert!(worst < 1e-10);
    // A denominator-48 scan finds nothing further.
    let fine = solve_two_pulse_with_grid(48).unwrap();
    assert_eq!(fine, expected, "grid-48 scan found extra solutions");
    pass("4 two-pulse solutions", worst);
}

#[test]
fn acceptance_05_two_pulse_minimality() {
    let report = verify_two_pulse_minimality();
    assert_eq!(report.pairs.len(), 3);
    let mut min_gap = f64::INFINITY;
    for p in &report.pairs {
        assert!(
            p.gap > 1e-6,
            "pair {:?} has |A| = {}, |B| = {}: a single pulse could solve the constraint",
            p.pair,
            p.a_abs,
            p.b_abs
        );
        min_gap = min_gap.min(p.gap);
    }
    pass("5 single-pulse minimality", 1e-6 / min_gap);
}

#[test]
fn acceptance_06_r_properties() {
    let mut worst: f64 = 0.0;
    for v in solve_two_pulse().unwrap() {
        let seq = build_r(&v);
        let rep = verify_r(&seq, 1e-10).unwrap();
        for c in &rep.checks {
            assert!(c.pass, "solution {v:?}: check {} at {:.3e}", c.name, c.residual);
            worst = worst.max(c.residual);
        }
        // R^2 = identity up to global phase, stated directly.
        let r = sequence_unitary(&seq);
        let phi = equal_up_to_global_phase(&r.dot(&r), &identity(16), 1e-10)
            .unwrap()
            .expect("R^2 is the identity up to phase");
        worst = worst.max((phi - Complex64::new(1.0, 0.0)).norm());
    }
    assert!(worst < 1e-10);
    pass("6 R properties (both solutions)", worst);
}

#[test]
fn acceptance_07_full_gate() {
    let sols = solve_two_pulse().unwrap();
    let mut worst: f64 = 0.0;
    for v in &sols {
        let full = build_full_sequence(v);
        let u = sequence_unitary(&full);
        let gate = extract_gate(&u).unwrap();
        assert!(gate.leakage < 1e-10, "leakage {}", gate.leakage);
        worst = worst.max(gate.leakage);

        let nhat = classify_controlled_nsigma(&gate, 1e-10)
            .expect("the derived gate is controlled-(n.sigma)");
        let unit = (nhat.iter().map(|x| x * x).sum::<f64>().sqrt() - 1.0).abs();
        assert!(unit < 1e-10);
        worst = worst.max(unit);

        let (g1, g2) = gate.makhlin.expect("unitary gate has invariants");
        assert!(g1.norm() < 1e-9, "G1 = {g1}");
        assert!((g2 - 1.0).abs() < 1e-9, "G2 = {g2}");
        worst = worst.max(g1.norm()).max((g2 - 1.0).abs());

        // Elevated af-block check: the same M in the f = 1/2 and f = 3/2
        // sectors.
        let five = swap_interleaved(&build_r(v)).unwrap();
        let rep = elevated_structure(&five, 1e-10).unwrap();
        assert!(rep.off_block_leakage < 1e-10);
        assert!(rep.b00_identity_residual < 1e-10);
        assert!(rep.b11_b33_residual < 1e-10, "M differs across f sectors");
        worst = worst
            .max(rep.off_block_leakage)
            .max(rep.b00_identity_residual)
            .max(rep.b11_b33_residual);
    }
    pass("7 full gate and elevated blocks", worst);
}

#[test]
fn acceptance_08_counts_and_geometry() {
    let v = solve_two_pulse().unwrap()[0];
    let full = build_full_sequence(&v);
    let stats = sequence_stats(&full);
    assert_eq!(full.len(), 20);
    assert_eq!((stats.n_swap, stats.n_sqrt, stats.n_invsqrt), (8, 6, 6));
    assert_eq!(stats.n_nontrivial, 12);
    assert_eq!(stats.parity, Parity::Even);
    assert!(full.all_nearest_neighbor(), "a pulse is not nearest-neighbor on the chain");
    pass("8 counts and geometry", 0.0);
}

#[test]
fn acceptance_09_rewrite_invariance() {
    let v = solve_two_pulse().unwrap()[0];
    let base = build_full_sequence(&v);
    let u_base = sequence_unitary(&base);
    let stats_base = sequence_stats(&base);
    let mut rng = ChaCha8Rng::seed_from_u64(20260810);
    let mut worst: f64 = 0.0;
    for script in 0..1000 {
        let mut seq = base.clone();
        let steps = rng.gen_range(1..=6);
        for _ in 0..steps {
            let step = random_step(&seq, &mut rng).expect("a step is always applicable");
            seq = apply_step(&seq, &step).unwrap();
        }
        let stats = sequence_stats(&seq);
        assert_eq!(stats.n_nontrivial, stats_base.n_nontrivial, "script {script}");
        assert_eq!(stats.parity, stats_base.parity, "script {script}");
        let phi = equal_up_to_global_phase(&u_base, &sequence_unitary(&seq), 1e-10)
            .unwrap()
            .unwrap_or_else(|| panic!("script {script} moved the unitary"));
        worst = worst.max((phi - Complex64::new(1.0, 0.0)).norm());
    }

    // Fuse/split round-trips are exact: split every nontrivial pulse and
    // fuse it back, demanding bit-identical sequences and unitaries.
    for pos in 0..base.len() {
        let t = base.pulses()[pos].t;
        if !(t.is_sqrt_swap() || t.is_inv_sqrt_swap()) {
            continue;
        }
        let split = apply_step(&base, &RewriteStep::SplitPulseIntoSwap { pos }).unwrap();
        let back = apply_step(&split, &RewriteStep::FuseSwapIntoPulse { pos }).unwrap();
        assert_eq!(back, base);
        assert_eq!(max_abs_diff(&sequence_unitary(&split), &u_base), 0.0);
    }
    assert!(worst < 1e-10);
    pass("9 rewrite invariance (1000 scripts)", worst);
}

#[test]
fn acceptance_10_three_spin_base_case() {
    let mut worst: f64 = 0.0;
    for (swap, want_m) in [(false, 1.0), (true, -1.0)] {
        let seq = three_spin_base_sequence(swap);
        assert_eq!(seq.len(), 5);
        let rep = three_spin_structure(&seq, 1e-10).unwrap();
        let residual = (rep.m - Complex64::new(want_m, 0.0)).norm();
        assert!(
            residual < 1e-10,
            "r = {} gives m = {}, wanted {want_m}",
            swap as u8,
            rep.m
        );
        assert!(rep.structure_residual < 1e-10);
        assert!(rep.off_diagonal_leakage < 1e-10);
        worst = worst.max(residual).max(rep.structure_residual).max(rep.off_diagonal_leakage);
    }
    pass("10 three-spin base case", worst);
}

#[test]
fn sanity_overlap_f_direct() {
    // compute_f agrees with a direct overlap of the two constraint states
    // and with the oracle, and all three match 1/sqrt(3).
    let (l, r) = constraint_states(Half::ONE).unwrap();
    let direct = overlap(&l, &r).re;
    assert!((compute_f() - direct).abs() < 1e-14);
    assert!((direct - 1.0 / 3.0_f64.sqrt()).abs() < 1e-13);
}
