//! Dense operators on the product basis of n spin-1/2 particles.
//!
//! Basis convention: basis index `b` encodes spin `i` (1-based) in bit
//! `n - i`, so spin 1 is the most significant bit; a set bit means the spin
//! is down. Index 0 is the all-up state.
//!
//! An exchange pulse of duration t is U = Pi_s + e^{-i pi t} Pi_t where
//! Pi_s/Pi_t project on the singlet/triplet sector of the pair. Writing the
//! pair permutation P, this is U = (1+z)/2 I + (z-1)/2 P with z = e^{-i pi t},
//! so pulses apply to states and operators in O(4^n) without any matrix
//! exponential.

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::duration::Duration;
use crate::error::{Error, Result};
use crate::pulse::{ExchangePulse, PulseSequence};

pub type CMat = Array2<Complex64>;
pub type CVec = Array1<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Bit position of spin `i` (1-based) in an n-spin basis index.
pub fn spin_bit(n: usize, i: usize) -> usize {
    n - i
}

/// Basis index with the bits of spins i and j exchanged.
fn swap_spins(idx: usize, n: usize, i: usize, j: usize) -> usize {
    let bi = spin_bit(n, i);
    let bj = spin_bit(n, j);
    let x = ((idx >> bi) ^ (idx >> bj)) & 1;
    idx ^ ((x << bi) | (x << bj))
}

fn validate_pair(n: usize, i: usize, j: usize) -> Result<()> {
    if i == 0 || i >= j {
        return Err(Error::InvalidPair { i, j });
    }
    if j > n {
        return Err(Error::PulseOutOfRange { i, j, n });
    }
    Ok(())
}

pub fn identity(dim: usize) -> CMat {
    Array2::eye(dim)
}

/// The permutation operator exchanging spins i and j.
pub fn permutation_operator(n: usize, i: usize, j: usize) -> Result<CMat> {
    validate_pair(n, i, j)?;
    let dim = 1 << n;
    let mut p = Array2::from_elem((dim, dim), ZERO);
    for idx in 0..dim {
        p[(swap_spins(idx, n, i, j), idx)] = ONE;
    }
    Ok(p)
}

/// Singlet and triplet projectors (Pi_s, Pi_t) for the pair (i, j):
/// Pi_s = (I - P)/2, Pi_t = (I + P)/2.
pub fn exchange_projectors(n: usize, i: usize, j: usize) -> Result<(CMat, CMat)> {
    let p = permutation_operator(n, i, j)?;
    let dim = 1 << n;
    let mut ps = Array2::from_elem((dim, dim), ZERO);
    let mut pt = Array2::from_elem((dim, dim), ZERO);
    for r in 0..dim {
        for c in 0..dim {
            let pe = p[(r, c)];
            let id = if r == c { ONE } else { ZERO };
            ps[(r, c)] = (id - pe) * 0.5;
            pt[(r, c)] = (id + pe) * 0.5;
        }
    }
    Ok((ps, pt))
}

/// Applies the pulse unitary on the left of `a` in place: a <- U a.
pub fn apply_pulse_to_matrix(n: usize, pulse: &ExchangePulse, a: &mut CMat) {
    apply_phase_pulse_to_matrix(n, pulse.i, pulse.j, pulse.t.phase(), a);
}

/// Left-multiplication by Pi_s + z Pi_t on pair (i, j), for arbitrary unit z.
pub fn apply_phase_pulse_to_matrix(n: usize, i: usize, j: usize, z: Complex64, a: &mut CMat) {
    let dim = 1 << n;
    let alpha = (ONE + z) * 0.5;
    let beta = (z - ONE) * 0.5;
    for r in 0..dim {
        let s = swap_spins(r, n, i, j);
        if s == r {
            // Symmetric under the exchange: pure triplet, eigenvalue z.
            for c in 0..dim {
                a[(r, c)] *= z;
            }
        } else if s > r {
            for c in 0..dim {
                let x = a[(r, c)];
                let y = a[(s, c)];
                a[(r, c)] = alpha * x + beta * y;
                a[(s, c)] = alpha * y + beta * x;
            }
        }
    }
}

/// v <- U v for a single pulse.
pub fn apply_phase_pulse_to_vector(n: usize, i: usize, j: usize, z: Complex64, v: &mut CVec) {
    let dim = 1 << n;
    let alpha = (ONE + z) * 0.5;
    let beta = (z - ONE) * 0.5;
    for r in 0..dim {
        let s = swap_spins(r, n, i, j);
        if s == r {
            v[r] *= z;
        } else if s > r {
            let x = v[r];
            let y = v[s];
            v[r] = alpha * x + beta * y;
            v[s] = alpha * y + beta * x;
        }
    }
}

/// The unitary of a single exchange pulse, Eq. form U = Pi_s + e^{-i pi t} Pi_t.
pub fn pulse_unitary(n: usize, i: usize, j: usize, t: Duration) -> Result<CMat> {
    validate_pair(n, i, j)?;
    let mut u = identity(1 << n);
    apply_phase_pulse_to_matrix(n, i, j, t.phase(), &mut u);
    Ok(u)
}

/// The unitary of a whole sequence; pulses apply in chronological order, so
/// the result is the right-to-left product of pulse unitaries.
pub fn sequence_unitary(seq: &PulseSequence) -> CMat {
    let mut u = identity(1 << seq.n());
    for p in seq.pulses() {
        apply_pulse_to_matrix(seq.n(), p, &mut u);
    }
    u
}

/// Applies a whole sequence to a state vector.
pub fn apply_sequence_to_vector(seq: &PulseSequence, v: &CVec) -> CVec {
    let mut w = v.clone();
    for p in seq.pulses() {
        apply_phase_pulse_to_vector(seq.n(), p.i, p.j, p.t.phase(), &mut w);
    }
    w
}

pub fn dagger(a: &CMat) -> CMat {
    a.t().mapv(|x| x.conj())
}

pub fn frobenius_norm(a: &CMat) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Frobenius distance from the closest unitary property: ||A^dag A - I||_F.
pub fn unitarity_residual(a: &CMat) -> f64 {
    let g = dagger(a).dot(a);
    let dim = g.nrows();
    frobenius_norm(&(&g - &identity(dim)))
}

fn commutator_norm(a: &CMat, b: &CMat) -> f64 {
    frobenius_norm(&(a.dot(b) - b.dot(a)))
}

/// Tests ||A - phi B||_F <= tol over unit-modulus phi; returns the minimizing
/// phase when the match succeeds.
pub fn equal_up_to_global_phase(a: &CMat, b: &CMat, tol: f64) -> Result<Option<Complex64>> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { lhs: a.nrows(), rhs: b.nrows() });
    }
    // ||A - phi B||^2 is minimized by phi = tr(B^dag A)/|tr(B^dag A)|.
    let z: Complex64 = a.iter().zip(b.iter()).map(|(x, y)| y.conj() * x).sum();
    let phi = if z.norm() > 1e-300 {
        z / z.norm()
    } else {
        // Orthogonal matrices: no preferred phase, fall back to the largest entry.
        match b.iter().zip(a.iter()).max_by(|(x, _), (y, _)| {
            x.norm().partial_cmp(&y.norm()).unwrap()
        }) {
            Some((be, ae)) if be.norm() > 1e-300 => {
                let r = ae / be;
                if r.norm() > 1e-300 { r / r.norm() } else { ONE }
            }
            _ => ONE,
        }
    };
    let diff = a - &b.mapv(|x| x * phi);
    let dist = frobenius_norm(&diff);
    Ok(if dist <= tol { Some(phi) } else { None })
}

/// Total S_z, diagonal in the product basis.
pub fn total_sz(n: usize) -> CMat {
    let dim = 1 << n;
    let mut m = Array2::from_elem((dim, dim), ZERO);
    for idx in 0..dim {
        let downs = (idx as u32).count_ones() as f64;
        m[(idx, idx)] = Complex64::new(n as f64 / 2.0 - downs, 0.0);
    }
    m
}

/// Total raising operator S_+ = sum_i S_i^+.
pub fn total_raising(n: usize) -> CMat {
    let dim = 1 << n;
    let mut m = Array2::from_elem((dim, dim), ZERO);
    for idx in 0..dim {
        for i in 1..=n {
            let bit = 1 << spin_bit(n, i);
            if idx & bit != 0 {
                m[(idx & !bit, idx)] += ONE;
            }
        }
    }
    m
}

/// Total spin squared of a subset of spins, acting as identity elsewhere:
/// S^2 = sum_{i<j} P_ij + (3k/4 - k(k-1)/4) I over the k subset spins.
pub fn subset_s2(n: usize, spins: &[usize]) -> Result<CMat> {
    let dim = 1 << n;
    let k = spins.len();
    for &s in spins {
        if s == 0 || s > n {
            return Err(Error::PulseOutOfRange { i: s, j: s, n });
        }
    }
    let mut m = Array2::from_elem((dim, dim), ZERO);
    for a in 0..k {
        for b in (a + 1)..k {
            let (i, j) = (spins[a].min(spins[b]), spins[a].max(spins[b]));
            if i == j {
                return Err(Error::InvalidPair { i, j });
            }
            for idx in 0..dim {
                m[(swap_spins(idx, n, i, j), idx)] += ONE;
            }
        }
    }
    let shift = 0.75 * k as f64 - (k * (k - 1)) as f64 / 4.0;
    for idx in 0..dim {
        m[(idx, idx)] += Complex64::new(shift, 0.0);
    }
    Ok(m)
}

pub fn total_s2(n: usize) -> CMat {
    let spins: Vec<usize> = (1..=n).collect();
    subset_s2(n, &spins).expect("full spin set is always valid")
}

/// True when U commutes with total S_z, total S_+, and total S^2 within tol.
/// Every exchange-pulse product is rotationally invariant; single-spin gates
/// are not.
pub fn rotational_invariance_check(u: &CMat, tol: f64) -> bool {
    let dim = u.nrows();
    debug_assert!(dim.is_power_of_two());
    let n = dim.trailing_zeros() as usize;
    commutator_norm(u, &total_sz(n)) <= tol
        && commutator_norm(u, &total_raising(n)) <= tol
        && commutator_norm(u, &total_s2(n)) <= tol
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn projectors_complete_and_idempotent() {
        for n in [2usize, 3] {
            let (ps, pt) = exchange_projectors(n, 1, 2).unwrap();
            let dim = 1 << n;
            assert!(max_abs_diff(&(&ps + &pt), &identity(dim)) == 0.0);
            assert!(max_abs_diff(&ps.dot(&ps), &ps) < 1e-15);
            assert!(max_abs_diff(&pt.dot(&pt), &pt) < 1e-15);
        }
        assert!(exchange_projectors(2, 2, 1).is_err());
        assert!(exchange_projectors(2, 1, 3).is_err());
    }

    #[test]
    fn singlet_weight_of_up_down() {
        // <ud| Pi_s |ud> = 1/2 and tr Pi_t = 3 on two spins.
        let (ps, pt) = exchange_projectors(2, 1, 2).unwrap();
        let ud = 0b01; // spin 1 up, spin 2 down
        assert_eq!(ps[(ud, ud)], c(0.5, 0.0));
        let trace: Complex64 = (0..4).map(|k| pt[(k, k)]).sum();
        assert_eq!(trace, c(3.0, 0.0));
    }

    #[test]
    fn pulse_unitary_special_cases() {
        // t = 0 is the identity.
        let u0 = pulse_unitary(2, 1, 2, Duration::zero()).unwrap();
        assert_eq!(max_abs_diff(&u0, &identity(4)), 0.0);

        // t = 1 is minus the permutation: U|ud> = -|du>.
        let u1 = pulse_unitary(2, 1, 2, Duration::swap()).unwrap();
        let p = permutation_operator(2, 1, 2).unwrap();
        assert_eq!(max_abs_diff(&u1, &p.mapv(|x| -x)), 0.0);
        let mut v = Array1::from_elem(4, ZERO);
        v[0b01] = ONE;
        let w = {
            let mut w = v.clone();
            apply_phase_pulse_to_vector(2, 1, 2, Duration::swap().phase(), &mut w);
            w
        };
        assert_eq!(w[0b10], c(-1.0, 0.0));
        assert_eq!(w[0b01], ZERO);

        // t = 1/2 acts as 1 on the singlet sector and -i on the triplet sector.
        let uh = pulse_unitary(2, 1, 2, Duration::sqrt_swap()).unwrap();
        let (ps, pt) = exchange_projectors(2, 1, 2).unwrap();
        assert!(max_abs_diff(&uh.dot(&ps), &ps) < 1e-15);
        assert!(max_abs_diff(&uh.dot(&pt), &pt.mapv(|x| x * c(0.0, -1.0))) < 1e-15);
    }

    #[test]
    fn swap_squares_to_identity_exactly() {
        let seq = PulseSequence::from_tuples(2, &[(1, 2, 1, 1), (1, 2, 1, 1)]).unwrap();
        assert_eq!(max_abs_diff(&sequence_unitary(&seq), &identity(4)), 0.0);
    }

    #[test]
    fn sequence_respects_chronological_order() {
        // Apply U12(1) then U23(1): product must be U23 U12.
        let seq = PulseSequence::from_tuples(3, &[(1, 2, 1, 1), (2, 3, 1, 1)]).unwrap();
        let u12 = pulse_unitary(3, 1, 2, Duration::swap()).unwrap();
        let u23 = pulse_unitary(3, 2, 3, Duration::swap()).unwrap();
        assert!(max_abs_diff(&sequence_unitary(&seq), &u23.dot(&u12)) < 1e-15);
    }

    #[test]
    fn inverse_sequence_cancels() {
        let seq =
            PulseSequence::from_tuples(4, &[(1, 2, 1, 2), (2, 3, 5, 7), (3, 4, 1, 1)]).unwrap();
        let u = sequence_unitary(&seq);
        let v = sequence_unitary(&seq.inverted());
        assert!(max_abs_diff(&u.dot(&v), &identity(16)) < 1e-12);
        assert!(max_abs_diff(&v.dot(&u), &identity(16)) < 1e-12);
    }

    #[test]
    fn pulse_composition_law() {
        let t1 = Duration::new(5, 7).unwrap();
        let t2 = Duration::new(3, 2).unwrap();
        let seq = PulseSequence::with_pulses(
            2,
            vec![
                ExchangePulse::new(1, 2, t1).unwrap(),
                ExchangePulse::new(1, 2, t2).unwrap(),
            ],
        )
        .unwrap();
        let direct = pulse_unitary(2, 1, 2, t1.add_mod2(t2)).unwrap();
        assert!(max_abs_diff(&sequence_unitary(&seq), &direct) < 1e-15);
    }

    #[test]
    fn phase_comparison() {
        let u = pulse_unitary(2, 1, 2, Duration::sqrt_swap()).unwrap();
        let mu = u.mapv(|x| -x);
        let phi = equal_up_to_global_phase(&u, &mu, 1e-12).unwrap().unwrap();
        assert!((phi - c(-1.0, 0.0)).norm() < 1e-12);
        let phi = equal_up_to_global_phase(&u, &u, 1e-12).unwrap().unwrap();
        assert!((phi - ONE).norm() < 1e-12);
        // U(1) equals -P up to (exactly) the phase -1.
        let u1 = pulse_unitary(2, 1, 2, Duration::swap()).unwrap();
        let p = permutation_operator(2, 1, 2).unwrap();
        let phi = equal_up_to_global_phase(&u1, &p, 1e-12).unwrap().unwrap();
        assert!((phi - c(-1.0, 0.0)).norm() < 1e-12);
        // Dimension mismatch is an error, not a mismatch result.
        assert!(equal_up_to_global_phase(&u, &identity(8), 1e-12).is_err());
        // Genuinely different operators do not match.
        assert!(equal_up_to_global_phase(&u, &identity(4), 1e-12).unwrap().is_none());
    }

    #[test]
    fn rotational_invariance() {
        let seq =
            PulseSequence::from_tuples(3, &[(1, 2, 1, 2), (2, 3, 5, 7), (1, 3, 1, 1)]).unwrap();
        assert!(rotational_invariance_check(&sequence_unitary(&seq), 1e-10));
        assert!(rotational_invariance_check(&identity(8), 1e-10));

        // A single-spin phase gate breaks rotational invariance.
        let theta = std::f64::consts::PI / 3.0;
        let mut g = identity(4);
        for idx in 0..4usize {
            if idx & 0b10 != 0 {
                g[(idx, idx)] = Complex64::from_polar(1.0, theta);
            }
        }
        assert!(!rotational_invariance_check(&g, 1e-10));
    }

    #[test]
    fn s2_eigenvalues_on_bell_states() {
        let s2 = total_s2(2);
        let singlet = array![ZERO, c(1.0, 0.0), c(-1.0, 0.0), ZERO];
        let triplet = array![ZERO, c(1.0, 0.0), c(1.0, 0.0), ZERO];
        let vs = s2.dot(&singlet);
        let vt = s2.dot(&triplet);
        assert!(vs.iter().map(|x| x.norm()).sum::<f64>() < 1e-14);
        let diff = &vt - &triplet.mapv(|x| x * 2.0);
        assert!(diff.iter().map(|x| x.norm()).sum::<f64>() < 1e-14);
    }
}
