//! Three-spin qubit encoding and two-qubit gate analysis.
//!
//! Two logical qubits live on six spins: qubit A on spins (1,2,3) with tree
//! (1 (2 3)_a)_1/2 and qubit B on spins (4,5,6) with tree (4 (5 6)_b)_1/2.
//! The computational states have total spin 1/2 per triple; the spin-3/2
//! triple states are noncomputational. This module extracts the effective
//! 4x4 action of a six-spin unitary on the encoded basis, measures leakage,
//! computes Makhlin local-equivalence invariants, classifies
//! controlled-(n.sigma) gates, and checks the block structure of five-spin
//! operations in the (a, f) coupled basis.

use ndarray::{array, Array2};
use num_complex::Complex64;

use crate::coupling::{coupled_state, product_state, CoupledState, CouplingTree};
use crate::error::{Error, Result};
use crate::half::Half;
use crate::operator::{dagger, identity, unitarity_residual, CMat, CVec};
use crate::pulse::PulseSequence;

const C0: Complex64 = Complex64::new(0.0, 0.0);
const C1: Complex64 = Complex64::new(1.0, 0.0);

/// Default tolerance for classification decisions embedded in reports.
pub const DEFAULT_TOL: f64 = 1e-10;

/// A three-spin encoded qubit: lone spin coupled to a labeled pair,
/// (first (pair)_x)_1/2 for the computational states.
#[derive(Clone, Copy, Debug)]
pub struct EncodedQubit {
    pub spins: [usize; 3],
}

impl EncodedQubit {
    /// Tree for the computational state |x> (x = 0 or 1 labels the pair spin).
    pub fn state_tree(&self, x: u8) -> CouplingTree {
        let pair_spin = if x == 0 { Half::ZERO } else { Half::ONE };
        CouplingTree::node(
            Half::HALF,
            CouplingTree::leaf(self.spins[0]),
            CouplingTree::pair(self.spins[1], self.spins[2], pair_spin),
        )
    }

    /// Tree for the noncomputational total-spin-3/2 state.
    pub fn noncomputational_tree(&self) -> CouplingTree {
        CouplingTree::node(
            Half::THREE_HALVES,
            CouplingTree::leaf(self.spins[0]),
            CouplingTree::pair(self.spins[1], self.spins[2], Half::ONE),
        )
    }
}

/// The fixed six-spin two-qubit register layout.
#[derive(Clone, Copy, Debug, Default)]
pub struct TwoQubitRegister;

impl TwoQubitRegister {
    pub const N: usize = 6;

    pub fn qubit_a() -> EncodedQubit {
        EncodedQubit { spins: [1, 2, 3] }
    }

    pub fn qubit_b() -> EncodedQubit {
        EncodedQubit { spins: [4, 5, 6] }
    }
}

/// The four encoded basis vectors |ab> plus noncomputational witnesses.
pub struct EncodedBasis {
    /// |00>, |01>, |10>, |11> at the chosen qubit sz components.
    pub states: [CVec; 4],
    /// Qubit A in its spin-3/2 state (at sz = 3/2), spins 4..6 up.
    pub nc_a: CoupledState,
    /// Qubit B in its spin-3/2 state (at sz = 3/2), spins 1..3 up.
    pub nc_b: CoupledState,
}

/// Encoded basis at the default qubit components sz_a = sz_b = +1/2.
pub fn encoded_basis() -> EncodedBasis {
    encoded_basis_with_sz(Half::HALF, Half::HALF)
}

pub fn encoded_basis_with_sz(sz_a: Half, sz_b: Half) -> EncodedBasis {
    let n = TwoQubitRegister::N;
    let (qa, qb) = (TwoQubitRegister::qubit_a(), TwoQubitRegister::qubit_b());
    let make = |a: u8, b: u8| -> CVec {
        let sa = coupled_state(&qa.state_tree(a), sz_a, n).expect("register trees are valid");
        let sb = coupled_state(&qb.state_tree(b), sz_b, n).expect("register trees are valid");
        product_state(&[&sa, &sb]).expect("disjoint supports")
    };
    EncodedBasis {
        states: [make(0, 0), make(0, 1), make(1, 0), make(1, 1)],
        nc_a: coupled_state(&qa.noncomputational_tree(), Half::THREE_HALVES, n)
            .expect("register trees are valid"),
        nc_b: coupled_state(&qb.noncomputational_tree(), Half::THREE_HALVES, n)
            .expect("register trees are valid"),
    }
}

/// Extracted two-qubit action of a six-spin unitary.
#[derive(Clone, Debug)]
pub struct GateReport {
    /// 4x4 action in the basis ab = {00, 01, 10, 11}, globally phased so the
    /// (00,00) entry is real and non-negative.
    pub gate4: CMat,
    /// Largest norm of the component of U|ab> outside the encoded span.
    pub leakage: f64,
    /// Makhlin invariants (G1, G2), present when gate4 is unitary to 1e-8.
    pub makhlin: Option<(Complex64, f64)>,
    pub classification: Classification,
}

#[derive(Clone, Debug)]
pub enum Classification {
    IdentityLike { phase: Complex64 },
    ControlledNSigma { nhat: [f64; 3], residual: f64 },
    Other { reason: String },
}

/// Extracts the encoded 4x4 gate of a 64-dimensional unitary at the default
/// qubit sz components.
pub fn extract_gate(u: &CMat) -> Result<GateReport> {
    extract_gate_with_sz(u, Half::HALF, Half::HALF)
}

pub fn extract_gate_with_sz(u: &CMat, sz_a: Half, sz_b: Half) -> Result<GateReport> {
    let dim = 1 << TwoQubitRegister::N;
    if u.nrows() != dim || u.ncols() != dim {
        return Err(Error::DimensionMismatch { lhs: u.nrows(), rhs: dim });
    }
    let basis = encoded_basis_with_sz(sz_a, sz_b);
    let mut gate4 = Array2::from_elem((4, 4), C0);
    let mut leakage: f64 = 0.0;
    for (col, psi) in basis.states.iter().enumerate() {
        let w = u.dot(psi);
        let mut inside = 0.0;
        for (row, phi) in basis.states.iter().enumerate() {
            let g: Complex64 = phi.iter().zip(w.iter()).map(|(p, x)| p.conj() * x).sum();
            gate4[(row, col)] = g;
            inside += g.norm_sqr();
        }
        let total: f64 = w.iter().map(|x| x.norm_sqr()).sum();
        leakage = leakage.max((total - inside).max(0.0).sqrt());
    }
    // Fix the global phase: (00,00) entry real and non-negative.
    let g00 = gate4[(0, 0)];
    if g00.norm() > 1e-12 {
        let phase = g00 / g00.norm();
        gate4.mapv_inplace(|x| x * phase.conj());
    }
    let makhlin = makhlin_invariants(&gate4, 1e-8).ok();
    let classification = classify_gate(&gate4, leakage, DEFAULT_TOL);
    Ok(GateReport { gate4, leakage, makhlin, classification })
}

fn det4(m: &CMat) -> Complex64 {
    // Gaussian elimination with partial pivoting.
    let n = m.nrows();
    let mut a = m.clone();
    let mut det = C1;
    for k in 0..n {
        let mut pivot = k;
        for r in (k + 1)..n {
            if a[(r, k)].norm() > a[(pivot, k)].norm() {
                pivot = r;
            }
        }
        if a[(pivot, k)].norm() < 1e-300 {
            return C0;
        }
        if pivot != k {
            for c in 0..n {
                let tmp = a[(k, c)];
                a[(k, c)] = a[(pivot, c)];
                a[(pivot, c)] = tmp;
            }
            det = -det;
        }
        det *= a[(k, k)];
        for r in (k + 1)..n {
            let factor = a[(r, k)] / a[(k, k)];
            for c in k..n {
                let sub = factor * a[(k, c)];
                a[(r, c)] -= sub;
            }
        }
    }
    det
}

fn magic_basis() -> CMat {
    let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let i = Complex64::new(0.0, 1.0);
    array![
        [C1, C0, C0, i],
        [C0, i, C1, C0],
        [C0, i, -C1, C0],
        [C1, C0, C0, -i],
    ]
    .mapv(|x| x * s)
}

/// Makhlin local-equivalence invariants (G1, G2) of a two-qubit unitary,
/// computed in the magic basis and normalized by det U so they are invariant
/// under global phase and single-qubit rotations. The identity gives (1, 3)
/// and CNOT gives (0, 1).
pub fn makhlin_invariants(gate4: &CMat, tol: f64) -> Result<(Complex64, f64)> {
    if gate4.nrows() != 4 || gate4.ncols() != 4 {
        return Err(Error::DimensionMismatch { lhs: gate4.nrows(), rhs: 4 });
    }
    let residual = unitarity_residual(gate4);
    if residual > tol {
        return Err(Error::NotUnitary { residual });
    }
    let q = magic_basis();
    let ub = dagger(&q).dot(gate4).dot(&q);
    let m = ub.t().dot(&ub);
    let tr: Complex64 = (0..4).map(|k| m[(k, k)]).sum();
    let m2 = m.dot(&m);
    let tr_m2: Complex64 = (0..4).map(|k| m2[(k, k)]).sum();
    let det = det4(gate4);
    let g1 = tr * tr / (det * 16.0);
    let g2 = (tr * tr - tr_m2) / (det * 4.0);
    debug_assert!(g2.im.abs() < 1e-8, "G2 should be real, got {g2}");
    Ok((g1, g2.re))
}

const PAULI_X: [[Complex64; 2]; 2] = [[C0, C1], [C1, C0]];
const PAULI_Y: [[Complex64; 2]; 2] =
    [[C0, Complex64::new(0.0, -1.0)], [Complex64::new(0.0, 1.0), C0]];
const PAULI_Z: [[Complex64; 2]; 2] = [[C1, C0], [C0, Complex64::new(-1.0, 0.0)]];

/// n.sigma as a 2x2 matrix.
pub fn nsigma(nhat: [f64; 3]) -> CMat {
    let mut m = Array2::from_elem((2, 2), C0);
    for r in 0..2 {
        for c in 0..2 {
            m[(r, c)] = PAULI_X[r][c] * nhat[0] + PAULI_Y[r][c] * nhat[1] + PAULI_Z[r][c] * nhat[2];
        }
    }
    m
}

fn classify_gate(gate4: &CMat, leakage: f64, tol: f64) -> Classification {
    if leakage > tol {
        return Classification::Other { reason: format!("leakage {leakage:.3e} exceeds {tol:.3e}") };
    }
    if let Ok(Some(phase)) = crate::operator::equal_up_to_global_phase(gate4, &identity(4), tol) {
        return Classification::IdentityLike { phase };
    }
    match controlled_nsigma_axis(gate4, tol) {
        Ok((nhat, residual)) => Classification::ControlledNSigma { nhat, residual },
        Err(reason) => Classification::Other { reason },
    }
}

/// Accepts gates of the form diag(1, 1, M) with M = n.sigma (Hermitian,
/// traceless, involutive) and returns the axis n; rejects everything else
/// with a reason. The gate must already be phase-normalized (real positive
/// (00,00) entry), as `extract_gate` guarantees.
pub fn classify_controlled_nsigma(
    report: &GateReport,
    tol: f64,
) -> std::result::Result<[f64; 3], String> {
    if report.leakage > tol {
        return Err(format!("leakage {:.3e} exceeds tolerance", report.leakage));
    }
    controlled_nsigma_axis(&report.gate4, tol).map(|(nhat, _)| nhat)
}

fn controlled_nsigma_axis(
    gate4: &CMat,
    tol: f64,
) -> std::result::Result<([f64; 3], f64), String> {
    // Upper-left block must be the identity and the off-blocks zero.
    let mut block_residual: f64 = 0.0;
    for r in 0..2 {
        for c in 0..2 {
            let want = if r == c { C1 } else { C0 };
            block_residual = block_residual.max((gate4[(r, c)] - want).norm());
            block_residual = block_residual.max(gate4[(r, c + 2)].norm());
            block_residual = block_residual.max(gate4[(r + 2, c)].norm());
        }
    }
    if block_residual > tol {
        return Err(format!(
            "not of the form diag(1, 1, M): block residual {block_residual:.3e}"
        ));
    }
    let m = gate4.slice(ndarray::s![2.., 2..]).to_owned();
    let herm = crate::operator::max_abs_diff(&m, &dagger(&m));
    if herm > tol {
        return Err(format!("M is not Hermitian (residual {herm:.3e})"));
    }
    let trace = m[(0, 0)] + m[(1, 1)];
    if trace.norm() > tol {
        // Covers the non-entangling cases M = +1 and M = -1 (trace +-2).
        return Err(format!(
            "M is not traceless (|tr M| = {:.3e}); M = +(-)1 is not entangling",
            trace.norm()
        ));
    }
    let inv = crate::operator::max_abs_diff(&m.dot(&m), &identity(2));
    if inv > tol {
        return Err(format!("M^2 differs from the identity by {inv:.3e}"));
    }
    let nhat = [m[(1, 0)].re, m[(1, 0)].im, m[(0, 0)].re];
    let norm = (nhat[0] * nhat[0] + nhat[1] * nhat[1] + nhat[2] * nhat[2]).sqrt();
    if (norm - 1.0).abs() > tol {
        return Err(format!("axis norm {norm} differs from 1"));
    }
    let residual = crate::operator::max_abs_diff(&m, &nsigma(nhat));
    if residual > tol {
        return Err(format!("M differs from n.sigma by {residual:.3e}"));
    }
    Ok((nhat, residual))
}

/// Diagonal blocks of a five-spin operation in the coupled basis
/// af = {0 1/2, 1 1/2 | 1 3/2}, with the target qubit as the 2x2 block index
/// b of the tree ((1 2)_a (3 (4 5)_b)_1/2)_f.
#[derive(Clone, Debug)]
pub struct ElevatedBlockReport {
    /// Block for (a, f) = (0, 1/2); proportional to the identity for a valid
    /// elevated r-pulse sequence.
    pub b00: CMat,
    /// Block for (a, f) = (1, 1/2).
    pub b11: CMat,
    /// Block for (a, f) = (1, 3/2).
    pub b33: CMat,
    /// Largest norm of any component of U|psi> outside its own block.
    pub off_block_leakage: f64,
    /// || B00 - lambda I ||_F for the fitted scalar lambda.
    pub b00_identity_residual: f64,
    /// || B11 - B33 ||_F: the applied matrix must not depend on f.
    pub b11_b33_residual: f64,
    /// The applied target-qubit matrix M = B11 / lambda.
    pub m: CMat,
}

fn elevated_state(a: u8, f: Half, b: u8, n: usize) -> CoupledState {
    let pair = |x: u8| if x == 0 { Half::ZERO } else { Half::ONE };
    let tree = CouplingTree::node(
        f,
        CouplingTree::pair(1, 2, pair(a)),
        CouplingTree::node(
            Half::HALF,
            CouplingTree::leaf(3),
            CouplingTree::pair(4, 5, pair(b)),
        ),
    );
    coupled_state(&tree, Half::HALF, n).expect("elevated basis trees are valid")
}

/// Computes the three diagonal blocks of a five-spin sequence in the af
/// basis and verifies the elevated structure diag(lambda, M, M). Off-block
/// leakage beyond `tol` is a structural failure.
pub fn elevated_structure(seq: &PulseSequence, tol: f64) -> Result<ElevatedBlockReport> {
    if seq.n() != 5 {
        return Err(Error::Invalid(format!(
            "elevated structure needs a 5-spin sequence, got {}",
            seq.n()
        )));
    }
    let u = crate::operator::sequence_unitary(seq);
    let sectors: [(u8, Half); 3] =
        [(0, Half::HALF), (1, Half::HALF), (1, Half::THREE_HALVES)];
    let mut blocks = Vec::with_capacity(3);
    let mut off_block: f64 = 0.0;
    for &(a, f) in &sectors {
        let psi0 = elevated_state(a, f, 0, 5);
        let psi1 = elevated_state(a, f, 1, 5);
        let mut block = Array2::from_elem((2, 2), C0);
        for (col, psi) in [&psi0, &psi1].iter().enumerate() {
            let w = u.dot(&psi.vector);
            let mut inside = 0.0;
            for (row, phi) in [&psi0, &psi1].iter().enumerate() {
                let g: Complex64 =
                    phi.vector.iter().zip(w.iter()).map(|(p, x)| p.conj() * x).sum();
                block[(row, col)] = g;
                inside += g.norm_sqr();
            }
            let total: f64 = w.iter().map(|x| x.norm_sqr()).sum();
            off_block = off_block.max((total - inside).max(0.0).sqrt());
        }
        blocks.push(block);
    }
    if off_block > tol {
        return Err(Error::Structural { name: "elevated_off_block_leakage", residual: off_block });
    }
    let (b00, b11, b33) = (blocks[0].clone(), blocks[1].clone(), blocks[2].clone());
    let lambda = (b00[(0, 0)] + b00[(1, 1)]) / 2.0;
    let b00_identity_residual =
        crate::operator::frobenius_norm(&(&b00 - &identity(2).mapv(|x| x * lambda)));
    let b11_b33_residual = crate::operator::frobenius_norm(&(&b11 - &b33));
    let m = if lambda.norm() > 1e-12 { b11.mapv(|x| x / lambda) } else { b11.clone() };
    Ok(ElevatedBlockReport {
        b00,
        b11,
        b33,
        off_block_leakage: off_block,
        b00_identity_residual,
        b11_b33_residual,
        m,
    })
}

/// Diagonal form of a three-spin sequence in the coupled basis
/// ac = {0 1/2, 1 1/2 | 1 3/2} of ((1 2)_a 3)_c.
#[derive(Clone, Debug)]
pub struct ThreeSpinReport {
    pub diagonal: [Complex64; 3],
    /// Largest off-diagonal component norm over the three basis states.
    pub off_diagonal_leakage: f64,
    /// The scalar m with the diagonal of the form lambda (1, m, m).
    pub m: Complex64,
    /// Residual of the fit diag = lambda (1, m, m) with |lambda| = 1.
    pub structure_residual: f64,
}

/// Evaluates a three-spin sequence in the ac basis and fits diag(1, m, m)
/// up to a global phase.
pub fn three_spin_structure(seq: &PulseSequence, tol: f64) -> Result<ThreeSpinReport> {
    if seq.n() != 3 {
        return Err(Error::Invalid(format!(
            "three-spin structure needs a 3-spin sequence, got {}",
            seq.n()
        )));
    }
    let u = crate::operator::sequence_unitary(seq);
    let pair = |x: u8| if x == 0 { Half::ZERO } else { Half::ONE };
    let states: Vec<CoupledState> = [(0u8, Half::HALF), (1, Half::HALF), (1, Half::THREE_HALVES)]
        .iter()
        .map(|&(a, c)| {
            let tree = CouplingTree::node(c, CouplingTree::pair(1, 2, pair(a)), CouplingTree::leaf(3));
            coupled_state(&tree, Half::HALF, 3).expect("ac basis trees are valid")
        })
        .collect();
    let mut diagonal = [C0; 3];
    let mut off: f64 = 0.0;
    for (k, psi) in states.iter().enumerate() {
        let w = u.dot(&psi.vector);
        let d: Complex64 = psi.vector.iter().zip(w.iter()).map(|(p, x)| p.conj() * x).sum();
        diagonal[k] = d;
        let total: f64 = w.iter().map(|x| x.norm_sqr()).sum();
        off = off.max((total - d.norm_sqr()).max(0.0).sqrt());
    }
    if off > tol {
        return Err(Error::Structural { name: "three_spin_off_diagonal", residual: off });
    }
    let lambda = diagonal[0];
    let m = if lambda.norm() > 1e-12 { diagonal[1] / lambda } else { diagonal[1] };
    let structure_residual = ((lambda.norm() - 1.0).abs())
        .max((diagonal[1] - lambda * m).norm())
        .max((diagonal[2] - lambda * m).norm());
    Ok(ThreeSpinReport { diagonal, off_diagonal_leakage: off, m, structure_residual })
}

/// Kronecker product of two single-qubit operators in the ab basis.
pub fn kron2(u1: &CMat, u2: &CMat) -> CMat {
    let mut out = Array2::from_elem((4, 4), C0);
    for ar in 0..2 {
        for ac in 0..2 {
            for br in 0..2 {
                for bc in 0..2 {
                    out[(2 * ar + br, 2 * ac + bc)] = u1[(ar, ac)] * u2[(br, bc)];
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::duration::Duration;
    use crate::operator::{max_abs_diff, pulse_unitary, sequence_unitary};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cnot() -> CMat {
        array![[C1, C0, C0, C0], [C0, C1, C0, C0], [C0, C0, C0, C1], [C0, C0, C1, C0]]
    }

    fn random_su2<R: Rng>(rng: &mut R) -> CMat {
        let q: [f64; 4] = core::array::from_fn(|_| rng.gen::<f64>() - 0.5);
        let norm = q.iter().map(|x| x * x).sum::<f64>().sqrt();
        let [a, b, c, d] = q.map(|x| x / norm);
        array![
            [Complex64::new(a, b), Complex64::new(c, d)],
            [Complex64::new(-c, d), Complex64::new(a, -b)]
        ]
    }

    fn random_unit_vector<R: Rng>(rng: &mut R) -> [f64; 3] {
        loop {
            let v: [f64; 3] = core::array::from_fn(|_| 2.0 * rng.gen::<f64>() - 1.0);
            let n2: f64 = v.iter().map(|x| x * x).sum();
            if n2 > 1e-3 && n2 <= 1.0 {
                let n = n2.sqrt();
                return v.map(|x| x / n);
            }
        }
    }

    fn diag_1_1_m(m: &CMat) -> CMat {
        let mut g = identity(4);
        for r in 0..2 {
            for c in 0..2 {
                g[(r + 2, c + 2)] = m[(r, c)];
            }
        }
        g
    }

    #[test]
    fn encoded_basis_is_orthonormal() {
        let basis = encoded_basis();
        for (i, a) in basis.states.iter().enumerate() {
            for (j, b) in basis.states.iter().enumerate() {
                let g: Complex64 = a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((g.re - want).abs() < 1e-12 && g.im.abs() < 1e-12);
            }
        }
        // The nc witness of qubit A at sz = 3/2 has its first three spins
        // all up, and the untouched spins 4..6 pinned up: amplitude 1 at
        // index 0.
        assert!((basis.nc_a.vector[0].re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identity_extracts_to_identity() {
        let report = extract_gate(&identity(64)).unwrap();
        assert!(max_abs_diff(&report.gate4, &identity(4)) < 1e-12);
        assert!(report.leakage < 1e-12);
        assert!(matches!(report.classification, Classification::IdentityLike { .. }));
    }

    #[test]
    fn intra_pair_pulse_acts_diagonally() {
        // U23(t) multiplies |1b> by e^{-i pi t} and leaves |0b> alone.
        let t = Duration::new(5, 7).unwrap();
        let u = pulse_unitary(6, 2, 3, t).unwrap();
        let report = extract_gate(&u).unwrap();
        assert!(report.leakage < 1e-12);
        let z = t.phase();
        let mut want = identity(4);
        want[(2, 2)] = z;
        want[(3, 3)] = z;
        assert!(max_abs_diff(&report.gate4, &want) < 1e-12);

        // U56(t) acts on qubit B instead: 1 x diag(1, z).
        let u = pulse_unitary(6, 5, 6, t).unwrap();
        let report = extract_gate(&u).unwrap();
        assert!(report.leakage < 1e-12);
        let mut want = identity(4);
        want[(1, 1)] = z;
        want[(3, 3)] = z;
        assert!(max_abs_diff(&report.gate4, &want) < 1e-12);
    }

    #[test]
    fn makhlin_reference_points() {
        // Direct evaluation on the 4x4 identity: (G1, G2) = (1, 3).
        let (g1, g2) = makhlin_invariants(&identity(4), 1e-8).unwrap();
        assert!((g1 - C1).norm() < 1e-12);
        assert!((g2 - 3.0).abs() < 1e-12);
        // Direct evaluation on the exact CNOT matrix: (0, 1).
        let (g1, g2) = makhlin_invariants(&cnot(), 1e-8).unwrap();
        assert!(g1.norm() < 1e-12);
        assert!((g2 - 1.0).abs() < 1e-12);
        // Non-unitary input is an error.
        let bad = identity(4).mapv(|x| x * 2.0);
        assert!(makhlin_invariants(&bad, 1e-8).is_err());
    }

    #[test]
    fn makhlin_local_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let base = cnot();
        let (g1, g2) = makhlin_invariants(&base, 1e-8).unwrap();
        for _ in 0..20 {
            let dressed = kron2(&random_su2(&mut rng), &random_su2(&mut rng))
                .dot(&base)
                .dot(&kron2(&random_su2(&mut rng), &random_su2(&mut rng)));
            let (h1, h2) = makhlin_invariants(&dressed, 1e-8).unwrap();
            assert!((g1 - h1).norm() < 1e-10, "G1 moved under local unitaries");
            assert!((g2 - h2).abs() < 1e-10, "G2 moved under local unitaries");
        }
    }

    #[test]
    fn controlled_nsigma_gates_match_cnot_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let nhat = random_unit_vector(&mut rng);
            let g = diag_1_1_m(&nsigma(nhat));
            let (g1, g2) = makhlin_invariants(&g, 1e-8).unwrap();
            assert!(g1.norm() < 1e-10);
            assert!((g2 - 1.0).abs() < 1e-10);
            // Axis recovery.
            let (found, residual) = controlled_nsigma_axis(&g, 1e-10).unwrap();
            assert!(residual <= 1e-10);
            for k in 0..3 {
                assert!((found[k] - nhat[k]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn classification_examples() {
        // diag(1,1,sigma_x) is CNOT: axis x.
        let (nhat, _) = controlled_nsigma_axis(&cnot(), 1e-10).unwrap();
        assert!((nhat[0] - 1.0).abs() < 1e-12);
        assert!(nhat[1].abs() < 1e-12 && nhat[2].abs() < 1e-12);

        // diag(1,1,1,1) is rejected as not entangling.
        let report = extract_gate(&identity(64)).unwrap();
        let reject = classify_controlled_nsigma(&report, 1e-10).unwrap_err();
        assert!(reject.contains("not traceless"), "reason was: {reject}");

        // diag(1,1,-1,-1) (M = -1) likewise.
        let mut g = identity(4);
        g[(2, 2)] = -C1;
        g[(3, 3)] = -C1;
        let err = controlled_nsigma_axis(&g, 1e-10).unwrap_err();
        assert!(err.contains("not traceless"));
    }

    #[test]
    fn elevated_r_ladder_blocks() {
        // Five-SWAP ladder (r = 1 instance): [U23, U12, U23, U12, U23] with
        // all t = 1 reduces to -P12 and gives blocks (1, -1, -1).
        let seq = PulseSequence::from_tuples(
            5,
            &[(2, 3, 1, 1), (1, 2, 1, 1), (2, 3, 1, 1), (1, 2, 1, 1), (2, 3, 1, 1)],
        )
        .unwrap();
        let rep = elevated_structure(&seq, 1e-10).unwrap();
        assert!(rep.off_block_leakage < 1e-12);
        assert!(rep.b00_identity_residual < 1e-12);
        assert!(rep.b11_b33_residual < 1e-12);
        assert!(max_abs_diff(&rep.m, &identity(2).mapv(|x| -x)) < 1e-12);

        // r = 0 instance: only the two SWAPs remain, which square away.
        let seq = PulseSequence::from_tuples(
            5,
            &[(2, 3, 0, 1), (1, 2, 1, 1), (2, 3, 0, 1), (1, 2, 1, 1), (2, 3, 0, 1)],
        )
        .unwrap();
        let rep = elevated_structure(&seq, 1e-10).unwrap();
        assert!(rep.b00_identity_residual < 1e-12);
        assert!(max_abs_diff(&rep.m, &identity(2)) < 1e-12);

        // A c-violating sequence is a structural failure.
        let seq = PulseSequence::from_tuples(5, &[(2, 3, 1, 2)]).unwrap();
        assert!(matches!(
            elevated_structure(&seq, 1e-10),
            Err(Error::Structural { .. })
        ));
    }

    #[test]
    fn three_spin_ladder_diagonals() {
        // r = 1: five SWAPs act as diag(1, -1, -1) in the ac basis.
        let seq = PulseSequence::from_tuples(
            3,
            &[(2, 3, 1, 1), (1, 2, 1, 1), (2, 3, 1, 1), (1, 2, 1, 1), (2, 3, 1, 1)],
        )
        .unwrap();
        let rep = three_spin_structure(&seq, 1e-10).unwrap();
        assert!((rep.m + C1).norm() < 1e-12);
        assert!(rep.structure_residual < 1e-12);

        // r = 0: identity.
        let seq =
            PulseSequence::from_tuples(3, &[(1, 2, 1, 1), (1, 2, 1, 1)]).unwrap();
        let rep = three_spin_structure(&seq, 1e-10).unwrap();
        assert!((rep.m - C1).norm() < 1e-12);
    }

    #[test]
    fn leakage_composition_sanity() {
        // Zero-leakage factors compose to (nearly) zero leakage.
        let u = pulse_unitary(6, 2, 3, Duration::new(1, 2).unwrap()).unwrap();
        let v = pulse_unitary(6, 5, 6, Duration::new(3, 2).unwrap()).unwrap();
        let lu = extract_gate(&u).unwrap().leakage;
        let lv = extract_gate(&v).unwrap().leakage;
        let luv = extract_gate(&u.dot(&v)).unwrap().leakage;
        assert!(luv <= lu + lv + 1e-12);
    }

    #[test]
    fn sz_choice_does_not_move_the_gate() {
        // A rotation-invariant zero-leakage unitary yields the same gate4
        // for every choice of qubit sz components.
        let u = pulse_unitary(6, 2, 3, Duration::new(1, 2).unwrap()).unwrap();
        let base = extract_gate_with_sz(&u, Half::HALF, Half::HALF).unwrap();
        for (sa, sb) in [
            (Half::HALF, -Half::HALF),
            (-Half::HALF, Half::HALF),
            (-Half::HALF, -Half::HALF),
        ] {
            let other = extract_gate_with_sz(&u, sa, sb).unwrap();
            assert!(max_abs_diff(&base.gate4, &other.gate4) < 1e-10);
            assert!(other.leakage < 1e-12);
        }
    }

    #[test]
    fn five_swap_ladder_equals_single_swap_up_to_phase() {
        // Viewed as permutations, the five-SWAP ladder is the top-pair SWAP.
        let seq = PulseSequence::from_tuples(
            3,
            &[(2, 3, 1, 1), (1, 2, 1, 1), (2, 3, 1, 1), (1, 2, 1, 1), (2, 3, 1, 1)],
        )
        .unwrap();
        let u = sequence_unitary(&seq);
        let p = crate::operator::permutation_operator(3, 1, 2).unwrap();
        let phi = crate::operator::equal_up_to_global_phase(&u, &p, 1e-12)
            .unwrap()
            .expect("ladder is a single SWAP up to phase");
        assert!((phi + C1).norm() < 1e-12);
    }
}
