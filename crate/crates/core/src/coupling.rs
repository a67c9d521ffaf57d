//! Total-spin coupled basis states.
//!
//! States are described by binary coupling trees whose leaves are spin-1/2
//! particle indices and whose internal nodes carry total-spin labels. A tree
//! plus a magnetic number sz is realized as an explicit vector in the 2^n
//! product basis by recursive Clebsch-Gordan coupling, leaf to root, in the
//! Condon-Shortley phase convention. All recoupling between different trees
//! is done numerically through overlaps of these vectors.

use std::collections::HashMap;
use std::fmt;

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::half::Half;
use crate::operator::{identity, spin_bit, subset_s2, CMat, CVec};

/// A binary coupling tree. Leaves are 1-based spin indices (each spin 1/2);
/// every internal node carries the total spin of its subtree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CouplingTree {
    Leaf(usize),
    Node {
        spin: Half,
        left: Box<CouplingTree>,
        right: Box<CouplingTree>,
    },
}

impl CouplingTree {
    pub fn leaf(i: usize) -> Self {
        CouplingTree::Leaf(i)
    }

    pub fn node(spin: Half, left: CouplingTree, right: CouplingTree) -> Self {
        CouplingTree::Node { spin, left: Box::new(left), right: Box::new(right) }
    }

    /// A coupled pair of leaves, `(i j)_spin`.
    pub fn pair(i: usize, j: usize, spin: Half) -> Self {
        Self::node(spin, Self::leaf(i), Self::leaf(j))
    }

    pub fn total_spin(&self) -> Half {
        match self {
            CouplingTree::Leaf(_) => Half::HALF,
            CouplingTree::Node { spin, .. } => *spin,
        }
    }

    pub fn leaves(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut Vec<usize>) {
        match self {
            CouplingTree::Leaf(i) => out.push(*i),
            CouplingTree::Node { left, right, .. } => {
                left.collect_leaves(out);
                right.collect_leaves(out);
            }
        }
    }

    /// Checks triangle rules at every node, distinct leaves, and leaf range.
    pub fn validate(&self, n: usize) -> Result<()> {
        let mut leaves = self.leaves();
        leaves.sort_unstable();
        for w in leaves.windows(2) {
            if w[0] == w[1] {
                return Err(Error::InvalidTree(format!("repeated leaf {}", w[0])));
            }
        }
        if leaves.first() == Some(&0) {
            return Err(Error::InvalidTree("leaf indices are 1-based".into()));
        }
        if let Some(&max) = leaves.last() {
            if max > n {
                return Err(Error::InvalidTree(format!("leaf {max} exceeds {n} spins")));
            }
        }
        self.validate_triangles()
    }

    fn validate_triangles(&self) -> Result<()> {
        if let CouplingTree::Node { spin, left, right } = self {
            left.validate_triangles()?;
            right.validate_triangles()?;
            let (jl, jr) = (left.total_spin(), right.total_spin());
            if !Half::triangle(jl, jr, *spin) {
                return Err(Error::InvalidTree(format!(
                    "label {spin} violates the triangle rule for {jl} x {jr}"
                )));
            }
        }
        Ok(())
    }

    /// Parses the literal syntax `(1 (2 3)_1)_1/2`: leaves are spin indices,
    /// `_label` attaches a total spin as an integer or `p/2` half-integer.
    /// Whitespace-insensitive apart from the `)_label` juncture.
    pub fn parse(text: &str) -> Result<Self> {
        let mut p = TreeParser { chars: text.chars().collect(), pos: 0 };
        let tree = p.parse_tree()?;
        p.skip_ws();
        if p.pos != p.chars.len() {
            return Err(Error::InvalidTree(format!("trailing input at offset {}", p.pos)));
        }
        Ok(tree)
    }
}

impl fmt::Display for CouplingTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CouplingTree::Leaf(i) => write!(f, "{i}"),
            CouplingTree::Node { spin, left, right } => {
                write!(f, "({left} {right})_{spin}")
            }
        }
    }
}

struct TreeParser {
    chars: Vec<char>,
    pos: usize,
}

impl TreeParser {
    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn parse_tree(&mut self) -> Result<CouplingTree> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let left = self.parse_tree()?;
                let right = self.parse_tree()?;
                if self.peek() != Some(')') {
                    return Err(Error::InvalidTree(format!(
                        "expected `)` at offset {}",
                        self.pos
                    )));
                }
                self.pos += 1;
                if self.chars.get(self.pos) != Some(&'_') {
                    return Err(Error::InvalidTree(format!(
                        "expected `_label` after `)` at offset {}",
                        self.pos
                    )));
                }
                self.pos += 1;
                let spin = self.parse_label()?;
                Ok(CouplingTree::node(spin, left, right))
            }
            Some(c) if c.is_ascii_digit() => {
                let i = self.parse_number()?;
                Ok(CouplingTree::leaf(i as usize))
            }
            other => Err(Error::InvalidTree(format!(
                "unexpected {:?} at offset {}",
                other, self.pos
            ))),
        }
    }

    fn parse_number(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::InvalidTree(format!("expected a number at offset {start}")));
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        text.parse().map_err(|_| Error::InvalidTree(format!("bad number `{text}`")))
    }

    fn parse_label(&mut self) -> Result<Half> {
        let numer = self.parse_number()? as i32;
        if self.chars.get(self.pos) == Some(&'/') {
            self.pos += 1;
            let denom = self.parse_number()?;
            if denom != 2 {
                return Err(Error::InvalidTree(format!(
                    "spin labels must be integers or halves, got /{denom}"
                )));
            }
            Ok(Half::from_twice(numer))
        } else {
            Ok(Half::from_int(numer))
        }
    }
}

/// A coupling-tree state realized as a vector over the 2^n product basis.
#[derive(Clone, Debug)]
pub struct CoupledState {
    pub tree: CouplingTree,
    pub sz: Half,
    pub n: usize,
    pub vector: CVec,
}

const FACTORIALS: [f64; 24] = {
    let mut t = [1.0; 24];
    let mut i = 1;
    while i < 24 {
        t[i] = t[i - 1] * i as f64;
        i += 1;
    }
    t
};

/// Clebsch-Gordan coefficient <j1 m1; j2 m2 | j m> in the Condon-Shortley
/// convention (real, with <j1 j1; j2 j-j1 | j j> > 0). Returns 0 for
/// triangle-rule violations or m != m1 + m2.
pub fn clebsch_gordan(j1: Half, m1: Half, j2: Half, m2: Half, j: Half, m: Half) -> f64 {
    if m != m1 + m2
        || !Half::triangle(j1, j2, j)
        || !j1.admits_m(m1)
        || !j2.admits_m(m2)
        || !j.admits_m(m)
    {
        return 0.0;
    }
    // Twice-integer bookkeeping: every factorial argument below is even.
    let f = |twice: i32| -> f64 {
        debug_assert!(twice >= 0 && twice % 2 == 0);
        FACTORIALS[(twice / 2) as usize]
    };
    let (tj1, tm1, tj2, tm2, tj, tm) =
        (j1.twice(), m1.twice(), j2.twice(), m2.twice(), j.twice(), m.twice());

    let prefactor = ((tj + 1) as f64 * f(tj1 + tj2 - tj) * f(tj1 - tj2 + tj)
        * f(-tj1 + tj2 + tj)
        / FACTORIALS[((tj1 + tj2 + tj) / 2 + 1) as usize])
        .sqrt();
    let weight = (f(tj + tm) * f(tj - tm) * f(tj1 - tm1) * f(tj1 + tm1) * f(tj2 - tm2)
        * f(tj2 + tm2))
        .sqrt();

    // Summation window keeping all factorial arguments non-negative.
    let k_min = 0.max((tj2 - tj - tm1) / 2).max((tj1 + tm2 - tj) / 2);
    let k_max = ((tj1 + tj2 - tj) / 2).min((tj1 - tm1) / 2).min((tj2 + tm2) / 2);
    let mut sum = 0.0;
    for k in k_min..=k_max {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let denom = FACTORIALS[k as usize]
            * f(tj1 + tj2 - tj - 2 * k)
            * f(tj1 - tm1 - 2 * k)
            * f(tj2 + tm2 - 2 * k)
            * f(tj - tj2 + tm1 + 2 * k)
            * f(tj - tj1 - tm2 + 2 * k);
        sum += sign / denom;
    }
    prefactor * weight * sum
}

/// Amplitudes of a partial state, keyed by the down-spin bit pattern over the
/// subtree's leaves (already placed in full n-spin index space).
type SparseAmps = HashMap<usize, f64>;

fn build_recursive(tree: &CouplingTree, n: usize) -> HashMap<i32, SparseAmps> {
    match tree {
        CouplingTree::Leaf(i) => HashMap::from([
            (1, SparseAmps::from([(0usize, 1.0)])),
            (-1, SparseAmps::from([(1usize << spin_bit(n, *i), 1.0)])),
        ]),
        CouplingTree::Node { spin, left, right } => {
            let lhs = build_recursive(left, n);
            let rhs = build_recursive(right, n);
            let (jl, jr, j) = (left.total_spin(), right.total_spin(), *spin);
            let mut by_m: HashMap<i32, SparseAmps> = HashMap::new();
            for m in j.m_values() {
                let mut amps = SparseAmps::new();
                for ml in jl.m_values() {
                    let mr = m - ml;
                    if !jr.admits_m(mr) {
                        continue;
                    }
                    let cg = clebsch_gordan(jl, ml, jr, mr, j, m);
                    if cg == 0.0 {
                        continue;
                    }
                    let (Some(la), Some(ra)) = (lhs.get(&ml.twice()), rhs.get(&mr.twice()))
                    else {
                        continue;
                    };
                    for (&lmask, &lv) in la {
                        for (&rmask, &rv) in ra {
                            *amps.entry(lmask | rmask).or_insert(0.0) += cg * lv * rv;
                        }
                    }
                }
                by_m.insert(m.twice(), amps);
            }
            by_m
        }
    }
}

/// Builds the unit-norm product-basis vector for a coupling tree at magnetic
/// number `sz` on an `n`-spin register. Spins outside the tree stay up.
pub fn coupled_state(tree: &CouplingTree, sz: Half, n: usize) -> Result<CoupledState> {
    tree.validate(n)?;
    let root = tree.total_spin();
    if !root.admits_m(sz) {
        return Err(Error::SzOutOfRange { sz: sz.to_string(), total: root.to_string() });
    }
    let by_m = build_recursive(tree, n);
    let amps = by_m.get(&sz.twice()).expect("admissible sz has amplitudes");
    let mut vector = Array1::from_elem(1 << n, Complex64::new(0.0, 0.0));
    for (&mask, &v) in amps {
        vector[mask] = Complex64::new(v, 0.0);
    }
    Ok(CoupledState { tree: tree.clone(), sz, n, vector })
}

/// Inner product <x|y>. States with different sz are orthogonal by
/// construction, so the mismatch case returns 0 without further ado.
pub fn overlap(x: &CoupledState, y: &CoupledState) -> Complex64 {
    debug_assert_eq!(x.n, y.n);
    x.vector.iter().zip(y.vector.iter()).map(|(a, b)| a.conj() * b).sum()
}

/// Product of coupled states over disjoint leaf sets, as one n-spin vector.
pub fn product_state(parts: &[&CoupledState]) -> Result<CVec> {
    let n = parts.first().map(|s| s.n).unwrap_or(0);
    let mut seen: Vec<usize> = Vec::new();
    for s in parts {
        if s.n != n {
            return Err(Error::DimensionMismatch { lhs: 1 << n, rhs: 1 << s.n });
        }
        seen.extend(s.tree.leaves());
    }
    seen.sort_unstable();
    if seen.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidTree("product over overlapping leaf sets".into()));
    }
    let dim = 1usize << n;
    let mut acc: Vec<(usize, Complex64)> = vec![(0, Complex64::new(1.0, 0.0))];
    for s in parts {
        let nz: Vec<(usize, Complex64)> = s
            .vector
            .iter()
            .enumerate()
            .filter(|(_, v)| v.norm_sqr() > 0.0)
            .map(|(i, v)| (i, *v))
            .collect();
        let mut next = Vec::with_capacity(acc.len() * nz.len());
        for &(mask_a, va) in &acc {
            for &(mask_b, vb) in &nz {
                next.push((mask_a | mask_b, va * vb));
            }
        }
        acc = next;
    }
    let mut out = Array1::from_elem(dim, Complex64::new(0.0, 0.0));
    for (mask, v) in acc {
        out[mask] += v;
    }
    Ok(out)
}

/// The two four-spin states of the constraint: the doubly paired state
/// ((1 2)_1 (3 4)_1)_1 and the stretched state (1 (2 3 4)_3/2)_1.
pub fn constraint_states(sz: Half) -> Result<(CoupledState, CoupledState)> {
    let left = CouplingTree::node(
        Half::ONE,
        CouplingTree::pair(1, 2, Half::ONE),
        CouplingTree::pair(3, 4, Half::ONE),
    );
    // The spin-3/2 triple is multiplicity-free: any internal pairing gives
    // the same (symmetric) state.
    let right = CouplingTree::node(
        Half::ONE,
        CouplingTree::leaf(1),
        CouplingTree::node(
            Half::THREE_HALVES,
            CouplingTree::pair(2, 3, Half::ONE),
            CouplingTree::leaf(4),
        ),
    );
    Ok((coupled_state(&left, sz, 4)?, coupled_state(&right, sz, 4)?))
}

/// The overlap F between the two constraint states, at the default sz = 1.
/// Real in the Condon-Shortley convention and independent of sz.
pub fn compute_f() -> f64 {
    compute_f_at(Half::ONE)
}

pub fn compute_f_at(sz: Half) -> f64 {
    let (left, right) = constraint_states(sz).expect("fixed trees are valid");
    let v = overlap(&left, &right);
    debug_assert!(v.im.abs() < 1e-14);
    v.re
}

/// Projector onto the total-spin-s subspace of a subset of spins, acting as
/// the identity elsewhere. Built as the polynomial in the subset's S^2 that
/// is 1 at s(s+1) and 0 at every other attainable eigenvalue. An
/// unattainable s yields the zero projector.
pub fn sector_projector(n: usize, spins: &[usize], s: Half) -> Result<CMat> {
    let k = spins.len();
    if k == 0 {
        return Err(Error::Invalid("sector projector over an empty subset".into()));
    }
    let s2 = subset_s2(n, spins)?;
    let dim = 1 << n;
    let attainable: Vec<Half> = {
        let lo = (k % 2) as i32; // twice the minimum total spin
        let hi = k as i32;
        (lo..=hi).step_by(2).map(Half::from_twice).collect()
    };
    if !attainable.contains(&s) {
        return Ok(Array2::from_elem((dim, dim), Complex64::new(0.0, 0.0)));
    }
    let target = s.casimir();
    let mut proj = identity(dim);
    for other in attainable {
        if other == s {
            continue;
        }
        let ev = other.casimir();
        let scale = Complex64::new(1.0 / (target - ev), 0.0);
        let mut shifted = s2.clone();
        for d in 0..dim {
            shifted[(d, d)] -= Complex64::new(ev, 0.0);
        }
        proj = proj.dot(&shifted.mapv(|x| x * scale));
    }
    Ok(proj)
}

/// All left-comb coupled states ((((1 2) 3) 4) ...) over every admissible
/// intermediate label and sz; together they form an orthonormal basis of the
/// full 2^n space.
pub fn left_comb_basis(n: usize) -> Vec<CoupledState> {
    let mut trees: Vec<(CouplingTree, Half)> = vec![(CouplingTree::leaf(1), Half::HALF)];
    for leaf in 2..=n {
        let mut next = Vec::new();
        for (tree, j) in &trees {
            for jnew in Half::couplings(*j, Half::HALF) {
                next.push((
                    CouplingTree::node(jnew, tree.clone(), CouplingTree::leaf(leaf)),
                    jnew,
                ));
            }
        }
        trees = next;
    }
    let mut states = Vec::new();
    for (tree, j) in trees {
        for sz in j.m_values() {
            states.push(coupled_state(&tree, sz, n).expect("enumerated trees are valid"));
        }
    }
    states
}
