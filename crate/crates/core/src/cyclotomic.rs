//! Exact vanishing tests for integer combinations of rational-angle phases.
//!
//! A sum sum_k c_k e^{-i pi t_k} with integer c_k and rational t_k lives in a
//! cyclotomic field: with N = 2 lcm(denominators), every phase is a power of
//! the primitive N-th root zeta = e^{-2 pi i / N}. The sum vanishes exactly
//! iff the integer polynomial sum_k c_k x^{e_k} is divisible by the N-th
//! cyclotomic polynomial. This lets snapped durations be re-verified without
//! floating point.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, Signed, Zero};

fn trim(p: &mut Vec<BigInt>) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

/// Remainder of `num` modulo the monic polynomial `den`.
fn poly_rem(mut num: Vec<BigInt>, den: &[BigInt]) -> Vec<BigInt> {
    debug_assert!(den.last().is_some_and(|c| c.is_one()));
    let d = den.len() - 1;
    while num.len() > d {
        let lead = num.pop().expect("nonempty");
        if lead.is_zero() {
            continue;
        }
        let shift = num.len() - d;
        for (k, c) in den[..d].iter().enumerate() {
            num[shift + k] -= &lead * c;
        }
    }
    trim(&mut num);
    num
}

/// Exact quotient `num / den` for monic `den` dividing `num`.
fn poly_div_exact(mut num: Vec<BigInt>, den: &[BigInt]) -> Vec<BigInt> {
    debug_assert!(den.last().is_some_and(|c| c.is_one()));
    let d = den.len() - 1;
    let mut quot = vec![BigInt::zero(); num.len().saturating_sub(d)];
    while num.len() > d {
        let lead = num.pop().expect("nonempty");
        let shift = num.len() - d;
        if lead.is_zero() {
            continue;
        }
        for (k, c) in den[..d].iter().enumerate() {
            num[shift + k] -= &lead * c;
        }
        quot[shift] = lead;
    }
    trim(&mut num);
    debug_assert!(num.is_empty(), "division was not exact");
    quot
}

/// The N-th cyclotomic polynomial, computed as (x^N - 1) divided by the
/// cyclotomic polynomials of all proper divisors of N.
pub fn cyclotomic_polynomial(n: u64) -> Vec<BigInt> {
    assert!(n >= 1);
    // x^n - 1
    let mut poly = vec![BigInt::zero(); n as usize + 1];
    poly[0] = -BigInt::one();
    poly[n as usize] = BigInt::one();
    for d in 1..n {
        if n.is_multiple_of(d) {
            let phi_d = cyclotomic_polynomial(d);
            poly = poly_div_exact(poly, &phi_d);
        }
    }
    poly
}

/// Exactly decides whether sum_k c_k e^{-i pi t_k} = 0.
pub fn phase_sum_is_zero(terms: &[(i64, Rational64)]) -> bool {
    if terms.iter().all(|(c, _)| *c == 0) {
        return true;
    }
    let two = Rational64::from_integer(2);
    let mut lcm: i64 = 1;
    let reduced: Vec<Rational64> = terms
        .iter()
        .map(|(_, t)| {
            let mut t = *t;
            while t.is_negative() {
                t += two;
            }
            while t >= two {
                t -= two;
            }
            lcm = lcm.lcm(t.denom());
            t
        })
        .collect();
    let n = 2 * lcm as u64;
    let mut coeffs = vec![BigInt::zero(); n as usize];
    for ((c, _), t) in terms.iter().zip(&reduced) {
        // e^{-i pi p/q} = zeta_N^{p N / (2q)} with zeta_N = e^{-2 pi i / N}.
        let exp = (t.numer() * (n as i64 / (2 * t.denom()))) as usize % n as usize;
        coeffs[exp] += BigInt::from(*c);
    }
    trim(&mut coeffs);
    if coeffs.is_empty() {
        return true;
    }
    poly_rem(coeffs, &cyclotomic_polynomial(n)).is_empty()
}
