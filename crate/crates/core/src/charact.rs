//! Digit characterizations of the built-in families modulo `m`, `mu_2`, `m^2`
//! and `2m`, plus the exact block identity for `L = (1, -1)` triples.
//!
//! Digits are little-endian: `a_0` is the least significant.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::eval::{EvalContext, Exact};
use crate::triple::{BuiltinFamily, FamilyTag, TripleSpec};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DigitVector {
    pub base: u64,
    pub digits: Vec<u64>,
    pub value: u64,
}

impl DigitVector {
    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    /// First zero digit, if any.
    pub fn first_zero(&self) -> Option<usize> {
        self.digits.iter().position(|&a| a == 0)
    }
}

/// Base-`m` digits of `n`; `digits(0, m) == [0]`.
pub fn digits(n: u64, m: u64) -> DigitVector {
    assert!(m >= 2, "base must be at least 2");
    let mut out = Vec::new();
    let mut rest = n;
    loop {
        out.push(rest % m);
        rest /= m;
        if rest == 0 {
            break;
        }
    }
    DigitVector { base: m, digits: out, value: n }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Mu2 {
    pub m: u64,
    pub value: u64,
}

impl Mu2 {
    /// `m^2` for odd `m`, `m^2 / 2` for even `m`.
    pub fn new(m: u64) -> Self {
        let sq = m * m;
        Mu2 { m, value: if m % 2 == 0 { sq / 2 } else { sq } }
    }
}

fn check_base(m: u64) -> Result<()> {
    if m < 2 {
        return Err(Error::InvalidDegree(m));
    }
    Ok(())
}

/// Product of `f(j)` over `j = lo..=hi` with the convention that an empty
/// range is 1 when `lo - hi == 1` and 0 when `lo - hi > 1`.
fn range_product(lo: i64, hi: i64, modulus: u64, f: impl Fn(usize) -> u64) -> u64 {
    if lo > hi {
        return if lo - hi == 1 { 1 % modulus } else { 0 };
    }
    (lo..=hi).fold(1 % modulus, |acc, j| mul_mod(acc, f(j as usize), modulus))
}

fn mul_mod(a: u64, b: u64, modulus: u64) -> u64 {
    ((a as u128 * b as u128) % modulus as u128) as u64
}

fn add_mod(a: u64, b: u64, modulus: u64) -> u64 {
    ((a as u128 + b as u128) % modulus as u128) as u64
}

/// `prod (a_j + 1) mod m`, which equals `b_m(m n) mod m`.
pub fn char_b_mod_m(m: u64, n: u64) -> u64 {
    let d = digits(n, m);
    d.digits.iter().fold(1 % m, |acc, &a| mul_mod(acc, a + 1, m))
}

/// `b_m(m n) mod mu_2` from the digits of `n`.
pub fn char_b_mod_mu2(m: u64, n: u64) -> u64 {
    let mu = Mu2::new(m).value;
    let a = digits(n, m).digits;
    let s = a.len() as i64 - 1;
    let factor = |j: usize| a[j] + 1;
    let mut total = range_product(0, s, mu, factor);
    let mut correction = 0u64;
    for i in 1..=s {
        let ai = a[i as usize];
        let tri = ai * (ai + 1) / 2;
        let others = mul_mod(
            range_product(0, i - 2, mu, factor),
            range_product(i + 1, s, mu, factor),
            mu,
        );
        correction = add_mod(correction, mul_mod(tri % mu, others, mu), mu);
    }
    total = add_mod(total, mul_mod(m % mu, correction, mu), mu);
    total
}

/// `c_m(m n + 1) mod m`, unwinding `c_m(m(m n' + q + 1) + 1) = 1 + (q + 1) c_m(m n' + 1)`
/// down to `n <= m`, whose values come from the evaluator.
pub fn char_c_mod_m(m: u64, n: u64) -> Result<u64> {
    check_base(m)?;
    if n < 1 {
        return Err(Error::Domain(format!("n must be at least 1, got {n}")));
    }
    // peel: n = m n' + q + 1 with n' >= 1
    let mut coeffs = Vec::new();
    let mut cur = n;
    while cur > m {
        let q = (cur - 1) % m;
        coeffs.push(q + 1);
        cur = (cur - 1) / m;
    }
    let triple = BuiltinFamily::new(FamilyTag::Cm, m).triple()?;
    let mut ctx = EvalContext::modular(triple, m)?;
    let mut acc = ctx.eval((m * cur + 1) as i64);
    for &c in coeffs.iter().rev() {
        acc = (1 + mul_mod(c % m, acc, m)) % m;
    }
    Ok(acc)
}

/// `prod (2 a_j + 1) mod m`, which equals `ovb_m(m n) mod m`.
pub fn char_ovb_mod_m(m: u64, n: u64) -> u64 {
    digits(n, m).digits.iter().fold(1 % m, |acc, &a| mul_mod(acc, 2 * a + 1, m))
}

fn zero_free(m: u64, n: u64) -> Result<Vec<u64>> {
    let d = digits(n, m);
    if let Some(position) = d.first_zero() {
        return Err(Error::ZeroDigit { position, digit: 0 });
    }
    Ok(d.digits)
}

/// `ovb_m(m n) mod m^2` for `n` whose base-`m` digits are all nonzero.
pub fn char_ovb_mod_m2(m: u64, n: u64) -> Result<u64> {
    check_base(m)?;
    let a = zero_free(m, n)?;
    let m2 = m * m;
    let s = a.len() as i64 - 1;
    let factor = |j: usize| 2 * a[j] + 1;
    let mut correction = 0u64;
    for i in 1..=s {
        let ai = a[i as usize];
        let others = mul_mod(
            range_product(0, i - 2, m2, factor),
            range_product(i + 1, s, m2, factor),
            m2,
        );
        correction = add_mod(correction, mul_mod(ai * ai % m2, others, m2), m2);
    }
    let base = range_product(0, s, m2, factor);
    Ok(add_mod(base, mul_mod(2 * m % m2, correction, m2), m2))
}

/// `ovb_m(m n) mod 2m` for even `m` and zero-free digits.
pub fn char_ovb_mod_2m(m: u64, n: u64) -> Result<u64> {
    check_base(m)?;
    if m % 2 == 1 {
        return Err(Error::OddBase(m));
    }
    let a = zero_free(m, n)?;
    let modulus = 2 * m;
    Ok(a.iter().fold(1 % modulus, |acc, &d| mul_mod(acc, 2 * d + 1, modulus)))
}

struct IdentityTerms {
    m: i64,
    base: BigInt,
    tail_sum: BigInt,
    coeff_head: i64,
    head: BigInt,
    coeff_prev: i64,
    prev: BigInt,
}

fn identity_terms(t: &TripleSpec, n: u64, q: u64) -> Result<IdentityTerms> {
    if !t.has_unit_difference_l() {
        return Err(Error::HypothesisViolated(format!(
            "L must be (1, -1), got {:?}",
            t.l_coeffs()
        )));
    }
    let k = t.k();
    let m = k.period();
    let n0 = k.regular_from();
    let u = t.u() as u64;
    if u >= m {
        return Err(Error::HypothesisViolated(format!("u = {u} must be below the gap {m}")));
    }
    if n0 > 0 && k.gap(n0 - 1) <= u {
        return Err(Error::HypothesisViolated(format!(
            "gap k_{n0} - k_{} must exceed u = {u}",
            n0 - 1
        )));
    }
    if n < n0 {
        return Err(Error::Domain(format!("n = {n} must be at least n0 = {n0}")));
    }
    if q >= m {
        return Err(Error::Domain(format!("q = {q} must be below m = {m}")));
    }
    let r = t.r_coeffs();
    let rr = |i: usize| r.get(i).copied().unwrap_or(0);
    let (m_i, q_i, n_i, n0_i) = (m as i64, q as i64, n as i64, n0 as i64);
    let mut ctx = EvalContext::new(t.clone(), Exact);

    let mut base = ctx.eval_head(k.at(n0_i) - 1);
    let weighted: i64 = (1..=u as usize).map(|i| i as i64 * rr(i)).sum();
    base += ctx.eval_head(n0_i - 1) * weighted;

    let coeff_head: i64 = (0..=q as usize).map(|i| (q_i - i as i64 + 1) * rr(i)).sum();
    // For i > q the window ends inside block n - 1, one block before the
    // full-block sum, hence q - i + 1 rather than m + q - i + 1.
    let coeff_prev: i64 = (q as usize + 1..=u as usize).map(|i| (q_i - i as i64 + 1) * rr(i)).sum();
    let head = ctx.eval_head(n_i);
    let prev = ctx.eval_head(n_i - 1);
    let mut tail_sum = BigInt::zero();
    for j in n0..n {
        tail_sum += ctx.eval_head(j as i64);
    }
    Ok(IdentityTerms { m: m_i, base, tail_sum, coeff_head, head, coeff_prev, prev })
}

/// Right-hand side of the exact block identity
///
/// ```text
/// b(k_{k_{n0}-1}) + b(k_{n0-1}) sum_{i>=1} i r_i + b(k_n) sum_{i<=q} (q-i+1) r_i
///   + b(k_{n-1}) sum_{i>q} (q-i+1) r_i + m r sum_{j=n0}^{n-1} b(k_j)
/// ```
///
/// which equals `b_T(k_{k_n + q})`. Requires `L = (1, -1)`, a `K` with
/// constant gap `m` from `n0` on and `u` below every gap from `n0 - 1` on.
pub fn lemchar_rhs(t: &TripleSpec, n: u64, q: u64) -> Result<BigInt> {
    let terms = identity_terms(t, n, q)?;
    Ok(terms.base
        + terms.head * terms.coeff_head
        + terms.prev * terms.coeff_prev
        + terms.tail_sum * (terms.m * t.r_sum()))
}

/// The identity reduced modulo `m`: the `m r sum` term drops.
pub fn charact_general(t: &TripleSpec, n: u64, q: u64) -> Result<u64> {
    let terms = identity_terms(t, n, q)?;
    let v = terms.base + terms.head * terms.coeff_head + terms.prev * terms.coeff_prev;
    let m = BigInt::from(terms.m);
    Ok(((v % &m + &m) % &m).to_u64().expect("residue fits u64"))
}

/// Target value `b_T(k_{k_n + q})` of the identity.
pub fn identity_target(t: &TripleSpec, n: u64, q: u64) -> BigInt {
    let k = t.k();
    let mut ctx = EvalContext::new(t.clone(), Exact);
    ctx.eval_head(k.at(n as i64) + q as i64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fam(tag: FamilyTag, m: u64) -> TripleSpec {
        BuiltinFamily::new(tag, m).triple().unwrap()
    }

    #[test]
    fn digit_vectors() {
        assert_eq!(digits(5, 3).digits, vec![2, 1]);
        assert_eq!(digits(0, 7).digits, vec![0]);
        assert_eq!(digits(113, 4).digits, vec![1, 0, 3, 1]);
    }

    #[test]
    fn mu2_values() {
        assert_eq!(Mu2::new(3).value, 9);
        assert_eq!(Mu2::new(4).value, 8);
        assert_eq!(Mu2::new(2).value, 2);
    }

    #[test]
    fn b_mod_m_examples() {
        assert_eq!(char_b_mod_m(3, 4), 1);
        assert_eq!(char_b_mod_m(5, 0), 1);
        assert_eq!(char_b_mod_m(2, 2), 0);
    }

    #[test]
    fn b_mod_mu2_examples() {
        assert_eq!(char_b_mod_mu2(3, 4), 7);
        assert_eq!(char_b_mod_mu2(3, 2), 3);
        assert_eq!(char_b_mod_mu2(2, 1), 0);
    }

    #[test]
    fn c_mod_m_examples() {
        assert_eq!(char_c_mod_m(3, 4).unwrap(), 0);
        assert_eq!(char_c_mod_m(2, 1).unwrap(), 0);
        assert_eq!(char_c_mod_m(5, 1).unwrap(), 2);
        assert!(matches!(char_c_mod_m(3, 0), Err(Error::Domain(_))));
    }

    #[test]
    fn ovb_examples() {
        assert_eq!(char_ovb_mod_m(2, 1), 1);
        assert_eq!(char_ovb_mod_m(2, 2), 1);
        assert_eq!(char_ovb_mod_m(3, 0), 1);
        assert_eq!(char_ovb_mod_m2(3, 4).unwrap(), 6);
        assert_eq!(char_ovb_mod_m2(2, 1).unwrap(), 3);
        assert_eq!(char_ovb_mod_m2(3, 3), Err(Error::ZeroDigit { position: 0, digit: 0 }));
        assert_eq!(char_ovb_mod_2m(2, 1).unwrap(), 3);
        assert_eq!(char_ovb_mod_2m(4, 5).unwrap(), 1);
        assert_eq!(char_ovb_mod_2m(3, 1), Err(Error::OddBase(3)));
    }

    #[test]
    fn empty_product_convention() {
        assert_eq!(range_product(1, 0, 7, |_| 3), 1);
        assert_eq!(range_product(2, 0, 7, |_| 3), 0);
        assert_eq!(range_product(0, 1, 100, |j| j as u64 + 2), 6);
    }

    #[test]
    fn identity_examples() {
        let b2 = fam(FamilyTag::Bm, 2);
        assert_eq!(lemchar_rhs(&b2, 3, 1).unwrap(), BigInt::from(26));
        let ovb2 = fam(FamilyTag::OvBm, 2);
        assert_eq!(lemchar_rhs(&ovb2, 2, 0).unwrap(), identity_target(&ovb2, 2, 0));
        let c3 = fam(FamilyTag::Cm, 3);
        assert_eq!(lemchar_rhs(&c3, 2, 2).unwrap(), identity_target(&c3, 2, 2));
    }

    #[test]
    fn identity_small_sweep() {
        for tag in [FamilyTag::Bm, FamilyTag::Cm, FamilyTag::OvBm] {
            for m in 2..4u64 {
                let t = fam(tag, m);
                for n in t.k().regular_from()..12 {
                    for q in 0..m {
                        assert_eq!(lemchar_rhs(&t, n, q).unwrap(), identity_target(&t, n, q));
                    }
                }
            }
        }
    }

    #[test]
    fn identity_rejects_bad_triples() {
        // u = 1 is not below the gap m = ... for m = 1 impossible; use a wide R instead
        let k = crate::triple::KSpec::multiples(2).unwrap();
        let t = TripleSpec::new(k, vec![1, -1], vec![1, 1, 1], vec![BigInt::from(1)], None)
            .unwrap();
        assert!(matches!(lemchar_rhs(&t, 1, 0), Err(Error::HypothesisViolated(_))));
        let k = crate::triple::KSpec::multiples(3).unwrap();
        let t = TripleSpec::new(k, vec![1, -2], vec![1], vec![BigInt::from(1)], None).unwrap();
        assert!(matches!(charact_general(&t, 1, 0), Err(Error::HypothesisViolated(_))));
    }

    #[test]
    fn reduced_identity_specializations() {
        // b_m: (q + 1) b_m(k_n) mod m
        for m in 2..6u64 {
            let t = fam(FamilyTag::Bm, m);
            let mut ctx = EvalContext::exact(t.clone());
            for n in 1..20u64 {
                for q in 0..m {
                    let head = ctx.eval_head(n as i64) % BigInt::from(m);
                    let want = (BigInt::from(q + 1) * head) % BigInt::from(m);
                    assert_eq!(BigInt::from(charact_general(&t, n, q).unwrap()), want);
                }
            }
        }
        // ovb_m: (2q + 1) ovb_m(m n) mod m
        for m in 2..6u64 {
            let t = fam(FamilyTag::OvBm, m);
            let mut ctx = EvalContext::exact(t.clone());
            for n in 1..20u64 {
                for q in 0..m {
                    let head = ctx.eval((m * n) as i64) % BigInt::from(m);
                    let want = (BigInt::from(2 * q + 1) * head) % BigInt::from(m);
                    assert_eq!(BigInt::from(charact_general(&t, n, q).unwrap()), want);
                }
            }
        }
        // c_m: 1 + (q + 1) c_m(m n + 1) mod m
        for m in 2..6u64 {
            let t = fam(FamilyTag::Cm, m);
            let mut ctx = EvalContext::exact(t.clone());
            for n in 1..20u64 {
                for q in 0..m {
                    let head = ctx.eval((m * n + 1) as i64);
                    let want = (BigInt::from(1) + BigInt::from(q + 1) * head) % BigInt::from(m);
                    assert_eq!(BigInt::from(charact_general(&t, n, q).unwrap()), want);
                }
            }
        }
    }
}
