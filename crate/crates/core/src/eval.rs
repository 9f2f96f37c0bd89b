//! Evaluation of `b_T(n)`, exactly or modulo `h`.
//!
//! Single lookups go through a memo of block-head values that only grows
//! forward; evaluating index `n` fills `O(n / m)` heads. [`EvalContext::eval_range`]
//! is a separate per-index forward pass and is what bulk scans should use.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::triple::TripleSpec;

/// Largest modulus accepted by [`Modular`]; keeps `coeff * residue` inside `i128`.
pub const MAX_MODULUS: u64 = 1 << 62;

/// Arithmetic used by the evaluator.
pub trait Backend: Clone + Send + Sync {
    type Value: Clone + PartialEq + Debug + Send + Sync;

    fn zero(&self) -> Self::Value;
    fn from_seed(&self, seed: &BigInt) -> Self::Value;
    /// `acc += coeff * v`
    fn add_scaled(&self, acc: &mut Self::Value, v: &Self::Value, coeff: i64);
}

/// Exact big-integer values.
#[derive(Debug, Clone, Copy, Default)]
pub struct Exact;

impl Backend for Exact {
    type Value = BigInt;

    fn zero(&self) -> BigInt {
        BigInt::zero()
    }

    fn from_seed(&self, seed: &BigInt) -> BigInt {
        seed.clone()
    }

    fn add_scaled(&self, acc: &mut BigInt, v: &BigInt, coeff: i64) {
        match coeff {
            0 => {}
            1 => *acc += v,
            -1 => *acc -= v,
            c => *acc += v * c,
        }
    }
}

/// Residues in `[0, h)`.
#[derive(Debug, Clone, Copy)]
pub struct Modular {
    h: u64,
}

impl Modular {
    pub fn new(h: u64) -> Result<Self> {
        if h == 0 || h > MAX_MODULUS {
            return Err(Error::InvalidModulus { min: 1, got: h });
        }
        Ok(Modular { h })
    }

    pub fn modulus(&self) -> u64 {
        self.h
    }
}

impl Backend for Modular {
    type Value = u64;

    fn zero(&self) -> u64 {
        0
    }

    fn from_seed(&self, seed: &BigInt) -> u64 {
        seed.mod_floor(&BigInt::from(self.h)).to_u64().expect("residue fits u64")
    }

    fn add_scaled(&self, acc: &mut u64, v: &u64, coeff: i64) {
        let h = self.h as i128;
        let sum = *acc as i128 + (coeff as i128 % h) * *v as i128;
        *acc = sum.rem_euclid(h) as u64;
    }
}

/// A triple plus a backend and a forward-growing memo of block-head values.
#[derive(Debug, Clone)]
pub struct EvalContext<B: Backend> {
    triple: TripleSpec,
    backend: B,
    heads: Vec<B::Value>,
    seeds: Vec<B::Value>,
}

impl EvalContext<Exact> {
    pub fn exact(triple: TripleSpec) -> Self {
        Self::new(triple, Exact)
    }
}

impl EvalContext<Modular> {
    pub fn modular(triple: TripleSpec, h: u64) -> Result<Self> {
        Ok(Self::new(triple, Modular::new(h)?))
    }
}

impl<B: Backend> EvalContext<B> {
    pub fn new(triple: TripleSpec, backend: B) -> Self {
        let seeds = triple.init_values().iter().map(|s| backend.from_seed(s)).collect();
        EvalContext { triple, backend, heads: Vec::new(), seeds }
    }

    pub fn triple(&self) -> &TripleSpec {
        &self.triple
    }

    pub fn backend(&self) -> &B {
        &self.backend
    }

    /// `b_T(n)`; zero for negative `n`.
    pub fn eval(&mut self, n: i64) -> B::Value {
        if n < 0 {
            return self.backend.zero();
        }
        let q = n as u64;
        if (q as usize) < self.seeds.len() {
            return self.seeds[q as usize].clone();
        }
        let block = self.triple.k().block_of(q);
        self.fill_heads(block);
        self.heads[block as usize].clone()
    }

    /// `b_T(k_b)` for a block index `b` (zero when `k_b < 0`).
    pub fn eval_head(&mut self, b: i64) -> B::Value {
        let k = self.triple.k().at(b);
        self.eval(k)
    }

    fn fill_heads(&mut self, upto: u64) {
        while self.heads.len() as u64 <= upto {
            let b = self.heads.len() as u64;
            let v = self.next_head(b);
            self.heads.push(v);
        }
    }

    fn value_below(&self, q: i64) -> B::Value {
        if q < 0 {
            return self.backend.zero();
        }
        if (q as usize) < self.seeds.len() {
            return self.seeds[q as usize].clone();
        }
        let blk = self.triple.k().block_of(q as u64) as usize;
        self.heads[blk].clone()
    }

    fn next_head(&self, b: u64) -> B::Value {
        let k = self.triple.k();
        let head = k.at(b as i64);
        if (head as usize) < self.seeds.len() {
            return self.seeds[head as usize].clone();
        }
        let mut acc = self.backend.zero();
        for (j, &rj) in self.triple.r_coeffs().iter().enumerate() {
            let v = self.value_below(b as i64 - j as i64);
            self.backend.add_scaled(&mut acc, &v, rj);
        }
        for (i, &li) in self.triple.l_coeffs().iter().enumerate().skip(1) {
            let prev = b as i64 - i as i64;
            if prev >= 0 {
                let v = self.heads[prev as usize].clone();
                self.backend.add_scaled(&mut acc, &v, -li);
            }
        }
        let l0 = self.triple.l_coeffs()[0];
        if l0 == 1 {
            acc
        } else {
            let mut out = self.backend.zero();
            self.backend.add_scaled(&mut out, &acc, -1);
            out
        }
    }

    /// Values `b_T(0..=n_max)` from one forward pass over indices.
    pub fn eval_range(&self, n_max: u64) -> Vec<B::Value> {
        forward_fill(&self.triple, &self.backend, n_max)
    }

    /// The auxiliary sequence `d_T(n)`: with `n = k_b + s`,
    /// `sum_i (l_0 + .. + l_i) b_T(k_{n-i}) + l * [b_T(k_{k_b - t}) + .. + b_T(k_{n-1-t})]`.
    pub fn eval_d(&mut self, n: u64) -> B::Value {
        let k = self.triple.k().clone();
        let t = self.triple.t() as i64;
        let l = self.triple.l_coeffs().to_vec();
        let n_i = n as i64;
        let head = k.at(k.block_of(n) as i64);
        let mut acc = self.backend.zero();
        let mut partial = 0i64;
        for (i, &li) in l.iter().enumerate() {
            partial += li;
            let v = self.eval_head(n_i - i as i64);
            self.backend.add_scaled(&mut acc, &v, partial);
        }
        let l_sum = self.triple.l_sum();
        if l_sum != 0 {
            for x in (head - t)..=(n_i - 1 - t) {
                let v = self.eval_head(x);
                self.backend.add_scaled(&mut acc, &v, l_sum);
            }
        }
        acc
    }
}

/// Per-index forward fill; independent of the head memo used by `eval`.
pub fn forward_fill<B: Backend>(triple: &TripleSpec, backend: &B, n_max: u64) -> Vec<B::Value> {
    let k = triple.k();
    let init = triple.init_values();
    let l = triple.l_coeffs();
    let r = triple.r_coeffs();
    let mut vals: Vec<B::Value> = Vec::with_capacity(n_max as usize + 1);
    let at = |vals: &Vec<B::Value>, q: i64| -> B::Value {
        if q < 0 {
            backend.zero()
        } else {
            vals[q as usize].clone()
        }
    };
    for q in 0..=n_max {
        let v = if (q as usize) < init.len() {
            backend.from_seed(&init[q as usize])
        } else {
            let b = k.block_of(q);
            if k.at(b as i64) as u64 != q {
                vals[q as usize - 1].clone()
            } else {
                // l_0 b(k_b) = sum_j r_j b(b - j) - sum_{i>=1} l_i b(k_{b-i})
                let mut acc = backend.zero();
                for (j, &rj) in r.iter().enumerate() {
                    backend.add_scaled(&mut acc, &at(&vals, b as i64 - j as i64), rj);
                }
                for (i, &li) in l.iter().enumerate().skip(1) {
                    let idx = k.at(b as i64 - i as i64);
                    backend.add_scaled(&mut acc, &at(&vals, idx), -li);
                }
                let mut out = backend.zero();
                backend.add_scaled(&mut out, &acc, l[0]);
                out
            }
        };
        vals.push(v);
    }
    vals
}

/// `b_T(n) mod h` for every `n <= n_max`, as machine residues.
pub fn residues(triple: &TripleSpec, h: u64, n_max: u64) -> Result<Vec<u64>> {
    Ok(forward_fill(triple, &Modular::new(h)?, n_max))
}

/// Exact values `b_T(0..=n_max)`.
pub fn exact_values(triple: &TripleSpec, n_max: u64) -> Vec<BigInt> {
    forward_fill(triple, &Exact, n_max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::triple::{BuiltinFamily, FamilyTag, KSpec};

    fn fam(tag: FamilyTag, m: u64) -> TripleSpec {
        BuiltinFamily::new(tag, m).triple().unwrap()
    }

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn binary_partitions_small() {
        let mut ctx = EvalContext::exact(fam(FamilyTag::Bm, 2));
        assert_eq!(ctx.eval(8), BigInt::from(10));
        assert_eq!(ctx.eval(10), BigInt::from(14));
        assert_eq!(ctx.eval(-4), BigInt::from(0));
        assert_eq!(ctx.eval_range(7), big(&[1, 1, 2, 2, 4, 4, 6, 6]));
    }

    #[test]
    fn ternary_partitions() {
        let mut ctx = EvalContext::exact(fam(FamilyTag::Bm, 3));
        assert_eq!(ctx.eval(9), BigInt::from(5));
        assert_eq!(ctx.eval(12), BigInt::from(7));
    }

    #[test]
    fn no_gaps_binary() {
        let ctx = EvalContext::exact(fam(FamilyTag::Cm, 2));
        assert_eq!(ctx.eval_range(7), big(&[1, 1, 1, 2, 2, 3, 3, 5]));
    }

    #[test]
    fn overline_binary() {
        let mut ctx = EvalContext::exact(fam(FamilyTag::OvBm, 2));
        assert_eq!(ctx.eval(2), BigInt::from(3));
        assert_eq!(ctx.eval(4), BigInt::from(7));
    }

    #[test]
    fn modular_backend() {
        let mut ctx = EvalContext::modular(fam(FamilyTag::Bm, 3), 5).unwrap();
        assert_eq!(ctx.eval(9), 0);
        assert_eq!(ctx.eval(15), 4);
        let ctx2 = EvalContext::modular(fam(FamilyTag::Bm, 2), 2).unwrap();
        assert_eq!(ctx2.eval_range(7), vec![1, 1, 0, 0, 0, 0, 0, 0]);
        assert!(Modular::new(0).is_err());
    }

    #[test]
    fn single_and_range_agree() {
        for tag in [FamilyTag::Bm, FamilyTag::Cm, FamilyTag::OvBm] {
            for m in 2..6 {
                let t = fam(tag, m);
                let range = exact_values(&t, 300);
                let mut ctx = EvalContext::exact(t);
                for n in (0..=300).rev() {
                    assert_eq!(ctx.eval(n as i64), range[n], "{tag} m={m} n={n}");
                }
            }
        }
    }

    #[test]
    fn negative_leading_coefficient() {
        // L = (-1, 1) encodes the same recurrence as (1, -1) with R negated.
        let k = KSpec::multiples(2).unwrap();
        let t = TripleSpec::new(k, vec![-1, 1], vec![-1], big(&[1]), None).unwrap();
        assert_eq!(exact_values(&t, 20), exact_values(&fam(FamilyTag::Bm, 2), 20));
        let mut ctx = EvalContext::exact(t);
        assert_eq!(ctx.eval(10), BigInt::from(14));
    }

    #[test]
    fn d_sequence_matches_heads_for_unit_difference() {
        // For L = (1, -1) the bracket vanishes and d_T(n) = b_T(k_n).
        let mut ctx = EvalContext::exact(fam(FamilyTag::Bm, 2));
        assert_eq!(ctx.eval_d(10), BigInt::from(60));
        let mut ctx = EvalContext::exact(fam(FamilyTag::OvBm, 2));
        assert_eq!(ctx.eval_d(2), BigInt::from(7));
        assert_eq!(ctx.eval_d(0), BigInt::from(1));
    }
}
