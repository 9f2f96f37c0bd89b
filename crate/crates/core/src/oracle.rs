//! Brute-force partition counters, kept independent of the recurrence engine.
//!
//! Exact counts are practical up to roughly `n = 5000`.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Variant {
    AllMAry,
    NoGaps,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartitionCount {
    pub n: u64,
    pub m: u64,
    pub count: BigInt,
    pub variant: Variant,
}

/// Counts partitions of `n` into powers `m^0..=m^top`, memoized on
/// `(remaining, top)`.
struct PowerCounter {
    powers: Vec<u64>,
    memo: HashMap<(u64, usize), BigInt>,
}

impl PowerCounter {
    fn new(m: u64, n: u64) -> Self {
        let mut powers = vec![1u64];
        while let Some(next) = powers.last().unwrap().checked_mul(m) {
            if next > n {
                break;
            }
            powers.push(next);
        }
        PowerCounter { powers, memo: HashMap::new() }
    }

    fn count(&mut self, n: u64, top: usize) -> BigInt {
        if top == 0 || n == 0 {
            return BigInt::one();
        }
        let top = top.min(self.powers.len() - 1);
        if top == 0 {
            return BigInt::one();
        }
        if let Some(v) = self.memo.get(&(n, top)) {
            return v.clone();
        }
        let p = self.powers[top];
        let mut total = BigInt::zero();
        let mut rest = n;
        loop {
            total += self.count(rest, top - 1);
            if rest < p {
                break;
            }
            rest -= p;
        }
        self.memo.insert((n, top), total.clone());
        total
    }
}

/// Number of ways to write `n = sum n_i m^i` with `n_i >= 0`.
pub fn count_mary(m: u64, n: u64) -> BigInt {
    assert!(m >= 2, "base must be at least 2");
    let mut pc = PowerCounter::new(m, n);
    let top = pc.powers.len() - 1;
    pc.count(n, top)
}

/// m-ary partitions whose used powers are exactly `m^0..=m^t` for some `t`.
pub fn count_mary_nogaps(m: u64, n: u64) -> BigInt {
    assert!(m >= 2, "base must be at least 2");
    if n == 0 {
        return BigInt::one();
    }
    let mut pc = PowerCounter::new(m, n);
    let mut total = BigInt::zero();
    // reserve one copy of each of m^0..=m^t, distribute the rest freely
    let mut reserved = 0u64;
    for t in 0..pc.powers.len() {
        reserved += pc.powers[t];
        if reserved > n {
            break;
        }
        total += pc.count(n - reserved, t);
    }
    total
}

pub fn partition_count(variant: Variant, m: u64, n: u64) -> PartitionCount {
    let count = match variant {
        Variant::AllMAry => count_mary(m, n),
        Variant::NoGaps => count_mary_nogaps(m, n),
    };
    PartitionCount { n, m, count, variant }
}

/// Direct transcription of the defining recurrence of the `R = (1, 1)` family:
/// constant on `[mn, mn + m - 1]`, `v(mn) - v(mn - 1) = v(n) + v(n - 1)`, `v(0) = 1`.
pub fn overline_direct(m: u64, n_max: u64) -> Vec<BigInt> {
    assert!(m >= 2, "base must be at least 2");
    let len = n_max as usize + 1;
    let mut v: Vec<BigInt> = Vec::with_capacity(len);
    for idx in 0..len {
        let value = if idx == 0 {
            BigInt::one()
        } else if idx as u64 % m != 0 {
            v[idx - 1].clone()
        } else {
            let q = idx / m as usize;
            &v[idx - 1] + &v[q] + &v[q - 1]
        };
        v.push(value);
    }
    v
}
