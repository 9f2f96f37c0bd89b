//! Smallest-zero searches, residue statistics and the classical congruences
//! for binary and m-ary partitions.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::eval::{exact_values, forward_fill, Modular};
use crate::report::CheckReport;
use crate::triple::{BuiltinFamily, FamilyTag, TripleSpec};

/// All primes `<= limit`, ascending.
pub fn sieve_primes(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        out.push(i as u64);
        let mut j = i * i;
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    out
}

/// Least `1 <= n <= n_max` with `b_T(n) = 0 mod h`.
pub fn smallest_zero(t: &TripleSpec, h: u64, n_max: u64) -> Result<Option<u64>> {
    if h < 2 {
        return Err(Error::InvalidModulus { min: 2, got: h });
    }
    let values = forward_fill(t, &Modular::new(h)?, n_max);
    Ok(values.iter().enumerate().skip(1).find(|(_, &v)| v == 0).map(|(n, _)| n as u64))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SearchRow {
    pub m: u64,
    pub p: u64,
    /// `None` when no solution exists up to `bound`.
    pub n1: Option<u64>,
    pub bound: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SearchReport {
    pub family: FamilyTag,
    pub rows: Vec<SearchRow>,
}

/// Primes `m + 2 <= p <= m^2 + m + 1`.
pub fn appendix_primes(m: u64) -> Vec<u64> {
    sieve_primes(m * m + m + 1).into_iter().filter(|&p| p >= m + 2).collect()
}

/// Smallest solutions for every `m` in `m_lo..=m_hi` and every prime in
/// `m + 2 ..= m^2 + m + 1`, sorted by `(m, p)`.
pub fn appendix_table(family: FamilyTag, m_lo: u64, m_hi: u64, n_max: u64) -> Result<SearchReport> {
    if m_lo < 2 || m_lo > m_hi {
        return Err(Error::Domain(format!("bad degree range {m_lo}..{m_hi}")));
    }
    let cells: Vec<(u64, u64)> =
        (m_lo..=m_hi).flat_map(|m| appendix_primes(m).into_iter().map(move |p| (m, p))).collect();
    let mut rows = cells
        .par_iter()
        .map(|&(m, p)| {
            let t = BuiltinFamily::new(family, m).triple()?;
            Ok(SearchRow { m, p, n1: smallest_zero(&t, p, n_max)?, bound: n_max })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by_key(|r| (r.m, r.p));
    Ok(SearchReport { family, rows })
}

/// Re-checks every found row: the value at `n1` vanishes mod `p` and no
/// smaller positive index does.
pub fn verify_report(report: &SearchReport) -> Result<CheckReport> {
    let mut check = CheckReport::new(format!("smallest zeros for {}", report.family));
    for row in &report.rows {
        let Some(n1) = row.n1 else { continue };
        let t = BuiltinFamily::new(report.family, row.m).triple()?;
        let values = forward_fill(&t, &Modular::new(row.p)?, n1);
        let first = values.iter().skip(1).position(|&v| v == 0).map(|i| i as u64 + 1);
        check.record(first == Some(n1), || {
            format!("m = {}, p = {}: reported {n1}, recomputed {first:?}", row.m, row.p)
        });
    }
    Ok(check)
}

/// First zero mod `h` at an index beyond the block containing `after`.
pub fn zero_in_later_block(t: &TripleSpec, h: u64, after: u64, n_max: u64) -> Result<Option<u64>> {
    let k = t.k();
    let start = k.at(k.block_of(after) as i64 + 1) as u64;
    let values = forward_fill(t, &Modular::new(h)?, n_max);
    Ok((start..=n_max).find(|&n| values[n as usize] == 0))
}

/// Counts of `b_T(n) mod h` for `0 <= n <= big_n`.
pub fn residue_coverage(t: &TripleSpec, h: u64, big_n: u64) -> Result<Vec<u64>> {
    if h < 2 {
        return Err(Error::InvalidModulus { min: 2, got: h });
    }
    let mut hist = vec![0u64; h as usize];
    for v in forward_fill(t, &Modular::new(h)?, big_n) {
        hist[v as usize] += 1;
    }
    Ok(hist)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    AllDivisible,
    AllNonCoprime,
    AllClassesSeen,
    Inconclusive,
}

/// Empirical evidence only: a finite scan cannot decide the infinitary
/// alternatives.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrichotomyVerdict {
    pub h: u64,
    pub scanned: u64,
    pub verdict: Verdict,
    pub class_counts: Vec<u64>,
}

pub fn classify_trichotomy(t: &TripleSpec, h: u64, big_n: u64) -> Result<TrichotomyVerdict> {
    let class_counts = residue_coverage(t, h, big_n)?;
    let seen = |r: usize| class_counts[r] > 0;
    let verdict = if (1..h as usize).all(|r| !seen(r)) {
        Verdict::AllDivisible
    } else if (0..h as usize).all(seen) {
        Verdict::AllClassesSeen
    } else if (1..h as usize).filter(|&r| seen(r)).all(|r| (r as u64).gcd(&h) > 1) {
        Verdict::AllNonCoprime
    } else {
        Verdict::Inconclusive
    };
    Ok(TrichotomyVerdict { h, scanned: big_n + 1, verdict, class_counts })
}

fn binary_values(n_max: u64) -> Vec<BigInt> {
    exact_values(&BuiltinFamily::new(FamilyTag::Bm, 2).triple().expect("b_2"), n_max)
}

/// `b_2(n)` is even and not divisible by 8 for `2 <= n <= big_n`.
pub fn check_churchhouse(big_n: u64) -> CheckReport {
    let mut report = CheckReport::new("binary partitions mod 8");
    if big_n < 2 {
        return report;
    }
    let values = forward_fill(
        &BuiltinFamily::new(FamilyTag::Bm, 2).triple().expect("b_2"),
        &Modular::new(8).expect("modulus"),
        big_n,
    );
    for (n, &v) in values.iter().enumerate().skip(2) {
        report.record(v % 2 == 0 && v != 0, || format!("b_2({n}) = {v} mod 8"));
    }
    report
}

/// `b_2(2^{s+2} n) - b_2(2^s n) = 2^mu (mod 2^{mu+1})`, `mu = floor((3s+4)/2)`,
/// for `1 <= s <= s_max` and odd `n <= n_max_odd`. The congruence is a
/// statement about `s >= 1`; at `s = 0` it already fails for `n = 1`.
pub fn check_rodseth_gupta(s_max: u32, n_max_odd: u64) -> CheckReport {
    let mut report = CheckReport::new("Rodseth-Gupta");
    if s_max == 0 || n_max_odd == 0 {
        return report;
    }
    let values = binary_values((1u64 << (s_max + 2)) * n_max_odd);
    for s in 1..=s_max {
        let mu = (3 * s + 4) / 2;
        let modulus = BigInt::from(1u64) << (mu + 1);
        let target = BigInt::from(1u64) << mu;
        for n in (1..=n_max_odd).step_by(2) {
            let hi = &values[((1u64 << (s + 2)) * n) as usize];
            let lo = &values[((1u64 << s) * n) as usize];
            let diff = (hi - lo).mod_floor(&modulus);
            report.record(diff == target, || {
                format!("s = {s}, n = {n}: difference is {diff} mod 2^{}", mu + 1)
            });
        }
    }
    report
}

/// `b_m(m^{r+1} n) = b_m(m^r n) (mod m^r / gamma_r)` with `gamma_r = 1` for
/// odd `m` and `2^{r-1}` for even `m`.
pub fn check_andrews_gupta(m: u64, r_max: u32, n_max: u64) -> Result<CheckReport> {
    if m < 2 {
        return Err(Error::InvalidDegree(m));
    }
    let mut report = CheckReport::new(format!("Andrews-Gupta, m = {m}"));
    if r_max == 0 || n_max == 0 {
        return Ok(report);
    }
    let t = BuiltinFamily::new(FamilyTag::Bm, m).triple()?;
    let values = exact_values(&t, m.pow(r_max + 1) * n_max);
    for r in 1..=r_max {
        let gamma = if m % 2 == 1 { 1 } else { 1u64 << (r - 1) };
        let modulus = BigInt::from(m.pow(r) / gamma);
        for n in 1..=n_max {
            let hi = &values[(m.pow(r + 1) * n) as usize];
            let lo = &values[(m.pow(r) * n) as usize];
            let ok = ((hi - lo) % &modulus).is_zero();
            report.record(ok, || {
                let d = (hi - lo).mod_floor(&modulus).to_u64().unwrap_or(0);
                format!("r = {r}, n = {n}: difference is {d} mod {modulus}")
            });
        }
    }
    Ok(report)
}
