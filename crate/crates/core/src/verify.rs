//! Sweeps comparing closed forms and recurrences against independent
//! computations. Each returns a [`CheckReport`].

use std::ops::RangeInclusive;

use num_bigint::BigInt;

use crate::charact::{
    char_b_mod_m, char_b_mod_mu2, char_c_mod_m, char_ovb_mod_2m, char_ovb_mod_m, char_ovb_mod_m2,
    charact_general, digits, identity_target, lemchar_rhs, Mu2,
};
use crate::error::Result;
use crate::eval::{exact_values, forward_fill, Modular};
use crate::levels::check_twp3;
use crate::oracle::{count_mary, count_mary_nogaps, overline_direct};
use crate::report::CheckReport;
use crate::triple::{BuiltinFamily, FamilyTag};

pub const ALL_FAMILIES: [FamilyTag; 3] = [FamilyTag::Bm, FamilyTag::Cm, FamilyTag::OvBm];

/// Recurrence values against brute-force counts (`b_m`, `c_m`) and against a
/// direct transcription of the overpartition-style recurrence (`ovb_m`).
pub fn oracle_sweep(ms: RangeInclusive<u64>, n_max: u64) -> Result<CheckReport> {
    let mut report = CheckReport::new("recurrence vs brute force");
    for m in ms {
        let b = exact_values(&BuiltinFamily::new(FamilyTag::Bm, m).triple()?, n_max);
        let c = exact_values(&BuiltinFamily::new(FamilyTag::Cm, m).triple()?, n_max);
        let ovb = exact_values(&BuiltinFamily::new(FamilyTag::OvBm, m).triple()?, n_max);
        let direct = overline_direct(m, n_max);
        for n in 0..=n_max {
            let i = n as usize;
            let want = count_mary(m, n);
            report.record(b[i] == want, || format!("b_{m}({n}) = {} but {want} partitions", b[i]));
            let want = count_mary_nogaps(m, n);
            report.record(c[i] == want, || format!("c_{m}({n}) = {} but {want} partitions", c[i]));
            report.record(ovb[i] == direct[i], || {
                format!("ovb_{m}({n}) = {} but direct recurrence gives {}", ovb[i], direct[i])
            });
        }
    }
    Ok(report)
}

fn residues_of(tag: FamilyTag, m: u64, modulus: u64, n_max: u64) -> Result<Vec<u64>> {
    Ok(forward_fill(&BuiltinFamily::new(tag, m).triple()?, &Modular::new(modulus)?, n_max))
}

/// Digit characterizations against direct evaluation. Indices `N` run over
/// `0..=n_max` (`1..=n_max` where the formula needs it).
pub fn char_sweep(ms: RangeInclusive<u64>, n_max: u64) -> Result<Vec<CheckReport>> {
    let mut b_m = CheckReport::new("b_m(mN) mod m, digit product");
    let mut b_mu2 = CheckReport::new("b_m(mN) mod mu_2, second-order digit formula");
    let mut c_step = CheckReport::new("c_m(m(mn+q+1)+1) = 1 + (q+1) c_m(mn+1) mod m");
    let mut c_unwound = CheckReport::new("c_m(mN+1) mod m, unwound recursion");
    let mut ovb_step = CheckReport::new("ovb_m(m(mn+q)) = (2q+1) ovb_m(mn) mod m");
    let mut ovb_m = CheckReport::new("ovb_m(mN) mod m, digit product");
    let mut ovb_m2 = CheckReport::new("ovb_m(mN) mod m^2, zero-free digits");
    let mut ovb_2m = CheckReport::new("ovb_m(mN) mod 2m, even m, zero-free digits");
    for m in ms {
        let big = 2 * m * m;
        let top = m * n_max + 1;
        let b = residues_of(FamilyTag::Bm, m, big, top)?;
        let c = residues_of(FamilyTag::Cm, m, m, top)?;
        let o = residues_of(FamilyTag::OvBm, m, big, top)?;
        let mu = Mu2::new(m).value;
        for n in 0..=n_max {
            let at = |v: &[u64], i: u64| v[i as usize];
            let bv = at(&b, m * n);
            b_m.record(char_b_mod_m(m, n) == bv % m, || format!("m = {m}, N = {n}"));
            b_mu2.record(char_b_mod_mu2(m, n) == bv % mu, || format!("m = {m}, N = {n}"));
            let ov = at(&o, m * n);
            ovb_m.record(char_ovb_mod_m(m, n) == ov % m, || format!("m = {m}, N = {n}"));
            if n >= 1 {
                let got = char_c_mod_m(m, n)?;
                let want = at(&c, m * n + 1);
                c_unwound.record(got == want, || format!("m = {m}, N = {n}: {got} vs {want}"));
            }
            if n > m {
                let (inner, q) = ((n - 1) / m, (n - 1) % m);
                let want = (1 + (q + 1) * at(&c, m * inner + 1)) % m;
                c_step.record(at(&c, m * n + 1) == want, || format!("m = {m}, n = {inner}, q = {q}"));
            }
            if n >= m {
                let (inner, q) = (n / m, n % m);
                let want = ((2 * q + 1) * (at(&o, m * inner) % m)) % m;
                ovb_step.record(ov % m == want, || format!("m = {m}, n = {inner}, q = {q}"));
            }
            if digits(n, m).first_zero().is_none() {
                let got = char_ovb_mod_m2(m, n)?;
                ovb_m2.record(got == ov % (m * m), || {
                    format!("m = {m}, N = {n}: formula {got}, value {}", ov % (m * m))
                });
                if m % 2 == 0 {
                    let got = char_ovb_mod_2m(m, n)?;
                    ovb_2m.record(got == ov % (2 * m), || {
                        format!("m = {m}, N = {n}: formula {got}, value {}", ov % (2 * m))
                    });
                }
            }
        }
    }
    Ok(vec![b_m, b_mu2, c_step, c_unwound, ovb_step, ovb_m, ovb_m2, ovb_2m])
}

/// The exact block identity and its mod-`m` reduction, for every `n` from
/// the regular part of `K` up to `n_max` and every `q`.
pub fn identity_sweep(ms: RangeInclusive<u64>, n_max: u64) -> Result<Vec<CheckReport>> {
    let mut exact = CheckReport::new("block identity, exact");
    let mut reduced = CheckReport::new("block identity mod m");
    for m in ms {
        for tag in ALL_FAMILIES {
            let t = BuiltinFamily::new(tag, m).triple()?;
            for n in t.k().regular_from()..=n_max {
                for q in 0..m {
                    let want = identity_target(&t, n, q);
                    let got = lemchar_rhs(&t, n, q)?;
                    exact.record(got == want, || {
                        format!("{tag}_{m}, n = {n}, q = {q}: rhs {got}, value {want}")
                    });
                    let r = charact_general(&t, n, q)?;
                    let want_r = want % BigInt::from(m);
                    reduced.record(BigInt::from(r) == want_r, || {
                        format!("{tag}_{m}, n = {n}, q = {q}: {r} vs {want_r}")
                    });
                }
            }
        }
    }
    Ok(vec![exact, reduced])
}

/// The mod-3 quadruple property for every built-in family.
pub fn twp3_sweep(ms: RangeInclusive<u64>, n_max: u64) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    for tag in ALL_FAMILIES {
        let mut report = CheckReport::new(format!("mod-3 quadruples, {tag}_m"));
        for m in ms.clone() {
            let t = BuiltinFamily::new(tag, m).triple()?;
            let mut r = check_twp3(&t, 1..=n_max)?;
            for v in &mut r.violations {
                *v = format!("m = {m}, {v}");
            }
            report.merge(r);
        }
        out.push(report);
    }
    Ok(out)
}
