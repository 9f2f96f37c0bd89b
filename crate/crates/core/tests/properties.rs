use num_bigint::BigInt;
use num_traits::ToPrimitive;
use proptest::prelude::*;

use mary_core::eval::{exact_values, forward_fill};
use mary_core::levels::{build_levels, rank_general, witness_assignment, RankOutcome, VarDomain};
use mary_core::parse::parse_range;
use mary_core::{BuiltinFamily, EvalContext, FamilyTag, KSpec, Modular, TripleSpec};

fn family() -> impl Strategy<Value = FamilyTag> {
    prop_oneof![Just(FamilyTag::Bm), Just(FamilyTag::Cm), Just(FamilyTag::OvBm)]
}

fn triple(tag: FamilyTag, m: u64) -> TripleSpec {
    BuiltinFamily::new(tag, m).triple().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn memoized_eval_matches_forward_fill(tag in family(), m in 2u64..7, n in 0u64..400, h in 2u64..60) {
        let t = triple(tag, m);
        let exact = exact_values(&t, n);
        let mut ctx = EvalContext::exact(t.clone());
        prop_assert_eq!(ctx.eval(n as i64), exact[n as usize].clone());
        let mut modular = EvalContext::modular(t.clone(), h).unwrap();
        let want = (&exact[n as usize] % BigInt::from(h)).to_u64().unwrap();
        prop_assert_eq!(modular.eval(n as i64), want);
        prop_assert_eq!(forward_fill(&t, &Modular::new(h).unwrap(), n)[n as usize], want);
    }

    #[test]
    fn values_are_flat_on_blocks_and_nondecreasing(tag in family(), m in 2u64..7) {
        let t = triple(tag, m);
        let v = exact_values(&t, 300);
        for j in 1..=300u64 {
            let (i, p) = (j as usize, j as usize - 1);
            prop_assert!(v[i] >= v[p], "{tag}_{m} decreases at {j}");
            if t.k().block_of(j) == t.k().block_of(j - 1) {
                prop_assert_eq!(&v[i], &v[p]);
            }
        }
    }

    #[test]
    fn triple_json_round_trip(m in 2u64..20, seed in 0u64..1_000_000, big in any::<bool>(), r in prop::collection::vec(-3i64..4, 1..4)) {
        let seed = if big { BigInt::from(seed) * BigInt::from(u64::MAX) } else { BigInt::from(seed) };
        let t = TripleSpec::new(KSpec::multiples(m).unwrap(), vec![1, -1], r, vec![seed], Some("x".into())).unwrap();
        let back = TripleSpec::from_json(&t.to_json()).unwrap();
        prop_assert_eq!(back, t);
    }

    #[test]
    fn range_syntax(a in 0u64..1000, len in 0u64..1000) {
        let b = a + len;
        prop_assert_eq!(parse_range(&format!("{a}..{b}")).unwrap(), a..=b);
        prop_assert_eq!(parse_range(&format!("{a}..={b}")).unwrap(), a..=b);
        prop_assert_eq!(parse_range(&a.to_string()).unwrap(), a..=a);
    }

    #[test]
    fn witnesses_survive_unit_scaling(h in 3u64..24, u in 1u64..24) {
        prop_assume!(num_integer::gcd(u % h, h) == 1);
        let r = rank_general(2, h, 6, &VarDomain::full(h));
        let s = match r.outcome {
            RankOutcome::Rank(s) => s - 1,
            RankOutcome::ExceedsCutoff(s) => s,
        };
        prop_assume!(s >= 1);
        let w = witness_assignment(2, h, s).unwrap();
        let levels = build_levels(2, 0, s).unwrap();
        let last = levels.last().unwrap();
        prop_assert!(last.avoids_zero(&w, h));
        let scaled: Vec<u64> = w.iter().map(|x| x * u % h).collect();
        prop_assert!(last.avoids_zero(&scaled, h));
    }
}

/// Every form, evaluated at the actual values of its variables, gives the
/// actual sequence value at its index.
#[test]
fn forms_agree_with_sequence_values() {
    for (m, s_max) in [(2u64, 5usize), (3, 3), (4, 2)] {
        let t = triple(FamilyTag::Bm, m);
        let levels = build_levels(m, 0, s_max).unwrap();
        let top = levels.last().unwrap();
        for n in top.n_min.max(1)..top.n_min.max(1) + 12 {
            let idx: Vec<u64> = top.entries.iter().map(|e| e.index.at(m, 0, n) as u64).collect();
            let values = exact_values(&t, *idx.iter().max().unwrap());
            // variable c_i is the entry whose form is exactly c_i
            let mut vars = vec![BigInt::from(0); s_max];
            for (e, &i) in top.entries.iter().zip(&idx) {
                let nonzero: Vec<usize> = (0..e.form.coeffs.len()).filter(|&j| e.form.coeffs[j] != BigInt::from(0)).collect();
                if nonzero.len() == 1 && e.form.coeffs[nonzero[0]] == BigInt::from(1) {
                    vars[nonzero[0]] = values[i as usize].clone();
                }
            }
            for (e, &i) in top.entries.iter().zip(&idx) {
                let got: BigInt = e.form.coeffs.iter().zip(&vars).map(|(c, v)| c * v).sum();
                assert_eq!(got, values[i as usize], "m = {m}, n = {n}, b({i}) vs {}", e.form);
            }
        }
    }
}

/// Exhaustive enumeration of assignments against the pruned search.
#[test]
fn rank_matches_brute_force() {
    for h in 2u64..=7 {
        let mut brute = None;
        for s in 1..=5usize {
            let levels = build_levels(2, 0, s).unwrap();
            let last = levels.last().unwrap();
            let total = h.pow(s as u32);
            let exists = (0..total).any(|code| {
                let a: Vec<u64> = (0..s).map(|i| code / h.pow(i as u32) % h).collect();
                last.avoids_zero(&a, h)
            });
            if !exists {
                brute = Some(s);
                break;
            }
        }
        let got = rank_general(2, h, 5, &VarDomain::full(h)).outcome;
        match brute {
            Some(s) => assert_eq!(got, RankOutcome::Rank(s), "h = {h}"),
            None => assert_eq!(got, RankOutcome::ExceedsCutoff(5), "h = {h}"),
        }
    }
}

#[test]
fn parallel_and_sequential_tables_agree() {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let one = pool.install(|| mary_core::search::appendix_table(FamilyTag::Cm, 3, 6, 3000).unwrap());
    let many = mary_core::search::appendix_table(FamilyTag::Cm, 3, 6, 3000).unwrap();
    assert_eq!(one, many);
}
