//! Triples `T = (K, L, R)` and the index sequences `K` they are built on.
//!
//! A sequence `b_T` is constant on every block `[k_n, k_{n+1} - 1]` and its
//! block heads satisfy
//!
//! ```text
//! sum_i l_i * b_T(k_{n-i}) = sum_j r_j * b_T(n - j)
//! ```
//!
//! `K` is restricted to a finite prefix followed by an arithmetic tail
//! `k_n = m*n + c` for `n >= n0`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KSpec {
    prefix: Vec<u64>,
    period: u64,
    offset: i64,
    start: u64,
}

impl KSpec {
    /// Bounds keeping `k_n` well inside `i64` for every index we evaluate.
    pub const MAX_PERIOD: u64 = 1 << 32;
    pub const MAX_OFFSET: u64 = 1 << 40;

    /// Validates and builds `K`: `prefix` holds `k_0..k_{n0-1}` and
    /// `k_n = m*n + c` from `n0` on.
    pub fn new(prefix: Vec<u64>, m: u64, c: i64, n0: u64) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidDegree(m));
        }
        if m > Self::MAX_PERIOD {
            return Err(Error::Domain(format!("period {m} exceeds {}", Self::MAX_PERIOD)));
        }
        if c.unsigned_abs() > Self::MAX_OFFSET {
            return Err(Error::Domain(format!("offset {c} exceeds {} in absolute value", Self::MAX_OFFSET)));
        }
        if prefix.len() as u64 != n0 {
            return Err(Error::PrefixLengthMismatch { len: prefix.len(), n0 });
        }
        let k = KSpec { prefix, period: m, offset: c, start: n0 };
        let first = k.tail_value(n0);
        if n0 == 0 && first != 0 {
            return Err(Error::FirstTermNonzero(first as i64));
        }
        if let Some(&k0) = k.prefix.first() {
            if k0 != 0 {
                return Err(Error::FirstTermNonzero(k0 as i64));
            }
        }
        for (i, w) in k.prefix.windows(2).enumerate() {
            if w[0] >= w[1] {
                return Err(Error::NotStrictlyIncreasing { at: i as u64 + 1 });
            }
        }
        if let Some(&last) = k.prefix.last() {
            if (last as i128) >= first {
                return Err(Error::NotStrictlyIncreasing { at: n0 });
            }
        }
        if first < 0 {
            return Err(Error::NotStrictlyIncreasing { at: n0 });
        }
        Ok(k)
    }

    /// `K = (m*n)`, used by `b_m` and the overpartition analogue.
    pub fn multiples(m: u64) -> Result<Self> {
        Self::new(Vec::new(), m, 0, 0)
    }

    /// `k_0 = 0`, `k_n = m*n + 1` for `n >= 1`, used by `c_m`.
    pub fn shifted_multiples(m: u64) -> Result<Self> {
        Self::new(vec![0], m, 1, 1)
    }

    pub fn prefix(&self) -> &[u64] {
        &self.prefix
    }

    pub fn period(&self) -> u64 {
        self.period
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn start(&self) -> u64 {
        self.start
    }

    fn tail_value(&self, n: u64) -> i128 {
        self.period as i128 * n as i128 + self.offset as i128
    }

    /// `k_n`, extended by `k_{-n} = -n` for negative arguments.
    pub fn at(&self, n: i64) -> i64 {
        if n < 0 {
            return n;
        }
        let n = n as u64;
        if n < self.start {
            self.prefix[n as usize] as i64
        } else {
            self.tail_value(n) as i64
        }
    }

    /// The unique `n` with `k_n <= j < k_{n+1}`.
    pub fn block_of(&self, j: u64) -> u64 {
        let tail_head = self.tail_value(self.start);
        if (j as i128) < tail_head {
            // prefix is sorted and starts at 0
            return (self.prefix.partition_point(|&k| k <= j) - 1) as u64;
        }
        ((j as i128 - self.offset as i128) / self.period as i128) as u64
    }

    /// `(lower degree, upper degree)`. For an eventually arithmetic `K` both
    /// equal the period.
    pub fn degrees(&self) -> (u64, u64) {
        (self.period, self.period)
    }

    /// Smallest `n` such that `k_{j+1} - k_j = m` for every `j >= n`.
    pub fn regular_from(&self) -> u64 {
        let mut n = self.start;
        while n > 0 && self.at(n as i64) - self.at(n as i64 - 1) == self.period as i64 {
            n -= 1;
        }
        n
    }

    /// `k_{n+1} - k_n`.
    pub fn gap(&self, n: u64) -> u64 {
        (self.at(n as i64 + 1) - self.at(n as i64)) as u64
    }
}

/// Built-in families of the introduction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FamilyTag {
    /// m-ary partitions `b_m`.
    Bm,
    /// m-ary partitions with no gaps `c_m`.
    Cm,
    /// the overpartition-like sequence with `R = (1, 1)`.
    OvBm,
}

impl FamilyTag {
    pub fn label(self) -> &'static str {
        match self {
            FamilyTag::Bm => "b",
            FamilyTag::Cm => "c",
            FamilyTag::OvBm => "ovb",
        }
    }
}

impl fmt::Display for FamilyTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for FamilyTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "b" | "bm" => Ok(FamilyTag::Bm),
            "c" | "cm" => Ok(FamilyTag::Cm),
            "ovb" | "ovbm" | "overline-b" => Ok(FamilyTag::OvBm),
            other => Err(Error::Parse(format!("unknown family `{other}` (expected b, c or ovb)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BuiltinFamily {
    pub tag: FamilyTag,
    pub m: u64,
}

impl BuiltinFamily {
    pub fn new(tag: FamilyTag, m: u64) -> Self {
        BuiltinFamily { tag, m }
    }

    pub fn triple(self) -> Result<TripleSpec> {
        builtin_triple(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TripleSpec {
    k: KSpec,
    l: Vec<i64>,
    r: Vec<i64>,
    init: Vec<BigInt>,
    name: Option<String>,
    l_sum: i64,
    r_sum: i64,
}

impl TripleSpec {
    pub fn new(
        k: KSpec,
        l: Vec<i64>,
        r: Vec<i64>,
        init: Vec<BigInt>,
        name: Option<String>,
    ) -> Result<Self> {
        let Some(&l0) = l.first() else {
            return Err(Error::EmptyCoefficients("L"));
        };
        if r.is_empty() {
            return Err(Error::EmptyCoefficients("R"));
        }
        if l0 != 1 && l0 != -1 {
            return Err(Error::LeadingCoefficient(l0));
        }
        if init.is_empty() {
            return Err(Error::SeedTooShort(0));
        }
        if let Some(i) = init.iter().position(|v| v.is_negative()) {
            return Err(Error::NegativeSeed(i as u64));
        }
        let l_sum = l.iter().sum();
        let r_sum = r.iter().sum();
        let t = TripleSpec { k, l, r, init, name, l_sum, r_sum };
        t.check_seed()?;
        Ok(t)
    }

    fn check_seed(&self) -> Result<()> {
        let seeded = self.init.len() as u64;
        // A block head k_b with b >= k_b would be defined in terms of itself.
        let mut b = 0u64;
        loop {
            let head = self.k.at(b as i64) as u64;
            if head > b && b >= self.k.start() {
                break;
            }
            if head <= b && head >= seeded {
                return Err(Error::SeedTooShort(head));
            }
            b += 1;
        }
        // Seeds must respect the flat blocks.
        for j in 1..seeded {
            let (blk_prev, blk) = (self.k.block_of(j - 1), self.k.block_of(j));
            if blk_prev == blk && self.init[j as usize] != self.init[j as usize - 1] {
                return Err(Error::InconsistentSeed { first: j - 1, second: j });
            }
        }
        Ok(())
    }

    pub fn k(&self) -> &KSpec {
        &self.k
    }

    pub fn l_coeffs(&self) -> &[i64] {
        &self.l
    }

    pub fn r_coeffs(&self) -> &[i64] {
        &self.r
    }

    pub fn init_values(&self) -> &[BigInt] {
        &self.init
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    /// `l = sum l_i`.
    pub fn l_sum(&self) -> i64 {
        self.l_sum
    }

    /// `r = sum r_j`.
    pub fn r_sum(&self) -> i64 {
        self.r_sum
    }

    /// `u`, the lookback of the right-hand side.
    pub fn u(&self) -> usize {
        self.r.len() - 1
    }

    /// `t`, the lookback of the left-hand side.
    pub fn t(&self) -> usize {
        self.l.len() - 1
    }

    pub fn has_unit_difference_l(&self) -> bool {
        self.l == [1, -1]
    }

    pub fn to_document(&self) -> TripleDocument {
        TripleDocument {
            name: self.name.clone(),
            k: KDocument {
                prefix: self.k.prefix.clone(),
                m: self.k.period,
                c: self.k.offset,
                n0: self.k.start,
            },
            l: self.l.clone(),
            r: self.r.clone(),
            init: self.init.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("triple document serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: TripleDocument =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        doc.into_spec()
    }
}

/// JSON layout of a triple: `{name, k: {prefix, m, c, n0}, L, R, init}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TripleDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub k: KDocument,
    #[serde(rename = "L")]
    pub l: Vec<i64>,
    #[serde(rename = "R")]
    pub r: Vec<i64>,
    #[serde(with = "seed_values")]
    pub init: Vec<BigInt>,
}

/// Seeds are written as plain JSON integers when they fit in an `i64` and as
/// decimal strings otherwise; both forms are accepted on input.
mod seed_values {
    use num_bigint::BigInt;
    use num_traits::ToPrimitive;
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};
    use serde_json::Value;

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        let out: Vec<Value> = v
            .iter()
            .map(|x| match x.to_i64() {
                Some(small) => Value::from(small),
                None => Value::from(x.to_string()),
            })
            .collect();
        out.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        let raw = Vec::<Value>::deserialize(d)?;
        raw.into_iter()
            .map(|v| {
                let text = match &v {
                    Value::Number(n) if n.is_i64() || n.is_u64() => n.to_string(),
                    Value::String(s) => s.clone(),
                    other => return Err(D::Error::custom(format!("invalid seed {other}"))),
                };
                text.parse::<BigInt>()
                    .map_err(|_| D::Error::custom(format!("invalid seed {text:?}")))
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KDocument {
    #[serde(default)]
    pub prefix: Vec<u64>,
    pub m: u64,
    #[serde(default)]
    pub c: i64,
    #[serde(default)]
    pub n0: u64,
}

impl TripleDocument {
    pub fn into_spec(self) -> Result<TripleSpec> {
        let k = KSpec::new(self.k.prefix, self.k.m, self.k.c, self.k.n0)?;
        TripleSpec::new(k, self.l, self.r, self.init, self.name)
    }
}

pub fn builtin_triple(f: BuiltinFamily) -> Result<TripleSpec> {
    let m = f.m;
    if m < 2 {
        return Err(Error::InvalidDegree(m));
    }
    let one = BigInt::one();
    let (k, r, init) = match f.tag {
        FamilyTag::Bm => (KSpec::multiples(m)?, vec![1], vec![one]),
        FamilyTag::Cm => (KSpec::shifted_multiples(m)?, vec![1], vec![one.clone(), one]),
        FamilyTag::OvBm => (KSpec::multiples(m)?, vec![1, 1], vec![one]),
    };
    TripleSpec::new(k, vec![1, -1], r, init, Some(format!("{}_{}", f.tag, m)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_index_sequence() {
        let k = KSpec::new(vec![], 2, 0, 0).unwrap();
        assert_eq!(k.at(7), 14);
        assert_eq!(k.degrees(), (2, 2));
    }

    #[test]
    fn shifted_index_sequence() {
        let k = KSpec::new(vec![0], 3, 1, 1).unwrap();
        assert_eq!(k.at(0), 0);
        assert_eq!(k.at(4), 13);
        assert_eq!(k.block_of(3), 0);
        assert_eq!(k.block_of(13), 4);
        assert_eq!(k.regular_from(), 1);
    }

    #[test]
    fn rejects_oversized_parameters() {
        assert!(matches!(KSpec::new(vec![], u64::MAX, 0, 0), Err(Error::Domain(_))));
        assert!(matches!(KSpec::new(vec![0], 2, i64::MAX, 1), Err(Error::Domain(_))));
        assert!(matches!(KSpec::new(vec![], 2, i64::MIN, 0), Err(Error::Domain(_))));
        assert!(KSpec::new(vec![], KSpec::MAX_PERIOD, 0, 0).is_ok());
    }

    #[test]
    fn rejects_decreasing_prefix() {
        assert_eq!(
            KSpec::new(vec![0, 5], 2, 0, 2),
            Err(Error::NotStrictlyIncreasing { at: 2 })
        );
        assert_eq!(KSpec::new(vec![1], 2, 0, 1), Err(Error::FirstTermNonzero(1)));
        assert_eq!(
            KSpec::new(vec![0], 2, 0, 2),
            Err(Error::PrefixLengthMismatch { len: 1, n0: 2 })
        );
        assert_eq!(KSpec::new(vec![], 1, 0, 0), Err(Error::InvalidDegree(1)));
        assert!(KSpec::new(vec![], 2, 1, 0).is_err());
    }

    #[test]
    fn negative_indices_follow_identity() {
        let k = KSpec::shifted_multiples(5).unwrap();
        assert_eq!(k.at(-3), -3);
        assert_eq!(k.degrees(), (5, 5));
    }

    #[test]
    fn block_lookup() {
        let k = KSpec::multiples(2).unwrap();
        assert_eq!(k.block_of(5), 2);
        assert_eq!(k.block_of(0), 0);
    }

    #[test]
    fn builtins() {
        let b2 = builtin_triple(BuiltinFamily::new(FamilyTag::Bm, 2)).unwrap();
        assert_eq!(b2.l_coeffs(), &[1, -1]);
        assert_eq!(b2.r_coeffs(), &[1]);
        assert_eq!(b2.init_values(), &[BigInt::from(1)]);

        let c3 = builtin_triple(BuiltinFamily::new(FamilyTag::Cm, 3)).unwrap();
        let ks: Vec<i64> = (0..4).map(|n| c3.k().at(n)).collect();
        assert_eq!(ks, vec![0, 4, 7, 10]);
        assert_eq!(c3.init_values().len(), 2);

        let ovb2 = builtin_triple(BuiltinFamily::new(FamilyTag::OvBm, 2)).unwrap();
        assert_eq!(ovb2.r_coeffs(), &[1, 1]);
        assert_eq!(ovb2.r_sum(), 2);
        assert_eq!(ovb2.l_sum(), 0);

        assert_eq!(
            builtin_triple(BuiltinFamily::new(FamilyTag::Bm, 1)),
            Err(Error::InvalidDegree(1))
        );
    }

    #[test]
    fn seed_validation() {
        // k_0 = 0 is self-referential, so b(0) must be seeded.
        let k = KSpec::multiples(2).unwrap();
        assert_eq!(
            TripleSpec::new(k.clone(), vec![1, -1], vec![1], vec![], None),
            Err(Error::SeedTooShort(0))
        );
        // k = 0,1,2,3 then 2n: heads 1,2,3 are self-referential too.
        let k = KSpec::new(vec![0, 1, 2, 3], 2, 0, 4).unwrap();
        let short = vec![BigInt::one(); 2];
        assert_eq!(
            TripleSpec::new(k.clone(), vec![1, -1], vec![1], short, None),
            Err(Error::SeedTooShort(2))
        );
        let ok = vec![BigInt::one(); 8];
        assert!(TripleSpec::new(k, vec![1, -1], vec![1], ok, None).is_ok());
        assert_eq!(
            TripleSpec::new(
                KSpec::multiples(2).unwrap(),
                vec![2, -1],
                vec![1],
                vec![BigInt::one()],
                None
            ),
            Err(Error::LeadingCoefficient(2))
        );
    }

    #[test]
    fn seeds_respect_blocks() {
        let k = KSpec::multiples(3).unwrap();
        let init = vec![BigInt::from(1), BigInt::from(2)];
        assert_eq!(
            TripleSpec::new(k, vec![1, -1], vec![1], init, None),
            Err(Error::InconsistentSeed { first: 0, second: 1 })
        );
    }

    #[test]
    fn json_round_trip() {
        let t = builtin_triple(BuiltinFamily::new(FamilyTag::Cm, 4)).unwrap();
        let back = TripleSpec::from_json(&t.to_json()).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn json_rejects_garbage() {
        assert!(matches!(TripleSpec::from_json("{}"), Err(Error::Parse(_))));
        let bad = r#"{"k":{"m":2},"L":[1,-1],"R":[1],"init":[-1]}"#;
        assert_eq!(TripleSpec::from_json(bad), Err(Error::NegativeSeed(0)));
    }
}
