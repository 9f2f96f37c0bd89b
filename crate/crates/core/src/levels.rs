//! Symbolic levels for `L = (1, -1)`, `R = (1)` triples whose `K` has tail
//! `x -> m x + c`, and the rank of non-divisibility built on them.
//!
//! Level 1 is the single form `c_1` at `k_n`. Level `s + 1` places a fresh
//! variable `c_{s+1}` at `k_j` for the K-position `j` just left of the
//! current window, then walks right through the window with
//! `b(k_j) = b(k_{j-1}) + b(j)`, where `b(j)` is read from the flattened
//! previous level.

use std::fmt;
use std::sync::atomic::{AtomicBool, Ordering};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::eval::EvalContext;
use crate::report::CheckReport;
use crate::triple::TripleSpec;

/// Homogeneous linear form in `c_1, .., c_s`; `coeffs[i]` multiplies `c_{i+1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LinearForm {
    pub coeffs: Vec<BigInt>,
}

impl LinearForm {
    fn var(i: usize, width: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); width];
        coeffs[i] = BigInt::one();
        LinearForm { coeffs }
    }

    fn widened(&self, width: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(width, BigInt::zero());
        LinearForm { coeffs }
    }

    fn add_assign(&mut self, other: &LinearForm) {
        if other.coeffs.len() > self.coeffs.len() {
            self.coeffs.resize(other.coeffs.len(), BigInt::zero());
        }
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b;
        }
    }

    /// Value modulo `h` at `assignment` (missing variables count as zero).
    pub fn eval_mod(&self, assignment: &[u64], h: u64) -> u64 {
        let hb = BigInt::from(h);
        let mut acc = BigInt::zero();
        for (c, &x) in self.coeffs.iter().zip(assignment) {
            acc += c * x;
        }
        acc.mod_floor(&hb).to_u64().expect("residue fits u64")
    }
}

impl fmt::Display for LinearForm {
    /// Newest variable first, e.g. `c4 + 14c3 + 42c2 + 26c1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let mag = c.abs();
            if mag.is_one() {
                write!(f, "c{}", i + 1)?;
            } else {
                write!(f, "{mag}c{}", i + 1)?;
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// The concrete index `iota^depth(n) + offset`, with `iota(x) = m x + c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SymbolicIndex {
    pub depth: u32,
    pub offset: i64,
}

impl SymbolicIndex {
    pub fn at(&self, m: u64, c: i64, n: u64) -> i64 {
        let mut x = n as i64;
        for _ in 0..self.depth {
            x = m as i64 * x + c;
        }
        x + self.offset
    }

    /// Renders as `16n+14` when `c = 0`; otherwise as `iota^s(n)+e`.
    pub fn render(&self, m: u64, c: i64) -> String {
        let off = |e: i64| match e.cmp(&0) {
            std::cmp::Ordering::Equal => String::new(),
            std::cmp::Ordering::Greater => format!("+{e}"),
            std::cmp::Ordering::Less => format!("{e}"),
        };
        if c == 0 {
            let scale = (m as i64).pow(self.depth);
            let lead = if scale == 1 { "n".to_string() } else { format!("{scale}n") };
            format!("{lead}{}", off(self.offset))
        } else {
            format!("iota^{}(n){}", self.depth, off(self.offset))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelEntry {
    pub level: usize,
    pub index: SymbolicIndex,
    pub form: LinearForm,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelSet {
    pub m: u64,
    pub c: i64,
    pub s: usize,
    /// Cumulative: every entry of levels `1..=s`, grouped by level.
    pub entries: Vec<LevelEntry>,
    /// Flattened range of known values, `[lo, hi]` at depth `s`.
    pub window: (SymbolicIndex, SymbolicIndex),
    /// Smallest `n` for which every index involved lies in the arithmetic
    /// tail of `K`.
    pub n_min: u64,
}

impl LevelSet {
    pub fn new_entries(&self) -> impl Iterator<Item = &LevelEntry> {
        self.entries.iter().filter(move |e| e.level == self.s)
    }

    /// `b(<index>) = <form>` lines, one per entry, grouped by level.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            out.push_str(&format!(
                "level {}: b({}) = {}\n",
                e.level,
                e.index.render(self.m, self.c),
                e.form
            ));
        }
        out
    }

    /// Concrete indices of all entries for a given `n`, ascending.
    pub fn covered_indices(&self, n: u64) -> Result<Vec<u64>> {
        if n < self.n_min {
            return Err(Error::BelowThreshold { n, min: self.n_min, level: self.s });
        }
        let mut out: Vec<u64> =
            self.entries.iter().map(|e| e.index.at(self.m, self.c, n) as u64).collect();
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }

    /// True when every form stays nonzero mod `h` at `assignment`.
    pub fn avoids_zero(&self, assignment: &[u64], h: u64) -> bool {
        self.entries.iter().all(|e| e.form.eval_mod(assignment, h) != 0)
    }
}

/// K-offset bounds `[A_s, B_s]` of the new positions of each level:
/// `A_1 = B_1 = 0`, `A_{s+1} = m A_s - 1`, `B_{s+1} = m B_s + m - 1`.
fn level_bounds(m: u64, s_max: usize) -> Vec<(i64, i64)> {
    let m = m as i64;
    let mut out = vec![(0i64, 0i64)];
    while out.len() < s_max {
        let (a, b) = *out.last().unwrap();
        out.push((m * a - 1, m * b + m - 1));
    }
    out
}

fn iota(m: u64, c: i64, depth: u32, n: u64) -> i64 {
    SymbolicIndex { depth, offset: 0 }.at(m, c, n)
}

/// Smallest `n >= t0` such that every K-position used up to level `s` is at
/// least `t0`, where `K` is arithmetic and the recurrence valid from `t0` on.
fn threshold(m: u64, c: i64, t0: u64, bounds: &[(i64, i64)]) -> u64 {
    let mut n = t0;
    loop {
        let ok = bounds
            .iter()
            .enumerate()
            .skip(1)
            .all(|(i, &(a, _))| iota(m, c, i as u32, n) + a >= t0 as i64);
        if ok {
            return n;
        }
        n += 1;
    }
}

fn default_tail_start(m: u64, c: i64) -> u64 {
    if c == 0 {
        return 0;
    }
    let mut n = 1u64;
    while (m * n) as i64 + c <= 0 {
        n += 1;
    }
    n
}

/// Levels `1..=s_max` for the tail map `x -> m x + c`.
pub fn build_levels(m: u64, c: i64, s_max: usize) -> Result<Vec<LevelSet>> {
    build_levels_from(m, c, default_tail_start(m, c), s_max)
}

/// Levels for a concrete triple; only `L = (1, -1)` and `R = (1)` are supported.
pub fn build_levels_for(t: &TripleSpec, s_max: usize) -> Result<Vec<LevelSet>> {
    if !t.has_unit_difference_l() || t.r_coeffs() != [1] {
        return Err(Error::UnsupportedTriple(format!(
            "levels need L = (1, -1) and R = (1), got L = {:?}, R = {:?}",
            t.l_coeffs(),
            t.r_coeffs()
        )));
    }
    let k = t.k();
    let seeded = t.init_values().len() as i64;
    let mut t0 = k.start();
    while k.at(t0 as i64) < seeded {
        t0 += 1;
    }
    build_levels_from(k.period(), k.offset(), t0, s_max)
}

fn build_levels_from(m: u64, c: i64, t0: u64, s_max: usize) -> Result<Vec<LevelSet>> {
    if m < 2 {
        return Err(Error::InvalidDegree(m));
    }
    if s_max == 0 {
        return Ok(Vec::new());
    }
    let bounds = level_bounds(m, s_max);
    let mi = m as i64;
    let mut entries: Vec<LevelEntry> = Vec::new();
    let mut prev: Vec<LinearForm> = Vec::new();
    let mut out = Vec::with_capacity(s_max);
    for s in 1..=s_max {
        let (a, b) = bounds[s - 1];
        let forms: Vec<LinearForm> = if s == 1 {
            vec![LinearForm::var(0, 1)]
        } else {
            let (pa, _) = bounds[s - 2];
            let mut cur = LinearForm::var(s - 1, s);
            let mut forms = vec![cur.clone()];
            for p in (a + 1)..=b {
                // b(j) for j = iota^{s-1}(n) + p lies in the block of K-offset p div m
                let src = &prev[(p.div_euclid(mi) - pa) as usize];
                cur.add_assign(&src.widened(s));
                forms.push(cur.clone());
            }
            forms
        };
        for (i, form) in forms.iter().enumerate() {
            entries.push(LevelEntry {
                level: s,
                index: SymbolicIndex { depth: s as u32, offset: mi * (a + i as i64) },
                form: form.clone(),
            });
        }
        let window = (
            SymbolicIndex { depth: s as u32, offset: mi * a },
            SymbolicIndex { depth: s as u32, offset: mi * b + mi - 1 },
        );
        out.push(LevelSet {
            m,
            c,
            s,
            entries: entries.clone(),
            window,
            n_min: threshold(m, c, t0, &bounds[..s]),
        });
        prev = forms;
    }
    Ok(out)
}

/// The covered indices promised by the corollary for `K = (m n)`:
/// `m^sigma n + m t` with `sigma = 1..=s` and `|t| <= m^{sigma-1} - 1`.
/// For `m = 2` this is exactly the set of level positions; for larger `m`
/// it is a superset of them.
pub fn index_set(m: u64, n: u64, s: usize) -> Result<Vec<u64>> {
    if m < 2 {
        return Err(Error::InvalidDegree(m));
    }
    let bounds = level_bounds(m, s.max(1));
    let n_min = threshold(m, 0, default_tail_start(m, 0), &bounds[..s.max(1)]);
    if n < n_min {
        return Err(Error::BelowThreshold { n, min: n_min, level: s });
    }
    let mut out = Vec::new();
    for sigma in 1..=s as u32 {
        let span = m.pow(sigma - 1) as i64 - 1;
        let base = (m.pow(sigma) * n) as i64;
        for t in -span..=span {
            out.push((base + m as i64 * t) as u64);
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// Allowed residues mod `h` per variable; variables beyond the listed ones
/// use `fallback`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VarDomain {
    pub h: u64,
    pub per_var: Vec<Vec<u64>>,
    pub fallback: Vec<u64>,
}

impl VarDomain {
    pub fn full(h: u64) -> Self {
        VarDomain { h, per_var: Vec::new(), fallback: (0..h).collect() }
    }

    pub fn even(h: u64) -> Self {
        VarDomain { h, per_var: Vec::new(), fallback: (0..h).filter(|x| x % 2 == 0).collect() }
    }

    /// Allowed residues of `c_{i+1}`, ascending.
    pub fn allowed(&self, i: usize) -> &[u64] {
        self.per_var.get(i).unwrap_or(&self.fallback)
    }

    fn sets(&self, s_max: usize) -> Vec<Vec<bool>> {
        (0..s_max)
            .map(|i| {
                let mut v = vec![false; self.h as usize];
                for &x in self.allowed(i) {
                    v[(x % self.h) as usize] = true;
                }
                v
            })
            .collect()
    }
}

fn units(h: u64) -> Vec<u64> {
    (1..h).filter(|&u| u.gcd(&h) == 1).collect()
}

/// Every allowed set is closed under multiplication by units mod `h`, so
/// avoiding assignments can be rescaled freely.
fn unit_closed(sets: &[Vec<bool>], h: u64) -> bool {
    let us = units(h);
    sets.iter().all(|set| {
        (0..h).filter(|&x| set[x as usize]).all(|x| us.iter().all(|&u| set[(u * x % h) as usize]))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RankOutcome {
    Rank(usize),
    ExceedsCutoff(usize),
}

impl fmt::Display for RankOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RankOutcome::Rank(s) => write!(f, "{s}"),
            RankOutcome::ExceedsCutoff(s) => write!(f, ">{s}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankResult {
    pub outcome: RankOutcome,
    /// A deepest avoiding assignment found: of length `s - 1` for `Rank(s)`,
    /// of length `s_max` for `ExceedsCutoff`.
    pub witness: Option<Vec<u64>>,
}

/// Depth-first search over `c_1, c_2, ..`. A node holds the prefix sums
/// (mod `h`, starting at 0) of the flattened window of its level; the forms
/// of the next level are `c_{s+1}` plus each of those sums.
struct Search<'a> {
    m: usize,
    h: u32,
    s_max: usize,
    sets: &'a [Vec<bool>],
    allowed_counts: Vec<usize>,
    stop: &'a AtomicBool,
    best: usize,
    best_assignment: Vec<u64>,
    path: Vec<u64>,
    /// Scratch prefix buffers, one per depth.
    bufs: Vec<Vec<u32>>,
    /// Stamps marking forbidden residues, one row per depth.
    marks: Vec<Vec<u32>>,
    stamp: u32,
}

impl Search<'_> {
    fn record(&mut self) {
        if self.path.len() > self.best {
            self.best = self.path.len();
            self.best_assignment = self.path.clone();
        }
        if self.best >= self.s_max {
            self.stop.store(true, Ordering::Relaxed);
        }
    }

    /// Prefix sums of the child window for `c = x` into `out`. Returns false
    /// as soon as the sums forbid every allowed value of the following
    /// variable, since such a child has no extension.
    fn child_prefix(&mut self, prefix: &[u32], x: u32, out: &mut Vec<u32>, depth: usize) -> bool {
        let h = self.h;
        let check = depth < self.s_max;
        let sets = self.sets;
        let (set, need) = if check { (&sets[depth][..], self.allowed_counts[depth]) } else { (&[][..], 0) };
        self.stamp = self.stamp.wrapping_add(1);
        if self.stamp == 0 {
            for row in &mut self.marks {
                row.iter_mut().for_each(|v| *v = 0);
            }
            self.stamp = 1;
        }
        let stamp = self.stamp;
        let mark = &mut self.marks[depth];
        let mut covered = 0usize;
        let hit = |acc: u32, mark: &mut Vec<u32>, covered: &mut usize| {
            let f = if acc == 0 { 0 } else { h - acc };
            if mark[f as usize] != stamp {
                mark[f as usize] = stamp;
                if set[f as usize] {
                    *covered += 1;
                }
            }
        };
        out.clear();
        out.push(0);
        let mut acc = 0u32;
        if check {
            hit(0, mark, &mut covered);
        }
        for &p in prefix {
            let mut v = x + p;
            if v >= h {
                v -= h;
            }
            for _ in 0..self.m {
                acc += v;
                if acc >= h {
                    acc -= h;
                }
                out.push(acc);
                if check {
                    hit(acc, mark, &mut covered);
                }
            }
            if check && covered == need {
                return false;
            }
        }
        true
    }

    /// Explore below a node whose level window has the given prefix sums.
    fn descend(&mut self, prefix: &[u32]) {
        self.record();
        let depth = self.path.len();
        if depth >= self.s_max || self.stop.load(Ordering::Relaxed) {
            return;
        }
        let h = self.h;
        let mut forbidden = vec![false; h as usize];
        for &p in prefix {
            forbidden[if p == 0 { 0 } else { (h - p) as usize }] = true;
        }
        let mut out = std::mem::take(&mut self.bufs[depth]);
        for x in 0..h {
            if !self.sets[depth][x as usize] || forbidden[x as usize] {
                continue;
            }
            self.path.push(x as u64);
            if self.child_prefix(prefix, x, &mut out, depth + 1) {
                self.descend(&out);
            } else {
                self.record();
            }
            self.path.pop();
            if self.stop.load(Ordering::Relaxed) {
                break;
            }
        }
        self.bufs[depth] = out;
    }
}

/// Residue sets mod `h < 128` as bit masks.
#[derive(Clone, Copy)]
struct Ring {
    h: u32,
    mask: u128,
}

impl Ring {
    const MAX: u64 = 127;

    fn new(h: u64) -> Self {
        Ring { h: h as u32, mask: (1u128 << h) - 1 }
    }

    fn from_bools(set: &[bool]) -> u128 {
        set.iter().enumerate().filter(|(_, &b)| b).fold(0, |acc, (i, _)| acc | 1 << i)
    }

    /// `{x + k : x in set}`.
    fn rotate(self, set: u128, k: u32) -> u128 {
        if k == 0 {
            set
        } else {
            ((set << k) | (set >> (self.h - k))) & self.mask
        }
    }

    /// `{-x : x in set}`.
    fn negate(self, set: u128) -> u128 {
        let moved = (set & !1).reverse_bits() >> (127 - self.h);
        (moved & self.mask) | (set & 1)
    }
}

/// Bit-parallel variant of [`Search`]. The prefix sums of the child window
/// for `c = x` are `t x + a_t`, with `a_t` independent of `x`; bucketing the
/// `a_t` by `t mod h` gives the child's prefix set as a union of at most `h`
/// rotations, so only surviving children are expanded element by element.
struct RingSearch<'a> {
    m: usize,
    ring: Ring,
    s_max: usize,
    allowed: Vec<u128>,
    allowed_neg: Vec<u128>,
    stop: &'a AtomicBool,
    best: usize,
    best_assignment: Vec<u64>,
    path: Vec<u64>,
    offsets: Vec<Vec<u32>>,
    buckets: Vec<Vec<u128>>,
    children: Vec<Vec<u32>>,
}

impl<'a> RingSearch<'a> {
    fn new(m: u64, h: u64, s_max: usize, sets: &[Vec<bool>], stop: &'a AtomicBool) -> Self {
        let ring = Ring::new(h);
        let allowed: Vec<u128> = sets.iter().map(|s| Ring::from_bools(s)).collect();
        RingSearch {
            m: m as usize,
            ring,
            s_max,
            allowed_neg: allowed.iter().map(|&a| ring.negate(a)).collect(),
            allowed,
            stop,
            best: 0,
            best_assignment: Vec::new(),
            path: Vec::new(),
            offsets: vec![Vec::new(); s_max + 1],
            buckets: vec![vec![0; h as usize]; s_max + 1],
            children: vec![Vec::new(); s_max + 1],
        }
    }

    fn record(&mut self) {
        if self.path.len() > self.best {
            self.best = self.path.len();
            self.best_assignment = self.path.clone();
        }
        if self.best >= self.s_max {
            self.stop.store(true, Ordering::Relaxed);
        }
    }

    /// `a_t = sum of prefix[floor(i / m)]` over `i < t`, for `t = 0..=m len`.
    fn offsets_of(&self, prefix: &[u32], out: &mut Vec<u32>) {
        let h = self.ring.h;
        out.clear();
        out.push(0);
        let mut acc = 0u32;
        for &p in prefix {
            for _ in 0..self.m {
                acc += p;
                if acc >= h {
                    acc -= h;
                }
                out.push(acc);
            }
        }
    }

    fn child_of(&self, offsets: &[u32], x: u32, out: &mut Vec<u32>) {
        let h = self.ring.h;
        out.clear();
        let mut shift = 0u32;
        for &a in offsets {
            let mut v = a + shift;
            if v >= h {
                v -= h;
            }
            out.push(v);
            shift += x;
            if shift >= h {
                shift -= h;
            }
        }
    }

    fn descend(&mut self, prefix: &[u32], prefix_set: u128) {
        self.record();
        let depth = self.path.len();
        if depth >= self.s_max || self.stop.load(Ordering::Relaxed) {
            return;
        }
        let ring = self.ring;
        let candidates = self.allowed[depth] & !ring.negate(prefix_set);
        if candidates == 0 {
            return;
        }
        let mut offsets = std::mem::take(&mut self.offsets[depth]);
        let mut buckets = std::mem::take(&mut self.buckets[depth]);
        let mut child = std::mem::take(&mut self.children[depth]);
        self.offsets_of(prefix, &mut offsets);
        buckets.iter_mut().for_each(|b| *b = 0);
        let h = ring.h as usize;
        for (t, &a) in offsets.iter().enumerate() {
            buckets[t % h] |= 1 << a;
        }
        let used = offsets.len().min(h);
        let next_needed = (depth + 1 < self.s_max).then(|| self.allowed_neg[depth + 1]);
        let mut rest = candidates;
        while rest != 0 {
            let x = rest.trailing_zeros();
            rest &= rest - 1;
            let mut set = 0u128;
            let mut k = 0u32;
            for bucket in &buckets[..used] {
                set |= ring.rotate(*bucket, k);
                k += x;
                if k >= ring.h {
                    k -= ring.h;
                }
            }
            self.path.push(x as u64);
            match next_needed {
                // every value of the following variable is already forbidden
                Some(need) if need & !set == 0 => self.record(),
                _ => {
                    self.child_of(&offsets, x, &mut child);
                    self.descend(&child, set);
                }
            }
            self.path.pop();
            if self.stop.load(Ordering::Relaxed) {
                break;
            }
        }
        self.offsets[depth] = offsets;
        self.buckets[depth] = buckets;
        self.children[depth] = child;
    }

    fn run(&mut self, start: &[u64]) {
        let mut prefix = vec![0u32];
        let mut offsets = Vec::new();
        let mut child = Vec::new();
        for &x in start {
            self.path.push(x);
            self.offsets_of(&prefix, &mut offsets);
            self.child_of(&offsets, x as u32, &mut child);
            std::mem::swap(&mut prefix, &mut child);
        }
        let set = prefix.iter().fold(0u128, |acc, &p| acc | 1 << p);
        self.descend(&prefix, set);
    }
}

fn first_candidates(sets: &[Vec<bool>], h: u64) -> Vec<u64> {
    let first = &sets[0];
    if unit_closed(sets, h) {
        // one representative per unit orbit: the divisors of h
        (1..h).filter(|&d| h % d == 0 && first[d as usize]).collect()
    } else {
        (1..h).filter(|&x| first[x as usize]).collect()
    }
}

impl<'a> Search<'a> {
    fn new(m: u64, h: u64, s_max: usize, sets: &'a [Vec<bool>], stop: &'a AtomicBool) -> Self {
        Search {
            m: m as usize,
            h: h as u32,
            s_max,
            sets,
            allowed_counts: sets.iter().map(|v| v.iter().filter(|&&b| b).count()).collect(),
            stop,
            best: 0,
            best_assignment: Vec::new(),
            path: Vec::new(),
            bufs: vec![Vec::new(); s_max + 1],
            marks: vec![vec![0; h as usize]; s_max + 1],
            stamp: 0,
        }
    }

    /// Search the subtree below a fixed assignment of the first variables.
    fn run(&mut self, start: &[u64]) {
        let mut prefix = vec![0u32];
        let mut out = Vec::new();
        for (i, &x) in start.iter().enumerate() {
            self.path.push(x);
            if !self.child_prefix(&prefix, x as u32, &mut out, i + 1) {
                self.record();
                return;
            }
            std::mem::swap(&mut prefix, &mut out);
        }
        self.descend(&prefix);
    }
}

/// Deepest level (up to `s_max`) that admits an assignment keeping every
/// form nonzero mod `h`, with that assignment.
fn deepest(m: u64, h: u64, s_max: usize, domains: &VarDomain) -> (usize, Vec<u64>) {
    let sets = domains.sets(s_max.max(1));
    let stop = AtomicBool::new(false);
    // fan out over (c_1, c_2) so prime moduli, with a single c_1, still split
    let mut tasks = Vec::new();
    for c1 in first_candidates(&sets, h) {
        let second: Vec<u64> = if s_max > 1 {
            // c_2 must avoid -c_1 * j for j = 0..=m
            (0..h).filter(|&x| sets[1][x as usize] && (0..=m).all(|j| (x + j * c1) % h != 0)).collect()
        } else {
            Vec::new()
        };
        if second.is_empty() {
            tasks.push(vec![c1]);
        }
        tasks.extend(second.into_iter().map(|c2| vec![c1, c2]));
    }
    let results: Vec<(usize, Vec<u64>)> = tasks
        .par_iter()
        .map(|start| {
            if h <= Ring::MAX {
                let mut search = RingSearch::new(m, h, s_max, &sets, &stop);
                search.run(start);
                (search.best, search.best_assignment)
            } else {
                let mut search = Search::new(m, h, s_max, &sets, &stop);
                search.run(start);
                (search.best, search.best_assignment)
            }
        })
        .collect();
    // prefer the deepest, then the first task in ascending order
    let mut best = (0usize, Vec::new());
    for r in results {
        if r.0 > best.0 {
            best = r;
        }
    }
    best
}

/// Rank in the general case: the least `s` such that every assignment from
/// `domains` zeroes some form of level `s` modulo `h`.
pub fn rank_general(m: u64, h: u64, s_max: usize, domains: &VarDomain) -> RankResult {
    assert!(h >= 2 && s_max >= 1 && m >= 2);
    let (depth, assignment) = deepest(m, h, s_max, domains);
    if depth >= s_max {
        RankResult { outcome: RankOutcome::ExceedsCutoff(s_max), witness: Some(assignment) }
    } else {
        let witness = if depth == 0 { None } else { Some(assignment) };
        RankResult { outcome: RankOutcome::Rank(depth + 1), witness }
    }
}

/// Rank with every variable restricted to even residues, which bounds the
/// rank of `b_2` (even from index 2 on).
pub fn rank_constrained_b2(h: u64, s_max: usize) -> RankResult {
    rank_general(2, h, s_max, &VarDomain::even(h))
}

/// An assignment keeping every form of levels `1..=s` nonzero mod `h`.
pub fn witness_assignment(m: u64, h: u64, s: usize) -> Option<Vec<u64>> {
    let (depth, assignment) = deepest(m, h, s, &VarDomain::full(h));
    (depth >= s).then_some(assignment)
}

/// For each `n` in range, 3 divides one of `b(k_n)`, `b(k_{k_n+u-1})`,
/// `b(k_{k_n+u})`, `b(k_{k_n+u+1})`. Values of `n` whose gap
/// `k_{n+1} - k_n` is below `u + 1` are skipped.
pub fn check_twp3(t: &TripleSpec, n_range: std::ops::RangeInclusive<u64>) -> Result<CheckReport> {
    check_twp3_with_gap(t, n_range, t.u() as u64 + 1)
}

/// As [`check_twp3`] but only checking `n` with gap at least `min_gap`.
/// The argument needs `b(k_n) = .. = b(k_n + u + 1)`, i.e. a gap of `u + 2`;
/// with gap exactly `u + 1` the claim can fail (`ovb_2`, `n = 8`).
pub fn check_twp3_with_gap(
    t: &TripleSpec,
    n_range: std::ops::RangeInclusive<u64>,
    min_gap: u64,
) -> Result<CheckReport> {
    if !t.has_unit_difference_l() {
        return Err(Error::HypothesisViolated(format!(
            "L must be (1, -1), got {:?}",
            t.l_coeffs()
        )));
    }
    if t.r_sum().rem_euclid(3) == 0 {
        return Err(Error::HypothesisViolated(format!("3 divides r = {}", t.r_sum())));
    }
    let k = t.k().clone();
    let u = t.u() as i64;
    let mut ctx = EvalContext::modular(t.clone(), 3)?;
    let mut report = CheckReport::new(format!("mod-3 quadruples for {}", t.name().unwrap_or("T")));
    for n in n_range {
        if k.gap(n) < min_gap {
            continue;
        }
        let kn = k.at(n as i64);
        let idx = [kn, k.at(kn + u - 1), k.at(kn + u), k.at(kn + u + 1)];
        let vals: Vec<u64> = idx.iter().map(|&i| ctx.eval(i)).collect();
        report.record(vals.contains(&0), || {
            format!("n = {n}: indices {idx:?} have residues {vals:?} mod 3")
        });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::triple::{BuiltinFamily, FamilyTag};

    #[test]
    fn bitset_search_agrees_with_scalar() {
        for (m, h, s_max) in [(2, 5, 6), (2, 12, 7), (2, 19, 8), (3, 10, 5), (3, 16, 6), (4, 7, 4)] {
            for domain in [VarDomain::full(h), VarDomain::even(h)] {
                let sets = domain.sets(s_max);
                let stop = AtomicBool::new(false);
                let mut fast = RingSearch::new(m, h, s_max, &sets, &stop);
                fast.run(&[1]);
                let stop = AtomicBool::new(false);
                let mut slow = Search::new(m, h, s_max, &sets, &stop);
                slow.run(&[1]);
                assert_eq!(fast.best, slow.best, "m = {m}, h = {h}");
                let levels = build_levels(m, 0, fast.best.max(1)).unwrap();
                assert!(levels.last().unwrap().avoids_zero(&fast.best_assignment, h));
            }
        }
    }

    #[test]
    fn ring_negation_and_rotation() {
        let ring = Ring::new(7);
        assert_eq!(ring.negate(0b0000110), 0b1100000);
        assert_eq!(ring.negate(0b0000001), 0b0000001);
        assert_eq!(ring.rotate(0b1000001, 2), 0b0000110);
    }

    fn coeffs(f: &LinearForm) -> Vec<i64> {
        f.coeffs.iter().map(|c| c.to_i64().unwrap()).collect()
    }

    #[test]
    fn binary_levels() {
        let levels = build_levels(2, 0, 4).unwrap();
        let counts: Vec<usize> = levels.iter().map(|l| l.new_entries().count()).collect();
        assert_eq!(counts, vec![1, 3, 7, 15]);
        let l2: Vec<_> = levels[1].new_entries().collect();
        assert_eq!(l2[0].index.render(2, 0), "4n-2");
        assert_eq!(coeffs(&l2[2].form), vec![2, 1]);
        let l3: Vec<_> = levels[2].new_entries().collect();
        let at_8n = l3.iter().find(|e| e.index.offset == 0).unwrap();
        assert_eq!(coeffs(&at_8n.form), vec![1, 3, 1]);
        let last = levels[3].entries.last().unwrap();
        assert_eq!(last.index.render(2, 0), "16n+14");
        assert_eq!(coeffs(&last.form), vec![26, 42, 14, 1]);
        assert_eq!(last.form.to_string(), "c4 + 14c3 + 42c2 + 26c1");
    }

    #[test]
    fn ternary_positions() {
        let levels = build_levels(3, 0, 2).unwrap();
        let idx = levels[1].covered_indices(5).unwrap();
        assert_eq!(idx, vec![15, 42, 45, 48, 51]);
        let wide = index_set(3, 5, 2).unwrap();
        assert!(idx.iter().all(|i| wide.contains(i)));
    }

    #[test]
    fn index_set_examples() {
        assert_eq!(index_set(2, 10, 1).unwrap(), vec![20]);
        let s3 = index_set(2, 10, 3).unwrap();
        for i in [74, 76, 78, 80, 82, 84, 86] {
            assert!(s3.contains(&i));
        }
        let sigma2: Vec<u64> = index_set(3, 5, 2).unwrap().into_iter().filter(|&i| i > 15).collect();
        assert_eq!(sigma2, vec![39, 42, 45, 48, 51]);
        assert!(matches!(index_set(2, 0, 3), Err(Error::BelowThreshold { .. })));
    }

    #[test]
    fn binary_index_set_is_exact() {
        let levels = build_levels(2, 0, 5).unwrap();
        for n in 1..20 {
            assert_eq!(levels[4].covered_indices(n).unwrap(), index_set(2, n, 5).unwrap());
        }
    }

    #[test]
    fn small_ranks() {
        assert_eq!(rank_general(2, 3, 13, &VarDomain::full(3)).outcome, RankOutcome::Rank(2));
        assert_eq!(rank_general(2, 5, 13, &VarDomain::full(5)).outcome, RankOutcome::Rank(4));
        assert_eq!(
            rank_general(2, 4, 13, &VarDomain::full(4)).outcome,
            RankOutcome::ExceedsCutoff(13)
        );
        assert_eq!(rank_constrained_b2(4, 13).outcome, RankOutcome::Rank(2));
    }

    #[test]
    fn witnesses() {
        let w = witness_assignment(2, 5, 3).unwrap();
        assert_eq!(w, vec![1, 1, 2]);
        assert!(witness_assignment(2, 5, 4).is_none());
        assert!(witness_assignment(2, 3, 2).is_none());
        let levels = build_levels(2, 0, 3).unwrap();
        assert!(levels[2].avoids_zero(&w, 5));
    }

    #[test]
    fn unsupported_triples() {
        let t = BuiltinFamily::new(FamilyTag::OvBm, 2).triple().unwrap();
        assert!(matches!(build_levels_for(&t, 3), Err(Error::UnsupportedTriple(_))));
        let t = BuiltinFamily::new(FamilyTag::Cm, 3).triple().unwrap();
        assert_eq!(build_levels_for(&t, 3).unwrap()[2].n_min, 1);
    }

    #[test]
    fn twp3_small() {
        for tag in [FamilyTag::Bm, FamilyTag::Cm] {
            let t = BuiltinFamily::new(tag, 2).triple().unwrap();
            assert!(check_twp3(&t, 1..=100).unwrap().passed());
        }
        let t = BuiltinFamily::new(FamilyTag::OvBm, 3).triple().unwrap();
        assert!(check_twp3(&t, 1..=100).unwrap().passed());
    }

    #[test]
    fn twp3_needs_wider_gap() {
        let t = BuiltinFamily::new(FamilyTag::OvBm, 2).triple().unwrap();
        let report = check_twp3(&t, 1..=10).unwrap();
        assert_eq!(report.violations.len(), 1);
        assert!(report.violations[0].starts_with("n = 8:"));
        let strict = check_twp3_with_gap(&t, 1..=10, 3).unwrap();
        assert_eq!(strict.checked, 0);
    }

    #[test]
    fn rendering() {
        assert_eq!(SymbolicIndex { depth: 1, offset: 0 }.render(2, 0), "2n");
        assert_eq!(SymbolicIndex { depth: 3, offset: -6 }.render(2, 0), "8n-6");
        assert_eq!(SymbolicIndex { depth: 2, offset: 3 }.render(3, 1), "iota^2(n)+3");
        assert_eq!(SymbolicIndex { depth: 2, offset: 3 }.at(3, 1, 2), 25);
    }
}
