//! Generalized m-ary partition recurrences.
//!
//! A triple `T = (K, L, R)` defines a sequence `b_T` that is constant on the
//! blocks `[k_n, k_{n+1} - 1]` and satisfies
//! `sum_i l_i b_T(k_{n-i}) = sum_j r_j b_T(n - j)`. The crate evaluates such
//! sequences exactly or modulo `h`, checks them against brute-force partition
//! counts, computes digit characterizations, builds the symbolic level sets
//! behind the rank of non-divisibility, and searches for the first
//! divisible term.

pub mod charact;
pub mod error;
pub mod eval;
pub mod levels;
pub mod oracle;
pub mod parse;
pub mod report;
pub mod search;
pub mod table;
pub mod triple;
pub mod verify;

pub use error::{Error, Result};
pub use eval::{EvalContext, Exact, Modular};
pub use triple::{BuiltinFamily, FamilyTag, KSpec, TripleSpec};
