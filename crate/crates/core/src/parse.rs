use std::ops::RangeInclusive;

use crate::error::{Error, Result};

/// Parses an inclusive range: `a..b`, `a..=b`, or a single `a`.
pub fn parse_range(text: &str) -> Result<RangeInclusive<u64>> {
    let text = text.trim();
    let (lo, hi) = match text.split_once("..") {
        Some((lo, hi)) => (lo, hi.strip_prefix('=').unwrap_or(hi)),
        None => (text, text),
    };
    let num = |s: &str| {
        s.trim()
            .parse::<u64>()
            .map_err(|_| Error::Parse(format!("`{s}` in range `{text}` is not a non-negative integer")))
    };
    let (lo, hi) = (num(lo)?, num(hi)?);
    if lo > hi {
        return Err(Error::Parse(format!("range `{text}` is empty")));
    }
    Ok(lo..=hi)
}
