//! Parsers for the textual arguments accepted by the command line tool.
//! Every function here returns an error instead of panicking on any input.

use crate::error::{Error, Result};
use crate::quadfields::is_fundamental_discriminant;

fn clean(s: &str) -> String {
    s.trim().chars().filter(|&c| c != '_').collect()
}

/// A nonnegative bound written as `1000000`, `1_000_000`, `1e6` or `10^6`.
pub fn parse_bound(s: &str) -> Result<u64> {
    let t = clean(s);
    let bad = || Error::Parse(format!("not a bound: {s:?}"));
    if t.is_empty() || t.len() > 64 {
        return Err(bad());
    }
    let (mantissa, base, exp) = if let Some((m, e)) = t.split_once(['e', 'E']) {
        (m, 10u64, e)
    } else if let Some((b, e)) = t.split_once('^') {
        ("1", b.parse::<u64>().map_err(|_| bad())?, e)
    } else {
        return t.parse::<u64>().map_err(|_| bad());
    };
    let m: u64 = mantissa.parse().map_err(|_| bad())?;
    let e: u32 = exp.parse().map_err(|_| bad())?;
    base.checked_pow(e)
        .and_then(|p| p.checked_mul(m))
        .ok_or(Error::Overflow("bound does not fit in 64 bits"))
}

/// A comma separated list of distinct primes, returned sorted.
pub fn parse_prime_list(s: &str) -> Result<Vec<u64>> {
    let t = clean(s);
    if t.is_empty() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for item in t.split(',') {
        let p: u64 = item.trim().parse().map_err(|_| Error::Parse(format!("not an integer: {item:?}")))?;
        if !crate::arith::is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        out.push(p);
    }
    out.sort_unstable();
    if out.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Parse(format!("repeated prime in {s:?}")));
    }
    Ok(out)
}

/// A fundamental discriminant, e.g. `-4`.
pub fn parse_discriminant(s: &str) -> Result<i64> {
    let t = clean(s);
    let d: i64 = t.parse().map_err(|_| Error::Parse(format!("not an integer: {s:?}")))?;
    if !is_fundamental_discriminant(d) {
        return Err(Error::NotFundamental(d));
    }
    Ok(d)
}

/// A comma separated list of bounds, strictly increasing.
pub fn parse_checkpoints(s: &str) -> Result<Vec<u64>> {
    let t = s.trim();
    if t.is_empty() {
        return Err(Error::Parse("empty checkpoint list".into()));
    }
    let out = t.split(',').map(parse_bound).collect::<Result<Vec<_>>>()?;
    if out.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Parse(format!("checkpoints must increase: {s:?}")));
    }
    Ok(out)
}
