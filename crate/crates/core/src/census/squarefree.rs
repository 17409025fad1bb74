//! Counting squarefree integers all of whose prime factors lie in a set of
//! primes given by a membership table. Two independent routes: a segmented
//! factoring sieve and a recursive enumeration of products of members.

use rayon::prelude::*;

use super::MembershipTable;
use crate::arith;

const SEGMENT: u64 = 1 << 16;

/// How [`count_squarefree`] should count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CountMode {
    /// Segmented sieve over `[2, x]` split into this many shards.
    Sieve { shards: usize },
    Enumerate,
}

/// Number of squarefree `d` in `[2, x]` supported on the table's members.
pub fn count_squarefree(table: &MembershipTable, x: u64, mode: CountMode) -> u64 {
    match mode {
        CountMode::Sieve { shards } => count_by_sieve(table, x, shards),
        CountMode::Enumerate => count_by_enumeration(table, x),
    }
}

pub fn count_by_sieve(table: &MembershipTable, x: u64, shards: usize) -> u64 {
    if x < 2 {
        return 0;
    }
    assert!(x <= table.limit(), "membership table covers {} < {x}", table.limit());
    let small_primes = arith::primes_up_to(num_integer::Roots::sqrt(&x));
    let shards = shards.max(1) as u64;
    let span = (x - 1).div_ceil(shards);
    (0..shards)
        .into_par_iter()
        .map(|s| {
            let lo = 2 + s * span;
            let hi = (lo + span - 1).min(x);
            if lo > hi {
                return 0;
            }
            let mut total = 0;
            let mut seg_lo = lo;
            while seg_lo <= hi {
                let seg_hi = (seg_lo + SEGMENT - 1).min(hi);
                total += sieve_segment(table, &small_primes, seg_lo, seg_hi);
                seg_lo = seg_hi + 1;
            }
            total
        })
        .sum()
}

fn sieve_segment(table: &MembershipTable, small_primes: &[u64], lo: u64, hi: u64) -> u64 {
    let len = (hi - lo + 1) as usize;
    let mut rest: Vec<u64> = (lo..=hi).collect();
    let mut good = vec![true; len];
    for &p in small_primes {
        if p * p > hi {
            break;
        }
        let member = table.contains(p);
        let mut m = lo.div_ceil(p) * p;
        while m <= hi {
            let idx = (m - lo) as usize;
            if good[idx] {
                if member {
                    rest[idx] /= p;
                    if rest[idx] % p == 0 {
                        good[idx] = false;
                    }
                } else {
                    good[idx] = false;
                }
            }
            m += p;
        }
    }
    // What remains is 1 or a single prime above sqrt(hi).
    good.iter()
        .zip(&rest)
        .filter(|&(&g, &r)| g && (r == 1 || table.contains(r)))
        .count() as u64
}

pub fn count_by_enumeration(table: &MembershipTable, x: u64) -> u64 {
    let members = table.members_up_to(x);
    fn walk(members: &[u64], start: usize, product: u64, x: u64) -> u64 {
        let mut count = 0;
        for (i, &p) in members.iter().enumerate().skip(start) {
            let Some(next) = product.checked_mul(p).filter(|&v| v <= x) else { break };
            count += 1 + walk(members, i + 1, next, x);
        }
        count
    }
    walk(&members, 0, 1, x)
}

/// Every squarefree `d` in `[2, x]` supported on members, with its prime
/// factors, in ascending order of `d`.
pub fn supported_squarefree(table: &MembershipTable, x: u64) -> Vec<(u64, Vec<u64>)> {
    let members = table.members_up_to(x);
    let mut out = Vec::new();
    let mut stack: Vec<u64> = Vec::new();
    fn walk(members: &[u64], start: usize, product: u64, x: u64, stack: &mut Vec<u64>, out: &mut Vec<(u64, Vec<u64>)>) {
        for (i, &p) in members.iter().enumerate().skip(start) {
            let Some(next) = product.checked_mul(p).filter(|&v| v <= x) else { break };
            stack.push(p);
            out.push((next, stack.clone()));
            walk(members, i + 1, next, x, stack, out);
            stack.pop();
        }
    }
    walk(&members, 0, 1, x, &mut stack, &mut out);
    out.sort_unstable();
    out
}

/// `N(X)` at each checkpoint, computed from one enumeration.
pub fn counts_at(table: &MembershipTable, checkpoints: &[u64]) -> Vec<(u64, u64)> {
    let Some(&top) = checkpoints.iter().max() else { return Vec::new() };
    let members = table.members_up_to(top);
    let mut values = Vec::new();
    fn walk(members: &[u64], start: usize, product: u64, x: u64, out: &mut Vec<u64>) {
        for (i, &p) in members.iter().enumerate().skip(start) {
            let Some(next) = product.checked_mul(p).filter(|&v| v <= x) else { break };
            out.push(next);
            walk(members, i + 1, next, x, out);
        }
    }
    walk(&members, 0, 1, top, &mut values);
    values.sort_unstable();
    checkpoints.iter().map(|&c| (c, values.partition_point(|&v| v <= c) as u64)).collect()
}
