//! Quadratic fields encoded by their fundamental discriminant, together with
//! the splitting of rational primes.

use std::fmt;

use serde::Serialize;

use crate::arith::{self, reduce};
use crate::error::{Error, Result};

/// How a prime decomposes in a quadratic extension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum SplitType {
    Split,
    Inert,
    Ramified,
}

impl SplitType {
    pub fn is_split(self) -> bool {
        self == SplitType::Split
    }
}

impl fmt::Display for SplitType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SplitType::Split => "split",
            SplitType::Inert => "inert",
            SplitType::Ramified => "ramified",
        })
    }
}

/// Which signs of discriminant an enumeration should produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Signature {
    Imaginary,
    Real,
    Both,
}

pub fn is_fundamental_discriminant(d: i64) -> bool {
    if d == 0 || d == 1 {
        return false;
    }
    match d.rem_euclid(4) {
        1 => arith::is_squarefree(d.unsigned_abs()),
        0 => {
            let m = d / 4;
            matches!(m.rem_euclid(4), 2 | 3) && arith::is_squarefree(m.unsigned_abs())
        }
        _ => false,
    }
}

/// The fundamental discriminant of `Q(sqrt(m))` for a squarefree `m != 1`.
pub fn discriminant_of_squarefree(m: i64) -> Result<i64> {
    if m == 0 || m == 1 || !arith::is_squarefree(m.unsigned_abs()) {
        return Err(Error::InvalidArgument(format!("{m} is not a squarefree integer other than 0, 1")));
    }
    if m.rem_euclid(4) == 1 {
        Ok(m)
    } else {
        m.checked_mul(4).ok_or(Error::Overflow("discriminant_of_squarefree"))
    }
}

/// A quadratic field `Q(sqrt(delta))` with `delta` a fundamental discriminant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct QuadraticField {
    delta: i64,
}

impl QuadraticField {
    pub fn new(delta: i64) -> Result<Self> {
        if is_fundamental_discriminant(delta) {
            Ok(Self { delta })
        } else {
            Err(Error::NotFundamental(delta))
        }
    }

    pub fn delta(&self) -> i64 {
        self.delta
    }

    pub fn is_imaginary(&self) -> bool {
        self.delta < 0
    }

    /// Decomposition type of the rational prime `p`.
    pub fn splitting(&self, p: u64) -> Result<SplitType> {
        if !arith::is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(self.splitting_unchecked(p))
    }

    /// Same as [`splitting`](Self::splitting) for a `p` already known prime.
    pub(crate) fn splitting_unchecked(&self, p: u64) -> SplitType {
        if reduce(self.delta, p) == 0 {
            return SplitType::Ramified;
        }
        if p == 2 {
            return if self.delta.rem_euclid(8) == 1 {
                SplitType::Split
            } else {
                SplitType::Inert
            };
        }
        if arith::legendre(self.delta, p) == 1 {
            SplitType::Split
        } else {
            SplitType::Inert
        }
    }

    /// The primes of this field lying over `p`.
    pub fn primes_above(&self, p: u64) -> Result<Vec<PrimeOfK>> {
        let kind = self.splitting(p)?;
        Ok(match kind {
            SplitType::Inert => vec![PrimeOfK { p, kind, root: None }],
            SplitType::Ramified => vec![PrimeOfK { p, kind, root: Some(0) }],
            SplitType::Split if p == 2 => vec![
                PrimeOfK { p, kind, root: Some(0) },
                PrimeOfK { p, kind, root: Some(1) },
            ],
            SplitType::Split => {
                let r = arith::sqrt_mod(self.delta, p).expect("split prime has a square root");
                vec![
                    PrimeOfK { p, kind, root: Some(r) },
                    PrimeOfK { p, kind, root: Some(p - r) },
                ]
            }
        })
    }

    /// The `n` smallest primes splitting in this field, optionally skipping 2.
    pub fn split_primes_prefix(&self, n: usize, odd_only: bool) -> Result<SplitPrimePrefix> {
        if n == 0 {
            return Err(Error::InvalidArgument("n must be at least 1".into()));
        }
        let mut primes = Vec::with_capacity(n);
        let mut p = if odd_only { 2 } else { 1 };
        while primes.len() < n {
            p = arith::next_prime(p);
            if self.splitting_unchecked(p) == SplitType::Split {
                primes.push(p);
            }
        }
        let last = *primes.last().expect("n >= 1") as f64;
        let nf = n as f64;
        Ok(SplitPrimePrefix {
            primes,
            growth_ratio: last / (nf * (2.0 * nf).ln()),
        })
    }
}

impl fmt::Display for QuadraticField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q(sqrt({}))", self.delta)
    }
}

/// The leading split primes together with `p_n / (n log 2n)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplitPrimePrefix {
    pub primes: Vec<u64>,
    pub growth_ratio: f64,
}

/// A prime ideal of a quadratic field, written symbolically.
///
/// For odd `p`, `root` is the residue of `sqrt(delta)` modulo the prime: a
/// square root of `delta` mod `p` when split, `0` when ramified, absent when
/// inert. Over a split `p = 2` the two primes are labelled by the residue
/// (`0` or `1`) of `(1 + sqrt(delta)) / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct PrimeOfK {
    pub p: u64,
    pub kind: SplitType,
    pub root: Option<u64>,
}

impl PrimeOfK {
    pub fn norm(&self) -> u64 {
        match self.kind {
            SplitType::Inert => self.p * self.p,
            _ => self.p,
        }
    }

    /// The prime over the same `p` obtained by complex conjugation.
    pub fn conjugate(&self) -> PrimeOfK {
        match (self.kind, self.root) {
            (SplitType::Split, Some(r)) if self.p == 2 => PrimeOfK { root: Some(1 - r), ..*self },
            (SplitType::Split, Some(r)) => PrimeOfK { root: Some(self.p - r), ..*self },
            _ => *self,
        }
    }
}

impl fmt::Display for PrimeOfK {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.root {
            Some(r) if self.kind == SplitType::Split => write!(f, "({}, {})", self.p, r),
            _ => write!(f, "({})", self.p),
        }
    }
}

/// All fundamental discriminants with `|delta| <= x` of the requested sign,
/// ordered by `|delta|` and then by sign (negative first).
pub fn enumerate_fundamental_discriminants(x: u64, sign: Signature) -> Vec<i64> {
    let limit = x as usize;
    let squarefree = arith::squarefree_table(limit);
    let mut out = Vec::new();
    let want_neg = sign != Signature::Real;
    let want_pos = sign != Signature::Imaginary;
    for a in 3..=limit {
        let ai = a as i64;
        let mut push = |d: i64| {
            if (d < 0 && want_neg) || (d > 0 && want_pos) {
                out.push(d);
            }
        };
        // Odd part: d = +-a squarefree with d = 1 mod 4.
        if squarefree[a] {
            if (-ai).rem_euclid(4) == 1 {
                push(-ai);
            }
            if ai.rem_euclid(4) == 1 {
                push(ai);
            }
        }
        // Even part: d = 4m, m = 2, 3 mod 4 squarefree.
        if a % 4 == 0 {
            let m = ai / 4;
            if squarefree[m as usize] {
                if (-m).rem_euclid(4) >= 2 {
                    push(-ai);
                }
                if m.rem_euclid(4) >= 2 {
                    push(ai);
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fundamental_discriminant_examples() {
        assert!(is_fundamental_discriminant(-4));
        assert!(!is_fundamental_discriminant(9));
        assert!(is_fundamental_discriminant(12));
        assert!(!is_fundamental_discriminant(1));
        assert!(!is_fundamental_discriminant(0));
        assert!(!is_fundamental_discriminant(-5));
        assert!(is_fundamental_discriminant(-20));
        assert!(!is_fundamental_discriminant(-16));
        assert!(is_fundamental_discriminant(-3));
        assert!(is_fundamental_discriminant(8));
    }

    #[test]
    fn splitting_examples() {
        let k = QuadraticField::new(-4).unwrap();
        assert_eq!(k.splitting(2).unwrap(), SplitType::Ramified);
        assert_eq!(k.splitting(5).unwrap(), SplitType::Split);
        assert_eq!(k.splitting(3).unwrap(), SplitType::Inert);
        assert_eq!(k.splitting(9), Err(Error::NotPrime(9)));
        let q17 = QuadraticField::new(17).unwrap();
        assert_eq!(q17.splitting(2).unwrap(), SplitType::Split);
        let q5 = QuadraticField::new(5).unwrap();
        assert_eq!(q5.splitting(2).unwrap(), SplitType::Inert);
    }

    #[test]
    fn primes_above_examples() {
        let k = QuadraticField::new(-4).unwrap();
        let five = k.primes_above(5).unwrap();
        assert_eq!(five.len(), 2);
        assert_eq!(five.iter().map(|q| q.root.unwrap()).collect::<Vec<_>>(), vec![1, 4]);
        assert!(five.iter().all(|q| q.norm() == 5));
        let three = k.primes_above(3).unwrap();
        assert_eq!(three.len(), 1);
        assert_eq!(three[0].kind, SplitType::Inert);
        assert_eq!(three[0].norm(), 9);
        let two = k.primes_above(2).unwrap();
        assert_eq!(two.len(), 1);
        assert_eq!(two[0].kind, SplitType::Ramified);
        assert_eq!(two[0].norm(), 2);
        assert_eq!(five[0].conjugate(), five[1]);
    }

    #[test]
    fn split_prime_prefix_examples() {
        let gauss = QuadraticField::new(-4).unwrap();
        assert_eq!(gauss.split_primes_prefix(2, true).unwrap().primes, vec![5, 13]);
        assert_eq!(gauss.split_primes_prefix(1, true).unwrap().primes, vec![5]);
        let eisenstein = QuadraticField::new(-3).unwrap();
        assert_eq!(eisenstein.split_primes_prefix(1, true).unwrap().primes, vec![7]);
        let q17 = QuadraticField::new(17).unwrap();
        assert_eq!(q17.split_primes_prefix(1, false).unwrap().primes, vec![2]);
        assert!(gauss.split_primes_prefix(0, true).is_err());
        let r = gauss.split_primes_prefix(2, true).unwrap();
        assert!((r.growth_ratio - 13.0 / (2.0 * 4f64.ln())).abs() < 1e-12);
    }

    #[test]
    fn enumeration_examples() {
        assert_eq!(enumerate_fundamental_discriminants(10, Signature::Imaginary), vec![-3, -4, -7, -8]);
        assert_eq!(enumerate_fundamental_discriminants(3, Signature::Imaginary), vec![-3]);
        assert_eq!(enumerate_fundamental_discriminants(13, Signature::Real), vec![5, 8, 12, 13]);
    }

    #[test]
    fn enumeration_matches_validity_check() {
        let listed = enumerate_fundamental_discriminants(3_000, Signature::Both);
        let brute: Vec<i64> = (1..=3_000i64)
            .flat_map(|a| [-a, a])
            .filter(|&d| is_fundamental_discriminant(d))
            .collect();
        assert_eq!(listed, brute);
    }
}
