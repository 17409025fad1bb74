//! Primes with prescribed splitting: the `n`-th prime of an arithmetic
//! progression, and the choice of `q_1, ..., q_{n+1}` whose splitting in the
//! real quadratic fields `Q(sqrt(p_j))` follows a fixed sign pattern.

use serde::Serialize;

use crate::arith;
use crate::error::{Error, Result};
use crate::quadfields::{discriminant_of_squarefree, QuadraticField, SplitType};

/// Default ceiling for the candidate search in [`select_q_primes`].
pub const DEFAULT_Q_CEILING: u64 = 1 << 40;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProgressionPrime {
    pub prime: u64,
    /// `p / (n log 2n)`.
    pub linnik_ratio: f64,
}

/// The `n`-th smallest prime congruent to `a` modulo `q`.
pub fn nth_prime_in_ap(a: i64, q: u64, n: u64) -> Result<ProgressionPrime> {
    if q < 2 || n == 0 {
        return Err(Error::InvalidArgument(format!("need q >= 2 and n >= 1, got q = {q}, n = {n}")));
    }
    let a = arith::reduce(a, q);
    if num_integer::gcd(a, q) != 1 {
        return Err(Error::InvalidArgument(format!("gcd({a}, {q}) > 1")));
    }
    let mut found = 0;
    let mut c = a;
    loop {
        if arith::is_prime(c) {
            found += 1;
            if found == n {
                let nf = n as f64;
                return Ok(ProgressionPrime { prime: c, linnik_ratio: c as f64 / (nf * (2.0 * nf).ln()) });
            }
        }
        c = c.checked_add(q).ok_or(Error::Overflow("nth_prime_in_ap"))?;
    }
}

/// The first `n` primes congruent to 1 mod 4.
pub fn primes_one_mod_four(n: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(n);
    let mut p = 1;
    while out.len() < n {
        p = arith::next_prime(p);
        if p % 4 == 1 {
            out.push(p);
        }
    }
    out
}

/// A residue class modulo `p_1 ... p_n` described prime by prime: `q` lies in
/// the class iff `(q / p_j) = signs[j]` for every `j`.
#[derive(Debug, Clone)]
struct SymbolClass {
    /// `residue_ok[j][r]` for `r` in `0..p_j`.
    residue_ok: Vec<Vec<bool>>,
    moduli: Vec<u64>,
}

impl SymbolClass {
    fn new(moduli: &[u64], signs: &[i8]) -> Self {
        let residue_ok = moduli
            .iter()
            .zip(signs)
            .map(|(&p, &sign)| {
                let mut squares = vec![false; p as usize];
                for r in 1..p {
                    squares[(r * r % p) as usize] = true;
                }
                (0..p).map(|r| r != 0 && squares[r as usize] == (sign == 1)).collect()
            })
            .collect();
        Self { residue_ok, moduli: moduli.to_vec() }
    }

    fn contains(&self, q: u64) -> bool {
        self.moduli.iter().zip(&self.residue_ok).all(|(&p, ok)| ok[(q % p) as usize])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QSelection {
    pub p: Vec<u64>,
    /// `q_1, ..., q_n` followed by the shared `q_{n+1}`.
    pub q: Vec<u64>,
    pub max_q: u64,
    /// `log(max q) / (n log n)`: the exponent `B` with `max q = n^(B n)`;
    /// absent for `n = 1`.
    pub growth_exponent: Option<f64>,
}

/// Chooses `q_1..q_n` with `q_i` inert in `Q(sqrt(p_i))` and split in every
/// other `Q(sqrt(p_j))`, and `q_{n+1}` inert in all of them. Each `q` is the
/// smallest odd prime, distinct from the earlier choices, in its class.
pub fn select_q_primes(n: usize, ceiling: u64) -> Result<QSelection> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let p = primes_one_mod_four(n);
    let mut q: Vec<u64> = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let signs: Vec<i8> = (0..n).map(|j| if i == n || i == j { -1 } else { 1 }).collect();
        let class = SymbolClass::new(&p, &signs);
        let mut candidate = 2;
        let chosen = loop {
            candidate = arith::next_prime(candidate);
            if candidate > ceiling {
                return Err(Error::CeilingExceeded { ceiling });
            }
            if class.contains(candidate) && !q.contains(&candidate) {
                break candidate;
            }
        };
        q.push(chosen);
    }
    let max_q = *q.iter().max().expect("n + 1 entries");
    let growth_exponent = (n > 1).then(|| (max_q as f64).ln() / (n as f64 * (n as f64).ln()));
    Ok(QSelection { p, q, max_q, growth_exponent })
}

/// `matrix[i][j]` is the splitting of `q[i]` in `Q(sqrt(p[j]))`.
pub fn verify_splitting_matrix(p: &[u64], q: &[u64]) -> Result<Vec<Vec<SplitType>>> {
    let fields = p
        .iter()
        .map(|&pj| {
            if !arith::is_prime(pj) {
                return Err(Error::NotPrime(pj));
            }
            QuadraticField::new(discriminant_of_squarefree(pj as i64)?)
        })
        .collect::<Result<Vec<_>>>()?;
    q.iter()
        .map(|&qi| fields.iter().map(|k| k.splitting(qi)).collect())
        .collect()
}

/// Whether `matrix` has the selection pattern: row `i < n` inert exactly on
/// the diagonal and split elsewhere; the last row inert everywhere.
pub fn has_selection_pattern(matrix: &[Vec<SplitType>]) -> bool {
    let n = matrix.len().saturating_sub(1);
    matrix.len() == n + 1
        && matrix.iter().enumerate().all(|(i, row)| {
            row.len() == n
                && row.iter().enumerate().all(|(j, &s)| {
                    let want = if i == n || i == j { SplitType::Inert } else { SplitType::Split };
                    s == want
                })
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn progression_examples() {
        assert_eq!(nth_prime_in_ap(1, 4, 3).unwrap().prime, 17);
        assert_eq!(nth_prime_in_ap(1, 2, 1).unwrap().prime, 3);
        assert_eq!(nth_prime_in_ap(3, 5, 2).unwrap().prime, 13);
        assert_eq!(nth_prime_in_ap(-2, 5, 1).unwrap().prime, 3);
        assert!(nth_prime_in_ap(2, 4, 1).is_err());
        assert!(nth_prime_in_ap(1, 1, 1).is_err());
    }

    #[test]
    fn selection_n1() {
        let s = select_q_primes(1, DEFAULT_Q_CEILING).unwrap();
        assert_eq!(s.p, vec![5]);
        assert_eq!(s.q, vec![3, 7]);
        assert_eq!(s.growth_exponent, None);
    }

    #[test]
    fn two_is_inert_in_q_sqrt5_but_never_chosen() {
        let m = verify_splitting_matrix(&[5], &[2]).unwrap();
        assert_eq!(m, vec![vec![SplitType::Inert]]);
        for n in 1..=4 {
            assert!(!select_q_primes(n, DEFAULT_Q_CEILING).unwrap().q.contains(&2));
        }
    }

    #[test]
    fn matrix_examples() {
        let m = verify_splitting_matrix(&[5], &[3, 7]).unwrap();
        assert_eq!(m, vec![vec![SplitType::Inert], vec![SplitType::Inert]]);
        assert_eq!(verify_splitting_matrix(&[5], &[5]).unwrap(), vec![vec![SplitType::Ramified]]);
        let s = select_q_primes(2, DEFAULT_Q_CEILING).unwrap();
        assert_eq!(s.p, vec![5, 13]);
        let m = verify_splitting_matrix(&s.p, &s.q).unwrap();
        assert!(has_selection_pattern(&m));
        assert!(verify_splitting_matrix(&[9], &[5]).is_err());
    }

    #[test]
    fn ceiling_is_enforced() {
        assert_eq!(select_q_primes(3, 10), Err(Error::CeilingExceeded { ceiling: 10 }));
    }
}
