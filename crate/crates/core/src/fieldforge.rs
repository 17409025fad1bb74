//! Construction of `n` quadratic extensions `L_i = k(sqrt(x_i + sqrt(delta)))`
//! of an imaginary quadratic field whose compositum with the conjugate fields
//! has full degree, with small discriminants and every claim certified.
//!
//! The shifts `x_i` are found by a direct minimal search: with `p_1 < ... < p_n`
//! the first odd primes split in `k`, `x_i = r_i + p_i^2 t_i` where `r_i` is the
//! least square root of `delta + p_i` modulo `p_i^2` and `t_i >= 0` is the least
//! value with `x_i^2 != delta (mod p_j)` for every `j != i`.

use rayon::prelude::*;
use serde::Serialize;

use crate::arith;
use crate::error::{Error, Result};
use crate::quadfields::{QuadraticField, SplitPrimePrefix, SplitType};
use crate::relquad::{compositum_degree_check, CompositumVerdict, RelQuadExt};

/// Default bound on `t_i`; never reached for valid input.
pub const DEFAULT_SHIFT_CAP: u64 = 1 << 24;

/// Least `r` in `[0, p^2)` with `r^2 = a (mod p^2)`, for an odd prime `p`.
pub fn hensel_sqrt(a: i64, p: u64) -> Result<u64> {
    if p == 2 || !arith::is_prime(p) {
        return Err(Error::InvalidArgument(format!("{p} is not an odd prime")));
    }
    if arith::reduce(a, p) == 0 {
        return Err(Error::PrimeDividesArgument { a, p });
    }
    let s = arith::sqrt_mod(a, p).ok_or(Error::NotResidue { a, p })?;
    let p2 = p.checked_mul(p).ok_or(Error::Overflow("hensel_sqrt"))?;
    // (s + p t)^2 = a (mod p^2)  <=>  2 s t = (a - s^2) / p (mod p).
    let lift = (a as i128 - (s as i128) * (s as i128)) / p as i128;
    let inv = arith::inv_mod(2 * s % p, p).expect("2s is a unit mod p");
    let t = arith::mul_mod(arith::reduce_i128(lift, p), inv, p);
    let r = s + p * t;
    Ok(r.min(p2 - r))
}

/// The chosen shift `x_i = r_i + p_i^2 t_i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShiftChoice {
    pub prime: u64,
    pub root: u64,
    pub t: u64,
    pub x: i64,
    /// `x_i / p_n^4`.
    pub growth_ratio: f64,
}

/// Chooses the shift for index `i` (zero-based) of `primes`.
pub fn find_xi(delta_k: i64, primes: &[u64], i: usize, search_cap: u64) -> Result<ShiftChoice> {
    let k = QuadraticField::new(delta_k)?;
    let &p_i = primes
        .get(i)
        .ok_or_else(|| Error::InvalidArgument(format!("index {i} out of range for {} primes", primes.len())))?;
    for &p in primes {
        if p == 2 || k.splitting(p)? != SplitType::Split {
            return Err(Error::Precondition(format!("{p} is not an odd prime split in {k}")));
        }
    }
    let root = hensel_sqrt(delta_k + p_i as i64, p_i)?;
    let p_sq = p_i * p_i;
    let others: Vec<(u64, u64)> = primes
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, &p)| (p, arith::reduce(delta_k, p)))
        .collect();
    let p_max = *primes.iter().max().expect("nonempty") as f64;
    for t in 0..=search_cap {
        let x = root as u128 + p_sq as u128 * t as u128;
        let avoids = others.iter().all(|&(p, d)| {
            let xm = (x % p as u128) as u64;
            arith::mul_mod(xm, xm, p) != d
        });
        if avoids {
            let x = i64::try_from(x).map_err(|_| Error::Overflow("find_xi"))?;
            return Ok(ShiftChoice { prime: p_i, root, t, x, growth_ratio: x as f64 / p_max.powi(4) });
        }
    }
    Err(Error::CapExceeded { cap: search_cap })
}

/// Certificates for the three properties of a construction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    /// `L_i / Q` is not Galois, per field.
    pub non_galois: Vec<bool>,
    /// `Norm(beta_i)` is divisible by `p_i` exactly once, per field.
    pub norm_valuation_one: Vec<bool>,
    pub compositum: CompositumVerdict,
    pub disc_bounds: Vec<i128>,
    /// `max_i disc_bound_i / n^8`.
    pub disc_bound_ratio: f64,
}

impl Certificate {
    pub fn passes(&self) -> bool {
        self.non_galois.iter().all(|&b| b) && self.norm_valuation_one.iter().all(|&b| b) && self.compositum.is_full()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Construction {
    pub delta_k: i64,
    pub split_primes: SplitPrimePrefix,
    pub shifts: Vec<ShiftChoice>,
    pub exts: Vec<RelQuadExt>,
    pub certificate: Certificate,
}

/// Builds and certifies `n` extensions of `Q(sqrt(delta_k))`.
pub fn construct_fields(delta_k: i64, n: usize) -> Result<Construction> {
    let k = QuadraticField::new(delta_k)?;
    if !k.is_imaginary() {
        return Err(Error::InvalidArgument(format!("{delta_k} is not negative")));
    }
    let split_primes = k.split_primes_prefix(n, true)?;
    let primes = &split_primes.primes;
    let shifts = (0..n)
        .into_par_iter()
        .map(|i| find_xi(delta_k, primes, i, DEFAULT_SHIFT_CAP))
        .collect::<Result<Vec<_>>>()?;
    let exts = shifts
        .iter()
        .map(|s| RelQuadExt::new(delta_k, s.x))
        .collect::<Result<Vec<_>>>()?;

    let non_galois = exts.iter().map(|e| !e.is_galois_over_q()).collect();
    let norm_valuation_one = exts
        .iter()
        .zip(primes)
        .map(|(e, &p)| arith::valuation(e.beta_norm() as u128, p) == 1)
        .collect();
    let search_bound = *primes.last().expect("n >= 1");
    let compositum = compositum_degree_check(&exts, search_bound)?;
    let disc_bounds: Vec<i128> = exts.iter().map(RelQuadExt::disc_upper_bound).collect();
    let n8 = (n as f64).powi(8);
    let disc_bound_ratio = disc_bounds.iter().map(|&b| b as f64 / n8).fold(0.0, f64::max);
    let certificate = Certificate { non_galois, norm_valuation_one, compositum, disc_bounds, disc_bound_ratio };
    if !certificate.passes() {
        return Err(Error::VerificationFailed(format!("certificate for delta = {delta_k}, n = {n}: {certificate:?}")));
    }
    log::debug!("constructed {n} extensions of {k}");
    Ok(Construction { delta_k, split_primes, shifts, exts, certificate })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_sqrt_mod_square(a: i64, p: u64) -> Option<u64> {
        let m = p * p;
        (0..m).find(|&r| (r * r) % m == arith::reduce(a, m))
    }

    #[test]
    fn hensel_examples() {
        assert_eq!(hensel_sqrt(1, 5).unwrap(), 1);
        assert_eq!(hensel_sqrt(4, 7).unwrap(), 2);
        assert_eq!(hensel_sqrt(2, 7).unwrap(), 10);
        assert_eq!(hensel_sqrt(3, 7), Err(Error::NotResidue { a: 3, p: 7 }));
        assert_eq!(hensel_sqrt(14, 7), Err(Error::PrimeDividesArgument { a: 14, p: 7 }));
    }

    #[test]
    fn hensel_matches_exhaustion() {
        for p in [3u64, 5, 7, 11, 13, 29, 31] {
            for a in -40i64..40 {
                let expected = if arith::reduce(a, p) == 0 { None } else { brute_sqrt_mod_square(a, p) };
                assert_eq!(hensel_sqrt(a, p).ok(), expected, "a = {a}, p = {p}");
            }
        }
    }

    #[test]
    fn find_xi_examples() {
        assert_eq!(find_xi(-4, &[5, 13], 0, 100).unwrap().x, 1);
        let second = find_xi(-4, &[5, 13], 1, 100).unwrap();
        assert_eq!((second.root, second.t, second.x), (3, 0, 3));
        assert_eq!(find_xi(-4, &[5], 0, 100).unwrap().x, 1);
        assert!(find_xi(-4, &[3], 0, 100).is_err());
    }

    #[test]
    fn construct_examples() {
        let c = construct_fields(-4, 2).unwrap();
        assert_eq!(c.exts.iter().map(|e| e.x()).collect::<Vec<_>>(), vec![1, 3]);
        assert_eq!(c.certificate.disc_bounds, vec![20480, 53248]);
        assert!(c.certificate.passes());
        let one = construct_fields(-4, 1).unwrap();
        assert_eq!(one.exts[0].x(), 1);
        let eisenstein = construct_fields(-3, 1).unwrap();
        assert_eq!(eisenstein.split_primes.primes, vec![7]);
        assert_eq!(eisenstein.exts[0].x(), 2);
        assert!(construct_fields(5, 1).is_err());
        assert!(construct_fields(-4, 0).is_err());
    }
}
