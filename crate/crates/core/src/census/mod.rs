//! Counting engines: the prime set `P` of split primes whose primes above are
//! nonsplit in every extension, squarefree integers supported on `P`, mean
//! value fits, the quaternion algebra census, and splitting statistics over
//! fundamental discriminants.

pub mod squarefree;

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::arith;
use crate::error::{Error, Result};
use crate::quadfields::{self, PrimeOfK, QuadraticField, Signature, SplitType};
use crate::quatalg::QuatAlgK;
use crate::relquad::RelQuadExt;

pub use squarefree::{count_squarefree, CountMode};

/// Classification of a rational prime against `P`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Membership {
    Member,
    NonMember,
    /// Divides `2 delta_k prod Norm(beta_i)`; excluded from `P`.
    Boundary,
}

/// `P = { p split in k : every prime above p is nonsplit in every L_i, L_i' }`.
#[derive(Debug, Clone)]
pub struct PrimePredicate {
    k: QuadraticField,
    exts: Vec<RelQuadExt>,
}

impl PrimePredicate {
    pub fn new(delta_k: i64, exts: Vec<RelQuadExt>) -> Result<Self> {
        let k = QuadraticField::new(delta_k)?;
        if !k.is_imaginary() {
            return Err(Error::InvalidArgument(format!("{delta_k} is not negative")));
        }
        if let Some(e) = exts.iter().find(|e| e.delta_k() != delta_k) {
            return Err(Error::BaseFieldMismatch(delta_k, e.delta_k()));
        }
        Ok(Self { k, exts })
    }

    pub fn delta_k(&self) -> i64 {
        self.k.delta()
    }

    pub fn exts(&self) -> &[RelQuadExt] {
        &self.exts
    }

    /// Number of extensions `n`; the expected density of `P` is `2^-(2n+1)`.
    pub fn degree(&self) -> usize {
        self.exts.len()
    }

    pub fn is_boundary(&self, p: u64) -> bool {
        p == 2
            || self.k.delta().unsigned_abs() % p == 0
            || self.exts.iter().any(|e| e.beta_norm() as u128 % p as u128 == 0)
    }

    pub fn classify(&self, p: u64) -> Result<Membership> {
        if !arith::is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(self.classify_prime(p))
    }

    fn classify_prime(&self, p: u64) -> Membership {
        if self.is_boundary(p) {
            return Membership::Boundary;
        }
        if self.k.splitting_unchecked(p) != SplitType::Split {
            return Membership::NonMember;
        }
        let r = arith::sqrt_mod(self.k.delta(), p).expect("split prime");
        let prime = PrimeOfK { p, kind: SplitType::Split, root: Some(r) };
        if self.all_nonsplit_at(&prime) {
            Membership::Member
        } else {
            Membership::NonMember
        }
    }

    fn all_nonsplit_at(&self, prime: &PrimeOfK) -> bool {
        self.exts.iter().all(|e| {
            [*e, e.conjugate()].iter().all(|f| {
                let b = f.generator_residue(prime).expect("non-boundary split prime");
                arith::legendre(b as i64, prime.p) == -1
            })
        })
    }

    /// Membership of `p` in `P`; boundary primes are rejected.
    pub fn in_p(&self, p: u64) -> Result<bool> {
        match self.classify(p)? {
            Membership::Boundary => Err(Error::BoundaryPrime(p)),
            m => Ok(m == Membership::Member),
        }
    }

    /// Membership decided at the given prime of `k` above `p`; agrees with
    /// [`in_p`](Self::in_p) whichever prime above `p` is used.
    pub fn in_p_at(&self, prime: &PrimeOfK) -> Result<bool> {
        if self.is_boundary(prime.p) {
            return Err(Error::BoundaryPrime(prime.p));
        }
        if prime.kind != SplitType::Split {
            return Ok(false);
        }
        for e in &self.exts {
            for f in [*e, e.conjugate()] {
                if f.splitting_in_l(prime)? == SplitType::Split {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Membership of every prime up to `limit`, evaluated once.
    pub fn membership_table(&self, limit: u64) -> MembershipTable {
        let primes = arith::prime_table(limit as usize);
        const CHUNK: usize = 1 << 15;
        let flags: Vec<bool> = primes
            .par_chunks(CHUNK)
            .enumerate()
            .flat_map_iter(|(c, chunk)| {
                let base = c * CHUNK;
                chunk
                    .iter()
                    .enumerate()
                    .map(move |(i, &is_p)| is_p && self.classify_prime((base + i) as u64) == Membership::Member)
                    .collect::<Vec<_>>()
            })
            .collect();
        MembershipTable { flags }
    }
}

/// A write-once table of which integers up to a limit are members of `P`.
#[derive(Debug, Clone)]
pub struct MembershipTable {
    flags: Vec<bool>,
}

impl MembershipTable {
    pub fn from_fn(limit: u64, member: impl Fn(u64) -> bool) -> Self {
        let primes = arith::prime_table(limit as usize);
        let flags = primes.iter().enumerate().map(|(i, &p)| p && member(i as u64)).collect();
        Self { flags }
    }

    pub fn limit(&self) -> u64 {
        self.flags.len() as u64 - 1
    }

    pub fn contains(&self, p: u64) -> bool {
        self.flags.get(p as usize).copied().unwrap_or(false)
    }

    pub fn members_up_to(&self, x: u64) -> Vec<u64> {
        let end = (x.min(self.limit()) + 1) as usize;
        self.flags[..end].iter().enumerate().filter_map(|(i, &m)| m.then_some(i as u64)).collect()
    }

    pub fn count_up_to(&self, x: u64) -> u64 {
        let end = (x.min(self.limit()) + 1) as usize;
        self.flags[..end].iter().filter(|&&m| m).count() as u64
    }
}

/// Powers of ten from 100 up to `x`, with `x` appended when it is not one.
pub fn decade_checkpoints(x: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut c = 100u64;
    while c <= x {
        out.push(c);
        match c.checked_mul(10) {
            Some(next) => c = next,
            None => break,
        }
    }
    if out.last() != Some(&x) && x >= 2 {
        out.push(x);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensityRow {
    pub x: u64,
    pub count: u64,
    /// `count * log(x) / x`, tending to `2^-(2n+1)`.
    pub ratio: f64,
}

pub fn prime_density_report(table: &MembershipTable, checkpoints: &[u64]) -> Result<Vec<DensityRow>> {
    if let Some(&bad) = checkpoints.iter().find(|&&c| c < 100 || c > table.limit()) {
        return Err(Error::InvalidArgument(format!("checkpoint {bad} outside [100, {}]", table.limit())));
    }
    Ok(checkpoints
        .iter()
        .map(|&x| {
            let count = table.count_up_to(x);
            DensityRow { x, count, ratio: count as f64 * (x as f64).ln() / x as f64 }
        })
        .collect())
}

/// `N(X)`: squarefree `d` in `[2, X]` composed of primes from `P`.
pub fn count_squarefree_over_p(pred: &PrimePredicate, x: u64, mode: CountMode) -> u64 {
    let table = pred.membership_table(x.max(2));
    count_squarefree(&table, x, mode)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeanValueFit {
    pub tau: f64,
    pub c: f64,
    /// `N(X) / (X (log X)^(tau - 1))` per checkpoint.
    pub ratios: Vec<f64>,
    /// `(ratio - c) / c` per checkpoint.
    pub residuals: Vec<f64>,
    /// Largest relative change between successive checkpoint ratios.
    pub max_successive_drift: f64,
}

/// Fits `N(X) ~ C X (log X)^(tau - 1)` by least squares on the normalized
/// ratios.
pub fn mean_value_fit(counts: &[(u64, u64)], tau: f64) -> Result<MeanValueFit> {
    if !(tau > 0.0 && tau <= 1.0) {
        return Err(Error::Precondition(format!("tau = {tau} is outside (0, 1]")));
    }
    if counts.len() < 3 {
        return Err(Error::InsufficientCheckpoints(format!("{} checkpoints, need 3", counts.len())));
    }
    let lo = counts.iter().map(|c| c.0).min().expect("nonempty");
    let hi = counts.iter().map(|c| c.0).max().expect("nonempty");
    if lo < 3 || hi < lo.saturating_mul(100) {
        return Err(Error::InsufficientCheckpoints(format!("[{lo}, {hi}] spans fewer than two decades")));
    }
    if let Some(&(x, n)) = counts.iter().find(|&&(x, n)| n > x) {
        return Err(Error::Precondition(format!("N({x}) = {n} exceeds {x}")));
    }
    let ratios: Vec<f64> = counts
        .iter()
        .map(|&(x, n)| {
            let xf = x as f64;
            n as f64 / (xf * xf.ln().powf(tau - 1.0))
        })
        .collect();
    let c = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let residuals = ratios.iter().map(|r| (r - c) / c).collect();
    let max_successive_drift = ratios
        .windows(2)
        .map(|w| ((w[1] - w[0]) / w[0]).abs())
        .fold(0.0, f64::max);
    Ok(MeanValueFit { tau, c, ratios, residuals, max_successive_drift })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlgebraCensus {
    /// Algebras with `|disc_f(B)| < x`.
    pub x: u128,
    pub algebras: Vec<QuatAlgK>,
    pub count: usize,
}

/// One division algebra per squarefree `d >= 2` supported on `P` with
/// `d^2 < x`, ramified at both primes above each `p | d`.
pub fn algebra_census(pred: &PrimePredicate, x: u128) -> Result<AlgebraCensus> {
    let bound = if x == 0 { 0 } else { num_integer::Roots::sqrt(&(x - 1)) };
    let bound = u64::try_from(bound).map_err(|_| Error::Overflow("algebra_census"))?;
    let table = pred.membership_table(bound.max(2));
    let algebras = squarefree::supported_squarefree(&table, bound)
        .into_iter()
        .map(|(_, factors)| QuatAlgK::from_split_pairs(pred.delta_k(), factors))
        .collect::<Result<Vec<_>>>()?;
    Ok(AlgebraCensus { x, count: algebras.len(), algebras })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WoodStats {
    pub count: u64,
    pub predicted: f64,
    /// `count / predicted`, absent when nothing is predicted.
    pub ratio: Option<f64>,
}

/// `(6 / pi^2) x (1/2) prod_l l / (2l + 2)`.
pub fn wood_prediction(constrained: &[u64], x: u64) -> f64 {
    let base = 6.0 / (PI * PI) * x as f64 * 0.5;
    constrained.iter().fold(base, |acc, &l| acc * l as f64 / (2.0 * l as f64 + 2.0))
}

/// Imaginary quadratic fields with `|delta| <= x` in which `q_split` splits
/// and every prime of `q_inert` is inert, against the independence model.
pub fn wood_stats(q_split: u64, q_inert: &[u64], x: u64) -> Result<WoodStats> {
    if x < 10_000 {
        return Err(Error::Precondition(format!("x = {x} is below 10^4")));
    }
    for &q in std::iter::once(&q_split).chain(q_inert) {
        if !arith::is_prime(q) {
            return Err(Error::NotPrime(q));
        }
    }
    for (i, q) in q_inert.iter().enumerate() {
        if q_inert[..i].contains(q) {
            return Err(Error::Precondition(format!("{q} listed twice")));
        }
    }
    if q_inert.contains(&q_split) {
        return Ok(WoodStats { count: 0, predicted: 0.0, ratio: None });
    }
    let count = quadfields::enumerate_fundamental_discriminants(x, Signature::Imaginary)
        .into_par_iter()
        .filter(|&d| {
            let k = QuadraticField::new(d).expect("fundamental");
            k.splitting_unchecked(q_split) == SplitType::Split
                && q_inert.iter().all(|&q| k.splitting_unchecked(q) == SplitType::Inert)
        })
        .count() as u64;
    let constrained: Vec<u64> = std::iter::once(q_split).chain(q_inert.iter().copied()).collect();
    let predicted = wood_prediction(&constrained, x);
    Ok(WoodStats { count, predicted, ratio: Some(count as f64 / predicted) })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RamificationCheck {
    pub ell: u64,
    pub total: u64,
    pub ramified: u64,
    pub fraction: f64,
    /// `fraction / (1 / (ell + 1))`.
    pub ratio: f64,
}

/// Fraction of fundamental discriminants `|delta| <= x` divisible by `ell`.
pub fn ramification_probability_check(ell: u64, x: u64) -> Result<RamificationCheck> {
    if !arith::is_prime(ell) {
        return Err(Error::NotPrime(ell));
    }
    if x < 10_000 {
        return Err(Error::Precondition(format!("x = {x} is below 10^4")));
    }
    let all = quadfields::enumerate_fundamental_discriminants(x, Signature::Both);
    let total = all.len() as u64;
    let ramified = all.iter().filter(|&&d| d.unsigned_abs() % ell == 0).count() as u64;
    let fraction = ramified as f64 / total as f64;
    Ok(RamificationCheck { ell, total, ramified, fraction, ratio: fraction * (ell as f64 + 1.0) })
}
