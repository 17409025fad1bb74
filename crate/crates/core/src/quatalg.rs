//! Quaternion algebras over `Q` and over imaginary quadratic fields, identified
//! with their ramification data.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::arith;
use crate::error::{Error, Result};
use crate::quadfields::{self, PrimeOfK, QuadraticField, Signature, SplitType};
use crate::relquad::RelQuadExt;

/// A quaternion algebra over `Q`: finite ramified primes plus whether the
/// real place ramifies (definite algebra).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct QuatAlgQ {
    ram_finite: BTreeSet<u64>,
    definite: bool,
}

impl QuatAlgQ {
    pub fn new(ram_finite: impl IntoIterator<Item = u64>, definite: bool) -> Result<Self> {
        let ram_finite: BTreeSet<u64> = ram_finite.into_iter().collect();
        if let Some(&p) = ram_finite.iter().find(|&&p| !arith::is_prime(p)) {
            return Err(Error::NotPrime(p));
        }
        if (ram_finite.len() + usize::from(definite)) % 2 != 0 {
            return Err(Error::InvalidArgument(format!(
                "ramification {ram_finite:?} (definite: {definite}) has odd cardinality"
            )));
        }
        Ok(Self { ram_finite, definite })
    }

    pub fn indefinite(ram_finite: impl IntoIterator<Item = u64>) -> Result<Self> {
        Self::new(ram_finite, false)
    }

    pub fn ram_finite(&self) -> &BTreeSet<u64> {
        &self.ram_finite
    }

    pub fn is_definite(&self) -> bool {
        self.definite
    }

    pub fn is_division(&self) -> bool {
        self.definite || !self.ram_finite.is_empty()
    }

    /// `disc_f(B)`, the product of the finite ramified primes.
    pub fn discriminant(&self) -> u128 {
        self.ram_finite.iter().map(|&p| p as u128).product()
    }

    pub fn is_isomorphic(&self, other: &QuatAlgQ) -> bool {
        self == other
    }

    /// Whether the quadratic field `l` embeds: no ramified place splits in `l`.
    pub fn embeds(&self, l: &QuadraticField) -> bool {
        if self.definite && !l.is_imaginary() {
            return false;
        }
        self.ram_finite.iter().all(|&p| l.splitting_unchecked(p) != SplitType::Split)
    }
}

/// A quaternion algebra over the imaginary quadratic field `Q(sqrt(delta_k))`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct QuatAlgK {
    delta_k: i64,
    ram_finite: BTreeSet<PrimeOfK>,
}

impl QuatAlgK {
    pub fn new(delta_k: i64, ram_finite: impl IntoIterator<Item = PrimeOfK>) -> Result<Self> {
        let k = QuadraticField::new(delta_k)?;
        if !k.is_imaginary() {
            return Err(Error::InvalidArgument(format!("{delta_k} is not negative")));
        }
        let ram_finite: BTreeSet<PrimeOfK> = ram_finite.into_iter().collect();
        for prime in &ram_finite {
            if !k.primes_above(prime.p)?.contains(prime) {
                return Err(Error::InvalidArgument(format!("{prime} is not a prime of {k}")));
            }
        }
        if ram_finite.len() % 2 != 0 {
            return Err(Error::InvalidArgument("odd number of ramified primes".into()));
        }
        Ok(Self { delta_k, ram_finite })
    }

    /// The algebra ramified at both primes above each of the split rational
    /// primes `pairs`.
    pub fn from_split_pairs(delta_k: i64, pairs: impl IntoIterator<Item = u64>) -> Result<Self> {
        let k = QuadraticField::new(delta_k)?;
        let mut ram = Vec::new();
        for p in pairs {
            let above = k.primes_above(p)?;
            if above.len() != 2 {
                return Err(Error::InvalidArgument(format!("{p} does not split in {k}")));
            }
            ram.extend(above);
        }
        Self::new(delta_k, ram)
    }

    pub fn delta_k(&self) -> i64 {
        self.delta_k
    }

    pub fn ram_finite(&self) -> &BTreeSet<PrimeOfK> {
        &self.ram_finite
    }

    pub fn is_division(&self) -> bool {
        !self.ram_finite.is_empty()
    }

    /// `|disc_f(B)|`, the product of the norms of the ramified primes.
    pub fn discriminant_norm(&self) -> u128 {
        self.ram_finite.iter().map(|q| q.norm() as u128).product()
    }

    pub fn is_isomorphic(&self, other: &QuatAlgK) -> Result<bool> {
        if self.delta_k != other.delta_k {
            return Err(Error::BaseFieldMismatch(self.delta_k, other.delta_k));
        }
        Ok(self.ram_finite == other.ram_finite)
    }

    /// Whether `ext` embeds: no ramified prime of `k` splits in it.
    pub fn embeds(&self, ext: &RelQuadExt) -> Result<bool> {
        if ext.delta_k() != self.delta_k {
            return Err(Error::BaseFieldMismatch(self.delta_k, ext.delta_k()));
        }
        for prime in &self.ram_finite {
            if ext.splitting_in_l(prime)? == SplitType::Split {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Whether the ramification consists of conjugate pairs over rational
    /// primes split in `k`, i.e. `disc(B) = p_1 ... p_r O_k`.
    pub fn fuchsian_admissible(&self) -> Admissibility {
        let mut pairing = Vec::new();
        let mut iter = self.ram_finite.iter().peekable();
        while let Some(first) = iter.next() {
            let partner = iter.next_if(|q| q.p == first.p);
            match partner {
                Some(second) if first.kind == SplitType::Split && second == &first.conjugate() => pairing.push(first.p),
                _ => return Admissibility { admissible: false, pairing: Vec::new() },
            }
        }
        Admissibility { admissible: true, pairing }
    }

    fn rational_primes_below(&self) -> BTreeSet<u64> {
        self.ram_finite.iter().map(|q| q.p).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Admissibility {
    pub admissible: bool,
    /// The rational primes `p_1, ..., p_r` when admissible.
    pub pairing: Vec<u64>,
}

/// `B+ (x) k` for an indefinite `B+` over `Q`: ramified exactly above the
/// primes of `Ram_f(B+)` that split in `k`.
pub fn base_change(b_plus: &QuatAlgQ, delta_k: i64) -> Result<QuatAlgK> {
    if b_plus.definite {
        return Err(Error::Precondition("base change needs an indefinite algebra".into()));
    }
    let k = QuadraticField::new(delta_k)?;
    let split = b_plus
        .ram_finite
        .iter()
        .copied()
        .filter(|&p| k.splitting_unchecked(p) == SplitType::Split);
    QuatAlgK::from_split_pairs(delta_k, split)
}

/// Result of the truncated recovery procedure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Recovery {
    pub recovered: BTreeSet<u64>,
    /// Number of discriminants `D` whose field entered the intersection.
    pub admissible_fields: usize,
}

/// Recovers the rational primes below `Ram_f(B)` from the quadratic fields
/// that are maximal subfields of some `B+` over `Q` with `B+ (x) k = B`.
///
/// A field `Q(sqrt(D))`, `0 < |D| <= d_bound`, is admissible when no ramified
/// rational prime splits in it and, if their count is odd, some auxiliary
/// prime `q <= prime_bound` that is nonsplit in `k` is also nonsplit in it.
/// The output is the set of primes `p <= prime_bound` nonsplit in every
/// admissible field.
pub fn recover_ramification(b: &QuatAlgK, d_bound: u64, prime_bound: u64) -> Result<Recovery> {
    let k = QuadraticField::new(b.delta_k)?;
    let ramified = b.rational_primes_below();
    let needs_auxiliary = ramified.len() % 2 == 1;
    let primes = arith::primes_up_to(prime_bound);
    let auxiliary: Vec<u64> = primes
        .iter()
        .copied()
        .filter(|&q| k.splitting_unchecked(q) != SplitType::Split)
        .collect();

    let discriminants = quadfields::enumerate_fundamental_discriminants(d_bound, Signature::Both);
    let admissible = |l: &QuadraticField| {
        ramified.iter().all(|&p| l.splitting_unchecked(p) != SplitType::Split)
            && (!needs_auxiliary || auxiliary.iter().any(|&q| l.splitting_unchecked(q) != SplitType::Split))
    };
    let full: Vec<bool> = vec![true; primes.len()];
    let (count, survivors) = discriminants
        .par_iter()
        .filter_map(|&d| {
            let l = QuadraticField::new(d).expect("enumerated discriminants are fundamental");
            admissible(&l).then(|| primes.iter().map(|&p| l.splitting_unchecked(p) != SplitType::Split).collect())
        })
        .map(|nonsplit: Vec<bool>| (1usize, nonsplit))
        .reduce(
            || (0, full.clone()),
            |(ca, a), (cb, b)| (ca + cb, a.iter().zip(&b).map(|(&x, &y)| x && y).collect()),
        );
    if count == 0 {
        return Err(Error::NoAdmissibleField { d_bound });
    }
    let recovered = primes.iter().zip(&survivors).filter_map(|(&p, &keep)| keep.then_some(p)).collect();
    Ok(Recovery { recovered, admissible_fields: count })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parity_is_enforced() {
        assert!(QuatAlgQ::indefinite([2, 3]).is_ok());
        assert!(QuatAlgQ::indefinite([2]).is_err());
        assert!(QuatAlgQ::new([2], true).is_ok());
        assert!(QuatAlgQ::indefinite([4, 3]).is_err());
        let k = QuadraticField::new(-4).unwrap();
        let five = k.primes_above(5).unwrap();
        assert!(QuatAlgK::new(-4, [five[0]]).is_err());
        assert!(QuatAlgK::new(-4, five.clone()).is_ok());
        let bogus = PrimeOfK { p: 7, kind: SplitType::Split, root: Some(1) };
        assert!(QuatAlgK::new(-4, [five[0], bogus]).is_err());
    }

    #[test]
    fn isomorphism_examples() {
        let a = QuatAlgQ::indefinite([2, 3]).unwrap();
        assert!(a.is_isomorphic(&QuatAlgQ::indefinite([3, 2]).unwrap()));
        assert!(!a.is_isomorphic(&QuatAlgQ::indefinite([2, 5]).unwrap()));
        let b1 = base_change(&QuatAlgQ::indefinite([5, 3]).unwrap(), -4).unwrap();
        let b2 = base_change(&QuatAlgQ::indefinite([5, 7]).unwrap(), -4).unwrap();
        assert!(b1.is_isomorphic(&b2).unwrap());
        let other = QuatAlgK::from_split_pairs(-3, [7]).unwrap();
        assert_eq!(b1.is_isomorphic(&other), Err(Error::BaseFieldMismatch(-4, -3)));
    }

    #[test]
    fn embedding_examples() {
        // Ram = {q, q_1} = {7, 3} is inert in Q(sqrt 5).
        let b = QuatAlgQ::indefinite([7, 3]).unwrap();
        assert!(b.embeds(&QuadraticField::new(5).unwrap()));
        let b = QuatAlgQ::indefinite([2, 3]).unwrap();
        assert!(!b.embeds(&QuadraticField::new(13).unwrap()));
        let definite = QuatAlgQ::new([2], true).unwrap();
        assert!(!definite.embeds(&QuadraticField::new(5).unwrap()));
        assert!(definite.embeds(&QuadraticField::new(-3).unwrap()));
        let matrix = QuatAlgK::new(-4, []).unwrap();
        assert!(matrix.embeds(&RelQuadExt::new(-4, 1).unwrap()).unwrap());
        assert!(matrix.embeds(&RelQuadExt::new(-4, 7).unwrap()).unwrap());
    }

    #[test]
    fn embedding_over_k_propagates_out_of_scope() {
        let k = QuadraticField::new(-4).unwrap();
        let pair = QuatAlgK::from_split_pairs(-4, [41]).unwrap();
        assert!(pair.embeds(&RelQuadExt::new(-4, 1).unwrap()).unwrap());
        let inert = k.primes_above(3).unwrap()[0];
        let ramified_two = k.primes_above(2).unwrap()[0];
        let b = QuatAlgK::new(-4, [inert, ramified_two]).unwrap();
        assert!(matches!(b.embeds(&RelQuadExt::new(-4, 1).unwrap()), Err(Error::OutOfScope { .. })));
    }

    #[test]
    fn base_change_examples() {
        let b = base_change(&QuatAlgQ::indefinite([5, 3]).unwrap(), -4).unwrap();
        assert_eq!(b.ram_finite().iter().map(|q| q.p).collect::<Vec<_>>(), vec![5, 5]);
        let b = base_change(&QuatAlgQ::indefinite([3, 7]).unwrap(), -4).unwrap();
        assert!(b.ram_finite().is_empty());
        let b = base_change(&QuatAlgQ::indefinite([]).unwrap(), -4).unwrap();
        assert!(!b.is_division());
        assert!(base_change(&QuatAlgQ::new([2], true).unwrap(), -4).is_err());
    }

    #[test]
    fn admissibility_examples() {
        let k = QuadraticField::new(-4).unwrap();
        let pair = QuatAlgK::from_split_pairs(-4, [5]).unwrap();
        assert_eq!(pair.fuchsian_admissible(), Admissibility { admissible: true, pairing: vec![5] });
        let mixed = QuatAlgK::new(-4, [k.primes_above(5).unwrap()[0], k.primes_above(13).unwrap()[0]]).unwrap();
        assert!(!mixed.fuchsian_admissible().admissible);
        let empty = QuatAlgK::new(-4, []).unwrap();
        assert_eq!(empty.fuchsian_admissible(), Admissibility { admissible: true, pairing: vec![] });
        let inert_pair = QuatAlgK::new(-4, [k.primes_above(3).unwrap()[0], k.primes_above(7).unwrap()[0]]).unwrap();
        assert!(!inert_pair.fuchsian_admissible().admissible);
    }

    #[test]
    fn recovery_examples() {
        let pair = QuatAlgK::from_split_pairs(-4, [5]).unwrap();
        let r = recover_ramification(&pair, 200, 100).unwrap();
        assert_eq!(r.recovered, BTreeSet::from([5]));
        let empty = QuatAlgK::new(-4, []).unwrap();
        assert!(recover_ramification(&empty, 200, 100).unwrap().recovered.is_empty());
        assert!(matches!(recover_ramification(&pair, 2, 100), Err(Error::NoAdmissibleField { .. })));
    }
}
