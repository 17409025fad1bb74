//! Relative quadratic extensions `L = k(sqrt(x + sqrt(delta)))` of an
//! imaginary quadratic field `k`.

use std::fmt;

use serde::Serialize;

use crate::arith::{self, reduce_i128};
use crate::error::{Error, Result};
use crate::quadfields::{PrimeOfK, QuadraticField, SplitType};

/// `L = k(sqrt(beta))` with `beta = x + sqrt(delta_k)`, or its complex
/// conjugate `L' = k(sqrt(x - sqrt(delta_k)))` when `conjugate` is set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct RelQuadExt {
    delta_k: i64,
    x: i64,
    conjugate: bool,
}

impl RelQuadExt {
    /// Builds the extension, rejecting shifts for which `beta` is already a
    /// square in `k` (so that `L` would collapse to `k`).
    pub fn new(delta_k: i64, x: i64) -> Result<Self> {
        let ext = Self::from_shift(delta_k, x)?;
        if ext.beta_is_square() {
            return Err(Error::Precondition(format!(
                "{x} + sqrt({delta_k}) is a square in k; the extension is trivial"
            )));
        }
        Ok(ext)
    }

    /// Builds the data without the non-square check. Only the arithmetic of
    /// `(delta_k, x)` is meaningful for degenerate shifts.
    pub fn from_shift(delta_k: i64, x: i64) -> Result<Self> {
        let k = QuadraticField::new(delta_k)?;
        if !k.is_imaginary() {
            return Err(Error::InvalidArgument(format!("base discriminant {delta_k} must be negative")));
        }
        if x.unsigned_abs() > 1 << 40 {
            return Err(Error::InvalidArgument(format!("shift {x} is too large")));
        }
        Ok(Self { delta_k, x, conjugate: false })
    }

    pub fn delta_k(&self) -> i64 {
        self.delta_k
    }

    pub fn x(&self) -> i64 {
        self.x
    }

    pub fn is_conjugate(&self) -> bool {
        self.conjugate
    }

    pub fn base_field(&self) -> QuadraticField {
        QuadraticField::new(self.delta_k).expect("validated on construction")
    }

    pub fn conjugate(&self) -> Self {
        Self { conjugate: !self.conjugate, ..*self }
    }

    /// `Norm_{k/Q}(beta) = x^2 - delta_k`, shared by `beta` and its conjugate.
    pub fn beta_norm(&self) -> i128 {
        let x = self.x as i128;
        x * x - self.delta_k as i128
    }

    /// An integral `beta = x + sqrt(delta)` is a square in `O_k` exactly when
    /// `beta = ((2 + sqrt(delta)) / 2)^2`, i.e. `delta = 4(x - 1)`.
    pub fn beta_is_square(&self) -> bool {
        self.delta_k as i128 == 4 * (self.x as i128 - 1)
    }

    pub fn minimal_polynomial(&self) -> QuarticPoly {
        let x = self.x as i128;
        QuarticPoly { coeffs: [1, 0, -2 * x, 0, self.beta_norm()] }
    }

    /// `disc(T^4 - 2x T^2 + (x^2 - delta)) = 256 (x^2 - delta) delta^2`.
    pub fn poly_discriminant(&self) -> i128 {
        let d = self.delta_k as i128;
        256 * self.beta_norm() * d * d
    }

    /// `256 (x^2 + |delta|) delta^2`, an upper bound for `|disc(L)|`.
    pub fn disc_upper_bound(&self) -> i128 {
        let d = self.delta_k as i128;
        let x = self.x as i128;
        256 * (x * x + d.abs()) * d * d
    }

    /// Residue of the generator (`beta`, or `beta'` for the conjugate field)
    /// modulo a degree-one prime, read off from `sqrt(delta) -> root`.
    pub fn generator_residue(&self, prime: &PrimeOfK) -> Result<u64> {
        self.check_prime(prime)?;
        let root = prime.root.expect("split primes carry a root") as i128;
        let signed = if self.conjugate { -root } else { root };
        Ok(reduce_i128(self.x as i128 + signed, prime.p))
    }

    fn check_prime(&self, prime: &PrimeOfK) -> Result<()> {
        let p = prime.p;
        if p == 2 {
            return Err(Error::OutOfScope { p, reason: "p = 2" });
        }
        if self.delta_k.unsigned_abs() % p == 0 {
            return Err(Error::OutOfScope { p, reason: "p divides the base discriminant" });
        }
        if prime.kind != SplitType::Split {
            return Err(Error::OutOfScope { p, reason: "prime of k is not of degree one" });
        }
        match prime.root {
            Some(r) if arith::mul_mod(r, r, p) == arith::reduce(self.delta_k, p) => Ok(()),
            _ => Err(Error::InvalidArgument(format!("{prime} is not a prime of Q(sqrt({}))", self.delta_k))),
        }
    }

    /// Decomposition of the degree-one prime `prime` of `k` in this extension.
    ///
    /// With `b` the residue of the generator: `b` a nonzero square gives
    /// `Split`, a nonsquare gives `Inert`. When `b = 0` the valuation `v` of the
    /// generator at the prime equals `v_p(x^2 - delta)`; odd `v` means
    /// `Ramified`, and for even `v` the unit part `m * beta'` (with
    /// `x^2 - delta = p^v m`) decides between `Split` and `Inert`.
    pub fn splitting_in_l(&self, prime: &PrimeOfK) -> Result<SplitType> {
        let p = prime.p;
        let b = self.generator_residue(prime)?;
        if b != 0 {
            return Ok(if arith::legendre(b as i64, p) == 1 { SplitType::Split } else { SplitType::Inert });
        }
        let norm = self.beta_norm() as u128;
        let v = arith::valuation(norm, p);
        if v % 2 == 1 {
            return Ok(SplitType::Ramified);
        }
        let unit = norm / (p as u128).pow(v);
        let other = self.conjugate().generator_residue(prime)?;
        let residue = arith::mul_mod((unit % p as u128) as u64, other, p);
        Ok(if arith::legendre(residue as i64, p) == 1 { SplitType::Split } else { SplitType::Inert })
    }

    /// Splitting of both primes of `k` above the split odd prime `p`, in
    /// ascending order of root.
    pub fn relative_ramification(&self, p: u64) -> Result<Vec<(PrimeOfK, SplitType)>> {
        let k = self.base_field();
        let primes = k.primes_above(p)?;
        if primes.len() != 2 {
            return Err(Error::OutOfScope { p, reason: "p is not split in k" });
        }
        primes.into_iter().map(|q| Ok((q, self.splitting_in_l(&q)?))).collect()
    }

    /// Whether `L/Q` is Galois: the biquadratic case (`x^2 - delta` a square)
    /// or the cyclic case (`delta (x^2 - delta)` a square).
    pub fn is_galois_over_q(&self) -> bool {
        let norm = self.beta_norm();
        arith::is_square_i128(norm) || arith::is_square_i128(self.delta_k as i128 * norm)
    }
}

impl fmt::Display for RelQuadExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.conjugate { '-' } else { '+' };
        write!(f, "k(sqrt({} {} sqrt({})))", self.x, sign, self.delta_k)
    }
}

/// A monic even quartic `T^4 + c2 T^2 + c4`, coefficients from the top.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct QuarticPoly {
    pub coeffs: [i128; 5],
}

impl QuarticPoly {
    pub fn eval_mod(&self, t: u64, p: u64) -> u64 {
        self.coeffs
            .iter()
            .fold(0u64, |acc, &c| (arith::mul_mod(acc, t, p) + reduce_i128(c, p)) % p)
    }
}

impl fmt::Display for QuarticPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("T^4")?;
        for (power, c) in [(3, self.coeffs[1]), (2, self.coeffs[2]), (1, self.coeffs[3]), (0, self.coeffs[4])] {
            if c == 0 {
                continue;
            }
            let sign = if c < 0 { '-' } else { '+' };
            let mag = c.unsigned_abs();
            match (power, mag) {
                (0, _) => write!(f, " {sign} {mag}")?,
                (1, 1) => write!(f, " {sign} T")?,
                (1, _) => write!(f, " {sign} {mag}T")?,
                (_, 1) => write!(f, " {sign} T^{power}")?,
                _ => write!(f, " {sign} {mag}T^{power}")?,
            }
        }
        Ok(())
    }
}

/// A prime of `k` ramified in one extension and unramified in all others.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RamificationWitness {
    /// Index of the extension; conjugate fields follow the originals.
    pub field: usize,
    pub conjugate: bool,
    pub prime: PrimeOfK,
}

/// Outcome of the compositum degree test.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum CompositumVerdict {
    /// Every `L_i` and `L_i'` has a private ramified prime, so the
    /// compositum has full degree `2^(2n)` over `k`.
    Full(Vec<RamificationWitness>),
    /// Some `L_i` equals its conjugate, so the degree is deficient.
    Deficient { field: usize },
    /// No witness was found below the search bound for `field`.
    Inconclusive { field: usize, search_bound: u64 },
}

impl CompositumVerdict {
    pub fn is_full(&self) -> bool {
        matches!(self, CompositumVerdict::Full(_))
    }
}

/// Checks `[L_1 ... L_n L_1' ... L_n' : k] = 2^(2n)` by exhibiting, for each
/// of the `2n` fields, a prime of `k` that ramifies in it and in no other.
pub fn compositum_degree_check(exts: &[RelQuadExt], search_bound: u64) -> Result<CompositumVerdict> {
    let Some(first) = exts.first() else {
        return Err(Error::Precondition("no extensions given".into()));
    };
    for (i, e) in exts.iter().enumerate() {
        if e.delta_k != first.delta_k {
            return Err(Error::Precondition("extensions over different base fields".into()));
        }
        if e.conjugate {
            return Err(Error::Precondition("conjugate-flagged extension in input".into()));
        }
        if e.beta_is_square() {
            return Err(Error::Precondition(format!("extension {i} is trivial")));
        }
        if exts[..i].iter().any(|o| o.x == e.x) {
            return Err(Error::Precondition(format!("duplicate field x = {}", e.x)));
        }
    }
    if let Some(i) = exts.iter().position(|e| e.is_galois_over_q()) {
        return Ok(CompositumVerdict::Deficient { field: i });
    }
    let fields: Vec<(usize, RelQuadExt)> = exts
        .iter()
        .enumerate()
        .flat_map(|(i, e)| [(i, *e), (i, e.conjugate())])
        .collect();
    let k = first.base_field();
    let mut witnesses = Vec::with_capacity(fields.len());
    for (slot, (i, target)) in fields.iter().enumerate() {
        let found = find_private_ramification(&k, &fields, slot, search_bound)?;
        match found {
            Some(prime) => witnesses.push(RamificationWitness { field: *i, conjugate: target.conjugate, prime }),
            None => return Ok(CompositumVerdict::Inconclusive { field: *i, search_bound }),
        }
    }
    Ok(CompositumVerdict::Full(witnesses))
}

fn find_private_ramification(
    k: &QuadraticField,
    fields: &[(usize, RelQuadExt)],
    slot: usize,
    search_bound: u64,
) -> Result<Option<PrimeOfK>> {
    let target = fields[slot].1;
    let mut p = 2;
    while p < search_bound {
        p = arith::next_prime(p);
        if p > search_bound || k.delta().unsigned_abs() % p == 0 || k.splitting_unchecked(p) != SplitType::Split {
            continue;
        }
        for prime in k.primes_above(p)? {
            if target.splitting_in_l(&prime)? != SplitType::Ramified {
                continue;
            }
            let mut private = true;
            for (other_slot, (_, other)) in fields.iter().enumerate() {
                if other_slot != slot && other.splitting_in_l(&prime)? == SplitType::Ramified {
                    private = false;
                    break;
                }
            }
            if private {
                return Ok(Some(prime));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ext(d: i64, x: i64) -> RelQuadExt {
        RelQuadExt::new(d, x).unwrap()
    }

    fn prime(p: u64, root: u64) -> PrimeOfK {
        PrimeOfK { p, kind: SplitType::Split, root: Some(root) }
    }

    #[test]
    fn minimal_polynomial_examples() {
        assert_eq!(ext(-4, 1).minimal_polynomial().coeffs, [1, 0, -2, 0, 5]);
        assert_eq!(ext(-4, 3).minimal_polynomial().coeffs, [1, 0, -6, 0, 13]);
        assert_eq!(ext(-3, 0).minimal_polynomial().coeffs, [1, 0, 0, 0, 3]);
        assert_eq!(ext(-4, 1).minimal_polynomial().to_string(), "T^4 - 2T^2 + 5");
        assert_eq!(ext(-3, 0).minimal_polynomial().to_string(), "T^4 + 3");
        let e = ext(-7, 5);
        assert_eq!(e.minimal_polynomial(), e.conjugate().minimal_polynomial());
    }

    #[test]
    fn discriminant_examples() {
        assert_eq!(ext(-4, 1).poly_discriminant(), 20480);
        assert_eq!(ext(-4, 3).poly_discriminant(), 53248);
        assert_eq!(ext(-3, 0).poly_discriminant(), 6912);
        assert_eq!(ext(-4, 1).disc_upper_bound(), 20480);
        assert_eq!(ext(-4, 3).disc_upper_bound(), 53248);
        assert_eq!(ext(-3, 0).disc_upper_bound(), 6912);
    }

    #[test]
    fn square_generators_rejected() {
        assert!(RelQuadExt::new(-4, 0).is_err());
        assert!(RelQuadExt::new(-8, -1).is_err());
        assert!(RelQuadExt::new(5, 1).is_err());
        assert!(RelQuadExt::new(-5, 1).is_err());
        assert!(RelQuadExt::from_shift(-4, 0).unwrap().beta_is_square());
    }

    #[test]
    fn splitting_in_l_examples() {
        let e = ext(-4, 1);
        // sqrt(-4) = 2i; i -> 2 mod 5 gives 2i -> 4 and beta -> 0.
        assert_eq!(e.splitting_in_l(&prime(5, 4)).unwrap(), SplitType::Ramified);
        // i -> 8 mod 13: 2i -> 3, beta -> 4 = 2^2.
        assert_eq!(e.splitting_in_l(&prime(13, 3)).unwrap(), SplitType::Split);
        // i -> 5 mod 13: 2i -> 10, beta -> 11.
        assert_eq!(e.splitting_in_l(&prime(13, 10)).unwrap(), SplitType::Inert);
    }

    #[test]
    fn splitting_in_l_rejects_excluded_primes() {
        let e = ext(-4, 1);
        let inert = PrimeOfK { p: 3, kind: SplitType::Inert, root: None };
        assert!(matches!(e.splitting_in_l(&inert), Err(Error::OutOfScope { .. })));
        let two = PrimeOfK { p: 2, kind: SplitType::Ramified, root: Some(0) };
        assert!(matches!(e.splitting_in_l(&two), Err(Error::OutOfScope { .. })));
        let e3 = ext(-3, 1);
        let three = PrimeOfK { p: 3, kind: SplitType::Ramified, root: Some(0) };
        assert!(matches!(e3.splitting_in_l(&three), Err(Error::OutOfScope { .. })));
        assert!(matches!(e.splitting_in_l(&prime(13, 4)), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn even_valuation_is_decided() {
        // 11^2 + 4 = 125 = 5^3: odd valuation ramifies.
        let rr = ext(-4, 11).relative_ramification(5).unwrap();
        assert!(rr.iter().any(|(_, t)| *t == SplitType::Ramified));
        // Even valuations never ramify, and at least one such case occurs.
        let mut checked = 0;
        for x in 1..2_000i64 {
            let e = ext(-4, x);
            let norm = e.beta_norm() as u128;
            for p in [5u64, 13, 17, 29] {
                if arith::valuation(norm, p) == 2 {
                    let rr = e.relative_ramification(p).unwrap();
                    assert!(rr.iter().all(|(_, t)| *t != SplitType::Ramified));
                    checked += 1;
                }
            }
        }
        assert!(checked > 0);
    }

    #[test]
    fn relative_ramification_examples() {
        let e = ext(-4, 1);
        let five = e.relative_ramification(5).unwrap();
        assert_eq!(five.iter().filter(|(_, t)| *t == SplitType::Ramified).count(), 1);
        let forty_one = e.relative_ramification(41).unwrap();
        assert!(forty_one.iter().all(|(_, t)| *t == SplitType::Inert));
        let thirteen = e.relative_ramification(13).unwrap();
        let kinds: Vec<_> = thirteen.iter().map(|(_, t)| *t).collect();
        assert_eq!(kinds, vec![SplitType::Split, SplitType::Inert]);
        assert!(e.relative_ramification(3).is_err());
    }

    #[test]
    fn galois_examples() {
        assert!(!ext(-4, 1).is_galois_over_q());
        assert!(!ext(-4, 3).is_galois_over_q());
        assert!(RelQuadExt::from_shift(-4, 0).unwrap().is_galois_over_q());
    }

    #[test]
    fn compositum_examples() {
        let verdict = compositum_degree_check(&[ext(-4, 1), ext(-4, 3)], 100).unwrap();
        let CompositumVerdict::Full(w) = verdict else { panic!("expected full degree") };
        let ps: Vec<u64> = w.iter().map(|w| w.prime.p).collect();
        assert_eq!(ps, vec![5, 5, 13, 13]);
        let single = compositum_degree_check(&[ext(-4, 1)], 100).unwrap();
        let CompositumVerdict::Full(w) = single else { panic!("expected full degree") };
        assert_eq!(w[0].prime.p, 5);
        assert!(matches!(
            compositum_degree_check(&[ext(-4, 1), ext(-4, 1)], 100),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            compositum_degree_check(&[ext(-4, 1)], 4).unwrap(),
            CompositumVerdict::Inconclusive { field: 0, .. }
        ));
        assert!(compositum_degree_check(&[ext(-4, 1).conjugate()], 100).is_err());
    }
}
