//! Covolumes of arithmetic Kleinian groups over imaginary quadratic fields,
//! coareas of arithmetic Fuchsian groups over `Q`, and the counting scaling
//! functions.
//!
//! `zeta(2) = pi^2 / 6` is used in closed form so the only truncated quantity
//! is `L(2, chi_delta)`.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::arith;
use crate::error::{Error, Result};
use crate::quadfields::QuadraticField;
use crate::quatalg::{QuatAlgK, QuatAlgQ};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LValue {
    pub value: f64,
    pub terms: u64,
    /// Proven bound on the neglected tail.
    pub tail_bound: f64,
}

/// `L(2, chi_delta) = sum chi_delta(n) / n^2` truncated after `N` terms.
///
/// Partial sums of `chi_delta` over any interval are bounded by `|delta|`, so
/// summation by parts bounds the tail by `|delta| / (N + 1)^2`; `N` is the
/// least integer making that at most `tol`.
pub fn dirichlet_l2(delta: i64, tol: f64) -> Result<LValue> {
    QuadraticField::new(delta)?;
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument(format!("tolerance {tol} must be positive")));
    }
    let modulus = delta.unsigned_abs();
    let terms = ((modulus as f64 / tol).sqrt().ceil() as u64).max(1);
    let chi: Vec<f64> = (0..modulus).map(|r| f64::from(arith::kronecker(delta, r.max(1)) * i8::from(r != 0 || modulus == 1))).collect();
    // Sum from the smallest terms upwards with compensation.
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for n in (1..=terms).rev() {
        let c = chi[(n % modulus) as usize];
        if c == 0.0 {
            continue;
        }
        let nf = n as f64;
        let y = c / (nf * nf) - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    Ok(LValue { value: sum, terms, tail_bound: modulus as f64 / ((terms + 1) as f64).powi(2) })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Covolume {
    pub value: f64,
    /// `prod (|p| - 1)` over the ramified primes.
    pub local_factor: u128,
    pub l_value: LValue,
}

/// `|delta|^(3/2) zeta_k(2) / (4 pi^2) prod_{p | disc_f(B)} (|p| - 1)`, with
/// `zeta_k(2) = (pi^2 / 6) L(2, chi_delta)`, to relative accuracy `tol`.
pub fn kleinian_covolume(b: &QuatAlgK, tol: f64) -> Result<Covolume> {
    if !b.is_division() {
        return Err(Error::Precondition("covolume of the matrix algebra is not modelled".into()));
    }
    let local_factor: u128 = b.ram_finite().iter().map(|q| q.norm() as u128 - 1).product();
    let abs_delta = b.delta_k().unsigned_abs() as f64;
    let prefactor = abs_delta.powf(1.5) / 24.0 * local_factor as f64;
    // L(2, chi) >= zeta(4) / zeta(2) > 0.6.
    let l_value = dirichlet_l2(b.delta_k(), 0.6 * tol)?;
    Ok(Covolume { value: prefactor * l_value.value, local_factor, l_value })
}

/// An exact rational multiple of `pi`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiMultiple(pub BigRational);

impl PiMultiple {
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().expect("finite rational") * PI
    }
}

impl std::fmt::Display for PiMultiple {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}pi", self.0.numer())
        } else {
            write!(f, "{}pi/{}", self.0.numer(), self.0.denom())
        }
    }
}

/// `(pi / 3) prod_{p in Ram_f(B)} (p - 1)`, the coarea of the norm-one group
/// of a maximal order in an indefinite division algebra over `Q`.
pub fn fuchsian_coarea(b: &QuatAlgQ) -> Result<PiMultiple> {
    if b.is_definite() {
        return Err(Error::Precondition("definite algebras give no Fuchsian group".into()));
    }
    if !b.is_division() {
        return Err(Error::Precondition("the matrix algebra gives a non-cocompact group".into()));
    }
    let product: BigInt = b.ram_finite().iter().map(|&p| BigInt::from(p - 1)).product();
    Ok(PiMultiple(BigRational::new(product, BigInt::from(3))))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scaling {
    /// `V^(1/2) / (log V)^(1 - 2^-(2n+1))`.
    SurfacesAndGeodesics,
    /// `V^(2/3)`; the `n^(-cn)` factor carries an unknown constant.
    NoncommensurableSurfaces,
}

pub fn theorem_scaling(n: u32, v: f64, which: Scaling) -> Result<f64> {
    if n == 0 || v.is_nan() || v <= std::f64::consts::E {
        return Err(Error::InvalidArgument(format!("need n >= 1 and V > e, got n = {n}, V = {v}")));
    }
    Ok(match which {
        Scaling::SurfacesAndGeodesics => {
            let exponent = 1.0 - 0.5f64.powi(2 * n as i32 + 1);
            v.sqrt() / v.ln().powf(exponent)
        }
        Scaling::NoncommensurableSurfaces => v.powf(2.0 / 3.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const CATALAN: f64 = 0.915_965_594_177_219_015_054_603_514_932_384_110_774;

    #[test]
    fn l_value_examples() {
        let l = dirichlet_l2(-4, 1e-10).unwrap();
        assert!((l.value - CATALAN).abs() < 1e-10);
        assert!(l.tail_bound <= 1e-10);
        assert!(dirichlet_l2(1, 1e-6).is_err());
        assert!(dirichlet_l2(-4, 0.0).is_err());
        let coarse = dirichlet_l2(-3, 1e-6).unwrap();
        let fine = dirichlet_l2(-3, 5e-7).unwrap();
        assert!((coarse.value - fine.value).abs() < 1e-6);
    }

    #[test]
    fn covolume_examples() {
        let b = QuatAlgK::from_split_pairs(-4, [5]).unwrap();
        let v = kleinian_covolume(&b, 1e-12).unwrap();
        let expected = 8.0 * (PI * PI / 6.0) * CATALAN / (4.0 * PI * PI) * 16.0;
        assert!((v.value - expected).abs() < 1e-10 * expected);
        assert!((v.value - 4.885).abs() < 1e-3);
        let b2 = QuatAlgK::from_split_pairs(-4, [5, 13]).unwrap();
        let v2 = kleinian_covolume(&b2, 1e-12).unwrap();
        assert_eq!(v2.local_factor, v.local_factor * 144);
        assert!((v2.value - 144.0 * v.value).abs() < 1e-8 * v2.value);
        assert!(kleinian_covolume(&QuatAlgK::new(-4, []).unwrap(), 1e-9).is_err());
    }

    #[test]
    fn coarea_examples() {
        let third = |n: i64| PiMultiple(BigRational::new(BigInt::from(n), BigInt::from(3)));
        assert_eq!(fuchsian_coarea(&QuatAlgQ::indefinite([2, 3]).unwrap()).unwrap(), third(2));
        assert_eq!(fuchsian_coarea(&QuatAlgQ::indefinite([3, 7]).unwrap()).unwrap(), third(12));
        assert_eq!(fuchsian_coarea(&QuatAlgQ::indefinite([3, 7]).unwrap()).unwrap().to_string(), "4pi");
        assert_eq!(fuchsian_coarea(&QuatAlgQ::indefinite([2, 3]).unwrap()).unwrap().to_string(), "2pi/3");
        assert!(fuchsian_coarea(&QuatAlgQ::indefinite([]).unwrap()).is_err());
        assert!(fuchsian_coarea(&QuatAlgQ::new([2], true).unwrap()).is_err());
    }

    #[test]
    fn scaling_examples() {
        let v = theorem_scaling(1, 1e6, Scaling::SurfacesAndGeodesics).unwrap();
        assert!((v - 1e3 * (1e6f64).ln().powf(-7.0 / 8.0)).abs() < 1e-9);
        let e2 = std::f64::consts::E.powi(2);
        let w = theorem_scaling(3, e2, Scaling::NoncommensurableSurfaces).unwrap();
        assert!((w - (4.0f64 / 3.0).exp()).abs() < 1e-12);
        assert!(theorem_scaling(0, 10.0, Scaling::NoncommensurableSurfaces).is_err());
        assert!(theorem_scaling(1, 2.0, Scaling::NoncommensurableSurfaces).is_err());
        let mut prev = 0.0;
        for k in 1..40 {
            let s = theorem_scaling(2, 10f64.powf(k as f64 / 2.0) + 3.0, Scaling::SurfacesAndGeodesics).unwrap();
            assert!(s > prev);
            prev = s;
        }
    }
}
