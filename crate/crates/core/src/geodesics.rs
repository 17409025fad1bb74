//! Traces, translation lengths, fundamental units of real quadratic fields,
//! and norm-one units of the quartic fields `L = k(sqrt(x + sqrt(delta)))`.

use std::f64::consts::PI;

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_integer::Roots;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith;
use crate::error::{Error, Result};
use crate::quadfields::is_fundamental_discriminant;
use crate::relquad::RelQuadExt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TraceClass {
    Elliptic,
    Parabolic,
    /// Loxodromic with non-real trace.
    LoxodromicNonHyperbolic,
    /// Real trace of absolute value above 2.
    Hyperbolic,
}

pub fn classify_trace(t: Complex64) -> TraceClass {
    if t.im != 0.0 {
        TraceClass::LoxodromicNonHyperbolic
    } else if t.re.abs() > 2.0 {
        TraceClass::Hyperbolic
    } else if t.re.abs() == 2.0 {
        TraceClass::Parabolic
    } else {
        TraceClass::Elliptic
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeodesicLength {
    pub length: f64,
    /// Rotation angle in `(-pi, pi]`; zero for hyperbolic elements.
    pub holonomy: f64,
}

fn reduce_angle(theta: f64) -> f64 {
    let mut a = theta.rem_euclid(2.0 * PI);
    if a > PI {
        a -= 2.0 * PI;
    }
    a
}

/// Length and holonomy from the eigenvalue `lambda`, `|lambda| > 1`, of
/// `z^2 - t z + 1`: `length = 2 log|lambda|`, `holonomy = 2 arg(lambda)`.
pub fn length_from_trace(t: Complex64) -> Result<GeodesicLength> {
    let class = classify_trace(t);
    if !t.re.is_finite() || !t.im.is_finite() {
        return Err(Error::InvalidArgument(format!("trace {t} is not finite")));
    }
    if matches!(class, TraceClass::Elliptic | TraceClass::Parabolic) {
        return Err(Error::Precondition(format!("trace {t} is {class:?}, not loxodromic")));
    }
    let disc = (t * t - 4.0).sqrt();
    // Pick the sign that avoids cancellation; this is the larger root.
    let s = if (t.conj() * disc).re >= 0.0 { disc } else { -disc };
    let lambda = (t + s) / 2.0;
    let holonomy = if class == TraceClass::Hyperbolic { 0.0 } else { reduce_angle(2.0 * lambda.arg()) };
    Ok(GeodesicLength { length: 2.0 * lambda.norm().ln(), holonomy })
}

/// `tr(gamma^2) = tr(gamma)^2 - 2`.
pub fn square_trace(t: Complex64) -> Complex64 {
    t * t - 2.0
}

/// Whether the flag "no power of the eigenvalue is real" holds, which keeps
/// the associated geodesic off every totally geodesic surface. Holds exactly
/// when `L / Q` is not Galois.
pub fn surface_obstruction(ext: &RelQuadExt) -> bool {
    !ext.is_galois_over_q()
}

/// The fundamental unit `(a + b sqrt(d)) / 2 > 1` of the order of
/// discriminant `d`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RealQuadraticUnit {
    pub d: u64,
    #[serde(serialize_with = "serialize_display")]
    pub a: BigInt,
    #[serde(serialize_with = "serialize_display")]
    pub b: BigInt,
    pub norm: i8,
    /// Period length of the continued fraction.
    pub period: usize,
}

fn serialize_display<S: serde::Serializer>(v: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

impl RealQuadraticUnit {
    /// `a^2 - d b^2`, which is `4 * norm`.
    pub fn pell_value(&self) -> BigInt {
        &self.a * &self.a - BigInt::from(self.d) * &self.b * &self.b
    }

    /// `log(epsilon)`, the regulator.
    pub fn ln(&self) -> f64 {
        let shift = self.b.bits().saturating_sub(60);
        let a = (&self.a >> shift).to_f64().expect("finite");
        let b = (&self.b >> shift).to_f64().expect("finite");
        (a + b * (self.d as f64).sqrt()).ln() + shift as f64 * std::f64::consts::LN_2 - std::f64::consts::LN_2
    }
}

/// Expands the reduced quadratic irrational `alpha = (p0 + sqrt(radicand)) / q0`
/// over one period and returns `(q_{l-1}, q_{l-2}, l)`, so that
/// `q_{l-1} alpha + q_{l-2}` is the fundamental unit of its multiplier ring.
fn periodic_convergents(radicand: u64, p0: i64, q0: i64) -> (BigInt, BigInt, usize) {
    let root = radicand.sqrt() as i64;
    let (mut p, mut q) = (p0, q0);
    let (mut prev, mut cur) = (BigInt::one(), BigInt::zero());
    let mut period = 0;
    loop {
        let a = (p + root) / q;
        let next = &cur * a + &prev;
        prev = cur;
        cur = next;
        period += 1;
        p = a * q - p;
        q = (radicand as i64 - p * p) / q;
        if (p, q) == (p0, q0) {
            return (cur, prev, period);
        }
    }
}

pub fn fundamental_unit(d: u64) -> Result<RealQuadraticUnit> {
    if d > i64::MAX as u64 || !is_fundamental_discriminant(d as i64) || d < 5 {
        return Err(Error::NotFundamental(d as i64));
    }
    let (a, b, period) = if d % 4 == 1 {
        let mut p0 = d.sqrt() as i64;
        if p0 % 2 == 0 {
            p0 -= 1;
        }
        let (ql, ql2, period) = periodic_convergents(d, p0, 2);
        (&ql * p0 + &ql2 * 2, ql, period)
    } else {
        let n = d / 4;
        let a0 = n.sqrt() as i64;
        let (ql, ql2, period) = periodic_convergents(n, a0, 1);
        ((&ql * a0 + ql2) * 2, ql, period)
    };
    let norm = if period % 2 == 0 { 1 } else { -1 };
    Ok(RealQuadraticUnit { d, a, b, norm, period })
}

/// Length of the closed geodesic from the unit of norm one: `2 log(eps+)`
/// with `eps+ = eps` or `eps^2` when `eps` has norm `-1`.
pub fn geodesic_length_real_quadratic(d: u64) -> Result<GeodesicLength> {
    let unit = fundamental_unit(d)?;
    let factor = if unit.norm == 1 { 2.0 } else { 4.0 };
    Ok(GeodesicLength { length: factor * unit.ln(), holonomy: 0.0 })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HeightLengthBounds {
    #[serde(serialize_with = "serialize_big")]
    pub height_bound: BigUint,
    #[serde(serialize_with = "serialize_big")]
    pub length_bound: BigUint,
}

fn serialize_big<S: serde::Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

impl HeightLengthBounds {
    /// `length_bound / n^16`.
    pub fn length_ratio_to_n16(&self, n: u32) -> f64 {
        self.length_bound.to_f64().unwrap_or(f64::INFINITY) / (n as f64).powi(16)
    }
}

/// `(2^44 3^4 D^2, 2^47 3^4 D^2)` for `D = |disc(L)|`.
pub fn height_and_length_bounds(abs_disc_l: u128) -> Result<HeightLengthBounds> {
    if abs_disc_l == 0 {
        return Err(Error::InvalidArgument("discriminant must be at least 1".into()));
    }
    let d2 = BigUint::from(abs_disc_l).pow(2u32);
    let base = BigUint::from(81u32) * d2;
    Ok(HeightLengthBounds { height_bound: &base << 44u32, length_bound: base << 47u32 })
}

/// An element `c0 + c1 T + c2 T^2 + c3 T^3` of `Z[T] / (f)`, `f` the quartic
/// minimal polynomial of the extension.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuarticUnit {
    pub coeffs: [i64; 4],
    /// Absolute logarithmic Weil height.
    pub height: f64,
}

/// Arithmetic in `Z[T] / (T^4 - 2x T^2 + N)`.
#[derive(Debug, Clone)]
pub struct EquationOrder {
    x: BigInt,
    n: BigInt,
}

impl EquationOrder {
    pub fn new(ext: &RelQuadExt) -> Self {
        Self { x: BigInt::from(ext.x()), n: BigInt::from(ext.beta_norm()) }
    }

    pub fn mul(&self, u: &[BigInt; 4], v: &[BigInt; 4]) -> [BigInt; 4] {
        let mut prod: Vec<BigInt> = vec![BigInt::zero(); 7];
        for i in 0..4 {
            for j in 0..4 {
                prod[i + j] += &u[i] * &v[j];
            }
        }
        // T^4 = 2x T^2 - N.
        for deg in (4..7).rev() {
            let c = std::mem::take(&mut prod[deg]);
            prod[deg - 2] += &c * &self.x * 2;
            prod[deg - 4] -= c * &self.n;
        }
        [prod[0].clone(), prod[1].clone(), prod[2].clone(), prod[3].clone()]
    }

    pub fn pow(&self, u: &[BigInt; 4], e: u32) -> [BigInt; 4] {
        let mut acc = [BigInt::one(), BigInt::zero(), BigInt::zero(), BigInt::zero()];
        for _ in 0..e {
            acc = self.mul(&acc, u);
        }
        acc
    }

    /// Elements of `k` are exactly those with vanishing odd coefficients.
    pub fn lies_in_base(u: &[BigInt; 4]) -> bool {
        u[1].is_zero() && u[3].is_zero()
    }
}

fn big4(c: [i64; 4]) -> [BigInt; 4] {
    c.map(BigInt::from)
}

/// The four complex roots of `T^4 - 2x T^2 + (x^2 - delta)`.
pub fn quartic_roots(ext: &RelQuadExt) -> [Complex64; 4] {
    let s = Complex64::new(ext.delta_k() as f64, 0.0).sqrt();
    let x = Complex64::new(ext.x() as f64, 0.0);
    let r1 = (x + s).sqrt();
    let r2 = (x - s).sqrt();
    [r1, -r1, r2, -r2]
}

fn conjugates(ext: &RelQuadExt, c: [i64; 4]) -> [Complex64; 4] {
    quartic_roots(ext).map(|t| {
        c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &ci| acc * t + ci as f64)
    })
}

pub fn weil_height(ext: &RelQuadExt, c: [i64; 4]) -> f64 {
    conjugates(ext, c).iter().map(|z| z.norm().ln().max(0.0)).sum::<f64>() / 4.0
}

/// Roots of unity in a quartic field have order dividing one of these.
const ROOT_OF_UNITY_ORDERS: [u32; 9] = [1, 2, 3, 4, 5, 6, 8, 10, 12];

pub fn is_root_of_unity(ext: &RelQuadExt, c: [i64; 4]) -> bool {
    if conjugates(ext, c).iter().any(|z| (z.norm() - 1.0).abs() > 1e-9) {
        return false;
    }
    let order = EquationOrder::new(ext);
    let u = big4(c);
    let one = big4([1, 0, 0, 0]);
    ROOT_OF_UNITY_ORDERS.iter().any(|&m| order.pow(&u, m) == one)
}

/// Gaussian-style integers `a + b sqrt(delta)` used by the search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct RootPair {
    a: i128,
    b: i128,
}

impl RootPair {
    fn mul(self, o: RootPair, delta: i128) -> Option<RootPair> {
        Some(RootPair {
            a: self.a.checked_mul(o.a)?.checked_add(self.b.checked_mul(o.b)?.checked_mul(delta)?)?,
            b: self.a.checked_mul(o.b)?.checked_add(self.b.checked_mul(o.a)?)?,
        })
    }
}

/// All `A = a + b sqrt(delta)` with `A^2 = g`.
fn sqrt_in_order(g: RootPair, delta: i128) -> Vec<RootPair> {
    // a^2 + delta b^2 = m, a^2 - delta b^2 = sqrt(Norm g), 2ab = n.
    let Some(norm) = g.a.checked_mul(g.a).and_then(|m2| g.b.checked_mul(g.b)?.checked_mul(delta).map(|v| m2 - v)) else {
        return Vec::new();
    };
    if norm < 0 || !arith::is_square_i128(norm) {
        return Vec::new();
    }
    let s = (norm as u128).sqrt() as i128;
    let (a2_twice, db2_twice) = (g.a + s, g.a - s);
    if a2_twice % 2 != 0 || db2_twice % 2 != 0 || (db2_twice / 2) % delta != 0 {
        return Vec::new();
    }
    let (a2, b2) = (a2_twice / 2, (db2_twice / 2) / delta);
    if !arith::is_square_i128(a2) || !arith::is_square_i128(b2) {
        return Vec::new();
    }
    let (a, b) = ((a2 as u128).sqrt() as i128, (b2 as u128).sqrt() as i128);
    let mut out = Vec::new();
    for (sa, sb) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
        let cand = RootPair { a: sa * a, b: sb * b };
        if 2 * cand.a * cand.b == g.b && !out.contains(&cand) {
            out.push(cand);
        }
    }
    out
}

/// Searches `|c_i| <= cap` for a unit `u` of `Z[T]/(f)` with
/// `Norm_{L/k}(u) = 1` that is not a root of unity. Writing `u = A + B T` with
/// `A, B` in `Z[sqrt(delta)]`, the relative norm is `A^2 - B^2 beta`, so each
/// `B` in the box determines `A` by a square root in `Z[sqrt(delta)]`.
///
/// Among solutions the one with the least `max |c_i|` wins, ties broken
/// lexicographically. `None` means nothing was found inside the box, which
/// does not rule out units outside it.
pub fn norm_one_unit_search(ext: &RelQuadExt, cap: u64) -> Option<QuarticUnit> {
    let cap = cap.min(1 << 20) as i64;
    let delta = ext.delta_k() as i128;
    let x = ext.x() as i128;
    let beta = RootPair { a: x, b: 1 };
    let mut best: Option<(i64, [i64; 4])> = None;
    for c1 in -cap..=cap {
        for c3 in -cap..=cap {
            if c1 == 0 && c3 == 0 {
                continue;
            }
            let bound_so_far = best.map_or(cap, |(m, _)| m);
            if c1.abs().max(c3.abs()) > bound_so_far {
                continue;
            }
            let b = RootPair { a: c1 as i128 + c3 as i128 * x, b: c3 as i128 };
            let Some(rhs) = b.mul(b, delta).and_then(|b2| b2.mul(beta, delta)) else { continue };
            let target = RootPair { a: rhs.a + 1, b: rhs.b };
            for a in sqrt_in_order(target, delta) {
                let c2 = a.b;
                let c0 = a.a - a.b * x;
                let (Ok(c0), Ok(c2)) = (i64::try_from(c0), i64::try_from(c2)) else { continue };
                let coeffs = [c0, c1, c2, c3];
                let size = coeffs.iter().map(|c| c.abs()).max().expect("four entries");
                if size > cap || is_root_of_unity(ext, coeffs) {
                    continue;
                }
                let better = match best {
                    None => true,
                    Some((m, bc)) => (size, coeffs) < (m, bc),
                };
                if better {
                    best = Some((size, coeffs));
                }
            }
        }
    }
    best.map(|(_, coeffs)| QuarticUnit { coeffs, height: weil_height(ext, coeffs) })
}
