//! Exact arithmetic in the cyclotomic field `K_n = Q(zeta_n)`, its ring
//! of integers `O_n = Z[zeta_n]`, Galois automorphisms and the star map.

mod interval;
mod poly;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::{rat_int, Rat};

pub use interval::{pi_interval, ComplexInterval, Interval};
pub use poly::{cyclotomic_polynomial, phi, CycPoly};

use poly::{rat_poly_modular_inverse, rat_poly_rem, rat_poly_trim};

#[derive(Debug, Error)]
pub enum CycError {
    #[error("mismatched cyclotomic index: {0} vs {1}")]
    MismatchedIndex(u32, u32),
    #[error("division by zero")]
    DivisionByZero,
    #[error("exponent {a} is not coprime to {n}")]
    NotCoprime { a: u32, n: u32 },
    #[error("value is not real")]
    NotReal,
    #[error("invalid star map for n = {n}: {reason}")]
    InvalidStarMap { n: u32, reason: String },
    #[error("{0}")]
    Invalid(String),
}

/// An element of `Q(zeta_n)` over the power basis
/// `{1, zeta, ..., zeta^(phi(n)-1)}`: always exactly `phi(n)` rational
/// coefficients, eagerly reduced, so equality is coefficient equality.
///
/// Serializes as `{n, coeffs}` with each coefficient an exact `"p/q"`
/// string (or `"p"` for integers).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "CycNumRepr", into = "CycNumRepr")]
pub struct CycNum {
    n: u32,
    coeffs: Vec<Rat>,
}

#[derive(Serialize, Deserialize)]
struct CycNumRepr {
    n: u32,
    coeffs: Vec<String>,
}

impl From<CycNum> for CycNumRepr {
    fn from(x: CycNum) -> Self {
        CycNumRepr {
            n: x.n,
            coeffs: x.coeffs.iter().map(|c| c.to_string()).collect(),
        }
    }
}

impl TryFrom<CycNumRepr> for CycNum {
    type Error = String;
    fn try_from(r: CycNumRepr) -> Result<Self, Self::Error> {
        if r.n < 1 {
            return Err("n must be >= 1".into());
        }
        if r.coeffs.len() != phi(r.n) as usize {
            return Err(format!(
                "expected {} coefficients for n = {}, got {}",
                phi(r.n),
                r.n,
                r.coeffs.len()
            ));
        }
        let coeffs = r
            .coeffs
            .iter()
            .map(|s| s.parse::<Rat>().map_err(|e| format!("bad rational {s:?}: {e}")))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(CycNum { n: r.n, coeffs })
    }
}

impl fmt::Debug for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycNum(n={}; {})", self.n, self.to_string_form())
    }
}

impl CycNum {
    pub fn zero(n: u32) -> Self {
        assert!(n >= 1);
        CycNum {
            n,
            coeffs: vec![Rat::zero(); phi(n) as usize],
        }
    }

    pub fn one(n: u32) -> Self {
        Self::from_rational(n, Rat::one())
    }

    pub fn from_rational(n: u32, q: Rat) -> Self {
        let mut z = Self::zero(n);
        z.coeffs[0] = q;
        z
    }

    pub fn from_integer(n: u32, v: i64) -> Self {
        Self::from_rational(n, rat_int(v))
    }

    /// `zeta_n`.
    pub fn root(n: u32) -> Self {
        Self::root_power(n, 1)
    }

    /// `zeta_n^k` (k may be any integer; reduced mod n).
    pub fn root_power(n: u32, k: i64) -> Self {
        let k = k.rem_euclid(n as i64) as usize;
        let mut coeffs = vec![Rat::zero(); k + 1];
        coeffs[k] = Rat::one();
        Self::from_poly(n, coeffs)
    }

    /// Build from a rational-coefficient polynomial in `zeta_n`
    /// (arbitrary degree; reduced mod `F_n`).
    pub fn from_poly(n: u32, coeffs: Vec<Rat>) -> Self {
        let f = cyclotomic_polynomial(n);
        let mut c = rat_poly_rem(coeffs, &f);
        c.resize(phi(n) as usize, Rat::zero());
        CycNum { n, coeffs: c }
    }

    pub fn from_int_coeffs(n: u32, coeffs: &[i64]) -> Self {
        Self::from_poly(n, coeffs.iter().map(|&v| rat_int(v)).collect())
    }

    pub fn index(&self) -> u32 {
        self.n
    }

    /// The canonical coefficient vector (length `phi(n)`).
    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(|c| c.is_zero())
    }

    /// Rational value if the element lies in Q.
    pub fn as_rational(&self) -> Option<&Rat> {
        if self.coeffs[1..].iter().all(|c| c.is_zero()) {
            Some(&self.coeffs[0])
        } else {
            None
        }
    }

    fn assert_same(&self, other: &CycNum) {
        assert_eq!(
            self.n, other.n,
            "mismatched cyclotomic index {} vs {}",
            self.n, other.n
        );
    }

    pub fn checked_add(&self, other: &CycNum) -> Result<CycNum, CycError> {
        if self.n != other.n {
            return Err(CycError::MismatchedIndex(self.n, other.n));
        }
        Ok(self + other)
    }

    pub fn scale(&self, f: &Rat) -> CycNum {
        CycNum {
            n: self.n,
            coeffs: self.coeffs.iter().map(|c| c * f).collect(),
        }
    }

    /// Multiplicative inverse via extended Euclid against `F_n`.
    pub fn inverse(&self) -> Result<CycNum, CycError> {
        if self.is_zero() {
            return Err(CycError::DivisionByZero);
        }
        let f = cyclotomic_polynomial(self.n);
        let mut a = self.coeffs.clone();
        rat_poly_trim(&mut a);
        let u = rat_poly_modular_inverse(&a, &f).ok_or(CycError::DivisionByZero)?;
        Ok(CycNum::from_poly(self.n, u))
    }

    pub fn div(&self, other: &CycNum) -> Result<CycNum, CycError> {
        Ok(self * &other.inverse()?)
    }

    /// Complex conjugation, realized as the Galois map `a = n - 1`.
    pub fn conjugate(&self) -> CycNum {
        if self.n <= 2 {
            return self.clone();
        }
        GaloisMap::new(self.n, self.n - 1).unwrap().apply(self)
    }

    /// True iff the element is fixed by complex conjugation.
    pub fn is_real(&self) -> bool {
        self.conjugate() == *self
    }

    /// Integrality criterion: membership in `O_n` is integrality of every
    /// power-basis coefficient.
    pub fn is_in_ring(&self) -> bool {
        self.coeffs.iter().all(|c| c.denom().is_one())
    }

    /// Decompose `x = a + b*zeta_n` with `a`, `b` in the real subfield.
    pub fn split_real_imag_basis(&self) -> (CycNum, CycNum) {
        assert!(self.n >= 3, "split requires n >= 3");
        let zeta = CycNum::root(self.n);
        let zinv = CycNum::root_power(self.n, -1);
        let denom = (&zeta - &zinv).inverse().expect("zeta != zeta^-1 for n >= 3");
        let b = &(self - &self.conjugate()) * &denom;
        let a = self - &(&b * &zeta);
        debug_assert!(a.is_real() && b.is_real());
        (a, b)
    }

    /// Certified complex enclosure under `zeta_n -> e^{2 pi i / n}`.
    pub fn embed(&self, bits: u32) -> ComplexInterval {
        assert!(bits >= 32);
        let mut acc = ComplexInterval::point(Rat::zero(), Rat::zero());
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let root = interval::root_of_unity_interval(self.n, j as u32, bits);
            acc = acc.add(&root.scale(c));
        }
        acc
    }

    /// Fast certified f64 approximation `(value, error)` of a real
    /// element; `None` if coefficients overflow f64.
    pub fn approx_real(&self) -> Option<(f64, f64)> {
        let n = self.n as f64;
        let mut v = 0.0f64;
        let mut mag = 0.0f64;
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let cf = c.to_f64()?;
            if !cf.is_finite() {
                return None;
            }
            v += cf * (2.0 * std::f64::consts::PI * j as f64 / n).cos();
            mag += cf.abs();
        }
        // generous bound: each term is accurate to ~1e-15 relative
        Some((v, mag * 1e-12 + 1e-300))
    }

    /// Fast certified f64 approximation `(re, im, error)` of any element.
    pub fn approx_complex(&self) -> Option<(f64, f64, f64)> {
        let n = self.n as f64;
        let (mut re, mut im, mut mag) = (0.0f64, 0.0f64, 0.0f64);
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let cf = c.to_f64()?;
            if !cf.is_finite() {
                return None;
            }
            let ang = 2.0 * std::f64::consts::PI * j as f64 / n;
            re += cf * ang.cos();
            im += cf * ang.sin();
            mag += cf.abs();
        }
        Some((re, im, mag * 1e-12 + 1e-300))
    }

    /// Exact sign of a real element: symbolic zero test first, then
    /// certified f64, then interval refinement with doubling precision.
    pub fn sign_exact(&self) -> Result<i8, CycError> {
        if self.is_zero() {
            return Ok(0);
        }
        if let Some(q) = self.as_rational() {
            return Ok(if q.is_positive() { 1 } else { -1 });
        }
        if !self.is_real() {
            return Err(CycError::NotReal);
        }
        if let Some((v, err)) = self.approx_real() {
            if v.abs() > err {
                return Ok(if v > 0.0 { 1 } else { -1 });
            }
        }
        let mut bits = 64u32;
        loop {
            let iv = self.embed(bits).re;
            if let Some(s) = iv.sign() {
                return Ok(s);
            }
            bits *= 2;
            assert!(
                bits <= 1 << 16,
                "sign refinement exhausted precision for a nonzero value"
            );
        }
    }

    /// A certified rational lower bound on `|x|` for nonzero real `x`.
    pub fn abs_lower_bound(&self) -> Result<Rat, CycError> {
        if self.sign_exact()? == 0 {
            return Err(CycError::DivisionByZero);
        }
        if let Some(q) = self.as_rational() {
            return Ok(q.abs());
        }
        let mut bits = 64u32;
        loop {
            let iv = self.embed(bits).re;
            if iv.sign().is_some() {
                let b = iv.lo.abs().min(iv.hi.abs());
                if b.is_positive() {
                    return Ok(b);
                }
            }
            bits *= 2;
            assert!(bits <= 1 << 16);
        }
    }

    fn to_string_form(&self) -> String {
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, c)| {
                if j == 0 {
                    format!("{c}")
                } else if j == 1 {
                    format!("{c}*z")
                } else {
                    format!("{c}*z^{j}")
                }
            })
            .collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait for &CycNum {
            type Output = CycNum;
            fn $method(self, rhs: &CycNum) -> CycNum {
                self.assert_same(rhs);
                CycNum {
                    n: self.n,
                    coeffs: self
                        .coeffs
                        .iter()
                        .zip(rhs.coeffs.iter())
                        .map(|(a, b)| a $op b)
                        .collect(),
                }
            }
        }
        impl $trait for CycNum {
            type Output = CycNum;
            fn $method(self, rhs: CycNum) -> CycNum {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, +);
forward_binop!(Sub, sub, -);

impl Mul for &CycNum {
    type Output = CycNum;
    fn mul(self, rhs: &CycNum) -> CycNum {
        self.assert_same(rhs);
        let mut conv = vec![Rat::zero(); 2 * self.coeffs.len()];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                conv[i + j] = &conv[i + j] + &(a * b);
            }
        }
        CycNum::from_poly(self.n, conv)
    }
}

impl Mul for CycNum {
    type Output = CycNum;
    fn mul(self, rhs: CycNum) -> CycNum {
        (&self).mul(&rhs)
    }
}

impl Neg for &CycNum {
    type Output = CycNum;
    fn neg(self) -> CycNum {
        CycNum {
            n: self.n,
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }
}

impl Neg for CycNum {
    type Output = CycNum;
    fn neg(self) -> CycNum {
        -&self
    }
}

/// The automorphism `zeta_n -> zeta_n^a` of `G(K_n/Q)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GaloisMap {
    pub n: u32,
    pub a: u32,
}

impl GaloisMap {
    pub fn new(n: u32, a: u32) -> Result<Self, CycError> {
        let a = ((a as u64 - 1).rem_euclid(n as u64) + 1) as u32;
        if num_integer::gcd(a, n) != 1 {
            return Err(CycError::NotCoprime { a, n });
        }
        Ok(GaloisMap { n, a })
    }

    pub fn apply(&self, x: &CycNum) -> CycNum {
        assert_eq!(self.n, x.n);
        // substitute zeta^a for zeta in the coefficient polynomial
        let mut conv: Vec<Rat> = Vec::new();
        for (j, c) in x.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let e = (self.a as u64 * j as u64).rem_euclid(self.n as u64) as usize;
            if conv.len() <= e {
                conv.resize(e + 1, Rat::zero());
            }
            conv[e] = &conv[e] + c;
        }
        CycNum::from_poly(self.n, conv)
    }

    /// Composition `self . other` (apply `other` first).
    pub fn compose(&self, other: &GaloisMap) -> GaloisMap {
        assert_eq!(self.n, other.n);
        let a = (self.a as u64 * other.a as u64).rem_euclid(self.n as u64) as u32;
        GaloisMap::new(self.n, a).unwrap()
    }
}

/// The star map into internal space: the tuple of chosen non-identity,
/// pairwise non-conjugate Galois embeddings. Empty for `n` in {3, 4, 6}.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StarMap {
    pub n: u32,
    pub exponents: Vec<u32>,
}

impl StarMap {
    pub fn new(n: u32, exponents: Vec<u32>) -> Result<Self, CycError> {
        let expected = (phi(n) / 2).saturating_sub(1) as usize;
        let fail = |reason: &str| CycError::InvalidStarMap {
            n,
            reason: reason.to_string(),
        };
        if exponents.len() != expected {
            return Err(fail(&format!(
                "expected {expected} exponents, got {}",
                exponents.len()
            )));
        }
        for (i, &a) in exponents.iter().enumerate() {
            if num_integer::gcd(a, n) != 1 {
                return Err(fail(&format!("{a} not coprime to {n}")));
            }
            let am = a % n;
            if am == 1 % n || am == (n - 1) % n {
                return Err(fail("identity and conjugation are excluded"));
            }
            for &b in &exponents[..i] {
                if am == b % n || am == (n - b % n) % n {
                    return Err(fail("exponents must be pairwise non-conjugate"));
                }
            }
        }
        Ok(StarMap { n, exponents })
    }

    /// Trivial star map for the crystallographic cases.
    pub fn trivial(n: u32) -> Self {
        assert!(matches!(n, 3 | 4 | 6));
        StarMap {
            n,
            exponents: Vec::new(),
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.exponents.is_empty()
    }

    /// The tuple of Galois images; empty (the zero point of the trivial
    /// internal space) when `n` is crystallographic.
    pub fn apply(&self, x: &CycNum) -> Vec<CycNum> {
        self.exponents
            .iter()
            .map(|&a| GaloisMap::new(self.n, a).unwrap().apply(x))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{rat_frac, Int};

    #[test]
    fn phi_examples() {
        assert_eq!(phi(1), 1);
        assert_eq!(phi(8), 4);
        assert_eq!(phi(12), 4);
    }

    #[test]
    fn cyclotomic_polynomial_examples() {
        let f1 = cyclotomic_polynomial(1);
        assert_eq!(f1.coeffs, vec![Int::from(-1), Int::from(1)]);
        let f2 = cyclotomic_polynomial(2);
        assert_eq!(f2.coeffs, vec![Int::from(1), Int::from(1)]);
        let f8 = cyclotomic_polynomial(8);
        assert_eq!(
            f8.coeffs,
            vec![Int::from(1), Int::from(0), Int::from(0), Int::from(0), Int::from(1)]
        );
        let f12 = cyclotomic_polynomial(12);
        assert_eq!(
            f12.coeffs,
            vec![Int::from(1), Int::from(0), Int::from(-1), Int::from(0), Int::from(1)]
        );
    }

    #[test]
    fn mul_reduces() {
        // zeta_4^2 = -1
        let i = CycNum::root(4);
        assert_eq!(&i * &i, CycNum::from_integer(4, -1));
        // zeta_8^2 * zeta_8^2 = -1
        let z2 = CycNum::root_power(8, 2);
        assert_eq!(&z2 * &z2, CycNum::from_integer(8, -1));
        // additive inverse
        let a = CycNum::one(5) + CycNum::root(5);
        assert!((&a + &-&a).is_zero());
    }

    #[test]
    fn inverse_examples() {
        let two = CycNum::from_integer(8, 2);
        assert_eq!(
            two.inverse().unwrap(),
            CycNum::from_rational(8, rat_frac(1, 2))
        );
        let i = CycNum::root(4);
        assert_eq!(i.inverse().unwrap(), -CycNum::root(4));
        let x = CycNum::one(8) + CycNum::root(8);
        let r = x.inverse().unwrap();
        assert!((&x * &r).is_one());
        assert!(CycNum::zero(8).inverse().is_err());
    }

    #[test]
    fn conjugate_examples() {
        let q = CycNum::from_rational(8, rat_frac(7, 3));
        assert_eq!(q.conjugate(), q);
        let i = CycNum::root(4);
        assert_eq!(i.conjugate(), -CycNum::root(4));
        let real = CycNum::root(8) + CycNum::root_power(8, -1);
        assert_eq!(real.conjugate(), real);
        assert_eq!(real.conjugate().conjugate(), real);
    }

    #[test]
    fn galois_examples() {
        let x = CycNum::root(8) + CycNum::from_integer(8, 3);
        assert_eq!(GaloisMap::new(8, 1).unwrap().apply(&x), x);
        assert_eq!(
            GaloisMap::new(8, 3).unwrap().apply(&CycNum::root(8)),
            CycNum::root_power(8, 3)
        );
        assert_eq!(
            GaloisMap::new(5, 2).unwrap().apply(&CycNum::root(5)),
            CycNum::root_power(5, 2)
        );
        assert!(GaloisMap::new(8, 2).is_err());
    }

    #[test]
    fn is_real_and_ring_membership() {
        assert!((CycNum::root(8) + CycNum::root_power(8, -1)).is_real());
        assert!(!CycNum::root(8).is_real());
        assert!(CycNum::from_rational(8, rat_frac(7, 3)).is_real());

        let x = CycNum::from_integer(8, 3) + CycNum::root(8).scale(&rat_int(2));
        assert!(x.is_in_ring());
        assert!(!CycNum::from_rational(8, rat_frac(1, 2)).is_in_ring());
        let y = CycNum::from_rational(4, rat_frac(2, 3))
            + CycNum::root(4).scale(&rat_frac(2, 3));
        assert!(!y.is_in_ring());
    }

    #[test]
    fn split_examples() {
        for n in [5u32, 8, 12] {
            let z2 = CycNum::root_power(n, 2);
            let (a, b) = z2.split_real_imag_basis();
            assert_eq!(a, CycNum::from_integer(n, -1));
            assert_eq!(b, CycNum::root(n) + CycNum::root_power(n, -1));

            let q = CycNum::from_rational(n, rat_frac(3, 7));
            assert_eq!(q.split_real_imag_basis(), (q.clone(), CycNum::zero(n)));

            let z = CycNum::root(n);
            assert_eq!(
                z.split_real_imag_basis(),
                (CycNum::zero(n), CycNum::one(n))
            );
        }
    }

    #[test]
    fn embed_examples() {
        let one = CycNum::one(8).embed(64);
        assert!(one.re.contains_zero() == false);
        let i4 = CycNum::root(4).embed(64);
        assert!(i4.im.lo.to_f64().unwrap() > 0.999);
        let r = (CycNum::root(8) + CycNum::root_power(8, -1)).embed(64);
        let v = r.re.mid().to_f64().unwrap();
        assert!((v - std::f64::consts::SQRT_2).abs() < 1e-12);
        assert!(r.im.contains_zero());
    }

    #[test]
    fn sign_exact_examples() {
        assert_eq!(CycNum::zero(8).sign_exact().unwrap(), 0);
        let s2 = CycNum::root(8) + CycNum::root_power(8, -1);
        assert_eq!(s2.sign_exact().unwrap(), 1);
        let less = &s2 - &CycNum::from_integer(8, 2);
        assert_eq!(less.sign_exact().unwrap(), -1);
        assert!(CycNum::root(8).sign_exact().is_err());
    }

    #[test]
    fn star_map_examples() {
        let s = StarMap::new(8, vec![3]).unwrap();
        assert_eq!(s.apply(&CycNum::root(8)), vec![CycNum::root_power(8, 3)]);
        let t = StarMap::trivial(4);
        assert!(t.apply(&CycNum::root(4)).is_empty());
        assert!(StarMap::new(8, vec![7]).is_err()); // conjugation
        assert!(StarMap::new(8, vec![1]).is_err()); // identity
        assert_eq!(StarMap::new(5, vec![2]).unwrap().exponents, vec![2]);
    }

    #[test]
    fn canonical_order_is_lexicographic() {
        let a = CycNum::from_int_coeffs(8, &[0, 1]);
        let b = CycNum::from_int_coeffs(8, &[1, 0]);
        assert!(a < b);
    }
}
