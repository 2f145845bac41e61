//! Integer and rational polynomial helpers, and the cyclotomic
//! polynomials `F_n` computed by the divisor recursion
//! `F_n = (X^n - 1) / prod_{d|n, d<n} F_d`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::{Int, Rat};

/// A polynomial with exact integer coefficients, lowest degree first.
///
/// The zero polynomial is the empty coefficient vector; otherwise the
/// leading (last) coefficient is nonzero. Serializes as an array of
/// integer strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct CycPoly {
    pub coeffs: Vec<Int>,
}

impl From<CycPoly> for Vec<String> {
    fn from(p: CycPoly) -> Self {
        p.coeffs.iter().map(|c| c.to_string()).collect()
    }
}

impl TryFrom<Vec<String>> for CycPoly {
    type Error = String;
    fn try_from(v: Vec<String>) -> Result<Self, Self::Error> {
        let coeffs = v
            .iter()
            .map(|s| s.parse::<Int>().map_err(|e| format!("bad integer {s:?}: {e}")))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(CycPoly::from_coeffs(coeffs))
    }
}

impl CycPoly {
    pub fn zero() -> Self {
        CycPoly { coeffs: Vec::new() }
    }

    pub fn from_coeffs(mut coeffs: Vec<Int>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        CycPoly { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        if self.is_zero() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().map_or(false, |c| c.is_one())
    }

    /// `X^n - 1`.
    pub fn x_pow_minus_one(n: usize) -> Self {
        let mut coeffs = vec![Int::zero(); n + 1];
        coeffs[0] = -Int::one();
        coeffs[n] = Int::one();
        CycPoly { coeffs }
    }

    pub fn mul(&self, other: &CycPoly) -> CycPoly {
        if self.is_zero() || other.is_zero() {
            return CycPoly::zero();
        }
        let mut out = vec![Int::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        CycPoly::from_coeffs(out)
    }

    /// Exact division by a monic polynomial; panics if the division
    /// leaves a remainder (which cannot happen in the `F_n` recursion).
    pub fn div_exact_monic(&self, divisor: &CycPoly) -> CycPoly {
        assert!(divisor.is_monic(), "divisor must be monic");
        let d = divisor.coeffs.len() - 1;
        let mut rem = self.coeffs.clone();
        if rem.len() <= d {
            assert!(self.is_zero(), "non-exact division");
            return CycPoly::zero();
        }
        let mut quot = vec![Int::zero(); rem.len() - d];
        for k in (0..quot.len()).rev() {
            let q = rem[k + d].clone();
            if !q.is_zero() {
                for (i, c) in divisor.coeffs.iter().enumerate() {
                    rem[k + i] -= &q * c;
                }
            }
            quot[k] = q;
        }
        assert!(rem.iter().all(|c| c.is_zero()), "non-exact division");
        CycPoly::from_coeffs(quot)
    }

    pub fn to_rational(&self) -> Vec<Rat> {
        self.coeffs.iter().map(|c| Rat::from_integer(c.clone())).collect()
    }
}

/// Euler's phi-function by direct gcd count.
pub fn phi(n: u32) -> u32 {
    assert!(n >= 1);
    (1..=n).filter(|k| num_integer::gcd(*k, n) == 1).count() as u32
}

static CYCLOTOMIC_MEMO: OnceLock<Mutex<HashMap<u32, Arc<CycPoly>>>> = OnceLock::new();

/// The nth cyclotomic polynomial, monic with integer coefficients and
/// degree `phi(n)`. Memoized; the memo behaves as a write-once map.
pub fn cyclotomic_polynomial(n: u32) -> Arc<CycPoly> {
    assert!(n >= 1);
    let memo = CYCLOTOMIC_MEMO.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = memo.lock().unwrap().get(&n) {
        return p.clone();
    }
    let mut num = CycPoly::x_pow_minus_one(n as usize);
    for d in 1..n {
        if n % d == 0 {
            num = num.div_exact_monic(&cyclotomic_polynomial(d));
        }
    }
    let result = Arc::new(num);
    memo.lock()
        .unwrap()
        .entry(n)
        .or_insert_with(|| result.clone())
        .clone()
}

// ---- rational polynomial helpers (internal) ----

pub(crate) fn rat_poly_trim(coeffs: &mut Vec<Rat>) {
    while coeffs.last().map_or(false, |c| c.is_zero()) {
        coeffs.pop();
    }
}

/// Remainder of `a` modulo the monic integer polynomial `m`, over Q.
pub(crate) fn rat_poly_rem(mut a: Vec<Rat>, m: &CycPoly) -> Vec<Rat> {
    let d = m.coeffs.len() - 1;
    let mc: Vec<Rat> = m.to_rational();
    rat_poly_trim(&mut a);
    while a.len() > d {
        let q = a.last().unwrap().clone();
        let k = a.len() - 1 - d;
        for (i, c) in mc.iter().enumerate() {
            a[k + i] = &a[k + i] - &(&q * c);
        }
        rat_poly_trim(&mut a);
    }
    a
}

/// Polynomial division over Q: returns (quotient, remainder).
pub(crate) fn rat_poly_divmod(a: &[Rat], b: &[Rat]) -> (Vec<Rat>, Vec<Rat>) {
    let mut rem: Vec<Rat> = a.to_vec();
    rat_poly_trim(&mut rem);
    let mut bb: Vec<Rat> = b.to_vec();
    rat_poly_trim(&mut bb);
    assert!(!bb.is_empty(), "division by zero polynomial");
    let db = bb.len() - 1;
    let lead = bb.last().unwrap().clone();
    if rem.len() <= db {
        return (Vec::new(), rem);
    }
    let mut quot = vec![Rat::zero(); rem.len() - db];
    while rem.len() > db {
        let q = rem.last().unwrap() / &lead;
        let k = rem.len() - 1 - db;
        for (i, c) in bb.iter().enumerate() {
            rem[k + i] = &rem[k + i] - &(&q * c);
        }
        quot[k] = q;
        rat_poly_trim(&mut rem);
        if rem.is_empty() {
            break;
        }
    }
    (quot, rem)
}

pub(crate) fn rat_poly_mul(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Rat::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = &out[i + j] + &(x * y);
        }
    }
    rat_poly_trim(&mut out);
    out
}

pub(crate) fn rat_poly_sub(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] = x.clone();
    }
    for (i, y) in b.iter().enumerate() {
        out[i] = &out[i] - y;
    }
    rat_poly_trim(&mut out);
    out
}

/// Extended Euclid over Q[X]: returns `u` with `u*a = g mod m` where `g`
/// is the (monic) gcd of `a` and `m`. Used for field inversion mod `F_n`.
pub(crate) fn rat_poly_modular_inverse(a: &[Rat], m: &CycPoly) -> Option<Vec<Rat>> {
    // invariants: r0 = u0*a mod m, r1 = u1*a mod m
    let mut r0: Vec<Rat> = m.to_rational();
    let mut r1: Vec<Rat> = a.to_vec();
    rat_poly_trim(&mut r1);
    let mut u0: Vec<Rat> = Vec::new();
    let mut u1: Vec<Rat> = vec![Rat::one()];
    while !r1.is_empty() {
        let (q, r) = rat_poly_divmod(&r0, &r1);
        let u = rat_poly_sub(&u0, &rat_poly_mul(&q, &u1));
        r0 = std::mem::replace(&mut r1, r);
        u0 = std::mem::replace(&mut u1, u);
    }
    // r0 is the gcd; invertible iff it is a nonzero constant
    if r0.len() != 1 {
        return None;
    }
    let inv_g = Rat::one() / r0[0].clone();
    let mut u: Vec<Rat> = u0.iter().map(|c| c * &inv_g).collect();
    u = rat_poly_rem(u, m);
    Some(u)
}
