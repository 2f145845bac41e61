//! Rational interval arithmetic with rigorous enclosures of pi, cos and
//! sin. This backs the certified numeric embedding of cyclotomic numbers
//! and the adaptive refinement loop of the exact sign predicate.

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{rat_int, Int, Rat};

/// A closed rational interval `[lo, hi]` guaranteed to contain the true
/// real value it stands for.
#[derive(Clone, Debug, PartialEq)]
pub struct Interval {
    pub lo: Rat,
    pub hi: Rat,
}

impl Interval {
    pub fn point(v: Rat) -> Self {
        Interval { lo: v.clone(), hi: v }
    }

    pub fn new(lo: Rat, hi: Rat) -> Self {
        debug_assert!(lo <= hi);
        Interval { lo, hi }
    }

    pub fn zero() -> Self {
        Interval::point(Rat::zero())
    }

    pub fn width(&self) -> Rat {
        &self.hi - &self.lo
    }

    pub fn mid(&self) -> Rat {
        (&self.lo + &self.hi) / rat_int(2)
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    /// Sign if the interval excludes zero.
    pub fn sign(&self) -> Option<i8> {
        if self.lo.is_positive() {
            Some(1)
        } else if self.hi.is_negative() {
            Some(-1)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(0)
        } else {
            None
        }
    }

    pub fn add(&self, o: &Interval) -> Interval {
        Interval::new(&self.lo + &o.lo, &self.hi + &o.hi)
    }

    pub fn sub(&self, o: &Interval) -> Interval {
        Interval::new(&self.lo - &o.hi, &self.hi - &o.lo)
    }

    pub fn neg(&self) -> Interval {
        Interval::new(-self.hi.clone(), -self.lo.clone())
    }

    pub fn mul(&self, o: &Interval) -> Interval {
        let cands = [
            &self.lo * &o.lo,
            &self.lo * &o.hi,
            &self.hi * &o.lo,
            &self.hi * &o.hi,
        ];
        let mut lo = cands[0].clone();
        let mut hi = cands[0].clone();
        for c in &cands[1..] {
            if *c < lo {
                lo = c.clone();
            }
            if *c > hi {
                hi = c.clone();
            }
        }
        Interval::new(lo, hi)
    }

    pub fn scale(&self, f: &Rat) -> Interval {
        if f.is_negative() {
            Interval::new(&self.hi * f, &self.lo * f)
        } else {
            Interval::new(&self.lo * f, &self.hi * f)
        }
    }

    /// Widen symmetrically by `r >= 0`.
    pub fn widen(&self, r: &Rat) -> Interval {
        Interval::new(&self.lo - r, &self.hi + r)
    }

    /// Midpoint as f64 plus a radius that also absorbs the conversion error.
    pub fn to_f64_certified(&self) -> Option<(f64, f64)> {
        let mid = self.mid().to_f64()?;
        let rad = (self.width() / rat_int(2)).to_f64()?;
        if !mid.is_finite() || !rad.is_finite() {
            return None;
        }
        // conversion of the rational midpoint is correct to ~1 ulp
        Some((mid, rad * 1.0000001 + mid.abs() * 1e-15 + 1e-300))
    }
}

/// Complex rational interval.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexInterval {
    pub re: Interval,
    pub im: Interval,
}

impl ComplexInterval {
    pub fn point(re: Rat, im: Rat) -> Self {
        ComplexInterval {
            re: Interval::point(re),
            im: Interval::point(im),
        }
    }

    pub fn add(&self, o: &ComplexInterval) -> ComplexInterval {
        ComplexInterval {
            re: self.re.add(&o.re),
            im: self.im.add(&o.im),
        }
    }

    pub fn scale(&self, f: &Rat) -> ComplexInterval {
        ComplexInterval {
            re: self.re.scale(f),
            im: self.im.scale(f),
        }
    }
}

fn pow2_inv(bits: u32) -> Rat {
    Rat::new(Int::one(), Int::one() << bits as usize)
}

/// Enclosure of `arctan(1/x)` for integer `x >= 2` via the alternating
/// series; consecutive partial sums bracket the limit.
fn arctan_inv(x: i64, bits: u32) -> Interval {
    let tol = pow2_inv(bits + 4);
    let xr = rat_int(x);
    let x2 = &xr * &xr;
    let mut term = Rat::one() / xr; // 1/x^(2k+1)
    let mut sum = Rat::zero();
    let mut k: i64 = 0;
    loop {
        let contrib = &term / rat_int(2 * k + 1);
        if k % 2 == 0 {
            sum = &sum + &contrib;
        } else {
            sum = &sum - &contrib;
        }
        if contrib < tol {
            // alternating, decreasing: error bounded by last contribution
            return if k % 2 == 0 {
                Interval::new(&sum - &contrib, sum)
            } else {
                Interval::new(sum.clone(), &sum + &contrib)
            };
        }
        term = term / &x2;
        k += 1;
    }
}

/// Enclosure of pi via Machin's formula.
pub fn pi_interval(bits: u32) -> Interval {
    let a = arctan_inv(5, bits + 6).scale(&rat_int(16));
    let b = arctan_inv(239, bits + 6).scale(&rat_int(4));
    a.sub(&b)
}

fn factorial(k: u64) -> Int {
    let mut f = Int::one();
    for i in 2..=k {
        f *= Int::from(i);
    }
    f
}

/// Taylor enclosure of cos or sin at rational `t0` (|t0| should be
/// range-reduced), with Lagrange remainder `|t0|^K / K!`.
fn taylor_trig(t0: &Rat, bits: u32, is_cos: bool) -> Interval {
    let tol = pow2_inv(bits + 2);
    let t2 = t0 * t0;
    let mut sum = if is_cos { Rat::one() } else { t0.clone() };
    let mut term = sum.clone();
    let mut k: u64 = if is_cos { 0 } else { 1 };
    // add terms until the Lagrange bound for the tail is below tol
    loop {
        // next term: multiply by -t^2 / ((k+1)(k+2))
        let next = &term * &t2 / rat_int(((k + 1) * (k + 2)) as i64);
        term = -next;
        k += 2;
        sum = &sum + &term;
        // tail bound |t0|^(k+2) / (k+2)!
        let tb = t0.abs().pow((k + 2) as i32) / Rat::from_integer(factorial(k + 2));
        if tb < tol {
            return Interval::new(&sum - &tb, &sum + &tb);
        }
        if k > 500 {
            panic!("trig series failed to converge");
        }
    }
}

/// Enclosure of cos(t) (or sin) where `t` is itself an interval; uses a
/// midpoint Taylor expansion plus the Lipschitz-1 bound for the radius.
fn trig_interval(t: &Interval, bits: u32, is_cos: bool) -> Interval {
    let pi = pi_interval(bits + 4);
    let two_pi_mid = pi.mid() * rat_int(2);
    let two_pi_rad = pi.width(); // width of 2*pi enclosure
    let mut t0 = t.mid();
    let mut rad = t.width() / rat_int(2);
    // range-reduce the midpoint into roughly [-pi, pi]
    while t0 > pi.hi {
        t0 = &t0 - &two_pi_mid;
        rad = &rad + &two_pi_rad;
    }
    while t0 < -pi.hi.clone() {
        t0 = &t0 + &two_pi_mid;
        rad = &rad + &two_pi_rad;
    }
    taylor_trig(&t0, bits, is_cos).widen(&rad)
}

/// Certified enclosure of `e^{2 pi i k / n}`.
pub fn root_of_unity_interval(n: u32, k: u32, bits: u32) -> ComplexInterval {
    let angle = pi_interval(bits + 4).scale(&Rat::new(Int::from(2 * k), Int::from(n)));
    ComplexInterval {
        re: trig_interval(&angle, bits, true),
        im: trig_interval(&angle, bits, false),
    }
}
