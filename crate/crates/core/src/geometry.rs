//! Exact planar geometry for internal space.
//!
//! Internal-space points for the aperiodic cases (one nontrivial Galois
//! embedding, so the internal space is a plane) are kept as complex
//! cyclotomic numbers inside the enlarged "geometry field" `K_N` with
//! `N = lcm(2n, 4)`. This field contains `K_n`, the imaginary unit
//! (`i = zeta_N^{N/4}`) and the vertices and edge normals of every
//! regular polygon window used by the presets, so all halfspace tests
//! reduce to exact sign evaluations of real cyclotomic numbers.

use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::cyclotomic::CycNum;
use crate::rat_frac;

/// The index of the geometry field for base index `n`.
pub fn geometry_index(n: u32) -> u32 {
    (2 * n).lcm(&4)
}

/// The imaginary unit inside `K_N` (requires `4 | N`).
pub fn i_unit(n_geom: u32) -> CycNum {
    assert_eq!(n_geom % 4, 0, "geometry field must contain i");
    CycNum::root_power(n_geom, (n_geom / 4) as i64)
}

/// Lift an element of `K_n` into `K_m` for `n | m`, substituting
/// `zeta_n = zeta_m^{m/n}`.
pub fn lift(x: &CycNum, m: u32) -> CycNum {
    let n = x.index();
    if n == m {
        return x.clone();
    }
    assert_eq!(m % n, 0, "no embedding of K_{n} into K_{m}");
    let step = (m / n) as i64;
    let mut acc = CycNum::zero(m);
    for (j, c) in x.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        acc = &acc + &CycNum::root_power(m, step * j as i64).scale(c);
    }
    acc
}

/// A point of the two-dimensional internal space, stored as a complex
/// number in the geometry field.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct InternalPoint {
    pub z: CycNum,
}

impl InternalPoint {
    pub fn new(z: CycNum) -> Self {
        InternalPoint { z }
    }

    pub fn zero(n_geom: u32) -> Self {
        InternalPoint {
            z: CycNum::zero(n_geom),
        }
    }

    pub fn index(&self) -> u32 {
        self.z.index()
    }

    /// Real part as an exact (real) cyclotomic number.
    pub fn re(&self) -> CycNum {
        (&self.z + &self.z.conjugate()).scale(&rat_frac(1, 2))
    }

    /// Imaginary part as an exact (real) cyclotomic number.
    pub fn im(&self) -> CycNum {
        let diff = &self.z - &self.z.conjugate();
        let two_i = i_unit(self.index()).scale(&crate::rat_int(2));
        &diff * &two_i.inverse().expect("2i is invertible")
    }

    /// Squared Euclidean norm `z * conj(z)`, a real cyclotomic number.
    pub fn norm_sq(&self) -> CycNum {
        &self.z * &self.z.conjugate()
    }

    pub fn sub(&self, o: &InternalPoint) -> InternalPoint {
        InternalPoint::new(&self.z - &o.z)
    }

    pub fn add(&self, o: &InternalPoint) -> InternalPoint {
        InternalPoint::new(&self.z + &o.z)
    }

    /// Certified f64 coordinates `(re, im, error)`.
    pub fn approx(&self) -> Option<(f64, f64, f64)> {
        self.z.approx_complex()
    }

    /// f64 coordinates for rendering (falls back to interval midpoints).
    pub fn to_f64(&self) -> (f64, f64) {
        if let Some((re, im, _)) = self.approx() {
            (re, im)
        } else {
            let c = self.z.embed(64);
            (
                num_traits::ToPrimitive::to_f64(&c.re.mid()).unwrap_or(0.0),
                num_traits::ToPrimitive::to_f64(&c.im.mid()).unwrap_or(0.0),
            )
        }
    }
}

/// Exact dot product of the plane vectors represented by complex `u`
/// and `p`: `Re(conj(u) * p)`, a real cyclotomic number.
pub fn dot(u: &CycNum, p: &CycNum) -> CycNum {
    let prod = &u.conjugate() * p;
    (&prod + &prod.conjugate()).scale(&rat_frac(1, 2))
}

/// Exact cross product (z-component) `Im(conj(u) * p)`.
pub fn cross(u: &CycNum, p: &CycNum) -> CycNum {
    InternalPoint::new(&u.conjugate() * p).im()
}
