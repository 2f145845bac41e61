//! Exact discrete tomography of planar cyclotomic model sets.
//!
//! The crate is organized around a single exact scalar type,
//! [`CycNum`](cyclotomic::CycNum), an element of the cyclotomic field
//! `Q(zeta_n)` stored over the power basis with arbitrary-precision
//! rational coefficients. Everything downstream (model-set patches,
//! X-rays, grids, window separation, tomographic reconstruction) is
//! built on exact predicates over these scalars; floating point only
//! appears as a certified fast path and in rendered output.

pub mod cyclotomic;
pub mod geometry;
pub mod grid;
pub mod modelset;
pub mod separation;
pub mod tomography;
pub mod xray;

pub use cyclotomic::{CycError, CycNum, CycPoly, GaloisMap, StarMap};
pub use geometry::InternalPoint;
pub use grid::{GridClassification, GridPoint};
pub use modelset::{ModelSetSpec, Patch, Preset, Window};
pub use separation::SeparableFamily;
pub use tomography::{TomographyResult, TomographyStatus};
pub use xray::{Direction, XRayData, XRayInstance};

/// Arbitrary-precision rational, the coefficient type used everywhere.
pub type Rat = num_rational::BigRational;
/// Arbitrary-precision integer.
pub type Int = num_bigint::BigInt;

pub(crate) fn rat_int(v: i64) -> Rat {
    Rat::from_integer(Int::from(v))
}

pub(crate) fn rat_frac(p: i64, q: i64) -> Rat {
    Rat::new(Int::from(p), Int::from(q))
}

/// Serde helpers representing a [`Rat`] as an exact `"p/q"` string.
pub(crate) mod rat_string {
    use super::Rat;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Rat, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
        let s = String::deserialize(d)?;
        s.parse::<Rat>()
            .map_err(|e| serde::de::Error::custom(format!("bad rational {s:?}: {e}")))
    }
}
