//! X-ray directions, canonical line keys, and discrete X-ray data for
//! finite point sets: the number of points on each line parallel to a
//! given nonzero direction of the cyclotomic integer ring.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cyclotomic::CycNum;
use crate::modelset::ModelSetSpec;

#[derive(Debug, Error)]
pub enum XRayError {
    #[error("direction must be nonzero")]
    ZeroDirection,
    #[error("directions {0} and {1} are parallel")]
    ParallelDirections(usize, usize),
    #[error("need at least 2 directions, got {0}")]
    TooFewDirections(usize),
    #[error("point is not a cyclotomic integer")]
    NotInRing,
    #[error("direction totals disagree: {0:?}")]
    TotalsMismatch(Vec<u64>),
    #[error("direction index {0} out of range")]
    BadDirectionIndex(usize),
    #[error("{0}")]
    Invalid(String),
}

/// A nonzero element of the ring, used as an X-ray direction.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Direction {
    pub o: CycNum,
}

impl Direction {
    pub fn new(o: CycNum) -> Result<Direction, XRayError> {
        if o.is_zero() {
            return Err(XRayError::ZeroDirection);
        }
        Ok(Direction { o })
    }

    /// Exact parallel test: `o / o'` is real.
    pub fn is_parallel(&self, other: &Direction) -> bool {
        (&self.o * &other.o.inverse().expect("direction nonzero")).is_real()
    }
}

/// Canonical key of the line through `z` in direction `o`: the
/// `zeta`-component of `z / o` over the real-subfield basis `{1, zeta}`.
/// Two points share a key iff they lie on a common line parallel to `o`.
pub fn line_key(o: &Direction, z: &CycNum) -> CycNum {
    let ratio = z * &o.o.inverse().expect("direction nonzero");
    ratio.split_real_imag_basis().1
}

/// One support line of an X-ray: a witnessing base point on the line
/// (a cyclotomic integer) and the positive point count.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct XRayLine {
    pub base: CycNum,
    pub count: u64,
}

/// The X-ray of a finite set in one direction: its support lines with
/// counts, ordered by the canonical order of their line keys.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct XRayData {
    pub direction: Direction,
    pub lines: Vec<XRayLine>,
}

impl XRayData {
    pub fn total(&self) -> u64 {
        self.lines.iter().map(|l| l.count).sum()
    }

    /// The canonical keys of the support lines, in stored order.
    pub fn keys(&self) -> Vec<CycNum> {
        self.lines
            .iter()
            .map(|l| line_key(&self.direction, &l.base))
            .collect()
    }
}

/// Compute the X-ray of `points` in direction `o`. All points must be
/// cyclotomic integers (the physical-translation-zero convention).
pub fn compute_xray(points: &[CycNum], o: &Direction) -> Result<XRayData, XRayError> {
    let mut groups: BTreeMap<CycNum, (CycNum, u64)> = BTreeMap::new();
    for z in points {
        if !z.is_in_ring() {
            return Err(XRayError::NotInRing);
        }
        let key = line_key(o, z);
        groups
            .entry(key)
            .and_modify(|(base, count)| {
                if z < base {
                    *base = z.clone();
                }
                *count += 1;
            })
            .or_insert_with(|| (z.clone(), 1));
    }
    Ok(XRayData {
        direction: o.clone(),
        lines: groups
            .into_values()
            .map(|(base, count)| XRayLine { base, count })
            .collect(),
    })
}

/// A complete tomography instance: the model-set context plus X-ray
/// data in two or more directions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "XRayInstanceRepr", into = "XRayInstanceRepr")]
pub struct XRayInstance {
    pub spec: ModelSetSpec,
    pub xrays: Vec<XRayData>,
}

#[derive(Serialize, Deserialize)]
struct XRayInstanceRepr {
    #[serde(flatten)]
    spec: ModelSetSpec,
    directions: Vec<CycNum>,
    data: Vec<DirectionDataRepr>,
}

#[derive(Serialize, Deserialize)]
struct DirectionDataRepr {
    direction_index: usize,
    lines: Vec<XRayLine>,
}

impl From<XRayInstance> for XRayInstanceRepr {
    fn from(inst: XRayInstance) -> Self {
        XRayInstanceRepr {
            spec: inst.spec,
            directions: inst.xrays.iter().map(|x| x.direction.o.clone()).collect(),
            data: inst
                .xrays
                .iter()
                .enumerate()
                .map(|(i, x)| DirectionDataRepr {
                    direction_index: i,
                    lines: x.lines.clone(),
                })
                .collect(),
        }
    }
}

impl TryFrom<XRayInstanceRepr> for XRayInstance {
    type Error = String;
    fn try_from(r: XRayInstanceRepr) -> Result<Self, Self::Error> {
        let mut xrays: Vec<Option<XRayData>> = vec![None; r.directions.len()];
        for d in r.data {
            let o = r
                .directions
                .get(d.direction_index)
                .ok_or_else(|| format!("direction index {} out of range", d.direction_index))?;
            let direction = Direction::new(o.clone()).map_err(|e| e.to_string())?;
            if xrays[d.direction_index].is_some() {
                return Err(format!("duplicate data for direction {}", d.direction_index));
            }
            xrays[d.direction_index] = Some(XRayData {
                direction,
                lines: d.lines,
            });
        }
        let xrays: Vec<XRayData> = xrays
            .into_iter()
            .enumerate()
            .map(|(i, x)| x.ok_or_else(|| format!("missing data for direction {i}")))
            .collect::<Result<_, _>>()?;
        Ok(XRayInstance { spec: r.spec, xrays })
    }
}

impl XRayInstance {
    /// Build an instance by X-raying a concrete point set.
    pub fn from_points(
        spec: ModelSetSpec,
        directions: &[Direction],
        points: &[CycNum],
    ) -> Result<XRayInstance, XRayError> {
        let xrays = directions
            .iter()
            .map(|o| compute_xray(points, o))
            .collect::<Result<Vec<_>, _>>()?;
        let inst = XRayInstance { spec, xrays };
        inst.validate()?;
        Ok(inst)
    }

    /// Structural validation: at least two pairwise non-parallel
    /// directions, all base points in the ring, and agreeing totals.
    /// Returns the common point count `N`.
    pub fn validate(&self) -> Result<u64, XRayError> {
        if self.xrays.len() < 2 {
            return Err(XRayError::TooFewDirections(self.xrays.len()));
        }
        for (i, a) in self.xrays.iter().enumerate() {
            for (j, b) in self.xrays.iter().enumerate().skip(i + 1) {
                if a.direction.is_parallel(&b.direction) {
                    return Err(XRayError::ParallelDirections(i, j));
                }
            }
            for l in &a.lines {
                if !l.base.is_in_ring() {
                    return Err(XRayError::NotInRing);
                }
                if l.count == 0 {
                    return Err(XRayError::Invalid("zero count stored".into()));
                }
            }
        }
        let totals: Vec<u64> = self.xrays.iter().map(|x| x.total()).collect();
        if totals.windows(2).any(|w| w[0] != w[1]) {
            return Err(XRayError::TotalsMismatch(totals));
        }
        Ok(totals[0])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modelset::Preset;

    fn dir(n: u32, coeffs: &[i64]) -> Direction {
        Direction::new(CycNum::from_int_coeffs(n, coeffs)).unwrap()
    }

    #[test]
    fn line_key_examples() {
        let o = dir(4, &[1, 0]);
        assert!(line_key(&o, &CycNum::zero(4)).is_zero());
        assert!(line_key(&o, &o.o).is_zero());
        assert_eq!(line_key(&o, &CycNum::root(4)), CycNum::one(4));
        // translation along the direction keeps the key
        let o8 = dir(8, &[1, 1]);
        let z = CycNum::from_int_coeffs(8, &[0, 0, 1]);
        let moved = &z + &o8.o.scale(&crate::rat_int(3));
        assert_eq!(line_key(&o8, &z), line_key(&o8, &moved));
    }

    #[test]
    fn parallel_test() {
        let o1 = dir(8, &[1, 1]);
        let o2 = dir(8, &[2, 2]);
        let o3 = dir(8, &[0, 1]);
        assert!(o1.is_parallel(&o2));
        assert!(!o1.is_parallel(&o3));
        assert!(Direction::new(CycNum::zero(8)).is_err());
    }

    #[test]
    fn xray_unit_square() {
        let pts = vec![
            CycNum::zero(4),
            CycNum::one(4),
            CycNum::root(4),
            CycNum::one(4) + CycNum::root(4),
        ];
        let x = compute_xray(&pts, &dir(4, &[1, 0])).unwrap();
        assert_eq!(x.lines.len(), 2);
        assert!(x.lines.iter().all(|l| l.count == 2));
        assert_eq!(x.total(), 4);
        // empty set
        let e = compute_xray(&[], &dir(4, &[1, 0])).unwrap();
        assert!(e.lines.is_empty());
        // both points on the 0-line
        let two = compute_xray(
            &[CycNum::zero(4), CycNum::one(4)],
            &dir(4, &[1, 0]),
        )
        .unwrap();
        assert_eq!(two.lines.len(), 1);
        assert_eq!(two.lines[0].count, 2);
        assert_eq!(two.lines[0].base, CycNum::zero(4));
    }

    #[test]
    fn xray_rejects_non_integers() {
        let pts = vec![CycNum::from_rational(4, crate::rat_frac(1, 2))];
        assert!(compute_xray(&pts, &dir(4, &[1, 0])).is_err());
    }

    #[test]
    fn validate_roundtrip_and_errors() {
        let spec = ModelSetSpec::from_preset(Preset::Square);
        let pts = vec![
            CycNum::zero(4),
            CycNum::one(4),
            CycNum::root(4),
        ];
        let dirs = [dir(4, &[1, 0]), dir(4, &[0, 1])];
        let inst = XRayInstance::from_points(spec.clone(), &dirs, &pts).unwrap();
        assert_eq!(inst.validate().unwrap(), 3);

        // duplicate direction is rejected
        let dup = XRayInstance::from_points(spec.clone(), &[dir(4, &[1, 0]), dir(4, &[2, 0])], &pts);
        assert!(matches!(dup, Err(XRayError::ParallelDirections(0, 1))));

        // totals mismatch flagged
        let mut bad = inst.clone();
        bad.xrays[0].lines[0].count += 2;
        assert!(matches!(bad.validate(), Err(XRayError::TotalsMismatch(_))));

        // JSON round-trip
        let j = serde_json::to_string(&inst).unwrap();
        let back: XRayInstance = serde_json::from_str(&j).unwrap();
        assert_eq!(back, inst);
    }
}
