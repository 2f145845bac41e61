//! Grid construction from X-ray supports, exact line intersection,
//! decomposition of the grid into translation-equivalence classes
//! modulo the ring of integers, and the module index bounding the
//! number of classes.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cyclotomic::{phi, CycNum};
use crate::xray::{line_key, Direction, XRayInstance};
use crate::{Int, Rat};

#[derive(Debug, Error)]
pub enum GridError {
    #[error("lines are parallel")]
    ParallelLines,
}

/// A support line: the line through `base` in direction `direction`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportLine {
    pub base: CycNum,
    pub direction: Direction,
}

/// A grid point with its exact position and, per instance direction,
/// the canonical key of the support line it lies on.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridPoint {
    pub position: CycNum,
    pub line_keys: Vec<CycNum>,
}

/// The grid partitioned into equivalence classes modulo the ring of
/// integers (two points are equivalent iff their difference has integer
/// coordinates). Classes are ordered by their canonical representative.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridClassification {
    pub classes: Vec<Vec<GridPoint>>,
    /// Number of representative-sweep iterations performed (equals the
    /// class count; bounded by the module index).
    pub iterations: usize,
}

impl GridClassification {
    pub fn representatives(&self) -> Vec<&GridPoint> {
        self.classes.iter().map(|c| &c[0]).collect()
    }
}

/// Exact intersection point of two non-parallel lines, solved by
/// Cramer's rule over the real subfield in the `{1, zeta}` basis.
pub fn intersect_lines(l1: &SupportLine, l2: &SupportLine) -> Result<CycNum, GridError> {
    let (alpha, beta) = l1.direction.o.split_real_imag_basis();
    let (gamma, delta) = l2.direction.o.split_real_imag_basis();
    // x*o1 - y*o2 = b2 - b1 componentwise over {1, zeta}
    let det = &(&alpha * &delta) - &(&beta * &gamma);
    if det.is_zero() {
        return Err(GridError::ParallelLines);
    }
    let rhs = &l2.base - &l1.base;
    let (p, q) = rhs.split_real_imag_basis();
    // solve [alpha, -gamma; beta, -delta] (x, y)^T = (p, q)^T;
    // system determinant is -(alpha delta - beta gamma)
    let x = &(&(&gamma * &q) - &(&delta * &p)) * &(-&det).inverse().unwrap();
    Ok(&l1.base + &(&x * &l1.direction.o))
}

/// All support lines of one X-ray.
fn support_lines(inst: &XRayInstance, dir_index: usize) -> Vec<SupportLine> {
    inst.xrays[dir_index]
        .lines
        .iter()
        .map(|l| SupportLine {
            base: l.base.clone(),
            direction: inst.xrays[dir_index].direction.clone(),
        })
        .collect()
}

/// The grid of an instance: every point lying on a support line of all
/// directions, built from pairwise intersections of the first two
/// directions and filtered by exact line keys for the rest.
pub fn build_grid(inst: &XRayInstance) -> Vec<GridPoint> {
    assert!(inst.xrays.len() >= 2);
    let lines0 = support_lines(inst, 0);
    let lines1 = support_lines(inst, 1);
    // canonical keys of every direction's support
    let support_keys: Vec<Vec<CycNum>> = inst.xrays.iter().map(|x| x.keys()).collect();

    let mut seen: Vec<CycNum> = Vec::new();
    let mut out: Vec<GridPoint> = Vec::new();
    for a in &lines0 {
        for b in &lines1 {
            let g = intersect_lines(a, b).expect("instance directions are non-parallel");
            if seen.contains(&g) {
                continue;
            }
            seen.push(g.clone());
            let keys: Vec<CycNum> = inst
                .xrays
                .iter()
                .map(|x| line_key(&x.direction, &g))
                .collect();
            let on_all = keys
                .iter()
                .zip(support_keys.iter())
                .all(|(k, sup)| sup.contains(k));
            if on_all {
                out.push(GridPoint {
                    position: g,
                    line_keys: keys,
                });
            }
        }
    }
    out.sort_by(|a, b| a.position.cmp(&b.position));
    out
}

/// Partition grid points into classes modulo the ring of integers by
/// repeated canonical-least representative picking.
pub fn decompose(grid: &[GridPoint]) -> GridClassification {
    let mut remaining: Vec<GridPoint> = grid.to_vec();
    remaining.sort_by(|a, b| a.position.cmp(&b.position));
    let mut classes = Vec::new();
    let mut iterations = 0;
    while let Some(rep) = remaining.first().cloned() {
        iterations += 1;
        let (class, rest): (Vec<GridPoint>, Vec<GridPoint>) = remaining
            .into_iter()
            .partition(|g| (&g.position - &rep.position).is_in_ring());
        classes.push(class);
        remaining = rest;
    }
    GridClassification { classes, iterations }
}

/// Rational determinant by Gaussian elimination.
fn det_rat(mut a: Vec<Vec<Rat>>) -> Rat {
    let n = a.len();
    let mut det = Rat::one();
    for col in 0..n {
        let piv = match (col..n).find(|&r| !a[r][col].is_zero()) {
            Some(p) => p,
            None => return Rat::zero(),
        };
        if piv != col {
            a.swap(col, piv);
            det = -det;
        }
        let d = a[col][col].clone();
        det *= &d;
        for r in (col + 1)..n {
            if a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] / &d;
            for c in col..n {
                let sub = &f * &a[col][c];
                a[r][c] = &a[r][c] - &sub;
            }
        }
    }
    det
}

/// The transition matrix whose columns express the Z-basis
/// `{theta^j o_k / D}` of the module generated by the two directions
/// over the real subring, in terms of the power basis of the ring.
fn module_basis_matrix(o1: &Direction, o2: &Direction) -> Option<Vec<Vec<Rat>>> {
    let n = o1.o.index();
    let d = phi(n) as usize;
    let half = d / 2;
    let (alpha, beta) = o1.o.split_real_imag_basis();
    let (gamma, delta) = o2.o.split_real_imag_basis();
    let det = &(&alpha * &delta) - &(&beta * &gamma);
    if det.is_zero() {
        return None;
    }
    let inv_det = det.inverse().unwrap();
    let theta = CycNum::root(n) + CycNum::root_power(n, -1);
    let mut cols: Vec<Vec<Rat>> = Vec::new();
    for o in [&o1.o, &o2.o] {
        let gen = &(o * &inv_det);
        let mut pow = CycNum::one(n);
        for _ in 0..half {
            let v = gen * &pow;
            cols.push(v.coeffs().to_vec());
            pow = &pow * &theta;
        }
    }
    // transpose: matrix[row][col]
    Some((0..d).map(|r| (0..d).map(|c| cols[c][r].clone()).collect()).collect())
}

/// The index of the ring of integers inside the module generated by the
/// two directions over the real subring: `1 / |det T|` for the basis
/// transition matrix `T` (a positive integer).
pub fn module_index(o1: &Direction, o2: &Direction) -> Result<u64, GridError> {
    let t = module_basis_matrix(o1, o2).ok_or(GridError::ParallelLines)?;
    let det = det_rat(t).abs();
    assert!(!det.is_zero(), "module basis is full-rank");
    let index = det.recip();
    assert!(
        index.denom().is_one(),
        "module index must be an integer, got {index}"
    );
    let i: Int = index.to_integer();
    Ok(u64::try_from(i).expect("module index fits in u64"))
}

/// True iff `z` lies in the module generated by the two directions:
/// its coordinates over the module's Z-basis are integers.
pub fn in_module(o1: &Direction, o2: &Direction, z: &CycNum) -> Result<bool, GridError> {
    let t = module_basis_matrix(o1, o2).ok_or(GridError::ParallelLines)?;
    let coords = solve_rat(t, z.coeffs().to_vec());
    Ok(coords.iter().all(|c| c.denom().is_one()))
}

/// Solve the square rational system `A x = b` (A invertible).
fn solve_rat(a: Vec<Vec<Rat>>, b: Vec<Rat>) -> Vec<Rat> {
    let n = a.len();
    let mut m: Vec<Vec<Rat>> = a
        .into_iter()
        .zip(b.into_iter())
        .map(|(mut row, rhs)| {
            row.push(rhs);
            row
        })
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .find(|&r| !m[r][col].is_zero())
            .expect("matrix is invertible");
        m.swap(col, piv);
        let d = m[col][col].clone();
        for c in col..=n {
            m[col][c] = &m[col][c] / &d;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in col..=n {
                    let sub = &f * &m[col][c];
                    m[r][c] = &m[r][c] - &sub;
                }
            }
        }
    }
    (0..n).map(|r| m[r][n].clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modelset::{ModelSetSpec, Preset};
    use crate::rat_frac;

    fn dir(n: u32, coeffs: &[i64]) -> Direction {
        Direction::new(CycNum::from_int_coeffs(n, coeffs)).unwrap()
    }

    fn line(n: u32, base: &[i64], d: &Direction) -> SupportLine {
        SupportLine {
            base: CycNum::from_int_coeffs(n, base),
            direction: d.clone(),
        }
    }

    #[test]
    fn intersect_examples() {
        let d1 = dir(4, &[1, 0]);
        let d2 = dir(4, &[0, 1]);
        let g = intersect_lines(&line(4, &[0, 0], &d1), &line(4, &[0, 0], &d2)).unwrap();
        assert!(g.is_zero());

        // direction 1+i through 0, direction 1-2i through 1
        let da = dir(4, &[1, 1]);
        let db = dir(4, &[1, -2]);
        let g = intersect_lines(&line(4, &[0, 0], &da), &line(4, &[1, 0], &db)).unwrap();
        let expect = CycNum::from_rational(4, rat_frac(2, 3))
            + CycNum::root(4).scale(&rat_frac(2, 3));
        assert_eq!(g, expect);
        assert!(!g.is_in_ring());

        // common base point
        let g = intersect_lines(&line(4, &[3, 2], &da), &line(4, &[3, 2], &db)).unwrap();
        assert_eq!(g, CycNum::from_int_coeffs(4, &[3, 2]));

        // parallel
        assert!(intersect_lines(&line(4, &[0, 0], &da), &line(4, &[1, 0], &da)).is_err());
    }

    #[test]
    fn module_index_examples() {
        assert_eq!(
            module_index(&dir(4, &[1, 1]), &dir(4, &[1, -2])).unwrap(),
            3
        );
        assert_eq!(module_index(&dir(8, &[1, 0]), &dir(8, &[0, 0, 1])).unwrap(), 2);
        for n in [5u32, 8, 12] {
            assert_eq!(module_index(&dir(n, &[1, 0]), &dir(n, &[0, 1])).unwrap(), 1);
            // 1 and gamma + zeta for real-subring gamma
            let theta = CycNum::root(n) + CycNum::root_power(n, -1);
            let gamma = &(&theta * &theta) - &theta; // element of the real subring
            let o2 = Direction::new(&gamma + &CycNum::root(n)).unwrap();
            assert_eq!(module_index(&dir(n, &[1, 0]), &o2).unwrap(), 1);
        }
    }

    fn square_instance() -> XRayInstance {
        let spec = ModelSetSpec::from_preset(Preset::Square);
        let pts: Vec<CycNum> = (0..3)
            .flat_map(|a| (0..3).map(move |b| CycNum::from_int_coeffs(4, &[a, b])))
            .collect();
        XRayInstance::from_points(spec, &[dir(4, &[1, 1]), dir(4, &[1, -2])], &pts).unwrap()
    }

    #[test]
    fn grid_roundtrip_unit_square() {
        let spec = ModelSetSpec::from_preset(Preset::Square);
        let pts = vec![
            CycNum::zero(4),
            CycNum::one(4),
            CycNum::root(4),
            CycNum::one(4) + CycNum::root(4),
        ];
        let inst =
            XRayInstance::from_points(spec, &[dir(4, &[1, 0]), dir(4, &[0, 1])], &pts).unwrap();
        let grid = build_grid(&inst);
        assert_eq!(grid.len(), 4);
        let mut got: Vec<CycNum> = grid.iter().map(|g| g.position.clone()).collect();
        got.sort();
        let mut want = pts.clone();
        want.sort();
        assert_eq!(got, want);
    }

    #[test]
    fn decompose_three_classes_square_lattice() {
        let inst = square_instance();
        let grid = build_grid(&inst);
        assert!(grid.len() <= 9 * 9);
        let cls = decompose(&grid);
        assert_eq!(cls.classes.len(), 3);
        assert_eq!(cls.iterations, 3);
        // every grid point lies in the module of the two directions
        let (o1, o2) = (&inst.xrays[0].direction, &inst.xrays[1].direction);
        for g in &grid {
            assert!(in_module(o1, o2, &g.position).unwrap());
        }
    }

    #[test]
    fn decompose_two_classes_ab() {
        let spec = ModelSetSpec::from_preset(Preset::AmmannBeenker);
        let patch = spec.generate_patch(&crate::rat_int(2));
        let dirs = [dir(8, &[1, 0]), dir(8, &[0, 0, 1])];
        let inst = XRayInstance::from_points(spec, &dirs, &patch.points).unwrap();
        let grid = build_grid(&inst);
        let cls = decompose(&grid);
        assert_eq!(cls.classes.len(), 2);
        assert!(cls.classes.len() as u64 <= module_index(&dirs[0], &dirs[1]).unwrap());
    }

    #[test]
    fn decompose_matches_bruteforce() {
        let inst = square_instance();
        let grid = build_grid(&inst);
        assert!(grid.len() <= 60);
        let cls = decompose(&grid);
        // brute force: all-pairs relation
        let mut brute: Vec<Vec<&GridPoint>> = Vec::new();
        'next: for g in &grid {
            for class in brute.iter_mut() {
                if (&g.position - &class[0].position).is_in_ring() {
                    class.push(g);
                    continue 'next;
                }
            }
            brute.push(vec![g]);
        }
        assert_eq!(cls.classes.len(), brute.len());
        for class in &cls.classes {
            let found = brute.iter().any(|b| {
                b.len() == class.len()
                    && class
                        .iter()
                        .all(|g| b.iter().any(|h| h.position == g.position))
            });
            assert!(found);
        }
    }

    #[test]
    fn grid_all_integer_points_single_class() {
        let grid: Vec<GridPoint> = (0..5)
            .map(|k| GridPoint {
                position: CycNum::from_int_coeffs(8, &[k, 1 - k, 2]),
                line_keys: vec![],
            })
            .collect();
        assert_eq!(decompose(&grid).classes.len(), 1);
    }
}
