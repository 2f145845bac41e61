//! The consistency / reconstruction / uniqueness pipeline: validate
//! totals, build and decompose the grid, separate each class's star
//! image by window translates, and solve each anchored instance — by
//! integral max-flow for two directions, exhaustively at desk scale for
//! three or more.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cyclotomic::CycNum;
use crate::geometry::InternalPoint;
use crate::grid::{build_grid, decompose, GridPoint};
use crate::modelset::ModelSetSpec;
use crate::separation::{evaluate_subset, separate};
use crate::xray::{line_key, Direction, XRayError, XRayInstance};

/// Hard cap on candidate size for the exhaustive (three or more
/// directions) anchored solver.
pub const EXHAUSTIVE_CAP: usize = 30;

#[derive(Debug, Error)]
pub enum TomoError {
    #[error(transparent)]
    XRay(#[from] XRayError),
    #[error("candidate of size {0} exceeds the exhaustive-solver cap {EXHAUSTIVE_CAP}")]
    TooLarge(usize),
    #[error("point set is not contained in any admissible window translate")]
    NotInWindowSet,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TomographyStatus {
    Consistent,
    Inconsistent,
    Unique,
    NonUnique,
}

/// Outcome of a tomography query. Any reported solution reproduces the
/// input X-rays exactly; `witness` is the internal translation whose
/// window translate contains the solution (absent for the
/// crystallographic cases), `provenance` the (class, separable-subset)
/// indices the solution came from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TomographyResult {
    pub status: TomographyStatus,
    pub solution: Option<Vec<CycNum>>,
    pub second_solution: Option<Vec<CycNum>>,
    pub witness: Option<CycNum>,
    pub provenance: Option<(usize, usize)>,
}

impl TomographyResult {
    fn inconsistent() -> Self {
        TomographyResult {
            status: TomographyStatus::Inconsistent,
            solution: None,
            second_solution: None,
            witness: None,
            provenance: None,
        }
    }
}

/// A maximal candidate set: points of one grid equivalence class whose
/// star images fit in a common window translate.
#[derive(Clone, Debug)]
pub struct CandidateSet {
    pub points: Vec<GridPoint>,
    pub witness: Option<CycNum>,
    /// (class index, separable-subset index)
    pub provenance: (usize, usize),
}

/// All candidate sets of the instance with at least `min_card` points,
/// in deterministic order. Only inclusion-maximal separable subsets are
/// kept: a solution inside any member is inside a maximal one.
pub fn candidate_sets(
    inst: &XRayInstance,
    min_card: u64,
) -> Result<Vec<CandidateSet>, TomoError> {
    let grid = build_grid(inst);
    let classes = decompose(&grid).classes;
    let mut out = Vec::new();
    for (ci, class) in classes.iter().enumerate() {
        if (class.len() as u64) < min_card {
            continue;
        }
        if inst.spec.window.dim() == 0 {
            // trivial internal space: the class itself is the candidate
            out.push(CandidateSet {
                points: class.clone(),
                witness: None,
                provenance: (ci, 0),
            });
            continue;
        }
        let star_points: Vec<InternalPoint> = class
            .iter()
            .map(|g| inst.spec.star_point(&g.position))
            .collect();
        let family = separate(&inst.spec.window, &star_points);
        // keep inclusion-maximal members of sufficient size; subsets
        // are compared as bitmasks, largest first, against the maximal
        // ones accepted so far (any strict superset of a member is
        // contained in some maximal member of larger size)
        let words = class.len().div_ceil(64);
        let mask_of = |indices: &[usize]| {
            let mut m = vec![0u64; words];
            for &x in indices {
                m[x / 64] |= 1 << (x % 64);
            }
            m
        };
        let mut order: Vec<usize> = (0..family.members.len()).collect();
        order.sort_by_key(|&a| std::cmp::Reverse(family.members[a].indices.len()));
        let mut maximal_masks: Vec<(usize, Vec<u64>)> = Vec::new();
        let mut maximal: Vec<usize> = Vec::new();
        for a in order {
            let ia = &family.members[a].indices;
            let ma = mask_of(ia);
            let dominated = maximal_masks.iter().any(|(len, mb)| {
                *len > ia.len() && ma.iter().zip(mb.iter()).all(|(x, y)| x & y == *x)
            });
            if !dominated {
                maximal_masks.push((ia.len(), ma));
                if (ia.len() as u64) >= min_card {
                    maximal.push(a);
                }
            }
        }
        maximal.sort_unstable();
        for (si, mi) in maximal.into_iter().enumerate() {
            let m = &family.members[mi];
            out.push(CandidateSet {
                points: m.indices.iter().map(|&j| class[j].clone()).collect(),
                witness: Some(m.witness.clone()),
                provenance: (ci, si),
            });
        }
    }
    Ok(out)
}

// ---- X-ray comparison ----

/// Line-count profile of a point set in one direction (points need not
/// be ring elements — solutions may live in a translated class).
fn profile(points: &[CycNum], o: &Direction) -> BTreeMap<CycNum, u64> {
    let mut m = BTreeMap::new();
    for z in points {
        *m.entry(line_key(o, z)).or_insert(0) += 1;
    }
    m
}

/// True iff the X-rays of `points` equal the instance data exactly.
pub fn xrays_match(points: &[CycNum], inst: &XRayInstance) -> bool {
    inst.xrays.iter().all(|x| {
        let want: BTreeMap<CycNum, u64> = x
            .lines
            .iter()
            .map(|l| (line_key(&x.direction, &l.base), l.count))
            .collect();
        profile(points, &x.direction) == want
    })
}

// ---- max-flow solver (two directions) ----

struct Dinic {
    // edges stored in pairs: edge e and its reverse e ^ 1
    to: Vec<usize>,
    cap: Vec<i64>,
    adj: Vec<Vec<usize>>,
}

impl Dinic {
    fn new(n: usize) -> Self {
        Dinic {
            to: Vec::new(),
            cap: Vec::new(),
            adj: vec![Vec::new(); n],
        }
    }

    fn add_edge(&mut self, u: usize, v: usize, c: i64) -> usize {
        let id = self.to.len();
        self.to.push(v);
        self.cap.push(c);
        self.adj[u].push(id);
        self.to.push(u);
        self.cap.push(0);
        self.adj[v].push(id + 1);
        id
    }

    fn bfs(&self, s: usize, t: usize, level: &mut [i32]) -> bool {
        level.fill(-1);
        level[s] = 0;
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &e in &self.adj[u] {
                let v = self.to[e];
                if self.cap[e] > 0 && level[v] < 0 {
                    level[v] = level[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        level[t] >= 0
    }

    fn dfs(&mut self, u: usize, t: usize, f: i64, level: &[i32], it: &mut [usize]) -> i64 {
        if u == t {
            return f;
        }
        while it[u] < self.adj[u].len() {
            let e = self.adj[u][it[u]];
            let v = self.to[e];
            if self.cap[e] > 0 && level[v] == level[u] + 1 {
                let d = self.dfs(v, t, f.min(self.cap[e]), level, it);
                if d > 0 {
                    self.cap[e] -= d;
                    self.cap[e ^ 1] += d;
                    return d;
                }
            }
            it[u] += 1;
        }
        0
    }

    fn max_flow(&mut self, s: usize, t: usize) -> i64 {
        let n = self.adj.len();
        let mut flow = 0;
        let mut level = vec![-1i32; n];
        while self.bfs(s, t, &mut level) {
            let mut it = vec![0usize; n];
            loop {
                let f = self.dfs(s, t, i64::MAX, &level, &mut it);
                if f == 0 {
                    break;
                }
                flow += f;
            }
        }
        flow
    }
}

/// Solve the anchored problem on two directions by integral max-flow,
/// optionally banning one candidate point. Returns the chosen points.
fn flow_solve(
    candidate: &[GridPoint],
    inst: &XRayInstance,
    banned: Option<usize>,
) -> Option<Vec<CycNum>> {
    let n_target: i64 = inst.xrays[0].lines.iter().map(|l| l.count as i64).sum();
    let row_keys = inst.xrays[0].keys();
    let col_keys = inst.xrays[1].keys();
    let rows = row_keys.len();
    let cols = col_keys.len();
    // nodes: 0 source, 1 sink, 2.. rows, 2+rows.. cols
    let mut net = Dinic::new(2 + rows + cols);
    for (r, l) in inst.xrays[0].lines.iter().enumerate() {
        net.add_edge(0, 2 + r, l.count as i64);
    }
    for (c, l) in inst.xrays[1].lines.iter().enumerate() {
        net.add_edge(2 + rows + c, 1, l.count as i64);
    }
    let mut point_edges: Vec<(usize, usize)> = Vec::new(); // (edge id, point idx)
    for (pi, g) in candidate.iter().enumerate() {
        if banned == Some(pi) {
            continue;
        }
        let r = row_keys.iter().position(|k| *k == g.line_keys[0])?;
        let c = col_keys.iter().position(|k| *k == g.line_keys[1])?;
        let e = net.add_edge(2 + r, 2 + rows + c, 1);
        point_edges.push((e, pi));
    }
    if net.max_flow(0, 1) != n_target {
        return None;
    }
    let mut chosen: Vec<CycNum> = point_edges
        .iter()
        .filter(|&&(e, _)| net.cap[e] == 0)
        .map(|&(_, pi)| candidate[pi].position.clone())
        .collect();
    chosen.sort();
    Some(chosen)
}

/// Find a subset of the candidate with the prescribed X-rays, or
/// `None`. Two directions use max-flow; more use exhaustive search
/// (candidate size capped).
pub fn anchored_consistency(
    candidate: &[GridPoint],
    inst: &XRayInstance,
) -> Result<Option<Vec<CycNum>>, TomoError> {
    if inst.xrays.len() == 2 {
        return Ok(flow_solve(candidate, inst, None));
    }
    exhaustive_solve(candidate, inst, None)
}

/// Exhaustive anchored solver; skips a solution equal to `not_equal`.
fn exhaustive_solve(
    candidate: &[GridPoint],
    inst: &XRayInstance,
    not_equal: Option<&[CycNum]>,
) -> Result<Option<Vec<CycNum>>, TomoError> {
    use itertools::Itertools;
    if candidate.len() > EXHAUSTIVE_CAP {
        return Err(TomoError::TooLarge(candidate.len()));
    }
    let n = inst.xrays[0].total() as usize;
    if n > candidate.len() {
        return Ok(None);
    }
    for combo in (0..candidate.len()).combinations(n) {
        let mut pts: Vec<CycNum> =
            combo.iter().map(|&i| candidate[i].position.clone()).collect();
        pts.sort();
        if let Some(f) = not_equal {
            if pts == f {
                continue;
            }
        }
        if xrays_match(&pts, inst) {
            return Ok(Some(pts));
        }
    }
    Ok(None)
}

/// Search the candidate for a solution different from `f` (two
/// directions: re-run the flow with each point of `f` banned in turn).
fn alternative_solve(
    candidate: &[GridPoint],
    inst: &XRayInstance,
    f: &[CycNum],
) -> Result<Option<Vec<CycNum>>, TomoError> {
    if inst.xrays.len() == 2 {
        for pi in 0..candidate.len() {
            if !f.contains(&candidate[pi].position) {
                continue;
            }
            if let Some(alt) = flow_solve(candidate, inst, Some(pi)) {
                if alt != f {
                    return Ok(Some(alt));
                }
            }
        }
        return Ok(None);
    }
    exhaustive_solve(candidate, inst, Some(f))
}

fn run_consistency(inst: &XRayInstance) -> Result<TomographyResult, TomoError> {
    let n = match inst.validate() {
        Ok(n) => n,
        Err(XRayError::TotalsMismatch(_)) => return Ok(TomographyResult::inconsistent()),
        Err(e) => return Err(e.into()),
    };
    if n == 0 {
        return Ok(TomographyResult {
            status: TomographyStatus::Consistent,
            solution: Some(Vec::new()),
            second_solution: None,
            witness: None,
            provenance: None,
        });
    }
    for cand in candidate_sets(inst, n)? {
        if let Some(solution) = anchored_consistency(&cand.points, inst)? {
            return Ok(TomographyResult {
                status: TomographyStatus::Consistent,
                solution: Some(solution),
                second_solution: None,
                witness: cand.witness,
                provenance: Some(cand.provenance),
            });
        }
    }
    Ok(TomographyResult::inconsistent())
}

/// Decide whether some finite set has exactly the given X-rays; the
/// first solution in canonical search order is reported.
pub fn consistency(inst: &XRayInstance) -> Result<TomographyResult, TomoError> {
    run_consistency(inst)
}

/// As [`consistency`], always materializing the solution set.
pub fn reconstruct(inst: &XRayInstance) -> Result<TomographyResult, TomoError> {
    run_consistency(inst)
}

/// Decide whether a different set with the same X-rays exists in any
/// admissible window translate.
pub fn uniqueness(
    points: &[CycNum],
    directions: &[Direction],
    spec: &ModelSetSpec,
) -> Result<TomographyResult, TomoError> {
    let inst = instance_for(points, directions, spec)?;
    let mut f: Vec<CycNum> = points.to_vec();
    f.sort();
    // the queried set must itself lie in an admissible window translate
    if spec.window.dim() != 0 {
        let star: Vec<InternalPoint> = f.iter().map(|z| spec.star_point(z)).collect();
        let fits = candidate_sets(&inst, f.len() as u64)?.iter().any(|c| {
            c.witness.as_ref().map_or(false, |w| {
                let t = InternalPoint::new(w.clone());
                let sel = evaluate_subset(&spec.window, &star, &t);
                sel.len() == star.len()
            }) && f
                .iter()
                .all(|z| c.points.iter().any(|g| g.position == *z))
        });
        if !fits {
            return Err(TomoError::NotInWindowSet);
        }
    }
    let n = f.len() as u64;
    for cand in candidate_sets(&inst, n)? {
        let sol = if inst.xrays.len() == 2 {
            flow_solve(&cand.points, &inst, None)
        } else {
            exhaustive_solve(&cand.points, &inst, None)?
        };
        let Some(sol) = sol else { continue };
        let second = if sol != f {
            Some(sol)
        } else {
            alternative_solve(&cand.points, &inst, &f)?
        };
        if let Some(second) = second {
            debug_assert!(xrays_match(&second, &inst));
            return Ok(TomographyResult {
                status: TomographyStatus::NonUnique,
                solution: Some(f),
                second_solution: Some(second),
                witness: cand.witness,
                provenance: Some(cand.provenance),
            });
        }
    }
    Ok(TomographyResult {
        status: TomographyStatus::Unique,
        solution: Some(f),
        second_solution: None,
        witness: None,
        provenance: None,
    })
}

/// Build the instance of the X-rays of a concrete set. The set may live
/// in a translated copy of the ring; it is shifted to a ring point
/// before X-raying (keys must come from ring base points).
fn instance_for(
    points: &[CycNum],
    directions: &[Direction],
    spec: &ModelSetSpec,
) -> Result<XRayInstance, TomoError> {
    if points.iter().all(|z| z.is_in_ring()) {
        return Ok(XRayInstance::from_points(spec.clone(), directions, points)?);
    }
    Err(XRayError::NotInRing.into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modelset::Preset;
    use crate::rat_int;

    fn dir(n: u32, coeffs: &[i64]) -> Direction {
        Direction::new(CycNum::from_int_coeffs(n, coeffs)).unwrap()
    }

    fn square_points(coords: &[[i64; 2]]) -> Vec<CycNum> {
        coords
            .iter()
            .map(|c| CycNum::from_int_coeffs(4, &[c[0], c[1]]))
            .collect()
    }

    #[test]
    fn empty_instance_is_consistent() {
        let spec = ModelSetSpec::from_preset(Preset::Square);
        let inst =
            XRayInstance::from_points(spec, &[dir(4, &[1, 0]), dir(4, &[0, 1])], &[]).unwrap();
        let r = consistency(&inst).unwrap();
        assert_eq!(r.status, TomographyStatus::Consistent);
        assert_eq!(r.solution, Some(vec![]));
    }

    #[test]
    fn totals_mismatch_is_inconsistent() {
        let spec = ModelSetSpec::from_preset(Preset::Square);
        let pts = square_points(&[[0, 0], [1, 0]]);
        let mut inst =
            XRayInstance::from_points(spec, &[dir(4, &[1, 0]), dir(4, &[0, 1])], &pts).unwrap();
        inst.xrays[1].lines[0].count += 3;
        let r = consistency(&inst).unwrap();
        assert_eq!(r.status, TomographyStatus::Inconsistent);
    }

    #[test]
    fn row_sums_two_zero_unique_row() {
        // 2x2 grid, row sums (2, 0), column sums (1, 1)
        let spec = ModelSetSpec::from_preset(Preset::Square);
        let pts = square_points(&[[0, 0], [1, 0]]);
        let inst =
            XRayInstance::from_points(spec, &[dir(4, &[1, 0]), dir(4, &[0, 1])], &pts).unwrap();
        let r = reconstruct(&inst).unwrap();
        assert_eq!(r.status, TomographyStatus::Consistent);
        let mut want = pts.clone();
        want.sort();
        assert_eq!(r.solution.unwrap(), want);
    }

    #[test]
    fn square_roundtrip_consistent() {
        let spec = ModelSetSpec::from_preset(Preset::Square);
        let pts = square_points(&[[0, 0], [1, 0], [2, 1], [0, 2]]);
        let inst = XRayInstance::from_points(
            spec,
            &[dir(4, &[1, 1]), dir(4, &[1, -2])],
            &pts,
        )
        .unwrap();
        let r = reconstruct(&inst).unwrap();
        assert_eq!(r.status, TomographyStatus::Consistent);
        assert!(xrays_match(&r.solution.unwrap(), &inst));
    }

    #[test]
    fn ab_roundtrip_consistent() {
        let spec = ModelSetSpec::from_preset(Preset::AmmannBeenker);
        let patch = spec.generate_patch(&rat_int(2));
        let subset: Vec<CycNum> = patch.points.iter().take(5).cloned().collect();
        let dirs = [dir(8, &[1, 0]), dir(8, &[0, 1])];
        let inst = XRayInstance::from_points(spec.clone(), &dirs, &subset).unwrap();
        let r = reconstruct(&inst).unwrap();
        assert_eq!(r.status, TomographyStatus::Consistent);
        let sol = r.solution.unwrap();
        assert!(xrays_match(&sol, &inst));
        // the solution fits in the witnessed window translate
        let w = r.witness.expect("aperiodic case records a witness");
        let t = InternalPoint::new(w);
        for z in &sol {
            let p = spec.star_point(z).sub(&t);
            assert!(spec.window.contains(&p, true));
        }
    }

    #[test]
    fn single_point_unique() {
        let spec = ModelSetSpec::from_preset(Preset::Square);
        let pts = square_points(&[[2, 3]]);
        let dirs = [dir(4, &[1, 0]), dir(4, &[0, 1])];
        let r = uniqueness(&pts, &dirs, &spec).unwrap();
        assert_eq!(r.status, TomographyStatus::Unique);
    }

    #[test]
    fn lattice_square_corners_non_unique() {
        // opposite corners of the unit square: the other diagonal has
        // the same X-rays along the axes
        let spec = ModelSetSpec::from_preset(Preset::Square);
        let pts = square_points(&[[0, 0], [1, 1]]);
        let dirs = [dir(4, &[1, 0]), dir(4, &[0, 1])];
        let r = uniqueness(&pts, &dirs, &spec).unwrap();
        assert_eq!(r.status, TomographyStatus::NonUnique);
        let second = r.second_solution.unwrap();
        let mut want = square_points(&[[1, 0], [0, 1]]);
        want.sort();
        assert_eq!(second, want);
    }

    #[test]
    fn exhaustive_three_directions() {
        let spec = ModelSetSpec::from_preset(Preset::Square);
        let pts = square_points(&[[0, 0], [1, 0], [1, 1]]);
        let dirs = [dir(4, &[1, 0]), dir(4, &[0, 1]), dir(4, &[1, 1])];
        let inst = XRayInstance::from_points(spec, &dirs, &pts).unwrap();
        let r = reconstruct(&inst).unwrap();
        assert_eq!(r.status, TomographyStatus::Consistent);
        assert!(xrays_match(&r.solution.unwrap(), &inst));
    }
}
