//! Window separation: enumerate every subset of a finite internal-space
//! point set that can be cut out by some translate of the open window.
//!
//! The translates that select a given subset form the cells of the line
//! arrangement `{x | Re(conj(u_i) x) = Re(conj(u_i) p_j) - b_i}` over
//! all window halfspaces `i` and points `j`; the selected subset is
//! constant on each cell, so visiting one representative per cell of
//! every dimension enumerates the whole family. All predicates are
//! certified: a fast floating-point evaluation with a rigorous error
//! bound, falling back to exact cyclotomic sign computation.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::cyclotomic::CycNum;
use crate::geometry::{cross, dot, i_unit, InternalPoint};
use crate::modelset::Window;
use crate::{rat_frac, rat_int};

/// Which halfspace/point pair produced a line, and with which
/// orientation relative to the merged line's stored normal (-1 when the
/// pair's own normal is a negative real multiple of the stored one).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineTag {
    pub halfspace: usize,
    pub point: usize,
    pub orientation: i8,
}

/// One line of the separation arrangement.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrangementLine {
    /// Plane normal as a complex cyclotomic number.
    pub normal: CycNum,
    /// Real offset: the line is `{x | Re(conj(normal) x) = offset}`.
    pub offset: CycNum,
    pub tag: LineTag,
}

/// A cell of the arrangement: its sign vector over the input lines, a
/// point inside it, and its dimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell {
    pub sign_vector: Vec<i8>,
    pub representative: InternalPoint,
    pub dimension: u8,
}

/// One member of the separable family: the selected point indices and
/// an exact witnessing translation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeparableMember {
    pub indices: Vec<usize>,
    pub witness: CycNum,
}

/// The family `Sep` of all window-separable subsets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeparableFamily {
    pub members: Vec<SeparableMember>,
}

impl SeparableFamily {
    pub fn contains_subset(&self, indices: &[usize]) -> bool {
        self.members.iter().any(|m| m.indices == indices)
    }
}

/// The `l * q` arrangement lines: translate `t` selects point `j` iff
/// `Re(conj(u_i) t) > offset` for every halfspace `i` of the window.
pub fn build_arrangement(w: &Window, points: &[InternalPoint]) -> Vec<ArrangementLine> {
    assert_eq!(w.dim(), 2, "separation needs a two-dimensional window");
    let mut lines = Vec::new();
    for (j, p) in points.iter().enumerate() {
        assert_eq!(p.index(), w.n_geom);
        for (i, h) in w.halfspaces.iter().enumerate() {
            let offset = &dot(&h.normal, &p.z) - &h.offset;
            lines.push(ArrangementLine {
                normal: h.normal.clone(),
                offset,
                tag: LineTag {
                    halfspace: i,
                    point: j,
                    orientation: 1,
                },
            });
        }
    }
    lines
}

/// A merged geometric line carrying every coincident input line. The
/// normal is the representative of its parallel class, so two merged
/// lines are parallel iff they share `class_id`.
struct GeomLine {
    normal: CycNum,
    offset: CycNum,
    class_id: usize,
    tags: Vec<LineTag>,
    /// certified f64 data: (ux, uy, c, err)
    approx: (f64, f64, f64, f64),
}

impl GeomLine {
    /// Certified sign of `Re(conj(normal) t) - offset` at the exact
    /// point `t` with known certified coordinates.
    fn sign_at(&self, t: &InternalPoint, t_approx: (f64, f64, f64)) -> i8 {
        let (ux, uy, c, lerr) = self.approx;
        let (tx, ty, terr) = t_approx;
        let val = ux * tx + uy * ty - c;
        let err = terr * (ux.abs() + uy.abs() + lerr)
            + lerr * (tx.abs() + ty.abs() + 1.0)
            + 1e-12 * (val.abs() + c.abs() + 1.0)
            + 1e-300;
        if val.abs() > err {
            return if val > 0.0 { 1 } else { -1 };
        }
        let exact = &dot(&self.normal, &t.z) - &self.offset;
        exact.sign_exact().expect("arrangement value is real")
    }
}

fn approx_line(normal: &CycNum, offset: &CycNum) -> (f64, f64, f64, f64) {
    let (ux, uy, ne) = InternalPoint::new(normal.clone())
        .approx()
        .expect("normal fits in f64");
    let (c, ce) = offset.approx_real().expect("offset fits in f64");
    (ux, uy, c, ne + ce)
}

/// Merge coincident lines: each input line is rescaled so its normal
/// becomes the representative of its parallel class (normals that are
/// real multiples of each other), then lines with equal (class,
/// canonical offset) coincide. The orientation records the sign of the
/// rescaling factor.
fn merge_lines(lines: &[ArrangementLine]) -> Vec<GeomLine> {
    // distinct normal values, in first-occurrence order
    let mut value_ids: HashMap<CycNum, usize> = HashMap::new();
    let mut values: Vec<CycNum> = Vec::new();
    for l in lines {
        if !value_ids.contains_key(&l.normal) {
            value_ids.insert(l.normal.clone(), values.len());
            values.push(l.normal.clone());
        }
    }
    // parallel classes among the distinct values; per value: the class
    // id, the sign of its factor over the class representative, and the
    // inverse factor for offset rescaling
    let mut class_reps: Vec<CycNum> = Vec::new();
    let mut value_class: Vec<(usize, i8, CycNum)> = Vec::new();
    for v in &values {
        let mut found = None;
        for (ci, rep) in class_reps.iter().enumerate() {
            let ratio = v * &rep.inverse().unwrap();
            if ratio.is_real() {
                let sign = ratio.sign_exact().expect("ratio of normals is real");
                assert!(sign != 0);
                found = Some((ci, sign, ratio.inverse().unwrap()));
                break;
            }
        }
        value_class.push(found.unwrap_or_else(|| {
            class_reps.push(v.clone());
            (class_reps.len() - 1, 1, CycNum::one(v.index()))
        }));
    }

    let mut merged: Vec<GeomLine> = Vec::new();
    let mut keys: HashMap<(usize, CycNum), usize> = HashMap::new();
    for l in lines {
        let vid = value_ids[&l.normal];
        let &(ci, sign, ref lambda_inv) = &value_class[vid];
        let offset = lambda_inv * &l.offset;
        let mut tag = l.tag;
        tag.orientation = sign;
        match keys.entry((ci, offset.clone())) {
            std::collections::hash_map::Entry::Occupied(e) => {
                merged[*e.get()].tags.push(tag);
            }
            std::collections::hash_map::Entry::Vacant(e) => {
                e.insert(merged.len());
                let normal = class_reps[ci].clone();
                let approx = approx_line(&normal, &offset);
                merged.push(GeomLine {
                    normal,
                    offset,
                    class_id: ci,
                    tags: vec![tag],
                    approx,
                });
            }
        }
    }
    merged
}

/// Per-parallel-class-pair intersection coefficients: the crossing of
/// lines with offsets `(ca, cb)` is `ca * e + cb * f`.
struct PairCoeffs {
    e: CycNum,
    f: CycNum,
}

fn pair_coeffs(class_reps: &[CycNum]) -> Vec<Vec<Option<PairCoeffs>>> {
    let k = class_reps.len();
    let mut out: Vec<Vec<Option<PairCoeffs>>> = Vec::with_capacity(k);
    for a in 0..k {
        let mut row = Vec::with_capacity(k);
        for b in 0..k {
            if a == b {
                row.push(None);
                continue;
            }
            let na = &class_reps[a];
            let nb = &class_reps[b];
            let det = cross(na, nb);
            if det.is_zero() {
                row.push(None);
                continue;
            }
            let inv = det.inverse().unwrap();
            let i = i_unit(na.index());
            // v = (ca * (-i nb) + cb * (i na)) / det
            let e = &(&i * nb).scale(&-rat_int(1)) * &inv;
            let f = &(&i * na) * &inv;
            row.push(Some(PairCoeffs { e, f }));
        }
        out.push(row);
    }
    out
}

/// Certified approximate coordinates of an exact point.
fn approx_point(t: &InternalPoint) -> (f64, f64, f64) {
    t.approx().expect("point fits in f64")
}

/// Sign vector of `t` over the merged lines; entries listed in `zeros`
/// (sorted, known to vanish exactly) are set without evaluation.
fn sign_vector_known(
    geoms: &[GeomLine],
    t: &InternalPoint,
    ta: (f64, f64, f64),
    zeros: &[usize],
) -> Vec<i8> {
    let mut z = zeros.iter().peekable();
    geoms
        .iter()
        .enumerate()
        .map(|(gi, g)| {
            if z.peek() == Some(&&gi) {
                z.next();
                0
            } else {
                g.sign_at(t, ta)
            }
        })
        .collect()
}

/// Representatives of every cell of the merged-line arrangement, as
/// (point, merged sign vector) pairs, deduplicated by sign vector.
fn enumerate_cells(geoms: &[GeomLine]) -> Vec<(InternalPoint, Vec<i8>)> {
    let n_geom = geoms[0].normal.index();
    let i = i_unit(n_geom);
    let class_count = geoms.iter().map(|g| g.class_id).max().unwrap() + 1;
    let mut class_reps: Vec<CycNum> = vec![CycNum::zero(n_geom); class_count];
    for g in geoms {
        class_reps[g.class_id] = g.normal.clone();
    }
    let coeffs = pair_coeffs(&class_reps);
    // dot products between class normals, for probe-direction tracking
    let dots: Vec<Vec<CycNum>> = class_reps
        .iter()
        .map(|na| class_reps.iter().map(|nb| dot(na, nb)).collect())
        .collect();

    // per line, its offset times the intersection coefficient against
    // every other parallel class, so the inner pair loop is one add
    let prod_e: Vec<Vec<Option<CycNum>>> = geoms
        .iter()
        .map(|g| {
            (0..class_count)
                .map(|cb| {
                    coeffs[g.class_id][cb]
                        .as_ref()
                        .map(|pc| &g.offset * &pc.e)
                })
                .collect()
        })
        .collect();
    let prod_f: Vec<Vec<Option<CycNum>>> = geoms
        .iter()
        .map(|g| {
            (0..class_count)
                .map(|ca| {
                    coeffs[ca][g.class_id]
                        .as_ref()
                        .map(|pc| &g.offset * &pc.f)
                })
                .collect()
        })
        .collect();

    // all pairwise intersections; vertices deduplicated exactly, with
    // the full set of incident lines per vertex
    let mut vertex_ids: HashMap<CycNum, usize> = HashMap::new();
    let mut vertices: Vec<InternalPoint> = Vec::new();
    let mut vertex_approx: Vec<(f64, f64, f64)> = Vec::new();
    let mut incident: Vec<Vec<usize>> = Vec::new();
    let mut verts_on: Vec<Vec<usize>> = vec![Vec::new(); geoms.len()];
    for a in 0..geoms.len() {
        for b in (a + 1)..geoms.len() {
            let (ca, cb) = (geoms[a].class_id, geoms[b].class_id);
            let (Some(ea), Some(fb)) = (&prod_e[a][cb], &prod_f[b][ca]) else {
                continue;
            };
            let v = ea + fb;
            let vid = match vertex_ids.entry(v.clone()) {
                std::collections::hash_map::Entry::Occupied(e) => *e.get(),
                std::collections::hash_map::Entry::Vacant(e) => {
                    let id = vertices.len();
                    e.insert(id);
                    let p = InternalPoint::new(v);
                    vertex_approx.push(approx_point(&p));
                    vertices.push(p);
                    incident.push(Vec::new());
                    id
                }
            };
            for line in [a, b] {
                if incident[vid].last() != Some(&line) && !incident[vid].contains(&line) {
                    incident[vid].push(line);
                    verts_on[line].push(vid);
                }
            }
        }
    }
    for inc in incident.iter_mut() {
        inc.sort_unstable();
    }

    // representatives with their exactly-known zero sets
    let mut reps: Vec<(InternalPoint, Vec<usize>)> = vertices
        .iter()
        .zip(incident.iter())
        .map(|(v, inc)| (v.clone(), inc.clone()))
        .collect();

    // per line: sort vertices along the line, take midpoints and rays
    for (gi, g) in geoms.iter().enumerate() {
        let v_dir = &i * &g.normal; // direction vector of the line
        let vd = InternalPoint::new(v_dir.clone());
        let (vx, vy, ve) = vd.approx().expect("direction fits in f64");

        if verts_on[gi].is_empty() {
            // isolated line: one point on it, `c * u / |u|^2`
            let norm_inv = (&g.normal * &g.normal.conjugate()).inverse().unwrap();
            let base = &(&g.normal * &g.offset) * &norm_inv;
            reps.push((InternalPoint::new(base), vec![gi]));
            continue;
        }

        // certified approximate parameters along the line
        let mut pts: Vec<(usize, f64, f64)> = verts_on[gi]
            .iter()
            .map(|&vid| {
                let (px, py, perr) = vertex_approx[vid];
                (
                    vid,
                    vx * px + vy * py,
                    perr * (vx.abs() + vy.abs() + ve) + ve * (px.abs() + py.abs()) + 1e-12,
                )
            })
            .collect();
        pts.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
        // if any neighbouring pair is not separated beyond its error
        // bound, fall back to one exact sort of the whole line
        if pts.windows(2).any(|w| w[0].1 + w[0].2 >= w[1].1 - w[1].2) {
            let params: HashMap<usize, CycNum> = pts
                .iter()
                .map(|&(vid, _, _)| (vid, dot(&v_dir, &vertices[vid].z)))
                .collect();
            pts.sort_by(|a, b| {
                (&params[&a.0] - &params[&b.0])
                    .sign_exact()
                    .expect("line parameter is real")
                    .cmp(&0)
            });
        }

        // midpoints of consecutive (distinct) vertices
        for w in pts.windows(2) {
            let mid = InternalPoint::new(
                (&vertices[w[0].0].z + &vertices[w[1].0].z).scale(&rat_frac(1, 2)),
            );
            reps.push((mid, vec![gi]));
        }
        // ray points beyond the extreme vertices
        let first = &vertices[pts.first().unwrap().0];
        let last = &vertices[pts.last().unwrap().0];
        reps.push((InternalPoint::new(&first.z - &v_dir), vec![gi]));
        reps.push((InternalPoint::new(&last.z + &v_dir), vec![gi]));
    }

    // collect 0-/1-cells, then probe both sides of every lower-
    // dimensional representative for the adjacent 2-cells
    let mut cells: Vec<(InternalPoint, Vec<i8>)> = Vec::new();
    let mut seen: HashSet<Vec<i8>> = HashSet::new();
    let mut on_line_reps: Vec<(InternalPoint, Vec<i8>, Vec<usize>)> = Vec::new();
    for (r, zeros) in reps {
        let sv = sign_vector_known(geoms, &r, approx_point(&r), &zeros);
        debug_assert!(zeros.iter().all(|&gi| sv[gi] == 0));
        if !zeros.is_empty() {
            on_line_reps.push((r.clone(), sv.clone(), zeros));
        }
        if seen.insert(sv.clone()) {
            cells.push((r, sv));
        }
    }
    for (r, sv, zeros) in on_line_reps {
        let gi = zeros[0];
        let u = &geoms[gi].normal;
        // zero lines whose direction contains the probe direction `u`
        // stay zero on the probe; every other zero line is left
        let stay: Vec<usize> = zeros
            .iter()
            .copied()
            .filter(|&h| dots[geoms[h].class_id][geoms[gi].class_id].is_zero())
            .collect();
        for side in [1i64, -1] {
            let mut eps = rat_frac(1, 4);
            for _ in 0..200 {
                let probe =
                    InternalPoint::new(&r.z + &u.scale(&(&eps * &rat_int(side))));
                let psv = sign_vector_known(geoms, &probe, approx_point(&probe), &stay);
                // valid probe: only zero entries may have changed
                let ok = sv
                    .iter()
                    .zip(psv.iter())
                    .all(|(&s, &p)| s == 0 || s == p);
                if ok {
                    if seen.insert(psv.clone()) {
                        cells.push((probe, psv));
                    }
                    break;
                }
                eps = eps / rat_int(2);
            }
        }
    }
    cells
}

fn dimension_of(geoms: &[GeomLine], sv: &[i8]) -> u8 {
    // count parallel classes among the zero lines
    let mut classes: Vec<usize> = geoms
        .iter()
        .zip(sv.iter())
        .filter(|(_, &s)| s == 0)
        .map(|(g, _)| g.class_id)
        .collect();
    classes.sort_unstable();
    classes.dedup();
    match classes.len() {
        0 => 2,
        1 => 1,
        _ => 0,
    }
}

/// At least one representative per nonempty cell of every dimension of
/// the input arrangement, with exact sign vectors over the input lines.
pub fn cell_representatives(lines: &[ArrangementLine]) -> Vec<Cell> {
    if lines.is_empty() {
        return Vec::new();
    }
    let geoms = merge_lines(lines);
    // map each input line to (merged index, orientation)
    let line_map: Vec<(usize, i8)> = lines
        .iter()
        .map(|l| {
            for (gi, g) in geoms.iter().enumerate() {
                if let Some(t) = g
                    .tags
                    .iter()
                    .find(|t| t.halfspace == l.tag.halfspace && t.point == l.tag.point)
                {
                    return (gi, t.orientation);
                }
            }
            unreachable!("every input line is merged somewhere")
        })
        .collect();
    enumerate_cells(&geoms)
        .into_iter()
        .map(|(rep, gsv)| {
            let sign_vector: Vec<i8> =
                line_map.iter().map(|&(gi, o)| gsv[gi] * o).collect();
            let dimension = dimension_of(&geoms, &gsv);
            Cell {
                sign_vector,
                representative: rep,
                dimension,
            }
        })
        .collect()
}

/// Direct evaluation of the selected subset for translate `t`: point
/// `j` is selected iff `p_j - t` lies strictly inside the open window.
pub fn evaluate_subset(w: &Window, points: &[InternalPoint], t: &InternalPoint) -> Vec<usize> {
    points
        .iter()
        .enumerate()
        .filter(|(_, p)| w.contains(&p.sub(t), true))
        .map(|(j, _)| j)
        .collect()
}

/// Compute the full separable family of `points` under translates of
/// the open window. Every stored witness re-verifies exactly.
pub fn separate(w: &Window, points: &[InternalPoint]) -> SeparableFamily {
    assert_eq!(w.dim(), 2, "separation needs a two-dimensional window");
    let mut subsets: BTreeMap<Vec<usize>, CycNum> = BTreeMap::new();

    if !points.is_empty() {
        let lines = build_arrangement(w, points);
        let geoms = merge_lines(&lines);
        // point j selected at t iff every tag (i, j) has positive sign
        // (after orientation); gather tags per point
        let mut tags_per_point: Vec<Vec<(usize, i8)>> = vec![Vec::new(); points.len()];
        for (gi, g) in geoms.iter().enumerate() {
            for t in &g.tags {
                tags_per_point[t.point].push((gi, t.orientation));
            }
        }
        for (rep, gsv) in enumerate_cells(&geoms) {
            let subset: Vec<usize> = (0..points.len())
                .filter(|&j| {
                    tags_per_point[j]
                        .iter()
                        .all(|&(gi, o)| gsv[gi] * o > 0)
                })
                .collect();
            subsets.entry(subset).or_insert_with(|| rep.z.clone());
        }
    }

    // the empty subset is always separable: translate far away
    if !subsets.contains_key(&Vec::new()) {
        let mut k: i64 = 2;
        let far = loop {
            let bound = w.bounding_radius_f64()
                + points
                    .iter()
                    .map(|p| {
                        let (x, y, e) = p.approx().unwrap_or((0.0, 0.0, 0.0));
                        x.hypot(y) + e
                    })
                    .fold(0.0, f64::max);
            if (k as f64) > bound + 1.0 {
                let cand = InternalPoint::new(CycNum::from_integer(w.n_geom, k));
                if evaluate_subset(w, points, &cand).is_empty() {
                    break cand;
                }
            }
            k *= 2;
        };
        subsets.insert(Vec::new(), far.z);
    }

    let members: Vec<SeparableMember> = subsets
        .into_iter()
        .map(|(indices, witness)| SeparableMember { indices, witness })
        .collect();
    SeparableFamily { members }
}
