//! Windows, cut-and-project model-set specifications, patch generation
//! inside a physical disk, membership tests, and the named presets
//! (square, triangle, Ammann-Beenker, Tuebingen triangle, shield).

use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::cyclotomic::{CycError, CycNum, GaloisMap, StarMap};
use crate::geometry::{dot, geometry_index, i_unit, lift, InternalPoint};
use crate::Rat;

/// The named model-set presets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    Square,
    Triangle,
    AmmannBeenker,
    Tuebingen,
    Shield,
}

impl Preset {
    pub fn parse(name: &str) -> Result<Preset, CycError> {
        match name {
            "square" => Ok(Preset::Square),
            "triangle" => Ok(Preset::Triangle),
            "ammann_beenker" => Ok(Preset::AmmannBeenker),
            "tuebingen" => Ok(Preset::Tuebingen),
            "shield" => Ok(Preset::Shield),
            _ => Err(CycError::Invalid(format!("unknown preset {name:?}"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Preset::Square => "square",
            Preset::Triangle => "triangle",
            Preset::AmmannBeenker => "ammann_beenker",
            Preset::Tuebingen => "tuebingen",
            Preset::Shield => "shield",
        }
    }

    /// The base index, star map and exact window of the preset.
    pub fn build(&self) -> (u32, StarMap, Window) {
        match self {
            Preset::Square => (4, StarMap::trivial(4), Window::trivial(geometry_index(4))),
            Preset::Triangle => (3, StarMap::trivial(3), Window::trivial(geometry_index(3))),
            Preset::AmmannBeenker => {
                // regular octagon of unit edge length:
                // circumradius 1 / (2 sin(pi/8)), 2 sin(pi/8) = -i (z16 - z16^-1)
                let m = 16;
                let two_sin = two_sin_of_basic_angle(m);
                let radius = two_sin.inverse().unwrap();
                (8, StarMap::new(8, vec![3]).unwrap(), Window::regular_polygon(m, radius))
            }
            Preset::Tuebingen => {
                // regular decagon of edge length tau / sqrt(tau + 2),
                // circumradius tau / (2 sin(pi/5)) with
                // 2 sin(pi/5) = -i (z20^2 - z20^-2)
                let m = 20;
                let tau = CycNum::root_power(m, 2) + CycNum::root_power(m, -2);
                let i = i_unit(m);
                let two_sin = -&(&i * &(CycNum::root_power(m, 2) - CycNum::root_power(m, -2)));
                let radius = &tau * &two_sin.inverse().unwrap();
                (5, StarMap::new(5, vec![2]).unwrap(), Window::regular_polygon(m, radius))
            }
            Preset::Shield => {
                // regular dodecagon of unit edge length:
                // circumradius 1 / (2 sin(pi/12))
                let m = 24;
                let two_sin = two_sin_of_basic_angle(m);
                let radius = two_sin.inverse().unwrap();
                (12, StarMap::new(12, vec![5]).unwrap(), Window::regular_polygon(m, radius))
            }
        }
    }
}

/// `2 sin(pi/m) = -i (zeta_{2m'} - zeta_{2m'}^-1)` with `2m' = m` here:
/// for geometry index `m`, this is `2 sin(2 pi / (2m)) = 2 sin(pi/m)`.
fn two_sin_of_basic_angle(m: u32) -> CycNum {
    let i = i_unit(m);
    -&(&i * &(CycNum::root(m) - CycNum::root_power(m, -1)))
}

/// One open halfspace `{x | Re(conj(normal) x) < offset}` of a window,
/// with the plane vector `normal` stored as a complex cyclotomic number.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Halfspace {
    pub normal: CycNum,
    pub offset: CycNum,
}

/// An open convex polygon in internal space, cut out by exact
/// halfspaces over the geometry field; empty halfspace list encodes the
/// trivial zero-dimensional window `{0}` of the crystallographic cases.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub n_geom: u32,
    pub halfspaces: Vec<Halfspace>,
    /// Set when the window came from a named preset (round-trips in JSON).
    pub preset: Option<Preset>,
}

impl Window {
    pub fn trivial(n_geom: u32) -> Window {
        Window {
            n_geom,
            halfspaces: Vec::new(),
            preset: None,
        }
    }

    pub fn from_halfspaces(n_geom: u32, halfspaces: Vec<Halfspace>) -> Window {
        for h in &halfspaces {
            assert!(!h.normal.is_zero(), "halfspace normal must be nonzero");
            assert_eq!(h.normal.index(), n_geom);
            assert_eq!(h.offset.index(), n_geom);
        }
        Window {
            n_geom,
            halfspaces,
            preset: None,
        }
    }

    /// The regular `m`-gon (`m = n_geom / 2`) with the given exact
    /// circumradius, vertices at `R zeta^{2k+1}` (rotated by pi/m).
    pub fn regular_polygon(n_geom: u32, circumradius: CycNum) -> Window {
        let m = (n_geom / 2) as i64;
        let mut halfspaces = Vec::new();
        for k in 0..m {
            let v = &CycNum::root_power(n_geom, 2 * k + 1) * &circumradius;
            let u = CycNum::root_power(n_geom, 2 * k + 2);
            let b = dot(&u, &v);
            halfspaces.push(Halfspace { normal: u, offset: b });
        }
        Window {
            n_geom,
            halfspaces,
            preset: None,
        }
    }

    /// Internal dimension: 0 for the trivial window, else 2.
    pub fn dim(&self) -> usize {
        if self.halfspaces.is_empty() {
            0
        } else {
            2
        }
    }

    /// Exact containment: strict demands every constraint `< 0`,
    /// non-strict allows boundary (`<= 0`).
    pub fn contains(&self, p: &InternalPoint, strict: bool) -> bool {
        if self.dim() == 0 {
            return p.z.is_zero() || !strict;
        }
        self.halfspaces.iter().all(|h| {
            let v = &dot(&h.normal, &p.z) - &h.offset;
            let s = v.sign_exact().expect("halfspace value is real");
            if strict {
                s < 0
            } else {
                s <= 0
            }
        })
    }

    /// True iff `p` lies on the boundary of the closed window: all
    /// constraints `<= 0` with at least one exactly `0`.
    pub fn on_boundary(&self, p: &InternalPoint) -> bool {
        let mut any_zero = false;
        for h in &self.halfspaces {
            let v = &dot(&h.normal, &p.z) - &h.offset;
            match v.sign_exact().expect("halfspace value is real") {
                1 => return false,
                0 => any_zero = true,
                _ => {}
            }
        }
        any_zero
    }

    /// Exact vertices of the (bounded) polygon: pairwise constraint
    /// intersections that satisfy every other constraint non-strictly.
    pub fn vertices(&self) -> Vec<InternalPoint> {
        let i = i_unit(self.n_geom);
        let mut out: Vec<InternalPoint> = Vec::new();
        for a in 0..self.halfspaces.len() {
            for b in (a + 1)..self.halfspaces.len() {
                let ha = &self.halfspaces[a];
                let hb = &self.halfspaces[b];
                let (ax, ay) = re_im(&ha.normal);
                let (bx, by) = re_im(&hb.normal);
                let det = &(&ax * &by) - &(&ay * &bx);
                if det.is_zero() {
                    continue;
                }
                let inv = det.inverse().unwrap();
                let x = &(&(&ha.offset * &by) - &(&hb.offset * &ay)) * &inv;
                let y = &(&(&ax * &hb.offset) - &(&bx * &ha.offset)) * &inv;
                let p = InternalPoint::new(&x + &(&i * &y));
                if self.contains(&p, false) && !out.contains(&p) {
                    out.push(p);
                }
            }
        }
        out
    }

    /// An f64 upper bound on `|x|` over the closed window.
    pub fn bounding_radius_f64(&self) -> f64 {
        let mut r: f64 = 0.0;
        for v in self.vertices() {
            if let Some((x, y, e)) = v.approx() {
                r = r.max(x.hypot(y) + e);
            }
        }
        r * (1.0 + 1e-9) + 1e-9
    }
}

fn re_im(z: &CycNum) -> (CycNum, CycNum) {
    let p = InternalPoint::new(z.clone());
    (p.re(), p.im())
}

/// A cut-and-project specification: base index, star map, window and an
/// internal translation `tau` (physical translation is fixed at 0 by
/// convention; callers handle physical offsets themselves).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModelSetSpecRepr", into = "ModelSetSpecRepr")]
pub struct ModelSetSpec {
    pub n: u32,
    pub star: StarMap,
    pub window: Window,
    /// Internal translation, a complex point of the geometry field.
    pub tau: InternalPoint,
}

#[derive(Serialize, Deserialize)]
struct ModelSetSpecRepr {
    n: u32,
    star_exponents: Vec<u32>,
    window: WindowRepr,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tau: Option<CycNum>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum WindowRepr {
    Preset { preset: Preset },
    Explicit { n_geom: u32, halfspaces: Vec<Halfspace> },
}

impl From<ModelSetSpec> for ModelSetSpecRepr {
    fn from(s: ModelSetSpec) -> Self {
        let window = match s.window.preset {
            Some(p) => WindowRepr::Preset { preset: p },
            None => WindowRepr::Explicit {
                n_geom: s.window.n_geom,
                halfspaces: s.window.halfspaces.clone(),
            },
        };
        ModelSetSpecRepr {
            n: s.n,
            star_exponents: s.star.exponents.clone(),
            window,
            tau: if s.tau.z.is_zero() { None } else { Some(s.tau.z) },
        }
    }
}

impl TryFrom<ModelSetSpecRepr> for ModelSetSpec {
    type Error = String;
    fn try_from(r: ModelSetSpecRepr) -> Result<Self, Self::Error> {
        let mut spec = match r.window {
            WindowRepr::Preset { preset } => {
                let s = ModelSetSpec::from_preset(preset);
                if s.n != r.n {
                    return Err(format!(
                        "preset {} has n = {}, file says {}",
                        preset.name(),
                        s.n,
                        r.n
                    ));
                }
                if !r.star_exponents.is_empty() && r.star_exponents != s.star.exponents {
                    return Err("star exponents disagree with preset".into());
                }
                s
            }
            WindowRepr::Explicit { n_geom, halfspaces } => {
                let star = if r.star_exponents.is_empty() {
                    StarMap::trivial(r.n)
                } else {
                    StarMap::new(r.n, r.star_exponents).map_err(|e| e.to_string())?
                };
                ModelSetSpec {
                    n: r.n,
                    star,
                    window: Window::from_halfspaces(n_geom, halfspaces),
                    tau: InternalPoint::zero(n_geom),
                }
            }
        };
        if let Some(tau) = r.tau {
            if tau.index() != spec.window.n_geom {
                return Err(format!(
                    "tau lives in index {}, window geometry is {}",
                    tau.index(),
                    spec.window.n_geom
                ));
            }
            spec.tau = InternalPoint::new(tau);
        }
        Ok(spec)
    }
}

/// A finite patch: the model-set points inside a physical disk, sorted
/// by the canonical scalar order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Patch {
    pub points: Vec<CycNum>,
    #[serde(with = "crate::rat_string")]
    pub radius: Rat,
}

impl ModelSetSpec {
    pub fn from_preset(p: Preset) -> ModelSetSpec {
        let (n, star, mut window) = p.build();
        window.preset = Some(p);
        let n_geom = window.n_geom;
        ModelSetSpec {
            n,
            star,
            window,
            tau: InternalPoint::zero(n_geom),
        }
    }

    pub fn with_tau(mut self, tau: InternalPoint) -> ModelSetSpec {
        assert_eq!(tau.index(), self.window.n_geom);
        self.tau = tau;
        self
    }

    /// Star image of a physical point as a point of internal space,
    /// lifted into the geometry field. Zero for the trivial star map.
    pub fn star_point(&self, z: &CycNum) -> InternalPoint {
        if self.star.is_trivial() {
            return InternalPoint::zero(self.window.n_geom);
        }
        let a = self.star.exponents[0];
        let img = GaloisMap::new(self.n, a).unwrap().apply(z);
        InternalPoint::new(lift(&img, self.window.n_geom))
    }

    /// Exact model-set membership: `z` is a cyclotomic integer and its
    /// star image lies strictly inside `tau + W` (open window).
    pub fn membership(&self, z: &CycNum) -> bool {
        assert_eq!(z.index(), self.n);
        if !z.is_in_ring() {
            return false;
        }
        if self.window.dim() == 0 {
            return true;
        }
        let p = self.star_point(z).sub(&self.tau);
        self.window.contains(&p, true)
    }

    /// True iff the star image of `z` lies on the boundary of the
    /// closed translated window.
    pub fn on_window_boundary(&self, z: &CycNum) -> bool {
        if self.window.dim() == 0 {
            return false;
        }
        let p = self.star_point(z).sub(&self.tau);
        self.window.on_boundary(&p)
    }

    /// All model-set points `z` with `|z| <= radius` (exact test),
    /// found by exhaustive enumeration of a certified coefficient box
    /// of the Minkowski embedding.
    pub fn generate_patch(&self, radius: &Rat) -> Patch {
        assert!(radius.is_positive());
        let mut points: Vec<CycNum> = self
            .enumerate_disk(radius)
            .into_iter()
            .filter(|z| self.membership(z))
            .collect();
        points.sort();
        Patch {
            points,
            radius: radius.clone(),
        }
    }

    /// Finite genericity certificate: true iff no cyclotomic integer in
    /// the disk has its star image on the boundary of `tau + W`.
    pub fn genericity_check(&self, patch_radius: &Rat) -> bool {
        if self.window.dim() == 0 {
            return true;
        }
        self.enumerate_disk(patch_radius)
            .into_iter()
            .all(|z| !self.on_window_boundary(&z))
    }

    /// All `z` in the ring of integers with `|z| <= radius` exactly and
    /// star image within the window's bounding disk (slightly widened so
    /// that boundary points are never missed).
    fn enumerate_disk(&self, radius: &Rat) -> Vec<CycNum> {
        let phi_n = crate::cyclotomic::phi(self.n) as usize;
        let r_phys = radius.to_f64().expect("radius fits in f64");
        let tau_norm = {
            let (x, y, e) = self.tau.approx().unwrap_or((0.0, 0.0, 0.0));
            x.hypot(y) + e
        };
        let r_int = if self.window.dim() == 0 {
            0.0
        } else {
            self.window.bounding_radius_f64() + tau_norm
        };

        // rows of the Minkowski embedding: (Re, Im) of every chosen
        // embedding applied to each power-basis vector
        let mut exps: Vec<u32> = vec![1];
        exps.extend(self.star.exponents.iter().copied());
        let mut mat = vec![vec![0.0f64; phi_n]; phi_n];
        for (ei, &a) in exps.iter().enumerate() {
            for j in 0..phi_n {
                let ang = 2.0 * std::f64::consts::PI * ((a as u64 * j as u64) % self.n as u64)
                    as f64
                    / self.n as f64;
                mat[2 * ei][j] = ang.cos();
                mat[2 * ei + 1][j] = ang.sin();
            }
        }
        let inv = invert_matrix(&mat).expect("Minkowski embedding is full-rank");
        let mut bound_rows = vec![r_phys; 2];
        bound_rows.extend(vec![r_int.max(1e-9); phi_n.saturating_sub(2)]);

        // coefficient box: |c_j| <= sum_k |inv[j][k]| * bound_k, padded
        let mut box_bound = vec![0i64; phi_n];
        for j in 0..phi_n {
            let mut b = 0.0;
            for k in 0..phi_n {
                b += inv[j][k].abs() * bound_rows[k];
            }
            box_bound[j] = (b * (1.0 + 1e-9)).floor() as i64 + 1;
        }

        // cheap f64 prefilter coordinates per basis vector
        let slack = 1e-6;
        let mut out = Vec::new();
        let mut c = vec![0i64; phi_n];
        for j in 0..phi_n {
            c[j] = -box_bound[j];
        }
        'outer: loop {
            // physical and internal f64 positions
            let mut keep = true;
            for (ei, _) in exps.iter().enumerate() {
                let (mut x, mut y) = (0.0, 0.0);
                for j in 0..phi_n {
                    x += c[j] as f64 * mat[2 * ei][j];
                    y += c[j] as f64 * mat[2 * ei + 1][j];
                }
                let lim = if ei == 0 { r_phys } else { r_int };
                let scale: f64 = c.iter().map(|v| v.abs() as f64).sum();
                if x.hypot(y) > lim + slack * (1.0 + scale) + 1e-3 {
                    keep = false;
                    break;
                }
            }
            if keep {
                let z = CycNum::from_int_coeffs(self.n, &c);
                // exact disk test |z|^2 <= radius^2
                let norm = &z * &z.conjugate();
                let diff = &norm - &CycNum::from_rational(self.n, radius * radius);
                if diff.sign_exact().expect("norm is real") <= 0 {
                    out.push(z);
                }
            }
            // advance mixed-radix counter
            for j in 0..phi_n {
                c[j] += 1;
                if c[j] <= box_bound[j] {
                    continue 'outer;
                }
                c[j] = -box_bound[j];
            }
            break;
        }
        out
    }
}

/// Gauss-Jordan inverse of a small matrix; `None` if singular.
fn invert_matrix(m: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = m.len();
    let mut a: Vec<Vec<f64>> = m.iter().map(|r| {
        let mut row = r.clone();
        row.resize(2 * n, 0.0);
        row
    }).collect();
    for i in 0..n {
        a[i][n + i] = 1.0;
    }
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, piv);
        let d = a[col][col];
        for v in a[col].iter_mut() {
            *v /= d;
        }
        for row in 0..n {
            if row != col && a[row][col] != 0.0 {
                let f = a[row][col];
                for k in 0..2 * n {
                    a[row][k] -= f * a[col][k];
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}
