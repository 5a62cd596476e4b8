//! Exact planar kernel: convex regions bounded by circular arcs.
//!
//! An [`ArcGon`] is the planar realization of a ball polyhedron `A^r` or of an
//! r-ball hull `conv_r(A)`. Chains are stored counterclockwise with arc angles
//! canonicalized to `[0, 2pi)`; the outward normal angle increases
//! monotonically along the traversal.

mod dual;
mod intersect;
pub mod svg;

use std::f64::consts::{PI, TAU};
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{Point, PointSet};
use crate::volumes::IntrinsicVolumes;

pub use dual::{r_hull, s_dual, DualPath, DualResult, MIN_VALIDATION_SAMPLES, RAY_COUNT};
pub use intersect::{disk_intersection, disk_intersection_points, r_dual};

/// Relative geometric tolerance for tangency, interval emptiness and stitching.
pub const EPS_GEO: f64 = 1e-9;

/// Smallest sweep an arc may have.
pub const MIN_SWEEP: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    pub fn from_angle(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Vec2 { x: c, y: s }
    }

    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn angle(self) -> f64 {
        canon(self.y.atan2(self.x))
    }

    pub fn dist(self, o: Vec2) -> f64 {
        (self - o).norm()
    }

    pub fn perp(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }

    pub fn to_point(self) -> Point {
        Point(vec![self.x, self.y])
    }

    pub fn try_from_slice(c: &[f64]) -> Result<Self> {
        match c {
            [x, y] => Ok(Vec2::new(*x, *y)),
            _ => Err(Error::Domain(format!(
                "expected a 2D point, got {} coordinates",
                c.len()
            ))),
        }
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, t: f64) -> Vec2 {
        Vec2::new(self.x * t, self.y * t)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// Maps an angle to `[0, 2pi)`.
pub fn canon(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    if t >= TAU {
        0.0
    } else {
        t
    }
}

/// Counterclockwise angular distance from `from` to `to`, in `[0, 2pi)`.
pub fn ccw_gap(from: f64, to: f64) -> f64 {
    canon(to - from)
}

/// Converts a 2D point set to planar vectors.
pub fn planar_points(a: &PointSet) -> Result<Vec<Vec2>> {
    if a.dim() != 2 {
        return Err(Error::Domain(format!(
            "expected a planar point set, got dimension {}",
            a.dim()
        )));
    }
    a.iter().map(|p| Vec2::try_from_slice(&p.0)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Disk {
    pub center: Vec2,
    pub radius: f64,
}

/// Counterclockwise circular arc from `start` sweeping `sweep` radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arc {
    pub center: Vec2,
    pub radius: f64,
    pub start: f64,
    pub sweep: f64,
}

impl Arc {
    pub fn new(center: Vec2, radius: f64, start: f64, sweep: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Domain(format!(
                "arc radius must be positive, got {radius}"
            )));
        }
        if !(sweep > MIN_SWEEP && sweep <= TAU) {
            return Err(Error::Domain(format!(
                "arc sweep must lie in (1e-12, 2pi], got {sweep}"
            )));
        }
        Ok(Arc {
            center,
            radius,
            start: canon(start),
            sweep,
        })
    }

    pub fn end(&self) -> f64 {
        canon(self.start + self.sweep)
    }

    pub fn point_at(&self, theta: f64) -> Vec2 {
        self.center + Vec2::from_angle(theta) * self.radius
    }

    pub fn start_point(&self) -> Vec2 {
        self.point_at(self.start)
    }

    pub fn end_point(&self) -> Vec2 {
        self.point_at(self.start + self.sweep)
    }

    pub fn length(&self) -> f64 {
        self.radius * self.sweep
    }

    /// Whether direction `theta` lies in the arc's closed angular range.
    pub fn contains_angle(&self, theta: f64) -> bool {
        ccw_gap(self.start, theta) <= self.sweep
    }

    fn support(&self, u: Vec2) -> f64 {
        if self.contains_angle(u.angle()) {
            self.center.dot(u) + self.radius
        } else {
            self.start_point().dot(u).max(self.end_point().dot(u))
        }
    }

    fn farthest(&self, v: Vec2) -> f64 {
        let w = self.center - v;
        let n = w.norm();
        if n <= f64::EPSILON * self.radius || self.contains_angle(w.angle()) {
            n + self.radius
        } else {
            self.start_point().dist(v).max(self.end_point().dist(v))
        }
    }

    fn nearest(&self, x: Vec2) -> Vec2 {
        let w = x - self.center;
        if w.norm() > 0.0 && self.contains_angle(w.angle()) {
            self.center + w * (self.radius / w.norm())
        } else {
            let (a, b) = (self.start_point(), self.end_point());
            if a.dist(x) <= b.dist(x) {
                a
            } else {
                b
            }
        }
    }
}

/// A convex planar region bounded by circular arcs.
#[derive(Debug, Clone, PartialEq)]
pub enum ArcGon {
    Empty,
    SinglePoint(Vec2),
    FullDisk(Disk),
    Chain(Vec<Arc>),
}

impl ArcGon {
    /// Builds a chain from arcs listed in counterclockwise order, checking
    /// that consecutive arcs meet and that the outward normal turns
    /// monotonically through exactly one revolution.
    pub fn from_arcs(arcs: Vec<Arc>) -> Result<ArcGon> {
        if arcs.is_empty() {
            return Err(Error::InternalConsistency("chain without arcs".into()));
        }
        if arcs.len() == 1 {
            let a = arcs[0];
            if (a.sweep - TAU).abs() <= EPS_GEO {
                return Ok(ArcGon::FullDisk(Disk {
                    center: a.center,
                    radius: a.radius,
                }));
            }
            return Err(Error::InternalConsistency(
                "single open arc cannot bound a region".into(),
            ));
        }
        let scale = arcs.iter().map(|a| a.radius).fold(0.0, f64::max);
        let tol = EPS_GEO * scale;
        let mut turning = 0.0;
        for (k, a) in arcs.iter().enumerate() {
            let b = &arcs[(k + 1) % arcs.len()];
            let gap = a.end_point().dist(b.start_point());
            if gap > tol {
                return Err(Error::InternalConsistency(format!(
                    "arc {k} ends {gap:e} away from the start of arc {} (tolerance {tol:e})",
                    (k + 1) % arcs.len()
                )));
            }
            let mut corner = ccw_gap(a.end(), b.start);
            if corner > PI {
                // tiny negative turn from rounding
                corner -= TAU;
            }
            if corner < -1e-7 {
                return Err(Error::InternalConsistency(format!(
                    "outward normal turns backwards by {:e} at vertex {k}",
                    -corner
                )));
            }
            turning += a.sweep + corner.max(0.0);
        }
        if (turning - TAU).abs() > 1e-6 {
            return Err(Error::InternalConsistency(format!(
                "boundary turns by {turning} instead of 2pi; not a convex chain"
            )));
        }
        Ok(ArcGon::Chain(arcs))
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, ArcGon::Empty)
    }

    pub fn arcs(&self) -> &[Arc] {
        match self {
            ArcGon::Chain(a) => a,
            _ => &[],
        }
    }

    /// Chain vertices (arc start points, in traversal order).
    pub fn vertices(&self) -> Vec<Vec2> {
        match self {
            ArcGon::Chain(arcs) => arcs.iter().map(Arc::start_point).collect(),
            ArcGon::SinglePoint(p) => vec![*p],
            _ => Vec::new(),
        }
    }

    pub fn max_radius(&self) -> f64 {
        match self {
            ArcGon::Chain(arcs) => arcs.iter().map(|a| a.radius).fold(0.0, f64::max),
            ArcGon::FullDisk(d) => d.radius,
            _ => 0.0,
        }
    }

    /// `(V_0, V_1, V_2)`: Euler characteristic, half perimeter and area.
    pub fn measures(&self) -> IntrinsicVolumes {
        match self {
            ArcGon::Empty => IntrinsicVolumes::exact(vec![0.0, 0.0, 0.0]),
            ArcGon::SinglePoint(_) => IntrinsicVolumes::exact(vec![1.0, 0.0, 0.0]),
            ArcGon::FullDisk(d) => {
                IntrinsicVolumes::exact(vec![1.0, PI * d.radius, PI * d.radius * d.radius])
            }
            ArcGon::Chain(arcs) => {
                let perimeter: f64 = arcs.iter().map(Arc::length).sum();
                let verts: Vec<Vec2> = arcs.iter().map(Arc::start_point).collect();
                let n = verts.len();
                let shoelace: f64 = (0..n)
                    .map(|i| verts[i].cross(verts[(i + 1) % n]))
                    .sum::<f64>()
                    / 2.0;
                let segments: f64 = arcs
                    .iter()
                    .map(|a| a.radius * a.radius * (a.sweep - a.sweep.sin()) / 2.0)
                    .sum();
                IntrinsicVolumes::exact(vec![1.0, perimeter / 2.0, shoelace + segments])
            }
        }
    }

    pub fn perimeter(&self) -> f64 {
        2.0 * self.measures().values[1]
    }

    pub fn area(&self) -> f64 {
        self.measures().values[2]
    }

    /// Support function `h_K(u)` for a unit vector `u`.
    pub fn support(&self, u: Vec2) -> Result<f64> {
        if (u.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!(
                "support direction must be a unit vector, |u| = {}",
                u.norm()
            )));
        }
        Ok(match self {
            ArcGon::Empty => return Err(Error::Domain("support of an empty region".into())),
            ArcGon::SinglePoint(p) => p.dot(u),
            ArcGon::FullDisk(d) => d.center.dot(u) + d.radius,
            ArcGon::Chain(arcs) => arcs
                .iter()
                .map(|a| a.support(u))
                .fold(f64::NEG_INFINITY, f64::max),
        })
    }

    /// Support value in the direction of angle `theta`.
    pub fn support_at(&self, theta: f64) -> Result<f64> {
        self.support(Vec2::from_angle(theta))
    }

    /// `max_{x in K} |x - v|`.
    pub fn farthest_distance(&self, v: Vec2) -> Result<f64> {
        Ok(match self {
            ArcGon::Empty => {
                return Err(Error::Domain("farthest distance to an empty region".into()))
            }
            ArcGon::SinglePoint(p) => p.dist(v),
            ArcGon::FullDisk(d) => d.center.dist(v) + d.radius,
            ArcGon::Chain(arcs) => arcs.iter().map(|a| a.farthest(v)).fold(0.0, f64::max),
        })
    }

    /// Membership with an absolute tolerance, via the decomposition of a chain
    /// into its vertex polygon and the circular segments cut off by each chord.
    pub fn contains(&self, x: Vec2, tol: f64) -> bool {
        match self {
            ArcGon::Empty => false,
            ArcGon::SinglePoint(p) => p.dist(x) <= tol,
            ArcGon::FullDisk(d) => d.center.dist(x) <= d.radius + tol,
            ArcGon::Chain(arcs) => {
                let verts: Vec<Vec2> = arcs.iter().map(Arc::start_point).collect();
                let n = verts.len();
                let in_polygon = n >= 3
                    && (0..n).all(|i| {
                        let (a, b) = (verts[i], verts[(i + 1) % n]);
                        let e = b - a;
                        e.cross(x - a) >= -tol * e.norm()
                    });
                if in_polygon {
                    return true;
                }
                arcs.iter().any(|arc| {
                    if arc.center.dist(x) > arc.radius + tol {
                        return false;
                    }
                    let (a, b) = (arc.start_point(), arc.end_point());
                    let e = b - a;
                    // outer side of the chord is to the right of a -> b
                    e.cross(x - a) <= tol * e.norm().max(f64::MIN_POSITIVE)
                })
            }
        }
    }

    /// Euclidean projection onto the region.
    pub fn nearest_point(&self, x: Vec2) -> Result<Vec2> {
        Ok(match self {
            ArcGon::Empty => return Err(Error::Domain("projection onto an empty region".into())),
            ArcGon::SinglePoint(p) => *p,
            ArcGon::FullDisk(d) => {
                let w = x - d.center;
                if w.norm() <= d.radius {
                    x
                } else {
                    d.center + w * (d.radius / w.norm())
                }
            }
            ArcGon::Chain(arcs) => {
                if self.contains(x, 0.0) {
                    return Ok(x);
                }
                arcs.iter()
                    .map(|a| a.nearest(x))
                    .min_by(|p, q| p.dist(x).total_cmp(&q.dist(x)))
                    .expect("chain has arcs")
            }
        })
    }

    pub fn distance_to(&self, x: Vec2) -> Result<f64> {
        Ok(self.nearest_point(x)?.dist(x))
    }

    /// Boundary points spaced by arc length, plus every vertex.
    pub fn boundary_samples(&self, n: usize) -> Vec<Vec2> {
        match self {
            ArcGon::Empty => Vec::new(),
            ArcGon::SinglePoint(p) => vec![*p],
            ArcGon::FullDisk(d) => (0..n.max(1))
                .map(|i| d.center + Vec2::from_angle(TAU * i as f64 / n.max(1) as f64) * d.radius)
                .collect(),
            ArcGon::Chain(arcs) => {
                let total: f64 = arcs.iter().map(Arc::length).sum();
                let mut out = Vec::with_capacity(n + arcs.len());
                for a in arcs {
                    let m = ((a.length() / total) * n as f64).ceil().max(1.0) as usize;
                    for j in 0..m {
                        out.push(a.point_at(a.start + a.sweep * j as f64 / m as f64));
                    }
                }
                out
            }
        }
    }

    /// A point in the relative interior (the vertex/midpoint centroid for chains).
    pub fn interior_point(&self) -> Option<Vec2> {
        match self {
            ArcGon::Empty => None,
            ArcGon::SinglePoint(p) => Some(*p),
            ArcGon::FullDisk(d) => Some(d.center),
            ArcGon::Chain(arcs) => {
                let mut acc = Vec2::default();
                for a in arcs {
                    acc = acc + a.start_point() + a.point_at(a.start + a.sweep / 2.0);
                }
                Some(acc * (1.0 / (2 * arcs.len()) as f64))
            }
        }
    }

    /// Axis-aligned bounds `(min, max)`.
    pub fn bounds(&self) -> Option<(Vec2, Vec2)> {
        if self.is_empty() {
            return None;
        }
        let h = |t: f64| self.support_at(t).expect("nonempty");
        Some((
            Vec2::new(-h(PI), -h(1.5 * PI)),
            Vec2::new(h(0.0), h(0.5 * PI)),
        ))
    }

    pub fn translated(&self, t: Vec2) -> ArcGon {
        match self {
            ArcGon::Empty => ArcGon::Empty,
            ArcGon::SinglePoint(p) => ArcGon::SinglePoint(*p + t),
            ArcGon::FullDisk(d) => ArcGon::FullDisk(Disk {
                center: d.center + t,
                radius: d.radius,
            }),
            ArcGon::Chain(arcs) => ArcGon::Chain(
                arcs.iter()
                    .map(|a| Arc {
                        center: a.center + t,
                        ..*a
                    })
                    .collect(),
            ),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&ArcGonJson::from(self)).expect("arc-gon serializes")
    }

    pub fn from_json(text: &str) -> Result<ArcGon> {
        let raw: ArcGonJson =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        raw.try_into()
    }
}

/// Hausdorff distance of two nonempty convex regions, as the largest
/// support-function gap over `n_dirs` equally spaced directions.
pub fn hausdorff(a: &ArcGon, b: &ArcGon, n_dirs: usize) -> Result<f64> {
    let mut worst = 0.0f64;
    for i in 0..n_dirs {
        let t = TAU * i as f64 / n_dirs as f64;
        worst = worst.max((a.support_at(t)? - b.support_at(t)?).abs());
    }
    Ok(worst)
}

#[derive(Debug, Serialize, Deserialize)]
struct ArcJson {
    cx: f64,
    cy: f64,
    r: f64,
    a0: f64,
    a1: f64,
}

/// Wire form. `a1 = a0 + sweep`, so it may exceed `2pi`.
#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "lowercase", deny_unknown_fields)]
enum ArcGonJson {
    Empty,
    Point { x: f64, y: f64 },
    Disk { cx: f64, cy: f64, r: f64 },
    Chain { arcs: Vec<ArcJson> },
}

impl From<&ArcGon> for ArcGonJson {
    fn from(k: &ArcGon) -> Self {
        match k {
            ArcGon::Empty => ArcGonJson::Empty,
            ArcGon::SinglePoint(p) => ArcGonJson::Point { x: p.x, y: p.y },
            ArcGon::FullDisk(d) => ArcGonJson::Disk {
                cx: d.center.x,
                cy: d.center.y,
                r: d.radius,
            },
            ArcGon::Chain(arcs) => ArcGonJson::Chain {
                arcs: arcs
                    .iter()
                    .map(|a| ArcJson {
                        cx: a.center.x,
                        cy: a.center.y,
                        r: a.radius,
                        a0: a.start,
                        a1: a.start + a.sweep,
                    })
                    .collect(),
            },
        }
    }
}

impl TryFrom<ArcGonJson> for ArcGon {
    type Error = Error;

    fn try_from(raw: ArcGonJson) -> Result<ArcGon> {
        Ok(match raw {
            ArcGonJson::Empty => ArcGon::Empty,
            ArcGonJson::Point { x, y } => ArcGon::SinglePoint(Vec2::new(x, y)),
            ArcGonJson::Disk { cx, cy, r } => {
                if r.is_nan() || r <= 0.0 {
                    return Err(Error::Parse(format!(
                        "disk radius must be positive, got {r}"
                    )));
                }
                ArcGon::FullDisk(Disk {
                    center: Vec2::new(cx, cy),
                    radius: r,
                })
            }
            ArcGonJson::Chain { arcs } => {
                let arcs = arcs
                    .into_iter()
                    .map(|a| Arc::new(Vec2::new(a.cx, a.cy), a.r, a.a0, a.a1 - a.a0))
                    .collect::<Result<Vec<_>>>()?;
                ArcGon::from_arcs(arcs)?
            }
        })
    }
}
