//! Points, point sets, balls and the intrinsic volumes of balls.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest dimension accepted by [`omega`].
pub const MAX_OMEGA_DIM: usize = 64;

/// A point of d-dimensional Euclidean space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(pub Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Point(coords)
    }

    pub fn origin(dim: usize) -> Self {
        Point(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dist(&self, other: &Point) -> f64 {
        dist(&self.0, &other.0)
    }
}

impl From<Vec<f64>> for Point {
    fn from(v: Vec<f64>) -> Self {
        Point(v)
    }
}

/// Squared Euclidean distance of two coordinate slices of equal length.
#[inline]
pub fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[inline]
pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    dist2(a, b).sqrt()
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// A labeled, nonempty configuration of points of a common dimension.
///
/// Labels are the indices of `points`. The JSON form is
/// `{"dim": d, "points": [[x1, ..., xd], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointSet {
    dim: usize,
    points: Vec<Point>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPointSet {
    dim: usize,
    points: Vec<Vec<f64>>,
}

impl PointSet {
    pub fn new(dim: usize, points: Vec<Point>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Domain("point set dimension must be positive".into()));
        }
        if points.is_empty() {
            return Err(Error::Domain(
                "point set must contain at least one point".into(),
            ));
        }
        for (i, p) in points.iter().enumerate() {
            if p.dim() != dim {
                return Err(Error::Parse(format!(
                    "point {i} has {} coordinates, expected {dim}",
                    p.dim()
                )));
            }
            if p.0.iter().any(|c| !c.is_finite()) {
                return Err(Error::Parse(format!(
                    "point {i} has a non-finite coordinate"
                )));
            }
        }
        Ok(PointSet { dim, points })
    }

    /// Builds a point set from raw coordinate rows; the dimension is taken
    /// from the first row.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let dim = rows.first().map(|r| r.len()).unwrap_or(0);
        PointSet::new(dim, rows.into_iter().map(Point).collect())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawPointSet =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        PointSet::new(raw.dim, raw.points.into_iter().map(Point).collect())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("point set serializes")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &Point {
        &self.points[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = &Point> {
        self.points.iter()
    }

    /// Coordinates laid out row-major in one buffer.
    pub fn flat(&self) -> Vec<f64> {
        self.points
            .iter()
            .flat_map(|p| p.0.iter().copied())
            .collect()
    }

    /// Applies `f` to every point, keeping labels.
    pub fn map(&self, mut f: impl FnMut(&[f64]) -> Vec<f64>) -> Result<PointSet> {
        let pts: Vec<Point> = self.points.iter().map(|p| Point(f(&p.0))).collect();
        let dim = pts[0].dim();
        PointSet::new(dim, pts)
    }

    pub fn scaled(&self, t: f64) -> PointSet {
        self.map(|c| c.iter().map(|x| x * t).collect())
            .expect("scaling preserves validity")
    }

    /// Reorders the labels: the i-th point of the result is `self[perm[i]]`.
    pub fn permuted(&self, perm: &[usize]) -> PointSet {
        PointSet {
            dim: self.dim,
            points: perm.iter().map(|&i| self.points[i].clone()).collect(),
        }
    }
}

/// Closed Euclidean ball.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Point,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Point, radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius >= 0.0) {
            return Err(Error::Domain(format!(
                "ball radius must be finite and >= 0, got {radius}"
            )));
        }
        Ok(Ball { center, radius })
    }

    pub fn contains(&self, x: &[f64], rel_tol: f64) -> bool {
        dist(&self.center.0, x) <= self.radius * (1.0 + rel_tol)
    }
}

/// Volume of the d-dimensional unit ball, `pi^(d/2) / Gamma(1 + d/2)`.
///
/// Evaluated through log-gamma so that large `d` never overflows.
pub fn omega(d: usize) -> Result<f64> {
    if d > MAX_OMEGA_DIM {
        return Err(Error::Domain(format!(
            "omega: dimension {d} exceeds {MAX_OMEGA_DIM}"
        )));
    }
    Ok(match d {
        0 => 1.0,
        1 => 2.0,
        2 => std::f64::consts::PI,
        _ => {
            let half = d as f64 / 2.0;
            (half * std::f64::consts::PI.ln() - libm::lgamma(1.0 + half)).exp()
        }
    })
}

fn ln_binomial(n: usize, k: usize) -> f64 {
    libm::lgamma(n as f64 + 1.0) - libm::lgamma(k as f64 + 1.0) - libm::lgamma((n - k) as f64 + 1.0)
}

/// `V_l` of the d-dimensional unit ball: `C(d, l) * omega_d / omega_{d-l}`.
pub fn unit_ball_intrinsic_volume(d: usize, l: usize) -> Result<f64> {
    if l > d {
        return Err(Error::Domain(format!(
            "intrinsic volume index {l} exceeds dimension {d}"
        )));
    }
    if l == 0 {
        return Ok(1.0);
    }
    if l == d {
        return omega(d);
    }
    let od = omega(d)?;
    let odl = omega(d - l)?;
    Ok(ln_binomial(d, l).exp() * od / odl)
}

/// `V_l` of a d-dimensional ball of radius `radius`.
///
/// A radius-0 ball is a point: `V_0 = 1`, `V_l = 0` for `l >= 1`.
pub fn ball_intrinsic_volume(d: usize, l: usize, radius: f64) -> Result<f64> {
    if !radius.is_finite() || radius < 0.0 {
        return Err(Error::Domain(format!(
            "ball radius must be finite and >= 0, got {radius}"
        )));
    }
    let unit = unit_ball_intrinsic_volume(d, l)?;
    if l == 0 {
        return Ok(1.0);
    }
    Ok(radius.powi(l as i32) * unit)
}

/// Radius of the d-ball whose `V_l` equals `value`.
pub fn ball_radius_for_intrinsic_volume(d: usize, l: usize, value: f64) -> Result<f64> {
    if l == 0 || l > d {
        return Err(Error::Domain(format!(
            "need 1 <= l <= d, got l = {l}, d = {d}"
        )));
    }
    let unit = unit_ball_intrinsic_volume(d, l)?;
    Ok((value.max(0.0) / unit).powf(1.0 / l as f64))
}

/// Largest pairwise distance; 0 for a single point.
pub fn diameter(s: &PointSet) -> f64 {
    let pts = s.points();
    let mut best = 0.0f64;
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            best = best.max(dist2(&pts[i].0, &pts[j].0));
        }
    }
    best.sqrt()
}

/// Smallest pairwise distance; requires at least two points.
pub fn min_pairwise_distance(s: &PointSet) -> Result<f64> {
    if s.len() < 2 {
        return Err(Error::Domain(
            "min_pairwise_distance needs at least two points".into(),
        ));
    }
    let pts = s.points();
    let mut best = f64::INFINITY;
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            best = best.min(dist2(&pts[i].0, &pts[j].0));
        }
    }
    Ok(best.sqrt())
}

/// Jung's factor `sqrt(2d / (d + 1))`.
pub fn jung_factor(d: usize) -> f64 {
    (2.0 * d as f64 / (d as f64 + 1.0)).sqrt()
}

/// `n` vertices of a regular simplex with unit edges, centered at the origin.
pub fn regular_simplex(d: usize, n: usize) -> Result<PointSet> {
    // e_i minus the centroid, written in an orthonormal basis of the hyperplane sum = 0
    if n < 2 || n > d + 1 {
        return Err(Error::Domain(format!(
            "a regular simplex with {n} vertices needs 2 <= n <= d + 1"
        )));
    }
    let m = n - 1;
    let mut rows = Vec::with_capacity(n);
    let raw: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { 1.0 } else { 0.0 } - 1.0 / n as f64)
                .collect()
        })
        .collect();
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for v in raw.iter().take(m) {
        let mut w = v.clone();
        for b in &basis {
            let c: f64 = w.iter().zip(b).map(|(x, y)| x * y).sum();
            for (wi, bi) in w.iter_mut().zip(b) {
                *wi -= c * bi;
            }
        }
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        basis.push(w.into_iter().map(|x| x / norm).collect());
    }
    let scale = 2f64.sqrt(); // edge length sqrt(2) -> 1
    for v in &raw {
        let mut row: Vec<f64> = basis
            .iter()
            .map(|b| v.iter().zip(b).map(|(x, y)| x * y).sum::<f64>() / scale)
            .collect();
        row.resize(d, 0.0);
        rows.push(row);
    }
    PointSet::from_rows(rows)
}
