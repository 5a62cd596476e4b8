//! r-ball hulls and general s-duals `K^s = {v : max_{x in K} |x - v| <= s}`.

use std::f64::consts::{PI, TAU};

use super::{
    ccw_gap, disk_intersection_points, planar_points, r_dual, Arc, ArcGon, Disk, Vec2, EPS_GEO,
    MIN_SWEEP,
};
use crate::error::{Error, Result};
use crate::geom::{Point, PointSet};
use crate::meb::{min_enclosing_ball, DEFAULT_MEB_SEED};

/// Boundary samples used to validate a fast-path dual against the exact
/// farthest-distance predicate.
pub const MIN_VALIDATION_SAMPLES: usize = 256;

/// Number of rays cast by the bisection fallback.
pub const RAY_COUNT: usize = 4096;

const VALIDATION_TOL: f64 = 1e-8;
const HULL_IDENTITY_DIRS: usize = 360;

/// How a dual or hull was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DualPath {
    /// Closed-form special case (point, disk).
    Trivial,
    /// Intersection of radius-r disks centered at the vertices of `A^r`.
    VertexDuality,
    /// Arc-by-arc reflection of the boundary: every arc `(c, rho)` becomes
    /// `(c, s - rho)` and every vertex `w` becomes `(w, s)`, both over the
    /// reversed normal range.
    SupportDuality,
    /// Polygonal ray-bisection approximation (spindle arcs between samples).
    RayBisection,
}

impl DualPath {
    pub fn is_approximate(self) -> bool {
        self == DualPath::RayBisection
    }

    pub fn as_str(self) -> &'static str {
        match self {
            DualPath::Trivial => "trivial",
            DualPath::VertexDuality => "vertex-duality",
            DualPath::SupportDuality => "support-duality",
            DualPath::RayBisection => "ray-bisection",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualResult {
    pub body: ArcGon,
    pub path: DualPath,
}

/// The r-convex hull `conv_r(A) = (A^r)^r` of a planar point set.
///
/// Computed as the intersection of radius-r disks around the vertices of
/// `A^r`, validated by the support identity
/// `h_{A^r}(u) + h_{conv_r A}(-u) = r`; on failure the s-dual machinery
/// (support duality, then ray bisection) takes over.
pub fn r_hull(a: &PointSet, r: f64) -> Result<DualResult> {
    let pts = planar_points(a)?;
    let meb = min_enclosing_ball(a, DEFAULT_MEB_SEED);
    if meb.radius > r * (1.0 + EPS_GEO) {
        return Err(Error::HullUndefined {
            circumradius: meb.radius,
            r,
        });
    }
    let dual = r_dual(a, r)?;
    let trivial = |body| {
        Ok(DualResult {
            body,
            path: DualPath::Trivial,
        })
    };
    match &dual {
        ArcGon::Empty => Err(Error::HullUndefined {
            circumradius: meb.radius,
            r,
        }),
        ArcGon::FullDisk(_) => trivial(ArcGon::SinglePoint(pts[0])),
        ArcGon::SinglePoint(x) => trivial(ArcGon::FullDisk(Disk {
            center: *x,
            radius: r,
        })),
        ArcGon::Chain(arcs) => {
            let verts: Vec<Vec2> = arcs.iter().map(Arc::start_point).collect();
            if let Ok(body) = disk_intersection_points(&verts, &vec![r; verts.len()]) {
                if support_identity_holds(&dual, &body, r) {
                    return Ok(DualResult {
                        body,
                        path: DualPath::VertexDuality,
                    });
                }
            }
            log::debug!("vertex-duality hull failed validation; using s-dual");
            s_dual(&dual, r)
        }
    }
}

fn support_identity_holds(dual: &ArcGon, hull: &ArcGon, r: f64) -> bool {
    if hull.is_empty() {
        return false;
    }
    (0..HULL_IDENTITY_DIRS).all(|i| {
        let t = TAU * i as f64 / HULL_IDENTITY_DIRS as f64;
        match (dual.support_at(t), hull.support_at(t + PI)) {
            (Ok(a), Ok(b)) => (a + b - r).abs() <= VALIDATION_TOL * r,
            _ => false,
        }
    })
}

/// `K^s`: the set of points within distance `s` of every point of `K`.
pub fn s_dual(k: &ArcGon, s: f64) -> Result<DualResult> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::Domain(format!("s must be positive, got {s}")));
    }
    let trivial = |body| {
        Ok(DualResult {
            body,
            path: DualPath::Trivial,
        })
    };
    match k {
        ArcGon::Empty => Err(Error::Domain("s-dual of an empty region".into())),
        ArcGon::SinglePoint(p) => trivial(ArcGon::FullDisk(Disk {
            center: *p,
            radius: s,
        })),
        ArcGon::FullDisk(d) => {
            if d.radius > s * (1.0 + EPS_GEO) {
                trivial(ArcGon::Empty)
            } else if d.radius >= s * (1.0 - EPS_GEO) {
                trivial(ArcGon::SinglePoint(d.center))
            } else {
                trivial(ArcGon::FullDisk(Disk {
                    center: d.center,
                    radius: s - d.radius,
                }))
            }
        }
        ArcGon::Chain(arcs) => {
            if k.max_radius() <= s * (1.0 + EPS_GEO) {
                match support_duality(arcs, s) {
                    Ok(body) if validate_dual(k, &body, s) => {
                        return Ok(DualResult {
                            body,
                            path: DualPath::SupportDuality,
                        });
                    }
                    Ok(_) => log::debug!("support-duality s-dual failed validation"),
                    Err(e) => log::debug!("support-duality s-dual failed: {e}"),
                }
            }
            ray_bisection(k, s)
        }
    }
}

fn support_duality(arcs: &[Arc], s: f64) -> Result<ArcGon> {
    let tol = EPS_GEO * s;
    let mut out = Vec::with_capacity(2 * arcs.len());
    for (i, a) in arcs.iter().enumerate() {
        let rad = s - a.radius;
        if rad > tol {
            out.push(Arc {
                center: a.center,
                radius: rad,
                start: super::canon(a.start + PI),
                sweep: a.sweep,
            });
        }
        let next = &arcs[(i + 1) % arcs.len()];
        let corner = ccw_gap(a.end(), next.start);
        if corner > MIN_SWEEP && corner < PI {
            out.push(Arc {
                center: a.end_point(),
                radius: s,
                start: super::canon(a.end() + PI),
                sweep: corner,
            });
        }
    }
    if out.is_empty() {
        return Err(Error::InternalConsistency(
            "support duality produced no arcs".into(),
        ));
    }
    ArcGon::from_arcs(out)
}

/// Boundary points of a correct `K^s` are exactly at farthest distance `s`.
fn validate_dual(k: &ArcGon, candidate: &ArcGon, s: f64) -> bool {
    let samples = candidate.boundary_samples(MIN_VALIDATION_SAMPLES);
    samples.iter().all(|&x| match k.farthest_distance(x) {
        Ok(f) => (f - s).abs() <= VALIDATION_TOL * s,
        Err(_) => false,
    })
}

/// Polygonal reconstruction: from an interior point cast `RAY_COUNT` rays,
/// bisect `farthest_distance = s` on each, and join consecutive hits by
/// radius-s arcs (which stay inside the s-convex body).
fn ray_bisection(k: &ArcGon, s: f64) -> Result<DualResult> {
    let origin = chebyshev_point(k)?;
    let f0 = k.farthest_distance(origin)?;
    let tol = EPS_GEO * s;
    if f0 > s + tol {
        return Ok(DualResult {
            body: ArcGon::Empty,
            path: DualPath::RayBisection,
        });
    }
    if f0 >= s - tol {
        return Ok(DualResult {
            body: ArcGon::SinglePoint(origin),
            path: DualPath::RayBisection,
        });
    }
    let mut hits = Vec::with_capacity(RAY_COUNT);
    for m in 0..RAY_COUNT {
        let dir = Vec2::from_angle(TAU * m as f64 / RAY_COUNT as f64);
        let (mut lo, mut hi) = (0.0, s + f0);
        while hi - lo > 1e-13 * s {
            let mid = 0.5 * (lo + hi);
            if k.farthest_distance(origin + dir * mid)? <= s {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hits.push(origin + dir * lo);
    }
    let mut arcs = Vec::with_capacity(RAY_COUNT);
    for m in 0..RAY_COUNT {
        let (p, q) = (hits[m], hits[(m + 1) % RAY_COUNT]);
        let chord = q - p;
        let len = chord.norm();
        if len <= 1e-14 * s {
            continue;
        }
        let half = (len / (2.0 * s)).min(1.0);
        // region lies to the left of p -> q, so the center does too
        let center =
            p + chord * 0.5 + chord.perp() * ((s * s - len * len / 4.0).max(0.0).sqrt() / len);
        arcs.push(Arc {
            center,
            radius: s,
            start: (p - center).angle(),
            sweep: 2.0 * half.asin(),
        });
    }
    let body = ArcGon::from_arcs(arcs)?;
    Ok(DualResult {
        body,
        path: DualPath::RayBisection,
    })
}

/// A point with small farthest distance to `k`: the better of the boundary
/// centroid and the center of the smallest disk enclosing dense boundary samples.
fn chebyshev_point(k: &ArcGon) -> Result<Vec2> {
    let centroid = k
        .interior_point()
        .ok_or_else(|| Error::Domain("empty region".into()))?;
    let samples = k.boundary_samples(2048);
    let rows: Vec<Point> = samples.iter().map(|p| p.to_point()).collect();
    let meb = min_enclosing_ball(&PointSet::new(2, rows)?, DEFAULT_MEB_SEED);
    let c = Vec2::try_from_slice(&meb.center.0)?;
    Ok(
        if k.farthest_distance(c)? < k.farthest_distance(centroid)? {
            c
        } else {
            centroid
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arcgon::hausdorff;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn set(rows: Vec<Vec<f64>>) -> PointSet {
        PointSet::from_rows(rows).unwrap()
    }

    /// Spindle area by midpoint quadrature of the width along the chord.
    fn spindle_area_quadrature(delta: f64, r: f64) -> f64 {
        // spindle = set of points x with |x - w+| <= r and |x - w-| <= r, where
        // w+- are the lens vertices; integrate its vertical extent along the chord
        let h = (r * r - delta * delta / 4.0).sqrt();
        let n = 200_000;
        let dx = delta / n as f64;
        (0..n)
            .map(|i| {
                let x = -delta / 2.0 + (i as f64 + 0.5) * dx;
                // each boundary arc is centered at (0, -+h)
                2.0 * ((r * r - x * x).sqrt() - h).max(0.0) * dx
            })
            .sum()
    }

    #[test]
    fn hull_of_one_point_is_the_point() {
        let res = r_hull(&set(vec![vec![1.0, 2.0]]), 1.0).unwrap();
        assert_eq!(res.body, ArcGon::SinglePoint(Vec2::new(1.0, 2.0)));
    }

    #[test]
    fn hull_undefined_beyond_circumradius() {
        let a = set(vec![vec![0.0, 0.0], vec![3.0, 0.0]]);
        assert!(matches!(r_hull(&a, 1.0), Err(Error::HullUndefined { .. })));
    }

    #[test]
    fn two_point_spindle() {
        for (delta, r) in [(0.5, 1.0), (1.0, 1.0), (1.5, 1.0), (1.0, 3.0)] {
            let a = set(vec![vec![-delta / 2.0, 0.0], vec![delta / 2.0, 0.0]]);
            let res = r_hull(&a, r).unwrap();
            assert_eq!(res.path, DualPath::VertexDuality);
            let k = res.body;
            assert_eq!(k.arcs().len(), 2);
            let h = (r * r - delta * delta / 4.0).sqrt();
            let mut centers: Vec<f64> = k.arcs().iter().map(|a| a.center.y).collect();
            centers.sort_by(f64::total_cmp);
            assert_relative_eq!(centers[0], -h, epsilon = 1e-12);
            assert_relative_eq!(centers[1], h, epsilon = 1e-12);
            assert_relative_eq!(
                k.area(),
                spindle_area_quadrature(delta, r),
                max_relative = 1e-8
            );
            // half perimeter: two arcs of half-angle beta = asin(delta / 2r)
            let beta = (delta / (2.0 * r)).asin();
            assert_relative_eq!(k.measures().values[1], 2.0 * r * beta, max_relative = 1e-12);
        }
    }

    #[test]
    fn dense_circle_hull_approaches_disk() {
        let (r, radius) = (1.0, 0.6);
        let rows: Vec<Vec<f64>> = (0..720)
            .map(|i| {
                let t = TAU * i as f64 / 720.0;
                vec![radius * t.cos(), radius * t.sin()]
            })
            .collect();
        let k = r_hull(&set(rows), r).unwrap().body;
        let disk = ArcGon::FullDisk(Disk {
            center: Vec2::default(),
            radius,
        });
        assert!(hausdorff(&k, &disk, 3600).unwrap() <= 1e-4 * radius);
    }

    #[test]
    fn s_dual_special_cases() {
        let p = Vec2::new(1.0, -1.0);
        assert_eq!(
            s_dual(&ArcGon::SinglePoint(p), 2.0).unwrap().body,
            ArcGon::FullDisk(Disk {
                center: p,
                radius: 2.0
            })
        );
        let disk = ArcGon::FullDisk(Disk {
            center: p,
            radius: 2.0,
        });
        assert_eq!(s_dual(&disk, 2.0).unwrap().body, ArcGon::SinglePoint(p));
        assert_eq!(
            s_dual(&disk, 3.0).unwrap().body,
            ArcGon::FullDisk(Disk {
                center: p,
                radius: 1.0
            })
        );
        assert_eq!(s_dual(&disk, 1.0).unwrap().body, ArcGon::Empty);
        assert!(s_dual(&ArcGon::Empty, 1.0).is_err());
    }

    #[test]
    fn s_dual_of_lens_is_spindle() {
        let r = 1.0;
        let a = set(vec![vec![0.0, 0.0], vec![1.2, 0.3]]);
        let lens = r_dual(&a, r).unwrap();
        let via_dual = s_dual(&lens, r).unwrap();
        let hull = r_hull(&a, r).unwrap();
        assert!(hausdorff(&via_dual.body, &hull.body, 3600).unwrap() <= 1e-9);
    }

    #[test]
    fn s_dual_larger_radius_is_parallel_body() {
        // (A^r)^{r+t} = conv_r(A) + tB: support functions differ by t
        let (r, t) = (1.0, 0.35);
        let a = set(vec![
            vec![0.0, 0.0],
            vec![0.9, 0.1],
            vec![0.4, 0.7],
            vec![0.2, -0.3],
        ]);
        let dual = r_dual(&a, r).unwrap();
        let res = s_dual(&dual, r + t).unwrap();
        assert_eq!(res.path, DualPath::SupportDuality);
        let hull = r_hull(&a, r).unwrap().body;
        for i in 0..720 {
            let th = TAU * i as f64 / 720.0;
            assert_relative_eq!(
                res.body.support_at(th).unwrap(),
                hull.support_at(th).unwrap() + t,
                epsilon = 1e-12
            );
        }
        // Steiner in the plane: area grows by t * perimeter + pi t^2
        let m = hull.measures();
        assert_relative_eq!(
            res.body.area(),
            m.values[2] + 2.0 * m.values[1] * t + PI * t * t,
            max_relative = 1e-12
        );
    }

    #[test]
    fn ray_bisection_fallback_when_arcs_exceed_s() {
        // a lens of radius-2 arcs has no exact s-dual construction for s < 2
        let lens =
            disk_intersection_points(&[Vec2::new(0.0, 0.0), Vec2::new(3.6, 0.0)], &[2.0, 2.0])
                .unwrap();
        let s = 1.5;
        let res = s_dual(&lens, s).unwrap();
        assert_eq!(res.path, DualPath::RayBisection);
        assert!(res.path.is_approximate());
        for x in res.body.boundary_samples(512) {
            let f = lens.farthest_distance(x).unwrap();
            assert!(f <= s + 1e-9 && f >= s - 1e-3, "{f}");
        }
    }

    #[test]
    fn ray_bisection_agrees_with_exact_dual() {
        let a = set(vec![vec![0.0, 0.0], vec![0.9, 0.1], vec![0.4, 0.7]]);
        let dual = r_dual(&a, 1.0).unwrap();
        let exact = s_dual(&dual, 1.2).unwrap();
        let approx = ray_bisection(&dual, 1.2).unwrap();
        assert_eq!(approx.path, DualPath::RayBisection);
        assert!(hausdorff(&exact.body, &approx.body, 720).unwrap() < 1e-5);
        assert_relative_eq!(exact.body.area(), approx.body.area(), max_relative = 1e-5);
    }

    fn random_config() -> impl Strategy<Value = (Vec<Vec<f64>>, f64)> {
        (
            prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 2), 2..12),
            1.5f64..3.0,
        )
    }

    proptest! {
        #[test]
        fn support_identity((rows, r) in random_config()) {
            let a = set(rows);
            let dual = r_dual(&a, r).unwrap();
            prop_assume!(!dual.is_empty());
            let hull = r_hull(&a, r).unwrap().body;
            for i in 0..360 {
                let t = TAU * i as f64 / 360.0;
                let dev = dual.support_at(t).unwrap() + hull.support_at(t + PI).unwrap() - r;
                prop_assert!(dev.abs() <= 1e-7 * r, "deviation {dev}");
            }
        }

        #[test]
        fn double_dual((rows, r) in random_config()) {
            let a = set(rows);
            let dual = r_dual(&a, r).unwrap();
            prop_assume!(!dual.is_empty());
            let hull = r_hull(&a, r).unwrap().body;
            let back = s_dual(&hull, r).unwrap().body;
            prop_assert!(hausdorff(&back, &dual, 720).unwrap() <= 1e-7 * r);
        }

        #[test]
        fn hull_contains_generators_and_segments((rows, r) in random_config(), t in 0.0f64..1.0) {
            let a = set(rows.clone());
            prop_assume!(!r_dual(&a, r).unwrap().is_empty());
            let hull = r_hull(&a, r).unwrap().body;
            for p in &rows {
                prop_assert!(hull.contains(Vec2::new(p[0], p[1]), 1e-9));
            }
            for w in rows.windows(2) {
                let x = Vec2::new(w[0][0] + t * (w[1][0] - w[0][0]), w[0][1] + t * (w[1][1] - w[0][1]));
                prop_assert!(hull.contains(x, 1e-9));
            }
        }

        #[test]
        fn hull_is_idempotent((rows, r) in random_config()) {
            let a = set(rows);
            prop_assume!(!r_dual(&a, r).unwrap().is_empty());
            let hull = r_hull(&a, r).unwrap().body;
            let dense: Vec<Vec<f64>> = hull.boundary_samples(2000).iter().map(|p| vec![p.x, p.y]).collect();
            let again = r_hull(&set(dense), r).unwrap().body;
            for x in hull.boundary_samples(500) {
                prop_assert!(again.contains(x, 1e-9));
            }
        }
    }
}
