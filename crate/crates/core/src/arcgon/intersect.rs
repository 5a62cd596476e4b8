use std::f64::consts::TAU;

use super::{planar_points, Arc, ArcGon, Disk, Vec2, EPS_GEO, MIN_SWEEP};
use crate::error::{Error, Result};
use crate::geom::PointSet;
use crate::meb::{min_enclosing_ball, DEFAULT_MEB_SEED};

/// Sorted, disjoint closed angular intervals inside `[0, 2pi]`.
type Intervals = Vec<(f64, f64)>;

fn centered_interval(center: f64, half: f64) -> Intervals {
    let lo = (center - half).rem_euclid(TAU);
    let hi = lo + 2.0 * half;
    if hi <= TAU {
        vec![(lo, hi)]
    } else {
        vec![(0.0, hi - TAU), (lo, TAU)]
    }
}

fn intersect(a: &Intervals, b: &Intervals) -> Intervals {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        let lo = a[i].0.max(b[j].0);
        let hi = a[i].1.min(b[j].1);
        if hi >= lo {
            out.push((lo, hi));
        }
        if a[i].1 < b[j].1 {
            i += 1;
        } else {
            j += 1;
        }
    }
    out
}

/// Angular set of circle `i` lying inside disk `j`, or `None` when the whole
/// circle is inside.
fn inside_interval(ci: &Disk, cj: &Disk) -> Option<Intervals> {
    let d = cj.center - ci.center;
    let delta = d.norm();
    let (ri, rj) = (ci.radius, cj.radius);
    if delta + ri <= rj {
        return None;
    }
    if delta + rj <= ri || delta >= ri + rj {
        return Some(Vec::new());
    }
    // distance from c_i to the radical line along c_j - c_i
    let a = (delta * delta + ri * ri - rj * rj) / (2.0 * delta);
    let h = ((ri - a) * (ri + a)).max(0.0).sqrt();
    Some(centered_interval(d.angle(), h.atan2(a)))
}

/// Exact intersection of closed disks with individual radii.
pub fn disk_intersection(centers: &PointSet, radii: &[f64]) -> Result<ArcGon> {
    let pts = planar_points(centers)?;
    disk_intersection_points(&pts, radii)
}

pub fn disk_intersection_points(centers: &[Vec2], radii: &[f64]) -> Result<ArcGon> {
    if centers.len() != radii.len() {
        return Err(Error::Domain(format!(
            "{} centers but {} radii",
            centers.len(),
            radii.len()
        )));
    }
    if centers.is_empty() {
        return Err(Error::Domain(
            "disk intersection needs at least one disk".into(),
        ));
    }
    if let Some(r) = radii.iter().find(|r| !(**r > 0.0 && r.is_finite())) {
        return Err(Error::Domain(format!(
            "disk radii must be positive and finite, got {r}"
        )));
    }
    let scale = radii.iter().copied().fold(0.0, f64::max);
    let tol = EPS_GEO * scale;

    // drop duplicates, then disks that contain another disk
    let mut disks: Vec<Disk> = Vec::with_capacity(centers.len());
    for (&c, &r) in centers.iter().zip(radii) {
        let dup = disks
            .iter()
            .any(|d| d.center.dist(c) <= tol && (d.radius - r).abs() <= tol);
        if !dup {
            disks.push(Disk {
                center: c,
                radius: r,
            });
        }
    }
    let keep: Vec<bool> = (0..disks.len())
        .map(|j| {
            !(0..disks.len()).any(|i| {
                i != j
                    && disks[i].center.dist(disks[j].center) + disks[i].radius
                        <= disks[j].radius + tol
            })
        })
        .collect();
    let disks: Vec<Disk> = disks
        .into_iter()
        .zip(keep)
        .filter(|(_, k)| *k)
        .map(|(d, _)| d)
        .collect();
    if disks.len() == 1 {
        return Ok(ArcGon::FullDisk(disks[0]));
    }

    // separated or tangent pairs
    for i in 0..disks.len() {
        for j in (i + 1)..disks.len() {
            let (a, b) = (&disks[i], &disks[j]);
            let delta = a.center.dist(b.center);
            let gap = delta - (a.radius + b.radius);
            if gap > tol {
                return Ok(ArcGon::Empty);
            }
            if gap >= -tol {
                let p = a.center + (b.center - a.center) * (a.radius / (a.radius + b.radius));
                let inside = disks
                    .iter()
                    .all(|d| d.center.dist(p) <= d.radius + 10.0 * tol);
                return Ok(if inside {
                    ArcGon::SinglePoint(p)
                } else {
                    ArcGon::Empty
                });
            }
        }
    }

    let mut arcs: Vec<Arc> = Vec::new();
    for (i, ci) in disks.iter().enumerate() {
        let mut set: Intervals = vec![(0.0, TAU)];
        for (j, cj) in disks.iter().enumerate() {
            if i == j {
                continue;
            }
            if let Some(iv) = inside_interval(ci, cj) {
                set = intersect(&set, &iv);
                if set.is_empty() {
                    break;
                }
            }
        }
        // glue the piece ending at 2pi to the piece starting at 0
        if set.len() >= 2 && set[0].0 <= 0.0 && set[set.len() - 1].1 >= TAU {
            let first = set.remove(0);
            let last = set.last_mut().expect("two pieces");
            last.1 = TAU + first.1;
        }
        for (lo, hi) in set {
            if hi - lo > MIN_SWEEP {
                arcs.push(Arc {
                    center: ci.center,
                    radius: ci.radius,
                    start: super::canon(lo),
                    sweep: hi - lo,
                });
            }
        }
    }

    if arcs.is_empty() {
        return Ok(single_common_point(&disks, tol).map_or(ArcGon::Empty, ArcGon::SinglePoint));
    }
    // the outward normal increases along a convex boundary, so start angles order the chain
    arcs.sort_by(|a, b| a.start.total_cmp(&b.start));
    ArcGon::from_arcs(arcs)
}

/// Common point of all disks when the intersection collapses to a point
/// without any tangency (e.g. three circles through one point).
fn single_common_point(disks: &[Disk], tol: f64) -> Option<Vec2> {
    let mut hits: Vec<Vec2> = Vec::new();
    for i in 0..disks.len() {
        for j in (i + 1)..disks.len() {
            let (a, b) = (&disks[i], &disks[j]);
            let d = b.center - a.center;
            let delta = d.norm();
            if delta == 0.0 {
                continue;
            }
            let along = (delta * delta + a.radius * a.radius - b.radius * b.radius) / (2.0 * delta);
            let h = (a.radius * a.radius - along * along).max(0.0).sqrt();
            let base = a.center + d * (along / delta);
            let n = d.perp() * (1.0 / delta);
            for p in [base + n * h, base - n * h] {
                if disks
                    .iter()
                    .all(|c| c.center.dist(p) <= c.radius + 100.0 * tol)
                {
                    hits.push(p);
                }
            }
        }
    }
    if hits.is_empty() {
        return None;
    }
    let n = hits.len() as f64;
    Some(hits.iter().fold(Vec2::default(), |acc, p| acc + *p) * (1.0 / n))
}

/// The r-ball body `A^r`: intersection of the radius-`r` disks centered at `A`.
///
/// Empty exactly when the circumradius of `A` exceeds `r`; a circumradius
/// within the geometric tolerance of `r` yields the single point at the
/// circumcenter.
pub fn r_dual(a: &PointSet, r: f64) -> Result<ArcGon> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::Domain(format!("r must be positive, got {r}")));
    }
    let pts = planar_points(a)?;
    let meb = min_enclosing_ball(a, DEFAULT_MEB_SEED);
    if meb.radius > r * (1.0 + EPS_GEO) {
        return Ok(ArcGon::Empty);
    }
    if meb.radius >= r * (1.0 - EPS_GEO) {
        return Ok(ArcGon::SinglePoint(Vec2::try_from_slice(&meb.center.0)?));
    }
    disk_intersection_points(&pts, &vec![r; pts.len()])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arcgon::hausdorff;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn set(rows: Vec<Vec<f64>>) -> PointSet {
        PointSet::from_rows(rows).unwrap()
    }

    fn lens_perimeter(delta: f64, r: f64) -> f64 {
        4.0 * r * (delta / (2.0 * r)).acos()
    }

    fn lens_area(delta: f64, r: f64) -> f64 {
        2.0 * r * r * (delta / (2.0 * r)).acos()
            - delta / 2.0 * (4.0 * r * r - delta * delta).sqrt()
    }

    #[test]
    fn single_disk() {
        let k = disk_intersection(&set(vec![vec![1.0, 2.0]]), &[3.0]).unwrap();
        assert_eq!(
            k,
            ArcGon::FullDisk(Disk {
                center: Vec2::new(1.0, 2.0),
                radius: 3.0
            })
        );
    }

    #[test]
    fn tangent_disks_meet_in_a_point() {
        for r in [0.3, 1.0, 7.0] {
            let k =
                disk_intersection(&set(vec![vec![0.0, 0.0], vec![2.0 * r, 0.0]]), &[r, r]).unwrap();
            match k {
                ArcGon::SinglePoint(p) => assert!(p.dist(Vec2::new(r, 0.0)) < 1e-12),
                other => panic!("expected a point, got {other:?}"),
            }
        }
    }

    #[test]
    fn lens_matches_closed_form() {
        for (delta, r) in [(0.5, 1.0), (1.0, 1.0), (1.9, 1.0), (0.01, 2.0), (3.0, 2.0)] {
            let k =
                disk_intersection(&set(vec![vec![0.0, 0.0], vec![delta, 0.0]]), &[r, r]).unwrap();
            let m = k.measures();
            assert_eq!(k.arcs().len(), 2);
            assert_relative_eq!(
                2.0 * m.values[1],
                lens_perimeter(delta, r),
                max_relative = 1e-12
            );
            assert_relative_eq!(m.values[2], lens_area(delta, r), max_relative = 1e-11);
        }
    }

    #[test]
    fn separated_disks_are_empty() {
        let k = disk_intersection(&set(vec![vec![0.0, 0.0], vec![3.0, 0.0]]), &[1.0, 1.5]).unwrap();
        assert_eq!(k, ArcGon::Empty);
    }

    #[test]
    fn nested_and_duplicate_disks() {
        let k = disk_intersection(
            &set(vec![vec![0.0, 0.0], vec![0.5, 0.0], vec![0.0, 0.0]]),
            &[3.0, 1.0, 3.0],
        )
        .unwrap();
        assert_eq!(
            k,
            ArcGon::FullDisk(Disk {
                center: Vec2::new(0.5, 0.0),
                radius: 1.0
            })
        );
        let k = disk_intersection(&set(vec![vec![0.0, 0.0]; 4]), &[1.0; 4]).unwrap();
        assert!(matches!(k, ArcGon::FullDisk(_)));
    }

    #[test]
    fn mismatched_input_is_rejected() {
        assert!(disk_intersection(&set(vec![vec![0.0, 0.0]]), &[1.0, 2.0]).is_err());
        assert!(disk_intersection(&set(vec![vec![0.0, 0.0]]), &[0.0]).is_err());
        assert!(disk_intersection(&set(vec![vec![0.0, 0.0, 0.0]]), &[1.0]).is_err());
    }

    #[test]
    fn three_circles_through_one_point() {
        // circumradius exactly r: the three disks share only their common point
        let pts: Vec<Vec<f64>> = (0..3)
            .map(|i| {
                let t = TAU * i as f64 / 3.0;
                vec![t.cos(), t.sin()]
            })
            .collect();
        let k = disk_intersection(&set(pts.clone()), &[1.0; 3]).unwrap();
        match k {
            ArcGon::SinglePoint(p) => assert!(p.norm() < 1e-7),
            other => panic!("expected a point, got {other:?}"),
        }
        assert!(matches!(
            r_dual(&set(pts.clone()), 1.0).unwrap(),
            ArcGon::SinglePoint(_)
        ));
        assert_eq!(r_dual(&set(pts), 0.99).unwrap(), ArcGon::Empty);
    }

    #[test]
    fn r_dual_basics() {
        let p = set(vec![vec![2.0, -1.0]]);
        assert_eq!(
            r_dual(&p, 1.5).unwrap(),
            ArcGon::FullDisk(Disk {
                center: Vec2::new(2.0, -1.0),
                radius: 1.5
            })
        );
        assert!(r_dual(&p, 0.0).is_err());
    }

    #[test]
    fn reuleaux_triangle_area() {
        // equilateral points of side r: A^r is a Reuleaux triangle of width r
        let r = 1.0;
        let h = 3f64.sqrt() / 2.0;
        let a = set(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.5, h]]);
        let k = r_dual(&a, r).unwrap();
        assert_eq!(k.arcs().len(), 3);
        let reuleaux = (PI - 3f64.sqrt()) / 2.0 * r * r;
        assert_relative_eq!(k.area(), reuleaux, max_relative = 1e-12);
        assert_relative_eq!(k.perimeter(), PI * r, max_relative = 1e-12);
    }

    #[test]
    fn reuleaux_area_against_hit_or_miss() {
        use rand::{Rng, SeedableRng};
        let h = 3f64.sqrt() / 2.0;
        let a = set(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.5, h]]);
        let k = r_dual(&a, 1.0).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let n = 10_000_000;
        let (lo, hi) = (Vec2::new(-0.1, -0.6), Vec2::new(1.1, 1.0));
        let box_area = (hi.x - lo.x) * (hi.y - lo.y);
        let centers = [Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(0.5, h)];
        let hits = (0..n)
            .filter(|_| {
                let x = Vec2::new(rng.gen_range(lo.x..hi.x), rng.gen_range(lo.y..hi.y));
                centers.iter().all(|c| c.dist(x) <= 1.0)
            })
            .count();
        let p = hits as f64 / n as f64;
        let est = p * box_area;
        let se = box_area * (p * (1.0 - p) / n as f64).sqrt();
        assert!(
            (est - k.area()).abs() < 4.0 * se,
            "{est} +- {se} vs {}",
            k.area()
        );
    }

    fn random_config() -> impl Strategy<Value = (Vec<Vec<f64>>, f64)> {
        (
            prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 2), 1..12),
            1.0f64..3.0,
        )
    }

    proptest! {
        #[test]
        fn matches_membership_oracle((rows, r) in random_config(), probes in prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 200)) {
            let centers: Vec<Vec2> = rows.iter().map(|p| Vec2::new(p[0], p[1])).collect();
            let k = disk_intersection(&set(rows), &vec![r; centers.len()]).unwrap();
            for (x, y) in probes {
                let x = Vec2::new(x, y);
                let slack = centers.iter().map(|c| r - c.dist(x)).fold(f64::INFINITY, f64::min);
                if slack.abs() < 1e-9 {
                    continue;
                }
                prop_assert_eq!(k.contains(x, 0.0), slack > 0.0);
            }
        }

        #[test]
        fn adding_points_shrinks((rows, r) in random_config(), extra in prop::collection::vec(-1.0f64..1.0, 2)) {
            let k = r_dual(&set(rows.clone()), r).unwrap();
            let mut more = rows;
            more.push(extra);
            let k2 = r_dual(&set(more), r).unwrap();
            let (m, m2) = (k.measures(), k2.measures());
            prop_assert!(m2.values[1] <= m.values[1] + 1e-12);
            prop_assert!(m2.values[2] <= m.values[2] + 1e-12);
            for x in k2.boundary_samples(200) {
                prop_assert!(k.contains(x, 1e-9));
            }
        }

        #[test]
        fn chain_normals_increase((rows, r) in random_config()) {
            let k = r_dual(&set(rows), r).unwrap();
            let arcs = k.arcs();
            for (i, a) in arcs.iter().enumerate() {
                let b = arcs[(i + 1) % arcs.len()];
                prop_assert!(a.end_point().dist(b.start_point()) <= 1e-9 * r);
            }
            if arcs.len() > 1 {
                let mut starts: Vec<f64> = arcs.iter().map(|a| a.start).collect();
                let sorted = { let mut s = starts.clone(); s.sort_by(f64::total_cmp); s };
                prop_assert_eq!(&starts, &sorted);
                starts.dedup();
                prop_assert_eq!(starts.len(), arcs.len());
            }
        }

        #[test]
        fn heterogeneous_radii_match_oracle(rows in prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 2), 2..8), radii in prop::collection::vec(0.8f64..2.5, 8), probes in prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 200)) {
            let radii = &radii[..rows.len()];
            let centers: Vec<Vec2> = rows.iter().map(|p| Vec2::new(p[0], p[1])).collect();
            let k = disk_intersection(&set(rows), radii).unwrap();
            for (x, y) in probes {
                let x = Vec2::new(x, y);
                let slack = centers.iter().zip(radii).map(|(c, r)| r - c.dist(x)).fold(f64::INFINITY, f64::min);
                if slack.abs() < 1e-9 {
                    continue;
                }
                prop_assert_eq!(k.contains(x, 0.0), slack > 0.0);
            }
        }

        #[test]
        fn translation_covariant((rows, r) in random_config(), tx in -5.0f64..5.0, ty in -5.0f64..5.0) {
            let s = set(rows);
            let k = r_dual(&s, r).unwrap();
            let moved = r_dual(&s.map(|p| vec![p[0] + tx, p[1] + ty]).unwrap(), r).unwrap();
            if !k.is_empty() {
                let shifted = k.translated(Vec2::new(tx, ty));
                prop_assert!(hausdorff(&shifted, &moved, 360).unwrap() < 1e-9);
            }
        }
    }
}
