//! Minimal enclosing ball by move-to-front recursion over support sets.

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::geom::{dist2, Ball, Point, PointSet};

/// Relative slack of the in-ball predicate used while building support sets.
const IN_BALL_TOL: f64 = 1e-12;

/// Seed used by callers that do not care about the shuffle.
pub const DEFAULT_MEB_SEED: u64 = 0x6d65_625f_7365_6564;

struct Mtf<'a> {
    pts: &'a [Point],
    dim: usize,
}

#[derive(Clone)]
struct Sphere {
    center: Vec<f64>,
    r2: f64,
}

impl Sphere {
    fn empty(dim: usize) -> Self {
        Sphere {
            center: vec![0.0; dim],
            r2: -1.0,
        }
    }

    fn covers(&self, x: &[f64]) -> bool {
        self.r2 >= 0.0 && dist2(&self.center, x) <= self.r2 * (1.0 + 2.0 * IN_BALL_TOL)
    }
}

impl Mtf<'_> {
    /// Smallest sphere through the support points with center in their affine hull.
    fn circumsphere(&self, support: &[usize]) -> Sphere {
        let Some(&first) = support.first() else {
            return Sphere::empty(self.dim);
        };
        let q0 = &self.pts[first].0;
        let m = support.len() - 1;
        if m == 0 {
            return Sphere {
                center: q0.clone(),
                r2: 0.0,
            };
        }
        let vs: Vec<Vec<f64>> = support[1..]
            .iter()
            .map(|&i| self.pts[i].0.iter().zip(q0).map(|(a, b)| a - b).collect())
            .collect();
        let gram = DMatrix::from_fn(m, m, |a, b| crate::geom::dot(&vs[a], &vs[b]));
        let rhs = DVector::from_fn(m, |a, _| 0.5 * crate::geom::dot(&vs[a], &vs[a]));
        let lambda = gram
            .clone()
            .lu()
            .solve(&rhs)
            .filter(|x| x.iter().all(|v| v.is_finite()))
            .unwrap_or_else(|| {
                // affinely dependent support: least-squares center
                let scale = gram.amax().max(f64::MIN_POSITIVE);
                gram.svd(true, true)
                    .solve(&rhs, 1e-12 * scale)
                    .expect("svd solve with both factors")
            });
        let mut center = q0.clone();
        for (lam, v) in lambda.iter().zip(&vs) {
            for (c, x) in center.iter_mut().zip(v) {
                *c += lam * x;
            }
        }
        let r2 = support
            .iter()
            .map(|&i| dist2(&center, &self.pts[i].0))
            .fold(0.0, f64::max);
        Sphere { center, r2 }
    }

    fn run(&self, list: &mut [usize], end: usize, support: &mut Vec<usize>) -> Sphere {
        let mut ball = self.circumsphere(support);
        if support.len() == self.dim + 1 {
            return ball;
        }
        for i in 0..end {
            let p = list[i];
            if !ball.covers(&self.pts[p].0) {
                support.push(p);
                ball = self.run(list, i, support);
                support.pop();
                list[..=i].rotate_right(1);
            }
        }
        ball
    }
}

/// The smallest closed ball containing `s`.
///
/// The input order is shuffled with `seed` before the move-to-front pass, so
/// results are reproducible per seed. The returned radius is the exact maximum
/// distance from the computed center, so every point is contained.
pub fn min_enclosing_ball(s: &PointSet, seed: u64) -> Ball {
    let pts = s.points();
    if pts.len() == 1 {
        return Ball {
            center: pts[0].clone(),
            radius: 0.0,
        };
    }
    let mut order: Vec<usize> = (0..pts.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mtf = Mtf { pts, dim: s.dim() };
    let n = order.len();
    let sphere = mtf.run(&mut order, n, &mut Vec::with_capacity(s.dim() + 1));
    let radius = pts
        .iter()
        .map(|p| dist2(&sphere.center, &p.0))
        .fold(0.0, f64::max)
        .sqrt();
    Ball {
        center: Point(sphere.center),
        radius,
    }
}

/// Circumradius `cr(S)` with the default shuffle seed.
pub fn circumradius(s: &PointSet) -> f64 {
    min_enclosing_ball(s, DEFAULT_MEB_SEED).radius
}
