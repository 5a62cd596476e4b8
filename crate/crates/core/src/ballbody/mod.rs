//! Dimension-generic ball bodies `A^r = ⋂ B[p, r]`.
//!
//! Membership is exact; projection uses Dykstra's corrected cyclic
//! projections (each ball projection is a radial clamp); support values come
//! from projected ascent; boundary points come from exact ray exits.

mod hull;
mod steiner;
mod support;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geom::{dist, dist2, dot, norm, omega, Ball, PointSet};
use crate::meb::{min_enclosing_ball, DEFAULT_MEB_SEED};
use crate::rng::substream;

pub use hull::{SampledHull, HULL_BOUNDARY_SAMPLES};
pub use steiner::{
    default_epsilons, parallel_volume, steiner_fit, McConfig, ParallelBody, DEFAULT_CHUNK,
    MAX_CONDITION,
};

/// Default projection tolerance relative to the ball radius.
pub const DEFAULT_REL_TOL: f64 = 1e-8;
const EPS_DEGENERATE: f64 = 1e-9;

// projection accuracy used when deciding membership in parallel bodies
const GAUGE_REL_TOL: f64 = 1e-7;
// Dykstra sweeps per projection inside the support ascent
const SUPPORT_PROJ_ITERS: usize = 2000;
// cyclic projection sweeps tried before falling back to Dykstra
const GAUGE_SWEEPS: usize = 4;

pub const DEFAULT_MAX_ITERS: usize = 100_000;

/// `A^r` given implicitly by its generator set and radius.
#[derive(Debug, Clone)]
pub struct BallBodySpec {
    centers: PointSet,
    radius: f64,
    flat: Vec<f64>,
    meb: Ball,
}

impl BallBodySpec {
    pub fn new(centers: PointSet, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Domain(format!(
                "ball body radius must be positive, got {radius}"
            )));
        }
        let flat = centers.flat();
        let meb = min_enclosing_ball(&centers, DEFAULT_MEB_SEED);
        Ok(BallBodySpec {
            centers,
            radius,
            flat,
            meb,
        })
    }

    pub fn dim(&self) -> usize {
        self.centers.dim()
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn centers(&self) -> &PointSet {
        &self.centers
    }

    pub fn circumradius(&self) -> f64 {
        self.meb.radius
    }

    /// Nonempty iff the circumradius of the centers does not exceed the radius
    /// (up to a relative `1e-9`).
    pub fn is_empty(&self) -> bool {
        self.meb.radius > self.radius * (1.0 + EPS_DEGENERATE)
    }

    /// True when the body collapses to the circumcenter.
    pub fn is_point(&self) -> bool {
        !self.is_empty() && self.meb.radius >= self.radius * (1.0 - EPS_DEGENERATE)
    }

    /// Circumcenter of the centers; the ball of radius `radius - cr` around it
    /// lies inside the body.
    pub fn inner_center(&self) -> &[f64] {
        &self.meb.center.0
    }

    pub fn default_tol(&self) -> f64 {
        DEFAULT_REL_TOL * self.radius
    }

    fn center(&self, i: usize) -> &[f64] {
        let d = self.dim();
        &self.flat[i * d..(i + 1) * d]
    }

    fn n(&self) -> usize {
        self.centers.len()
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::Domain(format!(
                "point has dimension {}, body has dimension {}",
                x.len(),
                self.dim()
            )));
        }
        Ok(())
    }

    fn require_nonempty(&self) -> Result<()> {
        if self.is_empty() {
            return Err(Error::Domain("operation needs a nonempty ball body".into()));
        }
        Ok(())
    }

    /// Exact membership: `|x - p_i| <= r` for every center.
    pub fn contains(&self, x: &[f64]) -> Result<bool> {
        self.check_dim(x)?;
        let r2 = self.radius * self.radius;
        Ok((0..self.n()).all(|i| dist2(x, self.center(i)) <= r2))
    }

    /// `max_i (|x - p_i| - r)`, a lower bound for the distance to the body.
    fn worst_violation(&self, x: &[f64]) -> (usize, f64) {
        let mut best = (0, f64::NEG_INFINITY);
        for i in 0..self.n() {
            let v = dist(x, self.center(i)) - self.radius;
            if v > best.1 {
                best = (i, v);
            }
        }
        best
    }

    fn clamp_into(&self, i: usize, y: &[f64], out: &mut [f64]) {
        let c = self.center(i);
        let d = dist(y, c);
        if d <= self.radius {
            out.copy_from_slice(y);
        } else {
            let s = self.radius / d;
            for k in 0..y.len() {
                out[k] = c[k] + (y[k] - c[k]) * s;
            }
        }
    }

    /// Distance from `x` to `B[p_i, r] ∩ B[p_j, r]`.
    fn lens_distance(&self, i: usize, j: usize, x: &[f64]) -> f64 {
        let (pi, pj) = (self.center(i), self.center(j));
        let mut y = vec![0.0; x.len()];
        self.clamp_into(i, x, &mut y);
        if dist(&y, pj) <= self.radius {
            return dist(x, &y);
        }
        self.clamp_into(j, x, &mut y);
        if dist(&y, pi) <= self.radius {
            return dist(x, &y);
        }
        // nearest point on the rim sphere
        let h = dist(pi, pj);
        let rho = (self.radius * self.radius - h * h / 4.0).max(0.0).sqrt();
        let w: Vec<f64> = x
            .iter()
            .zip(pi.iter().zip(pj))
            .map(|(xk, (a, b))| xk - (a + b) / 2.0)
            .collect();
        let along = w
            .iter()
            .zip(pi.iter().zip(pj))
            .map(|(wk, (a, b))| wk * (b - a) / h)
            .sum::<f64>();
        let across = (dot(&w, &w) - along * along).max(0.0).sqrt();
        (along * along + (across - rho).powi(2)).sqrt()
    }

    /// The point where the segment from the inner center to `y` leaves the
    /// body, or `y` itself when it is inside.
    fn pull_inside(&self, y: &[f64]) -> Result<Vec<f64>> {
        let c = self.inner_center();
        let dir: Vec<f64> = y.iter().zip(c).map(|(a, b)| a - b).collect();
        if norm(&dir) == 0.0 {
            return Ok(c.to_vec());
        }
        let t = self.ray_exit(c, &dir)?.min(1.0);
        Ok(c.iter().zip(&dir).map(|(a, b)| a + t * b).collect())
    }

    /// Euclidean projection onto the body.
    pub fn project(&self, x: &[f64], tol: f64, max_iters: usize) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        if self.is_empty() {
            return Err(Error::Domain("projection onto an empty ball body".into()));
        }
        let (worst, viol) = self.worst_violation(x);
        if viol <= 0.0 {
            return Ok(x.to_vec());
        }
        // projecting onto the most violated ball is exact when it lands inside
        let mut y = vec![0.0; x.len()];
        self.clamp_into(worst, x, &mut y);
        if self.worst_violation(&y).1 <= 1e-3 * tol {
            return Ok(y);
        }
        self.dykstra(x, tol, max_iters)
    }

    fn dykstra(&self, x0: &[f64], tol: f64, max_iters: usize) -> Result<Vec<f64>> {
        let d = self.dim();
        let n = self.n();
        let mut x = x0.to_vec();
        let mut incr = vec![0.0; n * d];
        let mut y = vec![0.0; d];
        let mut next = vec![0.0; d];
        let mut residual = f64::INFINITY;
        for _ in 0..max_iters {
            let start = x.clone();
            for i in 0..n {
                let p = &mut incr[i * d..(i + 1) * d];
                for k in 0..d {
                    y[k] = x[k] + p[k];
                }
                self.clamp_into(i, &y, &mut next);
                for k in 0..d {
                    p[k] = y[k] - next[k];
                }
                x.copy_from_slice(&next);
            }
            let moved = dist(&start, &x);
            let viol = self.worst_violation(&x).1.max(0.0);
            residual = moved.max(viol);
            // linear convergence can be slow near vertices, so stop well below tol
            if moved < 1e-2 * tol && viol <= tol {
                return Ok(x);
            }
        }
        Err(Error::Convergence {
            iterations: max_iters,
            residual,
            last_iterate: x,
        })
    }

    /// Distance from `x` to the body; zero for members.
    pub fn distance_to(&self, x: &[f64], tol: f64) -> Result<f64> {
        let p = self.project(x, tol, DEFAULT_MAX_ITERS)?;
        Ok(dist(x, &p))
    }

    /// Exit parameter of the ray `origin + t * dir` (`dir` need not be unit);
    /// `origin` must lie in the body.
    pub fn ray_exit(&self, origin: &[f64], dir: &[f64]) -> Result<f64> {
        self.check_dim(origin)?;
        self.check_dim(dir)?;
        let a = dot(dir, dir);
        if a == 0.0 {
            return Err(Error::Domain("ray direction must be nonzero".into()));
        }
        let r2 = self.radius * self.radius;
        let mut t_exit = f64::INFINITY;
        let mut w = vec![0.0; origin.len()];
        for i in 0..self.n() {
            let c = self.center(i);
            for k in 0..w.len() {
                w[k] = origin[k] - c[k];
            }
            let cc = dot(&w, &w) - r2;
            if cc > r2 * 1e-12 {
                return Err(Error::Domain(
                    "ray origin lies outside the ball body".into(),
                ));
            }
            let b = dot(dir, &w);
            let disc = (b * b - a * cc).max(0.0);
            // larger root, written to avoid cancellation
            let t = if b <= 0.0 {
                (-b + disc.sqrt()) / a
            } else {
                -cc / (b + disc.sqrt())
            };
            t_exit = t_exit.min(t.max(0.0));
        }
        Ok(t_exit)
    }

    /// `n` boundary points hit by rays from the inner center in seeded random directions.
    pub fn boundary_samples(&self, n: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
        self.require_nonempty()?;
        let o = self.inner_center().to_vec();
        let mut rng = substream(seed, 0x6264_7279);
        (0..n)
            .map(|_| {
                let u = random_unit(&mut rng, self.dim());
                let t = self.ray_exit(&o, &u)?;
                Ok(o.iter().zip(&u).map(|(a, b)| a + t * b).collect())
            })
            .collect()
    }

    /// Support value `max <x, u>`, exact up to rounding by an active-set
    /// search. Falls back to projected ascent `x <- P(x + eta u)`, halving
    /// `eta` when no progress is made.
    pub fn support_value(&self, u: &[f64], tol: f64) -> Result<f64> {
        self.check_dim(u)?;
        self.require_nonempty()?;
        if (norm(u) - 1.0).abs() > 1e-9 {
            return Err(Error::Domain(
                "support direction must be a unit vector".into(),
            ));
        }
        let mut x = self.inner_center().to_vec();
        if self.is_point() {
            return Ok(dot(&x, u));
        }
        if let Some((value, _)) = support::exact_support(self, u) {
            return Ok(value);
        }
        log::debug!("active-set support did not settle; using projected ascent");
        // start from the exact boundary point along u
        let t = self.ray_exit(&x, u)?;
        for (xk, uk) in x.iter_mut().zip(u) {
            *xk += t * uk;
        }
        let mut value = dot(&x, u);
        let mut eta = self.radius;
        let proj_tol = 1e-3 * tol;
        let mut steps = 0usize;
        while eta > tol {
            steps += 1;
            if steps > DEFAULT_MAX_ITERS {
                return Err(Error::Convergence {
                    iterations: steps,
                    residual: eta,
                    last_iterate: x,
                });
            }
            let trial: Vec<f64> = x.iter().zip(u).map(|(a, b)| a + eta * b).collect();
            // the ascent only needs feasible iterates, so a stalled projection is pulled inside
            let y = match self.project(&trial, proj_tol, SUPPORT_PROJ_ITERS) {
                Ok(y) => y,
                Err(Error::Convergence { last_iterate, .. }) => self.pull_inside(&last_iterate)?,
                Err(e) => return Err(e),
            };
            let v = dot(&y, u);
            if v > value + 1e-3 * tol {
                x = y;
                value = v;
            } else {
                eta *= 0.5;
            }
        }
        Ok(value)
    }

    /// `V_1` from the mean width over `n_dirs` random directions:
    /// `V_1 = d omega_d / (2 omega_{d-1}) * mean(h(u) + h(-u))`.
    /// Returns `(estimate, stderr)`.
    pub fn mean_width_v1(&self, n_dirs: usize, seed: u64, tol: f64) -> Result<(f64, f64)> {
        self.require_nonempty()?;
        if n_dirs < 2 {
            return Err(Error::Domain(
                "mean width needs at least two directions".into(),
            ));
        }
        let d = self.dim();
        let widths: Vec<f64> = (0..n_dirs)
            .into_par_iter()
            .map(|i| {
                let mut rng = substream(seed, i as u64);
                let u = random_unit(&mut rng, d);
                let neg: Vec<f64> = u.iter().map(|x| -x).collect();
                Ok(self.support_value(&u, tol)? + self.support_value(&neg, tol)?)
            })
            .collect::<Result<_>>()?;
        let mean = widths.iter().sum::<f64>() / n_dirs as f64;
        let var = widths.iter().map(|w| (w - mean).powi(2)).sum::<f64>() / (n_dirs as f64 - 1.0);
        let factor = d as f64 * omega(d)? / (2.0 * omega(d - 1)?);
        Ok((factor * mean, factor * (var / n_dirs as f64).sqrt()))
    }

    /// Axis box of `⋂ B[p_i, r + eps]`.
    pub fn bounding_box(&self, eps: f64) -> (Vec<f64>, Vec<f64>) {
        let d = self.dim();
        let reach = self.radius + eps;
        let mut lo = vec![f64::NEG_INFINITY; d];
        let mut hi = vec![f64::INFINITY; d];
        for i in 0..self.n() {
            let c = self.center(i);
            for k in 0..d {
                lo[k] = lo[k].max(c[k] - reach);
                hi[k] = hi[k].min(c[k] + reach);
            }
        }
        (lo, hi)
    }
}

impl ParallelBody for BallBodySpec {
    fn dim(&self) -> usize {
        self.centers.dim()
    }

    fn is_empty(&self) -> bool {
        BallBodySpec::is_empty(self)
    }

    fn scale(&self) -> f64 {
        self.radius
    }

    fn bounding_box(&self, eps: f64) -> (Vec<f64>, Vec<f64>) {
        BallBodySpec::bounding_box(self, eps)
    }

    fn gauge(&self, x: &[f64], cap: f64) -> f64 {
        let (worst, viol) = self.worst_violation(x);
        if viol <= 0.0 || viol > cap {
            return viol.max(0.0);
        }
        let mut y = vec![0.0; x.len()];
        self.clamp_into(worst, x, &mut y);
        if self.worst_violation(&y).1 <= 0.0 {
            return viol;
        }
        // feasible points found by pulling toward the inner center bound the distance from above
        let mut upper = self
            .pull_inside(x)
            .map(|z| dist(x, &z))
            .unwrap_or(f64::INFINITY);
        let mut next = y.clone();
        for _ in 0..GAUGE_SWEEPS {
            upper = upper.min(
                self.pull_inside(&y)
                    .map(|z| dist(x, &z))
                    .unwrap_or(f64::INFINITY),
            );
            if upper <= cap {
                return upper;
            }
            for i in 0..self.n() {
                self.clamp_into(i, &y, &mut next);
                y.copy_from_slice(&next);
            }
        }
        // distances to two-ball lenses bound the distance from below
        let mut violated: Vec<(usize, f64)> = (0..self.n())
            .map(|i| (i, dist(x, self.center(i)) - self.radius))
            .filter(|v| v.1 > 0.0)
            .collect();
        violated.sort_by(|a, b| b.1.total_cmp(&a.1));
        violated.truncate(4);
        for (a, &(i, _)) in violated.iter().enumerate() {
            for &(j, _) in &violated[a + 1..] {
                let lower = self.lens_distance(i, j, x);
                if lower > cap {
                    return lower;
                }
            }
        }
        match self.dykstra(x, GAUGE_REL_TOL * self.radius, DEFAULT_MAX_ITERS) {
            Ok(p) => dist(x, &p),
            Err(e) => {
                log::warn!("projection did not converge in gauge evaluation: {e}");
                viol
            }
        }
    }
}

pub(crate) fn random_unit<R: Rng>(rng: &mut R, d: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d)
            .map(|_| rng.sample::<f64, _>(StandardNormal))
            .collect();
        let n = norm(&v);
        if n > 1e-12 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}
