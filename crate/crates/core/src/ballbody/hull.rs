use super::{BallBodySpec, ParallelBody};
use crate::error::{Error, Result};
use crate::geom::{dist2, Point, PointSet};

/// Boundary points of `A^r` used to approximate its s-dual.
pub const HULL_BOUNDARY_SAMPLES: usize = 1 << 12;

/// Approximation of `(A^r)^s = {x : max_{y in A^r} |x - y| <= s}` in any
/// dimension, with the maximum taken over exact boundary points of `A^r`.
///
/// For `s = r` this is `conv_r(A)`; for `s = r + t` it is `conv_r(A) + tB`.
/// Sampling under-estimates the farthest distance, so the approximation
/// contains the true body and its intrinsic volumes are biased upward.
#[derive(Debug, Clone)]
pub struct SampledHull {
    dim: usize,
    radius: f64,
    samples: Vec<f64>,
    n: usize,
}

impl SampledHull {
    pub fn new(source: &BallBodySpec, radius: f64, n_samples: usize, seed: u64) -> Result<Self> {
        if source.is_empty() {
            return Err(Error::HullUndefined {
                circumradius: source.circumradius(),
                r: source.radius(),
            });
        }
        if radius < source.radius() {
            return Err(Error::Domain(format!(
                "dual radius {radius} is below the generating radius {}",
                source.radius()
            )));
        }
        let pts = source.boundary_samples(n_samples, seed)?;
        Ok(SampledHull {
            dim: source.dim(),
            radius,
            n: pts.len(),
            samples: pts.into_iter().flatten().collect(),
        })
    }

    /// `conv_r(A)` for the generators of `source`.
    pub fn r_hull(source: &BallBodySpec, seed: u64) -> Result<Self> {
        SampledHull::new(source, source.radius(), HULL_BOUNDARY_SAMPLES, seed)
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    fn sample(&self, k: usize) -> &[f64] {
        &self.samples[k * self.dim..(k + 1) * self.dim]
    }

    /// Largest distance from `x` to a boundary sample.
    pub fn farthest_distance(&self, x: &[f64]) -> f64 {
        (0..self.n)
            .map(|k| dist2(x, self.sample(k)))
            .fold(0.0, f64::max)
            .sqrt()
    }

    /// Membership up to a relative `1e-9`.
    pub fn contains(&self, x: &[f64]) -> bool {
        self.farthest_distance(x) <= self.radius * (1.0 + 1e-9)
    }

    /// Largest distance from a probe point to its nearest sample: an estimate
    /// of how finely the samples cover the boundary.
    pub fn covering_radius(&self, probes: &[Vec<f64>]) -> f64 {
        probes
            .iter()
            .map(|p| {
                (0..self.n)
                    .map(|k| dist2(p, self.sample(k)))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
            .sqrt()
    }

    /// The same set written as an intersection of balls around the samples.
    pub fn as_ball_body(&self) -> Result<BallBodySpec> {
        let rows = (0..self.n)
            .map(|k| Point(self.sample(k).to_vec()))
            .collect();
        BallBodySpec::new(PointSet::new(self.dim, rows)?, self.radius)
    }
}

impl ParallelBody for SampledHull {
    fn dim(&self) -> usize {
        self.dim
    }

    fn is_empty(&self) -> bool {
        false
    }

    fn scale(&self) -> f64 {
        self.radius
    }

    fn bounding_box(&self, eps: f64) -> (Vec<f64>, Vec<f64>) {
        let reach = self.radius + eps;
        let mut lo = vec![f64::NEG_INFINITY; self.dim];
        let mut hi = vec![f64::INFINITY; self.dim];
        for k in 0..self.n {
            for (i, c) in self.sample(k).iter().enumerate() {
                lo[i] = lo[i].max(c - reach);
                hi[i] = hi[i].min(c + reach);
            }
        }
        (lo, hi)
    }

    fn gauge(&self, x: &[f64], _cap: f64) -> f64 {
        (self.farthest_distance(x) - self.radius).max(0.0)
    }
}
