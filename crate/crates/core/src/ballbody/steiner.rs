//! Monte-Carlo intrinsic volumes by fitting the Steiner polynomial
//! `V_d(K + eps B) = sum_i omega_{d-i} V_i(K) eps^{d-i}`.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::omega;
use crate::rng::{derive, substream};
use crate::volumes::IntrinsicVolumes;

/// Largest acceptable condition number of the column-scaled weighted design.
pub const MAX_CONDITION: f64 = 1e8;

/// A convex body that can answer "is `x` within `eps` of the body?".
pub trait ParallelBody: Sync {
    fn dim(&self) -> usize;

    fn is_empty(&self) -> bool;

    /// Length scale used for the default epsilon grid.
    fn scale(&self) -> f64;

    /// Axis-aligned box containing the `eps`-parallel body.
    fn bounding_box(&self, eps: f64) -> (Vec<f64>, Vec<f64>);

    /// Distance from `x` to the body (0 for members), good enough to decide
    /// `dist <= cap`: the result is at most `cap` exactly when the distance
    /// is, but it may be any upper bound below `cap` or any value above it.
    fn gauge(&self, x: &[f64], cap: f64) -> f64;
}

/// Sampling configuration for [`steiner_fit`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    /// Hit-or-miss samples per epsilon.
    pub samples: usize,
    pub seed: u64,
    /// Strictly increasing positive parallel distances.
    pub epsilons: Vec<f64>,
    /// Samples per independently seeded chunk.
    pub chunk: usize,
}

pub const DEFAULT_CHUNK: usize = 8192;

/// `d + 3` geometrically spaced values in `[0.1 scale, scale]`.
pub fn default_epsilons(dim: usize, scale: f64) -> Vec<f64> {
    let n = dim + 3;
    (0..n)
        .map(|i| scale * 0.1 * 10f64.powf(i as f64 / (n - 1) as f64))
        .collect()
}

impl McConfig {
    pub fn new(samples: usize, seed: u64, epsilons: Vec<f64>) -> Self {
        McConfig {
            samples,
            seed,
            epsilons,
            chunk: DEFAULT_CHUNK,
        }
    }

    pub fn with_default_grid(dim: usize, scale: f64, samples: usize, seed: u64) -> Self {
        McConfig::new(samples, seed, default_epsilons(dim, scale))
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        if self.samples < 1000 {
            return Err(Error::Domain(format!(
                "need at least 1000 samples, got {}",
                self.samples
            )));
        }
        if self.chunk == 0 {
            return Err(Error::Domain("chunk size must be positive".into()));
        }
        if self.epsilons.len() < dim + 1 {
            return Err(Error::Domain(format!(
                "need at least {} epsilons for dimension {dim}, got {}",
                dim + 1,
                self.epsilons.len()
            )));
        }
        if self.epsilons.iter().any(|e| !(*e > 0.0 && e.is_finite()))
            || self.epsilons.windows(2).any(|w| w[1] <= w[0])
        {
            return Err(Error::Domain(
                "epsilons must be positive and strictly increasing".into(),
            ));
        }
        Ok(())
    }
}

/// Hit-or-miss estimate of `V_d(K + eps B)` with its standard error, using
/// `cfg.samples` points drawn from the seed `stream_seed`.
pub fn parallel_volume<B: ParallelBody + ?Sized>(
    body: &B,
    eps: f64,
    cfg: &McConfig,
    stream_seed: u64,
) -> (f64, f64) {
    let (lo, hi) = body.bounding_box(eps);
    let box_vol: f64 = lo.iter().zip(&hi).map(|(a, b)| (b - a).max(0.0)).product();
    if box_vol == 0.0 {
        return (0.0, 0.0);
    }
    let chunks = cfg.samples.div_ceil(cfg.chunk);
    let hits: u64 = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = substream(stream_seed, c as u64);
            let m = cfg.chunk.min(cfg.samples - c * cfg.chunk);
            let mut x = vec![0.0; lo.len()];
            let mut count = 0u64;
            for _ in 0..m {
                for k in 0..x.len() {
                    x[k] = rng.gen_range(lo[k]..=hi[k]);
                }
                if body.gauge(&x, eps) <= eps {
                    count += 1;
                }
            }
            count
        })
        .sum();
    let n = cfg.samples as f64;
    let p = hits as f64 / n;
    // keep the variance positive at p in {0, 1}
    let pv = (hits as f64 + 0.5) / (n + 1.0);
    (box_vol * p, box_vol * (pv * (1.0 - pv) / n).sqrt())
}

/// Intrinsic volumes of `body` from a weighted least-squares fit of the
/// Steiner polynomial to hit-or-miss parallel volumes, with `V_0 = 1`.
///
/// Empty bodies yield all zeros (including `V_0`).
pub fn steiner_fit<B: ParallelBody + ?Sized>(body: &B, cfg: &McConfig) -> Result<IntrinsicVolumes> {
    let d = body.dim();
    if body.is_empty() {
        return Ok(IntrinsicVolumes::empty(d));
    }
    cfg.validate(d)?;
    let om: Vec<f64> = (0..=d).map(omega).collect::<Result<_>>()?;

    let estimates: Vec<(f64, f64)> = cfg
        .epsilons
        .iter()
        .enumerate()
        .map(|(j, &eps)| parallel_volume(body, eps, cfg, derive(cfg.seed, j as u64)))
        .collect();

    // unknowns V_1..V_d; the V_0 term omega_d eps^d moves to the left side
    let m = cfg.epsilons.len();
    let design = DMatrix::from_fn(m, d, |j, i| {
        let k = i + 1;
        om[d - k] * cfg.epsilons[j].powi((d - k) as i32)
    });
    let y = DVector::from_fn(m, |j, _| {
        estimates[j].0 - om[d] * cfg.epsilons[j].powi(d as i32)
    });
    let w = DVector::from_fn(m, |j, _| {
        1.0 / estimates[j].1.powi(2).max(f64::MIN_POSITIVE)
    });

    let mut scaled = DMatrix::from_fn(m, d, |j, i| design[(j, i)] * w[j].sqrt());
    let norms: Vec<f64> = (0..d).map(|i| scaled.column(i).norm()).collect();
    for (i, n) in norms.iter().enumerate() {
        scaled.column_mut(i).scale_mut(1.0 / n);
    }
    let sv = scaled.singular_values();
    let condition = sv.max() / sv.min();
    if !condition.is_finite() || condition > MAX_CONDITION {
        return Err(Error::FitConditioning { condition });
    }

    let xtw = design.transpose() * DMatrix::from_diagonal(&w);
    let normal = &xtw * &design;
    let cov = normal.try_inverse().ok_or(Error::FitConditioning {
        condition: f64::INFINITY,
    })?;
    let coef = &cov * (&xtw * &y);

    let mut values = vec![1.0];
    let mut stderr = vec![0.0];
    for i in 0..d {
        let se = cov[(i, i)].max(0.0).sqrt();
        let mut v = coef[i];
        if v < 0.0 {
            if v >= -3.0 * se {
                log::warn!(
                    "fitted V_{} = {v:e} is within 3 stderr of 0; clamping",
                    i + 1
                );
                v = 0.0;
            } else {
                return Err(Error::FitFailure(format!(
                    "fitted V_{} = {v:e} is negative beyond 3 stderr ({se:e})",
                    i + 1
                )));
            }
        }
        values.push(v);
        stderr.push(se);
    }
    Ok(IntrinsicVolumes {
        dim: d,
        values,
        stderr,
    })
}
