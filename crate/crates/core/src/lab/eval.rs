//! Intrinsic volumes of the bodies the checkers compare, exact in the plane
//! and by Monte-Carlo otherwise.

use serde::{Deserialize, Serialize};

use super::report::EvalPath;
use crate::arcgon::{r_dual, r_hull, s_dual};
use crate::ballbody::{
    default_epsilons, parallel_volume, steiner_fit, BallBodySpec, McConfig, SampledHull,
    HULL_BOUNDARY_SAMPLES,
};
use crate::error::{Error, Result};
use crate::geom::{ball_intrinsic_volume, PointSet};
use crate::meb::circumradius;
use crate::rng::derive;
use crate::volumes::IntrinsicVolumes;

/// Knobs for the Monte-Carlo path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalOptions {
    /// Hit-or-miss samples per epsilon.
    pub samples: usize,
    pub seed: u64,
    /// Overrides the default epsilon grid.
    pub epsilons: Option<Vec<f64>>,
    /// Boundary points of `A^r` used for `conv_r(A)` in dimension three and up.
    pub hull_samples: usize,
    /// Use the Monte-Carlo path even in the plane.
    pub force_mc: bool,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            samples: 200_000,
            seed: 0,
            epsilons: None,
            hull_samples: HULL_BOUNDARY_SAMPLES,
            force_mc: false,
        }
    }
}

impl EvalOptions {
    pub fn with_seed(seed: u64) -> Self {
        EvalOptions {
            seed,
            ..EvalOptions::default()
        }
    }

    pub fn exact_in(&self, dim: usize) -> bool {
        dim == 2 && !self.force_mc
    }

    pub fn path(&self, dim: usize) -> EvalPath {
        if self.exact_in(dim) {
            EvalPath::Exact2d
        } else {
            EvalPath::Mc
        }
    }

    /// Sampling configuration for a body of length scale `scale`; `label`
    /// separates the random streams of different bodies.
    pub fn mc_config(&self, dim: usize, scale: f64, label: u64) -> McConfig {
        let eps = self
            .epsilons
            .clone()
            .unwrap_or_else(|| default_epsilons(dim, scale));
        McConfig::new(self.samples, derive(self.seed, label), eps)
    }
}

/// Intrinsic volumes plus the path that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct Measured {
    pub volumes: IntrinsicVolumes,
    pub path: EvalPath,
}

impl Measured {
    fn exact(volumes: IntrinsicVolumes) -> Self {
        Measured {
            volumes,
            path: EvalPath::Exact2d,
        }
    }

    pub fn value(&self, k: usize) -> Result<f64> {
        self.volumes.get(k)
    }

    pub fn stderr(&self, k: usize) -> Result<f64> {
        self.volumes.err(k)
    }
}

fn ball_volumes(d: usize, radius: f64) -> Result<IntrinsicVolumes> {
    let values = (0..=d)
        .map(|l| ball_intrinsic_volume(d, l, radius))
        .collect::<Result<_>>()?;
    Ok(IntrinsicVolumes::exact(values))
}

fn point_volumes(d: usize) -> IntrinsicVolumes {
    let mut values = vec![0.0; d + 1];
    values[0] = 1.0;
    IntrinsicVolumes::exact(values)
}

/// Intrinsic volumes of `A^r`.
pub fn dual_measures(a: &PointSet, r: f64, opts: &EvalOptions, label: u64) -> Result<Measured> {
    let d = a.dim();
    if opts.exact_in(d) {
        return Ok(Measured::exact(r_dual(a, r)?.measures()));
    }
    let body = BallBodySpec::new(a.clone(), r)?;
    if body.is_empty() {
        return Ok(Measured {
            volumes: IntrinsicVolumes::empty(d),
            path: EvalPath::Mc,
        });
    }
    if body.is_point() {
        return Ok(Measured {
            volumes: point_volumes(d),
            path: EvalPath::Mc,
        });
    }
    let volumes = steiner_fit(&body, &opts.mc_config(d, r, label))?;
    Ok(Measured {
        volumes,
        path: EvalPath::Mc,
    })
}

/// Checks `0 < cr(A) <= r`.
pub fn require_hull_domain(a: &PointSet, r: f64) -> Result<f64> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::Domain(format!("r must be positive, got {r}")));
    }
    let cr = circumradius(a);
    if cr > r * (1.0 + crate::arcgon::EPS_GEO) {
        return Err(Error::HullUndefined {
            circumradius: cr,
            r,
        });
    }
    if cr <= 1e-12 * r {
        return Err(Error::Degenerate(
            "the generating set has circumradius 0".into(),
        ));
    }
    Ok(cr)
}

/// Intrinsic volumes of `conv_r(A)`; requires `0 < cr(A) <= r`.
pub fn hull_measures(a: &PointSet, r: f64, opts: &EvalOptions, label: u64) -> Result<Measured> {
    require_hull_domain(a, r)?;
    let d = a.dim();
    if opts.exact_in(d) {
        let hull = r_hull(a, r)?;
        if hull.path.is_approximate() {
            log::warn!("r-hull computed by {}", hull.path.as_str());
        }
        return Ok(Measured::exact(hull.body.measures()));
    }
    let body = BallBodySpec::new(a.clone(), r)?;
    if body.is_point() {
        return Ok(Measured {
            volumes: ball_volumes(d, r)?,
            path: EvalPath::Mc,
        });
    }
    let hull = SampledHull::new(
        &body,
        r,
        opts.hull_samples,
        derive(opts.seed, label ^ 0x6875),
    )?;
    let volumes = steiner_fit(&hull, &opts.mc_config(d, r, label))?;
    Ok(Measured {
        volumes,
        path: EvalPath::Mc,
    })
}

/// Volume of `(P^r)^{r+t}`, which equals `conv_{r+t}` of the union of the
/// balls `B[p, t]` when `cr(P) <= r`. Returns `(value, stderr, path)`.
pub fn inflated_hull_volume(
    p: &PointSet,
    r: f64,
    t: f64,
    opts: &EvalOptions,
    label: u64,
) -> Result<(f64, f64, EvalPath)> {
    let d = p.dim();
    let s = r + t;
    if opts.exact_in(d) {
        let dual = r_dual(p, r)?;
        if dual.is_empty() {
            return Err(Error::HullUndefined {
                circumradius: circumradius(p),
                r,
            });
        }
        let body = s_dual(&dual, s)?;
        if body.path.is_approximate() {
            log::warn!("inflated hull computed by {}", body.path.as_str());
        }
        return Ok((body.body.area(), 0.0, EvalPath::Exact2d));
    }
    let body = BallBodySpec::new(p.clone(), r)?;
    if body.is_empty() {
        return Err(Error::HullUndefined {
            circumradius: body.circumradius(),
            r,
        });
    }
    if body.is_point() {
        return Ok((ball_intrinsic_volume(d, d, s)?, 0.0, EvalPath::Mc));
    }
    let hull = SampledHull::new(
        &body,
        s,
        opts.hull_samples,
        derive(opts.seed, label ^ 0x6875),
    )?;
    let cfg = opts.mc_config(d, s, label);
    cfg.validate(d)?;
    let (v, se) = parallel_volume(&hull, 0.0, &cfg, cfg.seed);
    Ok((v, se, EvalPath::Mc))
}
