//! Numerical checks of the ball-body inequalities and their supporting
//! identities, reported as `lhs <= rhs` comparisons with a statistical margin.

mod checks;
mod eval;
mod report;

pub use checks::{
    check_alexandrov, check_alexandrov_body, check_blaschke_santalo, check_bm_chain, check_jung,
    check_kp_chain, check_minkowski_identity, check_volume_product, check_volume_product_body,
    intrinsic_radius, MEMBERSHIP_PROBES,
};
pub use eval::{dual_measures, hull_measures, inflated_hull_volume, EvalOptions, Measured};
pub use report::{
    passes, write_csv, write_json_lines, write_reports, EvalPath, Format, InequalityReport, Params,
    CSV_COLUMNS, CSV_HEADER_COMMENT,
};

use rand::Rng;

use crate::error::{Error, Result};
use crate::geom::{Point, PointSet};
use crate::rng::substream;

/// `n` points uniform in a ball around the origin whose radius is drawn
/// from `[0.2 r, r]`, so the set has circumradius at most `r`.
pub fn random_config(d: usize, n: usize, r: f64, seed: u64) -> Result<PointSet> {
    if d == 0 || n == 0 {
        return Err(Error::Domain(
            "need at least one point in dimension at least one".into(),
        ));
    }
    let mut rng = substream(seed, 0x6366_6731);
    let rho = r * rng.gen_range(0.2..=1.0);
    let points = (0..n)
        .map(|_| loop {
            let v: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..=1.0)).collect();
            if v.iter().map(|x| x * x).sum::<f64>() <= 1.0 {
                break Point(v.into_iter().map(|x| rho * x).collect());
            }
        })
        .collect();
    PointSet::new(d, points)
}
