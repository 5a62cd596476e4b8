//! Uniform contractions `(P, Q, lambda)`: `|p_i - p_j| >= lambda` and
//! `|q_i - q_j| <= lambda` for all pairs, plus experiment runners comparing
//! `V_k(P^r)` with `V_k(Q^r)`.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{diameter, dist, jung_factor, min_pairwise_distance, Point, PointSet};
use crate::lab::{
    check_kp_chain, dual_measures, passes, EvalOptions, EvalPath, InequalityReport, Params,
};
use crate::meb::circumradius;
use crate::rng::{derive, substream};

/// `(1 + sqrt(2d/(d+1)))^d`: the smallest `N` covered by the general argument.
pub fn kp_threshold(d: usize) -> f64 {
    (1.0 + jung_factor(d)).powi(d as i32)
}

/// Largest allowed packing jitter, as a fraction of lambda.
pub const MAX_JITTER: f64 = 0.49;

/// Default ratio `r / cr(P)`.
pub const DEFAULT_RADIUS_FACTOR: f64 = 1.05;

/// Point counts straddling the planar threshold.
pub const DEFAULT_ALEXANDER_RANGE: [usize; 7] = [2, 3, 4, 5, 8, 16, 64];

#[derive(Debug, Clone, PartialEq)]
pub struct ContractionPair {
    pub p: PointSet,
    pub q: PointSet,
    pub lambda: f64,
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::Domain(format!(
            "lambda must be positive, got {lambda}"
        )));
    }
    Ok(())
}

/// `N` points at pairwise distance at least `lambda`: the first `N` nodes of
/// a shuffled cubic grid of spacing `lambda (1 + 2 jitter)`, each moved by a
/// uniform vector of length at most `jitter lambda`.
pub fn gen_packing(n: usize, d: usize, lambda: f64, seed: u64, jitter: f64) -> Result<PointSet> {
    check_lambda(lambda)?;
    if n == 0 || d == 0 {
        return Err(Error::Domain(
            "need at least one point in dimension at least one".into(),
        ));
    }
    if !(0.0..=MAX_JITTER).contains(&jitter) {
        return Err(Error::Domain(format!(
            "jitter must lie in [0, {MAX_JITTER}], got {jitter}"
        )));
    }
    let mut side = 1usize;
    while (side as f64).powi(d as i32) < n as f64 {
        side += 1;
    }
    let spacing = lambda * (1.0 + 2.0 * jitter) * (1.0 + 1e-12);
    let shift = jitter * lambda * (1.0 - 1e-12);
    let offset = (side as f64 - 1.0) / 2.0;
    let total = side.pow(d as u32);
    let mut rng = substream(seed, 0x7061_636b);
    let mut order: Vec<usize> = (0..total).collect();
    order.shuffle(&mut rng);
    let points = order[..n]
        .iter()
        .map(|&idx| {
            let mut rest = idx;
            let mut x: Vec<f64> = (0..d)
                .map(|_| {
                    let i = rest % side;
                    rest /= side;
                    (i as f64 - offset) * spacing
                })
                .collect();
            if shift > 0.0 {
                let u = uniform_in_ball(&mut rng, d);
                for (xi, ui) in x.iter_mut().zip(u) {
                    *xi += shift * ui;
                }
            }
            Point(x)
        })
        .collect();
    let set = PointSet::new(d, points)?;
    if n > 1 && min_pairwise_distance(&set)? < lambda {
        return Err(Error::InternalConsistency(
            "packing generator produced a close pair".into(),
        ));
    }
    Ok(set)
}

fn uniform_in_ball(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        if v.iter().map(|x| x * x).sum::<f64>() <= 1.0 {
            return v;
        }
    }
}

/// `N` points uniform in `B[o, lambda / 2]`, so of diameter at most `lambda`.
pub fn gen_cluster(n: usize, d: usize, lambda: f64, seed: u64) -> Result<PointSet> {
    check_lambda(lambda)?;
    if n == 0 || d == 0 {
        return Err(Error::Domain(
            "need at least one point in dimension at least one".into(),
        ));
    }
    let radius = lambda / 2.0 * (1.0 - 1e-12);
    let mut rng = substream(seed, 0x636c_7573);
    let points = (0..n)
        .map(|_| {
            Point(
                uniform_in_ball(&mut rng, d)
                    .into_iter()
                    .map(|x| radius * x)
                    .collect(),
            )
        })
        .collect();
    let set = PointSet::new(d, points)?;
    if diameter(&set) > lambda {
        return Err(Error::InternalConsistency(
            "cluster generator exceeded the diameter bound".into(),
        ));
    }
    Ok(set)
}

/// Whether `(P, Q)` is a uniform contraction with separating value `lambda`.
pub fn verify_pair(p: &PointSet, q: &PointSet, lambda: f64) -> Result<bool> {
    if p.len() != q.len() {
        return Err(Error::Domain(format!(
            "|P| = {} but |Q| = {}",
            p.len(),
            q.len()
        )));
    }
    if p.dim() != q.dim() {
        return Err(Error::Domain("P and Q live in different dimensions".into()));
    }
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if dist(&p.point(i).0, &p.point(j).0) < lambda
                || dist(&q.point(i).0, &q.point(j).0) > lambda
            {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// How the radius of each trial is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum RadiusRule {
    Fixed(f64),
    /// `factor * cr(P)`, per trial.
    Circumradius(f64),
}

impl Default for RadiusRule {
    fn default() -> Self {
        RadiusRule::Circumradius(DEFAULT_RADIUS_FACTOR)
    }
}

impl RadiusRule {
    pub fn radius(self, p: &PointSet) -> f64 {
        match self {
            RadiusRule::Fixed(r) => r,
            RadiusRule::Circumradius(f) => f * circumradius(p),
        }
    }
}

/// The pair used by trial `trial` of a run seeded with `seed`. The packing
/// jitter is drawn per trial from `[0, MAX_JITTER]`.
pub fn trial_pair(
    d: usize,
    n: usize,
    lambda: f64,
    seed: u64,
    trial: usize,
) -> Result<ContractionPair> {
    let s = derive(seed, trial as u64);
    let jitter = substream(s, 0).gen_range(0.0..=MAX_JITTER);
    let p = gen_packing(n, d, lambda, derive(s, 1), jitter)?;
    let q = gen_cluster(n, d, lambda, derive(s, 2))?;
    Ok(ContractionPair { p, q, lambda })
}

/// One trial comparing `V_k(P^r)` with `V_k(Q^r)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub d: usize,
    pub n: usize,
    pub lambda: f64,
    pub r: f64,
    pub k: usize,
    pub seed: u64,
    pub trial: usize,
    #[serde(rename = "vP")]
    pub v_p: f64,
    #[serde(rename = "vQ")]
    pub v_q: f64,
    pub stderr_p: f64,
    pub stderr_q: f64,
    pub theorem_applicable: bool,
    pub pass: bool,
    pub path: EvalPath,
}

impl ExperimentResult {
    pub fn to_report(&self, name: &str) -> InequalityReport {
        let params = Params::dim(self.d)
            .k(self.k)
            .r(self.r)
            .lambda(self.lambda)
            .n(self.n)
            .seed(self.seed)
            .trial(self.trial);
        let mut rep = InequalityReport::new(
            name,
            params,
            self.v_p,
            self.v_q,
            self.stderr_p,
            self.stderr_q,
            self.path,
        );
        rep.v_p = Some(self.v_p);
        rep.v_q = Some(self.v_q);
        rep.theorem_applicable = Some(self.theorem_applicable);
        rep
    }
}

#[allow(clippy::too_many_arguments)]
fn run_trial(
    d: usize,
    k: usize,
    n: usize,
    lambda: f64,
    radius: RadiusRule,
    seed: u64,
    trial: usize,
    opts: &EvalOptions,
) -> Result<(ExperimentResult, ContractionPair)> {
    let pair = trial_pair(d, n, lambda, seed, trial)?;
    let r = radius.radius(&pair.p);
    let trial_opts = EvalOptions {
        seed: derive(seed, trial as u64 ^ 0x6576_616c),
        ..opts.clone()
    };
    let vp = dual_measures(&pair.p, r, &trial_opts, 1)?;
    let vq = dual_measures(&pair.q, r, &trial_opts, 2)?;
    let (v_p, v_q, se_p, se_q) = (vp.value(k)?, vq.value(k)?, vp.stderr(k)?, vq.stderr(k)?);
    let result = ExperimentResult {
        d,
        n,
        lambda,
        r,
        k,
        seed,
        trial,
        v_p,
        v_q,
        stderr_p: se_p,
        stderr_q: se_q,
        theorem_applicable: n as f64 >= kp_threshold(d),
        pass: passes(v_p, v_q, se_p, se_q),
        path: vp.path.join(vq.path),
    };
    Ok((result, pair))
}

/// Results of a batch of trials plus the per-link audit of the first trial.
#[derive(Debug, Clone, PartialEq)]
pub struct KpRun {
    pub results: Vec<ExperimentResult>,
    pub chain: Vec<InequalityReport>,
    /// The first trial's pair, kept for rendering.
    pub first: ContractionPair,
    pub first_r: f64,
}

/// Runs `trials` independent uniform-contraction trials. Trials run in
/// parallel; results are ordered by trial index and do not depend on the
/// number of worker threads.
#[allow(clippy::too_many_arguments)]
pub fn run_kp_trials(
    d: usize,
    k: usize,
    n: usize,
    lambda: f64,
    radius: RadiusRule,
    trials: usize,
    seed: u64,
    opts: &EvalOptions,
) -> Result<KpRun> {
    if d < 2 {
        return Err(Error::Domain(format!(
            "dimension must be at least 2, got {d}"
        )));
    }
    if k < 1 || k > d {
        return Err(Error::Domain(format!("need 1 <= k <= d, got k={k}, d={d}")));
    }
    if trials == 0 {
        return Err(Error::Domain("need at least one trial".into()));
    }
    if n < 2 {
        return Err(Error::Domain("need at least two points".into()));
    }
    let mut runs = (0..trials)
        .into_par_iter()
        .map(|t| run_trial(d, k, n, lambda, radius, seed, t, opts))
        .collect::<Result<Vec<_>>>()?;
    let (first_result, first) = runs[0].clone();
    let chain_opts = EvalOptions {
        seed: derive(seed, 0x6368_6169),
        ..opts.clone()
    };
    let mut chain = check_kp_chain(&first.p, &first.q, lambda, first_result.r, k, &chain_opts)?;
    for rep in &mut chain {
        rep.params.seed = Some(seed);
        rep.params.trial = Some(0);
    }
    let results = runs.drain(..).map(|(r, _)| r).collect();
    Ok(KpRun {
        results,
        chain,
        first,
        first_r: first_result.r,
    })
}

/// Planar perimeter comparisons (`k = 1`) over several point counts. Counts
/// below the threshold are run and reported like the others.
pub fn run_alexander_suite(
    lambda: f64,
    radius: RadiusRule,
    n_range: &[usize],
    trials: usize,
    seed: u64,
) -> Result<Vec<ExperimentResult>> {
    let opts = EvalOptions::with_seed(seed);
    let mut out = Vec::new();
    for &n in n_range {
        let run = run_kp_trials(
            2,
            1,
            n,
            lambda,
            radius,
            trials,
            derive(seed, n as u64),
            &opts,
        )?;
        out.extend(
            run.results
                .into_iter()
                .map(|r| ExperimentResult { seed, ..r }),
        );
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn planar_threshold() {
        assert_relative_eq!(
            kp_threshold(2),
            (1.0 + (4.0f64 / 3.0).sqrt()).powi(2),
            max_relative = 1e-15
        );
        assert!((kp_threshold(2) - 4.6427).abs() < 1e-4);
        assert!(4.0 < kp_threshold(2) && kp_threshold(2) < 5.0);
    }

    #[test]
    fn packing_examples() {
        let p = gen_packing(5, 2, 1.0, 3, 0.0).unwrap();
        assert_eq!(p.len(), 5);
        assert!(min_pairwise_distance(&p).unwrap() >= 1.0);
        let p = gen_packing(40, 3, 0.7, 3, 0.2).unwrap();
        assert!(min_pairwise_distance(&p).unwrap() >= 0.7);
        assert_eq!(gen_packing(1, 2, 1.0, 0, 0.3).unwrap().len(), 1);
        assert!(gen_packing(3, 2, 1.0, 0, 0.6).is_err());
        assert!(gen_packing(3, 2, -1.0, 0, 0.1).is_err());
    }

    #[test]
    fn cluster_examples() {
        for n in [1, 2, 10, 200] {
            let q = gen_cluster(n, 3, 1.3, n as u64).unwrap();
            assert_eq!(q.len(), n);
            assert!(diameter(&q) <= 1.3);
        }
    }

    #[test]
    fn pair_verification() {
        let pair = trial_pair(2, 6, 1.0, 11, 0).unwrap();
        assert!(verify_pair(&pair.p, &pair.q, 1.0).unwrap());
        assert!(!verify_pair(&pair.q, &pair.p, 1.0).unwrap());
        let one = PointSet::from_rows(vec![vec![0.0, 0.0]]).unwrap();
        assert!(verify_pair(&one, &one, 1.0).unwrap());
        assert!(verify_pair(&pair.p, &one, 1.0).is_err());
    }

    #[test]
    fn trials_are_ordered_and_reproducible() {
        let opts = EvalOptions::default();
        let a = run_kp_trials(2, 1, 5, 1.0, RadiusRule::Fixed(2.0), 12, 4, &opts).unwrap();
        let b = run_kp_trials(2, 1, 5, 1.0, RadiusRule::Fixed(2.0), 12, 4, &opts).unwrap();
        assert_eq!(a, b);
        assert!(a
            .results
            .iter()
            .enumerate()
            .all(|(i, r)| r.trial == i && r.pass && r.theorem_applicable));
        assert_eq!(a.chain.last().unwrap().name, "kp_final");
        assert!(a.chain.iter().all(|r| r.pass), "{:?}", a.chain);
    }

    #[test]
    fn empty_dual_is_trivial_pass() {
        let run = run_kp_trials(
            2,
            1,
            16,
            1.0,
            RadiusRule::Fixed(0.5),
            3,
            1,
            &EvalOptions::default(),
        )
        .unwrap();
        assert!(run.results.iter().all(|r| r.v_p == 0.0 && r.pass));
        assert_eq!(run.chain[0].name, "dual_empty");
    }

    #[test]
    fn scaling_covariance() {
        let pair = trial_pair(2, 6, 1.0, 5, 2).unwrap();
        let r = 1.05 * circumradius(&pair.p);
        let opts = EvalOptions::default();
        let t = 2.5;
        for k in 1..=2 {
            let base = check_kp_chain(&pair.p, &pair.q, 1.0, r, k, &opts).unwrap();
            let scaled =
                check_kp_chain(&pair.p.scaled(t), &pair.q.scaled(t), t, t * r, k, &opts).unwrap();
            let (b, s) = (base.last().unwrap(), scaled.last().unwrap());
            assert_relative_eq!(s.lhs, b.lhs * t.powi(k as i32), max_relative = 1e-9);
            assert_relative_eq!(s.rhs, b.rhs * t.powi(k as i32), max_relative = 1e-9);
            assert_eq!(s.pass, b.pass);
        }
    }

    #[test]
    fn relabeling_both_sets_changes_nothing() {
        let pair = trial_pair(2, 7, 1.0, 8, 0).unwrap();
        let perm = [3, 0, 6, 1, 5, 2, 4];
        let r = 2.5;
        let opts = EvalOptions::default();
        let a = check_kp_chain(&pair.p, &pair.q, 1.0, r, 1, &opts).unwrap();
        let b = check_kp_chain(
            &pair.p.permuted(&perm),
            &pair.q.permuted(&perm),
            1.0,
            r,
            1,
            &opts,
        )
        .unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_relative_eq!(x.lhs, y.lhs, max_relative = 1e-9, epsilon = 1e-12);
            assert_relative_eq!(x.rhs, y.rhs, max_relative = 1e-9, epsilon = 1e-12);
        }
    }

    #[test]
    fn lens_pair_perimeter_grows_under_contraction() {
        // N = 2: lens perimeter 4 r acos(delta / 2r) decreases in delta
        let lambda = 1.0;
        let p = PointSet::from_rows(vec![vec![-0.6, 0.0], vec![0.6, 0.0]]).unwrap();
        let q = PointSet::from_rows(vec![vec![-0.5, 0.0], vec![0.5, 0.0]]).unwrap();
        let reps = check_kp_chain(&p, &q, lambda, 1.0, 1, &EvalOptions::default()).unwrap();
        let fin = reps.last().unwrap();
        assert_relative_eq!(fin.lhs, 2.0 * (0.6f64).acos(), max_relative = 1e-9);
        assert_relative_eq!(fin.rhs, 2.0 * (0.5f64).acos(), max_relative = 1e-9);
        assert!(fin.pass && fin.theorem_applicable == Some(false));
    }

    #[test]
    fn alexander_suite_bookkeeping() {
        let res = run_alexander_suite(1.0, RadiusRule::default(), &DEFAULT_ALEXANDER_RANGE, 4, 2)
            .unwrap();
        assert_eq!(res.len(), 28);
        for r in &res {
            assert_eq!(r.theorem_applicable, r.n >= 5);
            assert!(r.pass);
        }
    }
}
