use std::f64::consts::{PI, TAU};

use rand::Rng;

use super::eval::{
    dual_measures, hull_measures, inflated_hull_volume, require_hull_domain, EvalOptions, Measured,
};
use super::report::{EvalPath, InequalityReport, Params};
use crate::arcgon::{r_dual, r_hull, s_dual, ArcGon, EPS_GEO};
use crate::ballbody::{BallBodySpec, SampledHull};
use crate::contraction::{kp_threshold, verify_pair};
use crate::error::{Error, Result};
use crate::geom::{
    ball_intrinsic_volume, ball_radius_for_intrinsic_volume, diameter, dist, jung_factor, omega,
    unit_ball_intrinsic_volume, PointSet,
};
use crate::meb::circumradius;
use crate::rng::{derive, substream};
use crate::volumes::IntrinsicVolumes;

// seed labels, one per estimated body
const LABEL_DUAL: u64 = 1;
const LABEL_HULL: u64 = 2;
const LABEL_INFLATED: u64 = 3;
const LABEL_Q: u64 = 4;
const LABEL_MEMBERSHIP: u64 = 5;
const LABEL_DIRS: u64 = 6;

/// Points drawn for the union-of-balls membership check.
pub const MEMBERSHIP_PROBES: usize = 1000;

fn check_orders(d: usize, k: usize, l: usize) -> Result<()> {
    if k < 1 || k > l || l > d {
        return Err(Error::Domain(format!(
            "need 1 <= k <= l <= d, got k={k}, l={l}, d={d}"
        )));
    }
    Ok(())
}

fn check_order(d: usize, k: usize) -> Result<()> {
    if k < 1 || k > d {
        return Err(Error::Domain(format!("need 1 <= k <= d, got k={k}, d={d}")));
    }
    Ok(())
}

/// `(R, stderr)` of the ball with the same `V_l` as `conv_r(A)`, clamped to `[0, r]`.
fn radius_from(hull: &Measured, d: usize, l: usize, r: f64) -> Result<(f64, f64)> {
    let v = hull.value(l)?;
    let radius = ball_radius_for_intrinsic_volume(d, l, v.max(0.0))?;
    if radius > r {
        log::debug!("intrinsic radius estimate {radius} exceeds r = {r}; clamping");
    }
    // dR/dV = R / (l V)
    let se = if v > 0.0 {
        radius / (l as f64 * v) * hull.stderr(l)?
    } else {
        0.0
    };
    Ok((radius.min(r), se))
}

/// The radius `R` of the ball whose `V_l` equals `V_l(conv_r A)`.
pub fn intrinsic_radius(a: &PointSet, r: f64, l: usize, opts: &EvalOptions) -> Result<f64> {
    let d = a.dim();
    check_order(d, l)?;
    let hull = hull_measures(a, r, opts, LABEL_HULL)?;
    Ok(radius_from(&hull, d, l, r)?.0)
}

/// `V_k(A^r) <= V_k(B[o, r - R])` with `R` the `l`-th intrinsic radius of `A`.
pub fn check_blaschke_santalo(
    a: &PointSet,
    r: f64,
    k: usize,
    l: usize,
    opts: &EvalOptions,
) -> Result<InequalityReport> {
    let d = a.dim();
    check_orders(d, k, l)?;
    require_hull_domain(a, r)?;
    let dual = dual_measures(a, r, opts, LABEL_DUAL)?;
    let hull = hull_measures(a, r, opts, LABEL_HULL)?;
    let (radius, se_radius) = radius_from(&hull, d, l, r)?;
    let ck = unit_ball_intrinsic_volume(d, k)?;
    let rho = r - radius;
    let rhs = ck * rho.powi(k as i32);
    let se_rhs = k as f64 * ck * rho.powi(k as i32 - 1) * se_radius;
    Ok(InequalityReport::new(
        "blaschke_santalo",
        Params::dim(d).k(k).l(l).r(r).n(a.len()).seed(opts.seed),
        dual.value(k)?,
        rhs,
        dual.stderr(k)?,
        se_rhs,
        dual.path.join(hull.path),
    ))
}

fn product_rhs(d: usize, k: usize, r: f64) -> Result<f64> {
    Ok((r / 2.0).powi(2 * k as i32) * unit_ball_intrinsic_volume(d, k)?.powi(2))
}

/// `V_k(conv_r A) V_k(A^r) <= (r/2)^{2k} V_k(B)^2`.
pub fn check_volume_product(
    a: &PointSet,
    r: f64,
    k: usize,
    opts: &EvalOptions,
) -> Result<InequalityReport> {
    let d = a.dim();
    check_order(d, k)?;
    require_hull_domain(a, r)?;
    let dual = dual_measures(a, r, opts, LABEL_DUAL)?;
    let hull = hull_measures(a, r, opts, LABEL_HULL)?;
    let (x, y) = (hull.value(k)?, dual.value(k)?);
    let se = x.abs() * dual.stderr(k)? + y.abs() * hull.stderr(k)?;
    Ok(InequalityReport::new(
        "volume_product",
        Params::dim(d).k(k).r(r).n(a.len()).seed(opts.seed),
        x * y,
        product_rhs(d, k, r)?,
        se,
        0.0,
        dual.path.join(hull.path),
    ))
}

/// The volume product of a planar r-ball body given directly, with its
/// r-dual computed exactly.
pub fn check_volume_product_body(body: &ArcGon, r: f64, k: usize) -> Result<InequalityReport> {
    check_order(2, k)?;
    if body.is_empty() {
        return Err(Error::EmptyBody);
    }
    let dual = s_dual(body, r)?;
    if dual.path.is_approximate() {
        log::warn!("r-dual computed by {}", dual.path.as_str());
    }
    let lhs = body.measures().values[k] * dual.body.measures().values[k];
    Ok(InequalityReport::exact(
        "volume_product",
        Params::dim(2).k(k).r(r),
        lhs,
        product_rhs(2, k, r)?,
    ))
}

fn root(v: f64, se: f64, k: usize) -> (f64, f64) {
    let v = v.max(0.0);
    let x = v.powf(1.0 / k as f64);
    let dx = if v > 0.0 {
        x / (k as f64 * v) * se
    } else {
        0.0
    };
    (x, dx)
}

/// `V_k(A^r)^{1/k} + V_k(conv_r A)^{1/k} <= V_k(B[o, r])^{1/k}`.
pub fn check_bm_chain(
    a: &PointSet,
    r: f64,
    k: usize,
    opts: &EvalOptions,
) -> Result<InequalityReport> {
    let d = a.dim();
    check_order(d, k)?;
    require_hull_domain(a, r)?;
    let dual = dual_measures(a, r, opts, LABEL_DUAL)?;
    let hull = hull_measures(a, r, opts, LABEL_HULL)?;
    let (x, dx) = root(dual.value(k)?, dual.stderr(k)?, k);
    let (y, dy) = root(hull.value(k)?, hull.stderr(k)?, k);
    let rhs = ball_intrinsic_volume(d, k, r)?.powf(1.0 / k as f64);
    Ok(InequalityReport::new(
        "brunn_minkowski",
        Params::dim(d).k(k).r(r).n(a.len()).seed(opts.seed),
        x + y,
        rhs,
        dx + dy,
        0.0,
        dual.path.join(hull.path),
    ))
}

/// `(V_l / V_l(B))^k <= (V_k / V_k(B))^l` for `k <= l`.
pub fn check_alexandrov(
    v: &IntrinsicVolumes,
    k: usize,
    l: usize,
    path: EvalPath,
) -> Result<InequalityReport> {
    let d = v.dim;
    check_orders(d, k, l)?;
    let (cl, ck) = (
        unit_ball_intrinsic_volume(d, l)?,
        unit_ball_intrinsic_volume(d, k)?,
    );
    let (xl, xk) = (v.get(l)?.max(0.0) / cl, v.get(k)?.max(0.0) / ck);
    let lhs = xl.powi(k as i32);
    let rhs = xk.powi(l as i32);
    let se_lhs = k as f64 * xl.powi(k as i32 - 1) * v.err(l)? / cl;
    let se_rhs = l as f64 * xk.powi(l as i32 - 1) * v.err(k)? / ck;
    Ok(InequalityReport::new(
        "alexandrov",
        Params::dim(d).k(k).l(l),
        lhs,
        rhs,
        se_lhs,
        se_rhs,
        path,
    ))
}

/// Both forms for `conv_r(A)`: the normalized comparison and
/// `V_k(B[o, R_l]) <= V_k(conv_r A)`.
pub fn check_alexandrov_body(
    a: &PointSet,
    r: f64,
    k: usize,
    l: usize,
    opts: &EvalOptions,
) -> Result<Vec<InequalityReport>> {
    let d = a.dim();
    check_orders(d, k, l)?;
    let hull = hull_measures(a, r, opts, LABEL_HULL)?;
    let params = Params::dim(d).k(k).l(l).r(r).n(a.len()).seed(opts.seed);
    let mut first = check_alexandrov(&hull.volumes, k, l, hull.path)?;
    first.params = params.clone();
    let (radius, se_radius) = radius_from(&hull, d, l, r)?;
    let lhs = ball_intrinsic_volume(d, k, radius)?;
    let se_lhs = k as f64 * lhs / radius.max(f64::MIN_POSITIVE) * se_radius;
    let second = InequalityReport::new(
        "alexandrov_radius",
        params,
        lhs,
        hull.value(k)?,
        se_lhs,
        hull.stderr(k)?,
        hull.path,
    );
    Ok(vec![first, second])
}

/// Largest deviation of `h_{A^r}(u) + h_{conv_r A}(-u)` from `r` over
/// `n_dirs` directions (evenly spaced in the plane, random otherwise).
///
/// Planar inputs pass below `1e-7 r`. Otherwise `conv_r A` is approximated
/// from boundary samples of `A^r`, which can only enlarge its support by the
/// sample covering radius; the tolerance is `10 tol` plus that radius.
pub fn check_minkowski_identity(
    a: &PointSet,
    r: f64,
    n_dirs: usize,
    opts: &EvalOptions,
) -> Result<InequalityReport> {
    let d = a.dim();
    require_hull_domain(a, r)?;
    if n_dirs == 0 {
        return Err(Error::Domain("need at least one direction".into()));
    }
    let params = Params::dim(d).r(r).n(a.len()).seed(opts.seed);
    if d == 2 {
        let dual = r_dual(a, r)?;
        let hull = r_hull(a, r)?.body;
        let mut worst: f64 = 0.0;
        for i in 0..n_dirs {
            let t = TAU * i as f64 / n_dirs as f64;
            let dev = dual.support_at(t)? + hull.support_at(t + PI)? - r;
            worst = worst.max(dev.abs());
        }
        return Ok(InequalityReport::exact(
            "minkowski_identity",
            params,
            worst,
            1e-7 * r,
        ));
    }
    let body = BallBodySpec::new(a.clone(), r)?;
    let tol = body.default_tol();
    let hull = SampledHull::new(&body, r, opts.hull_samples, derive(opts.seed, LABEL_HULL))?;
    let probes =
        body.boundary_samples(opts.hull_samples / 4 + 1, derive(opts.seed, LABEL_DIRS ^ 1))?;
    let cover = hull.covering_radius(&probes);
    let hull_body = hull.as_ball_body()?;
    let mut rng = substream(opts.seed, LABEL_DIRS);
    let mut worst: f64 = 0.0;
    for _ in 0..n_dirs {
        let u = crate::ballbody::random_unit(&mut rng, d);
        let neg: Vec<f64> = u.iter().map(|x| -x).collect();
        let dev = body.support_value(&u, tol)? + hull_body.support_value(&neg, tol)? - r;
        worst = worst.max(dev.abs());
    }
    Ok(InequalityReport::new(
        "minkowski_identity",
        params,
        worst,
        10.0 * tol + cover,
        0.0,
        0.0,
        EvalPath::Mc,
    ))
}

/// Jung's bound `cr(S) <= sqrt(2d/(d+1)) diam(S) / 2`.
pub fn check_jung(s: &PointSet) -> InequalityReport {
    let d = s.dim();
    let lhs = circumradius(s);
    let rhs = jung_factor(d) * diameter(s) / 2.0;
    InequalityReport::exact("jung", Params::dim(d).n(s.len()), lhs, rhs)
}

/// Per-link audit of the Kneser-Poulsen-type argument for a uniform
/// contraction `(P, Q, lambda)` at radius `r`. The last report is always
/// the final comparison `V_k(P^r) <= V_k(Q^r)`.
pub fn check_kp_chain(
    p: &PointSet,
    q: &PointSet,
    lambda: f64,
    r: f64,
    k: usize,
    opts: &EvalOptions,
) -> Result<Vec<InequalityReport>> {
    if !verify_pair(p, q, lambda)? {
        return Err(Error::Domain(
            "(P, Q) is not a uniform contraction with the given lambda".into(),
        ));
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::Domain(format!("r must be positive, got {r}")));
    }
    let d = p.dim();
    check_order(d, k)?;
    let n = p.len();
    let params = Params::dim(d).k(k).r(r).lambda(lambda).n(n).seed(opts.seed);
    let ck = unit_ball_intrinsic_volume(d, k)?;
    let half = lambda / 2.0;

    let vq = dual_measures(q, r, opts, LABEL_Q)?;
    let (v_q, se_q) = (vq.value(k)?, vq.stderr(k)?);
    let cr_p = circumradius(p);
    let mut out = Vec::new();
    let applicable = n as f64 >= kp_threshold(d);

    if cr_p > r * (1.0 + EPS_GEO) {
        out.push(InequalityReport::new(
            "dual_empty",
            params.clone(),
            0.0,
            v_q,
            0.0,
            se_q,
            vq.path,
        ));
        let mut fin = InequalityReport::new("kp_final", params, 0.0, v_q, 0.0, se_q, vq.path);
        fin.v_p = Some(0.0);
        fin.v_q = Some(v_q);
        fin.theorem_applicable = Some(applicable);
        out.push(fin);
        return Ok(out);
    }
    out.push(InequalityReport::exact(
        "circumradius_case",
        params.clone(),
        cr_p,
        r,
    ));
    out.push(membership_report(p, r, half, params.clone(), opts.seed));

    // packing bound on the inflated hull
    let (inflated, se_inflated, inflated_path) =
        inflated_hull_volume(p, r, half, opts, LABEL_INFLATED)?;
    let packed = omega(d)? * n as f64 * half.powi(d as i32);
    out.push(InequalityReport::new(
        "packing_volume",
        params.clone(),
        packed,
        inflated,
        0.0,
        se_inflated,
        inflated_path,
    ));

    let vp = dual_measures(p, r, opts, LABEL_DUAL)?;
    let (v_p, se_p) = (vp.value(k)?, vp.stderr(k)?);
    let upper_radius = r - ((n as f64).powf(1.0 / d as f64) - 1.0) * half;
    let lower_radius = r - jung_factor(d) * half;
    out.push(InequalityReport::new(
        "dual_upper_bound",
        params.clone(),
        v_p,
        ck * upper_radius.powi(k as i32),
        se_p,
        0.0,
        vp.path,
    ));
    out.push(InequalityReport::exact(
        "upper_radius_nonneg",
        params.clone(),
        0.0,
        upper_radius,
    ));
    if applicable {
        out.push(InequalityReport::exact(
            "threshold_order",
            params.clone(),
            upper_radius,
            lower_radius,
        ));
    }
    out.push(InequalityReport::exact(
        "jung_q",
        params.clone(),
        circumradius(q),
        jung_factor(d) * half,
    ));
    // a ball of negative radius is empty
    out.push(InequalityReport::new(
        "hull_lower_bound",
        params.clone(),
        ck * lower_radius.max(0.0).powi(k as i32),
        v_q,
        0.0,
        se_q,
        vq.path,
    ));
    let mut fin = InequalityReport::new(
        "kp_final",
        params,
        v_p,
        v_q,
        se_p,
        se_q,
        vp.path.join(vq.path),
    );
    fin.v_p = Some(v_p);
    fin.v_q = Some(v_q);
    fin.theorem_applicable = Some(applicable);
    out.push(fin);
    Ok(out)
}

/// `x` lies in `(P_t)^{r+t}` exactly when it lies in `P^r`, where `P_t` is
/// the union of the balls `B[p, t]`. The first test uses the farthest point
/// of each ball from `x`; `lhs` counts disagreements.
fn membership_report(p: &PointSet, r: f64, t: f64, params: Params, seed: u64) -> InequalityReport {
    let meb = crate::meb::min_enclosing_ball(p, crate::meb::DEFAULT_MEB_SEED);
    let reach = r + t;
    let mut rng = substream(seed, LABEL_MEMBERSHIP);
    let mut mismatches = 0usize;
    for _ in 0..MEMBERSHIP_PROBES {
        let x: Vec<f64> = meb
            .center
            .0
            .iter()
            .map(|c| c + rng.gen_range(-reach..=reach))
            .collect();
        let mut in_union_dual = true;
        let mut in_dual = true;
        for pi in p.iter() {
            let gap = dist(&x, &pi.0);
            // farthest point of B[p, t] from x
            let far: Vec<f64> = if gap > 0.0 {
                pi.0.iter()
                    .zip(&x)
                    .map(|(c, xi)| c + t * (c - xi) / gap)
                    .collect()
            } else {
                let mut e = pi.0.clone();
                e[0] += t;
                e
            };
            in_union_dual &= dist(&x, &far) <= r + t;
            in_dual &= gap <= r;
        }
        // ignore draws within rounding of the boundary
        let margin = p
            .iter()
            .map(|pi| (dist(&x, &pi.0) - r).abs())
            .fold(f64::INFINITY, f64::min);
        if in_union_dual != in_dual && margin > 1e-12 * reach {
            mismatches += 1;
        }
    }
    InequalityReport::exact("union_membership", params, mismatches as f64, 0.0)
}
