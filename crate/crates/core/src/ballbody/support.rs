//! Exact support values of a ball body by an active-set method.
//!
//! The maximizer of `<x, u>` over an intersection of radius-r balls lies on
//! the sphere cut out by at most `d` of the boundary spheres. For a candidate
//! set `T` that sphere has center the circumcenter of `T`, radius
//! `sqrt(r^2 - R_T^2)`, and the best point on it is reached along `u`
//! projected off the affine hull of `T`. The candidate is optimal for `T`
//! when `u` is a nonnegative combination of the outward normals; the most
//! violated ball is then added until the point is feasible for all balls.

use nalgebra::{DMatrix, DVector};

use super::BallBodySpec;
use crate::geom::{dist, dot, norm};

// relative slack for feasibility and multiplier signs
const FEAS_TOL: f64 = 1e-11;
const KKT_TOL: f64 = 1e-9;

/// Best point of the face cut out by the spheres around `face`, with its
/// multipliers certified; `None` when the spheres miss each other or `u`
/// leaves the normal cone.
fn face_optimum(body: &BallBodySpec, face: &[usize], u: &[f64]) -> Option<Vec<f64>> {
    let d = body.dim();
    let r = body.radius;
    let m = face.len();
    if m > d {
        return None;
    }
    let p0 = body.center(face[0]);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m - 1);
    let mut lower = vec![0.0; (m - 1) * (m - 1)];
    let mut half_sq = vec![0.0; m - 1];
    for (j, &i) in face[1..].iter().enumerate() {
        let a: Vec<f64> = body.center(i).iter().zip(p0).map(|(x, y)| x - y).collect();
        half_sq[j] = dot(&a, &a) / 2.0;
        let mut w = a.clone();
        for (l, q) in basis.iter().enumerate() {
            let c = dot(&a, q);
            lower[j * (m - 1) + l] = c;
            for (wk, qk) in w.iter_mut().zip(q) {
                *wk -= c * qk;
            }
        }
        let len = norm(&w);
        if len <= 1e-12 * norm(&a).max(r) {
            return None;
        }
        lower[j * (m - 1) + j] = len;
        basis.push(w.into_iter().map(|x| x / len).collect());
    }
    // circumcenter p0 + sum gamma_l q_l, from <c - p0, a_j> = |a_j|^2 / 2
    let mut gamma = vec![0.0; m - 1];
    for j in 0..m - 1 {
        let s: f64 = (0..j).map(|l| lower[j * (m - 1) + l] * gamma[l]).sum();
        gamma[j] = (half_sq[j] - s) / lower[j * (m - 1) + j];
    }
    let mut c = p0.to_vec();
    for (g, q) in gamma.iter().zip(&basis) {
        for (ck, qk) in c.iter_mut().zip(q) {
            *ck += g * qk;
        }
    }
    let rho2 = r * r - gamma.iter().map(|g| g * g).sum::<f64>();
    if rho2 < 0.0 {
        return None;
    }
    let mut e = u.to_vec();
    for q in &basis {
        let s = dot(u, q);
        for (ek, qk) in e.iter_mut().zip(q) {
            *ek -= s * qk;
        }
    }
    let len = norm(&e);
    if len <= 1e-12 {
        return None;
    }
    let rho = rho2.sqrt();
    let x: Vec<f64> = c
        .iter()
        .zip(&e)
        .map(|(ck, ek)| ck + rho * ek / len)
        .collect();

    // u = sum mu_i (x - p_i) with mu >= 0
    let normals = DMatrix::from_fn(d, m, |k, j| x[k] - body.center(face[j])[k]);
    let target = DVector::from_column_slice(u);
    let mu = normals.clone().svd(true, true).solve(&target, 1e-14).ok()?;
    let residual = (&normals * &mu - &target).norm();
    if residual > KKT_TOL || mu.iter().any(|&v| v < -KKT_TOL / r) {
        return None;
    }
    Some(x)
}

fn within(body: &BallBodySpec, set: &[usize], x: &[f64]) -> bool {
    let limit = body.radius * (1.0 + FEAS_TOL);
    set.iter().all(|&i| dist(x, body.center(i)) <= limit)
}

/// `(h(u), maximizer)`, or `None` when the active-set iteration does not settle.
pub(super) fn exact_support(body: &BallBodySpec, u: &[f64]) -> Option<(f64, Vec<f64>)> {
    let d = body.dim();
    let r = body.radius;
    let first =
        (0..body.n()).min_by(|&a, &b| dot(body.center(a), u).total_cmp(&dot(body.center(b), u)))?;
    let mut active = vec![first];
    let mut x: Vec<f64> = body
        .center(first)
        .iter()
        .zip(u)
        .map(|(p, v)| p + r * v)
        .collect();
    for _ in 0..4 * body.n() + 64 {
        let (worst, viol) = body.worst_violation(&x);
        if viol <= FEAS_TOL * r {
            return Some((dot(&x, u), x));
        }
        let mut pool = active.clone();
        pool.push(worst);
        let rest = pool.len() - 1;
        // the new optimum keeps the added ball active; smaller faces first
        let mut subsets: Vec<u32> = (0..1u32 << rest).collect();
        subsets.sort_by_key(|s| s.count_ones());
        let found = subsets.into_iter().find_map(|mask| {
            let mut face: Vec<usize> = (0..rest)
                .filter(|b| mask >> b & 1 == 1)
                .map(|b| pool[b])
                .collect();
            face.push(worst);
            if face.len() > d {
                return None;
            }
            let y = face_optimum(body, &face, u)?;
            within(body, &pool, &y).then_some((face, y))
        });
        let (face, y) = found?;
        active = face;
        x = y;
    }
    None
}
