//! Weighted Fekete and Leja configurations on constrained planar domains,
//! the transfinite-diameter diagnostic δ_n(E), and numeric constrained-
//! energy rates for general exterior-ball holes.

use crate::mcmc::HoleRegion;
use crate::samplers::PointConfiguration;
use crate::{Error, Result};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use std::f64::consts::PI;

/// A closed admissible domain: the complement of an optional hole inside
/// the disk of radius `r_out`.
#[derive(Debug, Clone)]
pub struct FeketeDomain {
    pub hole: Option<HoleRegion>,
    pub r_out: f64,
}

impl FeketeDomain {
    pub fn new(hole: Option<HoleRegion>, r_out: f64) -> Result<Self> {
        if !(r_out > 0.0) {
            return Err(Error::domain("outer radius must be positive"));
        }
        if let Some(h) = &hole {
            h.certify_exterior_ball()?;
        }
        Ok(FeketeDomain { hole, r_out })
    }

    pub fn feasible(&self, z: Complex64) -> bool {
        z.norm() <= self.r_out && !self.hole.as_ref().map_or(false, |h| h.contains(z))
    }

    /// Project an infeasible point to the nearest feasible point.
    pub fn project(&self, z: Complex64) -> Complex64 {
        let mut p = z;
        if p.norm() > self.r_out {
            p = if p.norm() == 0.0 {
                Complex64::new(self.r_out, 0.0)
            } else {
                p / p.norm() * self.r_out
            };
        }
        if let Some(h) = &self.hole {
            if h.contains(p) {
                p = h.nearest_exterior(p);
            }
        }
        p
    }
}

/// The weighted configuration objective
/// Σ_{j<k} [ log|z_j − z_k| − |z_j|²/2 − |z_k|²/2 ]; −inf on coincidence.
pub fn fekete_objective(points: &[Complex64]) -> f64 {
    let n = points.len();
    let mut total = 0.0;
    for j in 0..n {
        for k in j + 1..n {
            let d = (points[j] - points[k]).norm();
            if d == 0.0 {
                return f64::NEG_INFINITY;
            }
            total += d.ln() - 0.5 * points[j].norm_sqr() - 0.5 * points[k].norm_sqr();
        }
    }
    total
}

/// Gradient of the objective with respect to point j:
/// Σ_{k≠j} (z_j − z_k)/|z_j − z_k|² − (n−1) z_j.
fn gradient(points: &[Complex64], grad: &mut [Complex64]) {
    let n = points.len();
    for g in grad.iter_mut() {
        *g = Complex64::new(0.0, 0.0);
    }
    for j in 0..n {
        for k in j + 1..n {
            let d = points[j] - points[k];
            let inv = d / d.norm_sqr();
            grad[j] += inv;
            grad[k] -= inv;
        }
    }
    let w = (n as f64) - 1.0;
    for (g, z) in grad.iter_mut().zip(points.iter()) {
        *g -= z * w;
    }
}

/// Result of a Fekete optimization.
#[derive(Debug, Clone)]
pub struct FeketeResult {
    pub config: PointConfiguration,
    /// δ_n = exp(2 · objective / (n(n−1))).
    pub delta_n: f64,
    pub objective: f64,
    /// Final sup-norm of the projected gradient.
    pub grad_norm: f64,
}

fn projected_ascent(
    domain: &FeketeDomain,
    mut pts: Vec<Complex64>,
    max_iters: usize,
) -> (Vec<Complex64>, f64, f64) {
    let n = pts.len();
    let mut grad = vec![Complex64::new(0.0, 0.0); n];
    let mut obj = fekete_objective(&pts);
    let mut step = 1.0 / (n as f64);
    let mut prev_pts: Option<(Vec<Complex64>, Vec<Complex64>)> = None;
    let mut gnorm = f64::INFINITY;
    for _ in 0..max_iters {
        gradient(&pts, &mut grad);
        // projected-gradient norm: zero out components pointing into the
        // constraints at active boundary points
        gnorm = 0.0;
        let btol = 1e-9 * domain.r_out;
        for (j, z) in pts.iter().enumerate() {
            let mut g = grad[j];
            if z.norm() >= domain.r_out - btol {
                // outward radial component is blocked at the outer wall
                let dir = z / z.norm();
                let radial = g.re * dir.re + g.im * dir.im;
                if radial > 0.0 {
                    g -= dir * radial;
                }
            }
            if let Some(h) = &domain.hole {
                if let Some(nrm) = h.boundary_normal(*z, btol) {
                    // inward component is blocked on the hole boundary
                    let inward = g.re * (-nrm.re) + g.im * (-nrm.im);
                    if inward > 0.0 {
                        g += nrm * inward;
                    }
                }
            }
            gnorm = gnorm.max(g.norm());
        }
        if gnorm <= 1e-7 {
            break;
        }
        // Barzilai–Borwein step from the previous iterate, safeguarded by
        // backtracking on the objective
        if let Some((pp, pg)) = &prev_pts {
            let mut num = 0.0;
            let mut den = 0.0;
            for j in 0..n {
                let ds = pts[j] - pp[j];
                let dg = grad[j] - pg[j];
                num += ds.re * ds.re + ds.im * ds.im;
                den += ds.re * dg.re + ds.im * dg.im;
            }
            if den.abs() > 1e-300 {
                step = (num / den.abs()).clamp(1e-9 / n as f64, 10.0 / n as f64);
            }
        }
        let mut t = step;
        let mut improved = false;
        for _ in 0..40 {
            let cand: Vec<Complex64> =
                pts.iter().zip(grad.iter()).map(|(z, g)| domain.project(z + g * t)).collect();
            let cobj = fekete_objective(&cand);
            if cobj > obj {
                prev_pts = Some((pts.clone(), grad.clone()));
                pts = cand;
                obj = cobj;
                improved = true;
                break;
            }
            t *= 0.5;
        }
        if !improved {
            break;
        }
    }
    (pts, obj, gnorm)
}

/// Multi-restart projected gradient ascent for the n-point weighted Fekete
/// configuration on the domain; half the restarts start boundary-heavy,
/// half uniform. Returns the best configuration found.
pub fn optimize_fekete(
    n: usize,
    domain: &FeketeDomain,
    restarts: usize,
    rng: &mut ChaCha12Rng,
) -> Result<FeketeResult> {
    if n < 2 {
        return Err(Error::domain("need at least two points"));
    }
    if restarts == 0 {
        return Err(Error::domain("need at least one restart"));
    }
    let seeds: Vec<(u64, bool)> = (0..restarts).map(|i| (rng.gen::<u64>(), i % 2 == 0)).collect();
    let results: Vec<(Vec<Complex64>, f64, f64)> = seeds
        .par_iter()
        .map(|&(seed, boundary_heavy)| {
            let mut local = crate::rng_stream(seed, 0);
            let pts = initial_points(n, domain, boundary_heavy, &mut local);
            projected_ascent(domain, pts, 2_000)
        })
        .collect();
    let best = results
        .into_iter()
        .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
        .expect("at least one restart");
    let (pts, obj, gnorm) = best;
    if !obj.is_finite() {
        return Err(Error::numerical("all restarts ended infeasible or coincident"));
    }
    let nf = n as f64;
    let delta_n = (2.0 * obj / (nf * (nf - 1.0))).exp();
    Ok(FeketeResult {
        config: PointConfiguration::new(pts, 1.0, "fekete")?,
        delta_n,
        objective: obj,
        grad_norm: gnorm,
    })
}

fn initial_points(
    n: usize,
    domain: &FeketeDomain,
    boundary_heavy: bool,
    rng: &mut ChaCha12Rng,
) -> Vec<Complex64> {
    let mut pts = Vec::with_capacity(n);
    if boundary_heavy {
        if let Some(h) = &domain.hole {
            let nb = (n / 2).max(1);
            for (i, b) in h.boundary_points(nb).into_iter().enumerate() {
                // tiny outward jitter keeps the starting objective finite
                let jig = Complex64::from_polar(1e-4, i as f64);
                pts.push(domain.project(b + jig));
            }
        }
    }
    while pts.len() < n {
        let r = domain.r_out * rng.gen::<f64>().sqrt();
        let t = rng.gen::<f64>() * 2.0 * PI;
        let z = Complex64::from_polar(r, t);
        if domain.feasible(z) {
            pts.push(z);
        }
    }
    pts.truncate(n);
    pts
}

/// Greedy weighted Leja sequence on a square candidate grid intersected
/// with the domain: each new point maximizes
/// Σ_{j<=k} log|z − z_j| − k |z|²/2; the first point maximizes the weight
/// alone, with ties broken by smaller |z| then smaller angle.
pub fn leja_points(n: usize, domain: &FeketeDomain, grid_resolution: usize) -> Result<PointConfiguration> {
    if n < 1 {
        return Err(Error::domain("need at least one point"));
    }
    if grid_resolution < 8 {
        return Err(Error::domain("grid resolution too small"));
    }
    let m = grid_resolution;
    let h = 2.0 * domain.r_out / (m as f64 - 1.0);
    let mut cand: Vec<Complex64> = Vec::new();
    let mut on_bbox: Vec<bool> = Vec::new();
    for iy in 0..m {
        for ix in 0..m {
            let z = Complex64::new(-domain.r_out + ix as f64 * h, -domain.r_out + iy as f64 * h);
            if domain.feasible(z) {
                cand.push(z);
                on_bbox.push(ix == 0 || iy == 0 || ix == m - 1 || iy == m - 1);
            }
        }
    }
    if cand.is_empty() {
        return Err(Error::domain("candidate grid does not intersect the domain"));
    }
    // running objective per candidate: Σ_j log|z - z_j| - k |z|²/2 is
    // updated incrementally; the weight term is added at selection time
    let mut logsum = vec![0.0f64; cand.len()];
    let mut picked: Vec<Complex64> = Vec::new();
    let mut used = vec![false; cand.len()];
    for k in 0..n {
        let kk = k as f64;
        let mut best_i = usize::MAX;
        let mut best_key = (f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
        for (i, &z) in cand.iter().enumerate() {
            if used[i] {
                continue;
            }
            let val = logsum[i] - kk * 0.5 * z.norm_sqr();
            // ties: larger objective, then smaller |z|, then smaller angle
            let key = (val, -z.norm(), -principal_angle(z));
            if key > best_key {
                best_key = key;
                best_i = i;
            }
        }
        if best_i == usize::MAX {
            return Err(Error::domain("grid exhausted before n points"));
        }
        if on_bbox[best_i] {
            return Err(Error::numerical(
                "grid too coarse: optimal point fell on the candidate-grid boundary",
            ));
        }
        let znew = cand[best_i];
        used[best_i] = true;
        picked.push(znew);
        for (i, &z) in cand.iter().enumerate() {
            if !used[i] {
                let d = (z - znew).norm();
                logsum[i] += if d == 0.0 { f64::NEG_INFINITY } else { d.ln() };
            }
        }
    }
    PointConfiguration::new(picked, 1.0, "leja")
}

fn principal_angle(z: Complex64) -> f64 {
    let a = z.arg();
    if a < 0.0 {
        a + 2.0 * PI
    } else {
        a
    }
}

/// Estimate the hole rate −lim log δ_n for a hole inside the unit disk by
/// Richardson extrapolation of log δ_n over `n_sequence`, calibrated by the
/// no-hole case (whose constrained infimum is zero). The extrapolation
/// model is log δ_n = L + c/n, fit by least squares.
pub fn hole_rate_general(
    hole: &HoleRegion,
    n_sequence: &[usize],
    restarts: usize,
    rng: &mut ChaCha12Rng,
) -> Result<f64> {
    hole.certify_exterior_ball()?;
    let (_, br) = {
        let (c, r) = hole_bounding(hole);
        (c, r)
    };
    if br > 1.0 + 1e-9 {
        return Err(Error::domain("hole must sit inside the closed unit disk"));
    }
    if n_sequence.len() < 2 {
        return Err(Error::domain("need at least two n values for extrapolation"));
    }
    let with_hole = delta_sequence(Some(hole.clone()), n_sequence, restarts, rng)?;
    let no_hole = delta_sequence(None, n_sequence, restarts, rng)?;
    // monotonicity guard on the raw sequences
    for seq in [&with_hole, &no_hole] {
        for w in seq.windows(2) {
            if w[1] > w[0] + 1e-9 {
                return Err(Error::numerical(
                    "delta_n sequence failed to decrease: optimizer quality insufficient",
                ));
            }
        }
    }
    let diffs: Vec<f64> =
        no_hole.iter().zip(with_hole.iter()).map(|(a, b)| a - b).collect();
    Ok(extrapolate_inverse_n(n_sequence, &diffs))
}

fn hole_bounding(h: &HoleRegion) -> (Complex64, f64) {
    match h {
        HoleRegion::Disk { center, radius } => (*center, center.norm() + radius),
        HoleRegion::Annulus { r_hi, .. } => (Complex64::new(0.0, 0.0), *r_hi),
        HoleRegion::ConvexPolygon { vertices } => {
            let r = vertices.iter().map(|v| v.norm()).fold(0.0, f64::max);
            (Complex64::new(0.0, 0.0), r)
        }
        HoleRegion::UnionOf(parts) => {
            let r = parts.iter().map(|p| hole_bounding(p).1).fold(0.0, f64::max);
            (Complex64::new(0.0, 0.0), r)
        }
    }
}

/// log δ_n for each n, for the optional hole inside an r_out = 1.5 window.
fn delta_sequence(
    hole: Option<HoleRegion>,
    n_sequence: &[usize],
    restarts: usize,
    rng: &mut ChaCha12Rng,
) -> Result<Vec<f64>> {
    let domain = FeketeDomain::new(hole, 1.5)?;
    n_sequence
        .iter()
        .map(|&n| optimize_fekete(n, &domain, restarts, rng).map(|r| r.delta_n.ln()))
        .collect()
}

/// Least-squares fit of v_n = L + c/n; returns L.
fn extrapolate_inverse_n(ns: &[usize], vals: &[f64]) -> f64 {
    let k = ns.len() as f64;
    let xs: Vec<f64> = ns.iter().map(|&n| 1.0 / n as f64).collect();
    let sx: f64 = xs.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sy: f64 = vals.iter().sum();
    let sxy: f64 = xs.iter().zip(vals.iter()).map(|(x, y)| x * y).sum();
    let det = k * sxx - sx * sx;
    if det.abs() < 1e-30 {
        return sy / k;
    }
    // intercept of the regression y = L + c x
    (sxx * sy - sx * sxy) / det
}

/// log δ-limit of the unconstrained problem; used by the calibration check.
pub const UNCONSTRAINED_LOG_DELTA_LIMIT: f64 = -0.75;

/// Residual of the no-hole calibration: extrapolated log δ_n minus the
/// known unconstrained limit −3/4.
pub fn calibration_residual(
    n_sequence: &[usize],
    restarts: usize,
    rng: &mut ChaCha12Rng,
) -> Result<f64> {
    let vals = delta_sequence(None, n_sequence, restarts, rng)?;
    Ok(extrapolate_inverse_n(n_sequence, &vals) - UNCONSTRAINED_LOG_DELTA_LIMIT)
}
