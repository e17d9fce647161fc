//! Constrained Metropolis–Hastings sampling of conditional planar ensembles:
//! the β ensemble with hole or count constraints, and the polynomial-zero
//! ensemble through its joint density, with incremental energy updates and
//! the truncated-proposal asymmetry correction.

use crate::quad::{adaptive_simpson, integrate_with_kinks};
use crate::samplers::PointConfiguration;
use crate::special::{bessel_i0e, ln_factorial, log_sum_exp};
use crate::stats::{radial_profile, RadialProfile};
use crate::{Error, Result};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use std::f64::consts::PI;
use std::sync::Arc;

// ---------------------------------------------------------------------------
// regions and constraints

/// A hole region (particle-free zone). Only exterior-ball domains are
/// representable: disks, origin-centered annuli, convex polygons, and
/// disjoint unions of those.
#[derive(Debug, Clone)]
pub enum HoleRegion {
    Disk { center: Complex64, radius: f64 },
    Annulus { r_lo: f64, r_hi: f64 },
    ConvexPolygon { vertices: Vec<Complex64> },
    UnionOf(Vec<HoleRegion>),
}

fn cross(o: Complex64, a: Complex64, b: Complex64) -> f64 {
    (a.re - o.re) * (b.im - o.im) - (a.im - o.im) * (b.re - o.re)
}

impl HoleRegion {
    /// Validate positive measure, convexity, and (for unions) disjointness;
    /// all such regions satisfy the exterior ball condition.
    pub fn certify_exterior_ball(&self) -> Result<()> {
        match self {
            HoleRegion::Disk { radius, .. } => {
                if !(radius > &0.0) {
                    return Err(Error::domain("disk radius must be positive"));
                }
            }
            HoleRegion::Annulus { r_lo, r_hi } => {
                if !(*r_lo > 0.0) || !(r_hi > r_lo) {
                    return Err(Error::domain("annulus requires 0 < r_lo < r_hi"));
                }
            }
            HoleRegion::ConvexPolygon { vertices } => {
                if vertices.len() < 3 {
                    return Err(Error::domain("polygon needs at least 3 vertices"));
                }
                let n = vertices.len();
                let mut sign = 0.0f64;
                for i in 0..n {
                    let c = cross(vertices[i], vertices[(i + 1) % n], vertices[(i + 2) % n]);
                    if c != 0.0 {
                        if sign == 0.0 {
                            sign = c.signum();
                        } else if c.signum() != sign {
                            return Err(Error::domain(
                                "polygon is not convex (exterior ball condition fails)",
                            ));
                        }
                    }
                }
                if self.area() <= 0.0 {
                    return Err(Error::domain("polygon must have positive area"));
                }
            }
            HoleRegion::UnionOf(parts) => {
                if parts.is_empty() {
                    return Err(Error::domain("empty union"));
                }
                for p in parts {
                    p.certify_exterior_ball()?;
                    if matches!(p, HoleRegion::UnionOf(_)) {
                        return Err(Error::domain("nested unions are not supported"));
                    }
                }
                // pairwise disjointness via bounding data (conservative)
                for i in 0..parts.len() {
                    for j in i + 1..parts.len() {
                        if parts[i].overlaps(&parts[j]) {
                            return Err(Error::domain(
                                "union members must be disjoint to keep the exterior ball condition",
                            ));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn overlaps(&self, other: &HoleRegion) -> bool {
        // conservative circumscribed-disk test
        let (c1, r1) = self.bounding_disk();
        let (c2, r2) = other.bounding_disk();
        (c1 - c2).norm() < r1 + r2
    }

    fn bounding_disk(&self) -> (Complex64, f64) {
        match self {
            HoleRegion::Disk { center, radius } => (*center, *radius),
            HoleRegion::Annulus { r_hi, .. } => (Complex64::new(0.0, 0.0), *r_hi),
            HoleRegion::ConvexPolygon { vertices } => {
                let c = vertices.iter().sum::<Complex64>() / vertices.len() as f64;
                let r = vertices.iter().map(|v| (v - c).norm()).fold(0.0, f64::max);
                (c, r)
            }
            HoleRegion::UnionOf(parts) => {
                let disks: Vec<_> = parts.iter().map(|p| p.bounding_disk()).collect();
                let c = disks.iter().map(|d| d.0).sum::<Complex64>() / disks.len() as f64;
                let r = disks.iter().map(|d| (d.0 - c).norm() + d.1).fold(0.0, f64::max);
                (c, r)
            }
        }
    }

    /// Strict interior membership (boundary points are allowed positions).
    pub fn contains(&self, z: Complex64) -> bool {
        match self {
            HoleRegion::Disk { center, radius } => (z - center).norm() < *radius,
            HoleRegion::Annulus { r_lo, r_hi } => {
                let r = z.norm();
                r > *r_lo && r < *r_hi
            }
            HoleRegion::ConvexPolygon { vertices } => {
                let n = vertices.len();
                let mut sign = 0.0f64;
                for i in 0..n {
                    let c = cross(vertices[i], vertices[(i + 1) % n], z);
                    if c == 0.0 {
                        return false; // on an edge line: treat as boundary
                    }
                    if sign == 0.0 {
                        sign = c.signum();
                    } else if c.signum() != sign {
                        return false;
                    }
                }
                true
            }
            HoleRegion::UnionOf(parts) => parts.iter().any(|p| p.contains(z)),
        }
    }

    pub fn area(&self) -> f64 {
        match self {
            HoleRegion::Disk { radius, .. } => PI * radius * radius,
            HoleRegion::Annulus { r_lo, r_hi } => PI * (r_hi * r_hi - r_lo * r_lo),
            HoleRegion::ConvexPolygon { vertices } => {
                let n = vertices.len();
                let mut a = 0.0;
                for i in 0..n {
                    let p = vertices[i];
                    let q = vertices[(i + 1) % n];
                    a += p.re * q.im - q.re * p.im;
                }
                a.abs() / 2.0
            }
            HoleRegion::UnionOf(parts) => parts.iter().map(|p| p.area()).sum(),
        }
    }

    /// Outward unit normal at the boundary point nearest to z, when z lies
    /// within `tol` of the boundary (inside or outside); None otherwise.
    pub fn boundary_normal(&self, z: Complex64, tol: f64) -> Option<Complex64> {
        match self {
            HoleRegion::Disk { center, radius } => {
                let d = z - center;
                if (d.norm() - radius).abs() <= tol {
                    Some(if d.norm() == 0.0 { Complex64::new(1.0, 0.0) } else { d / d.norm() })
                } else {
                    None
                }
            }
            HoleRegion::Annulus { r_lo, r_hi } => {
                let r = z.norm();
                let dir = if r == 0.0 { Complex64::new(1.0, 0.0) } else { z / r };
                if (r - r_lo).abs() <= tol {
                    Some(-dir)
                } else if (r - r_hi).abs() <= tol {
                    Some(dir)
                } else {
                    None
                }
            }
            HoleRegion::ConvexPolygon { vertices } => {
                let n = vertices.len();
                let centroid = vertices.iter().sum::<Complex64>() / n as f64;
                let mut best: Option<(f64, Complex64)> = None;
                for i in 0..n {
                    let a = vertices[i];
                    let b = vertices[(i + 1) % n];
                    let ab = b - a;
                    let t = (((z - a).re * ab.re + (z - a).im * ab.im) / ab.norm_sqr())
                        .clamp(0.0, 1.0);
                    let q = a + ab * t;
                    let d = (z - q).norm();
                    if best.map_or(true, |(bd, _)| d < bd) {
                        // outward = perpendicular pointing away from the centroid
                        let mut nrm = Complex64::new(-ab.im, ab.re) / ab.norm();
                        if (q - centroid).re * nrm.re + (q - centroid).im * nrm.im < 0.0 {
                            nrm = -nrm;
                        }
                        best = Some((d, nrm));
                    }
                }
                best.and_then(|(d, nrm)| if d <= tol { Some(nrm) } else { None })
            }
            HoleRegion::UnionOf(parts) => {
                parts.iter().find_map(|p| p.boundary_normal(z, tol))
            }
        }
    }

    /// Nearest point strictly outside the (open) region, with a tiny
    /// outward margin so strict-interior tests cannot round it back in.
    pub fn nearest_exterior(&self, z: Complex64) -> Complex64 {
        match self {
            HoleRegion::Disk { center, radius } => {
                let d = z - center;
                let dir = if d.norm() == 0.0 { Complex64::new(1.0, 0.0) } else { d / d.norm() };
                center + dir * (radius * (1.0 + 1e-12))
            }
            HoleRegion::Annulus { r_lo, r_hi } => {
                let r = z.norm();
                let dir = if r == 0.0 { Complex64::new(1.0, 0.0) } else { z / r };
                if (r - r_lo).abs() <= (r_hi - r).abs() {
                    dir * (r_lo * (1.0 - 1e-12))
                } else {
                    dir * (r_hi * (1.0 + 1e-12))
                }
            }
            HoleRegion::ConvexPolygon { vertices } => {
                let n = vertices.len();
                let mut best = vertices[0];
                let mut best_d = f64::INFINITY;
                for i in 0..n {
                    let a = vertices[i];
                    let b = vertices[(i + 1) % n];
                    let ab = b - a;
                    let t = (((z - a).re * ab.re + (z - a).im * ab.im) / ab.norm_sqr())
                        .clamp(0.0, 1.0);
                    let q = a + ab * t;
                    let d = (z - q).norm();
                    if d < best_d {
                        best_d = d;
                        best = q;
                    }
                }
                let centroid = vertices.iter().sum::<Complex64>() / n as f64;
                let out = best - centroid;
                let dir = if out.norm() == 0.0 { Complex64::new(1.0, 0.0) } else { out / out.norm() };
                let scale = vertices.iter().map(|v| (v - centroid).norm()).fold(0.0, f64::max);
                best + dir * (1e-12 * scale.max(1.0))
            }
            HoleRegion::UnionOf(parts) => {
                let mut p = z;
                for _ in 0..parts.len() + 1 {
                    let mut moved = false;
                    for part in parts {
                        if part.contains(p) {
                            p = part.nearest_exterior(p);
                            moved = true;
                        }
                    }
                    if !moved {
                        break;
                    }
                }
                p
            }
        }
    }

    /// k points equi-spaced along the outer boundary.
    pub fn boundary_points(&self, k: usize) -> Vec<Complex64> {
        match self {
            HoleRegion::Disk { center, radius } => (0..k)
                .map(|i| center + Complex64::from_polar(*radius, 2.0 * PI * i as f64 / k as f64))
                .collect(),
            HoleRegion::Annulus { r_hi, .. } => (0..k)
                .map(|i| Complex64::from_polar(*r_hi, 2.0 * PI * i as f64 / k as f64))
                .collect(),
            HoleRegion::ConvexPolygon { vertices } => {
                let n = vertices.len();
                let lens: Vec<f64> =
                    (0..n).map(|i| (vertices[(i + 1) % n] - vertices[i]).norm()).collect();
                let total: f64 = lens.iter().sum();
                (0..k)
                    .map(|i| {
                        let mut t = total * i as f64 / k as f64;
                        for j in 0..n {
                            if t <= lens[j] {
                                let dir = (vertices[(j + 1) % n] - vertices[j]) / lens[j];
                                return vertices[j] + dir * t;
                            }
                            t -= lens[j];
                        }
                        vertices[0]
                    })
                    .collect()
            }
            HoleRegion::UnionOf(parts) => {
                let mut out = Vec::new();
                let areas: f64 = parts.iter().map(|p| p.area()).sum();
                for p in parts {
                    let share =
                        ((k as f64 * p.area() / areas).round() as usize).max(1).min(k);
                    out.extend(p.boundary_points(share));
                }
                out.truncate(k);
                out
            }
        }
    }
}

/// Conditioning event for a chain.
#[derive(Debug, Clone)]
pub enum ConstraintSpec {
    None,
    Hole(HoleRegion),
    MaxCount { region: HoleRegion, max: usize },
    MinCount { region: HoleRegion, min: usize },
}

impl ConstraintSpec {
    fn validate(&self, n: usize) -> Result<()> {
        match self {
            ConstraintSpec::None => Ok(()),
            ConstraintSpec::Hole(r) => r.certify_exterior_ball(),
            ConstraintSpec::MaxCount { region, .. } => region.certify_exterior_ball(),
            ConstraintSpec::MinCount { region, min } => {
                region.certify_exterior_ball()?;
                if *min > n {
                    return Err(Error::domain(format!(
                        "cannot require {min} particles in a region with only {n} total"
                    )));
                }
                Ok(())
            }
        }
    }
}

// ---------------------------------------------------------------------------
// densities

/// Unnormalized log-density of the planar β ensemble:
/// β Σ_{j<k} log|z_j − z_k| − (β/2) Σ |z_j|². Coincident points give -inf.
pub fn beta_ginibre_log_density(points: &[Complex64], beta: f64) -> f64 {
    let n = points.len();
    let mut pair = 0.0;
    for j in 0..n {
        for k in j + 1..n {
            let d = (points[j] - points[k]).norm();
            if d == 0.0 {
                return f64::NEG_INFINITY;
            }
            pair += d.ln();
        }
    }
    let sq: f64 = points.iter().map(|z| z.norm_sqr()).sum();
    beta * pair - 0.5 * beta * sq
}

/// Scaled monic coefficients of Q(w) = Π (w − z_j): coeffs[j] is the w^j
/// coefficient times exp(-log_scale).
#[derive(Clone)]
struct WeylCoeffCache {
    coeffs: Vec<Complex64>,
    log_scale: f64,
    /// cached log Σ_j |a_j|² j! / R^{2j}
    log_norm: f64,
    updates_since_rebuild: usize,
}

fn build_coeffs(points: &[Complex64]) -> (Vec<Complex64>, f64) {
    let n = points.len();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
    coeffs[0] = Complex64::new(1.0, 0.0);
    let mut log_scale = 0.0;
    let mut deg = 0usize;
    for &z in points {
        coeffs[deg + 1] = coeffs[deg];
        for j in (1..=deg).rev() {
            let t = coeffs[j - 1] - z * coeffs[j];
            coeffs[j] = t;
        }
        coeffs[0] = -z * coeffs[0];
        deg += 1;
        let m = coeffs[..=deg].iter().map(|c| c.norm()).fold(0.0, f64::max);
        if m > 1e120 || (m > 0.0 && m < 1e-120) {
            let l = m.ln();
            log_scale += l;
            let inv = (-l).exp();
            for c in coeffs[..=deg].iter_mut() {
                *c *= inv;
            }
        }
    }
    (coeffs, log_scale)
}

fn log_norm_from_coeffs(coeffs: &[Complex64], log_scale: f64, r: f64) -> f64 {
    let terms: Vec<f64> = coeffs
        .iter()
        .enumerate()
        .map(|(j, c)| {
            if c.norm() == 0.0 {
                f64::NEG_INFINITY
            } else {
                2.0 * (c.norm().ln() + log_scale) + ln_factorial(j) - 2.0 * j as f64 * r.ln()
            }
        })
        .collect();
    log_sum_exp(&terms)
}

/// Unnormalized log-density of the zero ensemble of the degree-N Gaussian
/// Taylor polynomial at truncation scale R:
/// 2 Σ_{j<k} log|z_j − z_k| − (N+1) log Σ_j |a_j|² j! / R^{2j},
/// where a_j are the coefficients of the monic polynomial with the given
/// roots (the coefficient identity follows from monomial orthogonality
/// under the Gaussian weight e^{−R²|w|²}).
pub fn weyl_log_density(points: &[Complex64], r: f64) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::domain("need at least one point"));
    }
    if !(r > 0.0) {
        return Err(Error::domain("R must be positive"));
    }
    let n = points.len();
    let mut pair = 0.0;
    for j in 0..n {
        for k in j + 1..n {
            let d = (points[j] - points[k]).norm();
            if d == 0.0 {
                return Ok(f64::NEG_INFINITY);
            }
            pair += d.ln();
        }
    }
    let (coeffs, log_scale) = build_coeffs(points);
    let log_norm = log_norm_from_coeffs(&coeffs, log_scale, r);
    Ok(2.0 * pair - (n as f64 + 1.0) * log_norm)
}

// ---------------------------------------------------------------------------
// chain state

/// Which ensemble the chain targets.
#[derive(Debug, Clone, Copy)]
pub enum Ensemble {
    /// N planar particles with density Π|Δ|^β e^{-(β/2)Σ|z|²}; equilibrium
    /// fills the disk of radius sqrt(N).
    BetaGinibre { beta: f64, n: usize },
    /// Zeros of the degree-N truncation at scale R; equilibrium fills the
    /// disk of radius sqrt(N)/R.
    WeylZeros { r: f64, n: usize },
}

impl Ensemble {
    pub fn n_points(&self) -> usize {
        match *self {
            Ensemble::BetaGinibre { n, .. } => n,
            Ensemble::WeylZeros { n, .. } => n,
        }
    }
    fn equilibrium_radius(&self) -> f64 {
        match *self {
            Ensemble::BetaGinibre { n, .. } => (n as f64).sqrt(),
            Ensemble::WeylZeros { r, n } => (n as f64).sqrt() / r,
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct StepCounters {
    pub proposed: u64,
    pub accepted: u64,
    pub constraint_rejected: u64,
    pub resample_failures: u64,
}

/// Mutable Markov-chain state with cached per-particle energy terms.
pub struct ChainState {
    pub ensemble: Ensemble,
    pub constraint: ConstraintSpec,
    pub points: Vec<Complex64>,
    /// pair_log[j] = Σ_{k≠j} log|z_j − z_k|
    pair_log: Vec<f64>,
    weyl: Option<WeylCoeffCache>,
    pub sigma: f64,
    pub counters: StepCounters,
    rng: ChaCha12Rng,
    steps: u64,
    /// worst drift observed by the periodic cache audit
    pub audit_max_drift: f64,
    scratch_q: Vec<Complex64>,
    scratch_p: Vec<Complex64>,
}

/// Build an initial state that satisfies the constraint by construction:
/// for a hole, points displaced by the hole sit equi-spaced on its boundary
/// (one per π of displaced area) and the remainder fill the equilibrium
/// disk minus the hole; count constraints place points explicitly.
pub fn init_chain(
    ensemble: Ensemble,
    constraint: ConstraintSpec,
    mut rng: ChaCha12Rng,
) -> Result<ChainState> {
    let n = ensemble.n_points();
    if n == 0 {
        return Err(Error::domain("need at least one particle"));
    }
    constraint.validate(n)?;
    let r_eq = ensemble.equilibrium_radius();
    let mut points: Vec<Complex64> = Vec::with_capacity(n);
    let uniform_disk = |rng: &mut ChaCha12Rng, reject: Option<&HoleRegion>| -> Result<Complex64> {
        for _ in 0..100_000 {
            let r = r_eq * rng.gen::<f64>().sqrt();
            let t = rng.gen::<f64>() * 2.0 * PI;
            let z = Complex64::from_polar(r, t);
            match reject {
                Some(h) if h.contains(z) => continue,
                _ => return Ok(z),
            }
        }
        Err(Error::numerical("could not place a point outside the hole"))
    };
    match &constraint {
        ConstraintSpec::None => {
            for _ in 0..n {
                points.push(uniform_disk(&mut rng, None)?);
            }
        }
        ConstraintSpec::Hole(hole) => {
            let displaced = ((hole.area() / PI).ceil() as usize).min(n);
            // boundary placements nudged strictly outside the open region
            points.extend(
                hole.boundary_points(displaced)
                    .into_iter()
                    .map(|z| if hole.contains(z) { hole.nearest_exterior(z) } else { z }),
            );
            for _ in displaced..n {
                points.push(uniform_disk(&mut rng, Some(hole))?);
            }
        }
        ConstraintSpec::MaxCount { region, .. } => {
            // zero points inside the region trivially satisfies the cap
            for _ in 0..n {
                points.push(uniform_disk(&mut rng, Some(region))?);
            }
        }
        ConstraintSpec::MinCount { region, min } => {
            let (c, br) = region.bounding_disk();
            let mut placed = 0usize;
            let mut tries = 0u64;
            while placed < *min {
                let r = br * rng.gen::<f64>().sqrt();
                let t = rng.gen::<f64>() * 2.0 * PI;
                let z = c + Complex64::from_polar(r, t);
                if region.contains(z) {
                    points.push(z);
                    placed += 1;
                }
                tries += 1;
                if tries > 1_000_000 {
                    return Err(Error::numerical("could not place points inside the region"));
                }
            }
            for _ in *min..n {
                points.push(uniform_disk(&mut rng, None)?);
            }
        }
    }
    let pair_log = recompute_pair_log(&points);
    let weyl = match ensemble {
        Ensemble::WeylZeros { r, .. } => {
            let (coeffs, log_scale) = build_coeffs(&points);
            let log_norm = log_norm_from_coeffs(&coeffs, log_scale, r);
            Some(WeylCoeffCache { coeffs, log_scale, log_norm, updates_since_rebuild: 0 })
        }
        Ensemble::BetaGinibre { .. } => None,
    };
    Ok(ChainState {
        ensemble,
        constraint,
        points,
        pair_log,
        weyl,
        sigma: 0.5,
        counters: StepCounters::default(),
        rng,
        steps: 0,
        audit_max_drift: 0.0,
        scratch_q: vec![Complex64::new(0.0, 0.0); n + 1],
        scratch_p: vec![Complex64::new(0.0, 0.0); n + 1],
    })
}

fn recompute_pair_log(points: &[Complex64]) -> Vec<f64> {
    let n = points.len();
    let mut out = vec![0.0f64; n];
    for j in 0..n {
        let mut s = 0.0;
        for k in 0..n {
            if k != j {
                s += (points[j] - points[k]).norm().ln();
            }
        }
        out[j] = s;
    }
    out
}

/// Gaussian mass of the constraint-allowed region around a proposal center:
/// the probability that c + σ(g_x + i g_y) avoids the hole. Disks and
/// annuli by radial quadrature of the Rice density (absolute tolerance
/// 1e-10), polygons by antithetic Monte Carlo with 10^4 samples.
fn log_z_out(hole: &HoleRegion, c: Complex64, sigma: f64, rng: &mut ChaCha12Rng) -> f64 {
    let mass = hole_mass(hole, c, sigma, rng);
    (1.0 - mass).max(1e-300).ln()
}

fn rice_disk_mass(d: f64, rho: f64, sigma: f64) -> f64 {
    // P[|c + σ g - c0| <= rho] with d = |c - c0|
    if d > rho + 10.0 * sigma {
        return 0.0;
    }
    let f = |r: f64| {
        if r == 0.0 {
            return 0.0;
        }
        let x = r * d / (sigma * sigma);
        (r / (sigma * sigma)) * (-(r - d) * (r - d) / (2.0 * sigma * sigma)).exp() * bessel_i0e(x)
    };
    adaptive_simpson(&f, 0.0, rho, 1e-10, 52).unwrap_or(0.0).clamp(0.0, 1.0)
}

fn hole_mass(hole: &HoleRegion, c: Complex64, sigma: f64, rng: &mut ChaCha12Rng) -> f64 {
    match hole {
        HoleRegion::Disk { center, radius } => rice_disk_mass((c - center).norm(), *radius, sigma),
        HoleRegion::Annulus { r_lo, r_hi } => {
            let d = c.norm();
            (rice_disk_mass(d, *r_hi, sigma) - rice_disk_mass(d, *r_lo, sigma)).clamp(0.0, 1.0)
        }
        HoleRegion::ConvexPolygon { .. } => {
            let pairs = 5_000;
            let mut inside = 0usize;
            for _ in 0..pairs {
                let gx: f64 = rng.sample(StandardNormal);
                let gy: f64 = rng.sample(StandardNormal);
                let g = Complex64::new(gx, gy) * sigma;
                if hole.contains(c + g) {
                    inside += 1;
                }
                if hole.contains(c - g) {
                    inside += 1;
                }
            }
            inside as f64 / (2 * pairs) as f64
        }
        HoleRegion::UnionOf(parts) => {
            parts.iter().map(|p| hole_mass(p, c, sigma, rng)).sum::<f64>().clamp(0.0, 1.0)
        }
    }
}

impl ChainState {
    /// Total unnormalized log-density of the current configuration.
    pub fn log_density(&self) -> f64 {
        match self.ensemble {
            Ensemble::BetaGinibre { beta, .. } => {
                let pair: f64 = self.pair_log.iter().sum::<f64>() / 2.0;
                let sq: f64 = self.points.iter().map(|z| z.norm_sqr()).sum();
                beta * pair - 0.5 * beta * sq
            }
            Ensemble::WeylZeros { n, .. } => {
                let pair: f64 = self.pair_log.iter().sum::<f64>() / 2.0;
                let cache = self.weyl.as_ref().expect("weyl cache");
                2.0 * pair - (n as f64 + 1.0) * cache.log_norm
            }
        }
    }

    fn propose_point(&mut self, z: Complex64) -> Option<Complex64> {
        let gx: f64 = self.rng.sample(StandardNormal);
        let gy: f64 = self.rng.sample(StandardNormal);
        Some(z + Complex64::new(gx, gy) * self.sigma)
    }

    /// One Metropolis–Hastings step: move a uniformly chosen particle by a
    /// Gaussian proposal (resampled to avoid the hole when one is present,
    /// with the truncation-mass correction ratio), accept by the density
    /// ratio. Count constraints are enforced by plain rejection, which is
    /// exact because that proposal is symmetric. Returns whether the move
    /// was accepted.
    pub fn mh_step(&mut self) -> bool {
        self.steps += 1;
        self.counters.proposed += 1;
        if self.steps % 10_000 == 0 {
            self.audit();
        }
        let n = self.points.len();
        let j = self.rng.gen_range(0..n);
        let old = self.points[j];
        // propose
        let (candidate, log_ratio_correction) = match &self.constraint {
            ConstraintSpec::Hole(hole) => {
                let hole = hole.clone();
                let mut cand = None;
                for _ in 0..10_000 {
                    let c = self.propose_point(old).unwrap();
                    if !hole.contains(c) {
                        cand = Some(c);
                        break;
                    }
                }
                let Some(c) = cand else {
                    self.counters.resample_failures += 1;
                    return false;
                };
                // fast path: both endpoints far from the hole
                let (hc, hr) = hole.bounding_disk();
                let far = 8.0 * self.sigma;
                let corr = if (old - hc).norm() > hr + far && (c - hc).norm() > hr + far {
                    0.0
                } else {
                    let sigma = self.sigma;
                    log_z_out(&hole, c, sigma, &mut self.rng)
                        - log_z_out(&hole, old, sigma, &mut self.rng)
                };
                (c, corr)
            }
            _ => {
                let c = self.propose_point(old).unwrap();
                (c, 0.0)
            }
        };
        // count constraints: hard rejection
        match &self.constraint {
            ConstraintSpec::MaxCount { region, max } => {
                let mut count = self
                    .points
                    .iter()
                    .enumerate()
                    .filter(|(i, z)| *i != j && region.contains(**z))
                    .count();
                if region.contains(candidate) {
                    count += 1;
                }
                if count > *max {
                    self.counters.constraint_rejected += 1;
                    return false;
                }
            }
            ConstraintSpec::MinCount { region, min } => {
                let mut count = self
                    .points
                    .iter()
                    .enumerate()
                    .filter(|(i, z)| *i != j && region.contains(**z))
                    .count();
                if region.contains(candidate) {
                    count += 1;
                }
                if count < *min {
                    self.counters.constraint_rejected += 1;
                    return false;
                }
            }
            _ => {}
        }
        // incremental density change
        let mut new_row = 0.0f64;
        for (k, z) in self.points.iter().enumerate() {
            if k != j {
                let d = (candidate - z).norm();
                if d == 0.0 {
                    return false;
                }
                new_row += d.ln();
            }
        }
        let mut weyl_log_norm_new = None;
        let delta = match self.ensemble {
            Ensemble::BetaGinibre { beta, .. } => {
                beta * (new_row - self.pair_log[j])
                    - 0.5 * beta * (candidate.norm_sqr() - old.norm_sqr())
            }
            Ensemble::WeylZeros { r, n } => {
                let cache = self.weyl.as_ref().expect("weyl cache");
                let deg = n;
                // synthetic division of Q by (w - old): quotient s of degree
                // deg-1. The recurrence direction is chosen by |old|: the
                // forward (leading-first) sweep amplifies errors by powers
                // of the root, so roots outside the unit circle use the
                // backward sweep instead.
                let q = &mut self.scratch_q;
                if old.norm() < 1.0 {
                    let mut carry = cache.coeffs[deg];
                    q[deg - 1] = carry;
                    for idx in (1..deg).rev() {
                        carry = cache.coeffs[idx] + old * carry;
                        q[idx - 1] = carry;
                    }
                } else {
                    let mut carry = -cache.coeffs[0] / old;
                    q[0] = carry;
                    for idx in 1..deg {
                        carry = (carry - cache.coeffs[idx]) / old;
                        q[idx] = carry;
                    }
                }
                // remultiplication by (w - candidate)
                let p = &mut self.scratch_p;
                p[deg] = q[deg - 1];
                for idx in (1..deg).rev() {
                    p[idx] = q[idx - 1] - candidate * q[idx];
                }
                p[0] = -candidate * q[0];
                let log_norm_new = log_norm_from_coeffs(&p[..=deg], cache.log_scale, r);
                weyl_log_norm_new = Some(log_norm_new);
                2.0 * (new_row - self.pair_log[j])
                    - (n as f64 + 1.0) * (log_norm_new - cache.log_norm)
            }
        };
        let log_alpha = delta + log_ratio_correction;
        let accept = log_alpha >= 0.0 || self.rng.gen::<f64>().ln() < log_alpha;
        if !accept {
            return false;
        }
        // adopt
        self.counters.accepted += 1;
        for k in 0..n {
            if k != j {
                let z = self.points[k];
                self.pair_log[k] += (candidate - z).norm().ln() - (old - z).norm().ln();
            }
        }
        self.pair_log[j] = new_row;
        self.points[j] = candidate;
        if let Ensemble::WeylZeros { r, .. } = self.ensemble {
            let cache = self.weyl.as_mut().expect("weyl cache");
            std::mem::swap(&mut cache.coeffs, &mut self.scratch_p);
            cache.log_norm = weyl_log_norm_new.expect("computed with the delta");
            cache.updates_since_rebuild += 1;
            // renormalize the running scale when the coefficients drift
            let m = cache.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
            if m > 1e120 || m < 1e-120 {
                let l = m.ln();
                cache.log_scale += l;
                let inv = (-l).exp();
                for co in cache.coeffs.iter_mut() {
                    *co *= inv;
                }
            }
            // periodic full rebuild bounds the drift of the incremental path
            if cache.updates_since_rebuild >= 1000 {
                let (coeffs, log_scale) = build_coeffs(&self.points);
                cache.coeffs = coeffs;
                cache.log_scale = log_scale;
                cache.log_norm = log_norm_from_coeffs(&cache.coeffs, cache.log_scale, r);
                cache.updates_since_rebuild = 0;
            }
        }
        true
    }

    /// Recompute every cache from scratch, record the worst drift, and
    /// adopt the fresh values.
    pub fn audit(&mut self) -> f64 {
        let fresh = recompute_pair_log(&self.points);
        let mut drift = 0.0f64;
        for (a, b) in self.pair_log.iter().zip(fresh.iter()) {
            drift = drift.max((a - b).abs());
        }
        self.pair_log = fresh;
        if let Ensemble::WeylZeros { r, .. } = self.ensemble {
            let cache = self.weyl.as_mut().expect("weyl cache");
            let (coeffs, log_scale) = build_coeffs(&self.points);
            let log_norm = log_norm_from_coeffs(&coeffs, log_scale, r);
            drift = drift.max((log_norm - cache.log_norm).abs());
            cache.coeffs = coeffs;
            cache.log_scale = log_scale;
            cache.log_norm = log_norm;
            cache.updates_since_rebuild = 0;
        }
        self.audit_max_drift = self.audit_max_drift.max(drift);
        drift
    }

    /// Check that no stored point violates the hard constraint.
    pub fn constraint_satisfied(&self) -> bool {
        match &self.constraint {
            ConstraintSpec::None => true,
            ConstraintSpec::Hole(h) => !self.points.iter().any(|z| h.contains(*z)),
            ConstraintSpec::MaxCount { region, max } => {
                self.points.iter().filter(|z| region.contains(**z)).count() <= *max
            }
            ConstraintSpec::MinCount { region, min } => {
                self.points.iter().filter(|z| region.contains(**z)).count() >= *min
            }
        }
    }

    pub fn to_configuration(&self) -> PointConfiguration {
        PointConfiguration::new(self.points.clone(), 1.0, "chain").expect("finite points")
    }
}

// ---------------------------------------------------------------------------
// test functions and collectors

/// A compactly supported test function with its Dirichlet energy
/// ∫ |∇φ|² dm, computed once at construction.
#[derive(Clone)]
pub struct TestFunction {
    profile: Profile,
    pub support_radius: f64,
    pub dirichlet_energy: f64,
}

#[derive(Clone)]
enum Profile {
    Radial(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
    Grid { x0: f64, y0: f64, dx: f64, nx: usize, ny: usize, values: Vec<f64> },
}

impl TestFunction {
    /// Radial profile φ(r), vanishing for r >= support_radius. The
    /// Dirichlet energy 2π ∫ φ'(r)² r dr uses central-difference
    /// differentiation (step 1e-6 of the support radius); accuracy is
    /// noise-limited to ~1e-5 near kinks of φ'. Supply the derivative via
    /// `radial_with_derivative` for full quadrature accuracy.
    pub fn radial(
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        support_radius: f64,
    ) -> Result<Self> {
        if !(support_radius > 0.0) {
            return Err(Error::domain("support radius must be positive"));
        }
        let h = 1e-6 * support_radius;
        let integrand = {
            let f = &f;
            move |r: f64| {
                let lo = (r - h).max(0.0);
                let hi = r + h;
                let d = (f(hi) - f(lo)) / (hi - lo);
                d * d * r
            }
        };
        let energy = 2.0
            * PI
            * integrate_with_kinks(&integrand, 0.0, support_radius * (1.0 + 1e-12), &[], 1e-8)?;
        Ok(TestFunction {
            profile: Profile::Radial(Arc::new(f)),
            support_radius,
            dirichlet_energy: energy,
        })
    }

    /// Radial profile with an exact derivative; the Dirichlet energy
    /// 2π ∫ φ'(r)² r dr is then computed to quadrature tolerance 1e-10.
    pub fn radial_with_derivative(
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        fp: impl Fn(f64) -> f64,
        support_radius: f64,
    ) -> Result<Self> {
        if !(support_radius > 0.0) {
            return Err(Error::domain("support radius must be positive"));
        }
        let integrand = move |r: f64| {
            let d = fp(r);
            d * d * r
        };
        let energy =
            2.0 * PI * integrate_with_kinks(&integrand, 0.0, support_radius, &[], 1e-10)?;
        Ok(TestFunction {
            profile: Profile::Radial(Arc::new(f)),
            support_radius,
            dirichlet_energy: energy,
        })
    }

    /// Square-grid profile with bilinear interpolation; values laid out
    /// row-major over ny rows and nx columns, cell size dx, lower-left
    /// corner (x0, y0). The function is zero outside the grid.
    pub fn from_grid(x0: f64, y0: f64, dx: f64, nx: usize, ny: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != nx * ny || nx < 2 || ny < 2 {
            return Err(Error::domain("grid dimensions do not match the value array"));
        }
        if !(dx > 0.0) {
            return Err(Error::domain("grid spacing must be positive"));
        }
        // exact Dirichlet energy of the bilinear interpolant, cell by cell:
        // ∫ φx² over a cell = (dx²/3)(a² + ab + b²) with a, b the x-slopes
        // on the bottom and top edges (similarly for y)
        let mut energy = 0.0;
        for iy in 0..ny - 1 {
            for ix in 0..nx - 1 {
                let f00 = values[iy * nx + ix];
                let f10 = values[iy * nx + ix + 1];
                let f01 = values[(iy + 1) * nx + ix];
                let f11 = values[(iy + 1) * nx + ix + 1];
                let ax = (f10 - f00) / dx;
                let bx = (f11 - f01) / dx;
                let ay = (f01 - f00) / dx;
                let by = (f11 - f10) / dx;
                energy += dx * dx / 3.0 * (ax * ax + ax * bx + bx * bx);
                energy += dx * dx / 3.0 * (ay * ay + ay * by + by * by);
            }
        }
        let corner = (x0.abs().max((x0 + dx * (nx - 1) as f64).abs()))
            .hypot(y0.abs().max((y0 + dx * (ny - 1) as f64).abs()));
        Ok(TestFunction {
            profile: Profile::Grid { x0, y0, dx, nx, ny, values },
            support_radius: corner,
            dirichlet_energy: energy,
        })
    }

    pub fn eval(&self, z: Complex64) -> f64 {
        match &self.profile {
            Profile::Radial(f) => {
                let r = z.norm();
                if r >= self.support_radius {
                    0.0
                } else {
                    f(r)
                }
            }
            Profile::Grid { x0, y0, dx, nx, ny, values } => {
                let fx = (z.re - x0) / dx;
                let fy = (z.im - y0) / dx;
                if fx < 0.0 || fy < 0.0 {
                    return 0.0;
                }
                let ix = fx.floor() as usize;
                let iy = fy.floor() as usize;
                if ix + 1 >= *nx || iy + 1 >= *ny {
                    return 0.0;
                }
                let tx = fx - ix as f64;
                let ty = fy - iy as f64;
                let f00 = values[iy * nx + ix];
                let f10 = values[iy * nx + ix + 1];
                let f01 = values[(iy + 1) * nx + ix];
                let f11 = values[(iy + 1) * nx + ix + 1];
                f00 * (1.0 - tx) * (1.0 - ty)
                    + f10 * tx * (1.0 - ty)
                    + f01 * (1.0 - tx) * ty
                    + f11 * tx * ty
            }
        }
    }
}

/// Linear statistic n(φ; R) = Σ_j φ(z_j / R).
pub fn linear_statistic(points: &[Complex64], phi: &TestFunction, r: f64) -> f64 {
    points.iter().map(|z| phi.eval(z / r)).sum()
}

/// Dirichlet energy of a test function (precomputed at construction).
pub fn dirichlet_energy(phi: &TestFunction) -> f64 {
    phi.dirichlet_energy
}

/// Empirical radial intensity profile of a family of configurations with
/// jackknife error bars.
pub fn config_radial_profile(samples: &[PointConfiguration], bins: usize, r_max: f64) -> RadialProfile {
    let radii: Vec<Vec<f64>> = samples
        .iter()
        .map(|c| c.points.iter().map(|z| z.norm()).collect())
        .collect();
    radial_profile(&radii, bins, r_max)
}

/// What to record from the thinned post-burn-in configurations.
pub enum Collector {
    /// All point radii, one vector per collected configuration.
    Radii { samples: Vec<Vec<f64>> },
    /// Point count inside a region per collected configuration.
    CountInRegion { region: HoleRegion, counts: Vec<usize> },
    /// Linear statistic n(φ; R) per collected configuration.
    LinearStatistic { phi: TestFunction, r_scale: f64, values: Vec<f64> },
    /// Full configurations (memory permitting).
    Configurations { samples: Vec<PointConfiguration> },
}

impl Collector {
    pub fn radii() -> Self {
        Collector::Radii { samples: Vec::new() }
    }
    pub fn count_in(region: HoleRegion) -> Self {
        Collector::CountInRegion { region, counts: Vec::new() }
    }
    pub fn linear_statistic(phi: TestFunction, r_scale: f64) -> Self {
        Collector::LinearStatistic { phi, r_scale, values: Vec::new() }
    }
    pub fn configurations() -> Self {
        Collector::Configurations { samples: Vec::new() }
    }

    fn collect(&mut self, points: &[Complex64]) {
        match self {
            Collector::Radii { samples } => {
                samples.push(points.iter().map(|z| z.norm()).collect());
            }
            Collector::CountInRegion { region, counts } => {
                counts.push(points.iter().filter(|z| region.contains(**z)).count());
            }
            Collector::LinearStatistic { phi, r_scale, values } => {
                values.push(linear_statistic(points, phi, *r_scale));
            }
            Collector::Configurations { samples } => {
                samples.push(
                    PointConfiguration::new(points.to_vec(), 1.0, "chain").expect("finite"),
                );
            }
        }
    }
}

/// Summary of a chain run.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub steps: u64,
    pub accepted: u64,
    pub proposed: u64,
    pub constraint_rejected: u64,
    pub acceptance_rate: f64,
    pub sigma_final: f64,
    pub audit_max_drift: f64,
    pub collected: usize,
    /// Set if any collected configuration violated the hard constraint.
    pub constraint_violations: u64,
}

/// Drive the chain: σ is auto-tuned toward acceptance 0.3 during burn-in
/// (then frozen, preserving detailed balance), and every `thin`-th
/// configuration after burn-in is fed to the collectors.
pub fn run_chain(
    chain: &mut ChainState,
    steps: u64,
    burnin: u64,
    thin: u64,
    collectors: &mut [Collector],
) -> Result<RunSummary> {
    if steps <= burnin {
        return Err(Error::domain("steps must exceed burnin"));
    }
    let thin = thin.max(1);
    let tune_window = 250u64;
    let mut window_accepts = 0u64;
    let mut collected = 0usize;
    let mut violations = 0u64;
    let start_counters = chain.counters;
    for step in 0..steps {
        if chain.mh_step() {
            window_accepts += 1;
        }
        if step < burnin {
            if (step + 1) % tune_window == 0 {
                let rate = window_accepts as f64 / tune_window as f64;
                chain.sigma = (chain.sigma * (0.7 * (rate - 0.3)).exp())
                    .clamp(1e-4, chain.ensemble.equilibrium_radius());
                window_accepts = 0;
            }
        } else {
            if step == burnin {
                window_accepts = 0;
            }
            if (step - burnin) % thin == 0 {
                if !chain.constraint_satisfied() {
                    violations += 1;
                }
                for c in collectors.iter_mut() {
                    c.collect(&chain.points);
                }
                collected += 1;
            }
        }
    }
    let proposed = chain.counters.proposed - start_counters.proposed;
    let accepted = chain.counters.accepted - start_counters.accepted;
    Ok(RunSummary {
        steps,
        accepted,
        proposed,
        constraint_rejected: chain.counters.constraint_rejected
            - start_counters.constraint_rejected,
        acceptance_rate: accepted as f64 / proposed.max(1) as f64,
        sigma_final: chain.sigma,
        audit_max_drift: chain.audit_max_drift,
        collected,
        constraint_violations: violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn beta_density_basics() {
        assert!((beta_ginibre_log_density(&[c(0.0, 1.0)], 2.0) - (-1.0)).abs() < 1e-15);
        let v = beta_ginibre_log_density(&[c(0.0, 0.0), c(1.0, 0.0)], 2.0);
        assert!((v - (-1.0)).abs() < 1e-15);
        // permutation invariance
        let pts = [c(0.3, -0.2), c(1.1, 0.4), c(-0.7, 0.9)];
        let mut perm = pts;
        perm.swap(0, 2);
        assert!(
            (beta_ginibre_log_density(&pts, 3.0) - beta_ginibre_log_density(&perm, 3.0)).abs()
                < 1e-12
        );
        // coincident points
        assert_eq!(
            beta_ginibre_log_density(&[c(1.0, 0.0), c(1.0, 0.0)], 2.0),
            f64::NEG_INFINITY
        );
    }

    #[test]
    fn weyl_density_single_point_ratio() {
        // density ratio ρ(z1)/ρ(0) = (1/R²)² / (1/R² + |z1|²)²
        let r = 2.0f64;
        let z = c(0.7, -0.4);
        let a = weyl_log_density(&[z], r).unwrap();
        let b = weyl_log_density(&[c(0.0, 0.0)], r).unwrap();
        let got = a - b;
        let expect = 2.0 * ((1.0 / (r * r)).ln() - (1.0 / (r * r) + z.norm_sqr()).ln());
        assert!((got - expect).abs() < 1e-10, "{got} vs {expect}");
    }

    #[test]
    fn weyl_norm_identity_vs_quadrature() {
        // Σ_j |a_j|² j!/R^{2j}  =  (R²/π) ∫ |Q(w)|² e^{-R²|w|²} dm(w)
        // for a random degree-5 monic polynomial, by polar quadrature.
        let pts = [c(0.3, 0.1), c(-0.5, 0.4), c(0.9, -0.2), c(0.1, 0.8), c(-0.3, -0.6)];
        let r = 1.7f64;
        let (coeffs, log_scale) = build_coeffs(&pts);
        let ours = log_norm_from_coeffs(&coeffs, log_scale, r);
        // quadrature in polar coordinates
        let q_eval = |w: Complex64| -> f64 {
            let mut p = Complex64::new(1.0, 0.0);
            for &z in pts.iter() {
                p *= w - z;
            }
            p.norm_sqr()
        };
        let radial = |rad: f64| {
            let angular = integrate_with_kinks(
                &|t: f64| q_eval(Complex64::from_polar(rad, t)),
                0.0,
                2.0 * PI,
                &[],
                1e-9,
            )
            .unwrap();
            angular * rad * (-r * r * rad * rad).exp()
        };
        let integral = adaptive_simpson(&radial, 0.0, 6.0 / r, 1e-11, 44).unwrap();
        let oracle = (r * r / PI * integral).ln();
        assert!((ours - oracle).abs() < 1e-7, "{ours} vs {oracle}");
    }

    #[test]
    fn weyl_density_permutation_invariance() {
        let pts = [c(0.3, 0.1), c(-0.5, 0.4), c(0.9, -0.2)];
        let mut perm = pts;
        perm.swap(0, 1);
        let a = weyl_log_density(&pts, 2.0).unwrap();
        let b = weyl_log_density(&perm, 2.0).unwrap();
        assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn init_respects_constraints() {
        let hole = HoleRegion::Disk { center: c(0.0, 0.0), radius: 3.0 };
        let chain = init_chain(
            Ensemble::BetaGinibre { beta: 2.0, n: 100 },
            ConstraintSpec::Hole(hole.clone()),
            crate::rng_stream(7, 0),
        )
        .unwrap();
        assert_eq!(chain.points.len(), 100);
        assert!(chain.constraint_satisfied());
        assert!(!chain.points.iter().any(|z| hole.contains(*z)));
        // MaxCount{D, 0} behaves like a hole
        let chain2 = init_chain(
            Ensemble::BetaGinibre { beta: 2.0, n: 50 },
            ConstraintSpec::MaxCount { region: hole.clone(), max: 0 },
            crate::rng_stream(7, 1),
        )
        .unwrap();
        assert!(chain2.constraint_satisfied());
        // MinCount placement
        let chain3 = init_chain(
            Ensemble::BetaGinibre { beta: 2.0, n: 50 },
            ConstraintSpec::MinCount { region: hole.clone(), min: 5 },
            crate::rng_stream(7, 2),
        )
        .unwrap();
        assert!(chain3.constraint_satisfied());
        // unsatisfiable count
        assert!(init_chain(
            Ensemble::BetaGinibre { beta: 2.0, n: 3 },
            ConstraintSpec::MinCount { region: hole, min: 5 },
            crate::rng_stream(7, 3),
        )
        .is_err());
    }

    #[test]
    fn cache_consistency_at_init_and_after_steps() {
        let mut chain = init_chain(
            Ensemble::BetaGinibre { beta: 2.0, n: 40 },
            ConstraintSpec::Hole(HoleRegion::Disk { center: c(0.0, 0.0), radius: 2.0 }),
            crate::rng_stream(8, 0),
        )
        .unwrap();
        assert!(chain.audit() < 1e-12);
        for _ in 0..5_000 {
            chain.mh_step();
        }
        let drift = chain.audit();
        assert!(drift <= 1e-8, "cache drift {drift}");
        assert!(chain.constraint_satisfied());
    }

    #[test]
    fn correction_ratio_unity_far_from_hole() {
        let hole = HoleRegion::Disk { center: c(0.0, 0.0), radius: 1.0 };
        let mut rng = crate::rng_stream(9, 0);
        let sigma = 0.3;
        let far = c(1.0 + 8.5 * sigma, 0.0);
        let lz = log_z_out(&hole, far, sigma, &mut rng);
        assert!(lz.abs() < 1e-12, "log Z_out = {lz}");
    }

    #[test]
    fn rice_mass_against_mc() {
        let mut rng = crate::rng_stream(10, 0);
        let (d, rho, sigma) = (1.2, 1.0, 0.5);
        let exact = rice_disk_mass(d, rho, sigma);
        let mut hits = 0usize;
        let n = 200_000;
        for _ in 0..n {
            let gx: f64 = rng.sample(StandardNormal);
            let gy: f64 = rng.sample(StandardNormal);
            let z = c(d + sigma * gx, sigma * gy);
            if z.norm() <= rho {
                hits += 1;
            }
        }
        let mc = hits as f64 / n as f64;
        assert!((exact - mc).abs() < 0.005, "exact {exact} vs mc {mc}");
    }

    #[test]
    fn annulus_and_polygon_membership() {
        let ann = HoleRegion::Annulus { r_lo: 1.0, r_hi: 2.0 };
        assert!(ann.contains(c(1.5, 0.0)));
        assert!(!ann.contains(c(0.5, 0.0)));
        assert!(!ann.contains(c(2.5, 0.0)));
        ann.certify_exterior_ball().unwrap();
        let square = HoleRegion::ConvexPolygon {
            vertices: vec![c(-1.0, -1.0), c(1.0, -1.0), c(1.0, 1.0), c(-1.0, 1.0)],
        };
        assert!(square.contains(c(0.0, 0.0)));
        assert!(!square.contains(c(1.5, 0.0)));
        square.certify_exterior_ball().unwrap();
        assert!((square.area() - 4.0).abs() < 1e-14);
        // non-convex polygon rejected
        let bad = HoleRegion::ConvexPolygon {
            vertices: vec![c(0.0, 0.0), c(2.0, 0.0), c(1.0, 0.2), c(0.0, 2.0)],
        };
        assert!(bad.certify_exterior_ball().is_err());
    }

    #[test]
    fn dirichlet_energy_closed_forms() {
        // φ(r) = (1-r²)+  → 𝔇 = 2π, exact-derivative route
        let phi = TestFunction::radial_with_derivative(
            |r| (1.0 - r * r).max(0.0),
            |r| if r < 1.0 { -2.0 * r } else { 0.0 },
            1.0,
        )
        .unwrap();
        assert!((phi.dirichlet_energy - 2.0 * PI).abs() < 1e-8, "{}", phi.dirichlet_energy);
        // finite-difference route is kink-noise limited
        let phi_fd = TestFunction::radial(|r| (1.0 - r * r).max(0.0), 1.0).unwrap();
        assert!((phi_fd.dirichlet_energy - 2.0 * PI).abs() < 5e-5, "{}", phi_fd.dirichlet_energy);
        // scale invariance in 2D
        let s = 2.5;
        let phi_s = TestFunction::radial_with_derivative(
            move |r| (1.0 - (r / s) * (r / s)).max(0.0),
            move |r| if r < s { -2.0 * r / (s * s) } else { 0.0 },
            s,
        )
        .unwrap();
        assert!((phi_s.dirichlet_energy - phi.dirichlet_energy).abs() < 1e-8);
    }

    #[test]
    fn dirichlet_energy_grid_matches_closed_form() {
        // C¹ bump (1-r²)²₊: φ' = -4r(1-r²) is continuous at the support
        // edge, so the bilinear energy converges at second order;
        // 𝔇 = 32π ∫ r³(1-r²)² dr = 4π/3
        let n = 1024usize;
        let half = 1.05;
        let dx = 2.0 * half / (n - 1) as f64;
        let mut values = vec![0.0; n * n];
        for iy in 0..n {
            for ix in 0..n {
                let x = -half + ix as f64 * dx;
                let y = -half + iy as f64 * dx;
                let b = (1.0 - (x * x + y * y)).max(0.0);
                values[iy * n + ix] = b * b;
            }
        }
        let exact = 4.0 * PI / 3.0;
        let phi = TestFunction::from_grid(-half, -half, dx, n, n, values).unwrap();
        let rel = (phi.dirichlet_energy - exact).abs() / exact;
        assert!(rel < 1e-4, "relative error {rel}");
        // and against the closed-form route at full accuracy
        let closed = TestFunction::radial_with_derivative(
            |r| {
                let b = (1.0 - r * r).max(0.0);
                b * b
            },
            |r| if r < 1.0 { -4.0 * r * (1.0 - r * r) } else { 0.0 },
            1.0,
        )
        .unwrap();
        assert!((closed.dirichlet_energy - exact).abs() < 1e-9);
    }

    #[test]
    fn linear_statistic_examples() {
        // points outside the support contribute zero
        let phi = TestFunction::radial(|r| (1.0 - r * r).max(0.0), 1.0).unwrap();
        let far: Vec<Complex64> = (0..5).map(|i| c(10.0 + i as f64, 3.0)).collect();
        assert_eq!(linear_statistic(&far, &phi, 2.0), 0.0);
        // a single point at the origin contributes φ(0) = 1 for any R
        let origin = [c(0.0, 0.0)];
        for &r in &[0.5, 1.0, 7.0] {
            assert!((linear_statistic(&origin, &phi, r) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn run_chain_counts_and_collectors() {
        let mut chain = init_chain(
            Ensemble::BetaGinibre { beta: 2.0, n: 16 },
            ConstraintSpec::None,
            crate::rng_stream(11, 0),
        )
        .unwrap();
        let mut collectors = vec![Collector::radii()];
        let summary = run_chain(&mut chain, 3_000, 1_000, 1, &mut collectors).unwrap();
        assert_eq!(summary.collected, 2_000);
        assert_eq!(summary.constraint_violations, 0);
        if let Collector::Radii { samples } = &collectors[0] {
            assert_eq!(samples.len(), 2_000);
            assert_eq!(samples[0].len(), 16);
        } else {
            unreachable!()
        }
        // zero collectors still yields a summary
        let mut chain2 = init_chain(
            Ensemble::BetaGinibre { beta: 2.0, n: 8 },
            ConstraintSpec::None,
            crate::rng_stream(11, 1),
        )
        .unwrap();
        let s2 = run_chain(&mut chain2, 500, 100, 1, &mut []).unwrap();
        assert_eq!(s2.collected, 400);
    }

    #[test]
    fn autotuned_acceptance_in_band() {
        let mut chain = init_chain(
            Ensemble::BetaGinibre { beta: 2.0, n: 64 },
            ConstraintSpec::Hole(HoleRegion::Disk { center: c(0.0, 0.0), radius: 3.0 }),
            crate::rng_stream(12, 0),
        )
        .unwrap();
        let mut cols: Vec<Collector> = vec![];
        let before = chain.counters;
        run_chain(&mut chain, 30_000, 10_000, 10, &mut cols).unwrap();
        let after = chain.counters;
        // post-burn-in acceptance rate in the healthy band
        let rate = (after.accepted - before.accepted) as f64
            / (after.proposed - before.proposed) as f64;
        assert!(rate > 0.1 && rate < 0.7, "acceptance {rate}");
    }

    #[test]
    fn weyl_chain_steps_and_cache() {
        let mut chain = init_chain(
            Ensemble::WeylZeros { r: 2.0, n: 24 },
            ConstraintSpec::None,
            crate::rng_stream(13, 0),
        )
        .unwrap();
        let mut accepted = 0;
        for _ in 0..3_000 {
            if chain.mh_step() {
                accepted += 1;
            }
        }
        assert!(accepted > 0);
        let drift = chain.audit();
        assert!(drift < 1e-7, "weyl cache drift {drift}");
    }
}
