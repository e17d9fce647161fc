//! Exact random generation of the planar ensembles: Ginibre eigenvalues via
//! dense eigendecomposition, Kostlan radial samples, GUE spectra from the
//! tridiagonal model, Weyl-polynomial zeros and truncated Gaussian-entire-
//! function zeros, plus configuration-level energy statistics.

use crate::linalg::{self, CMat};
use crate::quad::integrate_with_kinks;
use crate::special::ln_factorial;
use crate::{Error, Result};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use std::f64::consts::PI;

/// A finite planar point configuration with scale metadata.
#[derive(Debug, Clone)]
pub struct PointConfiguration {
    pub points: Vec<Complex64>,
    /// Normalization applied to the raw ensemble (e.g. sqrt(n) for scaled
    /// polynomial zeros, the hole parameter R for truncated-GEF zeros).
    pub scale: f64,
    /// Ensemble tag.
    pub label: String,
    /// Set when the root finder could not certify the configuration.
    pub degraded: bool,
}

impl PointConfiguration {
    pub fn new(points: Vec<Complex64>, scale: f64, label: impl Into<String>) -> Result<Self> {
        if !(scale > 0.0) {
            return Err(Error::domain("scale must be positive"));
        }
        if points.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::domain("all coordinates must be finite"));
        }
        Ok(PointConfiguration { points, scale, label: label.into(), degraded: false })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Standard complex Gaussian with E|xi|^2 = 1.
pub fn standard_complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) / 2.0f64.sqrt()
}

/// Gamma(shape, 1) sampler: exact sum of exponentials for integer shapes up
/// to 32, Marsaglia–Tsang rejection above.
pub fn gamma_int<R: Rng + ?Sized>(shape: usize, rng: &mut R) -> f64 {
    assert!(shape >= 1);
    if shape <= 32 {
        let mut acc = 0.0;
        for _ in 0..shape {
            let u: f64 = rng.gen();
            acc -= u.ln();
        }
        acc
    } else {
        gamma_marsaglia_tsang(shape as f64, rng)
    }
}

fn gamma_marsaglia_tsang<R: Rng + ?Sized>(a: f64, rng: &mut R) -> f64 {
    debug_assert!(a >= 1.0);
    let d = a - 1.0 / 3.0;
    let c = 1.0 / (3.0 * d.sqrt());
    loop {
        let x: f64 = rng.sample(StandardNormal);
        let v = 1.0 + c * x;
        if v <= 0.0 {
            continue;
        }
        let v = v * v * v;
        let u: f64 = rng.gen();
        if u < 1.0 - 0.0331 * x.powi(4) {
            return d * v;
        }
        if u.ln() < 0.5 * x * x + d * (1.0 - v + v.ln()) {
            return d * v;
        }
    }
}

/// Eigenvalues of an n-by-n matrix of i.i.d. complex Gaussian entries with
/// variance 1/n, via Hessenberg reduction and shifted-QR iteration.
/// The empirical law converges to the uniform measure on the unit disk.
pub fn sample_ginibre_matrix<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<PointConfiguration> {
    if n == 0 || n > 2000 {
        return Err(Error::domain(format!("matrix order must be in 1..=2000, got {n}")));
    }
    let sd = (1.0 / n as f64).sqrt();
    let mut m = CMat::zeros(n);
    for i in 0..n {
        for j in 0..n {
            *m.at_mut(i, j) = standard_complex_gaussian(rng) * sd;
        }
    }
    let eig = linalg::complex_eigenvalues(&m)?;
    PointConfiguration::new(eig, 1.0, "ginibre-matrix")
}

/// Kostlan radial samples: the squared moduli of the planar β=2 points are
/// distributed as independent Gamma(k, 1), k = 1..n. For the infinite
/// ensemble, pass the truncation index as `n`.
pub fn sample_ginibre_radii<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::domain("need at least one radius"));
    }
    Ok((1..=n).map(|k| gamma_int(k, rng).sqrt()).collect())
}

/// GUE eigenvalues from the β=2 tridiagonal model, scaled so the empirical
/// law converges to the semicircle on [-sqrt(2), sqrt(2)].
pub fn sample_gue<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::domain("need at least one eigenvalue"));
    }
    if n == 1 {
        let g: f64 = rng.sample(StandardNormal);
        return Ok(vec![g / (2.0f64).sqrt()]);
    }
    let diag: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    // chi_{2(n-k)} / sqrt(2) = sqrt(Gamma(n-k, 1))
    let off: Vec<f64> = (1..n).map(|k| gamma_int(n - k, rng).sqrt()).collect();
    let eig = linalg::symtridiag_eigenvalues(&diag, &off)?;
    let s = (2.0 * n as f64).sqrt();
    Ok(eig.into_iter().map(|x| x / s).collect())
}

/// Roots of a polynomial given in log-magnitude/phase form: coefficient k
/// is phases[k] * exp(log_mags[k]) with |phases[k]| = 1 (or 0 for a zero
/// coefficient, with log_mags[k] = -inf). The substitution z = ρ y with ρ
/// equalizing the extreme coefficient magnitudes keeps the rescaled
/// sequence representable even when the raw coefficients span hundreds of
/// orders of magnitude. One Newton polish per root; returns the roots and
/// the worst relative residual.
pub fn rescaled_log_roots(log_mags: &[f64], phases: &[Complex64]) -> Result<(Vec<Complex64>, f64)> {
    assert_eq!(log_mags.len(), phases.len());
    let deg = log_mags.len() - 1;
    if deg < 1 {
        return Err(Error::domain("degree must be at least 1"));
    }
    if !log_mags[deg].is_finite() {
        return Err(Error::domain("leading coefficient must be nonzero"));
    }
    let (scaled, rho) = rescale_coefficients(log_mags, phases);
    let mut roots_y = linalg::polynomial_roots(&scaled)?;
    let mut worst = aberth_polish(&scaled, &mut roots_y, 40);
    if worst > 1e-10 && log_mags[0].is_finite() {
        // The companion QR can misplace a handful of roots at the outer
        // edge of the root cloud. Those are interior (well-conditioned)
        // roots of the reversed polynomial; recompute them there and merge.
        let rev_mags: Vec<f64> = log_mags.iter().rev().cloned().collect();
        let rev_phases: Vec<Complex64> = phases.iter().rev().cloned().collect();
        let (rev_scaled, rev_rho) = rescale_coefficients(&rev_mags, &rev_phases);
        if let Ok(mut roots_u) = linalg::polynomial_roots(&rev_scaled) {
            aberth_polish(&rev_scaled, &mut roots_u, 40);
            // reversed roots in the forward y-domain: y = 1/(u · rev_rho · rho)
            let mut candidates: Vec<Complex64> = roots_u
                .iter()
                .filter(|u| u.norm() > 0.0)
                .map(|&u| (u * rev_rho * rho).inv())
                .collect();
            for ry in roots_y.iter_mut() {
                if linalg::relative_residual(&scaled, *ry) <= 1e-10 || candidates.is_empty() {
                    continue;
                }
                let (bi, _) = candidates
                    .iter()
                    .enumerate()
                    .map(|(i, c)| (i, (c - *ry).norm()))
                    .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
                    .unwrap();
                let cand = candidates[bi];
                if linalg::relative_residual(&scaled, cand)
                    < linalg::relative_residual(&scaled, *ry)
                {
                    *ry = cand;
                    candidates.swap_remove(bi);
                }
            }
            worst = aberth_polish(&scaled, &mut roots_y, 20);
        }
    }
    let roots: Vec<Complex64> = roots_y.iter().map(|&y| y * rho).collect();
    Ok((roots, worst))
}

/// Rescale a log-form coefficient sequence by z = ρ y with ρ equalizing the
/// end magnitudes, normalized so the largest coefficient is one. Returns
/// the representable y-domain coefficients and ρ.
fn rescale_coefficients(log_mags: &[f64], phases: &[Complex64]) -> (Vec<Complex64>, f64) {
    let deg = log_mags.len() - 1;
    let log_rho = if log_mags[0].is_finite() {
        (log_mags[0] - log_mags[deg]) / deg as f64
    } else {
        0.0
    };
    let lb: Vec<f64> = (0..=deg).map(|k| log_mags[k] + k as f64 * log_rho).collect();
    let shift = lb.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let scaled: Vec<Complex64> = (0..=deg)
        .map(|k| {
            if lb[k].is_finite() {
                phases[k] * (lb[k] - shift).exp()
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    (scaled, log_rho.exp())
}

/// Aberth–Ehrlich simultaneous refinement of all roots; returns the worst
/// relative residual after convergence (or after `max_sweeps`).
fn aberth_polish(coeffs: &[Complex64], roots: &mut [Complex64], max_sweeps: usize) -> f64 {
    let n = roots.len();
    let mut worst = worst_residual(coeffs, roots);
    let mut best = worst;
    let mut stagnant = 0usize;
    for _ in 0..max_sweeps {
        if worst <= 1e-12 || stagnant >= 8 {
            break;
        }
        for i in 0..n {
            if linalg::relative_residual(coeffs, roots[i]) <= 1e-13 {
                continue;
            }
            let (p, dp) = linalg::horner_with_derivative(coeffs, roots[i]);
            if p.norm() == 0.0 || dp.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let mut rep = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j != i {
                    let d = roots[i] - roots[j];
                    if d.norm_sqr() > 0.0 {
                        rep += d.inv();
                    }
                }
            }
            let denom = Complex64::new(1.0, 0.0) - ratio * rep;
            if denom.norm() == 0.0 {
                continue;
            }
            let step = ratio / denom;
            if step.norm().is_finite() {
                roots[i] -= step;
            }
        }
        worst = worst_residual(coeffs, roots);
        if worst < best * 0.5 {
            best = worst;
            stagnant = 0;
        } else {
            stagnant += 1;
        }
    }
    worst
}

fn worst_residual(coeffs: &[Complex64], roots: &[Complex64]) -> f64 {
    roots
        .iter()
        .map(|&y| linalg::relative_residual(coeffs, y))
        .fold(0.0, f64::max)
}

/// Threshold above which a configuration is flagged degraded.
pub const ROOT_RESIDUAL_TOLERANCE: f64 = 1e-7;

/// Log-magnitudes and unit phases of ξ_k / sqrt(k!), k = 0..=n, with ξ_k
/// independent standard complex Gaussians.
fn gaussian_taylor_coefficients<R: Rng + ?Sized>(
    n: usize,
    rng: &mut R,
) -> (Vec<f64>, Vec<Complex64>) {
    let mut log_mags = Vec::with_capacity(n + 1);
    let mut phases = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let xi = standard_complex_gaussian(rng);
        let m = xi.norm();
        if m > 0.0 {
            log_mags.push(m.ln() - 0.5 * ln_factorial(k));
            phases.push(xi / m);
        } else {
            log_mags.push(f64::NEG_INFINITY);
            phases.push(Complex64::new(0.0, 0.0));
        }
    }
    (log_mags, phases)
}

/// The n zeros of a sampled degree-n Gaussian Taylor polynomial with
/// coefficient variances 1/k!, scaled down by sqrt(n).
pub fn sample_weyl_zeros<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<PointConfiguration> {
    if !(5..=800).contains(&n) {
        return Err(Error::domain(format!("degree must be in 5..=800, got {n}")));
    }
    let (log_mags, phases) = gaussian_taylor_coefficients(n, rng);
    let (roots, residual) = rescaled_log_roots(&log_mags, &phases)?;
    let s = (n as f64).sqrt();
    let scaled: Vec<Complex64> = roots.into_iter().map(|z| z / s).collect();
    let mut config = PointConfiguration::new(scaled, s, "weyl")?;
    config.degraded = residual > ROOT_RESIDUAL_TOLERANCE;
    Ok(config)
}

/// Minimal truncation parameter guaranteeing that the discarded series tail
/// is negligible on |z| <= R sqrt(e) (see `gef_tail_bound`).
pub fn gef_alpha_min(r: f64) -> f64 {
    4.0 + 2.0 * (1.0 + r).ln()
}

/// Log of the coefficient-tail magnitude bound relative to the typical
/// modulus e^{r^2/2} at radius r = R sqrt(e): the discarded terms of the
/// degree-N truncation sum to at most exp(bound) times the typical size.
pub fn gef_tail_bound(r: f64, alpha: f64) -> f64 {
    let n = (alpha * r * r).floor();
    let rr = r * r * std::f64::consts::E;
    let rad = rr.sqrt();
    let logterm = (n + 1.0) * rad.ln() - 0.5 * ln_factorial((n + 1.0) as usize) - rr / 2.0;
    // ratio of consecutive terms at k = N+1 is rad/sqrt(N+2) < 1
    let ratio = rad / (n + 2.0).sqrt();
    logterm - (1.0 - ratio).ln()
}

/// Zeros of the degree-⌊αR²⌋ truncation of the planar Gaussian Taylor
/// series, in the unscaled plane; only zeros with |z| <= 0.9 sqrt(alpha) R
/// (where the truncation is faithful) are retained. scale = R.
pub fn sample_gef_zeros<R: Rng + ?Sized>(
    r: f64,
    alpha: f64,
    rng: &mut R,
) -> Result<PointConfiguration> {
    if !(r > 0.0) {
        return Err(Error::domain("R must be positive"));
    }
    if alpha < gef_alpha_min(r) {
        return Err(Error::domain(format!(
            "alpha = {alpha} below the truncation-adequacy threshold {:.3}",
            gef_alpha_min(r)
        )));
    }
    let n = (alpha * r * r).floor() as usize;
    let (log_mags, phases) = gaussian_taylor_coefficients(n, rng);
    let (roots, residual) = rescaled_log_roots(&log_mags, &phases)?;
    let reliable = 0.9 * alpha.sqrt() * r;
    let kept: Vec<Complex64> = roots.into_iter().filter(|z| z.norm() <= reliable).collect();
    let mut config = PointConfiguration::new(kept, r, "gef")?;
    config.degraded = residual > ROOT_RESIDUAL_TOLERANCE;
    Ok(config)
}

/// Energy statistics of a configuration and of its circle-smoothed empirical
/// measure (each point replaced by the uniform measure on a radius-t circle).
#[derive(Debug, Clone, Copy)]
pub struct SmoothedStats {
    /// (1/N²) Σ_{j≠k} log|w_j − w_k| (−inf when points coincide).
    pub pair_energy: f64,
    /// (1/N) Σ |w_j|².
    pub mean_sq: f64,
    /// Exact logarithmic energy of the smoothed empirical measure.
    pub smoothed_energy: f64,
}

/// Exact mutual logarithmic energy of two unit-mass circles of radius t at
/// distance d: log d when the circles are separated (d >= 2t), otherwise the
/// exact one-dimensional integral of the circle potential.
fn circle_circle_energy(d: f64, t: f64) -> f64 {
    if d == 0.0 {
        return t.ln();
    }
    if d >= 2.0 * t {
        return d.ln();
    }
    // mean over the circle of log max(|w|, t), |w|^2 = d^2 + t^2 + 2dt cos θ
    let f = |theta: f64| {
        let w2 = d * d + t * t + 2.0 * d * t * theta.cos();
        0.5 * w2.max(t * t).ln()
    };
    // kink where |w| = t: cos θ = -d/(2t), guaranteed in range since d < 2t
    let kink = (-d / (2.0 * t)).acos();
    integrate_with_kinks(&f, 0.0, PI, &[kink], 1e-12).expect("smooth integrand") / PI
}

/// Pairwise, mean-square, and smoothed-measure energies of a configuration.
pub fn smoothed_config_stats(config: &PointConfiguration, t: f64) -> Result<SmoothedStats> {
    let n = config.len();
    if !(t > 0.0) {
        return Err(Error::domain("smoothing radius must be positive"));
    }
    if n < 2 {
        return Err(Error::domain("need at least two points"));
    }
    let pts = &config.points;
    let nf = n as f64;
    let mut pair = 0.0f64;
    let mut smooth = 0.0f64;
    for j in 0..n {
        for k in j + 1..n {
            let d = (pts[j] - pts[k]).norm();
            pair += if d == 0.0 { f64::NEG_INFINITY } else { d.ln() };
            smooth += circle_circle_energy(d, t);
        }
    }
    let pair_energy = 2.0 * pair / (nf * nf);
    let smoothed_energy = (2.0 * smooth + nf * t.ln()) / (nf * nf);
    let mean_sq = pts.iter().map(|z| z.norm_sqr()).sum::<f64>() / nf;
    Ok(SmoothedStats { pair_energy, mean_sq, smoothed_energy })
}
