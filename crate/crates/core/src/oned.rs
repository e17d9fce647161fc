//! One-dimensional companions: the semicircle law, the symmetric
//! gap-conditional spectral density, and the log-gas rate functional with
//! its equilibrium characterization check.

use crate::quad::adaptive_simpson;
#[cfg(test)]
use crate::quad::integrate_with_kinks;
use crate::{Error, Result};
use std::f64::consts::PI;
use std::sync::Arc;

/// Semicircle density f(x) = (1/π) sqrt(2 − x²) on [−√2, √2].
pub fn semicircle_density(x: f64) -> f64 {
    let s = 2.0 - x * x;
    if s <= 0.0 {
        0.0
    } else {
        s.sqrt() / PI
    }
}

/// Gap-conditional spectral density for the symmetric gap (−w, w):
/// f_w(x) = (1/π) |x| sqrt((L² − x²)/(x² − w²)) on [−L, −w] ∪ [w, L],
/// with L = sqrt(w² + 2). Coincides with the semicircle at w = 0.
pub fn gap_density(w: f64, x: f64) -> f64 {
    assert!(w >= 0.0, "gap half-width must be nonnegative");
    let l2 = w * w + 2.0;
    let x2 = x * x;
    if x2 <= w * w || x2 >= l2 {
        return 0.0;
    }
    x.abs() * ((l2 - x2) / (x2 - w * w)).sqrt() / PI
}

/// ∫ f_w over [a, b] ∩ support, via the substitution x² = w² + u² that
/// removes the inverse-square-root edge singularity (plain quadrature near
/// |x| = w is forbidden). Handles each sign half separately.
pub fn gap_density_integral(w: f64, a: f64, b: f64) -> Result<f64> {
    if !(w >= 0.0) || !(b >= a) {
        return Err(Error::domain("need w >= 0 and b >= a"));
    }
    let l = (w * w + 2.0).sqrt();
    // one-sided mass over [lo, hi] ⊂ [w, L]
    let one_side = |lo: f64, hi: f64| -> Result<f64> {
        let lo = lo.max(w);
        let hi = hi.min(l);
        if hi <= lo {
            return Ok(0.0);
        }
        // x = sqrt(w² + u²), dx = u du / x, f_w dx = (1/π) sqrt(L² − x²) du
        let u_lo = (lo * lo - w * w).max(0.0).sqrt();
        let u_hi = (hi * hi - w * w).max(0.0).sqrt();
        let f = |u: f64| {
            let x2 = w * w + u * u;
            ((l * l - x2).max(0.0)).sqrt() / PI
        };
        adaptive_simpson(&f, u_lo, u_hi, 1e-11, 52)
    };
    let mut total = 0.0;
    // positive side
    total += one_side(a.max(0.0), b)?;
    // negative side mapped to positive coordinates
    total += one_side((-b).max(0.0), -a)?;
    Ok(total)
}

/// Total mass of the gap density (equals one for every w).
pub fn gap_density_mass(w: f64) -> Result<f64> {
    let l = (w * w + 2.0).sqrt();
    gap_density_integral(w, -l, l)
}

/// A one-dimensional density: either midpoint samples on a uniform grid or
/// a closed form on an interval.
#[derive(Clone)]
pub enum Density1D {
    /// values[i] is the density at x0 + (i + 1/2) dx.
    Grid { x0: f64, dx: f64, values: Vec<f64> },
    Closed { a: f64, b: f64, f: Arc<dyn Fn(f64) -> f64 + Send + Sync> },
}

impl Density1D {
    pub fn grid(x0: f64, dx: f64, values: Vec<f64>) -> Result<Self> {
        if !(dx > 0.0) || values.is_empty() {
            return Err(Error::domain("grid density needs dx > 0 and at least one cell"));
        }
        if values.iter().any(|v| *v < 0.0 || !v.is_finite()) {
            return Err(Error::domain("density values must be finite and nonnegative"));
        }
        Ok(Density1D::Grid { x0, dx, values })
    }

    pub fn closed(
        a: f64,
        b: f64,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        if !(b > a) {
            return Err(Error::domain("need b > a"));
        }
        Ok(Density1D::Closed { a, b, f: Arc::new(f) })
    }

    pub fn support(&self) -> (f64, f64) {
        match self {
            Density1D::Grid { x0, dx, values } => (*x0, x0 + dx * values.len() as f64),
            Density1D::Closed { a, b, .. } => (*a, *b),
        }
    }

    pub fn mass(&self) -> Result<f64> {
        match self {
            Density1D::Grid { dx, values, .. } => Ok(values.iter().sum::<f64>() * dx),
            Density1D::Closed { a, b, f } => {
                let f = f.clone();
                adaptive_simpson(&move |x| f(x), *a, *b, 1e-11, 52)
            }
        }
    }

    /// ∫ V dμ.
    pub fn integrate(&self, v: &dyn Fn(f64) -> f64) -> Result<f64> {
        match self {
            Density1D::Grid { x0, dx, values } => Ok(values
                .iter()
                .enumerate()
                .map(|(i, f)| f * v(x0 + (i as f64 + 0.5) * dx) * dx)
                .sum()),
            Density1D::Closed { a, b, f } => {
                let f = f.clone();
                adaptive_simpson(&move |x| f(x) * v(x), *a, *b, 1e-11, 52)
            }
        }
    }

    /// Logarithmic potential U(x) = ∫ log|x − y| dμ(y).
    ///
    /// Grid densities use the midpoint sum with the singular cell integrated
    /// exactly; closed forms use adaptive quadrature with an analytic patch
    /// of half-width δ around the singularity.
    pub fn log_potential(&self, x: f64) -> Result<f64> {
        match self {
            Density1D::Grid { x0, dx, values } => {
                let mut u = 0.0;
                for (i, f) in values.iter().enumerate() {
                    let c = x0 + (i as f64 + 0.5) * dx;
                    let lo = c - 0.5 * dx;
                    let hi = c + 0.5 * dx;
                    if x > lo && x < hi {
                        // exact ∫_{lo}^{hi} log|x-y| dy
                        let a = x - lo;
                        let b = hi - x;
                        let part = |t: f64| if t > 0.0 { t * (t.ln() - 1.0) } else { 0.0 };
                        u += f * (part(a) + part(b));
                    } else {
                        u += f * dx * (x - c).abs().ln();
                    }
                }
                Ok(u)
            }
            Density1D::Closed { a, b, f } => {
                let delta = 1e-4 * (b - a);
                let mut u = 0.0;
                let smooth = |lo: f64, hi: f64| -> Result<f64> {
                    if hi <= lo {
                        return Ok(0.0);
                    }
                    let f = f.clone();
                    adaptive_simpson(&move |y: f64| f(y) * (x - y).abs().ln(), lo, hi, 1e-10, 54)
                };
                if x <= *a || x >= *b {
                    return smooth(*a, *b);
                }
                let lo = (x - delta).max(*a);
                let hi = (x + delta).min(*b);
                u += smooth(*a, lo)?;
                u += smooth(hi, *b)?;
                // analytic patch: ∫_{-d}^{d} log|u| f(x+u) du
                //   ≈ f(x) 2d (log d − 1) + f''(x) (d³/3)(log d − 1/3)
                let d = delta;
                let fx = f(x);
                let fpp = (f((x + d).min(*b)) + f((x - d).max(*a)) - 2.0 * fx) / (d * d);
                u += fx * 2.0 * d * (d.ln() - 1.0) + fpp * (d.powi(3) / 3.0) * (d.ln() - 1.0 / 3.0);
                Ok(u)
            }
        }
    }

    /// Logarithmic energy Σ(μ) for grid densities: midpoint double sum with
    /// the diagonal cells integrated exactly.
    pub fn log_energy_grid(&self) -> Result<f64> {
        match self {
            Density1D::Grid { x0, dx, values } => {
                let n = values.len();
                let mut total = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        let w = values[i] * values[j] * dx * dx;
                        if i == j {
                            // ∫∫_{cell²} log|x−y| = h² (log h − 3/2)
                            total += values[i] * values[i] * dx * dx * (dx.ln() - 1.5);
                        } else {
                            let xi = x0 + (i as f64 + 0.5) * dx;
                            let xj = x0 + (j as f64 + 0.5) * dx;
                            total += w * (xi - xj).abs().ln();
                        }
                    }
                }
                Ok(total)
            }
            Density1D::Closed { .. } => Err(Error::domain(
                "log_energy_grid is defined for grid densities; use log_potential for closed forms",
            )),
        }
    }
}

/// The un-normalized log-gas rate bracket ∫V dμ − (β/2) Σ(μ) for a grid
/// density; the reference constant is the bracket's value at a caller-
/// supplied minimizer.
pub fn onedim_rate_functional(
    mu: &Density1D,
    v: &dyn Fn(f64) -> f64,
    beta: f64,
) -> Result<f64> {
    if !(beta > 0.0) {
        return Err(Error::domain("beta must be positive"));
    }
    let mass = mu.mass()?;
    if (mass - 1.0).abs() > 1e-6 {
        return Err(Error::domain(format!("density must integrate to one, got {mass}")));
    }
    let pot = mu.integrate(v)?;
    let energy = mu.log_energy_grid()?;
    Ok(pot - 0.5 * beta * energy)
}

/// Outcome of the equilibrium characterization check: on the support of the
/// minimizer, V − β U must be constant; off the support it must exceed that
/// constant.
#[derive(Debug, Clone)]
pub struct CharacterizationReport {
    /// Maximum deviation of V − β U from its mean over the (slightly
    /// shrunk) support grid.
    pub max_deviation: f64,
    /// The empirical constant (grid mean of V − β U).
    pub empirical_constant: f64,
    /// Whether V − β U exceeded the constant at all exterior probes.
    pub exterior_strict: bool,
}

/// Check the equilibrium characterization V(x) − β U_σ(x) = C on the
/// support (grid shrunk 2% at each edge), strict excess at 10 exterior
/// probe points.
pub fn equilibrium_characterization_check(
    sigma: &Density1D,
    v: &dyn Fn(f64) -> f64,
    beta: f64,
) -> Result<CharacterizationReport> {
    let (a, b) = sigma.support();
    let width = b - a;
    let lo = a + 0.02 * width;
    let hi = b - 0.02 * width;
    let n = 60;
    let mut vals = Vec::with_capacity(n);
    for i in 0..n {
        let x = lo + (hi - lo) * i as f64 / (n - 1) as f64;
        vals.push(v(x) - beta * sigma.log_potential(x)?);
    }
    let mean = vals.iter().sum::<f64>() / n as f64;
    let max_deviation = vals.iter().map(|t| (t - mean).abs()).fold(0.0, f64::max);
    let mut exterior_strict = true;
    for i in 0..10 {
        let off = 0.1 + 0.15 * i as f64;
        let x = if i % 2 == 0 { b + off * width } else { a - off * width };
        let t = v(x) - beta * sigma.log_potential(x)?;
        if t <= mean {
            exterior_strict = false;
        }
    }
    Ok(CharacterizationReport { max_deviation, empirical_constant: mean, exterior_strict })
}

/// Convenience: the closed-form semicircle as a Density1D.
pub fn semicircle() -> Density1D {
    let s = 2.0f64.sqrt();
    Density1D::Closed { a: -s, b: s, f: Arc::new(semicircle_density) }
}
