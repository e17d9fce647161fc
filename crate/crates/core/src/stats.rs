//! Statistical test helpers: two-sample Kolmogorov–Smirnov, chi-square
//! uniformity, annular histograms with jackknife errors.

use crate::special::{chi2_sf, kolmogorov_sf};

/// Two-sample Kolmogorov–Smirnov p-value (asymptotic), sorting both samples
/// in place.
pub fn ks2_pvalue(a: &mut [f64], b: &mut [f64]) -> f64 {
    assert!(!a.is_empty() && !b.is_empty());
    a.sort_by(|x, y| x.partial_cmp(y).unwrap());
    b.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let (n, m) = (a.len(), b.len());
    let mut i = 0;
    let mut j = 0;
    let mut d = 0.0f64;
    while i < n && j < m {
        let x = a[i].min(b[j]);
        while i < n && a[i] <= x {
            i += 1;
        }
        while j < m && b[j] <= x {
            j += 1;
        }
        let diff = (i as f64 / n as f64 - j as f64 / m as f64).abs();
        d = d.max(diff);
    }
    let ne = (n as f64 * m as f64) / (n as f64 + m as f64);
    let lambda = (ne.sqrt() + 0.12 + 0.11 / ne.sqrt()) * d;
    kolmogorov_sf(lambda)
}

/// Chi-square p-value for uniformity of `samples` over [lo, hi] with `bins`
/// equal cells.
pub fn chi2_uniformity_pvalue(samples: &[f64], lo: f64, hi: f64, bins: usize) -> f64 {
    assert!(bins >= 2);
    let n = samples.len();
    let mut counts = vec![0usize; bins];
    for &x in samples {
        let u = ((x - lo) / (hi - lo)).clamp(0.0, 1.0 - 1e-15);
        counts[(u * bins as f64) as usize] += 1;
    }
    let expected = n as f64 / bins as f64;
    let stat: f64 = counts
        .iter()
        .map(|&c| {
            let d = c as f64 - expected;
            d * d / expected
        })
        .sum();
    chi2_sf(stat, bins - 1).unwrap_or(0.0)
}

/// An annular intensity profile: mean point count per unit area in each bin,
/// with jackknife standard errors over configurations.
#[derive(Debug, Clone)]
pub struct RadialProfile {
    pub r_centers: Vec<f64>,
    pub intensity: Vec<f64>,
    pub stderr: Vec<f64>,
}

/// Empirical intensity profile of a family of point configurations: per
/// annular bin, the across-configuration mean of count/area, with jackknife
/// error bars. Input is one vector of radii per configuration.
pub fn radial_profile(samples: &[Vec<f64>], bins: usize, r_max: f64) -> RadialProfile {
    assert!(bins >= 1 && r_max > 0.0);
    let nconf = samples.len();
    let dr = r_max / bins as f64;
    let mut per_config = vec![vec![0.0f64; bins]; nconf];
    for (ci, radii) in samples.iter().enumerate() {
        for &r in radii {
            if r < r_max {
                let b = (r / dr) as usize;
                per_config[ci][b.min(bins - 1)] += 1.0;
            }
        }
        for (b, v) in per_config[ci].iter_mut().enumerate() {
            let area = std::f64::consts::PI * dr * dr * ((2 * b + 1) as f64);
            *v /= area;
        }
    }
    let mut intensity = vec![0.0; bins];
    let mut stderr = vec![0.0; bins];
    for b in 0..bins {
        let vals: Vec<f64> = per_config.iter().map(|c| c[b]).collect();
        let (m, s) = jackknife_mean(&vals);
        intensity[b] = m;
        stderr[b] = s;
    }
    let r_centers = (0..bins).map(|b| (b as f64 + 0.5) * dr).collect();
    RadialProfile { r_centers, intensity, stderr }
}

/// Jackknife mean and standard error of a sample of scalars.
pub fn jackknife_mean(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let total: f64 = values.iter().sum();
    let mean = total / n as f64;
    if n == 1 {
        return (mean, f64::NAN);
    }
    let mut ss = 0.0;
    for &v in values {
        let loo = (total - v) / (n as f64 - 1.0);
        ss += (loo - mean) * (loo - mean);
    }
    let se = ((n as f64 - 1.0) / n as f64 * ss).sqrt();
    (mean, se)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn ks_same_distribution_high_p() {
        let mut rng = crate::rng_stream(42, 0);
        let mut a: Vec<f64> = (0..800).map(|_| rng.gen::<f64>()).collect();
        let mut b: Vec<f64> = (0..900).map(|_| rng.gen::<f64>()).collect();
        let p = ks2_pvalue(&mut a, &mut b);
        assert!(p > 0.01, "p = {p}");
    }

    #[test]
    fn ks_different_distribution_low_p() {
        let mut rng = crate::rng_stream(43, 0);
        let mut a: Vec<f64> = (0..800).map(|_| rng.gen::<f64>()).collect();
        let mut b: Vec<f64> = (0..800).map(|_| rng.gen::<f64>() * 0.8).collect();
        let p = ks2_pvalue(&mut a, &mut b);
        assert!(p < 1e-4, "p = {p}");
    }

    #[test]
    fn chi2_uniform_accepts_and_rejects() {
        let mut rng = crate::rng_stream(44, 0);
        let u: Vec<f64> = (0..5000).map(|_| rng.gen::<f64>()).collect();
        assert!(chi2_uniformity_pvalue(&u, 0.0, 1.0, 10) > 0.01);
        let skew: Vec<f64> = (0..5000).map(|_| rng.gen::<f64>().powi(2)).collect();
        assert!(chi2_uniformity_pvalue(&skew, 0.0, 1.0, 10) < 1e-6);
    }

    #[test]
    fn radial_profile_single_point() {
        let prof = radial_profile(&[vec![0.5]], 4, 2.0);
        // the point lands in bin 1: [0.5, 1.0), area pi (1 - 0.25)
        let area = std::f64::consts::PI * (1.0 - 0.25);
        assert!((prof.intensity[1] - 1.0 / area).abs() < 1e-12);
        assert_eq!(prof.intensity[0], 0.0);
    }

    #[test]
    fn jackknife_matches_classic_se() {
        let vals = [1.0, 2.0, 3.0, 4.0, 5.0];
        let (m, se) = jackknife_mean(&vals);
        assert!((m - 3.0).abs() < 1e-15);
        // classic SE of the mean: sd/sqrt(n) with sd over n-1
        let classic = (2.5f64 / 5.0).sqrt();
        assert!((se - classic).abs() < 1e-12);
    }
}
