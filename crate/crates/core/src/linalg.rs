//! Dense complex eigenvalues (balancing, Hessenberg reduction, shifted QR),
//! symmetric tridiagonal eigenvalues, and companion-matrix polynomial roots.

use crate::{Error, Result};
use num_complex::Complex64;

/// Row-major square complex matrix.
#[derive(Clone)]
pub struct CMat {
    pub n: usize,
    pub a: Vec<Complex64>,
}

impl CMat {
    pub fn zeros(n: usize) -> Self {
        CMat { n, a: vec![Complex64::new(0.0, 0.0); n * n] }
    }
    #[inline]
    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.a[i * self.n + j]
    }
    #[inline]
    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut Complex64 {
        &mut self.a[i * self.n + j]
    }
}

#[inline]
fn abs1(z: Complex64) -> f64 {
    z.re.abs() + z.im.abs()
}

/// Parlett–Reinsch balancing by radix-2 diagonal similarity.
fn balance(m: &mut CMat) {
    let n = m.n;
    let radix: f64 = 2.0;
    let sq = radix * radix;
    loop {
        let mut done = true;
        for i in 0..n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 0..n {
                if j != i {
                    c += abs1(m.at(j, i));
                    r += abs1(m.at(i, j));
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let mut g = r / radix;
            let mut f = 1.0;
            let s = c + r;
            let mut c2 = c;
            while c2 < g {
                f *= radix;
                c2 *= sq;
            }
            g = r * radix;
            while c2 > g {
                f /= radix;
                c2 /= sq;
            }
            if (c2 + r) / f < 0.95 * s {
                done = false;
                let ginv = 1.0 / f;
                for j in 0..n {
                    *m.at_mut(i, j) = m.at(i, j) * ginv;
                }
                for j in 0..n {
                    *m.at_mut(j, i) = m.at(j, i) * f;
                }
            }
        }
        if done {
            break;
        }
    }
}

/// Householder reduction to upper Hessenberg form (in place).
fn hessenberg(m: &mut CMat) {
    let n = m.n;
    if n < 3 {
        return;
    }
    for k in 0..n - 2 {
        // x = A[k+1.., k]
        let mut xnorm = 0.0;
        for i in k + 1..n {
            xnorm += m.at(i, k).norm_sqr();
        }
        xnorm = xnorm.sqrt();
        if xnorm == 0.0 {
            continue;
        }
        let x0 = m.at(k + 1, k);
        let alpha = if x0.norm() == 0.0 {
            Complex64::new(-xnorm, 0.0)
        } else {
            -(x0 / x0.norm()) * xnorm
        };
        // v = x - alpha e1, normalized
        let mut v = vec![Complex64::new(0.0, 0.0); n];
        let mut vnorm = 0.0;
        for i in k + 1..n {
            let vi = if i == k + 1 { m.at(i, k) - alpha } else { m.at(i, k) };
            vnorm += vi.norm_sqr();
            v[i] = vi;
        }
        if vnorm == 0.0 {
            continue;
        }
        let vnorm = vnorm.sqrt();
        for vi in v.iter_mut().skip(k + 1) {
            *vi /= vnorm;
        }
        // A <- (I - 2 v v^H) A : rows k+1..n
        for j in k..n {
            let mut dot = Complex64::new(0.0, 0.0);
            for i in k + 1..n {
                dot += v[i].conj() * m.at(i, j);
            }
            let dot = dot * 2.0;
            for i in k + 1..n {
                let upd = v[i] * dot;
                *m.at_mut(i, j) -= upd;
            }
        }
        // A <- A (I - 2 v v^H) : cols k+1..n
        for i in 0..n {
            let mut dot = Complex64::new(0.0, 0.0);
            for j in k + 1..n {
                dot += m.at(i, j) * v[j];
            }
            let dot = dot * 2.0;
            for j in k + 1..n {
                let upd = dot * v[j].conj();
                *m.at_mut(i, j) -= upd;
            }
        }
        // enforce exact zeros below the subdiagonal in column k
        for i in k + 2..n {
            *m.at_mut(i, k) = Complex64::new(0.0, 0.0);
        }
    }
}

/// Complex Givens rotation [c, s; -conj(s), c] with real c mapping (f, g) to
/// (r, 0).
#[inline]
fn givens(f: Complex64, g: Complex64) -> (f64, Complex64) {
    let fn_ = f.norm();
    let gn = g.norm();
    if gn == 0.0 {
        return (1.0, Complex64::new(0.0, 0.0));
    }
    if fn_ == 0.0 {
        return (0.0, g.conj() / gn);
    }
    let d = (fn_ * fn_ + gn * gn).sqrt();
    let c = fn_ / d;
    let s = f * g.conj() / (d * fn_);
    (c, s)
}

/// Eigenvalues of the two-by-two complex block [[a, b], [c, d]].
fn eig2(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> (Complex64, Complex64) {
    let half = (a + d) * 0.5;
    let disc = ((a - d) * 0.5 * ((a - d) * 0.5) + b * c).sqrt();
    (half + disc, half - disc)
}

/// Eigenvalues of an upper Hessenberg matrix by implicit single-shift QR
/// (bulge chasing) with Wilkinson shifts, a graded-matrix deflation
/// criterion, and the mid-window start-point search for two consecutive
/// small subdiagonals.
fn hessenberg_eigenvalues(h: &mut CMat) -> Result<Vec<Complex64>> {
    let n = h.n;
    let mut eig = vec![Complex64::new(0.0, 0.0); n];
    if n == 0 {
        return Ok(eig);
    }
    let eps = f64::EPSILON;
    let smlnum = f64::MIN_POSITIVE * (n as f64 / eps);
    let dat1 = 0.75;
    let max_its = 60usize;
    // small-subdiagonal criterion with the Ahues–Tisseur refinement, which
    // is what makes strongly graded matrices (companions) deflate
    let negligible = |h: &CMat, l: usize| -> bool {
        let sub = abs1(h.at(l, l - 1));
        if sub <= smlnum {
            return true;
        }
        let mut tst = abs1(h.at(l - 1, l - 1)) + abs1(h.at(l, l));
        if tst == 0.0 {
            if l >= 2 {
                tst += abs1(h.at(l - 1, l - 2));
            }
            if l + 1 < h.n {
                tst += abs1(h.at(l + 1, l));
            }
        }
        if sub <= eps * tst {
            let ab = sub.max(abs1(h.at(l - 1, l)));
            let ba = sub.min(abs1(h.at(l - 1, l)));
            let aa = abs1(h.at(l, l)).max(abs1(h.at(l - 1, l - 1) - h.at(l, l)));
            let bb = abs1(h.at(l, l)).min(abs1(h.at(l - 1, l - 1) - h.at(l, l)));
            let s = aa + ab;
            if ba * (ab / s) <= smlnum.max(eps * (bb * (aa / s))) {
                return true;
            }
        }
        false
    };
    let mut bottom = n - 1;
    let mut its = 0usize;
    loop {
        if bottom == 0 {
            eig[0] = h.at(0, 0);
            break;
        }
        // deflation scan: active block is [l..=bottom]
        let mut l = bottom;
        while l > 0 {
            if negligible(h, l) {
                *h.at_mut(l, l - 1) = Complex64::new(0.0, 0.0);
                break;
            }
            l -= 1;
        }
        if l == bottom {
            eig[bottom] = h.at(bottom, bottom);
            bottom -= 1;
            its = 0;
            continue;
        }
        its += 1;
        if its > max_its {
            return Err(Error::numerical(format!(
                "QR iteration failed to converge after {max_its} sweeps on a block of size {}",
                bottom - l + 1
            )));
        }
        let i = bottom;
        // shift
        let t = if its % 10 == 0 {
            // exceptional shift
            h.at(i, i) + Complex64::new(dat1 * abs1(h.at(i, i - 1)), 0.0)
        } else {
            // Wilkinson shift, scaled against over/underflow
            let mut t = h.at(i, i);
            let u = (h.at(i - 1, i) * h.at(i, i - 1)).sqrt();
            let s = abs1(u);
            if s != 0.0 {
                let x = (h.at(i - 1, i - 1) - t) * 0.5;
                let sx = abs1(x);
                let scale = s.max(sx);
                let mut y = ((x / scale) * (x / scale) + (u / scale) * (u / scale)).sqrt() * scale;
                if sx > 0.0 {
                    let xs = x / sx;
                    if xs.re * y.re + xs.im * y.im < 0.0 {
                        y = -y;
                    }
                }
                t -= u * (u / (x + y));
            }
            t
        };
        // start-point search: largest m in [l+1, i-1] where two consecutive
        // subdiagonals are small enough to start the chase mid-window
        let mut m = l;
        let mut v0 = h.at(l, l) - t;
        let mut v1 = h.at(l + 1, l);
        for mm in (l + 1..i).rev() {
            let h11 = h.at(mm, mm);
            let h22 = h.at(mm + 1, mm + 1);
            let h11s = h11 - t;
            let h21 = h.at(mm + 1, mm);
            let sc = abs1(h11s) + abs1(h21);
            let h11s_n = h11s / sc;
            let h21_n = h21 / sc;
            let h10 = h.at(mm, mm - 1);
            if abs1(h10) * abs1(h21_n) <= eps * (abs1(h11s_n) * (abs1(h11) + abs1(h22))) {
                m = mm;
                v0 = h11s_n;
                v1 = h21_n;
                break;
            }
        }
        // implicit single-shift bulge chase on [m..=i]
        for k in m..i {
            let (f, g) = if k == m { (v0, v1) } else { (h.at(k, k - 1), h.at(k + 1, k - 1)) };
            let (c, s) = givens(f, g);
            if k > m {
                let t1 = h.at(k, k - 1);
                let t2 = h.at(k + 1, k - 1);
                *h.at_mut(k, k - 1) = t1 * c + s * t2;
                *h.at_mut(k + 1, k - 1) = Complex64::new(0.0, 0.0);
            } else if m > l {
                // starting mid-window: the bulge this would create below
                // H(m, m-1) is negligible by the start criterion and dropped
                let t1 = h.at(k, k - 1);
                *h.at_mut(k, k - 1) = t1 * c;
            }
            for j in k..=i {
                let t1 = h.at(k, j);
                let t2 = h.at(k + 1, j);
                *h.at_mut(k, j) = t1 * c + s * t2;
                *h.at_mut(k + 1, j) = -s.conj() * t1 + t2 * c;
            }
            let top = (k + 2).min(i);
            for row in l..=top {
                let t1 = h.at(row, k);
                let t2 = h.at(row, k + 1);
                *h.at_mut(row, k) = t1 * c + t2 * s.conj();
                *h.at_mut(row, k + 1) = -t1 * s + t2 * c;
            }
        }
    }
    Ok(eig)
}

/// Eigenvalues of a general complex matrix via balancing, Hessenberg
/// reduction and a shifted-QR iteration.
pub fn complex_eigenvalues(m: &CMat) -> Result<Vec<Complex64>> {
    let n = m.n;
    if n == 0 {
        return Ok(vec![]);
    }
    if n == 1 {
        return Ok(vec![m.at(0, 0)]);
    }
    if n == 2 {
        let (e1, e2) = eig2(m.at(0, 0), m.at(0, 1), m.at(1, 0), m.at(1, 1));
        return Ok(vec![e1, e2]);
    }
    let mut h = m.clone();
    balance(&mut h);
    hessenberg(&mut h);
    hessenberg_eigenvalues(&mut h)
}

/// Eigenvalues of a real symmetric tridiagonal matrix (implicit QL with
/// Wilkinson shifts; eigenvalues only).
pub fn symtridiag_eigenvalues(diag: &[f64], off: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    if n == 0 {
        return Ok(vec![]);
    }
    assert_eq!(off.len(), n - 1, "off-diagonal length must be n-1");
    let mut d = diag.to_vec();
    let mut e = vec![0.0; n];
    e[..n - 1].copy_from_slice(off);
    for l in 0..n {
        let mut iter = 0;
        loop {
            // find the first negligible coupling at or after l
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::numerical("tridiagonal QL failed to converge"));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut early = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    early = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if early {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(d)
}

/// Roots of the polynomial Σ coeffs[k] z^k (coefficients from constant to
/// leading) via the balanced companion matrix, with one Newton polish per
/// root. Leading zero coefficients are trimmed; zero constant terms yield
/// roots at the origin.
pub fn polynomial_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let mut hi = coeffs.len();
    while hi > 0 && coeffs[hi - 1].norm() == 0.0 {
        hi -= 1;
    }
    if hi <= 1 {
        return Err(Error::domain("polynomial has no roots (degree < 1)"));
    }
    let mut lo = 0;
    while coeffs[lo].norm() == 0.0 {
        lo += 1;
    }
    let c = &coeffs[lo..hi];
    let deg = c.len() - 1;
    let mut roots = vec![Complex64::new(0.0, 0.0); lo];
    if deg == 0 {
        return Ok(roots);
    }
    let lead = c[deg];
    let mut comp = CMat::zeros(deg);
    for i in 1..deg {
        *comp.at_mut(i, i - 1) = Complex64::new(1.0, 0.0);
    }
    for i in 0..deg {
        *comp.at_mut(i, deg - 1) = -c[i] / lead;
    }
    let mut eig = complex_eigenvalues(&comp)?;
    // one Newton step per root
    for z in eig.iter_mut() {
        let (p, dp) = horner_with_derivative(c, *z);
        if dp.norm() > 0.0 {
            let step = p / dp;
            if step.norm().is_finite() {
                let cand = *z - step;
                let (pc, _) = horner_with_derivative(c, cand);
                if pc.norm() <= p.norm() {
                    *z = cand;
                }
            }
        }
    }
    roots.append(&mut eig);
    Ok(roots)
}

/// Evaluate the polynomial and its derivative at z by Horner's scheme.
pub fn horner_with_derivative(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// Relative residual |P(z)| / Σ |c_k||z|^k, a scale-free root quality
/// measure.
pub fn relative_residual(coeffs: &[Complex64], z: Complex64) -> f64 {
    let mut p = Complex64::new(0.0, 0.0);
    let mut s = 0.0;
    let az = z.norm();
    for &c in coeffs.iter().rev() {
        p = p * z + c;
        s = s * az + c.norm();
    }
    if s == 0.0 {
        0.0
    } else {
        p.norm() / s
    }
}
