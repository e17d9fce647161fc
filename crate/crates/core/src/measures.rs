//! Radial-measure algebra: logarithmic potentials and energies, the
//! large-deviation functionals for planar ensembles, closed-form constrained
//! minimizers, and the count-fluctuation rate formulas.
//!
//! Every measure that appears in this crate is rotation invariant and is a
//! finite combination of uniform annular pieces and circle atoms, which makes
//! potentials exactly computable by radial closed forms.

use crate::quad::{golden_max, integrate_with_kinks};
use crate::{Error, Result};
use once_cell::sync::Lazy;
use std::collections::HashMap;
use std::f64::consts::{E, PI};
use std::sync::Mutex;

/// One rotation-invariant building block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Component {
    /// Uniform areal density on the annulus r_lo <= |z| <= r_hi
    /// (r_hi = +inf is allowed; such measures have infinite total mass).
    AnnulusUniform { r_lo: f64, r_hi: f64, areal_density: f64 },
    /// Uniform measure of the given total mass on the circle |z| = radius.
    CircleAtom { radius: f64, mass: f64 },
}

impl Component {
    fn mass(&self) -> f64 {
        match *self {
            Component::AnnulusUniform { r_lo, r_hi, areal_density } => {
                if r_hi.is_infinite() {
                    if areal_density == 0.0 {
                        0.0
                    } else {
                        f64::INFINITY
                    }
                } else {
                    PI * (r_hi * r_hi - r_lo * r_lo) * areal_density
                }
            }
            Component::CircleAtom { mass, .. } => mass,
        }
    }

    fn inner_radius(&self) -> f64 {
        match *self {
            Component::AnnulusUniform { r_lo, .. } => r_lo,
            Component::CircleAtom { radius, .. } => radius,
        }
    }
}

/// A rotation-invariant measure on the plane: a sorted, non-overlapping list
/// of annular uniform pieces and circle atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialMeasure {
    components: Vec<Component>,
}

impl RadialMeasure {
    /// Build a measure, validating, merging overlapping annuli (densities
    /// add on overlaps) and coalescing atoms at equal radii.
    pub fn new(components: Vec<Component>) -> Result<Self> {
        let mut edges: Vec<f64> = Vec::new();
        let mut atoms: HashMap<u64, (f64, f64)> = HashMap::new();
        let mut annuli: Vec<(f64, f64, f64)> = Vec::new();
        for comp in &components {
            match *comp {
                Component::AnnulusUniform { r_lo, r_hi, areal_density } => {
                    if !(r_lo >= 0.0) || !(r_hi > r_lo) {
                        return Err(Error::domain(format!(
                            "annulus requires 0 <= r_lo < r_hi, got [{r_lo}, {r_hi}]"
                        )));
                    }
                    if !(areal_density >= 0.0) {
                        return Err(Error::domain("annulus density must be nonnegative"));
                    }
                    if areal_density > 0.0 {
                        annuli.push((r_lo, r_hi, areal_density));
                        edges.push(r_lo);
                        edges.push(r_hi);
                    }
                }
                Component::CircleAtom { radius, mass } => {
                    if !(radius >= 0.0) || !(mass >= 0.0) || !radius.is_finite() {
                        return Err(Error::domain("atom requires radius >= 0 and mass >= 0"));
                    }
                    if mass > 0.0 {
                        let entry = atoms.entry(radius.to_bits()).or_insert((radius, 0.0));
                        entry.1 += mass;
                    }
                }
            }
        }
        edges.sort_by(|a, b| a.partial_cmp(b).unwrap());
        edges.dedup();
        // resolve overlaps on the elementary intervals between edges
        let mut merged: Vec<Component> = Vec::new();
        for w in edges.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            let dens: f64 = annuli
                .iter()
                .filter(|&&(a, b, _)| a <= lo && hi <= b)
                .map(|&(_, _, d)| d)
                .sum();
            if dens > 0.0 {
                match merged.last_mut() {
                    Some(Component::AnnulusUniform { r_hi, areal_density, .. })
                        if *r_hi == lo && (*areal_density - dens).abs() <= 1e-14 * dens =>
                    {
                        *r_hi = hi;
                    }
                    _ => merged.push(Component::AnnulusUniform {
                        r_lo: lo,
                        r_hi: hi,
                        areal_density: dens,
                    }),
                }
            }
        }
        for (_, (radius, mass)) in atoms {
            merged.push(Component::CircleAtom { radius, mass });
        }
        merged.sort_by(|a, b| a.inner_radius().partial_cmp(&b.inner_radius()).unwrap());
        Ok(RadialMeasure { components: merged })
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    /// Single uniform annulus.
    pub fn annulus(r_lo: f64, r_hi: f64, areal_density: f64) -> Result<Self> {
        Self::new(vec![Component::AnnulusUniform { r_lo, r_hi, areal_density }])
    }

    /// Circle atom of the given mass.
    pub fn circle_atom(radius: f64, mass: f64) -> Result<Self> {
        Self::new(vec![Component::CircleAtom { radius, mass }])
    }

    /// Uniform probability measure on the unit circle.
    pub fn unit_circle() -> Self {
        Self::circle_atom(1.0, 1.0).expect("valid")
    }

    /// Uniform probability measure on the disk of the given radius.
    pub fn uniform_disk(radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::domain("disk radius must be positive"));
        }
        Self::annulus(0.0, radius, 1.0 / (PI * radius * radius))
    }

    pub fn total_mass(&self) -> f64 {
        self.components.iter().map(|c| c.mass()).sum()
    }

    pub fn is_probability(&self) -> bool {
        (self.total_mass() - 1.0).abs() <= 1e-12
    }

    /// Largest radius carrying mass, or None for unbounded support.
    pub fn support_radius(&self) -> Option<f64> {
        let mut r = 0.0f64;
        for c in &self.components {
            match *c {
                Component::AnnulusUniform { r_hi, .. } => {
                    if r_hi.is_infinite() {
                        return None;
                    }
                    r = r.max(r_hi);
                }
                Component::CircleAtom { radius, .. } => r = r.max(radius),
            }
        }
        Some(r)
    }

    /// Restriction to the closed disk of radius `r_max`.
    pub fn restricted(&self, r_max: f64) -> Result<Self> {
        let mut comps = Vec::new();
        for c in &self.components {
            match *c {
                Component::AnnulusUniform { r_lo, r_hi, areal_density } => {
                    if r_lo < r_max {
                        comps.push(Component::AnnulusUniform {
                            r_lo,
                            r_hi: r_hi.min(r_max),
                            areal_density,
                        });
                    }
                }
                Component::CircleAtom { radius, mass } => {
                    if radius <= r_max {
                        comps.push(Component::CircleAtom { radius, mass });
                    }
                }
            }
        }
        Self::new(comps)
    }

    /// Same measure scaled to total mass one.
    pub fn normalized(&self) -> Result<Self> {
        let m = self.total_mass();
        if !m.is_finite() || m <= 0.0 {
            return Err(Error::domain("cannot normalize a zero or infinite-mass measure"));
        }
        let comps = self
            .components
            .iter()
            .map(|c| match *c {
                Component::AnnulusUniform { r_lo, r_hi, areal_density } => Component::AnnulusUniform {
                    r_lo,
                    r_hi,
                    areal_density: areal_density / m,
                },
                Component::CircleAtom { radius, mass } => {
                    Component::CircleAtom { radius, mass: mass / m }
                }
            })
            .collect();
        Self::new(comps)
    }

    /// Radii at which the potential's radial profile has a kink.
    pub fn kink_radii(&self) -> Vec<f64> {
        let mut ks = Vec::new();
        for c in &self.components {
            match *c {
                Component::AnnulusUniform { r_lo, r_hi, .. } => {
                    ks.push(r_lo);
                    if r_hi.is_finite() {
                        ks.push(r_hi);
                    }
                }
                Component::CircleAtom { radius, .. } => ks.push(radius),
            }
        }
        ks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ks.dedup();
        ks
    }

    fn require_bounded(&self) -> Result<f64> {
        self.support_radius()
            .ok_or_else(|| Error::domain("operation requires a measure of bounded support"))
    }

    /// Logarithmic potential U_mu at any point of modulus `r` (well defined
    /// by rotation invariance). Exact closed form per component.
    pub fn log_potential(&self, r: f64) -> Result<f64> {
        if !(r >= 0.0) {
            return Err(Error::domain("radius must be nonnegative"));
        }
        self.require_bounded()?;
        let mut u = 0.0;
        for c in &self.components {
            u += match *c {
                Component::CircleAtom { radius, mass } => {
                    let s = r.max(radius);
                    if s == 0.0 {
                        return Err(Error::Divergent(
                            "potential of an atom at radius 0 diverges at the origin".into(),
                        ));
                    }
                    mass * s.ln()
                }
                Component::AnnulusUniform { r_lo, r_hi, areal_density } => {
                    annulus_potential(r_lo, r_hi, areal_density, r)
                }
            };
        }
        Ok(u)
    }

    /// Exact ∫ |z|^2 dμ.
    pub fn mean_square(&self) -> Result<f64> {
        self.require_bounded()?;
        Ok(self
            .components
            .iter()
            .map(|c| match *c {
                Component::AnnulusUniform { r_lo, r_hi, areal_density } => {
                    areal_density * PI * (r_hi.powi(4) - r_lo.powi(4)) / 2.0
                }
                Component::CircleAtom { radius, mass } => mass * radius * radius,
            })
            .sum())
    }

    /// Logarithmic energy Σ(μ) = ∬ log|z-w| dμ dμ, via pairwise component
    /// closed forms; annulus–annulus interactions by adaptive radial
    /// quadrature of the exact potential (absolute tolerance 1e-10).
    pub fn log_energy(&self) -> Result<f64> {
        self.require_bounded()?;
        let n = self.components.len();
        let mut total = 0.0;
        for i in 0..n {
            for j in i..n {
                let e = component_pair_energy(&self.components[i], &self.components[j])?;
                total += if i == j { e } else { 2.0 * e };
            }
        }
        Ok(total)
    }

    /// Cross energy ∬ log|z-w| dμ(z) dν(w) between two measures.
    pub fn cross_energy(&self, other: &RadialMeasure) -> Result<f64> {
        self.require_bounded()?;
        other.require_bounded()?;
        let mut total = 0.0;
        for a in &self.components {
            for b in &other.components {
                total += component_pair_energy(a, b)?;
            }
        }
        Ok(total)
    }
}

/// Potential at radius r of a uniform annulus [a, b] with areal density rho:
/// mass(inside) * log r plus the exact log-profile of the part outside r.
fn annulus_potential(a: f64, b: f64, rho: f64, r: f64) -> f64 {
    // F(s) = ∫ s log s ds = s^2/2 log s - s^2/4
    fn f(s: f64) -> f64 {
        if s == 0.0 {
            0.0
        } else {
            s * s * (0.5 * s.ln() - 0.25)
        }
    }
    if r >= b {
        rho * PI * (b * b - a * a) * r.ln()
    } else if r <= a {
        rho * 2.0 * PI * (f(b) - f(a))
    } else {
        rho * PI * (r * r - a * a) * r.ln() + rho * 2.0 * PI * (f(b) - f(r))
    }
}

fn component_pair_energy(x: &Component, y: &Component) -> Result<f64> {
    use Component::*;
    match (*x, *y) {
        (CircleAtom { radius: s1, mass: m1 }, CircleAtom { radius: s2, mass: m2 }) => {
            let s = s1.max(s2);
            if s == 0.0 {
                return Err(Error::Divergent("energy of an atom at radius 0 is -infinity".into()));
            }
            Ok(m1 * m2 * s.ln())
        }
        (CircleAtom { radius, mass }, AnnulusUniform { r_lo, r_hi, areal_density })
        | (AnnulusUniform { r_lo, r_hi, areal_density }, CircleAtom { radius, mass }) => {
            Ok(mass * annulus_potential(r_lo, r_hi, areal_density, radius))
        }
        (
            AnnulusUniform { r_lo: a1, r_hi: b1, areal_density: d1 },
            AnnulusUniform { r_lo: a2, r_hi: b2, areal_density: d2 },
        ) => {
            let integrand =
                move |r: f64| annulus_potential(a1, b1, d1, r) * d2 * 2.0 * PI * r;
            integrate_with_kinks(&integrand, a2, b2, &[a1, b1], 1e-10)
        }
    }
}

/// Scaling parameter and inverse temperature for the planar functionals.
#[derive(Debug, Clone, Copy)]
pub struct FunctionalParams {
    pub alpha: f64,
    pub beta: f64,
}

impl FunctionalParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha >= 1.0) {
            return Err(Error::domain(format!("alpha must be >= 1, got {alpha}")));
        }
        if !(beta > 0.0) {
            return Err(Error::domain(format!("beta must be > 0, got {beta}")));
        }
        Ok(FunctionalParams { alpha, beta })
    }
}

/// I_α(μ) = ∫ |z|²/α dμ − Σ(μ), for probability measures μ.
pub fn coulomb_functional(mu: &RadialMeasure, params: &FunctionalParams) -> Result<f64> {
    if !mu.is_probability() {
        return Err(Error::domain(format!(
            "coulomb_functional requires a probability measure, total mass {}",
            mu.total_mass()
        )));
    }
    Ok(mu.mean_square()? / params.alpha - mu.log_energy()?)
}

/// The uniform probability measure on the disk of radius sqrt(alpha) — the
/// unconstrained minimizer of I_α.
pub fn equilibrium_measure(alpha: f64) -> Result<RadialMeasure> {
    if !(alpha >= 1.0) {
        return Err(Error::domain(format!("alpha must be >= 1, got {alpha}")));
    }
    RadialMeasure::annulus(0.0, alpha.sqrt(), 1.0 / (PI * alpha))
}

/// Closed-form excess energy I_α(constrained minimizer) − I_α(equilibrium)
/// for the deficiency/overcrowding constraint at level p:
/// (1/(4α²)) |2p² log p − (p−1)(3p−1)|, with p² log p := 0 at p = 0.
pub fn excess_energy_closed_form(p: f64, alpha: f64) -> Result<f64> {
    if !(p >= 0.0) || !(alpha >= 1.0) || p > alpha {
        return Err(Error::domain(format!(
            "excess_energy_closed_form requires 0 <= p <= alpha, alpha >= 1; got p={p}, alpha={alpha}"
        )));
    }
    let plogp = if p == 0.0 { 0.0 } else { 2.0 * p * p * p.ln() };
    Ok((plogp - (p - 1.0) * (3.0 * p - 1.0)).abs() / (4.0 * alpha * alpha))
}

/// The minimizer of I_α over probability measures with μ(D) <= p/α
/// (deficiency of level p < 1 in the unit disk): inner disk of radius
/// sqrt(p), the annulus [1, sqrt(alpha)], both at density 1/(πα), plus a
/// circle atom of mass (1−p)/α at radius 1.
pub fn constrained_minimizer_ginibre(p: f64, alpha: f64) -> Result<RadialMeasure> {
    if !(0.0..1.0).contains(&p) {
        return Err(Error::domain(format!(
            "constrained_minimizer_ginibre requires 0 <= p < 1 (overcrowding is handled by limiting_measure_ginibre_infinite), got p={p}"
        )));
    }
    if !(alpha >= 1.0) {
        return Err(Error::domain(format!("alpha must be >= 1, got {alpha}")));
    }
    let d = 1.0 / (PI * alpha);
    let mut comps = Vec::new();
    if p > 0.0 {
        comps.push(Component::AnnulusUniform { r_lo: 0.0, r_hi: p.sqrt(), areal_density: d });
    }
    if alpha > 1.0 {
        comps.push(Component::AnnulusUniform { r_lo: 1.0, r_hi: alpha.sqrt(), areal_density: d });
    }
    comps.push(Component::CircleAtom { radius: 1.0, mass: (1.0 - p) / alpha });
    RadialMeasure::new(comps)
}

/// Minimizer of I_α under the count constraint at level p (both branches,
/// p != 1, p <= alpha): the restriction of the infinite-ensemble limiting
/// measure to the disk of radius sqrt(alpha), normalized to a probability
/// measure. For p < 1 this coincides with `constrained_minimizer_ginibre`.
pub fn count_constrained_minimizer(p: f64, alpha: f64) -> Result<RadialMeasure> {
    if !(alpha >= 1.0) || !(p >= 0.0) || p > alpha {
        return Err(Error::domain(format!(
            "count_constrained_minimizer requires 0 <= p <= alpha, got p={p}, alpha={alpha}"
        )));
    }
    limiting_measure_ginibre_infinite(p)?
        .restricted(alpha.sqrt())?
        .normalized()
}

/// Variational certificate for constrained minimizers: returns true iff
/// ∫|z|²/(2α) dμ₀ − Σ(μ₀) <= ∫|z|²/(2α) dμ − ∫ U_{μ₀} dμ, within a
/// quadrature tolerance of 1e-9. A candidate μ₀ is the minimizer of I_α over
/// a closed convex class iff this holds for every μ in the class.
pub fn variational_certificate(
    mu0: &RadialMeasure,
    mu: &RadialMeasure,
    params: &FunctionalParams,
) -> Result<bool> {
    if !mu0.is_probability() || !mu.is_probability() {
        return Err(Error::domain("variational_certificate requires probability measures"));
    }
    let energy0 = mu0.log_energy()?;
    if !energy0.is_finite() {
        return Err(Error::Divergent("candidate minimizer must have finite energy".into()));
    }
    let a2 = 2.0 * params.alpha;
    let lhs = mu0.mean_square()? / a2 - energy0;
    let rhs = mu.mean_square()? / a2 - mu0.cross_energy(mu)?;
    Ok(lhs <= rhs + 1e-9)
}

/// The non-trivial companion solution q of p(log p − 1) = q(log q − 1):
/// q in (1, e] for p in [0, 1), q in (0, 1) for p in (1, e); q(0) = e.
pub fn q_of_p(p: f64) -> Result<f64> {
    if !(0.0..E).contains(&p) {
        return Err(Error::domain(format!("q_of_p requires 0 <= p < e, got {p}")));
    }
    if p == 1.0 {
        return Err(Error::domain("q_of_p undefined at p = 1 (no non-trivial solution)"));
    }
    if p == 0.0 {
        return Ok(E);
    }
    let target = p * (p.ln() - 1.0);
    let h = |q: f64| q * (q.ln() - 1.0) - target;
    let (mut lo, mut hi) = if p < 1.0 { (1.0, E) } else { (1e-18, 1.0) };
    // bisection; h(lo) and h(hi) straddle the root in both branches
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let val = h(mid);
        if val.abs() <= 1e-15 {
            return Ok(mid);
        }
        // h is increasing on (1, e) and decreasing on (0, 1)
        let increasing = p < 1.0;
        if (val > 0.0) == increasing {
            hi = mid;
        } else {
            lo = mid;
        }
        if (hi - lo).abs() < 1e-16 * hi.max(1.0) {
            break;
        }
    }
    let q = 0.5 * (lo + hi);
    if h(q).abs() > 1e-12 {
        return Err(Error::numerical(format!("bisection residual too large for p={p}")));
    }
    Ok(q)
}

/// Limiting conditional zero-counting measure μ^Z_p of the planar Gaussian
/// Taylor series under the count condition at level p; a Radon measure, not
/// a probability measure (unbounded support at density 1/π).
pub fn limiting_measure_gef(p: f64) -> Result<RadialMeasure> {
    if !(p >= 0.0) {
        return Err(Error::domain("p must be nonnegative"));
    }
    if p == 1.0 {
        return Err(Error::domain("limiting_measure_gef undefined at p = 1"));
    }
    let d = 1.0 / PI;
    let mut comps = Vec::new();
    if p < 1.0 {
        let q = q_of_p(p)?;
        if p > 0.0 {
            comps.push(Component::AnnulusUniform { r_lo: 0.0, r_hi: p.sqrt(), areal_density: d });
        }
        comps.push(Component::AnnulusUniform {
            r_lo: q.sqrt(),
            r_hi: f64::INFINITY,
            areal_density: d,
        });
        comps.push(Component::CircleAtom { radius: 1.0, mass: q - p });
    } else if p < E {
        let q = q_of_p(p)?;
        comps.push(Component::AnnulusUniform { r_lo: 0.0, r_hi: q.sqrt(), areal_density: d });
        comps.push(Component::AnnulusUniform {
            r_lo: p.sqrt(),
            r_hi: f64::INFINITY,
            areal_density: d,
        });
        comps.push(Component::CircleAtom { radius: 1.0, mass: p - q });
    } else {
        comps.push(Component::AnnulusUniform {
            r_lo: p.sqrt(),
            r_hi: f64::INFINITY,
            areal_density: d,
        });
        comps.push(Component::CircleAtom { radius: 1.0, mass: p });
    }
    RadialMeasure::new(comps)
}

/// Limiting conditional eigenvalue-counting measure μ^G_p of the infinite
/// planar β=2 ensemble under the count condition at level p.
pub fn limiting_measure_ginibre_infinite(p: f64) -> Result<RadialMeasure> {
    if !(p >= 0.0) {
        return Err(Error::domain("p must be nonnegative"));
    }
    if p == 1.0 {
        return Err(Error::domain("limiting_measure_ginibre_infinite undefined at p = 1"));
    }
    let d = 1.0 / PI;
    let mut comps = Vec::new();
    if p < 1.0 {
        if p > 0.0 {
            comps.push(Component::AnnulusUniform { r_lo: 0.0, r_hi: p.sqrt(), areal_density: d });
        }
        comps.push(Component::AnnulusUniform {
            r_lo: 1.0,
            r_hi: f64::INFINITY,
            areal_density: d,
        });
        comps.push(Component::CircleAtom { radius: 1.0, mass: 1.0 - p });
    } else {
        comps.push(Component::AnnulusUniform { r_lo: 0.0, r_hi: 1.0, areal_density: d });
        comps.push(Component::AnnulusUniform {
            r_lo: p.sqrt(),
            r_hi: f64::INFINITY,
            areal_density: d,
        });
        comps.push(Component::CircleAtom { radius: 1.0, mass: p - 1.0 });
    }
    RadialMeasure::new(comps)
}

/// Count-fluctuation rate for the infinite planar β=2 ensemble:
/// (1/4) |2p² log p − (p−1)(3p−1)|, continuous at p = 0 with value 1/4.
pub fn shirai_rate(p: f64) -> Result<f64> {
    if !(p >= 0.0) {
        return Err(Error::domain("p must be nonnegative"));
    }
    let plogp = if p == 0.0 { 0.0 } else { 2.0 * p * p * p.ln() };
    Ok(0.25 * (plogp - (p - 1.0) * (3.0 * p - 1.0)).abs())
}

/// Parameters of the count-fluctuation law for the event
/// n(R) = R² + b R^a.
#[derive(Debug, Clone, Copy)]
pub struct JlmParams {
    pub a: f64,
    pub b: f64,
    pub beta: f64,
    /// Optional caller-supplied constant for the 1/2 < a < 1 branch.
    pub c_beta: Option<f64>,
}

impl JlmParams {
    pub fn new(a: f64, b: f64, beta: f64, c_beta: Option<f64>) -> Result<Self> {
        if !(a > 0.5) {
            return Err(Error::domain(format!("exponent a must exceed 1/2, got {a}")));
        }
        if b == 0.0 || !b.is_finite() {
            return Err(Error::domain("b must be nonzero and finite"));
        }
        if a == 2.0 && b < -1.0 {
            return Err(Error::domain("at a = 2 the fluctuation requires b >= -1"));
        }
        if a > 2.0 && b <= 0.0 {
            return Err(Error::domain("for a > 2 only overcrowding (b > 0) is possible"));
        }
        if !(beta > 0.0) {
            return Err(Error::domain("beta must be positive"));
        }
        Ok(JlmParams { a, b, beta, c_beta })
    }
}

/// Decay exponent and prefactor of the count-fluctuation probability:
/// P ≈ exp(−prefactor · R^exponent). The prefactor is None where no closed
/// expression is available (a = 1 for any β; a = 2 for β != 2; 1/2 < a < 1
/// without a caller-supplied c_β).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JlmRate {
    pub exponent: f64,
    pub prefactor: Option<f64>,
}

/// Piecewise-linear decay exponent φ(a): 2a−1 on (1/2, 1], 3a−2 on [1, 2],
/// 2a on [2, ∞).
pub fn jlm_exponent(a: f64) -> Result<f64> {
    if !(a > 0.5) {
        return Err(Error::domain(format!("exponent a must exceed 1/2, got {a}")));
    }
    Ok(if a <= 1.0 {
        2.0 * a - 1.0
    } else if a <= 2.0 {
        3.0 * a - 2.0
    } else {
        2.0 * a
    })
}

/// The count-fluctuation rate (exponent and β-scaled prefactor) at hole
/// parameter R.
pub fn jlm_rate(params: &JlmParams, big_r: f64) -> Result<JlmRate> {
    if !(big_r > 1.0) {
        return Err(Error::domain("R must exceed 1"));
    }
    let a = params.a;
    let exponent = jlm_exponent(a)?;
    let prefactor = if a < 1.0 {
        params.c_beta.map(|c| params.beta * c * params.b * params.b)
    } else if a == 1.0 {
        None
    } else if a < 2.0 {
        Some(params.beta * params.b.abs().powi(3) / 6.0)
    } else if a == 2.0 {
        if params.beta == 2.0 {
            // route through the exact planar rate at p = 1 + b R^{a-2} = 1 + b
            Some(shirai_rate(1.0 + params.b)?)
        } else {
            None
        }
    } else {
        Some(params.beta * 0.5 * (a - 2.0) * params.b * params.b * big_r.ln())
    };
    Ok(JlmRate { exponent, prefactor })
}

/// Leading term of the log partition function:
/// −(β/2) N² I_α(equilibrium). Leading order only.
pub fn log_partition_asymptotic(n: usize, params: &FunctionalParams) -> Result<f64> {
    if n == 0 {
        return Ok(0.0);
    }
    let i_eq = coulomb_functional(&equilibrium_measure(params.alpha)?, params)?;
    Ok(-(params.beta / 2.0) * (n as f64) * (n as f64) * i_eq)
}

static WEYL_NORMALIZATION: Lazy<Mutex<HashMap<u64, f64>>> = Lazy::new(|| Mutex::new(HashMap::new()));

/// sup over radii of U_μ(r) − r²/(2α), computed on a geometric grid of at
/// least 4096 radii spanning [0, 10·sqrt(alpha)] with golden-section
/// refinement near the best grid point and near profile kinks.
fn sup_shifted_potential(mu: &RadialMeasure, alpha: f64) -> Result<f64> {
    let r_hi = 10.0 * alpha.sqrt();
    let g = |r: f64| match mu.log_potential(r) {
        Ok(u) => u - r * r / (2.0 * alpha),
        Err(_) => f64::NEG_INFINITY,
    };
    let n = 4096;
    let r_lo = 1e-6 * alpha.sqrt();
    let ratio = (r_hi / r_lo).powf(1.0 / (n as f64 - 1.0));
    let mut best_x = 0.0;
    let mut best = g(0.0);
    let mut r = r_lo;
    let mut grid = Vec::with_capacity(n + 8);
    for _ in 0..n {
        grid.push(r);
        r *= ratio;
    }
    grid.extend(mu.kink_radii());
    for &x in &grid {
        if x > r_hi {
            continue;
        }
        let v = g(x);
        if v > best {
            best = v;
            best_x = x;
        }
    }
    // local refinement around the best point and around each kink
    let mut centers = vec![best_x];
    centers.extend(mu.kink_radii().into_iter().filter(|&k| k <= r_hi));
    for center in centers {
        let lo = (center * 0.98 - 1e-9).max(0.0);
        let hi = (center * 1.02 + 1e-9).min(r_hi);
        let (_, v) = golden_max(&g, lo, hi, 1e-12 * alpha.sqrt().max(1.0));
        if v > best {
            best = v;
        }
    }
    Ok(best)
}

/// The zero-ensemble rate functional
/// I^Z_α(μ) = 2 sup_z (U_μ(z) − |z|²/(2α)) − Σ(μ) − C_α, normalized so that
/// I^Z_α(equilibrium) = 0. Requires support radius <= 10·sqrt(alpha).
pub fn weyl_functional(mu: &RadialMeasure, alpha: f64) -> Result<f64> {
    if !(alpha >= 1.0) {
        return Err(Error::domain(format!("alpha must be >= 1, got {alpha}")));
    }
    if !mu.is_probability() {
        return Err(Error::domain("weyl_functional requires a probability measure"));
    }
    let support = mu
        .support_radius()
        .ok_or_else(|| Error::domain("weyl_functional requires bounded support"))?;
    if support > 10.0 * alpha.sqrt() {
        return Err(Error::domain(format!(
            "support radius {support} exceeds 10 sqrt(alpha) = {}",
            10.0 * alpha.sqrt()
        )));
    }
    let c_alpha = {
        let mut cache = WEYL_NORMALIZATION.lock().unwrap();
        match cache.get(&alpha.to_bits()) {
            Some(&c) => c,
            None => {
                let eq = equilibrium_measure(alpha)?;
                let c = 2.0 * sup_shifted_potential(&eq, alpha)? - eq.log_energy()?;
                cache.insert(alpha.to_bits(), c);
                c
            }
        }
    };
    Ok(2.0 * sup_shifted_potential(mu, alpha)? - mu.log_energy()? - c_alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn eq1() -> RadialMeasure {
        equilibrium_measure(1.0).unwrap()
    }

    #[test]
    fn potential_of_unit_circle() {
        let mt = RadialMeasure::unit_circle();
        assert_eq!(mt.log_potential(0.0).unwrap(), 0.0);
        assert!((mt.log_potential(2.0).unwrap() - 2.0f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn potential_of_unit_disk() {
        // |z|²/2 - 1/2 inside the disk
        let mu = eq1();
        assert!((mu.log_potential(0.5).unwrap() - (-0.375)).abs() < 1e-14);
        assert!((mu.log_potential(0.0).unwrap() - (-0.5)).abs() < 1e-14);
        assert!((mu.log_potential(1.0).unwrap() - 0.0).abs() < 1e-14);
        assert!((mu.log_potential(3.0).unwrap() - 3.0f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn potential_divergence_at_origin_atom() {
        let mu = RadialMeasure::circle_atom(0.0, 1.0).unwrap();
        assert!(matches!(mu.log_potential(0.0), Err(Error::Divergent(_))));
        assert!((mu.log_potential(2.0).unwrap() - 2.0f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn energy_closed_forms() {
        // unit circle has zero energy, scaled circle log s
        assert!(RadialMeasure::unit_circle().log_energy().unwrap().abs() < 1e-15);
        let c3 = RadialMeasure::circle_atom(3.0, 1.0).unwrap();
        assert!((c3.log_energy().unwrap() - 3.0f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn disk_energy_against_mc_oracle() {
        // Independent 2D Monte-Carlo oracle for Σ(uniform unit disk) = -1/4.
        let mut rng = crate::rng_stream(271828, 0);
        let mut sum = 0.0;
        let n = 400_000usize;
        let mut draw = |rng: &mut rand_chacha::ChaCha12Rng| {
            let r = rng.gen::<f64>().sqrt();
            let t = rng.gen::<f64>() * 2.0 * PI;
            (r * t.cos(), r * t.sin())
        };
        for _ in 0..n {
            let (x1, y1) = draw(&mut rng);
            let (x2, y2) = draw(&mut rng);
            sum += 0.5 * ((x1 - x2).powi(2) + (y1 - y2).powi(2)).ln();
        }
        let mc = sum / n as f64;
        let exact = eq1().log_energy().unwrap();
        assert!((exact - (-0.25)).abs() < 1e-8, "closed form {exact}");
        // MC has ~1/sqrt(n) error; this only guards gross sign/scale errors
        assert!((mc - exact).abs() < 5e-3, "MC {mc} vs exact {exact}");
    }

    #[test]
    fn mean_square_values() {
        assert!((eq1().mean_square().unwrap() - 0.5).abs() < 1e-14);
        assert!((RadialMeasure::unit_circle().mean_square().unwrap() - 1.0).abs() < 1e-15);
        assert!((equilibrium_measure(4.0).unwrap().mean_square().unwrap() - 2.0).abs() < 1e-13);
    }

    #[test]
    fn functional_values() {
        let p1 = FunctionalParams::new(1.0, 2.0).unwrap();
        assert!((coulomb_functional(&eq1(), &p1).unwrap() - 0.75).abs() < 1e-10);
        let p4 = FunctionalParams::new(4.0, 2.0).unwrap();
        let v = coulomb_functional(&equilibrium_measure(4.0).unwrap(), &p4).unwrap();
        assert!((v - (0.75 - 0.5 * 4.0f64.ln())).abs() < 1e-9);
        // minimizer at p=0, alpha=1 is the unit circle: I_1 = 1
        let m = constrained_minimizer_ginibre(0.0, 1.0).unwrap();
        assert!((coulomb_functional(&m, &p1).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn excess_energy_examples() {
        assert!((excess_energy_closed_form(0.0, 1.0).unwrap() - 0.25).abs() < 1e-15);
        assert!(excess_energy_closed_form(1.0, 1.0).unwrap().abs() < 1e-15);
        let v = excess_energy_closed_form(2.0, 4.0).unwrap();
        assert!((v - (8.0 * 2.0f64.ln() - 5.0).abs() / 64.0).abs() < 1e-15);
    }

    #[test]
    fn excess_energy_matches_functional_difference() {
        for &p in &[0.0, 0.25, 0.5, 0.9] {
            for &alpha in &[1.0, 2.0, 4.0] {
                let params = FunctionalParams::new(alpha, 2.0).unwrap();
                let m = constrained_minimizer_ginibre(p, alpha).unwrap();
                let eq = equilibrium_measure(alpha).unwrap();
                let diff = coulomb_functional(&m, &params).unwrap()
                    - coulomb_functional(&eq, &params).unwrap();
                let closed = excess_energy_closed_form(p, alpha).unwrap();
                assert!(
                    (diff - closed).abs() < 1e-6,
                    "p={p} alpha={alpha}: {diff} vs {closed}"
                );
            }
        }
    }

    #[test]
    fn minimizer_structure() {
        // p=0, alpha=1: pure circle atom of mass 1
        let m = constrained_minimizer_ginibre(0.0, 1.0).unwrap();
        assert_eq!(m.components().len(), 1);
        assert!(matches!(
            m.components()[0],
            Component::CircleAtom { radius, mass } if radius == 1.0 && (mass - 1.0).abs() < 1e-15
        ));
        // p=0.5, alpha=2: atom mass 0.25
        let m = constrained_minimizer_ginibre(0.5, 2.0).unwrap();
        let atom_mass: f64 = m
            .components()
            .iter()
            .filter_map(|c| match c {
                Component::CircleAtom { mass, .. } => Some(*mass),
                _ => None,
            })
            .sum();
        assert!((atom_mass - 0.25).abs() < 1e-15);
        assert!(m.is_probability());
    }

    #[test]
    fn potential_identity_on_supports() {
        // U(r) - r²/(2α) - (log α - 1)/2 equals c₁ inside, 0 on the outer
        // annulus, with strict inequality in between and beyond.
        for &(p, alpha) in &[(0.3, 2.0), (0.5, 4.0), (0.0, 1.5)] {
            let m = constrained_minimizer_ginibre(p, alpha).unwrap();
            let c1 = (p * (if p > 0.0 { p.ln() } else { 0.0 } - 1.0) + 1.0) / (2.0 * alpha);
            let base = |r: f64| r * r / (2.0 * alpha) + (alpha.ln() - 1.0) / 2.0;
            if p > 0.0 {
                for &r in &[0.0, 0.5 * p.sqrt(), p.sqrt()] {
                    let dev = m.log_potential(r).unwrap() - base(r) - c1;
                    assert!(dev.abs() < 1e-9, "inner r={r}: {dev}");
                }
            }
            for &r in &[1.0, 0.5 + 0.5 * alpha.sqrt(), alpha.sqrt()] {
                let dev = m.log_potential(r).unwrap() - base(r);
                assert!(dev.abs() < 1e-9, "outer r={r}: {dev}");
            }
            // strict inequality at sampled interior-gap and exterior radii
            let mid = 0.5 * (p.sqrt() + 1.0);
            assert!(m.log_potential(mid).unwrap() - base(mid) - c1 < -1e-6);
            let out = alpha.sqrt() * 1.3;
            assert!(m.log_potential(out).unwrap() - base(out) < -1e-6);
        }
    }

    #[test]
    fn certificate_basic() {
        let p1 = FunctionalParams::new(1.0, 2.0).unwrap();
        let eq = eq1();
        assert!(variational_certificate(&eq, &eq, &p1).unwrap());
        // far-out circle against the equilibrium
        let far = RadialMeasure::circle_atom(1.5, 1.0).unwrap();
        assert!(variational_certificate(&eq, &far, &p1).unwrap());
        // the unit circle is not the unconstrained minimizer
        assert!(!variational_certificate(&RadialMeasure::unit_circle(), &eq, &p1).unwrap());
    }

    #[test]
    fn certificate_constrained_randomized() {
        // mu_p^alpha certified against random measures with mu(D) <= p/alpha
        let (p, alpha) = (0.3, 2.0);
        let params = FunctionalParams::new(alpha, 2.0).unwrap();
        let mu0 = constrained_minimizer_ginibre(p, alpha).unwrap();
        let mut rng = crate::rng_stream(5150, 0);
        for trial in 0..50 {
            let mu = random_constrained_measure(&mut rng, p / alpha, alpha);
            assert!(
                variational_certificate(&mu0, &mu, &params).unwrap(),
                "trial {trial} violated the certificate"
            );
        }
        // a perturbed non-minimizer must fail against at least one measure
        let bad = RadialMeasure::new(vec![
            Component::CircleAtom { radius: 1.4, mass: 1.0 - p / alpha },
            Component::AnnulusUniform {
                r_lo: 0.0,
                r_hi: p.sqrt(),
                areal_density: (p / alpha) / (PI * p),
            },
        ])
        .unwrap();
        let mut failed = false;
        for _ in 0..50 {
            let mu = random_constrained_measure(&mut rng, p / alpha, alpha);
            if !variational_certificate(&bad, &mu, &params).unwrap() {
                failed = true;
                break;
            }
        }
        assert!(failed, "perturbed candidate was never rejected");
    }

    fn random_constrained_measure(
        rng: &mut rand_chacha::ChaCha12Rng,
        disk_cap: f64,
        alpha: f64,
    ) -> RadialMeasure {
        // mixture of an inner annulus (mass <= disk_cap), outer annuli and atoms
        let inner_mass = rng.gen::<f64>() * disk_cap;
        let outer_mass = 1.0 - inner_mass;
        let r1 = 0.2 + 0.6 * rng.gen::<f64>();
        let mut comps = vec![Component::AnnulusUniform {
            r_lo: 0.0,
            r_hi: r1,
            areal_density: inner_mass / (PI * r1 * r1),
        }];
        let split = rng.gen::<f64>();
        let a = 1.0 + rng.gen::<f64>() * (alpha.sqrt() - 1.0);
        let b = a + 0.2 + rng.gen::<f64>();
        comps.push(Component::AnnulusUniform {
            r_lo: a,
            r_hi: b,
            areal_density: outer_mass * split / (PI * (b * b - a * a)),
        });
        comps.push(Component::CircleAtom {
            radius: 1.0 + rng.gen::<f64>() * 2.0,
            mass: outer_mass * (1.0 - split),
        });
        RadialMeasure::new(comps).unwrap()
    }

    #[test]
    fn q_of_p_behaviour() {
        assert_eq!(q_of_p(0.0).unwrap(), E);
        assert!((q_of_p(0.5).unwrap() - 1.603_016_489_916_968).abs() < 1e-9);
        // near-coincident root as p -> 1^-
        assert!((q_of_p(0.999).unwrap() - 1.0).abs() < 0.05);
        assert!(q_of_p(1.0).is_err());
        assert!(q_of_p(E).is_err());
        // residual and monotonicity
        let mut prev = f64::INFINITY;
        for i in 0..20 {
            let p = i as f64 * 0.05;
            let q = q_of_p(p).unwrap();
            let res = p * (if p > 0.0 { p.ln() } else { 0.0 } - 1.0) - q * (q.ln() - 1.0);
            let res = if p == 0.0 { -0.0 - q * (q.ln() - 1.0) } else { res };
            assert!(res.abs() < 1e-12, "p={p}: residual {res}");
            assert!(q < prev, "q not strictly decreasing at p={p}");
            prev = q;
        }
    }

    #[test]
    fn gef_limit_measures() {
        // p = 0: atom mass e at radius 1 plus density 1/pi beyond sqrt(e)
        let m = limiting_measure_gef(0.0).unwrap();
        let atom = m.components().iter().find_map(|c| match c {
            Component::CircleAtom { mass, radius } => Some((*radius, *mass)),
            _ => None,
        });
        assert_eq!(atom, Some((1.0, E)));
        assert!(m.components().iter().any(|c| matches!(
            c,
            Component::AnnulusUniform { r_lo, r_hi, areal_density }
            if (*r_lo - E.sqrt()).abs() < 1e-12 && r_hi.is_infinite()
                && (*areal_density - 1.0 / PI).abs() < 1e-15
        )));
        // branch agreement at p = e
        let me = limiting_measure_gef(E).unwrap();
        let atom_e = me.components().iter().find_map(|c| match c {
            Component::CircleAtom { mass, .. } => Some(*mass),
            _ => None,
        });
        assert!((atom_e.unwrap() - E).abs() < 1e-9);
        // p -> 0 limit of the atom mass q(p) - p -> e, monotone along
        // p = 0.1, 0.01, 0.001
        let mut gaps = Vec::new();
        for &p in &[0.1, 0.01, 0.001] {
            let mp = limiting_measure_gef(p).unwrap();
            let a = mp
                .components()
                .iter()
                .find_map(|c| match c {
                    Component::CircleAtom { mass, .. } => Some(*mass),
                    _ => None,
                })
                .unwrap();
            gaps.push((a - E).abs());
        }
        assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2], "{gaps:?}");
        assert!(gaps[2] < 0.01, "{gaps:?}");
        // p = 0.5 structure
        let m05 = limiting_measure_gef(0.5).unwrap();
        let q05 = q_of_p(0.5).unwrap();
        let a05 = m05
            .components()
            .iter()
            .find_map(|c| match c {
                Component::CircleAtom { mass, .. } => Some(*mass),
                _ => None,
            })
            .unwrap();
        assert!((a05 - (q05 - 0.5)).abs() < 1e-12);
    }

    #[test]
    fn ginibre_limit_measures() {
        let m = limiting_measure_ginibre_infinite(0.0).unwrap();
        assert!(m.components().iter().any(|c| matches!(
            c,
            Component::CircleAtom { radius, mass } if *radius == 1.0 && (*mass - 1.0).abs() < 1e-15
        )));
        let m2 = limiting_measure_ginibre_infinite(2.0).unwrap();
        assert!(m2.components().iter().any(|c| matches!(
            c,
            Component::AnnulusUniform { r_lo, r_hi, .. }
            if *r_lo == 0.0 && (*r_hi - 1.0).abs() < 1e-15
        )));
        assert!(m2.components().iter().any(|c| matches!(
            c,
            Component::AnnulusUniform { r_lo, .. } if (*r_lo - 2.0f64.sqrt()).abs() < 1e-15
        )));
        // continuity of the atom mass as p -> 1
        for &p in &[0.99, 1.01] {
            let m = limiting_measure_ginibre_infinite(p).unwrap();
            let atom: f64 = m
                .components()
                .iter()
                .filter_map(|c| match c {
                    Component::CircleAtom { mass, .. } => Some(*mass),
                    _ => None,
                })
                .sum();
            assert!(atom < 0.011);
        }
    }

    #[test]
    fn shirai_rate_values() {
        assert!((shirai_rate(0.0).unwrap() - 0.25).abs() < 1e-15);
        assert!(shirai_rate(1.0).unwrap().abs() < 1e-15);
        // cubic regime near p = 1
        let p = 0.99;
        let rate = shirai_rate(p).unwrap();
        let cubic = 0.25 * (2.0 / 3.0) * (1.0 - p).powi(3);
        assert!((rate / cubic - 1.0).abs() < 0.02, "{}", rate / cubic);
    }

    #[test]
    fn jlm_rate_branches() {
        let r = jlm_rate(&JlmParams::new(2.0, -0.5, 2.0, None).unwrap(), 100.0).unwrap();
        assert_eq!(r.exponent, 4.0);
        assert!((r.prefactor.unwrap() - shirai_rate(0.5).unwrap()).abs() < 1e-15);
        // a = 1 continuity of the exponent, unknown prefactor
        let r1 = jlm_rate(&JlmParams::new(1.0, 1.0, 2.0, None).unwrap(), 100.0).unwrap();
        assert_eq!(r1.exponent, 1.0);
        assert_eq!(r1.prefactor, None);
        // middle branch
        let rm = jlm_rate(&JlmParams::new(1.5, 1.0, 2.0, None).unwrap(), 100.0).unwrap();
        assert!((rm.exponent - 2.5).abs() < 1e-15);
        assert!((rm.prefactor.unwrap() - 1.0 / 3.0).abs() < 1e-15);
        // a > 2 log-R prefactor
        let rh = jlm_rate(&JlmParams::new(3.0, 1.0, 2.0, None).unwrap(), 100.0).unwrap();
        assert!((rh.exponent - 6.0).abs() < 1e-15);
        assert!((rh.prefactor.unwrap() - 100.0f64.ln()).abs() < 1e-12);
        // small-a branch needs c_beta
        let rs = jlm_rate(&JlmParams::new(0.75, 1.0, 2.0, None).unwrap(), 100.0).unwrap();
        assert_eq!(rs.prefactor, None);
        let rs2 = jlm_rate(&JlmParams::new(0.75, 1.0, 2.0, Some(0.3)).unwrap(), 100.0).unwrap();
        assert!((rs2.prefactor.unwrap() - 0.6).abs() < 1e-15);
        // invalid combinations rejected
        assert!(JlmParams::new(2.0, -1.5, 2.0, None).is_err());
        assert!(JlmParams::new(3.0, -1.0, 2.0, None).is_err());
        assert!(JlmParams::new(0.4, 1.0, 2.0, None).is_err());
    }

    #[test]
    fn jlm_exponent_piecewise_linear() {
        // continuity at the breakpoints and linearity between them
        for &(a, want) in &[(1.0, 1.0), (2.0, 4.0), (0.75, 0.5), (1.5, 2.5), (3.0, 6.0)] {
            assert!((jlm_exponent(a).unwrap() - want).abs() < 1e-15);
        }
        let eps = 1e-9;
        assert!((jlm_exponent(1.0 - eps).unwrap() - jlm_exponent(1.0 + eps).unwrap()).abs() < 1e-8);
        assert!((jlm_exponent(2.0 - eps).unwrap() - jlm_exponent(2.0 + eps).unwrap()).abs() < 1e-8);
    }

    #[test]
    fn partition_function_leading_term() {
        let p = FunctionalParams::new(1.0, 2.0).unwrap();
        assert!((log_partition_asymptotic(10, &p).unwrap() + 75.0).abs() < 1e-9);
        assert_eq!(log_partition_asymptotic(0, &p).unwrap(), 0.0);
        let v1 = log_partition_asymptotic(7, &p).unwrap();
        let v2 = log_partition_asymptotic(14, &p).unwrap();
        assert!((v2 / v1 - 4.0).abs() < 1e-12);
    }

    #[test]
    fn weyl_functional_normalization_and_positivity() {
        for &alpha in &[1.0, 4.0] {
            let eq = equilibrium_measure(alpha).unwrap();
            assert!(weyl_functional(&eq, alpha).unwrap().abs() < 1e-8);
        }
        // restricted/normalized p=0 limiting measure is not the minimizer
        let nu = limiting_measure_gef(0.0)
            .unwrap()
            .restricted(2.0)
            .unwrap()
            .normalized()
            .unwrap();
        let v = weyl_functional(&nu, 4.0).unwrap();
        assert!(v > 0.0, "non-minimizer should have positive functional, got {v}");
        // reference value from an external high-resolution oracle
        assert!((v - 0.115_454).abs() < 5e-4, "{v}");
    }

    #[test]
    fn weyl_functional_grid_oracle() {
        // dense-grid oracle at 10x resolution for the sup term
        let nu = limiting_measure_gef(0.0)
            .unwrap()
            .restricted(2.0)
            .unwrap()
            .normalized()
            .unwrap();
        let alpha = 4.0;
        let mut best = f64::NEG_INFINITY;
        let n = 40_960;
        for i in 0..=n {
            let r = 20.0 * i as f64 / n as f64;
            if let Ok(u) = nu.log_potential(r) {
                best = best.max(u - r * r / (2.0 * alpha));
            }
        }
        let eq = equilibrium_measure(alpha).unwrap();
        let mut best_eq = f64::NEG_INFINITY;
        for i in 0..=n {
            let r = 20.0 * i as f64 / n as f64;
            if let Ok(u) = eq.log_potential(r) {
                best_eq = best_eq.max(u - r * r / (2.0 * alpha));
            }
        }
        let c_alpha = 2.0 * best_eq - eq.log_energy().unwrap();
        let oracle = 2.0 * best - nu.log_energy().unwrap() - c_alpha;
        let ours = weyl_functional(&nu, alpha).unwrap();
        assert!((ours - oracle).abs() < 1e-6, "ours {ours} vs oracle {oracle}");
    }

    #[test]
    fn potential_large_r_asymptotics() {
        // U(r) = mass log r + o(1) for large r
        let m = RadialMeasure::new(vec![
            Component::AnnulusUniform { r_lo: 0.5, r_hi: 2.0, areal_density: 0.3 },
            Component::CircleAtom { radius: 1.2, mass: 0.7 },
        ])
        .unwrap();
        let mass = m.total_mass();
        for &r in &[50.0, 500.0, 5000.0] {
            let u = m.log_potential(r).unwrap();
            assert!((u - mass * r.ln()).abs() < 1e-10 * u.abs());
        }
    }

    #[test]
    fn overlapping_annuli_merge() {
        let m = RadialMeasure::new(vec![
            Component::AnnulusUniform { r_lo: 0.0, r_hi: 2.0, areal_density: 1.0 },
            Component::AnnulusUniform { r_lo: 1.0, r_hi: 3.0, areal_density: 0.5 },
        ])
        .unwrap();
        // total mass preserved: pi(4) + 0.5 pi (9-1) = 8 pi
        assert!((m.total_mass() - 8.0 * PI).abs() < 1e-12);
        // sorted by inner radius, disjoint
        let mut prev_hi = 0.0;
        for c in m.components() {
            if let Component::AnnulusUniform { r_lo, r_hi, .. } = c {
                assert!(*r_lo >= prev_hi - 1e-15);
                prev_hi = *r_hi;
            }
        }
        // density on [1,2] is 1.5
        assert!(m.components().iter().any(|c| matches!(
            c,
            Component::AnnulusUniform { r_lo, r_hi, areal_density }
            if (*r_lo - 1.0).abs() < 1e-15 && (*r_hi - 2.0).abs() < 1e-15
                && (*areal_density - 1.5).abs() < 1e-15
        )));
    }

    #[test]
    fn count_constrained_minimizer_matches_deficiency_branch() {
        for &(p, alpha) in &[(0.0, 1.0), (0.3, 2.0), (0.9, 4.0)] {
            let a = count_constrained_minimizer(p, alpha).unwrap();
            let b = constrained_minimizer_ginibre(p, alpha).unwrap();
            assert!(a.is_probability());
            for &r in &[0.3, 0.9, 1.1, 1.7] {
                let ua = a.log_potential(r).unwrap();
                let ub = b.log_potential(r).unwrap();
                assert!((ua - ub).abs() < 1e-12, "p={p} alpha={alpha} r={r}");
            }
        }
        // overcrowding branch is a probability measure with the printed atom
        let m = count_constrained_minimizer(2.0, 4.0).unwrap();
        assert!(m.is_probability());
        let atom: f64 = m
            .components()
            .iter()
            .filter_map(|c| match c {
                Component::CircleAtom { mass, .. } => Some(*mass),
                _ => None,
            })
            .sum();
        assert!((atom - 0.25).abs() < 1e-14);
    }
}
