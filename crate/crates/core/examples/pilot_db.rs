use holegas::mcmc::*;
use holegas::special::chi2_sf;
use num_complex::Complex64;
use std::collections::HashMap;
use std::time::Instant;

// discretize a 2-particle state into (cell_a, cell_b) unordered
fn cell(z: Complex64) -> usize {
    let r = z.norm();
    let shell = if r < 1.15 { 0 } else if r < 1.6 { 1 } else { 2 };
    let ang = ((z.arg() + std::f64::consts::PI) / (2.0 * std::f64::consts::PI) * 4.0) as usize % 4;
    shell * 4 + ang
}
fn state(points: &[Complex64]) -> (usize, usize) {
    let a = cell(points[0]);
    let b = cell(points[1]);
    (a.min(b), a.max(b))
}

fn main() {
    let t0 = Instant::now();
    let hole = HoleRegion::Disk { center: Complex64::new(0.0, 0.0), radius: 0.8 };
    let mut chain = init_chain(
        Ensemble::BetaGinibre { beta: 2.0, n: 2 },
        ConstraintSpec::Hole(hole),
        holegas::rng_stream(808, 0),
    ).unwrap();
    // burn in with tuning
    let mut cols: Vec<Collector> = vec![];
    run_chain(&mut chain, 50_001, 50_000, 1, &mut cols).unwrap();
    // transition-pair counting
    let mut counts: HashMap<((usize, usize), (usize, usize)), u64> = HashMap::new();
    let mut prev = state(&chain.points);
    for _ in 0..1_000_000 {
        chain.mh_step();
        let cur = state(&chain.points);
        if cur != prev {
            *counts.entry((prev, cur)).or_insert(0) += 1;
            prev = cur;
        }
    }
    // chi^2 over unordered pairs with n1+n2 >= 20
    let mut stat = 0.0;
    let mut dof = 0usize;
    let mut seen = std::collections::HashSet::new();
    for (&(s1, s2), &n12) in counts.iter() {
        if s1 >= s2 || seen.contains(&(s2, s1)) || seen.contains(&(s1, s2)) { continue; }
        let n21 = *counts.get(&(s2, s1)).unwrap_or(&0);
        if n12 + n21 >= 20 {
            let d = n12 as f64 - n21 as f64;
            stat += d * d / (n12 + n21) as f64;
            dof += 1;
        }
        seen.insert((s1, s2));
    }
    let p = chi2_sf(stat, dof).unwrap();
    println!("pairs {dof} chi2 {stat:.1} p = {p:.4}  took {:?}", t0.elapsed());
}
