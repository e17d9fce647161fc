use holegas::mcmc::*;
use num_complex::Complex64;
use rand::Rng;

fn main() {
    // N=1, beta=2, hole disk radius 1.5: stationary radial law r e^{-r^2} on r > 1.5
    let rh = 1.5f64;
    let hole = HoleRegion::Disk { center: Complex64::new(0.0, 0.0), radius: rh };
    let mut chain = init_chain(
        Ensemble::BetaGinibre { beta: 2.0, n: 1 },
        ConstraintSpec::Hole(hole),
        holegas::rng_stream(31337, 0),
    ).unwrap();
    chain.sigma = 0.5; // fixed, comparable to the boundary layer
    let mut radii: Vec<f64> = Vec::new();
    for step in 0..2_000_000u64 {
        chain.mh_step();
        if step > 100_000 && step % 50 == 0 {
            radii.push(chain.points[0].norm());
        }
    }
    // exact sampler by inverse CDF: P(r > x) = e^{-(x^2 - R^2)}
    let mut rng = holegas::rng_stream(31337, 9);
    let mut exact: Vec<f64> = (0..radii.len())
        .map(|_| (rh * rh - rng.gen::<f64>().ln()).sqrt())
        .collect();
    let p = holegas::stats::ks2_pvalue(&mut radii, &mut exact);
    println!("n={} KS p = {:.5}", radii.len(), p);
}
