use holegas::mcmc::*;
use holegas::samplers::sample_ginibre_matrix;
use std::time::Instant;

fn main() {
    let t0 = Instant::now();
    // unconstrained beta=2 chain, N=64, vs exact matrix sampler
    let n = 64usize;
    let mut chain = init_chain(
        Ensemble::BetaGinibre { beta: 2.0, n },
        ConstraintSpec::None,
        holegas::rng_stream(555, 0),
    ).unwrap();
    let mut collectors = vec![Collector::radii()];
    let summary = run_chain(&mut chain, 500_000, 100_000, 1_000, &mut collectors).unwrap();
    let Collector::Radii { samples } = &collectors[0] else { unreachable!() };
    let mut chain_radii: Vec<f64> = samples.iter().flatten().map(|&x| x / (n as f64).sqrt()).collect();
    let mut rng = holegas::rng_stream(555, 7);
    let mut exact_radii: Vec<f64> = Vec::new();
    for _ in 0..100 {
        let c = sample_ginibre_matrix(n, &mut rng).unwrap();
        exact_radii.extend(c.points.iter().map(|z| z.norm()));
    }
    let p = holegas::stats::ks2_pvalue(&mut chain_radii, &mut exact_radii);
    println!("chain samples {} exact {} KS p = {:.4}  accept {:.3} drift {:.2e} took {:?}",
        chain_radii.len(), exact_radii.len(), p, summary.acceptance_rate, summary.audit_max_drift, t0.elapsed());
}
