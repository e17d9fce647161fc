use holegas::mcmc::*;
use num_complex::Complex64;
use std::time::Instant;

fn main() {
    let r_hole = 8.0;
    for beta in [2.0f64, 4.0] {
        let t0 = Instant::now();
        let hole = HoleRegion::Disk { center: Complex64::new(0.0, 0.0), radius: r_hole };
        let mut chain = init_chain(
            Ensemble::BetaGinibre { beta, n: 256 },
            ConstraintSpec::Hole(hole.clone()),
            holegas::rng_stream(2024, if beta > 3.0 { 1 } else { 0 }),
        ).unwrap();
        let mut collectors = vec![Collector::radii(), Collector::count_in(HoleRegion::Annulus { r_lo: r_hole*1.0, r_hi: 1.15 * r_hole })];
        let summary = run_chain(&mut chain, 600_000, 150_000, 500, &mut collectors).unwrap();
        let Collector::Radii { samples } = &collectors[0] else { unreachable!() };
        // collar fraction: radii in [R, 1.15R] (note: count_in uses open annulus; use radii directly)
        let mut fracs: Vec<f64> = samples.iter().map(|radii| {
            radii.iter().filter(|&&x| x >= r_hole && x <= 1.15 * r_hole).count() as f64 / 256.0
        }).collect();
        let mean_frac: f64 = fracs.iter().sum::<f64>() / fracs.len() as f64;
        fracs.sort_by(|a,b| a.partial_cmp(b).unwrap());
        // bulk profile: intensity in [1.3 R, 1.8 R] (inside support sqrt(256)=16 = 2R)
        let prof = config_radial_profile(
            &samples.iter().map(|radii| holegas::PointConfiguration::new(
                radii.iter().map(|&x| Complex64::new(x, 0.0)).collect(), 1.0, "r").unwrap()
            ).collect::<Vec<_>>(), 20, 16.0);
        let hole_violations = samples.iter().flat_map(|radii| radii.iter()).filter(|&&x| x < r_hole).count();
        println!("beta={beta}: collar mean {:.4} med {:.4}, accept {:.3}, sigma {:.3}, violations {}, drift {:.2e}, took {:?}",
            mean_frac, fracs[fracs.len()/2], summary.acceptance_rate, summary.sigma_final, hole_violations, summary.audit_max_drift, t0.elapsed());
        // bulk bins between r=10.4 and 14.4: bins of width 0.8: indices 13..18
        let bulk: Vec<f64> = prof.intensity.iter().skip(13).take(5).map(|v| v * std::f64::consts::PI).collect();
        println!("  bulk intensity*pi bins 13..18: {:?}", bulk.iter().map(|v| format!("{v:.3}")).collect::<Vec<_>>());
    }
}
