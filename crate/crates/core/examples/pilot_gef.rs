use holegas::gefhole::*;

fn main() {
    let r: f64 = 5.0;
    let e = std::f64::consts::E;
    let spec = hole_event_constraints(r, 0.0).unwrap();
    let mut rng = holegas::rng_stream(1234, 0);
    let n = 200;
    let mut edge_ok = 0;
    let mut forb_ok = 0;
    let mut cert_ok = 0;
    let mut edge_fracs = Vec::new();
    let mut forb_fracs = Vec::new();
    for _ in 0..n {
        let s = sample_conditional_gef(&spec, &mut rng).unwrap();
        if s.zeros_in_hole == 0 && s.domination_log_margin > 0.0 { cert_ok += 1; }
        let edge = count_in_annulus(&s.config, r, 1.1 * r).unwrap() as f64;
        let forb = count_in_annulus(&s.config, 1.15 * r, 0.9 * e.sqrt() * r).unwrap() as f64;
        let target = e * r * r;
        edge_fracs.push(edge / target);
        forb_fracs.push(forb / target);
        if edge >= 0.6 * target { edge_ok += 1; }
        if forb <= 0.15 * target { forb_ok += 1; }
    }
    edge_fracs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    forb_fracs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    println!("cert {}/{}", cert_ok, n);
    println!("edge >= 0.6eR^2: {}/{}  (quartiles {:.3} {:.3} {:.3})", edge_ok, n,
        edge_fracs[n/4], edge_fracs[n/2], edge_fracs[3*n/4]);
    println!("forb <= 0.15eR^2: {}/{} (quartiles {:.3} {:.3} {:.3})", forb_ok, n,
        forb_fracs[n/4], forb_fracs[n/2], forb_fracs[3*n/4]);
}
