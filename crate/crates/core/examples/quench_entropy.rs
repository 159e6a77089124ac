//! Entanglement of a draining system: `cargo run --release --example quench_entropy [M] [N] [g]`.

use pagecurve::evolve::{Propagator, RowCoverage};
use pagecurve::observables::ObservableRecord;
use pagecurve::rlm;
use pagecurve::ModelParams;

fn arg<T: std::str::FromStr>(i: usize, default: T) -> T {
    std::env::args()
        .nth(i)
        .and_then(|s| s.parse().ok())
        .unwrap_or(default)
}

fn main() -> pagecurve::Result<()> {
    let (m, n, g) = (arg(1, 20usize), arg(2, 2000usize), arg(3, 0.5f64));
    let params = ModelParams::new(m, n, 1.0, 4.0, g)?;
    let prop = Propagator::new(&params, RowCoverage::Boundary)?;

    println!(
        "{:>8} {:>8} {:>8} {:>10} {:>10} {:>10}",
        "t", "tau", "m/M", "S_vN/M", "S2/M", "Smin/M"
    );
    let t_end = 0.9 * n as f64 / params.t_env;
    let mut best = (0.0, 0.0);
    for i in 0..=30 {
        let t = t_end * i as f64 / 30.0;
        let r = ObservableRecord::evaluate(
            &prop.frame(t),
            prop.hamiltonian(),
            prop.occupation(),
            &[2.0],
        )?;
        let per = |x: f64| x / m as f64;
        if r.s_vn > best.1 {
            best = (t, r.s_vn);
        }
        println!(
            "{t:8.1} {:8.3} {:8.4} {:10.5} {:10.5} {:10.5}",
            rlm::tau_of_time(t, &params),
            per(r.m),
            per(r.s_vn),
            per(r.renyi(2.0).unwrap()),
            per(r.s_min)
        );
    }
    let (tau_p, s_p) = rlm::entropy_peak()?;
    println!(
        "\nnumerical peak S/M = {:.4} at t = {:.1}",
        best.1 / m as f64,
        best.0
    );
    println!(
        "analytic  peak S/M = {s_p:.4} at t = {:.1}",
        rlm::time_of_tau(tau_p, &params)
    );
    Ok(())
}
