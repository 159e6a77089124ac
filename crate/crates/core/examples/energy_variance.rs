//! Environment energy variance: a peak near half-emptying, then relaxation
//! towards the conserved total variance once the system is empty.

use pagecurve::evolve::{Propagator, RowCoverage};
use pagecurve::observables::{total_energy_variance_t0, ObservableRecord};
use pagecurve::rlm::{tau_at_m_frac, variance_frac, OmegaConvention};
use pagecurve::ModelParams;

fn show(params: &ModelParams, times: &[f64], overlay: bool) -> pagecurve::Result<()> {
    let m = params.system_sites as f64;
    let prop = Propagator::new(params, RowCoverage::Boundary)?;
    println!(
        "M={} N={} t_env={} g={}  (total variance at t=0: {})",
        params.system_sites,
        params.env_sites,
        params.t_env,
        params.coupling,
        total_energy_variance_t0(params)?
    );
    println!(
        "{:>8} {:>8} {:>10} {:>12} {:>12}",
        "t", "m/M", "var", "var/M", "analytic/M"
    );
    for &t in times {
        let r =
            ObservableRecord::evaluate(&prop.frame(t), prop.hamiltonian(), prop.occupation(), &[])?;
        let an = if overlay {
            format!(
                "{:12.5}",
                variance_frac(tau_at_m_frac(r.m / m)?, OmegaConvention::ChainSpectrum)?
            )
        } else {
            format!("{:>12}", "-")
        };
        println!(
            "{t:8.0} {:8.4} {:10.5} {:12.5} {an}",
            r.m / m,
            r.henv_var,
            r.henv_var / m
        );
    }
    println!();
    Ok(())
}

fn main() -> pagecurve::Result<()> {
    // weak coupling: resonant-level regime
    show(
        &ModelParams::new(20, 2000, 1.0, 4.0, 0.5)?,
        &[50.0, 100.0, 200.0, 300.0, 400.0],
        true,
    )?;
    // homogeneous chain: empties ballistically, variance settles at g^2
    show(
        &ModelParams::new(10, 2000, 1.0, 1.0, 1.0)?,
        &[10.0, 100.0, 500.0, 1000.0, 1900.0],
        false,
    )?;
    Ok(())
}
