//! Two independent propagators on a large chain: the spectral route gives
//! the system block, Chebyshev time stepping gives every row.

use pagecurve::evolve::{ChebyshevPropagator, Propagator, RowCoverage};
use pagecurve::observables::{occupation_spectrum, particle_number};
use pagecurve::ModelParams;

fn main() -> pagecurve::Result<()> {
    let params = ModelParams::new(20, 3000, 1.0, 4.0, 0.5)?;
    let spectral = Propagator::new(&params, RowCoverage::Boundary)?;
    let mut stepper = ChebyshevPropagator::new(&params)?;
    println!(
        "{:>6} {:>14} {:>14} {:>12} {:>12} {:>12}",
        "t", "Tr C_sys", "Tr C_env", "sum - M", "|dX|", "nu range"
    );
    for i in 0..=7 {
        let t = 100.0 * i as f64;
        stepper.advance_to(t)?;
        let a = spectral.frame(t);
        let b = stepper.frame();
        let sys = particle_number(&a);
        let env = b.environment().expect("complete").norm_squared();
        let dx = (a.system() - b.system()).norm();
        let spec = occupation_spectrum(&a)?;
        println!(
            "{t:6.0} {sys:14.10} {env:14.10} {:12.2e} {dx:12.2e} [{:.1e}, {:.6}]",
            sys + env - 20.0,
            spec.raw_min(),
            spec.raw_max()
        );
    }
    Ok(())
}
