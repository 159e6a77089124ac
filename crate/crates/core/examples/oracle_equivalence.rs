//! Gaussian-state observables next to brute-force many-body evolution.

use pagecurve::evolve::{Propagator, RowCoverage};
use pagecurve::model::environment_hamiltonian;
use pagecurve::observables::{
    env_energy_mean_and_variance, occupation_spectrum, von_neumann_entropy,
};
use pagecurve::oracle::{
    build_sector_hamiltonian, environment_coefficients, reduced_density_entropies,
    run_oracle_check, variance_quadratic, OracleCheckConfig, SectorBasis, SectorEvolver,
};
use pagecurve::ModelParams;

fn main() -> pagecurve::Result<()> {
    let params = ModelParams::new(3, 9, 1.0, 2.0, 0.6)?;
    let basis = SectorBasis::new(params.total_sites(), 3)?;
    println!("sector dimension {}", basis.dim());
    let evolver = SectorEvolver::new(&build_sector_hamiltonian(&params, &basis)?);
    let psi0 = basis.product_state(&[0, 1, 2])?;
    let env = environment_coefficients(&params)?;
    let h_env = environment_hamiltonian(&params)?;
    let prop = Propagator::new(&params, RowCoverage::Complete)?;

    println!(
        "{:>6} {:>16} {:>16} {:>16} {:>16}",
        "t", "S (Gaussian)", "S (sector)", "var (Gaussian)", "var (sector)"
    );
    for t in [0.0, 1.0, 5.0, 20.0, 80.0] {
        let psi = evolver.evolve(&psi0, t);
        let exact = reduced_density_entropies(&basis, &psi, 3, &[])?;
        let frame = prop.frame(t);
        let (_, var) = env_energy_mean_and_variance(&frame, &h_env)?;
        println!(
            "{t:6.1} {:16.12} {:16.12} {:16.12} {:16.12}",
            von_neumann_entropy(&occupation_spectrum(&frame)?),
            exact.s_vn,
            var,
            variance_quadratic(&basis, &psi, &env)?
        );
    }

    let report = run_oracle_check(&OracleCheckConfig {
        max_sites: 8,
        ..Default::default()
    })?;
    println!(
        "\nsweep over {} chains: passed = {}",
        report.instances,
        report.passed()
    );
    for d in &report.deviations {
        println!("  {:<20} {:.2e}", d.observable, d.max_abs);
    }
    Ok(())
}
