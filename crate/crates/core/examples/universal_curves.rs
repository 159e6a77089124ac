//! The resonant-level curves as functions of the emitted fraction.

use pagecurve::rlm::{self, OmegaConvention, UniversalCurve};

fn main() -> pagecurve::Result<()> {
    let grid: Vec<f64> = (0..=20).map(|i| 0.01 * 1.5f64.powi(i)).collect();
    let curve = UniversalCurve::compute(&grid, &[2.0])?;
    println!(
        "{:>9} {:>8} {:>8} {:>8} {:>8} {:>8}",
        "tau", "emitted", "S_vN", "S_2", "S_min", "var"
    );
    for p in &curve.points {
        println!(
            "{:9.4} {:8.4} {:8.4} {:8.4} {:8.4} {:8.4}",
            p.tau, p.emitted_frac, p.s_frac, p.s_renyi_frac[0].1, p.s_min_frac, p.var_frac_chain
        );
    }

    let report = |name: &str, (tau, v): (f64, f64)| -> pagecurve::Result<()> {
        println!(
            "{name:>8} peak {v:.5} at tau = {tau:.4}, emitted = {:.4}",
            1.0 - rlm::m_frac(tau)?
        );
        Ok(())
    };
    println!();
    report("S_vN", rlm::entropy_peak()?)?;
    report(
        "S_2",
        rlm::curve_peak(|t| rlm::renyi_frac(t, 2.0), 0.01, 20.0)?,
    )?;
    report("S_min", rlm::curve_peak(rlm::min_entropy_frac, 0.01, 20.0)?)?;
    report(
        "var",
        rlm::curve_peak(
            |t| rlm::variance_frac(t, OmegaConvention::ChainSpectrum),
            0.01,
            20.0,
        )?,
    )?;
    Ok(())
}
