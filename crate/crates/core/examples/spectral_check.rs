//! Eigen-decomposition checks and the per-mode level-spacing report.

use pagecurve::model::build_hamiltonian;
use pagecurve::rlm::{disjointness_report, DEFAULT_DISJOINTNESS_THRESHOLD};
use pagecurve::spectral::{eigendecompose, uniform_chain_modes};
use pagecurve::ModelParams;

fn main() -> pagecurve::Result<()> {
    let params = ModelParams::new(6, 40, 1.0, 4.0, 0.5)?;
    let h = build_hamiltonian(&params)?;
    let spec = eigendecompose(&h)?;
    let v = spec.eigenvectors().expect("full decomposition").clone();
    let dense = h.to_dense();
    let residual = (&dense * &v
        - &v * nalgebra::DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(
            spec.eigenvalues(),
        )))
    .norm();
    let ortho = (v.transpose() * &v - nalgebra::DMatrix::identity(h.dim(), h.dim())).norm();
    println!(
        "L = {}: ||hV - VE|| = {residual:.2e}, ||V^T V - 1|| = {ortho:.2e}",
        h.dim()
    );
    println!(
        "Tr h^2 = {} (sum of eigenvalue squares {})",
        h.trace_of_square(),
        spec.eigenvalues().iter().map(|e| e * e).sum::<f64>()
    );

    let closed = uniform_chain_modes(500, 4.0)?;
    let numeric = eigendecompose(&pagecurve::spectral::TridiagonalMatrix::uniform(500, 4.0)?)?;
    let gap = closed
        .eigenvalues()
        .iter()
        .zip(numeric.eigenvalues())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    println!("uniform chain L = 500: closed form vs solver max |de| = {gap:.2e}");

    for g in [0.2, 0.5, 1.0] {
        let p = ModelParams::new(50, 10_000, 1.0, 4.0, g)?;
        let r = disjointness_report(&p, DEFAULT_DISJOINTNESS_THRESHOLD)?;
        println!(
            "M=50 g={g}: {:.0}% of modes with spacing/gamma < {}, band-edge fraction {:.3}",
            100.0 * r.violating_fraction,
            r.threshold,
            r.band_edge_fraction
        );
    }
    Ok(())
}
