//! Physical quantities of a propagated frame: occupation spectrum,
//! entanglement entropies, particle number and current, and the energy
//! statistics of the environment.
//!
//! Everything follows from Wick's theorem for the number-conserving
//! Gaussian state with `C_ij = <a_i^dag a_j> = (W W^dag)_ij`.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::evolve::{CMatrix, PropagatedFrame, C64};
use crate::model::{InitialOccupation, ModelParams};
use crate::spectral::TridiagonalMatrix;

/// Eigenvalues outside `[0, 1]` by more than this are accepted as round-off
/// and clamped.
pub const CLAMP_TOLERANCE: f64 = 1e-9;
/// Eigenvalues outside `[0, 1]` by more than this mean the frame is broken.
pub const CORRUPTION_TOLERANCE: f64 = 1e-6;

/// Eigenvalues `nu_a` of the system correlation block, descending, in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OccupationSpectrum {
    nu: Vec<f64>,
    raw_min: f64,
    raw_max: f64,
}

impl OccupationSpectrum {
    /// Validates and clamps a list of occupations.
    pub fn new(mut nu: Vec<f64>) -> Result<Self> {
        let raw_min = nu.iter().copied().fold(f64::INFINITY, f64::min);
        let raw_max = nu.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if let Some(&bad) = nu
            .iter()
            .find(|&&x| !(-CORRUPTION_TOLERANCE..=1.0 + CORRUPTION_TOLERANCE).contains(&x))
        {
            return Err(Error::CorruptFrame {
                time: f64::NAN,
                value: bad,
            });
        }
        for x in nu.iter_mut() {
            *x = x.clamp(0.0, 1.0);
        }
        nu.sort_by(|a, b| b.total_cmp(a));
        Ok(OccupationSpectrum {
            nu,
            raw_min,
            raw_max,
        })
    }

    pub fn from_frame(frame: &PropagatedFrame) -> Result<Self> {
        let eig = frame.system_correlation().symmetric_eigenvalues();
        Self::new(eig.iter().copied().collect()).map_err(|e| match e {
            Error::CorruptFrame { value, .. } => Error::CorruptFrame {
                time: frame.time(),
                value,
            },
            other => other,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.nu
    }

    /// Smallest eigenvalue before clamping.
    pub fn raw_min(&self) -> f64 {
        self.raw_min
    }

    /// Largest eigenvalue before clamping.
    pub fn raw_max(&self) -> f64 {
        self.raw_max
    }

    pub fn total(&self) -> f64 {
        self.nu.iter().sum()
    }
}

pub fn occupation_spectrum(frame: &PropagatedFrame) -> Result<OccupationSpectrum> {
    OccupationSpectrum::from_frame(frame)
}

/// `-x ln x - (1-x) ln(1-x)` with `0 ln 0 = 0`.
pub fn binary_entropy(x: f64) -> f64 {
    xlnx(x) + xlnx(1.0 - x)
}

fn xlnx(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -x * x.ln()
    }
}

pub fn von_neumann_entropy(spec: &OccupationSpectrum) -> f64 {
    spec.nu.iter().map(|&x| binary_entropy(x)).sum()
}

/// Rényi entropy of order `q > 0`. `q = 1` returns the von Neumann entropy
/// and `q = inf` the min-entropy.
pub fn renyi_entropy(spec: &OccupationSpectrum, q: f64) -> Result<f64> {
    if q.is_nan() || q <= 0.0 {
        return Err(Error::param(
            "q",
            format!("Renyi order must be > 0, got {q}"),
        ));
    }
    if q == 1.0 {
        return Ok(von_neumann_entropy(spec));
    }
    if q.is_infinite() {
        return Ok(min_entropy(spec));
    }
    Ok(spec.nu.iter().map(|&x| renyi_mode(x, q)).sum())
}

pub(crate) fn renyi_mode(x: f64, q: f64) -> f64 {
    // x^q + (1-x)^q = 1 + x (x^(q-1) - 1) + (1-x) ((1-x)^(q-1) - 1), which
    // stays accurate as q -> 1
    let shift = |p: f64| {
        if p > 0.0 {
            p * ((q - 1.0) * p.ln()).exp_m1()
        } else {
            0.0
        }
    };
    (shift(x) + shift(1.0 - x)).ln_1p() / (1.0 - q)
}

pub fn min_entropy(spec: &OccupationSpectrum) -> f64 {
    spec.nu.iter().map(|&x| -x.max(1.0 - x).ln()).sum()
}

/// `m(t) = ||X||_F^2`, the number of particles left in the system.
pub fn particle_number(frame: &PropagatedFrame) -> f64 {
    frame.system().norm_squared()
}

/// `I = dm/dt` on a uniform grid: central differences inside, second-order
/// one-sided differences at both ends.
pub fn boundary_current(m: &[f64], dt: f64) -> Result<Vec<f64>> {
    let n = m.len();
    if n < 3 {
        return Err(Error::TooFewSamples {
            needed: 3,
            found: n,
        });
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::param("dt", format!("must be > 0, got {dt}")));
    }
    let mut out = Vec::with_capacity(n);
    out.push((-3.0 * m[0] + 4.0 * m[1] - m[2]) / (2.0 * dt));
    out.extend(m.windows(3).map(|w| (w[2] - w[0]) / (2.0 * dt)));
    out.push((3.0 * m[n - 1] - 4.0 * m[n - 2] + m[n - 3]) / (2.0 * dt));
    Ok(out)
}

/// Stirling estimate of `ln binom(M, m)`:
/// `m ln(M/m) + (M-m) ln(M/(M-m))`. A heuristic, not a strict bound.
pub fn hilbert_bound(m: f64, sites: usize) -> f64 {
    let total = sites as f64;
    let term = |x: f64| if x <= 0.0 { 0.0 } else { x * (total / x).ln() };
    term(m.clamp(0.0, total)) + term((total - m).clamp(0.0, total))
}

/// Mean and variance of `A = sum a_ij f_i^dag f_j` from the full
/// environment block of a complete frame.
///
/// With `C^T = conj(Y) Y^T` restricted to the environment,
/// `<A> = Tr(a C^T)` and `Var A = Tr(a^2 C^T) - Tr(a C^T a C^T)`;
/// in factored form `Var A = ||a Y||^2 - ||Y^dag a Y||^2`.
pub fn env_energy_mean_and_variance(
    frame: &PropagatedFrame,
    h_env: &TridiagonalMatrix,
) -> Result<(f64, f64)> {
    let y = frame
        .environment()
        .ok_or(Error::IncompleteFrame { time: frame.time() })?;
    if h_env.dim() != y.nrows() {
        return Err(Error::Dimension {
            expected: y.nrows(),
            found: h_env.dim(),
        });
    }
    let z = tridiagonal_times(h_env, y);
    let b = y.adjoint() * &z;
    let mean = b.trace().re;
    let var = z.norm_squared() - b.norm_squared();
    Ok((mean, var.max(0.0)))
}

/// Mean and variance of `H_env` from the boundary rows only.
///
/// Writes `h_env = h - b` where `b` holds the system hoppings and the
/// coupling bond. Since `h` commutes with the propagator, `||h W||` and
/// `W^dag h W` are fixed by the initial state, and every time-dependent
/// piece involves `W` on the system sites and the first two environment
/// sites only.
pub fn env_energy_from_boundary(
    frame: &PropagatedFrame,
    h: &TridiagonalMatrix,
    occupied: &InitialOccupation,
) -> Result<(f64, f64)> {
    let m = frame.system_sites();
    let l = m + frame.env_sites();
    if h.dim() != l {
        return Err(Error::Dimension {
            expected: l,
            found: h.dim(),
        });
    }
    let needed_env = (l - m).min(2);
    if frame.environment_head().nrows() < needed_env {
        return Err(Error::IncompleteFrame { time: frame.time() });
    }
    let p = frame.particles();
    // rows 0..=m+1 of W (or fewer on tiny chains)
    let head = m + needed_env;
    let w = CMatrix::from_fn(head, p, |i, j| {
        if i < m {
            frame.system()[(i, j)]
        } else {
            frame.environment_head()[(i - m, j)]
        }
    });
    // block of sites carrying b: system plus contact site
    let nb = m + 1;

    // b W on the block
    let mut bw = CMatrix::zeros(nb, p);
    for i in 0..nb {
        for j in i.saturating_sub(1)..(i + 2).min(nb) {
            let coeff = boundary_entry(h, m, i, j);
            if coeff != 0.0 {
                for c in 0..p {
                    bw[(i, c)] += w[(j, c)] * coeff;
                }
            }
        }
    }
    // h W on the block
    let mut hw = CMatrix::zeros(nb, p);
    for i in 0..nb {
        for j in i.saturating_sub(1)..(i + 2).min(head) {
            let coeff = h.get(i, j);
            if coeff != 0.0 {
                for c in 0..p {
                    hw[(i, c)] += w[(j, c)] * coeff;
                }
            }
        }
    }
    let w_block = w.rows(0, nb);
    let wbw = w_block.adjoint() * &bw;

    let occ = occupied.sites();
    if occ.len() != p {
        return Err(Error::Dimension {
            expected: p,
            found: occ.len(),
        });
    }
    let h_occ = DMatrix::from_fn(p, p, |a, b| C64::new(h.get(occ[a], occ[b]), 0.0));
    let hw_norm_sq: f64 = occ
        .iter()
        .map(|&j| {
            (j.saturating_sub(1)..(j + 2).min(l))
                .map(|i| h.get(i, j).powi(2))
                .sum::<f64>()
        })
        .sum();

    let cross: f64 = hw
        .iter()
        .zip(bw.iter())
        .map(|(a, b)| (a.conj() * b).re)
        .sum();
    let aw_norm_sq = hw_norm_sq - 2.0 * cross + bw.norm_squared();
    let wdag_a_w = h_occ - wbw;
    let mean = wdag_a_w.trace().re;
    let var = aw_norm_sq - wdag_a_w.norm_squared();
    Ok((mean, var.max(0.0)))
}

// entries of H_sys + H_c: system block plus the coupling bond
fn boundary_entry(h: &TridiagonalMatrix, m: usize, i: usize, j: usize) -> f64 {
    if (i < m && j < m) || (i.min(j) == m - 1 && i.max(j) == m) {
        h.get(i, j)
    } else {
        0.0
    }
}

fn tridiagonal_times(h: &TridiagonalMatrix, y: &CMatrix) -> CMatrix {
    let n = h.dim();
    CMatrix::from_fn(n, y.ncols(), |i, c| {
        let mut acc = y[(i, c)] * h.diag()[i];
        if i > 0 {
            acc += y[(i - 1, c)] * h.offdiag()[i - 1];
        }
        if i + 1 < n {
            acc += y[(i + 1, c)] * h.offdiag()[i];
        }
        acc
    })
}

/// Variance of `A = sum a_ij a_i^dag a_j` in a Fock product state:
/// `sum_{i in occ} (a^2)_ii - sum_{i,j in occ} a_ij^2`.
pub fn product_state_variance(a: &TridiagonalMatrix, occupied: &InitialOccupation) -> f64 {
    let n = a.dim();
    let occ = occupied.sites();
    let diag_sq: f64 = occ
        .iter()
        .map(|&i| {
            (i.saturating_sub(1)..(i + 2).min(n))
                .map(|k| a.get(i, k).powi(2))
                .sum::<f64>()
        })
        .sum();
    let block: f64 = occ
        .iter()
        .flat_map(|&i| occ.iter().map(move |&j| (i, j)))
        .map(|(i, j)| a.get(i, j).powi(2))
        .sum();
    diag_sq - block
}

/// Conserved energy variance of the quench, fixed at `t = 0` where only the
/// coupling term fluctuates. Evaluates to `g^2`.
pub fn total_energy_variance_t0(params: &ModelParams) -> Result<f64> {
    params.validate()?;
    let l = params.total_sites();
    let mut off = vec![0.0; l - 1];
    off[params.system_sites - 1] = params.coupling;
    let coupling = TridiagonalMatrix::new(vec![0.0; l], off)?;
    Ok(product_state_variance(
        &coupling,
        &crate::model::initial_occupation(params),
    ))
}

/// Entanglement Hamiltonian `ln((1 - C)/C)` of the system block, with
/// occupations clamped to `[1e-12, 1 - 1e-12]` to keep it finite.
pub fn entanglement_hamiltonian(frame: &PropagatedFrame) -> CMatrix {
    let eig = frame.system_correlation().symmetric_eigen();
    let levels = eig.eigenvalues.map(|nu| {
        let nu = nu.clamp(1e-12, 1.0 - 1e-12);
        C64::new(((1.0 - nu) / nu).ln(), 0.0)
    });
    let u = &eig.eigenvectors;
    u * CMatrix::from_diagonal(&levels) * u.adjoint()
}

/// Rényi order and value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RenyiValue {
    pub q: f64,
    pub value: f64,
}

/// Everything tracked per time sample. Entropies in nats.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObservableRecord {
    pub time: f64,
    pub m: f64,
    pub s_vn: f64,
    pub s_renyi: Vec<RenyiValue>,
    pub s_min: f64,
    pub henv_mean: f64,
    pub henv_var: f64,
    pub bound: f64,
    pub nu_raw_min: f64,
    pub nu_raw_max: f64,
}

impl ObservableRecord {
    pub fn evaluate(
        frame: &PropagatedFrame,
        h: &TridiagonalMatrix,
        occupied: &InitialOccupation,
        renyi_orders: &[f64],
    ) -> Result<Self> {
        let spec = occupation_spectrum(frame)?;
        let m = particle_number(frame);
        let s_renyi = renyi_orders
            .iter()
            .map(|&q| {
                Ok(RenyiValue {
                    q,
                    value: renyi_entropy(&spec, q)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let (henv_mean, henv_var) = env_energy_from_boundary(frame, h, occupied)?;
        Ok(ObservableRecord {
            time: frame.time(),
            m,
            s_vn: von_neumann_entropy(&spec),
            s_renyi,
            s_min: min_entropy(&spec),
            henv_mean,
            henv_var,
            bound: hilbert_bound(m, frame.system_sites()),
            nu_raw_min: spec.raw_min(),
            nu_raw_max: spec.raw_max(),
        })
    }

    pub fn renyi(&self, q: f64) -> Option<f64> {
        self.s_renyi.iter().find(|r| r.q == q).map(|r| r.value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolve::{Propagator, RowCoverage};
    use crate::model::{build_hamiltonian, environment_hamiltonian, initial_occupation};
    use proptest::prelude::*;

    fn spec(nu: &[f64]) -> OccupationSpectrum {
        OccupationSpectrum::new(nu.to_vec()).unwrap()
    }

    const LN2: f64 = std::f64::consts::LN_2;

    #[test]
    fn von_neumann_values() {
        assert_eq!(von_neumann_entropy(&spec(&[1.0, 1.0, 1.0])), 0.0);
        assert!((von_neumann_entropy(&spec(&[0.5])) - LN2).abs() < 1e-15);
        let want = 2.0 * (-0.9 * 0.9f64.ln() - 0.1 * 0.1f64.ln());
        assert!((von_neumann_entropy(&spec(&[0.9, 0.1])) - want).abs() < 1e-14);
        assert!((want - 0.6502).abs() < 1e-4);
    }

    #[test]
    fn renyi_values() {
        assert!((renyi_entropy(&spec(&[0.5]), 2.0).unwrap() - LN2).abs() < 1e-15);
        assert_eq!(renyi_entropy(&spec(&[1.0]), 3.0).unwrap(), 0.0);
        let got = renyi_entropy(&spec(&[0.9]), 2.0).unwrap();
        assert!((got + 0.82f64.ln()).abs() < 1e-14);
        assert!((got - 0.19845).abs() < 1e-5);
        assert!(renyi_entropy(&spec(&[0.5]), 0.0).is_err());
        assert!(renyi_entropy(&spec(&[0.5]), -1.0).is_err());
        let s = spec(&[0.3, 0.8]);
        assert_eq!(renyi_entropy(&s, 1.0).unwrap(), von_neumann_entropy(&s));
        assert_eq!(renyi_entropy(&s, f64::INFINITY).unwrap(), min_entropy(&s));
        // approach to q = 1 from either side
        for q in [1.0 - 1e-6, 1.0 + 1e-6] {
            assert!((renyi_entropy(&s, q).unwrap() - von_neumann_entropy(&s)).abs() < 1e-5);
        }
    }

    #[test]
    fn min_entropy_values() {
        assert!((min_entropy(&spec(&[0.5])) - LN2).abs() < 1e-15);
        assert_eq!(min_entropy(&spec(&[1.0, 0.0])), 0.0);
        assert!((min_entropy(&spec(&[0.75])) + 0.75f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn spectrum_clamps_roundoff_and_rejects_garbage() {
        let s = spec(&[1.0 + 5e-10, -3e-10, 0.4]);
        assert_eq!(s.values(), &[1.0, 0.4, 0.0]);
        assert!(s.raw_max() > 1.0 && s.raw_min() < 0.0);
        assert!(matches!(
            OccupationSpectrum::new(vec![1.1]),
            Err(Error::CorruptFrame { .. })
        ));
        assert!(OccupationSpectrum::new(vec![-1e-3]).is_err());
    }

    #[test]
    fn hilbert_bound_values() {
        assert!((hilbert_bound(5.0, 10) - 10.0 * LN2).abs() < 1e-13);
        assert_eq!(hilbert_bound(0.0, 10), 0.0);
        assert_eq!(hilbert_bound(10.0, 10), 0.0);
        let want = 100.0 * (0.25 * 4f64.ln() + 0.75 * (4.0f64 / 3.0).ln());
        assert!((hilbert_bound(25.0, 100) - want).abs() < 1e-12);
        assert!((want - 56.23).abs() < 5e-3);
    }

    #[test]
    fn current_of_simple_series() {
        assert!(boundary_current(&[3.0; 5], 0.1)
            .unwrap()
            .iter()
            .all(|&x| x == 0.0));
        assert!(boundary_current(&[1.0, 2.0], 0.1).is_err());

        let gamma = 0.3;
        let m0 = 5.0;
        for dt in [0.1, 0.05] {
            let m: Vec<f64> = (0..50)
                .map(|i| m0 * (-gamma * i as f64 * dt).exp())
                .collect();
            let cur = boundary_current(&m, dt).unwrap();
            let err = cur
                .iter()
                .zip(&m)
                .map(|(c, x)| (c + gamma * x).abs())
                .fold(0.0, f64::max);
            // error constant of the one-sided stencil: gamma^3 dt^2 / 3 * m0
            assert!(err < gamma.powi(3) * dt * dt * m0 / 2.0, "dt={dt}: {err}");
        }

        let cur = boundary_current(&[4.0, 3.0, 3.0, 2.0], 1.0).unwrap();
        assert_eq!(cur[1], -0.5);
    }

    #[test]
    fn initial_frame_observables() {
        let p = ModelParams::new(3, 7, 1.0, 4.0, 0.5).unwrap();
        let prop = Propagator::new(&p, RowCoverage::Complete).unwrap();
        let f = prop.frame(0.0);
        let s = occupation_spectrum(&f).unwrap();
        assert!(s.values().iter().all(|&x| (x - 1.0).abs() < 1e-14));
        assert!((particle_number(&f) - 3.0).abs() < 1e-14);
        let (mean, var) =
            env_energy_mean_and_variance(&f, &environment_hamiltonian(&p).unwrap()).unwrap();
        assert!(mean.abs() < 1e-14 && var.abs() < 1e-14);
        let (mean, var) =
            env_energy_from_boundary(&f, prop.hamiltonian(), prop.occupation()).unwrap();
        assert!(mean.abs() < 1e-14 && var.abs() < 1e-13);
    }

    #[test]
    fn two_site_half_transfer() {
        let g = 0.9;
        let p = ModelParams::new(1, 1, 1.0, 1.0, g).unwrap();
        let prop = Propagator::new(&p, RowCoverage::Complete).unwrap();
        let f = prop.frame(std::f64::consts::FRAC_PI_4 / g);
        let s = occupation_spectrum(&f).unwrap();
        assert!((s.values()[0] - 0.5).abs() < 1e-14);
        let f = prop.frame(std::f64::consts::FRAC_PI_2 / g);
        assert!(particle_number(&f).abs() < 1e-14);
    }

    #[test]
    fn particle_in_environment_eigenmode_has_sharp_energy() {
        // a single occupied orbital equal to an environment eigenmode
        let p = ModelParams::new(1, 6, 1.0, 2.0, 0.0).unwrap();
        let modes = crate::spectral::uniform_chain_modes(6, 2.0).unwrap();
        let y = CMatrix::from_fn(6, 1, |i, _| C64::new(modes.components()[(i, 2)], 0.0));
        let frame = PropagatedFrame::from_parts(0.0, CMatrix::zeros(1, 1), y, 6).unwrap();
        let (mean, var) =
            env_energy_mean_and_variance(&frame, &environment_hamiltonian(&p).unwrap()).unwrap();
        assert!((mean - modes.eigenvalues()[2]).abs() < 1e-13);
        assert!(var.abs() < 1e-13);
    }

    #[test]
    fn boundary_and_full_variance_routes_agree() {
        for (m, n, g, te) in [
            (1, 1, 0.5, 1.0),
            (1, 2, 0.7, 1.0),
            (3, 9, 0.5, 4.0),
            (4, 20, 0.8, 1.0),
            (6, 5, 0.35, 2.0),
        ] {
            let p = ModelParams::new(m, n, 1.0, te, g).unwrap();
            let prop = Propagator::new(&p, RowCoverage::Complete).unwrap();
            let h_env = environment_hamiltonian(&p).unwrap();
            for t in [0.3, 4.0, 31.0, 400.0] {
                let f = prop.frame(t);
                let a = env_energy_mean_and_variance(&f, &h_env).unwrap();
                let b =
                    env_energy_from_boundary(&f, prop.hamiltonian(), prop.occupation()).unwrap();
                assert!(
                    (a.0 - b.0).abs() < 1e-10 && (a.1 - b.1).abs() < 1e-10,
                    "M={m} N={n} t={t}: {a:?} {b:?}"
                );
            }
        }
    }

    #[test]
    fn total_variance_is_coupling_squared() {
        for (m, g) in [(1, 0.7), (4, 0.5), (50, 0.35)] {
            let p = ModelParams::new(m, 10, 1.0, 4.0, g).unwrap();
            assert!((total_energy_variance_t0(&p).unwrap() - g * g).abs() < 1e-15);
            // the full H has the same variance at t = 0
            let h = build_hamiltonian(&p).unwrap();
            assert!((product_state_variance(&h, &initial_occupation(&p)) - g * g).abs() < 1e-13);
        }
        let p = ModelParams::new(3, 3, 1.0, 1.0, 0.0).unwrap();
        assert_eq!(total_energy_variance_t0(&p).unwrap(), 0.0);
    }

    #[test]
    fn system_and_environment_blocks_share_entropy() {
        let p = ModelParams::new(3, 8, 1.0, 2.0, 0.6).unwrap();
        let prop = Propagator::new(&p, RowCoverage::Complete).unwrap();
        for t in [1.0, 7.0, 40.0] {
            let f = prop.frame(t);
            let y = f.environment().unwrap();
            let c_env = y * y.adjoint();
            let env_nu: Vec<f64> = c_env.symmetric_eigenvalues().iter().copied().collect();
            let env = OccupationSpectrum::new(env_nu).unwrap();
            let sys = occupation_spectrum(&f).unwrap();
            assert!((von_neumann_entropy(&env) - von_neumann_entropy(&sys)).abs() < 1e-8);
            assert!(
                (renyi_entropy(&env, 2.0).unwrap() - renyi_entropy(&sys, 2.0).unwrap()).abs()
                    < 1e-8
            );
        }
    }

    #[test]
    fn decoupled_observables_are_constant() {
        let p = ModelParams::new(3, 5, 1.0, 1.0, 0.0).unwrap();
        let prop = Propagator::new(&p, RowCoverage::Boundary).unwrap();
        for t in [0.0, 3.0, 90.0] {
            let r = ObservableRecord::evaluate(
                &prop.frame(t),
                prop.hamiltonian(),
                prop.occupation(),
                &[2.0],
            )
            .unwrap();
            assert!((r.m - 3.0).abs() < 1e-12);
            assert!(r.s_vn.abs() < 1e-10 && r.s_min.abs() < 1e-10);
            assert!(r.henv_var.abs() < 1e-12 && r.henv_mean.abs() < 1e-12);
        }
    }

    #[test]
    fn entanglement_hamiltonian_reproduces_correlations() {
        let p = ModelParams::new(3, 10, 1.0, 4.0, 0.8).unwrap();
        let prop = Propagator::new(&p, RowCoverage::Boundary).unwrap();
        let f = prop.frame(25.0);
        let h = entanglement_hamiltonian(&f);
        // C = 1 / (exp(h) + 1)
        let eig = h.symmetric_eigen();
        let c = &eig.eigenvectors
            * CMatrix::from_diagonal(
                &eig.eigenvalues
                    .map(|e| C64::new(1.0 / (e.exp() + 1.0), 0.0)),
            )
            * eig.eigenvectors.adjoint();
        let diff = c - f.system_correlation();
        assert!(diff.iter().all(|z| z.norm() < 1e-9));
    }

    proptest! {
        #[test]
        fn entropy_ordering(nu in proptest::collection::vec(0.0f64..=1.0, 1..12)) {
            let s = spec(&nu);
            let vn = von_neumann_entropy(&s);
            let s2 = renyi_entropy(&s, 2.0).unwrap();
            let smin = min_entropy(&s);
            prop_assert!(smin <= s2 + 1e-12);
            prop_assert!(s2 <= vn + 1e-12);
            prop_assert!(vn <= nu.len() as f64 * LN2 + 1e-12);
            prop_assert!(smin >= 0.0);
        }

        #[test]
        fn conservation_along_time(t in 0.0f64..500.0, g in 0.0f64..1.0) {
            let p = ModelParams::new(3, 9, 1.0, 4.0, g).unwrap();
            let prop = Propagator::new(&p, RowCoverage::Complete).unwrap();
            let f = prop.frame(t);
            let total = particle_number(&f) + f.environment().unwrap().norm_squared();
            prop_assert!((total - 3.0).abs() < 1e-9);
            let s = occupation_spectrum(&f).unwrap();
            prop_assert!((s.total() - particle_number(&f)).abs() < 1e-10);
            let (_, var) = env_energy_from_boundary(&f, prop.hamiltonian(), prop.occupation()).unwrap();
            prop_assert!(var >= 0.0);
        }
    }
}
