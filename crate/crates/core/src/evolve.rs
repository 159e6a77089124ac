//! Exact time evolution of the one-particle correlation matrix.
//!
//! With `W(t) = exp(+i h t) = V diag(e^{i eps_k t}) V^T`, the state at time
//! `t` has `C(t) = W_occ W_occ^dag`, where `W_occ` holds the columns of `W`
//! belonging to initially filled sites. A frame stores the rows of `W_occ`
//! on the system (`X`) and on the environment (`Y`), so
//! `C_sys = X X^dag`, `C_env = Y Y^dag` and `C_sys,env = X Y^dag`.
//! Every frame is computed directly from the eigensystem; nothing is
//! stepped, so errors do not accumulate along a time grid.

use nalgebra::{Complex, DMatrix};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{build_hamiltonian, initial_occupation, InitialOccupation, ModelParams};
use crate::spectral::{eigendecompose_rows, SpectralDecomposition, TridiagonalMatrix};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;

/// Which rows of the propagator a frame carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RowCoverage {
    /// Every site; frames expose the full environment block `Y`.
    Complete,
    /// System sites plus the first two environment sites. Enough for every
    /// observable in [`crate::observables`] and `O(L M)` memory.
    #[default]
    Boundary,
}

/// Time-stamped low-rank factors of the correlation matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct PropagatedFrame {
    time: f64,
    system: CMatrix,
    environment: CMatrix,
    env_sites: usize,
}

impl PropagatedFrame {
    /// Assembles a frame from explicit factors. `environment` holds the
    /// leading environment rows (all `env_sites` of them for a complete frame).
    pub fn from_parts(
        time: f64,
        system: CMatrix,
        environment: CMatrix,
        env_sites: usize,
    ) -> Result<Self> {
        if environment.ncols() != system.ncols() {
            return Err(Error::Dimension {
                expected: system.ncols(),
                found: environment.ncols(),
            });
        }
        if environment.nrows() > env_sites {
            return Err(Error::Dimension {
                expected: env_sites,
                found: environment.nrows(),
            });
        }
        Ok(PropagatedFrame {
            time,
            system,
            environment,
            env_sites,
        })
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    /// `X`: system rows by occupied columns.
    pub fn system(&self) -> &CMatrix {
        &self.system
    }

    /// `Y`: all environment rows by occupied columns, when the frame is complete.
    pub fn environment(&self) -> Option<&CMatrix> {
        self.is_complete().then_some(&self.environment)
    }

    /// The leading environment rows present in this frame (all of them for
    /// complete frames, the first two for boundary frames).
    pub fn environment_head(&self) -> &CMatrix {
        &self.environment
    }

    pub fn is_complete(&self) -> bool {
        self.environment.nrows() == self.env_sites
    }

    pub fn system_sites(&self) -> usize {
        self.system.nrows()
    }

    pub fn env_sites(&self) -> usize {
        self.env_sites
    }

    /// Number of initially occupied orbitals.
    pub fn particles(&self) -> usize {
        self.system.ncols()
    }

    /// `C_sys = X X^dag`.
    pub fn system_correlation(&self) -> CMatrix {
        &self.system * self.system.adjoint()
    }

    /// `C_ij = <a_i^dag a_j>` for two carried sites.
    pub fn correlation(&self, i: usize, j: usize) -> Option<C64> {
        let ri = self.row_slice(i)?;
        let rj = self.row_slice(j)?;
        Some(ri.iter().zip(&rj).map(|(a, b)| a * b.conj()).sum())
    }

    fn row_slice(&self, site: usize) -> Option<Vec<C64>> {
        let m = self.system_sites();
        let (mat, r) = if site < m {
            (&self.system, site)
        } else if site - m < self.environment.nrows() {
            (&self.environment, site - m)
        } else {
            return None;
        };
        Some((0..mat.ncols()).map(|c| mat[(r, c)]).collect())
    }
}

const TWO_PI_HI: f64 = std::f64::consts::TAU;
const TWO_PI_LO: f64 = 2.449_293_598_294_706_4e-16;

/// `energy * t` reduced to `[-pi, pi]`, carrying the rounding error of the
/// product and of `2 pi` so large times keep full phase accuracy.
pub fn reduced_phase(energy: f64, t: f64) -> f64 {
    let hi = energy * t;
    let lo = energy.mul_add(t, -hi);
    let turns = (hi / TWO_PI_HI).round();
    turns.mul_add(-TWO_PI_HI, hi) - turns * TWO_PI_LO + lo
}

/// Shared, immutable state needed to produce frames for one model.
#[derive(Debug, Clone)]
pub struct Propagator {
    spectrum: SpectralDecomposition,
    hamiltonian: TridiagonalMatrix,
    system_sites: usize,
    env_sites: usize,
    occupied: InitialOccupation,
    // stored rows that make up the frame: system then the environment prefix
    output_rows: Vec<usize>,
    env_rows: usize,
    // V restricted to occupied sites, transposed: L x P
    occupied_modes: DMatrix<f64>,
}

impl Propagator {
    /// Diagonalises the model Hamiltonian and prepares the quench from the
    /// filled system.
    pub fn new(params: &ModelParams, coverage: RowCoverage) -> Result<Self> {
        let h = build_hamiltonian(params)?;
        let occ = initial_occupation(params);
        let l = params.total_sites();
        let mut rows: Vec<usize> = match coverage {
            RowCoverage::Complete => (0..l).collect(),
            RowCoverage::Boundary => (0..(params.system_sites + 2).min(l)).collect(),
        };
        rows.extend_from_slice(occ.sites());
        let spectrum = eigendecompose_rows(&h, &rows)?;
        Self::from_spectrum(spectrum, h, params.system_sites, occ)
    }

    /// Wraps an existing decomposition of `hamiltonian`. The decomposition
    /// must carry every system row and every occupied row.
    pub fn from_spectrum(
        spectrum: SpectralDecomposition,
        hamiltonian: TridiagonalMatrix,
        system_sites: usize,
        occupied: InitialOccupation,
    ) -> Result<Self> {
        let l = spectrum.dim();
        if hamiltonian.dim() != l {
            return Err(Error::Dimension {
                expected: l,
                found: hamiltonian.dim(),
            });
        }
        if system_sites == 0 || system_sites >= l {
            return Err(Error::param(
                "M",
                format!("system size {system_sites} incompatible with L = {l}"),
            ));
        }
        for site in (0..system_sites).chain(occupied.sites().iter().copied()) {
            if spectrum.row_index(site).is_none() {
                return Err(Error::MissingRows { row: site + 1 });
            }
        }
        let mut output_rows: Vec<usize> = (0..system_sites).collect();
        let mut next = system_sites;
        while next < l && spectrum.row_index(next).is_some() {
            output_rows.push(next);
            next += 1;
        }
        let env_rows = next - system_sites;

        let p = occupied.len();
        let comps = spectrum.components();
        let mut occupied_modes = DMatrix::zeros(l, p);
        for (c, &site) in occupied.sites().iter().enumerate() {
            let r = spectrum.row_index(site).expect("checked above");
            for k in 0..l {
                occupied_modes[(k, c)] = comps[(r, k)];
            }
        }
        Ok(Propagator {
            spectrum,
            hamiltonian,
            system_sites,
            env_sites: l - system_sites,
            occupied,
            output_rows,
            env_rows,
            occupied_modes,
        })
    }

    pub fn spectrum(&self) -> &SpectralDecomposition {
        &self.spectrum
    }

    pub fn hamiltonian(&self) -> &TridiagonalMatrix {
        &self.hamiltonian
    }

    pub fn occupation(&self) -> &InitialOccupation {
        &self.occupied
    }

    pub fn system_sites(&self) -> usize {
        self.system_sites
    }

    pub fn env_sites(&self) -> usize {
        self.env_sites
    }

    pub fn is_complete(&self) -> bool {
        self.env_rows == self.env_sites
    }

    /// Frame at time `t`. Negative times are allowed and give the complex
    /// conjugate of the frame at `-t`.
    pub fn frame(&self, t: f64) -> PropagatedFrame {
        let l = self.spectrum.dim();
        let comps = self.spectrum.components();
        let (cos, sin): (Vec<f64>, Vec<f64>) = self
            .spectrum
            .eigenvalues()
            .iter()
            .map(|&e| {
                let (s, c) = reduced_phase(e, t).sin_cos();
                (c, s)
            })
            .unzip();
        let r = self.output_rows.len();
        let mut re_rows = DMatrix::zeros(r, l);
        let mut im_rows = DMatrix::zeros(r, l);
        for (out, &site) in self.output_rows.iter().enumerate() {
            let src = self.spectrum.row_index(site).expect("validated rows");
            for k in 0..l {
                let v = comps[(src, k)];
                re_rows[(out, k)] = v * cos[k];
                im_rows[(out, k)] = v * sin[k];
            }
        }
        let re = re_rows * &self.occupied_modes;
        let im = im_rows * &self.occupied_modes;
        let p = self.occupied.len();
        let m = self.system_sites;
        let system = CMatrix::from_fn(m, p, |i, j| C64::new(re[(i, j)], im[(i, j)]));
        let environment = CMatrix::from_fn(self.env_rows, p, |i, j| {
            C64::new(re[(m + i, j)], im[(m + i, j)])
        });
        PropagatedFrame {
            time: t,
            system,
            environment,
            env_sites: self.env_sites,
        }
    }

    /// Frames for every time, computed independently (in parallel on the
    /// current rayon pool).
    pub fn frames(&self, times: &[f64]) -> Vec<PropagatedFrame> {
        times.par_iter().map(|&t| self.frame(t)).collect()
    }
}

/// Single frame from a decomposition that covers the system and occupied rows.
pub fn propagate(
    spectrum: &SpectralDecomposition,
    hamiltonian: &TridiagonalMatrix,
    system_sites: usize,
    occupied: &InitialOccupation,
    t: f64,
) -> Result<PropagatedFrame> {
    let prop = Propagator::from_spectrum(
        spectrum.clone(),
        hamiltonian.clone(),
        system_sites,
        occupied.clone(),
    )?;
    Ok(prop.frame(t))
}

/// Frames of the quench on an ascending time grid.
pub fn evolve_grid(
    params: &ModelParams,
    times: &[f64],
    coverage: RowCoverage,
) -> Result<Vec<PropagatedFrame>> {
    if let Some(w) = times
        .windows(2)
        .find(|w| w[0] > w[1] || w[0].is_nan() || w[1].is_nan())
    {
        return Err(Error::param(
            "times",
            format!("grid not ascending at {} -> {}", w[0], w[1]),
        ));
    }
    let prop = Propagator::new(params, coverage)?;
    Ok(prop.frames(times))
}

/// `J_0(x) .. J_n(x)` by Miller's backward recurrence, normalised with
/// `J_0 + 2 sum J_2k = 1`.
pub(crate) fn bessel_j_sequence(x: f64, n: usize) -> Vec<f64> {
    if x == 0.0 {
        let mut out = vec![0.0; n + 1];
        out[0] = 1.0;
        return out;
    }
    let start = n + 20 + x.abs() as usize + (10.0 * x.abs().cbrt()) as usize;
    let mut vals = vec![0.0; start + 2];
    vals[start] = 1e-30;
    for k in (1..=start).rev() {
        vals[k - 1] = 2.0 * k as f64 / x * vals[k] - vals[k + 1];
        if vals[k - 1].abs() > 1e250 {
            for v in vals.iter_mut().skip(k - 1) {
                *v *= 1e-250;
            }
        }
    }
    let norm = vals[0] + 2.0 * vals.iter().skip(2).step_by(2).sum::<f64>();
    vals.truncate(n + 1);
    vals.iter().map(|v| v / norm).collect()
}

/// Number of Chebyshev terms for `exp(i x cos theta)` to reach round-off.
pub(crate) fn chebyshev_terms(x: f64) -> usize {
    (x.abs() + 15.0 * x.abs().cbrt() + 30.0) as usize
}

/// Longest single Chebyshev step, in units of `1 / ||h||`.
const MAX_CHEBYSHEV_ARGUMENT: f64 = 400.0;

/// Time stepping of the occupied columns `W(t) e_j` by Chebyshev expansion
/// of `exp(i h dt)`. Needs no diagonalisation and always carries every
/// row, at `O(L P)` memory; used as an independent route to the
/// environment block on large chains.
#[derive(Debug, Clone)]
pub struct ChebyshevPropagator {
    hamiltonian: TridiagonalMatrix,
    system_sites: usize,
    columns: CMatrix,
    time: f64,
    center: f64,
    radius: f64,
}

// out = 2 a (H - shift)/scale x - out (or a (H - shift)/scale x when `first`),
// column by column on contiguous storage; acc += coef * out.
#[allow(clippy::too_many_arguments)]
fn chebyshev_update(
    d: &[f64],
    e: &[f64],
    shift: f64,
    scale: f64,
    x: &[C64],
    out: &mut [C64],
    acc: &mut [C64],
    coef: C64,
    first: bool,
) {
    let l = d.len();
    let (f, keep) = if first {
        (1.0 / scale, 0.0)
    } else {
        (2.0 / scale, 1.0)
    };
    for ((xc, oc), ac) in x
        .chunks_exact(l)
        .zip(out.chunks_exact_mut(l))
        .zip(acc.chunks_exact_mut(l))
    {
        for i in 0..l {
            let mut hx = xc[i] * (d[i] - shift);
            if i > 0 {
                hx += xc[i - 1] * e[i - 1];
            }
            if i + 1 < l {
                hx += xc[i + 1] * e[i];
            }
            let v = hx * f - oc[i] * keep;
            oc[i] = v;
            ac[i] += v * coef;
        }
    }
}

impl ChebyshevPropagator {
    pub fn new(params: &ModelParams) -> Result<Self> {
        let h = build_hamiltonian(params)?;
        let occ = initial_occupation(params);
        let l = h.dim();
        let mut columns = CMatrix::zeros(l, occ.len());
        for (c, &site) in occ.sites().iter().enumerate() {
            columns[(site, c)] = C64::new(1.0, 0.0);
        }
        let (d, e) = (h.diag(), h.offdiag());
        let (lo, hi) = (0..l).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), i| {
            let r =
                if i > 0 { e[i - 1].abs() } else { 0.0 } + if i + 1 < l { e[i].abs() } else { 0.0 };
            (lo.min(d[i] - r), hi.max(d[i] + r))
        });
        Ok(ChebyshevPropagator {
            hamiltonian: h,
            system_sites: params.system_sites,
            columns,
            time: 0.0,
            center: 0.5 * (hi + lo),
            radius: (0.5 * (hi - lo)).max(1e-12) * 1.01,
        })
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    /// Moves forward (or backward) to time `t`.
    pub fn advance_to(&mut self, t: f64) -> Result<()> {
        if !t.is_finite() {
            return Err(Error::param("t", format!("must be finite, got {t}")));
        }
        let total = t - self.time;
        let steps = (total.abs() * self.radius / MAX_CHEBYSHEV_ARGUMENT)
            .ceil()
            .max(1.0) as usize;
        let dt = total / steps as f64;
        for _ in 0..steps {
            self.step(dt);
        }
        self.time = t;
        Ok(())
    }

    fn step(&mut self, dt: f64) {
        if dt == 0.0 {
            return;
        }
        let x = self.radius * dt;
        let bessel = bessel_j_sequence(x, chebyshev_terms(x));
        let (d, e) = (self.hamiltonian.diag(), self.hamiltonian.offdiag());
        let mut prev = self.columns.clone();
        let mut acc = &prev * C64::new(bessel[0], 0.0);
        let mut cur = CMatrix::zeros(prev.nrows(), prev.ncols());
        let i = C64::new(0.0, 1.0);
        let mut phase = i;
        chebyshev_update(
            d,
            e,
            self.center,
            self.radius,
            prev.as_slice(),
            cur.as_mut_slice(),
            acc.as_mut_slice(),
            phase * 2.0 * bessel[1],
            true,
        );
        for &jk in bessel.iter().skip(2) {
            phase *= i;
            // T_{k+1} = 2 H' T_k - T_{k-1}, written over T_{k-1}
            chebyshev_update(
                d,
                e,
                self.center,
                self.radius,
                cur.as_slice(),
                prev.as_mut_slice(),
                acc.as_mut_slice(),
                phase * 2.0 * jk,
                false,
            );
            std::mem::swap(&mut prev, &mut cur);
        }
        let (s, c) = reduced_phase(self.center, dt).sin_cos();
        self.columns = acc * C64::new(c, s);
    }

    /// Complete frame at the current time.
    pub fn frame(&self) -> PropagatedFrame {
        let m = self.system_sites;
        let l = self.columns.nrows();
        PropagatedFrame {
            time: self.time,
            system: self.columns.rows(0, m).into_owned(),
            environment: self.columns.rows(m, l - m).into_owned(),
            env_sites: l - m,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_abs(m: &CMatrix) -> f64 {
        m.iter().fold(0.0, |a, x| a.max(x.norm()))
    }

    fn stacked(frame: &PropagatedFrame) -> CMatrix {
        let x = frame.system();
        let y = frame.environment().unwrap();
        let mut w = CMatrix::zeros(x.nrows() + y.nrows(), x.ncols());
        w.rows_mut(0, x.nrows()).copy_from(x);
        w.rows_mut(x.nrows(), y.nrows()).copy_from(y);
        w
    }

    #[test]
    fn phase_reduction() {
        assert_eq!(reduced_phase(0.0, 1e4), 0.0);
        assert!((reduced_phase(1.0, 1.0) - 1.0).abs() < 1e-16);
        let x = reduced_phase(3.7, 12_345.6);
        assert!(x.abs() <= std::f64::consts::PI + 1e-12);
        assert!(((3.7f64 * 12_345.6).sin() - x.sin()).abs() < 1e-11);
        assert_eq!(reduced_phase(2.3, -77.0), -reduced_phase(2.3, 77.0));
    }

    #[test]
    fn identity_at_time_zero() {
        let p = ModelParams::new(3, 5, 1.0, 4.0, 0.5).unwrap();
        let prop = Propagator::new(&p, RowCoverage::Complete).unwrap();
        let f = prop.frame(0.0);
        assert!(max_abs(&(f.system() - CMatrix::identity(3, 3))) < 1e-14);
        assert!(max_abs(f.environment().unwrap()) < 1e-14);
    }

    #[test]
    fn two_site_rabi_oscillation() {
        let g = 0.7;
        let p = ModelParams::new(1, 1, 1.0, 1.0, g).unwrap();
        let prop = Propagator::new(&p, RowCoverage::Complete).unwrap();
        for t in [0.0, 0.3, 1.1, 2.5, 40.0] {
            let f = prop.frame(t);
            let want = (g * t).cos().powi(2);
            assert!(
                (f.system()[(0, 0)].norm_sqr() - want).abs() < 1e-14,
                "t={t}"
            );
        }
    }

    #[test]
    fn unitarity_and_particle_conservation() {
        let p = ModelParams::new(4, 9, 1.0, 4.0, 0.8).unwrap();
        let prop = Propagator::new(&p, RowCoverage::Complete).unwrap();
        for t in [0.0, 0.7, 13.0, 250.0, 1e4] {
            let f = prop.frame(t);
            let w = stacked(&f);
            let gram = w.adjoint() * &w - CMatrix::identity(4, 4);
            assert!(max_abs(&gram) < 1e-9);
            let total = f.system().norm_squared() + f.environment().unwrap().norm_squared();
            assert!((total - 4.0).abs() < 1e-9);
        }
    }

    #[test]
    fn time_reversal_is_conjugation() {
        let p = ModelParams::new(3, 6, 1.0, 2.0, 0.6).unwrap();
        let prop = Propagator::new(&p, RowCoverage::Complete).unwrap();
        for t in [0.4, 9.0, 123.4] {
            let fwd = prop.frame(t);
            let back = prop.frame(-t);
            assert_eq!(back.system(), &fwd.system().map(|z| z.conj()));
            assert_eq!(
                back.environment_head(),
                &fwd.environment_head().map(|z| z.conj())
            );
        }
    }

    #[test]
    fn decoupled_system_stays_put() {
        let p = ModelParams::new(4, 6, 1.0, 4.0, 0.0).unwrap();
        let prop = Propagator::new(&p, RowCoverage::Complete).unwrap();
        for t in [0.5, 17.0, 300.0] {
            let f = prop.frame(t);
            let x = f.system();
            assert!(max_abs(&(x.adjoint() * x - CMatrix::identity(4, 4))) < 1e-12);
            assert!(max_abs(f.environment().unwrap()) < 1e-14);
        }
    }

    #[test]
    fn boundary_rows_match_complete_rows() {
        let p = ModelParams::new(5, 30, 1.0, 4.0, 0.5).unwrap();
        let full = Propagator::new(&p, RowCoverage::Complete).unwrap();
        let part = Propagator::new(&p, RowCoverage::Boundary).unwrap();
        assert!(!part.is_complete());
        for t in [1.0, 55.5] {
            let a = full.frame(t);
            let b = part.frame(t);
            assert!(b.environment().is_none());
            assert_eq!(b.environment_head().nrows(), 2);
            assert!(max_abs(&(a.system() - b.system())) < 1e-12);
            let head = a.environment().unwrap().rows(0, 2).into_owned();
            assert!(max_abs(&(head - b.environment_head())) < 1e-12);
        }
    }

    #[test]
    fn grid_is_deterministic_and_checked() {
        let p = ModelParams::new(3, 12, 1.0, 4.0, 0.5).unwrap();
        let frames = evolve_grid(&p, &[2.0, 2.0], RowCoverage::Boundary).unwrap();
        assert_eq!(frames[0], frames[1]);
        let one = evolve_grid(&p, &[0.0], RowCoverage::Boundary).unwrap();
        assert!(max_abs(&(one[0].system() - CMatrix::identity(3, 3))) < 1e-14);
        assert!(evolve_grid(&p, &[1.0, 0.5], RowCoverage::Boundary).is_err());
    }

    #[test]
    fn missing_rows_are_reported() {
        let p = ModelParams::new(3, 4, 1.0, 1.0, 0.5).unwrap();
        let h = build_hamiltonian(&p).unwrap();
        let spec = eigendecompose_rows(&h, &[0, 1]).unwrap();
        let err = propagate(&spec, &h, 3, &initial_occupation(&p), 1.0).unwrap_err();
        assert!(matches!(err, Error::MissingRows { row: 3 }));
    }

    /// Classical RK4 on dW/dt = i h W for the occupied columns.
    fn rk4_columns(h: &TridiagonalMatrix, occ: &[usize], t_end: f64, dt: f64) -> CMatrix {
        let l = h.dim();
        let dense = h.to_dense().map(|x| C64::new(x, 0.0));
        let i = C64::new(0.0, 1.0);
        let mut w = CMatrix::from_fn(l, occ.len(), |r, c| {
            if r == occ[c] {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let steps = (t_end / dt).round() as usize;
        let rhs = |w: &CMatrix| (&dense * w) * i;
        for _ in 0..steps {
            let k1 = rhs(&w);
            let k2 = rhs(&(&w + &k1 * C64::new(dt / 2.0, 0.0)));
            let k3 = rhs(&(&w + &k2 * C64::new(dt / 2.0, 0.0)));
            let k4 = rhs(&(&w + &k3 * C64::new(dt, 0.0)));
            w += (k1 + k2 * C64::new(2.0, 0.0) + k3 * C64::new(2.0, 0.0) + k4)
                * C64::new(dt / 6.0, 0.0);
        }
        w
    }

    #[test]
    fn agrees_with_runge_kutta_integration() {
        let p = ModelParams::new(4, 6, 1.0, 2.0, 0.6).unwrap();
        let prop = Propagator::new(&p, RowCoverage::Complete).unwrap();
        let t = 7.5;
        let reference = rk4_columns(prop.hamiltonian(), prop.occupation().sites(), t, 1e-3);
        let f = prop.frame(t);
        let diff = stacked(&f) - reference;
        assert!(max_abs(&diff) < 1e-6, "max deviation {}", max_abs(&diff));
    }

    #[test]
    fn chebyshev_columns_match_spectral_frames() {
        let p = ModelParams::new(4, 60, 1.0, 3.0, 0.6).unwrap();
        let prop = Propagator::new(&p, RowCoverage::Complete).unwrap();
        let mut cheb = ChebyshevPropagator::new(&p).unwrap();
        for t in [0.0, 0.3, 17.0, 250.0] {
            cheb.advance_to(t).unwrap();
            let a = prop.frame(t);
            let b = cheb.frame();
            assert!(max_abs(&(a.system() - b.system())) < 1e-11, "t={t}");
            let env = a.environment().unwrap() - b.environment().unwrap();
            assert!(max_abs(&env) < 1e-11, "t={t}");
        }
        cheb.advance_to(-5.0).unwrap();
        assert!(max_abs(&(prop.frame(-5.0).system() - cheb.frame().system())) < 1e-11);
    }

    #[test]
    fn bessel_sequence_values() {
        let j = bessel_j_sequence(1.0, 3);
        assert!((j[0] - 0.765_197_686_557_966_6).abs() < 1e-14);
        assert!((j[1] - 0.440_050_585_744_933_5).abs() < 1e-14);
        let j = bessel_j_sequence(30.0, 2);
        assert!((j[0] - (-0.086_367_983_581_040_23)).abs() < 1e-13);
        assert_eq!(bessel_j_sequence(0.0, 2), vec![1.0, 0.0, 0.0]);
    }
}
