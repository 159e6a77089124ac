//! Weak-coupling limit: the system modes decay as independent resonant
//! levels, each into its own flat-band continuum.
//!
//! In the limit `t_env >> t_sys >> g`, `M -> inf`, mode `k` keeps occupation
//! `n_k(tau) = exp(-tau sin^2 k)` with `tau = 4 pi rho g^2 t / M`, and every
//! observable per site becomes an average over `k in [0, pi]`. These curves
//! are universal: plotted against the emitted fraction `1 - m/M`, the
//! couplings drop out.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::observables::renyi_mode;
use crate::quad::{integrate, QuadOptions};
use crate::spectral::{contact_density_of_states, system_hybridizations, Hybridization};

/// Energy of system mode `k` entering the variance integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum OmegaConvention {
    /// `omega_k = t_sys cos k`, half the chain dispersion.
    #[default]
    Halved,
    /// `omega_k = 2 t_sys cos k`, the actual spectrum of the system chain.
    ChainSpectrum,
}

impl OmegaConvention {
    fn factor(self) -> f64 {
        match self {
            OmegaConvention::Halved => 1.0,
            OmegaConvention::ChainSpectrum => 4.0,
        }
    }
}

/// Occupation of mode `k` at dimensionless time `tau`.
pub fn n_k(k: f64, tau: f64) -> f64 {
    (-tau * k.sin().powi(2)).exp()
}

// (n, 1 - n, -ln n, -ln(1 - n)) at exponent x = tau sin^2 k, without cancellation
fn occupations(x: f64) -> (f64, f64, f64, f64) {
    let n = (-x).exp();
    let hole = -(-x).exp_m1();
    let neg_ln_hole = if hole > 0.0 {
        -hole.ln()
    } else {
        f64::INFINITY
    };
    (n, hole, x, neg_ln_hole)
}

fn entropy_density(x: f64) -> f64 {
    let (n, hole, neg_ln_n, neg_ln_hole) = occupations(x);
    let a = if n > 0.0 { n * neg_ln_n } else { 0.0 };
    let b = if hole > 0.0 { hole * neg_ln_hole } else { 0.0 };
    a + b
}

fn min_entropy_density(x: f64) -> f64 {
    let (n, _, neg_ln_n, neg_ln_hole) = occupations(x);
    if n >= 0.5 {
        neg_ln_n
    } else {
        neg_ln_hole
    }
}

fn check_tau(tau: f64) -> Result<()> {
    if tau.is_finite() && tau >= 0.0 {
        Ok(())
    } else {
        Err(Error::param(
            "tau",
            format!("must be finite and >= 0, got {tau}"),
        ))
    }
}

/// `(1/pi) int_0^pi F(tau sin^2 k, k) dk`, integrated over `[0, pi/2]` by
/// symmetry with breakpoints where the occupation passes characteristic
/// values.
fn mode_average<F: Fn(f64, f64) -> f64>(tau: f64, opts: QuadOptions, f: F) -> Result<f64> {
    check_tau(tau)?;
    let half_pi = std::f64::consts::FRAC_PI_2;
    let breakpoints: Vec<f64> = [std::f64::consts::LN_2, 0.1, 1.0, 4.0, 16.0, 64.0]
        .iter()
        .filter_map(|&x| {
            let s = x / tau;
            (tau > 0.0 && s < 1.0).then(|| s.sqrt().asin())
        })
        .collect();
    let r = integrate(
        |k: f64| f(tau * k.sin().powi(2), k),
        0.0,
        half_pi,
        &breakpoints,
        opts,
    )?;
    Ok(r.value * 2.0 / std::f64::consts::PI)
}

fn default_opts() -> QuadOptions {
    QuadOptions {
        abs_tol: 1e-12,
        rel_tol: 0.0,
        max_intervals: 2000,
    }
}

/// `m(tau) / M`.
pub fn m_frac(tau: f64) -> Result<f64> {
    m_frac_with(tau, default_opts())
}

pub fn m_frac_with(tau: f64, opts: QuadOptions) -> Result<f64> {
    if tau == 0.0 {
        return Ok(1.0);
    }
    mode_average(tau, opts, |x, _| (-x).exp())
}

/// `S_vN(tau) / M` in nats.
pub fn entropy_frac(tau: f64) -> Result<f64> {
    entropy_frac_with(tau, default_opts())
}

pub fn entropy_frac_with(tau: f64, opts: QuadOptions) -> Result<f64> {
    mode_average(tau, opts, |x, _| entropy_density(x))
}

/// `S^(q)(tau) / M`; `q = 1` and `q = inf` give the von Neumann and
/// min-entropy curves.
pub fn renyi_frac(tau: f64, q: f64) -> Result<f64> {
    if q.is_nan() || q <= 0.0 {
        return Err(Error::param(
            "q",
            format!("Renyi order must be > 0, got {q}"),
        ));
    }
    if q == 1.0 {
        return entropy_frac(tau);
    }
    if q.is_infinite() {
        return min_entropy_frac(tau);
    }
    mode_average(tau, default_opts(), |x, _| renyi_mode((-x).exp(), q))
}

pub fn min_entropy_frac(tau: f64) -> Result<f64> {
    mode_average(tau, default_opts(), |x, _| min_entropy_density(x))
}

/// `Delta H_env^2(tau) / (M t_sys^2)`.
pub fn variance_frac(tau: f64, convention: OmegaConvention) -> Result<f64> {
    let factor = convention.factor();
    mode_average(tau, default_opts(), |x, k| {
        let (n, hole, _, _) = occupations(x);
        factor * k.cos().powi(2) * n * hole
    })
}

/// `tau = 4 pi rho g^2 t / M` with the contact density of states
/// `rho = 1 / (pi t_env)`, i.e. `tau = 4 g^2 t / (M t_env)`.
pub fn tau_of_time(t: f64, params: &ModelParams) -> f64 {
    let rho = contact_density_of_states(params.t_env);
    4.0 * std::f64::consts::PI * rho * params.coupling.powi(2) * t / params.system_sites as f64
}

/// Inverse of [`tau_of_time`].
pub fn time_of_tau(tau: f64, params: &ModelParams) -> f64 {
    tau / tau_of_time(1.0, params)
}

/// The `tau` at which `m_frac(tau) = target`, for `0 < target <= 1`.
pub fn tau_at_m_frac(target: f64) -> Result<f64> {
    if !(target > 0.0 && target <= 1.0) {
        return Err(Error::param(
            "m_frac",
            format!("target must lie in (0, 1], got {target}"),
        ));
    }
    if target == 1.0 {
        return Ok(0.0);
    }
    let mut hi = 1.0;
    while m_frac(hi)? > target {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::param(
                "m_frac",
                format!("target {target} too small to bracket"),
            ));
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if m_frac(mid)? > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-13 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Maximum of a unimodal curve on `[lo, hi]` by golden-section search.
pub fn curve_peak<F: Fn(f64) -> Result<f64>>(f: F, lo: f64, hi: f64) -> Result<(f64, f64)> {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while b - a > 1e-9 * (1.0 + c.abs()) {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d)?;
        }
    }
    let x = 0.5 * (a + b);
    Ok((x, f(x)?))
}

/// Location and height of the von Neumann maximum.
pub fn entropy_peak() -> Result<(f64, f64)> {
    curve_peak(entropy_frac, 0.01, 20.0)
}

/// One point of the universal curves.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvePoint {
    pub tau: f64,
    pub m_frac: f64,
    pub emitted_frac: f64,
    pub s_frac: f64,
    /// `(q, S^(q)/M)` for each requested order.
    pub s_renyi_frac: Vec<(f64, f64)>,
    pub s_min_frac: f64,
    /// Variance per site with the halved `omega_k`.
    pub var_frac: f64,
    /// Variance per site with the chain spectrum `omega_k = 2 t_sys cos k`.
    pub var_frac_chain: f64,
}

/// The universal curves on a grid of `tau` values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniversalCurve {
    pub points: Vec<CurvePoint>,
}

impl UniversalCurve {
    pub fn compute(tau_grid: &[f64], renyi_orders: &[f64]) -> Result<Self> {
        let points = tau_grid
            .iter()
            .map(|&tau| {
                let m = m_frac(tau)?;
                let var = variance_frac(tau, OmegaConvention::Halved)?;
                Ok(CurvePoint {
                    tau,
                    m_frac: m,
                    emitted_frac: 1.0 - m,
                    s_frac: entropy_frac(tau)?,
                    s_renyi_frac: renyi_orders
                        .iter()
                        .map(|&q| Ok((q, renyi_frac(tau, q)?)))
                        .collect::<Result<_>>()?,
                    s_min_frac: min_entropy_frac(tau)?,
                    var_frac: var,
                    var_frac_chain: OmegaConvention::ChainSpectrum.factor() * var,
                })
            })
            .collect::<Result<_>>()?;
        Ok(UniversalCurve { points })
    }
}

/// Universal curves parameterised by the emitted fraction.
pub fn parametric_page_curve(tau_grid: &[f64], renyi_orders: &[f64]) -> Result<Vec<CurvePoint>> {
    let mut grid = tau_grid.to_vec();
    grid.sort_by(f64::total_cmp);
    Ok(UniversalCurve::compute(&grid, renyi_orders)?.points)
}

/// Value of a universal curve at a given emitted fraction.
pub fn at_emitted_fraction<F: Fn(f64) -> Result<f64>>(emitted: f64, curve: F) -> Result<f64> {
    curve(tau_at_m_frac(1.0 - emitted)?)
}

/// Level spacing versus broadening for each system mode.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DisjointnessReport {
    pub modes: Vec<ModeDisjointness>,
    /// Threshold below which `spacing / gamma` counts as a violation.
    pub threshold: f64,
    pub violating_fraction: f64,
    /// `g^2 / (t_sys t_env)`, the expected fraction of band-edge modes
    /// where the picture degrades.
    pub band_edge_fraction: f64,
    /// Labels `k` of the modes nearest both band edges.
    pub band_edge_modes: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeDisjointness {
    pub mode: Hybridization,
    /// Distance to the nearest neighbouring level.
    pub spacing: f64,
    /// `spacing / gamma`; infinite when `gamma = 0`.
    pub ratio: f64,
}

pub const DEFAULT_DISJOINTNESS_THRESHOLD: f64 = 10.0;

pub fn disjointness_report(params: &ModelParams, threshold: f64) -> Result<DisjointnessReport> {
    let hyb = system_hybridizations(params)?;
    let m = hyb.len();
    let modes: Vec<ModeDisjointness> = hyb
        .iter()
        .enumerate()
        .map(|(i, h)| {
            let left = (i > 0).then(|| (hyb[i - 1].omega - h.omega).abs());
            let right = (i + 1 < m).then(|| (hyb[i + 1].omega - h.omega).abs());
            let spacing = match (left, right) {
                (Some(a), Some(b)) => a.min(b),
                (Some(a), None) | (None, Some(a)) => a,
                (None, None) => f64::INFINITY,
            };
            let ratio = if h.gamma > 0.0 {
                spacing / h.gamma
            } else {
                f64::INFINITY
            };
            ModeDisjointness {
                mode: *h,
                spacing,
                ratio,
            }
        })
        .collect();
    let violating = modes.iter().filter(|d| d.ratio < threshold).count();
    let band_edge_fraction = params.coupling.powi(2) / (params.t_sys * params.t_env);
    let per_edge = ((band_edge_fraction * m as f64 / 2.0).ceil() as usize).clamp(1, m.div_ceil(2));
    let mut band_edge_modes: Vec<usize> = (1..=per_edge).chain((m + 1 - per_edge)..=m).collect();
    band_edge_modes.dedup();
    Ok(DisjointnessReport {
        modes,
        threshold,
        violating_fraction: violating as f64 / m as f64,
        band_edge_fraction,
        band_edge_modes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mode_occupation() {
        assert_eq!(n_k(0.0, 7.0), 1.0);
        assert!((n_k(std::f64::consts::FRAC_PI_2, 1.0) - (-1.0f64).exp()).abs() < 1e-16);
        assert_eq!(n_k(1.3, 0.0), 1.0);
    }

    #[test]
    fn curves_start_and_end_empty_of_entropy() {
        assert!((m_frac(0.0).unwrap() - 1.0).abs() < 1e-14);
        assert_eq!(entropy_frac(0.0).unwrap(), 0.0);
        assert_eq!(min_entropy_frac(0.0).unwrap(), 0.0);
        assert_eq!(renyi_frac(0.0, 2.0).unwrap(), 0.0);
        assert_eq!(variance_frac(0.0, OmegaConvention::Halved).unwrap(), 0.0);
        assert!(entropy_frac(1e7).unwrap() < 1e-3);
        assert!(variance_frac(1e7, OmegaConvention::Halved).unwrap() < 1e-3);
    }

    #[test]
    fn renyi_order_one_is_von_neumann() {
        for tau in [0.3, 2.0, 11.0] {
            let vn = entropy_frac(tau).unwrap();
            assert_eq!(renyi_frac(tau, 1.0).unwrap(), vn);
            let near = renyi_frac(tau, 1.0 + 1e-7).unwrap();
            assert!((near - vn).abs() < 1e-6);
        }
        assert!(renyi_frac(1.0, 0.0).is_err());
        assert_eq!(
            renyi_frac(3.0, f64::INFINITY).unwrap(),
            min_entropy_frac(3.0).unwrap()
        );
    }

    #[test]
    fn min_entropy_density_at_half_filling() {
        assert!(
            (min_entropy_density(std::f64::consts::LN_2) - std::f64::consts::LN_2).abs() < 1e-15
        );
    }

    #[test]
    fn time_mapping() {
        let p = ModelParams::new(50, 10_000, 1.0, 4.0, 0.5).unwrap();
        assert!((tau_of_time(100.0, &p) - 0.5).abs() < 1e-14);
        assert_eq!(tau_of_time(0.0, &p), 0.0);
        let p2 = ModelParams { coupling: 1.0, ..p };
        assert!((tau_of_time(100.0, &p2) / tau_of_time(100.0, &p) - 4.0).abs() < 1e-14);
        assert!((time_of_tau(0.5, &p) - 100.0).abs() < 1e-10);
    }

    #[test]
    fn inverse_of_m_frac() {
        for tau in [0.05, 1.0, 7.3, 150.0] {
            let m = m_frac(tau).unwrap();
            assert!((tau_at_m_frac(m).unwrap() - tau).abs() < 1e-8 * tau.max(1.0));
        }
        assert_eq!(tau_at_m_frac(1.0).unwrap(), 0.0);
        assert!(tau_at_m_frac(0.0).is_err());
    }

    #[test]
    fn stable_under_refinement() {
        let coarse = QuadOptions {
            abs_tol: 1e-10,
            rel_tol: 0.0,
            max_intervals: 2000,
        };
        let fine = QuadOptions {
            abs_tol: 1e-13,
            rel_tol: 0.0,
            max_intervals: 4000,
        };
        for tau in [0.1, 1.2, 30.0, 900.0] {
            assert!(
                (m_frac_with(tau, coarse).unwrap() - m_frac_with(tau, fine).unwrap()).abs() < 1e-9
            );
            assert!(
                (entropy_frac_with(tau, coarse).unwrap() - entropy_frac_with(tau, fine).unwrap())
                    .abs()
                    < 1e-9
            );
        }
    }

    #[test]
    fn disjointness_regimes() {
        let p = ModelParams::new(50, 10_000, 1.0, 4.0, 0.5).unwrap();
        let r = disjointness_report(&p, DEFAULT_DISJOINTNESS_THRESHOLD).unwrap();
        assert_eq!(r.modes.len(), 50);
        assert!(r.modes.iter().all(|d| d.ratio.is_finite()));
        let large = r.modes.iter().filter(|d| d.ratio > 10.0).count();
        assert!(large > 25);
        assert!(r.band_edge_modes.contains(&1) && r.band_edge_modes.contains(&50));
        assert!((r.band_edge_fraction - 0.0625).abs() < 1e-15);

        let weak = ModelParams {
            coupling: 1e-9,
            ..p
        };
        let r = disjointness_report(&weak, DEFAULT_DISJOINTNESS_THRESHOLD).unwrap();
        assert!(r.modes.iter().all(|d| d.ratio > 1e15));
        assert_eq!(r.violating_fraction, 0.0);

        let off = ModelParams { coupling: 0.0, ..p };
        let r = disjointness_report(&off, DEFAULT_DISJOINTNESS_THRESHOLD).unwrap();
        assert!(r.modes.iter().all(|d| d.ratio.is_infinite()));
    }
}
