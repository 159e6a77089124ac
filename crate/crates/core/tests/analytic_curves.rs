//! Universal curves against values computed independently at 30-digit
//! precision, and the closed form of the mode-averaged occupation.

use pagecurve::rlm::{
    curve_peak, entropy_frac, entropy_peak, m_frac, min_entropy_frac, renyi_frac, tau_at_m_frac,
    variance_frac, OmegaConvention,
};

fn scaled_i0(x: f64) -> f64 {
    let (mut term, mut sum) = (1.0, 1.0);
    for k in 1..500 {
        term *= (x / 2.0).powi(2) / (k as f64).powi(2);
        sum += term;
    }
    sum * (-x).exp()
}

#[test]
fn occupation_matches_bessel_series() {
    for i in 0..=60 {
        let tau = 0.05 * 1.12f64.powi(i);
        let want = scaled_i0(tau / 2.0);
        assert!((m_frac(tau).unwrap() - want).abs() < 1e-10, "tau={tau}");
    }
}

// (tau, S_vN, S_2, S_min, m, var) from an independent high-precision quadrature
const REFERENCE: [(f64, f64, f64, f64, f64, f64); 3] = [
    (
        0.5,
        0.442348302023606,
        0.372890466461172,
        0.25,
        0.791017162139719,
        0.0438368586015329,
    ),
    (
        2.0,
        0.47900968104123,
        0.397358657865044,
        0.270247554468816,
        0.46575960759364,
        0.0749462055703701,
    ),
    (
        25.0,
        0.107510993673222,
        0.0846815031405785,
        0.0577572039923496,
        0.114021929462289,
        0.0323052367931052,
    ),
];

#[test]
fn curve_values() {
    for (tau, s, s2, smin, m, var) in REFERENCE {
        assert!((entropy_frac(tau).unwrap() - s).abs() < 1e-11);
        assert!((renyi_frac(tau, 2.0).unwrap() - s2).abs() < 1e-11);
        assert!((min_entropy_frac(tau).unwrap() - smin).abs() < 1e-11);
        assert!((m_frac(tau).unwrap() - m).abs() < 1e-11);
        let v = variance_frac(tau, OmegaConvention::Halved).unwrap();
        assert!((v - var).abs() < 1e-11);
        assert!(
            (variance_frac(tau, OmegaConvention::ChainSpectrum).unwrap() - 4.0 * var).abs() < 4e-11
        );
    }
}

#[test]
fn peak_positions() {
    let (tau, s) = entropy_peak().unwrap();
    assert!((tau - 1.155837719).abs() < 1e-5);
    assert!((s - 0.525340543409697).abs() < 1e-10);
    assert!((1.0 - m_frac(tau).unwrap() - 0.3911006).abs() < 1e-5);

    let (tau_min, s_min) = curve_peak(min_entropy_frac, 0.01, 20.0).unwrap();
    assert!((tau_min - 0.870885602).abs() < 1e-5);
    assert!((s_min - 0.370074759558021).abs() < 1e-10);

    let (tau_v, v) = curve_peak(|t| variance_frac(t, OmegaConvention::Halved), 0.01, 20.0).unwrap();
    assert!((tau_v - 2.196780384).abs() < 1e-5);
    assert!((v - 0.0751185041490990).abs() < 1e-10);
    assert!((1.0 - m_frac(tau_v).unwrap() - 0.558190248).abs() < 1e-5);
}

#[test]
fn entropy_ordering_along_the_curve() {
    for tau in [0.2, 1.0, 3.0, 10.0, 50.0] {
        let s = entropy_frac(tau).unwrap();
        let s2 = renyi_frac(tau, 2.0).unwrap();
        let s3 = renyi_frac(tau, 3.0).unwrap();
        let smin = min_entropy_frac(tau).unwrap();
        assert!(s >= s2 && s2 >= s3 && s3 >= smin, "tau={tau}");
        assert!(s < std::f64::consts::LN_2);
    }
}

#[test]
fn inverse_of_the_occupation_curve() {
    for target in [0.9, 0.5, 0.1, 0.03] {
        let tau = tau_at_m_frac(target).unwrap();
        assert!((m_frac(tau).unwrap() - target).abs() < 1e-9);
    }
}
