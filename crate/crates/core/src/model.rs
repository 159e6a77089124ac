//! Physical model: a tight-binding system chain of `M` sites joined by a
//! single bond of strength `g` to an environment chain of `N` sites.
//!
//! Sites are laid out system first, environment second. Internally indices
//! are 0-based (system `0..M`, environment `M..M+N`, coupling bond between
//! `M-1` and `M`); error messages and documentation count sites from 1.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::TridiagonalMatrix;

/// Full configuration of the quench. Energies are in units of `t_sys`
/// by convention, but any positive values are accepted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Number of system sites `M`.
    pub system_sites: usize,
    /// Number of environment sites `N`.
    pub env_sites: usize,
    pub t_sys: f64,
    pub t_env: f64,
    /// System-environment coupling `g`.
    pub coupling: f64,
}

impl ModelParams {
    pub fn new(
        system_sites: usize,
        env_sites: usize,
        t_sys: f64,
        t_env: f64,
        coupling: f64,
    ) -> Result<Self> {
        let params = ModelParams {
            system_sites,
            env_sites,
            t_sys,
            t_env,
            coupling,
        };
        params.validate()?;
        Ok(params)
    }

    /// The parameter set of the reference runs:
    /// `t_sys = 1`, `t_env = 4`, `N = 10^4`.
    pub fn reference(system_sites: usize, coupling: f64) -> Result<Self> {
        Self::new(system_sites, 10_000, 1.0, 4.0, coupling)
    }

    pub fn validate(&self) -> Result<()> {
        if self.system_sites < 1 {
            return Err(Error::param("M", "system needs at least one site"));
        }
        if self.env_sites < 1 {
            return Err(Error::param("N", "environment needs at least one site"));
        }
        if !(self.t_sys.is_finite() && self.t_sys > 0.0) {
            return Err(Error::param(
                "t_sys",
                format!("must be finite and > 0, got {}", self.t_sys),
            ));
        }
        if !(self.t_env.is_finite() && self.t_env > 0.0) {
            return Err(Error::param(
                "t_env",
                format!("must be finite and > 0, got {}", self.t_env),
            ));
        }
        if !(self.coupling.is_finite() && self.coupling >= 0.0) {
            return Err(Error::param(
                "g",
                format!("must be finite and >= 0, got {}", self.coupling),
            ));
        }
        Ok(())
    }

    /// Total single-particle dimension `L = M + N`.
    pub fn total_sites(&self) -> usize {
        self.system_sites + self.env_sites
    }
}

/// Sites filled at `t = 0`, stored 0-based and ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InitialOccupation {
    sites: Vec<usize>,
}

impl InitialOccupation {
    /// Builds an occupation from 0-based site indices on a chain of
    /// `total_sites` sites.
    pub fn new(mut sites: Vec<usize>, total_sites: usize) -> Result<Self> {
        if let Some(&bad) = sites.iter().find(|&&s| s >= total_sites) {
            return Err(Error::param(
                "occupied",
                format!("site {} outside 1..={}", bad + 1, total_sites),
            ));
        }
        sites.sort_unstable();
        if let Some(w) = sites.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::param(
                "occupied",
                format!("site {} listed twice", w[0] + 1),
            ));
        }
        Ok(InitialOccupation { sites })
    }

    pub fn sites(&self) -> &[usize] {
        &self.sites
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    /// 1-based labels, as used in reports.
    pub fn labels(&self) -> Vec<usize> {
        self.sites.iter().map(|s| s + 1).collect()
    }
}

/// Single-particle hopping matrix `h` with `H = sum_ij h_ij a_i^dag a_j`.
pub fn build_hamiltonian(params: &ModelParams) -> Result<TridiagonalMatrix> {
    params.validate()?;
    let m = params.system_sites;
    let n = params.env_sites;
    let mut offdiag = Vec::with_capacity(m + n - 1);
    offdiag.extend(std::iter::repeat_n(params.t_sys, m - 1));
    offdiag.push(params.coupling);
    offdiag.extend(std::iter::repeat_n(params.t_env, n - 1));
    TridiagonalMatrix::new(vec![0.0; m + n], offdiag)
}

/// The `N x N` environment block of `h`.
pub fn environment_hamiltonian(params: &ModelParams) -> Result<TridiagonalMatrix> {
    params.validate()?;
    TridiagonalMatrix::uniform(params.env_sites, params.t_env)
}

/// The quench initial state: every system site filled.
pub fn initial_occupation(params: &ModelParams) -> InitialOccupation {
    InitialOccupation {
        sites: (0..params.system_sites).collect(),
    }
}

/// Size and regime checks for a planned run. Nothing here is fatal.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioDiagnostics {
    /// Earliest time a particle leaving at band-maximum group velocity
    /// `2 t_env` can cross the environment and come back: `N / t_env`.
    pub return_time: f64,
    pub t_max: f64,
    pub reflection_free: bool,
    /// `N / M^2`; the system only empties fully when this is large.
    pub size_ratio: f64,
    /// `g^2 / (t_sys t_env)`.
    pub weak_coupling_ratio: f64,
    pub weak_coupling: bool,
    pub warnings: Vec<String>,
}

/// `N / M^2` below this leaves a visible residual occupation.
pub const EMPTYING_RATIO_THRESHOLD: f64 = 1.0;
/// `g^2 / (t_sys t_env)` below this counts as weak coupling.
pub const WEAK_COUPLING_THRESHOLD: f64 = 0.2;

pub fn validate_scenario(params: &ModelParams, t_max: f64) -> ScenarioDiagnostics {
    let m = params.system_sites as f64;
    let n = params.env_sites as f64;
    let return_time = 2.0 * n / (2.0 * params.t_env);
    let size_ratio = n / (m * m);
    let weak_coupling_ratio = params.coupling * params.coupling / (params.t_sys * params.t_env);

    let reflection_free = t_max < return_time;
    let weak_coupling = weak_coupling_ratio < WEAK_COUPLING_THRESHOLD;
    let mut warnings = Vec::new();
    if !reflection_free {
        warnings.push(format!(
            "t_max = {t_max} reaches the reflection return time {return_time:.1}; late samples see particles bounced off the far end"
        ));
    }
    if size_ratio < EMPTYING_RATIO_THRESHOLD {
        warnings.push(format!(
            "N/M^2 = {size_ratio:.3}: the system cannot empty completely (residual ~ M^2/(M+N) = {:.3} particles)",
            m * m / (m + n)
        ));
    }
    if !weak_coupling {
        warnings.push(format!(
            "g^2/(t_sys t_env) = {weak_coupling_ratio:.3}: outside the weak-coupling regime of the resonant-level picture"
        ));
    }
    ScenarioDiagnostics {
        return_time,
        t_max,
        reflection_free,
        size_ratio,
        weak_coupling_ratio,
        weak_coupling,
        warnings,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_chain_offdiagonals() {
        let p = ModelParams::new(2, 2, 1.0, 4.0, 0.5).unwrap();
        let h = build_hamiltonian(&p).unwrap();
        assert_eq!(h.offdiag(), &[1.0, 0.5, 4.0]);
        assert_eq!(h.diag(), &[0.0; 4]);
    }

    #[test]
    fn two_site_chain() {
        let p = ModelParams::new(1, 1, 1.0, 1.0, 0.7).unwrap();
        let h = build_hamiltonian(&p).unwrap();
        assert_eq!(h.dim(), 2);
        assert_eq!(h.offdiag(), &[0.7]);
    }

    #[test]
    fn reference_chain_bond_position() {
        let p = ModelParams::new(50, 10_000, 1.0, 4.0, 0.5).unwrap();
        let h = build_hamiltonian(&p).unwrap();
        assert_eq!(h.offdiag().len(), 10_049);
        // 1-based entry M of the off-diagonal
        assert_eq!(h.offdiag()[49], 0.5);
        assert!(h.offdiag()[..49].iter().all(|&x| x == 1.0));
        assert!(h.offdiag()[50..].iter().all(|&x| x == 4.0));
    }

    #[test]
    fn rejects_bad_fields_by_name() {
        let cases = [
            (
                ModelParams {
                    system_sites: 0,
                    env_sites: 3,
                    t_sys: 1.0,
                    t_env: 1.0,
                    coupling: 0.1,
                },
                "M",
            ),
            (
                ModelParams {
                    system_sites: 2,
                    env_sites: 0,
                    t_sys: 1.0,
                    t_env: 1.0,
                    coupling: 0.1,
                },
                "N",
            ),
            (
                ModelParams {
                    system_sites: 2,
                    env_sites: 3,
                    t_sys: 0.0,
                    t_env: 1.0,
                    coupling: 0.1,
                },
                "t_sys",
            ),
            (
                ModelParams {
                    system_sites: 2,
                    env_sites: 3,
                    t_sys: 1.0,
                    t_env: -1.0,
                    coupling: 0.1,
                },
                "t_env",
            ),
            (
                ModelParams {
                    system_sites: 2,
                    env_sites: 3,
                    t_sys: 1.0,
                    t_env: 1.0,
                    coupling: -0.1,
                },
                "g",
            ),
            (
                ModelParams {
                    system_sites: 2,
                    env_sites: 3,
                    t_sys: 1.0,
                    t_env: 1.0,
                    coupling: f64::NAN,
                },
                "g",
            ),
        ];
        for (p, name) in cases {
            match build_hamiltonian(&p) {
                Err(Error::InvalidParameter { field, .. }) => assert_eq!(field, name),
                other => panic!("expected parameter error for {name}, got {other:?}"),
            }
        }
    }

    #[test]
    fn removing_the_bond_leaves_two_uniform_chains() {
        let p = ModelParams::new(4, 7, 1.3, 2.1, 0.4).unwrap();
        let h = build_hamiltonian(&p).unwrap();
        let (left, right) = h.offdiag().split_at(3);
        assert_eq!(left, TridiagonalMatrix::uniform(4, 1.3).unwrap().offdiag());
        assert_eq!(right[0], 0.4);
        assert_eq!(
            &right[1..],
            TridiagonalMatrix::uniform(7, 2.1).unwrap().offdiag()
        );
    }

    #[test]
    fn initial_occupation_fills_system() {
        for (m, expected) in [(3, vec![1, 2, 3]), (1, vec![1])] {
            let p = ModelParams::new(m, 5, 1.0, 1.0, 0.3).unwrap();
            assert_eq!(initial_occupation(&p).labels(), expected);
        }
        let p = ModelParams::reference(50, 0.5).unwrap();
        let occ = initial_occupation(&p);
        assert_eq!(occ.len(), 50);
        assert_eq!(occ.labels(), (1..=50).collect::<Vec<_>>());
    }

    #[test]
    fn occupation_rejects_duplicates_and_out_of_range() {
        assert!(InitialOccupation::new(vec![0, 2, 2], 4).is_err());
        assert!(InitialOccupation::new(vec![0, 4], 4).is_err());
        assert_eq!(
            InitialOccupation::new(vec![3, 1], 4).unwrap().sites(),
            &[1, 3]
        );
    }

    #[test]
    fn diagnostics_reference_run_is_clean() {
        let p = ModelParams::reference(50, 0.5).unwrap();
        let d = validate_scenario(&p, 500.0);
        assert!((d.return_time - 2500.0).abs() < 1e-12);
        assert!(d.reflection_free);
        assert!((d.weak_coupling_ratio - 0.0625).abs() < 1e-15);
        assert!(d.weak_coupling);
        assert!(d.warnings.is_empty());
    }

    #[test]
    fn diagnostics_small_environment_warns() {
        let p = ModelParams::new(50, 75, 1.0, 1.0, 0.65).unwrap();
        let d = validate_scenario(&p, 10.0);
        assert!((d.size_ratio - 0.03).abs() < 1e-12);
        assert!(d.warnings.iter().any(|w| w.contains("cannot empty")));
    }
}
