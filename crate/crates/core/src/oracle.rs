//! Brute-force many-body reference in a fixed particle-number sector.
//!
//! States are bitmasks over sites `0..L` (bit `i` = site `i`), ordered by
//! integer value. A basis state is `c_{i1}^dag c_{i2}^dag ... |0>` with
//! `i1 < i2 < ...`, so moving an operator onto site `j` picks up a factor
//! `(-1)` for every occupied site below `j` (Jordan-Wigner, site-ascending).

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::evolve::{bessel_j_sequence, chebyshev_terms, Propagator, RowCoverage, C64};
use crate::model::{environment_hamiltonian, ModelParams};
use crate::observables::{
    env_energy_from_boundary, env_energy_mean_and_variance, min_entropy, occupation_spectrum,
    particle_number, renyi_entropy, von_neumann_entropy,
};

pub const DEFAULT_SECTOR_CAP: usize = 1_000_000;
/// Sectors up to this size are evolved by full diagonalisation.
pub const DENSE_LIMIT: usize = 4000;
pub const MAX_SYSTEM_SITES: usize = 12;

/// How fermionic exchange signs are tracked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum FermionSigns {
    #[default]
    JordanWigner,
    /// Drops every exchange sign (hard-core bosons). Only useful as a
    /// negative control for the equivalence checks.
    Dropped,
}

/// Occupation bitmasks with exactly `particles` bits among `sites`.
#[derive(Debug, Clone)]
pub struct SectorBasis {
    sites: usize,
    particles: usize,
    states: Vec<u64>,
    signs: FermionSigns,
}

fn binomial(n: usize, k: usize) -> Option<usize> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: usize = 1;
    for i in 0..k {
        acc = acc.checked_mul(n - i)? / (i + 1);
    }
    Some(acc)
}

impl SectorBasis {
    pub fn new(sites: usize, particles: usize) -> Result<Self> {
        Self::with_options(
            sites,
            particles,
            DEFAULT_SECTOR_CAP,
            FermionSigns::JordanWigner,
        )
    }

    pub fn with_options(
        sites: usize,
        particles: usize,
        cap: usize,
        signs: FermionSigns,
    ) -> Result<Self> {
        if sites == 0 || sites > 63 {
            return Err(Error::param(
                "L",
                format!("sector basis supports 1..=63 sites, got {sites}"),
            ));
        }
        if particles > sites {
            return Err(Error::param(
                "P",
                format!("{particles} particles on {sites} sites"),
            ));
        }
        let dim = binomial(sites, particles).unwrap_or(usize::MAX);
        if dim > cap {
            return Err(Error::SectorTooLarge { dim, cap });
        }
        let mut states = Vec::with_capacity(dim);
        if particles == 0 {
            states.push(0);
        } else {
            // Gosper's hack walks the combinations in increasing order
            let mut v: u64 = (1u64 << particles) - 1;
            let limit = 1u64 << sites;
            while v < limit {
                states.push(v);
                let c = v & v.wrapping_neg();
                let r = v + c;
                v = (((r ^ v) >> 2) / c) | r;
            }
        }
        Ok(SectorBasis {
            sites,
            particles,
            states,
            signs,
        })
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    pub fn states(&self) -> &[u64] {
        &self.states
    }

    pub fn index(&self, state: u64) -> Option<usize> {
        self.states.binary_search(&state).ok()
    }

    fn exchange_sign(&self, state: u64, site: usize) -> f64 {
        match self.signs {
            FermionSigns::JordanWigner if (state & ((1u64 << site) - 1)).count_ones() % 2 == 1 => {
                -1.0
            }
            _ => 1.0,
        }
    }

    /// `c_site |state>`.
    pub fn annihilate(&self, state: u64, site: usize) -> Option<(u64, f64)> {
        (state >> site & 1 == 1).then(|| (state & !(1u64 << site), self.exchange_sign(state, site)))
    }

    /// `c_site^dag |state>`.
    pub fn create(&self, state: u64, site: usize) -> Option<(u64, f64)> {
        (state >> site & 1 == 0).then(|| (state | (1u64 << site), self.exchange_sign(state, site)))
    }

    /// `c_i^dag c_j |state>`.
    pub fn hop(&self, state: u64, i: usize, j: usize) -> Option<(u64, f64)> {
        let (mid, s1) = self.annihilate(state, j)?;
        let (out, s2) = self.create(mid, i)?;
        Some((out, s1 * s2))
    }

    /// `c_{s1}^dag c_{s2}^dag ... |0>` for sites in the given order.
    pub fn fock_state(&self, sites: &[usize]) -> Option<(u64, f64)> {
        sites
            .iter()
            .rev()
            .try_fold((0u64, 1.0), |(state, sign), &s| {
                self.create(state, s).map(|(next, sg)| (next, sign * sg))
            })
    }

    /// Normalised basis vector for the given filled sites.
    pub fn product_state(&self, sites: &[usize]) -> Result<SectorState> {
        if sites.len() != self.particles {
            return Err(Error::Dimension {
                expected: self.particles,
                found: sites.len(),
            });
        }
        let (mask, sign) = self
            .fock_state(sites)
            .ok_or_else(|| Error::param("occupied", "site listed twice"))?;
        let idx = self
            .index(mask)
            .ok_or_else(|| Error::param("occupied", "site outside the chain"))?;
        let mut amplitudes = DVector::zeros(self.dim());
        amplitudes[idx] = C64::new(sign, 0.0);
        Ok(SectorState { amplitudes })
    }
}

/// Amplitudes over a [`SectorBasis`].
#[derive(Debug, Clone, PartialEq)]
pub struct SectorState {
    pub amplitudes: DVector<C64>,
}

impl SectorState {
    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }
}

/// Quadratic operator `sum_ij a_ij c_i^dag c_j` in sparse sector form.
#[derive(Debug, Clone)]
pub struct SectorOperator {
    rows: Vec<Vec<(usize, f64)>>,
}

impl SectorOperator {
    pub fn from_coefficients(basis: &SectorBasis, coefficients: &DMatrix<f64>) -> Result<Self> {
        let l = basis.sites();
        if coefficients.nrows() != l || coefficients.ncols() != l {
            return Err(Error::Dimension {
                expected: l,
                found: coefficients.nrows(),
            });
        }
        let terms: Vec<(usize, usize, f64)> = (0..l)
            .flat_map(|i| (0..l).map(move |j| (i, j)))
            .filter_map(|(i, j)| {
                let a = coefficients[(i, j)];
                (a != 0.0).then_some((i, j, a))
            })
            .collect();
        let rows: Vec<Vec<(usize, f64)>> = basis
            .states()
            .iter()
            .map(|&s| {
                let mut row: Vec<(usize, f64)> = Vec::new();
                for &(i, j, a) in &terms {
                    if let Some((out, sign)) = basis.hop(s, i, j) {
                        let col = basis.index(out).expect("hop preserves particle number");
                        match row.iter_mut().find(|(c, _)| *c == col) {
                            Some(entry) => entry.1 += sign * a,
                            None => row.push((col, sign * a)),
                        }
                    }
                }
                row.sort_by_key(|&(c, _)| c);
                row
            })
            .collect();
        // rows[r] lists <r'|A|r>: transpose into <r|A|c> form
        let dim = basis.dim();
        let mut by_row: Vec<Vec<(usize, f64)>> = vec![Vec::new(); dim];
        for (c, row) in rows.into_iter().enumerate() {
            for (r, v) in row {
                by_row[r].push((c, v));
            }
        }
        Ok(SectorOperator { rows: by_row })
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Largest number of non-zero entries in a row.
    pub fn max_degree(&self) -> usize {
        self.rows
            .iter()
            .map(|r| r.iter().filter(|(_, v)| *v != 0.0).count())
            .max()
            .unwrap_or(0)
    }

    pub fn apply(&self, v: &DVector<C64>) -> DVector<C64> {
        DVector::from_iterator(
            self.dim(),
            self.rows
                .iter()
                .map(|row| row.iter().map(|&(c, a)| v[c] * a).sum::<C64>()),
        )
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for (r, row) in self.rows.iter().enumerate() {
            for &(c, v) in row {
                m[(r, c)] += v;
            }
        }
        m
    }

    /// Gershgorin bounds on the spectrum.
    fn spectral_bounds(&self) -> (f64, f64) {
        self.rows.iter().enumerate().fold(
            (f64::INFINITY, f64::NEG_INFINITY),
            |(lo, hi), (r, row)| {
                let (diag, off) = row.iter().fold((0.0, 0.0), |(d, o), &(c, v)| {
                    if c == r {
                        (d + v, o)
                    } else {
                        (d, o + v.abs())
                    }
                });
                (lo.min(diag - off), hi.max(diag + off))
            },
        )
    }
}

/// Many-body Hamiltonian of the model restricted to `particles` fermions.
pub fn build_sector_hamiltonian(
    params: &ModelParams,
    basis: &SectorBasis,
) -> Result<SectorOperator> {
    let h = crate::model::build_hamiltonian(params)?;
    if basis.sites() != h.dim() {
        return Err(Error::Dimension {
            expected: h.dim(),
            found: basis.sites(),
        });
    }
    SectorOperator::from_coefficients(basis, &h.to_dense())
}

/// Exact propagation `exp(-i H t)` of sector states.
pub enum SectorEvolver {
    Dense {
        eigenvalues: DVector<f64>,
        eigenvectors: DMatrix<f64>,
    },
    Chebyshev {
        operator: SectorOperator,
    },
}

impl SectorEvolver {
    /// Full diagonalisation up to [`DENSE_LIMIT`], Chebyshev expansion above.
    pub fn new(h: &SectorOperator) -> Self {
        if h.dim() <= DENSE_LIMIT {
            Self::dense(h)
        } else {
            SectorEvolver::Chebyshev {
                operator: h.clone(),
            }
        }
    }

    pub fn dense(h: &SectorOperator) -> Self {
        let eig = h.to_dense().symmetric_eigen();
        SectorEvolver::Dense {
            eigenvalues: eig.eigenvalues,
            eigenvectors: eig.eigenvectors,
        }
    }

    pub fn chebyshev(h: &SectorOperator) -> Self {
        SectorEvolver::Chebyshev {
            operator: h.clone(),
        }
    }

    pub fn evolve(&self, psi0: &SectorState, t: f64) -> SectorState {
        match self {
            SectorEvolver::Dense {
                eigenvalues,
                eigenvectors,
            } => {
                let q = eigenvectors.map(|x| C64::new(x, 0.0));
                let coeffs = q.adjoint() * &psi0.amplitudes;
                let phased = DVector::from_iterator(
                    coeffs.len(),
                    coeffs.iter().zip(eigenvalues.iter()).map(|(c, &e)| {
                        let (s, co) = crate::evolve::reduced_phase(e, t).sin_cos();
                        c * C64::new(co, -s)
                    }),
                );
                SectorState {
                    amplitudes: q * phased,
                }
            }
            SectorEvolver::Chebyshev { operator } => chebyshev_evolve(operator, psi0, t),
        }
    }
}

pub fn evolve_exact(h: &SectorOperator, psi0: &SectorState, t: f64) -> SectorState {
    SectorEvolver::new(h).evolve(psi0, t)
}

fn chebyshev_evolve(h: &SectorOperator, psi0: &SectorState, t: f64) -> SectorState {
    let (lo, hi) = h.spectral_bounds();
    let center = 0.5 * (hi + lo);
    let radius = (0.5 * (hi - lo)).max(1e-12) * 1.01;
    let x = radius * t;
    let terms = chebyshev_terms(x);
    let bessel = bessel_j_sequence(x, terms);

    let scaled =
        |v: &DVector<C64>| (h.apply(v) - v * C64::new(center, 0.0)) / C64::new(radius, 0.0);
    let mut prev = psi0.amplitudes.clone();
    let mut cur = scaled(&prev);
    let mut acc = &prev * C64::new(bessel[0], 0.0);
    let mut phase = C64::new(0.0, -1.0);
    acc += &cur * (phase * 2.0 * bessel[1]);
    for &jk in bessel.iter().skip(2) {
        let next = scaled(&cur) * C64::new(2.0, 0.0) - &prev;
        phase *= C64::new(0.0, -1.0);
        acc += &next * (phase * 2.0 * jk);
        prev = cur;
        cur = next;
    }
    let global = {
        let (s, c) = crate::evolve::reduced_phase(center, t).sin_cos();
        C64::new(c, -s)
    };
    SectorState {
        amplitudes: acc * global,
    }
}

/// Entropies of the reduced density matrix of the leading `system_sites`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReducedEntropies {
    pub s_vn: f64,
    pub s_renyi: Vec<(f64, f64)>,
    pub s_min: f64,
}

/// Traces out sites `system_sites..L` and diagonalises the remainder,
/// one particle-number block at a time.
pub fn reduced_density_entropies(
    basis: &SectorBasis,
    state: &SectorState,
    system_sites: usize,
    renyi_orders: &[f64],
) -> Result<ReducedEntropies> {
    if system_sites == 0 || system_sites > MAX_SYSTEM_SITES || system_sites > basis.sites() {
        return Err(Error::param(
            "system_sites",
            format!("must lie in 1..={MAX_SYSTEM_SITES}, got {system_sites}"),
        ));
    }
    if state.amplitudes.len() != basis.dim() {
        return Err(Error::Dimension {
            expected: basis.dim(),
            found: state.amplitudes.len(),
        });
    }
    let mask = (1u64 << system_sites) - 1;
    // block k: system configurations with k particles
    let mut configs: Vec<Vec<u64>> = vec![Vec::new(); system_sites + 1];
    for s in 0..=mask {
        configs[s.count_ones() as usize].push(s);
    }
    let mut by_env: std::collections::BTreeMap<u64, Vec<(u64, C64)>> = Default::default();
    for (idx, &st) in basis.states().iter().enumerate() {
        by_env
            .entry(st >> system_sites)
            .or_default()
            .push((st & mask, state.amplitudes[idx]));
    }
    let mut blocks: Vec<DMatrix<C64>> = configs
        .iter()
        .map(|c| DMatrix::zeros(c.len(), c.len()))
        .collect();
    for entries in by_env.values() {
        for &(s, a) in entries {
            let k = s.count_ones() as usize;
            let r = configs[k].binary_search(&s).expect("config listed");
            for &(s2, b) in entries
                .iter()
                .filter(|(s2, _)| s2.count_ones() as usize == k)
            {
                let c = configs[k].binary_search(&s2).expect("config listed");
                blocks[k][(r, c)] += a * b.conj();
            }
        }
    }
    let lambdas: Vec<f64> = blocks
        .into_iter()
        .filter(|b| b.nrows() > 0)
        .flat_map(|b| {
            b.symmetric_eigenvalues()
                .iter()
                .copied()
                .collect::<Vec<_>>()
        })
        .map(|x| x.max(0.0))
        .collect();
    let s_vn = lambdas
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| -x * x.ln())
        .sum();
    let s_renyi = renyi_orders
        .iter()
        .map(|&q| {
            let v = if q == 1.0 {
                s_vn
            } else if q.is_infinite() {
                -lambdas.iter().copied().fold(0.0, f64::max).ln()
            } else {
                lambdas.iter().map(|x| x.powf(q)).sum::<f64>().ln() / (1.0 - q)
            };
            (q, v)
        })
        .collect();
    let s_min = -lambdas.iter().copied().fold(0.0, f64::max).ln();
    Ok(ReducedEntropies {
        s_vn,
        s_renyi,
        s_min,
    })
}

fn apply_quadratic(
    basis: &SectorBasis,
    state: &SectorState,
    a: &DMatrix<f64>,
) -> Result<DVector<C64>> {
    Ok(SectorOperator::from_coefficients(basis, a)?.apply(&state.amplitudes))
}

/// `<A>` for a quadratic operator with coefficient matrix `a`.
pub fn expectation_quadratic(
    basis: &SectorBasis,
    state: &SectorState,
    a: &DMatrix<f64>,
) -> Result<f64> {
    let phi = apply_quadratic(basis, state, a)?;
    Ok(state.amplitudes.dotc(&phi).re)
}

/// `<A^2> - <A>^2` for a Hermitian quadratic operator.
pub fn variance_quadratic(
    basis: &SectorBasis,
    state: &SectorState,
    a: &DMatrix<f64>,
) -> Result<f64> {
    let phi = apply_quadratic(basis, state, a)?;
    let mean = state.amplitudes.dotc(&phi).re;
    Ok(phi.norm_squared() - mean * mean)
}

/// `<c_i^dag c_j>` for all site pairs.
pub fn correlation_matrix(basis: &SectorBasis, state: &SectorState) -> DMatrix<C64> {
    let l = basis.sites();
    let mut c = DMatrix::zeros(l, l);
    for (idx, &s) in basis.states().iter().enumerate() {
        let amp = state.amplitudes[idx];
        if amp == C64::new(0.0, 0.0) {
            continue;
        }
        for i in 0..l {
            for j in 0..l {
                if let Some((out, sign)) = basis.hop(s, i, j) {
                    let k = basis.index(out).expect("hop preserves particle number");
                    c[(i, j)] += state.amplitudes[k].conj() * amp * sign;
                }
            }
        }
    }
    c
}

/// Coefficient matrix of `H_env` embedded in the full chain.
pub fn environment_coefficients(params: &ModelParams) -> Result<DMatrix<f64>> {
    let l = params.total_sites();
    let m = params.system_sites;
    let env = environment_hamiltonian(params)?.to_dense();
    let mut a = DMatrix::zeros(l, l);
    a.view_mut((m, m), (l - m, l - m)).copy_from(&env);
    Ok(a)
}

/// Settings for the Gaussian-versus-sector comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleCheckConfig {
    pub max_sites: usize,
    pub system_sizes: Vec<usize>,
    pub couplings: Vec<f64>,
    pub env_hoppings: Vec<f64>,
    pub time_points: usize,
    pub tolerance: f64,
    pub signs: FermionSigns,
}

impl Default for OracleCheckConfig {
    fn default() -> Self {
        OracleCheckConfig {
            max_sites: 14,
            system_sizes: vec![1, 2, 3],
            couplings: vec![0.35, 0.8],
            env_hoppings: vec![1.0, 4.0],
            time_points: 20,
            tolerance: 1e-8,
            signs: FermionSigns::JordanWigner,
        }
    }
}

/// Largest deviation seen for one observable.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Deviation {
    pub observable: &'static str,
    pub max_abs: f64,
    /// `(M, N, g, t_env, t)` where the maximum occurred.
    pub worst_at: (usize, usize, f64, f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub instances: usize,
    pub samples: usize,
    pub tolerance: f64,
    pub deviations: Vec<Deviation>,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.deviations.iter().all(|d| d.max_abs <= self.tolerance)
    }

    pub fn max_deviation(&self, observable: &str) -> Option<f64> {
        self.deviations
            .iter()
            .find(|d| d.observable == observable)
            .map(|d| d.max_abs)
    }
}

const OBSERVABLES: [&str; 9] = [
    "s_vn",
    "s_renyi_2",
    "s_min",
    "m",
    "henv_mean",
    "henv_var",
    "henv_mean_boundary",
    "henv_var_boundary",
    "correlation",
];

/// Compares every Gaussian-state observable with the sector oracle on a
/// grid of small instances spanning `t in [0, 10 M / g^2]`.
pub fn run_oracle_check(config: &OracleCheckConfig) -> Result<OracleReport> {
    let mut deviations: Vec<Deviation> = OBSERVABLES
        .iter()
        .map(|&observable| Deviation {
            observable,
            max_abs: 0.0,
            worst_at: (0, 0, 0.0, 0.0, 0.0),
        })
        .collect();
    let mut instances = 0;
    let mut samples = 0;
    for &m in &config.system_sizes {
        for n in 1..=config.max_sites.saturating_sub(m) {
            for &g in &config.couplings {
                for &t_env in &config.env_hoppings {
                    let params = ModelParams::new(m, n, 1.0, t_env, g)?;
                    instances += 1;
                    let l = params.total_sites();
                    let basis = SectorBasis::with_options(l, m, DEFAULT_SECTOR_CAP, config.signs)?;
                    let h = build_sector_hamiltonian(&params, &basis)?;
                    let evolver = SectorEvolver::new(&h);
                    let sys: Vec<usize> = (0..m).collect();
                    let psi0 = basis.product_state(&sys)?;
                    let env_coeffs = environment_coefficients(&params)?;
                    let h_env = environment_hamiltonian(&params)?;
                    let prop = Propagator::new(&params, RowCoverage::Complete)?;
                    let t_end = 10.0 * m as f64 / (g * g);
                    for step in 0..config.time_points {
                        let t = t_end * step as f64 / (config.time_points.max(2) - 1) as f64;
                        samples += 1;
                        let psi = evolver.evolve(&psi0, t);
                        let exact = reduced_density_entropies(&basis, &psi, m, &[2.0])?;
                        let sys_number = {
                            let mut a = DMatrix::zeros(l, l);
                            for i in 0..m {
                                a[(i, i)] = 1.0;
                            }
                            expectation_quadratic(&basis, &psi, &a)?
                        };
                        let env_mean = expectation_quadratic(&basis, &psi, &env_coeffs)?;
                        let env_var = variance_quadratic(&basis, &psi, &env_coeffs)?;
                        let corr = correlation_matrix(&basis, &psi);

                        let frame = prop.frame(t);
                        let spec = occupation_spectrum(&frame)?;
                        let (g_mean, g_var) = env_energy_mean_and_variance(&frame, &h_env)?;
                        let (b_mean, b_var) = env_energy_from_boundary(
                            &frame,
                            prop.hamiltonian(),
                            prop.occupation(),
                        )?;
                        let mut corr_dev: f64 = 0.0;
                        for i in 0..l {
                            for j in 0..l {
                                let c = frame.correlation(i, j).expect("complete frame");
                                corr_dev = corr_dev.max((c - corr[(i, j)]).norm());
                            }
                        }
                        let values = [
                            (von_neumann_entropy(&spec) - exact.s_vn).abs(),
                            (renyi_entropy(&spec, 2.0)? - exact.s_renyi[0].1).abs(),
                            (min_entropy(&spec) - exact.s_min).abs(),
                            (particle_number(&frame) - sys_number).abs(),
                            (g_mean - env_mean).abs(),
                            (g_var - env_var).abs(),
                            (b_mean - env_mean).abs(),
                            (b_var - env_var).abs(),
                            corr_dev,
                        ];
                        for (dev, v) in deviations.iter_mut().zip(values) {
                            if v > dev.max_abs || v.is_nan() {
                                dev.max_abs = if v.is_nan() { f64::INFINITY } else { v };
                                dev.worst_at = (m, n, g, t_env, t);
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(OracleReport {
        instances,
        samples,
        tolerance: config.tolerance,
        deviations,
    })
}
