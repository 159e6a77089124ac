//! Symmetric tridiagonal eigensystems.
//!
//! The solver is the implicit-shift QL iteration with Wilkinson shifts.
//! Eigenvector components are accumulated only for a caller-chosen set of
//! rows (sites), so a 10^4-site chain can be diagonalised while keeping
//! only the handful of rows that the dynamics actually needs.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::ModelParams;

/// Real symmetric tridiagonal matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalMatrix {
    diag: Vec<f64>,
    offdiag: Vec<f64>,
}

impl TridiagonalMatrix {
    pub fn new(diag: Vec<f64>, offdiag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::param("diag", "matrix must have at least one row"));
        }
        if offdiag.len() + 1 != diag.len() {
            return Err(Error::Dimension {
                expected: diag.len() - 1,
                found: offdiag.len(),
            });
        }
        if diag.iter().chain(&offdiag).any(|x| !x.is_finite()) {
            return Err(Error::param("entries", "non-finite matrix entry"));
        }
        Ok(TridiagonalMatrix { diag, offdiag })
    }

    /// Open chain of `len` sites with constant hopping `t` and zero diagonal.
    pub fn uniform(len: usize, t: f64) -> Result<Self> {
        Self::new(vec![0.0; len], vec![t; len.saturating_sub(1)])
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn offdiag(&self) -> &[f64] {
        &self.offdiag
    }

    /// Entry `(i, j)`, zero outside the band.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        match i.abs_diff(j) {
            0 => self.diag[i],
            1 => self.offdiag[i.min(j)],
            _ => 0.0,
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        DMatrix::from_fn(n, n, |i, j| self.get(i, j))
    }

    pub fn trace(&self) -> f64 {
        self.diag.iter().sum()
    }

    /// `Tr h^2`.
    pub fn trace_of_square(&self) -> f64 {
        self.diag.iter().map(|d| d * d).sum::<f64>()
            + 2.0 * self.offdiag.iter().map(|e| e * e).sum::<f64>()
    }

    /// Largest absolute entry; bounds the spectral radius by three times this.
    pub fn max_abs_entry(&self) -> f64 {
        self.diag
            .iter()
            .chain(&self.offdiag)
            .fold(0.0, |a, x| a.max(x.abs()))
    }
}

/// Eigenvalues (ascending) plus eigenvector components on a subset of rows.
///
/// `components[(r, k)]` is the amplitude of eigenvector `k` on site
/// `rows[r]`. When `rows` is `0..L` this is the full orthogonal matrix `V`.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    rows: Vec<usize>,
    components: DMatrix<f64>,
}

impl SpectralDecomposition {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Sites whose eigenvector components are stored, ascending.
    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    pub fn components(&self) -> &DMatrix<f64> {
        &self.components
    }

    pub fn is_complete(&self) -> bool {
        self.rows.len() == self.dim()
    }

    /// Position of `site` within [`rows`](Self::rows).
    pub fn row_index(&self, site: usize) -> Option<usize> {
        self.rows.binary_search(&site).ok()
    }

    /// Full `L x L` eigenvector matrix (column `k` belongs to eigenvalue `k`).
    pub fn eigenvectors(&self) -> Option<&DMatrix<f64>> {
        self.is_complete().then_some(&self.components)
    }
}

const MAX_QL_ITERATIONS: usize = 60;

/// Eigenvalues only, in ascending order.
pub fn eigenvalues(matrix: &TridiagonalMatrix) -> Result<Vec<f64>> {
    Ok(eigendecompose_rows(matrix, &[])?.eigenvalues)
}

/// Full eigensystem.
pub fn eigendecompose(matrix: &TridiagonalMatrix) -> Result<SpectralDecomposition> {
    let rows: Vec<usize> = (0..matrix.dim()).collect();
    eigendecompose_rows(matrix, &rows)
}

/// All eigenvalues and the eigenvector components on `rows`.
///
/// Cost is `O(L^2 (1 + |rows|))` time and `O(L |rows|)` memory. Eigenvectors
/// are signed so that their first stored component of magnitude above
/// `1e-12` is positive.
pub fn eigendecompose_rows(
    matrix: &TridiagonalMatrix,
    rows: &[usize],
) -> Result<SpectralDecomposition> {
    let n = matrix.dim();
    let mut rows = rows.to_vec();
    rows.sort_unstable();
    rows.dedup();
    if let Some(&bad) = rows.iter().find(|&&r| r >= n) {
        return Err(Error::Dimension {
            expected: n,
            found: bad + 1,
        });
    }
    let r = rows.len();

    let mut d = matrix.diag.clone();
    let mut e = matrix.offdiag.clone();
    e.push(0.0);

    // z[i * r + k]: component on rows[k] of eigenvector i
    let mut z = vec![0.0; n * r];
    for (k, &row) in rows.iter().enumerate() {
        z[row * r + k] = 1.0;
    }

    for l in 0..n {
        let mut iterations = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            if iterations > MAX_QL_ITERATIONS {
                return Err(Error::Convergence { size: n, index: l });
            }

            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut rr = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + rr.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                rr = f.hypot(g);
                e[i + 1] = rr;
                if rr == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / rr;
                c = g / rr;
                g = d[i + 1] - p;
                rr = (d[i] - g) * s + 2.0 * c * b;
                p = s * rr;
                d[i + 1] = g + p;
                g = c * rr - b;
                if r > 0 {
                    let (lo, hi) = z.split_at_mut((i + 1) * r);
                    let zi = &mut lo[i * r..];
                    let zi1 = &mut hi[..r];
                    for (a, b) in zi.iter_mut().zip(zi1.iter_mut()) {
                        let f = *b;
                        *b = s * *a + c * f;
                        *a = c * *a - s * f;
                    }
                }
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]).then(a.cmp(&b)));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let mut components = DMatrix::zeros(r, n);
    for (col, &src) in order.iter().enumerate() {
        let v = &z[src * r..(src + 1) * r];
        let sign = match v.iter().find(|x| x.abs() > 1e-12) {
            Some(x) if *x < 0.0 => -1.0,
            _ => 1.0,
        };
        for (k, &x) in v.iter().enumerate() {
            components[(k, col)] = sign * x;
        }
    }
    Ok(SpectralDecomposition {
        eigenvalues,
        rows,
        components,
    })
}

/// Closed-form eigensystem of an open uniform chain of `len` sites with
/// hopping `t`: energies `2 t cos(pi k / (len + 1))`, amplitudes
/// `sqrt(2 / (len + 1)) sin(pi k i / (len + 1))`. Ascending order.
pub fn uniform_chain_modes(len: usize, t: f64) -> Result<SpectralDecomposition> {
    if len == 0 {
        return Err(Error::param("L", "chain needs at least one site"));
    }
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::param(
            "t",
            format!("must be finite and > 0, got {t}"),
        ));
    }
    let denom = (len + 1) as f64;
    let norm = (2.0 / denom).sqrt();
    let ks: Vec<usize> = (1..=len).rev().collect();
    let eigenvalues = ks
        .iter()
        .map(|&k| 2.0 * t * (std::f64::consts::PI * k as f64 / denom).cos())
        .collect();
    let components = DMatrix::from_fn(len, len, |i, col| {
        let k = ks[col] as f64;
        norm * (std::f64::consts::PI * k * (i + 1) as f64 / denom).sin()
    });
    Ok(SpectralDecomposition {
        eigenvalues,
        rows: (0..len).collect(),
        components,
    })
}

/// Flat-band density of states at the end site of a semi-infinite chain,
/// evaluated at band centre: `1 / (pi t_env)`.
pub fn contact_density_of_states(t_env: f64) -> f64 {
    1.0 / (std::f64::consts::PI * t_env)
}

/// One system eigenmode and its coupling to the environment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Hybridization {
    /// Mode label `k = 1..=M`.
    pub k: usize,
    /// Mode energy `2 t_sys cos(pi k / (M + 1))` of the isolated system chain.
    pub omega: f64,
    /// Hopping amplitude of the mode onto the first environment site.
    pub v: f64,
    /// Level broadening `pi rho V_k^2`.
    pub gamma: f64,
}

pub fn system_hybridizations(params: &ModelParams) -> Result<Vec<Hybridization>> {
    params.validate()?;
    let m = params.system_sites;
    let denom = (m + 1) as f64;
    let rho = contact_density_of_states(params.t_env);
    Ok((1..=m)
        .map(|k| {
            let angle = std::f64::consts::PI * k as f64 / denom;
            let v = params.coupling * (2.0 / denom).sqrt() * angle.sin();
            Hybridization {
                k,
                omega: 2.0 * params.t_sys * angle.cos(),
                v,
                gamma: std::f64::consts::PI * rho * v * v,
            }
        })
        .collect())
}
