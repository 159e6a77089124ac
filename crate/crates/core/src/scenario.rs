//! Scenario files, named presets and the CSV/JSON writers.
//!
//! A scenario file is plain text with one `key = value` per line. Blank
//! lines and anything after `#` are ignored; keys are case-sensitive and
//! may appear once. Lists are comma-separated. See the README for the
//! full key table.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::evolve::{Propagator, RowCoverage};
use crate::model::{validate_scenario, ModelParams, ScenarioDiagnostics};
use crate::observables::ObservableRecord;
use crate::rlm::{self, disjointness_report, UniversalCurve, DEFAULT_DISJOINTNESS_THRESHOLD};

/// Time samples of a run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum TimeGrid {
    /// `0, dt, 2 dt, ...` up to and including `t_max` (to within `dt/2`).
    Uniform {
        t_max: f64,
        dt: f64,
    },
    Explicit(Vec<f64>),
}

impl TimeGrid {
    pub fn times(&self) -> Vec<f64> {
        match self {
            TimeGrid::Uniform { t_max, dt } => {
                let n = (t_max / dt + 0.5).floor() as usize;
                (0..=n).map(|i| i as f64 * dt).collect()
            }
            TimeGrid::Explicit(t) => t.clone(),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            TimeGrid::Uniform { t_max, dt } => {
                if !(dt.is_finite() && *dt > 0.0) {
                    return Err(Error::param(
                        "dt",
                        format!("must be finite and > 0, got {dt}"),
                    ));
                }
                if !(t_max.is_finite() && *t_max >= 0.0) {
                    return Err(Error::param(
                        "t_max",
                        format!("must be finite and >= 0, got {t_max}"),
                    ));
                }
            }
            TimeGrid::Explicit(t) => {
                if t.is_empty() {
                    return Err(Error::param("times", "empty list"));
                }
                if t.iter().any(|x| !x.is_finite()) || t.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::param(
                        "times",
                        "must be finite and strictly ascending",
                    ));
                }
            }
        }
        Ok(())
    }

    fn t_max(&self) -> f64 {
        match self {
            TimeGrid::Uniform { t_max, .. } => *t_max,
            TimeGrid::Explicit(t) => t.last().copied().unwrap_or(0.0),
        }
    }
}

/// A cartesian sweep over `M x N x g` sharing one time grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scenario {
    pub name: String,
    pub system_sites: Vec<usize>,
    pub env_sites: Vec<usize>,
    pub couplings: Vec<f64>,
    pub t_sys: f64,
    pub t_env: f64,
    pub grid: TimeGrid,
    pub renyi: Vec<f64>,
    /// Also write the universal analytic curves.
    pub analytic: bool,
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            name: "custom".into(),
            system_sites: vec![50],
            env_sites: vec![10_000],
            couplings: vec![0.5],
            t_sys: 1.0,
            t_env: 4.0,
            grid: TimeGrid::Uniform {
                t_max: 2400.0,
                dt: 0.5,
            },
            renyi: vec![2.0],
            analytic: false,
        }
    }
}

pub const KEYS: [&str; 12] = [
    "name", "M", "N", "g", "t_sys", "t_env", "t_max", "dt", "times", "renyi", "analytic", "preset",
];

fn parse_list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(|s| s.trim())
        .map(|s| {
            s.parse::<T>()
                .map_err(|_| Error::scenario(key, format!("cannot parse {s:?}")))
        })
        .collect()
}

fn parse_one<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse::<T>()
        .map_err(|_| Error::scenario(key, format!("cannot parse {value:?}")))
}

fn parse_order(s: &str) -> Option<f64> {
    match s {
        "inf" | "infinity" => Some(f64::INFINITY),
        _ => s.parse().ok(),
    }
}

impl Scenario {
    /// Applies one `key = value` assignment.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key {
            "name" => {
                if value.is_empty()
                    || !value
                        .chars()
                        .all(|c| c.is_ascii_alphanumeric() || "_-.".contains(c))
                {
                    return Err(Error::scenario(key, "use letters, digits, '_', '-' or '.'"));
                }
                self.name = value.to_string();
            }
            "M" => self.system_sites = parse_list(key, value)?,
            "N" => self.env_sites = parse_list(key, value)?,
            "g" => self.couplings = parse_list(key, value)?,
            "t_sys" => self.t_sys = parse_one(key, value)?,
            "t_env" => self.t_env = parse_one(key, value)?,
            "t_max" | "dt" => {
                let x: f64 = parse_one(key, value)?;
                let (mut t_max, mut dt) = match self.grid {
                    TimeGrid::Uniform { t_max, dt } => (t_max, dt),
                    TimeGrid::Explicit(_) => (2400.0, 0.5),
                };
                if key == "t_max" {
                    t_max = x;
                } else {
                    dt = x;
                }
                self.grid = TimeGrid::Uniform { t_max, dt };
            }
            "times" => self.grid = TimeGrid::Explicit(parse_list(key, value)?),
            "renyi" => {
                self.renyi = if value.is_empty() {
                    Vec::new()
                } else {
                    value
                        .split(',')
                        .map(|s| {
                            parse_order(s.trim())
                                .ok_or_else(|| Error::scenario(key, format!("cannot parse {s:?}")))
                        })
                        .collect::<Result<_>>()?
                }
            }
            "analytic" => {
                self.analytic = match value {
                    "true" | "yes" | "1" => true,
                    "false" | "no" | "0" => false,
                    _ => {
                        return Err(Error::scenario(
                            key,
                            format!("expected true/false, got {value:?}"),
                        ))
                    }
                }
            }
            "preset" => {
                let base = preset(value)?;
                *self = base;
            }
            _ => {
                return Err(Error::scenario(
                    key,
                    format!("unknown key (known: {})", KEYS.join(", ")),
                ))
            }
        }
        Ok(())
    }

    /// Parses a scenario file. A `preset` line, if present, must come first
    /// and seeds every unset key.
    pub fn parse(text: &str) -> Result<Self> {
        let mut s = Scenario::default();
        let mut seen: Vec<String> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let ctx = format!("line {}", lineno + 1);
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::scenario(ctx.clone(), format!("expected `key = value`, got {line:?}"))
            })?;
            let key = key.trim();
            if seen.iter().any(|k| k == key) {
                return Err(Error::scenario(ctx, format!("duplicate key {key:?}")));
            }
            if key == "preset" && !seen.is_empty() {
                return Err(Error::scenario(ctx, "`preset` must be the first key"));
            }
            s.set(key, value)
                .map_err(|e| Error::scenario(ctx.clone(), e.to_string()))?;
            seen.push(key.to_string());
        }
        s.validate()?;
        Ok(s)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    /// Renders the scenario back into file form.
    pub fn to_file_string(&self) -> String {
        let join = |v: Vec<String>| v.join(", ");
        let mut out = String::new();
        let _ = writeln!(out, "name = {}", self.name);
        let _ = writeln!(
            out,
            "M = {}",
            join(self.system_sites.iter().map(|x| x.to_string()).collect())
        );
        let _ = writeln!(
            out,
            "N = {}",
            join(self.env_sites.iter().map(|x| x.to_string()).collect())
        );
        let _ = writeln!(
            out,
            "g = {}",
            join(self.couplings.iter().map(|x| x.to_string()).collect())
        );
        let _ = writeln!(out, "t_sys = {}", self.t_sys);
        let _ = writeln!(out, "t_env = {}", self.t_env);
        match &self.grid {
            TimeGrid::Uniform { t_max, dt } => {
                let _ = writeln!(out, "t_max = {t_max}\ndt = {dt}");
            }
            TimeGrid::Explicit(t) => {
                let _ = writeln!(
                    out,
                    "times = {}",
                    join(t.iter().map(|x| x.to_string()).collect())
                );
            }
        }
        let _ = writeln!(
            out,
            "renyi = {}",
            join(self.renyi.iter().map(|&q| order_label(q)).collect())
        );
        let _ = writeln!(out, "analytic = {}", self.analytic);
        out
    }

    pub fn validate(&self) -> Result<()> {
        if self.system_sites.is_empty() || self.env_sites.is_empty() || self.couplings.is_empty() {
            return Err(Error::scenario(
                &self.name,
                "M, N and g need at least one value each",
            ));
        }
        for p in self.points() {
            p?;
        }
        self.grid.validate()?;
        for &q in &self.renyi {
            if q.is_nan() || q <= 0.0 {
                return Err(Error::param(
                    "renyi",
                    format!("orders must be > 0, got {q}"),
                ));
            }
        }
        Ok(())
    }

    /// Every `(M, N, g)` combination, in file order.
    pub fn points(&self) -> impl Iterator<Item = Result<ModelParams>> + '_ {
        self.system_sites.iter().flat_map(move |&m| {
            self.env_sites.iter().flat_map(move |&n| {
                self.couplings
                    .iter()
                    .map(move |&g| ModelParams::new(m, n, self.t_sys, self.t_env, g))
            })
        })
    }
}

pub const PRESETS: [&str; 8] = [
    "fig3_m_decay",
    "fig4_svn_vs_emitted",
    "fig5_renyi",
    "fig6_min_entropy",
    "fig7_energy_variance",
    "fig9_finite_size",
    "homogeneous",
    "quick",
];

/// Named parameter sets for the standard sweeps.
pub fn preset(name: &str) -> Result<Scenario> {
    let base = Scenario {
        name: name.to_string(),
        ..Scenario::default()
    };
    let s = match name {
        "fig3_m_decay" => Scenario {
            system_sites: vec![25, 50, 75],
            ..base
        },
        "fig4_svn_vs_emitted" => Scenario {
            couplings: vec![0.35, 0.5, 0.65, 0.8],
            analytic: true,
            ..base
        },
        "fig5_renyi" => Scenario {
            couplings: vec![0.35, 0.5, 0.8],
            renyi: vec![2.0],
            analytic: true,
            ..base
        },
        "fig6_min_entropy" => Scenario {
            couplings: vec![0.35, 0.5, 0.8],
            renyi: vec![],
            analytic: true,
            ..base
        },
        "fig7_energy_variance" => Scenario {
            system_sites: vec![25, 50, 75],
            analytic: true,
            ..base
        },
        "fig9_finite_size" => Scenario {
            env_sites: vec![75, 200, 10_000],
            couplings: vec![0.65],
            t_env: 1.0,
            grid: TimeGrid::Uniform {
                t_max: 1000.0,
                dt: 0.5,
            },
            ..base
        },
        "homogeneous" => Scenario {
            couplings: vec![1.0],
            t_env: 1.0,
            grid: TimeGrid::Uniform {
                t_max: 200.0,
                dt: 0.5,
            },
            ..base
        },
        "quick" => Scenario {
            system_sites: vec![10],
            env_sites: vec![400],
            grid: TimeGrid::Uniform {
                t_max: 90.0,
                dt: 0.5,
            },
            analytic: true,
            ..base
        },
        _ => {
            return Err(Error::scenario(
                name,
                format!("unknown preset (known: {})", PRESETS.join(", ")),
            ))
        }
    };
    Ok(s)
}

/// One row of a run table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub tau: f64,
    pub current: f64,
    pub record: ObservableRecord,
}

/// All samples of one `(M, N, g)` point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunTable {
    pub params: ModelParams,
    pub renyi: Vec<f64>,
    pub rows: Vec<Row>,
}

/// `dm/dt` on an arbitrary ascending grid from three-point Lagrange
/// stencils (one-sided at the ends).
pub fn grid_derivative(t: &[f64], y: &[f64]) -> Result<Vec<f64>> {
    let n = t.len();
    if n != y.len() {
        return Err(Error::Dimension {
            expected: n,
            found: y.len(),
        });
    }
    if n < 3 {
        return Err(Error::TooFewSamples {
            needed: 3,
            found: n,
        });
    }
    // derivative at x of the parabola through (t[a..a+3], y[a..a+3])
    let stencil = |a: usize, x: f64| {
        let (t0, t1, t2) = (t[a], t[a + 1], t[a + 2]);
        let (y0, y1, y2) = (y[a], y[a + 1], y[a + 2]);
        y0 * ((x - t1) + (x - t2)) / ((t0 - t1) * (t0 - t2))
            + y1 * ((x - t0) + (x - t2)) / ((t1 - t0) * (t1 - t2))
            + y2 * ((x - t0) + (x - t1)) / ((t2 - t0) * (t2 - t1))
    };
    Ok((0..n)
        .map(|i| stencil(i.saturating_sub(1).min(n - 3), t[i]))
        .collect())
}

/// Evolves one parameter point and evaluates every observable.
pub fn run_point(params: &ModelParams, times: &[f64], renyi: &[f64]) -> Result<RunTable> {
    let coords = |e: Error| {
        Error::scenario(
            format!(
                "M={} N={} g={}",
                params.system_sites, params.env_sites, params.coupling
            ),
            e.to_string(),
        )
    };
    let prop = Propagator::new(params, RowCoverage::Boundary).map_err(coords)?;
    let records: Vec<ObservableRecord> = times
        .par_iter()
        .map(|&t| {
            ObservableRecord::evaluate(&prop.frame(t), prop.hamiltonian(), prop.occupation(), renyi)
        })
        .collect::<Result<_>>()
        .map_err(coords)?;
    let m: Vec<f64> = records.iter().map(|r| r.m).collect();
    let current = if times.len() >= 3 {
        grid_derivative(times, &m)?
    } else {
        vec![f64::NAN; times.len()]
    };
    let rows = records
        .into_iter()
        .zip(current)
        .map(|(record, current)| Row {
            tau: rlm::tau_of_time(record.time, params),
            current,
            record,
        })
        .collect();
    Ok(RunTable {
        params: *params,
        renyi: renyi.to_vec(),
        rows,
    })
}

pub(crate) fn order_label(q: f64) -> String {
    if q.is_infinite() {
        "inf".into()
    } else {
        format!("{q}")
    }
}

/// 12 significant digits, fixed exponent form.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        // + 0.0 folds -0 into 0
        format!("{:.11e}", x + 0.0)
    }
}

impl RunTable {
    pub fn columns(&self) -> Vec<String> {
        let mut cols: Vec<String> = [
            "time",
            "tau",
            "m",
            "m_frac",
            "emitted_frac",
            "current",
            "s_vn",
            "s_vn_frac",
        ]
        .map(String::from)
        .into();
        cols.extend(
            self.renyi
                .iter()
                .map(|&q| format!("s_renyi_{}", order_label(q))),
        );
        cols.extend(
            [
                "s_min",
                "s_min_frac",
                "henv_mean",
                "henv_var",
                "henv_var_frac",
                "bound",
                "nu_raw_min",
                "nu_raw_max",
            ]
            .map(String::from),
        );
        cols
    }

    pub fn to_csv(&self) -> String {
        let m_sites = self.params.system_sites as f64;
        let mut out = self.columns().join(",");
        out.push('\n');
        for row in &self.rows {
            let r = &row.record;
            let mut vals = vec![
                r.time,
                row.tau,
                r.m,
                r.m / m_sites,
                1.0 - r.m / m_sites,
                row.current,
                r.s_vn,
                r.s_vn / m_sites,
            ];
            vals.extend(r.s_renyi.iter().map(|v| v.value));
            vals.extend([
                r.s_min,
                r.s_min / m_sites,
                r.henv_mean,
                r.henv_var,
                r.henv_var / m_sites,
                r.bound,
                r.nu_raw_min,
                r.nu_raw_max,
            ]);
            out.push_str(&vals.into_iter().map(fmt_num).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
        out
    }

    pub fn file_stem(&self, scenario: &str) -> String {
        let p = &self.params;
        format!(
            "{scenario}_M{}_N{}_g{}",
            p.system_sites, p.env_sites, p.coupling
        )
    }

    pub fn times(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.record.time).collect()
    }
}

/// Universal curves as CSV.
pub fn analytic_csv(curve: &UniversalCurve, renyi: &[f64]) -> String {
    let mut cols: Vec<String> = ["tau", "m_frac", "emitted_frac", "s_vn_frac"]
        .map(String::from)
        .into();
    cols.extend(
        renyi
            .iter()
            .map(|&q| format!("s_renyi_{}_frac", order_label(q))),
    );
    cols.extend(["s_min_frac", "var_frac", "var_frac_chain"].map(String::from));
    let mut out = cols.join(",");
    out.push('\n');
    for p in &curve.points {
        let mut vals = vec![p.tau, p.m_frac, p.emitted_frac, p.s_frac];
        vals.extend(p.s_renyi_frac.iter().map(|&(_, v)| v));
        vals.extend([p.s_min_frac, p.var_frac, p.var_frac_chain]);
        out.push_str(&vals.into_iter().map(fmt_num).collect::<Vec<_>>().join(","));
        out.push('\n');
    }
    out
}

/// `a:b:n` (n linear points), `log:a:b:n` (n log-spaced points, a > 0)
/// or an explicit comma list.
pub fn parse_tau_grid(spec: &str) -> Result<Vec<f64>> {
    let spec = spec.trim();
    let parts: Vec<&str> = spec.split(':').collect();
    let range = |a: &str, b: &str, n: &str| -> Result<(f64, f64, usize)> {
        let a: f64 = parse_one("tau grid", a)?;
        let b: f64 = parse_one("tau grid", b)?;
        let n: usize = parse_one("tau grid", n)?;
        if n < 2 || a.partial_cmp(&b) != Some(std::cmp::Ordering::Less) {
            return Err(Error::scenario(
                "tau grid",
                "need start < stop and at least 2 points",
            ));
        }
        Ok((a, b, n))
    };
    let grid: Vec<f64> = match parts.as_slice() {
        [a, b, n] => {
            let (a, b, n) = range(a, b, n)?;
            (0..n)
                .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
                .collect()
        }
        ["log", a, b, n] => {
            let (a, b, n) = range(a, b, n)?;
            if a <= 0.0 {
                return Err(Error::scenario("tau grid", "log grid needs start > 0"));
            }
            let (la, lb) = (a.ln(), b.ln());
            (0..n)
                .map(|i| (la + (lb - la) * i as f64 / (n - 1) as f64).exp())
                .collect()
        }
        [list] => parse_list("tau grid", list)?,
        _ => {
            return Err(Error::scenario(
                "tau grid",
                format!("cannot parse {spec:?}"),
            ))
        }
    };
    if grid.iter().any(|&x| !(x.is_finite() && x >= 0.0)) {
        return Err(Error::scenario(
            "tau grid",
            "values must be finite and >= 0",
        ));
    }
    Ok(grid)
}

pub const DEFAULT_TAU_GRID: &str = "0:40:401";

#[derive(Debug, Clone, Serialize)]
struct DisjointnessSummary {
    threshold: f64,
    violating_fraction: f64,
    band_edge_fraction: f64,
    band_edge_modes: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
struct RunMetadata<'a> {
    tool: &'static str,
    version: &'static str,
    scenario: &'a Scenario,
    params: ModelParams,
    samples: usize,
    csv: String,
    columns: Vec<String>,
    wall_time_s: f64,
    threads: usize,
    diagnostics: ScenarioDiagnostics,
    disjointness: DisjointnessSummary,
}

/// What a scenario run wrote.
#[derive(Debug, Clone, Default)]
pub struct RunOutput {
    pub csv_files: Vec<PathBuf>,
    pub json_files: Vec<PathBuf>,
    pub analytic_file: Option<PathBuf>,
    pub warnings: Vec<String>,
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Runs every sweep point and writes `<name>_M.._N.._g...csv` plus a
/// `.json` sidecar per point into `out_dir`.
pub fn run_scenario(scenario: &Scenario, out_dir: &Path) -> Result<RunOutput> {
    scenario.validate()?;
    std::fs::create_dir_all(out_dir).map_err(|source| Error::Io {
        path: out_dir.to_path_buf(),
        source,
    })?;
    let times = scenario.grid.times();
    let mut output = RunOutput::default();
    for params in scenario.points() {
        let params = params?;
        let start = Instant::now();
        let table = run_point(&params, &times, &scenario.renyi)?;
        let wall = start.elapsed().as_secs_f64();
        let stem = table.file_stem(&scenario.name);
        let csv_path = out_dir.join(format!("{stem}.csv"));
        write_file(&csv_path, &table.to_csv())?;

        let diagnostics = validate_scenario(&params, scenario.grid.t_max());
        let dj = disjointness_report(&params, DEFAULT_DISJOINTNESS_THRESHOLD)?;
        output
            .warnings
            .extend(diagnostics.warnings.iter().map(|w| format!("{stem}: {w}")));
        let meta = RunMetadata {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            scenario,
            params,
            samples: times.len(),
            csv: format!("{stem}.csv"),
            columns: table.columns(),
            wall_time_s: wall,
            threads: rayon::current_num_threads(),
            diagnostics,
            disjointness: DisjointnessSummary {
                threshold: dj.threshold,
                violating_fraction: dj.violating_fraction,
                band_edge_fraction: dj.band_edge_fraction,
                band_edge_modes: dj.band_edge_modes,
            },
        };
        let json_path = out_dir.join(format!("{stem}.json"));
        let json = serde_json::to_string_pretty(&meta).expect("metadata serialises");
        write_file(&json_path, &(json + "\n"))?;
        output.csv_files.push(csv_path);
        output.json_files.push(json_path);
    }
    if scenario.analytic {
        let path = out_dir.join(format!("{}_analytic.csv", scenario.name));
        write_analytic(&parse_tau_grid(DEFAULT_TAU_GRID)?, &scenario.renyi, &path)?;
        output.analytic_file = Some(path);
    }
    Ok(output)
}

pub fn write_analytic(tau_grid: &[f64], renyi: &[f64], path: &Path) -> Result<()> {
    let curve = UniversalCurve::compute(tau_grid, renyi)?;
    write_file(path, &analytic_csv(&curve, renyi))
}
