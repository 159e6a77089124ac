use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pagecurve::oracle::{run_oracle_check, FermionSigns, OracleCheckConfig};
use pagecurve::scenario::{parse_tau_grid, preset, write_analytic, Scenario, PRESETS};

#[derive(Parser)]
#[command(
    name = "pagecurve",
    version,
    about = "Exact Page curves of a free-fermion chain emptying into an environment"
)]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a preset or a scenario file.
    Run(RunArgs),
    /// Compare the Gaussian method with brute-force many-body evolution.
    OracleCheck {
        /// Largest chain length M + N.
        #[arg(long, default_value_t = 14)]
        max_l: usize,
        #[arg(long, default_value_t = 1e-8)]
        tolerance: f64,
        /// Drop fermionic exchange signs in the reference (must fail).
        #[arg(long)]
        drop_signs: bool,
    },
    /// Write the universal analytic curves on a tau grid.
    Analytic {
        /// `a:b:n`, `log:a:b:n` or a comma list.
        grid: String,
        #[arg(long, value_delimiter = ',', default_value = "2")]
        renyi: Vec<String>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Preset name or path to a scenario file.
    target: Option<String>,
    /// System sites, comma list sweeps.
    #[arg(long = "M")]
    m: Option<String>,
    /// Environment sites, comma list sweeps.
    #[arg(long = "N")]
    n: Option<String>,
    /// System hopping.
    #[arg(long = "t-sys")]
    t_sys: Option<String>,
    /// Environment hopping.
    #[arg(long = "t-env")]
    t_env: Option<String>,
    /// Contact coupling, comma list sweeps.
    #[arg(long)]
    g: Option<String>,
    /// Last sample time.
    #[arg(long = "t-max")]
    t_max: Option<String>,
    /// Sample spacing.
    #[arg(long)]
    dt: Option<String>,
    /// Renyi orders, e.g. `2,3,inf`.
    #[arg(long)]
    renyi: Option<String>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

fn build_scenario(args: &RunArgs) -> pagecurve::Result<Scenario> {
    let mut s = match args.target.as_deref() {
        None => Scenario::default(),
        Some(t) if PRESETS.contains(&t) => preset(t)?,
        Some(path) => Scenario::from_file(path.as_ref())?,
    };
    let overrides = [
        ("M", &args.m),
        ("N", &args.n),
        ("t_sys", &args.t_sys),
        ("t_env", &args.t_env),
        ("g", &args.g),
        ("t_max", &args.t_max),
        ("dt", &args.dt),
        ("renyi", &args.renyi),
    ];
    for (key, value) in overrides {
        if let Some(v) = value {
            s.set(key, v)?;
        }
    }
    s.validate()?;
    Ok(s)
}

fn run(cli: Cli) -> pagecurve::Result<ExitCode> {
    match cli.command {
        Command::Run(args) => {
            let s = build_scenario(&args)?;
            let out = pagecurve::scenario::run_scenario(&s, &args.out)?;
            for w in &out.warnings {
                eprintln!("warning: {w}");
            }
            for f in out.csv_files.iter().chain(&out.analytic_file) {
                println!("{}", f.display());
            }
        }
        Command::OracleCheck {
            max_l,
            tolerance,
            drop_signs,
        } => {
            let config = OracleCheckConfig {
                max_sites: max_l,
                tolerance,
                signs: if drop_signs {
                    FermionSigns::Dropped
                } else {
                    FermionSigns::JordanWigner
                },
                ..OracleCheckConfig::default()
            };
            let report = run_oracle_check(&config)?;
            println!(
                "{} instances, {} samples, tolerance {:e}",
                report.instances, report.samples, report.tolerance
            );
            for d in &report.deviations {
                let mark = if d.max_abs <= report.tolerance {
                    "ok  "
                } else {
                    "FAIL"
                };
                let (m, n, g, te, t) = d.worst_at;
                println!(
                    "{mark} {:<20} {:.3e}  (M={m} N={n} g={g} t_env={te} t={t:.3})",
                    d.observable, d.max_abs
                );
            }
            if !report.passed() {
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Analytic { grid, renyi, out } => {
            let tau = parse_tau_grid(&grid)?;
            let mut s = Scenario::default();
            s.set("renyi", &renyi.join(","))?;
            std::fs::create_dir_all(&out).map_err(|source| pagecurve::Error::Io {
                path: out.clone(),
                source,
            })?;
            let path = out.join("analytic.csv");
            write_analytic(&tau, &s.renyi, &path)?;
            println!("{}", path.display());
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(k) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(k.max(1))
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
