//! Runs a scenario file and writes CSV + JSON:
//! `cargo run --release --example scenario_file [file] [out-dir]`.

use std::path::PathBuf;

use pagecurve::scenario::{run_scenario, Scenario};

fn main() -> pagecurve::Result<()> {
    let file = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| {
            PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/scenarios/page_curve.scn")
        });
    let out = std::env::args()
        .nth(2)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("pagecurve-example"));
    let scenario = Scenario::from_file(&file)?;
    print!("{}", scenario.to_file_string());
    let written = run_scenario(&scenario, &out)?;
    for w in &written.warnings {
        println!("warning: {w}");
    }
    for f in written
        .csv_files
        .iter()
        .chain(&written.json_files)
        .chain(&written.analytic_file)
    {
        println!("wrote {}", f.display());
    }
    Ok(())
}
