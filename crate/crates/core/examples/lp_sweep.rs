// Arrival-rate sweep of the LP policy, written as CSV and SVG next to the
// system temp directory.

use std::error::Error;
use std::fs::File;

use deadline_guard::harness::{write_csv, write_svg};
use deadline_guard::{make_env, sweep, ExperimentSpec, PolicyKind, RateGrid};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let mut spec = ExperimentSpec::new(PolicyKind::Lp, make_env(120.0, 500.0, 2.0, 0.25)?);
    spec.runs = 4;
    spec.n_demands = 500;
    spec.sweep = Some(RateGrid {
        min: 0.25,
        max: 2.0,
        step: 0.25,
    });
    let rows = sweep(&spec)?;

    write_csv(&rows, std::io::stdout().lock())?;
    let dir = std::env::temp_dir();
    let csv = dir.join("lp_sweep.csv");
    let svg = dir.join("lp_sweep.svg");
    write_csv(&rows, File::create(&csv)?)?;
    write_svg(&rows, "LP capture fraction", File::create(&svg)?)?;
    println!("wrote {} and {}", csv.display(), svg.display());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
