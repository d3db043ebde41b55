// Capture-fraction bounds across arrival rates for both speed regimes.

use std::error::Error;

use deadline_guard::{make_env, BoundsReport, BETA_TSP};

fn show(x: Option<f64>) -> String {
    x.map_or("-".into(), |b| format!("{b:.4}"))
}

pub fn run_example() -> Result<(), Box<dyn Error>> {
    println!(
        "{:>8} {:>10} {:>10} {:>10} {:>10}",
        "lambda", "LP lower", "LP factor", "causal up", "TF lower"
    );
    for (w, l, v) in [(120.0, 500.0, 2.0), (100.0, 200.0, 0.05)] {
        println!("W = {w}, L = {l}, v = {v}");
        for lambda in [0.1, 0.5, 1.0, 2.0, 8.0] {
            let b = BoundsReport::new(&make_env(w, l, v, lambda)?, BETA_TSP)?;
            println!(
                "{lambda:>8} {:>10} {:>10} {:>10} {:>10}",
                show(b.lp_lower_bound),
                show(b.lp_competitive_factor),
                show(b.causal_upper_bound),
                show(b.tf_lower_bound)
            );
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
