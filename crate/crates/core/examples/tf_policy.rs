// TF policy for demands slower than the vehicle, against the analytical
// upper and lower bounds.

use std::error::Error;

use deadline_guard::tmhp::simulate_tf;
use deadline_guard::{
    causal_upper_bound, generate_stream, make_env, tf_lower_bound, EventKind, Point, BETA_TSP,
};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let (w, l, v) = (100.0, 20.0, 0.05);
    for density in [8.0, 32.0] {
        let lambda = density / (v * w);
        let env = make_env(w, l, v, lambda)?;
        let stream = generate_stream(&env, 5000, 4);
        let r = simulate_tf(&stream, Point::new(w / 2.0, l / 2.0), true)?;
        let plans = r.trace.as_ref().map_or(0, |t| {
            t.iter().filter(|e| e.event == EventKind::Recompute).count()
        });
        println!(
            "v lambda W = {density}: fraction {:.4} over {plans} plans, bounds [{:.4}, {:.4}]",
            r.capture_fraction,
            tf_lower_bound(v, lambda, w, BETA_TSP)?,
            causal_upper_bound(v, lambda, w)?
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
