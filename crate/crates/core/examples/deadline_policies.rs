// NCLP, LP and GP on the same streams for demands faster than the vehicle.
// NCLP sees the whole future and so captures at least as many as the others.

use std::error::Error;

use deadline_guard::{generate_stream, make_env, simulate_deadline, DeadlinePolicy};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let policies = [
        ("NCLP", DeadlinePolicy::Nclp),
        ("LP", DeadlinePolicy::Lp { eta: 1.0 }),
        ("LP eta=0.5", DeadlinePolicy::Lp { eta: 0.5 }),
        ("GP", DeadlinePolicy::Gp),
    ];
    for lambda in [0.5, 2.0] {
        let env = make_env(120.0, 500.0, 2.0, lambda)?;
        let stream = generate_stream(&env, 1000, 1);
        println!("lambda = {lambda}");
        for (name, policy) in policies {
            let r = simulate_deadline(&stream, policy, env.width() / 2.0, false)?;
            println!(
                "  {name:<11} captured {:>4}, escaped {:>4}, fraction {:.4}",
                r.n_capt, r.n_esc, r.capture_fraction
            );
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
