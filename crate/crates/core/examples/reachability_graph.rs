// Reachability graph of a vehicle parked on the deadline, its longest path,
// and the `O(n log n)` chain shortcut that gives the same length.

use std::error::Error;

use deadline_guard::{
    build_reach_graph, generate_stream, longest_chain_fast, longest_path, make_env, VehicleState,
};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let env = make_env(120.0, 500.0, 2.0, 1.0)?;
    let stream = generate_stream(&env, 60, 3);
    let vehicle = VehicleState::new(env.width() / 2.0, env.length(), 0.0);

    let graph = build_reach_graph(&vehicle, stream.demands(), &env)?;
    println!(
        "{} vertices, {} edges ({} from the vehicle)",
        graph.vertex_count(),
        graph.edge_count(),
        graph.source_edges().len()
    );

    let plan = longest_path(&graph)?;
    println!("longest path captures {} demands:", plan.length);
    for (id, t) in plan.order.iter().zip(&plan.capture_times) {
        let d = stream.demands()[*id];
        println!(
            "  demand {id:>2} at x = {:>6.2}, captured at t = {t:.2}",
            d.x
        );
    }

    let fast = longest_chain_fast(&vehicle, stream.demands(), &env)?;
    assert_eq!(fast.length, plan.length);
    println!("chain shortcut agrees: {}", fast.length);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
