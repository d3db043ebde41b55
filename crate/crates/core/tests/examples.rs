macro_rules! example {
    ($module:ident, $file:literal) => {
        mod $module {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", $file));
        }
    };
}

example!(stream_generation, "stream_generation.rs");
example!(reachability_graph, "reachability_graph.rs");
example!(deadline_policies, "deadline_policies.rs");
example!(tmhp_path, "tmhp_path.rs");
example!(tf_policy, "tf_policy.rs");
example!(bounds_table, "bounds_table.rs");
example!(lp_sweep, "lp_sweep.rs");

#[test]
fn examples_run() {
    stream_generation::run_example().unwrap();
    reachability_graph::run_example().unwrap();
    deadline_policies::run_example().unwrap();
    tmhp_path::run_example().unwrap();
    tf_policy::run_example().unwrap();
    bounds_table::run_example().unwrap();
    lp_sweep::run_example().unwrap();
}
