//! Guarding a deadline against translating demands.
//!
//! Demands arrive as a Poisson process on one edge of a `W x L` rectangle and
//! move at speed `v` towards the opposite edge, the deadline. A unit-speed
//! vehicle tries to capture as many as possible before they cross it.
//!
//! * [`environment`]: parameters, kinematics and seeded demand streams.
//! * [`reachability`]: reachable sets, reachability graphs and longest paths.
//! * [`deadline`]: NCLP, LP and GP policies for `v >= 1`.
//! * [`tmhp`]: translational Hamiltonian paths and the TF policy for `v < 1`.
//! * [`bounds`]: analytical capture-fraction bounds.
//! * [`harness`]: Monte-Carlo experiments, sweeps, CSV and SVG output.

pub mod bounds;
pub mod deadline;
pub mod environment;
pub mod error;
pub mod harness;
pub mod reachability;
pub mod run;
pub mod tmhp;

pub use bounds::{
    causal_upper_bound, erf, lp_competitive_factor, lp_lower_bound, tf_lower_bound, BoundsReport,
    BETA_TSP,
};
pub use deadline::{run_gp, run_lp, run_nclp, simulate_deadline, DeadlinePolicy};
pub use environment::{
    demand_position, generate_stream, make_env, region_count, Demand, DemandState, DemandStatus,
    DemandStream, EnvParams, Point, Rect, VehicleState,
};
pub use error::{Error, Result};
pub use harness::{monte_carlo, sweep, ExperimentSpec, PolicyKind, RateGrid, Summary};
pub use reachability::{
    build_reach_graph, deadline_edge, is_reachable, longest_chain_fast, longest_path,
    DeadlineSource, PathPlan, ReachGraph,
};
pub use run::{EventKind, RunResult, TraceEvent};
pub use tmhp::{
    emhp_exact, emhp_heuristic, g_inv, g_map, intercept_time, run_tf, tmhp_solve, TmhpInstance,
    TmhpSolution,
};
