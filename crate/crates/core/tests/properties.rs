use proptest::prelude::*;

use deadline_guard::tmhp::{drift_correction, execute_order, simulate_tf};
use deadline_guard::{
    build_reach_graph, causal_upper_bound, deadline_edge, g_inv, g_map, generate_stream,
    is_reachable, longest_chain_fast, longest_path, lp_lower_bound, make_env, simulate_deadline,
    tf_lower_bound, tmhp_solve, DeadlinePolicy, Demand, DemandStatus, DemandStream, EnvParams,
    EventKind, Point, RunResult, TmhpInstance, VehicleState, BETA_TSP,
};

/// Strictly increasing arrival times from positive gaps, abscissae in `[0, W)`.
fn demands_strategy(max_n: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((0.001..5.0f64, 0.0..1.0f64), 0..max_n)
}

fn build(env: &EnvParams, raw: &[(f64, f64)]) -> Vec<Demand> {
    let mut t = 0.0;
    raw.iter()
        .enumerate()
        .map(|(id, &(gap, u))| {
            t += gap;
            Demand {
                id,
                t_arr: t,
                x: u * env.width(),
            }
        })
        .collect()
}

fn env_strategy() -> impl Strategy<Value = EnvParams> {
    (5.0..50.0f64, 10.0..100.0f64, 1.0..4.0f64)
        .prop_map(|(w, l, v)| make_env(w, l, v, 1.0).unwrap())
}

proptest! {
    #[test]
    fn edges_match_reachability_at_capture(env in env_strategy(), raw in demands_strategy(25)) {
        let ds = build(&env, &raw);
        let (l, v) = (env.length(), env.speed());
        for i in &ds {
            for j in &ds {
                if i.id == j.id {
                    continue;
                }
                let t = i.escape_time(&env);
                let gap = (i.x - j.x).abs() - (j.t_arr - i.t_arr);
                // skip pairs within rounding of the boundary
                if gap.abs() < 1e-9 {
                    continue;
                }
                let oracle = j.t_arr >= i.t_arr && is_reachable(Point::new(i.x, l), j.position(v, t), v);
                prop_assert_eq!(deadline_edge(i, j), oracle);
            }
        }
    }

    #[test]
    fn graphs_are_acyclic_and_paths_follow_edges(
        env in env_strategy(),
        raw in demands_strategy(40),
        u in 0.0..1.0f64,
    ) {
        let ds = build(&env, &raw);
        let vehicle = VehicleState::new(u * env.width(), env.length(), 0.0);
        let g = build_reach_graph(&vehicle, &ds, &env).unwrap();
        let mut rank = vec![0; g.vertex_count()];
        for (r, &k) in g.topo_order().iter().enumerate() {
            rank[k] = r;
        }
        for a in 0..g.vertex_count() {
            for &b in g.successors(a) {
                prop_assert!(rank[a] < rank[b]);
            }
        }
        let plan = longest_path(&g).unwrap();
        prop_assert_eq!(plan.order.len(), plan.length);
        if let Some(&first) = plan.order.first() {
            prop_assert!(g.source_edges().iter().any(|&k| g.ids()[k] == first));
        }
        let edges = g.edge_ids();
        for w in plan.order.windows(2) {
            prop_assert!(edges.contains(&(w[0], w[1])));
        }
        prop_assert_eq!(plan.length, longest_chain_fast(&vehicle, &ds, &env).unwrap().length);
    }

    #[test]
    fn adding_a_demand_never_shortens_the_longest_path(
        env in env_strategy(),
        raw in demands_strategy(30),
        extra in (0.001..5.0f64, 0.0..1.0f64),
        u in 0.0..1.0f64,
    ) {
        let ds = build(&env, &raw);
        let mut more_raw = raw.clone();
        more_raw.push(extra);
        let more = build(&env, &more_raw);
        let vehicle = VehicleState::new(u * env.width(), env.length(), 0.0);
        let base = longest_path(&build_reach_graph(&vehicle, &ds, &env).unwrap()).unwrap();
        let grown = longest_path(&build_reach_graph(&vehicle, &more, &env).unwrap()).unwrap();
        prop_assert!(grown.length >= base.length);
    }

    #[test]
    fn g_round_trips(x in -1e3..1e3f64, y in -1e3..1e3f64, v in 0.001..0.999f64) {
        let p = Point::new(x, y);
        let q = g_inv(g_map(p, v).unwrap(), v).unwrap();
        prop_assert!(p.distance(q) < 1e-12 * (1.0 + x.abs() + y.abs()));
    }

    #[test]
    fn tmhp_duration_identity(
        raw in prop::collection::vec((-30.0..30.0f64, -30.0..30.0f64), 0..16),
        v in 0.05..0.95f64,
    ) {
        let pts: Vec<Point> = raw.iter().map(|&(x, y)| Point::new(x, y)).collect();
        let s = Point::new(0.0, 10.0);
        let f = Point::new(-5.0, -20.0);
        let inst = TmhpInstance::new(s, pts, f, v).unwrap();
        let sol = tmhp_solve(&inst).unwrap();
        prop_assert_eq!(execute_order(&inst, &sol.order), sol.duration);
        let predicted = sol.emhp_length + drift_correction(s, f, v);
        prop_assert!((sol.duration - predicted).abs() <= 1e-9 * (1.0 + sol.duration));
    }

    #[test]
    fn bounds_lie_in_the_unit_interval(
        v in 0.001..0.999f64,
        lambda in 0.001..1e3f64,
        w in 0.01..1e3f64,
    ) {
        let ub = causal_upper_bound(v, lambda, w).unwrap();
        let lb = tf_lower_bound(v, lambda, w, BETA_TSP).unwrap();
        prop_assert!((0.0..=1.0).contains(&ub) && (0.0..=1.0).contains(&lb));
        prop_assert!(lb <= ub);
        let lp = lp_lower_bound(lambda, w);
        prop_assert!(lp > 0.0 && lp <= 1.0);
    }
}

#[test]
fn g_round_trip_on_a_thousand_points() {
    for k in 0..1000 {
        let p = Point::new(
            (k as f64 * 0.731).sin() * 500.0,
            (k as f64 * 1.37).cos() * 500.0,
        );
        for v in [0.01, 0.5, 0.99] {
            let q = g_inv(g_map(p, v).unwrap(), v).unwrap();
            assert!(p.distance(q) < 1e-12 * 1e3, "{p:?} {q:?}");
        }
    }
}

#[test]
fn lp_lower_bound_strictly_decreases_in_alpha() {
    // alpha = lambda W / 2 with W = 2
    let mut prev = f64::INFINITY;
    for k in 1..=10_000 {
        let alpha = k as f64 * 0.01;
        let b = lp_lower_bound(alpha, 2.0);
        assert!(b < prev, "alpha {alpha}");
        prev = b;
    }
}

fn deadline_run(s: &DemandStream, policy: DeadlinePolicy, x0: f64) -> RunResult {
    simulate_deadline(s, policy, x0, true).unwrap()
}

/// Every capture was reachable when its plan was committed, happens on the
/// deadline at the escape instant, and the vehicle never exceeds unit speed.
fn check_deadline_run(s: &DemandStream, r: &RunResult) {
    let env = s.env();
    let (l, v) = (env.length(), env.speed());
    let ds = s.demands();
    assert_eq!(r.n_capt + r.n_esc, ds.len());
    for st in &r.states {
        assert!(matches!(
            st.status,
            DemandStatus::Captured | DemandStatus::Escaped
        ));
    }
    let trace = r.trace.as_ref().unwrap();
    let commits = r.commits.as_ref().unwrap();
    for w in trace.windows(2) {
        assert!(w[1].t >= w[0].t);
        assert!((w[1].vehicle_x - w[0].vehicle_x).abs() <= (w[1].t - w[0].t) + 1e-9);
    }
    let mut resolved = vec![0; ds.len()];
    for e in trace {
        let Some(id) = e.demand_id else { continue };
        let d = ds[id];
        match e.event {
            EventKind::Capture => {
                resolved[id] += 1;
                assert_eq!(e.t, d.escape_time(env));
                assert!((e.vehicle_x - d.x).abs() <= 1e-9);
                let c = commits
                    .iter()
                    .rfind(|c| c.t <= e.t && c.demands.contains(&id))
                    .expect("captured demands were committed");
                assert_eq!(c.vehicle_y, l);
                let slack = v * (c.vehicle_x - d.x).abs() - (l - d.position(v, c.t).y);
                assert!(slack <= 1e-9, "demand {id} unreachable at commit");
            }
            EventKind::Escape => {
                resolved[id] += 1;
                assert_eq!(e.t, d.escape_time(env));
            }
            _ => {}
        }
    }
    assert!(resolved.iter().all(|&k| k == 1));
}

#[test]
fn deadline_policies_are_legal_conservative_and_dominated() {
    for (k, lambda) in [0.3, 1.0, 3.0].into_iter().enumerate() {
        let env = make_env(60.0, 150.0, 1.5, lambda).unwrap();
        for seed in 0..20 {
            let s = generate_stream(&env, 150, 100 * k as u64 + seed);
            let x0 = (seed as f64 / 20.0) * env.width();
            let nclp = deadline_run(&s, DeadlinePolicy::Nclp, x0);
            check_deadline_run(&s, &nclp);
            for policy in [
                DeadlinePolicy::Lp { eta: 1.0 },
                DeadlinePolicy::Lp { eta: 0.3 },
                DeadlinePolicy::Gp,
            ] {
                let r = deadline_run(&s, policy, x0);
                check_deadline_run(&s, &r);
                assert!(r.n_capt <= nclp.n_capt, "{policy:?} seed {seed}");
            }
        }
    }
}

#[test]
fn tf_runs_capture_by_coincidence_and_conserve_demands() {
    let env = make_env(30.0, 60.0, 0.3, 1.2).unwrap();
    for seed in 0..10 {
        let s = generate_stream(&env, 200, seed);
        let r = simulate_tf(&s, Point::new(15.0, 30.0), true).unwrap();
        assert_eq!(r.n_capt + r.n_esc, 200);
        assert!((0.0..=1.0).contains(&r.capture_fraction));
        let trace = r.trace.unwrap();
        let mut seen = vec![0; 200];
        for e in &trace {
            let Some(id) = e.demand_id else { continue };
            let d = s.demands()[id];
            match e.event {
                EventKind::Capture => {
                    seen[id] += 1;
                    let p = d.position(env.speed(), e.t);
                    let y = e.vehicle_y.unwrap();
                    assert!(Point::new(e.vehicle_x, y).distance(p) < 1e-9);
                    assert!(p.y <= env.length() && p.y >= 0.0);
                }
                EventKind::Escape => {
                    seen[id] += 1;
                    assert_eq!(e.t, d.escape_time(&env));
                }
                _ => {}
            }
        }
        assert!(seen.iter().all(|&k| k == 1));
        let points: Vec<_> = trace
            .iter()
            .filter(|e| matches!(e.event, EventKind::Capture | EventKind::Recompute))
            .collect();
        for w in points.windows(2) {
            let a = Point::new(w[0].vehicle_x, w[0].vehicle_y.unwrap());
            let b = Point::new(w[1].vehicle_x, w[1].vehicle_y.unwrap());
            assert!(a.distance(b) <= (w[1].t - w[0].t) * (1.0 + 1e-9) + 1e-9);
        }
    }
}
