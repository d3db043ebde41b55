use deadline_guard::{
    generate_stream, make_env, monte_carlo, region_count, ExperimentSpec, PolicyKind, Rect,
};

fn moments(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

#[test]
fn outstanding_counts_in_disjoint_rectangles_are_independent_poisson() {
    let env = make_env(120.0, 500.0, 2.0, 1.0).unwrap();
    let t = 60.0;
    let a = Rect::new(0.0, 50.0, 0.0, 60.0);
    let b = Rect::new(60.0, 120.0, 30.0, 110.0);
    let trials = 10_000;
    let (ca, cb): (Vec<f64>, Vec<f64>) = (0..trials)
        .map(|seed| {
            let s = generate_stream(&env, 250, seed);
            assert!(s.demands().last().unwrap().t_arr > t);
            (
                region_count(&s, &a, t) as f64,
                region_count(&s, &b, t) as f64,
            )
        })
        .unzip();
    let (ma, va) = moments(&ca);
    let (mb, vb) = moments(&cb);
    let cov = ca
        .iter()
        .zip(&cb)
        .map(|(x, y)| (x - ma) * (y - mb))
        .sum::<f64>()
        / (trials as f64 - 1.0);
    let corr = cov / (va * vb).sqrt();
    assert!(corr.abs() < 0.05, "correlation {corr}");
    for (m, var, rect) in [(ma, va, a), (mb, vb, b)] {
        let expected = env.areal_intensity() * rect.area();
        assert!(
            (m - expected).abs() <= 3.0 * (expected / trials as f64).sqrt(),
            "{m} vs {expected}"
        );
        assert!((0.9..=1.1).contains(&(m / var)), "mean/var {}", m / var);
    }
}

#[test]
fn greedy_does_not_beat_longest_path_on_average() {
    let env = make_env(120.0, 500.0, 2.0, 1.0).unwrap();
    let summary = |policy| {
        let mut spec = ExperimentSpec::new(policy, env);
        spec.runs = 10;
        spec.n_demands = 1000;
        spec.base_seed = 77;
        monte_carlo(&spec).unwrap()
    };
    let gp = summary(PolicyKind::Gp);
    let lp = summary(PolicyKind::Lp);
    let pooled = (gp.stderr.powi(2) + lp.stderr.powi(2)).sqrt();
    assert!(
        gp.mean <= lp.mean + 2.0 * pooled,
        "GP {} LP {}",
        gp.mean,
        lp.mean
    );
}
