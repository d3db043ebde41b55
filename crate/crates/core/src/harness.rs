//! Monte-Carlo experiments and parameter sweeps.
//!
//! A run simulates one seeded stream to quiescence, so its capture fraction is
//! exact. Replicates use seeds `base_seed + k` and the long-run capture
//! fraction is estimated by the mean over replicates. The same seeds are reused
//! at every grid point of a sweep.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{BoundsReport, BETA_TSP};
use crate::deadline::{simulate_deadline, DeadlinePolicy};
use crate::environment::{generate_stream, DemandStream, EnvParams, Point};
use crate::error::{Error, Result};
use crate::run::RunResult;
use crate::tmhp::simulate_tf;

pub const ESTIMATOR_NOTE: &str =
    "mean of per-run capture fractions; every run continues until all demands are resolved";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyKind {
    Nclp,
    Lp,
    Gp,
    Tf,
}

impl PolicyKind {
    pub fn needs_fast_demands(self) -> bool {
        !matches!(self, Self::Tf)
    }
}

impl std::str::FromStr for PolicyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "nclp" => Ok(Self::Nclp),
            "lp" => Ok(Self::Lp),
            "gp" => Ok(Self::Gp),
            "tf" => Ok(Self::Tf),
            other => Err(Error::Argument {
                field: "policy",
                reason: format!("unknown policy `{other}` (expected nclp, lp, gp or tf)"),
            }),
        }
    }
}

/// Arrival-rate grid `min, min + step, ...` up to and including `max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateGrid {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl RateGrid {
    pub fn values(&self) -> Result<Vec<f64>> {
        if !(self.min > 0.0 && self.max >= self.min && self.step > 0.0)
            || !(self.min.is_finite() && self.max.is_finite() && self.step.is_finite())
        {
            return Err(Error::Argument {
                field: "sweep",
                reason: format!(
                    "need 0 < min <= max and step > 0, got ({}, {}, {})",
                    self.min, self.max, self.step
                ),
            });
        }
        let count = ((self.max - self.min) / self.step + 1e-9).floor() as usize + 1;
        Ok((0..count)
            .map(|k| self.min + k as f64 * self.step)
            .collect())
    }
}

fn default_eta() -> f64 {
    1.0
}

fn default_runs() -> usize {
    10
}

fn default_demands() -> usize {
    2000
}

fn default_beta() -> f64 {
    BETA_TSP
}

/// One experiment: a policy, an environment, and how many seeded runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub policy: PolicyKind,
    pub env: EnvParams,
    #[serde(default = "default_eta")]
    pub eta: f64,
    #[serde(default = "default_demands")]
    pub n_demands: usize,
    #[serde(default = "default_runs")]
    pub runs: usize,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<RateGrid>,
    /// Vehicle start; `(W/2, L)` for deadline policies, `(W/2, L/2)` for TF.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<Point>,
    #[serde(default = "default_beta")]
    pub beta_tsp: f64,
    /// Free-form provenance carried into every summary.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl ExperimentSpec {
    pub fn new(policy: PolicyKind, env: EnvParams) -> Self {
        Self {
            policy,
            env,
            eta: default_eta(),
            n_demands: default_demands(),
            runs: default_runs(),
            base_seed: 0,
            sweep: None,
            start: None,
            beta_tsp: BETA_TSP,
            label: None,
        }
    }

    /// TF experiment on the default `W = 100`, `L = 200` geometry.
    pub fn tf_default(v: f64, lambda: f64) -> Result<Self> {
        let env = crate::environment::make_env(100.0, 200.0, v, lambda)?;
        let mut spec = Self::new(PolicyKind::Tf, env);
        spec.label = Some("TF geometry W=100, L=200 is a library default".into());
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::Argument {
                field: "runs",
                reason: "at least one run is required".into(),
            });
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(Error::Argument {
                field: "eta",
                reason: format!("must lie in (0, 1], got {}", self.eta),
            });
        }
        let v = self.env.speed();
        match (self.policy.needs_fast_demands(), v >= 1.0) {
            (true, false) => Err(Error::Regime {
                policy: "deadline policies",
                required: "v >= 1",
                v,
            }),
            (false, true) => Err(Error::Regime {
                policy: "TF",
                required: "v < 1",
                v,
            }),
            _ => Ok(()),
        }?;
        if let Some(grid) = &self.sweep {
            grid.values()?;
        }
        Ok(())
    }

    pub fn start_point(&self) -> Point {
        self.start
            .unwrap_or_else(|| default_start(self.policy, &self.env))
    }
}

pub fn default_start(policy: PolicyKind, env: &EnvParams) -> Point {
    match policy {
        PolicyKind::Tf => Point::new(env.width() / 2.0, env.length() / 2.0),
        _ => Point::new(env.width() / 2.0, env.length()),
    }
}

/// Runs one policy on one stream.
pub fn run_policy(
    policy: PolicyKind,
    stream: &DemandStream,
    eta: f64,
    start: Point,
    record_trace: bool,
) -> Result<RunResult> {
    let deadline = |p| simulate_deadline(stream, p, start.x, record_trace);
    match policy {
        PolicyKind::Nclp => deadline(DeadlinePolicy::Nclp),
        PolicyKind::Lp => deadline(DeadlinePolicy::Lp { eta }),
        PolicyKind::Gp => deadline(DeadlinePolicy::Gp),
        PolicyKind::Tf => simulate_tf(stream, start, record_trace),
    }
}

/// Aggregate of replicate runs at one arrival rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub policy: PolicyKind,
    pub lambda: f64,
    pub mean: f64,
    /// Sample standard deviation (zero for a single run).
    pub std: f64,
    pub stderr: f64,
    pub runs: usize,
    pub n_demands: usize,
    /// Runs whose stream was empty, counted as fraction 1.
    pub vacuous_runs: usize,
    pub fractions: Vec<f64>,
    pub bounds: BoundsReport,
    pub estimator: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

/// Mean, sample standard deviation and standard error.
pub fn mean_std_stderr(xs: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let std = var.sqrt();
    (mean, std, std / n.sqrt())
}

/// Runs `spec.runs` independent seeded simulations (in parallel) and
/// aggregates their capture fractions. The sweep grid, if any, is ignored.
pub fn monte_carlo(spec: &ExperimentSpec) -> Result<Summary> {
    spec.validate()?;
    let start = spec.start_point();
    let results = (0..spec.runs)
        .into_par_iter()
        .map(|k| {
            let stream = generate_stream(
                &spec.env,
                spec.n_demands,
                spec.base_seed.wrapping_add(k as u64),
            );
            run_policy(spec.policy, &stream, spec.eta, start, false)
        })
        .collect::<Result<Vec<_>>>()?;
    let fractions: Vec<f64> = results.iter().map(|r| r.capture_fraction).collect();
    let (mean, std, stderr) = mean_std_stderr(&fractions);
    Ok(Summary {
        policy: spec.policy,
        lambda: spec.env.rate(),
        mean,
        std,
        stderr,
        runs: spec.runs,
        n_demands: spec.n_demands,
        vacuous_runs: results.iter().filter(|r| r.vacuous).count(),
        fractions,
        bounds: BoundsReport::new(&spec.env, spec.beta_tsp)?,
        estimator: ESTIMATOR_NOTE.to_string(),
        label: spec.label.clone(),
    })
}

/// One [`Summary`] per arrival rate of `spec.sweep`.
pub fn sweep(spec: &ExperimentSpec) -> Result<Vec<Summary>> {
    spec.validate()?;
    let grid = spec.sweep.as_ref().ok_or(Error::Argument {
        field: "sweep",
        reason: "spec has no arrival-rate grid".into(),
    })?;
    grid.values()?
        .into_iter()
        .map(|lambda| {
            let mut point = spec.clone();
            point.env = spec.env.with_rate(lambda)?;
            point.sweep = None;
            monte_carlo(&point)
        })
        .collect()
}

pub const CSV_HEADER: [&str; 10] = [
    "lambda",
    "mean",
    "std",
    "stderr",
    "runs",
    "n_demands",
    "lp_lower_bound",
    "lp_competitive_factor",
    "causal_upper_bound",
    "tf_lower_bound",
];

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// Writes sweep rows as CSV (UTF-8, `.` decimals, header row). Bound columns
/// are empty where the bound does not apply.
pub fn write_csv<W: Write>(rows: &[Summary], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.lambda.to_string(),
            r.mean.to_string(),
            r.std.to_string(),
            r.stderr.to_string(),
            r.runs.to_string(),
            r.n_demands.to_string(),
            opt(r.bounds.lp_lower_bound),
            opt(r.bounds.lp_competitive_factor),
            opt(r.bounds.causal_upper_bound),
            opt(r.bounds.tf_lower_bound),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Minimal SVG chart: mean capture fraction against arrival rate with
/// one-standard-deviation error bars, plus any applicable bound curves.
pub fn write_svg<W: Write>(rows: &[Summary], title: &str, mut out: W) -> Result<()> {
    const WIDTH: f64 = 640.0;
    const HEIGHT: f64 = 400.0;
    const MARGIN: f64 = 50.0;
    let (lo, hi) = rows
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
            (lo.min(r.lambda), hi.max(r.lambda))
        });
    let span = if hi > lo { hi - lo } else { 1.0 };
    let px = |lambda: f64| MARGIN + (lambda - lo) / span * (WIDTH - 2.0 * MARGIN);
    let py = |f: f64| HEIGHT - MARGIN - f.clamp(0.0, 1.0) * (HEIGHT - 2.0 * MARGIN);
    let polyline = |pts: Vec<(f64, f64)>, style: &str| -> String {
        let coords: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
        format!(
            "<polyline fill=\"none\" {style} points=\"{}\"/>\n",
            coords.join(" ")
        )
    };

    let mut body = String::new();
    body.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\">\n"
    ));
    body.push_str(&format!(
        "<text x=\"{}\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
        WIDTH / 2.0,
        xml_escape(title)
    ));
    body.push_str(&format!(
        "<line x1=\"{MARGIN}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n\
         <line x1=\"{MARGIN}\" y1=\"{MARGIN}\" x2=\"{MARGIN}\" y2=\"{b}\" stroke=\"black\"/>\n",
        b = HEIGHT - MARGIN,
        r = WIDTH - MARGIN
    ));
    body.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"12\">arrival rate</text>\n\
         <text x=\"15\" y=\"{}\" font-size=\"12\" transform=\"rotate(-90 15 {})\">capture fraction</text>\n",
        WIDTH / 2.0,
        HEIGHT - 10.0,
        HEIGHT / 2.0,
        HEIGHT / 2.0
    ));
    for r in rows {
        let x = px(r.lambda);
        body.push_str(&format!(
            "<line x1=\"{x:.2}\" y1=\"{:.2}\" x2=\"{x:.2}\" y2=\"{:.2}\" stroke=\"red\"/>\n",
            py(r.mean - r.std),
            py(r.mean + r.std)
        ));
    }
    body.push_str(&polyline(
        rows.iter().map(|r| (px(r.lambda), py(r.mean))).collect(),
        "stroke=\"red\" stroke-width=\"2\"",
    ));
    type Pick = fn(&BoundsReport) -> Option<f64>;
    let curves: [(Pick, &str); 3] = [
        (|b| b.lp_lower_bound, "stroke=\"green\""),
        (|b| b.causal_upper_bound, "stroke=\"black\""),
        (
            |b| b.tf_lower_bound,
            "stroke=\"black\" stroke-dasharray=\"6 4\"",
        ),
    ];
    for (pick, style) in curves {
        let pts: Vec<(f64, f64)> = rows
            .iter()
            .filter_map(|r| pick(&r.bounds).map(|b| (px(r.lambda), py(b))))
            .collect();
        if !pts.is_empty() {
            body.push_str(&polyline(pts, style));
        }
    }
    body.push_str("</svg>\n");
    out.write_all(body.as_bytes())?;
    Ok(())
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::environment::make_env;

    #[test]
    fn grid_values() {
        let g = RateGrid {
            min: 0.5,
            max: 2.0,
            step: 0.5,
        };
        assert_eq!(g.values().unwrap(), vec![0.5, 1.0, 1.5, 2.0]);
        let one = RateGrid {
            min: 1.0,
            max: 1.0,
            step: 0.1,
        };
        assert_eq!(one.values().unwrap(), vec![1.0]);
        assert!(RateGrid {
            min: 1.0,
            max: 0.5,
            step: 0.1
        }
        .values()
        .is_err());
        assert!(RateGrid {
            min: 1.0,
            max: 2.0,
            step: 0.0
        }
        .values()
        .is_err());
    }

    #[test]
    fn stats() {
        assert_eq!(mean_std_stderr(&[0.3]), (0.3, 0.0, 0.0));
        let (m, s, e) = mean_std_stderr(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((s - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!((e - s / 2.0).abs() < 1e-15);
    }

    #[test]
    fn spec_validation() {
        let fast = make_env(120.0, 500.0, 2.0, 1.0).unwrap();
        let slow = make_env(100.0, 200.0, 0.5, 1.0).unwrap();
        assert!(ExperimentSpec::new(PolicyKind::Tf, fast)
            .validate()
            .is_err());
        assert!(ExperimentSpec::new(PolicyKind::Lp, slow)
            .validate()
            .is_err());
        let mut s = ExperimentSpec::new(PolicyKind::Lp, fast);
        s.runs = 0;
        assert!(s.validate().is_err());
        s.runs = 1;
        s.eta = 0.0;
        assert!(s.validate().is_err());
        s.eta = 0.5;
        assert!(s.validate().is_ok());
    }

    #[test]
    fn spec_json_defaults() {
        let s: ExperimentSpec =
            serde_json::from_str(r#"{"policy":"lp","env":{"W":120,"L":500,"v":2,"lambda":1}}"#)
                .unwrap();
        assert_eq!(
            (s.eta, s.runs, s.n_demands, s.base_seed),
            (1.0, 10, 2000, 0)
        );
        assert_eq!(s.start_point(), Point::new(60.0, 500.0));
        assert_eq!(s.beta_tsp, BETA_TSP);
        let tf = ExperimentSpec::tf_default(0.05, 1.0).unwrap();
        assert_eq!(tf.start_point(), Point::new(50.0, 100.0));
        assert!(tf.label.is_some());
    }

    #[test]
    fn single_run_has_zero_spread() {
        let mut s = ExperimentSpec::new(PolicyKind::Gp, make_env(120.0, 500.0, 2.0, 1.0).unwrap());
        s.runs = 1;
        s.n_demands = 200;
        let sum = monte_carlo(&s).unwrap();
        assert_eq!(sum.std, 0.0);
        assert_eq!(sum.stderr, 0.0);
        assert_eq!(sum.fractions.len(), 1);
    }

    #[test]
    fn empty_streams_are_flagged() {
        let mut s =
            ExperimentSpec::new(PolicyKind::Nclp, make_env(120.0, 500.0, 2.0, 1.0).unwrap());
        s.runs = 2;
        s.n_demands = 0;
        let sum = monte_carlo(&s).unwrap();
        assert_eq!((sum.mean, sum.vacuous_runs), (1.0, 2));
    }
}
