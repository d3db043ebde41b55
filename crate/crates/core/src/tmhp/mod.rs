//! Translational Hamiltonian paths for targets slower than the vehicle.
//!
//! All targets translate in `+y` at speed `v < 1`. Scaling the plane by
//! `g(x, y) = (x / sqrt(1 - v^2), y / (1 - v^2))` turns minimum-time pursuit
//! into a static problem: chasing from `a` to `b` takes
//! `|g(a) - g(b)| + v (y_b - y_a) / (1 - v^2)`, so the fastest order through a
//! set of targets is a Euclidean Hamiltonian path in the scaled plane, and
//! the drift term telescopes to `v (y_f - y_s) / (1 - v^2)`.

mod emhp;
mod policy;

pub use emhp::{
    emhp_exact, emhp_heuristic, path_length, HamiltonianPath, EXACT_CAP, MULTI_START_CAP,
};
pub use policy::{run_tf, simulate_tf};

use serde::{Deserialize, Serialize};

use crate::environment::Point;
use crate::error::{Error, Result};

fn check_speed(v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Error::Argument {
            field: "v",
            reason: format!("target speed must lie in (0, 1), got {v}"),
        })
    }
}

/// `(x, y) -> (x / sqrt(1 - v^2), y / (1 - v^2))`.
pub fn g_map(p: Point, v: f64) -> Result<Point> {
    check_speed(v)?;
    let c = 1.0 - v * v;
    Ok(Point::new(p.x / c.sqrt(), p.y / c))
}

/// Inverse of [`g_map`].
pub fn g_inv(p: Point, v: f64) -> Result<Point> {
    check_speed(v)?;
    let c = 1.0 - v * v;
    Ok(Point::new(p.x * c.sqrt(), p.y * c))
}

/// Minimum time for a unit-speed vehicle at `vehicle` to meet a target now at
/// `target` and moving in `+y` at speed `v`. Heading straight for
/// `(x, y + v T)` meets the target exactly at `T`.
pub fn intercept_time(vehicle: Point, target: Point, v: f64) -> Result<f64> {
    check_speed(v)?;
    Ok(intercept_time_unchecked(vehicle, target, v))
}

fn intercept_time_unchecked(vehicle: Point, target: Point, v: f64) -> f64 {
    let c = 1.0 - v * v;
    let dx = vehicle.x - target.x;
    let dy = vehicle.y - target.y;
    ((c * dx * dx + dy * dy).sqrt() - v * dy) / c
}

/// Start point, targets and finish point, given by their coordinates at time
/// zero, all translating at speed `v`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TmhpInstance {
    pub s: Point,
    pub f: Point,
    pub v: f64,
    pub points: Vec<Point>,
}

impl TmhpInstance {
    pub fn new(s: Point, points: Vec<Point>, f: Point, v: f64) -> Result<Self> {
        check_speed(v)?;
        let all_finite = std::iter::once(&s)
            .chain(&points)
            .chain(std::iter::once(&f))
            .all(|p| p.x.is_finite() && p.y.is_finite());
        if !all_finite {
            return Err(Error::Argument {
                field: "points",
                reason: "coordinates must be finite".into(),
            });
        }
        Ok(Self { s, f, v, points })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TmhpSolution {
    /// Visiting order over `points`; the finish point follows implicitly.
    pub order: Vec<usize>,
    /// Time to execute the order with minimum-time intercepts.
    pub duration: f64,
    /// Length of the same order in the scaled plane.
    pub emhp_length: f64,
}

/// Solves the translational path instance: maps everything through `g`,
/// solves the fixed-endpoint Euclidean path exactly up to [`EXACT_CAP`] points
/// and heuristically beyond, then executes the order by chaining intercepts.
pub fn tmhp_solve(inst: &TmhpInstance) -> Result<TmhpSolution> {
    check_speed(inst.v)?;
    let v = inst.v;
    let gs = g_map(inst.s, v)?;
    let gf = g_map(inst.f, v)?;
    let gq = inst
        .points
        .iter()
        .map(|&p| g_map(p, v))
        .collect::<Result<Vec<_>>>()?;
    let path = if gq.len() <= EXACT_CAP {
        emhp_exact(gs, &gq, gf)?
    } else {
        emhp_heuristic(gs, &gq, gf)
    };
    let duration = execute_order(inst, &path.order);
    Ok(TmhpSolution {
        order: path.order,
        duration,
        emhp_length: path.length,
    })
}

/// Chains intercepts from `s` through `points` in `order` and on to `f`,
/// returning the total time.
pub fn execute_order(inst: &TmhpInstance, order: &[usize]) -> f64 {
    let v = inst.v;
    let mut pos = inst.s;
    let mut t = 0.0;
    for target in order
        .iter()
        .map(|&k| inst.points[k])
        .chain(std::iter::once(inst.f))
    {
        let now = Point::new(target.x, target.y + v * t);
        let dt = intercept_time_unchecked(pos, now, v);
        t += dt;
        pos = Point::new(target.x, target.y + v * t);
    }
    t
}

/// Drift term `v (y_f - y_s) / (1 - v^2)` relating travel time to scaled
/// path length.
pub fn drift_correction(s: Point, f: Point, v: f64) -> f64 {
    v * (f.y - s.y) / (1.0 - v * v)
}
