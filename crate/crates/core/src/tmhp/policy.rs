//! TMHP-fraction policy for `v < 1`.
//!
//! Each iteration routes a translational Hamiltonian path from the vehicle
//! through every outstanding demand in the lower half `[0, W] x [0, L/2]`,
//! ending at the lowest one, and follows it for at most `L / (2v)` time units.
//! None of those demands can escape within that window. Demands left above the
//! lower half, or abandoned when the window closes, escape at their deadline.

use crate::environment::{DemandState, DemandStatus, DemandStream, Point};
use crate::error::{Error, Result};
use crate::run::{Commit, EventKind, RunResult, TraceEvent};

use super::{intercept_time_unchecked, tmhp_solve, TmhpInstance};

/// TMHP-fraction policy from `start`.
pub fn run_tf(stream: &DemandStream, start: Point) -> Result<RunResult> {
    simulate_tf(stream, start, false)
}

pub fn simulate_tf(stream: &DemandStream, start: Point, record_trace: bool) -> Result<RunResult> {
    let env = stream.env();
    let v = env.speed();
    if v >= 1.0 {
        return Err(Error::Regime {
            policy: "TF",
            required: "v < 1",
            v,
        });
    }
    let inside =
        start.x >= 0.0 && start.x <= env.width() && start.y >= 0.0 && start.y <= env.length();
    if !inside {
        return Err(Error::Argument {
            field: "start",
            reason: format!("({}, {}) lies outside the environment", start.x, start.y),
        });
    }

    let demands = stream.demands();
    let half = env.length() / 2.0;
    let window = env.length() / (2.0 * v);
    let mut states = vec![DemandState::default(); demands.len()];
    let mut trace = record_trace.then(Vec::new);
    let mut commits = record_trace.then(Vec::new);
    let log = |trace: &mut Option<Vec<TraceEvent>>, t, kind, id, p| {
        if let Some(tr) = trace.as_mut() {
            tr.push(event(t, kind, id, p));
        }
    };

    let mut t = 0.0_f64;
    let mut pos = start;
    let mut next = 0usize;
    // outstanding ids in arrival order
    let mut active: Vec<usize> = Vec::new();
    // vehicle trajectory breakpoints, used to report the vehicle position on
    // arrivals and escapes that fall between iterations
    let mut path: Vec<(f64, Point)> = vec![(0.0, start)];

    loop {
        while next < demands.len() && demands[next].t_arr <= t {
            states[next].arrive()?;
            active.push(next);
            next += 1;
        }
        let mut kept = Vec::with_capacity(active.len());
        for &id in &active {
            let esc = demands[id].escape_time(env);
            if esc <= t {
                states[id].escape(esc)?;
            } else {
                kept.push(id);
            }
        }
        active = kept;

        let targets: Vec<usize> = active
            .iter()
            .copied()
            .filter(|&id| demands[id].position(v, t).y <= half)
            .collect();
        if targets.is_empty() {
            if next < demands.len() {
                t = demands[next].t_arr;
                path.push((t, pos));
                continue;
            }
            for &id in &active {
                states[id].escape(demands[id].escape_time(env))?;
            }
            break;
        }

        // lowest demand = latest arrival
        let last = *targets.last().expect("non-empty");
        let others = &targets[..targets.len() - 1];
        let inst = TmhpInstance::new(
            pos,
            others
                .iter()
                .map(|&id| demands[id].position(v, t))
                .collect(),
            demands[last].position(v, t),
            v,
        )?;
        let sol = tmhp_solve(&inst)?;
        let planned: Vec<usize> = sol
            .order
            .iter()
            .map(|&k| others[k])
            .chain(std::iter::once(last))
            .collect();
        log(&mut trace, t, EventKind::Recompute, None, pos);
        if let Some(c) = commits.as_mut() {
            c.push(Commit {
                t,
                vehicle_x: pos.x,
                vehicle_y: pos.y,
                demands: planned.clone(),
            });
        }

        let end = t + window;
        for id in planned {
            let d = demands[id];
            let dt = intercept_time_unchecked(pos, d.position(v, t), v);
            if t + dt <= end {
                t += dt;
                pos = d.position(v, t);
                states[id].capture(t)?;
                log(&mut trace, t, EventKind::Capture, Some(id), pos);
                path.push((t, pos));
            } else {
                // window closes mid-leg: stop short on the intercept course
                let aim = d.position(v, t + dt);
                let frac = (end - t) / dt;
                pos = Point::new(
                    pos.x + (aim.x - pos.x) * frac,
                    pos.y + (aim.y - pos.y) * frac,
                );
                t = end;
                path.push((t, pos));
                break;
            }
        }
        active.retain(|&id| states[id].status == DemandStatus::Outstanding);
    }

    if let Some(tr) = trace.as_mut() {
        for d in demands {
            tr.push(event(
                d.t_arr,
                EventKind::Arrival,
                Some(d.id),
                position_at(&path, d.t_arr),
            ));
        }
        for (id, s) in states.iter().enumerate() {
            if s.status == DemandStatus::Escaped {
                let te = s.resolve_time.expect("escaped demands carry a time");
                tr.push(event(
                    te,
                    EventKind::Escape,
                    Some(id),
                    position_at(&path, te),
                ));
            }
        }
        let rank = |e: &EventKind| match e {
            EventKind::Capture => 0,
            EventKind::Escape => 1,
            EventKind::Recompute => 2,
            EventKind::Arrival => 3,
        };
        tr.sort_by(|a, b| {
            a.t.total_cmp(&b.t)
                .then(rank(&a.event).cmp(&rank(&b.event)))
                .then(a.demand_id.cmp(&b.demand_id))
        });
    }
    RunResult::from_states(states, trace, commits)
}

fn event(t: f64, kind: EventKind, demand_id: Option<usize>, p: Point) -> TraceEvent {
    TraceEvent {
        t,
        event: kind,
        demand_id,
        vehicle_x: p.x,
        vehicle_y: Some(p.y),
    }
}

/// Vehicle position at time `t` by linear interpolation between breakpoints.
fn position_at(path: &[(f64, Point)], t: f64) -> Point {
    let k = path.partition_point(|&(tk, _)| tk <= t);
    if k == 0 {
        return path[0].1;
    }
    if k == path.len() {
        return path[k - 1].1;
    }
    let (t0, p0) = path[k - 1];
    let (t1, p1) = path[k];
    if t1 <= t0 {
        return p1;
    }
    let a = (t - t0) / (t1 - t0);
    Point::new(p0.x + (p1.x - p0.x) * a, p0.y + (p1.y - p0.y) * a)
}
