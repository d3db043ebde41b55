//! Event-driven simulation of the `v >= 1` policies.
//!
//! The vehicle stays on the deadline and only uses intercept motion: it moves
//! horizontally to a target's abscissa and waits there, capturing the target
//! at the instant `t_arr + L/v` it reaches the deadline. Three planners share
//! the engine:
//!
//! * non-causal longest path (NCLP): one longest path over the whole stream,
//!   including demands that have not arrived yet;
//! * longest path (LP): longest path over the demands currently outstanding,
//!   recomputed once a fraction `eta` of it has been serviced;
//! * greedy path (GP): always the reachable demand closest to the deadline.
//!
//! Simultaneous events are processed as captures, escapes, recomputes, then
//! arrivals, ties broken by demand id.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::environment::{Demand, DemandState, DemandStatus, DemandStream, EnvParams};
use crate::error::{Error, Result};
use crate::reachability::{longest_path_implicit, DeadlineSource};
use crate::run::{Commit, EventKind, RunResult, TraceEvent};

/// Planner used by the deadline engine.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "snake_case")]
pub enum DeadlinePolicy {
    Nclp,
    Lp { eta: f64 },
    Gp,
}

impl DeadlinePolicy {
    fn name(&self) -> &'static str {
        match self {
            Self::Nclp => "NCLP",
            Self::Lp { .. } => "LP",
            Self::Gp => "GP",
        }
    }
}

/// Non-causal longest path with the vehicle starting at `(start_x, L)`.
pub fn run_nclp(stream: &DemandStream, start_x: f64) -> Result<RunResult> {
    simulate_deadline(stream, DeadlinePolicy::Nclp, start_x, false)
}

/// Longest path policy with recompute fraction `eta` in `(0, 1]`.
pub fn run_lp(stream: &DemandStream, start_x: f64, eta: f64) -> Result<RunResult> {
    simulate_deadline(stream, DeadlinePolicy::Lp { eta }, start_x, false)
}

/// Greedy path policy.
pub fn run_gp(stream: &DemandStream, start_x: f64) -> Result<RunResult> {
    simulate_deadline(stream, DeadlinePolicy::Gp, start_x, false)
}

/// Runs `policy` on `stream` to quiescence. With `record_trace` the result
/// carries the full event trace and every committed plan.
pub fn simulate_deadline(
    stream: &DemandStream,
    policy: DeadlinePolicy,
    start_x: f64,
    record_trace: bool,
) -> Result<RunResult> {
    let env = stream.env();
    if env.speed() < 1.0 {
        return Err(Error::Regime {
            policy: policy.name(),
            required: "v >= 1",
            v: env.speed(),
        });
    }
    if let DeadlinePolicy::Lp { eta } = policy {
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(Error::Argument {
                field: "eta",
                reason: format!("must lie in (0, 1], got {eta}"),
            });
        }
    }
    if !(start_x >= 0.0 && start_x <= env.width()) {
        return Err(Error::Argument {
            field: "start_x",
            reason: format!("must lie in [0, {}], got {start_x}", env.width()),
        });
    }
    Engine::new(stream, policy, start_x, record_trace).run()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Class {
    Capture = 0,
    Escape = 1,
    Recompute = 2,
    Arrival = 3,
}

#[derive(Debug, Clone, Copy)]
struct Event {
    t: f64,
    class: Class,
    id: usize,
}

impl PartialEq for Event {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Event {}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Event {
    // reversed so the max-heap pops the earliest event first
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .t
            .total_cmp(&self.t)
            .then(other.class.cmp(&self.class))
            .then(other.id.cmp(&self.id))
    }
}

/// Horizontal unit-speed leg along the deadline.
#[derive(Debug, Clone, Copy)]
struct Leg {
    from: f64,
    depart: f64,
    to: f64,
}

impl Leg {
    fn position(&self, t: f64) -> f64 {
        let span = self.to - self.from;
        let moved = (t - self.depart).clamp(0.0, span.abs());
        self.from + moved.copysign(span)
    }
}

struct Engine<'a> {
    env: &'a EnvParams,
    demands: &'a [Demand],
    policy: DeadlinePolicy,
    states: Vec<DemandState>,
    committed: Vec<bool>,
    plan: VecDeque<usize>,
    source: DeadlineSource,
    leg: Leg,
    idle: bool,
    recompute_pending: bool,
    planned_once: bool,
    queue: BinaryHeap<Event>,
    trace: Option<Vec<TraceEvent>>,
    commits: Option<Vec<Commit>>,
}

impl<'a> Engine<'a> {
    fn new(stream: &'a DemandStream, policy: DeadlinePolicy, start_x: f64, record: bool) -> Self {
        let env = stream.env();
        let demands = stream.demands();
        let mut queue = BinaryHeap::with_capacity(2 * demands.len() + 1);
        for d in demands {
            queue.push(Event {
                t: d.t_arr,
                class: Class::Arrival,
                id: d.id,
            });
            queue.push(Event {
                t: d.escape_time(env),
                class: Class::Escape,
                id: d.id,
            });
        }
        queue.push(Event {
            t: 0.0,
            class: Class::Recompute,
            id: 0,
        });
        Self {
            env,
            demands,
            policy,
            states: vec![DemandState::default(); demands.len()],
            committed: vec![false; demands.len()],
            plan: VecDeque::new(),
            source: DeadlineSource {
                x: start_x,
                ref_time: -env.transit_time(),
            },
            leg: Leg {
                from: start_x,
                depart: 0.0,
                to: start_x,
            },
            idle: false,
            recompute_pending: true,
            planned_once: false,
            queue,
            trace: record.then(Vec::new),
            commits: record.then(Vec::new),
        }
    }

    fn run(mut self) -> Result<RunResult> {
        while let Some(ev) = self.queue.pop() {
            match ev.class {
                Class::Arrival => self.on_arrival(ev)?,
                Class::Escape => self.on_escape(ev)?,
                Class::Recompute => self.on_recompute(ev.t),
                Class::Capture => self.on_capture(ev)?,
            }
        }
        RunResult::from_states(self.states, self.trace, self.commits)
    }

    fn log(&mut self, t: f64, event: EventKind, demand_id: Option<usize>) {
        let vehicle_x = self.leg.position(t);
        if let Some(trace) = self.trace.as_mut() {
            trace.push(TraceEvent {
                t,
                event,
                demand_id,
                vehicle_x,
                vehicle_y: None,
            });
        }
    }

    fn on_arrival(&mut self, ev: Event) -> Result<()> {
        self.states[ev.id].arrive()?;
        self.log(ev.t, EventKind::Arrival, Some(ev.id));
        let causal = !matches!(self.policy, DeadlinePolicy::Nclp);
        if causal && self.idle && !self.recompute_pending {
            self.recompute_pending = true;
            self.queue.push(Event {
                t: ev.t,
                class: Class::Recompute,
                id: 0,
            });
        }
        Ok(())
    }

    fn on_escape(&mut self, ev: Event) -> Result<()> {
        let state = &mut self.states[ev.id];
        if state.is_resolved() {
            return Ok(());
        }
        if self.committed[ev.id] {
            return Err(Error::Contract(format!(
                "committed demand {} reached the deadline uncaptured",
                ev.id
            )));
        }
        state.escape(ev.t)?;
        self.log(ev.t, EventKind::Escape, Some(ev.id));
        Ok(())
    }

    fn on_capture(&mut self, ev: Event) -> Result<()> {
        let d = self.demands[ev.id];
        let at = self.leg.position(ev.t);
        if (at - d.x).abs() > 1e-9 {
            return Err(Error::Contract(format!(
                "vehicle at {at} cannot capture demand {} at {}",
                d.id, d.x
            )));
        }
        self.states[ev.id].capture(ev.t)?;
        self.leg = Leg {
            from: d.x,
            depart: ev.t,
            to: d.x,
        };
        self.source = DeadlineSource::after_capture(&d);
        self.log(ev.t, EventKind::Capture, Some(ev.id));
        self.dispatch_next(ev.t);
        Ok(())
    }

    fn on_recompute(&mut self, t: f64) {
        self.recompute_pending = false;
        // a parked vehicle only loses reach as time passes
        self.source.ref_time = self.source.ref_time.max(t - self.env.transit_time());
        self.log(t, EventKind::Recompute, None);
        let selected = self.select(t);
        if let Some(commits) = self.commits.as_mut() {
            commits.push(Commit {
                t,
                vehicle_x: self.source.x,
                vehicle_y: self.env.length(),
                demands: selected.clone(),
            });
        }
        for &id in &selected {
            self.committed[id] = true;
        }
        self.plan = selected.into();
        self.idle = self.plan.is_empty();
        self.dispatch_next(t);
    }

    /// Heads for the next planned demand, or asks for a recompute once the
    /// committed plan is exhausted.
    fn dispatch_next(&mut self, t: f64) {
        let here = self.leg.position(t);
        match self.plan.pop_front() {
            Some(id) => {
                let d = &self.demands[id];
                self.leg = Leg {
                    from: here,
                    depart: t,
                    to: d.x,
                };
                self.queue.push(Event {
                    t: d.escape_time(self.env),
                    class: Class::Capture,
                    id,
                });
            }
            None if !self.idle && !self.recompute_pending => {
                self.recompute_pending = true;
                self.queue.push(Event {
                    t,
                    class: Class::Recompute,
                    id: 0,
                });
            }
            None => {}
        }
    }

    fn outstanding(&self) -> Vec<Demand> {
        self.demands
            .iter()
            .filter(|d| {
                self.states[d.id].status == DemandStatus::Outstanding && !self.committed[d.id]
            })
            .copied()
            .collect()
    }

    fn select(&mut self, t: f64) -> Vec<usize> {
        match self.policy {
            DeadlinePolicy::Nclp => {
                if self.planned_once {
                    return Vec::new();
                }
                self.planned_once = true;
                longest_path_implicit(&self.source, self.demands, self.env).order
            }
            DeadlinePolicy::Lp { eta } => {
                let candidates = self.outstanding();
                debug_assert!(candidates.iter().all(|d| d.escape_time(self.env) > t));
                let path = longest_path_implicit(&self.source, &candidates, self.env).order;
                let keep = ((eta * path.len() as f64).ceil() as usize).clamp(1, path.len().max(1));
                path.into_iter().take(keep).collect()
            }
            DeadlinePolicy::Gp => {
                // arrival order is escape order, so the first reachable
                // demand is the one closest to the deadline
                self.outstanding()
                    .iter()
                    .find(|d| self.source.reaches(d))
                    .map(|d| vec![d.id])
                    .unwrap_or_default()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::environment::{generate_stream, make_env};

    fn stream(width: f64, length: f64, v: f64, pts: &[(f64, f64)]) -> DemandStream {
        let env = make_env(width, length, v, 1.0).unwrap();
        let demands = pts
            .iter()
            .enumerate()
            .map(|(id, &(t_arr, x))| Demand { id, t_arr, x })
            .collect();
        DemandStream::from_demands(env, 0, demands).unwrap()
    }

    #[test]
    fn single_reachable_demand_is_captured() {
        let s = stream(10.0, 20.0, 2.0, &[(1.0, 9.0)]);
        for r in [
            run_nclp(&s, 5.0).unwrap(),
            run_lp(&s, 5.0, 1.0).unwrap(),
            run_gp(&s, 5.0).unwrap(),
        ] {
            assert_eq!((r.n_capt, r.n_esc), (1, 0));
            assert_eq!(r.capture_fraction, 1.0);
            assert_eq!(r.states[0].resolve_time, Some(11.0));
        }
    }

    #[test]
    fn opposite_simultaneous_pair() {
        let env = make_env(10.0, 1000.0, 1.0, 1.0).unwrap();
        let ds = vec![
            Demand {
                id: 0,
                t_arr: 1.0,
                x: 0.0,
            },
            Demand {
                id: 1,
                t_arr: 1.0 + 1e-12,
                x: 9.999_999,
            },
        ];
        let s = DemandStream::from_demands(env, 0, ds).unwrap();
        let nclp = run_nclp(&s, 5.0).unwrap();
        assert_eq!((nclp.n_capt, nclp.n_esc), (1, 1));
        let lp = run_lp(&s, 5.0, 1.0).unwrap();
        assert_eq!(lp.n_capt, 1);
    }

    #[test]
    fn chained_pair_both_captured() {
        let s = stream(10.0, 20.0, 2.0, &[(1.0, 5.0), (2.0, 6.0)]);
        let r = run_nclp(&s, 5.0).unwrap();
        assert_eq!(r.n_capt, 2);
        let r = run_gp(&s, 5.0).unwrap();
        assert_eq!(r.n_capt, 2);
    }

    #[test]
    fn greedy_captures_in_escape_order() {
        let s = stream(10.0, 20.0, 2.0, &[(1.0, 4.0), (2.5, 5.0)]);
        let r = simulate_deadline(&s, DeadlinePolicy::Gp, 5.0, true).unwrap();
        assert_eq!(r.n_capt, 2);
        let caps: Vec<usize> = r
            .trace
            .unwrap()
            .iter()
            .filter(|e| e.event == EventKind::Capture)
            .map(|e| e.demand_id.unwrap())
            .collect();
        assert_eq!(caps, vec![0, 1]);
    }

    #[test]
    fn unreachable_demand_escapes_at_deadline() {
        // from x = 0 the vehicle needs 10 time units, the demand gives 1 + 2
        let s = stream(10.0, 4.0, 2.0, &[(1.0, 9.999)]);
        let r = run_lp(&s, 0.0, 1.0).unwrap();
        assert_eq!((r.n_capt, r.n_esc), (0, 1));
        assert_eq!(r.states[0].resolve_time, Some(3.0));
    }

    #[test]
    fn empty_stream_is_vacuous() {
        let s = stream(10.0, 4.0, 2.0, &[]);
        let r = run_nclp(&s, 5.0).unwrap();
        assert!(r.vacuous);
        assert_eq!(r.capture_fraction, 1.0);
    }

    #[test]
    fn parameter_errors() {
        let s = stream(10.0, 4.0, 0.5, &[(1.0, 1.0)]);
        assert!(matches!(run_nclp(&s, 5.0), Err(Error::Regime { .. })));
        let s = stream(10.0, 4.0, 2.0, &[(1.0, 1.0)]);
        assert!(matches!(run_lp(&s, 5.0, 0.0), Err(Error::Argument { .. })));
        assert!(matches!(run_lp(&s, 5.0, 1.5), Err(Error::Argument { .. })));
        assert!(run_gp(&s, 11.0).is_err());
    }

    #[test]
    fn trace_is_ordered_and_unit_speed() {
        let env = make_env(120.0, 500.0, 2.0, 1.0).unwrap();
        let s = generate_stream(&env, 300, 5);
        for policy in [
            DeadlinePolicy::Nclp,
            DeadlinePolicy::Lp { eta: 0.5 },
            DeadlinePolicy::Gp,
        ] {
            let r = simulate_deadline(&s, policy, 60.0, true).unwrap();
            let trace = r.trace.as_ref().unwrap();
            for w in trace.windows(2) {
                assert!(w[0].t <= w[1].t);
                assert!((w[1].vehicle_x - w[0].vehicle_x).abs() <= w[1].t - w[0].t + 1e-9);
            }
            let resolved = trace
                .iter()
                .filter(|e| matches!(e.event, EventKind::Capture | EventKind::Escape))
                .count();
            assert_eq!(resolved, 300);
            assert_eq!(r.n_capt + r.n_esc, 300);
        }
    }

    #[test]
    fn deterministic() {
        let env = make_env(120.0, 500.0, 2.0, 2.0).unwrap();
        let s = generate_stream(&env, 400, 9);
        assert_eq!(
            run_lp(&s, 60.0, 0.3).unwrap(),
            run_lp(&s, 60.0, 0.3).unwrap()
        );
    }
}
