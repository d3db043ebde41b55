//! Per-run results and event traces shared by every policy.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::environment::{DemandState, DemandStatus};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Arrival,
    Capture,
    Escape,
    Recompute,
}

/// One line of an event trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEvent {
    pub t: f64,
    pub event: EventKind,
    pub demand_id: Option<usize>,
    pub vehicle_x: f64,
    /// Only recorded by policies that leave the deadline.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vehicle_y: Option<f64>,
}

/// A plan committed at a recompute instant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Commit {
    pub t: f64,
    pub vehicle_x: f64,
    pub vehicle_y: f64,
    pub demands: Vec<usize>,
}

/// Outcome of one simulation run to quiescence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub n_capt: usize,
    pub n_esc: usize,
    /// `n_capt / (n_capt + n_esc)`, or 1 for an empty stream (see `vacuous`).
    pub capture_fraction: f64,
    pub vacuous: bool,
    /// Final state of every demand, indexed by id.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub states: Vec<DemandState>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub trace: Option<Vec<TraceEvent>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub commits: Option<Vec<Commit>>,
}

impl RunResult {
    pub(crate) fn from_states(
        states: Vec<DemandState>,
        trace: Option<Vec<TraceEvent>>,
        commits: Option<Vec<Commit>>,
    ) -> Result<Self> {
        let mut n_capt = 0;
        let mut n_esc = 0;
        for (id, s) in states.iter().enumerate() {
            match s.status {
                DemandStatus::Captured => n_capt += 1,
                DemandStatus::Escaped => n_esc += 1,
                other => {
                    return Err(Error::Contract(format!(
                        "demand {id} left unresolved ({other:?}) at quiescence"
                    )))
                }
            }
        }
        let total = n_capt + n_esc;
        let vacuous = total == 0;
        let capture_fraction = if vacuous {
            1.0
        } else {
            n_capt as f64 / total as f64
        };
        Ok(Self {
            n_capt,
            n_esc,
            capture_fraction,
            vacuous,
            states,
            trace,
            commits,
        })
    }

    /// Ids of captured demands in increasing id order.
    pub fn captured_ids(&self) -> Vec<usize> {
        self.states
            .iter()
            .enumerate()
            .filter(|(_, s)| s.status == DemandStatus::Captured)
            .map(|(id, _)| id)
            .collect()
    }

    /// Writes the trace as JSON lines; does nothing when no trace was recorded.
    pub fn write_trace<W: Write>(&self, mut out: W) -> Result<()> {
        for ev in self.trace.iter().flatten() {
            serde_json::to_writer(&mut out, ev)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}
