//! Environment geometry, demand kinematics and seeded Poisson demand streams.
//!
//! The environment is the rectangle `[0, W] x [0, L]`. Demands appear on the
//! generator (`y = 0`) as a temporal Poisson process with rate `lambda`, at a
//! uniformly distributed abscissa, and translate towards the deadline
//! (`y = L`) at speed `v`. The vehicle moves at unit speed, so every other
//! unit is expressed relative to it.

use std::io::{BufRead, Write};

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

impl From<(f64, f64)> for Point {
    fn from((x, y): (f64, f64)) -> Self {
        Self { x, y }
    }
}

/// Validated environment parameters.
///
/// `W` and `L` are in length units, `v` is the demand speed as a ratio of the
/// (unit) vehicle speed and `lambda` is the temporal arrival rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawEnv", into = "RawEnv")]
pub struct EnvParams {
    width: f64,
    length: f64,
    speed: f64,
    rate: f64,
}

#[derive(Serialize, Deserialize)]
struct RawEnv {
    #[serde(rename = "W")]
    width: f64,
    #[serde(rename = "L")]
    length: f64,
    v: f64,
    lambda: f64,
}

impl TryFrom<RawEnv> for EnvParams {
    type Error = Error;

    fn try_from(raw: RawEnv) -> Result<Self> {
        make_env(raw.width, raw.length, raw.v, raw.lambda)
    }
}

impl From<EnvParams> for RawEnv {
    fn from(env: EnvParams) -> Self {
        RawEnv {
            width: env.width,
            length: env.length,
            v: env.speed,
            lambda: env.rate,
        }
    }
}

fn positive(field: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::Parameter { field, value })
    }
}

/// Builds validated environment parameters. Every argument must be finite and
/// strictly positive; the error names the first offending field.
pub fn make_env(width: f64, length: f64, v: f64, lambda: f64) -> Result<EnvParams> {
    Ok(EnvParams {
        width: positive("W", width)?,
        length: positive("L", length)?,
        speed: positive("v", v)?,
        rate: positive("lambda", lambda)?,
    })
}

impl EnvParams {
    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Demand speed `v`.
    pub fn speed(&self) -> f64 {
        self.speed
    }

    /// Arrival rate `lambda`.
    pub fn rate(&self) -> f64 {
        self.rate
    }

    /// Expected number of demands per unit area in an unserviced region,
    /// `lambda / (v W)`.
    pub fn areal_intensity(&self) -> f64 {
        self.rate / (self.speed * self.width)
    }

    /// Time a demand spends between the generator and the deadline, `L / v`.
    pub fn transit_time(&self) -> f64 {
        self.length / self.speed
    }

    /// Same geometry and speed with a different arrival rate.
    pub fn with_rate(&self, lambda: f64) -> Result<EnvParams> {
        make_env(self.width, self.length, self.speed, lambda)
    }
}

/// One arrival on the generator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Demand {
    pub id: usize,
    pub t_arr: f64,
    pub x: f64,
}

impl Demand {
    /// Instant the demand reaches the deadline, `t_arr + L / v`.
    pub fn escape_time(&self, env: &EnvParams) -> f64 {
        self.t_arr + env.transit_time()
    }

    pub fn position(&self, v: f64, t: f64) -> Point {
        demand_position(self, v, t)
    }
}

/// Position of `demand` at time `t`: `(x, v (t - t_arr))`. Times before the
/// arrival give a negative ordinate (the unarrived region).
pub fn demand_position(demand: &Demand, v: f64, t: f64) -> Point {
    Point::new(demand.x, v * (t - demand.t_arr))
}

/// Lifecycle of a demand during one simulation run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DemandStatus {
    Pending,
    Outstanding,
    Captured,
    Escaped,
}

/// Per-run mutable state of a demand. Status only moves
/// pending -> outstanding -> {captured | escaped}, and the resolve time is set
/// exactly once.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DemandState {
    pub status: DemandStatus,
    pub resolve_time: Option<f64>,
}

impl Default for DemandState {
    fn default() -> Self {
        Self {
            status: DemandStatus::Pending,
            resolve_time: None,
        }
    }
}

impl DemandState {
    pub fn arrive(&mut self) -> Result<()> {
        self.step(DemandStatus::Pending, DemandStatus::Outstanding, None)
    }

    pub fn capture(&mut self, t: f64) -> Result<()> {
        self.step(DemandStatus::Outstanding, DemandStatus::Captured, Some(t))
    }

    pub fn escape(&mut self, t: f64) -> Result<()> {
        self.step(DemandStatus::Outstanding, DemandStatus::Escaped, Some(t))
    }

    pub fn is_resolved(&self) -> bool {
        matches!(self.status, DemandStatus::Captured | DemandStatus::Escaped)
    }

    fn step(&mut self, from: DemandStatus, to: DemandStatus, t: Option<f64>) -> Result<()> {
        if self.status != from {
            return Err(Error::Contract(format!(
                "illegal demand transition {:?} -> {:?}",
                self.status, to
            )));
        }
        self.status = to;
        self.resolve_time = t;
        Ok(())
    }
}

/// Vehicle position and the time it was recorded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VehicleState {
    pub x: f64,
    pub y: f64,
    pub t: f64,
}

impl VehicleState {
    pub const fn new(x: f64, y: f64, t: f64) -> Self {
        Self { x, y, t }
    }

    pub fn position(&self) -> Point {
        Point::new(self.x, self.y)
    }
}

/// A finite, time-sorted sequence of arrivals together with the environment
/// and seed that produced it. Immutable once built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemandStream {
    env: EnvParams,
    seed: u64,
    demands: Vec<Demand>,
}

impl DemandStream {
    /// Wraps an explicit list of demands, checking ids are `0..n` in order,
    /// arrival times strictly increase and abscissae lie in `[0, W)`.
    pub fn from_demands(env: EnvParams, seed: u64, demands: Vec<Demand>) -> Result<Self> {
        for (k, d) in demands.iter().enumerate() {
            if d.id != k {
                return Err(Error::Contract(format!(
                    "demand at index {k} has id {}",
                    d.id
                )));
            }
            if !(d.t_arr.is_finite() && d.t_arr >= 0.0) {
                return Err(Error::Contract(format!(
                    "demand {k} has arrival time {}",
                    d.t_arr
                )));
            }
            if !(d.x >= 0.0 && d.x < env.width()) {
                return Err(Error::Contract(format!(
                    "demand {k} abscissa {} outside [0, {})",
                    d.x,
                    env.width()
                )));
            }
            if k > 0 && d.t_arr <= demands[k - 1].t_arr {
                return Err(Error::Contract(format!(
                    "arrival times not strictly increasing at demand {k}"
                )));
            }
        }
        Ok(Self { env, seed, demands })
    }

    pub fn env(&self) -> &EnvParams {
        &self.env
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn demands(&self) -> &[Demand] {
        &self.demands
    }

    pub fn len(&self) -> usize {
        self.demands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.demands.is_empty()
    }

    /// Writes the stream as JSON lines: a header record with the environment
    /// and seed, then one `{id, t_arr, x}` record per demand.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> Result<()> {
        let header = StreamHeader {
            kind: HeaderTag::Header,
            env: self.env,
            seed: self.seed,
            n_demands: self.demands.len(),
        };
        serde_json::to_writer(&mut out, &header)?;
        out.write_all(b"\n")?;
        for d in &self.demands {
            serde_json::to_writer(&mut out, d)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn read_jsonl<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input
            .lines()
            .enumerate()
            .filter(|(_, l)| l.as_ref().map(|s| !s.trim().is_empty()).unwrap_or(true));
        let (_, first) = lines.next().ok_or(Error::Format {
            line: 1,
            reason: "missing header record".into(),
        })?;
        let header: StreamHeader = serde_json::from_str(&first?).map_err(|e| Error::Format {
            line: 1,
            reason: e.to_string(),
        })?;
        let mut demands = Vec::with_capacity(header.n_demands);
        for (k, line) in lines {
            let d: Demand = serde_json::from_str(&line?).map_err(|e| Error::Format {
                line: k + 1,
                reason: e.to_string(),
            })?;
            demands.push(d);
        }
        if demands.len() != header.n_demands {
            return Err(Error::Format {
                line: demands.len() + 1,
                reason: format!(
                    "header announces {} demands, found {}",
                    header.n_demands,
                    demands.len()
                ),
            });
        }
        Self::from_demands(header.env, header.seed, demands)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum HeaderTag {
    Header,
}

#[derive(Serialize, Deserialize)]
struct StreamHeader {
    #[serde(rename = "type")]
    kind: HeaderTag,
    env: EnvParams,
    seed: u64,
    n_demands: usize,
}

/// Generates `n_demands` arrivals. Interarrival gaps are `-ln(U) / lambda`
/// with `U` uniform on `(0, 1)`, abscissae are uniform on `[0, W)`. The
/// generator is ChaCha8 seeded from `seed`, so a fixed `(env, n, seed)` always
/// yields the same stream.
pub fn generate_stream(env: &EnvParams, n_demands: usize, seed: u64) -> DemandStream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut demands = Vec::with_capacity(n_demands);
    let mut t = 0.0_f64;
    for id in 0..n_demands {
        loop {
            let u: f64 = rng.sample(Open01);
            let next = t - u.ln() / env.rate();
            // a gap below half an ulp of `t` would tie; redraw
            if next > t {
                t = next;
                break;
            }
        }
        let x = rng.random_range(0.0..env.width());
        demands.push(Demand { id, t_arr: t, x });
    }
    DemandStream {
        env: *env,
        seed,
        demands,
    }
}

/// Axis-aligned half-open rectangle `[x0, x1) x [y0, y1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub const fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Self { x0, x1, y0, y1 }
    }

    pub fn area(&self) -> f64 {
        (self.x1 - self.x0).max(0.0) * (self.y1 - self.y0).max(0.0)
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.x0 && p.x < self.x1 && p.y >= self.y0 && p.y < self.y1
    }
}

/// Number of demands of `stream` whose position at time `t` lies in `rect`,
/// assuming none were serviced before `t`.
pub fn region_count(stream: &DemandStream, rect: &Rect, t: f64) -> usize {
    let v = stream.env().speed();
    stream
        .demands()
        .iter()
        .take_while(|d| d.t_arr <= t)
        .filter(|d| rect.contains(demand_position(d, v, t)))
        .count()
}
