use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use deadline_guard::harness::{run_policy, write_csv, write_svg};
use deadline_guard::{
    build_reach_graph, generate_stream, longest_path, make_env, monte_carlo, sweep, tmhp_solve,
    BoundsReport, DemandStream, ExperimentSpec, PolicyKind, TmhpInstance, VehicleState, BETA_TSP,
};

#[derive(Parser)]
#[command(
    name = "deadline-guard",
    version,
    about = "Deadline guarding against translating demands"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a seeded demand stream as JSON lines.
    GenStream {
        #[arg(long = "W")]
        width: f64,
        #[arg(long = "L")]
        length: f64,
        #[arg(long = "v")]
        speed: f64,
        #[arg(long)]
        lambda: f64,
        #[arg(short, long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output path, stdout when omitted.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Monte-Carlo estimate for one spec, or a single run on an imported stream.
    Simulate {
        /// Experiment spec (JSON).
        #[arg(long)]
        spec: PathBuf,
        /// Overrides the spec's base seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Run once on this stream instead of generating replicates.
        #[arg(long)]
        stream: Option<PathBuf>,
        #[arg(long)]
        policy: Option<PolicyKind>,
        #[arg(long)]
        eta: Option<f64>,
        /// Event trace (JSON lines) of the single run with seed `seed`.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Sweep the arrival rate over the spec's grid and write CSV.
    Sweep {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(short, long)]
        out: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Print every applicable bound as JSON.
    Bounds {
        #[arg(long = "v")]
        speed: f64,
        #[arg(long)]
        lambda: f64,
        #[arg(long = "W")]
        width: f64,
        #[arg(long = "L")]
        length: f64,
        #[arg(long, default_value_t = BETA_TSP)]
        beta: f64,
    },
    /// Dump the reachability graph of a stream and its longest path.
    Graph {
        #[arg(long)]
        stream: PathBuf,
        /// Vehicle abscissa on the deadline, `W/2` when omitted.
        #[arg(long)]
        start_x: Option<f64>,
    },
    /// Solve a translational Hamiltonian path instance read as JSON.
    TmhpSolve {
        /// Instance path, stdin when omitted.
        #[arg(long)]
        instance: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

type AnyResult<T> = Result<T, Box<dyn std::error::Error>>;

fn output(path: Option<&PathBuf>) -> AnyResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn read_spec(path: &PathBuf, seed: Option<u64>) -> AnyResult<ExperimentSpec> {
    let mut spec: ExperimentSpec = serde_json::from_reader(BufReader::new(File::open(path)?))?;
    if let Some(s) = seed {
        spec.base_seed = s;
    }
    Ok(spec)
}

fn read_stream(path: &PathBuf) -> AnyResult<DemandStream> {
    Ok(DemandStream::read_jsonl(BufReader::new(File::open(path)?))?)
}

fn print_json(value: &impl serde::Serialize) -> AnyResult<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn run(cli: Cli) -> AnyResult<()> {
    match cli.command {
        Command::GenStream {
            width,
            length,
            speed,
            lambda,
            n,
            seed,
            out,
        } => {
            let env = make_env(width, length, speed, lambda)?;
            let mut w = output(out.as_ref())?;
            generate_stream(&env, n, seed).write_jsonl(&mut w)?;
            w.flush()?;
        }
        Command::Simulate {
            spec,
            seed,
            stream,
            policy,
            eta,
            trace,
        } => {
            let mut spec = read_spec(&spec, seed)?;
            if let Some(p) = policy {
                spec.policy = p;
            }
            if let Some(e) = eta {
                spec.eta = e;
            }
            spec.validate()?;
            let start = spec.start_point();
            let single = match &stream {
                Some(p) => Some(read_stream(p)?),
                None if trace.is_some() => {
                    Some(generate_stream(&spec.env, spec.n_demands, spec.base_seed))
                }
                None => None,
            };
            let run = single
                .map(|s| run_policy(spec.policy, &s, spec.eta, start, trace.is_some()))
                .transpose()?;
            if let (Some(r), Some(path)) = (&run, &trace) {
                let mut w = BufWriter::new(File::create(path)?);
                r.write_trace(&mut w)?;
                w.flush()?;
            }
            match (run, stream.is_some()) {
                (Some(r), true) => print_json(&json!({
                    "policy": spec.policy,
                    "n_capt": r.n_capt,
                    "n_esc": r.n_esc,
                    "capture_fraction": r.capture_fraction,
                    "vacuous": r.vacuous,
                    "captured": r.captured_ids(),
                }))?,
                _ => print_json(&monte_carlo(&spec)?)?,
            }
        }
        Command::Sweep {
            spec,
            seed,
            out,
            svg,
        } => {
            let spec = read_spec(&spec, seed)?;
            let rows = sweep(&spec)?;
            let mut w = output(out.as_ref())?;
            write_csv(&rows, &mut w)?;
            w.flush()?;
            if let Some(p) = svg {
                let title = spec
                    .label
                    .clone()
                    .unwrap_or_else(|| format!("{:?} sweep", spec.policy));
                let mut w = BufWriter::new(File::create(p)?);
                write_svg(&rows, &title, &mut w)?;
                w.flush()?;
            }
        }
        Command::Bounds {
            speed,
            lambda,
            width,
            length,
            beta,
        } => {
            let env = make_env(width, length, speed, lambda)?;
            print_json(&BoundsReport::new(&env, beta)?)?;
        }
        Command::Graph { stream, start_x } => {
            let s = read_stream(&stream)?;
            let env = s.env();
            let vehicle =
                VehicleState::new(start_x.unwrap_or(env.width() / 2.0), env.length(), 0.0);
            let graph = build_reach_graph(&vehicle, s.demands(), env)?;
            let plan = longest_path(&graph)?;
            let vertices: Vec<_> = s
                .demands()
                .iter()
                .map(|d| json!({ "id": d.id, "t_arr": d.t_arr, "x": d.x }))
                .collect();
            print_json(&json!({
                "vertices": vertices,
                "source": { "x": vehicle.x, "y": vehicle.y, "t": vehicle.t },
                "source_edges": graph.source_edges().iter().map(|&k| graph.ids()[k]).collect::<Vec<_>>(),
                "edges": graph.edge_ids(),
                "longest_path": plan,
            }))?;
        }
        Command::TmhpSolve { instance } => {
            let mut text = String::new();
            match instance {
                Some(p) => {
                    BufReader::new(File::open(p)?).read_to_string(&mut text)?;
                }
                None => {
                    for line in io::stdin().lock().lines() {
                        text.push_str(&line?);
                        text.push('\n');
                    }
                }
            }
            let raw: TmhpInstance = serde_json::from_str(&text)?;
            let inst = TmhpInstance::new(raw.s, raw.points, raw.f, raw.v)?;
            print_json(&tmhp_solve(&inst)?)?;
        }
    }
    Ok(())
}
