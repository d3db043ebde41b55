// Seeded Poisson demand streams: generation, JSON-lines export and the
// spatial distribution of demands that nobody services.

use std::error::Error;

use deadline_guard::{generate_stream, make_env, region_count, DemandStream, Rect};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let env = make_env(120.0, 500.0, 2.0, 1.0)?;
    let stream = generate_stream(&env, 400, 7);
    println!(
        "{} demands over {:.1} time units, areal intensity {:.5}",
        stream.len(),
        stream.demands().last().map_or(0.0, |d| d.t_arr),
        env.areal_intensity()
    );

    let mut jsonl = Vec::new();
    stream.write_jsonl(&mut jsonl)?;
    let back = DemandStream::read_jsonl(jsonl.as_slice())?;
    assert_eq!(back, stream);
    println!("JSON lines: {} bytes, round trip exact", jsonl.len());

    // With nobody servicing, counts in a region are Poisson(intensity * area).
    let rect = Rect::new(20.0, 60.0, 40.0, 120.0);
    let t = 100.0;
    let counts: Vec<usize> = (0..500)
        .map(|seed| region_count(&generate_stream(&env, 400, seed), &rect, t))
        .collect();
    let mean = counts.iter().sum::<usize>() as f64 / counts.len() as f64;
    println!(
        "mean count in {:?} at t = {t}: {mean:.3} (expected {:.3})",
        rect,
        env.areal_intensity() * rect.area()
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
