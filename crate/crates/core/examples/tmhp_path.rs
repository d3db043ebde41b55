// Minimum-time tour through targets drifting slower than the vehicle,
// solved as a static Euclidean path after rescaling the plane.

use std::error::Error;

use deadline_guard::tmhp::drift_correction;
use deadline_guard::{g_map, intercept_time, tmhp_solve, Point, TmhpInstance};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let v = 0.5;
    println!(
        "intercept from the origin: target ahead {:.4}, target behind {:.4}",
        intercept_time(Point::new(0.0, 0.0), Point::new(0.0, 1.0), v)?,
        intercept_time(Point::new(0.0, 0.0), Point::new(0.0, -1.0), v)?
    );
    println!(
        "g(3, 4) at v = 0.6 is {:?}",
        g_map(Point::new(3.0, 4.0), 0.6)?
    );

    let s = Point::new(5.0, 8.0);
    let f = Point::new(2.0, 0.5);
    let points = vec![
        Point::new(1.0, 6.0),
        Point::new(8.0, 3.0),
        Point::new(4.0, 1.5),
        Point::new(9.0, 7.0),
        Point::new(0.5, 2.0),
    ];
    let inst = TmhpInstance::new(s, points, f, v)?;
    let sol = tmhp_solve(&inst)?;
    println!("visiting order {:?}", sol.order);
    println!(
        "duration {:.6} = scaled length {:.6} + drift {:.6}",
        sol.duration,
        sol.emhp_length,
        drift_correction(s, f, v)
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
