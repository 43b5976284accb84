//! Sweeps the weight between fuel and discomfort for a left turn.

use cavx::mz::normalisation;
use cavx::{default_grid, sweep, IntersectionGeometry, Movement, MzBoundary};

fn main() {
    let g = IntersectionGeometry::default();
    let m: Movement = "S-left".parse().unwrap();
    let v = g.mz_exit_speed(m);
    let b = MzBoundary {
        tm: 0.0,
        tf: g.turn_time(m).unwrap(),
        vm: v,
        vf: v,
        p_start: 0.0,
        p_end: g.path_length(m),
        u_start: 0.0,
        u_end: 0.0,
    };
    let (q1, q2) = normalisation(g.accel_max, 10.0);
    let run = sweep(&b, &default_grid(12, 1e-3), q1, q2).unwrap();
    println!("{:>8} {:>10} {:>12} frontier", "w", "fuel", "discomfort");
    for (i, p) in run.points.iter().enumerate() {
        println!(
            "{:>8.4} {:>10.5} {:>12.5} {}",
            p.w,
            p.fuel,
            p.discomfort,
            run.on_frontier(i)
        );
    }
}
