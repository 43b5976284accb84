//! Earliest possible merging-zone entry for a range of initial speeds.

use cavx::scheduler::feasibility_bound;
use cavx::{IntersectionGeometry, VehicleSpec};

fn main() {
    let g = IntersectionGeometry::default();
    println!(
        "L = {} m, vmax = {} m/s, umax = {} m/s^2",
        g.control_zone_length, g.speed_max, g.accel_max
    );
    println!("{:>6} {:>10} {:>12}", "v0", "earliest", "free travel");
    for v0 in [0.0, 2.0, 5.0, 8.0, 10.0, 11.0, 12.0, 13.0] {
        let spec = VehicleSpec {
            id: 1,
            t0: 0.0,
            v0,
            movement: "W-straight".parse().unwrap(),
        };
        let free = if v0 > 0.0 {
            g.control_zone_length / v0
        } else {
            f64::INFINITY
        };
        println!(
            "{v0:>6.1} {:>10.3} {free:>12.3}",
            feasibility_bound(&spec, &g)
        );
    }
}
