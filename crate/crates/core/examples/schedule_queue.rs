//! Schedules a short hand-made arrival sequence and shows which rule set
//! each vehicle's entry time.

use cavx::scheduler::{audit_queue, schedule_all};
use cavx::{IntersectionGeometry, VehicleSpec};

fn main() {
    let g = IntersectionGeometry::default();
    let arrivals = [
        (0.0, 11.0, "W-straight"),
        (0.4, 10.5, "N-left"),
        (1.1, 12.0, "W-right"),
        (1.5, 10.0, "E-straight"),
        (2.0, 11.5, "S-left"),
        (2.2, 10.2, "N-straight"),
        (3.0, 12.0, "W-left"),
    ];
    let specs: Vec<VehicleSpec> = arrivals
        .iter()
        .enumerate()
        .map(|(i, &(t0, v0, m))| VehicleSpec {
            id: i + 1,
            t0,
            v0,
            movement: m.parse().unwrap(),
        })
        .collect();
    let q = schedule_all(&specs, &g).expect("valid geometry");
    println!(
        "{:>3} {:>12} {:>6} {:>8} {:>8} {:>5} {:>12}",
        "id", "movement", "t0", "tm", "tf", "vm", "binding"
    );
    for s in q.schedules() {
        println!(
            "{:>3} {:>12} {:>6.2} {:>8.3} {:>8.3} {:>5.1} {:>12}",
            s.id,
            s.movement.to_string(),
            s.t0,
            s.tm,
            s.tf,
            s.vm,
            s.binding.label()
        );
    }
    let issues = audit_queue(&q);
    println!("queue ordering and exclusion issues: {}", issues.len());
}
