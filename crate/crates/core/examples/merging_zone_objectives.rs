//! Compares the three merging-zone objectives on the left-turn crossing.

use cavx::mz::normalisation;
use cavx::{
    mz_costs, solve_mz_fuel, solve_mz_jerk, solve_mz_weighted, IntersectionGeometry, Movement,
    MzBoundary, MzTrajectory,
};

fn main() {
    let g = IntersectionGeometry::default();
    let m: Movement = "W-left".parse().unwrap();
    let v = g.mz_exit_speed(m);
    let b = MzBoundary {
        tm: 0.0,
        tf: g.turn_time(m).unwrap(),
        vm: v,
        vf: v,
        p_start: g.control_zone_length,
        p_end: g.control_zone_length + g.path_length(m),
        u_start: 0.0,
        u_end: 0.0,
    };
    let (q1, q2) = normalisation(g.accel_max, 10.0);
    let plans = [
        ("fuel", solve_mz_fuel(&b).unwrap()),
        ("jerk", solve_mz_jerk(&b).unwrap()),
        ("w=0.5", solve_mz_weighted(&b, 0.5, q1, q2).unwrap()),
    ];
    println!("{m}: {:.3} m in {} s at {v} m/s", b.p_end - b.p_start, b.tf);
    println!(
        "{:>6} {:>10} {:>12} {:>10} {:>10}",
        "", "fuel", "discomfort", "u(tm)", "u(mid)"
    );
    for (name, tr) in &plans {
        let c = mz_costs(tr, q1, q2);
        println!(
            "{name:>6} {:>10.5} {:>12.5} {:>10.5} {:>10.5}",
            c.fuel,
            c.discomfort,
            tr.control(b.tm),
            tr.control(0.5 * (b.tm + b.tf))
        );
    }
    if let MzTrajectory::Weighted(p) = &plans[2].1 {
        let e = p.exponential_form();
        println!(
            "weighted: rate {:.4}, alpha {:.4e}, beta {:.4e}, speed residual at tm {:.1e}",
            e.rate,
            e.alpha,
            e.beta,
            e.speed_equation_residual(b.tm, p.jerk(b.tm))
        );
    }
}
