//! Minimum-energy control-zone profile for one vehicle, with its bound check.

use cavx::{check_feasibility, solve_cz, IntersectionGeometry};

fn main() {
    let g = IntersectionGeometry::default();
    let (t0, v0, tm, vm) = (0.0, 12.0, 38.0, 10.0);
    let cz = solve_cz(t0, v0, tm, vm, g.control_zone_length).expect("well posed");
    let [a, b, c, d] = cz.profile.absolute_coefficients();
    println!("u(t) = {a:.6e} t + {b:.6e}");
    println!("v(t) = {:.6e} t^2 + {b:.6e} t + {c:.6e}", a / 2.0);
    println!(
        "p(t) = {:.6e} t^3 + {:.6e} t^2 + {c:.6e} t + {d:.6e}",
        a / 6.0,
        b / 2.0
    );
    println!("cost 1/2 int u^2 = {:.10}", cz.cost());
    println!("boundary residual = {:.2e}", cz.boundary_residual());
    for k in 0..=4 {
        let t = t0 + (tm - t0) * k as f64 / 4.0;
        println!(
            "t={t:6.2}  p={:8.3}  v={:7.4}  u={:8.5}",
            cz.position(t),
            cz.speed(t),
            cz.control(t)
        );
    }
    let report = check_feasibility(&cz, &g, None);
    println!("within speed and control bounds: {}", report.is_feasible());

    // Asking for the merging zone too early pushes the speed past its cap.
    let rushed = solve_cz(t0, v0, 26.0, vm, g.control_zone_length).unwrap();
    for v in check_feasibility(&rushed, &g, None).violations {
        println!(
            "rushed plan: {:?} at t={:.2} ({:.3} vs {})",
            v.kind, v.time, v.value, v.limit
        );
    }
}
