//! Runs the randomised experiment for a few seeds and summarises the audit.

use cavx::sim::{self, SafetyFinding, SimConfig};
use cavx::{Arm, Movement, Turn, VehicleSpec};

fn main() {
    for seed in 0..5 {
        let cfg = SimConfig {
            seed,
            ..SimConfig::default()
        };
        let run = sim::run(&cfg).expect("default config is valid");
        let hist: Vec<String> = run
            .binding_histogram()
            .into_iter()
            .map(|(c, n)| format!("{}={n}", c.label()))
            .collect();
        let rear = run
            .audit
            .findings
            .iter()
            .filter(|f| matches!(f, SafetyFinding::RearEnd { .. }))
            .count();
        println!(
            "seed {seed}: {} vehicles, {} samples, [{}], over-bound vehicles {}, findings {} ({} rear-end)",
            run.records.len(),
            run.samples.len(),
            hist.join(" "),
            run.infeasible_vehicles(),
            run.audit.findings.len(),
            rear
        );
    }

    // Poisson arrivals can start closer than the safe distance. With even
    // two-second headways on every arm the audit comes back clean.
    let cfg = SimConfig::default();
    let specs: Vec<VehicleSpec> = (0..12)
        .map(|i| VehicleSpec {
            id: i + 1,
            t0: 2.0 * i as f64,
            v0: 10.0,
            movement: Movement::new(Arm::from_index(i % 4), Turn::Straight),
        })
        .collect();
    let run = sim::run_arrivals(&cfg, &specs).unwrap();
    println!(
        "evenly spaced traffic: findings {}",
        run.audit.findings.len()
    );
}
