//! Moves one vehicle's merging-zone entry half a second earlier and shows
//! what the independent audit reports about it.

use cavx::sim::{self, shift_entry, SimConfig};

fn main() {
    let base = sim::run(&SimConfig::default()).unwrap();
    println!("baseline findings: {}", base.audit.findings.len());
    for id in [3, 12, 25] {
        let faulty = shift_entry(&base, id, -0.5).unwrap();
        let new: Vec<_> = faulty
            .audit
            .findings
            .iter()
            .filter(|f| f.involves(id) && !base.audit.findings.contains(f))
            .collect();
        println!(
            "vehicle {id} entering 0.5 s early: {} new finding(s)",
            new.len()
        );
        for f in new {
            println!("  {f:?}");
        }
    }
}
