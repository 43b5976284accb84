//! Configuration files and deterministic output writers.
//!
//! The config is TOML with four optional sections (`[geometry]`,
//! `[traffic]`, `[objective]`, `[audit]`); every omitted key takes its
//! default and unknown keys are rejected.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::geometry::IntersectionGeometry;
use crate::mz::DEFAULT_EXPONENT_CAP;
use crate::pareto::ParetoRun;
use crate::scheduler::BindingCase;
use crate::sim::{AuditTolerances, MzObjective, SimConfig, SimRun, StateSample};

/// Environment variable naming the default config file.
pub const CONFIG_ENV: &str = "CAVX_CONFIG";

pub const TRAJECTORIES_SCHEMA: u32 = 1;
pub const SCHEDULE_SCHEMA: u32 = 1;
pub const AUDIT_SCHEMA: u32 = 1;
pub const PARETO_SCHEMA: u32 = 1;

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub geometry: IntersectionGeometry,
    pub traffic: TrafficSection,
    pub objective: ObjectiveSection,
    pub audit: AuditSection,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrafficSection {
    pub arrival_rate: f64,
    pub arm_rates: Option<[f64; 4]>,
    pub speed_range: [f64; 2],
    pub turn_probabilities: [f64; 3],
    pub arm_probabilities: [f64; 4],
    pub vehicles: usize,
    pub seed: u64,
}

impl Default for TrafficSection {
    fn default() -> Self {
        let d = SimConfig::default();
        TrafficSection {
            arrival_rate: d.arrival_rate,
            arm_rates: d.arm_rates,
            speed_range: d.speed_range,
            turn_probabilities: d.turn_probabilities,
            arm_probabilities: d.arm_probabilities,
            vehicles: d.vehicles,
            seed: d.seed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveKind {
    Fuel,
    Jerk,
    Weighted,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ObjectiveSection {
    pub kind: ObjectiveKind,
    /// Fuel weight, required for and only for `kind = "weighted"`.
    pub w: Option<f64>,
    pub jerk_scale: f64,
    pub terminal_accel: f64,
    pub exponent_cap: f64,
}

impl Default for ObjectiveSection {
    fn default() -> Self {
        ObjectiveSection {
            kind: ObjectiveKind::Jerk,
            w: None,
            jerk_scale: 10.0,
            terminal_accel: 0.0,
            exponent_cap: DEFAULT_EXPONENT_CAP,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AuditSection {
    pub sample_step: f64,
    pub gap_tol: f64,
    pub time_tol: f64,
}

impl Default for AuditSection {
    fn default() -> Self {
        let t = AuditTolerances::default();
        AuditSection {
            sample_step: 0.1,
            gap_tol: t.gap_tol,
            time_tol: t.time_tol,
        }
    }
}

impl ConfigFile {
    pub fn into_sim_config(self) -> Result<SimConfig> {
        let o = &self.objective;
        let objective = match (o.kind, o.w) {
            (ObjectiveKind::Fuel, None) => MzObjective::Fuel,
            (ObjectiveKind::Jerk, None) => MzObjective::Jerk,
            (ObjectiveKind::Weighted, Some(w)) => MzObjective::Weighted { w },
            (ObjectiveKind::Weighted, None) => {
                return Err(Error::config(
                    "objective.w",
                    "required when kind = \"weighted\"",
                ))
            }
            (_, Some(_)) => {
                return Err(Error::config(
                    "objective.w",
                    "only allowed when kind = \"weighted\"",
                ))
            }
        };
        let t = self.traffic;
        let cfg = SimConfig {
            geometry: self.geometry,
            arrival_rate: t.arrival_rate,
            arm_rates: t.arm_rates,
            speed_range: t.speed_range,
            turn_probabilities: t.turn_probabilities,
            arm_probabilities: t.arm_probabilities,
            vehicles: t.vehicles,
            objective,
            jerk_scale: o.jerk_scale,
            terminal_accel: o.terminal_accel,
            exponent_cap: o.exponent_cap,
            sample_step: self.audit.sample_step,
            seed: t.seed,
            tolerances: AuditTolerances {
                gap_tol: self.audit.gap_tol,
                time_tol: self.audit.time_tol,
            },
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Parses and validates a TOML config.
pub fn parse_config(text: &str) -> Result<SimConfig> {
    toml::from_str::<ConfigFile>(text)?.into_sim_config()
}

pub fn load_config(path: &Path) -> Result<SimConfig> {
    parse_config(&fs::read_to_string(path)?)
}

/// SHA-256 of the config serialised as JSON with sorted keys.
pub fn config_digest(cfg: &SimConfig) -> String {
    let canonical = serde_json::to_value(cfg).expect("config serialises");
    hex::encode(Sha256::digest(canonical.to_string().as_bytes()))
}

/// Formats `x` rounded to 9 significant digits in its shortest exact form.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".to_owned();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.8e}").parse().expect("float round trip");
    rounded.to_string()
}

fn opt_id(id: Option<usize>) -> String {
    id.map(|i| i.to_string()).unwrap_or_default()
}

pub fn write_trajectories<W: Write>(out: W, samples: &[StateSample]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "id", "arm", "turn", "zone", "p", "v", "u", "j"])?;
    for s in samples {
        w.write_record([
            fmt_num(s.t),
            s.id.to_string(),
            s.movement.entry.letter().to_string(),
            s.movement.turn.name().to_owned(),
            s.zone.label().to_owned(),
            fmt_num(s.p),
            fmt_num(s.v),
            fmt_num(s.u),
            fmt_num(s.j),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_schedule<W: Write>(out: W, run: &SimRun) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "id",
        "t0",
        "tm",
        "tf",
        "vm",
        "vf",
        "binding_case",
        "e",
        "s",
        "l",
        "o",
    ])?;
    for r in &run.records {
        let s = &r.schedule;
        w.write_record([
            s.id.to_string(),
            fmt_num(s.t0),
            fmt_num(s.tm),
            fmt_num(s.tf),
            fmt_num(s.vm),
            fmt_num(s.vf),
            s.binding.label().to_owned(),
            opt_id(s.predecessors.e),
            opt_id(s.predecessors.s),
            opt_id(s.predecessors.l),
            opt_id(s.predecessors.o),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn audit_json(run: &SimRun) -> serde_json::Value {
    let histogram: serde_json::Map<String, serde_json::Value> = run
        .binding_histogram()
        .into_iter()
        .map(|(c, n): (BindingCase, usize)| (c.label().to_owned(), json!(n)))
        .collect();
    let infeasible: Vec<serde_json::Value> = run
        .records
        .iter()
        .filter(|r| !r.feasibility.is_feasible())
        .map(|r| json!({ "id": r.schedule.id, "violations": r.feasibility.violations }))
        .collect();
    json!({
        "schema_version": AUDIT_SCHEMA,
        "clean": run.audit.is_clean(),
        "findings": run.audit.findings,
        "binding_cases": histogram,
        "bound_violations": infeasible,
    })
}

pub fn write_pareto<W: Write>(out: W, run: &ParetoRun) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["w", "fuel", "discomfort", "on_frontier"])?;
    for (i, p) in run.points.iter().enumerate() {
        w.write_record([
            fmt_num(p.w),
            fmt_num(p.fuel),
            fmt_num(p.discomfort),
            run.on_frontier(i).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// Run record written next to every set of outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config_digest: String,
    pub seed: u64,
    pub version: String,
    pub outputs: Vec<String>,
    pub schemas: serde_json::Value,
}

impl RunManifest {
    pub fn new(command: &str, cfg: &SimConfig, outputs: &[&str]) -> Self {
        RunManifest {
            command: command.to_owned(),
            config_digest: config_digest(cfg),
            seed: cfg.seed,
            version: env!("CARGO_PKG_VERSION").to_owned(),
            outputs: outputs.iter().map(|s| s.to_string()).collect(),
            schemas: json!({
                "trajectories": TRAJECTORIES_SCHEMA,
                "schedule": SCHEDULE_SCHEMA,
                "audit": AUDIT_SCHEMA,
                "pareto": PARETO_SCHEMA,
            }),
        }
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        write_json(&dir.join("manifest.json"), &serde_json::to_value(self)?)
    }
}

/// Writes the full output set of a simulation into `dir`.
pub fn write_sim_outputs(dir: &Path, run: &SimRun) -> Result<()> {
    fs::create_dir_all(dir)?;
    write_trajectories(
        fs::File::create(dir.join("trajectories.csv"))?,
        &run.samples,
    )?;
    write_schedule(fs::File::create(dir.join("schedule.csv"))?, run)?;
    write_json(&dir.join("audit.json"), &audit_json(run))?;
    RunManifest::new(
        "simulate",
        &run.config,
        &[
            "trajectories.csv",
            "schedule.csv",
            "audit.json",
            "manifest.json",
        ],
    )
    .write(dir)
}
