//! Randomised single-intersection experiment: Poisson arrivals, scheduling
//! on entry, trajectory planning, state sampling and an independent safety
//! audit of the sampled states.

use std::collections::BTreeMap;

use rand::distr::weighted::WeightedIndex;
use rand::distr::{Distribution, Uniform};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp;
use serde::{Deserialize, Serialize};

use crate::cz::{check_feasibility, solve_cz, CzTrajectory, FeasibilityReport};
use crate::error::{Error, Result};
use crate::geometry::{classify, Arm, ConflictClass, IntersectionGeometry, Movement, Turn};
use crate::mz::{
    normalisation, solve_mz_fuel, solve_mz_jerk, solve_mz_weighted_capped, MzBoundary,
    MzTrajectory, DEFAULT_EXPONENT_CAP,
};
use crate::scheduler::{schedule, BindingCase, QueueState, Schedule, VehicleSpec};

/// Objective used inside the merging zone.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MzObjective {
    Fuel,
    Jerk,
    Weighted { w: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub geometry: IntersectionGeometry,
    /// Aggregate arrival rate (vehicles/s).
    pub arrival_rate: f64,
    /// Independent per-arm rates `[N, E, S, W]`; overrides the aggregate
    /// rate and arm probabilities when set.
    #[serde(default)]
    pub arm_rates: Option<[f64; 4]>,
    pub speed_range: [f64; 2],
    /// `[left, straight, right]`.
    pub turn_probabilities: [f64; 3],
    /// `[N, E, S, W]`.
    pub arm_probabilities: [f64; 4],
    pub vehicles: usize,
    pub objective: MzObjective,
    /// Jerk scale `J_cap` in `q2 = 1/J_cap²` (m/s³).
    pub jerk_scale: f64,
    /// Acceleration imposed at the merging-zone exit.
    pub terminal_accel: f64,
    pub exponent_cap: f64,
    /// State sampling period (s).
    pub sample_step: f64,
    pub seed: u64,
    pub tolerances: AuditTolerances,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            geometry: IntersectionGeometry::default(),
            arrival_rate: 1.0,
            arm_rates: None,
            speed_range: [10.0, 12.0],
            turn_probabilities: [1.0 / 3.0; 3],
            arm_probabilities: [0.25; 4],
            vehicles: 30,
            objective: MzObjective::Jerk,
            jerk_scale: 10.0,
            terminal_accel: 0.0,
            exponent_cap: DEFAULT_EXPONENT_CAP,
            sample_step: 0.1,
            seed: 7,
            tolerances: AuditTolerances::default(),
        }
    }
}

fn probabilities_ok(p: &[f64]) -> bool {
    p.iter().all(|&x| x >= 0.0 && x.is_finite()) && (p.iter().sum::<f64>() - 1.0).abs() < 1e-9
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        self.geometry.validate()?;
        let g = &self.geometry;
        match self.arm_rates {
            Some(r) => {
                if r.iter().any(|&x| !(x >= 0.0 && x.is_finite())) || r.iter().sum::<f64>() <= 0.0 {
                    return Err(Error::config(
                        "arm_rates",
                        "need non-negative rates with a positive sum",
                    ));
                }
            }
            None => {
                if !(self.arrival_rate > 0.0 && self.arrival_rate.is_finite()) {
                    return Err(Error::config("arrival_rate", "must be positive"));
                }
            }
        }
        let [lo, hi] = self.speed_range;
        if !(lo <= hi && lo >= g.speed_min && hi <= g.speed_max) {
            return Err(Error::config(
                "speed_range",
                "need speed_min <= lo <= hi <= speed_max",
            ));
        }
        if !probabilities_ok(&self.turn_probabilities) {
            return Err(Error::config(
                "turn_probabilities",
                "must be non-negative and sum to 1",
            ));
        }
        if !probabilities_ok(&self.arm_probabilities) {
            return Err(Error::config(
                "arm_probabilities",
                "must be non-negative and sum to 1",
            ));
        }
        if self.vehicles == 0 {
            return Err(Error::config("vehicles", "must be at least 1"));
        }
        if let MzObjective::Weighted { w } = self.objective {
            if !(w > 0.0 && w < 1.0) {
                return Err(Error::config(
                    "objective.w",
                    "weighted objective needs 0 < w < 1; use kind = \"fuel\" or \"jerk\" for the end points",
                ));
            }
        }
        if !(self.jerk_scale > 0.0) {
            return Err(Error::config("jerk_scale", "must be positive"));
        }
        if !self.terminal_accel.is_finite() {
            return Err(Error::config("terminal_accel", "must be finite"));
        }
        if !(self.exponent_cap > 0.0) {
            return Err(Error::config("exponent_cap", "must be positive"));
        }
        if !(self.sample_step > 0.0 && self.sample_step.is_finite()) {
            return Err(Error::config("sample_step", "must be positive"));
        }
        if !(self.tolerances.gap_tol >= 0.0 && self.tolerances.time_tol >= 0.0) {
            return Err(Error::config("tolerances", "must be non-negative"));
        }
        Ok(())
    }

    pub fn normalisation(&self) -> (f64, f64) {
        normalisation(self.geometry.accel_max, self.jerk_scale)
    }
}

/// Draws the arrival sequence. Ids follow control-zone entry order; equal
/// entry times are ordered by an independent random key.
pub fn generate_arrivals(cfg: &SimConfig) -> Vec<VehicleSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let speed = Uniform::new_inclusive(cfg.speed_range[0], cfg.speed_range[1])
        .expect("validated speed range");
    let turns = WeightedIndex::new(cfg.turn_probabilities).expect("validated turn probabilities");
    let mut raw: Vec<(f64, u64, Arm)> = Vec::with_capacity(cfg.vehicles);
    match cfg.arm_rates {
        None => {
            let gap = Exp::new(cfg.arrival_rate).expect("validated rate");
            let arms =
                WeightedIndex::new(cfg.arm_probabilities).expect("validated arm probabilities");
            let mut t = 0.0;
            for _ in 0..cfg.vehicles {
                t += gap.sample(&mut rng);
                raw.push((t, rng.random(), Arm::from_index(arms.sample(&mut rng))));
            }
        }
        Some(rates) => {
            let streams: Vec<Option<Exp<f64>>> = rates
                .iter()
                .map(|&r| (r > 0.0).then(|| Exp::new(r).unwrap()))
                .collect();
            let mut next: Vec<f64> = streams
                .iter()
                .map(|s| s.map_or(f64::INFINITY, |d| d.sample(&mut rng)))
                .collect();
            for _ in 0..cfg.vehicles {
                let (k, &t) = next
                    .iter()
                    .enumerate()
                    .min_by(|a, b| a.1.total_cmp(b.1))
                    .expect("four arms");
                raw.push((t, rng.random(), Arm::from_index(k)));
                next[k] += streams[k].expect("finite next time").sample(&mut rng);
            }
        }
    }
    raw.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    raw.into_iter()
        .enumerate()
        .map(|(i, (t0, _, arm))| VehicleSpec {
            id: i + 1,
            t0,
            v0: speed.sample(&mut rng),
            movement: Movement::new(arm, Turn::ALL[turns.sample(&mut rng)]),
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Zone {
    Control,
    Merging,
    Exit,
}

impl Zone {
    pub fn label(self) -> &'static str {
        match self {
            Zone::Control => "cz",
            Zone::Merging => "mz",
            Zone::Exit => "exit",
        }
    }
}

/// One row of the sampled state table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateSample {
    pub t: f64,
    pub id: usize,
    pub movement: Movement,
    pub zone: Zone,
    pub p: f64,
    pub v: f64,
    pub u: f64,
    pub j: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VehicleRecord {
    pub spec: VehicleSpec,
    pub schedule: Schedule,
    pub cz: CzTrajectory,
    pub mz: MzTrajectory,
    pub feasibility: FeasibilityReport,
    /// Leaves the system after driving the safe distance past the exit.
    pub leave_time: f64,
}

impl VehicleRecord {
    fn state(&self, t: f64, g: &IntersectionGeometry) -> (Zone, f64, f64, f64, f64) {
        let s = &self.schedule;
        if t < s.tm {
            (
                Zone::Control,
                self.cz.position(t),
                self.cz.speed(t),
                self.cz.control(t),
                self.cz.profile.jerk(t),
            )
        } else if t < s.tf {
            (
                Zone::Merging,
                self.mz.position(t),
                self.mz.speed(t),
                self.mz.control(t),
                self.mz.jerk(t),
            )
        } else {
            let p_exit = g.control_zone_length + g.path_length(s.movement);
            (Zone::Exit, p_exit + s.vf * (t - s.tf), s.vf, 0.0, 0.0)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimRun {
    pub config: SimConfig,
    pub records: Vec<VehicleRecord>,
    pub samples: Vec<StateSample>,
    pub audit: SafetyReport,
}

impl SimRun {
    /// Number of vehicles whose exit time was fixed by each rule.
    pub fn binding_histogram(&self) -> BTreeMap<BindingCase, usize> {
        let mut h: BTreeMap<BindingCase, usize> =
            BindingCase::ALL.iter().map(|&c| (c, 0)).collect();
        for r in &self.records {
            *h.entry(r.schedule.binding).or_default() += 1;
        }
        h
    }

    pub fn infeasible_vehicles(&self) -> usize {
        self.records
            .iter()
            .filter(|r| !r.feasibility.is_feasible())
            .count()
    }
}

/// Runs the full experiment for `cfg`.
pub fn run(cfg: &SimConfig) -> Result<SimRun> {
    cfg.validate()?;
    let specs = generate_arrivals(cfg);
    run_arrivals(cfg, &specs)
}

/// Schedules and plans a given arrival sequence.
pub fn run_arrivals(cfg: &SimConfig, specs: &[VehicleSpec]) -> Result<SimRun> {
    let mut q = QueueState::new();
    for spec in specs {
        let s = schedule(spec, &q, &cfg.geometry)?;
        q.push(s);
    }
    replay(cfg, specs, q.schedules())
}

/// Plans trajectories for externally supplied schedules, samples them and
/// audits the result. Used directly for fault injection.
pub fn replay(cfg: &SimConfig, specs: &[VehicleSpec], schedules: &[Schedule]) -> Result<SimRun> {
    let g = &cfg.geometry;
    let (q1, q2) = cfg.normalisation();
    let mut records: Vec<VehicleRecord> = Vec::with_capacity(specs.len());
    let mut last_on_arm: [Option<usize>; 4] = [None; 4];
    for (spec, s) in specs.iter().zip(schedules) {
        let cz = solve_cz(s.t0, s.v0, s.tm, s.vm, g.control_zone_length)?;
        let boundary = MzBoundary {
            tm: s.tm,
            tf: s.tf,
            vm: s.vm,
            vf: s.vf,
            p_start: g.control_zone_length,
            p_end: g.control_zone_length + g.path_length(s.movement),
            u_start: cz.control(s.tm),
            u_end: cfg.terminal_accel,
        };
        let mz = match cfg.objective {
            MzObjective::Fuel => solve_mz_fuel(&boundary)?,
            MzObjective::Jerk => solve_mz_jerk(&boundary)?,
            MzObjective::Weighted { w } => {
                solve_mz_weighted_capped(&boundary, w, q1, q2, cfg.exponent_cap)?
            }
        };
        let arm = s.movement.entry.index();
        let leader = last_on_arm[arm].map(|k| &records[k].cz);
        let feasibility = check_feasibility(&cz, g, leader);
        last_on_arm[arm] = Some(records.len());
        records.push(VehicleRecord {
            spec: *spec,
            schedule: *s,
            cz,
            mz,
            feasibility,
            leave_time: s.tf + g.min_safe_distance / s.vf,
        });
    }
    let samples = sample_states(&records, g, cfg.sample_step);
    let audit = audit_samples(&samples, g, &cfg.tolerances);
    Ok(SimRun {
        config: cfg.clone(),
        records,
        samples,
        audit,
    })
}

/// Moves vehicle `id`'s merging-zone entry by `shift` seconds, keeps every
/// other schedule entry, replans all trajectories and re-audits.
pub fn shift_entry(run: &SimRun, id: usize, shift: f64) -> Result<SimRun> {
    let specs: Vec<VehicleSpec> = run.records.iter().map(|r| r.spec).collect();
    let mut schedules: Vec<Schedule> = run.records.iter().map(|r| r.schedule).collect();
    let s = schedules
        .iter_mut()
        .find(|s| s.id == id)
        .ok_or_else(|| Error::config("id", format!("no vehicle {id} in the run")))?;
    s.tm += shift;
    if !(s.tm > s.t0 && s.tm < s.tf) {
        return Err(Error::config("shift", "entry must stay inside (t0, tf)"));
    }
    replay(&run.config, &specs, &schedules)
}

/// Samples every vehicle on the global grid `k · step` plus its own zone
/// transition instants, ordered by vehicle then time.
pub fn sample_states(
    records: &[VehicleRecord],
    g: &IntersectionGeometry,
    step: f64,
) -> Vec<StateSample> {
    let mut out = Vec::new();
    for r in records {
        let s = &r.schedule;
        let mut times: Vec<f64> = vec![s.t0, s.tm, s.tf, r.leave_time];
        let k0 = (s.t0 / step).ceil() as i64;
        let k1 = (r.leave_time / step).floor() as i64;
        times.extend(
            (k0..=k1)
                .map(|k| k as f64 * step)
                .filter(|&t| t >= s.t0 && t <= r.leave_time),
        );
        times.sort_by(f64::total_cmp);
        times.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
        for t in times {
            let (zone, p, v, u, j) = r.state(t, g);
            out.push(StateSample {
                t,
                id: s.id,
                movement: s.movement,
                zone,
                p,
                v,
                u,
                j,
            });
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditTolerances {
    /// Allowed shortfall of the rear-end gap (m).
    pub gap_tol: f64,
    /// Allowed slack on time comparisons (s).
    pub time_tol: f64,
}

impl Default for AuditTolerances {
    fn default() -> Self {
        AuditTolerances {
            gap_tol: 1e-3,
            time_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SafetyFinding {
    /// Same-lane gap inside the control zone fell below the safe distance.
    RearEnd {
        leader: usize,
        follower: usize,
        time: f64,
        gap: f64,
    },
    /// Two crossing vehicles were inside the merging zone together.
    LateralOverlap {
        first: usize,
        second: usize,
        overlap: f64,
    },
    /// Vehicles leaving on the same exit lane were too close in time.
    ExitSpacing {
        leader: usize,
        follower: usize,
        spacing: f64,
        required: f64,
    },
    /// Merging-zone traversal took a different time than the turn time.
    DwellMismatch {
        id: usize,
        dwell: f64,
        expected: f64,
    },
    /// Merging zone reached earlier than full acceleration allows.
    ImpossibleArrival {
        id: usize,
        arrival: f64,
        earliest: f64,
    },
    /// A vehicle never reached the merging-zone entry or exit.
    MissingCrossing { id: usize },
}

impl SafetyFinding {
    /// Whether vehicle `id` is a party to the finding.
    pub fn involves(&self, id: usize) -> bool {
        match *self {
            SafetyFinding::RearEnd {
                leader, follower, ..
            }
            | SafetyFinding::ExitSpacing {
                leader, follower, ..
            } => leader == id || follower == id,
            SafetyFinding::LateralOverlap { first, second, .. } => first == id || second == id,
            SafetyFinding::DwellMismatch { id: v, .. }
            | SafetyFinding::ImpossibleArrival { id: v, .. }
            | SafetyFinding::MissingCrossing { id: v } => v == id,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SafetyReport {
    pub findings: Vec<SafetyFinding>,
}

impl SafetyReport {
    pub fn is_clean(&self) -> bool {
        self.findings.is_empty()
    }
}

/// Re-verifies a completed run from its sampled states only.
pub fn audit_run(run: &SimRun) -> SafetyReport {
    audit_samples(&run.samples, &run.config.geometry, &run.config.tolerances)
}

struct Track<'a> {
    id: usize,
    movement: Movement,
    rows: Vec<&'a StateSample>,
}

impl Track<'_> {
    /// Cubic Hermite interpolation of position from (p, v) samples.
    fn position(&self, t: f64) -> Option<f64> {
        let i = self.rows.partition_point(|r| r.t < t);
        if i < self.rows.len() && self.rows[i].t == t {
            return Some(self.rows[i].p);
        }
        if i == 0 || i == self.rows.len() {
            return None;
        }
        let (a, b) = (self.rows[i - 1], self.rows[i]);
        let h = b.t - a.t;
        let s = (t - a.t) / h;
        let (s2, s3) = (s * s, s * s * s);
        Some(
            (2.0 * s3 - 3.0 * s2 + 1.0) * a.p
                + (s3 - 2.0 * s2 + s) * h * a.v
                + (-2.0 * s3 + 3.0 * s2) * b.p
                + (s3 - s2) * h * b.v,
        )
    }

    fn speed(&self, t: f64) -> Option<f64> {
        let i = self.rows.partition_point(|r| r.t < t);
        if i < self.rows.len() && self.rows[i].t == t {
            return Some(self.rows[i].v);
        }
        if i == 0 || i == self.rows.len() {
            return None;
        }
        let (a, b) = (self.rows[i - 1], self.rows[i]);
        let s = (t - a.t) / (b.t - a.t);
        Some(a.v + s * (b.v - a.v))
    }

    /// First time the position reaches `target`.
    fn crossing(&self, target: f64) -> Option<f64> {
        let first = self.rows.first()?;
        if first.p >= target {
            return Some(first.t);
        }
        let i = self.rows.iter().position(|r| r.p >= target)?;
        let (mut lo, mut hi) = (self.rows[i - 1].t, self.rows[i].t);
        if self.rows[i].p == target {
            return Some(hi);
        }
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if self.position(mid)? < target {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-12 {
                break;
            }
        }
        Some(0.5 * (lo + hi))
    }
}

/// Safety audit over a sampled state table. Zones are inferred from the
/// sampled positions, never from schedule labels.
pub fn audit_samples(
    samples: &[StateSample],
    g: &IntersectionGeometry,
    tol: &AuditTolerances,
) -> SafetyReport {
    let mut by_id: BTreeMap<usize, Track> = BTreeMap::new();
    for s in samples {
        by_id
            .entry(s.id)
            .or_insert_with(|| Track {
                id: s.id,
                movement: s.movement,
                rows: Vec::new(),
            })
            .rows
            .push(s);
    }
    for t in by_id.values_mut() {
        t.rows.sort_by(|a, b| a.t.total_cmp(&b.t));
    }
    let tracks: Vec<Track> = by_id.into_values().collect();
    let l = g.control_zone_length;
    let mut findings = Vec::new();

    struct Crossing {
        enter: f64,
        exit: f64,
        exit_speed: f64,
    }
    let mut crossings: Vec<Option<Crossing>> = Vec::with_capacity(tracks.len());
    for tr in &tracks {
        let enter = tr.crossing(l);
        let exit = tr.crossing(l + g.path_length(tr.movement));
        match (enter, exit) {
            (Some(enter), Some(exit)) => {
                let exit_speed = tr.speed(exit).unwrap_or(f64::NAN);
                crossings.push(Some(Crossing {
                    enter,
                    exit,
                    exit_speed,
                }));
            }
            _ => {
                findings.push(SafetyFinding::MissingCrossing { id: tr.id });
                crossings.push(None);
            }
        }
    }

    // Per-vehicle consistency.
    for (tr, c) in tracks.iter().zip(&crossings) {
        let Some(c) = c else { continue };
        if let Ok(expected) = g.turn_time(tr.movement) {
            let dwell = c.exit - c.enter;
            if (dwell - expected).abs() > tol.time_tol {
                findings.push(SafetyFinding::DwellMismatch {
                    id: tr.id,
                    dwell,
                    expected,
                });
            }
        }
        let first = tr.rows[0];
        let spec = VehicleSpec {
            id: tr.id,
            t0: first.t,
            v0: first.v,
            movement: tr.movement,
        };
        let earliest = crate::scheduler::feasibility_bound(&spec, g);
        if c.enter < earliest - tol.time_tol {
            findings.push(SafetyFinding::ImpossibleArrival {
                id: tr.id,
                arrival: c.enter,
                earliest,
            });
        }
    }

    // Same-lane rear-end gaps while both vehicles are in the control zone.
    let mut lanes: BTreeMap<Arm, Vec<usize>> = BTreeMap::new();
    for (k, tr) in tracks.iter().enumerate() {
        lanes.entry(tr.movement.entry).or_default().push(k);
    }
    for lane in lanes.values_mut() {
        lane.sort_by(|&a, &b| {
            tracks[a].rows[0]
                .t
                .total_cmp(&tracks[b].rows[0].t)
                .then(tracks[a].id.cmp(&tracks[b].id))
        });
        for w in lane.windows(2) {
            let (k, i) = (w[0], w[1]);
            let (lead, foll) = (&tracks[k], &tracks[i]);
            let (Some(ck), Some(ci)) = (&crossings[k], &crossings[i]) else {
                continue;
            };
            let lo = foll.rows[0].t.max(lead.rows[0].t);
            let hi = ck.enter.min(ci.enter);
            let mut worst: Option<(f64, f64)> = None;
            let times = lead
                .rows
                .iter()
                .chain(&foll.rows)
                .map(|r| r.t)
                .chain([lo, hi]);
            for t in times.filter(|&t| t >= lo && t <= hi) {
                let (Some(pk), Some(pi)) = (lead.position(t), foll.position(t)) else {
                    continue;
                };
                let gap = pk - pi;
                if worst.is_none_or(|(_, g0)| gap < g0) {
                    worst = Some((t, gap));
                }
            }
            if let Some((time, gap)) = worst {
                if gap < g.min_safe_distance - tol.gap_tol {
                    findings.push(SafetyFinding::RearEnd {
                        leader: lead.id,
                        follower: foll.id,
                        time,
                        gap,
                    });
                }
            }
        }
    }

    // Pairwise merging-zone conflicts.
    for i in 0..tracks.len() {
        for j in 0..i {
            let (Some(ci), Some(cj)) = (&crossings[i], &crossings[j]) else {
                continue;
            };
            match classify(tracks[i].movement, tracks[j].movement) {
                ConflictClass::Lateral => {
                    let overlap = ci.exit.min(cj.exit) - ci.enter.max(cj.enter);
                    if overlap > tol.time_tol {
                        findings.push(SafetyFinding::LateralOverlap {
                            first: tracks[j].id,
                            second: tracks[i].id,
                            overlap,
                        });
                    }
                }
                ConflictClass::SameExit => {
                    let ((lead, cl), (foll, cf)) = if cj.exit <= ci.exit {
                        ((&tracks[j], cj), (&tracks[i], ci))
                    } else {
                        ((&tracks[i], ci), (&tracks[j], cj))
                    };
                    let required = g.min_safe_distance / cl.exit_speed;
                    let spacing = cf.exit - cl.exit;
                    if spacing < required - tol.time_tol {
                        findings.push(SafetyFinding::ExitSpacing {
                            leader: lead.id,
                            follower: foll.id,
                            spacing,
                            required,
                        });
                    }
                }
                _ => {}
            }
        }
    }
    SafetyReport { findings }
}
