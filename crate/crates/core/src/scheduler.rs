//! First-come queue and recursive merging-zone time assignment.
//!
//! Every vehicle entering the control zone is appended to the queue and its
//! merging-zone exit time is the maximum over the constraints imposed by the
//! latest queued vehicle of each conflict class, plus the earliest time it
//! can physically reach the merging zone.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::GeometryError;
use crate::geometry::{classify, ConflictClass, IntersectionGeometry, Movement};

/// A vehicle as announced to the coordinator on control-zone entry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VehicleSpec {
    /// Queue position, starting at 1.
    pub id: usize,
    /// Control-zone entry time (s).
    pub t0: f64,
    /// Control-zone entry speed (m/s).
    pub v0: f64,
    pub movement: Movement,
}

/// Which term of the max rule fixed the exit time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BindingCase {
    /// Earliest physically reachable arrival.
    Feasibility,
    /// Spacing behind the last vehicle leaving on the same exit lane.
    Exit,
    /// Spacing behind the last vehicle from the same approach lane.
    Entry,
    /// Exclusive occupancy against the last crossing vehicle.
    Lateral,
    /// Tie with the last non-conflicting vehicle.
    Unconflicted,
}

impl BindingCase {
    pub const ALL: [BindingCase; 5] = [
        BindingCase::Feasibility,
        BindingCase::Exit,
        BindingCase::Entry,
        BindingCase::Lateral,
        BindingCase::Unconflicted,
    ];

    pub fn label(self) -> &'static str {
        match self {
            BindingCase::Feasibility => "feasibility",
            BindingCase::Exit => "e",
            BindingCase::Entry => "s",
            BindingCase::Lateral => "l",
            BindingCase::Unconflicted => "o",
        }
    }
}

impl fmt::Display for BindingCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Latest queued vehicle of each conflict class, by id.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Predecessors {
    pub e: Option<usize>,
    pub s: Option<usize>,
    pub l: Option<usize>,
    pub o: Option<usize>,
}

/// Terminal conditions assigned to one vehicle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub id: usize,
    pub movement: Movement,
    pub t0: f64,
    pub v0: f64,
    /// Merging-zone entry time.
    pub tm: f64,
    /// Merging-zone exit time, always `tm + turn_time`.
    pub tf: f64,
    pub vm: f64,
    pub vf: f64,
    pub turn_time: f64,
    pub predecessors: Predecessors,
    pub binding: BindingCase,
}

/// Schedules of the vehicles already admitted, in queue order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct QueueState {
    schedules: Vec<Schedule>,
}

impl QueueState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_schedules(schedules: Vec<Schedule>) -> Self {
        QueueState { schedules }
    }

    pub fn push(&mut self, s: Schedule) {
        self.schedules.push(s);
    }

    pub fn len(&self) -> usize {
        self.schedules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.schedules.is_empty()
    }

    pub fn schedules(&self) -> &[Schedule] {
        &self.schedules
    }

    pub fn get(&self, id: usize) -> Option<&Schedule> {
        self.schedules.iter().rev().find(|s| s.id == id)
    }

    pub fn last(&self) -> Option<&Schedule> {
        self.schedules.last()
    }
}

/// The latest queued vehicle in each conflict class relative to `spec`.
pub fn conflict_predecessors(spec: &VehicleSpec, q: &QueueState) -> Predecessors {
    let mut p = Predecessors::default();
    for s in q.schedules().iter().filter(|s| s.id < spec.id) {
        let slot = match classify(spec.movement, s.movement) {
            ConflictClass::SameExit => &mut p.e,
            ConflictClass::SameEntry => &mut p.s,
            ConflictClass::Lateral => &mut p.l,
            ConflictClass::NoConflict => &mut p.o,
        };
        if slot.is_none_or(|j| s.id > j) {
            *slot = Some(s.id);
        }
    }
    p
}

/// Earliest possible merging-zone arrival: full throttle from `v0`, then
/// cruise at `speed_max` if it is reached within the control zone.
pub fn feasibility_bound(spec: &VehicleSpec, g: &IntersectionGeometry) -> f64 {
    let (l, u, vmax, v0) = (g.control_zone_length, g.accel_max, g.speed_max, spec.v0);
    if 2.0 * l * u + v0 * v0 >= vmax * vmax {
        spec.t0 + l / vmax + (vmax - v0).powi(2) / (2.0 * u * vmax)
    } else {
        spec.t0 + ((2.0 * l * u + v0 * v0).sqrt() - v0) / u
    }
}

/// Time the given vehicle needs to cover the safe distance inside the
/// merging zone.
pub fn entry_gap_time(m: Movement, g: &IntersectionGeometry) -> Result<f64, GeometryError> {
    Ok(g.min_safe_distance / g.mz_travel_speed(m)?)
}

/// Assigns merging-zone entry and exit times to `spec`.
pub fn schedule(
    spec: &VehicleSpec,
    q: &QueueState,
    g: &IntersectionGeometry,
) -> Result<Schedule, GeometryError> {
    let turn_time = g.turn_time(spec.movement)?;
    let preds = conflict_predecessors(spec, q);
    let get = |id: Option<usize>| id.and_then(|j| q.get(j));

    let mut tf = feasibility_bound(spec, g) + turn_time;
    let mut binding = BindingCase::Feasibility;
    let mut raise = |candidate: f64, case: BindingCase| {
        if candidate > tf {
            tf = candidate;
            binding = case;
        }
    };
    if let Some(e) = get(preds.e) {
        raise(e.tf + g.min_safe_distance / e.vf, BindingCase::Exit);
    }
    if let Some(s) = get(preds.s) {
        let gap = entry_gap_time(s.movement, g)?;
        raise((s.tm + gap + turn_time).max(s.tf), BindingCase::Entry);
    }
    if let Some(l) = get(preds.l) {
        raise(l.tf + turn_time, BindingCase::Lateral);
    }
    if let Some(o) = get(preds.o) {
        raise(o.tf, BindingCase::Unconflicted);
    }

    let speed = g.mz_exit_speed(spec.movement);
    Ok(Schedule {
        id: spec.id,
        movement: spec.movement,
        t0: spec.t0,
        v0: spec.v0,
        tm: tf - turn_time,
        tf,
        vm: speed,
        vf: speed,
        turn_time,
        predecessors: preds,
        binding,
    })
}

/// An ordering or exclusion condition broken by a queue.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum QueueViolation {
    /// Same exit lane but the later vehicle does not leave strictly later.
    ExitOrder { leader: usize, follower: usize },
    /// Same approach lane but the later vehicle does not enter strictly later.
    EntryOrder { leader: usize, follower: usize },
    /// Crossing vehicles share the merging zone for `overlap` seconds.
    LateralOverlap {
        first: usize,
        second: usize,
        overlap: f64,
    },
    /// Exit time decreases along the queue.
    Monotonicity { previous: usize, next: usize },
}

/// Overlap below this many seconds counts as touching: `tm = tf − Δ` cannot
/// reproduce a predecessor's exit time to the last bit.
pub const OVERLAP_ROUNDING: f64 = 1e-9;

/// Re-checks every pairwise ordering and exclusion condition of the queue.
pub fn audit_queue(q: &QueueState) -> Vec<QueueViolation> {
    let s = q.schedules();
    let mut out = Vec::new();
    for w in s.windows(2) {
        if w[1].tf < w[0].tf {
            out.push(QueueViolation::Monotonicity {
                previous: w[0].id,
                next: w[1].id,
            });
        }
    }
    for (i, later) in s.iter().enumerate() {
        for earlier in &s[..i] {
            match classify(later.movement, earlier.movement) {
                ConflictClass::SameExit if later.tf <= earlier.tf => {
                    out.push(QueueViolation::ExitOrder {
                        leader: earlier.id,
                        follower: later.id,
                    })
                }
                ConflictClass::SameEntry if later.tm <= earlier.tm => {
                    out.push(QueueViolation::EntryOrder {
                        leader: earlier.id,
                        follower: later.id,
                    })
                }
                ConflictClass::Lateral => {
                    let overlap = later.tf.min(earlier.tf) - later.tm.max(earlier.tm);
                    if overlap > OVERLAP_ROUNDING {
                        out.push(QueueViolation::LateralOverlap {
                            first: earlier.id,
                            second: later.id,
                            overlap,
                        });
                    }
                }
                _ => {}
            }
        }
    }
    out
}

/// Schedules a whole arrival sequence in order.
pub fn schedule_all(
    specs: &[VehicleSpec],
    g: &IntersectionGeometry,
) -> Result<QueueState, GeometryError> {
    let mut q = QueueState::new();
    for spec in specs {
        let s = schedule(spec, &q, g)?;
        q.push(s);
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Arm, Turn};

    fn spec(id: usize, t0: f64, v0: f64, m: &str) -> VehicleSpec {
        VehicleSpec {
            id,
            t0,
            v0,
            movement: m.parse().unwrap(),
        }
    }

    fn fixed(id: usize, m: &str, tm: f64, tf: f64, v: f64) -> Schedule {
        Schedule {
            id,
            movement: m.parse().unwrap(),
            t0: 0.0,
            v0: v,
            tm,
            tf,
            vm: v,
            vf: v,
            turn_time: tf - tm,
            predecessors: Predecessors::default(),
            binding: BindingCase::Feasibility,
        }
    }

    #[test]
    fn predecessors_by_class() {
        let g = IntersectionGeometry::default();
        let empty = QueueState::new();
        assert_eq!(
            conflict_predecessors(&spec(1, 0.0, 10.0, "W-straight"), &empty),
            Predecessors::default()
        );
        let q = schedule_all(&[spec(1, 0.0, 10.0, "W-straight")], &g).unwrap();
        let p = conflict_predecessors(&spec(2, 1.0, 10.0, "W-left"), &q);
        assert_eq!(
            p,
            Predecessors {
                s: Some(1),
                ..Default::default()
            }
        );

        let q = schedule_all(
            &[
                spec(1, 0.0, 10.0, "W-straight"),
                spec(2, 0.5, 10.0, "N-straight"),
            ],
            &g,
        )
        .unwrap();
        let p = conflict_predecessors(&spec(3, 1.0, 10.0, "W-straight"), &q);
        assert_eq!(
            p,
            Predecessors {
                s: Some(1),
                l: Some(2),
                ..Default::default()
            }
        );
    }

    #[test]
    fn feasibility_bound_cases() {
        let mut g = IntersectionGeometry::default();
        let s = spec(1, 5.0, 13.0, "W-straight");
        assert!((feasibility_bound(&s, &g) - (5.0 + 400.0 / 13.0)).abs() < 1e-12);
        let s = spec(1, 0.0, 10.0, "W-straight");
        assert!((feasibility_bound(&s, &g) - (400.0 / 13.0 + 9.0 / 78.0)).abs() < 1e-12);
        g.speed_max = 40.0;
        g.accel_max = 1.0;
        assert!((feasibility_bound(&s, &g) - 20.0).abs() < 1e-12);
    }

    #[test]
    fn lone_vehicle_cruises() {
        let mut g = IntersectionGeometry::default();
        g.speed_max = 10.0;
        let s = schedule(&spec(1, 2.0, 10.0, "E-straight"), &QueueState::new(), &g).unwrap();
        assert_eq!(s.binding, BindingCase::Feasibility);
        assert!((s.tm - 42.0).abs() < 1e-12 && (s.tf - 45.0).abs() < 1e-12);
        assert_eq!((s.vm, s.vf), (10.0, 10.0));
    }

    #[test]
    fn exit_spacing_candidate() {
        let g = IntersectionGeometry::default();
        // N-left exits east, like W-straight.
        let q = QueueState::from_schedules(vec![fixed(1, "N-left", 95.0, 100.0, 10.0)]);
        let s = schedule(&spec(2, 50.0, 10.0, "W-straight"), &q, &g).unwrap();
        assert_eq!(s.binding, BindingCase::Exit);
        assert!((s.tf - 101.0).abs() < 1e-12);
    }

    #[test]
    fn entry_spacing_reorders_short_turn() {
        let g = IntersectionGeometry::default();
        let q = QueueState::from_schedules(vec![fixed(1, "W-left", 50.0, 55.0, 8.0)]);
        let s = schedule(&spec(2, 20.0, 10.0, "W-right"), &q, &g).unwrap();
        assert_eq!(s.binding, BindingCase::Entry);
        assert!((s.tf - 55.0).abs() < 1e-12);
        assert!((s.tm - 52.0).abs() < 1e-12);
        assert!(s.tm > 50.0 + 1.25);
    }

    #[test]
    fn lateral_and_unconflicted_candidates() {
        let g = IntersectionGeometry::default();
        let q = QueueState::from_schedules(vec![fixed(1, "N-straight", 60.0, 63.0, 10.0)]);
        let s = schedule(&spec(2, 10.0, 10.0, "W-straight"), &q, &g).unwrap();
        assert_eq!(s.binding, BindingCase::Lateral);
        assert!((s.tm - 63.0).abs() < 1e-12);

        let q = QueueState::from_schedules(vec![fixed(1, "E-straight", 60.0, 63.0, 10.0)]);
        let s = schedule(&spec(2, 10.0, 10.0, "W-straight"), &q, &g).unwrap();
        assert_eq!(s.binding, BindingCase::Unconflicted);
        assert!((s.tf - 63.0).abs() < 1e-12);
    }

    #[test]
    fn audit_detects_constructed_faults() {
        let q = QueueState::from_schedules(vec![
            fixed(1, "N-straight", 60.0, 63.0, 10.0),
            fixed(2, "W-straight", 62.0, 65.0, 10.0),
        ]);
        let v = audit_queue(&q);
        assert_eq!(v.len(), 1);
        assert!(
            matches!(v[0], QueueViolation::LateralOverlap { overlap, .. } if (overlap - 1.0).abs() < 1e-12)
        );

        let q = QueueState::from_schedules(vec![
            fixed(1, "W-straight", 50.0, 53.0, 10.0),
            fixed(2, "W-left", 50.0, 55.0, 8.0),
        ]);
        assert_eq!(
            audit_queue(&q),
            vec![QueueViolation::EntryOrder {
                leader: 1,
                follower: 2
            }]
        );
    }

    #[test]
    fn scheduled_queue_is_clean() {
        let g = IntersectionGeometry::default();
        let mut specs = Vec::new();
        let mut t = 0.0;
        for i in 0..60 {
            let m = Movement::new(Arm::from_index(i * 7 % 4), Turn::ALL[i * 5 % 3]);
            specs.push(spec(i + 1, t, 10.0 + (i % 3) as f64, &m.to_string()));
            t += 0.3 + (i % 4) as f64 * 0.4;
        }
        let q = schedule_all(&specs, &g).unwrap();
        assert!(audit_queue(&q).is_empty());
    }
}
