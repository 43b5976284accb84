//! Intersection layout, movements and pairwise conflict classification.
//!
//! The merging zone is the square `[-S/2, S/2]²` centred on the origin with
//! north along `+y`. Traffic keeps right and every approach has a single
//! inbound lane whose centreline sits a quarter of the side away from the
//! road axis. Through movements are straight segments; turns are quarter
//! circles anchored at the square's corners with radius `3S/4` (left) and
//! `S/4` (right), so their arc lengths are `3πS/8` and `πS/8`.
//!
//! | entry | left  | straight | right |
//! |-------|-------|----------|-------|
//! | N     | E     | S        | W     |
//! | E     | S     | W        | N     |
//! | S     | W     | N        | E     |
//! | W     | N     | E        | S     |

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::GeometryError;

/// One of the four approaches, indexed clockwise from north.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Arm {
    North,
    East,
    South,
    West,
}

impl Arm {
    pub const ALL: [Arm; 4] = [Arm::North, Arm::East, Arm::South, Arm::West];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Arm {
        Arm::ALL[i % 4]
    }

    pub fn letter(self) -> char {
        match self {
            Arm::North => 'N',
            Arm::East => 'E',
            Arm::South => 'S',
            Arm::West => 'W',
        }
    }
}

impl fmt::Display for Arm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

impl FromStr for Arm {
    type Err = GeometryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "n" | "north" => Ok(Arm::North),
            "e" | "east" => Ok(Arm::East),
            "s" | "south" => Ok(Arm::South),
            "w" | "west" => Ok(Arm::West),
            _ => Err(GeometryError::Parse(format!("unknown arm `{s}`"))),
        }
    }
}

/// Turn decision; the discriminant is the conventional `d_i` code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Turn {
    Left = 0,
    Straight = 1,
    Right = 2,
}

impl Turn {
    pub const ALL: [Turn; 3] = [Turn::Left, Turn::Straight, Turn::Right];

    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn name(self) -> &'static str {
        match self {
            Turn::Left => "left",
            Turn::Straight => "straight",
            Turn::Right => "right",
        }
    }
}

impl fmt::Display for Turn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Turn {
    type Err = GeometryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "0" | "l" | "left" => Ok(Turn::Left),
            "1" | "s" | "straight" | "through" => Ok(Turn::Straight),
            "2" | "r" | "right" => Ok(Turn::Right),
            _ => Err(GeometryError::Parse(format!("unknown turn `{s}`"))),
        }
    }
}

/// A path through the intersection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Movement {
    pub entry: Arm,
    pub turn: Turn,
}

impl Movement {
    pub fn new(entry: Arm, turn: Turn) -> Self {
        Movement { entry, turn }
    }

    /// All twelve movements of a four-arm layout.
    pub fn all() -> impl Iterator<Item = Movement> {
        Arm::ALL
            .into_iter()
            .flat_map(|a| Turn::ALL.into_iter().map(move |t| Movement::new(a, t)))
    }

    pub fn exit(self) -> Arm {
        let offset = match self.turn {
            Turn::Left => 1,
            Turn::Straight => 2,
            Turn::Right => 3,
        };
        Arm::from_index(self.entry.index() + offset)
    }

    /// Centreline of the movement inside a merging zone of side `side`.
    pub fn curve(self, side: f64) -> PathCurve {
        let h = side / 2.0;
        let q = side / 4.0;
        // Built for the west approach (heading east) and rotated clockwise.
        let base = match self.turn {
            Turn::Straight => PathCurve::Segment {
                from: [-h, -q],
                to: [h, -q],
            },
            Turn::Right => PathCurve::Arc {
                center: [-h, -h],
                radius: q,
                start: FRAC_PI_2,
                sweep: -FRAC_PI_2,
            },
            Turn::Left => PathCurve::Arc {
                center: [-h, h],
                radius: 3.0 * q,
                start: -FRAC_PI_2,
                sweep: FRAC_PI_2,
            },
        };
        base.rotated_cw((self.entry.index() + 1) % 4)
    }
}

impl fmt::Display for Movement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.entry, self.turn)
    }
}

impl FromStr for Movement {
    type Err = GeometryError;

    /// Parses `W-left`, `west:straight`, `N/r` and similar.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut parts = s.split(['-', ':', '/', ' ']).filter(|p| !p.is_empty());
        let (Some(a), Some(t), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(GeometryError::Parse(format!(
                "movement `{s}` must look like `W-left`"
            )));
        };
        Ok(Movement::new(a.parse()?, t.parse()?))
    }
}

/// Planar centreline primitive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PathCurve {
    Segment {
        from: [f64; 2],
        to: [f64; 2],
    },
    /// `start` is the polar angle of the first point about `center`, `sweep`
    /// the signed angle travelled.
    Arc {
        center: [f64; 2],
        radius: f64,
        start: f64,
        sweep: f64,
    },
}

fn rot_cw(p: [f64; 2], quarter_turns: usize) -> [f64; 2] {
    (0..quarter_turns).fold(p, |[x, y], _| [y, -x])
}

fn wrap(angle: f64) -> f64 {
    (angle + PI).rem_euclid(TAU) - PI
}

impl PathCurve {
    fn rotated_cw(self, quarter_turns: usize) -> PathCurve {
        match self {
            PathCurve::Segment { from, to } => PathCurve::Segment {
                from: rot_cw(from, quarter_turns),
                to: rot_cw(to, quarter_turns),
            },
            PathCurve::Arc {
                center,
                radius,
                start,
                sweep,
            } => PathCurve::Arc {
                center: rot_cw(center, quarter_turns),
                radius,
                start: wrap(start - FRAC_PI_2 * quarter_turns as f64),
                sweep,
            },
        }
    }

    pub fn length(&self) -> f64 {
        match *self {
            PathCurve::Segment { from, to } => (to[0] - from[0]).hypot(to[1] - from[1]),
            PathCurve::Arc { radius, sweep, .. } => radius * sweep.abs(),
        }
    }

    /// Point at normalised parameter `s ∈ [0, 1]`.
    pub fn point_at(&self, s: f64) -> [f64; 2] {
        match *self {
            PathCurve::Segment { from, to } => [
                from[0] + s * (to[0] - from[0]),
                from[1] + s * (to[1] - from[1]),
            ],
            PathCurve::Arc {
                center,
                radius,
                start,
                sweep,
            } => {
                let a = start + s * sweep;
                [center[0] + radius * a.cos(), center[1] + radius * a.sin()]
            }
        }
    }

    fn contains_angle(&self, angle: f64, eps: f64) -> bool {
        let PathCurve::Arc { start, sweep, .. } = *self else {
            return false;
        };
        let d = if sweep >= 0.0 {
            (angle - start).rem_euclid(TAU)
        } else {
            (start - angle).rem_euclid(TAU)
        };
        d <= sweep.abs() + eps || d >= TAU - eps
    }

    /// Whether two centrelines share at least one point (tolerance `eps` in
    /// metres).
    pub fn intersects(&self, other: &PathCurve, eps: f64) -> bool {
        use PathCurve::*;
        match (self, other) {
            (Segment { from: a0, to: a1 }, Segment { from: b0, to: b1 }) => {
                segments_intersect(*a0, *a1, *b0, *b1, eps)
            }
            (Segment { from, to }, arc @ Arc { .. }) | (arc @ Arc { .. }, Segment { from, to }) => {
                segment_arc_intersect(*from, *to, arc, eps)
            }
            (a @ Arc { .. }, b @ Arc { .. }) => arcs_intersect(a, b, eps),
        }
    }
}

fn cross(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn sub(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    [a[0] - b[0], a[1] - b[1]]
}

fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn segments_intersect(p0: [f64; 2], p1: [f64; 2], q0: [f64; 2], q1: [f64; 2], eps: f64) -> bool {
    let r = sub(p1, p0);
    let s = sub(q1, q0);
    let denom = cross(r, s);
    let qp = sub(q0, p0);
    if denom.abs() <= eps * eps {
        // Parallel: they meet only if collinear with overlapping projections.
        if cross(qp, r).abs() > eps * r[0].hypot(r[1]) {
            return false;
        }
        let rr = dot(r, r);
        let t0 = dot(qp, r) / rr;
        let t1 = dot(sub(q1, p0), r) / rr;
        let (lo, hi) = if t0 <= t1 { (t0, t1) } else { (t1, t0) };
        return hi >= -eps && lo <= 1.0 + eps;
    }
    let t = cross(qp, s) / denom;
    let u = cross(qp, r) / denom;
    (-eps..=1.0 + eps).contains(&t) && (-eps..=1.0 + eps).contains(&u)
}

fn segment_arc_intersect(p0: [f64; 2], p1: [f64; 2], arc: &PathCurve, eps: f64) -> bool {
    let PathCurve::Arc { center, radius, .. } = *arc else {
        unreachable!()
    };
    let d = sub(p1, p0);
    let f = sub(p0, center);
    let a = dot(d, d);
    let b = 2.0 * dot(f, d);
    let c = dot(f, f) - radius * radius;
    let disc = b * b - 4.0 * a * c;
    if disc < -eps {
        return false;
    }
    let root = disc.max(0.0).sqrt();
    [(-b - root) / (2.0 * a), (-b + root) / (2.0 * a)]
        .into_iter()
        .filter(|t| (-eps..=1.0 + eps).contains(t))
        .any(|t| {
            let p = [p0[0] + t * d[0], p0[1] + t * d[1]];
            let ang = (p[1] - center[1]).atan2(p[0] - center[0]);
            arc.contains_angle(ang, eps / radius)
        })
}

fn arcs_intersect(a: &PathCurve, b: &PathCurve, eps: f64) -> bool {
    let (
        PathCurve::Arc {
            center: c0,
            radius: r0,
            ..
        },
        PathCurve::Arc {
            center: c1,
            radius: r1,
            ..
        },
    ) = (*a, *b)
    else {
        unreachable!()
    };
    let dv = sub(c1, c0);
    let d = dv[0].hypot(dv[1]);
    if d <= eps {
        if (r0 - r1).abs() > eps {
            return false;
        }
        // Same circle: overlap if either arc contains an endpoint of the other.
        let ends = |arc: &PathCurve| match *arc {
            PathCurve::Arc { start, sweep, .. } => [start, start + sweep],
            _ => unreachable!(),
        };
        return ends(b).iter().any(|&t| a.contains_angle(t, eps / r0))
            || ends(a).iter().any(|&t| b.contains_angle(t, eps / r1));
    }
    if d > r0 + r1 + eps || d < (r0 - r1).abs() - eps {
        return false;
    }
    let along = (r0 * r0 - r1 * r1 + d * d) / (2.0 * d);
    let h = (r0 * r0 - along * along).max(0.0).sqrt();
    let ux = [dv[0] / d, dv[1] / d];
    let base = [c0[0] + along * ux[0], c0[1] + along * ux[1]];
    [1.0, -1.0].into_iter().any(|sgn| {
        let p = [base[0] - sgn * h * ux[1], base[1] + sgn * h * ux[0]];
        let t0 = (p[1] - c0[1]).atan2(p[0] - c0[0]);
        let t1 = (p[1] - c1[1]).atan2(p[0] - c1[0]);
        a.contains_angle(t0, eps / r0) && b.contains_angle(t1, eps / r1)
    })
}

/// Pairwise relation between the movements of two vehicles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ConflictClass {
    /// Same approach lane; may collide at the merging-zone entry.
    SameEntry,
    /// Same exit lane from different approaches; may collide at the exit.
    SameExit,
    /// Crossing paths inside the merging zone.
    Lateral,
    NoConflict,
}

impl ConflictClass {
    pub const ALL: [ConflictClass; 4] = [
        ConflictClass::SameExit,
        ConflictClass::SameEntry,
        ConflictClass::Lateral,
        ConflictClass::NoConflict,
    ];

    /// Conventional one-letter set name (`e`, `s`, `l`, `o`).
    pub fn letter(self) -> char {
        match self {
            ConflictClass::SameExit => 'e',
            ConflictClass::SameEntry => 's',
            ConflictClass::Lateral => 'l',
            ConflictClass::NoConflict => 'o',
        }
    }
}

/// Classifies a pair of movements. Entry equality wins over exit equality,
/// which wins over geometric crossing.
pub fn classify(a: Movement, b: Movement) -> ConflictClass {
    if a.entry == b.entry {
        ConflictClass::SameEntry
    } else if a.exit() == b.exit() {
        ConflictClass::SameExit
    } else if a.curve(1.0).intersects(&b.curve(1.0), 1e-9) {
        ConflictClass::Lateral
    } else {
        ConflictClass::NoConflict
    }
}

/// How the merging-zone traversal time of each movement is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum TurnTimes {
    /// Fixed times in seconds.
    Table {
        left: f64,
        straight: f64,
        right: f64,
    },
    /// Design-speed formula for turns, `S / v^a` for through traffic.
    ///
    /// Radii are given in metres and converted to feet; the design speed
    /// `sqrt(15 R (0.01 E + F))` comes out in mph and is converted to m/s
    /// before the turn time `R / v` is formed.
    Formula {
        left_radius: f64,
        right_radius: f64,
        side_friction: f64,
        #[serde(default)]
        superelevation: f64,
    },
}

const FEET_PER_METRE: f64 = 1.0 / 0.3048;
const MPS_PER_MPH: f64 = 0.44704;

/// Design turning speed in m/s for a centreline radius in metres.
pub fn design_turn_speed(
    radius: f64,
    side_friction: f64,
    superelevation: f64,
) -> Result<f64, GeometryError> {
    let grip = 0.01 * superelevation + side_friction;
    if !(radius > 0.0) {
        return Err(GeometryError::invalid(
            "turn_times.radius",
            "must be positive",
        ));
    }
    if !(grip > 0.0) {
        return Err(GeometryError::invalid(
            "turn_times.side_friction",
            "0.01 E + F must be positive",
        ));
    }
    Ok((15.0 * radius * FEET_PER_METRE * grip).sqrt() * MPS_PER_MPH)
}

/// Control-zone and merging-zone dimensions plus kinematic limits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntersectionGeometry {
    /// Distance from control-zone entry to merging-zone entry (m).
    pub control_zone_length: f64,
    /// Side of the square merging zone (m).
    pub merging_zone_side: f64,
    pub left_path_length: f64,
    pub right_path_length: f64,
    pub min_safe_distance: f64,
    pub speed_min: f64,
    pub speed_max: f64,
    pub accel_min: f64,
    pub accel_max: f64,
    /// Maximal allowable merging-zone speeds (m/s).
    pub speed_straight: f64,
    pub speed_left: f64,
    pub speed_right: f64,
    pub turn_times: TurnTimes,
}

impl Default for IntersectionGeometry {
    /// Single-lane intersection with L = 400 m, S = 30 m, δ = 10 m,
    /// merging-zone speeds 8/10/6 m/s and turn times 5/3/3 s.
    fn default() -> Self {
        IntersectionGeometry::square(400.0, 30.0)
    }
}

impl IntersectionGeometry {
    /// Reference layout with arc path lengths derived from `side`.
    pub fn square(control_zone_length: f64, side: f64) -> Self {
        IntersectionGeometry {
            control_zone_length,
            merging_zone_side: side,
            left_path_length: 3.0 * PI * side / 8.0,
            right_path_length: PI * side / 8.0,
            min_safe_distance: 10.0,
            speed_min: 0.0,
            speed_max: 13.0,
            accel_min: -3.0,
            accel_max: 3.0,
            speed_straight: 10.0,
            speed_left: 8.0,
            speed_right: 6.0,
            turn_times: TurnTimes::Table {
                left: 5.0,
                straight: 3.0,
                right: 3.0,
            },
        }
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        use GeometryError as E;
        let finite = [
            ("control_zone_length", self.control_zone_length),
            ("merging_zone_side", self.merging_zone_side),
            ("left_path_length", self.left_path_length),
            ("right_path_length", self.right_path_length),
            ("min_safe_distance", self.min_safe_distance),
            ("speed_min", self.speed_min),
            ("speed_max", self.speed_max),
            ("accel_min", self.accel_min),
            ("accel_max", self.accel_max),
            ("speed_straight", self.speed_straight),
            ("speed_left", self.speed_left),
            ("speed_right", self.speed_right),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return Err(E::invalid(name, "must be finite"));
            }
        }
        if !(self.merging_zone_side > 0.0) {
            return Err(E::invalid("merging_zone_side", "must be positive"));
        }
        if !(self.control_zone_length > self.merging_zone_side) {
            return Err(E::invalid(
                "control_zone_length",
                "must exceed merging_zone_side",
            ));
        }
        if !(self.left_path_length > 0.0) {
            return Err(E::invalid("left_path_length", "must be positive"));
        }
        if !(self.right_path_length > 0.0) {
            return Err(E::invalid("right_path_length", "must be positive"));
        }
        if !(self.min_safe_distance > 0.0) {
            return Err(E::invalid("min_safe_distance", "must be positive"));
        }
        if !(self.speed_min >= 0.0 && self.speed_min < self.speed_max) {
            return Err(E::invalid("speed_min", "need 0 <= speed_min < speed_max"));
        }
        if !(self.accel_min < 0.0) {
            return Err(E::invalid("accel_min", "must be negative"));
        }
        if !(self.accel_max > 0.0) {
            return Err(E::invalid("accel_max", "must be positive"));
        }
        for (name, v) in [
            ("speed_straight", self.speed_straight),
            ("speed_left", self.speed_left),
            ("speed_right", self.speed_right),
        ] {
            if !(v > self.speed_min && v <= self.speed_max) {
                return Err(E::invalid(name, "must lie in (speed_min, speed_max]"));
            }
        }
        match self.turn_times {
            TurnTimes::Table {
                left,
                straight,
                right,
            } => {
                for (name, v) in [
                    ("turn_times.left", left),
                    ("turn_times.straight", straight),
                    ("turn_times.right", right),
                ] {
                    if !(v > 0.0 && v.is_finite()) {
                        return Err(E::invalid(name, "must be positive"));
                    }
                }
            }
            TurnTimes::Formula {
                left_radius,
                right_radius,
                side_friction,
                superelevation,
            } => {
                design_turn_speed(left_radius, side_friction, superelevation)?;
                design_turn_speed(right_radius, side_friction, superelevation)?;
            }
        }
        Ok(())
    }

    /// Arc length of the movement's merging-zone path.
    pub fn path_length(&self, m: Movement) -> f64 {
        match m.turn {
            Turn::Left => self.left_path_length,
            Turn::Straight => self.merging_zone_side,
            Turn::Right => self.right_path_length,
        }
    }

    /// Scheduled merging-zone traversal time `Δ_i`.
    pub fn turn_time(&self, m: Movement) -> Result<f64, GeometryError> {
        match self.turn_times {
            TurnTimes::Table {
                left,
                straight,
                right,
            } => Ok(match m.turn {
                Turn::Left => left,
                Turn::Straight => straight,
                Turn::Right => right,
            }),
            TurnTimes::Formula {
                left_radius,
                right_radius,
                side_friction,
                superelevation,
            } => {
                match m.turn {
                    Turn::Straight => Ok(self.merging_zone_side / self.speed_straight),
                    Turn::Left => Ok(left_radius
                        / design_turn_speed(left_radius, side_friction, superelevation)?),
                    Turn::Right => Ok(right_radius
                        / design_turn_speed(right_radius, side_friction, superelevation)?),
                }
            }
        }
    }

    /// Terminal speed at both merging-zone boundaries (`v_i^m = v_i^f`).
    pub fn mz_exit_speed(&self, m: Movement) -> f64 {
        match m.turn {
            Turn::Left => self.speed_left,
            Turn::Straight => self.speed_straight,
            Turn::Right => self.speed_right,
        }
    }

    /// Speed used to convert a distance travelled inside the merging zone
    /// into time. Equals [`mz_exit_speed`](Self::mz_exit_speed) with tabulated
    /// turn times and the design turning speed in formula mode.
    pub fn mz_travel_speed(&self, m: Movement) -> Result<f64, GeometryError> {
        match (self.turn_times, m.turn) {
            (TurnTimes::Table { .. }, _) | (_, Turn::Straight) => Ok(self.mz_exit_speed(m)),
            (
                TurnTimes::Formula {
                    left_radius,
                    side_friction,
                    superelevation,
                    ..
                },
                Turn::Left,
            ) => design_turn_speed(left_radius, side_friction, superelevation),
            (
                TurnTimes::Formula {
                    right_radius,
                    side_friction,
                    superelevation,
                    ..
                },
                Turn::Right,
            ) => design_turn_speed(right_radius, side_friction, superelevation),
        }
    }
}
