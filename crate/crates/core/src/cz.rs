//! Control-zone planner: minimum-energy acceleration profile between the
//! control-zone entry and the scheduled merging-zone arrival.
//!
//! Without active bounds the optimal acceleration is affine in time, so
//! speed is quadratic and position cubic. Coefficients are stored in time
//! shifted to the window start.

use serde::{Deserialize, Serialize};

use crate::error::SolveError;
use crate::geometry::IntersectionGeometry;
use crate::numeric::{cubic_roots_in, solve_boundary_system};

/// Affine-acceleration segment `u = a τ + b`, `τ = t − start`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearControl {
    pub start: f64,
    pub end: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    /// Condition estimate of the equilibrated boundary system.
    pub condition: f64,
}

impl LinearControl {
    /// Fits position and speed at both ends of `[start, end]`.
    pub fn fit(
        start: f64,
        end: f64,
        p_start: f64,
        v_start: f64,
        p_end: f64,
        v_end: f64,
    ) -> Result<Self, SolveError> {
        if !(start.is_finite() && end.is_finite()) {
            return Err(SolveError::NonFinite);
        }
        if !(end > start) {
            return Err(SolveError::EmptyWindow { start, end });
        }
        let t = end - start;
        // unknowns (a, b, c, d)
        let rows = [
            [0.0, 0.0, 0.0, 1.0],
            [0.0, 0.0, 1.0, 0.0],
            [t * t * t / 6.0, t * t / 2.0, t, 1.0],
            [t * t / 2.0, t, 1.0, 0.0],
        ];
        let ([a, b, c, d], condition) =
            solve_boundary_system(rows, [p_start, v_start, p_end, v_end])?;
        Ok(LinearControl {
            start,
            end,
            a,
            b,
            c,
            d,
            condition,
        })
    }

    pub fn duration(&self) -> f64 {
        self.end - self.start
    }

    pub fn position(&self, t: f64) -> f64 {
        let s = t - self.start;
        ((self.a / 6.0 * s + self.b / 2.0) * s + self.c) * s + self.d
    }

    pub fn speed(&self, t: f64) -> f64 {
        let s = t - self.start;
        (self.a / 2.0 * s + self.b) * s + self.c
    }

    pub fn control(&self, t: f64) -> f64 {
        self.a * (t - self.start) + self.b
    }

    pub fn jerk(&self, _t: f64) -> f64 {
        self.a
    }

    /// `½∫u²` over the window.
    pub fn energy(&self) -> f64 {
        let t = self.duration();
        let (a, b) = (self.a, self.b);
        0.5 * (a * a * t.powi(3) / 3.0 + a * b * t * t + b * b * t)
    }

    /// Coefficients `(a, b, c, d)` of `u = a t + b`, `v = ½at² + bt + c`,
    /// `p = ⅙at³ + ½bt² + ct + d` in absolute time.
    pub fn absolute_coefficients(&self) -> [f64; 4] {
        let t0 = self.start;
        let (a, b, c, d) = (self.a, self.b, self.c, self.d);
        [
            a,
            b - a * t0,
            c - b * t0 + a * t0 * t0 / 2.0,
            d - c * t0 + b * t0 * t0 / 2.0 - a * t0.powi(3) / 6.0,
        ]
    }
}

/// Optimal control-zone trajectory of one vehicle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CzTrajectory {
    pub profile: LinearControl,
    pub v0: f64,
    pub vm: f64,
    pub length: f64,
}

/// Solves the unconstrained minimum-energy problem from `(t0, 0, v0)` to
/// `(tm, length, vm)`.
pub fn solve_cz(
    t0: f64,
    v0: f64,
    tm: f64,
    vm: f64,
    length: f64,
) -> Result<CzTrajectory, SolveError> {
    Ok(CzTrajectory {
        profile: LinearControl::fit(t0, tm, 0.0, v0, length, vm)?,
        v0,
        vm,
        length,
    })
}

impl CzTrajectory {
    pub fn t0(&self) -> f64 {
        self.profile.start
    }

    pub fn tm(&self) -> f64 {
        self.profile.end
    }

    pub fn position(&self, t: f64) -> f64 {
        self.profile.position(t)
    }

    pub fn speed(&self, t: f64) -> f64 {
        self.profile.speed(t)
    }

    pub fn control(&self, t: f64) -> f64 {
        self.profile.control(t)
    }

    pub fn cost(&self) -> f64 {
        self.profile.energy()
    }

    /// Largest boundary-condition mismatch.
    pub fn boundary_residual(&self) -> f64 {
        [
            self.position(self.t0()).abs(),
            (self.speed(self.t0()) - self.v0).abs(),
            (self.position(self.tm()) - self.length).abs(),
            (self.speed(self.tm()) - self.vm).abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// `½∫u² dt` of a control-zone trajectory.
pub fn cz_cost(traj: &CzTrajectory) -> f64 {
    traj.cost()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    SpeedBelowMin,
    SpeedAboveMax,
    ControlBelowMin,
    ControlAboveMax,
    RearEndGap,
}

/// A state or control bound broken along a trajectory. `value` is the
/// extreme value reached (the minimum gap for [`BoundKind::RearEndGap`]) and
/// `time` the instant it is attained, or for the gap the first instant the
/// gap drops below the limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundViolation {
    pub kind: BoundKind,
    pub time: f64,
    pub value: f64,
    pub limit: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub violations: Vec<BoundViolation>,
}

impl FeasibilityReport {
    pub fn is_feasible(&self) -> bool {
        self.violations.is_empty()
    }
}

const BOUND_TOL: f64 = 1e-9;
const ROOT_TOL: f64 = 1e-9;

/// Checks speed and acceleration limits, and when a same-lane `leader` is
/// given the minimum gap over the time both are in the control zone.
pub fn check_feasibility(
    traj: &CzTrajectory,
    g: &IntersectionGeometry,
    leader: Option<&CzTrajectory>,
) -> FeasibilityReport {
    let p = &traj.profile;
    let mut report = FeasibilityReport::default();
    let mut push = |kind, time, value, limit| {
        report.violations.push(BoundViolation {
            kind,
            time,
            value,
            limit,
        })
    };

    // Speed is quadratic: endpoints plus the stationary point of u = 0.
    let mut candidates = vec![p.start, p.end];
    if p.a != 0.0 {
        let t = p.start - p.b / p.a;
        if t > p.start && t < p.end {
            candidates.push(t);
        }
    }
    let speeds = candidates.iter().map(|&t| (t, p.speed(t)));
    let (t_lo, v_lo) = speeds.clone().fold(
        (p.start, f64::INFINITY),
        |m, x| if x.1 < m.1 { x } else { m },
    );
    let (t_hi, v_hi) = speeds.fold(
        (p.start, f64::NEG_INFINITY),
        |m, x| if x.1 > m.1 { x } else { m },
    );
    if v_lo < g.speed_min - BOUND_TOL {
        push(BoundKind::SpeedBelowMin, t_lo, v_lo, g.speed_min);
    }
    if v_hi > g.speed_max + BOUND_TOL {
        push(BoundKind::SpeedAboveMax, t_hi, v_hi, g.speed_max);
    }

    // Acceleration is affine: extremes at the endpoints.
    let (u0, u1) = (p.control(p.start), p.control(p.end));
    let (t_umin, u_min) = if u0 <= u1 { (p.start, u0) } else { (p.end, u1) };
    let (t_umax, u_max) = if u0 >= u1 { (p.start, u0) } else { (p.end, u1) };
    if u_min < g.accel_min - BOUND_TOL {
        push(BoundKind::ControlBelowMin, t_umin, u_min, g.accel_min);
    }
    if u_max > g.accel_max + BOUND_TOL {
        push(BoundKind::ControlAboveMax, t_umax, u_max, g.accel_max);
    }

    if let Some(k) = leader {
        if let Some((time, gap)) = rear_end_gap(traj, k, g.min_safe_distance) {
            push(BoundKind::RearEndGap, time, gap, g.min_safe_distance);
        }
    }
    report
}

/// Minimum of `p_leader − p_follower` over the common window and, if it
/// drops below `delta`, the first time it does so.
pub fn rear_end_gap(
    follower: &CzTrajectory,
    leader: &CzTrajectory,
    delta: f64,
) -> Option<(f64, f64)> {
    let lo = follower.t0().max(leader.t0());
    let hi = follower.tm().min(leader.tm());
    if hi < lo {
        return None;
    }
    // gap(t) − δ as a cubic in σ = t − lo.
    let poly = |c: &LinearControl| {
        let [a, b, cc, d] = c.absolute_coefficients();
        // p(σ + lo)
        let p0 = ((a / 6.0 * lo + b / 2.0) * lo + cc) * lo + d;
        let p1 = (a / 2.0 * lo + b) * lo + cc;
        let p2 = (a * lo + b) / 2.0;
        let p3 = a / 6.0;
        [p0, p1, p2, p3]
    };
    let (pk, pi) = (poly(&leader.profile), poly(&follower.profile));
    let coef = [
        pk[0] - pi[0] - delta,
        pk[1] - pi[1],
        pk[2] - pi[2],
        pk[3] - pi[3],
    ];
    let f = |s: f64| ((coef[3] * s + coef[2]) * s + coef[1]) * s + coef[0];
    let span = hi - lo;

    // Minimum over the window from the stationary points of the cubic.
    let mut pts = vec![0.0, span];
    let (qa, qb, qc) = (3.0 * coef[3], 2.0 * coef[2], coef[1]);
    if qa.abs() > 0.0 {
        let disc = qb * qb - 4.0 * qa * qc;
        if disc >= 0.0 {
            let r = disc.sqrt();
            pts.extend([(-qb - r) / (2.0 * qa), (-qb + r) / (2.0 * qa)]);
        }
    } else if qb.abs() > 0.0 {
        pts.push(-qc / qb);
    }
    let min_excess = pts
        .into_iter()
        .filter(|s| (0.0..=span).contains(s))
        .map(f)
        .fold(f64::INFINITY, f64::min);
    if min_excess >= -BOUND_TOL {
        return None;
    }
    let first = if f(0.0) < 0.0 {
        0.0
    } else {
        cubic_roots_in(coef, 0.0, span, ROOT_TOL)
            .into_iter()
            .find(|&s| f((s + ROOT_TOL).min(span)) < 0.0)
            .unwrap_or(0.0)
    };
    Some((lo + first, min_excess + delta))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cruise_has_zero_control() {
        let tr = solve_cz(0.0, 10.0, 40.0, 10.0, 400.0).unwrap();
        let p = tr.profile;
        assert!(p.a.abs() < 1e-14 && p.b.abs() < 1e-14);
        assert!((p.c - 10.0).abs() < 1e-12 && p.d.abs() < 1e-12);
        assert_eq!(cz_cost(&tr), 0.0);
        assert!(tr.boundary_residual() < 1e-9);
    }

    #[test]
    fn energy_closed_form() {
        let lc = LinearControl {
            start: 3.0,
            end: 5.0,
            a: 0.0,
            b: 1.0,
            c: 0.0,
            d: 0.0,
            condition: 1.0,
        };
        assert!((lc.energy() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn time_shift_invariance() {
        let a = solve_cz(0.0, 12.0, 38.0, 10.0, 400.0).unwrap();
        let b = solve_cz(1000.0, 12.0, 1038.0, 10.0, 400.0).unwrap();
        for k in 0..=38 {
            let t = k as f64;
            assert!((a.control(t) - b.control(t + 1000.0)).abs() < 1e-10);
        }
        assert!((a.cost() - b.cost()).abs() < 1e-10);
    }

    #[test]
    fn absolute_coefficients_agree() {
        let tr = solve_cz(17.0, 12.0, 55.0, 10.0, 400.0).unwrap();
        let [a, b, c, d] = tr.profile.absolute_coefficients();
        for t in [17.0, 30.0, 55.0] {
            let p = a / 6.0 * t * t * t + b / 2.0 * t * t + c * t + d;
            assert!((p - tr.position(t)).abs() < 1e-8);
            assert!((a * t + b - tr.control(t)).abs() < 1e-12);
        }
    }

    #[test]
    fn empty_window_rejected() {
        assert!(matches!(
            solve_cz(5.0, 10.0, 5.0, 10.0, 400.0),
            Err(SolveError::EmptyWindow { .. })
        ));
    }

    #[test]
    fn cruise_is_feasible() {
        let g = IntersectionGeometry::default();
        let tr = solve_cz(0.0, 10.0, 40.0, 10.0, 400.0).unwrap();
        assert!(check_feasibility(&tr, &g, None).is_feasible());
    }

    #[test]
    fn control_bound_violation_at_start() {
        let g = IntersectionGeometry::default();
        // Start and stop over a short distance: u = 4 − 2t.
        let tr = solve_cz(0.0, 0.0, 4.0, 0.0, 32.0 / 3.0).unwrap();
        assert!((tr.control(0.0) - 4.0).abs() < 1e-9);
        let r = check_feasibility(&tr, &g, None);
        let v = r
            .violations
            .iter()
            .find(|v| v.kind == BoundKind::ControlAboveMax)
            .unwrap();
        assert_eq!(v.time, 0.0);
        assert!(v.value > g.accel_max);
    }

    #[test]
    fn speed_peak_detected() {
        let g = IntersectionGeometry::default();
        let tr = solve_cz(0.0, 11.0, 31.0, 10.0, 400.0).unwrap();
        let r = check_feasibility(&tr, &g, None);
        let v = r
            .violations
            .iter()
            .find(|v| v.kind == BoundKind::SpeedAboveMax)
            .unwrap();
        assert!(v.time > 0.0 && v.time < 31.0);
        assert!((v.value - tr.speed(v.time)).abs() < 1e-12);
    }

    #[test]
    fn follower_one_gap_behind_passes() {
        let g = IntersectionGeometry::default();
        let leader = solve_cz(0.0, 10.0, 40.0, 10.0, 400.0).unwrap();
        let follower = solve_cz(1.0, 10.0, 41.0, 10.0, 400.0).unwrap();
        assert!(rear_end_gap(&follower, &leader, g.min_safe_distance).is_none());
        assert!(check_feasibility(&follower, &g, Some(&leader)).is_feasible());
        assert!((leader.position(40.0) - follower.position(40.0) - 10.0).abs() < 1e-9);

        let close = solve_cz(0.5, 10.0, 40.5, 10.0, 400.0).unwrap();
        let (t, gap) = rear_end_gap(&close, &leader, g.min_safe_distance).unwrap();
        assert!((t - 0.5).abs() < 1e-12);
        assert!((gap - 5.0).abs() < 1e-9);
    }

    #[test]
    fn gap_crossing_time_found() {
        // Leader cruises at 10, follower enters 2 s later at 12 and arrives
        // 1 s after the leader.
        let leader = solve_cz(0.0, 10.0, 40.0, 10.0, 400.0).unwrap();
        let follower = solve_cz(2.0, 12.0, 41.0, 10.0, 400.0).unwrap();
        let (t, gap) = rear_end_gap(&follower, &leader, 10.0).unwrap();
        let d = |t: f64| leader.position(t) - follower.position(t);
        assert!(gap < 10.0);
        assert!((d(t) - 10.0).abs() < 1e-6, "gap at crossing {}", d(t));
        assert!(d(t - 1e-3) >= 10.0 - 1e-9);
    }
}
