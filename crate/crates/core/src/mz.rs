//! Merging-zone planner under three objectives: energy only, jerk only, and
//! the weighted combination of both.
//!
//! The weighted problem `½∫(α u² + β J²)` with `α = w q1`, `β = (1 − w) q2`
//! has optimal acceleration satisfying `β u'' − α u = affine(t)`. Its
//! solution is an affine term plus `cosh`/`sinh` modes at rate
//! `A = sqrt(α / β)`. The modes are stored with their low-order Taylor
//! terms removed and centred on the window midpoint, so the basis tends to
//! the jerk-optimal quintic as `A → 0` and never overflows below the
//! exponent cap as `A` grows.

use serde::{Deserialize, Serialize};

use crate::cz::LinearControl;
use crate::error::SolveError;
use crate::numeric::{cosh_m1, cosh_m2, integrate, sinh_m1, sinh_m2, solve_boundary_system};

/// Default cap on `A · Δ` for the weighted solver.
pub const DEFAULT_EXPONENT_CAP: f64 = 700.0;

/// Boundary data of a merging-zone crossing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MzBoundary {
    pub tm: f64,
    pub tf: f64,
    pub vm: f64,
    pub vf: f64,
    /// Arc-length position at entry, the control-zone length.
    pub p_start: f64,
    pub p_end: f64,
    pub u_start: f64,
    pub u_end: f64,
}

impl MzBoundary {
    pub fn duration(&self) -> f64 {
        self.tf - self.tm
    }

    fn check(&self) -> Result<(), SolveError> {
        let vals = [
            self.tm,
            self.tf,
            self.vm,
            self.vf,
            self.p_start,
            self.p_end,
            self.u_start,
            self.u_end,
        ];
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(SolveError::NonFinite);
        }
        if !(self.tf > self.tm) {
            return Err(SolveError::EmptyWindow {
                start: self.tm,
                end: self.tf,
            });
        }
        Ok(())
    }
}

/// Jerk-optimal profile: cubic acceleration, `τ = t − start`,
/// `u = aτ³/6 + bτ²/2 + cτ + d`, `v = ∫u + e`, `p = ∫v + f`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuinticProfile {
    pub start: f64,
    pub end: f64,
    pub coef: [f64; 6],
}

impl QuinticProfile {
    fn tau(&self, t: f64) -> f64 {
        t - self.start
    }

    pub fn position(&self, t: f64) -> f64 {
        let s = self.tau(t);
        let [a, b, c, d, e, f] = self.coef;
        ((((a / 120.0 * s + b / 24.0) * s + c / 6.0) * s + d / 2.0) * s + e) * s + f
    }

    pub fn speed(&self, t: f64) -> f64 {
        let s = self.tau(t);
        let [a, b, c, d, e, _] = self.coef;
        (((a / 24.0 * s + b / 6.0) * s + c / 2.0) * s + d) * s + e
    }

    pub fn control(&self, t: f64) -> f64 {
        let s = self.tau(t);
        let [a, b, c, d, ..] = self.coef;
        ((a / 6.0 * s + b / 2.0) * s + c) * s + d
    }

    pub fn jerk(&self, t: f64) -> f64 {
        let s = self.tau(t);
        let [a, b, c, ..] = self.coef;
        (a / 2.0 * s + b) * s + c
    }
}

/// Weighted-objective profile in midpoint-centred time `s = t − start − Δ/2`:
///
/// ```text
/// u = c0 + c1 s + E (cosh As − 1)/A² + F (sinh As − As)/A³
/// ```
///
/// with `v` and `p` the matching integrals and constants `v0`, `p0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightedProfile {
    pub start: f64,
    pub end: f64,
    pub w: f64,
    pub q1: f64,
    pub q2: f64,
    /// Mode rate `A = sqrt(w q1 / ((1 − w) q2))`.
    pub rate: f64,
    /// `[p0, v0, c0, c1, E, F]`.
    pub coef: [f64; 6],
}

/// The weighted solution written as affine-plus-exponential terms in
/// `τ = t − tm`:
///
/// ```text
/// u = (aτ + b)/α + e A² e^{Aτ} + f A² e^{−Aτ}
/// v = (½aτ² + bτ + c + aβ/α)/α + e A e^{Aτ} − f A e^{−Aτ}
/// p = (⅙aτ³ + ½bτ² + cτ + aβτ/α + d)/α + e e^{Aτ} + f e^{−Aτ}
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentialForm {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
    pub f: f64,
    pub rate: f64,
    pub alpha: f64,
    pub beta: f64,
    pub origin: f64,
}

impl ExponentialForm {
    pub fn control(&self, t: f64) -> f64 {
        let (tau, a) = (t - self.origin, self.rate);
        (self.a * tau + self.b) / self.alpha
            + self.e * a * a * (a * tau).exp()
            + self.f * a * a * (-a * tau).exp()
    }

    pub fn speed(&self, t: f64) -> f64 {
        let (tau, a) = (t - self.origin, self.rate);
        (0.5 * self.a * tau * tau + self.b * tau + self.c + self.a * self.beta / self.alpha)
            / self.alpha
            + self.e * a * (a * tau).exp()
            - self.f * a * (-a * tau).exp()
    }

    pub fn position(&self, t: f64) -> f64 {
        let (tau, a) = (t - self.origin, self.rate);
        (self.a * tau.powi(3) / 6.0
            + 0.5 * self.b * tau * tau
            + self.c * tau
            + self.a * self.beta / self.alpha * tau
            + self.d)
            / self.alpha
            + self.e * (a * tau).exp()
            + self.f * (-a * tau).exp()
    }

    /// Residual of `β v'' − α v + ½aτ² + bτ + c` at `t`, with `v''` supplied.
    pub fn speed_equation_residual(&self, t: f64, speed_second_derivative: f64) -> f64 {
        let tau = t - self.origin;
        self.beta * speed_second_derivative - self.alpha * self.speed(t)
            + 0.5 * self.a * tau * tau
            + self.b * tau
            + self.c
    }
}

impl WeightedProfile {
    fn half(&self) -> f64 {
        0.5 * (self.end - self.start)
    }

    fn s(&self, t: f64) -> f64 {
        t - self.start - self.half()
    }

    pub fn alpha(&self) -> f64 {
        self.w * self.q1
    }

    pub fn beta(&self) -> f64 {
        (1.0 - self.w) * self.q2
    }

    pub fn position(&self, t: f64) -> f64 {
        let (s, a) = (self.s(t), self.rate);
        let [p0, v0, c0, c1, e, f] = self.coef;
        p0 + v0 * s
            + c0 * s * s / 2.0
            + c1 * s.powi(3) / 6.0
            + e * cosh_m2(a * s) / a.powi(4)
            + f * sinh_m2(a * s) / a.powi(5)
    }

    pub fn speed(&self, t: f64) -> f64 {
        let (s, a) = (self.s(t), self.rate);
        let [_, v0, c0, c1, e, f] = self.coef;
        v0 + c0 * s
            + c1 * s * s / 2.0
            + e * sinh_m1(a * s) / a.powi(3)
            + f * cosh_m2(a * s) / a.powi(4)
    }

    pub fn control(&self, t: f64) -> f64 {
        let (s, a) = (self.s(t), self.rate);
        let [_, _, c0, c1, e, f] = self.coef;
        c0 + c1 * s + e * cosh_m1(a * s) / (a * a) + f * sinh_m1(a * s) / a.powi(3)
    }

    pub fn jerk(&self, t: f64) -> f64 {
        let (s, a) = (self.s(t), self.rate);
        let [_, _, _, c1, e, f] = self.coef;
        c1 + e * (a * s).sinh() / a + f * cosh_m1(a * s) / (a * a)
    }

    /// Time derivative of jerk.
    pub fn snap(&self, t: f64) -> f64 {
        let (s, a) = (self.s(t), self.rate);
        let [.., e, f] = self.coef;
        e * (a * s).cosh() + f * (a * s).sinh() / a
    }

    /// Rewrites the solution in affine-plus-exponential form anchored at the
    /// window start.
    pub fn exponential_form(&self) -> ExponentialForm {
        let a = self.rate;
        let m = self.half();
        let [p0, v0, c0, c1, e_amp, f_amp] = self.coef;
        let (alpha, beta) = (self.alpha(), self.beta());
        let a2 = a * a;
        let a4 = a2 * a2;
        let a5 = a4 * a;
        let grow = (-a * m).exp();
        let decay = (a * m).exp();
        let e = grow * (e_amp / (2.0 * a4) + f_amp / (2.0 * a5));
        let f = decay * (e_amp / (2.0 * a4) - f_amp / (2.0 * a5));
        // Polynomial part of p in s, then re-expanded about s = −m.
        let k0 = p0 - e_amp / a4;
        let k1 = v0 - f_amp / a4;
        let k2 = 0.5 * (c0 - e_amp / a2);
        let k3 = (c1 - f_amp / a2) / 6.0;
        let t3 = k3;
        let t2 = k2 - 3.0 * k3 * m;
        let t1 = k1 - 2.0 * k2 * m + 3.0 * k3 * m * m;
        let t0 = k0 - k1 * m + k2 * m * m - k3 * m.powi(3);
        let pa = 6.0 * alpha * t3;
        let pb = 2.0 * alpha * t2;
        let pc = alpha * t1 - pa * beta / alpha;
        let pd = alpha * t0;
        ExponentialForm {
            a: pa,
            b: pb,
            c: pc,
            d: pd,
            e,
            f,
            rate: a,
            alpha,
            beta,
            origin: self.start,
        }
    }
}

/// Which objective produced a merging-zone trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum MzTrajectory {
    FuelOnly(LinearControl),
    JerkOnly(QuinticProfile),
    Weighted(WeightedProfile),
}

impl MzTrajectory {
    pub fn window(&self) -> (f64, f64) {
        match self {
            MzTrajectory::FuelOnly(p) => (p.start, p.end),
            MzTrajectory::JerkOnly(p) => (p.start, p.end),
            MzTrajectory::Weighted(p) => (p.start, p.end),
        }
    }

    /// Objective weight on acceleration: 1, 0, or `w`.
    pub fn weight(&self) -> f64 {
        match self {
            MzTrajectory::FuelOnly(_) => 1.0,
            MzTrajectory::JerkOnly(_) => 0.0,
            MzTrajectory::Weighted(p) => p.w,
        }
    }

    pub fn variant_name(&self) -> &'static str {
        match self {
            MzTrajectory::FuelOnly(_) => "fuel",
            MzTrajectory::JerkOnly(_) => "jerk",
            MzTrajectory::Weighted(_) => "weighted",
        }
    }

    pub fn position(&self, t: f64) -> f64 {
        match self {
            MzTrajectory::FuelOnly(p) => p.position(t),
            MzTrajectory::JerkOnly(p) => p.position(t),
            MzTrajectory::Weighted(p) => p.position(t),
        }
    }

    pub fn speed(&self, t: f64) -> f64 {
        match self {
            MzTrajectory::FuelOnly(p) => p.speed(t),
            MzTrajectory::JerkOnly(p) => p.speed(t),
            MzTrajectory::Weighted(p) => p.speed(t),
        }
    }

    pub fn control(&self, t: f64) -> f64 {
        match self {
            MzTrajectory::FuelOnly(p) => p.control(t),
            MzTrajectory::JerkOnly(p) => p.control(t),
            MzTrajectory::Weighted(p) => p.control(t),
        }
    }

    pub fn jerk(&self, t: f64) -> f64 {
        match self {
            MzTrajectory::FuelOnly(p) => p.jerk(t),
            MzTrajectory::JerkOnly(p) => p.jerk(t),
            MzTrajectory::Weighted(p) => p.jerk(t),
        }
    }

    /// Largest mismatch against the boundary conditions the variant imposes
    /// (four for fuel-only, six otherwise).
    pub fn boundary_residual(&self, b: &MzBoundary) -> f64 {
        let mut r = [
            (self.position(b.tm) - b.p_start).abs(),
            (self.speed(b.tm) - b.vm).abs(),
            (self.position(b.tf) - b.p_end).abs(),
            (self.speed(b.tf) - b.vf).abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max);
        if !matches!(self, MzTrajectory::FuelOnly(_)) {
            r = r
                .max((self.control(b.tm) - b.u_start).abs())
                .max((self.control(b.tf) - b.u_end).abs());
        }
        r
    }
}

/// Minimum-jerk crossing with position, speed and acceleration fixed at
/// both ends.
pub fn solve_mz_jerk(b: &MzBoundary) -> Result<MzTrajectory, SolveError> {
    b.check()?;
    let t = b.duration();
    let (t2, t3, t4, t5) = (t * t, t.powi(3), t.powi(4), t.powi(5));
    let rows = [
        [0.0, 0.0, 0.0, 0.0, 0.0, 1.0],
        [0.0, 0.0, 0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0, 0.0, 0.0],
        [t5 / 120.0, t4 / 24.0, t3 / 6.0, t2 / 2.0, t, 1.0],
        [t4 / 24.0, t3 / 6.0, t2 / 2.0, t, 1.0, 0.0],
        [t3 / 6.0, t2 / 2.0, t, 1.0, 0.0, 0.0],
    ];
    let rhs = [b.p_start, b.vm, b.u_start, b.p_end, b.vf, b.u_end];
    let (coef, _) = solve_boundary_system(rows, rhs)?;
    Ok(MzTrajectory::JerkOnly(QuinticProfile {
        start: b.tm,
        end: b.tf,
        coef,
    }))
}

/// Minimum-energy crossing; only position and speed are imposed at the ends.
pub fn solve_mz_fuel(b: &MzBoundary) -> Result<MzTrajectory, SolveError> {
    b.check()?;
    Ok(MzTrajectory::FuelOnly(LinearControl::fit(
        b.tm, b.tf, b.p_start, b.vm, b.p_end, b.vf,
    )?))
}

/// Weighted energy/jerk crossing for `0 < w < 1` with the default exponent
/// cap.
pub fn solve_mz_weighted(
    b: &MzBoundary,
    w: f64,
    q1: f64,
    q2: f64,
) -> Result<MzTrajectory, SolveError> {
    solve_mz_weighted_capped(b, w, q1, q2, DEFAULT_EXPONENT_CAP)
}

pub fn solve_mz_weighted_capped(
    b: &MzBoundary,
    w: f64,
    q1: f64,
    q2: f64,
    exponent_cap: f64,
) -> Result<MzTrajectory, SolveError> {
    b.check()?;
    if !(w > 0.0 && w < 1.0) {
        return Err(SolveError::DegenerateWeight(w));
    }
    if !(q1 > 0.0 && q2 > 0.0 && q1.is_finite() && q2.is_finite()) {
        return Err(SolveError::BadNormalisation { q1, q2 });
    }
    let rate = ((w * q1) / ((1.0 - w) * q2)).sqrt();
    let exponent = rate * b.duration();
    if !(exponent <= exponent_cap) {
        return Err(SolveError::ExponentOverflow {
            exponent,
            cap: exponent_cap,
        });
    }
    let m = 0.5 * b.duration();
    let a = rate;
    let row = |s: f64| {
        let x = a * s;
        [
            [
                1.0,
                s,
                s * s / 2.0,
                s.powi(3) / 6.0,
                cosh_m2(x) / a.powi(4),
                sinh_m2(x) / a.powi(5),
            ],
            [
                0.0,
                1.0,
                s,
                s * s / 2.0,
                sinh_m1(x) / a.powi(3),
                cosh_m2(x) / a.powi(4),
            ],
            [
                0.0,
                0.0,
                1.0,
                s,
                cosh_m1(x) / (a * a),
                sinh_m1(x) / a.powi(3),
            ],
        ]
    };
    let [r0, r1, r2] = row(-m);
    let [r3, r4, r5] = row(m);
    let rhs = [b.p_start, b.vm, b.u_start, b.p_end, b.vf, b.u_end];
    let (coef, _) = solve_boundary_system([r0, r1, r2, r3, r4, r5], rhs)?;
    Ok(MzTrajectory::Weighted(WeightedProfile {
        start: b.tm,
        end: b.tf,
        w,
        q1,
        q2,
        rate,
        coef,
    }))
}

/// Cost functionals of a merging-zone trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MzCosts {
    /// `½∫u²`
    pub fuel: f64,
    /// `½∫J²`
    pub discomfort: f64,
    /// `w q1 · fuel + (1 − w) q2 · discomfort` with the trajectory's own `w`.
    pub weighted: f64,
}

const GL5: [(f64, f64); 5] = [
    (0.0, 0.568_888_888_888_888_9),
    (-0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (-0.906_179_845_938_664, 0.236_926_885_056_189_1),
    (0.906_179_845_938_664, 0.236_926_885_056_189_1),
];

fn gauss5(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
    h * GL5.iter().map(|&(x, w)| w * f(c + h * x)).sum::<f64>()
}

/// `½∫u²` and `½∫J²` of any trajectory over `[start, end]`.
pub fn integrate_costs(traj: &MzTrajectory) -> (f64, f64) {
    let (a, b) = traj.window();
    match traj {
        // Polynomial integrands of degree ≤ 6 are exact under 5-point
        // Gauss–Legendre.
        MzTrajectory::FuelOnly(_) | MzTrajectory::JerkOnly(_) => (
            0.5 * gauss5(|t| traj.control(t).powi(2), a, b),
            0.5 * gauss5(|t| traj.jerk(t).powi(2), a, b),
        ),
        MzTrajectory::Weighted(_) => (
            0.5 * integrate(|t| traj.control(t).powi(2), a, b, 1e-13),
            0.5 * integrate(|t| traj.jerk(t).powi(2), a, b, 1e-13),
        ),
    }
}

/// Energy, discomfort and weighted cost of `traj`.
pub fn mz_costs(traj: &MzTrajectory, q1: f64, q2: f64) -> MzCosts {
    let (fuel, discomfort) = integrate_costs(traj);
    let w = traj.weight();
    MzCosts {
        fuel,
        discomfort,
        weighted: weighted_cost(fuel, discomfort, w, q1, q2),
    }
}

/// `w q1 · fuel + (1 − w) q2 · discomfort`.
pub fn weighted_cost(fuel: f64, discomfort: f64, w: f64, q1: f64, q2: f64) -> f64 {
    w * q1 * fuel + (1.0 - w) * q2 * discomfort
}

/// Normalisation factors `q1 = 1/u_max²`, `q2 = 1/J_scale²`.
pub fn normalisation(accel_max: f64, jerk_scale: f64) -> (f64, f64) {
    (
        1.0 / (accel_max * accel_max),
        1.0 / (jerk_scale * jerk_scale),
    )
}
