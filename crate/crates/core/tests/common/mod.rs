//! Independent numerical references used by the integration tests. None of
//! these call the crate's solvers.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};

/// Minimum-energy piecewise-constant control on `n` equal segments driving
/// `(p, v)` from `(0, v0)` to `(length, vm)` over `duration`.
/// Returns `½∫u²` and the segment controls.
pub fn fuel_transcription(
    v0: f64,
    duration: f64,
    vm: f64,
    length: f64,
    n: usize,
) -> (f64, Vec<f64>) {
    let h = duration / n as f64;
    // v(T) = v0 + h Σ u_k ;  p(T) = v0 T + Σ u_k h (T − t_k − h/2)
    let a_v: Vec<f64> = vec![h; n];
    let a_p: Vec<f64> = (0..n)
        .map(|k| h * (duration - k as f64 * h - 0.5 * h))
        .collect();
    let r = [vm - v0, length - v0 * duration];
    // Minimum of ½ h Σ u² subject to A u = r is u = Aᵀ λ / h.
    let dot = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>();
    let g = [
        [dot(&a_v, &a_v), dot(&a_v, &a_p)],
        [dot(&a_p, &a_v), dot(&a_p, &a_p)],
    ];
    let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
    let lam = [
        (r[0] * g[1][1] - r[1] * g[0][1]) / det * h,
        (g[0][0] * r[1] - g[1][0] * r[0]) / det * h,
    ];
    let u: Vec<f64> = (0..n)
        .map(|k| (lam[0] * a_v[k] + lam[1] * a_p[k]) / h)
        .collect();
    let cost = 0.5 * h * u.iter().map(|x| x * x).sum::<f64>();
    (cost, u)
}

/// Boundary data of a merging-zone problem in local time `[0, duration]`.
#[derive(Debug, Clone, Copy)]
pub struct Bvp {
    pub duration: f64,
    pub v0: f64,
    pub u0: f64,
    pub distance: f64,
    pub vf: f64,
    pub uf: f64,
}

/// Discretised `½∫(α u² + β J²)` over piecewise-constant jerk, with
/// piecewise-linear control integrated exactly. Solved through the KKT
/// system. Returns `(½∫u², ½∫J², u at the n+1 nodes)`.
pub fn weighted_qp(b: &Bvp, alpha: f64, beta: f64, n: usize) -> (f64, f64, Vec<f64>) {
    let h = b.duration / n as f64;
    // u_k = u0 + h Σ_{j<k} J_j  ⇒  u = u0·1 + M J
    let m = DMatrix::from_fn(n + 1, n, |k, j| if j < k { h } else { 0.0 });
    // ∫u² = uᵀ Q u for piecewise-linear u
    let mut q = DMatrix::zeros(n + 1, n + 1);
    for k in 0..n {
        q[(k, k)] += h / 3.0;
        q[(k + 1, k + 1)] += h / 3.0;
        q[(k, k + 1)] += h / 6.0;
        q[(k + 1, k)] += h / 6.0;
    }
    // v(T) − v0 = cv · u ;  p(T) − v0 T = cp · u
    let mut cv = DVector::zeros(n + 1);
    let mut cp = DVector::zeros(n + 1);
    for k in 0..n {
        let rem = b.duration - k as f64 * h;
        cv[k] += 0.5 * h;
        cv[k + 1] += 0.5 * h;
        cp[k] += h * (0.5 * rem) - h * h / 6.0;
        cp[k + 1] += h * (0.5 * rem) - h * h / 3.0;
    }
    let ones = DVector::from_element(n + 1, 1.0);
    let u0 = &ones * b.u0;
    let hess = (m.transpose() * &q * &m) * alpha + DMatrix::identity(n, n) * (beta * h);
    let grad = (m.transpose() * &q * &u0) * alpha;
    let mut c = DMatrix::zeros(3, n);
    let mut d = DVector::zeros(3);
    // terminal control
    for j in 0..n {
        c[(0, j)] = h;
    }
    d[0] = b.uf - b.u0;
    let row_v = cv.transpose() * &m;
    let row_p = cp.transpose() * &m;
    for j in 0..n {
        c[(1, j)] = row_v[j];
        c[(2, j)] = row_p[j];
    }
    d[1] = b.vf - b.v0 - (cv.transpose() * &u0)[0];
    d[2] = b.distance - b.v0 * b.duration - (cp.transpose() * &u0)[0];
    let mut kkt = DMatrix::zeros(n + 3, n + 3);
    kkt.view_mut((0, 0), (n, n)).copy_from(&hess);
    kkt.view_mut((0, n), (n, 3)).copy_from(&c.transpose());
    kkt.view_mut((n, 0), (3, n)).copy_from(&c);
    let mut rhs = DVector::zeros(n + 3);
    rhs.rows_mut(0, n).copy_from(&(-grad));
    rhs.rows_mut(n, 3).copy_from(&d);
    let sol = kkt.lu().solve(&rhs).expect("KKT system solvable");
    let jerk = sol.rows(0, n).into_owned();
    let u = &u0 + &m * &jerk;
    let fuel = 0.5 * (u.transpose() * &q * &u)[0];
    let discomfort = 0.5 * h * jerk.norm_squared();
    (fuel, discomfort, u.iter().copied().collect())
}

/// Minimum-jerk reference: the weighted QP with no control penalty.
pub fn jerk_qp(b: &Bvp, n: usize) -> f64 {
    weighted_qp(b, 0.0, 1.0, n).1
}

/// Earliest arrival at distance `length` under full acceleration capped at
/// `vmax`, by event stepping and bisection. Returns the elapsed time and
/// whether the cap was reached.
pub fn bang_cruise_arrival(v0: f64, length: f64, vmax: f64, umax: f64) -> (f64, bool) {
    let t_cap = (vmax - v0) / umax;
    let d_cap = v0 * t_cap + 0.5 * umax * t_cap * t_cap;
    if d_cap <= length {
        return (t_cap + (length - d_cap) / vmax, true);
    }
    let pos = |t: f64| v0 * t + 0.5 * umax * t * t;
    let (mut lo, mut hi) = (0.0, t_cap);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if pos(mid) < length {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (0.5 * (lo + hi), false)
}

/// Composite Simpson rule on `n` (even) intervals.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for k in 1..n {
        s += f(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

/// Headings into the intersection, indexed N, E, S, W.
fn inbound_heading(arm: usize) -> [f64; 2] {
    [[0.0, -1.0], [-1.0, 0.0], [0.0, 1.0], [1.0, 0.0]][arm]
}

fn right_of(h: [f64; 2]) -> [f64; 2] {
    [h[1], -h[0]]
}

fn left_of(h: [f64; 2]) -> [f64; 2] {
    [-h[1], h[0]]
}

/// Arm a vehicle leaves by when moving along heading `h`.
fn arm_of_outbound(h: [f64; 2]) -> usize {
    match (h[0].round() as i32, h[1].round() as i32) {
        (0, 1) => 0,
        (1, 0) => 1,
        (0, -1) => 2,
        (-1, 0) => 3,
        _ => unreachable!(),
    }
}

/// Right-hand traffic, one lane per direction at a quarter of the side
/// from the centreline. `turn` is 0 left, 1 straight, 2 right. Returns the
/// exit arm and `samples + 1` points along the path.
pub fn sampled_path(arm: usize, turn: usize, side: f64, samples: usize) -> (usize, Vec<[f64; 2]>) {
    let h = inbound_heading(arm);
    let r = right_of(h);
    let entry = [
        -0.5 * side * h[0] + 0.25 * side * r[0],
        -0.5 * side * h[1] + 0.25 * side * r[1],
    ];
    let out = match turn {
        0 => left_of(h),
        1 => h,
        _ => right_of(h),
    };
    let ro = right_of(out);
    let exit = [
        0.5 * side * out[0] + 0.25 * side * ro[0],
        0.5 * side * out[1] + 0.25 * side * ro[1],
    ];
    let pts = if turn == 1 {
        (0..=samples)
            .map(|k| {
                let s = k as f64 / samples as f64;
                [
                    entry[0] + s * (exit[0] - entry[0]),
                    entry[1] + s * (exit[1] - entry[1]),
                ]
            })
            .collect()
    } else {
        let radius =
            ((entry[0] - exit[0]).powi(2) + (entry[1] - exit[1]).powi(2)).sqrt() / 2f64.sqrt();
        let n = if turn == 0 { left_of(h) } else { right_of(h) };
        let c = [entry[0] + radius * n[0], entry[1] + radius * n[1]];
        (0..=samples)
            .map(|k| {
                let th = std::f64::consts::FRAC_PI_2 * k as f64 / samples as f64;
                [
                    c[0] - radius * th.cos() * n[0] + radius * th.sin() * h[0],
                    c[1] - radius * th.cos() * n[1] + radius * th.sin() * h[1],
                ]
            })
            .collect()
    };
    (arm_of_outbound(out), pts)
}

pub fn polyline_length(p: &[[f64; 2]]) -> f64 {
    p.windows(2)
        .map(|w| ((w[1][0] - w[0][0]).powi(2) + (w[1][1] - w[0][1]).powi(2)).sqrt())
        .sum()
}

fn segments_cross(a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2]) -> bool {
    let orient = |p: [f64; 2], q: [f64; 2], r: [f64; 2]| {
        (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])
    };
    let (d1, d2) = (orient(c, d, a), orient(c, d, b));
    let (d3, d4) = (orient(a, b, c), orient(a, b, d));
    d1 * d2 <= 0.0 && d3 * d4 <= 0.0
}

/// Whether two sampled paths touch anywhere.
pub fn polylines_cross(p: &[[f64; 2]], q: &[[f64; 2]]) -> bool {
    p.windows(2)
        .any(|s| q.windows(2).any(|t| segments_cross(s[0], s[1], t[0], t[1])))
}

/// Central finite difference.
pub fn derivative(f: impl Fn(f64) -> f64, t: f64, h: f64) -> f64 {
    (f(t + h) - f(t - h)) / (2.0 * h)
}

/// Five-point central difference, fourth order.
pub fn derivative5(f: impl Fn(f64) -> f64, t: f64, h: f64) -> f64 {
    (f(t - 2.0 * h) - 8.0 * f(t - h) + 8.0 * f(t + h) - f(t + 2.0 * h)) / (12.0 * h)
}
