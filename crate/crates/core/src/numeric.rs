//! Small numerical kernels shared by the planners.

use nalgebra::{DMatrix, DVector};

use crate::error::SolveError;

/// Largest acceptable condition estimate of an equilibrated boundary system.
pub const MAX_CONDITION: f64 = 1e13;

/// Solves a square boundary-value system after row and column
/// equilibration. Returns the solution and the condition estimate of the
/// equilibrated matrix.
pub fn solve_boundary_system<const N: usize>(
    rows: [[f64; N]; N],
    rhs: [f64; N],
) -> Result<([f64; N], f64), SolveError> {
    if rows
        .iter()
        .flatten()
        .chain(rhs.iter())
        .any(|v| !v.is_finite())
    {
        return Err(SolveError::NonFinite);
    }
    let mut a = DMatrix::<f64>::from_fn(N, N, |r, c| rows[r][c]);
    let mut b = DVector::<f64>::from_fn(N, |r, _| rhs[r]);
    let mut col_scale = [1.0; N];
    for c in 0..N {
        let m = a.column(c).amax();
        if m > 0.0 {
            col_scale[c] = 1.0 / m;
            a.column_mut(c).scale_mut(col_scale[c]);
        }
    }
    for r in 0..N {
        let m = a.row(r).amax();
        if m > 0.0 {
            a.row_mut(r).scale_mut(1.0 / m);
            b[r] /= m;
        }
    }
    let sv = a.singular_values();
    let smax = sv.max();
    let smin = sv.min();
    let condition = if smin > 0.0 {
        smax / smin
    } else {
        f64::INFINITY
    };
    if !(condition < MAX_CONDITION) {
        return Err(SolveError::Singular { condition });
    }
    let x = a.lu().solve(&b).ok_or(SolveError::Singular { condition })?;
    let mut out = [0.0; N];
    for i in 0..N {
        out[i] = x[i] * col_scale[i];
    }
    Ok((out, condition))
}

/// Real roots of `c3 x³ + c2 x² + c1 x + c0` inside `[lo, hi]`, ascending.
///
/// Uses the trigonometric/Cardano closed form and polishes with Newton
/// steps; falls back to bisection on monotone brackets when the closed form
/// is degenerate or its roots fail the residual check.
pub fn cubic_roots_in(coef: [f64; 4], lo: f64, hi: f64, tol: f64) -> Vec<f64> {
    let [c0, c1, c2, c3] = coef;
    let f = |x: f64| ((c3 * x + c2) * x + c1) * x + c0;
    let scale = coef.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(1e-300);
    let span = (hi - lo).abs().max(1.0);
    if c3.abs() > 1e-12 * scale {
        if let Some(roots) = closed_form_cubic(c3, c2, c1, c0) {
            let fp = |x: f64| (3.0 * c3 * x + 2.0 * c2) * x + c1;
            let mut polished: Vec<f64> = roots
                .into_iter()
                .map(|mut x| {
                    for _ in 0..4 {
                        let d = fp(x);
                        if d == 0.0 {
                            break;
                        }
                        let step = f(x) / d;
                        x -= step;
                        if step.abs() < tol * 1e-3 {
                            break;
                        }
                    }
                    x
                })
                .collect();
            let mag =
                |x: f64| (c3 * x.powi(3)).abs() + (c2 * x * x).abs() + (c1 * x).abs() + c0.abs();
            if polished
                .iter()
                .all(|&x| f(x).abs() <= 1e-9 * mag(x).max(1e-300) * span)
            {
                polished.retain(|&x| x >= lo - tol && x <= hi + tol);
                polished.sort_by(f64::total_cmp);
                polished.dedup_by(|a, b| (*a - *b).abs() <= tol);
                return polished;
            }
        }
    }
    bracket_roots(f, [c1, 2.0 * c2, 3.0 * c3], lo, hi, tol)
}

fn closed_form_cubic(a: f64, b: f64, c: f64, d: f64) -> Option<Vec<f64>> {
    let (b, c, d) = (b / a, c / a, d / a);
    // x = y - b/3: y³ + p y + q = 0
    let p = c - b * b / 3.0;
    let q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
    let shift = -b / 3.0;
    let disc = (q / 2.0).powi(2) + (p / 3.0).powi(3);
    let roots = if disc > 0.0 {
        let s = disc.sqrt();
        let u = (-q / 2.0 + s).cbrt();
        let v = (-q / 2.0 - s).cbrt();
        vec![u + v + shift]
    } else if p == 0.0 {
        vec![shift]
    } else {
        let r = (-p / 3.0).sqrt();
        let phi = ((-q / 2.0) / r.powi(3)).clamp(-1.0, 1.0).acos();
        (0..3)
            .map(|k| 2.0 * r * ((phi + 2.0 * std::f64::consts::PI * k as f64) / 3.0).cos() + shift)
            .collect()
    };
    roots.iter().all(|x| x.is_finite()).then_some(roots)
}

/// Bisection on the monotone pieces delimited by the derivative's roots.
fn bracket_roots(f: impl Fn(f64) -> f64, deriv: [f64; 3], lo: f64, hi: f64, tol: f64) -> Vec<f64> {
    let [d0, d1, d2] = deriv;
    let mut knots = vec![lo];
    let mut crit = Vec::new();
    if d2.abs() > 0.0 {
        let disc = d1 * d1 - 4.0 * d2 * d0;
        if disc >= 0.0 {
            let s = disc.sqrt();
            crit.push((-d1 - s) / (2.0 * d2));
            crit.push((-d1 + s) / (2.0 * d2));
        }
    } else if d1.abs() > 0.0 {
        crit.push(-d0 / d1);
    }
    crit.sort_by(f64::total_cmp);
    knots.extend(crit.into_iter().filter(|&x| x > lo && x < hi));
    knots.push(hi);
    let mut roots: Vec<f64> = Vec::new();
    for w in knots.windows(2) {
        let (mut a, mut b) = (w[0], w[1]);
        let (fa, fb) = (f(a), f(b));
        if fa == 0.0 {
            roots.push(a);
            continue;
        }
        if fa.signum() == fb.signum() {
            continue;
        }
        while b - a > tol {
            let m = 0.5 * (a + b);
            if f(m).signum() == fa.signum() {
                a = m;
            } else {
                b = m;
            }
        }
        roots.push(0.5 * (a + b));
    }
    if f(hi) == 0.0 {
        roots.push(hi);
    }
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|a, b| (*a - *b).abs() <= tol);
    roots
}

const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const K15_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728,
];
const G7_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gauss_kronrod(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = K15_WEIGHTS[7] * fc;
    let mut g = G7_WEIGHTS[3] * fc;
    for i in 0..7 {
        let x = h * GK_NODES[i];
        let s = f(c - x) + f(c + x);
        k += K15_WEIGHTS[i] * s;
        if i % 2 == 1 {
            g += G7_WEIGHTS[i / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Adaptive Gauss–Kronrod (7/15) integration of a smooth integrand.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> f64 {
    #[derive(PartialEq)]
    struct Panel {
        err: f64,
        lo: f64,
        hi: f64,
        val: f64,
    }
    impl Eq for Panel {}
    impl PartialOrd for Panel {
        fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
            Some(self.cmp(other))
        }
    }
    impl Ord for Panel {
        fn cmp(&self, other: &Self) -> std::cmp::Ordering {
            self.err.total_cmp(&other.err)
        }
    }

    if a == b {
        return 0.0;
    }
    let panel = |lo: f64, hi: f64| {
        let (val, err) = gauss_kronrod(&f, lo, hi);
        Panel { err, lo, hi, val }
    };
    let n0 = 8;
    let w = (b - a) / n0 as f64;
    let mut heap: std::collections::BinaryHeap<Panel> = (0..n0)
        .map(|i| panel(a + i as f64 * w, a + (i + 1) as f64 * w))
        .collect();
    // Global subdivision of the worst panel until the summed error estimate
    // meets the target or the panel budget runs out.
    for _ in 0..MAX_PANELS {
        let total: f64 = heap.iter().map(|p| p.val).sum();
        let err: f64 = heap.iter().map(|p| p.err).sum();
        let floor = 64.0 * f64::EPSILON * heap.iter().map(|p| p.val.abs()).sum::<f64>();
        if err <= (rel_tol * total.abs()).max(floor) {
            break;
        }
        let worst = heap.pop().expect("non-empty");
        let m = 0.5 * (worst.lo + worst.hi);
        if !(m > worst.lo && m < worst.hi) {
            heap.push(Panel { err: 0.0, ..worst });
            continue;
        }
        heap.push(panel(worst.lo, m));
        heap.push(panel(m, worst.hi));
    }
    let mut vals: Vec<(f64, f64)> = heap.into_iter().map(|p| (p.lo, p.val)).collect();
    vals.sort_by(|x, y| x.0.total_cmp(&y.0));
    vals.iter().map(|v| v.1).sum()
}

const MAX_PANELS: usize = 2000;

// Hyperbolic functions with their leading Taylor terms removed. Each tends
// to the next polynomial power over its factorial as x → 0, which keeps the
// exponential basis well conditioned for small rates.

fn series(x: f64, first_power: i32) -> f64 {
    // Σ x^k / k! for k = first_power, first_power + 2, ...
    let mut fact = (1..=first_power).map(f64::from).product::<f64>();
    let mut term = x.powi(first_power) / fact;
    let mut sum = 0.0_f64;
    let mut k = first_power;
    while term.abs() > 1e-18 * sum.abs() || sum == 0.0 {
        sum += term;
        fact = f64::from((k + 1) * (k + 2));
        term *= x * x / fact;
        k += 2;
        if k > first_power + 60 {
            break;
        }
    }
    sum
}

/// `cosh x − 1`.
pub fn cosh_m1(x: f64) -> f64 {
    2.0 * (0.5 * x).sinh().powi(2)
}

/// `sinh x − x`.
pub fn sinh_m1(x: f64) -> f64 {
    if x.abs() < 2.0 {
        series(x, 3)
    } else {
        x.sinh() - x
    }
}

/// `cosh x − 1 − x²/2`.
pub fn cosh_m2(x: f64) -> f64 {
    if x.abs() < 2.0 {
        series(x, 4)
    } else {
        x.cosh() - 1.0 - 0.5 * x * x
    }
}

/// `sinh x − x − x³/6`.
pub fn sinh_m2(x: f64) -> f64 {
    if x.abs() < 2.0 {
        series(x, 5)
    } else {
        x.sinh() - x - x * x * x / 6.0
    }
}
