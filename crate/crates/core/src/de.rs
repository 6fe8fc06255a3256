//! Density evolution for uncoupled ensembles.
//!
//! In the large-blocklength limit, the erasure probability carried by
//! variable-to-check messages evolves as `x <- eps * lambda(1 - rho(1-x))`,
//! starting from `x = eps`. The trajectory is monotone non-increasing, so it
//! converges; the BP threshold is the largest `eps` for which the limit is
//! zero. Every fixed point satisfies `eps = x / lambda(1 - rho(1-x))`, which
//! is single-valued in `x` and yields the EXIT curve when projected to
//! `(eps(x), y(x)^dl)`.

use thiserror::Error;

use crate::ensemble::{DegreeDistribution, EdgePerspective};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DeError {
    #[error("x = 0 is a trivial fixed point for every eps; no unique eps exists")]
    FixedPointAtZero,
    #[error("x = {0} outside (0, 1]")]
    Domain(f64),
}

/// One density-evolution state: `x` is the variable-to-check erasure
/// probability, `y` the check-to-variable one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeState {
    pub x: f64,
    pub y: f64,
    pub iteration: usize,
}

/// A full run: the limit and the trajectory that led there.
#[derive(Debug, Clone)]
pub struct DeRun {
    pub limit_x: f64,
    pub trajectory: Vec<DeState>,
}

/// Iterates density evolution from `x = eps` until the step change drops
/// below `tol` or `max_iters` is hit. The initial state carries `y = 1`
/// (no check-side knowledge yet).
pub fn de_iterate(dd: &DegreeDistribution, eps: f64, max_iters: usize, tol: f64) -> DeRun {
    assert!(tol > 0.0, "tolerance must be positive");
    assert!((0.0..=1.0).contains(&eps));
    let edge = dd.edge_perspective();
    let mut x = eps;
    let mut trajectory = vec![DeState { x, y: 1.0, iteration: 0 }];
    for iteration in 1..=max_iters {
        let y = 1.0 - edge.rho_at(1.0 - x);
        let next = eps * edge.lambda_at(y);
        trajectory.push(DeState { x: next, y, iteration });
        let done = (x - next).abs() < tol;
        x = next;
        if done {
            break;
        }
    }
    DeRun { limit_x: x, trajectory }
}

/// The unique channel parameter for which `x` is a density-evolution fixed
/// point of the (d_l, d_r)-regular ensemble:
/// `eps = x / (1 - (1-x)^(dr-1))^(dl-1)`.
pub fn fp_epsilon_of_x(x: f64, dl: u32, dr: u32) -> Result<f64, DeError> {
    if x == 0.0 {
        return Err(DeError::FixedPointAtZero);
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(DeError::Domain(x));
    }
    let y = 1.0 - (1.0 - x).powi(dr as i32 - 1);
    Ok(x / y.powi(dl as i32 - 1))
}

fn eps_of_x_general(edge: &EdgePerspective, x: f64) -> f64 {
    x / edge.lambda_at(1.0 - edge.rho_at(1.0 - x))
}

/// BP threshold as the infimum of `eps(x)` over x in (0, 1], refined by
/// golden-section search around the grid minimum. For ensembles with mass on
/// degree-2 variable nodes the infimum can sit at x -> 0, where it equals
/// the stability limit `1 / (lambda_2 rho'(1))`; degree-1 variable nodes
/// push the threshold to 0.
pub fn bp_threshold(dd: &DegreeDistribution, tol: f64) -> f64 {
    assert!(tol >= 1e-10, "tolerance below supported resolution");
    let edge = dd.edge_perspective();
    if edge.lambda_1() > 0.0 {
        return 0.0;
    }
    let f = |x: f64| eps_of_x_general(&edge, x);

    let grid = 4000;
    let mut best_k = 1;
    let mut best = f64::INFINITY;
    for k in 1..=grid {
        let x = k as f64 / grid as f64;
        let v = f(x);
        if v < best {
            best = v;
            best_k = k;
        }
    }
    let lo = (best_k as f64 - 1.0).max(0.5) / grid as f64;
    let hi = ((best_k + 1) as f64 / grid as f64).min(1.0);
    let mut interior = golden_min(f, lo, hi, tol.min(1e-9) * 1e-2);

    let l2 = edge.lambda_2();
    if l2 > 0.0 {
        let limit = 1.0 / (l2 * edge.rho_prime_at_one());
        interior = interior.min(limit);
    }
    interior
}

fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, xtol: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = hi - INV_PHI * (hi - lo);
    let mut d = lo + INV_PHI * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    while hi - lo > xtol {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - INV_PHI * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + INV_PHI * (hi - lo);
            fd = f(d);
        }
    }
    fc.min(fd)
}

/// BP threshold by bisection on "density evolution converges to zero",
/// the dynamic route. `max_de_iters` bounds each probe; probes near the
/// threshold of degree-2 ensembles converge slowly, so the budget controls
/// the classification band.
pub fn bp_threshold_bisection(dd: &DegreeDistribution, tol: f64, max_de_iters: usize) -> f64 {
    assert!(tol >= 1e-10);
    let edge = dd.edge_perspective();
    let decodes = |eps: f64| -> bool {
        let mut x = eps;
        for _ in 0..max_de_iters {
            x = eps * edge.lambda_at(1.0 - edge.rho_at(1.0 - x));
            if x < 1e-9 {
                return true;
            }
        }
        false
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..60 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if decodes(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stability {
    Stable,
    Unstable,
}

/// One projected fixed point of density evolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExitPoint {
    pub x: f64,
    pub epsilon: f64,
    pub exit_value: f64,
    pub stability: Stability,
}

/// Extrinsic erasure probability at a variable node: the chance that all of
/// its check messages are erased, averaged over the node degrees. For the
/// regular ensemble this is `y^dl`.
pub fn exit_value(dd: &DegreeDistribution, y: f64) -> f64 {
    dd.var_node_coeffs().iter().map(|(&d, &c)| c * y.powi(d as i32)).sum()
}

/// Parametric sweep of the fixed-point curve over x in (0, 1]. Stability is
/// classified by the sign of d eps/dx (positive on the stable branch).
pub fn exit_curve(dd: &DegreeDistribution, grid: usize) -> Vec<ExitPoint> {
    assert!(grid >= 100, "exit curve needs at least 100 grid points");
    let edge = dd.edge_perspective();
    (1..=grid)
        .map(|k| {
            let x = k as f64 / grid as f64;
            let epsilon = eps_of_x_general(&edge, x);
            let y = 1.0 - edge.rho_at(1.0 - x);
            let h = 1e-6_f64.min(x / 2.0).min((1.0 - x).max(1e-9) / 2.0).max(1e-9);
            let slope =
                (eps_of_x_general(&edge, x + h) - eps_of_x_general(&edge, x - h)) / (2.0 * h);
            ExitPoint {
                x,
                epsilon,
                exit_value: exit_value(dd, y),
                stability: if slope > 0.0 { Stability::Stable } else { Stability::Unstable },
            }
        })
        .collect()
}

/// The two transfer curves of an EXIT chart, plus whether they cross.
///
/// `var_curve` holds `(y, eps*lambda(y))` pairs, `check_curve` holds
/// `(x, 1 - rho(1-x))` pairs. Crossing means some x in (0, eps] has
/// `eps*lambda(1-rho(1-x)) >= x` beyond numerical tolerance, which is the
/// matching-condition margin going positive.
#[derive(Debug, Clone)]
pub struct ExitChart {
    pub var_curve: Vec<(f64, f64)>,
    pub check_curve: Vec<(f64, f64)>,
    pub crossing: bool,
}

pub fn exit_chart(dd: &DegreeDistribution, eps: f64, grid: usize) -> ExitChart {
    assert!(grid >= 100);
    let edge = dd.edge_perspective();
    let var_curve = (0..=grid)
        .map(|k| {
            let y = k as f64 / grid as f64;
            (y, eps * edge.lambda_at(y))
        })
        .collect();
    let check_curve = (0..=grid)
        .map(|k| {
            let x = k as f64 / grid as f64;
            (x, 1.0 - edge.rho_at(1.0 - x))
        })
        .collect();
    let crossing = dd.matching_margin(eps, grid.max(100)) > 1e-12;
    ExitChart { var_curve, check_curve, crossing }
}

/// Number of points in [0, eps] where the two EXIT-chart curves touch:
/// roots of the margin `eps*lambda(1-rho(1-x)) - x`, counting x = 0 (always
/// a root) plus one per sign change across the grid.
pub fn exit_chart_touch_points(dd: &DegreeDistribution, eps: f64, grid: usize) -> usize {
    assert!(grid >= 100);
    let edge = dd.edge_perspective();
    let margin = |x: f64| eps * edge.lambda_at(1.0 - edge.rho_at(1.0 - x)) - x;
    let mut count = 1;
    let mut last = margin(eps / grid as f64).signum();
    for k in 2..=grid {
        let s = margin(eps * k as f64 / grid as f64).signum();
        if s != last && s != 0.0 {
            if last != 0.0 {
                count += 1;
            }
            last = s;
        }
    }
    count
}

/// Staircase trajectory in the EXIT-chart plane: alternating vertical and
/// horizontal moves bounded by the two transfer curves.
pub fn de_staircase(dd: &DegreeDistribution, eps: f64, max_steps: usize) -> Vec<(f64, f64)> {
    let edge = dd.edge_perspective();
    let mut points = Vec::with_capacity(2 * max_steps + 1);
    let mut x = eps;
    points.push((x, 0.0));
    for _ in 0..max_steps {
        let y = 1.0 - edge.rho_at(1.0 - x);
        points.push((x, y));
        let next = eps * edge.lambda_at(y);
        points.push((next, y));
        if (x - next).abs() < 1e-14 {
            break;
        }
        x = next;
    }
    points
}

/// `int EXIT(x) deps(x)` along the parametric fixed-point curve from `x_lo`
/// to 1 for the regular ensemble. The integrand simplifies to
/// `y - (dl-1) x y'`, which is smooth even where `eps(x)` blows up.
pub fn exit_curve_area_from(x_lo: f64, dl: u32, dr: u32) -> f64 {
    let integrand = |x: f64| {
        let y = 1.0 - (1.0 - x).powi(dr as i32 - 1);
        let yp = (dr as f64 - 1.0) * (1.0 - x).powi(dr as i32 - 2);
        y - (dl as f64 - 1.0) * x * yp
    };
    simpson(integrand, x_lo, 1.0, 1 << 14)
}

/// Area integral along the whole curve; analytically equal to the design
/// rate `1 - dl/dr`.
pub fn exit_curve_area_full(dl: u32, dr: u32) -> f64 {
    exit_curve_area_from(0.0, dl, dr)
}

/// Composite Simpson on `n` panels (`n` even).
pub(crate) fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = if n % 2 == 0 { n } else { n + 1 };
    let h = (b - a) / n as f64;
    let mut sum = f(a) + f(b);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + k as f64 * h);
    }
    sum * h / 3.0
}

/// Density-evolution prediction of the residual bit-erasure rate after BP:
/// the channel must erase the bit and every incoming check message must be
/// erased at the fixed point.
pub fn predicted_bit_erasure(dd: &DegreeDistribution, eps: f64) -> f64 {
    let run = de_iterate(dd, eps, 200_000, 1e-13);
    if run.limit_x < 1e-9 {
        return 0.0;
    }
    let edge = dd.edge_perspective();
    let y = 1.0 - edge.rho_at(1.0 - run.limit_x);
    eps * exit_value(dd, y)
}
