//! Density evolution for spatially coupled chains.
//!
//! The state is a constellation: one erasure fraction per position 1..=L,
//! read as zero outside that range (perfect knowledge at the boundary).
//! Variables at position i average check messages over positions
//! i..i+w-1 ("to the right"); checks at position i average variable
//! messages over i-w+1..i. Check positions run to L+w-1.
//!
//! Started from all-ones, the iterates decrease point-wise, so the run
//! either collapses to zero (decoded) or converges to a nontrivial fixed
//! point. Between the uncoupled BP threshold and the area threshold the
//! collapse happens through wave fronts that move inward from the
//! boundaries at a measurable speed.

use thiserror::Error;

use crate::de;
use crate::ensemble::DegreeDistribution;

/// Erasure fractions below this count as decoded.
pub const DECODED_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WaveError {
    #[error("no wave forms: the constellation collapses without a front (eps below the uncoupled threshold)")]
    DecodedWithoutWave,
    #[error("no wave forms: the front never moves (eps above the coupled threshold)")]
    Stuck,
}

/// Per-position erasure fractions of a coupled chain, zero outside 1..=L.
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    values: Vec<f64>,
    window: usize,
}

impl Constellation {
    pub fn new(values: Vec<f64>, window: usize) -> Self {
        assert!(!values.is_empty(), "a constellation has at least one position");
        assert!(window >= 1);
        assert!(values.iter().all(|v| (0.0..=1.0).contains(v)));
        Constellation { values, window }
    }

    pub fn all_ones(chain_len: usize, window: usize) -> Self {
        Constellation::new(vec![1.0; chain_len], window)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }
}

fn prefix_sums(values: &[f64]) -> Vec<f64> {
    let mut pre = Vec::with_capacity(values.len() + 1);
    pre.push(0.0);
    let mut acc = 0.0;
    for &v in values {
        acc += v;
        pre.push(acc);
    }
    pre
}

/// One synchronous step of the two-stage coupled recursion. Out-of-range
/// positions read as zero; outputs lie in [0, eps].
pub fn coupled_de_step(c: &Constellation, eps: f64, dl: u32, dr: u32) -> Constellation {
    Constellation {
        values: step_values(&c.values, c.window, eps, dl, dr),
        window: c.window,
    }
}

fn step_values(x: &[f64], w: usize, eps: f64, dl: u32, dr: u32) -> Vec<f64> {
    let l = x.len();
    let pre = prefix_sums(x);
    // Check positions 1..=L+w-1 (0-based c): average x over the w positions
    // ending at c, then apply the check map.
    let y: Vec<f64> = (0..l + w - 1)
        .map(|c| {
            let hi = c.min(l - 1);
            let lo = (c + 1).saturating_sub(w);
            let sum = if lo <= hi { pre[hi + 1] - pre[lo] } else { 0.0 };
            1.0 - (1.0 - sum / w as f64).powi(dr as i32 - 1)
        })
        .collect();
    let prey = prefix_sums(&y);
    (0..l)
        .map(|i| {
            let avg = (prey[i + w] - prey[i]) / w as f64;
            eps * avg.powi(dl as i32 - 1)
        })
        .collect()
}

/// Outcome of running coupled density evolution to termination.
#[derive(Debug, Clone)]
pub struct CoupledRun {
    /// All positions fell below [`DECODED_THRESHOLD`].
    pub decoded: bool,
    /// Step change fell below the tolerance (a nontrivial fixed point).
    pub converged: bool,
    pub fixed_point: Constellation,
    pub iterations: usize,
}

/// Runs the coupled recursion from the all-one constellation.
/// `max_iters` defaults to `100 * chain_len`, enough for a decoding wave to
/// cross the chain at any speed that is not vanishing.
pub fn coupled_de_run(
    chain_len: usize,
    w: usize,
    dl: u32,
    dr: u32,
    eps: f64,
    max_iters: Option<usize>,
    tol: f64,
) -> CoupledRun {
    coupled_de_run_from(Constellation::all_ones(chain_len, w), eps, dl, dr, max_iters, tol)
}

/// Same as [`coupled_de_run`] but from an arbitrary starting constellation.
pub fn coupled_de_run_from(
    start: Constellation,
    eps: f64,
    dl: u32,
    dr: u32,
    max_iters: Option<usize>,
    tol: f64,
) -> CoupledRun {
    assert!(tol > 0.0);
    let max_iters = max_iters.unwrap_or(100 * start.len());
    let mut c = start;
    for iteration in 1..=max_iters {
        let next = coupled_de_step(&c, eps, dl, dr);
        let delta = c
            .values
            .iter()
            .zip(&next.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        c = next;
        if c.max_value() < DECODED_THRESHOLD {
            return CoupledRun { decoded: true, converged: true, fixed_point: c, iterations: iteration };
        }
        if delta < tol {
            return CoupledRun { decoded: false, converged: true, fixed_point: c, iterations: iteration };
        }
    }
    CoupledRun { decoded: false, converged: false, fixed_point: c, iterations: max_iters }
}

/// Leftmost position (1-based, linearly interpolated) where the profile
/// crosses `level`, or None when the whole profile sits below it.
fn front_position(values: &[f64], level: f64) -> Option<f64> {
    let idx = values.iter().position(|&v| v >= level)?;
    if idx == 0 {
        return Some(1.0);
    }
    let (a, b) = (values[idx - 1], values[idx]);
    Some(idx as f64 + (level - a) / (b - a))
}

/// Speed of the decoding wave in positions per iteration, measured by
/// tracking the leftmost crossing of half the uncoupled fixed-point value
/// and fitting a line over the steady middle third of the run.
pub fn wave_speed(
    chain_len: usize,
    w: usize,
    dl: u32,
    dr: u32,
    eps: f64,
) -> Result<f64, WaveError> {
    assert!(chain_len >= 10 * w, "chain too short for a steady wave");
    let dd = DegreeDistribution::regular(dl, dr).expect("regular ensemble");
    let x_star = de::de_iterate(&dd, eps, 400_000, 1e-13).limit_x;
    if x_star < 0.01 {
        return Err(WaveError::DecodedWithoutWave);
    }
    let half = x_star / 2.0;

    let mut c = Constellation::all_ones(chain_len, w);
    let mut fronts = Vec::new();
    let cap = 100 * chain_len;
    let mut decoded = false;
    for _ in 0..cap {
        let next = coupled_de_step(&c, eps, dl, dr);
        let delta = c
            .values
            .iter()
            .zip(&next.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        c = next;
        if c.max_value() < DECODED_THRESHOLD {
            decoded = true;
            break;
        }
        match front_position(c.values(), half) {
            Some(p) => fronts.push(p),
            None => {
                decoded = true; // profile already everywhere below half the FP
                break;
            }
        }
        if delta < 1e-13 {
            return Err(WaveError::Stuck); // frozen at a nontrivial fixed point
        }
    }
    if fronts.len() < 9 {
        return Err(if decoded { WaveError::DecodedWithoutWave } else { WaveError::Stuck });
    }
    let (a, b) = (fronts.len() / 3, 2 * fronts.len() / 3);
    let window = &fronts[a..b];
    if window.last().unwrap() - window.first().unwrap() < 1e-6 {
        return Err(WaveError::Stuck);
    }
    // Least-squares slope of front position against iteration index.
    let n = window.len() as f64;
    let mt = (n - 1.0) / 2.0;
    let mf = window.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var = 0.0;
    for (t, &f) in window.iter().enumerate() {
        let dt = t as f64 - mt;
        cov += dt * (f - mf);
        var += dt * dt;
    }
    let slope = cov / var;
    if slope <= 0.0 {
        return Err(WaveError::Stuck);
    }
    Ok(slope)
}

/// Largest eps at which the coupled chain still decodes, by bisection on
/// the decoded flag of [`coupled_de_run`].
pub fn coupled_threshold(chain_len: usize, w: usize, dl: u32, dr: u32, tol: f64) -> f64 {
    assert!(tol >= 1e-6, "tolerance below the bisection resolution");
    let decodes = |eps: f64| {
        coupled_de_run(chain_len, w, dl, dr, eps, None, 1e-12).decoded
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if decodes(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// A one-sided constellation: values at positions -L..=0, non-decreasing,
/// read as 0 below -L and clamped to the position-0 value above 0.
#[derive(Debug, Clone, PartialEq)]
pub struct OneSidedConstellation {
    values: Vec<f64>,
    window: usize,
}

impl OneSidedConstellation {
    pub fn new(values: Vec<f64>, window: usize) -> Self {
        assert!(values.len() >= 2);
        assert!(window >= 1);
        OneSidedConstellation { values, window }
    }

    /// Values indexed from position -L (first) to position 0 (last).
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn window(&self) -> usize {
        self.window
    }

    /// Chain length L (the vector holds L+1 values).
    pub fn chain_len(&self) -> usize {
        self.values.len() - 1
    }

    /// The clamp value at and beyond position 0.
    pub fn right_value(&self) -> f64 {
        *self.values.last().unwrap()
    }

    /// Average value of the constellation.
    pub fn entropy(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn is_non_decreasing(&self) -> bool {
        self.values.windows(2).all(|p| p[1] >= p[0] - 1e-12)
    }
}

fn one_sided_step(v: &[f64], w: usize, eps: f64, dl: u32, dr: u32) -> Vec<f64> {
    let lp = v.len(); // L+1 entries, index 0 at position -L
    let x0 = v[lp - 1];
    let pre = prefix_sums(v);
    // Check slots c = 0..lp+w-2 in array coordinates; slot c averages the w
    // entries ending at c, reading 0 below index 0 and x0 above index lp-1.
    let y: Vec<f64> = (0..lp + w - 1)
        .map(|c| {
            let lo = (c + 1).saturating_sub(w);
            let hi_in = c.min(lp - 1);
            let in_range = if lo <= hi_in { pre[hi_in + 1] - pre[lo] } else { 0.0 };
            let above = c.saturating_sub(lp - 1) as f64;
            let sum = in_range + above * x0;
            1.0 - (1.0 - sum / w as f64).powi(dr as i32 - 1)
        })
        .collect();
    let prey = prefix_sums(&y);
    (0..lp)
        .map(|i| {
            let avg = (prey[i + w] - prey[i]) / w as f64;
            eps * avg.powi(dl as i32 - 1)
        })
        .collect()
}

/// Result of iterating the one-sided recursion.
#[derive(Debug, Clone)]
pub struct OneSidedRun {
    pub constellation: OneSidedConstellation,
    /// Average value of the final constellation.
    pub entropy: f64,
    /// Max point-wise change in the final step. Near zero at a fixed point;
    /// bounded away from zero while the profile keeps sliding.
    pub residual: f64,
    pub iterations: usize,
}

/// Iterates the one-sided system from a linear ramp (0 at position -L up to
/// the uncoupled fixed point at position 0).
///
/// Near the area threshold this settles onto the single-transition profile
/// interpolating between 0 and the uncoupled fixed point. Below it, the
/// transition keeps sliding right and the residual stays positive; well
/// below the BP threshold everything collapses to zero.
pub fn one_sided_fp_search(
    chain_len: usize,
    w: usize,
    dl: u32,
    dr: u32,
    eps: f64,
    max_iters: usize,
    tol: f64,
) -> OneSidedRun {
    assert!(tol > 0.0);
    let dd = DegreeDistribution::regular(dl, dr).expect("regular ensemble");
    let x_star = de::de_iterate(&dd, eps, 400_000, 1e-13).limit_x;
    let mut v: Vec<f64> =
        (0..=chain_len).map(|i| x_star * i as f64 / chain_len as f64).collect();
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    for iteration in 1..=max_iters {
        let next = one_sided_step(&v, w, eps, dl, dr);
        residual = v
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        v = next;
        iterations = iteration;
        if residual < tol {
            break;
        }
    }
    let constellation = OneSidedConstellation::new(v, w);
    let entropy = constellation.entropy();
    OneSidedRun { constellation, entropy, residual, iterations }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn zero_constellation_is_fixed() {
        let c = Constellation::new(vec![0.0; 30], 4);
        let next = coupled_de_step(&c, 0.7, 3, 6);
        assert!(next.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn window_one_is_positionwise_uncoupled() {
        let c = Constellation::new(vec![0.3, 0.5, 0.9], 1);
        let next = coupled_de_step(&c, 0.6, 3, 6);
        for (i, &x) in c.values().iter().enumerate() {
            let expect = 0.6 * (1.0 - (1.0 - x).powi(5)).powi(2);
            assert_abs_diff_eq!(next.values()[i], expect, epsilon = 1e-15);
        }
    }

    #[test]
    fn deep_interior_of_constant_profile_behaves_uncoupled() {
        let w = 4;
        let l = 60;
        let x = 0.35;
        let c = Constellation::new(vec![x; l], w);
        let next = coupled_de_step(&c, 0.5, 3, 6);
        let expect = 0.5 * (1.0 - (1.0 - x).powi(5)).powi(2);
        // More than 2w from either boundary every window is constant.
        for i in (2 * w)..(l - 2 * w) {
            assert_abs_diff_eq!(next.values()[i], expect, epsilon = 1e-12);
        }
    }

    #[test]
    fn iterates_decrease_pointwise_from_all_ones() {
        let mut c = Constellation::all_ones(50, 5);
        for _ in 0..400 {
            let next = coupled_de_step(&c, 0.47, 3, 6);
            for (a, b) in c.values().iter().zip(next.values()) {
                assert!(*b <= a + 1e-12);
            }
            c = next;
        }
    }

    #[test]
    fn phase_below_uncoupled_threshold_decodes_fast() {
        let run = coupled_de_run(100, 20, 3, 6, 0.3, None, 1e-12);
        assert!(run.decoded);
        assert!(run.iterations < 50);
    }

    #[test]
    fn phase_between_thresholds_decodes_by_wave() {
        let run = coupled_de_run(100, 20, 3, 6, 0.48, None, 1e-12);
        assert!(run.decoded);
        // Takes a wave crossing, not a uniform collapse.
        assert!(run.iterations > 50);
    }

    #[test]
    fn phase_above_area_threshold_sticks_at_uncoupled_interior() {
        let run = coupled_de_run(100, 20, 3, 6, 0.6, None, 1e-12);
        assert!(!run.decoded);
        assert!(run.converged);
        let center = run.fixed_point.values()[49];
        // Uncoupled fixed point at 0.6, frozen from the scalar oracle.
        let x_star = 0.585_387_500_9;
        // Finite-chain boundary aid leaves a ~1.3e-5 dent even at the center.
        assert_abs_diff_eq!(center, x_star, epsilon = 5e-5);
    }

    #[test]
    fn stuck_fixed_point_is_dominated_by_uncoupled_value() {
        let run = coupled_de_run(60, 8, 3, 6, 0.55, None, 1e-12);
        assert!(!run.decoded);
        let dd = DegreeDistribution::regular(3, 6).unwrap();
        let x_star = de::de_iterate(&dd, 0.55, 200_000, 1e-13).limit_x;
        for &v in run.fixed_point.values() {
            assert!(v <= x_star + 1e-9);
        }
    }

    #[test]
    fn stuck_fixed_point_is_mirror_symmetric() {
        let run = coupled_de_run(81, 7, 3, 6, 0.58, None, 1e-12);
        let vals = run.fixed_point.values();
        for i in 0..vals.len() {
            let j = vals.len() - 1 - i;
            assert!((vals[i] - vals[j]).abs() < 1e-10, "asymmetry at {i}");
        }
    }

    #[test]
    fn wave_speed_regimes() {
        // Monotone decreasing in eps between the two thresholds.
        let s44 = wave_speed(100, 8, 3, 6, 0.44).unwrap();
        let s47 = wave_speed(100, 8, 3, 6, 0.47).unwrap();
        assert!(s44 > s47, "{s44} vs {s47}");
        assert!(s47 > 0.0);
        // Below the uncoupled threshold there is no front to track.
        assert_eq!(wave_speed(100, 8, 3, 6, 0.40), Err(WaveError::DecodedWithoutWave));
        // Above the area threshold the front freezes.
        assert_eq!(wave_speed(100, 8, 3, 6, 0.55), Err(WaveError::Stuck));
    }

    #[test]
    fn threshold_with_window_one_is_uncoupled() {
        let t = coupled_threshold(60, 1, 3, 6, 1e-4);
        assert_abs_diff_eq!(t, 0.42944, epsilon = 1e-3);
    }

    #[test]
    fn window_equal_to_chain_is_boundary_dominated() {
        // With w = L every average reaches deep into the zero boundary, so
        // the aided threshold sits far above both the uncoupled and the
        // area threshold (about 0.697 for short (3,6) chains).
        let t = coupled_threshold(20, 20, 3, 6, 1e-4);
        assert!((0.6..0.8).contains(&t), "threshold {t}");
    }

    #[test]
    fn one_sided_collapses_below_threshold() {
        let run = one_sided_fp_search(50, 3, 3, 6, 0.3, 2000, 1e-10);
        assert!(run.residual < 1e-10);
        assert!(run.entropy < 1e-9);
        assert!(run.constellation.right_value() < 1e-9);
    }

    #[test]
    fn one_sided_profile_is_monotone() {
        let run = one_sided_fp_search(100, 5, 3, 6, 0.48818, 1500, 1e-12);
        assert!(run.constellation.is_non_decreasing());
    }

    #[test]
    fn one_sided_drifts_between_thresholds() {
        // The transition keeps sliding right: residual stays macroscopic and
        // the average value falls while the right edge still sits at the
        // uncoupled fixed point.
        let run = one_sided_fp_search(200, 10, 3, 6, 0.46, 120, 1e-12);
        assert!(run.residual > 1e-4, "residual {}", run.residual);
        assert!(run.constellation.right_value() > 0.3);
        let longer = one_sided_fp_search(200, 10, 3, 6, 0.46, 160, 1e-12);
        assert!(longer.entropy < run.entropy);
    }
}
