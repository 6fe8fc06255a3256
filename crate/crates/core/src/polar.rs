//! Polar codes on the binary erasure channel.
//!
//! One polarization step turns two independent BEC(z) uses into a worse
//! channel with erasure probability `z(2-z)` and a better one with `z^2`.
//! Recursing `n` times from the design erasure rate gives the `N = 2^n`
//! synthetic-channel erasure probabilities ("z-values"); information goes on
//! the indices with the smallest z, the rest are frozen to zero. Encoding is
//! the in-place butterfly network for the n-fold Kronecker power of
//! `[[1,0],[1,1]]`, and decoding is successive cancellation, both in
//! O(N log N).
//!
//! Leaf ordering: at every level the worse ("minus") child is enumerated
//! before the better ("plus") child, so index `i` is the i-th bit in
//! successive decoding order. No bit-reversal permutation is applied.

use thiserror::Error;

use crate::channel::{Symbol, Word};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolarError {
    #[error("erasure probability {0} outside [0, 1]")]
    Domain(f64),
    #[error("depth {0} exceeds the supported maximum of {MAX_DEPTH}")]
    DepthTooLarge(u32),
    #[error("k = {k} out of range for block length {n}")]
    KOutOfRange { k: usize, n: usize },
    #[error("input length {got}, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("frozen position {0} carries a nonzero bit")]
    FrozenNotZero(usize),
    #[error("scaling fit needs at least 3 depths, got {0}")]
    TooFewDepths(usize),
}

/// Memory guard: depth 26 already means 2^26 z-values.
pub const MAX_DEPTH: u32 = 26;

/// One polarization step: `z -> (z(2-z), z^2)`. The mean of the pair equals
/// `z`, so capacity is preserved.
pub fn polar_step(z: f64) -> Result<(f64, f64), PolarError> {
    if !(0.0..=1.0).contains(&z) {
        return Err(PolarError::Domain(z));
    }
    Ok((z * (2.0 - z), z * z))
}

/// Erasure probabilities of all `2^depth` synthetic channels, in successive
/// decoding order.
pub fn synthetic_channels(depth: u32, eps: f64) -> Result<Vec<f64>, PolarError> {
    if depth > MAX_DEPTH {
        return Err(PolarError::DepthTooLarge(depth));
    }
    if !(0.0..=1.0).contains(&eps) {
        return Err(PolarError::Domain(eps));
    }
    let mut z = vec![eps];
    for _ in 0..depth {
        let mut next = Vec::with_capacity(z.len() * 2);
        for &v in &z {
            next.push(v * (2.0 - v));
            next.push(v * v);
        }
        z = next;
    }
    Ok(z)
}

/// Compensated (Kahan) mean, used to check capacity preservation on deep
/// trees where naive summation drifts.
pub fn compensated_mean(values: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut c = 0.0;
    for &v in values {
        let y = v - c;
        let t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    sum / values.len() as f64
}

/// A constructed polar code: z-values plus the frozen/information split.
#[derive(Debug, Clone)]
pub struct PolarCodeSpec {
    depth_n: u32,
    design_epsilon: f64,
    z_values: Vec<f64>,
    frozen: Vec<bool>,
    info_count: usize,
}

impl PolarCodeSpec {
    pub fn depth(&self) -> u32 {
        self.depth_n
    }

    /// Block length `N = 2^depth`.
    pub fn block_len(&self) -> usize {
        1usize << self.depth_n
    }

    pub fn design_epsilon(&self) -> f64 {
        self.design_epsilon
    }

    pub fn z_values(&self) -> &[f64] {
        &self.z_values
    }

    pub fn info_count(&self) -> usize {
        self.info_count
    }

    pub fn is_frozen(&self, index: usize) -> bool {
        self.frozen[index]
    }

    pub fn info_set(&self) -> Vec<usize> {
        (0..self.block_len()).filter(|&i| !self.frozen[i]).collect()
    }

    pub fn frozen_set(&self) -> Vec<usize> {
        (0..self.block_len()).filter(|&i| self.frozen[i]).collect()
    }

    /// Capacity-preservation check value (compensated mean of the z-values).
    pub fn mean_z(&self) -> f64 {
        compensated_mean(&self.z_values)
    }
}

/// Builds the code of depth `depth` designed for BEC(`eps`) carrying `k`
/// information bits. The info set is the `k` indices with the smallest
/// z-values; ties break toward the lower index.
pub fn construct(depth: u32, eps: f64, k: usize) -> Result<PolarCodeSpec, PolarError> {
    let z_values = synthetic_channels(depth, eps)?;
    let n = z_values.len();
    if k > n {
        return Err(PolarError::KOutOfRange { k, n });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| z_values[a].total_cmp(&z_values[b]).then(a.cmp(&b)));
    let mut frozen = vec![true; n];
    for &i in &order[..k] {
        frozen[i] = false;
    }
    Ok(PolarCodeSpec { depth_n: depth, design_epsilon: eps, z_values, frozen, info_count: k })
}

/// In-place butterfly transform computing `u * G` over GF(2), where `G` is
/// the n-fold Kronecker power of `[[1,0],[1,1]]`.
fn butterfly(bits: &mut [bool]) {
    let n = bits.len();
    let mut step = 1;
    while step < n {
        let mut i = 0;
        while i < n {
            for j in 0..step {
                bits[i + j] ^= bits[i + j + step];
            }
            i += 2 * step;
        }
        step *= 2;
    }
}

/// Butterfly over symbols: an erased operand poisons its XOR outputs.
fn butterfly_symbols(syms: &mut [Symbol]) {
    let n = syms.len();
    let mut step = 1;
    while step < n {
        let mut i = 0;
        while i < n {
            for j in 0..step {
                syms[i + j] = syms[i + j].xor(syms[i + j + step]);
            }
            i += 2 * step;
        }
        step *= 2;
    }
}

/// Encodes an input word whose frozen positions must hold zero bits.
pub fn encode(u: &Word, spec: &PolarCodeSpec) -> Result<Word, PolarError> {
    let n = spec.block_len();
    if u.len() != n {
        return Err(PolarError::LengthMismatch { expected: n, got: u.len() });
    }
    for (i, &bit) in u.bits().iter().enumerate() {
        if spec.frozen[i] && bit {
            return Err(PolarError::FrozenNotZero(i));
        }
    }
    let mut bits = u.bits().to_vec();
    butterfly(&mut bits);
    Ok(Word::from_bits(bits))
}

/// Successive-cancellation decoding of a BEC output block.
///
/// Frozen positions are always set to zero, regardless of channel evidence.
/// The worse-channel estimate of a pair needs both child estimates known;
/// the better-channel estimate combines two conditionally independent looks
/// and is erased only when both are. `success` means no information index
/// remained erased.
pub fn sc_decode(y: &[Symbol], spec: &PolarCodeSpec) -> Result<(Vec<Symbol>, bool), PolarError> {
    let n = spec.block_len();
    if y.len() != n {
        return Err(PolarError::LengthMismatch { expected: n, got: y.len() });
    }
    let u_hat = sc_recurse(y, &spec.frozen);
    let success =
        u_hat.iter().enumerate().all(|(i, s)| spec.frozen[i] || !s.is_erased());
    Ok((u_hat, success))
}

fn sc_recurse(y: &[Symbol], frozen: &[bool]) -> Vec<Symbol> {
    let n = y.len();
    if n == 1 {
        return if frozen[0] {
            vec![Symbol::Zero]
        } else {
            vec![y[0]]
        };
    }
    let half = n / 2;

    // Worse-channel looks: known only when both halves are known.
    let minus: Vec<Symbol> = (0..half).map(|i| y[i].xor(y[i + half])).collect();
    let mut u = sc_recurse(&minus, &frozen[..half]);

    // Re-encode the decoded left half to cancel it from the first look.
    let mut partial = u.clone();
    butterfly_symbols(&mut partial);

    // Better-channel looks: direct observation, else cancelled first look.
    let plus: Vec<Symbol> = (0..half)
        .map(|i| {
            if !y[i + half].is_erased() {
                y[i + half]
            } else {
                y[i].xor(partial[i])
            }
        })
        .collect();
    let u_right = sc_recurse(&plus, &frozen[half..]);
    u.extend(u_right);
    u
}

/// Union bound on the block error probability: `min(1, sum of info z)`.
pub fn block_error_bound(spec: &PolarCodeSpec) -> f64 {
    let sum: f64 = (0..spec.block_len())
        .filter(|&i| !spec.frozen[i])
        .map(|i| spec.z_values[i])
        .sum();
    sum.min(1.0)
}

/// Fractions of synthetic channels that are good (`z < delta`), bad
/// (`z > 1-delta`), and unpolarized (in between).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizationStats {
    pub good_fraction: f64,
    pub bad_fraction: f64,
    pub middle_fraction: f64,
}

pub fn polarization_stats(z_values: &[f64], delta: f64) -> PolarizationStats {
    assert!(delta > 0.0 && delta <= 0.5, "delta must lie in (0, 1/2]");
    let n = z_values.len() as f64;
    let good = z_values.iter().filter(|&&z| z < delta).count() as f64;
    let bad = z_values.iter().filter(|&&z| z > 1.0 - delta).count() as f64;
    PolarizationStats {
        good_fraction: good / n,
        bad_fraction: bad / n,
        middle_fraction: (n - good - bad) / n,
    }
}

/// Result of the finite-length scaling fit.
#[derive(Debug, Clone)]
pub struct ScalingFit {
    /// Fitted exponent: slope of `ln N` against `-ln gap`.
    pub mu: f64,
    /// Per-depth `(depth, k, gap)` records backing the fit.
    pub points: Vec<(u32, usize, f64)>,
}

/// Measures how the block length must grow as the rate gap to capacity
/// shrinks, at a fixed union-bound block-error target.
///
/// For each depth the largest `k` with `block_error_bound <= target` is
/// found; the gap is `1 - k/(N(1-eps))`; the exponent is the least-squares
/// slope of `ln N` on `-ln gap`.
pub fn scaling_exponent(eps: f64, target: f64, depths: &[u32]) -> Result<ScalingFit, PolarError> {
    if depths.len() < 3 {
        return Err(PolarError::TooFewDepths(depths.len()));
    }
    assert!(target > 0.0 && target < 1.0, "target block error must lie in (0, 1)");
    let mut points = Vec::with_capacity(depths.len());
    for &depth in depths {
        let mut z = synthetic_channels(depth, eps)?;
        z.sort_unstable_by(f64::total_cmp);
        let mut sum = 0.0;
        let mut k = 0usize;
        for &v in &z {
            if sum + v > target {
                break;
            }
            sum += v;
            k += 1;
        }
        let n = (1usize << depth) as f64;
        let gap = 1.0 - k as f64 / (n * (1.0 - eps));
        points.push((depth, k, gap));
    }
    let xs: Vec<f64> = points.iter().map(|&(_, _, gap)| -gap.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|&(d, _, _)| (d as f64) * std::f64::consts::LN_2).collect();
    let mu = least_squares_slope(&xs, &ys);
    Ok(ScalingFit { mu, points })
}

fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let cov: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    cov / var
}
