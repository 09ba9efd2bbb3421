//! Monte Carlo oracle: simulate the simple symmetric random walk on `ℤ^d`
//! and estimate the return probability directly.
//!
//! The estimate is implementation-independent of the analytic routes (series,
//! quadrature, gamma product): it needs nothing but a uniform step sampler,
//! so it cross-checks them end to end. Unlike those routes it accepts
//! `d = 1, 2` as well — there it measures the truncated return probability of
//! a recurrent walk, which approaches 1 slowly as the horizon grows.
//!
//! Truncation accounting is explicit and one-sided: a walk that neither
//! returned nor *provably* escaped within the horizon is reported as
//! `truncated`, and the estimator `p_hat = returned / walks` underestimates
//! the true return probability by at most the truncated fraction. A walk has
//! provably escaped once its L1 distance from the origin exceeds the steps
//! it has left; no tail-law correction is applied.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::rng::Stream;

/// Parameters of one Monte Carlo run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WalkConfig {
    /// Lattice dimension (any `d >= 1`; the walk itself is defined for all).
    pub d: u32,
    /// Number of independent walks.
    pub walks: u64,
    /// Maximum steps per walk (at least 2; returns happen at even steps).
    pub horizon: u64,
    /// Seed shared by all walks; walk `w` uses the substream keyed by `w`.
    pub seed: u64,
    /// Worker threads. The outcome is bit-identical for any worker count
    /// because streams are keyed by walk index, never by worker.
    pub workers: u32,
    /// Upper bound on `walks * horizon`, rejecting runs that could not
    /// finish in reasonable time before they start.
    pub step_budget: u128,
}

impl Default for WalkConfig {
    fn default() -> Self {
        WalkConfig {
            d: 3,
            walks: 100_000,
            horizon: 100_000,
            seed: 2024,
            workers: 1,
            step_budget: 4_000_000_000_000,
        }
    }
}

/// Outcome statistics of a Monte Carlo run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkEstimate {
    /// Point estimate `returned / walks` of the return probability.
    pub p_hat: f64,
    /// Binomial standard error `sqrt(p_hat (1 - p_hat) / walks)`.
    pub std_err: f64,
    /// 95% normal-approximation interval, clipped to `[0, 1]`.
    pub ci95: (f64, f64),
    /// Walks that revisited the origin within the horizon.
    pub returned: u64,
    /// Walks whose L1 distance exceeded their remaining steps (a return
    /// within the horizon became impossible).
    pub escaped: u64,
    /// Walks that neither returned nor provably escaped by the horizon.
    pub truncated: u64,
    /// Total walks, `returned + escaped + truncated`.
    pub walks: u64,
}

/// How one walk ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Outcome {
    Returned,
    Escaped,
    Truncated,
}

/// Walks stay near the stepwise loop below this L1 distance; further out,
/// the `d = 3` simulation advances in return-free leaps.
const LEAP_MIN: u64 = 16;

/// One walk in arbitrary dimension: one uniform draw in `[0, 2d)` per step,
/// axis in the high bits, direction in the low bit.
fn simulate_generic(stream: &mut Stream, d: u32, horizon: u64) -> Outcome {
    let sides = 2 * u64::from(d);
    let mut coords = alloc::vec![0i64; d as usize];
    let mut l1: u64 = 0;
    let mut t: u64 = 0;
    while t < horizon {
        if l1 > horizon - t {
            return Outcome::Escaped;
        }
        let draw = stream.next_below(sides);
        let dir = if draw & 1 == 1 { 1 } else { -1 };
        let c = &mut coords[(draw >> 1) as usize];
        l1 -= c.unsigned_abs();
        *c += dir;
        l1 += c.unsigned_abs();
        t += 1;
        if l1 == 0 {
            return Outcome::Returned;
        }
    }
    Outcome::Truncated
}

/// Decodes one 3-word block of bit-parallel `d = 3` steps.
///
/// Each bit position is one candidate step: the `(a, b)` bit pair selects the
/// axis (the pair `(1, 1)` is rejected, leaving three equiprobable axes) and
/// the `c` bit selects the direction. Returns the per-axis displacements of
/// the valid positions and how many there were.
fn block_displacements(a: u64, b: u64, c: u64) -> ([i64; 3], u32) {
    let axes = [!a & !b, !a & b, a & !b];
    let mut delta = [0i64; 3];
    let mut valid = 0u32;
    for (slot, &mask) in delta.iter_mut().zip(&axes) {
        let n = mask.count_ones();
        *slot = 2 * i64::from((mask & c).count_ones()) - i64::from(n);
        valid += n;
    }
    (delta, valid)
}

/// Advances a `d = 3` walk by exactly `k` steps, bit-parallel.
///
/// Callers guarantee the walk cannot return during these steps (we only leap
/// `k = L1 - 1` steps from distance L1), so only the net displacement
/// matters, not the path. Whole 64-bit blocks are consumed while they fit;
/// the final block is decoded bit by bit from the least significant end.
/// Exactly three `u64` draws are consumed per block, independent of the
/// horizon, which keeps trajectories horizon-independent.
fn leap(stream: &mut Stream, k: u64) -> [i64; 3] {
    let mut rem = k;
    let mut total = [0i64; 3];
    while rem > 0 {
        let a = stream.next_u64();
        let b = stream.next_u64();
        let c = stream.next_u64();
        let (delta, valid) = block_displacements(a, b, c);
        if u64::from(valid) <= rem {
            for (slot, d) in total.iter_mut().zip(delta) {
                *slot += d;
            }
            rem -= u64::from(valid);
        } else {
            let mut bit = 0u32;
            while rem > 0 {
                let mask = 1u64 << bit;
                if a & b & mask == 0 {
                    let step = if c & mask != 0 { 1 } else { -1 };
                    let axis = if a & mask == 0 && b & mask == 0 {
                        0
                    } else if a & mask == 0 {
                        1
                    } else {
                        2
                    };
                    total[axis] += step;
                    rem -= 1;
                }
                bit += 1;
            }
        }
    }
    total
}

/// One `d = 3` walk. Near the origin it steps one draw at a time exactly like
/// [`simulate_generic`]; once the L1 distance reaches [`LEAP_MIN`] it takes
/// `L1 - 1` steps at once (a return inside such a leap is impossible, since
/// the distance stays at least `L1 - j > 0` after `j` of them). The escape
/// check at the loop head guarantees `L1 - 1` never overshoots the horizon.
fn simulate_d3(stream: &mut Stream, horizon: u64) -> Outcome {
    let mut coords = [0i64; 3];
    let mut l1: u64 = 0;
    let mut t: u64 = 0;
    while t < horizon {
        if l1 > horizon - t {
            return Outcome::Escaped;
        }
        if l1 >= LEAP_MIN {
            let k = l1 - 1;
            let delta = leap(stream, k);
            for (c, d) in coords.iter_mut().zip(delta) {
                *c += d;
            }
            l1 = coords.iter().map(|c| c.unsigned_abs()).sum();
            t += k;
            continue;
        }
        let draw = stream.next_below(6);
        let dir = if draw & 1 == 1 { 1 } else { -1 };
        let c = &mut coords[(draw >> 1) as usize];
        l1 -= c.unsigned_abs();
        *c += dir;
        l1 += c.unsigned_abs();
        t += 1;
        if l1 == 0 {
            return Outcome::Returned;
        }
    }
    Outcome::Truncated
}

fn simulate(stream: &mut Stream, d: u32, horizon: u64) -> Outcome {
    if d == 3 {
        simulate_d3(stream, horizon)
    } else {
        simulate_generic(stream, d, horizon)
    }
}

/// Runs the contiguous walk-index range `[lo, hi)` and tallies
/// `(returned, escaped, truncated)`.
fn run_range(config: &WalkConfig, lo: u64, hi: u64) -> (u64, u64, u64) {
    let mut tally = (0u64, 0u64, 0u64);
    for walk in lo..hi {
        let mut stream = Stream::for_index(config.seed, walk);
        match simulate(&mut stream, config.d, config.horizon) {
            Outcome::Returned => tally.0 += 1,
            Outcome::Escaped => tally.1 += 1,
            Outcome::Truncated => tally.2 += 1,
        }
    }
    tally
}

/// Estimates the return probability of the simple symmetric walk on `ℤ^d`
/// by direct simulation.
///
/// Every walk `w` draws from the substream keyed by `w`, so the result is
/// fully determined by `(d, walks, horizon, seed)`: worker counts change
/// only the wall clock, never any count, and raising the horizon can only
/// move walks from `truncated`/`escaped` into `returned` (trajectories are
/// horizon-independent prefixes).
pub fn estimate_return(config: &WalkConfig) -> Result<WalkEstimate> {
    if config.d == 0 {
        return Err(Error::invalid("d", "dimension must be at least 1"));
    }
    if config.walks == 0 {
        return Err(Error::invalid("walks", "need at least one walk"));
    }
    if config.horizon < 2 {
        return Err(Error::invalid(
            "horizon",
            "a return needs at least two steps",
        ));
    }
    if config.workers == 0 {
        return Err(Error::invalid("workers", "need at least one worker"));
    }
    let required = u128::from(config.walks) * u128::from(config.horizon);
    if required > config.step_budget {
        return Err(Error::StepBudgetExceeded {
            required,
            budget: config.step_budget,
        });
    }

    let workers = u64::from(config.workers).min(config.walks);
    let mut ranges = Vec::with_capacity(workers as usize);
    let base = config.walks / workers;
    let extra = config.walks % workers;
    let mut start = 0u64;
    for w in 0..workers {
        let len = base + u64::from(w < extra);
        ranges.push((start, start + len));
        start += len;
    }

    let (returned, escaped, truncated) = tally_ranges(config, &ranges);

    let walks = config.walks as f64;
    let p_hat = returned as f64 / walks;
    let std_err = math::sqrt(p_hat * (1.0 - p_hat) / walks);
    // Two-sided 95% normal quantile.
    let z = 1.959_963_984_540_054;
    let ci95 = (
        (p_hat - z * std_err).max(0.0),
        (p_hat + z * std_err).min(1.0),
    );
    Ok(WalkEstimate {
        p_hat,
        std_err,
        ci95,
        returned,
        escaped,
        truncated,
        walks: config.walks,
    })
}

#[cfg(feature = "std")]
fn tally_ranges(config: &WalkConfig, ranges: &[(u64, u64)]) -> (u64, u64, u64) {
    if ranges.len() == 1 {
        return run_range(config, ranges[0].0, ranges[0].1);
    }
    std::thread::scope(|scope| {
        let handles: Vec<_> = ranges
            .iter()
            .map(|&(lo, hi)| scope.spawn(move || run_range(config, lo, hi)))
            .collect();
        let mut total = (0u64, 0u64, 0u64);
        for handle in handles {
            let (r, e, t) = handle.join().expect("walk worker panicked");
            total.0 += r;
            total.1 += e;
            total.2 += t;
        }
        total
    })
}

/// Without threads the ranges run sequentially; the counts are identical
/// because walk substreams never depend on the worker layout.
#[cfg(not(feature = "std"))]
fn tally_ranges(config: &WalkConfig, ranges: &[(u64, u64)]) -> (u64, u64, u64) {
    let mut total = (0u64, 0u64, 0u64);
    for &(lo, hi) in ranges {
        let (r, e, t) = run_range(config, lo, hi);
        total.0 += r;
        total.1 += e;
        total.2 += t;
    }
    total
}
