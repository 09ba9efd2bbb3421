//! Small numerical utilities: compensated summation, truncated power-series
//! arithmetic, and a thin-QR least-squares solver.

use alloc::vec;
use alloc::vec::Vec;

use crate::math;

/// Neumaier's improvement of Kahan compensated summation.
///
/// Keeps the running error of a long sum at O(1) ulps regardless of term
/// ordering, which matters for the `10^5`-term series and the panel sums of
/// the adaptive quadrature.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Accumulator {
    sum: f64,
    compensation: f64,
}

impl Accumulator {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, term: f64) {
        let t = self.sum + term;
        if self.sum.abs() >= term.abs() {
            self.compensation += (self.sum - t) + term;
        } else {
            self.compensation += (term - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// Sum of a slice with compensated accumulation, in slice order.
pub(crate) fn compensated_sum(terms: &[f64]) -> f64 {
    let mut acc = Accumulator::new();
    for &t in terms {
        acc.add(t);
    }
    acc.value()
}

/// Log-space convolution entry: `log(sum_{m} exp(a[m] + b[k-m]))` where
/// `k = a.len() - 1` and both slices have length `k + 1`. Streamed via the
/// log-sum-exp trick because the summands span thousands of orders of
/// magnitude.
pub(crate) fn log_sum_exp_conv(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len();
    debug_assert_eq!(n, b.len());
    let mut max = f64::NEG_INFINITY;
    for i in 0..n {
        let v = a[i] + b[n - 1 - i];
        if v > max {
            max = v;
        }
    }
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let mut acc = Accumulator::new();
    for i in 0..n {
        acc.add(math::exp(a[i] + b[n - 1 - i] - max));
    }
    max + math::ln(acc.value())
}

/// Product of two power series truncated at degree `trunc` (inclusive).
pub(crate) fn poly_mul_trunc(a: &[f64], b: &[f64], trunc: usize) -> Vec<f64> {
    let mut out = vec![0.0; trunc + 1];
    for (i, &ai) in a.iter().enumerate().take(trunc + 1) {
        if ai == 0.0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate().take(trunc + 1 - i) {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// `base^n` as a power series truncated at degree `trunc`, by repeated
/// squaring.
pub(crate) fn poly_pow_trunc(base: &[f64], n: u32, trunc: usize) -> Vec<f64> {
    let mut result = vec![0.0; trunc + 1];
    result[0] = 1.0;
    let mut sq: Vec<f64> = base.iter().copied().take(trunc + 1).collect();
    sq.resize(trunc + 1, 0.0);
    let mut n = n;
    while n > 0 {
        if n & 1 == 1 {
            result = poly_mul_trunc(&result, &sq, trunc);
        }
        n >>= 1;
        if n > 0 {
            sq = poly_mul_trunc(&sq, &sq, trunc);
        }
    }
    result
}

/// Least-squares fit of `h(i) ~ sum_k beta_k * w(i)^k`, `k < n_coeffs`,
/// via thin QR (modified Gram–Schmidt with one reorthogonalization pass).
///
/// QR avoids squaring the condition number the way normal equations would;
/// the Vandermonde bases used by the series tail fit have condition numbers
/// of a few hundred, comfortably inside f64 with this approach.
pub(crate) fn lstsq_monomials(w: &[f64], h: &[f64], n_coeffs: usize) -> Vec<f64> {
    let m = w.len();
    debug_assert!(m >= n_coeffs && h.len() == m);
    // Build the design matrix column by column: col_k[i] = w[i]^k.
    let mut q: Vec<Vec<f64>> = Vec::with_capacity(n_coeffs);
    let mut r = vec![vec![0.0; n_coeffs]; n_coeffs];
    for k in 0..n_coeffs {
        let mut v: Vec<f64> = w.iter().map(|&wi| math::powi(wi, k as i32)).collect();
        for _pass in 0..2 {
            for (j, qj) in q.iter().enumerate() {
                let dot: f64 = qj.iter().zip(&v).map(|(a, b)| a * b).sum();
                r[j][k] += dot;
                for (vi, qi) in v.iter_mut().zip(qj) {
                    *vi -= dot * qi;
                }
            }
        }
        let norm = math::sqrt(v.iter().map(|x| x * x).sum::<f64>());
        r[k][k] = norm;
        if norm > 0.0 {
            for vi in &mut v {
                *vi /= norm;
            }
        }
        q.push(v);
    }
    // beta = R^{-1} Q^T h by back substitution.
    let qth: Vec<f64> = q
        .iter()
        .map(|qj| qj.iter().zip(h).map(|(a, b)| a * b).sum())
        .collect();
    let mut beta = vec![0.0; n_coeffs];
    for k in (0..n_coeffs).rev() {
        let mut s = qth[k];
        for j in k + 1..n_coeffs {
            s -= r[k][j] * beta[j];
        }
        beta[k] = if r[k][k] != 0.0 { s / r[k][k] } else { 0.0 };
    }
    beta
}
