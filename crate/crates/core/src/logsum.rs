//! Log-space accumulation for partition functions and Boltzmann weights.

use alloc::vec::Vec;

#[allow(unused_imports)] // float math under no_std; shadowed when std is linked
use num_traits::Float;

/// `ln(e^a + e^b)` without overflow.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// `ln Σ e^{x_i}`; `-inf` for an empty input.
pub fn logsumexp<I>(values: I) -> f64
where
    I: IntoIterator<Item = f64>,
    I::IntoIter: Clone,
{
    let iter = values.into_iter();
    let max = iter.clone().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY || !max.is_finite() {
        return max;
    }
    let sum: f64 = iter.map(|x| (x - max).exp()).sum();
    max + sum.ln()
}

/// `ln(2 cosh x)`, stable for large `|x|`.
pub fn ln_2cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p()
}

/// Probabilities `e^{l_i} / Σ_j e^{l_j}` together with the log normalizer.
///
/// Summation runs in index order, so the result does not depend on how the
/// caller schedules work.
#[derive(Debug, Clone, PartialEq)]
pub struct Normalized {
    pub probs: Vec<f64>,
    pub log_total: f64,
}

pub fn normalize_log_weights(log_weights: &[f64]) -> Normalized {
    let max = log_weights
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    if log_weights.is_empty() || max == f64::NEG_INFINITY {
        return Normalized {
            probs: alloc::vec![0.0; log_weights.len()],
            log_total: f64::NEG_INFINITY,
        };
    }
    let scaled: Vec<f64> = log_weights.iter().map(|&l| (l - max).exp()).collect();
    let sum: f64 = scaled.iter().sum();
    Normalized {
        probs: scaled.into_iter().map(|w| w / sum).collect(),
        log_total: max + sum.ln(),
    }
}
