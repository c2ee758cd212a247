//! Mean, standard error and the paired sign test.

use serde::Serialize;

use crate::lobby::ln_factorial;

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Standard error of the mean (sample standard deviation / sqrt n).
pub fn stderr(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 2 {
        return 0.0;
    }
    let m = mean(xs);
    let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1) as f64;
    (var / n as f64).sqrt()
}

/// P[X >= k] for X ~ Binomial(n, 1/2).
pub fn binomial_upper_tail(k: usize, n: usize) -> f64 {
    if k == 0 {
        return 1.0;
    }
    if k > n {
        return 0.0;
    }
    let ln_half_n = n as f64 * 0.5f64.ln();
    (k..=n)
        .map(|i| {
            (ln_factorial(n as u64) - ln_factorial(i as u64) - ln_factorial((n - i) as u64)
                + ln_half_n)
                .exp()
        })
        .sum::<f64>()
        .min(1.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SignTest {
    /// Pairs where the candidate was strictly lower.
    pub wins: usize,
    pub losses: usize,
    pub ties: usize,
    /// One-sided p-value for "candidate lower", ties dropped.
    pub p_value: f64,
}

/// Paired one-sided sign test of `candidate < baseline`.
pub fn sign_test(candidate: &[f64], baseline: &[f64]) -> SignTest {
    assert_eq!(
        candidate.len(),
        baseline.len(),
        "sign test needs paired samples"
    );
    let mut wins = 0;
    let mut losses = 0;
    let mut ties = 0;
    for (c, b) in candidate.iter().zip(baseline) {
        match c.partial_cmp(b) {
            Some(std::cmp::Ordering::Less) => wins += 1,
            Some(std::cmp::Ordering::Greater) => losses += 1,
            _ => ties += 1,
        }
    }
    SignTest {
        wins,
        losses,
        ties,
        p_value: binomial_upper_tail(wins, wins + losses),
    }
}
