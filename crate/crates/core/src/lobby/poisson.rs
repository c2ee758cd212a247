//! Poisson probabilities evaluated in log space.

use std::sync::OnceLock;

use crate::error::{domain, Result};

const TABLE: usize = 1024;

fn ln_factorial_table() -> &'static [f64] {
    static TABLE_CELL: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE_CELL.get_or_init(|| {
        let mut t = Vec::with_capacity(TABLE);
        let mut acc = 0.0;
        t.push(0.0);
        for k in 1..TABLE {
            acc += (k as f64).ln();
            t.push(acc);
        }
        t
    })
}

/// ln(n!) by table lookup, Stirling's series past the table.
pub fn ln_factorial(n: u64) -> f64 {
    if (n as usize) < TABLE {
        return ln_factorial_table()[n as usize];
    }
    let x = n as f64 + 1.0;
    // ln Γ(x), asymptotic series
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI).ln() + 1.0 / (12.0 * x)
        - 1.0 / (360.0 * x.powi(3))
        + 1.0 / (1260.0 * x.powi(5))
}

/// P[N = x] for N ~ Poisson(mu).
#[inline]
pub(crate) fn pmf_mu(mu: f64, x: u64) -> f64 {
    if mu == 0.0 {
        return if x == 0 { 1.0 } else { 0.0 };
    }
    (x as f64 * mu.ln() - mu - ln_factorial(x)).exp()
}

/// P[N >= n] for N ~ Poisson(mu), accurate in relative terms for small tails.
pub(crate) fn upper_tail(mu: f64, n: u64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    if mu == 0.0 {
        return 0.0;
    }
    if (n as f64) > mu {
        // Terms decrease from k = n on; sum them forward.
        let mut term = pmf_mu(mu, n);
        let mut sum = term;
        let mut k = n;
        while term > sum * 1e-17 && k < n + 100_000 {
            k += 1;
            term *= mu / k as f64;
            sum += term;
        }
        sum.min(1.0)
    } else {
        let lower: f64 = (0..n).map(|k| pmf_mu(mu, k)).sum();
        (1.0 - lower).clamp(0.0, 1.0)
    }
}

/// E[(N - j)^+] for N ~ Poisson(mu). The infinite tail series is truncated
/// once a term drops below `rel_trunc` times the running sum.
pub(crate) fn expected_excess(mu: f64, j: u64, rel_trunc: f64) -> f64 {
    if mu == 0.0 {
        return 0.0;
    }
    if mu < (j + 1) as f64 {
        let mut x = j + 1;
        let mut p = pmf_mu(mu, x);
        let mut sum = p;
        loop {
            x += 1;
            p *= mu / x as f64;
            let term = p * (x - j) as f64;
            sum += term;
            if term <= sum * rel_trunc || p == 0.0 || x > j + 100_000 {
                break;
            }
        }
        sum
    } else {
        // Finite form: E[N] - j + sum_{x<=j} p(x) (j - x).
        let mut p = (-mu).exp();
        let mut below = 0.0;
        if p > 0.0 {
            for x in 0..=j {
                if x > 0 {
                    p *= mu / x as f64;
                }
                below += p * (j - x) as f64;
            }
        } else {
            below = (0..=j).map(|x| pmf_mu(mu, x) * (j - x) as f64).sum();
        }
        mu - j as f64 + below
    }
}

fn check_rate_dt(rate: f64, dt: f64) -> Result<()> {
    if !(rate.is_finite() && rate >= 0.0) {
        return domain(format!("arrival rate must be finite and >= 0, got {rate}"));
    }
    if !(dt.is_finite() && dt >= 0.0) {
        return domain(format!("interval must be finite and >= 0, got {dt}"));
    }
    Ok(())
}

/// Probability that exactly `x` arrivals of a rate-`rate` Poisson process
/// fall in an interval of length `dt`.
pub fn poisson_pmf(rate: f64, dt: f64, x: u64) -> Result<f64> {
    check_rate_dt(rate, dt)?;
    Ok(pmf_mu(rate * dt, x))
}

/// Probability of at least `n` arrivals in an interval of length `dt`.
pub fn tail_prob(rate: f64, dt: f64, n: u64) -> Result<f64> {
    check_rate_dt(rate, dt)?;
    Ok(upper_tail(rate * dt, n))
}
