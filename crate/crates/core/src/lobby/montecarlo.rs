//! Direct simulation of lobby arrivals against a fixed landing pattern, used
//! as an independent check on the grid.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::LandingPattern;
use crate::error::{domain, Result};

/// Integral of `e^{-βt}` over `[a, b]`.
fn discounted_span(a: f64, b: f64, beta: f64) -> f64 {
    if beta == 0.0 {
        b - a
    } else {
        ((-beta * a).exp() - (-beta * b).exp()) / beta
    }
}

/// One replication: returns `∫_0^{T_C} e^{-βt} n(t) dt`.
///
/// Arrivals take an idle car if there is one (the car leaves at once),
/// otherwise they queue. A landing car takes the whole queue, or joins the
/// idle pool when nobody waits.
pub(crate) fn replicate<R: Rng>(
    pattern: &LandingPattern,
    rate: f64,
    beta: f64,
    rng: &mut R,
) -> f64 {
    let horizon = pattern.horizon_s();
    let mut idle = 0usize;
    let mut queue = 0u64;
    let mut now = 0.0;
    let mut acc = 0.0;
    let mut next_arrival = if rate > 0.0 {
        exp_gap(rate, rng)
    } else {
        f64::INFINITY
    };
    for &landing in &pattern.times_s {
        while next_arrival < landing {
            acc += queue as f64 * discounted_span(now, next_arrival, beta);
            now = next_arrival;
            if idle > 0 {
                idle -= 1;
            } else {
                queue += 1;
            }
            debug_assert!(idle == 0 || queue == 0);
            next_arrival += exp_gap(rate, rng);
        }
        acc += queue as f64 * discounted_span(now, landing, beta);
        now = landing;
        if queue > 0 {
            queue = 0;
        } else {
            idle += 1;
        }
        debug_assert!(idle == 0 || queue == 0);
    }
    debug_assert!((now - horizon).abs() < 1e-12 || pattern.times_s.is_empty());
    acc
}

fn exp_gap<R: Rng>(rate: f64, rng: &mut R) -> f64 {
    // 1 - U lies in (0, 1].
    -(1.0 - rng.gen::<f64>()).ln() / rate
}

/// Monte-Carlo estimate of the expected discounted lobby wait:
/// `(mean, standard error)` over `reps` replications.
pub fn mc_lobby_wait(
    pattern: &LandingPattern,
    rate: f64,
    beta: f64,
    reps: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    if reps == 0 {
        return domain("reps must be >= 1");
    }
    if !(rate.is_finite() && rate >= 0.0) || !(beta.is_finite() && beta >= 0.0) {
        return domain("rate and beta must be finite and >= 0");
    }
    pattern.check_canonical()?;
    if rate == 0.0 {
        return Ok((0.0, 0.0));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..reps {
        let v = replicate(pattern, rate, beta, &mut rng);
        sum += v;
        sum_sq += v * v;
    }
    let n = reps as f64;
    let mean = sum / n;
    let var = if reps > 1 {
        ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    Ok((mean, (var / n).sqrt()))
}
