//! Online arrival-rate estimate with exponential forgetting.

use serde::Serialize;

use crate::building::{Floor, LOBBY};
use crate::error::{domain, Result};

/// Exponentially-decayed arrival counts for lobby and above-lobby origins.
///
/// With decayed count `S(t) = Σ exp(-(t - t_k)/τ)`, the estimate is
/// `S / (τ (1 - exp(-Δ/τ)))` where `Δ` is the time observed so far. The
/// denominator is the decayed length of the observation window, so the
/// estimate is unbiased for a constant rate from the first arrival on.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateEstimator {
    pub decay_s: f64,
    /// Returned for a class that has seen no arrival.
    pub prior: f64,
    start_s: f64,
    last_s: f64,
    lobby: f64,
    above: f64,
    seen_lobby: bool,
    seen_above: bool,
}

/// Shortest window used in the bias correction, so a first arrival at the
/// start time gives a finite estimate.
const MIN_WINDOW_S: f64 = 1.0;

impl RateEstimator {
    pub fn new(decay_s: f64, prior: f64, start_s: f64) -> Result<Self> {
        if !(decay_s.is_finite() && decay_s > 0.0) {
            return domain(format!("rate decay must be finite and > 0, got {decay_s}"));
        }
        if !(prior.is_finite() && prior >= 0.0) {
            return domain(format!("rate prior must be finite and >= 0, got {prior}"));
        }
        Ok(RateEstimator {
            decay_s,
            prior,
            start_s,
            last_s: start_s,
            lobby: 0.0,
            above: 0.0,
            seen_lobby: false,
            seen_above: false,
        })
    }

    fn check_time(&self, time_s: f64) -> Result<()> {
        if !time_s.is_finite() || time_s < self.last_s {
            return domain(format!(
                "estimator time went backwards: {time_s} < {}",
                self.last_s
            ));
        }
        Ok(())
    }

    /// Records one arrival at `origin`.
    pub fn observe(&mut self, origin: Floor, time_s: f64) -> Result<()> {
        self.check_time(time_s)?;
        let f = (-(time_s - self.last_s) / self.decay_s).exp();
        self.lobby *= f;
        self.above *= f;
        if origin == LOBBY {
            self.lobby += 1.0;
            self.seen_lobby = true;
        } else {
            self.above += 1.0;
            self.seen_above = true;
        }
        self.last_s = time_s;
        Ok(())
    }

    fn estimate(&self, count: f64, seen: bool, time_s: f64) -> Result<f64> {
        self.check_time(time_s)?;
        if !seen {
            return Ok(self.prior);
        }
        let tau = self.decay_s;
        let decayed = count * (-(time_s - self.last_s) / tau).exp();
        let window = (time_s - self.start_s).max(MIN_WINDOW_S);
        Ok(decayed / (tau * -(-window / tau).exp_m1()))
    }

    /// Lobby-origin rate at `time_s`, 1/s.
    pub fn lobby_rate(&self, time_s: f64) -> Result<f64> {
        self.estimate(self.lobby, self.seen_lobby, time_s)
    }

    /// Rate of arrivals above the lobby at `time_s`, 1/s.
    pub fn above_rate(&self, time_s: f64) -> Result<f64> {
        self.estimate(self.above, self.seen_above, time_s)
    }

    /// Both classes combined.
    pub fn total_rate(&self, time_s: f64) -> Result<f64> {
        match (self.seen_lobby, self.seen_above) {
            (false, false) => Ok(self.prior),
            (true, false) => self.lobby_rate(time_s),
            (false, true) => self.above_rate(time_s),
            (true, true) => Ok(self.lobby_rate(time_s)? + self.above_rate(time_s)?),
        }
    }
}

/// Functional form of [`RateEstimator::observe`].
pub fn update_rate_estimate(
    mut estimator: RateEstimator,
    origin_floor: Floor,
    time_s: f64,
) -> Result<RateEstimator> {
    estimator.observe(origin_floor, time_s)?;
    Ok(estimator)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prior_without_arrivals() {
        let e = RateEstimator::new(300.0, 0.0, 0.0).unwrap();
        assert_eq!(e.lobby_rate(100.0).unwrap(), 0.0);
        let e = RateEstimator::new(300.0, 0.25, 0.0).unwrap();
        assert_eq!(e.lobby_rate(100.0).unwrap(), 0.25);
    }

    #[test]
    fn steady_arrivals_converge() {
        let mut e = RateEstimator::new(300.0, 0.0, 0.0).unwrap();
        let mut t = 0.0;
        while t < 3000.0 {
            e.observe(1, t).unwrap();
            t += 2.0;
        }
        let r = e.lobby_rate(t - 2.0).unwrap();
        assert!((r / 0.5 - 1.0).abs() < 0.02, "{r}");
        assert_eq!(e.above_rate(t).unwrap(), 0.0);
    }

    #[test]
    fn early_estimate_is_unbiased_for_regular_arrivals() {
        let mut e = RateEstimator::new(300.0, 0.0, 0.0).unwrap();
        for k in 1..=30 {
            e.observe(3, 2.0 * k as f64).unwrap();
        }
        let r = e.above_rate(60.0).unwrap();
        assert!((r - 0.5).abs() < 0.02, "{r}");
    }

    #[test]
    fn single_arrival_is_finite() {
        let e = update_rate_estimate(RateEstimator::new(300.0, 0.0, 0.0).unwrap(), 1, 0.0).unwrap();
        let r = e.lobby_rate(0.0).unwrap();
        assert!(r > 0.0 && r.is_finite());
    }

    #[test]
    fn time_regression_is_rejected() {
        let mut e = RateEstimator::new(300.0, 0.0, 0.0).unwrap();
        e.observe(1, 10.0).unwrap();
        assert!(e.observe(1, 9.0).is_err());
        assert!(e.lobby_rate(5.0).is_err());
        assert!(RateEstimator::new(0.0, 0.0, 0.0).is_err());
    }
}
