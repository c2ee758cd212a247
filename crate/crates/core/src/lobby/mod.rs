//! Expected waits of future lobby passengers for a given landing pattern.

mod cost;
mod grid;
mod montecarlo;
mod poisson;

pub use cost::{closed_form_f, closed_form_g, quadrature_cost, transition_cost};
pub use grid::{build_grid, GridNode, GridState, GridTransition, LobbyGrid};
pub use montecarlo::mc_lobby_wait;
pub use poisson::{ln_factorial, poisson_pmf, tail_prob};

use serde::Serialize;

use crate::error::{domain, Result};

/// Times (seconds from now) at which each car next becomes available at the
/// lobby, sorted ascending. Cars already parked there contribute leading zeros.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LandingPattern {
    pub times_s: Vec<f64>,
    pub parked_count: usize,
}

impl LandingPattern {
    /// Sorted copy of `times`; zero entries count as parked cars.
    pub fn canonicalize(times: &[f64]) -> Result<Self> {
        if let Some(bad) = times.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
            return domain(format!("landing times must be finite and >= 0, got {bad}"));
        }
        let mut times_s = times.to_vec();
        times_s.sort_by(f64::total_cmp);
        let parked_count = times_s.iter().take_while(|&&t| t == 0.0).count();
        Ok(LandingPattern {
            times_s,
            parked_count,
        })
    }

    pub fn cars(&self) -> usize {
        self.times_s.len()
    }

    /// Time of the last landing (`T_C`), zero for an empty pattern.
    pub fn horizon_s(&self) -> f64 {
        self.times_s.last().copied().unwrap_or(0.0)
    }

    pub(crate) fn check_canonical(&self) -> Result<()> {
        let sorted = self.times_s.windows(2).all(|w| w[0] <= w[1]);
        let valid = self.times_s.iter().all(|t| t.is_finite() && *t >= 0.0);
        let zeros = self.times_s.iter().take_while(|&&t| t == 0.0).count();
        if !(sorted && valid && zeros == self.parked_count) {
            return domain("landing pattern is not canonical; call LandingPattern::canonicalize");
        }
        Ok(())
    }
}

/// Expected discounted cumulative wait of future lobby passengers over
/// `[0, T_C]`, read off the start state of the solved grid.
pub fn expected_lobby_wait(pattern: &LandingPattern, rate: f64, beta: f64) -> Result<f64> {
    if rate == 0.0 || pattern.horizon_s() == 0.0 {
        pattern.check_canonical()?;
        return Ok(0.0);
    }
    Ok(build_grid(pattern, rate, beta)?.value())
}

/// Converts a discounted cumulative wait into an average per-passenger wait
/// by dividing by the discounted expected number of arrivals (Little's law).
pub fn normalize_wait(wait: f64, beta: f64, rate: f64, t_last: f64) -> Result<f64> {
    if !(wait.is_finite() && wait >= 0.0) {
        return domain(format!(
            "cumulative wait must be finite and >= 0, got {wait}"
        ));
    }
    if !(beta.is_finite() && beta >= 0.0)
        || !(rate.is_finite() && rate >= 0.0)
        || !(t_last.is_finite() && t_last >= 0.0)
    {
        return domain("beta, rate and t_last must be finite and >= 0");
    }
    if rate == 0.0 || t_last == 0.0 {
        return Ok(0.0);
    }
    if beta == 0.0 {
        return Ok(wait / (rate * t_last));
    }
    Ok(wait * beta / (rate * -(-beta * t_last).exp_m1()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonicalize_examples() {
        let p = LandingPattern::canonicalize(&[30.0, 10.0, 50.0]).unwrap();
        assert_eq!(p.times_s, vec![10.0, 30.0, 50.0]);
        assert_eq!(p.parked_count, 0);
        let p = LandingPattern::canonicalize(&[0.0, 0.0, 12.0]).unwrap();
        assert_eq!(p.times_s, vec![0.0, 0.0, 12.0]);
        assert_eq!(p.parked_count, 2);
        assert!(LandingPattern::canonicalize(&[-1.0, 5.0]).is_err());
        assert!(LandingPattern::canonicalize(&[f64::NAN]).is_err());
    }

    #[test]
    fn non_canonical_pattern_rejected() {
        let p = LandingPattern {
            times_s: vec![5.0, 1.0],
            parked_count: 0,
        };
        assert!(expected_lobby_wait(&p, 0.5, 0.0).is_err());
    }

    #[test]
    fn degenerate_waits_are_zero() {
        let parked = LandingPattern::canonicalize(&[0.0, 0.0, 0.0]).unwrap();
        assert_eq!(expected_lobby_wait(&parked, 0.9, 0.02).unwrap(), 0.0);
        let p = LandingPattern::canonicalize(&[4.0, 8.0]).unwrap();
        assert_eq!(expected_lobby_wait(&p, 0.0, 0.02).unwrap(), 0.0);
    }

    #[test]
    fn single_car_undiscounted() {
        for (rate, t) in [(0.5, 10.0), (2.0, 3.5)] {
            let p = LandingPattern::canonicalize(&[t]).unwrap();
            let v = expected_lobby_wait(&p, rate, 0.0).unwrap();
            assert!((v - rate * t * t / 2.0).abs() < 1e-12 * v);
        }
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize_wait(0.0, 0.02, 0.5, 30.0).unwrap(), 0.0);
        let rate = 2500.0 / 3600.0;
        let v = normalize_wait(100.0, 0.02, rate, 60.0).unwrap();
        let expect = 100.0 * 0.02 / (rate * (1.0 - (-1.2f64).exp()));
        assert!((v - expect).abs() < 1e-12 * expect);
        assert_eq!(normalize_wait(5.0, 0.02, 0.0, 60.0).unwrap(), 0.0);
        assert_eq!(normalize_wait(5.0, 0.02, 0.5, 0.0).unwrap(), 0.0);
        assert!(normalize_wait(-1.0, 0.02, 0.5, 1.0).is_err());
    }

    #[test]
    fn normalized_single_car_is_half_the_gap() {
        let (rate, t) = (0.5, 40.0);
        let p = LandingPattern::canonicalize(&[t]).unwrap();
        let v0 = expected_lobby_wait(&p, rate, 0.0).unwrap();
        assert!((normalize_wait(v0, 0.0, rate, t).unwrap() - t / 2.0).abs() < 1e-12);
        let vb = expected_lobby_wait(&p, rate, 1e-6).unwrap();
        let bar = normalize_wait(vb, 1e-6, rate, t).unwrap();
        assert!((bar / (t / 2.0) - 1.0).abs() < 1e-3);
    }
}
