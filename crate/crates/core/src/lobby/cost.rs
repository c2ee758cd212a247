//! Expected discounted waiting cost of the single costly transition leaving
//! a lobby-grid state.
//!
//! With `j` idle cars at the lobby and the next landing `dt` seconds after
//! `t_start`, the cost is
//!
//! ```text
//! R = ∫_{t_start}^{t_start+dt} e^{-βt} E[(N(t - t_start) - j)^+] dt,   N(s) ~ Poisson(λs)
//! ```
//!
//! [`quadrature_cost`] integrates this numerically and is the reference.
//! [`closed_form_f`] and [`closed_form_g`] are the analytic antiderivatives;
//! [`transition_cost`] evaluates the same closed form in a rearranged,
//! cancellation-free way and is what the grid uses.

use std::collections::BinaryHeap;

use crate::error::{domain, Error, Result};

use super::poisson::{expected_excess, upper_tail};

fn check(j_rate_beta: (f64, f64), t: f64) -> Result<()> {
    let (rate, beta) = j_rate_beta;
    if !(rate.is_finite() && rate >= 0.0) {
        return domain(format!("rate must be finite and >= 0, got {rate}"));
    }
    if !(beta.is_finite() && beta >= 0.0) {
        return domain(format!("beta must be finite and >= 0, got {beta}"));
    }
    if !(t.is_finite() && t >= 0.0) {
        return domain(format!("time must be finite and >= 0, got {t}"));
    }
    Ok(())
}

fn factorial(n: u64) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Inner sum shared by both antiderivatives:
/// `Σ_{x=0}^{j} λ^x e^{-a t} (x - j) Σ_{l=0}^{x} t^{x-l} / ((x-l)! a^{l+1})`.
fn poisson_part(t: f64, j: u64, rate: f64, a: f64) -> f64 {
    let decay = (-a * t).exp();
    (0..=j)
        .map(|x| {
            let inner: f64 = (0..=x)
                .map(|l| t.powi((x - l) as i32) / (factorial(x - l) * a.powi(l as i32 + 1)))
                .sum();
            rate.powi(x as i32) * decay * (x as f64 - j as f64) * inner
        })
        .sum()
}

/// Undiscounted antiderivative `G(t)` (integration constant zero), so that the
/// cost over an interval of length `dt` is `G(dt) - G(0)`.
pub fn closed_form_g(t: f64, j: u64, rate: f64) -> Result<f64> {
    check((rate, 0.0), t)?;
    if rate == 0.0 {
        return Ok(-(j as f64) * t);
    }
    Ok(poisson_part(t, j, rate, rate) + 0.5 * rate * t * t - j as f64 * t)
}

/// Discounted antiderivative `F(t)` for `beta > 0` (integration constant
/// zero): the cost is `e^{-β t_start} [F(dt) - F(0)]`.
///
/// The non-Poisson term is `(βj - βλt - λ) e^{-βt} / β²`, the antiderivative
/// of `e^{-βt} (λt - j)`.
pub fn closed_form_f(t: f64, j: u64, rate: f64, beta: f64) -> Result<f64> {
    check((rate, beta), t)?;
    if beta <= 0.0 {
        return domain("closed_form_f needs beta > 0; use closed_form_g");
    }
    let a = rate + beta;
    let jf = j as f64;
    let tail = (beta * jf - beta * rate * t - rate) * (-beta * t).exp() / (beta * beta);
    Ok(poisson_part(t, j, rate, a) + tail)
}

/// `∫_0^dt e^{-βs} ds`, stable as β → 0.
fn discount_mass(beta: f64, dt: f64) -> f64 {
    if beta == 0.0 {
        dt
    } else {
        -(-beta * dt).exp_m1() / beta
    }
}

/// `∫_0^dt s e^{-βs} ds`, stable as β → 0.
fn discount_first_moment(beta: f64, dt: f64) -> f64 {
    let z = beta * dt;
    if z < 0.5 {
        // dt² Σ (-z)^k / (k! (k + 2))
        let mut sum = 0.0;
        let mut pow = 1.0;
        for k in 0..60u32 {
            let term = pow / f64::from(k + 2);
            sum += term;
            if term.abs() < 1e-18 * sum.abs() {
                break;
            }
            pow *= -z / f64::from(k + 1);
        }
        dt * dt * sum
    } else {
        (1.0 - (-z).exp() * (1.0 + z)) / (beta * beta)
    }
}

/// Closed-form transition cost, evaluated without catastrophic cancellation.
///
/// Writing `a = λ + β`, `ρ = λ / a`, `y = a·dt` and `P(n, y) = P[Poisson(y) >= n]`,
/// the antiderivative difference equals
///
/// ```text
/// (1/a) Σ_{x=0}^{j} (j - x) ρ^x P(x+1, y) + λ ∫_0^dt s e^{-βs} ds - j ∫_0^dt e^{-βs} ds
/// ```
///
/// When those terms nearly cancel (a tiny expected excess), the equivalent
/// positive series `(1/a) Σ_{x>j} (x - j) ρ^x P(x+1, y)` is summed instead.
pub fn transition_cost(j: u64, t_start: f64, dt: f64, rate: f64, beta: f64) -> Result<f64> {
    check((rate, beta), t_start)?;
    check((rate, beta), dt)?;
    Ok(transition_cost_unchecked(j, t_start, dt, rate, beta))
}

pub(crate) fn transition_cost_unchecked(
    j: u64,
    t_start: f64,
    dt: f64,
    rate: f64,
    beta: f64,
) -> f64 {
    if rate == 0.0 || dt == 0.0 {
        return 0.0;
    }
    let a = rate + beta;
    let rho = rate / a;
    let y = a * dt;
    let jf = j as f64;

    let mut poisson = 0.0;
    let mut rho_x = 1.0;
    for x in 0..=j {
        poisson += (jf - x as f64) * rho_x * upper_tail(y, x + 1);
        rho_x *= rho;
    }
    poisson /= a;
    let linear = rate * discount_first_moment(beta, dt);
    let constant = jf * discount_mass(beta, dt);
    let value = poisson + linear - constant;
    let scale = poisson + linear + constant;

    let base = if value > 1e-6 * scale {
        value
    } else {
        excess_series(j, rho, y) / a
    };
    (-beta * t_start).exp() * base.max(0.0)
}

/// `Σ_{x>j} (x - j) ρ^x P(x+1, y)`.
fn excess_series(j: u64, rho: f64, y: f64) -> f64 {
    let mut sum = 0.0;
    let mut rho_x = rho.powi(j as i32 + 1);
    let mut x = j + 1;
    loop {
        let weight = (x - j) as f64;
        let term = weight * rho_x * upper_tail(y, x + 1);
        sum += term;
        // Remaining mass bounded by a geometric tail when ρ < 1, and by the
        // factorial decay of P once x exceeds y.
        let geometric_rest = if rho < 1.0 {
            rho_x * rho * ((weight + 1.0) / (1.0 - rho) + rho / ((1.0 - rho) * (1.0 - rho)))
        } else {
            f64::INFINITY
        };
        let past_mode = (x + 1) as f64 > y && term <= 1e-18 * sum;
        if geometric_rest <= 1e-17 * sum
            || past_mode
            || sum == 0.0 && rho_x == 0.0
            || x > j + 200_000
        {
            break;
        }
        rho_x *= rho;
        x += 1;
    }
    sum
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One Gauss–Kronrod 7/15 panel: (Kronrod estimate, |Kronrod - Gauss|).
fn gk15<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> (f64, f64) {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for i in 0..7 {
        let dx = half * XGK[i];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[i] * pair;
        if i % 2 == 1 {
            gauss += WG[i / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

struct Panel {
    lo: f64,
    hi: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Globally adaptive Gauss–Kronrod integration to relative tolerance `tol`.
pub(crate) fn integrate<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    tol: f64,
    max_panels: usize,
) -> Result<f64> {
    let (v, e) = gk15(&f, lo, hi);
    let mut total = v;
    let mut total_err = e;
    let mut heap = BinaryHeap::new();
    heap.push(Panel {
        lo,
        hi,
        value: v,
        err: e,
    });
    while total_err > tol * total.abs() && total_err > f64::MIN_POSITIVE {
        if heap.len() >= max_panels {
            return Err(Error::Numeric(format!(
                "quadrature on [{lo}, {hi}] did not converge: estimate {total:e}, error {total_err:e}, tolerance {tol:e}, {} panels",
                heap.len()
            )));
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.lo + worst.hi);
        let (lv, le) = gk15(&f, worst.lo, mid);
        let (rv, re) = gk15(&f, mid, worst.hi);
        total += lv + rv - worst.value;
        total_err += le + re - worst.err;
        heap.push(Panel {
            lo: worst.lo,
            hi: mid,
            value: lv,
            err: le,
        });
        heap.push(Panel {
            lo: mid,
            hi: worst.hi,
            value: rv,
            err: re,
        });
    }
    // Re-sum to shed accumulated update error.
    Ok(heap.iter().map(|p| p.value).sum())
}

/// Transition cost by adaptive quadrature of the defining integral.
pub fn quadrature_cost(
    j: u64,
    t_start: f64,
    dt: f64,
    rate: f64,
    beta: f64,
    tol: f64,
) -> Result<f64> {
    check((rate, beta), t_start)?;
    check((rate, beta), dt)?;
    if tol.is_nan() || tol <= 0.0 {
        return domain(format!("tolerance must be > 0, got {tol}"));
    }
    if rate == 0.0 || dt == 0.0 {
        return Ok(0.0);
    }
    let trunc = tol / 100.0;
    let integrand =
        |t: f64| (-beta * t).exp() * expected_excess(rate * (t - t_start).max(0.0), j, trunc);
    integrate(integrand, t_start, t_start + dt, tol, 4000)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        if a == b {
            0.0
        } else {
            (a - b).abs() / b.abs().max(a.abs())
        }
    }

    #[test]
    fn integrator_handles_polynomials_and_exponentials() {
        let v = integrate(|x| x * x, 0.0, 1.0, 1e-14, 100).unwrap();
        assert!(rel(v, 1.0 / 3.0) < 1e-14);
        let v = integrate(|x| (-3.0 * x).exp(), 0.0, 10.0, 1e-13, 1000).unwrap();
        assert!(rel(v, (1.0 - (-30f64).exp()) / 3.0) < 1e-12);
    }

    #[test]
    fn integrator_reports_non_convergence() {
        let err = integrate(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, 1e-15, 3).unwrap_err();
        assert!(matches!(err, Error::Numeric(_)));
        assert!(err.to_string().contains("did not converge"));
    }

    #[test]
    fn j_zero_undiscounted_is_quadratic() {
        let (rate, dt) = (1.0, 2.0);
        assert!(rel(transition_cost(0, 0.0, dt, rate, 0.0).unwrap(), 2.0) < 1e-14);
        let q = quadrature_cost(0, 0.0, dt, rate, 0.0, 1e-12).unwrap();
        assert!(rel(q, 2.0) < 1e-11);
        let g = closed_form_g(dt, 0, rate).unwrap() - closed_form_g(0.0, 0, rate).unwrap();
        assert!(rel(g, 2.0) < 1e-14);
    }

    #[test]
    fn j_one_undiscounted_matches_reduction() {
        for (rate, dt) in [(0.3f64, 4.0f64), (1.0, 2.0), (2.0, 30.0)] {
            let expect = rate * dt * dt / 2.0 - dt + (1.0 - (-rate * dt).exp()) / rate;
            let g = closed_form_g(dt, 1, rate).unwrap() - closed_form_g(0.0, 1, rate).unwrap();
            assert!(rel(g, expect) < 1e-10);
            assert!(rel(transition_cost(1, 0.0, dt, rate, 0.0).unwrap(), expect) < 1e-10);
            // Oracle: ∫ (λt - 1 + e^{-λt}) dt by quadrature of the elementary form.
            let q =
                integrate(|t| rate * t - 1.0 + (-rate * t).exp(), 0.0, dt, 1e-13, 1000).unwrap();
            assert!(rel(q, expect) < 1e-10);
        }
    }

    #[test]
    fn j_zero_discounted_matches_integration_by_parts() {
        for (rate, beta, dt) in [
            (0.7f64, 0.02f64, 10.0f64),
            (2.0, 0.1, 30.0),
            (0.1, 0.5, 0.5),
        ] {
            let expect = rate
                * ((1.0 - (-beta * dt).exp()) / (beta * beta) - dt * (-beta * dt).exp() / beta);
            let f = closed_form_f(dt, 0, rate, beta).unwrap()
                - closed_form_f(0.0, 0, rate, beta).unwrap();
            assert!(rel(f, expect) < 1e-10, "{f} vs {expect}");
            assert!(rel(transition_cost(0, 0.0, dt, rate, beta).unwrap(), expect) < 1e-12);
        }
    }

    #[test]
    fn zero_length_and_zero_rate() {
        for j in 0..5 {
            assert_eq!(transition_cost(j, 3.0, 0.0, 0.7, 0.02).unwrap(), 0.0);
            assert_eq!(transition_cost(j, 3.0, 5.0, 0.0, 0.02).unwrap(), 0.0);
            assert_eq!(quadrature_cost(j, 3.0, 5.0, 0.0, 0.02, 1e-10).unwrap(), 0.0);
            let f0 = closed_form_f(0.0, j, 0.7, 0.02).unwrap();
            assert_eq!(f0 - f0, 0.0);
        }
        // λ = 0 limit of G: no arrivals, no cost after differencing.
        assert_eq!(
            closed_form_g(5.0, 3, 0.0).unwrap() - closed_form_g(0.0, 3, 0.0).unwrap() + 15.0,
            0.0
        );
    }

    #[test]
    fn f_rejects_nonpositive_beta() {
        assert!(closed_form_f(1.0, 1, 1.0, 0.0).is_err());
        assert!(quadrature_cost(1, 0.0, 1.0, 1.0, 0.0, 0.0).is_err());
        assert!(transition_cost(1, -1.0, 1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn literal_antiderivative_agrees_where_well_conditioned() {
        for j in 0..6u64 {
            for (rate, beta, dt, t0) in [
                (0.7f64, 0.02f64, 5.0f64, 0.0f64),
                (2.0, 0.1, 30.0, 20.0),
                (0.7, 0.01, 30.0, 5.0),
            ] {
                let lit = (-beta * t0).exp()
                    * (closed_form_f(dt, j, rate, beta).unwrap()
                        - closed_form_f(0.0, j, rate, beta).unwrap());
                let stable = transition_cost(j, t0, dt, rate, beta).unwrap();
                let quad = quadrature_cost(j, t0, dt, rate, beta, 1e-12).unwrap();
                assert!(rel(stable, quad) < 1e-9, "j={j} {stable} vs {quad}");
                // The literal form loses digits to cancellation; demand less.
                assert!(rel(lit, quad) < 1e-6, "j={j} literal {lit} vs {quad}");
            }
        }
    }

    #[test]
    fn printed_middle_term_fails_the_j0_check() {
        // (βj - βλ - λ) e^{-βt} / β² instead of (βj - βλt - λ) e^{-βt} / β².
        let (rate, beta, dt) = (0.7, 0.02, 10.0);
        let printed =
            |t: f64| (beta * 0.0 - beta * rate - rate) * (-beta * t).exp() / (beta * beta);
        let wrong = printed(dt) - printed(0.0);
        let truth = quadrature_cost(0, 0.0, dt, rate, beta, 1e-12).unwrap();
        assert!(rel(wrong, truth) > 0.1);
        let right =
            closed_form_f(dt, 0, rate, beta).unwrap() - closed_form_f(0.0, 0, rate, beta).unwrap();
        assert!(rel(right, truth) < 1e-9);
    }

    #[test]
    fn continuity_at_zero_discount() {
        for j in 0..8u64 {
            for rate in [0.1, 0.7, 2.0] {
                for dt in [0.5, 5.0, 30.0] {
                    let r0 = transition_cost(j, 0.0, dt, rate, 0.0).unwrap();
                    let rb = transition_cost(j, 0.0, dt, rate, 1e-8).unwrap();
                    assert!(
                        (rb - r0).abs() <= 1e-6 * r0.max(1.0),
                        "j={j} λ={rate} dt={dt}"
                    );
                }
            }
        }
    }

    #[test]
    fn pinned_dual_path_example() {
        let q = quadrature_cost(3, 5.0, 10.0, 0.7, 0.02, 1e-12).unwrap();
        let c = transition_cost(3, 5.0, 10.0, 0.7, 0.02).unwrap();
        assert!(rel(c, q) < 1e-8);
        assert!(q > 0.0);
    }
}
