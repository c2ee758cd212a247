use elevator_lookahead::lobby::{
    expected_lobby_wait, mc_lobby_wait, normalize_wait, quadrature_cost, transition_cost,
    LandingPattern,
};
use proptest::prelude::*;

fn wait(times: &[f64], rate: f64, beta: f64) -> f64 {
    expected_lobby_wait(&LandingPattern::canonicalize(times).unwrap(), rate, beta).unwrap()
}

fn landing_times() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![1 => Just(0.0), 4 => 0.0..80.0f64], 1..=6)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn order_of_landings_does_not_matter(times in landing_times(), rate in 0.05..1.5f64, beta in 0.0..0.1f64, rot in 0usize..6) {
        let mut shuffled = times.clone();
        let n = shuffled.len();
        shuffled.rotate_left(rot % n);
        shuffled.reverse();
        prop_assert_eq!(wait(&times, rate, beta), wait(&shuffled, rate, beta));
    }

    #[test]
    fn a_later_last_landing_costs_more(times in landing_times(), delay in 0.5..20.0f64, rate in 0.05..1.5f64, beta in 0.0..0.1f64) {
        let mut later = times.clone();
        later.sort_by(f64::total_cmp);
        *later.last_mut().unwrap() += delay;
        let (a, b) = (wait(&times, rate, beta), wait(&later, rate, beta));
        prop_assert!(b >= a * (1.0 - 1e-12), "{} < {}", b, a);
    }

    #[test]
    fn higher_rate_costs_more(times in landing_times(), rate in 0.05..1.0f64, bump in 0.01..1.0f64, beta in 0.0..0.1f64) {
        let (a, b) = (wait(&times, rate, beta), wait(&times, rate + bump, beta));
        prop_assert!(b >= a * (1.0 - 1e-12));
    }

    #[test]
    fn discounting_lowers_the_cost(times in landing_times(), rate in 0.05..1.5f64, beta in 0.0..0.2f64, more in 0.001..0.2f64) {
        let (a, b) = (wait(&times, rate, beta), wait(&times, rate, beta + more));
        prop_assert!(b <= a * (1.0 + 1e-12));
    }

    #[test]
    fn average_wait_is_at_most_the_horizon(times in landing_times(), rate in 0.05..1.5f64) {
        let p = LandingPattern::canonicalize(&times).unwrap();
        let v = normalize_wait(expected_lobby_wait(&p, rate, 0.0).unwrap(), 0.0, rate, p.horizon_s()).unwrap();
        prop_assert!(v >= 0.0 && v <= p.horizon_s() * (1.0 + 1e-12));
    }

    #[test]
    fn closed_form_matches_quadrature(j in 0u64..10, t0 in 0.0..60.0f64, dt in 0.01..60.0f64, rate in 0.01..3.0f64, beta in 0.0..0.3f64) {
        let cf = transition_cost(j, t0, dt, rate, beta).unwrap();
        let q = quadrature_cost(j, t0, dt, rate, beta, 1e-13).unwrap();
        let scale = cf.abs().max(q.abs());
        prop_assert!((cf - q).abs() <= 1e-8 * scale + 1e-300, "cf {} q {}", cf, q);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn grid_agrees_with_simulation(times in prop::collection::vec(0.0..40.0f64, 2..=4), rate in 0.1..1.0f64, discounted in any::<bool>(), seed in any::<u64>()) {
        let beta = if discounted { 0.02 } else { 0.0 };
        let p = LandingPattern::canonicalize(&times).unwrap();
        let dp = expected_lobby_wait(&p, rate, beta).unwrap();
        let (mc, se) = mc_lobby_wait(&p, rate, beta, 40_000, seed).unwrap();
        prop_assert!((dp - mc).abs() <= 4.0 * se + 1e-9, "dp {} mc {} se {}", dp, mc, se);
    }
}

#[test]
fn one_landing_average_is_half_the_horizon() {
    for t in [5.0, 30.0, 90.0] {
        let p = LandingPattern::canonicalize(&[t]).unwrap();
        let v = normalize_wait(expected_lobby_wait(&p, 0.4, 0.0).unwrap(), 0.0, 0.4, t).unwrap();
        assert!((v - t / 2.0).abs() < 1e-9 * t);
    }
}

#[test]
fn earlier_is_not_always_cheaper() {
    // A parked car leaves with the first arrival, while a car landing at
    // 10 s collects everyone who arrived before it. Only the last landing
    // is monotone.
    assert!(wait(&[0.0, 30.0], 0.5, 0.0) > wait(&[10.0, 30.0], 0.5, 0.0));
    assert_eq!(wait(&[0.0, 0.0, 0.0], 0.5, 0.02), 0.0);
}
