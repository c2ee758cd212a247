//! Expected wait of future lobby passengers for a few landing patterns,
//! checked against direct simulation.
//!
//! cargo run --release --example lobby_wait

use elevator_lookahead::lobby::{
    expected_lobby_wait, mc_lobby_wait, normalize_wait, LandingPattern,
};

fn main() -> elevator_lookahead::Result<()> {
    let rate = 0.5;
    let beta = 0.02;
    for times in [
        vec![0.0, 30.0],
        vec![10.0, 30.0],
        vec![15.0, 15.0],
        vec![5.0, 20.0, 45.0, 60.0],
    ] {
        let p = LandingPattern::canonicalize(&times)?;
        let v = expected_lobby_wait(&p, rate, beta)?;
        let (mc, se) = mc_lobby_wait(&p, rate, beta, 50_000, 1)?;
        let avg = normalize_wait(v, beta, rate, p.horizon_s())?;
        println!("{times:?}: V = {v:8.3} (simulated {mc:8.3} ± {se:.3}), per passenger {avg:.2} s");
    }
    Ok(())
}
