//! The transition cost from the stable closed form, the literal
//! antiderivatives and adaptive quadrature.
//!
//! cargo run --example cost_paths

use elevator_lookahead::lobby::{closed_form_f, closed_form_g, quadrature_cost, transition_cost};

fn main() -> elevator_lookahead::Result<()> {
    let (rate, dt) = (0.7, 5.0);
    for (j, t0, beta) in [(0, 0.0, 0.0), (1, 0.0, 0.0), (2, 0.0, 0.02), (3, 20.0, 0.1)] {
        let stable = transition_cost(j, t0, dt, rate, beta)?;
        let quad = quadrature_cost(j, t0, dt, rate, beta, 1e-12)?;
        let literal = if beta == 0.0 {
            closed_form_g(dt, j, rate)? - closed_form_g(0.0, j, rate)?
        } else {
            (-beta * t0).exp()
                * (closed_form_f(dt, j, rate, beta)? - closed_form_f(0.0, j, rate, beta)?)
        };
        println!("j={j} t0={t0:4} beta={beta:<4}: stable {stable:.12} literal {literal:.12} quadrature {quad:.12}");
    }
    Ok(())
}
