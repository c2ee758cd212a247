//! Travel times between floors and one car served to completion.
//!
//! cargo run --example kinematics

use elevator_lookahead::car::{CarState, Pickup, ServiceHooks};
use elevator_lookahead::{BuildingSpec, Direction, Floor, PassengerId};

struct Fixed(Floor);

impl ServiceHooks for Fixed {
    fn destination(&mut self, _: PassengerId) -> Floor {
        self.0
    }
    fn boarded(&mut self, p: PassengerId, t: f64) {
        println!("  t={t:6.2}s passenger {p} boards");
    }
    fn alighted(&mut self, p: PassengerId, t: f64) {
        println!("  t={t:6.2}s passenger {p} alights");
    }
}

fn main() -> elevator_lookahead::Result<()> {
    let b = BuildingSpec::new(15, 1)?;
    for to in [2, 5, 10, 15] {
        println!("travel 1 -> {to:2}: {:.3} s", b.travel_s(1, to));
    }

    // A parked car takes a call at floor 9 going down to the lobby.
    let mut car = CarState::idle_at(0, 1);
    let mut hooks = Fixed(1);
    let call = Pickup {
        passenger: 7,
        floor: 9,
        direction: Direction::Down,
        arrival_s: 0.0,
    };
    car.assign(call, 0.0, &b, &mut hooks);
    let mut next = Some(car.ready_at);
    while next.is_some() {
        next = car.advance(&b, true, &mut hooks);
    }
    println!("car idle at floor {} at t={:.2}s", car.floor, car.ready_at);
    Ok(())
}
