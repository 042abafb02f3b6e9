//! Round plans for the three search strategies.
//!
//! Round `i` visits side `(-1)^(i+1)`, so round 0 goes to the negative side.

use crate::error::{Error, Result};
use crate::model::{Leg, SearchParams, SpeedClass, StrategyKind, StrategySpec, Trajectory};

/// Legs of round `i`. Zero-length legs are dropped later by the trajectory.
pub(crate) fn round_legs(spec: &StrategySpec, i: usize) -> Vec<Leg> {
    let a = spec.a;
    let side = Trajectory::side(i);
    let turn = a.powi(i as i32);
    let fast = |to: f64| Leg { to, speed: SpeedClass::Fast };
    match spec.kind {
        StrategyKind::Fast => vec![fast(side * turn), fast(0.0)],
        StrategyKind::Slow => vec![
            // a^(i-2) is used literally, also for i = 0 and 1.
            fast(side * a.powi(i as i32 - 2)),
            Leg { to: side * turn, speed: SpeedClass::Slow },
            fast(0.0),
        ],
        StrategyKind::Hybrid => {
            let next_turn = a.powi(i as i32 + 2);
            vec![
                fast(side * a.powi(i as i32 - 2)),
                Leg { to: side * turn, speed: SpeedClass::Slow },
                fast(side * (turn + spec.b * (next_turn - turn))),
                fast(0.0),
            ]
        }
    }
}

/// Fast-only strategy: out to `(-1)^(i+1) a^i` and back at speed 1.
pub fn fast_trajectory(params: SearchParams, a: f64) -> Result<Trajectory> {
    Trajectory::new(params, StrategySpec::fast(a))
}

/// Fast over explored ground, slow over new ground, fast back.
pub fn slow_trajectory(params: SearchParams, a: f64) -> Result<Trajectory> {
    if params.v() == 0.0 {
        return Err(Error::SlowSpeedZero);
    }
    Trajectory::new(params, StrategySpec::slow(a))
}

/// Slow strategy plus a fast scouting leg of `b (a^(i+2) - a^i)` past each
/// turnaround.
pub fn hybrid_trajectory(params: SearchParams, a: f64, b: f64) -> Result<Trajectory> {
    if params.v() == 0.0 {
        return Err(Error::SlowSpeedZero);
    }
    Trajectory::new(params, StrategySpec::hybrid(a, b))
}

/// Position of the scout end point in round `i` (unsigned).
pub fn scout_end(a: f64, b: f64, i: usize) -> f64 {
    let turn = a.powi(i as i32);
    turn + b * (a.powi(i as i32 + 2) - turn)
}
