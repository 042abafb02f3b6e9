//! Shared domain types: environment parameters, strategy parameters,
//! trajectories and pass events.
//!
//! Positions are signed distances from the origin in units of the first
//! turnaround distance; times are in units where the fast speed is 1.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::strategies::trajectory::round_legs;

/// Environment: detection probability at full speed and the slow speed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchParams {
    p: f64,
    v: f64,
}

impl SearchParams {
    pub fn new(p: f64, v: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidProbability(p));
        }
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::InvalidSpeed(v));
        }
        Ok(Self { p, v })
    }

    /// Detection probability of a single pass at speed 1.
    pub fn p(&self) -> f64 {
        self.p
    }

    /// Slow speed as a fraction of the fast speed.
    pub fn v(&self) -> f64 {
        self.v
    }

    /// False only when neither speed can ever detect the target.
    pub fn is_solvable(&self) -> bool {
        !(self.p == 0.0 && self.v == 0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StrategyKind {
    Fast,
    Slow,
    Hybrid,
}

impl StrategyKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            StrategyKind::Fast => "fast",
            StrategyKind::Slow => "slow",
            StrategyKind::Hybrid => "hybrid",
        }
    }
}

impl std::fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which algorithm to run plus its tunable parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrategySpec {
    pub kind: StrategyKind,
    /// Expansion ratio between successive turnaround distances.
    pub a: f64,
    /// Scout-ahead ratio; zero unless `kind` is `Hybrid`.
    pub b: f64,
}

impl StrategySpec {
    pub fn fast(a: f64) -> Self {
        Self { kind: StrategyKind::Fast, a, b: 0.0 }
    }

    pub fn slow(a: f64) -> Self {
        Self { kind: StrategyKind::Slow, a, b: 0.0 }
    }

    pub fn hybrid(a: f64, b: f64) -> Self {
        Self { kind: StrategyKind::Hybrid, a, b }
    }

    /// Checks only the geometric requirements (a > 1, b in range, v > 0 when
    /// a slow leg exists). Convergence of the fast series is not checked here.
    pub(crate) fn check_geometry(&self, params: &SearchParams) -> Result<()> {
        if self.a <= 1.0 || !self.a.is_finite() {
            return Err(Error::RatioNotAboveOne(self.a));
        }
        match self.kind {
            StrategyKind::Hybrid => {
                if !(0.0..=1.0).contains(&self.b) {
                    return Err(Error::InvalidScoutRatio(self.b));
                }
            }
            _ => {
                if self.b != 0.0 {
                    return Err(Error::InvalidScoutRatio(self.b));
                }
            }
        }
        if self.kind != StrategyKind::Fast && params.v() == 0.0 {
            return Err(Error::SlowSpeedZero);
        }
        Ok(())
    }
}

/// Returns the pair unchanged if every invariant holds.
pub fn validate_params(
    params: SearchParams,
    spec: StrategySpec,
) -> Result<(SearchParams, StrategySpec)> {
    // Re-run the range checks: the fields may have been deserialized.
    let params = SearchParams::new(params.p, params.v)?;
    if !params.is_solvable() {
        return Err(Error::UnsolvableInstance);
    }
    spec.check_geometry(&params)?;
    if spec.kind == StrategyKind::Fast {
        let limit = fast_ratio_limit(params.p());
        if spec.a >= limit {
            return Err(Error::DivergentFastRatio { a: spec.a, limit });
        }
    }
    Ok((params, spec))
}

/// Supremum of convergent fast expansion ratios, 1/(1-p).
pub fn fast_ratio_limit(p: f64) -> f64 {
    1.0 / (1.0 - p)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpeedClass {
    Fast,
    Slow,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub start_pos: f64,
    pub end_pos: f64,
    pub speed: SpeedClass,
    pub start_time: f64,
    pub end_time: f64,
}

impl Segment {
    pub fn length(&self) -> f64 {
        (self.end_pos - self.start_pos).abs()
    }

    pub fn duration(&self) -> f64 {
        self.end_time - self.start_time
    }

    /// Time at which this segment is at `d`, if it passes through it.
    ///
    /// A segment owns its end point but not its start point, so a
    /// turnaround at exactly `d` is reported once.
    pub fn pass_time(&self, d: f64, v: f64) -> Option<f64> {
        let (x0, x1) = (self.start_pos, self.end_pos);
        let inside = (d - x0) * (d - x1) < 0.0 || d == x1;
        if !inside {
            return None;
        }
        if d == x1 {
            return Some(self.end_time);
        }
        let speed = match self.speed {
            SpeedClass::Fast => 1.0,
            SpeedClass::Slow => v,
        };
        Some(self.start_time + (d - x0).abs() / speed)
    }

    pub fn direction(&self) -> Direction {
        if self.end_pos.abs() > self.start_pos.abs() {
            Direction::Outward
        } else {
            Direction::Inward
        }
    }
}

/// A segment without timing, as planned for a round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Leg {
    pub to: f64,
    pub speed: SpeedClass,
}

/// One excursion from the origin and back.
#[derive(Debug, Clone, PartialEq)]
pub struct Round {
    pub index: usize,
    pub start_time: f64,
    segments: [Segment; 4],
    len: usize,
}

impl Round {
    pub fn segments(&self) -> &[Segment] {
        &self.segments[..self.len]
    }

    pub fn end_time(&self) -> f64 {
        self.segments().last().map_or(self.start_time, |s| s.end_time)
    }

    pub fn duration(&self) -> f64 {
        self.end_time() - self.start_time
    }

    /// Farthest distance from the origin reached in this round.
    pub fn reach(&self) -> f64 {
        self.segments()
            .iter()
            .map(|s| s.end_pos.abs())
            .fold(0.0, f64::max)
    }
}

/// The robot's path: an unbounded sequence of rounds, generated lazily.
///
/// Construct through [`crate::strategies::fast_trajectory`] and friends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    params: SearchParams,
    spec: StrategySpec,
}

impl Trajectory {
    pub fn new(params: SearchParams, spec: StrategySpec) -> Result<Self> {
        spec.check_geometry(&params)?;
        Ok(Self { params, spec })
    }

    pub fn params(&self) -> &SearchParams {
        &self.params
    }

    pub fn spec(&self) -> &StrategySpec {
        &self.spec
    }

    pub fn kind(&self) -> StrategyKind {
        self.spec.kind
    }

    pub fn has_slow_legs(&self) -> bool {
        self.spec.kind != StrategyKind::Fast
    }

    /// Rounds in order, starting at time 0.
    pub fn rounds(&self) -> Rounds<'_> {
        Rounds { traj: self, next: 0, clock: 0.0 }
    }

    /// Every nonzero-length segment, in order.
    pub fn segments(&self) -> impl Iterator<Item = Segment> + '_ {
        self.rounds().flat_map(|r| r.segments().to_vec())
    }

    pub fn segment(&self, k: usize) -> Segment {
        self.segments().nth(k).expect("trajectory is unbounded")
    }

    pub fn round(&self, i: usize) -> Round {
        self.rounds().nth(i).expect("trajectory is unbounded")
    }

    /// Turnaround distance of round `i`, `a^i`.
    pub fn turn_distance(&self, i: usize) -> f64 {
        self.spec.a.powi(i as i32)
    }

    /// Side visited in round `i`: -1 for even rounds, +1 for odd.
    pub fn side(i: usize) -> f64 {
        if i.is_multiple_of(2) {
            -1.0
        } else {
            1.0
        }
    }

    /// `c` such that round `i` lasts exactly `c * a^i`.
    pub fn round_time_coefficient(&self) -> f64 {
        let a = self.spec.a;
        let v = self.params.v();
        match self.spec.kind {
            StrategyKind::Fast => 2.0,
            StrategyKind::Slow => a.powi(-2) + (1.0 - a.powi(-2)) / v + 1.0,
            StrategyKind::Hybrid => {
                a.powi(-2) + (1.0 - a.powi(-2)) / v + 2.0 * self.spec.b * (a * a - 1.0) + 1.0
            }
        }
    }

    fn build_round(&self, index: usize, start_time: f64) -> Round {
        let v = self.params.v();
        let placeholder = Segment {
            start_pos: 0.0,
            end_pos: 0.0,
            speed: SpeedClass::Fast,
            start_time,
            end_time: start_time,
        };
        let mut segments = [placeholder; 4];
        let mut len = 0;
        let mut pos = 0.0;
        let mut clock = start_time;
        for leg in round_legs(&self.spec, index) {
            let length = (leg.to - pos).abs();
            if length == 0.0 {
                continue;
            }
            let speed = match leg.speed {
                SpeedClass::Fast => 1.0,
                SpeedClass::Slow => v,
            };
            let end_time = clock + length / speed;
            segments[len] = Segment {
                start_pos: pos,
                end_pos: leg.to,
                speed: leg.speed,
                start_time: clock,
                end_time,
            };
            len += 1;
            pos = leg.to;
            clock = end_time;
        }
        Round { index, start_time, segments, len }
    }
}

pub struct Rounds<'a> {
    traj: &'a Trajectory,
    next: usize,
    clock: f64,
}

impl Iterator for Rounds<'_> {
    type Item = Round;

    fn next(&mut self) -> Option<Round> {
        let round = self.traj.build_round(self.next, self.clock);
        self.next += 1;
        self.clock = round.end_time();
        Some(round)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    /// Away from the origin.
    Outward,
    /// Toward the origin.
    Inward,
}

/// One instant at which the robot is at the target position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PassEvent {
    pub time: f64,
    pub speed_class: SpeedClass,
    pub round_index: usize,
    pub direction: Direction,
}
