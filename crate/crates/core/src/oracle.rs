//! Ground-truth evaluation of a trajectory against a fixed target.
//!
//! Detection happens only at pass instants: a slow pass always detects, a
//! fast pass detects independently with probability `p`. The expected
//! detection time is the pass-time series weighted by the first-detection
//! probabilities. For fast-only pass sequences the series is infinite and is
//! truncated once a certified bound on the remaining tail is small enough.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{PassEvent, Rounds, SpeedClass, StrategyKind, Trajectory};
use crate::strategies::scout_end;

/// Multiplicative offset placing a target just beyond a breakpoint.
pub const BREAKPOINT_EPS: f64 = 1e-9;
pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_SAMPLES_PER_ROUND: usize = 8;

const MAX_SERIES_PASSES: usize = 5_000_000;

/// When to stop enumerating passes of a fast-only sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Truncation {
    /// Last round index that may be generated.
    pub max_rounds: usize,
    /// Stop once the probability of no detection so far drops to this.
    pub residual: f64,
}

impl Default for Truncation {
    fn default() -> Self {
        Self { max_rounds: 10_000, residual: 1e-18 }
    }
}

fn check_target(d: f64) -> Result<()> {
    if d.is_finite() && d != 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidTarget(d))
    }
}

/// Lazy, time-ordered passes of one target. Ends after the first slow pass.
pub struct PassIter<'a> {
    rounds: Rounds<'a>,
    d: f64,
    v: f64,
    buffered: Vec<PassEvent>,
    finished: bool,
    current_round: usize,
}

impl<'a> PassIter<'a> {
    pub fn new(traj: &'a Trajectory, d: f64) -> Result<Self> {
        check_target(d)?;
        Ok(Self {
            rounds: traj.rounds(),
            d,
            v: traj.params().v(),
            buffered: Vec::new(),
            finished: false,
            current_round: 0,
        })
    }

    /// Index of the most recently generated round.
    pub fn current_round(&self) -> usize {
        self.current_round
    }

    fn fill(&mut self) {
        let round = self.rounds.next().expect("trajectory is unbounded");
        self.current_round = round.index;
        // Reverse order so `pop` yields the earliest pass.
        for seg in round.segments().iter().rev() {
            if let Some(time) = seg.pass_time(self.d, self.v) {
                self.buffered.push(PassEvent {
                    time,
                    speed_class: seg.speed,
                    round_index: round.index,
                    direction: seg.direction(),
                });
            }
        }
    }
}

impl Iterator for PassIter<'_> {
    type Item = PassEvent;

    fn next(&mut self) -> Option<PassEvent> {
        if self.finished {
            return None;
        }
        while self.buffered.is_empty() {
            self.fill();
        }
        let pass = self.buffered.pop()?;
        if pass.speed_class == SpeedClass::Slow {
            self.finished = true;
        }
        Some(pass)
    }
}

/// Whether some slow leg of the trajectory ever crosses `d` in its interior.
///
/// Slow legs cover `[a^-2, inf)` on the negative side and `[a^-1, inf)` on
/// the positive side; anything closer to the origin is only crossed fast.
pub fn has_slow_pass(traj: &Trajectory, d: f64) -> bool {
    if !traj.has_slow_legs() {
        return false;
    }
    let a = traj.spec().a;
    let first = if d < 0.0 { a.powi(-2) } else { a.powi(-1) };
    d.abs() > first
}

/// Rejects targets whose expected detection time is infinite.
fn check_detectable(traj: &Trajectory, d: f64) -> Result<()> {
    check_target(d)?;
    if has_slow_pass(traj, d) {
        return Ok(());
    }
    let p = traj.params().p();
    if p == 0.0 {
        return Err(Error::NoDetection);
    }
    let growth = traj.spec().a;
    let miss = 1.0 - p;
    if growth * miss >= 1.0 {
        return Err(Error::DivergentSeries { growth, miss });
    }
    Ok(())
}

/// All passes of `d` in time order, up to the first slow pass or the
/// truncation point.
pub fn enumerate_passes(traj: &Trajectory, d: f64, stop: &Truncation) -> Result<Vec<PassEvent>> {
    let p = traj.params().p();
    let mut iter = PassIter::new(traj, d)?;
    let mut passes = Vec::new();
    let mut residual = 1.0;
    loop {
        // Peek at the round budget before pulling more rounds.
        if iter.buffered.is_empty() && !iter.finished && iter.current_round >= stop.max_rounds {
            break;
        }
        let Some(pass) = iter.next() else { break };
        if pass.round_index > stop.max_rounds {
            break;
        }
        passes.push(pass);
        if pass.speed_class == SpeedClass::Fast {
            residual *= 1.0 - p;
            if residual <= stop.residual {
                break;
            }
        }
    }
    if passes.is_empty() {
        return Err(Error::NeverPassed(d));
    }
    Ok(passes)
}

/// First-detection probabilities over the passes of a target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionDistribution {
    /// `(time, probability of first detection at this pass)`.
    pub passes: Vec<(f64, f64)>,
    /// True when a slow pass ended the list.
    pub absorbed: bool,
    /// Probability mass not assigned to any listed pass.
    pub residual: f64,
    /// Upper bound on the omitted contribution to the expectation.
    pub tail_bound: f64,
}

impl DetectionDistribution {
    pub fn partial_expectation(&self) -> f64 {
        self.passes.iter().map(|&(t, w)| t * w).sum()
    }

    pub fn total_probability(&self) -> f64 {
        self.passes.iter().map(|&(_, w)| w).sum::<f64>() + self.residual
    }
}

/// Bound on `sum_{k >= N} p (1-p)^k t_k` given the round of pass `N-1`.
///
/// Rounds last `c a^n`, so any pass in round `n` happens before
/// `c a^(n+1) / (a-1)`. Each visited round holds at most two passes and a
/// side is visited every other round, so pass `k` lies in round at most
/// `n_{N-1} + (k - N) + 2`.
fn fast_tail_bound(traj: &Trajectory, residual: f64, last_round: usize) -> f64 {
    let p = traj.params().p();
    let a = traj.spec().a;
    let c = traj.round_time_coefficient();
    let ratio = a * (1.0 - p);
    p * residual * c * a.powi(last_round as i32 + 3) / ((a - 1.0) * (1.0 - ratio))
}

/// Detection distribution truncated so that `tail_bound <= tol * E[T]`.
pub fn detection_distribution(traj: &Trajectory, d: f64, tol: f64) -> Result<DetectionDistribution> {
    check_detectable(traj, d)?;
    let p = traj.params().p();
    let certifiable = p > 0.0 && traj.spec().a * (1.0 - p) < 1.0;
    let mut dist = DetectionDistribution {
        passes: Vec::new(),
        absorbed: false,
        residual: 1.0,
        tail_bound: 0.0,
    };
    let mut partial = 0.0;
    for pass in PassIter::new(traj, d)? {
        match pass.speed_class {
            SpeedClass::Slow => {
                let w = dist.residual;
                dist.passes.push((pass.time, w));
                dist.residual = 0.0;
                dist.tail_bound = 0.0;
                dist.absorbed = true;
                return Ok(dist);
            }
            SpeedClass::Fast => {
                let w = p * dist.residual;
                dist.passes.push((pass.time, w));
                partial += w * pass.time;
                dist.residual -= w;
                if dist.residual <= 0.0 {
                    dist.residual = 0.0;
                    dist.tail_bound = 0.0;
                    return Ok(dist);
                }
            }
        }
        if certifiable {
            dist.tail_bound = fast_tail_bound(traj, dist.residual, pass.round_index);
            if dist.tail_bound <= tol * partial {
                return Ok(dist);
            }
        }
        if dist.passes.len() >= MAX_SERIES_PASSES {
            return Err(Error::TruncationLimit { passes: dist.passes.len() });
        }
    }
    unreachable!("pass iterator only ends after a slow pass")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Expectation {
    /// Partial sum of the series (exact when `tail_bound` is 0).
    pub value: f64,
    /// Certified bound on the omitted tail; the true value lies in
    /// `[value, value + tail_bound]`.
    pub tail_bound: f64,
    pub passes: usize,
}

pub fn expected_detection_time(traj: &Trajectory, d: f64, tol: f64) -> Result<Expectation> {
    let dist = detection_distribution(traj, d, tol)?;
    Ok(Expectation {
        value: dist.partial_expectation(),
        tail_bound: dist.tail_bound,
        passes: dist.passes.len(),
    })
}

/// Expected detection time divided by the optimal time `|d|`.
pub fn expected_cr(traj: &Trajectory, d: f64, tol: f64) -> Result<f64> {
    Ok(expected_detection_time(traj, d, tol)?.value / d.abs())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupResult {
    pub sup_cr: f64,
    pub argmax_d: f64,
    pub argmax_round: usize,
    /// `(round, largest CR among that round's targets)`.
    pub per_round_profile: Vec<(usize, f64)>,
}

/// Unsigned target distances probed for round `i`: just past each
/// breakpoint, plus geometric samples up to the next same-side turnaround.
pub fn round_targets(traj: &Trajectory, i: usize, samples_per_round: usize) -> Vec<f64> {
    let a = traj.spec().a;
    let turn = traj.turn_distance(i);
    let mut targets = vec![turn * (1.0 + BREAKPOINT_EPS)];
    if traj.kind() == StrategyKind::Hybrid && traj.spec().b > 0.0 {
        targets.push(scout_end(a, traj.spec().b, i) * (1.0 + BREAKPOINT_EPS));
    }
    let span = 2.0 / (samples_per_round + 1) as f64;
    for k in 1..=samples_per_round {
        targets.push(turn * a.powf(span * k as f64));
    }
    targets
}

/// Worst expected CR over breakpoint and sampled targets on both sides for
/// rounds `0..=rounds`.
pub fn sup_cr(traj: &Trajectory, rounds: usize, samples_per_round: usize) -> Result<SupResult> {
    if rounds < 4 {
        return Err(Error::InvalidArgument(format!("sup_cr needs rounds >= 4, got {rounds}")));
    }
    let per_round: Vec<(f64, f64)> = (0..=rounds)
        .into_par_iter()
        .map(|i| {
            let mut best = (f64::NEG_INFINITY, 0.0);
            for dist in round_targets(traj, i, samples_per_round) {
                for side in [-1.0, 1.0] {
                    let d = side * dist;
                    let cr = expected_cr(traj, d, DEFAULT_TOL)?;
                    if cr > best.0 {
                        best = (cr, d);
                    }
                }
            }
            Ok(best)
        })
        .collect::<Result<_>>()?;
    let mut result = SupResult {
        sup_cr: f64::NEG_INFINITY,
        argmax_d: 0.0,
        argmax_round: 0,
        per_round_profile: Vec::with_capacity(per_round.len()),
    };
    for (i, &(cr, d)) in per_round.iter().enumerate() {
        result.per_round_profile.push((i, cr));
        if cr > result.sup_cr {
            result.sup_cr = cr;
            result.argmax_d = d;
            result.argmax_round = i;
        }
    }
    Ok(result)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloSummary {
    pub mean: f64,
    pub std_error: f64,
    pub trials: u64,
}

/// Per-trial generator: the key comes from `seed`, the stream from the trial
/// index, so results do not depend on how trials are split across threads.
fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Monte Carlo estimate of the detection time of `d`.
pub fn simulate_detection(traj: &Trajectory, d: f64, trials: u64, seed: u64) -> Result<MonteCarloSummary> {
    simulate_with_cache(traj, d, trials, seed, &Truncation::default())
}

fn simulate_with_cache(
    traj: &Trajectory,
    d: f64,
    trials: u64,
    seed: u64,
    cache: &Truncation,
) -> Result<MonteCarloSummary> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    check_detectable(traj, d)?;
    let p = traj.params().p();
    let cached = match enumerate_passes(traj, d, cache) {
        Err(Error::NeverPassed(_)) => Vec::new(),
        other => other?,
    };

    let sample = |trial: u64| -> f64 {
        let mut rng = trial_rng(seed, trial);
        let mut detect = |pass: &PassEvent| match pass.speed_class {
            SpeedClass::Slow => true,
            SpeedClass::Fast => rng.random::<f64>() < p,
        };
        for pass in &cached {
            if detect(pass) {
                return pass.time;
            }
        }
        // Past the cached prefix: keep walking the trajectory.
        let iter = PassIter::new(traj, d).expect("target already checked");
        for pass in iter.skip(cached.len()) {
            if detect(&pass) {
                return pass.time;
            }
        }
        unreachable!("pass iterator only ends after a slow pass")
    };

    let times: Vec<f64> = (0..trials).into_par_iter().map(sample).collect();
    let n = times.len() as f64;
    let mean = times.iter().sum::<f64>() / n;
    let var = if times.len() > 1 {
        times.iter().map(|t| (t - mean) * (t - mean)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    Ok(MonteCarloSummary { mean, std_error: (var / n).sqrt(), trials })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Direction, SearchParams};
    use crate::strategies::{
        fast_cr, fast_trajectory, hybrid_trajectory, optimal_fast, optimal_slow, slow_cr,
        slow_ratio, slow_trajectory,
    };

    fn params(p: f64, v: f64) -> SearchParams {
        SearchParams::new(p, v).unwrap()
    }

    fn rel(x: f64, y: f64) -> f64 {
        (x - y).abs() / y.abs()
    }

    #[test]
    fn slow_single_pass_near_origin() {
        let t = optimal_slow(params(0.3, 0.5)).unwrap();
        let passes = enumerate_passes(&t, -0.9, &Truncation::default()).unwrap();
        assert_eq!(passes.len(), 1);
        assert_eq!(passes[0].speed_class, SpeedClass::Slow);
        assert!(rel(passes[0].time, 1.496_938_456_699_068_6) < 1e-14);
        let cr = expected_cr(&t, -0.9, DEFAULT_TOL).unwrap();
        assert!(rel(cr, 1.663_264_951_887_854) < 1e-14);
    }

    #[test]
    fn fast_passes_on_positive_side() {
        let t = fast_trajectory(params(0.5, 0.0), 2.0).unwrap();
        let stop = Truncation { max_rounds: 7, residual: 0.0 };
        let passes = enumerate_passes(&t, 1.5, &stop).unwrap();
        let rounds: Vec<usize> = passes.iter().map(|p| p.round_index).collect();
        assert_eq!(rounds, vec![1, 1, 3, 3, 5, 5, 7, 7]);
        assert_eq!(passes[0].time, 3.5);
        assert_eq!(passes[1].time, 4.5);
        assert_eq!(passes[0].direction, Direction::Outward);
        assert_eq!(passes[1].direction, Direction::Inward);
        assert!(passes.windows(2).all(|w| w[0].time < w[1].time));
    }

    #[test]
    fn hybrid_scout_passes_before_slow_pass() {
        let t = hybrid_trajectory(params(0.5, 0.5), 2.0, 0.5).unwrap();
        let passes = enumerate_passes(&t, -2.3, &Truncation::default()).unwrap();
        let summary: Vec<(usize, SpeedClass)> =
            passes.iter().map(|p| (p.round_index, p.speed_class)).collect();
        assert_eq!(
            summary,
            vec![(0, SpeedClass::Fast), (0, SpeedClass::Fast), (2, SpeedClass::Slow)]
        );
    }

    #[test]
    fn residual_threshold_stops_enumeration() {
        let t = fast_trajectory(params(0.5, 0.0), 4.0 / 3.0).unwrap();
        let stop = Truncation { max_rounds: 10_000, residual: 1e-3 };
        let passes = enumerate_passes(&t, 1.7, &stop).unwrap();
        assert_eq!(passes.len(), 10); // 0.5^10 < 1e-3 <= 0.5^9
    }

    #[test]
    fn never_passed_within_round_budget() {
        let t = fast_trajectory(params(0.5, 0.0), 2.0).unwrap();
        let stop = Truncation { max_rounds: 2, residual: 0.0 };
        assert_eq!(enumerate_passes(&t, 100.0, &stop), Err(Error::NeverPassed(100.0)));
        assert_eq!(enumerate_passes(&t, 0.0, &stop), Err(Error::InvalidTarget(0.0)));
    }

    #[test]
    fn certain_detection_collapses_to_first_pass() {
        let t = fast_trajectory(params(1.0, 0.0), 2.0).unwrap();
        let e = expected_detection_time(&t, 1.5, DEFAULT_TOL).unwrap();
        assert_eq!(e.value, 3.5);
        assert_eq!(e.tail_bound, 0.0);
        let h = hybrid_trajectory(params(1.0, 0.5), 2.0, 0.5).unwrap();
        let first = enumerate_passes(&h, -2.3, &Truncation::default()).unwrap()[0].time;
        assert_eq!(expected_detection_time(&h, -2.3, DEFAULT_TOL).unwrap().value, first);
    }

    #[test]
    fn slow_expectation_ignores_p() {
        for p in [0.0, 0.4, 1.0] {
            let t = optimal_slow(params(p, 0.5)).unwrap();
            let e = expected_detection_time(&t, 7.3, DEFAULT_TOL).unwrap();
            let pass = enumerate_passes(&t, 7.3, &Truncation::default()).unwrap();
            assert_eq!(pass.len(), 1);
            assert_eq!(e.value, pass[0].time);
        }
    }

    /// Series summed in closed form for a target first passed in round
    /// `i + 2` of the fast strategy.
    fn fast_closed_form_cr(p: f64, a: f64, i: i32, d: f64) -> f64 {
        (2.0 * a.powi(i + 2) * p / (1.0 + a * (p - 1.0)) + p * d * (a - 1.0) / (2.0 - p) - 2.0)
            / (d * (a - 1.0))
    }

    #[test]
    fn fast_series_matches_geometric_sum() {
        let (p, a) = (0.5, 4.0 / 3.0);
        let t = fast_trajectory(params(p, 0.0), a).unwrap();
        // Round 0 turns at -1, so -(1 + eps) is first passed in round 2 (i = 0).
        let d: f64 = -(1.0 + 1e-9);
        let cr = expected_cr(&t, d, DEFAULT_TOL).unwrap();
        let expected = fast_closed_form_cr(p, a, 0, d.abs());
        assert!(rel(cr, expected) < 5e-3);
        assert!(rel(cr, expected) < 1e-9);
        for i in [3, 8, 15] {
            let dist = a.powi(i) * 1.37;
            let side = Trajectory::side(i as usize);
            let cr = expected_cr(&t, side * dist, DEFAULT_TOL).unwrap();
            assert!(rel(cr, fast_closed_form_cr(p, a, i, dist)) < 1e-9, "i={i}");
        }
    }

    #[test]
    fn tail_bound_certifies_truncation() {
        let t = fast_trajectory(params(0.2, 0.0), fast_cr_ratio(0.2)).unwrap();
        let dist = detection_distribution(&t, 3.1, 1e-8).unwrap();
        assert!(!dist.absorbed);
        assert!((dist.total_probability() - 1.0).abs() < 1e-12);
        let coarse = dist.partial_expectation();
        let fine = expected_detection_time(&t, 3.1, 1e-14).unwrap().value;
        assert!(fine >= coarse);
        assert!(fine - coarse <= dist.tail_bound);
        assert!(dist.tail_bound <= 1e-8 * coarse);
    }

    fn fast_cr_ratio(p: f64) -> f64 {
        crate::strategies::fast_ratio(p).unwrap()
    }

    #[test]
    fn divergent_and_undetectable_series() {
        let t = fast_trajectory(params(0.5, 0.0), 2.5).unwrap();
        assert_eq!(expected_detection_time(&t, 3.0, DEFAULT_TOL).unwrap_err().code(), "DivergentSeries");
        let t = fast_trajectory(params(0.0, 0.5), 2.0).unwrap();
        assert_eq!(expected_detection_time(&t, 3.0, DEFAULT_TOL), Err(Error::NoDetection));
        assert_eq!(simulate_detection(&t, 3.0, 10, 0), Err(Error::NoDetection));
        // Inside the never-slow zone of a slow strategy with p = 0.
        let s = slow_trajectory(params(0.0, 0.5), 2.0).unwrap();
        assert_eq!(expected_detection_time(&s, -0.1, DEFAULT_TOL), Err(Error::NoDetection));
        assert!(expected_detection_time(&s, -0.3, DEFAULT_TOL).is_ok());
    }

    #[test]
    fn distribution_weights_follow_miss_counts() {
        let t = hybrid_trajectory(params(0.3, 0.5), 2.0, 0.5).unwrap();
        let dist = detection_distribution(&t, -2.3, DEFAULT_TOL).unwrap();
        assert!(dist.absorbed);
        let w: Vec<f64> = dist.passes.iter().map(|&(_, w)| w).collect();
        assert!((w[0] - 0.3).abs() < 1e-15);
        assert!((w[1] - 0.3 * 0.7).abs() < 1e-15);
        assert!((w[2] - 0.49).abs() < 1e-15);
        assert!((dist.total_probability() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sup_converges_to_closed_forms() {
        let slow = optimal_slow(params(0.0, 0.5)).unwrap();
        let s = sup_cr(&slow, 40, DEFAULT_SAMPLES_PER_ROUND).unwrap();
        assert!(rel(s.sup_cr, slow_cr(0.5).unwrap().value) < 0.01);
        let fast = optimal_fast(params(0.5, 0.0)).unwrap();
        let f = sup_cr(&fast, 40, DEFAULT_SAMPLES_PER_ROUND).unwrap();
        assert!(rel(f.sup_cr, fast_cr(0.5).unwrap().value) < 0.01);
        assert!(f.per_round_profile.iter().all(|&(_, cr)| cr <= f.sup_cr));
    }

    #[test]
    fn sup_hybrid_without_scouting_is_slow() {
        let a = slow_ratio(0.5).unwrap();
        let slow = slow_trajectory(params(0.0, 0.5), a).unwrap();
        let hybrid = hybrid_trajectory(params(0.0, 0.5), a, 0.0).unwrap();
        assert_eq!(sup_cr(&slow, 12, 4).unwrap(), sup_cr(&hybrid, 12, 4).unwrap());
    }

    #[test]
    fn sup_needs_enough_rounds() {
        let slow = optimal_slow(params(0.0, 0.5)).unwrap();
        assert_eq!(sup_cr(&slow, 3, 4).unwrap_err().code(), "InvalidArgument");
    }

    #[test]
    fn monte_carlo_degenerate_cases() {
        let t = fast_trajectory(params(1.0, 0.0), 2.0).unwrap();
        let mc = simulate_detection(&t, 1.5, 10, 7).unwrap();
        assert_eq!(mc.mean, 3.5);
        assert_eq!(mc.std_error, 0.0);
        let s = optimal_slow(params(0.4, 0.5)).unwrap();
        let mc = simulate_detection(&s, 5.0, 50, 1).unwrap();
        assert_eq!(mc.std_error, 0.0);
        assert_eq!(mc.mean, expected_detection_time(&s, 5.0, DEFAULT_TOL).unwrap().value);
        assert_eq!(simulate_detection(&s, 5.0, 0, 1).unwrap_err().code(), "InvalidArgument");
    }

    #[test]
    fn monte_carlo_matches_expectation() {
        let t = optimal_fast(params(0.5, 0.0)).unwrap();
        let exact = expected_detection_time(&t, 1.7, DEFAULT_TOL).unwrap().value;
        let mc = simulate_detection(&t, 1.7, 100_000, 42).unwrap();
        assert!((mc.mean - exact).abs() <= 3.0 * mc.std_error, "{mc:?} vs {exact}");
    }

    #[test]
    fn monte_carlo_independent_of_thread_count() {
        let t = optimal_fast(params(0.3, 0.0)).unwrap();
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| simulate_detection(&t, 2.2, 20_000, 9).unwrap())
        };
        assert_eq!(run(1), run(6));
    }

    #[test]
    fn monte_carlo_walks_past_cached_prefix() {
        let t = optimal_fast(params(0.2, 0.0)).unwrap();
        let b = simulate_detection(&t, 1.5, 2000, 3).unwrap();
        for max_rounds in [1, 4] {
            let short = Truncation { max_rounds, residual: 0.0 };
            let a = simulate_with_cache(&t, 1.5, 2000, 3, &short).unwrap();
            assert_eq!(a, b);
        }
    }
}
