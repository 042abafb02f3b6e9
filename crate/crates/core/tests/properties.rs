use proptest::prelude::*;

use linesearch::oracle::{detection_distribution, expected_detection_time};
use linesearch::strategies::{fast_trajectory, hybrid_cr2, hybrid_cr2_mixture, hybrid_trajectory, slow_trajectory};
use linesearch::{SearchParams, SpeedClass, Trajectory};

fn any_trajectory() -> impl Strategy<Value = Trajectory> {
    (0usize..3, 0.05..1.0f64, 0.05..1.0f64, 1.05..3.0f64, 0.0..=1.0f64).prop_map(|(kind, p, v, a, b)| {
        let params = SearchParams::new(p, v).unwrap();
        match kind {
            0 => fast_trajectory(params, a.min(0.99 / (1.0 - p)).max(1.01)).unwrap(),
            1 => slow_trajectory(params, a).unwrap(),
            _ => hybrid_trajectory(params, a, b).unwrap(),
        }
    })
}

proptest! {
    #[test]
    fn cr2_matches_mixture(a in 1.1..4.0f64, b in 0.0..=1.0f64, p in 0.0..=1.0f64, v in 0.1..1.0f64) {
        let direct = hybrid_cr2(a, b, p, v).unwrap().value;
        let mixture = hybrid_cr2_mixture(a, b, p, v).unwrap().value;
        prop_assert!((direct - mixture).abs() <= 1e-10 * direct.abs());
    }

    #[test]
    fn segments_are_contiguous(traj in any_trajectory()) {
        let v = traj.params().v();
        let segs: Vec<_> = traj.segments().take(60).collect();
        prop_assert_eq!(segs[0].start_pos, 0.0);
        prop_assert_eq!(segs[0].start_time, 0.0);
        for w in segs.windows(2) {
            prop_assert_eq!(w[0].end_pos, w[1].start_pos);
            prop_assert_eq!(w[0].end_time, w[1].start_time);
        }
        for s in &segs {
            let speed = match s.speed { SpeedClass::Fast => 1.0, SpeedClass::Slow => v };
            let expect = s.length() / speed;
            prop_assert!((s.duration() - expect).abs() <= 1e-9 * expect.max(1.0));
        }
    }

    #[test]
    fn round_durations_are_geometric(traj in any_trajectory()) {
        let c = traj.round_time_coefficient();
        let a = traj.spec().a;
        for round in traj.rounds().take(12) {
            let expect = c * a.powi(round.index as i32);
            prop_assert!((round.duration() - expect).abs() <= 1e-9 * expect);
        }
    }

    #[test]
    fn probability_is_conserved(traj in any_trajectory(), d in 1.01..50.0f64, neg in any::<bool>()) {
        let d = if neg { -d } else { d };
        if let Ok(dist) = detection_distribution(&traj, d, 1e-10) {
            let total = dist.total_probability();
            let leftover = if dist.absorbed { 0.0 } else { dist.residual };
            prop_assert!((total + leftover - 1.0).abs() <= 1e-9);
            let e = expected_detection_time(&traj, d, 1e-10).unwrap();
            prop_assert!(e.value >= d.abs() - 1e-9);
        }
    }
}
