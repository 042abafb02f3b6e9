//! Acceptance suite. Runs every criterion, prints one line per criterion and
//! exits nonzero if any fails.

use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use linesearch::lowerbound::{closed_form_t, lower_bound_cr, optimal_beta, recurrence_t};
use linesearch::numeric::{golden_section, linspace};
use linesearch::oracle::{expected_cr, expected_detection_time, simulate_detection, sup_cr, BREAKPOINT_EPS};
use linesearch::strategies::{
    fast_cr, fast_cr_general, hybrid_cr, hybrid_cr1, hybrid_cr2, hybrid_cr2_mixture, hybrid_trajectory,
    optimal_fast, optimal_slow, scout_end, slow_cr, slow_cr_general, slow_ratio,
};
use linesearch::tuner::{fast_slow_threshold, fast_slow_threshold_printed, optimize_hybrid, OptimizeBudget};
use linesearch::{Result, SearchParams, Trajectory};

fn rel(x: f64, y: f64) -> f64 {
    (x - y).abs() / y.abs()
}

fn params(p: f64, v: f64) -> SearchParams {
    SearchParams::new(p, v).unwrap()
}

/// `Ok(detail)` on pass, `Err(detail)` on failure.
type Outcome = std::result::Result<String, String>;

type Criterion = (&'static str, fn() -> Result<Outcome>);

fn verdict(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn corners() -> Result<Outcome> {
    let e = (fast_cr(1.0)?.value - 9.0).abs().max((slow_cr(1.0)?.value - 9.0).abs());
    Ok(verdict(e <= 1e-12, format!("abs error {e:e} (tol 1e-12)")))
}

fn fast_sup() -> Result<Outcome> {
    let mut worst = 0.0f64;
    for p in [0.3, 0.5, 0.9] {
        let sup = sup_cr(&optimal_fast(params(p, 0.0))?, 40, 8)?.sup_cr;
        worst = worst.max(rel(sup, 8.0 / p + p / (2.0 - p)));
    }
    Ok(verdict(worst <= 0.01, format!("max rel error {worst:.3e} (tol 1%)")))
}

fn slow_sup() -> Result<Outcome> {
    let mut worst = 0.0f64;
    for v in [0.2, 0.5, 0.8] {
        let sup = sup_cr(&optimal_slow(params(0.0, v))?, 40, 8)?.sup_cr;
        let expect = 3.0 + 2.0 * (2.0 + 2.0 / v).sqrt() + 2.0 / v;
        worst = worst.max(rel(sup, expect));
    }
    Ok(verdict(worst <= 0.01, format!("max rel error {worst:.3e} (tol 1%)")))
}

fn hybrid_branches() -> Result<Outcome> {
    let mut worst = 0.0f64;
    for (p, v) in [(0.5, 0.5), (0.3, 0.7)] {
        let t = optimize_hybrid(p, v, &OptimizeBudget::default())?;
        let traj = hybrid_trajectory(params(p, v), t.a_star, t.b_star)?;
        let s = Trajectory::side(40);
        let case1 = s * scout_end(t.a_star, t.b_star, 40) * (1.0 + BREAKPOINT_EPS);
        let case2 = s * t.a_star.powi(40) * (1.0 + BREAKPOINT_EPS);
        worst = worst.max(rel(expected_cr(&traj, case1, 1e-10)?, hybrid_cr1(t.a_star, t.b_star, v)?.value));
        worst = worst.max(rel(expected_cr(&traj, case2, 1e-10)?, hybrid_cr2(t.a_star, t.b_star, p, v)?.value));
    }
    Ok(verdict(worst <= 0.005, format!("max rel error {worst:.3e} (tol 0.5%)")))
}

fn cr2_identity() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let (a, b, p, v) = (
            rng.random_range(1.1..4.0),
            rng.random_range(0.0..=1.0),
            rng.random_range(0.0..=1.0),
            rng.random_range(0.1..1.0),
        );
        worst = worst.max(rel(hybrid_cr2(a, b, p, v)?.value, hybrid_cr2_mixture(a, b, p, v)?.value));
    }
    let s1 = hybrid_cr2(2.0, 0.5, 0.5, 0.5)?.value;
    let s2 = hybrid_cr2(1.5, 0.2, 0.3, 0.7)?.value;
    let ok = worst <= 1e-10 && (s1 - 12.375).abs() <= 1e-12 && (s2 - 10.056786).abs() <= 1e-6;
    Ok(verdict(ok, format!("max rel error {worst:.3e}; spots {s1}, {s2:.6}")))
}

fn reductions() -> Result<Outcome> {
    let mut worst = 0.0f64;
    for a in linspace(1.1, 4.0, 10) {
        for v in linspace(0.1, 1.0, 10) {
            let slow = slow_cr_general(v, a)?.value;
            worst = worst.max(rel(hybrid_cr1(a, 0.0, v)?.value, slow));
            worst = worst.max(rel(hybrid_cr2(a, 0.0, 0.0, v)?.value, slow));
        }
        let v = a / 4.0;
        worst = worst.max(rel(hybrid_cr(slow_ratio(v)?, 0.0, 0.0, v)?.value, slow_cr(v)?.value));
    }
    Ok(verdict(worst <= 1e-10, format!("max rel error {worst:.3e} (tol 1e-10)")))
}

fn stationary_points() -> Result<Outcome> {
    let mut worst = 0.0f64;
    for x in [0.2, 0.5, 0.8] {
        let f = golden_section(
            |a| fast_cr_general(x, a).map_or(f64::INFINITY, |c| c.value),
            1.0 + 1e-9,
            1.0 / (1.0 - x) - 1e-9,
            1e-12,
            500,
        );
        worst = worst.max((f.x - 2.0 / (2.0 - x)).abs());
        let s = golden_section(|a| slow_cr_general(x, a).map_or(f64::INFINITY, |c| c.value), 1.0 + 1e-9, 3.0, 1e-12, 500);
        worst = worst.max((s.x - (1.0 + (2.0 * x / (1.0 + x)).sqrt())).abs());
    }
    Ok(verdict(worst <= 1e-6, format!("max argmin error {worst:.3e} (tol 1e-6)")))
}

fn lower_bound() -> Result<Outcome> {
    let start = Instant::now();
    let (mut rec, mut tight, mut beta) = (0.0f64, 0.0f64, 0.0f64);
    for k in 1..=10 {
        let v = k as f64 / 10.0;
        for b in linspace(1.05 / v, 20.0 / v, 7) {
            let sol = recurrence_t(v, b, 30)?;
            for (i, &t) in sol.t.iter().enumerate().skip(1) {
                rec = rec.max(rel(closed_form_t(v, b, i)?, t));
            }
        }
        tight = tight.max(rel(lower_bound_cr(v, 1.0 + 2.0 / v)?.value, slow_cr(v)?.value));
        beta = beta.max((optimal_beta(v)?.beta - (1.0 + 2.0 / v)).abs());
    }
    let secs = start.elapsed().as_secs_f64();
    let ok = rec <= 1e-9 && tight <= 1e-9 && beta <= 1e-3 && secs < 1.0;
    Ok(verdict(ok, format!("recurrence {rec:.2e}, tightness {tight:.2e}, beta* {beta:.2e}, {secs:.3}s")))
}

fn threshold() -> Result<Outcome> {
    let mut worst = 0.0f64;
    for k in 1..=10 {
        let p = k as f64 / 10.0;
        worst = worst.max((slow_cr(fast_slow_threshold(p)?)?.value - fast_cr(p)?.value).abs());
    }
    let one = (fast_slow_threshold(1.0)? - 1.0).abs();
    let ok = worst <= 1e-9 && one <= 1e-12;
    Ok(verdict(
        ok,
        format!(
            "identity {worst:.2e}, v_th(1) error {one:.1e}; at p=0.5 root {:.4} vs alternative form {:.4}",
            fast_slow_threshold(0.5)?,
            fast_slow_threshold_printed(0.5)?
        ),
    ))
}

fn dominance() -> Result<Outcome> {
    let axis = linspace(0.05, 0.95, 20);
    let mut worst = f64::NEG_INFINITY;
    for &p in &axis {
        for &v in &axis {
            worst = worst.max(optimize_hybrid(p, v, &OptimizeBudget::default())?.cr_star - slow_cr(v)?.value);
        }
    }
    Ok(verdict(worst <= 1e-6, format!("max cr* - slow_cr {worst:.3e} (tol 1e-6)")))
}

fn monte_carlo() -> Result<Outcome> {
    let tuned = optimize_hybrid(0.5, 0.5, &OptimizeBudget::default())?;
    let cases = [
        ("fast", optimal_fast(params(0.5, 0.0))?, 1.7),
        ("hybrid", hybrid_trajectory(params(0.5, 0.5), tuned.a_star, tuned.b_star)?, 3.3),
    ];
    let mut ok = true;
    let mut detail = Vec::new();
    for (name, traj, d) in &cases {
        let exact = expected_detection_time(traj, *d, 1e-12)?.value;
        let z = |seed: u64| -> Result<f64> {
            let mc = simulate_detection(traj, *d, 100_000, seed)?;
            Ok((mc.mean - exact) / mc.std_error)
        };
        let fixed = z(42)?;
        let mut passing = 0;
        for seed in 1000..1100 {
            passing += usize::from(z(seed)?.abs() <= 3.0);
        }
        ok &= fixed.abs() <= 3.0 && passing >= 99;
        detail.push(format!("{name}: z={fixed:.3}, {passing}/100 seeds"));
    }
    Ok(verdict(ok, detail.join("; ")))
}

fn determinism() -> Result<Outcome> {
    let dir = std::env::temp_dir().join(format!("linesearch-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let run = |jobs: &str, tag: &str, format: &str| -> Vec<u8> {
        let path = dir.join(format!("{tag}.{format}"));
        let status = Command::new(env!("CARGO_BIN_EXE_linesearch"))
            .args(["--jobs", jobs, "heatmap", "--quantity", "improvement", "--grid", "20", "--seed", "1"])
            .args(["--format", format, "--output"])
            .arg(&path)
            .status()
            .expect("run binary");
        assert!(status.success());
        std::fs::read(&path).unwrap()
    };
    let mut ok = true;
    for format in ["csv", "json"] {
        let first = run("1", "a", format);
        ok &= first == run("1", "b", format) && first == run("8", "c", format) && !first.is_empty();
    }
    let _ = std::fs::remove_dir_all(&dir);
    Ok(verdict(ok, "CSV and JSON, two runs and --jobs 1 vs 8".into()))
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("classic corners", corners),
        ("fast sup vs closed form", fast_sup),
        ("slow sup vs closed form", slow_sup),
        ("hybrid branches vs oracle", hybrid_branches),
        ("CR2 dual derivation", cr2_identity),
        ("reductions at b = 0", reductions),
        ("closed-form ratios optimal", stationary_points),
        ("lower bound suite", lower_bound),
        ("threshold identity", threshold),
        ("hybrid dominance", dominance),
        ("Monte Carlo consistency", monte_carlo),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check().unwrap_or_else(|e| Err(format!("error: {e}")));
        let secs = start.elapsed().as_secs_f64();
        let (status, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        println!("criterion {:>2} {status} {name}: {detail} [{secs:.2}s]", k + 1);
        failed += usize::from(outcome.is_err());
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
