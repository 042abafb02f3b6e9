//! Numerical tuning of the hybrid strategy and fast/slow/hybrid comparison.

mod heatmap;

pub use heatmap::{build_heatmap, parse_csv, CsvGrid, HeatmapGrid, HeatmapMeta, Quantity};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{golden_section, linspace, logspace};
use crate::strategies::{fast_cr, hybrid_cr, hybrid_cr1, hybrid_cr2, slow_cr, slow_ratio};

/// Smallest expansion ratio probed by the optimizer.
pub const A_MIN: f64 = 1.0 + 1e-6;
/// Largest expansion ratio probed by the optimizer.
pub const A_MAX: f64 = 6.0;
/// Comparisons closer than this count as ties.
pub const TIE_TOL: f64 = 1e-9;

const REFINE_TOL: f64 = 1e-10;
const INNER_ITERATIONS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizeBudget {
    /// Points per axis of the coarse `(a, b)` grid.
    pub coarse: usize,
    /// Golden-section steps allowed for the refinement in `b`.
    pub max_iterations: usize,
}

impl Default for OptimizeBudget {
    fn default() -> Self {
        // 128 x 128 = 16,384 coarse evaluations.
        Self { coarse: 128, max_iterations: 200 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TunedHybrid {
    pub a_star: f64,
    pub b_star: f64,
    pub cr_star: f64,
    pub cr1: f64,
    pub cr2: f64,
    pub iterations: usize,
    pub converged: bool,
    /// The optimum sits on the upper `a` guard of the search box.
    pub hit_a_bound: bool,
}

fn check_inputs(p: f64, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidProbability(p));
    }
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::InvalidSpeed(v));
    }
    if v == 0.0 {
        return Err(Error::SlowSpeedZero);
    }
    Ok(())
}

fn objective(p: f64, v: f64) -> impl Fn(f64, f64) -> f64 {
    move |a, b| hybrid_cr(a, b, p, v).map_or(f64::INFINITY, |c| c.value)
}

struct CoarseGrid {
    a: Vec<f64>,
    b: Vec<f64>,
    /// `(cr, ia, ib)` sorted ascending by cr, then by index.
    ranked: Vec<(f64, usize, usize)>,
}

fn coarse_grid(p: f64, v: f64, budget: &OptimizeBudget) -> Result<CoarseGrid> {
    if budget.coarse < 3 {
        return Err(Error::InvalidArgument("coarse grid needs at least 3 points per axis".into()));
    }
    let f = objective(p, v);
    let a = logspace(A_MIN, A_MAX, budget.coarse);
    let b = linspace(0.0, 1.0, budget.coarse);
    let mut ranked = Vec::with_capacity(a.len() * b.len());
    for (ia, &av) in a.iter().enumerate() {
        for (ib, &bv) in b.iter().enumerate() {
            ranked.push((f(av, bv), ia, ib));
        }
    }
    ranked.sort_by(|x, y| x.0.total_cmp(&y.0).then((x.1, x.2).cmp(&(y.1, y.2))));
    Ok(CoarseGrid { a, b, ranked })
}

/// Nested golden-section search: an outer search over `b` in a two-cell
/// bracket around the seed column, an inner search over the whole `a` range.
/// The bracket slides while the minimum sits on one of its edges.
fn refine(p: f64, v: f64, grid: &CoarseGrid, ib: usize, budget: &OptimizeBudget) -> (f64, f64, f64, usize, bool) {
    let f = objective(p, v);
    let best_a = |b: f64| golden_section(|a| f(a, b), A_MIN, A_MAX, REFINE_TOL, INNER_ITERATIONS);
    let last = grid.b.len() - 1;
    let mut lo = ib.saturating_sub(1);
    let mut hi = (ib + 1).min(last);
    let mut iterations = 0;
    loop {
        let outer = golden_section(|b| best_a(b).fx, grid.b[lo], grid.b[hi], REFINE_TOL, budget.max_iterations);
        iterations += outer.iterations;
        let step_down = lo > 0 && outer.x <= grid.b[lo];
        let step_up = hi < last && outer.x >= grid.b[hi];
        if !(step_down || step_up) || iterations >= budget.max_iterations * grid.b.len() {
            let inner = best_a(outer.x);
            return (inner.x, outer.x, inner.fx, iterations, outer.converged);
        }
        if step_down {
            lo -= 1;
            hi -= 1;
        } else {
            lo += 1;
            hi += 1;
        }
    }
}

fn finish(p: f64, v: f64, a: f64, b: f64, cr: f64, iterations: usize, converged: bool) -> Result<TunedHybrid> {
    Ok(TunedHybrid {
        a_star: a,
        b_star: b,
        cr_star: cr,
        cr1: hybrid_cr1(a, b, v)?.value,
        cr2: hybrid_cr2(a, b, p, v)?.value,
        iterations,
        converged,
        hit_a_bound: a >= A_MAX * (1.0 - 1e-9),
    })
}

/// Minimizes the hybrid competitive ratio over `a in (1, 6]`, `b in [0, 1]`.
///
/// A coarse grid picks the starting cell; nested golden-section refines it.
/// The slow strategy `(1 + sqrt(2v/(1+v)), 0)` is always a candidate, so the
/// result never exceeds the slow ratio.
pub fn optimize_hybrid(p: f64, v: f64, budget: &OptimizeBudget) -> Result<TunedHybrid> {
    check_inputs(p, v)?;
    let grid = coarse_grid(p, v, budget)?;
    let (coarse_cr, ia, ib) = grid.ranked[0];
    let f = objective(p, v);

    let (ra, rb, rcr, iterations, converged) = refine(p, v, &grid, ib, budget);
    let slow_a = slow_ratio(v)?;
    let candidates = [
        (ra, rb, rcr),
        (grid.a[ia], grid.b[ib], coarse_cr),
        (slow_a, 0.0, f(slow_a, 0.0)),
    ];
    let &(a, b, cr) = candidates
        .iter()
        .min_by(|x, y| x.2.total_cmp(&y.2))
        .expect("non-empty");
    finish(p, v, a, b, cr, iterations, converged)
}

/// Refinement started from each of the `k` best distinct coarse `b`
/// columns; used to detect competing local minima.
pub fn optimize_hybrid_restarts(p: f64, v: f64, budget: &OptimizeBudget, k: usize) -> Result<Vec<TunedHybrid>> {
    check_inputs(p, v)?;
    let grid = coarse_grid(p, v, budget)?;
    let mut seen = Vec::new();
    for &(_, _, ib) in &grid.ranked {
        if seen.len() == k {
            break;
        }
        if !seen.contains(&ib) {
            seen.push(ib);
        }
    }
    seen.into_iter()
        .map(|ib| {
            let (a, b, cr, it, conv) = refine(p, v, &grid, ib, budget);
            finish(p, v, a, b, cr, it, conv)
        })
        .collect()
}

/// Slow speed at which the fast and slow strategies tie:
/// `p(2-p) / ((p^2 - 5p + 8) - (4-p) sqrt(p(2-p)))`.
///
/// Below it the fast strategy has the smaller ratio. Zero at p = 0.
pub fn fast_slow_threshold(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidProbability(p));
    }
    if p == 0.0 {
        return Ok(0.0);
    }
    let s = (p * (2.0 - p)).sqrt();
    Ok(p * (2.0 - p) / ((p * p - 5.0 * p + 8.0) - (4.0 - p) * s))
}

/// Alternative threshold expression
/// `2p / (8 - p(1-p)^2 - 2 sqrt(p(8 + p^2(2-p))))`.
///
/// It does not satisfy `slow_cr(v) = fast_cr(p)` (0.2644 against 0.2758 at
/// p = 0.5) and is kept only so the two boundaries can be compared.
pub fn fast_slow_threshold_printed(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidProbability(p));
    }
    let root = (p * (8.0 + p * p * (2.0 - p))).sqrt();
    Ok(2.0 * p / (8.0 - p * (1.0 - p).powi(2) - 2.0 * root))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Region {
    FastBest,
    SlowBeatsFast,
    HybridBeatsFastSlowDoesNot,
    /// p = 0 and v = 0: nothing detects.
    Degenerate,
}

impl Region {
    pub fn code(&self) -> u8 {
        match self {
            Region::FastBest => 0,
            Region::SlowBeatsFast => 1,
            Region::HybridBeatsFastSlowDoesNot => 2,
            Region::Degenerate => 3,
        }
    }
}

/// Compares the three strategies at `(p, v)`. Near-ties go to `FastBest`.
/// Pass `None` for `tuned` when the hybrid is unavailable (v = 0).
pub fn classify_region(p: f64, v: f64, tuned: Option<&TunedHybrid>) -> Result<Region> {
    let fast = fast_cr(p)?.value;
    let slow = slow_cr(v)?.value;
    let hybrid = tuned.map_or(f64::INFINITY, |t| t.cr_star);
    if fast.is_infinite() && slow.is_infinite() && hybrid.is_infinite() {
        return Ok(Region::Degenerate);
    }
    let beats_fast = |cr: f64| cr.is_finite() && (fast.is_infinite() || cr < fast - TIE_TOL);
    Ok(if beats_fast(slow) {
        Region::SlowBeatsFast
    } else if beats_fast(hybrid) {
        Region::HybridBeatsFastSlowDoesNot
    } else {
        Region::FastBest
    })
}
