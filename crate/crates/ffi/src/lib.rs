//! C interface to the `linesearch` library.
//!
//! Every fallible function returns an [`LsStatus`] and writes its result
//! through an out-pointer. The detail of the most recent error on the
//! calling thread is available from [`ls_last_error`]. Handles are opaque
//! and must be released with their matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use linesearch::lowerbound::lower_bound_cr;
use linesearch::oracle::{expected_cr, simulate_detection, sup_cr};
use linesearch::strategies::{
    fast_cr, fast_ratio, fast_trajectory, hybrid_cr, hybrid_cr1, hybrid_cr2, hybrid_trajectory, slow_cr,
    slow_ratio, slow_trajectory,
};
use linesearch::tuner::{build_heatmap, fast_slow_threshold, optimize_hybrid, HeatmapGrid, OptimizeBudget, Quantity};
use linesearch::{validate_params, Error, SearchParams, StrategySpec, Trajectory};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LsStatus {
    Ok = 0,
    InvalidProbability = 1,
    InvalidSpeed = 2,
    UnsolvableInstance = 3,
    DivergentFastRatio = 4,
    RatioNotAboveOne = 5,
    InvalidScoutRatio = 6,
    SlowSpeedZero = 7,
    NeverPassed = 8,
    DivergentSeries = 9,
    NoDetection = 10,
    TruncationLimit = 11,
    InvalidTarget = 12,
    InvalidBeta = 13,
    InvalidArgument = 14,
    NullPointer = 15,
    Panic = 16,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LsAlgorithm {
    Fast = 0,
    Slow = 1,
    Hybrid = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LsQuantity {
    CrBest = 0,
    CrFast = 1,
    CrSlow = 2,
    CrHybrid = 3,
    AStar = 4,
    BStar = 5,
    Improvement = 6,
    Region = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LsSupResult {
    pub sup_cr: f64,
    pub argmax_d: f64,
    pub argmax_round: usize,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LsMonteCarlo {
    pub mean: f64,
    pub std_error: f64,
    pub trials: u64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LsTunedHybrid {
    pub a_star: f64,
    pub b_star: f64,
    pub cr_star: f64,
    pub cr1: f64,
    pub cr2: f64,
    pub iterations: usize,
    pub converged: bool,
    pub hit_a_bound: bool,
}

/// Opaque strategy handle.
pub struct LsStrategy {
    traj: Trajectory,
}

/// Opaque heatmap handle.
pub struct LsHeatmap {
    grid: HeatmapGrid,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> LsStatus {
    match e {
        Error::InvalidProbability(_) => LsStatus::InvalidProbability,
        Error::InvalidSpeed(_) => LsStatus::InvalidSpeed,
        Error::UnsolvableInstance => LsStatus::UnsolvableInstance,
        Error::DivergentFastRatio { .. } => LsStatus::DivergentFastRatio,
        Error::RatioNotAboveOne(_) => LsStatus::RatioNotAboveOne,
        Error::InvalidScoutRatio(_) => LsStatus::InvalidScoutRatio,
        Error::SlowSpeedZero => LsStatus::SlowSpeedZero,
        Error::NeverPassed(_) => LsStatus::NeverPassed,
        Error::DivergentSeries { .. } => LsStatus::DivergentSeries,
        Error::NoDetection => LsStatus::NoDetection,
        Error::TruncationLimit { .. } => LsStatus::TruncationLimit,
        Error::InvalidTarget(_) => LsStatus::InvalidTarget,
        Error::InvalidBeta { .. } => LsStatus::InvalidBeta,
        Error::InvalidArgument(_) => LsStatus::InvalidArgument,
    }
}

/// Runs `f`, converting errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), LsStatus>) -> LsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            LsStatus::Ok
        }
        Ok(Err(status)) => status,
        Err(_) => {
            set_last_error("internal panic");
            LsStatus::Panic
        }
    }
}

trait IntoStatus<T> {
    fn status(self) -> Result<T, LsStatus>;
}

impl<T> IntoStatus<T> for linesearch::Result<T> {
    fn status(self) -> Result<T, LsStatus> {
        self.map_err(|e| {
            set_last_error(&e.to_string());
            status_of(&e)
        })
    }
}

fn null() -> LsStatus {
    set_last_error("null pointer argument");
    LsStatus::NullPointer
}

macro_rules! out {
    ($ptr:expr) => {
        if $ptr.is_null() {
            return Err(null());
        }
    };
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ls_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Short static description of a status code.
#[no_mangle]
pub extern "C" fn ls_status_message(status: LsStatus) -> *const c_char {
    let s: &'static CStr = match status {
        LsStatus::Ok => c"ok",
        LsStatus::InvalidProbability => c"detection probability outside [0, 1]",
        LsStatus::InvalidSpeed => c"slow speed outside [0, 1]",
        LsStatus::UnsolvableInstance => c"p = 0 and v = 0: target never detected",
        LsStatus::DivergentFastRatio => c"expansion ratio too large for the fast strategy",
        LsStatus::RatioNotAboveOne => c"expansion ratio must exceed 1",
        LsStatus::InvalidScoutRatio => c"scout ratio outside [0, 1]",
        LsStatus::SlowSpeedZero => c"strategy needs a positive slow speed",
        LsStatus::NeverPassed => c"target not reached",
        LsStatus::DivergentSeries => c"expected detection time diverges",
        LsStatus::NoDetection => c"no pass can detect the target",
        LsStatus::TruncationLimit => c"series truncation limit reached",
        LsStatus::InvalidTarget => c"target must be finite and nonzero",
        LsStatus::InvalidBeta => c"invalid beta",
        LsStatus::InvalidArgument => c"invalid argument",
        LsStatus::NullPointer => c"null pointer argument",
        LsStatus::Panic => c"internal panic",
    };
    s.as_ptr()
}

/// Detail of the last error on this thread. Valid until the next call into
/// the library from the same thread.
#[no_mangle]
pub extern "C" fn ls_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// # Safety
/// `out` must be null or writable.
unsafe fn scalar(out: *mut f64, f: impl FnOnce() -> linesearch::Result<f64>) -> LsStatus {
    guard(|| {
        out!(out);
        let x = f().status()?;
        // SAFETY: checked non-null; the caller provides a writable f64.
        unsafe { *out = x };
        Ok(())
    })
}

/// Ratio of the fast strategy at its optimal expansion ratio.
///
/// # Safety
/// `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn ls_fast_cr(p: f64, out: *mut f64) -> LsStatus {
    scalar(out, || fast_cr(p).map(|c| c.value))
}

/// # Safety
/// `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn ls_slow_cr(v: f64, out: *mut f64) -> LsStatus {
    scalar(out, || slow_cr(v).map(|c| c.value))
}

/// # Safety
/// `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn ls_fast_ratio(p: f64, out: *mut f64) -> LsStatus {
    scalar(out, || fast_ratio(p))
}

/// # Safety
/// `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn ls_slow_ratio(v: f64, out: *mut f64) -> LsStatus {
    scalar(out, || slow_ratio(v))
}

/// # Safety
/// `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn ls_hybrid_cr(a: f64, b: f64, p: f64, v: f64, out: *mut f64) -> LsStatus {
    scalar(out, || hybrid_cr(a, b, p, v).map(|c| c.value))
}

/// # Safety
/// `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn ls_hybrid_cr1(a: f64, b: f64, v: f64, out: *mut f64) -> LsStatus {
    scalar(out, || hybrid_cr1(a, b, v).map(|c| c.value))
}

/// # Safety
/// `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn ls_hybrid_cr2(a: f64, b: f64, p: f64, v: f64, out: *mut f64) -> LsStatus {
    scalar(out, || hybrid_cr2(a, b, p, v).map(|c| c.value))
}

/// # Safety
/// `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn ls_lower_bound_cr(v: f64, beta: f64, out: *mut f64) -> LsStatus {
    scalar(out, || lower_bound_cr(v, beta).map(|c| c.value))
}

/// Slow speed at which the fast and slow strategies tie.
///
/// # Safety
/// `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn ls_fast_slow_threshold(p: f64, out: *mut f64) -> LsStatus {
    scalar(out, || fast_slow_threshold(p))
}

/// Creates a strategy. `b` is ignored unless `algorithm` is hybrid.
///
/// # Safety
/// `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn ls_strategy_new(
    algorithm: LsAlgorithm,
    p: f64,
    v: f64,
    a: f64,
    b: f64,
    out: *mut *mut LsStrategy,
) -> LsStatus {
    guard(|| {
        out!(out);
        let spec = match algorithm {
            LsAlgorithm::Fast => StrategySpec::fast(a),
            LsAlgorithm::Slow => StrategySpec::slow(a),
            LsAlgorithm::Hybrid => StrategySpec::hybrid(a, b),
        };
        let params = SearchParams::new(p, v).status()?;
        let (params, spec) = validate_params(params, spec).status()?;
        let traj = match algorithm {
            LsAlgorithm::Fast => fast_trajectory(params, spec.a),
            LsAlgorithm::Slow => slow_trajectory(params, spec.a),
            LsAlgorithm::Hybrid => hybrid_trajectory(params, spec.a, spec.b),
        }
        .status()?;
        // SAFETY: checked non-null.
        unsafe { *out = Box::into_raw(Box::new(LsStrategy { traj })) };
        Ok(())
    })
}

/// Releases a strategy. Null is ignored.
///
/// # Safety
/// `handle` must come from [`ls_strategy_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ls_strategy_free(handle: *mut LsStrategy) {
    if !handle.is_null() {
        drop(unsafe { Box::from_raw(handle) });
    }
}

/// # Safety
/// `handle` must be a live strategy handle or null.
unsafe fn strategy<'a>(handle: *const LsStrategy) -> Result<&'a Trajectory, LsStatus> {
    unsafe { handle.as_ref() }.map(|h| &h.traj).ok_or_else(null)
}

/// Exact expected competitive ratio for a target at signed distance `d`.
///
/// # Safety
/// `handle` must be a live strategy handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ls_strategy_expected_cr(
    handle: *const LsStrategy,
    d: f64,
    tol: f64,
    out: *mut f64,
) -> LsStatus {
    guard(|| {
        out!(out);
        let traj = unsafe { strategy(handle) }?;
        let x = expected_cr(traj, d, tol).status()?;
        unsafe { *out = x };
        Ok(())
    })
}

/// Worst expected ratio over targets in the first `rounds` rounds.
///
/// # Safety
/// `handle` must be a live strategy handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ls_strategy_sup_cr(
    handle: *const LsStrategy,
    rounds: usize,
    samples_per_round: usize,
    out: *mut LsSupResult,
) -> LsStatus {
    guard(|| {
        out!(out);
        let traj = unsafe { strategy(handle) }?;
        let s = sup_cr(traj, rounds, samples_per_round).status()?;
        unsafe {
            *out = LsSupResult { sup_cr: s.sup_cr, argmax_d: s.argmax_d, argmax_round: s.argmax_round }
        };
        Ok(())
    })
}

/// Monte Carlo estimate of the detection time at `d`.
///
/// # Safety
/// `handle` must be a live strategy handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ls_strategy_simulate(
    handle: *const LsStrategy,
    d: f64,
    trials: u64,
    seed: u64,
    out: *mut LsMonteCarlo,
) -> LsStatus {
    guard(|| {
        out!(out);
        let traj = unsafe { strategy(handle) }?;
        let m = simulate_detection(traj, d, trials, seed).status()?;
        unsafe { *out = LsMonteCarlo { mean: m.mean, std_error: m.std_error, trials: m.trials } };
        Ok(())
    })
}

/// Tunes the hybrid strategy with the default budget.
///
/// # Safety
/// `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn ls_optimize_hybrid(p: f64, v: f64, out: *mut LsTunedHybrid) -> LsStatus {
    guard(|| {
        out!(out);
        let t = optimize_hybrid(p, v, &OptimizeBudget::default()).status()?;
        // SAFETY: checked non-null.
        unsafe {
            *out = LsTunedHybrid {
                a_star: t.a_star,
                b_star: t.b_star,
                cr_star: t.cr_star,
                cr1: t.cr1,
                cr2: t.cr2,
                iterations: t.iterations,
                converged: t.converged,
                hit_a_bound: t.hit_a_bound,
            }
        };
        Ok(())
    })
}

fn quantity(q: LsQuantity) -> Quantity {
    match q {
        LsQuantity::CrBest => Quantity::CrBest,
        LsQuantity::CrFast => Quantity::CrFast,
        LsQuantity::CrSlow => Quantity::CrSlow,
        LsQuantity::CrHybrid => Quantity::CrHybrid,
        LsQuantity::AStar => Quantity::AStar,
        LsQuantity::BStar => Quantity::BStar,
        LsQuantity::Improvement => Quantity::Improvement,
        LsQuantity::Region => Quantity::Region,
    }
}

/// Builds a `grid_n x grid_n` heatmap with the default optimizer budget.
///
/// # Safety
/// `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn ls_heatmap_new(
    q: LsQuantity,
    grid_n: usize,
    p_min: f64,
    p_max: f64,
    v_min: f64,
    v_max: f64,
    seed: u64,
    out: *mut *mut LsHeatmap,
) -> LsStatus {
    guard(|| {
        out!(out);
        let grid = build_heatmap(
            quantity(q),
            grid_n,
            (p_min, p_max),
            (v_min, v_max),
            &OptimizeBudget::default(),
            seed,
        )
        .status()?;
        // SAFETY: checked non-null.
        unsafe { *out = Box::into_raw(Box::new(LsHeatmap { grid })) };
        Ok(())
    })
}

/// # Safety
/// `handle` must come from [`ls_heatmap_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ls_heatmap_free(handle: *mut LsHeatmap) {
    if !handle.is_null() {
        drop(unsafe { Box::from_raw(handle) });
    }
}

/// # Safety
/// `handle` must be a live heatmap handle or null.
unsafe fn heatmap<'a>(handle: *const LsHeatmap) -> Result<&'a HeatmapGrid, LsStatus> {
    unsafe { handle.as_ref() }.map(|h| &h.grid).ok_or_else(null)
}

/// Number of points along the p and v axes.
///
/// # Safety
/// `handle` must be live; `n_p` and `n_v` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ls_heatmap_dims(handle: *const LsHeatmap, n_p: *mut usize, n_v: *mut usize) -> LsStatus {
    guard(|| {
        out!(n_p);
        out!(n_v);
        let g = unsafe { heatmap(handle) }?;
        unsafe {
            *n_p = g.p_axis.len();
            *n_v = g.v_axis.len();
        }
        Ok(())
    })
}

/// Copies the values, rows by v then columns by p, into `buf`.
///
/// # Safety
/// `handle` must be live; `buf` must have room for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn ls_heatmap_values(handle: *const LsHeatmap, buf: *mut f64, len: usize) -> LsStatus {
    guard(|| {
        out!(buf);
        let g = unsafe { heatmap(handle) }?;
        let need = g.p_axis.len() * g.v_axis.len();
        if len < need {
            set_last_error(&format!("buffer holds {len} values, {need} needed"));
            return Err(LsStatus::InvalidArgument);
        }
        for (k, x) in g.values.iter().flatten().enumerate() {
            unsafe { *buf.add(k) = *x };
        }
        Ok(())
    })
}

fn export(text: String) -> *mut c_char {
    CString::new(text).map_or(ptr::null_mut(), CString::into_raw)
}

/// Heatmap as JSON; release with [`ls_string_free`]. Null on error.
///
/// # Safety
/// `handle` must be a live heatmap handle or null.
#[no_mangle]
pub unsafe extern "C" fn ls_heatmap_to_json(handle: *const LsHeatmap) -> *mut c_char {
    match unsafe { heatmap(handle) } {
        Ok(g) => export(g.to_json()),
        Err(_) => ptr::null_mut(),
    }
}

/// Heatmap as CSV; release with [`ls_string_free`]. Null on error.
///
/// # Safety
/// `handle` must be a live heatmap handle or null.
#[no_mangle]
pub unsafe extern "C" fn ls_heatmap_to_csv(handle: *const LsHeatmap) -> *mut c_char {
    match unsafe { heatmap(handle) } {
        Ok(g) => export(g.to_csv()),
        Err(_) => ptr::null_mut(),
    }
}

/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ls_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}
