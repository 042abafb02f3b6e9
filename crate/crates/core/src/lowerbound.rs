//! Lower bound on the competitive ratio when fast passes never detect.
//!
//! `beta` bounds elapsed time per unit of slowly explored length. The
//! earliest times `t_i` at which the explored frontier can alternate sides
//! obey the second-order recurrence
//!
//! ```text
//! (beta v - 1) t_i = v (1 + beta) t_{i-1} - (1 - v) t_{i-2},   t_0 = 0, t_1 = 1
//! ```
//!
//! whose characteristic roots give the closed form in [`closed_form_t`].
//! The one-line first-order inequality sometimes quoted for this bound has
//! a single geometric mode and cannot produce that closed form; the
//! two-mode reading is the one implemented here.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::golden_section;
use crate::strategies::{ClosedFormCR, Formula};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundParams {
    v: f64,
    beta: f64,
}

impl LowerBoundParams {
    pub fn new(v: f64, beta: f64) -> Result<Self> {
        if !(v > 0.0 && v <= 1.0) {
            return Err(Error::InvalidSpeed(v));
        }
        if beta * v <= 1.0 || !beta.is_finite() {
            return Err(Error::InvalidBeta { v, beta });
        }
        if discriminant_sq(v, beta) < 0.0 {
            return Err(Error::InvalidBeta { v, beta });
        }
        Ok(Self { v, beta })
    }

    pub fn v(&self) -> f64 {
        self.v
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `x = sqrt(4 + v(6 beta v + (1 + beta^2) v - 4(1 + beta)))`.
    pub fn discriminant(&self) -> f64 {
        discriminant_sq(self.v, self.beta).sqrt()
    }

    /// Characteristic roots `(r+, r-)`.
    pub fn roots(&self) -> (f64, f64) {
        let (v, beta) = (self.v, self.beta);
        let x = self.discriminant();
        let denom = 2.0 * (beta * v - 1.0);
        ((v * (1.0 + beta) + x) / denom, (v * (1.0 + beta) - x) / denom)
    }
}

fn discriminant_sq(v: f64, beta: f64) -> f64 {
    4.0 + v * (6.0 * beta * v + (1.0 + beta * beta) * v - 4.0 * (1.0 + beta))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecurrenceSolution {
    pub x: f64,
    pub t: Vec<f64>,
}

/// `t_i = ((beta v - 1)/x) (r+^i - r-^i)`.
pub fn closed_form_t(v: f64, beta: f64, i: usize) -> Result<f64> {
    let lb = LowerBoundParams::new(v, beta)?;
    let (rp, rm) = lb.roots();
    let n = i as i32;
    Ok((beta * v - 1.0) / lb.discriminant() * (rp.powi(n) - rm.powi(n)))
}

/// `t_0..=t_{i_max}` by direct iteration of the recurrence.
pub fn recurrence_t(v: f64, beta: f64, i_max: usize) -> Result<RecurrenceSolution> {
    let lb = LowerBoundParams::new(v, beta)?;
    let mut t = Vec::with_capacity(i_max + 1);
    t.push(0.0);
    if i_max >= 1 {
        t.push(1.0);
    }
    for i in 2..=i_max {
        let next = (v * (1.0 + beta) * t[i - 1] - (1.0 - v) * t[i - 2]) / (beta * v - 1.0);
        t.push(next);
    }
    Ok(RecurrenceSolution { x: lb.discriminant(), t })
}

/// Limit of `1 + (1 + beta) t_i / t_{i-1}` as `i` grows.
pub fn lower_bound_cr(v: f64, beta: f64) -> Result<ClosedFormCR> {
    let lb = LowerBoundParams::new(v, beta)?;
    let x = lb.discriminant();
    let value = 1.0 + (1.0 + beta) * (v * (1.0 + beta) + x) / (2.0 * (beta * v - 1.0));
    Ok(ClosedFormCR { value, formula: Formula::LowerBound })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimalBeta {
    pub beta: f64,
    pub cr: f64,
    pub iterations: usize,
}

/// Minimizes [`lower_bound_cr`] over `beta` in `(1/v, 100/v)`.
pub fn optimal_beta(v: f64) -> Result<OptimalBeta> {
    if !(v > 0.0 && v <= 1.0) {
        return Err(Error::InvalidSpeed(v));
    }
    let lo = (1.0 / v) * (1.0 + 1e-6);
    let hi = 100.0 / v;
    let objective = |beta: f64| lower_bound_cr(v, beta).map_or(f64::INFINITY, |c| c.value);
    let m = golden_section(objective, lo, hi, 1e-10, 500);
    Ok(OptimalBeta { beta: m.x, cr: m.fx, iterations: m.iterations })
}

/// `(beta, CR)` pairs on a log-spaced grid over the admissible range.
pub fn scan_beta(v: f64, points: usize) -> Result<Vec<(f64, f64)>> {
    if !(v > 0.0 && v <= 1.0) {
        return Err(Error::InvalidSpeed(v));
    }
    let lo = (1.0 / v) * (1.0 + 1e-3);
    let hi = 100.0 / v;
    crate::numeric::logspace(lo, hi, points.max(2))
        .into_iter()
        .map(|beta| Ok((beta, lower_bound_cr(v, beta)?.value)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strategies::slow_cr;

    fn rel(x: f64, y: f64) -> f64 {
        if y == 0.0 {
            x.abs()
        } else {
            (x - y).abs() / y.abs()
        }
    }

    #[test]
    fn base_cases() {
        assert_eq!(closed_form_t(0.5, 5.0, 0).unwrap(), 0.0);
        assert!(rel(closed_form_t(0.5, 5.0, 1).unwrap(), 1.0) < 1e-15);
        assert!(rel(closed_form_t(0.5, 5.0, 2).unwrap(), 2.0) < 1e-14);
    }

    #[test]
    fn hand_iterated_sequence() {
        let sol = recurrence_t(0.5, 5.0, 3).unwrap();
        assert_eq!(sol.t[..3], [0.0, 1.0, 2.0]);
        assert!(rel(sol.t[3], 11.0 / 3.0) < 1e-15);
        assert!(rel(sol.x, 6f64.sqrt()) < 1e-15);
    }

    #[test]
    fn recurrence_matches_closed_form() {
        for k in 1..=10 {
            let v = 0.1 * k as f64;
            for beta in [1.1 / v, 1.0 + 2.0 / v, 10.0 / v] {
                let sol = recurrence_t(v, beta, 30).unwrap();
                for (i, &t) in sol.t.iter().enumerate() {
                    let cf = closed_form_t(v, beta, i).unwrap();
                    assert!(rel(cf, t) < 1e-9, "v={v} beta={beta} i={i}");
                }
                assert!(sol.t.windows(2).skip(1).all(|w| w[1] > w[0]));
            }
        }
    }

    #[test]
    fn cr_values() {
        let cr = lower_bound_cr(0.5, 5.0).unwrap().value;
        assert!(rel(cr, 7.0 + 2.0 * 6f64.sqrt()) < 1e-14);
        assert!(rel(lower_bound_cr(1.0, 3.0).unwrap().value, 9.0) < 1e-15);
        for beta in [2.1, 3.0, 10.0, 150.0] {
            let c = lower_bound_cr(0.5, beta).unwrap().value;
            assert!(c.is_finite() && c > 1.0);
        }
    }

    #[test]
    fn tight_against_slow_strategy() {
        for k in 1..=10 {
            let v = 0.1 * k as f64;
            let lb = lower_bound_cr(v, 1.0 + 2.0 / v).unwrap().value;
            assert!(rel(lb, slow_cr(v).unwrap().value) < 1e-9, "v={v}");
        }
    }

    #[test]
    fn optimum_at_one_plus_two_over_v() {
        for v in [0.1, 0.25, 0.5, 0.75, 1.0] {
            let opt = optimal_beta(v).unwrap();
            assert!((opt.beta - (1.0 + 2.0 / v)).abs() <= 1e-3, "v={v}: {}", opt.beta);
            assert!(rel(opt.cr, slow_cr(v).unwrap().value) <= 1e-9);
        }
    }

    #[test]
    fn unimodal_on_search_interval() {
        for v in [0.1, 0.5, 1.0] {
            let scan = scan_beta(v, 400).unwrap();
            let signs: Vec<bool> = scan.windows(2).map(|w| w[1].1 > w[0].1).collect();
            let changes = signs.windows(2).filter(|s| s[0] != s[1]).count();
            assert_eq!(changes, 1, "v={v}");
        }
    }

    #[test]
    fn rejects_slow_exploration_rate() {
        assert_eq!(lower_bound_cr(0.5, 2.0).unwrap_err().code(), "InvalidBeta");
        assert_eq!(closed_form_t(0.5, 1.0, 3).unwrap_err().code(), "InvalidBeta");
        assert_eq!(optimal_beta(0.0).unwrap_err().code(), "InvalidSpeed");
    }
}
