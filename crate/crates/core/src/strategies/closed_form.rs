//! Closed-form expected competitive ratios.
//!
//! Every function here is a pure scalar evaluation; nothing is cached.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::fast_ratio_limit;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Formula {
    Fast,
    FastGeneral,
    Slow,
    SlowGeneral,
    HybridCase1,
    HybridCase2,
    HybridCase2Mixture,
    Hybrid,
    LowerBound,
}

/// A competitive ratio together with the formula that produced it.
/// `value` may be `+inf` where the ratio is unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormCR {
    pub value: f64,
    pub formula: Formula,
}

impl ClosedFormCR {
    fn new(value: f64, formula: Formula) -> Self {
        Self { value, formula }
    }

    pub fn is_infinite(&self) -> bool {
        self.value.is_infinite()
    }
}

fn check_p(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidProbability(p))
    }
}

fn check_v(v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::InvalidSpeed(v));
    }
    if v == 0.0 {
        return Err(Error::SlowSpeedZero);
    }
    Ok(())
}

fn check_a(a: f64) -> Result<()> {
    if a > 1.0 && a.is_finite() {
        Ok(())
    } else {
        Err(Error::RatioNotAboveOne(a))
    }
}

fn check_b(b: f64) -> Result<()> {
    if (0.0..=1.0).contains(&b) {
        Ok(())
    } else {
        Err(Error::InvalidScoutRatio(b))
    }
}

/// Optimal fast expansion ratio `2/(2-p)`.
pub fn fast_ratio(p: f64) -> Result<f64> {
    check_p(p)?;
    if p == 0.0 {
        return Err(Error::DivergentFastRatio { a: 1.0, limit: 1.0 });
    }
    Ok(2.0 / (2.0 - p))
}

/// `8/p + p/(2-p)`; infinite at p = 0.
pub fn fast_cr(p: f64) -> Result<ClosedFormCR> {
    check_p(p)?;
    let value = if p == 0.0 { f64::INFINITY } else { 8.0 / p + p / (2.0 - p) };
    Ok(ClosedFormCR::new(value, Formula::Fast))
}

/// Fast ratio for an arbitrary convergent `a`:
/// `2a^2 p / ((a-1)(1 + a(p-1))) + p/(2-p)`.
pub fn fast_cr_general(p: f64, a: f64) -> Result<ClosedFormCR> {
    check_p(p)?;
    check_a(a)?;
    let limit = fast_ratio_limit(p);
    if p == 0.0 || a >= limit {
        return Err(Error::DivergentFastRatio { a, limit });
    }
    let value = 2.0 * a * a * p / ((a - 1.0) * (1.0 + a * (p - 1.0))) + p / (2.0 - p);
    Ok(ClosedFormCR::new(value, Formula::FastGeneral))
}

/// Optimal slow expansion ratio `1 + sqrt(2v/(1+v))`.
pub fn slow_ratio(v: f64) -> Result<f64> {
    check_v(v)?;
    Ok(1.0 + (2.0 * v / (1.0 + v)).sqrt())
}

/// `3 + 2 sqrt(2 + 2/v) + 2/v`; infinite at v = 0.
pub fn slow_cr(v: f64) -> Result<ClosedFormCR> {
    let value = match check_v(v) {
        Ok(()) => 3.0 + 2.0 * (2.0 + 2.0 / v).sqrt() + 2.0 / v,
        Err(Error::SlowSpeedZero) => f64::INFINITY,
        Err(e) => return Err(e),
    };
    Ok(ClosedFormCR::new(value, Formula::Slow))
}

/// Slow ratio for arbitrary `a`: `1 + (a^2(1+v) + v - 1) / ((a-1) v)`.
pub fn slow_cr_general(v: f64, a: f64) -> Result<ClosedFormCR> {
    check_v(v)?;
    check_a(a)?;
    let value = 1.0 + (a * a * (1.0 + v) + v - 1.0) / ((a - 1.0) * v);
    Ok(ClosedFormCR::new(value, Formula::SlowGeneral))
}

/// Hybrid worst case with the target just past the scout end point.
pub fn hybrid_cr1(a: f64, b: f64, v: f64) -> Result<ClosedFormCR> {
    check_a(a)?;
    check_b(b)?;
    check_v(v)?;
    let g = a * a - 1.0;
    let inner = g * b / v + (a * a * (2.0 * g * b * v + v + 1.0) + v - 1.0) / ((a - 1.0) * v) + 1.0;
    Ok(ClosedFormCR::new(inner / (g * b + 1.0), Formula::HybridCase1))
}

/// Hybrid worst case with the target just past a turnaround point, inside
/// the scouted stretch.
pub fn hybrid_cr2(a: f64, b: f64, p: f64, v: f64) -> Result<ClosedFormCR> {
    check_a(a)?;
    check_b(b)?;
    check_p(p)?;
    check_v(v)?;
    let q = p - 1.0;
    let bracket = 2.0 * a * a * b * q * q
        + a * (1.0 / (a - 1.0) - 2.0 * b * q * p)
        + (p - 2.0) * p * (v - 1.0) / (a * v)
        + p * (2.0 * b + p - 2.0)
        + q * q / v;
    Ok(ClosedFormCR::new((a + 1.0) * bracket, Formula::HybridCase2))
}

/// Same quantity as [`hybrid_cr2`], assembled from the three detection
/// outcomes: scout pass out (p), scout pass back (p(1-p)), next visit
/// (1-p)^2. Each term is the limiting time per unit distance.
pub fn hybrid_cr2_mixture(a: f64, b: f64, p: f64, v: f64) -> Result<ClosedFormCR> {
    check_a(a)?;
    check_b(b)?;
    check_p(p)?;
    check_v(v)?;
    let w = a.powi(-2) + (1.0 - a.powi(-2)) / v;
    let scout = 2.0 * b * (a * a - 1.0);
    let k = w + scout + 1.0;
    let before = k / (a - 1.0);
    let value = p * (before + w)
        + p * (1.0 - p) * (before + w + scout)
        + (1.0 - p) * (1.0 - p) * (k * a * a / (a - 1.0) + 1.0);
    Ok(ClosedFormCR::new(value, Formula::HybridCase2Mixture))
}

/// `max(CR1, CR2)`.
pub fn hybrid_cr(a: f64, b: f64, p: f64, v: f64) -> Result<ClosedFormCR> {
    let cr1 = hybrid_cr1(a, b, v)?.value;
    let cr2 = hybrid_cr2(a, b, p, v)?.value;
    Ok(ClosedFormCR::new(cr1.max(cr2), Formula::Hybrid))
}
