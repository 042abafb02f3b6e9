//! Trajectory generators and closed-form competitive ratios.

mod closed_form;
pub(crate) mod trajectory;

pub use closed_form::{
    fast_cr, fast_cr_general, fast_ratio, hybrid_cr, hybrid_cr1, hybrid_cr2, hybrid_cr2_mixture,
    slow_cr, slow_cr_general, slow_ratio, ClosedFormCR, Formula,
};
pub use trajectory::{fast_trajectory, hybrid_trajectory, scout_end, slow_trajectory};

use crate::error::Result;
use crate::model::{SearchParams, StrategySpec, Trajectory};

/// Fast strategy with its optimal ratio `2/(2-p)`.
pub fn optimal_fast(params: SearchParams) -> Result<Trajectory> {
    fast_trajectory(params, fast_ratio(params.p())?)
}

/// Slow strategy with its optimal ratio `1 + sqrt(2v/(1+v))`.
pub fn optimal_slow(params: SearchParams) -> Result<Trajectory> {
    slow_trajectory(params, slow_ratio(params.v())?)
}

/// Closed-form competitive ratio matching a strategy spec.
pub fn closed_form_for(params: &SearchParams, spec: &StrategySpec) -> Result<ClosedFormCR> {
    use crate::model::StrategyKind::*;
    match spec.kind {
        Fast => fast_cr_general(params.p(), spec.a),
        Slow => slow_cr_general(params.v(), spec.a),
        Hybrid => hybrid_cr(spec.a, spec.b, params.p(), params.v()),
    }
}
