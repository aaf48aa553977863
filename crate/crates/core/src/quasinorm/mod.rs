//! Quasinorms of every characterization, the threshold exponents, and the
//! hypothesis checker.

mod characterization;
mod integral;
mod lp_band;
mod maximal_norm;
mod params;
mod result;

pub use integral::{
    axis_quasinorm, difference_quasinorm, difference_quasinorm_B, difference_quasinorm_F, gagliardo_seminorm,
    midpoint_seminorm, DIVERGENCE_GROWTH, TRUNCATION_WARN_SHARE,
};
pub(crate) use integral::difference_quasinorm_between;
pub use characterization::{evaluate, Characterization};
pub use lp_band::lp_band_quasinorm;
pub use maximal_norm::{maximal_quasinorm, MaximalCharacterization};
pub use params::{
    extended_real, format_extended, hypothesis_window, parse_extended, thresholds, HypothesisCheck, Scale,
    SpaceParams, TheoremId, Thresholds,
};
pub use result::{Aggregation, Flag, QuasinormResult, ScaleTerm, TruncationReport};
