//! Experiments that test scaling laws, equivalence-ratio stability and the
//! lemmas that can be probed numerically. Reports are evidence, not proof.

mod equivalence;
mod probes;
mod scaling;

use serde::Serialize;

pub use equivalence::{equivalence_experiment, EquivalenceReport, EquivalenceThresholds, FunctionRatio};
pub use probes::{
    divergence_probe, kernel_decay_probe, kernel_decay_survey, ppn_probe, slice_spectral_violation,
    slice_support_check, DecayFit, DecaySurvey, DecayWindow, DivergenceReport, DivergenceVerdict, PpnReport,
    SliceSupportReport, PPN_MAX_SPREAD, SLICE_SUPPORT_TOL,
};
pub use scaling::{scaling_experiment, ScalingReport, LP_EXPONENT_TOL, QUADRATURE_EXPONENT_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
    #[serde(rename = "NO-VERDICT")]
    NoVerdict,
}

impl Verdict {
    pub fn from_pass(pass: bool) -> Self {
        if pass {
            Self::Pass
        } else {
            Self::Fail
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Pass => "PASS",
            Self::Fail => "FAIL",
            Self::NoVerdict => "NO-VERDICT",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `2^{-mn/p}`: the measure of one period cell of `f(2^m .)` relative to
/// the box, which a same-box dilation does not see.
pub(crate) fn cell_factor(m: i32, dim: usize, p: f64) -> f64 {
    if p.is_infinite() {
        1.0
    } else {
        2f64.powf(-(m as f64) * dim as f64 / p)
    }
}
