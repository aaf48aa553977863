use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::integral::{axis_quasinorm, difference_quasinorm, gagliardo_seminorm, midpoint_seminorm};
use super::lp_band::lp_band_quasinorm;
use super::maximal_norm::{maximal_quasinorm, MaximalCharacterization};
use super::params::SpaceParams;
use super::result::QuasinormResult;
use crate::band::{decompose, DyadicBandSystem};
use crate::error::{LpError, Result};
use crate::field::SampledField;
use crate::quadrature::QuadratureSpec;

/// A way of measuring smoothness, named as on the command line:
/// `lp`, `diff`, `axis:J`, `gagliardo`, `midpoint`, `max:S`, `max:S_SUP`,
/// `max:V`, `max:V_SUP`, `max:D`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Characterization {
    Lp,
    Diff,
    Axis(usize),
    Gagliardo,
    Midpoint,
    Max(MaximalCharacterization),
}

impl fmt::Display for Characterization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Lp => f.write_str("lp"),
            Self::Diff => f.write_str("diff"),
            Self::Axis(j) => write!(f, "axis:{j}"),
            Self::Gagliardo => f.write_str("gagliardo"),
            Self::Midpoint => f.write_str("midpoint"),
            Self::Max(MaximalCharacterization::DSup) => f.write_str("max:D"),
            Self::Max(v) => write!(f, "max:{v}"),
        }
    }
}

impl FromStr for Characterization {
    type Err = LpError;
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let bad = || LpError::InvalidParams(format!("unknown characterization {s:?}"));
        match t.split_once(':') {
            None => match t.to_ascii_lowercase().as_str() {
                "lp" | "lp_band" => Ok(Self::Lp),
                "diff" => Ok(Self::Diff),
                "gagliardo" => Ok(Self::Gagliardo),
                "midpoint" => Ok(Self::Midpoint),
                _ => Err(bad()),
            },
            Some((head, tail)) => match head.to_ascii_lowercase().as_str() {
                "axis" => tail.parse::<usize>().map(Self::Axis).map_err(|_| bad()),
                "max" => tail.parse().map(Self::Max),
                _ => Err(bad()),
            },
        }
    }
}

impl TryFrom<String> for Characterization {
    type Error = LpError;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Characterization> for String {
    fn from(c: Characterization) -> String {
        c.to_string()
    }
}

impl Characterization {
    /// Whether the value comes from a step quadrature rather than from bands.
    pub fn is_quadrature_based(&self) -> bool {
        !matches!(self, Self::Lp)
    }
}

/// Computes one quasinorm of `field`. `params.scale` selects F or B where
/// the characterization has both; the seminorms are F-type by definition.
pub fn evaluate(
    field: &SampledField,
    which: Characterization,
    params: &SpaceParams,
    quad: &QuadratureSpec,
) -> Result<QuasinormResult> {
    params.validate()?;
    match which {
        Characterization::Lp => {
            let system = DyadicBandSystem::for_grid(field.grid())?;
            lp_band_quasinorm(&decompose(field, &system, !params.homogeneous)?, params)
        }
        Characterization::Diff => difference_quasinorm(field, params, quad),
        Characterization::Axis(j) => axis_quasinorm(field, params, j, quad),
        Characterization::Gagliardo => gagliardo_seminorm(field, params.s, params.p, params.q, quad),
        Characterization::Midpoint => midpoint_seminorm(field, params.s, params.p, params.q, quad),
        Characterization::Max(v) => maximal_quasinorm(field, params, v, quad),
    }
}
