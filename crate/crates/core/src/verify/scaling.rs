use serde::Serialize;

use super::cell_factor;
use crate::error::Result;
use crate::field::{dyadic_dilate, SampledField};
use crate::quadrature::QuadratureSpec;
use crate::quasinorm::{evaluate, Characterization, SpaceParams};

pub const LP_EXPONENT_TOL: f64 = 0.03;
pub const QUADRATURE_EXPONENT_TOL: f64 = 0.07;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingReport {
    pub characterization: Characterization,
    pub params: SpaceParams,
    pub m_values: Vec<i32>,
    /// `Q(f(2^m .))` as computed on the box.
    pub values: Vec<f64>,
    /// `Q(f(2^m .)) / Q(f)`, corrected by the period-cell factor `2^{-mn/p}`.
    pub ratios: Vec<f64>,
    /// `log2(ratio) / m`; absent for `m = 0`.
    pub measured_exponents: Vec<Option<f64>>,
    pub expected_exponent: f64,
    /// `|measured - expected|`, or `|log2 ratio|` for `m = 0`.
    pub deviations: Vec<f64>,
    pub tolerance: f64,
    pub pass: bool,
}

pub fn scaling_experiment(
    field: &SampledField,
    which: Characterization,
    params: &SpaceParams,
    quad: &QuadratureSpec,
    m_list: &[i32],
) -> Result<ScalingReport> {
    let dim = field.grid().dim();
    let base = evaluate(field, which, params, quad)?.value;
    let expected = params.s - if params.p.is_infinite() { 0.0 } else { dim as f64 / params.p };
    let tolerance = if which.is_quadrature_based() { QUADRATURE_EXPONENT_TOL } else { LP_EXPONENT_TOL };

    let mut values = Vec::with_capacity(m_list.len());
    let mut ratios = Vec::with_capacity(m_list.len());
    let mut measured = Vec::with_capacity(m_list.len());
    let mut deviations = Vec::with_capacity(m_list.len());
    for &m in m_list {
        let value = if m == 0 { base } else { evaluate(&dyadic_dilate(field, m)?, which, params, quad)?.value };
        let ratio = value / base * cell_factor(m, dim, params.p);
        let exponent = (m != 0).then(|| ratio.log2() / m as f64);
        deviations.push(match exponent {
            Some(e) => (e - expected).abs(),
            None => ratio.log2().abs(),
        });
        values.push(value);
        ratios.push(ratio);
        measured.push(exponent);
    }
    let pass = deviations.iter().all(|d| d.is_finite() && *d <= tolerance);
    Ok(ScalingReport {
        characterization: which,
        params: params.clone(),
        m_values: m_list.to_vec(),
        values,
        ratios,
        measured_exponents: measured,
        expected_exponent: expected,
        deviations,
        tolerance,
        pass,
    })
}
