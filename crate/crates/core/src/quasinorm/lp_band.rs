//! Frequency-side quasinorms built from a band decomposition.

use super::params::{Scale, SpaceParams};
use super::result::{aggregate_b, aggregate_f, Flag, QuasinormResult, ScaleTable, TruncationReport};
use crate::band::BandDecomposition;
use crate::error::{LpError, Result};
use crate::field::{lp_norm_values, SampledField};
use crate::numeric::pow_nonneg;

/// Pieces `(k, 2^{ks}, f_k)`, with the low-pass part as `k = 0` and weight 1.
fn weighted_pieces<'a>(decomp: &'a BandDecomposition, s: f64) -> Vec<(i32, f64, &'a SampledField)> {
    let mut out: Vec<_> = decomp.lowpass().map(|l| (0, 1.0, l)).into_iter().collect();
    out.extend(decomp.bands().iter().map(|(k, f)| (*k, 2f64.powf(*k as f64 * s), f)));
    out
}

pub fn lp_band_quasinorm(decomp: &BandDecomposition, params: &SpaceParams) -> Result<QuasinormResult> {
    params.validate()?;
    let pieces = weighted_pieces(decomp, params.s);
    if pieces.is_empty() {
        return Err(LpError::EmptyDecomposition);
    }
    let grid = decomp.grid();
    let scales: Vec<i32> = pieces.iter().map(|p| p.0).collect();
    let q = params.q;
    let agg = match params.scale {
        Scale::F => {
            let powered = pieces
                .iter()
                .map(|(_, w, f)| f.moduli().into_iter().map(|v| pow_q(w * v, q)).collect())
                .collect();
            aggregate_f(&ScaleTable { scales, powered }, params.p, q, grid.cell_volume())
        }
        Scale::B => {
            let mut powered = Vec::with_capacity(pieces.len());
            for (_, w, f) in &pieces {
                powered.push(pow_q(w * lp_norm_values(&f.moduli(), grid, params.p)?, q));
            }
            aggregate_b(&scales, powered, q)
        }
    };
    Ok(QuasinormResult {
        value: agg.value,
        per_scale: agg.per_scale,
        aggregation: agg.aggregation,
        truncation_report: TruncationReport {
            low_tail: decomp.summary().truncated_energy,
            high_tail: 0.0,
            refinement_growth: None,
        },
        params_echo: params.clone(),
        flag: Flag::Ok,
    })
}

/// `v^q`, or `v` itself when `q = inf` (the aggregate then takes maxima).
pub(crate) fn pow_q(v: f64, q: f64) -> f64 {
    if q.is_infinite() {
        v
    } else {
        pow_nonneg(v, q)
    }
}
