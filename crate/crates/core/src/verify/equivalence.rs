use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::Verdict;
use crate::corpus::{sample_family, CorpusEntry, TestFunctionSpec};
use crate::error::{LpError, Result};
use crate::field::{dft_forward, dft_inverse, dyadic_dilate, GridSpec, SampledField};
use crate::quadrature::QuadratureSpec;
use crate::quasinorm::{evaluate, hypothesis_window, Characterization, Flag, HypothesisCheck, SpaceParams, TheoremId};

/// Engineering defaults for a PASS; the theorems give no constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EquivalenceThresholds {
    pub max_spread: f64,
    pub max_drift: f64,
    /// Largest relative energy that may be removed from a member to make
    /// `f(2 .)` resolvable.
    pub max_clipped_energy: f64,
}

impl Default for EquivalenceThresholds {
    fn default() -> Self {
        Self { max_spread: 50.0, max_drift: 0.05, max_clipped_energy: 1e-4 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FunctionRatio {
    pub id: String,
    pub spec: TestFunctionSpec,
    pub value_a: f64,
    pub value_b: f64,
    pub ratio: f64,
    /// The same ratio for `f(2 .)`.
    pub dilated_ratio: f64,
    pub drift: f64,
    /// Relative energy removed above a quarter of the Nyquist index.
    pub clipped_energy: f64,
    pub flag_a: Flag,
    pub flag_b: Flag,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceReport {
    pub pair: (Characterization, Characterization),
    pub params: SpaceParams,
    pub hypothesis: Option<HypothesisCheck>,
    pub per_function: Vec<FunctionRatio>,
    /// Largest ratio over smallest.
    pub spread: f64,
    /// Largest `|ratio(f(2 .)) / ratio(f) - 1|`.
    pub dilation_drift: f64,
    pub thresholds: EquivalenceThresholds,
    pub verdict: Verdict,
}

/// Drops every mode with `|k| >= N/4`, so that `f(2 .)` lies inside the
/// radial band range, and returns the removed share of the energy. Compact bumps on
/// coarse grids carry spectral tails of this kind.
fn clip_for_dilation(f: &SampledField) -> Result<(SampledField, f64)> {
    let grid = f.grid();
    let quarter = (grid.points_per_axis() / 4) as f64;
    let mut spec = dft_forward(f);
    let total: f64 = spec.coeffs().iter().map(|c| c.norm_sqr()).sum();
    let keep: Vec<f64> = (0..grid.len())
        .map(|i| {
            let k = grid.lattice_point(i);
            let r2: i64 = k.iter().map(|v| v * v).sum();
            f64::from(u8::from((r2 as f64).sqrt() < quarter))
        })
        .collect();
    let removed: f64 = spec.coeffs().iter().zip(&keep).filter(|(_, &w)| w == 0.0).map(|(c, _)| c.norm_sqr()).sum();
    if removed == 0.0 {
        return Ok((f.clone(), 0.0));
    }
    spec = spec.multiply_values(&keep.iter().map(|&w| w.into()).collect::<Vec<_>>());
    let clipped = dft_inverse(&spec);
    let clipped = if f.is_real() { clipped.real_part() } else { clipped };
    Ok((clipped, if total > 0.0 { removed / total } else { 0.0 }))
}

fn measure(
    entry: &CorpusEntry,
    pair: (Characterization, Characterization),
    params: &SpaceParams,
    grid: &GridSpec,
    quad: &QuadratureSpec,
) -> Result<FunctionRatio> {
    let (f, clipped_energy) = clip_for_dilation(&sample_family(&entry.spec, grid)?)?;
    let f2 = dyadic_dilate(&f, 1)?;
    let a = evaluate(&f, pair.0, params, quad)?;
    let b = if pair.1 == pair.0 { a.clone() } else { evaluate(&f, pair.1, params, quad)? };
    let a2 = evaluate(&f2, pair.0, params, quad)?.value;
    let b2 = if pair.1 == pair.0 { a2 } else { evaluate(&f2, pair.1, params, quad)?.value };
    let ratio = a.value / b.value;
    let dilated_ratio = a2 / b2;
    Ok(FunctionRatio {
        id: entry.id.clone(),
        spec: entry.spec.clone(),
        value_a: a.value,
        value_b: b.value,
        ratio,
        dilated_ratio,
        drift: (dilated_ratio / ratio - 1.0).abs(),
        clipped_energy,
        flag_a: a.flag,
        flag_b: b.flag,
    })
}

/// Ratios of two characterizations over a corpus, and their stability under
/// one dyadic dilation. A verdict is given only inside the hypothesis window
/// of `theorem`.
pub fn equivalence_experiment(
    corpus: &[CorpusEntry],
    pair: (Characterization, Characterization),
    params: &SpaceParams,
    grid: &GridSpec,
    quad: &QuadratureSpec,
    theorem: Option<TheoremId>,
    thresholds: EquivalenceThresholds,
) -> Result<EquivalenceReport> {
    if corpus.is_empty() {
        return Err(LpError::InvalidParams("equivalence corpus is empty".into()));
    }
    params.validate()?;
    let hypothesis = theorem.map(|t| hypothesis_window(t, params, grid.dim())).transpose()?;
    let per_function: Vec<FunctionRatio> =
        corpus.par_iter().map(|e| measure(e, pair, params, grid, quad)).collect::<Result<_>>()?;

    let valid = |r: f64| r.is_finite() && r > 0.0;
    let all_valid = per_function
        .iter()
        .all(|f| valid(f.ratio) && valid(f.dilated_ratio) && f.clipped_energy <= thresholds.max_clipped_energy);
    let (lo, hi) = per_function
        .iter()
        .map(|f| f.ratio)
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), r| (lo.min(r), hi.max(r)));
    let spread = if all_valid { hi / lo } else { f64::INFINITY };
    let dilation_drift = per_function.iter().map(|f| f.drift).fold(0.0f64, |m, d| if d.is_nan() { f64::INFINITY } else { m.max(d) });

    let verdict = match &hypothesis {
        Some(h) if h.satisfied => {
            Verdict::from_pass(all_valid && spread <= thresholds.max_spread && dilation_drift <= thresholds.max_drift)
        }
        _ => Verdict::NoVerdict,
    };
    Ok(EquivalenceReport {
        pair,
        params: params.clone(),
        hypothesis,
        per_function,
        spread,
        dilation_drift,
        thresholds,
        verdict,
    })
}
