use serde::Serialize;

use super::params::{extended_real, SpaceParams};
use crate::numeric::{compensated_sum, pow_nonneg, NeumaierSum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Flag {
    #[serde(rename = "OK")]
    Ok,
    #[serde(rename = "DIVERGENT")]
    Divergent,
    #[serde(rename = "TRUNCATION-WARN")]
    TruncationWarn,
}

impl Flag {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Ok => "OK",
            Self::Divergent => "DIVERGENT",
            Self::TruncationWarn => "TRUNCATION-WARN",
        }
    }
}

impl std::fmt::Display for Flag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// How `per_scale` contributions combine into `value`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "exponent", rename_all = "snake_case")]
pub enum Aggregation {
    /// `value = (sum of contributions)^(1/e)`.
    Power(f64),
    /// `value = max of contributions`.
    Max,
}

impl Aggregation {
    pub fn combine(&self, contributions: impl IntoIterator<Item = f64>) -> f64 {
        match *self {
            Self::Power(e) => pow_nonneg(compensated_sum(contributions), 1.0 / e),
            Self::Max => contributions.into_iter().fold(0.0, f64::max),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScaleTerm {
    /// Dyadic index `k` (bands, or shells `2^{-k} <= |h| < 2^{1-k}`).
    pub scale: i32,
    pub contribution: f64,
}

/// Estimated share of the untruncated aggregate lying outside the quadrature
/// range, below `h_min` (`low_tail`) and above `h_max` (`high_tail`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Default)]
pub struct TruncationReport {
    #[serde(serialize_with = "extended_real::serialize")]
    pub low_tail: f64,
    #[serde(serialize_with = "extended_real::serialize")]
    pub high_tail: f64,
    /// Value ratio after extending the range one octave below `h_min`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub refinement_growth: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuasinormResult {
    pub value: f64,
    pub per_scale: Vec<ScaleTerm>,
    pub aggregation: Aggregation,
    pub truncation_report: TruncationReport,
    pub params_echo: SpaceParams,
    pub flag: Flag,
}

impl QuasinormResult {
    /// Recombines `per_scale`; equals `value` up to roundoff.
    pub fn reaggregate(&self) -> f64 {
        self.aggregation.combine(self.per_scale.iter().map(|t| t.contribution))
    }
}

/// Per-scale pieces of an `L^p(l^q)` or `l^q(L^p)` aggregate.
///
/// For the F order, `powered[k][x]` holds the `q`-th power of the scale-`k`
/// quantity at `x` (already summed over quadrature nodes with weights), or
/// for `q = inf` its maximum over nodes. For the B order, `powered[k]` has a
/// single entry: the same quantity for the `L^p` norms.
pub(crate) struct ScaleTable {
    pub scales: Vec<i32>,
    pub powered: Vec<Vec<f64>>,
}

pub(crate) struct Aggregate {
    pub value: f64,
    pub per_scale: Vec<ScaleTerm>,
    pub aggregation: Aggregation,
}

/// `L^p` over `x` of the `l^q` aggregate over scales, with per-scale shares
/// of `value^p` (or, for `p = inf`, the maximum over the points where each
/// scale dominates).
pub(crate) fn aggregate_f(table: &ScaleTable, p: f64, q: f64, cell_volume: f64) -> Aggregate {
    let npts = table.powered.first().map_or(0, Vec::len);
    let nscale = table.scales.len();
    let mut share = vec![NeumaierSum::new(); nscale];
    let mut peak = vec![0.0f64; nscale];
    let mut total = NeumaierSum::new();
    let mut vmax = 0.0f64;
    for x in 0..npts {
        let (g, dominant) = if q.is_infinite() {
            let mut best = (0.0, 0usize);
            for (k, col) in table.powered.iter().enumerate() {
                if col[x] > best.0 {
                    best = (col[x], k);
                }
            }
            best
        } else {
            let mut acc = NeumaierSum::new();
            let mut best = (0.0, 0usize);
            for (k, col) in table.powered.iter().enumerate() {
                acc.add(col[x]);
                if col[x] > best.0 {
                    best = (col[x], k);
                }
            }
            (pow_nonneg(acc.value(), 1.0 / q), best.1)
        };
        if g == 0.0 {
            continue;
        }
        if p.is_infinite() {
            vmax = vmax.max(g);
            peak[dominant] = peak[dominant].max(g);
        } else {
            let gp = pow_nonneg(g, p) * cell_volume;
            total.add(gp);
            if q.is_infinite() {
                share[dominant].add(gp);
            } else {
                let factor = g.powf(p - q) * cell_volume;
                for (k, col) in table.powered.iter().enumerate() {
                    share[k].add(factor * col[x]);
                }
            }
        }
    }
    if p.is_infinite() {
        Aggregate {
            value: vmax,
            per_scale: terms(&table.scales, peak),
            aggregation: Aggregation::Max,
        }
    } else {
        Aggregate {
            value: pow_nonneg(total.value(), 1.0 / p),
            per_scale: terms(&table.scales, share.iter().map(NeumaierSum::value).collect()),
            aggregation: Aggregation::Power(p),
        }
    }
}

/// `l^q` over scales of per-scale quantities (`q`-th powers for `q < inf`).
pub(crate) fn aggregate_b(scales: &[i32], powered: Vec<f64>, q: f64) -> Aggregate {
    let aggregation = if q.is_infinite() { Aggregation::Max } else { Aggregation::Power(q) };
    Aggregate {
        value: aggregation.combine(powered.iter().copied()),
        per_scale: terms(scales, powered),
        aggregation,
    }
}

fn terms(scales: &[i32], values: Vec<f64>) -> Vec<ScaleTerm> {
    scales
        .iter()
        .zip(values)
        .map(|(&scale, contribution)| ScaleTerm { scale, contribution })
        .collect()
}
