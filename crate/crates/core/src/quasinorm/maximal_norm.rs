//! Quasinorms assembled from the difference-mean maximal functions at the
//! dyadic scales `2^{-k}`.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::lp_band::pow_q;
use super::params::{Scale, SpaceParams};
use super::result::{aggregate_b, aggregate_f, Flag, QuasinormResult, ScaleTable, TruncationReport};
use crate::band::DyadicBandSystem;
use crate::difference::spectral_difference;
use crate::error::{LpError, Result};
use crate::field::{dft_forward, lp_norm_values, SampledField, SpectralField};
use crate::maximal::{node_mean_modulus, scale_weight, sphere_nodes, weighted_sup};
use crate::quadrature::{annulus_nodes, d_radii, sphere_directions, tau_nodes, QuadratureSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum MaximalCharacterization {
    /// Sphere means at `t = 2^{-k}`.
    S,
    /// Sphere means, supremum over `t = tau 2^{-k}`, `0 < tau < 2`.
    SSup,
    /// Annulus means at `t = 2^{-k}`.
    V,
    /// Annulus means, supremum over `tau`.
    VSup,
    /// Pointwise differences, supremum over steps `2^{-k} h`, `0 < |h| < 2`.
    DSup,
}

impl MaximalCharacterization {
    pub const ALL: [Self; 5] = [Self::S, Self::SSup, Self::V, Self::VSup, Self::DSup];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::S => "S",
            Self::SSup => "S_SUP",
            Self::V => "V",
            Self::VSup => "V_SUP",
            Self::DSup => "D_SUP",
        }
    }
}

impl fmt::Display for MaximalCharacterization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MaximalCharacterization {
    type Err = LpError;
    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_uppercase();
        match key.as_str() {
            // A bare `D` names the only pointwise variant.
            "D" => Ok(Self::DSup),
            _ => Self::ALL
                .iter()
                .copied()
                .find(|v| v.as_str() == key)
                .ok_or_else(|| LpError::InvalidParams(format!("unknown maximal characterization {s:?}"))),
        }
    }
}

/// Evaluates `X_k` for one characterization at `t = 2^{-k}`.
pub(crate) struct ScaleMaximal<'a> {
    spec: SpectralField,
    field: &'a SampledField,
    params: &'a SpaceParams,
    quad: QuadratureSpec,
}

impl<'a> ScaleMaximal<'a> {
    pub(crate) fn new(field: &'a SampledField, params: &'a SpaceParams, quad: &QuadratureSpec) -> Result<Self> {
        let grid = field.grid();
        if grid.dim() < 2 {
            return Err(LpError::DimensionTooLow { dim: grid.dim(), required: 2 });
        }
        params.validate()?;
        let quad = quad.clone().resolved(grid);
        quad.validate(grid)?;
        Ok(Self { spec: dft_forward(field), field, params, quad })
    }

    fn mean_max(&self, nodes: &[([f64; 3], f64)], t: f64) -> Vec<f64> {
        let grid = self.field.grid();
        let g = node_mean_modulus(&self.spec, nodes, t, self.params.order);
        weighted_sup(&g, grid, scale_weight(grid.dim(), t, self.params.r))
    }

    fn sup_over_tau(&self, nodes: &[([f64; 3], f64)], base: f64) -> Vec<f64> {
        let taus = tau_nodes(self.quad.tau_nodes_per_octave, self.quad.tau_octaves);
        let fields: Vec<Vec<f64>> = taus.par_iter().map(|tau| self.mean_max(nodes, tau * base)).collect();
        pointwise_max(fields, self.field.grid().len())
    }

    pub(crate) fn at_scale(&self, which: MaximalCharacterization, k: i32) -> Vec<f64> {
        let grid = self.field.grid();
        let dim = grid.dim();
        let t = 2f64.powi(-k);
        let sphere = || sphere_nodes(dim, self.quad.sphere_nodes);
        let annulus = || annulus_nodes(dim, self.quad.annulus_radial_nodes, self.quad.sphere_nodes);
        match which {
            MaximalCharacterization::S => self.mean_max(&sphere(), t),
            MaximalCharacterization::V => self.mean_max(&annulus(), t),
            MaximalCharacterization::SSup => self.sup_over_tau(&sphere(), t),
            MaximalCharacterization::VSup => self.sup_over_tau(&annulus(), t),
            MaximalCharacterization::DSup => {
                // The weight depends on |h| only, so directions are merged
                // before the supremum over y.
                let dirs = sphere_directions(dim, self.quad.sphere_nodes);
                let real = self.field.is_real();
                let fields: Vec<Vec<f64>> = d_radii(&self.quad)
                    .par_iter()
                    .map(|&rho| {
                        let per_dir = dirs.iter().map(|d| {
                            let h = [t * (rho * d.unit[0]), t * (rho * d.unit[1]), t * (rho * d.unit[2])];
                            spectral_difference(&self.spec, &h, self.params.order, real).moduli()
                        });
                        let merged = pointwise_max(per_dir, grid.len());
                        weighted_sup(&merged, grid, scale_weight(dim, t * rho, self.params.r))
                    })
                    .collect();
                pointwise_max(fields, grid.len())
            }
        }
    }
}

fn pointwise_max<I: IntoIterator<Item = Vec<f64>>>(fields: I, len: usize) -> Vec<f64> {
    let mut out = vec![0.0f64; len];
    for f in fields {
        for (o, v) in out.iter_mut().zip(f) {
            *o = (*o).max(v);
        }
    }
    out
}

/// `{2^{ks} X_k}` for `k` from the grid's coarsest band to
/// `maximal_fine_octaves` past its finest, aggregated in `L^p(l^q)` (F) or
/// `l^q(L^p)` (B). Steps below the grid spacing act on the trigonometric
/// interpolant, so the fine scales are exact.
pub fn maximal_quasinorm(
    field: &SampledField,
    params: &SpaceParams,
    which: MaximalCharacterization,
    quad: &QuadratureSpec,
) -> Result<QuasinormResult> {
    let eval = ScaleMaximal::new(field, params, quad)?;
    let grid = field.grid();
    let system = DyadicBandSystem::for_grid(grid).map_err(|_| LpError::BandRangeEmpty)?;
    let finest = system.j_max() + eval.quad.maximal_fine_octaves as i32;
    let scales: Vec<i32> = (system.j_min()..=finest).collect();
    if scales.is_empty() {
        return Err(LpError::BandRangeEmpty);
    }
    let q = params.q;
    let weighted: Vec<(f64, Vec<f64>)> =
        scales.iter().map(|&k| (2f64.powf(k as f64 * params.s), eval.at_scale(which, k))).collect();
    let agg = match params.scale {
        Scale::F => {
            let powered = weighted.iter().map(|(w, x)| x.iter().map(|v| pow_q(w * v, q)).collect()).collect();
            aggregate_f(&ScaleTable { scales: scales.clone(), powered }, params.p, q, grid.cell_volume())
        }
        Scale::B => {
            let mut powered = Vec::with_capacity(weighted.len());
            for (w, x) in &weighted {
                powered.push(pow_q(w * lp_norm_values(x, grid, params.p)?, q));
            }
            aggregate_b(&scales, powered, q)
        }
    };
    Ok(QuasinormResult {
        value: agg.value,
        per_scale: agg.per_scale,
        aggregation: agg.aggregation,
        truncation_report: TruncationReport::default(),
        params_echo: params.clone(),
        flag: Flag::Ok,
    })
}
