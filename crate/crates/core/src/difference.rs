//! Iterated differences `Delta^L_h f`, by circular shifts or by the Fourier
//! multiplier `(e^{2 pi i h.xi} - 1)^L`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{LpError, Result};
use crate::field::{dft_forward, dft_inverse, dot3, GridSpec, SampledField, SpectralField};

/// Relative slack when deciding whether a step is a whole number of grid cells.
const ALIGN_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum DifferenceMethod {
    Shift,
    #[default]
    Spectral,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DifferenceSpec {
    pub order: u32,
    pub step: Vec<f64>,
    #[serde(default)]
    pub method: DifferenceMethod,
}

impl DifferenceSpec {
    pub fn new(order: u32, step: Vec<f64>, method: DifferenceMethod) -> Result<Self> {
        let spec = Self { order, step, method };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.order == 0 {
            return Err(LpError::InvalidDifference("order L must be at least 1".into()));
        }
        if self.step.iter().any(|v| !v.is_finite()) || self.step.iter().all(|&v| v == 0.0) {
            return Err(LpError::InvalidDifference("step must be finite and nonzero".into()));
        }
        Ok(())
    }
}

/// `d_j = (-1)^{j+1} C(L, j)` for `j = 1..=L`, so that
/// `(-1)^{L+1} Delta^L_h f(x) = sum_j d_j f(x + jh) - f(x)`.
pub fn difference_coefficients(order: u32) -> Vec<i64> {
    let mut out = Vec::with_capacity(order as usize);
    let mut binom: i64 = 1;
    for j in 1..=order as i64 {
        binom = binom * (order as i64 - j + 1) / j;
        out.push(if j % 2 == 1 { binom } else { -binom });
    }
    out
}

/// `(e^{2 pi i h.xi} - 1)^L`.
#[inline]
pub fn difference_multiplier(h: &[f64; 3], order: u32, xi: &[f64; 3]) -> Complex64 {
    let phase = 2.0 * PI * dot3(h, xi);
    let base = Complex64::new(phase.cos() - 1.0, phase.sin());
    base.powu(order)
}

pub(crate) fn pad3(v: &[f64]) -> [f64; 3] {
    let mut out = [0.0; 3];
    for (a, x) in v.iter().take(3).enumerate() {
        out[a] = *x;
    }
    out
}

/// Integer grid offsets of an aligned step, or `MisalignedStep`.
fn aligned_offsets(grid: &GridSpec, step: &[f64]) -> Result<[i64; 3]> {
    let h = grid.spacing();
    let mut k = [0i64; 3];
    for a in 0..grid.dim() {
        let v = step.get(a).copied().unwrap_or(0.0) / h;
        let r = v.round();
        if (v - r).abs() > ALIGN_TOL * v.abs().max(1.0) {
            return Err(LpError::MisalignedStep(step.to_vec()));
        }
        k[a] = r as i64;
    }
    Ok(k)
}

/// `x -> f(x + k * spacing)` as an index rotation.
pub(crate) fn shift_by_cells(field: &SampledField, k: &[i64; 3]) -> SampledField {
    let grid = *field.grid();
    let n = grid.points_per_axis() as i64;
    let samples = (0..grid.len())
        .map(|idx| {
            let mut m = grid.unravel(idx);
            for a in 0..grid.dim() {
                m[a] = (m[a] as i64 + k[a]).rem_euclid(n) as usize;
            }
            field.samples()[grid.ravel(&m)]
        })
        .collect();
    SampledField::from_parts(grid, samples)
}

/// Spectral difference of an already transformed field.
pub(crate) fn spectral_difference(spec: &SpectralField, h: &[f64; 3], order: u32, real: bool) -> SampledField {
    let out = dft_inverse(&spec.multiply(|xi| difference_multiplier(h, order, xi)));
    if real {
        out.real_part()
    } else {
        out
    }
}

pub fn iterated_difference(field: &SampledField, spec: &DifferenceSpec) -> Result<SampledField> {
    spec.validate()?;
    match spec.method {
        DifferenceMethod::Spectral => Ok(spectral_difference(
            &dft_forward(field),
            &pad3(&spec.step),
            spec.order,
            field.is_real(),
        )),
        DifferenceMethod::Shift => {
            let k = aligned_offsets(field.grid(), &spec.step)?;
            let mut g = field.clone();
            for _ in 0..spec.order {
                g = shift_by_cells(&g, &k).sub(&g)?;
            }
            Ok(g)
        }
    }
}

/// `Delta^L_{t e_axis} f`, with `axis` counted from 1.
pub fn axis_difference(field: &SampledField, t: f64, axis: usize, order: u32) -> Result<SampledField> {
    let dim = field.grid().dim();
    if axis == 0 || axis > dim {
        return Err(LpError::InvalidAxis { axis, dim });
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(LpError::InvalidDifference(format!("axis step t = {t} must be positive")));
    }
    let mut h = vec![0.0; dim];
    h[axis - 1] = t;
    iterated_difference(field, &DifferenceSpec::new(order, h, DifferenceMethod::Spectral)?)
}
