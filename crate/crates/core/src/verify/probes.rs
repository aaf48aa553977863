//! Numerical probes of individual lemmas: band-limited derivative bounds,
//! kernel decay, divergence outside the smoothness window, and the spectral
//! support of one-dimensional slices of a band.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::cell_factor;
use crate::band::{band_project, DyadicBandSystem};
use crate::error::{LpError, Result};
use crate::field::{apply_multiplier, dft_forward, dft_inverse, dot3, dyadic_dilate, lp_norm, norm3, GridSpec, SampledField, SpectralField};
use crate::numeric::{compensated_sum, linear_fit};
use crate::quadrature::QuadratureSpec;
use crate::quasinorm::{difference_quasinorm_between, SpaceParams};

/// Largest admissible max/min of the derivative-bound ratios.
pub const PPN_MAX_SPREAD: f64 = 1.5;

/// Largest admissible relative out-of-support energy of a slice.
pub const SLICE_SUPPORT_TOL: f64 = 1e-12;

/// Profile coefficients beyond the stated radius must be this small.
const PROFILE_SUPPORT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PpnReport {
    pub alpha: Vec<u32>,
    pub p: f64,
    pub q: f64,
    pub t_values: Vec<f64>,
    /// `||d^alpha u_t||_q / (t^{|alpha| + n(1/p - 1/q)} ||u_t||_p)`.
    pub ratios: Vec<f64>,
    pub spread: f64,
    pub pass: bool,
}

/// Derivative-bound ratios for dilates `u_t` of a profile whose spectrum
/// lies in `|xi| <= radius`. Every `t` must be `radius * 2^m`.
pub fn ppn_probe(profile: &SampledField, radius: f64, alpha: &[u32], p: f64, q: f64, t_list: &[f64]) -> Result<PpnReport> {
    if !(p > 0.0) {
        return Err(LpError::InvalidExponent(p));
    }
    if !(q >= p) {
        return Err(LpError::InvalidExponent(q));
    }
    let grid = profile.grid();
    let dim = grid.dim();
    if alpha.len() > dim {
        return Err(LpError::InvalidParams(format!("multi-index {alpha:?} has more than {dim} entries")));
    }
    let spec = dft_forward(profile);
    let cmax = spec.max_abs();
    let outside = spec
        .coeffs()
        .iter()
        .enumerate()
        .any(|(i, c)| norm3(&grid.wavevector(i)) > radius * (1.0 + 1e-12) && c.norm() > PROFILE_SUPPORT_TOL * cmax);
    if outside {
        return Err(LpError::InvalidParams(format!("profile spectrum exceeds |xi| <= {radius}")));
    }

    let order: u32 = alpha.iter().sum();
    let exponent = order as f64 + dim as f64 * (1.0 / p - 1.0 / q);
    let mut ratios = Vec::with_capacity(t_list.len());
    for &t in t_list {
        let mf = (t / radius).log2();
        if !(mf.is_finite() && (mf - mf.round()).abs() < 1e-9) {
            return Err(LpError::InvalidParams(format!("t = {t} is not {radius} times a power of two")));
        }
        let m = mf.round() as i32;
        let u = dyadic_dilate(profile, m)?;
        let du = if order == 0 {
            u.clone()
        } else {
            apply_multiplier(&u, |xi| {
                alpha.iter().enumerate().fold(Complex64::new(1.0, 0.0), |acc, (a, &k)| {
                    acc * Complex64::new(0.0, 2.0 * PI * xi[a]).powu(k)
                })
            })
        };
        let num = lp_norm(&du, q)? * cell_factor(m, dim, q);
        let den = t.powf(exponent) * lp_norm(&u, p)? * cell_factor(m, dim, p);
        ratios.push(num / den);
    }
    let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &r| (lo.min(r), hi.max(r)));
    let spread = hi / lo;
    Ok(PpnReport {
        alpha: alpha.to_vec(),
        p,
        q,
        t_values: t_list.to_vec(),
        ratios,
        spread,
        pass: spread.is_finite() && spread <= PPN_MAX_SPREAD,
    })
}

/// Spectral window `(1 - |xi - c theta0|^2 / w^2)_+^N` around `c theta0`,
/// together with the band `a <= |theta . xi| <= b` its support must lie in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayWindow {
    pub axis: [f64; 3],
    pub center: f64,
    pub half_width: f64,
    /// `N`: the window is `C^{N-1}`, so its kernel decays at least like `|x|^{-N}`.
    pub smoothness: u32,
    pub a: f64,
    pub b: f64,
}

impl DecayWindow {
    /// A window centred at `|xi| = 1/4` along the first axis, admissible for
    /// every direction within 15 degrees of that axis and every `tau <= 2`.
    /// It is as wide as the band `0 < theta.xi < 1/2` allows, which keeps the
    /// kernel's core small against the fit range.
    pub fn standard(smoothness: u32) -> Self {
        Self { axis: [1.0, 0.0, 0.0], center: 0.25, half_width: 0.23, smoothness, a: 0.01, b: 0.49 }
    }

    pub fn value(&self, xi: &[f64; 3]) -> f64 {
        let d = [xi[0] - self.center * self.axis[0], xi[1] - self.center * self.axis[1], xi[2] - self.center * self.axis[2]];
        let u2 = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]) / (self.half_width * self.half_width);
        if u2 < 1.0 {
            (1.0 - u2).powi(self.smoothness as i32)
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayFit {
    pub tau: f64,
    pub theta: [f64; 3],
    /// Slope of `log |K|` against `log(1 + |x|)`.
    pub slope: f64,
    pub amplitude: f64,
}

fn kernel_spectrum(window: &DecayWindow, grid: &GridSpec, order: u32, tau: f64, theta: &[f64; 3]) -> Result<SpectralField> {
    let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.len()];
    let cell = grid.box_length().powi(-(grid.dim() as i32));
    for (i, c) in coeffs.iter_mut().enumerate() {
        let xi = grid.wavevector(i);
        let w = window.value(&xi);
        if w == 0.0 {
            continue;
        }
        let u = dot3(theta, &xi).abs();
        if u < window.a || u > window.b {
            return Err(LpError::GeometryViolated { value: u, lo: window.a, hi: window.b });
        }
        let turns = tau * dot3(theta, &xi);
        if (turns - turns.round()).abs() < 1e-9 {
            return Err(LpError::SingularMultiplier);
        }
        let phase = 2.0 * PI * turns;
        let m = Complex64::new(phase.cos() - 1.0, phase.sin()).powu(order);
        *c = Complex64::new(w * cell, 0.0) / m;
    }
    SpectralField::new(coeffs, *grid)
}

/// Fits the decay of the kernel of `window(xi) / (e^{2 pi i tau theta.xi} - 1)^L`
/// over `1 <= |x| <= B/4`, using the largest modulus in each quarter-octave
/// shell.
pub fn kernel_decay_probe(window: &DecayWindow, grid: &GridSpec, order: u32, tau: f64, theta: [f64; 3]) -> Result<DecayFit> {
    if order == 0 {
        return Err(LpError::InvalidDifference("order L must be at least 1".into()));
    }
    if !(1.0..=2.0).contains(&tau) {
        return Err(LpError::InvalidParams(format!("tau = {tau} must lie in [1, 2]")));
    }
    let len = norm3(&theta);
    if (len - 1.0).abs() > 1e-12 {
        return Err(LpError::InvalidParams(format!("theta has length {len}, not 1")));
    }
    let kernel = dft_inverse(&kernel_spectrum(window, grid, order, tau, &theta)?).moduli();

    let hi = grid.box_length() / 4.0;
    let shells = ((hi.log2()) * 4.0).floor() as usize;
    let mut peaks = vec![0.0f64; shells];
    for (i, &k) in kernel.iter().enumerate() {
        let r = grid.offset_length(i);
        if r < 1.0 || r >= hi {
            continue;
        }
        let s = ((r.log2() * 4.0).floor() as usize).min(shells - 1);
        peaks[s] = peaks[s].max(k);
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = peaks
        .iter()
        .enumerate()
        .filter(|(_, &v)| v > 0.0)
        .map(|(s, &v)| ((1.0 + 2f64.powf((s as f64 + 0.5) / 4.0)).ln(), v.ln()))
        .unzip();
    if xs.len() < 3 {
        return Err(LpError::InvalidParams("kernel vanishes on the fit range".into()));
    }
    let (slope, intercept) = linear_fit(&xs, &ys);
    Ok(DecayFit { tau, theta, slope, amplitude: intercept.exp() })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecaySurvey {
    pub smoothness: u32,
    pub order: u32,
    pub fits: Vec<DecayFit>,
    /// Least negative slope over all fits.
    pub max_slope: f64,
    /// Largest amplitude over smallest.
    pub amplitude_ratio: f64,
    pub pass: bool,
}

/// Runs [`kernel_decay_probe`] for every `tau` and direction `theta`; passes
/// when every slope is at most `-(N - 1/2)` and amplitudes agree within 2x.
pub fn kernel_decay_survey(
    window: &DecayWindow,
    grid: &GridSpec,
    order: u32,
    taus: &[f64],
    thetas: &[[f64; 3]],
) -> Result<DecaySurvey> {
    let mut fits = Vec::with_capacity(taus.len() * thetas.len());
    for &tau in taus {
        for &theta in thetas {
            fits.push(kernel_decay_probe(window, grid, order, tau, theta)?);
        }
    }
    let max_slope = fits.iter().map(|f| f.slope).fold(f64::NEG_INFINITY, f64::max);
    let (lo, hi) = fits.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), f| (lo.min(f.amplitude), hi.max(f.amplitude)));
    let amplitude_ratio = hi / lo;
    let pass = max_slope <= -(window.smoothness as f64 - 0.5) && amplitude_ratio <= 2.0;
    Ok(DecaySurvey { smoothness: window.smoothness, order, fits, max_slope, amplitude_ratio, pass })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DivergenceVerdict {
    #[serde(rename = "DIVERGENT")]
    Divergent,
    #[serde(rename = "CONVERGENT")]
    Convergent,
    #[serde(rename = "CONVERGENT-ZERO")]
    ConvergentZero,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DivergenceReport {
    pub params: SpaceParams,
    pub h_min_values: Vec<f64>,
    pub values: Vec<f64>,
    /// `values[i + 1] / values[i]`: growth per halving of `h_min`.
    pub growth: Vec<f64>,
    pub verdict: DivergenceVerdict,
    /// Asserted only for `s >= L`: growth at least 1.5 per octave when
    /// `s > L`, at least 1.05 when `s = L`.
    pub pass: Option<bool>,
}

/// Difference quasinorm as the smallest step halves `levels` times below
/// the grid spacing. Differences are spectral, hence exact for band-limited
/// fields at any step.
pub fn divergence_probe(field: &SampledField, params: &SpaceParams, quad: &QuadratureSpec, levels: usize) -> Result<DivergenceReport> {
    let quad = quad.clone().resolved(field.grid());
    quad.validate(field.grid())?;
    let h_min_values: Vec<f64> = (0..=levels).map(|i| quad.h_min / 2f64.powi(i as i32)).collect();
    let mut values = Vec::with_capacity(h_min_values.len());
    for &lo in &h_min_values {
        values.push(difference_quasinorm_between(field, params, &quad, lo, quad.h_max)?.value);
    }
    let scale = values.iter().fold(0.0f64, |m, &v| m.max(v));
    if scale == 0.0 || values.iter().all(|&v| v <= 1e-14 * field.max_abs().max(1e-300)) {
        return Ok(DivergenceReport {
            params: params.clone(),
            h_min_values,
            values,
            growth: vec![1.0; levels],
            verdict: DivergenceVerdict::ConvergentZero,
            pass: (params.s >= params.order as f64).then_some(true),
        });
    }
    let growth: Vec<f64> = values.windows(2).map(|w| w[1] / w[0]).collect();
    let l = params.order as f64;
    let floor = if params.s > l { 1.5 } else { 1.05 };
    let verdict = if growth.last().is_some_and(|&g| g >= 1.05) {
        DivergenceVerdict::Divergent
    } else {
        DivergenceVerdict::Convergent
    };
    let pass = (params.s >= l).then(|| growth.iter().all(|&g| g >= floor));
    Ok(DivergenceReport { params: params.clone(), h_min_values, values, growth, verdict, pass })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SliceSupportReport {
    pub j: i32,
    pub axis: usize,
    pub max_violation: f64,
    pub pass: bool,
}

/// Largest out-of-support energy of a one-dimensional slice of `band` along
/// `axis` (counted from 1), at `|u| > 2^{j+1}`, relative to the largest
/// slice energy.
pub fn slice_spectral_violation(band: &SampledField, j: i32, axis: usize) -> Result<f64> {
    let grid = band.grid();
    let dim = grid.dim();
    if dim < 2 {
        return Err(LpError::DimensionTooLow { dim, required: 2 });
    }
    if axis == 0 || axis > dim {
        return Err(LpError::InvalidAxis { axis, dim });
    }
    let n = grid.points_per_axis();
    let line = GridSpec::new(1, n, grid.box_length())?;
    let cut = 2f64.powi(j + 1) * (1.0 + 1e-12);
    let mut worst_out = 0.0f64;
    let mut largest = 0.0f64;
    for start in 0..grid.len() {
        let mut multi = grid.unravel(start);
        if multi[axis - 1] != 0 {
            continue;
        }
        let samples: Vec<Complex64> = (0..n)
            .map(|i| {
                multi[axis - 1] = i;
                band.samples()[grid.ravel(&multi)]
            })
            .collect();
        let spec = dft_forward(&SampledField::new(samples, line)?);
        let total = compensated_sum(spec.coeffs().iter().map(|c| c.norm_sqr()));
        let out = compensated_sum(
            spec.coeffs()
                .iter()
                .enumerate()
                .filter(|(i, _)| line.wavevector(*i)[0].abs() > cut)
                .map(|(_, c)| c.norm_sqr()),
        );
        worst_out = worst_out.max(out);
        largest = largest.max(total);
    }
    Ok(if largest == 0.0 { 0.0 } else { worst_out / largest })
}

/// Projects `field` onto band `j` and checks that every slice along `axis`
/// has its spectrum in `|u| <= 2^{j+1}`.
pub fn slice_support_check(field: &SampledField, system: &DyadicBandSystem, j: i32, axis: usize) -> Result<SliceSupportReport> {
    let dim = field.grid().dim();
    if dim < 2 {
        return Err(LpError::DimensionTooLow { dim, required: 2 });
    }
    let band = band_project(field, system, j)?;
    let max_violation = slice_spectral_violation(&band, j, axis)?;
    Ok(SliceSupportReport { j, axis, max_violation, pass: max_violation <= SLICE_SUPPORT_TOL })
}
