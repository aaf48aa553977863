//! Test-function families used by the experiments.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::band::build_band_system;
use crate::error::{LpError, Result};
use crate::field::{dft_inverse, norm3, periodic_distance, GridSpec, SampledField, SpectralField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum WindowKind {
    /// Indicator of the slab `|x_1 - c_1| <= half_width`.
    Hard,
    /// Radial Gaussian `exp(-|x - c|^2 / half_width^2)`.
    #[default]
    Gaussian,
}

/// One member of the test corpus. Omitted centers default to the box center.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum TestFunctionSpec {
    Gaussian {
        sigma: f64,
        #[serde(default)]
        center: Option<Vec<f64>>,
    },
    /// Gaussian times `cos(2 pi frequency x_1)`.
    ModulatedGaussian {
        sigma: f64,
        frequency: f64,
        #[serde(default)]
        center: Option<Vec<f64>>,
    },
    /// `exp(1 - 1/(1 - (r/sigma)^2))` for `r < sigma`, zero outside.
    SmoothBump {
        sigma: f64,
        #[serde(default)]
        center: Option<Vec<f64>>,
    },
    /// Real field with random Fourier coefficients on `2^{j-1} <= |xi| < 2^{j+1}`,
    /// scaled to unit maximum.
    RandomBand { j: i32, seed: u64 },
    /// `sum_d coefficients[d] (x_1 - c_1)^d` times a window.
    WindowedPolynomial {
        coefficients: Vec<f64>,
        half_width: f64,
        #[serde(default)]
        window: WindowKind,
        #[serde(default)]
        center: Option<Vec<f64>>,
    },
    /// `sum_{k < terms} a^k cos(2 pi base_frequency b^k x_1 / B)`.
    Weierstrass {
        a: f64,
        b: u32,
        terms: u32,
        #[serde(default = "one")]
        base_frequency: u32,
    },
}

fn one() -> u32 {
    1
}

impl TestFunctionSpec {
    pub fn family(&self) -> &'static str {
        match self {
            Self::Gaussian { .. } => "gaussian",
            Self::ModulatedGaussian { .. } => "modulated_gaussian",
            Self::SmoothBump { .. } => "smooth_bump",
            Self::RandomBand { .. } => "random_band",
            Self::WindowedPolynomial { .. } => "windowed_polynomial",
            Self::Weierstrass { .. } => "weierstrass",
        }
    }
}

fn unresolvable<T>(msg: String) -> Result<T> {
    Err(LpError::UnresolvableSpec(msg))
}

fn check_width(grid: &GridSpec, sigma: f64) -> Result<()> {
    let lo = 4.0 * grid.spacing();
    let hi = grid.box_length() / 8.0;
    if !(sigma >= lo * (1.0 - 1e-12) && sigma <= hi * (1.0 + 1e-12)) {
        return unresolvable(format!("width {sigma} outside [{lo}, {hi}]"));
    }
    Ok(())
}

fn center_of(grid: &GridSpec, center: &Option<Vec<f64>>) -> Result<Vec<f64>> {
    match center {
        None => Ok(vec![grid.box_length() / 2.0; grid.dim()]),
        Some(c) if c.len() == grid.dim() && c.iter().all(|v| v.is_finite()) => Ok(c.clone()),
        Some(c) => unresolvable(format!("center {c:?} does not match dimension {}", grid.dim())),
    }
}

fn gaussian_at(grid: &GridSpec, x: &[f64], c: &[f64], sigma: f64) -> f64 {
    let d = periodic_distance(grid, x, c);
    (-d * d / (sigma * sigma)).exp()
}

/// Signed offset of `x_1` from `c_1` in `[-B/2, B/2)`.
fn axis_offset(grid: &GridSpec, x: f64, c: f64) -> f64 {
    let b = grid.box_length();
    let mut d = (x - c).rem_euclid(b);
    if d >= b / 2.0 {
        d -= b;
    }
    d
}

fn real(grid: GridSpec, f: impl Fn(&[f64]) -> f64) -> SampledField {
    SampledField::from_fn(grid, |x| Complex64::new(f(x), 0.0))
}

/// Samples a corpus member on `grid`.
pub fn sample_family(spec: &TestFunctionSpec, grid: &GridSpec) -> Result<SampledField> {
    let g = *grid;
    match spec {
        TestFunctionSpec::Gaussian { sigma, center } => {
            check_width(grid, *sigma)?;
            let c = center_of(grid, center)?;
            Ok(real(g, |x| gaussian_at(&g, x, &c, *sigma)))
        }
        TestFunctionSpec::ModulatedGaussian { sigma, frequency, center } => {
            check_width(grid, *sigma)?;
            if !(*frequency >= 0.0 && *frequency < grid.nyquist() / 2.0) {
                return unresolvable(format!("modulation {frequency} must lie in [0, {})", grid.nyquist() / 2.0));
            }
            let c = center_of(grid, center)?;
            Ok(real(g, |x| gaussian_at(&g, x, &c, *sigma) * (2.0 * PI * frequency * x[0]).cos()))
        }
        TestFunctionSpec::SmoothBump { sigma, center } => {
            // Compact support: any radius up to half the box stays one copy.
            if !(*sigma >= 4.0 * grid.spacing() && *sigma <= grid.box_length() / 2.0) {
                return unresolvable(format!("bump radius {sigma} outside [{}, {}]", 4.0 * grid.spacing(), grid.box_length() / 2.0));
            }
            let c = center_of(grid, center)?;
            Ok(real(g, |x| {
                let r = periodic_distance(&g, x, &c) / sigma;
                if r < 1.0 {
                    (1.0 - 1.0 / (1.0 - r * r)).exp()
                } else {
                    0.0
                }
            }))
        }
        TestFunctionSpec::RandomBand { j, seed } => random_band(grid, *j, *seed),
        TestFunctionSpec::WindowedPolynomial { coefficients, half_width, window, center } => {
            if coefficients.is_empty() || coefficients.iter().any(|v| !v.is_finite()) {
                return unresolvable("polynomial needs finite coefficients".into());
            }
            if *window == WindowKind::Gaussian {
                check_width(grid, *half_width)?;
            } else if !(*half_width >= 4.0 * grid.spacing() && *half_width < grid.box_length() / 2.0) {
                return unresolvable(format!("window half width {half_width} not resolvable"));
            }
            let c = center_of(grid, center)?;
            Ok(real(g, |x| {
                let u = axis_offset(&g, x[0], c[0]);
                let poly = coefficients.iter().rev().fold(0.0, |acc, a| acc * u + a);
                let w = match window {
                    WindowKind::Hard => f64::from(u8::from(u.abs() <= *half_width)),
                    WindowKind::Gaussian => gaussian_at(&g, x, &c, *half_width),
                };
                poly * w
            }))
        }
        TestFunctionSpec::Weierstrass { a, b, terms, base_frequency } => {
            if !(*a > 0.0 && *a < 1.0) || *b < 2 || *terms == 0 || *base_frequency == 0 {
                return unresolvable("weierstrass needs 0 < a < 1, b >= 2, terms >= 1".into());
            }
            let top = (*base_frequency as f64) * (*b as f64).powi(*terms as i32 - 1);
            if top >= (grid.points_per_axis() / 2) as f64 {
                return unresolvable(format!("highest weierstrass mode {top} reaches the Nyquist index"));
            }
            let bl = grid.box_length();
            Ok(real(g, |x| {
                let mut freq = *base_frequency as f64;
                let mut amp = 1.0;
                let mut acc = 0.0;
                for _ in 0..*terms {
                    acc += amp * (2.0 * PI * freq * x[0] / bl).cos();
                    freq *= *b as f64;
                    amp *= a;
                }
                acc
            }))
        }
    }
}

fn random_band(grid: &GridSpec, j: i32, seed: u64) -> Result<SampledField> {
    let system = build_band_system(grid, 1.0)?;
    if j < system.j_min() || j > system.j_max() {
        return unresolvable(format!("band {j} outside [{}, {}]", system.j_min(), system.j_max()));
    }
    let lo = 2f64.powi(j - 1);
    let hi = 2f64.powi(j + 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.len()];
    for idx in 0..grid.len() {
        let r = norm3(&grid.wavevector(idx));
        if !(lo <= r && r < hi) {
            continue;
        }
        let k = grid.lattice_point(idx);
        let neg = grid.lattice_index(&[-k[0], -k[1], -k[2]]);
        // Draw once per conjugate pair; the partner receives the conjugate.
        if neg < idx {
            continue;
        }
        let amp: f64 = rng.gen_range(0.5..1.0);
        let phase: f64 = rng.gen_range(0.0..2.0 * PI);
        let c = Complex64::from_polar(amp, phase);
        if neg == idx {
            coeffs[idx] = Complex64::new(c.re, 0.0);
        } else {
            coeffs[idx] = c;
            coeffs[neg] = c.conj();
        }
    }
    let field = dft_inverse(&SpectralField::new(coeffs, *grid)?).real_part();
    let m = field.max_abs();
    if m == 0.0 {
        return unresolvable(format!("band {j} contains no lattice points"));
    }
    Ok(field.scale(Complex64::new(1.0 / m, 0.0)))
}

/// A labelled corpus member.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusEntry {
    pub id: String,
    pub spec: TestFunctionSpec,
}

impl CorpusEntry {
    pub fn labelled(index: usize, spec: TestFunctionSpec) -> Self {
        Self { id: format!("f{index:02}_{}", spec.family()), spec }
    }
}

/// Twelve functions adapted to `grid`: three Gaussians, two modulated
/// Gaussians, two bumps, three random bands, one windowed polynomial and
/// one Weierstrass sum.
///
/// Every member keeps its spectrum below a quarter of the Nyquist index (up
/// to the bump tails), so one dyadic dilation is defined for all of them.
pub fn default_corpus(grid: &GridSpec) -> Result<Vec<CorpusEntry>> {
    let system = build_band_system(grid, 1.0)?;
    let dx = grid.spacing();
    let bl = grid.box_length();
    // Spectra are kept well inside both the band range and the step range
    // [dx, B/4] of the quadratures, with room for one dilation. Gaussians
    // narrower than 8 cells leak past N/4; wider than 32 cells they sit
    // mostly below the first resolved band.
    let lo = 8.0 * dx;
    let hi = (32.0 * dx).min(bl / 8.0).max(lo);
    let widths = [lo, (lo * hi).sqrt(), hi];
    let nyq = grid.nyquist();
    let c = bl / 2.0;
    let off = |v: f64| Some(vec![v; grid.dim()]);
    // Compact bumps have slowly decaying spectra: at 24 cells of radius
    // about 1e-5 of the energy lies past N/4 in 2-D, and it shrinks fast
    // with the radius.
    let bump = (24.0 * dx).min(bl / 2.0);

    let band_hi = (system.j_min() + 3).min(nyq.log2().floor() as i32 - 3).max(system.j_min());
    let band_lo = (band_hi - 2).max(system.j_min() + 1).min(band_hi);
    let band_mid = (band_lo + band_hi) / 2;

    let b = 3u32;
    let base = 2u32;
    let cap = grid.points_per_axis() as f64 / 8.0;
    let mut terms = 1u32;
    while (base as f64) * (b as f64).powi(terms as i32) < cap && terms < 8 {
        terms += 1;
    }

    let specs = vec![
        TestFunctionSpec::Gaussian { sigma: widths[0], center: None },
        TestFunctionSpec::Gaussian { sigma: widths[1], center: off(0.3 * bl) },
        TestFunctionSpec::Gaussian { sigma: widths[2], center: None },
        TestFunctionSpec::ModulatedGaussian { sigma: widths[1], frequency: (nyq / 32.0).round(), center: None },
        TestFunctionSpec::ModulatedGaussian { sigma: widths[2], frequency: (nyq / 64.0).round(), center: off(0.6 * c) },
        TestFunctionSpec::SmoothBump { sigma: bump, center: None },
        TestFunctionSpec::SmoothBump { sigma: (32.0 * dx).min(bl / 2.0), center: off(0.45 * bl) },
        TestFunctionSpec::RandomBand { j: band_lo, seed: 11 },
        TestFunctionSpec::RandomBand { j: band_mid, seed: 23 },
        TestFunctionSpec::RandomBand { j: band_hi, seed: 37 },
        TestFunctionSpec::WindowedPolynomial {
            coefficients: vec![0.5, 1.0 / widths[1]],
            half_width: widths[1],
            window: WindowKind::Gaussian,
            center: None,
        },
        TestFunctionSpec::Weierstrass { a: 0.5, b, terms, base_frequency: base },
    ];
    Ok(specs.into_iter().enumerate().map(|(i, s)| CorpusEntry::labelled(i, s)).collect())
}
