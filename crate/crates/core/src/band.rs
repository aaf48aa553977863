//! Radial Littlewood-Paley partition of unity on the frequency lattice.
//!
//! The cutoff `chi` equals 1 on `[0, 1]`, 0 on `[2, inf)` and is a C-infinity
//! monotone blend of `s(t) = exp(-kappa / t)` in between. The band function
//! `psi_hat(xi) = chi(|xi|) - chi(2|xi|)` is supported in `1/2 < |xi| < 2`, and
//! `phi_hat(xi) = chi(|xi|)` is the matching low-pass profile. Sums of dilates
//! of `psi_hat` telescope, which is what makes reconstruction exact.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{LpError, Result};
use crate::field::{dft_forward, dft_inverse, norm3, GridSpec, SampledField, SpectralField};
use crate::numeric::compensated_sum;

/// Relative spectral energy allowed outside the resolvable annulus.
pub const UNRESOLVED_ENERGY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffProfile {
    sharpness: f64,
}

impl CutoffProfile {
    pub fn new(sharpness: f64) -> Result<Self> {
        if !(sharpness.is_finite() && sharpness > 0.0) {
            return Err(LpError::InvalidParams(format!("transition sharpness {sharpness} must be positive")));
        }
        Ok(Self { sharpness })
    }

    #[inline]
    fn step(&self, t: f64) -> f64 {
        if t <= 0.0 {
            0.0
        } else {
            (-self.sharpness / t).exp()
        }
    }

    /// The cutoff `chi(u)`.
    #[inline]
    pub fn chi(&self, u: f64) -> f64 {
        if u <= 1.0 {
            1.0
        } else if u >= 2.0 {
            0.0
        } else {
            let a = self.step(2.0 - u);
            let b = self.step(u - 1.0);
            a / (a + b)
        }
    }
}

/// Band functions realized on one grid, together with the resolvable band range.
#[derive(Debug, Clone, PartialEq)]
pub struct DyadicBandSystem {
    profile: CutoffProfile,
    j_min: i32,
    j_max: i32,
    grid: GridSpec,
}

/// `build_band_system`: picks the widest band range the lattice supports.
///
/// `j_max` is the largest `j` with `2^{j+1}` at or below the Nyquist
/// frequency; `j_min` is the smallest `j` with `2^{j-1} >= 1/B`.
pub fn build_band_system(grid: &GridSpec, transition_sharpness: f64) -> Result<DyadicBandSystem> {
    let profile = CutoffProfile::new(transition_sharpness)?;
    let j_max = grid.nyquist().log2().floor() as i32 - 1;
    let j_min = (1.0 / grid.box_length()).log2().ceil() as i32 + 1;
    if j_max - j_min + 1 < 3 {
        return Err(LpError::RangeTooNarrow { j_min, j_max });
    }
    Ok(DyadicBandSystem { profile, j_min, j_max, grid: *grid })
}

impl DyadicBandSystem {
    pub fn for_grid(grid: &GridSpec) -> Result<Self> {
        build_band_system(grid, 1.0)
    }

    pub fn j_min(&self) -> i32 {
        self.j_min
    }

    pub fn j_max(&self) -> i32 {
        self.j_max
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn profile(&self) -> &CutoffProfile {
        &self.profile
    }

    /// `psi_hat` at radius `r = |xi|`.
    #[inline]
    pub fn psi_hat(&self, r: f64) -> f64 {
        self.profile.chi(r) - self.profile.chi(2.0 * r)
    }

    /// `phi_hat` at radius `r = |xi|`.
    #[inline]
    pub fn phi_hat(&self, r: f64) -> f64 {
        self.profile.chi(r)
    }

    /// Multiplier of band `j`: `psi_hat(2^{-j} r)`.
    #[inline]
    pub fn band_multiplier(&self, j: i32, r: f64) -> f64 {
        self.psi_hat(r * 2f64.powi(-j))
    }

    /// Homogeneous partition sum over the resolvable bands.
    pub fn partition_sum(&self, r: f64) -> f64 {
        compensated_sum((self.j_min..=self.j_max).map(|j| self.band_multiplier(j, r)))
    }

    /// Inhomogeneous partition sum `phi_hat + sum_{j=1}^{j_max} psi_hat(2^{-j} .)`.
    pub fn inhomogeneous_sum(&self, r: f64) -> f64 {
        let mut terms = vec![self.phi_hat(r)];
        terms.extend((1..=self.j_max).map(|j| self.band_multiplier(j, r)));
        compensated_sum(terms)
    }

    /// Radii `[2^{j_min}, 2^{j_max}]` on which the homogeneous partition is exact.
    pub fn resolvable_annulus(&self) -> (f64, f64) {
        (2f64.powi(self.j_min), 2f64.powi(self.j_max))
    }

    fn check_band(&self, j: i32) -> Result<()> {
        if j < self.j_min || j > self.j_max {
            return Err(LpError::BandOutOfRange { j, j_min: self.j_min, j_max: self.j_max });
        }
        Ok(())
    }

    fn check_grid(&self, field: &SampledField) -> Result<()> {
        if field.grid() != &self.grid {
            return Err(LpError::GridMismatch);
        }
        Ok(())
    }

    fn radii(&self) -> Vec<f64> {
        (0..self.grid.len()).map(|i| norm3(&self.grid.wavevector(i))).collect()
    }
}

fn filtered(spec: &SpectralField, radii: &[f64], real: bool, m: impl Fn(f64) -> f64) -> SampledField {
    let weights: Vec<Complex64> = radii.iter().map(|&r| Complex64::new(m(r), 0.0)).collect();
    let out = dft_inverse(&spec.multiply_values(&weights));
    if real {
        out.real_part()
    } else {
        out
    }
}

/// `f_j`: spectral multiplication by `psi_hat(2^{-j} xi)`.
pub fn band_project(field: &SampledField, system: &DyadicBandSystem, j: i32) -> Result<SampledField> {
    system.check_grid(field)?;
    system.check_band(j)?;
    let radii = system.radii();
    Ok(filtered(&dft_forward(field), &radii, field.is_real(), |r| system.band_multiplier(j, r)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecompositionSummary {
    pub j_min: i32,
    pub j_max: i32,
    pub inhomogeneous: bool,
    /// Relative spectral energy of `f - reconstruct(decompose(f))`, with the
    /// mean excluded in the homogeneous case.
    pub truncated_energy: f64,
}

/// Littlewood-Paley pieces of a field, in increasing band order.
#[derive(Debug, Clone, PartialEq)]
pub struct BandDecomposition {
    grid: GridSpec,
    bands: Vec<(i32, SampledField)>,
    lowpass: Option<SampledField>,
    summary: DecompositionSummary,
}

impl BandDecomposition {
    /// Builds a decomposition from explicit pieces; band indices must be
    /// strictly increasing and share one grid.
    pub fn from_parts(bands: Vec<(i32, SampledField)>, lowpass: Option<SampledField>) -> Result<Self> {
        let grid = match (bands.first(), &lowpass) {
            (Some((_, f)), _) => *f.grid(),
            (None, Some(l)) => *l.grid(),
            (None, None) => return Err(LpError::EmptyDecomposition),
        };
        if bands.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(LpError::InvalidParams("band indices must be strictly increasing".into()));
        }
        if bands.iter().any(|(_, f)| f.grid() != &grid) || lowpass.as_ref().is_some_and(|l| l.grid() != &grid) {
            return Err(LpError::GridMismatch);
        }
        let summary = DecompositionSummary {
            j_min: bands.first().map_or(0, |b| b.0),
            j_max: bands.last().map_or(0, |b| b.0),
            inhomogeneous: lowpass.is_some(),
            truncated_energy: 0.0,
        };
        Ok(Self { grid, bands, lowpass, summary })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn bands(&self) -> &[(i32, SampledField)] {
        &self.bands
    }

    pub fn lowpass(&self) -> Option<&SampledField> {
        self.lowpass.as_ref()
    }

    pub fn summary(&self) -> &DecompositionSummary {
        &self.summary
    }

    pub fn is_inhomogeneous(&self) -> bool {
        self.lowpass.is_some()
    }
}

/// Splits `f` into bands `j_min..=j_max` (homogeneous) or into `phi * f` plus
/// bands `1..=j_max` (inhomogeneous).
pub fn decompose(field: &SampledField, system: &DyadicBandSystem, inhomogeneous: bool) -> Result<BandDecomposition> {
    system.check_grid(field)?;
    let spec = dft_forward(field);
    let radii = system.radii();
    let upper = 2f64.powi(system.j_max + 1);
    let lower = 2f64.powi(system.j_min - 1);

    // The mean is a polynomial and carries no homogeneous content.
    let counted = |r: f64| inhomogeneous || r > 0.0;
    let total = compensated_sum(
        spec.coeffs().iter().zip(&radii).filter(|(_, &r)| counted(r)).map(|(c, _)| c.norm_sqr()),
    );
    let outside = compensated_sum(
        spec.coeffs()
            .iter()
            .zip(&radii)
            .filter(|(_, &r)| counted(r) && (r >= upper || (!inhomogeneous && r < lower)))
            .map(|(c, _)| c.norm_sqr()),
    );
    if total > 0.0 && outside / total > UNRESOLVED_ENERGY_TOL {
        return Err(LpError::UnresolvedEnergy { fraction: outside / total });
    }

    let real = field.is_real();
    let first = if inhomogeneous { 1 } else { system.j_min };
    let bands: Vec<(i32, SampledField)> = (first..=system.j_max)
        .map(|j| (j, filtered(&spec, &radii, real, |r| system.band_multiplier(j, r))))
        .collect();
    let lowpass = inhomogeneous.then(|| filtered(&spec, &radii, real, |r| system.phi_hat(r)));

    let missing = compensated_sum(spec.coeffs().iter().zip(&radii).filter(|(_, &r)| counted(r)).map(|(c, &r)| {
        let covered = if inhomogeneous {
            system.inhomogeneous_sum(r)
        } else {
            system.partition_sum(r)
        };
        c.norm_sqr() * (1.0 - covered).powi(2)
    }));
    let truncated_energy = if total > 0.0 { missing / total } else { 0.0 };
    Ok(BandDecomposition {
        grid: *field.grid(),
        bands,
        lowpass,
        summary: DecompositionSummary {
            j_min: first,
            j_max: system.j_max,
            inhomogeneous,
            truncated_energy,
        },
    })
}

/// Pointwise sum of the bands (and the low-pass part when present).
pub fn reconstruct(decomp: &BandDecomposition) -> Result<SampledField> {
    let mut acc = SampledField::zeros(decomp.grid);
    let mut real = true;
    for (_, f) in &decomp.bands {
        acc = acc.add(f)?;
        real &= f.is_real();
    }
    if let Some(l) = &decomp.lowpass {
        acc = acc.add(l)?;
        real &= l.is_real();
    }
    Ok(if real { acc.real_part() } else { acc })
}
