//! Sampled fields on a periodic box and their discrete Fourier transforms.
//!
//! Samples are stored in lexicographic order with axis 1 varying slowest.
//! Fourier coefficients use the convention `f(x) = sum_k c_k e^{2 pi i k.x / B}`,
//! i.e. `c_k = N^{-n} sum_x f(x) e^{-2 pi i k.x / B}`, so the physical
//! frequency of lattice point `k` is `xi = k / B` cycles per unit length.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{LpError, Result};
use crate::numeric::{compensated_sum, is_power_of_two, pow_nonneg};

/// Largest supported `dim * log2(N)`.
pub const MAX_LOG_POINTS: u32 = 30;

/// Coefficients below this fraction of the largest one count as zero when
/// checking that a spectrum lives on a sublattice.
pub const SPECTRAL_ZERO_TOL: f64 = 1e-12;

/// Largest relative spectral energy a dilation may fold past the Nyquist
/// frequency. Smooth but not band-limited profiles (bumps) need an energy
/// criterion; their far tails sit well above `SPECTRAL_ZERO_TOL` in amplitude.
pub const ALIAS_ENERGY_TOL: f64 = 1e-10;

/// Uniform periodic grid on `[0, B)^n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    dim: usize,
    points_per_axis: usize,
    box_length: f64,
}

impl GridSpec {
    pub fn new(dim: usize, points_per_axis: usize, box_length: f64) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(LpError::InvalidGrid(format!("dimension {dim} not in 1..=3")));
        }
        if !is_power_of_two(points_per_axis) || points_per_axis < 2 {
            return Err(LpError::InvalidGrid(format!(
                "points per axis {points_per_axis} is not a power of two >= 2"
            )));
        }
        if dim as u32 * points_per_axis.trailing_zeros() > MAX_LOG_POINTS {
            return Err(LpError::InvalidGrid(format!(
                "{points_per_axis}^{dim} samples exceeds the 2^{MAX_LOG_POINTS} cap"
            )));
        }
        if !(box_length.is_finite() && box_length > 0.0) {
            return Err(LpError::InvalidGrid(format!("box length {box_length} must be positive")));
        }
        Ok(Self { dim, points_per_axis, box_length })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    pub fn box_length(&self) -> f64 {
        self.box_length
    }

    pub fn spacing(&self) -> f64 {
        self.box_length / self.points_per_axis as f64
    }

    /// Volume of one grid cell, `(B/N)^n`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    pub fn len(&self) -> usize {
        self.points_per_axis.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Nyquist frequency `N / (2B)` in cycles per unit length.
    pub fn nyquist(&self) -> f64 {
        self.points_per_axis as f64 / (2.0 * self.box_length)
    }

    /// Per-axis indices of a flat index; unused axes are zero.
    #[inline]
    pub fn unravel(&self, mut idx: usize) -> [usize; 3] {
        let n = self.points_per_axis;
        let mut out = [0usize; 3];
        for a in (0..self.dim).rev() {
            out[a] = idx % n;
            idx /= n;
        }
        out
    }

    #[inline]
    pub fn ravel(&self, multi: &[usize; 3]) -> usize {
        let n = self.points_per_axis;
        (0..self.dim).fold(0, |acc, a| acc * n + multi[a] % n)
    }

    /// Signed lattice coordinate of an axis index, in `[-N/2, N/2)`.
    #[inline]
    pub fn signed_index(&self, i: usize) -> i64 {
        let n = self.points_per_axis as i64;
        let i = i as i64;
        if i < n / 2 {
            i
        } else {
            i - n
        }
    }

    /// Integer frequency lattice point of a flat coefficient index.
    #[inline]
    pub fn lattice_point(&self, idx: usize) -> [i64; 3] {
        let m = self.unravel(idx);
        let mut k = [0i64; 3];
        for a in 0..self.dim {
            k[a] = self.signed_index(m[a]);
        }
        k
    }

    /// Physical frequency `xi = k / B` of a flat coefficient index.
    #[inline]
    pub fn wavevector(&self, idx: usize) -> [f64; 3] {
        let k = self.lattice_point(idx);
        let mut xi = [0.0; 3];
        for a in 0..self.dim {
            xi[a] = k[a] as f64 / self.box_length;
        }
        xi
    }

    /// Flat index of a lattice point (components taken modulo N).
    pub fn lattice_index(&self, k: &[i64]) -> usize {
        let n = self.points_per_axis as i64;
        let mut multi = [0usize; 3];
        for a in 0..self.dim {
            multi[a] = k.get(a).copied().unwrap_or(0).rem_euclid(n) as usize;
        }
        self.ravel(&multi)
    }

    /// Physical coordinates of a grid point.
    #[inline]
    pub fn position(&self, idx: usize) -> [f64; 3] {
        let m = self.unravel(idx);
        let h = self.spacing();
        let mut x = [0.0; 3];
        for a in 0..self.dim {
            x[a] = m[a] as f64 * h;
        }
        x
    }

    /// Minimal-image displacement of the grid offset with flat index `idx`.
    #[inline]
    pub fn offset_vector(&self, idx: usize) -> [f64; 3] {
        let k = self.lattice_point(idx);
        let h = self.spacing();
        let mut y = [0.0; 3];
        for a in 0..self.dim {
            y[a] = k[a] as f64 * h;
        }
        y
    }

    /// Minimal-image length of the grid offset with flat index `idx`.
    #[inline]
    pub fn offset_length(&self, idx: usize) -> f64 {
        norm3(&self.offset_vector(idx))
    }
}

#[inline]
pub(crate) fn norm3(v: &[f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

#[inline]
pub(crate) fn dot3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Minimal-image distance between two points of the periodic box.
pub fn periodic_distance(grid: &GridSpec, x: &[f64], c: &[f64]) -> f64 {
    let b = grid.box_length();
    let mut acc = 0.0;
    for a in 0..grid.dim() {
        let mut d = (x[a] - c.get(a).copied().unwrap_or(0.0)).rem_euclid(b);
        if d > b / 2.0 {
            d -= b;
        }
        acc += d * d;
    }
    acc.sqrt()
}

/// Function values on a [`GridSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct SampledField {
    grid: GridSpec,
    samples: Vec<Complex64>,
}

impl SampledField {
    /// Validating constructor (`make_field`).
    pub fn new(samples: Vec<Complex64>, grid: GridSpec) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(LpError::ShapeMismatch { expected: grid.len(), actual: samples.len() });
        }
        if let Some(i) = samples.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(LpError::NonFiniteSample(i));
        }
        Ok(Self { grid, samples })
    }

    pub fn from_real(values: &[f64], grid: GridSpec) -> Result<Self> {
        Self::new(values.iter().map(|&v| Complex64::new(v, 0.0)).collect(), grid)
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self { grid, samples: vec![Complex64::new(0.0, 0.0); grid.len()] }
    }

    /// Samples `f` at every grid point. Panics if `f` returns a non-finite value.
    pub fn from_fn<F: Fn(&[f64]) -> Complex64>(grid: GridSpec, f: F) -> Self {
        let samples: Vec<Complex64> = (0..grid.len())
            .map(|i| {
                let x = grid.position(i);
                f(&x[..grid.dim()])
            })
            .collect();
        Self::new(samples, grid).expect("sampling function produced a non-finite value")
    }

    pub(crate) fn from_parts(grid: GridSpec, samples: Vec<Complex64>) -> Self {
        debug_assert_eq!(samples.len(), grid.len());
        Self { grid, samples }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    /// True when every sample has an exactly zero imaginary part.
    pub fn is_real(&self) -> bool {
        self.samples.iter().all(|z| z.im == 0.0)
    }

    pub fn moduli(&self) -> Vec<f64> {
        self.samples.iter().map(|z| z.norm()).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn scale(&self, alpha: Complex64) -> Self {
        Self::from_parts(self.grid, self.samples.iter().map(|z| z * alpha).collect())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with<F: Fn(Complex64, Complex64) -> Complex64>(&self, other: &Self, f: F) -> Result<Self> {
        if self.grid != other.grid {
            return Err(LpError::GridMismatch);
        }
        Ok(Self::from_parts(
            self.grid,
            self.samples.iter().zip(&other.samples).map(|(&a, &b)| f(a, b)).collect(),
        ))
    }

    /// Discards imaginary parts.
    pub fn real_part(&self) -> Self {
        Self::from_parts(self.grid, self.samples.iter().map(|z| Complex64::new(z.re, 0.0)).collect())
    }

    /// Largest pointwise modulus of the difference, relative to `self`'s max.
    pub fn relative_max_diff(&self, other: &Self) -> f64 {
        let scale = self.max_abs().max(other.max_abs());
        let diff = self
            .samples
            .iter()
            .zip(&other.samples)
            .fold(0.0, |m: f64, (a, b)| m.max((a - b).norm()));
        if scale == 0.0 {
            diff
        } else {
            diff / scale
        }
    }
}

/// Fourier coefficients of a [`SampledField`], stored in FFT order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: GridSpec,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn new(coeffs: Vec<Complex64>, grid: GridSpec) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(LpError::ShapeMismatch { expected: grid.len(), actual: coeffs.len() });
        }
        Ok(Self { grid, coeffs })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// Coefficients in FFT order; use [`GridSpec::lattice_point`] to label them.
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient at lattice point `k`.
    pub fn coeff(&self, k: &[i64]) -> Complex64 {
        self.coeffs[self.grid.lattice_index(k)]
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    /// Multiplies every coefficient by `m(xi)` evaluated at its physical frequency.
    pub fn multiply<M: Fn(&[f64; 3]) -> Complex64>(&self, m: M) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * m(&self.grid.wavevector(i)))
            .collect();
        Self { grid: self.grid, coeffs }
    }

    /// Multiplies by precomputed multiplier values in FFT order.
    pub fn multiply_values(&self, m: &[Complex64]) -> Self {
        Self {
            grid: self.grid,
            coeffs: self.coeffs.iter().zip(m).map(|(c, w)| c * w).collect(),
        }
    }

    /// Sum of `|c_k|^2` over coefficients selected by `keep(xi)`.
    pub fn energy_where<P: Fn(&[f64; 3]) -> bool>(&self, keep: P) -> f64 {
        compensated_sum(
            self.coeffs
                .iter()
                .enumerate()
                .filter(|(i, _)| keep(&self.grid.wavevector(*i)))
                .map(|(_, c)| c.norm_sqr()),
        )
    }
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(n: usize, direction: FftDirection) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft(n, direction))
}

/// Unnormalized in-place n-dimensional FFT.
pub(crate) fn fft_nd(data: &mut [Complex64], grid: &GridSpec, direction: FftDirection) {
    let n = grid.points_per_axis();
    let fft = plan(n, direction);
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    // Last axis is contiguous: rustfft handles the batch directly.
    fft.process_with_scratch(data, &mut scratch);
    let dim = grid.dim();
    if dim == 1 {
        return;
    }
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    for axis in 0..dim - 1 {
        let stride = n.pow((dim - 1 - axis) as u32);
        let block = stride * n;
        for start in (0..data.len()).step_by(block) {
            for inner in 0..stride {
                let base = start + inner;
                for (t, v) in line.iter_mut().enumerate() {
                    *v = data[base + t * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (t, v) in line.iter().enumerate() {
                    data[base + t * stride] = *v;
                }
            }
        }
    }
}

/// Forward transform, `c_k = N^{-n} sum_x f(x) e^{-2 pi i k.x/B}`.
pub fn dft_forward(field: &SampledField) -> SpectralField {
    let grid = *field.grid();
    let mut data = field.samples().to_vec();
    fft_nd(&mut data, &grid, FftDirection::Forward);
    let norm = 1.0 / grid.len() as f64;
    for z in &mut data {
        *z *= norm;
    }
    SpectralField { grid, coeffs: data }
}

/// Inverse transform, `f(x) = sum_k c_k e^{2 pi i k.x/B}`.
pub fn dft_inverse(spec: &SpectralField) -> SampledField {
    let grid = *spec.grid();
    let mut data = spec.coeffs().to_vec();
    fft_nd(&mut data, &grid, FftDirection::Inverse);
    SampledField::from_parts(grid, data)
}

/// Applies a Fourier multiplier. When the input is real the result keeps
/// only its real part, which is exact for Hermitian multipliers.
pub fn apply_multiplier<M: Fn(&[f64; 3]) -> Complex64>(field: &SampledField, m: M) -> SampledField {
    let out = dft_inverse(&dft_forward(field).multiply(m));
    if field.is_real() {
        out.real_part()
    } else {
        out
    }
}

/// `(sum |f|^p (B/N)^n)^{1/p}`, or `max |f|` for `p = inf`.
pub fn lp_norm(field: &SampledField, p: f64) -> Result<f64> {
    lp_norm_values(&field.moduli(), field.grid(), p)
}

/// Riemann-sum L^p quasinorm of nonnegative grid values.
pub fn lp_norm_values(values: &[f64], grid: &GridSpec, p: f64) -> Result<f64> {
    if !(p > 0.0) {
        return Err(LpError::InvalidExponent(p));
    }
    if p.is_infinite() {
        return Ok(values.iter().fold(0.0, |m, &v| m.max(v)));
    }
    let sum = compensated_sum(values.iter().map(|&v| pow_nonneg(v, p)));
    Ok(pow_nonneg(sum * grid.cell_volume(), 1.0 / p))
}

/// `x -> f(2^m x)` on the same periodic box, realized by remapping the
/// spectrum `k -> 2^m k`.
pub fn dyadic_dilate(field: &SampledField, m: i32) -> Result<SampledField> {
    dyadic_dilate_with_tolerance(field, m, ALIAS_ENERGY_TOL)
}

/// [`dyadic_dilate`] with an explicit bound on the relative energy that an
/// upward dilation may fold past the Nyquist frequency. Samples of
/// `f(2^m x)` are exact for `m > 0` either way; the bound only certifies that
/// the result still describes a resolved function.
pub fn dyadic_dilate_with_tolerance(field: &SampledField, m: i32, alias_energy_tol: f64) -> Result<SampledField> {
    if m == 0 {
        return Ok(field.clone());
    }
    let grid = *field.grid();
    let spec = dft_forward(field);
    let tol = SPECTRAL_ZERO_TOL * spec.max_abs();
    let half = (grid.points_per_axis() / 2) as i64;
    let dim = grid.dim();
    if m > 0 {
        let factor = 1i64 << m;
        let total = compensated_sum(spec.coeffs().iter().map(|c| c.norm_sqr()));
        let folded = compensated_sum(spec.coeffs().iter().enumerate().filter_map(|(i, c)| {
            let k = grid.lattice_point(i);
            (0..dim).any(|a| (k[a] * factor).abs() >= half).then(|| c.norm_sqr())
        }));
        if total > 0.0 && folded > alias_energy_tol * total {
            return Err(LpError::AliasingError(m));
        }
        // f(2^m x) at grid point i is f at grid point 2^m i: an exact index map.
        let n = grid.points_per_axis();
        let samples = (0..grid.len())
            .map(|idx| {
                let mut multi = grid.unravel(idx);
                for v in multi.iter_mut().take(dim) {
                    *v = (*v * factor as usize) % n;
                }
                field.samples()[grid.ravel(&multi)]
            })
            .collect();
        Ok(SampledField::from_parts(grid, samples))
    } else {
        let factor = 1i64 << (-m);
        let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.len()];
        for (i, c) in spec.coeffs().iter().enumerate() {
            let k = grid.lattice_point(i);
            if (0..dim).any(|a| k[a] % factor != 0) {
                if c.norm() > tol {
                    return Err(LpError::NonDivisibleSpectrum(m, -m));
                }
                continue;
            }
            let mut target = [0i64; 3];
            for a in 0..dim {
                target[a] = k[a] / factor;
            }
            coeffs[grid.lattice_index(&target)] += c;
        }
        let out = dft_inverse(&SpectralField { grid, coeffs });
        Ok(if field.is_real() { out.real_part() } else { out })
    }
}

/// `x -> f(x + shift)` with periodic wrap, via the phase `e^{2 pi i xi.shift}`.
pub fn translate(field: &SampledField, shift: &[f64]) -> SampledField {
    let mut s = [0.0; 3];
    for (a, v) in shift.iter().take(3).enumerate() {
        s[a] = *v;
    }
    apply_multiplier(field, |xi| {
        let phase = 2.0 * PI * dot3(xi, &s);
        Complex64::new(phase.cos(), phase.sin())
    })
}
