//! Difference-integral quasinorms: full-space steps `h` with the measure
//! `dh/|h|^n`, one-axis steps `t e_j` with `dt/t`, and the Gagliardo and
//! midpoint forms.

use std::collections::BTreeMap;

use rayon::prelude::*;

use super::params::{Scale, SpaceParams};
use super::result::{aggregate_b, aggregate_f, Aggregate, Flag, QuasinormResult, ScaleTable, TruncationReport};
use crate::difference::spectral_difference;
use crate::error::{LpError, Result};
use crate::field::{dft_forward, lp_norm_values, translate, GridSpec, SampledField, SpectralField};
use crate::numeric::{compensated_sum, pow_nonneg, NeumaierSum};
use crate::quadrature::{log_radii, shell_index, sphere_directions, Direction, QuadratureSpec};

/// Value growth, after extending the step range one octave below `h_min`,
/// above which a result is flagged `DIVERGENT`.
pub const DIVERGENCE_GROWTH: f64 = 1.5;

/// Tail share above which a result is flagged `TRUNCATION-WARN`.
pub const TRUNCATION_WARN_SHARE: f64 = 0.25;

/// Rings evaluated together; bounds peak memory on 3-D grids.
const RING_BATCH: usize = 16;

/// What is measured at each step `h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Kernel {
    /// `|Delta^L_h f(x)|`.
    Difference(u32),
    /// `|f(x + h) - f(x)|`, evaluated from translates.
    Gagliardo,
    /// `|f(x) + f(x + h) - 2 f(x + h/2)|`.
    Midpoint,
}

impl Kernel {
    /// Small-step decay order of the kernel for smooth `f`.
    fn order(&self) -> f64 {
        match self {
            Self::Difference(l) => *l as f64,
            Self::Gagliardo => 1.0,
            Self::Midpoint => 2.0,
        }
    }

    fn moduli(&self, field: &SampledField, spec: &SpectralField, h: &[f64; 3]) -> Vec<f64> {
        let real = field.is_real();
        match *self {
            Self::Difference(l) => spectral_difference(spec, h, l, real).moduli(),
            Self::Gagliardo => translate(field, h)
                .sub(field)
                .expect("translate preserves the grid")
                .moduli(),
            Self::Midpoint => {
                let half = [h[0] / 2.0, h[1] / 2.0, h[2] / 2.0];
                spectral_difference(spec, &half, 2, real).moduli()
            }
        }
    }
}

/// A radius with its weights in the reported range and in the range
/// extended one octave down (zero where absent).
#[derive(Debug, Clone, Copy)]
struct Ring {
    radius: f64,
    main: f64,
    ext: f64,
}

fn rings(lo: f64, hi: f64, per_octave: usize) -> Vec<Ring> {
    let main = log_radii(lo, hi, per_octave);
    let ext = log_radii(lo / 2.0, hi, per_octave);
    let mut out: Vec<Ring> = main.iter().map(|&(radius, main)| Ring { radius, main, ext: 0.0 }).collect();
    for (r, w) in ext {
        match out.iter_mut().find(|g| (g.radius - r).abs() <= 1e-9 * r) {
            Some(g) => g.ext = w,
            None => out.push(Ring { radius: r, main: 0.0, ext: w }),
        }
    }
    out.sort_by(|a, b| a.radius.total_cmp(&b.radius));
    out
}

/// Node layout of one integral: rings times directions.
struct Layout {
    rings: Vec<Ring>,
    directions: Vec<Direction>,
}

/// Per-ring aggregate over directions: pointwise (F) or of norms (B).
enum RingValue {
    Pointwise(Vec<f64>),
    Norm(f64),
}

struct Engine<'a> {
    field: &'a SampledField,
    spec: SpectralField,
    params: &'a SpaceParams,
    kernel: Kernel,
}

impl Engine<'_> {
    fn grid(&self) -> &GridSpec {
        self.field.grid()
    }

    /// `sum_d w_d (r^{-s} |K_{r d} f|)^q` (max over `d` when `q = inf`).
    fn ring_value(&self, radius: f64, directions: &[Direction]) -> Result<RingValue> {
        let q = self.params.q;
        let scale = radius.powf(-self.params.s);
        let combine = |acc: &mut f64, w: f64, v: f64| {
            if q.is_infinite() {
                *acc = acc.max(v);
            } else {
                *acc += w * pow_nonneg(v, q);
            }
        };
        match self.params.scale {
            Scale::F => {
                let mut acc = vec![0.0; self.grid().len()];
                for d in directions {
                    let h = [radius * d.unit[0], radius * d.unit[1], radius * d.unit[2]];
                    for (a, v) in acc.iter_mut().zip(self.kernel.moduli(self.field, &self.spec, &h)) {
                        combine(a, d.weight, scale * v);
                    }
                }
                Ok(RingValue::Pointwise(acc))
            }
            Scale::B => {
                let mut acc = 0.0;
                for d in directions {
                    let h = [radius * d.unit[0], radius * d.unit[1], radius * d.unit[2]];
                    let norm = lp_norm_values(&self.kernel.moduli(self.field, &self.spec, &h), self.grid(), self.params.p)?;
                    combine(&mut acc, d.weight, scale * norm);
                }
                Ok(RingValue::Norm(acc))
            }
        }
    }

    fn run(&self, layout: &Layout) -> Result<QuasinormResult> {
        let q = self.params.q;
        let p = self.params.p;
        let npts = self.grid().len();
        let dv = self.grid().cell_volume();
        let fold = |acc: &mut f64, w: f64, v: f64| {
            if q.is_infinite() {
                *acc = acc.max(v);
            } else {
                *acc += w * v;
            }
        };

        let mut shells: BTreeMap<i32, Vec<f64>> = BTreeMap::new();
        let mut shells_b: BTreeMap<i32, NeumaierSum> = BTreeMap::new();
        let mut ext_f = vec![0.0; npts];
        let mut ext_b = NeumaierSum::new();
        let mut ext_b_max = 0.0f64;
        // Per-unit-log-radius mass of every main ring, for the tail estimates.
        let mut ring_mass: Vec<f64> = Vec::new();

        for batch in layout.rings.chunks(RING_BATCH) {
            let values: Vec<RingValue> = batch
                .par_iter()
                .map(|g| self.ring_value(g.radius, &layout.directions))
                .collect::<Result<_>>()?;
            for (g, v) in batch.iter().zip(values) {
                let shell = shell_index(g.radius);
                match v {
                    RingValue::Pointwise(vals) => {
                        if g.main > 0.0 {
                            let col = shells.entry(shell).or_insert_with(|| vec![0.0; npts]);
                            for (c, &v) in col.iter_mut().zip(&vals) {
                                fold(c, g.main, v);
                            }
                            ring_mass.push(if q.is_infinite() {
                                vals.iter().fold(0.0, |m, &v| m.max(v))
                            } else {
                                compensated_sum(vals.iter().copied()) * dv
                            });
                        }
                        if g.ext > 0.0 {
                            for (c, &v) in ext_f.iter_mut().zip(&vals) {
                                fold(c, g.ext, v);
                            }
                        }
                    }
                    RingValue::Norm(v) => {
                        if g.main > 0.0 {
                            let acc = shells_b.entry(shell).or_default();
                            if q.is_infinite() {
                                let cur = acc.value();
                                *acc = NeumaierSum::new();
                                acc.add(cur.max(v));
                            } else {
                                acc.add(g.main * v);
                            }
                            ring_mass.push(v);
                        }
                        if g.ext > 0.0 {
                            if q.is_infinite() {
                                ext_b_max = ext_b_max.max(v);
                            } else {
                                ext_b.add(g.ext * v);
                            }
                        }
                    }
                }
            }
        }

        let (agg, ext_value): (Aggregate, f64) = match self.params.scale {
            Scale::F => {
                let (scales, powered): (Vec<i32>, Vec<Vec<f64>>) = shells.into_iter().unzip();
                let agg = aggregate_f(&ScaleTable { scales, powered }, p, q, dv);
                let ext = aggregate_f(&ScaleTable { scales: vec![0], powered: vec![ext_f] }, p, q, dv).value;
                (agg, ext)
            }
            Scale::B => {
                let (scales, powered): (Vec<i32>, Vec<f64>) = shells_b.into_iter().map(|(k, v)| (k, v.value())).unzip();
                let agg = aggregate_b(&scales, powered, q);
                let ext = if q.is_infinite() { ext_b_max } else { pow_nonneg(ext_b.value(), 1.0 / q) };
                (agg, ext)
            }
        };

        let total = if q.is_infinite() {
            ring_mass.iter().fold(0.0f64, |m, &v| m.max(v))
        } else {
            layout
                .rings
                .iter()
                .filter(|g| g.main > 0.0)
                .zip(&ring_mass)
                .map(|(g, m)| g.main * m)
                .sum::<f64>()
        };
        let report = self.tails(&ring_mass, total, agg.value, ext_value);
        let flag = if report.refinement_growth.is_some_and(|g| g > DIVERGENCE_GROWTH) {
            Flag::Divergent
        } else if report.low_tail > TRUNCATION_WARN_SHARE || report.high_tail > TRUNCATION_WARN_SHARE {
            Flag::TruncationWarn
        } else {
            Flag::Ok
        };
        Ok(QuasinormResult {
            value: agg.value,
            per_scale: agg.per_scale,
            aggregation: agg.aggregation,
            truncation_report: report,
            params_echo: self.params.clone(),
            flag,
        })
    }

    /// Geometric tail estimates from the edge rings: the integrand decays like
    /// `r^{(order - s) q}` below the range and like `r^{-s q}` above it.
    fn tails(&self, ring_mass: &[f64], total: f64, value: f64, ext_value: f64) -> TruncationReport {
        let (s, q) = (self.params.s, self.params.q);
        let decay_lo = self.kernel.order() - s;
        let (lo, hi) = match (ring_mass.first(), ring_mass.last()) {
            (Some(&a), Some(&b)) if total > 0.0 => (a / total, b / total),
            _ => return TruncationReport { low_tail: 0.0, high_tail: 0.0, refinement_growth: None },
        };
        let tail = |edge: f64, rate: f64| {
            if rate <= 0.0 {
                f64::INFINITY
            } else if q.is_infinite() {
                edge
            } else {
                edge / (rate * q)
            }
        };
        TruncationReport {
            low_tail: tail(lo, decay_lo),
            high_tail: tail(hi, s),
            refinement_growth: (value > 0.0).then(|| ext_value / value),
        }
    }
}

fn quasinorm_on(field: &SampledField, params: &SpaceParams, kernel: Kernel, layout: &Layout) -> Result<QuasinormResult> {
    params.validate()?;
    let engine = Engine { field, spec: dft_forward(field), params, kernel };
    engine.run(layout)
}

fn full_layout(grid: &GridSpec, quad: &QuadratureSpec, lo: f64, hi: f64) -> Layout {
    Layout {
        rings: rings(lo, hi, quad.radial_nodes_per_octave),
        directions: sphere_directions(grid.dim(), quad.sphere_nodes),
    }
}

fn checked_quad(grid: &GridSpec, quad: &QuadratureSpec) -> Result<QuadratureSpec> {
    let quad = quad.clone().resolved(grid);
    quad.validate(grid)?;
    Ok(quad)
}

fn with_scale(params: &SpaceParams, scale: Scale) -> SpaceParams {
    SpaceParams { scale, ..params.clone() }
}

/// `|| ( int |h|^{-sq} |Delta^L_h f|^q dh/|h|^n )^{1/q} ||_{L^p}`, with the
/// supremum over steps when `q = inf`. `params.scale` is ignored.
#[allow(non_snake_case)]
pub fn difference_quasinorm_F(field: &SampledField, params: &SpaceParams, quad: &QuadratureSpec) -> Result<QuasinormResult> {
    let quad = checked_quad(field.grid(), quad)?;
    let layout = full_layout(field.grid(), &quad, quad.h_min, quad.h_max);
    quasinorm_on(field, &with_scale(params, Scale::F), Kernel::Difference(params.order), &layout)
}

/// `( int |h|^{-sq} ||Delta^L_h f||_{L^p}^q dh/|h|^n )^{1/q}`, with the
/// supremum over steps when `q = inf`. `params.scale` is ignored.
#[allow(non_snake_case)]
pub fn difference_quasinorm_B(field: &SampledField, params: &SpaceParams, quad: &QuadratureSpec) -> Result<QuasinormResult> {
    let quad = checked_quad(field.grid(), quad)?;
    let layout = full_layout(field.grid(), &quad, quad.h_min, quad.h_max);
    quasinorm_on(field, &with_scale(params, Scale::B), Kernel::Difference(params.order), &layout)
}

/// Difference quasinorm of the scale named in `params`.
pub fn difference_quasinorm(field: &SampledField, params: &SpaceParams, quad: &QuadratureSpec) -> Result<QuasinormResult> {
    match params.scale {
        Scale::F => difference_quasinorm_F(field, params, quad),
        Scale::B => difference_quasinorm_B(field, params, quad),
    }
}

/// Difference quasinorm on an explicit step range `[lo, hi]`, which may
/// start below the grid spacing (spectral differences are exact there for
/// band-limited fields).
pub(crate) fn difference_quasinorm_between(
    field: &SampledField,
    params: &SpaceParams,
    quad: &QuadratureSpec,
    lo: f64,
    hi: f64,
) -> Result<QuasinormResult> {
    let quad = quad.clone().resolved(field.grid());
    if !(lo > 0.0 && lo < hi) {
        return Err(LpError::QuadratureTooCoarse(format!("step range [{lo}, {hi}] is empty")));
    }
    let layout = full_layout(field.grid(), &quad, lo, hi);
    quasinorm_on(field, params, Kernel::Difference(params.order), &layout)
}

/// One-axis quasinorm with steps `t e_axis`, `t > 0`, and the measure `dt/t`.
/// `axis` counts from 1.
pub fn axis_quasinorm(field: &SampledField, params: &SpaceParams, axis: usize, quad: &QuadratureSpec) -> Result<QuasinormResult> {
    let grid = field.grid();
    if axis == 0 || axis > grid.dim() {
        return Err(LpError::InvalidAxis { axis, dim: grid.dim() });
    }
    let quad = checked_quad(grid, quad)?;
    let mut unit = [0.0; 3];
    unit[axis - 1] = 1.0;
    let layout = Layout {
        rings: rings(quad.h_min, quad.h_max, quad.t_nodes_per_octave),
        directions: vec![Direction { unit, weight: 1.0 }],
    };
    quasinorm_on(field, params, Kernel::Difference(params.order), &layout)
}

fn seminorm_params(s: f64, p: f64, q: f64) -> Result<SpaceParams> {
    if p.is_infinite() || q.is_infinite() {
        return Err(LpError::InvalidParams("seminorm requires p, q < inf".into()));
    }
    Ok(SpaceParams::new(s, p, q, 1, Scale::F))
}

/// `( int ( int |f(x) - f(y)|^q / |x - y|^{n + sq} dy )^{p/q} dx )^{1/p}`,
/// with `y = x + h` on the polar step grid.
pub fn gagliardo_seminorm(field: &SampledField, s: f64, p: f64, q: f64, quad: &QuadratureSpec) -> Result<QuasinormResult> {
    let params = seminorm_params(s, p, q)?;
    let quad = checked_quad(field.grid(), quad)?;
    let layout = full_layout(field.grid(), &quad, quad.h_min, quad.h_max);
    quasinorm_on(field, &params, Kernel::Gagliardo, &layout)
}

/// Gagliardo-type seminorm with the symmetric second difference
/// `f(x) + f(y) - 2 f((x + y)/2)`, suitable for `0 < s < 2`.
pub fn midpoint_seminorm(field: &SampledField, s: f64, p: f64, q: f64, quad: &QuadratureSpec) -> Result<QuasinormResult> {
    let mut params = seminorm_params(s, p, q)?;
    params.order = 2;
    let quad = checked_quad(field.grid(), quad)?;
    let layout = full_layout(field.grid(), &quad, quad.h_min, quad.h_max);
    quasinorm_on(field, &params, Kernel::Midpoint, &layout)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{sample_family, TestFunctionSpec};
    use crate::difference::difference_multiplier;
    use crate::field::{dyadic_dilate, GridSpec};
    use num_complex::Complex64;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn grid1() -> GridSpec {
        GridSpec::new(1, 1024, 1.0).unwrap()
    }

    fn gaussian(grid: &GridSpec, sigma: f64) -> SampledField {
        sample_family(&TestFunctionSpec::Gaussian { sigma, center: None }, grid).unwrap()
    }

    fn params(s: f64, p: f64, q: f64, l: u32, scale: Scale) -> SpaceParams {
        SpaceParams::new(s, p, q, l, scale)
    }

    fn quad(grid: &GridSpec) -> QuadratureSpec {
        QuadratureSpec::for_grid(grid)
    }

    #[test]
    fn constants_vanish() {
        let g = grid1();
        let c = SampledField::from_fn(g, |_| Complex64::new(2.5, 0.0));
        let pr = params(0.5, 2.0, 2.0, 1, Scale::F);
        assert_eq!(difference_quasinorm_F(&c, &pr, &quad(&g)).unwrap().value, 0.0);
        assert_eq!(difference_quasinorm_B(&c, &pr, &quad(&g)).unwrap().value, 0.0);
        assert_eq!(axis_quasinorm(&c, &pr, 1, &quad(&g)).unwrap().value, 0.0);
        assert!(gagliardo_seminorm(&c, 0.5, 2.0, 2.0, &quad(&g)).unwrap().value < 1e-13);
    }

    /// Brute-force double sum over all grid pairs with the minimal-image
    /// distance restricted to `[h_min, h_max]`, for `p = q = 2`.
    fn gagliardo_oracle(f: &[f64], grid: &GridSpec, s: f64, lo: f64, hi: f64) -> f64 {
        let n = f.len();
        let dx = grid.spacing();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                let d = (i as i64 - j as i64).rem_euclid(n as i64).min((j as i64 - i as i64).rem_euclid(n as i64));
                let r = d as f64 * dx;
                if r < lo || r > hi {
                    continue;
                }
                // Cells at the range ends count half, as in the trapezoid rule.
                let w = if (r - lo).abs() < 1e-12 || (r - hi).abs() < 1e-12 { 0.5 } else { 1.0 };
                acc += w * (f[i] - f[j]).powi(2) / r.powf(1.0 + 2.0 * s) * dx * dx;
            }
        }
        acc.sqrt()
    }

    #[test]
    fn gagliardo_matches_double_sum() {
        let g = GridSpec::new(1, 512, 1.0).unwrap();
        let f = gaussian(&g, 1.0 / 32.0);
        let vals: Vec<f64> = f.samples().iter().map(|c| c.re).collect();
        let q = QuadratureSpec { radial_nodes_per_octave: 32, ..quad(&g) };
        let num = difference_quasinorm_F(&f, &params(0.5, 2.0, 2.0, 1, Scale::F), &q).unwrap().value;
        let oracle = gagliardo_oracle(&vals, &g, 0.5, q.h_min, q.h_max);
        assert!((num / oracle - 1.0).abs() < 0.02, "{num} vs {oracle}");
    }

    #[test]
    fn gagliardo_equals_first_difference() {
        for g in [grid1(), GridSpec::new(2, 32, 1.0).unwrap()] {
            let f = gaussian(&g, (4.0 * g.spacing()).max(1.0 / 64.0));
            for (s, p, q) in [(0.5, 2.0, 2.0), (0.3, 1.0, 3.0), (0.8, 3.0, 1.5)] {
                let a = gagliardo_seminorm(&f, s, p, q, &quad(&g)).unwrap();
                let b = difference_quasinorm_F(&f, &params(s, p, q, 1, Scale::F), &quad(&g)).unwrap();
                assert!((a.value - b.value).abs() <= 1e-10 * b.value, "{} vs {}", a.value, b.value);
            }
        }
    }

    #[test]
    fn b_equals_f_when_p_equals_q() {
        let g = grid1();
        let f = gaussian(&g, 1.0 / 64.0);
        for (s, p, l) in [(0.5, 2.0, 1), (1.2, 1.0, 2), (0.4, 3.0, 1)] {
            let a = difference_quasinorm_F(&f, &params(s, p, p, l, Scale::F), &quad(&g)).unwrap();
            let b = difference_quasinorm_B(&f, &params(s, p, p, l, Scale::B), &quad(&g)).unwrap();
            assert!((a.value / b.value - 1.0).abs() < 0.02, "{} vs {}", a.value, b.value);
        }
    }

    #[test]
    fn dilation_law() {
        let g = grid1();
        let f = gaussian(&g, 1.0 / 64.0);
        let f2 = dyadic_dilate(&f, 1).unwrap();
        let (s, p) = (0.75, 2.0);
        for scale in [Scale::F, Scale::B] {
            let pr = params(s, p, 2.0, 1, scale);
            let a = difference_quasinorm(&f, &pr, &quad(&g)).unwrap().value;
            let b = difference_quasinorm(&f2, &pr, &quad(&g)).unwrap().value;
            // 2^{s - n/p} times the period-cell factor 2^{n/p} of the torus.
            let expect = 2f64.powf(s);
            assert!((b / a / expect - 1.0).abs() < 0.05, "{scale}: {}", b / a);
            let c = axis_quasinorm(&f2, &pr, 1, &quad(&g)).unwrap().value / axis_quasinorm(&f, &pr, 1, &quad(&g)).unwrap().value;
            assert!((c / expect - 1.0).abs() < 0.05);
        }
    }

    #[test]
    fn axis_matches_full_line_in_one_dimension() {
        let g = grid1();
        let f = gaussian(&g, 1.0 / 64.0);
        for q in [1.0, 2.0, 4.0] {
            let pr = params(0.5, q, q, 1, Scale::F);
            let a = axis_quasinorm(&f, &pr, 1, &quad(&g)).unwrap().value;
            let d = difference_quasinorm_F(&f, &pr, &quad(&g)).unwrap().value;
            assert!((d / (a * 2f64.powf(1.0 / q)) - 1.0).abs() < 0.02, "q={q}");
        }
    }

    #[test]
    fn axis_ignores_constant_directions() {
        let g = GridSpec::new(2, 32, 1.0).unwrap();
        let f = SampledField::from_fn(g, |x| Complex64::new((2.0 * PI * 3.0 * x[0]).sin(), 0.0));
        let pr = params(0.5, 2.0, 2.0, 1, Scale::F);
        assert!(axis_quasinorm(&f, &pr, 2, &quad(&g)).unwrap().value < 1e-12);
        assert!(axis_quasinorm(&f, &pr, 1, &quad(&g)).unwrap().value > 0.1);
        assert_eq!(axis_quasinorm(&f, &pr, 3, &quad(&g)).unwrap_err(), LpError::InvalidAxis { axis: 3, dim: 2 });
    }

    #[test]
    fn per_scale_and_flags() {
        let g = grid1();
        let f = gaussian(&g, 1.0 / 64.0);
        for (p, q, scale) in [(2.0, 2.0, Scale::F), (1.0, 3.0, Scale::F), (2.0, f64::INFINITY, Scale::F), (2.0, 0.7, Scale::B), (1.5, f64::INFINITY, Scale::B)] {
            let r = difference_quasinorm(&f, &params(0.5, p, q, 1, scale), &quad(&g)).unwrap();
            assert!(r.per_scale.iter().all(|t| t.contribution >= 0.0));
            assert!((r.reaggregate() - r.value).abs() <= 1e-10 * r.value, "{p} {q} {scale}");
            assert_ne!(r.flag, Flag::Divergent);
        }
        let r = difference_quasinorm_F(&f, &params(2.0, 2.0, 2.0, 1, Scale::F), &quad(&g)).unwrap();
        assert_eq!(r.flag, Flag::Divergent);
        assert!(r.truncation_report.low_tail.is_infinite());
    }

    #[test]
    fn midpoint_form_is_half_step_second_difference() {
        let xi = [3.0, 0.0, 0.0];
        let h = [0.1, 0.0, 0.0];
        let direct = {
            let e = |t: f64| Complex64::new(0.0, 2.0 * PI * t * xi[0]).exp();
            1.0 + e(h[0]) - 2.0 * e(h[0] / 2.0)
        };
        let half = [h[0] / 2.0, 0.0, 0.0];
        assert!((difference_multiplier(&half, 2, &xi) - direct).norm() < 1e-14);
        let g = grid1();
        let f = gaussian(&g, 1.0 / 64.0);
        let m = midpoint_seminorm(&f, 1.5, 2.0, 2.0, &quad(&g)).unwrap();
        assert!(m.value > 0.0 && m.flag != Flag::Divergent);
    }

    #[test]
    fn coarse_quadrature_rejected() {
        let g = grid1();
        let f = gaussian(&g, 1.0 / 64.0);
        let bad = QuadratureSpec { h_min: g.spacing() / 2.0, ..quad(&g) };
        assert!(matches!(
            difference_quasinorm_F(&f, &params(0.5, 2.0, 2.0, 1, Scale::F), &bad),
            Err(LpError::QuadratureTooCoarse(_))
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(8))]

        #[test]
        fn homogeneity_and_translation(
            alpha in -4.0f64..4.0, shift in 0.0f64..1.0, cells in 0i64..1024, s in 0.1f64..0.9, p in 0.8f64..3.0,
            b in proptest::bool::ANY,
        ) {
            let g = GridSpec::new(1, 256, 1.0).unwrap();
            let f = gaussian(&g, 1.0 / 24.0);
            let scale = if b { Scale::B } else { Scale::F };
            let q = quad(&g);
            let v = |f: &SampledField, pp: f64| difference_quasinorm(f, &params(s, pp, 2.0, 1, scale), &q).unwrap().value;
            let base = v(&f, p);
            prop_assert!((v(&f.scale(Complex64::new(alpha, 0.0)), p) - alpha.abs() * base).abs() <= 1e-10 * base);
            let aligned = translate(&f, &[cells as f64 * g.spacing()]);
            prop_assert!((v(&aligned, p) - base).abs() <= 1e-12 * base);
            // Off-grid shifts: exact for p = 2, where every sum over x is a
            // Parseval identity.
            let base2 = v(&f, 2.0);
            prop_assert!((v(&translate(&f, &[shift]), 2.0) - base2).abs() <= 1e-8 * base2);
        }
    }
}
