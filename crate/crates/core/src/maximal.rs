//! Maximal functions: Hardy-Littlewood, Peetre-Fefferman-Stein, and the
//! difference-mean maximal functions `S^L_t`, `V^L_t`, `D^L_h`.
//!
//! Suprema over `y` run over every grid offset with the minimal-image
//! distance, which is a lower bound for the continuum supremum.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::difference::{pad3, spectral_difference};
use crate::error::{LpError, Result};
use crate::field::{dft_forward, dft_inverse, dot3, norm3, GridSpec, SampledField, SpectralField};
use crate::quadrature::{annulus_nodes, sphere_directions, QuadratureSpec};

/// Relative slack used when testing whether an offset lies inside a ball.
const BALL_SLACK: f64 = 1e-12;

/// Coefficients this far below the largest one are skipped when evaluating
/// node-averaged multipliers.
const NEGLIGIBLE_COEFF: f64 = 1e-15;

fn from_values(grid: &GridSpec, values: Vec<f64>) -> SampledField {
    SampledField::from_parts(*grid, values.into_iter().map(|v| Complex64::new(v, 0.0)).collect())
}

/// Exact `sup_y values(x - y) * weight(|y|)` over all grid offsets `y`.
///
/// `weight` must be nonincreasing in `|y|` with `weight(0) <= 1`. Sources are
/// grouped in blocks; a block is skipped once its largest value times the
/// weight at its nearest possible distance cannot beat the running maximum.
pub fn weighted_sup<W: Fn(f64) -> f64 + Sync>(values: &[f64], grid: &GridSpec, weight: W) -> Vec<f64> {
    let dim = grid.dim();
    let n = grid.points_per_axis();
    let nb = n.min(match dim {
        1 => 64,
        2 => 16,
        _ => 8,
    });
    let b = n / nb;
    let h = grid.spacing();
    let table: Vec<f64> = (0..grid.len()).map(|i| weight(grid.offset_length(i))).collect();

    let nblocks = nb.pow(dim as u32);
    let block_of = |multi: &[usize; 3]| (0..dim).fold(0, |acc, a| acc * nb + multi[a] / b);
    let block_coords = |k: usize| {
        let mut c = [0usize; 3];
        let mut r = k;
        for a in (0..dim).rev() {
            c[a] = r % nb;
            r /= nb;
        }
        c
    };
    let multis: Vec<[usize; 3]> = (0..grid.len()).map(|i| grid.unravel(i)).collect();
    let mut members: Vec<Vec<usize>> = vec![Vec::with_capacity(b.pow(dim as u32)); nblocks];
    let mut bmax = vec![0.0f64; nblocks];
    for (i, m) in multis.iter().enumerate() {
        let k = block_of(m);
        members[k].push(i);
        bmax[k] = bmax[k].max(values[i]);
    }
    // Minimal cell gap between two blocks along one axis, by block offset.
    let gap: Vec<f64> = (0..nb)
        .map(|d| {
            if d == 0 {
                0.0
            } else {
                let fwd = d * b - (b - 1);
                let bwd = (nb - d) * b - (b - 1);
                fwd.min(bwd) as f64 * h
            }
        })
        .collect();

    let per_block: Vec<Vec<(usize, f64)>> = (0..nblocks)
        .into_par_iter()
        .map(|tb| {
            let tc = block_coords(tb);
            let mut order: Vec<(f64, usize)> = (0..nblocks)
                .map(|sb| {
                    let sc = block_coords(sb);
                    let mut d2 = 0.0;
                    for a in 0..dim {
                        let g = gap[(sc[a] + nb - tc[a]) % nb];
                        d2 += g * g;
                    }
                    (bmax[sb] * weight(d2.sqrt()), sb)
                })
                .collect();
            order.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)));
            members[tb]
                .iter()
                .map(|&x| {
                    let mx = &multis[x];
                    let mut best = values[x] * table[0];
                    for &(bound, sb) in &order {
                        if bound <= best {
                            break;
                        }
                        for &s in &members[sb] {
                            let ms = &multis[s];
                            let mut off = [0usize; 3];
                            for a in 0..dim {
                                off[a] = (mx[a] + n - ms[a]) % n;
                            }
                            let cand = values[s] * table[grid.ravel(&off)];
                            if cand > best {
                                best = cand;
                            }
                        }
                    }
                    (x, best)
                })
                .collect()
        })
        .collect();
    let mut out = vec![0.0; grid.len()];
    for block in per_block {
        for (x, v) in block {
            out[x] = v;
        }
    }
    out
}

/// Radii of the Hardy-Littlewood ladder: 0 and `spacing * 2^i <= B/2`.
pub fn hl_radii(grid: &GridSpec) -> Vec<f64> {
    let mut out = vec![0.0];
    let mut r = grid.spacing();
    while r <= grid.box_length() / 2.0 * (1.0 + BALL_SLACK) {
        out.push(r);
        r *= 2.0;
    }
    out
}

/// Mean of `values` over the discrete ball of radius `radius` around every point.
pub fn ball_mean(values: &[f64], grid: &GridSpec, radius: f64) -> Vec<f64> {
    let inside: Vec<bool> =
        (0..grid.len()).map(|i| grid.offset_length(i) <= radius * (1.0 + BALL_SLACK)).collect();
    let count = inside.iter().filter(|&&b| b).count() as f64;
    let kernel = from_values(grid, inside.iter().map(|&b| if b { 1.0 / count } else { 0.0 }).collect());
    let f = from_values(grid, values.to_vec());
    let kf = dft_forward(&kernel);
    let ff = dft_forward(&f);
    let scale = Complex64::new(grid.len() as f64, 0.0);
    let prod: Vec<Complex64> = ff.coeffs().iter().zip(kf.coeffs()).map(|(a, b)| a * b * scale).collect();
    let conv = dft_inverse(&SpectralField::new(prod, *grid).expect("matching lengths"));
    conv.samples().iter().map(|z| z.re).collect()
}

/// Hardy-Littlewood maximal function of `|f|` over the dyadic ball ladder.
pub fn hardy_littlewood_max(field: &SampledField) -> SampledField {
    let grid = field.grid();
    let moduli = field.moduli();
    let mut out = moduli.clone();
    for r in hl_radii(grid).into_iter().skip(1) {
        for (o, m) in out.iter_mut().zip(ball_mean(&moduli, grid, r)) {
            *o = o.max(m);
        }
    }
    from_values(grid, out)
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(LpError::InvalidParams(format!("{name} = {v} must be positive")));
    }
    Ok(())
}

/// `sup_z |f(x - z)| (1 + t|z|)^{-n/r}`.
pub fn peetre_max(field: &SampledField, t: f64, r: f64) -> Result<SampledField> {
    check_positive("t", t)?;
    check_positive("r", r)?;
    let grid = field.grid();
    let e = grid.dim() as f64 / r;
    let vals = weighted_sup(&field.moduli(), grid, |rho| (1.0 + t * rho).powf(-e));
    Ok(from_values(grid, vals))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum MaximalVariant {
    Hl,
    Peetre,
    SphereS,
    BallV,
    PointD,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaximalSpec {
    pub variant: MaximalVariant,
    #[serde(default = "unit")]
    pub t: f64,
    #[serde(default)]
    pub h: Vec<f64>,
    #[serde(default = "unit_order")]
    pub order: u32,
    #[serde(default = "unit")]
    pub r: f64,
}

fn unit() -> f64 {
    1.0
}

fn unit_order() -> u32 {
    1
}

/// Weight `(1 + |y|/t)^{-n/r}` of Definition-5 type maximal functions.
pub(crate) fn scale_weight(dim: usize, t: f64, r: f64) -> impl Fn(f64) -> f64 + Sync {
    let e = dim as f64 / r;
    move |rho: f64| (1.0 + rho / t).powf(-e)
}

/// `sum_nodes w (e^{2 pi i t z.xi} - 1)^L` at every coefficient, skipping
/// coefficients that are negligible in `spec`.
pub(crate) fn node_mean_multiplier(spec: &SpectralField, nodes: &[([f64; 3], f64)], t: f64, order: u32) -> Vec<Complex64> {
    let grid = spec.grid();
    let cut = NEGLIGIBLE_COEFF * spec.max_abs();
    spec.coeffs()
        .iter()
        .enumerate()
        .map(|(i, c)| {
            if c.norm() <= cut {
                return Complex64::new(0.0, 0.0);
            }
            let xi = grid.wavevector(i);
            let mut acc = Complex64::new(0.0, 0.0);
            for (z, w) in nodes {
                let a = 2.0 * PI * t * dot3(z, &xi);
                acc += Complex64::new(a.cos() - 1.0, a.sin()).powu(order) * w;
            }
            acc
        })
        .collect()
}

pub(crate) fn sphere_nodes(dim: usize, count: usize) -> Vec<([f64; 3], f64)> {
    let dirs = sphere_directions(dim, count);
    let total: f64 = dirs.iter().map(|d| d.weight).sum();
    dirs.iter().map(|d| (d.unit, d.weight / total)).collect()
}

/// `|mean_nodes Delta^L_{tz} f|` as grid values.
pub(crate) fn node_mean_modulus(spec: &SpectralField, nodes: &[([f64; 3], f64)], t: f64, order: u32) -> Vec<f64> {
    let m = node_mean_multiplier(spec, nodes, t, order);
    dft_inverse(&spec.multiply_values(&m)).moduli()
}

fn check_spec(grid: &GridSpec, spec: &MaximalSpec, quad: &QuadratureSpec) -> Result<()> {
    check_positive("r", spec.r)?;
    if spec.order == 0 {
        return Err(LpError::InvalidDifference("order L must be at least 1".into()));
    }
    match spec.variant {
        MaximalVariant::SphereS | MaximalVariant::BallV => check_positive("t", spec.t)?,
        _ => {}
    }
    if spec.variant == MaximalVariant::SphereS && grid.dim() < 2 {
        return Err(LpError::DimensionTooLow { dim: grid.dim(), required: 2 });
    }
    if grid.dim() >= 2 && quad.sphere_nodes < 8 {
        return Err(LpError::QuadratureTooCoarse(format!("{} sphere nodes", quad.sphere_nodes)));
    }
    if spec.variant == MaximalVariant::BallV && quad.annulus_radial_nodes < 2 {
        return Err(LpError::QuadratureTooCoarse("annulus needs at least 2 radial nodes".into()));
    }
    Ok(())
}

/// `S^L_t f`, `V^L_t f` or `D^L_h f`, with differences computed spectrally.
pub fn mean_difference_max(field: &SampledField, spec: &MaximalSpec, quad: &QuadratureSpec) -> Result<SampledField> {
    let grid = field.grid();
    let quad = quad.clone().resolved(grid);
    check_spec(grid, spec, &quad)?;
    let dim = grid.dim();
    let transformed = dft_forward(field);
    let vals = match spec.variant {
        MaximalVariant::SphereS => {
            let nodes = sphere_nodes(dim, quad.sphere_nodes);
            let g = node_mean_modulus(&transformed, &nodes, spec.t, spec.order);
            weighted_sup(&g, grid, scale_weight(dim, spec.t, spec.r))
        }
        MaximalVariant::BallV => {
            let nodes = annulus_nodes(dim, quad.annulus_radial_nodes, quad.sphere_nodes);
            let g = node_mean_modulus(&transformed, &nodes, spec.t, spec.order);
            weighted_sup(&g, grid, scale_weight(dim, spec.t, spec.r))
        }
        MaximalVariant::PointD => {
            let h = pad3(&spec.h);
            let len = norm3(&h);
            check_positive("|h|", len)?;
            let g = spectral_difference(&transformed, &h, spec.order, false).moduli();
            weighted_sup(&g, grid, scale_weight(dim, len, spec.r))
        }
        MaximalVariant::Hl | MaximalVariant::Peetre => {
            return Err(LpError::InvalidParams("HL and PEETRE are not difference-mean variants".into()))
        }
    };
    Ok(from_values(grid, vals))
}

/// Dispatches every variant, including `HL` and `PEETRE`.
pub fn maximal_field(field: &SampledField, spec: &MaximalSpec, quad: &QuadratureSpec) -> Result<SampledField> {
    match spec.variant {
        MaximalVariant::Hl => Ok(hardy_littlewood_max(field)),
        MaximalVariant::Peetre => peetre_max(field, spec.t, spec.r),
        _ => mean_difference_max(field, spec, quad),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::difference::{iterated_difference, DifferenceMethod, DifferenceSpec};
    use proptest::prelude::*;

    fn brute_sup(values: &[f64], grid: &GridSpec, w: impl Fn(f64) -> f64) -> Vec<f64> {
        let n = grid.points_per_axis();
        (0..grid.len())
            .map(|x| {
                let mx = grid.unravel(x);
                (0..grid.len())
                    .map(|s| {
                        let ms = grid.unravel(s);
                        let mut off = [0usize; 3];
                        for a in 0..grid.dim() {
                            off[a] = (mx[a] + n - ms[a]) % n;
                        }
                        values[s] * w(grid.offset_length(grid.ravel(&off)))
                    })
                    .fold(0.0, f64::max)
            })
            .collect()
    }

    fn bumpy(grid: GridSpec) -> SampledField {
        SampledField::from_fn(grid, |x| {
            let v = (2.0 * PI * 3.0 * x[0]).sin() * (-(x[0] - 0.3).powi(2) * 40.0).exp()
                + x.get(1).map_or(0.0, |y| 0.5 * (2.0 * PI * 2.0 * y).cos());
            Complex64::new(v, 0.0)
        })
    }

    #[test]
    fn pruned_sup_matches_brute_force() {
        for grid in [GridSpec::new(1, 256, 1.0).unwrap(), GridSpec::new(2, 32, 1.0).unwrap()] {
            let f = bumpy(grid);
            let w = |rho: f64| (1.0 + 9.0 * rho).powf(-1.3);
            let fast = weighted_sup(&f.moduli(), &grid, w);
            let slow = brute_sup(&f.moduli(), &grid, w);
            assert_eq!(fast, slow);
        }
    }

    #[test]
    fn constants_are_fixed_points() {
        let g = GridSpec::new(2, 16, 1.0).unwrap();
        let c = SampledField::from_real(&[1.5; 256], g).unwrap();
        let m = hardy_littlewood_max(&c);
        assert!(m.samples().iter().all(|z| (z.re - 1.5).abs() < 1e-12));
        let p = peetre_max(&c, 4.0, 1.0).unwrap();
        assert!(p.samples().iter().all(|z| z.re == 1.5));
    }

    #[test]
    fn constants_have_zero_difference_maxima() {
        let g = GridSpec::new(2, 16, 1.0).unwrap();
        let c = SampledField::from_real(&[2.0; 256], g).unwrap();
        let q = QuadratureSpec::for_grid(&g);
        for variant in [MaximalVariant::SphereS, MaximalVariant::BallV, MaximalVariant::PointD] {
            let spec = MaximalSpec { variant, t: 0.1, h: vec![0.1, 0.05], order: 2, r: 1.0 };
            assert!(mean_difference_max(&c, &spec, &q).unwrap().max_abs() < 1e-12);
        }
    }

    #[test]
    fn hl_of_half_indicator() {
        let g = GridSpec::new(1, 256, 1.0).unwrap();
        let ind = SampledField::from_fn(g, |x| Complex64::new(if x[0] < 0.5 { 1.0 } else { 0.0 }, 0.0));
        let m = hardy_littlewood_max(&ind);
        // Brute force over all symmetric windows around x = 3/4 (index 192).
        let vals = ind.moduli();
        let oracle = (0..=128usize)
            .map(|k| {
                let sum: f64 = (0..=2 * k).map(|d| vals[(192 + 256 - k + d) % 256]).sum();
                sum / (2 * k + 1).min(256) as f64
            })
            .fold(0.0, f64::max);
        assert!((m.samples()[192].re - 0.5).abs() <= 0.05);
        assert!(m.samples()[192].re <= oracle + 1e-12);
    }

    #[test]
    fn sphere_s_rejected_in_one_dimension() {
        let g = GridSpec::new(1, 64, 1.0).unwrap();
        let spec = MaximalSpec { variant: MaximalVariant::SphereS, t: 0.1, h: vec![], order: 1, r: 1.0 };
        let r = mean_difference_max(&SampledField::zeros(g), &spec, &QuadratureSpec::for_grid(&g));
        assert_eq!(r, Err(LpError::DimensionTooLow { dim: 1, required: 2 }));
    }

    #[test]
    fn point_d_dominates_its_y_zero_term() {
        let g = GridSpec::new(2, 32, 1.0).unwrap();
        let f = bumpy(g);
        let h = vec![3.0 / 32.0, 1.0 / 32.0];
        let spec = MaximalSpec { variant: MaximalVariant::PointD, t: 1.0, h: h.clone(), order: 2, r: 1.5 };
        let d = mean_difference_max(&f, &spec, &QuadratureSpec::for_grid(&g)).unwrap();
        let base = iterated_difference(&f, &DifferenceSpec::new(2, h, DifferenceMethod::Spectral).unwrap()).unwrap();
        for (a, b) in d.samples().iter().zip(base.samples()) {
            assert!(a.re >= b.norm());
        }
    }

    #[test]
    fn sphere_mean_of_plane_wave_matches_angular_quadrature() {
        let g = GridSpec::new(2, 32, 1.0).unwrap();
        let k = [3.0, -2.0];
        let f = SampledField::from_fn(g, |x| Complex64::from_polar(1.0, 2.0 * PI * (k[0] * x[0] + k[1] * x[1])));
        let t = 0.0731;
        let order = 2;
        let nodes = sphere_nodes(2, 64);
        let spec = dft_forward(&f);
        let m = node_mean_multiplier(&spec, &nodes, t, order);
        let mean = dft_inverse(&spec.multiply_values(&m));
        // Direct quadrature: average the physical differences over 64 angles.
        let mut direct = SampledField::zeros(g);
        for (z, w) in &nodes {
            let d = iterated_difference(
                &f,
                &DifferenceSpec::new(order, vec![t * z[0], t * z[1]], DifferenceMethod::Spectral).unwrap(),
            )
            .unwrap();
            direct = direct.add(&d.scale(Complex64::new(*w, 0.0))).unwrap();
        }
        let factor: Complex64 = nodes
            .iter()
            .map(|(z, w)| {
                let a = 2.0 * PI * t * (z[0] * k[0] + z[1] * k[1]);
                Complex64::new(a.cos() - 1.0, a.sin()).powu(order) * w
            })
            .sum();
        let predicted = f.scale(factor);
        assert!(mean.relative_max_diff(&direct) < 1e-8);
        assert!(mean.relative_max_diff(&predicted) < 1e-8);
    }

    #[test]
    fn remark_two_chain() {
        let g = GridSpec::new(2, 32, 1.0).unwrap();
        let f = bumpy(g);
        let (t, r) = (6.0, 1.5);
        let p = peetre_max(&f, t, r).unwrap();
        let c = 2f64.powf(2.0 / r);
        let pv = p.moduli();
        let mut worst: f64 = 0.0;
        for x in 0..g.len() {
            let mx = g.unravel(x);
            for y in 0..g.len() {
                let my = g.unravel(y);
                let xy = g.ravel(&[(mx[0] + 32 - my[0]) % 32, (mx[1] + 32 - my[1]) % 32, 0]);
                let lhs = pv[x] * (1.0 + t * g.offset_length(y)).powf(-2.0 / r);
                worst = worst.max(lhs / pv[xy]);
            }
        }
        assert!(worst <= c, "measured constant {worst}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn maxima_dominate_modulus(seed in 0u64..500, t in 0.5f64..30.0, r in 0.3f64..4.0) {
            let g = GridSpec::new(1, 128, 1.0).unwrap();
            let f = SampledField::from_fn(g, |x| {
                Complex64::new((2.0 * PI * (seed % 9 + 1) as f64 * x[0]).sin() + 0.2 * (seed as f64 * x[0]).cos(), 0.0)
            });
            let m = hardy_littlewood_max(&f);
            let p = peetre_max(&f, t, r).unwrap();
            for ((a, b), c) in f.samples().iter().zip(m.samples()).zip(p.samples()) {
                prop_assert!(b.re >= a.norm());
                prop_assert!(c.re >= a.norm());
            }
        }

        #[test]
        fn hl_is_monotone(seed in 0u64..500) {
            let g = GridSpec::new(1, 64, 1.0).unwrap();
            let f = SampledField::from_fn(g, |x| Complex64::new((7.0 * x[0] + seed as f64).sin(), 0.0));
            let bigger = SampledField::from_fn(g, |x| {
                Complex64::new((7.0 * x[0] + seed as f64).sin().abs() + 0.1 + (3.0 * x[0]).cos().abs(), 0.0)
            });
            let a = hardy_littlewood_max(&f);
            let b = hardy_littlewood_max(&bigger);
            for (x, y) in a.samples().iter().zip(b.samples()) {
                prop_assert!(x.re <= y.re + 1e-12);
            }
        }
    }
}
