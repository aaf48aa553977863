//! Node sets for the scale-invariant measures `dh/|h|^n` and `dt/t`, for
//! sphere and annulus means, and for the `tau` suprema of the maximal
//! characterizations.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{LpError, Result};
use crate::field::GridSpec;

/// Discretization knobs for every quadrature in the crate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureSpec {
    /// Smallest step length (defaults to the grid spacing).
    pub h_min: f64,
    /// Largest step length (defaults to `B/4`).
    pub h_max: f64,
    pub radial_nodes_per_octave: usize,
    /// Directions on the unit sphere: uniform angles in 2-D, a Fibonacci
    /// lattice in 3-D. Ignored in 1-D, where the directions are `+1, -1`.
    pub sphere_nodes: usize,
    pub t_nodes_per_octave: usize,
    /// Radial nodes of the annulus `1 <= |z| < 2`.
    pub annulus_radial_nodes: usize,
    pub tau_nodes_per_octave: usize,
    pub tau_octaves: usize,
    /// Radial density of the `|h| < 2` grid below `|h| = 1`.
    pub d_nodes_per_octave: usize,
    /// Maximal characterizations continue this many scales `2^{-k}` past the
    /// finest band, where their terms decay like `2^{-k(L-s)}`.
    pub maximal_fine_octaves: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            h_min: 0.0,
            h_max: 0.0,
            radial_nodes_per_octave: 8,
            sphere_nodes: 0,
            t_nodes_per_octave: 8,
            annulus_radial_nodes: 8,
            tau_nodes_per_octave: 16,
            tau_octaves: 5,
            d_nodes_per_octave: 4,
            maximal_fine_octaves: 6,
        }
    }
}

impl QuadratureSpec {
    /// Defaults for `grid`: `[spacing, B/4]`, 64 directions in 2-D and 256 in 3-D.
    pub fn for_grid(grid: &GridSpec) -> Self {
        Self::default().resolved(grid)
    }

    /// Fills zero fields (unset in a config) with the grid defaults.
    pub fn resolved(mut self, grid: &GridSpec) -> Self {
        if self.h_min == 0.0 {
            self.h_min = grid.spacing();
        }
        if self.h_max == 0.0 {
            self.h_max = grid.box_length() / 4.0;
        }
        if self.sphere_nodes == 0 {
            self.sphere_nodes = match grid.dim() {
                1 => 2,
                2 => 64,
                _ => 256,
            };
        }
        self
    }

    pub fn validate(&self, grid: &GridSpec) -> Result<()> {
        let slack = 1e-12;
        let coarse = |m: String| Err(LpError::QuadratureTooCoarse(m));
        if !(self.h_min >= grid.spacing() * (1.0 - slack) && self.h_min < self.h_max) {
            return coarse(format!("h_min {} must lie in [spacing, h_max)", self.h_min));
        }
        if self.h_max > grid.box_length() / 4.0 * (1.0 + slack) {
            return coarse(format!("h_max {} exceeds B/4", self.h_max));
        }
        if self.radial_nodes_per_octave < 2 || self.t_nodes_per_octave < 2 {
            return coarse("need at least 2 radial nodes per octave".into());
        }
        if grid.dim() >= 2 && self.sphere_nodes < 8 {
            return coarse(format!("{} sphere nodes cannot resolve directions", self.sphere_nodes));
        }
        if self.annulus_radial_nodes < 2 || self.tau_nodes_per_octave < 2 || self.tau_octaves < 1 {
            return coarse("annulus and tau ladders need at least 2 nodes".into());
        }
        if self.d_nodes_per_octave < 1 {
            return coarse("d_nodes_per_octave must be positive".into());
        }
        Ok(())
    }
}

/// A point on the unit sphere with its share of the sphere measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    pub unit: [f64; 3],
    /// Weights sum to `|S^{n-1}|` (2 when n = 1).
    pub weight: f64,
}

pub fn sphere_directions(dim: usize, count: usize) -> Vec<Direction> {
    match dim {
        1 => vec![
            Direction { unit: [1.0, 0.0, 0.0], weight: 1.0 },
            Direction { unit: [-1.0, 0.0, 0.0], weight: 1.0 },
        ],
        2 => (0..count)
            .map(|m| {
                let th = 2.0 * PI * m as f64 / count as f64;
                Direction { unit: [th.cos(), th.sin(), 0.0], weight: 2.0 * PI / count as f64 }
            })
            .collect(),
        _ => {
            let golden = PI * (3.0 - 5f64.sqrt());
            (0..count)
                .map(|m| {
                    let z = 1.0 - (2.0 * m as f64 + 1.0) / count as f64;
                    let rho = (1.0 - z * z).sqrt();
                    let th = golden * m as f64;
                    Direction { unit: [rho * th.cos(), rho * th.sin(), z], weight: 4.0 * PI / count as f64 }
                })
                .collect()
        }
    }
}

/// Log-spaced radii `h_min .. h_max` with trapezoid weights for `d rho / rho`.
pub fn log_radii(lo: f64, hi: f64, per_octave: usize) -> Vec<(f64, f64)> {
    let octaves = (hi / lo).log2();
    let intervals = ((octaves * per_octave as f64).ceil() as usize).max(1);
    let step = (hi / lo).ln() / intervals as f64;
    (0..=intervals)
        .map(|i| {
            let r = if i == intervals { hi } else { lo * (step * i as f64).exp() };
            let w = if i == 0 || i == intervals { step / 2.0 } else { step };
            (r, w)
        })
        .collect()
}

/// Dyadic shell index `k` with `2^{-k} <= rho < 2^{1-k}`.
pub fn shell_index(rho: f64) -> i32 {
    let v = -rho.log2();
    let r = v.round();
    if (v - r).abs() < 1e-12 {
        r as i32
    } else {
        v.ceil() as i32
    }
}

/// One node of the polar grid for `dh/|h|^n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarNode {
    pub h: [f64; 3],
    pub radius: f64,
    pub weight: f64,
    pub shell: i32,
}

/// Radial rings of the polar grid. Each ring shares its radius and radial weight.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarGrid {
    pub radii: Vec<(f64, f64)>,
    pub directions: Vec<Direction>,
}

impl PolarGrid {
    pub fn new(grid: &GridSpec, quad: &QuadratureSpec) -> Result<Self> {
        quad.validate(grid)?;
        Ok(Self::between(grid, quad, quad.h_min, quad.h_max))
    }

    /// Same directions and density on an arbitrary radial range.
    pub fn between(grid: &GridSpec, quad: &QuadratureSpec, lo: f64, hi: f64) -> Self {
        Self {
            radii: log_radii(lo, hi, quad.radial_nodes_per_octave),
            directions: sphere_directions(grid.dim(), quad.sphere_nodes),
        }
    }

    pub fn nodes(&self) -> Vec<PolarNode> {
        let mut out = Vec::with_capacity(self.radii.len() * self.directions.len());
        for &(r, wr) in &self.radii {
            for d in &self.directions {
                out.push(PolarNode {
                    h: [r * d.unit[0], r * d.unit[1], r * d.unit[2]],
                    radius: r,
                    weight: wr * d.weight,
                    shell: shell_index(r),
                });
            }
        }
        out
    }
}

/// Nodes `z` of the annulus `1 <= |z| < 2` with weights summing to 1, so
/// that a weighted sum is the mean value integral over the annulus.
pub fn annulus_nodes(dim: usize, radial: usize, sphere_nodes: usize) -> Vec<([f64; 3], f64)> {
    let dirs = sphere_directions(dim, sphere_nodes);
    // Midpoint rule in log rho; dz = rho^n d(log rho) d sigma.
    // Exponents (2i+1)/(2 radial) are exact in binary for power-of-two counts,
    // so these radii coincide bit for bit with the matching tau nodes.
    let radii: Vec<f64> = (0..radial).map(|i| 2f64.powf((2.0 * i as f64 + 1.0) / (2.0 * radial as f64))).collect();
    let mass: f64 = radii.iter().map(|r| r.powi(dim as i32)).sum::<f64>() * dirs.iter().map(|d| d.weight).sum::<f64>();
    let mut out = Vec::with_capacity(radial * dirs.len());
    for r in &radii {
        for d in &dirs {
            let z = [r * d.unit[0], r * d.unit[1], r * d.unit[2]];
            out.push((z, r.powi(dim as i32) * d.weight / mass));
        }
    }
    out
}

/// `tau_i = 2^{1 - (i+1)/per_octave}` for `i < per_octave * octaves`: a
/// ladder inside `(0, 2)` that contains `tau = 1`.
pub fn tau_nodes(per_octave: usize, octaves: usize) -> Vec<f64> {
    (0..per_octave * octaves)
        .map(|i| 2f64.powf((per_octave as f64 - i as f64 - 1.0) / per_octave as f64))
        .collect()
}

/// Radii of the `0 < |h| < 2` grid used by the pointwise-difference maximal
/// characterization: the full `tau` ladder on `[1, 2)` (which holds every
/// annulus radius when the annulus count divides the `tau` density) and a
/// coarser ladder below.
pub fn d_radii(quad: &QuadratureSpec) -> Vec<f64> {
    let taus = tau_nodes(quad.tau_nodes_per_octave, quad.tau_octaves);
    let mut radii: Vec<f64> = taus.iter().copied().filter(|&t| t >= 1.0).collect();
    let lowest = taus.last().copied().unwrap_or(1.0);
    let mut r = 1.0;
    loop {
        r *= 2f64.powf(-1.0 / quad.d_nodes_per_octave as f64);
        if r < lowest * (1.0 - 1e-12) {
            break;
        }
        radii.push(r);
    }
    radii
}
