//! One function per command. Each turns a validated [`RunConfig`] into an
//! [`Outcome`]; nothing here writes to disk.

use std::fs::File;
use std::io::BufReader;

use lplab_core::corpus::{default_corpus, sample_family, CorpusEntry, TestFunctionSpec};
use lplab_core::difference::{iterated_difference, DifferenceMethod, DifferenceSpec};
use lplab_core::io::read_field;
use lplab_core::maximal::{maximal_field, MaximalSpec};
use lplab_core::quasinorm::{evaluate, format_extended, Characterization, Flag};
use lplab_core::verify::{
    divergence_probe, equivalence_experiment, kernel_decay_survey, ppn_probe, scaling_experiment, slice_support_check,
    DecayWindow, Verdict,
};
use lplab_core::{build_band_system, decompose, dyadic_dilate, lp_norm, GridSpec, LpError, Result, SampledField};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{Command, RunConfig};
use crate::report::{Outcome, Row, Status};

pub fn execute(cfg: &RunConfig) -> Result<Outcome> {
    match cfg.command {
        Command::Norm => norm(cfg),
        Command::Bands => bands(cfg),
        Command::Diff => diff(cfg),
        Command::Maximal => maximal(cfg),
        Command::Corpus => corpus(cfg),
        Command::Scaling => scaling(cfg),
        Command::Equivalence => equivalence(cfg),
        Command::Ppn => ppn(cfg),
        Command::KernelDecay => kernel_decay(cfg),
        Command::Divergence => divergence(cfg),
        Command::SliceSupport => slice_support(cfg),
    }
}

fn grid(cfg: &RunConfig) -> Result<GridSpec> {
    GridSpec::new(cfg.grid.dim, cfg.grid.n, cfg.grid.b)
}

fn entries(cfg: &RunConfig, grid: &GridSpec) -> Result<Vec<CorpusEntry>> {
    match &cfg.corpus {
        Some(specs) => Ok(specs.iter().enumerate().map(|(i, s)| CorpusEntry::labelled(i, s.clone())).collect()),
        None => default_corpus(grid),
    }
}

fn read_input(path: &std::path::Path) -> Result<SampledField> {
    let file = File::open(path).map_err(|e| LpError::FieldFormat(format!("{}: {e}", path.display())))?;
    read_field(BufReader::new(file))
}

/// The input file, or every corpus member.
fn fields(cfg: &RunConfig) -> Result<Vec<(String, SampledField)>> {
    if let Some(path) = &cfg.io.input {
        return Ok(vec![("input".into(), read_input(path)?)]);
    }
    let grid = grid(cfg)?;
    entries(cfg, &grid)?
        .into_par_iter()
        .map(|e| sample_family(&e.spec, &grid).map(|f| (e.id, f)))
        .collect()
}

/// The input file, else the first configured corpus member, else `fallback`.
fn single_field(cfg: &RunConfig, fallback: impl FnOnce(&GridSpec) -> TestFunctionSpec) -> Result<(String, SampledField)> {
    if let Some(path) = &cfg.io.input {
        return Ok(("input".into(), read_input(path)?));
    }
    let grid = grid(cfg)?;
    let entry = match cfg.corpus.as_ref().and_then(|c| c.first()) {
        Some(spec) => CorpusEntry::labelled(0, spec.clone()),
        None => CorpusEntry::labelled(0, fallback(&grid)),
    };
    Ok((entry.id, sample_family(&entry.spec, &grid)?))
}

fn gaussian(sigma_cells: f64) -> impl FnOnce(&GridSpec) -> TestFunctionSpec {
    move |g| TestFunctionSpec::Gaussian { sigma: (sigma_cells * g.spacing()).min(g.box_length() / 8.0), center: None }
}

fn worst(a: Flag, b: Flag) -> Flag {
    let rank = |f: Flag| match f {
        Flag::Ok => 0,
        Flag::TruncationWarn => 1,
        Flag::Divergent => 2,
    };
    if rank(b) > rank(a) {
        b
    } else {
        a
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

/// The configured step padded to the field dimension, or one cell along
/// the first axis.
fn step(cfg: &RunConfig, grid: &GridSpec) -> Vec<f64> {
    let mut h = if cfg.options.step.is_empty() { vec![grid.spacing()] } else { cfg.options.step.clone() };
    h.resize(grid.dim(), 0.0);
    h
}

/// Evaluates `job` for every field and characterization. Failures are
/// kept per item so that one unresolvable member does not hide the rest.
fn per_item<T: Send>(
    inputs: &[(String, SampledField)],
    chars: &[Characterization],
    job: impl Fn(&SampledField, Characterization) -> Result<T> + Sync,
) -> Vec<(String, Characterization, Result<T>)> {
    inputs
        .par_iter()
        .flat_map_iter(|(id, f)| chars.iter().map(|&c| (id.clone(), c, job(f, c))).collect::<Vec<_>>())
        .collect()
}

fn error_list<T>(items: &[(String, Characterization, Result<T>)]) -> Vec<Value> {
    items
        .iter()
        .filter_map(|(id, c, r)| r.as_ref().err().map(|e| json!({"function_id": id, "characterization": c, "error": e.to_string()})))
        .collect()
}

fn norm(cfg: &RunConfig) -> Result<Outcome> {
    let inputs = fields(cfg)?;
    let items = per_item(&inputs, &cfg.options.characterization.to_vec(), |f, c| evaluate(f, c, &cfg.space, &cfg.quad));
    let mut rows = Vec::new();
    let mut values = Vec::new();
    for (id, c, r) in &items {
        if let Ok(r) = r {
            rows.push(Row::new(id, c.to_string(), &cfg.space, r.value, r.flag));
            values.push(json!({
                "function_id": id,
                "characterization": c,
                "value": r.value,
                "flag": r.flag,
                "aggregation": r.aggregation,
                "per_scale": r.per_scale,
                "truncation_report": r.truncation_report,
            }));
        }
    }
    let errors = error_list(&items);
    let status = if errors.is_empty() { Status::Ok } else { Status::Error };
    let headline = format!("{} value(s), {} error(s)", values.len(), errors.len());
    Ok(Outcome::new(status, headline, rows, json!({"values": values, "errors": errors})))
}

fn bands(cfg: &RunConfig) -> Result<Outcome> {
    let (id, f) = single_field(cfg, gaussian(8.0))?;
    let system = build_band_system(f.grid(), cfg.options.sharpness)?;
    let decomp = decompose(&f, &system, cfg.options.inhomogeneous)?;
    let mut out = Outcome::new(Status::Ok, String::new(), Vec::new(), Value::Null);
    let mut files = Vec::new();
    if let Some(low) = decomp.lowpass() {
        out.rows.push(Row::new(&id, "lowpass", &cfg.space, lp_norm(low, cfg.space.p)?, Flag::Ok));
        out.fields.push(("band_low".into(), low.clone()));
        files.push(json!({"band": "low", "file": "band_low.bin"}));
    }
    for (j, band) in decomp.bands() {
        let stem = format!("band_{j}");
        out.rows.push(Row::new(&id, format!("band:{j}"), &cfg.space, lp_norm(band, cfg.space.p)?, Flag::Ok));
        files.push(json!({"band": j, "file": format!("{stem}.bin")}));
        out.fields.push((stem, band.clone()));
    }
    let s = decomp.summary();
    let manifest = json!({
        "j_min": s.j_min,
        "j_max": s.j_max,
        "inhomogeneous": s.inhomogeneous,
        "truncated_energy": s.truncated_energy,
        "files": files,
    });
    out.headline = format!("{} band(s) j = {}..={}, truncated energy {:.3e}", decomp.bands().len(), s.j_min, s.j_max, s.truncated_energy);
    out.documents.push(("manifest".into(), manifest.clone()));
    out.result = manifest;
    Ok(out)
}

fn diff(cfg: &RunConfig) -> Result<Outcome> {
    let (id, f) = single_field(cfg, gaussian(8.0))?;
    let h = step(cfg, f.grid());
    let spec = DifferenceSpec::new(cfg.space.order, h.clone(), DifferenceMethod::Spectral)?;
    let d = iterated_difference(&f, &spec)?;
    let value = lp_norm(&d, cfg.space.p)?;
    let row = Row::new(&id, format!("delta^{}", cfg.space.order), &cfg.space, value, Flag::Ok);
    let result = json!({"function_id": id, "step": h, "order": cfg.space.order, "lp_norm": value, "max_abs": d.max_abs()});
    let mut out = Outcome::new(Status::Ok, format!("L^p norm of the difference {}", format_extended(value)), vec![row], result);
    out.fields.push(("difference".into(), d));
    Ok(out)
}

fn maximal(cfg: &RunConfig) -> Result<Outcome> {
    let (id, f) = single_field(cfg, gaussian(8.0))?;
    let spec = MaximalSpec {
        variant: cfg.options.variant,
        t: cfg.options.t,
        h: if cfg.options.step.is_empty() { Vec::new() } else { step(cfg, f.grid()) },
        order: cfg.space.order,
        r: cfg.space.r,
    };
    let m = maximal_field(&f, &spec, &cfg.quad)?;
    let value = lp_norm(&m, cfg.space.p)?;
    let name = to_json(&spec.variant).as_str().unwrap_or_default().to_string();
    let row = Row::new(&id, format!("maximal:{name}"), &cfg.space, value, Flag::Ok);
    let result = json!({"function_id": id, "spec": spec, "lp_norm": value, "max": m.max_abs()});
    let mut out = Outcome::new(Status::Ok, format!("{name} maximal function, L^p norm {}", format_extended(value)), vec![row], result);
    out.fields.push(("maximal".into(), m));
    Ok(out)
}

fn corpus(cfg: &RunConfig) -> Result<Outcome> {
    let grid = grid(cfg)?;
    let list = entries(cfg, &grid)?;
    let sampled: Vec<SampledField> = list.par_iter().map(|e| sample_family(&e.spec, &grid)).collect::<Result<_>>()?;
    let mut out = Outcome::new(Status::Ok, format!("{} test function(s)", list.len()), Vec::new(), to_json(&list));
    for (e, f) in list.iter().zip(sampled) {
        out.rows.push(Row::new(&e.id, "sample", &cfg.space, lp_norm(&f, cfg.space.p)?, Flag::Ok));
        out.fields.push((format!("corpus/{}", e.id), f));
    }
    out.documents.push(("corpus/manifest".into(), out.result.clone()));
    Ok(out)
}

fn scaling(cfg: &RunConfig) -> Result<Outcome> {
    let inputs = fields(cfg)?;
    let k = cfg.options.dilate_base;
    let items = per_item(&inputs, &cfg.options.characterization.to_vec(), |f, c| {
        let base = if k == 0 { f.clone() } else { dyadic_dilate(f, k)? };
        scaling_experiment(&base, c, &cfg.space, &cfg.quad, &cfg.options.m)
    });
    let mut rows = Vec::new();
    let mut reports = Vec::new();
    for (id, c, r) in &items {
        if let Ok(r) = r {
            for (m, v) in r.m_values.iter().zip(&r.values) {
                rows.push(Row::new(format!("{id}@m={m}"), c.to_string(), &cfg.space, *v, Flag::Ok));
            }
            reports.push(json!({"function_id": id, "report": r}));
        }
    }
    let errors = error_list(&items);
    let ok: Vec<_> = items.iter().filter_map(|(_, _, r)| r.as_ref().ok()).collect();
    let worst_dev = ok.iter().flat_map(|r| r.deviations.iter().copied()).fold(0.0f64, f64::max);
    let status = if errors.is_empty() { Verdict::from_pass(ok.iter().all(|r| r.pass)).into() } else { Status::Error };
    let headline = format!("largest exponent deviation {worst_dev:.4}, {} error(s)", errors.len());
    Ok(Outcome::new(status, headline, rows, json!({"reports": reports, "errors": errors})))
}

fn equivalence(cfg: &RunConfig) -> Result<Outcome> {
    let grid = grid(cfg)?;
    let list = entries(cfg, &grid)?;
    let pair = (cfg.options.pair[0], cfg.options.pair[1]);
    let r = equivalence_experiment(&list, pair, &cfg.space, &grid, &cfg.quad, cfg.options.theorem, cfg.thresholds)?;
    let label = format!("{}/{}", pair.0, pair.1);
    let rows = r
        .per_function
        .iter()
        .map(|f| Row::new(&f.id, &label, &cfg.space, f.ratio, worst(f.flag_a, f.flag_b)))
        .collect();
    let headline = format!("{label}: spread {:.4}, dilation drift {:.4}, {}", r.spread, r.dilation_drift, r.verdict);
    Ok(Outcome::new(r.verdict.into(), headline, rows, to_json(&r)))
}

fn ppn(cfg: &RunConfig) -> Result<Outcome> {
    let j = cfg.options.j.unwrap_or(1);
    let (id, f) = single_field(cfg, |_| TestFunctionSpec::RandomBand { j, seed: 3 })?;
    let radius = cfg.options.radius.unwrap_or(2f64.powi(j + 1));
    let (p, q) = (cfg.space.p, cfg.space.q);
    let r = ppn_probe(&f, radius, &cfg.options.alpha, p, q, &cfg.options.t_values)?;
    let label = format!("ppn:alpha={:?}", r.alpha);
    let rows = r
        .t_values
        .iter()
        .zip(&r.ratios)
        .map(|(t, v)| Row::new(format!("{id}@t={}", format_extended(*t)), &label, &cfg.space, *v, Flag::Ok))
        .collect();
    let headline = format!("{label}: spread {:.4}", r.spread);
    Ok(Outcome::new(Verdict::from_pass(r.pass).into(), headline, rows, to_json(&r)))
}

/// `count` directions spread evenly over `+-degrees` around `axis`, turning
/// towards the next axis.
pub fn direction_fan(dim: usize, axis: usize, count: usize, degrees: f64) -> Vec<[f64; 3]> {
    let a = axis - 1;
    let b = axis % dim;
    (0..count)
        .map(|i| {
            let frac = if count == 1 { 0.5 } else { i as f64 / (count - 1) as f64 };
            let ang = (-degrees + 2.0 * degrees * frac).to_radians();
            let mut th = [0.0; 3];
            th[a] += ang.cos();
            th[b] += ang.sin();
            th
        })
        .collect()
}

fn kernel_decay(cfg: &RunConfig) -> Result<Outcome> {
    let grid = grid(cfg)?;
    if grid.dim() < 2 {
        return Err(LpError::DimensionTooLow { dim: grid.dim(), required: 2 });
    }
    let axis = cfg.options.axis.unwrap_or(1);
    let mut window = DecayWindow::standard(cfg.options.smoothness);
    window.axis = [0.0; 3];
    window.axis[axis - 1] = 1.0;
    let thetas = direction_fan(grid.dim(), axis, cfg.options.directions, cfg.options.fan_degrees);
    let s = kernel_decay_survey(&window, &grid, cfg.space.order, &cfg.options.taus, &thetas)?;
    let label = format!("kernel-slope:N={}", s.smoothness);
    let rows = s
        .fits
        .iter()
        .map(|fit| {
            let deg = fit.theta[axis % grid.dim()].atan2(fit.theta[axis - 1]).to_degrees();
            Row::new(format!("tau={}@theta={deg:.3}", format_extended(fit.tau)), &label, &cfg.space, fit.slope, Flag::Ok)
        })
        .collect();
    let headline = format!("N = {}: steepest allowed slope {:.3}, amplitude ratio {:.3}", s.smoothness, s.max_slope, s.amplitude_ratio);
    Ok(Outcome::new(Verdict::from_pass(s.pass).into(), headline, rows, to_json(&s)))
}

fn divergence(cfg: &RunConfig) -> Result<Outcome> {
    let (id, f) = single_field(cfg, gaussian(16.0))?;
    let r = divergence_probe(&f, &cfg.space, &cfg.quad, cfg.options.levels)?;
    let flag = if r.verdict == lplab_core::verify::DivergenceVerdict::Divergent { Flag::Divergent } else { Flag::Ok };
    let rows = r
        .h_min_values
        .iter()
        .zip(&r.values)
        .map(|(h, v)| Row::new(format!("{id}@h_min={}", format_extended(*h)), "diff", &cfg.space, *v, flag))
        .collect();
    let status = r.pass.map_or(Status::NoVerdict, |p| Verdict::from_pass(p).into());
    let growth: Vec<String> = r.growth.iter().map(|g| format!("{g:.3}")).collect();
    let headline = format!("growth per octave [{}]", growth.join(", "));
    Ok(Outcome::new(status, headline, rows, to_json(&r)))
}

fn slice_support(cfg: &RunConfig) -> Result<Outcome> {
    let (id, f) = single_field(cfg, |g| TestFunctionSpec::Gaussian { sigma: g.box_length() / 16.0, center: None })?;
    let system = build_band_system(f.grid(), cfg.options.sharpness)?;
    let js: Vec<i32> = match cfg.options.j {
        Some(j) => vec![j],
        None => (system.j_min()..=system.j_max()).collect(),
    };
    let axes: Vec<usize> = match cfg.options.axis {
        Some(a) => vec![a],
        None => (1..=f.grid().dim()).collect(),
    };
    let mut reports = Vec::new();
    for &j in &js {
        for &axis in &axes {
            reports.push(slice_support_check(&f, &system, j, axis)?);
        }
    }
    let rows = reports
        .iter()
        .map(|r| Row::new(format!("{id}@j={}", r.j), format!("slice:axis={}", r.axis), &cfg.space, r.max_violation, Flag::Ok))
        .collect();
    let worst = reports.iter().map(|r| r.max_violation).fold(0.0f64, f64::max);
    let pass = reports.iter().all(|r| r.pass);
    Ok(Outcome::new(Verdict::from_pass(pass).into(), format!("largest out-of-support share {worst:.3e}"), rows, to_json(&reports)))
}
