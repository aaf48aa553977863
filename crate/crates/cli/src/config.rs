//! Run configuration: defaults, command-line overrides and a JSON file,
//! merged in that order and validated before anything is computed.

use std::fmt;
use std::path::{Path, PathBuf};

use lplab_core::corpus::{sample_family, TestFunctionSpec};
use lplab_core::maximal::MaximalVariant;
use lplab_core::quadrature::QuadratureSpec;
use lplab_core::quasinorm::{Characterization, Scale, SpaceParams, TheoremId};
use lplab_core::verify::EquivalenceThresholds;
use lplab_core::GridSpec;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Bands,
    Diff,
    Maximal,
    Norm,
    Corpus,
    Scaling,
    Equivalence,
    Ppn,
    KernelDecay,
    Divergence,
    SliceSupport,
}

impl Command {
    pub fn is_verify(self) -> bool {
        matches!(
            self,
            Self::Scaling | Self::Equivalence | Self::Ppn | Self::KernelDecay | Self::Divergence | Self::SliceSupport
        )
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = serde_json::to_value(self).map_err(|_| fmt::Error)?;
        f.write_str(v.as_str().unwrap_or_default())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub dim: usize,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "B")]
    pub b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IoConfig {
    /// Field file to analyse instead of the corpus.
    pub input: Option<PathBuf>,
    pub output: PathBuf,
}

/// A single item or a list, both accepted in configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    pub fn to_vec(&self) -> Vec<T> {
        match self {
            Self::One(x) => vec![x.clone()],
            Self::Many(v) => v.clone(),
        }
    }
}

/// Command-specific knobs. Unused ones are ignored by each command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    pub characterization: OneOrMany<Characterization>,
    pub pair: [Characterization; 2],
    pub theorem: Option<TheoremId>,
    /// Dilation exponents for `scaling`.
    pub m: Vec<i32>,
    /// `scaling` replaces each field by `f(2^k .)` first, so that `m = -k`
    /// is defined for fields whose spectrum is not on even indices.
    pub dilate_base: i32,
    /// Difference step; empty means one grid spacing along the first axis.
    pub step: Vec<f64>,
    pub inhomogeneous: bool,
    pub variant: MaximalVariant,
    pub t: f64,
    /// Band index for `slice-support` (all bands when absent) and `ppn`.
    pub j: Option<i32>,
    pub axis: Option<usize>,
    pub alpha: Vec<u32>,
    pub t_values: Vec<f64>,
    /// Spectral radius of the `ppn` profile; defaults to `2^{j+1}`.
    pub radius: Option<f64>,
    pub smoothness: u32,
    pub taus: Vec<f64>,
    pub directions: usize,
    /// Half-angle in degrees of the direction fan for `kernel-decay`.
    pub fan_degrees: f64,
    pub levels: usize,
    pub sharpness: f64,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            characterization: OneOrMany::One(Characterization::Lp),
            pair: [Characterization::Lp, Characterization::Diff],
            theorem: None,
            m: vec![-1, 0, 1],
            dilate_base: 0,
            step: Vec::new(),
            inhomogeneous: false,
            variant: MaximalVariant::Hl,
            t: 1.0,
            j: None,
            axis: None,
            alpha: vec![1],
            t_values: vec![8.0, 16.0, 32.0],
            radius: None,
            smoothness: 4,
            taus: vec![1.0, 1.5, 2.0],
            directions: 8,
            fan_degrees: 15.0,
            levels: 4,
            sharpness: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    pub grid: GridConfig,
    pub space: SpaceParams,
    pub quad: QuadratureSpec,
    /// Test functions; the default twelve-member corpus when absent.
    pub corpus: Option<Vec<TestFunctionSpec>>,
    pub io: IoConfig,
    pub thresholds: EquivalenceThresholds,
    pub options: Options,
}

/// Every field except `command`, as a JSON object to merge into.
pub fn defaults() -> Value {
    serde_json::json!({
        "grid": GridConfig { dim: 1, n: 256, b: 1.0 },
        "space": SpaceParams::new(0.5, 2.0, 2.0, 1, Scale::F),
        "quad": QuadratureSpec::default(),
        "corpus": null,
        "io": IoConfig { input: None, output: PathBuf::from("lplab-out") },
        "thresholds": EquivalenceThresholds::default(),
        "options": Options::default(),
    })
}

/// Recursive merge: objects merge key by key, anything else is replaced.
pub fn merge(base: &mut Value, over: Value) {
    match (base, over) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

pub fn read_config_file(path: &Path) -> Result<Value, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

impl RunConfig {
    /// Layers `flags` and then `file` over the defaults.
    pub fn assemble(flags: Value, file: Option<Value>) -> Result<Self, CliError> {
        let mut v = defaults();
        merge(&mut v, flags);
        if let Some(f) = file {
            merge(&mut v, f);
        }
        let cfg: Self = serde_json::from_value(v).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let file: Value = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        Self::assemble(Value::Object(Default::default()), Some(file))
    }

    pub fn grid(&self) -> Result<GridSpec, CliError> {
        GridSpec::new(self.grid.dim, self.grid.n, self.grid.b).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |e: lplab_core::LpError| CliError::Config(e.to_string());
        let grid = self.grid()?;
        self.space.validate().map_err(bad)?;
        self.quad.clone().resolved(&grid).validate(&grid).map_err(bad)?;
        if let Some(path) = &self.io.input {
            if !path.is_file() {
                return Err(CliError::Config(format!("input {} does not exist", path.display())));
            }
        }
        if let Some(specs) = &self.corpus {
            if specs.is_empty() {
                return Err(CliError::Config("corpus is empty".into()));
            }
            for spec in specs {
                sample_family(spec, &grid).map_err(bad)?;
            }
        }
        let o = &self.options;
        if o.characterization.to_vec().is_empty() {
            return Err(CliError::Config("no characterization given".into()));
        }
        if !(o.t > 0.0) || !(o.sharpness > 0.0) || !(o.fan_degrees >= 0.0) {
            return Err(CliError::Config("t, sharpness and fan_degrees must be positive".into()));
        }
        if o.step.iter().any(|h| !h.is_finite()) || o.step.len() > grid.dim() {
            return Err(CliError::Config(format!("step {:?} does not fit dimension {}", o.step, grid.dim())));
        }
        if o.axis.is_some_and(|a| a == 0 || a > grid.dim()) {
            return Err(CliError::Config(format!("axis {:?} outside 1..={}", o.axis, grid.dim())));
        }
        if o.t_values.iter().chain(&o.taus).any(|t| !(*t > 0.0)) || o.radius.is_some_and(|r| !(r > 0.0)) {
            return Err(CliError::Config("t_values, taus and radius must be positive".into()));
        }
        if o.directions == 0 || o.levels == 0 || o.m.is_empty() {
            return Err(CliError::Config("directions, levels and m must be nonempty".into()));
        }
        Ok(())
    }
}
