use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lplab::config::{read_config_file, Command};
use lplab::{init_threads, run_config, CliError, RunConfig};
use serde_json::{json, Map, Value};

/// Littlewood-Paley, difference and maximal-function quasinorms of sampled
/// periodic fields.
#[derive(Parser)]
#[command(name = "lplab", version)]
struct Cli {
    /// JSON run configuration. Its values override every flag, and its
    /// `command` replaces the subcommand.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(flatten)]
    flags: Flags,
    #[command(subcommand)]
    command: Option<Cmd>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Split a field into dyadic bands and write one field file per band.
    Bands,
    /// Apply the iterated difference of order L with step --h.
    Diff,
    /// Write a maximal function of the field.
    Maximal,
    /// Evaluate quasinorms of the input field or of each corpus member.
    Norm,
    /// Write every corpus member as a field file.
    Corpus,
    /// Run a verification experiment.
    Verify {
        #[command(subcommand)]
        which: VerifyCmd,
    },
}

#[derive(Subcommand)]
enum VerifyCmd {
    Scaling,
    Equivalence,
    Ppn,
    KernelDecay,
    Divergence,
    SliceSupport,
}

#[derive(Args)]
struct Flags {
    /// Field file to analyse instead of the corpus.
    #[arg(long = "in", global = true)]
    input: Option<PathBuf>,
    /// Output directory.
    #[arg(long = "out", global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true)]
    dim: Option<usize>,
    /// Points per axis (a power of two).
    #[arg(short = 'N', long = "points", global = true)]
    n: Option<usize>,
    /// Box length B.
    #[arg(long = "box", global = true)]
    box_length: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    s: Option<f64>,
    /// Integrability exponent; `inf` allowed.
    #[arg(long, global = true)]
    p: Option<String>,
    /// Summability exponent; `inf` allowed.
    #[arg(long, global = true)]
    q: Option<String>,
    /// Difference order L.
    #[arg(short = 'L', long = "order", global = true)]
    order: Option<u32>,
    /// Peetre exponent r of the maximal characterizations.
    #[arg(long, global = true)]
    r: Option<f64>,
    /// F (Triebel-Lizorkin) or B (Besov).
    #[arg(long, global = true)]
    scale: Option<String>,
    /// Use the inhomogeneous band system and quasinorms.
    #[arg(long, global = true)]
    inhomogeneous: bool,
    /// Characterizations, comma separated: lp, diff, axis:J, gagliardo,
    /// midpoint, max:S, max:S_SUP, max:V, max:V_SUP, max:D.
    #[arg(long, global = true, value_delimiter = ',')]
    characterization: Option<Vec<String>>,
    /// Two characterizations for `verify equivalence`.
    #[arg(long, global = true, value_delimiter = ',', num_args = 2)]
    pair: Option<Vec<String>>,
    /// Theorem whose hypothesis window decides whether a verdict is given.
    #[arg(long, global = true)]
    theorem: Option<String>,
    /// Dilation exponents for `verify scaling`.
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true)]
    m: Option<Vec<i32>>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    dilate_base: Option<i32>,
    /// Difference step, one entry per axis.
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true)]
    h: Option<Vec<f64>>,
    /// Maximal function: HL, PEETRE, SPHERE_S, BALL_V or POINT_D.
    #[arg(long, global = true)]
    variant: Option<String>,
    #[arg(long, global = true)]
    t: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    j: Option<i32>,
    /// Axis, counted from 1.
    #[arg(long, global = true)]
    axis: Option<usize>,
    /// Derivative multi-index for `verify ppn`.
    #[arg(long, global = true, value_delimiter = ',')]
    alpha: Option<Vec<u32>>,
    #[arg(long, global = true, value_delimiter = ',')]
    t_values: Option<Vec<f64>>,
    #[arg(long, global = true)]
    radius: Option<f64>,
    /// Window exponent N for `verify kernel-decay`.
    #[arg(long, global = true)]
    smoothness: Option<u32>,
    #[arg(long, global = true, value_delimiter = ',')]
    taus: Option<Vec<f64>>,
    #[arg(long, global = true)]
    directions: Option<usize>,
    /// Number of `h_min` halvings for `verify divergence`.
    #[arg(long, global = true)]
    levels: Option<usize>,
    #[arg(long, global = true)]
    max_spread: Option<f64>,
    #[arg(long, global = true)]
    max_drift: Option<f64>,
}

fn put<T: serde::Serialize>(map: &mut Map<String, Value>, key: &str, v: Option<T>) {
    if let Some(v) = v {
        map.insert(key.into(), json!(v));
    }
}

fn flags_to_json(f: Flags, command: Option<Command>) -> Value {
    let mut grid = Map::new();
    put(&mut grid, "dim", f.dim);
    put(&mut grid, "N", f.n);
    put(&mut grid, "B", f.box_length);
    let mut space = Map::new();
    put(&mut space, "s", f.s);
    put(&mut space, "p", f.p);
    put(&mut space, "q", f.q);
    put(&mut space, "L", f.order);
    put(&mut space, "r", f.r);
    put(&mut space, "scale", f.scale.map(|s| s.to_ascii_uppercase()));
    let mut io = Map::new();
    put(&mut io, "input", f.input);
    put(&mut io, "output", f.output);
    let mut th = Map::new();
    put(&mut th, "max_spread", f.max_spread);
    put(&mut th, "max_drift", f.max_drift);
    let mut o = Map::new();
    put(&mut o, "characterization", f.characterization);
    put(&mut o, "pair", f.pair);
    put(&mut o, "theorem", f.theorem);
    put(&mut o, "m", f.m);
    put(&mut o, "dilate_base", f.dilate_base);
    put(&mut o, "step", f.h);
    put(&mut o, "variant", f.variant.map(|v| v.to_ascii_uppercase()));
    put(&mut o, "t", f.t);
    put(&mut o, "j", f.j);
    put(&mut o, "axis", f.axis);
    put(&mut o, "alpha", f.alpha);
    put(&mut o, "t_values", f.t_values);
    put(&mut o, "radius", f.radius);
    put(&mut o, "smoothness", f.smoothness);
    put(&mut o, "taus", f.taus);
    put(&mut o, "directions", f.directions);
    put(&mut o, "levels", f.levels);
    if f.inhomogeneous {
        o.insert("inhomogeneous".into(), json!(true));
        space.insert("homogeneous".into(), json!(false));
    }
    let mut root = Map::new();
    put(&mut root, "command", command);
    for (k, m) in [("grid", grid), ("space", space), ("io", io), ("thresholds", th), ("options", o)] {
        if !m.is_empty() {
            root.insert(k.into(), Value::Object(m));
        }
    }
    Value::Object(root)
}

fn command_of(c: Cmd) -> Command {
    match c {
        Cmd::Bands => Command::Bands,
        Cmd::Diff => Command::Diff,
        Cmd::Maximal => Command::Maximal,
        Cmd::Norm => Command::Norm,
        Cmd::Corpus => Command::Corpus,
        Cmd::Verify { which } => match which {
            VerifyCmd::Scaling => Command::Scaling,
            VerifyCmd::Equivalence => Command::Equivalence,
            VerifyCmd::Ppn => Command::Ppn,
            VerifyCmd::KernelDecay => Command::KernelDecay,
            VerifyCmd::Divergence => Command::Divergence,
            VerifyCmd::SliceSupport => Command::SliceSupport,
        },
    }
}

fn main_inner() -> Result<i32, CliError> {
    let cli = Cli::parse();
    init_threads()?;
    let file = cli.config.as_deref().map(read_config_file).transpose()?;
    let flags = flags_to_json(cli.flags, cli.command.map(command_of));
    let cfg = RunConfig::assemble(flags, file)?;
    let (outcome, written) = run_config(&cfg)?;
    println!("{}: {} ({})", cfg.command, outcome.status.as_str(), outcome.headline);
    println!("  {}", written.csv.display());
    println!("  {}", written.summary.display());
    if !written.fields.is_empty() {
        println!("  {} more file(s) in {}", written.fields.len(), cfg.io.output.display());
    }
    Ok(outcome.status.exit_code())
}

fn main() -> ExitCode {
    match main_inner() {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("lplab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
