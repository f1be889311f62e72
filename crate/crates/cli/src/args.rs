//! Command tree. Every argument struct also (de)serializes so that a
//! `--config` file can override flags and the merged values can be echoed
//! in the provenance block.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Parser, Debug)]
#[command(name = "reclab", version, about = "Recurrence sets of finite dynamical systems at finite tolerance")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct Global {
    /// Output format.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Re-validate every emitted set by an independent route.
    #[arg(long, global = true)]
    pub recheck: bool,
    /// JSON object whose keys override command-line flags.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Json,
    Csv,
    Text,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Finite metric spaces.
    #[command(subcommand)]
    Space(SpaceCmd),
    /// Build systems.
    #[command(subcommand)]
    System(SystemCmd),
    /// Chains in the error graph.
    #[command(subcommand)]
    Chain(ChainCmd),
    /// Recurrence sets and the product checks.
    #[command(subcommand)]
    Recur(RecurCmd),
    /// Return times and nonwandering points.
    #[command(subcommand)]
    Nw(NwCmd),
    /// Simultaneous approximation from recurrence of a torus rotation.
    #[command(subcommand)]
    Numtheory(NumtheoryCmd),
    /// Product checks over every pair of the built-in catalog.
    VerifyAll(VerifyAllArgs),
}

#[derive(Subcommand, Debug)]
pub enum SpaceCmd {
    /// Check the metric axioms.
    Validate(SpaceValidateArgs),
}

#[derive(Subcommand, Debug)]
pub enum SystemCmd {
    /// Build a system and write it as JSON.
    Build(SystemBuildArgs),
}

#[derive(Subcommand, Debug)]
pub enum ChainCmd {
    /// Least-cost closed chain through a point.
    Mincycle(MincycleArgs),
}

#[derive(Subcommand, Debug)]
pub enum RecurCmd {
    /// One recurrence set.
    Compute(RecurComputeArgs),
    /// Product theorem items for `f × g`.
    VerifyProduct(VerifyProductArgs),
    /// Recompute a previously emitted set from its provenance.
    Recheck(RecheckArgs),
}

#[derive(Subcommand, Debug)]
pub enum NwCmd {
    /// Return times of a neighborhood.
    ReturnTimes(ReturnTimesArgs),
    /// Nonwandering and local mixing at a point, or at a product point.
    Check(NwCheckArgs),
    /// Wandering product point built from the non-return times at a point.
    Witness(WitnessArgs),
}

#[derive(Subcommand, Debug)]
pub enum NumtheoryCmd {
    /// `n` with `‖nα‖, ‖nβ‖ ≤ ε`.
    Approx(ApproxArgs),
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct SpaceValidateArgs {
    /// Space or system JSON file.
    pub file: Option<PathBuf>,
    /// Seed for sampled triangle checks on large spaces.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SystemKind {
    Rotation,
    Doubling,
    HalfFixed,
    Spiral,
    Gm,
    Product,
    Catalog,
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct SystemBuildArgs {
    #[arg(long, value_enum)]
    pub kind: Option<SystemKind>,
    /// Number of circle cells.
    #[arg(long)]
    pub n: Option<usize>,
    /// Rotation angle in radians, or `golden` / `sqrt2`.
    #[arg(long)]
    pub theta: Option<String>,
    #[arg(long)]
    pub n_r: Option<usize>,
    #[arg(long)]
    pub n_a: Option<usize>,
    /// Rings moved outward per step (spiral).
    #[arg(long)]
    pub drift: Option<usize>,
    /// The set M for g_M, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub m: Vec<usize>,
    #[arg(long)]
    pub i_max: Option<usize>,
    #[arg(long)]
    pub tail_len: Option<usize>,
    /// Factor systems for `--kind product`.
    #[arg(long)]
    pub f: Option<PathBuf>,
    #[arg(long)]
    pub g: Option<PathBuf>,
    /// Catalog entry for `--kind catalog`.
    #[arg(long)]
    pub entry: Option<String>,
    #[arg(long)]
    pub name: Option<String>,
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct MincycleArgs {
    #[arg(long)]
    pub system: Option<PathBuf>,
    /// Metric on the same points replacing the system's own.
    #[arg(long)]
    pub metric: Option<PathBuf>,
    #[arg(long)]
    pub point: Option<usize>,
    /// Ignore chains costing more than this.
    #[arg(long)]
    pub cutoff: Option<f64>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RecurKind {
    Cr,
    Scr,
    Mane,
    Gr,
    Nw,
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct RecurComputeArgs {
    #[arg(long, value_enum)]
    pub kind: Option<RecurKind>,
    #[arg(long)]
    pub system: Option<PathBuf>,
    #[arg(long)]
    pub metric: Option<PathBuf>,
    #[arg(long)]
    pub eps: Option<f64>,
    /// Interior-of-Fix radius for Mañé (default 0.75·eps).
    #[arg(long)]
    pub radius: Option<f64>,
    /// Return-time horizon for NW (default 200).
    #[arg(long)]
    pub horizon: Option<usize>,
    /// Metric transforms for GR and matched NW, e.g. `id,pow:1/2,minkowski`.
    #[arg(long, value_delimiter = ',')]
    pub family: Vec<String>,
    /// NW with balls shrunk to match strong chains in every family metric.
    #[arg(long)]
    pub matched: bool,
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct VerifyProductArgs {
    #[arg(long)]
    pub f: Option<PathBuf>,
    #[arg(long)]
    pub g: Option<PathBuf>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long)]
    pub horizon: Option<usize>,
    #[arg(long)]
    pub n_max: Option<usize>,
    /// Items to run (default all six).
    #[arg(long, value_delimiter = ',')]
    pub items: Vec<u8>,
    #[arg(long, value_delimiter = ',')]
    pub family: Vec<String>,
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct RecheckArgs {
    /// A set emitted by `recur compute`.
    pub set: Option<PathBuf>,
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct ReturnTimesArgs {
    #[arg(long)]
    pub system: Option<PathBuf>,
    /// Explicit neighborhood, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub points: Vec<usize>,
    /// Center of a closed ball (with `--eps`).
    #[arg(long)]
    pub point: Option<usize>,
    #[arg(long)]
    pub eps: Option<f64>,
    /// Use the `V` marked set of a g_M system.
    #[arg(long)]
    pub marked: Option<String>,
    #[arg(long)]
    pub horizon: Option<usize>,
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct NwCheckArgs {
    #[arg(long)]
    pub system: Option<PathBuf>,
    #[arg(long)]
    pub point: Option<usize>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub horizon: Option<usize>,
    /// Steps at the end of the horizon that must all be returns for mixing.
    #[arg(long)]
    pub window: Option<usize>,
    /// Second factor; checks the product point `(point, point-g)`.
    #[arg(long)]
    pub g: Option<PathBuf>,
    #[arg(long)]
    pub point_g: Option<usize>,
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct WitnessArgs {
    #[arg(long)]
    pub system: Option<PathBuf>,
    #[arg(long)]
    pub point: Option<usize>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub horizon: Option<usize>,
    /// Largest `|M|` used for g_M.
    #[arg(long)]
    pub i_max: Option<usize>,
    /// Build g_M and check the product point; otherwise only report M.
    #[arg(long)]
    pub build_gm: bool,
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct ApproxArgs {
    /// A number, or `sqrt(k)`.
    #[arg(long)]
    pub alpha: Option<String>,
    #[arg(long)]
    pub beta: Option<String>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub count: Option<usize>,
    /// `brute` or `chain-derived` (default).
    #[arg(long)]
    pub method: Option<String>,
    /// Largest `n` scanned, or orbit sample length (default 10^6).
    #[arg(long)]
    pub n_cap: Option<u64>,
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct VerifyAllArgs {
    #[arg(long, value_delimiter = ',')]
    pub items: Vec<u8>,
    #[arg(long)]
    pub horizon: Option<usize>,
}
