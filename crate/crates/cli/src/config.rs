//! Experiment configuration schema. Every struct rejects unknown fields.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use islab_core::cybernetic::{EnvironmentFile, PolicyFile};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Complexity,
    Measures,
    Game,
    Cybernetic,
    Theorem1,
    Theorem2,
    Theorem3,
    Theorem4,
    Aixi,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelName {
    Exact,
    Levin,
    #[default]
    Lz78,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    #[serde(default)]
    pub name: ModelName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_program_bits: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_steps: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: Kind,
    #[serde(default)]
    pub model: ModelSpec,
    /// Parsed per kind into one of the `*Input` structs below.
    pub input: serde_json::Value,
    /// Report path; stdout when absent.
    #[serde(default)]
    pub output: Option<PathBuf>,
    /// Tabular sidecar for sweeps (theorem slack rows, universality table).
    #[serde(default)]
    pub csv: Option<PathBuf>,
}

/// A player given inline, from a text file (`n=<int>` then one member per
/// line), or by fixture name (`rps_a`, `rps_b`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PlayerRef {
    Inline(InlinePlayer),
    File(FileRef),
    Fixture(FixtureRef),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InlinePlayer {
    pub n: usize,
    pub members: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileRef {
    pub file: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixtureRef {
    pub fixture: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubsetsSpec {
    pub n: usize,
    pub size: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SingletonsSpec {
    pub n: usize,
}

/// A family is the concatenation, in this order, of the generated subsets,
/// the generated singletons, and the listed members.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub all_subsets: Option<SubsetsSpec>,
    #[serde(default)]
    pub singletons: Option<SingletonsSpec>,
    #[serde(default)]
    pub members: Vec<PlayerRef>,
}

/// An environment: built-in name, JSON file, or inline table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EnvRef {
    Builtin(BuiltinRef),
    File(FileRef),
    Inline(EnvironmentFile),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BuiltinRef {
    pub builtin: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexityInput {
    pub targets: Vec<String>,
    #[serde(default)]
    pub context: Vec<String>,
    /// Also report the algorithmic mass of each target (exact models only).
    #[serde(default)]
    pub mass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasuresInput {
    pub a: PlayerRef,
    pub b: PlayerRef,
    pub x: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "game", rename_all = "snake_case", deny_unknown_fields)]
pub enum GameInput {
    /// The two-round rock-paper-scissors pair.
    Rps {},
    /// Two payoff tables over `n`-bit actions, entries as `"num/den"`.
    Normal {
        n: usize,
        p: Vec<Vec<String>>,
        q: Vec<Vec<String>>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyChoice {
    Optimal,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PolicyRef {
    Named(PolicyChoice),
    Table(PolicyFile),
    File(FileRef),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CyberneticInput {
    pub environment: EnvRef,
    pub policy: PolicyRef,
    pub horizon: usize,
    pub tau: String,
    #[serde(default = "default_variant")]
    pub variant: String,
}

fn default_variant() -> String {
    "B".into()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoveringInput {
    pub family: FamilySpec,
    pub x: String,
    #[serde(default)]
    pub r: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ApproximationInput {
    pub family: FamilySpec,
    pub a: PlayerRef,
    pub b: PlayerRef,
    pub x: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InfoBoundInput {
    pub family: FamilySpec,
    pub a: PlayerRef,
    pub b: PlayerRef,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimplificationInput {
    pub family: FamilySpec,
    pub a: PlayerRef,
    pub c: usize,
    #[serde(default)]
    pub r: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AixiInput {
    pub environments: Vec<EnvRef>,
    /// Explicit weights as `"num/den"`; LZ-derived when absent.
    #[serde(default)]
    pub weights: Option<Vec<String>>,
    pub taus: Vec<String>,
    /// Inclusive horizon range `[first, last]`.
    pub horizons: [usize; 2],
}

/// Resolves `path` against the directory of the config file.
pub fn resolve(base: &Path, path: &Path) -> PathBuf {
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        base.join(path)
    }
}
