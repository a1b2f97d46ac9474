//! Benchmark corpus: one JSON manifest per case next to its `.causal` model.

mod report;
mod run;

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::model::GraphMode;

pub use report::{render_report, Format, RenderOptions};
pub use run::{run_all, run_case, CaseReport, DefinitionResult, Report};

/// Default corpus location, relative to the workspace root.
pub const DEFAULT_CORPUS: &str = "benchmarks/table1";

/// Environment variable overriding [`DEFAULT_CORPUS`].
pub const CORPUS_ENV: &str = "FLOWCAUSE_BENCH_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Definition {
    /// Sufficient cause.
    Def4,
    /// Actual cause.
    Def7,
    /// Control-flow-preserving sufficient cause.
    Def6,
    /// Sufficient cause restricted to data variables.
    Def4r,
    /// Actual cause with control-only contingencies.
    Ac2p,
    /// Control-flow-preserving necessary cause.
    Cfn,
}

impl Definition {
    pub const ALL: [Definition; 6] = [
        Definition::Def4,
        Definition::Def7,
        Definition::Def6,
        Definition::Def4r,
        Definition::Ac2p,
        Definition::Cfn,
    ];

    pub fn key(self) -> &'static str {
        match self {
            Definition::Def4 => "def4",
            Definition::Def7 => "def7",
            Definition::Def6 => "def6",
            Definition::Def4r => "def4r",
            Definition::Ac2p => "ac2p",
            Definition::Cfn => "cfn",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            Definition::Def4 => "Sufficient",
            Definition::Def7 => "Actual",
            Definition::Def6 => "CF-preserving sufficient",
            Definition::Def4r => "Restricted sufficient",
            Definition::Ac2p => "Restricted actual",
            Definition::Cfn => "CF-preserving necessary",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphChoice {
    #[default]
    Semantic,
    Syntactic,
}

impl From<GraphChoice> for GraphMode {
    fn from(g: GraphChoice) -> Self {
        match g {
            GraphChoice::Semantic => GraphMode::Semantic,
            GraphChoice::Syntactic => GraphMode::Syntactic,
        }
    }
}

fn yes() -> bool {
    true
}

/// On-disk manifest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub id: String,
    pub model: String,
    pub context: String,
    pub query: String,
    pub control: Vec<String>,
    pub expected: BTreeMap<Definition, Vec<Vec<String>>>,
    pub source: String,
    /// Check bottom-propagation before running the engines.
    #[serde(default = "yes")]
    pub validate_control_flow: bool,
    #[serde(default)]
    pub graph: GraphChoice,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchmarkCase {
    /// Manifest file name; reports are ordered by it.
    pub file: String,
    pub model_path: PathBuf,
    pub manifest: Manifest,
}

impl BenchmarkCase {
    pub fn id(&self) -> &str {
        &self.manifest.id
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ManifestError {
    Io { path: PathBuf, message: String },
    Schema { path: PathBuf, line: usize, column: usize, message: String },
    MissingModel { path: PathBuf, model: PathBuf },
}

impl fmt::Display for ManifestError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ManifestError::Io { path, message } => write!(f, "{}: {message}", path.display()),
            ManifestError::Schema {
                path,
                line,
                column,
                message,
            } => write!(f, "{}:{line}:{column}: {message}", path.display()),
            ManifestError::MissingModel { path, model } => write!(
                f,
                "{}: model file {} does not exist",
                path.display(),
                model.display()
            ),
        }
    }
}

impl std::error::Error for ManifestError {}

/// Loads every `*.json` manifest in `dir`, ordered by file name.
pub fn load_cases(dir: &Path) -> Result<Vec<BenchmarkCase>, ManifestError> {
    let io = |path: &Path, e: std::io::Error| ManifestError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    };
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    files
        .into_iter()
        .map(|path| {
            let text = std::fs::read_to_string(&path).map_err(|e| io(&path, e))?;
            let manifest: Manifest =
                serde_json::from_str(&text).map_err(|e| ManifestError::Schema {
                    path: path.clone(),
                    line: e.line(),
                    column: e.column(),
                    message: e.to_string(),
                })?;
            let model_path = dir.join(&manifest.model);
            if !model_path.is_file() {
                return Err(ManifestError::MissingModel {
                    path,
                    model: model_path,
                });
            }
            Ok(BenchmarkCase {
                file: path
                    .file_name()
                    .map(|f| f.to_string_lossy().into_owned())
                    .unwrap_or_default(),
                model_path,
                manifest,
            })
        })
        .collect()
}
