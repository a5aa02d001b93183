use obsnum::encode::{KeyPathScope, Mode};
use obsnum::solver::{SolverConfig, Stats};
use serde::{Deserialize, Serialize};

pub const TOOL_VERSION: &str = concat!("obsnum ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SolverSpec {
    Embedded(SolverConfig),
    External { command: Vec<String> },
}

/// Everything needed to rerun a solve: the exact command line, the
/// instance (by hash and provenance), the solver settings and the result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub command_line: Vec<String>,
    /// SHA-256 of the DIMACS text that was solved.
    pub instance_sha256: String,
    pub graph_sha256: Option<String>,
    pub mode: Option<Mode>,
    /// `None` when paths were not capped or the instance does not say.
    pub max_path_len: Option<usize>,
    pub key_paths: Option<KeyPathScope>,
    pub shared_endpoint: Option<bool>,
    pub jobs: Option<usize>,
    pub num_vars: usize,
    pub num_clauses: usize,
    pub solver: SolverSpec,
    pub outcome: String,
    pub stats: Stats,
}

/// Provenance recorded in an instance's DIMACS comments by the encoder.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct InstanceProvenance {
    pub graph_sha256: Option<String>,
    pub mode: Option<Mode>,
    pub max_path_len: Option<usize>,
    pub key_paths: Option<KeyPathScope>,
    pub shared_endpoint: Option<bool>,
}

impl InstanceProvenance {
    pub fn from_comments<'a>(comments: impl IntoIterator<Item = &'a String>) -> Self {
        let mut out = InstanceProvenance::default();
        for c in comments {
            let Some((key, value)) = c.trim().split_once(' ') else {
                continue;
            };
            match key {
                "graph" => {
                    out.graph_sha256 = value
                        .split_whitespace()
                        .find_map(|f| f.strip_prefix("sha256="))
                        .map(str::to_string)
                }
                "mode" => out.mode = value.parse().ok(),
                "max-path-len" => out.max_path_len = value.parse().ok(),
                "key-paths" => out.key_paths = value.parse().ok(),
                "shared-endpoint" => out.shared_endpoint = value.parse().ok(),
                _ => {}
            }
        }
        out
    }
}
