//! SAT instances whose unsatisfiability bounds the obstacle number.
//!
//! The outside instance is satisfiable whenever the graph has a drawing
//! with one obstacle in the outer face; the single instance is satisfiable
//! whenever it has a drawing with one obstacle anywhere. Both share the
//! triple variables `x{a,b,c}` (true when `a, b, c` is clockwise) and the
//! 4- and 5-point axiom clauses that every point configuration satisfies.
//!
//! Path enumeration can be capped. Every clause of a capped instance also
//! occurs in the uncapped one, so a capped UNSAT answer is still a proof.

mod axioms;
mod table;

use std::collections::HashSet;
use std::fmt;
use std::ops::ControlFlow;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cnf::{Clause, CnfError, CnfInstance, Lit};
use crate::graph::{Graph, Vertex};
use crate::paths::{for_each_simple_path, PathError, SimplePath};

pub use axioms::{five_point_clauses, four_point_clauses};
pub use table::{KeyPathVar, Pair, VarMeaning, VariableTable};

pub const GENERATOR: &str = concat!("obsnum ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EncodeError {
    #[error("triple ({}, {}, {}) repeats a vertex", .0[0], .0[1], .0[2])]
    RepeatedVertex([Vertex; 3]),
    #[error("vertex {vertex} out of range for {n} vertices")]
    VertexOutOfRange { vertex: Vertex, n: usize },
    #[error("maximum path length must be at least 1")]
    ZeroPathCap,
    #[error(transparent)]
    Path(#[from] PathError),
    #[error(transparent)]
    Cnf(#[from] CnfError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Outside,
    Single,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Outside => "outside",
            Mode::Single => "single",
        })
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "outside" => Ok(Mode::Outside),
            "single" => Ok(Mode::Single),
            _ => Err(format!("unknown mode `{s}` (expected outside or single)")),
        }
    }
}

/// Which `a,b`-paths get a key-path variable with respect to line `cd`.
///
/// `ThroughLine` takes every path and drops the literals of `c` and `d`
/// from the definition clauses when the path passes through them; a path
/// lying in a closed half-plane of line `cd` still cannot enclose the open
/// segment `cd`. `AvoidLine` only takes paths missing `c` and `d`, which is
/// weaker.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KeyPathScope {
    #[default]
    #[serde(rename = "through")]
    ThroughLine,
    #[serde(rename = "avoid")]
    AvoidLine,
}

impl fmt::Display for KeyPathScope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KeyPathScope::ThroughLine => "through",
            KeyPathScope::AvoidLine => "avoid",
        })
    }
}

impl FromStr for KeyPathScope {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "through" => Ok(KeyPathScope::ThroughLine),
            "avoid" => Ok(KeyPathScope::AvoidLine),
            _ => Err(format!(
                "unknown key-path scope `{s}` (expected through or avoid)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct EncodeOptions {
    /// Longest path (in edges) that contributes clauses; `None` for all.
    pub max_path_len: Option<usize>,
    /// Single mode only.
    pub key_paths: KeyPathScope,
    /// Single mode only: also constrain non-edge pairs sharing a vertex.
    pub shared_endpoint: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ClauseSummary {
    pub four_point: usize,
    pub five_point: usize,
    /// Outside mode: `s{a,b}` path clauses.
    pub path: usize,
    /// Single mode: clauses forcing `k{P|cd}`.
    pub key_path_definition: usize,
    /// Single mode: clauses tying `k{P|cd}` to `s{a,b|c,d}`.
    pub key_path_constraint: usize,
}

impl ClauseSummary {
    pub fn total(&self) -> usize {
        self.four_point
            + self.five_point
            + self.path
            + self.key_path_definition
            + self.key_path_constraint
    }
}

#[derive(Debug, Clone)]
pub struct Encoding {
    pub instance: CnfInstance,
    pub table: VariableTable,
    pub summary: ClauseSummary,
    pub mode: Mode,
    pub options: EncodeOptions,
    pub graph_hash: String,
}

pub fn encode_outside(graph: &Graph, max_path_len: Option<usize>) -> Result<Encoding, EncodeError> {
    let options = EncodeOptions {
        max_path_len,
        ..EncodeOptions::default()
    };
    encode(graph, Mode::Outside, &options)
}

pub fn encode_single(graph: &Graph, max_path_len: Option<usize>) -> Result<Encoding, EncodeError> {
    let options = EncodeOptions {
        max_path_len,
        ..EncodeOptions::default()
    };
    encode(graph, Mode::Single, &options)
}

/// Builds the instance for `mode`. Clause generation runs on the current
/// rayon pool; the output does not depend on the number of threads.
pub fn encode(graph: &Graph, mode: Mode, options: &EncodeOptions) -> Result<Encoding, EncodeError> {
    if options.max_path_len == Some(0) {
        return Err(EncodeError::ZeroPathCap);
    }
    let n = graph.vertex_count();
    let (table, path_clauses, summary_paths) = match mode {
        Mode::Outside => {
            let table = VariableTable::with_side_vars(n, graph.non_edges());
            let clauses = outside_path_clauses(graph, &table, options.max_path_len)?;
            let count = clauses.len();
            (table, clauses, (count, 0, 0))
        }
        Mode::Single => single_path_clauses(graph, options)?,
    };

    let four = four_point_clauses(&table);
    let five = five_point_clauses(&table);
    let summary = ClauseSummary {
        four_point: four.len(),
        five_point: five.len(),
        path: summary_paths.0,
        key_path_definition: summary_paths.1,
        key_path_constraint: summary_paths.2,
    };

    let graph_hash = graph.content_hash();
    let mut instance = CnfInstance::new(table.num_vars());
    write_metadata(
        &mut instance,
        graph,
        &graph_hash,
        mode,
        options,
        &summary,
        &table,
    );
    for clause in four.into_iter().chain(five).chain(path_clauses) {
        instance.add_clause(clause)?;
    }
    Ok(Encoding {
        instance,
        table,
        summary,
        mode,
        options: *options,
        graph_hash,
    })
}

fn write_metadata(
    inst: &mut CnfInstance,
    graph: &Graph,
    hash: &str,
    mode: Mode,
    options: &EncodeOptions,
    summary: &ClauseSummary,
    table: &VariableTable,
) {
    let cap = options
        .max_path_len
        .map_or_else(|| "none".to_string(), |c| c.to_string());
    inst.add_comment(format!("generator {GENERATOR}"));
    inst.add_comment(format!(
        "graph n={} m={} sha256={hash}",
        graph.vertex_count(),
        graph.edge_count()
    ));
    inst.add_comment(format!("mode {mode}"));
    inst.add_comment(format!("max-path-len {cap}"));
    if mode == Mode::Single {
        inst.add_comment(format!("key-paths {}", options.key_paths));
        inst.add_comment(format!("shared-endpoint {}", options.shared_endpoint));
    }
    inst.add_comment(format!(
        "clauses four-point={} five-point={} path={} key-path-definition={} key-path-constraint={}",
        summary.four_point,
        summary.five_point,
        summary.path,
        summary.key_path_definition,
        summary.key_path_constraint
    ));
    for (id, meaning) in table.meanings() {
        inst.add_comment(format!("var {id} = {meaning}"));
    }
}

/// Literals `x{a,b,v}` for `v` in `vertices`, each negated when `negate`.
fn side_literals(
    table: &VariableTable,
    (a, b): Pair,
    vertices: &[Vertex],
    negate: bool,
) -> Vec<Lit> {
    vertices
        .iter()
        .map(|&v| {
            let lit = table.lit(a, b, v);
            if negate {
                !lit
            } else {
                lit
            }
        })
        .collect()
}

/// Distinct `a,b`-paths by internal vertex set: paths with equal internal
/// sets yield identical clauses. The first path in lexicographic order
/// represents each set.
fn distinct_paths(
    graph: &Graph,
    (a, b): Pair,
    max_len: Option<usize>,
    forbidden: &[Vertex],
) -> Result<Vec<SimplePath>, PathError> {
    let mut seen: HashSet<Vec<Vertex>> = HashSet::new();
    let mut out = Vec::new();
    for_each_simple_path(graph, a, b, max_len, forbidden, |p| {
        let mut internal = p[1..p.len() - 1].to_vec();
        internal.sort_unstable();
        if seen.insert(internal) {
            out.push(SimplePath::new(p.to_vec()));
        }
        ControlFlow::Continue(())
    })?;
    Ok(out)
}

fn outside_path_clauses(
    graph: &Graph,
    table: &VariableTable,
    max_len: Option<usize>,
) -> Result<Vec<Clause>, EncodeError> {
    let groups: Vec<Vec<Clause>> = graph
        .non_edges()
        .into_par_iter()
        .map(|ab| -> Result<Vec<Clause>, EncodeError> {
            let s = table
                .side_var(ab)
                .expect("side variable for every non-edge");
            let mut out = Vec::new();
            for path in distinct_paths(graph, ab, max_len, &[])? {
                let mut cw = vec![Lit::negative(s)];
                cw.extend(side_literals(table, ab, path.internal(), false));
                let mut ccw = vec![Lit::positive(s)];
                ccw.extend(side_literals(table, ab, path.internal(), true));
                out.push(cw);
                out.push(ccw);
            }
            Ok(out)
        })
        .collect::<Result<_, _>>()?;
    Ok(groups.into_iter().flatten().collect())
}

/// Ordered pairs of distinct non-edges that get clauses.
fn constrained_pairs(graph: &Graph, shared_endpoint: bool) -> Vec<(Pair, Pair)> {
    let non_edges = graph.non_edges();
    let mut out = Vec::new();
    for &ab in &non_edges {
        for &cd in &non_edges {
            if ab == cd {
                continue;
            }
            let shared = [cd.0, cd.1]
                .iter()
                .filter(|&&v| v == ab.0 || v == ab.1)
                .count();
            if shared == 0 || shared_endpoint {
                out.push((ab, cd));
            }
        }
    }
    out
}

/// One key path of a group, before variable ids are assigned.
struct KeyPathClauses {
    path: SimplePath,
    line_cw: Vec<Lit>,
    side_cw: Vec<Lit>,
}

fn single_group(
    graph: &Graph,
    table: &VariableTable,
    (ab, cd): (Pair, Pair),
    options: &EncodeOptions,
) -> Result<Vec<KeyPathClauses>, EncodeError> {
    let forbidden: Vec<Vertex> = match options.key_paths {
        KeyPathScope::ThroughLine => Vec::new(),
        KeyPathScope::AvoidLine => [cd.0, cd.1]
            .into_iter()
            .filter(|&v| v != ab.0 && v != ab.1)
            .collect(),
    };
    let mut out = Vec::new();
    for path in distinct_paths(graph, ab, options.max_path_len, &forbidden)? {
        let on_line: Vec<Vertex> = path
            .vertices()
            .iter()
            .copied()
            .filter(|&v| v != cd.0 && v != cd.1)
            .collect();
        out.push(KeyPathClauses {
            line_cw: side_literals(table, cd, &on_line, false),
            side_cw: side_literals(table, ab, path.internal(), false),
            path,
        });
    }
    Ok(out)
}

type SingleParts = (VariableTable, Vec<Clause>, (usize, usize, usize));

fn single_path_clauses(graph: &Graph, options: &EncodeOptions) -> Result<SingleParts, EncodeError> {
    let pairs = constrained_pairs(graph, options.shared_endpoint);
    let mut table = VariableTable::with_pair_side_vars(graph.vertex_count(), pairs.iter().copied());
    let frozen = table.clone();
    let groups: Vec<Vec<KeyPathClauses>> = pairs
        .par_iter()
        .map(|&key| single_group(graph, &frozen, key, options))
        .collect::<Result<_, _>>()?;

    let mut clauses = Vec::new();
    let (mut definitions, mut constraints) = (0, 0);
    for (&(ab, cd), group) in pairs.iter().zip(groups) {
        let s = table
            .pair_side_var(ab, cd)
            .expect("side variable for every pair");
        for kp in group {
            let k = Lit::positive(table.push_key_path(KeyPathVar {
                path: kp.path,
                line: cd,
            }));
            let mut all_cw = kp.line_cw.clone();
            all_cw.push(k);
            let mut all_ccw: Vec<Lit> = kp.line_cw.iter().map(|&l| !l).collect();
            all_ccw.push(k);
            let mut cw = vec![!k, Lit::negative(s)];
            cw.extend(kp.side_cw.iter().copied());
            let mut ccw = vec![!k, Lit::positive(s)];
            ccw.extend(kp.side_cw.iter().map(|&l| !l));
            clauses.extend([all_cw, all_ccw, cw, ccw]);
            definitions += 2;
            constraints += 2;
        }
    }
    Ok((table, clauses, (0, definitions, constraints)))
}
