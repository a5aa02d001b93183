//! Small undirected simple graphs and the families used by the encoders.
//!
//! Every generator uses a fixed, documented vertex labeling so that the
//! SAT instances built from its output are byte-reproducible.

mod format;

pub use format::{
    parse_graph, parse_graph6, parse_graph_json, serialize_graph, FormatError, GraphJson,
};

use std::collections::BTreeSet;
use std::fmt;

use sha2::{Digest, Sha256};
use thiserror::Error;

/// A vertex id, always in `0..n`.
pub type Vertex = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("self-loop at vertex {0}")]
    SelfLoop(Vertex),
    #[error("edge {{{0},{1}}} listed twice")]
    DuplicateEdge(Vertex, Vertex),
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: Vertex, n: usize },
    #[error("invalid parameters for {generator}: {reason}")]
    InvalidParameter {
        generator: &'static str,
        reason: String,
    },
    #[error("unknown graph `{name}`; known graphs: {catalog}")]
    UnknownName { name: String, catalog: String },
}

/// An undirected simple graph on vertices `0..n`.
///
/// Immutable after construction; adjacency lists are kept sorted so that
/// every traversal visits neighbors in ascending order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    edges: BTreeSet<(Vertex, Vertex)>,
    adjacency: Vec<Vec<Vertex>>,
}

impl Graph {
    /// The edgeless graph on `n` vertices.
    pub fn empty(n: usize) -> Self {
        Graph {
            n,
            edges: BTreeSet::new(),
            adjacency: vec![Vec::new(); n],
        }
    }

    /// Builds a graph from an edge list, rejecting loops, duplicates and
    /// out-of-range endpoints. Edge orientation in the input is irrelevant.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (Vertex, Vertex)>,
    {
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: w, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            let e = (u.min(v), u.max(v));
            if !set.insert(e) {
                return Err(GraphError::DuplicateEdge(e.0, e.1));
            }
        }
        Ok(Self::from_edge_set(n, set))
    }

    fn from_edge_set(n: usize, edges: BTreeSet<(Vertex, Vertex)>) -> Self {
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in &edges {
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Graph {
            n,
            edges,
            adjacency,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.edges.iter().copied()
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }

    /// Neighbors of `v` in ascending order.
    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adjacency[v].len()
    }

    /// All unordered pairs `(a, b)`, `a < b`, that are not edges, in
    /// lexicographic order.
    pub fn non_edges(&self) -> Vec<(Vertex, Vertex)> {
        let mut out = Vec::with_capacity(self.n * self.n.saturating_sub(1) / 2 - self.edges.len());
        for a in 0..self.n {
            for b in a + 1..self.n {
                if !self.edges.contains(&(a, b)) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// Number of connected components (isolated vertices count).
    pub fn component_count(&self) -> usize {
        let mut seen = vec![false; self.n];
        let mut count = 0;
        let mut stack = Vec::new();
        for start in 0..self.n {
            if seen[start] {
                continue;
            }
            count += 1;
            seen[start] = true;
            stack.push(start);
            while let Some(v) = stack.pop() {
                for &w in &self.adjacency[v] {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        count
    }

    /// Hex SHA-256 of the canonical JSON serialization.
    pub fn content_hash(&self) -> String {
        let digest = Sha256::digest(serialize_graph(self).as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n)
            .field("edges", &self.edges)
            .finish()
    }
}

/// The skeleton `X_n` of the gyroelongated `n`-bipyramid.
///
/// Labeling: vertex `0` is the top hub, `1..=n` is the top rim in cyclic
/// order, `n+1..=2n` is the bottom rim, and `2n+1` is the bottom hub.
/// Top rim vertex `i` (`1 <= i <= n`) is joined to bottom rim vertices
/// `n+i` and `n+i-1` (cyclically), so the connecting cycle reads
/// `1, n+1, 2, n+2, ..., n, 2n`.
pub fn gyro_bipyramid(n: usize) -> Result<Graph, GraphError> {
    if n < 3 {
        return Err(GraphError::InvalidParameter {
            generator: "gyro_bipyramid",
            reason: format!("need n >= 3, got {n}"),
        });
    }
    let top_hub = 0;
    let bottom_hub = 2 * n + 1;
    let top = |i: usize| 1 + i % n;
    let bottom = |i: usize| n + 1 + i % n;
    let mut edges = Vec::with_capacity(6 * n);
    for i in 0..n {
        edges.push((top_hub, top(i)));
        edges.push((bottom_hub, bottom(i)));
        edges.push((top(i), top(i + 1)));
        edges.push((bottom(i), bottom(i + 1)));
        edges.push((top(i), bottom(i)));
        edges.push((bottom(i), top(i + 1)));
    }
    Graph::from_edges(2 * n + 2, edges)
}

/// `K*_{a,b}`: `K_{a,b}` with the matching `{i, a+i}` (`i < a`) removed.
/// Classes are `0..a` and `a..a+b`.
pub fn k_star(a: usize, b: usize) -> Result<Graph, GraphError> {
    if a < 1 || b < a {
        return Err(GraphError::InvalidParameter {
            generator: "k_star",
            reason: format!("need 1 <= a <= b, got a={a}, b={b}"),
        });
    }
    let edges = (0..a)
        .flat_map(|i| (0..b).map(move |j| (i, j)))
        .filter(|&(i, j)| i != j)
        .map(|(i, j)| (i, a + j));
    Graph::from_edges(a + b, edges)
}

/// `C_n` on `0..n` with edges `{i, i+1 mod n}`.
pub fn cycle(n: usize) -> Result<Graph, GraphError> {
    if n < 3 {
        return Err(GraphError::InvalidParameter {
            generator: "cycle",
            reason: format!("need n >= 3, got {n}"),
        });
    }
    Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n)))
}

/// The path `0 - 1 - ... - (n-1)`.
pub fn path(n: usize) -> Graph {
    Graph::from_edges(n, (1..n).map(|i| (i - 1, i))).expect("path edges are valid")
}

pub fn complete(n: usize) -> Graph {
    Graph::from_edges(n, (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))))
        .expect("complete edges are valid")
}

/// Complete multipartite graph; part `k` occupies a contiguous id range in
/// the given order.
pub fn complete_multipartite(parts: &[usize]) -> Graph {
    let mut class = Vec::new();
    for (k, &size) in parts.iter().enumerate() {
        class.extend(std::iter::repeat_n(k, size));
    }
    let n = class.len();
    let edges = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .filter(|&(a, b)| class[a] != class[b]);
    Graph::from_edges(n, edges).expect("multipartite edges are valid")
}

pub fn complete_bipartite(a: usize, b: usize) -> Graph {
    complete_multipartite(&[a, b])
}

/// Wheel `W_n`: hub `0`, rim `1..=n` as a cycle.
pub fn wheel(n: usize) -> Result<Graph, GraphError> {
    if n < 3 {
        return Err(GraphError::InvalidParameter {
            generator: "wheel",
            reason: format!("need n >= 3, got {n}"),
        });
    }
    let spokes = (1..=n).map(|i| (0, i));
    let rim = (0..n).map(|i| (1 + i, 1 + (i + 1) % n));
    Graph::from_edges(n + 1, spokes.chain(rim))
}

/// Generalized Petersen graph `GP(n, k)`: outer cycle `0..n`, spokes
/// `{i, n+i}`, inner edges `{n+i, n+(i+k mod n)}`.
pub fn generalized_petersen(n: usize, k: usize) -> Result<Graph, GraphError> {
    if n < 3 || k < 1 || 2 * k >= n {
        return Err(GraphError::InvalidParameter {
            generator: "generalized_petersen",
            reason: format!("need n >= 3 and 1 <= k < n/2, got n={n}, k={k}"),
        });
    }
    let outer = (0..n).map(|i| (i, (i + 1) % n));
    let spokes = (0..n).map(|i| (i, n + i));
    let inner = (0..n).map(|i| (n + i, n + (i + k) % n));
    Graph::from_edges(2 * n, outer.chain(spokes).chain(inner))
}

/// Relabels `second` by `+first.vertex_count()` and places it beside `first`.
pub fn disjoint_union(first: &Graph, second: &Graph) -> Graph {
    let shift = first.n;
    let edges = first
        .edges()
        .chain(second.edges().map(|(u, v)| (u + shift, v + shift)))
        .collect();
    Graph::from_edge_set(first.n + second.n, edges)
}

/// The subgraph induced by `vertices`, relabeled `0..k` in ascending order of
/// the original ids. Repeated ids are ignored.
pub fn induced_subgraph(graph: &Graph, vertices: &[Vertex]) -> Result<Graph, GraphError> {
    let mut keep: Vec<Vertex> = vertices.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if let Some(&bad) = keep.iter().find(|&&v| v >= graph.n) {
        return Err(GraphError::VertexOutOfRange {
            vertex: bad,
            n: graph.n,
        });
    }
    let mut new_id = vec![usize::MAX; graph.n];
    for (i, &v) in keep.iter().enumerate() {
        new_id[v] = i;
    }
    let edges = graph
        .edges()
        .filter(|&(u, v)| new_id[u] != usize::MAX && new_id[v] != usize::MAX)
        .map(|(u, v)| (new_id[u], new_id[v]))
        .collect();
    Ok(Graph::from_edge_set(keep.len(), edges))
}

/// Names accepted by [`named_graph`].
pub const CATALOG: &[&str] = &[
    "petersen",
    "icosahedron",
    "dodecahedron",
    "cycle(n)",
    "path(n)",
    "empty(n)",
    "complete(n)",
    "complete_bipartite(a,b)",
    "complete_multipartite(a,b,...)",
    "wheel(n)",
    "gyro(n)",
    "kstar(a,b)",
];

/// Looks up a graph by catalog name, e.g. `petersen` or `cycle(8)`.
///
/// `icosahedron` is `gyro(5)`; `dodecahedron` is `GP(10,2)` and `petersen`
/// is `GP(5,2)` under the [`generalized_petersen`] labeling.
pub fn named_graph(name: &str) -> Result<Graph, GraphError> {
    let unknown = || GraphError::UnknownName {
        name: name.to_string(),
        catalog: CATALOG.join(", "),
    };
    let compact: String = name.chars().filter(|c| !c.is_whitespace()).collect();
    let compact = compact.to_ascii_lowercase();
    let (head, args) = match compact.find('(') {
        Some(open) => {
            let inner = compact[open + 1..].strip_suffix(')').ok_or_else(unknown)?;
            let args = inner
                .split(',')
                .map(|s| s.parse::<usize>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| unknown())?;
            (&compact[..open], args)
        }
        None => (compact.as_str(), Vec::new()),
    };
    let one = |args: &[usize]| match args {
        [k] => Ok(*k),
        _ => Err(unknown()),
    };
    let two = |args: &[usize]| match args {
        [a, b] => Ok((*a, *b)),
        _ => Err(unknown()),
    };
    match head {
        "petersen" if args.is_empty() => generalized_petersen(5, 2),
        "icosahedron" if args.is_empty() => gyro_bipyramid(5),
        "dodecahedron" if args.is_empty() => generalized_petersen(10, 2),
        "cycle" => cycle(one(&args)?),
        "path" => Ok(path(one(&args)?)),
        "empty" => Ok(Graph::empty(one(&args)?)),
        "complete" => Ok(complete(one(&args)?)),
        "complete_bipartite" => {
            let (a, b) = two(&args)?;
            Ok(complete_bipartite(a, b))
        }
        "complete_multipartite" if !args.is_empty() => Ok(complete_multipartite(&args)),
        "wheel" => wheel(one(&args)?),
        "gyro" => gyro_bipyramid(one(&args)?),
        "kstar" => {
            let (a, b) = two(&args)?;
            k_star(a, b)
        }
        _ => Err(unknown()),
    }
}
