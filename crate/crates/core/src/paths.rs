//! Simple `a,b`-path enumeration.
//!
//! Paths are produced by depth-first search with ascending neighbor order,
//! starting from the smaller endpoint, so the output is lexicographic by
//! vertex sequence and every path is in canonical direction (`v0 < vk`).

use std::ops::ControlFlow;

use thiserror::Error;

use crate::graph::{Graph, Vertex};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PathError {
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: Vertex, n: usize },
    #[error("path endpoints must differ (got {0} twice)")]
    SameEndpoints(Vertex),
    #[error("maximum path length must be at least 1")]
    ZeroLength,
    #[error("endpoint {0} is in the forbidden set")]
    ForbiddenEndpoint(Vertex),
}

/// A simple path `v0, ..., vk` with consecutive vertices adjacent.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SimplePath(Vec<Vertex>);

impl SimplePath {
    /// Wraps a vertex sequence, reversing it if needed so that `v0 < vk`.
    /// Callers are responsible for adjacency and distinctness.
    pub fn new(mut vertices: Vec<Vertex>) -> Self {
        if vertices.len() > 1 && vertices[0] > vertices[vertices.len() - 1] {
            vertices.reverse();
        }
        SimplePath(vertices)
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.0
    }

    /// Vertices strictly between the endpoints.
    pub fn internal(&self) -> &[Vertex] {
        match self.0.len() {
            0..=2 => &[],
            k => &self.0[1..k - 1],
        }
    }

    /// Number of edges.
    pub fn len(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.0.len() <= 1
    }

    /// Checks distinctness and adjacency against `graph`.
    pub fn is_valid_in(&self, graph: &Graph) -> bool {
        let mut seen = vec![false; graph.vertex_count()];
        for &v in &self.0 {
            if v >= graph.vertex_count() || std::mem::replace(&mut seen[v], true) {
                return false;
            }
        }
        self.0.windows(2).all(|w| graph.has_edge(w[0], w[1]))
    }
}

/// Streams every simple path between `a` and `b` of at most `max_len`
/// edges that avoids `forbidden`, in lexicographic order. The visitor can
/// stop the enumeration early by returning `ControlFlow::Break`.
pub fn for_each_simple_path<F>(
    graph: &Graph,
    a: Vertex,
    b: Vertex,
    max_len: Option<usize>,
    forbidden: &[Vertex],
    mut visit: F,
) -> Result<(), PathError>
where
    F: FnMut(&[Vertex]) -> ControlFlow<()>,
{
    let n = graph.vertex_count();
    for &v in [a, b].iter().chain(forbidden) {
        if v >= n {
            return Err(PathError::VertexOutOfRange { vertex: v, n });
        }
    }
    if a == b {
        return Err(PathError::SameEndpoints(a));
    }
    if max_len == Some(0) {
        return Err(PathError::ZeroLength);
    }
    if let Some(&v) = forbidden.iter().find(|&&v| v == a || v == b) {
        return Err(PathError::ForbiddenEndpoint(v));
    }
    let (start, target) = (a.min(b), a.max(b));
    let limit = max_len.unwrap_or(n).min(n.saturating_sub(1));

    let mut blocked = vec![false; n];
    for &v in forbidden {
        blocked[v] = true;
    }
    blocked[start] = true;
    let mut stack: Vec<Vertex> = vec![start];
    // Next neighbor index to try for each vertex on the stack.
    let mut cursor: Vec<usize> = vec![0];

    while let Some(&top) = stack.last() {
        let depth = cursor.len() - 1;
        let neighbors = graph.neighbors(top);
        let i = cursor[depth];
        if i >= neighbors.len() || stack.len() > limit {
            stack.pop();
            cursor.pop();
            blocked[top] = false;
            continue;
        }
        cursor[depth] += 1;
        let next = neighbors[i];
        if next == target {
            stack.push(target);
            let flow = visit(&stack);
            stack.pop();
            if flow.is_break() {
                return Ok(());
            }
        } else if !blocked[next] {
            blocked[next] = true;
            stack.push(next);
            cursor.push(0);
        }
    }
    Ok(())
}

/// All simple `a,b`-paths with at most `max_len` edges (all lengths when
/// `None`), lexicographic by vertex sequence.
pub fn simple_paths(
    graph: &Graph,
    a: Vertex,
    b: Vertex,
    max_len: Option<usize>,
) -> Result<Vec<SimplePath>, PathError> {
    paths_avoiding(graph, a, b, &[], max_len)
}

/// [`simple_paths`] restricted to paths that contain no vertex of
/// `forbidden`.
pub fn paths_avoiding(
    graph: &Graph,
    a: Vertex,
    b: Vertex,
    forbidden: &[Vertex],
    max_len: Option<usize>,
) -> Result<Vec<SimplePath>, PathError> {
    let mut out = Vec::new();
    for_each_simple_path(graph, a, b, max_len, forbidden, |p| {
        out.push(SimplePath(p.to_vec()));
        ControlFlow::Continue(())
    })?;
    Ok(out)
}
