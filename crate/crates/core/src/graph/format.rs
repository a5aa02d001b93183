//! Text formats for graphs.
//!
//! The canonical, writable format is compact JSON:
//!
//! ```text
//! {"n":4,"edges":[[0,1],[1,2],[2,3]]}
//! ```
//!
//! with every edge written as `[u,v]`, `u < v`, edges sorted
//! lexicographically, and a trailing newline. graph6 is accepted on input
//! only.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Graph, GraphError};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("graph JSON, line {line}, column {column}: {message}")]
    Json {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("graph6, byte offset {offset}: {message}")]
    Graph6 { offset: usize, message: String },
    #[error("invalid graph: {0}")]
    Graph(#[from] GraphError),
}

/// Serde form of the JSON graph format.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphJson {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
}

impl GraphJson {
    pub fn from_graph(graph: &Graph) -> Self {
        GraphJson {
            n: graph.vertex_count(),
            edges: graph.edges().map(|(u, v)| [u, v]).collect(),
        }
    }

    pub fn to_graph(&self) -> Result<Graph, GraphError> {
        Graph::from_edges(self.n, self.edges.iter().map(|&[u, v]| (u, v)))
    }
}

/// Canonical JSON text for `graph`.
pub fn serialize_graph(graph: &Graph) -> String {
    let doc = GraphJson::from_graph(graph);
    let mut text = serde_json::to_string(&doc).expect("graph JSON serializes");
    text.push('\n');
    text
}

pub fn parse_graph_json(text: &str) -> Result<Graph, FormatError> {
    let doc: GraphJson = serde_json::from_str(text).map_err(|e| FormatError::Json {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    Ok(doc.to_graph()?)
}

/// Decodes one graph6 string (an optional `>>graph6<<` header is allowed).
pub fn parse_graph6(text: &str) -> Result<Graph, FormatError> {
    let trimmed = text.trim();
    let (body, base) = match trimmed.strip_prefix(">>graph6<<") {
        Some(rest) => (rest, ">>graph6<<".len()),
        None => (trimmed, 0),
    };
    let bytes = body.as_bytes();
    let err = |offset: usize, message: &str| FormatError::Graph6 {
        offset: base + offset,
        message: message.to_string(),
    };
    for (i, &b) in bytes.iter().enumerate() {
        if !(63..=126).contains(&b) {
            return Err(err(
                i,
                &format!("byte {b:#04x} outside the printable range 63..=126"),
            ));
        }
    }
    let six = |i: usize| (bytes[i] - 63) as usize;
    let (n, header_len) = match bytes.first() {
        None => return Err(err(0, "empty input")),
        Some(&126) => {
            if bytes.get(1) == Some(&126) {
                return Err(err(
                    1,
                    "graphs with more than 258047 vertices are not supported",
                ));
            }
            if bytes.len() < 4 {
                return Err(err(bytes.len(), "truncated vertex count"));
            }
            ((six(1) << 12) | (six(2) << 6) | six(3), 4)
        }
        Some(_) => (six(0), 1),
    };
    let bits = n * n.saturating_sub(1) / 2;
    let expected = header_len + bits.div_ceil(6);
    if bytes.len() != expected {
        return Err(err(
            bytes.len().min(expected),
            &format!(
                "expected {expected} bytes for {n} vertices, found {}",
                bytes.len()
            ),
        ));
    }
    let mut edges = Vec::new();
    let mut k = 0;
    for j in 1..n {
        for i in 0..j {
            let byte = six(header_len + k / 6);
            if byte & (1 << (5 - k % 6)) != 0 {
                edges.push((i, j));
            }
            k += 1;
        }
    }
    if bits % 6 != 0 && six(bytes.len() - 1) & ((1 << (6 - bits % 6)) - 1) != 0 {
        return Err(err(bytes.len() - 1, "nonzero padding bits"));
    }
    Ok(Graph::from_edges(n, edges)?)
}

/// Parses either format: input whose first non-blank character is `{` is
/// JSON, anything else is graph6.
pub fn parse_graph(text: &str) -> Result<Graph, FormatError> {
    if text.trim_start().starts_with('{') {
        parse_graph_json(text)
    } else {
        parse_graph6(text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete, cycle, gyro_bipyramid};

    #[test]
    fn json_shape() {
        let text = serialize_graph(&cycle(3).unwrap());
        assert_eq!(text, "{\"n\":3,\"edges\":[[0,1],[0,2],[1,2]]}\n");
    }

    #[test]
    fn json_round_trip() {
        let x4 = gyro_bipyramid(4).unwrap();
        assert_eq!(parse_graph(&serialize_graph(&x4)).unwrap(), x4);
    }

    #[test]
    fn json_errors_carry_position() {
        let err = parse_graph("{\"n\": 3,\n \"edges\": [[0,1],[1,]]}").unwrap_err();
        match err {
            FormatError::Json { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_graph("{\"n\": 2, \"edges\": [[0,2]]}"),
            Err(FormatError::Graph(GraphError::VertexOutOfRange { .. }))
        ));
        assert!(parse_graph("{\"n\": 2, \"edges\": [[0,1]], \"x\": 1}").is_err());
    }

    #[test]
    fn graph6_empty_family() {
        // 'D' = 63 + 5; ten zero bits fit in two '?' bytes.
        let g = parse_graph("D??").unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (5, 0));
        let g = parse_graph6("@").unwrap();
        assert_eq!(g.vertex_count(), 1);
        let g = parse_graph6("?").unwrap();
        assert_eq!(g.vertex_count(), 0);
    }

    #[test]
    fn graph6_decodes_edges() {
        // Bits for "DQc": Q = 010010, c = 100100 over pairs
        // (0,1),(0,2),(1,2),(0,3),(1,3),(2,3),(0,4),(1,4),(2,4),(3,4).
        let g = parse_graph6("DQc").unwrap();
        let edges: Vec<_> = g.edges().collect();
        assert_eq!(edges, vec![(0, 2), (0, 4), (1, 3), (3, 4)]);
        assert_eq!(parse_graph6(">>graph6<<D~{").unwrap(), complete(5));
    }

    #[test]
    fn graph6_long_header() {
        // n = 63 needs the 4-byte form.
        let bits: usize = 63 * 62 / 2;
        let mut s = String::from("~??~");
        s.extend(std::iter::repeat_n('?', bits.div_ceil(6)));
        let g = parse_graph6(&s).unwrap();
        assert_eq!(g.vertex_count(), 63);
    }

    #[test]
    fn graph6_errors() {
        assert!(matches!(
            parse_graph6("D?"),
            Err(FormatError::Graph6 { .. })
        ));
        assert!(matches!(
            parse_graph6("D? "),
            Err(FormatError::Graph6 { .. })
        ));
        // Padding bits must be zero: 10 bits in 12, last two are padding.
        assert!(matches!(
            parse_graph6("D?@"),
            Err(FormatError::Graph6 { .. })
        ));
        assert!(parse_graph6("").is_err());
    }
}
