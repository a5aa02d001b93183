//! Exact checking of obstacle drawings.
//!
//! A drawing places the vertices at rational points and lists polygonal
//! obstacles. It is a valid obstacle representation when no obstacle meets
//! an edge or a vertex and every non-edge meets some obstacle. Segments are
//! open and obstacles are closed regions, so touching a polygon vertex or
//! edge counts as meeting it.
//!
//! Drawing JSON:
//!
//! ```text
//! {
//!   "graph": {"n": 3, "edges": [[0, 1], [1, 2]]},
//!   "points": [[0, 0], [4, 0], [1, 2, 3, 1]],
//!   "obstacles": [{"outside": true, "vertices": [[1, -1], [3, -1], [2, 5]]}]
//! }
//! ```
//!
//! Points are `[x, y]` integers or `[x_num, x_den, y_num, y_den]`;
//! obstacle vertices are listed counterclockwise.

mod assign;
pub mod geometry;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::encode::{EncodeError, Pair};
use crate::graph::{Graph, GraphError, GraphJson, Vertex};
use crate::orientation::{orient, ExactPoint, Orientation, OrientationError, PointRecord};

pub use assign::assignment_of_drawing;
pub use geometry::PolygonDefect;
use geometry::{
    convex_hull, point_in_closed_polygon, polygon_defect, segment_meets_polygon,
    strictly_outside_hull,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VerifyError {
    #[error("drawing JSON: {0}")]
    Json(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Point(#[from] OrientationError),
    #[error("graph has {expected} vertices but {got} points were given")]
    PointCount { expected: usize, got: usize },
    #[error("vertices {0}, {1}, {2} are collinear")]
    Collinear(Vertex, Vertex, Vertex),
    #[error("vertices {0} and {1} coincide")]
    Coincident(Vertex, Vertex),
    #[error("obstacle {obstacle} is not a simple counterclockwise polygon: {defect:?}")]
    BadPolygon {
        obstacle: usize,
        defect: PolygonDefect,
    },
    #[error("drawing is not a valid obstacle representation")]
    InvalidDrawing,
    #[error("{0}")]
    Unsupported(String),
    #[error("drawing has graph hash {drawing}, instance was built for {instance}")]
    GraphMismatch { drawing: String, instance: String },
    #[error("derived assignment violates clause {clause} of the instance")]
    AssignmentViolates { clause: usize },
    #[error(transparent)]
    Encode(#[from] EncodeError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Obstacle {
    pub vertices: Vec<ExactPoint>,
    /// Declared to lie in the unbounded face of the drawing.
    pub outside: bool,
}

/// A straight-line drawing with polygonal obstacles. Construction checks
/// that no three vertices are collinear and that every obstacle is a
/// simple counterclockwise polygon.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObstacleDrawing {
    graph: Graph,
    points: Vec<ExactPoint>,
    obstacles: Vec<Obstacle>,
}

impl ObstacleDrawing {
    pub fn new(
        graph: Graph,
        points: Vec<ExactPoint>,
        obstacles: Vec<Obstacle>,
    ) -> Result<Self, VerifyError> {
        let n = graph.vertex_count();
        if points.len() != n {
            return Err(VerifyError::PointCount {
                expected: n,
                got: points.len(),
            });
        }
        for a in 0..n {
            for b in a + 1..n {
                if points[a] == points[b] {
                    return Err(VerifyError::Coincident(a, b));
                }
                for c in b + 1..n {
                    if orient(&points[a], &points[b], &points[c]) == Orientation::Collinear {
                        return Err(VerifyError::Collinear(a, b, c));
                    }
                }
            }
        }
        for (obstacle, o) in obstacles.iter().enumerate() {
            if let Some(defect) = polygon_defect(&o.vertices) {
                return Err(VerifyError::BadPolygon { obstacle, defect });
            }
        }
        Ok(ObstacleDrawing {
            graph,
            points,
            obstacles,
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn points(&self) -> &[ExactPoint] {
        &self.points
    }

    pub fn obstacles(&self) -> &[Obstacle] {
        &self.obstacles
    }

    /// Applies `f` to every vertex and obstacle coordinate.
    pub fn map_points(&self, f: impl Fn(&ExactPoint) -> ExactPoint) -> Result<Self, VerifyError> {
        ObstacleDrawing::new(
            self.graph.clone(),
            self.points.iter().map(&f).collect(),
            self.obstacles
                .iter()
                .map(|o| Obstacle {
                    vertices: o.vertices.iter().map(&f).collect(),
                    outside: o.outside,
                })
                .collect(),
        )
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObstacleJson {
    #[serde(default)]
    pub outside: bool,
    pub vertices: Vec<PointRecord>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DrawingJson {
    pub graph: GraphJson,
    pub points: Vec<PointRecord>,
    #[serde(default)]
    pub obstacles: Vec<ObstacleJson>,
}

pub fn parse_drawing(text: &str) -> Result<ObstacleDrawing, VerifyError> {
    let doc: DrawingJson =
        serde_json::from_str(text).map_err(|e| VerifyError::Json(e.to_string()))?;
    let graph = doc.graph.to_graph()?;
    let points = doc
        .points
        .iter()
        .enumerate()
        .map(|(i, r)| r.to_point(i))
        .collect::<Result<Vec<_>, _>>()?;
    let obstacles = doc
        .obstacles
        .iter()
        .map(|o| {
            Ok(Obstacle {
                outside: o.outside,
                vertices: o
                    .vertices
                    .iter()
                    .enumerate()
                    .map(|(i, r)| r.to_point(i))
                    .collect::<Result<Vec<_>, OrientationError>>()?,
            })
        })
        .collect::<Result<Vec<_>, VerifyError>>()?;
    ObstacleDrawing::new(graph, points, obstacles)
}

/// Result of the outer-face test for one obstacle declared outside.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutsideCheck {
    pub obstacle: usize,
    pub passed: bool,
    /// Index of an obstacle vertex strictly outside the convex hull of the
    /// graph vertices.
    pub witness: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub valid: bool,
    pub unblocked_non_edges: Vec<Pair>,
    /// `(edge, obstacle)` pairs where the open edge meets the obstacle.
    pub pierced_edges: Vec<(Pair, usize)>,
    /// `(vertex, obstacle)` pairs where the obstacle contains the vertex.
    pub covered_vertices: Vec<(Vertex, usize)>,
    pub outside_checks: Vec<OutsideCheck>,
}

/// Checks `d` exactly. An outside-declared obstacle passes when it meets no
/// edge or vertex and has a vertex strictly outside the convex hull of the
/// graph vertices: it is then connected, disjoint from the drawing and
/// reaches the unbounded face.
pub fn check_representation(d: &ObstacleDrawing) -> VerificationReport {
    let pts = &d.points;
    let obstacles = &d.obstacles;
    let unblocked_non_edges: Vec<Pair> = d
        .graph
        .non_edges()
        .into_par_iter()
        .filter(|&(a, b)| {
            !obstacles
                .iter()
                .any(|o| segment_meets_polygon(&pts[a], &pts[b], &o.vertices))
        })
        .collect();
    let edges: Vec<Pair> = d.graph.edges().collect();
    let pierced_edges: Vec<(Pair, usize)> = edges
        .par_iter()
        .flat_map_iter(|&(a, b)| {
            obstacles
                .iter()
                .enumerate()
                .filter(move |(_, o)| segment_meets_polygon(&pts[a], &pts[b], &o.vertices))
                .map(move |(i, _)| ((a, b), i))
        })
        .collect();
    let covered_vertices: Vec<(Vertex, usize)> = (0..pts.len())
        .flat_map(|v| {
            obstacles
                .iter()
                .enumerate()
                .filter(move |(_, o)| point_in_closed_polygon(&o.vertices, &pts[v]))
                .map(move |(i, _)| (v, i))
        })
        .collect();
    let hull = convex_hull(pts);
    let outside_checks: Vec<OutsideCheck> = obstacles
        .iter()
        .enumerate()
        .filter(|(_, o)| o.outside)
        .map(|(i, o)| {
            let clear = !pierced_edges.iter().any(|&(_, j)| j == i)
                && !covered_vertices.iter().any(|&(_, j)| j == i);
            let witness = o
                .vertices
                .iter()
                .position(|p| strictly_outside_hull(&hull, p));
            OutsideCheck {
                obstacle: i,
                passed: clear && witness.is_some(),
                witness,
            }
        })
        .collect();
    let valid = unblocked_non_edges.is_empty()
        && pierced_edges.is_empty()
        && covered_vertices.is_empty()
        && outside_checks.iter().all(|c| c.passed);
    VerificationReport {
        valid,
        unblocked_non_edges,
        pierced_edges,
        covered_vertices,
        outside_checks,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete, cycle};

    fn p(x: i64, y: i64) -> ExactPoint {
        ExactPoint::from_ints(x, y)
    }

    #[test]
    fn triangle_without_obstacles_is_valid() {
        let d = ObstacleDrawing::new(complete(3), vec![p(0, 0), p(4, 0), p(1, 3)], vec![]).unwrap();
        let r = check_representation(&d);
        assert!(r.valid);
        assert!(r.outside_checks.is_empty());
    }

    #[test]
    fn square_cycle_without_obstacles_is_invalid() {
        let d = ObstacleDrawing::new(
            cycle(4).unwrap(),
            vec![p(0, 0), p(4, 0), p(4, 4), p(0, 4)],
            vec![],
        )
        .unwrap();
        let r = check_representation(&d);
        assert!(!r.valid);
        assert_eq!(r.unblocked_non_edges, vec![(0, 2), (1, 3)]);
    }

    #[test]
    fn pierced_and_covered_are_reported() {
        let square = vec![p(1, -1), p(3, -1), p(3, 1), p(1, 1)];
        let g = Graph::from_edges(3, [(0, 1)]).unwrap();
        let d = ObstacleDrawing::new(
            g,
            vec![p(0, 0), p(4, 0), ExactPoint::from_fractions(2, 1, 1, 2)],
            vec![Obstacle {
                vertices: square,
                outside: true,
            }],
        )
        .unwrap();
        let r = check_representation(&d);
        assert_eq!(r.pierced_edges, vec![((0, 1), 0)]);
        assert_eq!(r.covered_vertices, vec![(2, 0)]);
        assert!(!r.outside_checks[0].passed);
        assert!(!r.valid);
    }

    #[test]
    fn construction_errors() {
        let g = cycle(4).unwrap();
        assert_eq!(
            ObstacleDrawing::new(g.clone(), vec![p(0, 0), p(1, 0), p(2, 0), p(0, 3)], vec![])
                .unwrap_err(),
            VerifyError::Collinear(0, 1, 2)
        );
        assert!(matches!(
            ObstacleDrawing::new(g.clone(), vec![p(0, 0)], vec![]).unwrap_err(),
            VerifyError::PointCount {
                expected: 4,
                got: 1
            }
        ));
        let cw = Obstacle {
            vertices: vec![p(0, 0), p(0, 1), p(1, 0)],
            outside: false,
        };
        assert_eq!(
            ObstacleDrawing::new(g, vec![p(0, 0), p(4, 0), p(4, 4), p(0, 4)], vec![cw])
                .unwrap_err(),
            VerifyError::BadPolygon {
                obstacle: 0,
                defect: PolygonDefect::Clockwise
            }
        );
    }

    #[test]
    fn inner_obstacle_blocks_square_diagonals() {
        let d = ObstacleDrawing::new(
            cycle(4).unwrap(),
            vec![p(0, 0), p(4, 0), p(4, 4), p(0, 4)],
            vec![Obstacle {
                vertices: vec![p(1, 1), p(3, 1), p(3, 3), p(1, 3)],
                outside: false,
            }],
        )
        .unwrap();
        assert!(check_representation(&d).valid);
        // Declaring it outside fails the hull test.
        let mut obstacles = d.obstacles().to_vec();
        obstacles[0].outside = true;
        let d = ObstacleDrawing::new(d.graph().clone(), d.points().to_vec(), obstacles).unwrap();
        let r = check_representation(&d);
        assert_eq!(
            r.outside_checks,
            vec![OutsideCheck {
                obstacle: 0,
                passed: false,
                witness: None
            }]
        );
        assert!(!r.valid);
    }

    #[test]
    fn drawing_json() {
        let text = r#"{"graph": {"n": 3, "edges": [[0, 1], [1, 2]]},
            "points": [[0, 0], [4, 0], [1, 2, 3, 1]],
            "obstacles": [{"outside": true, "vertices": [[1, -1], [3, -1], [2, 5]]}]}"#;
        let d = parse_drawing(text).unwrap();
        assert_eq!(d.points()[2], ExactPoint::from_fractions(1, 2, 3, 1));
        assert!(d.obstacles()[0].outside);
        assert!(matches!(parse_drawing("{}"), Err(VerifyError::Json(_))));
        assert!(matches!(
            parse_drawing(r#"{"graph": {"n": 1, "edges": []}, "points": [[0, 1, 0, 0]]}"#),
            Err(VerifyError::Point(_))
        ));
    }
}
