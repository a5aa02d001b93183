//! The satisfying assignment a valid drawing induces on an instance.

use crate::cnf::{eval_model, Model};
use crate::encode::{Encoding, KeyPathScope, Mode};
use crate::graph::{Graph, Vertex};
use crate::orientation::derive_chirotope;

use super::{check_representation, ObstacleDrawing, VerifyError};

/// Whether some `a,b`-path has all internal vertices in `allowed`.
fn path_through(graph: &Graph, a: Vertex, b: Vertex, allowed: impl Fn(Vertex) -> bool) -> bool {
    let mut seen = vec![false; graph.vertex_count()];
    seen[a] = true;
    let mut stack = vec![a];
    while let Some(v) = stack.pop() {
        for &w in graph.neighbors(v) {
            if w == b {
                return true;
            }
            if !seen[w] && allowed(w) {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    false
}

/// Reads the instance's variables off a valid drawing:
///
/// * `x{a,b,c}` from the orientation of the points;
/// * `s{a,b}` true unless some `a,b`-path has every internal vertex on the
///   counterclockwise side of `ab` (the obstacle then sits on the clockwise
///   side);
/// * `s{a,b|c,d}` likewise, over the key paths of line `cd` only;
/// * `k{P|cd}` true iff the vertices of `P` other than `c, d` lie on one
///   side of line `cd`.
///
/// The model is checked against the instance before it is returned.
pub fn assignment_of_drawing(
    d: &ObstacleDrawing,
    encoding: &Encoding,
) -> Result<Model, VerifyError> {
    let hash = d.graph().content_hash();
    if hash != encoding.graph_hash {
        return Err(VerifyError::GraphMismatch {
            drawing: hash,
            instance: encoding.graph_hash.clone(),
        });
    }
    if !check_representation(d).valid {
        return Err(VerifyError::InvalidDrawing);
    }
    match encoding.mode {
        Mode::Outside if d.obstacles().len() > 1 || d.obstacles().iter().any(|o| !o.outside) => {
            return Err(VerifyError::Unsupported(
                "the outside instance needs a drawing with at most one obstacle, declared outside"
                    .into(),
            ))
        }
        Mode::Single if d.obstacles().len() > 1 => {
            return Err(VerifyError::Unsupported(
                "the single instance needs a drawing with at most one obstacle".into(),
            ))
        }
        _ => {}
    }

    let chi = derive_chirotope(d.points())?;
    let graph = d.graph();
    let table = &encoding.table;
    let mut model = Model::all_false(table.num_vars());
    for (t, cw) in chi.entries() {
        model.set(table.triple_var(t), cw);
    }
    let cw = |a: Vertex, b: Vertex, v: Vertex| chi.is_clockwise(a, b, v);

    for ((a, b), id) in table.side_vars() {
        model.set(id, !path_through(graph, a, b, |v| !cw(a, b, v)));
    }

    let avoid = encoding.options.key_paths == KeyPathScope::AvoidLine;
    for (((a, b), (c, dd)), id) in table.pair_side_vars() {
        let on_line = |v: Vertex| v == c || v == dd;
        let ccw_key_path = [true, false].into_iter().any(|side| {
            let on_side = |v: Vertex| on_line(v) || cw(c, dd, v) == side;
            on_side(a)
                && on_side(b)
                && path_through(graph, a, b, |v| {
                    !(avoid && on_line(v)) && on_side(v) && !cw(a, b, v)
                })
        });
        model.set(id, !ccw_key_path);
    }

    for (id, kp) in table.key_path_vars() {
        let (c, dd) = kp.line;
        let mut sides = kp
            .path
            .vertices()
            .iter()
            .filter(|&&v| v != c && v != dd)
            .map(|&v| cw(c, dd, v));
        let first = sides.next();
        model.set(id, first.is_some_and(|f| sides.all(|s| s == f)));
    }

    let eval = eval_model(&encoding.instance, &model).expect("model covers every variable");
    match eval.first_violated {
        Some(clause) => Err(VerifyError::AssignmentViolates { clause }),
        None => Ok(model),
    }
}
