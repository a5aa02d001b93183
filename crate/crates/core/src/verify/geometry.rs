//! Exact segment and polygon predicates.
//!
//! Polygons are closed regions bounded by a simple counterclockwise vertex
//! cycle. Segments between graph vertices are open: their endpoints never
//! count as meeting anything.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::orientation::{determinant, orient, ExactPoint, Orientation};

/// Parameter of `x` along the line `p + t (q - p)`, assuming `x` lies on it
/// and `p != q`.
fn param(p: &ExactPoint, q: &ExactPoint, x: &ExactPoint) -> BigRational {
    let dx = &q.x - &p.x;
    if !dx.is_zero() {
        (&x.x - &p.x) / dx
    } else {
        (&x.y - &p.y) / (&q.y - &p.y)
    }
}

fn strictly_between(p: &ExactPoint, q: &ExactPoint, x: &ExactPoint) -> bool {
    let t = param(p, q, x);
    t.is_positive() && t < BigRational::one()
}

/// Closed segment `[u, v]` contains `x`.
pub fn on_closed_segment(u: &ExactPoint, v: &ExactPoint, x: &ExactPoint) -> bool {
    if u == v {
        return x == u;
    }
    if orient(u, v, x) != Orientation::Collinear {
        return false;
    }
    let t = param(u, v, x);
    !t.is_negative() && t <= BigRational::one()
}

/// The open segment `(p, q)` meets the closed segment `[u, v]`.
pub fn open_meets_closed(p: &ExactPoint, q: &ExactPoint, u: &ExactPoint, v: &ExactPoint) -> bool {
    use Orientation::*;
    let o1 = orient(p, q, u);
    let o2 = orient(p, q, v);
    match (o1, o2) {
        (Collinear, Collinear) => {
            // Both on the line through p, q: compare parameter intervals.
            let (tu, tv) = (param(p, q, u), param(p, q, v));
            let (lo, hi) = if tu <= tv { (tu, tv) } else { (tv, tu) };
            hi.is_positive() && lo < BigRational::one()
        }
        (Collinear, _) => strictly_between(p, q, u),
        (_, Collinear) => strictly_between(p, q, v),
        (a, b) if a == b => false,
        _ => {
            // u, v strictly on opposite sides of line pq; the crossing
            // point is inside (p, q) iff p, q are strictly on opposite
            // sides of line uv.
            let o3 = orient(u, v, p);
            let o4 = orient(u, v, q);
            o3 != Collinear && o4 != Collinear && o3 != o4
        }
    }
}

/// Closed segments `[p, q]` and `[u, v]` intersect.
pub fn closed_segments_meet(
    p: &ExactPoint,
    q: &ExactPoint,
    u: &ExactPoint,
    v: &ExactPoint,
) -> bool {
    use Orientation::*;
    let o1 = orient(p, q, u);
    let o2 = orient(p, q, v);
    let o3 = orient(u, v, p);
    let o4 = orient(u, v, q);
    if o1 != o2
        && o3 != o4
        && o1 != Collinear
        && o2 != Collinear
        && o3 != Collinear
        && o4 != Collinear
    {
        return true;
    }
    (o1 == Collinear && on_closed_segment(p, q, u))
        || (o2 == Collinear && on_closed_segment(p, q, v))
        || (o3 == Collinear && on_closed_segment(u, v, p))
        || (o4 == Collinear && on_closed_segment(u, v, q))
}

fn edges(poly: &[ExactPoint]) -> impl Iterator<Item = (&ExactPoint, &ExactPoint)> {
    poly.iter().zip(poly.iter().cycle().skip(1))
}

/// Twice the signed area; positive for counterclockwise vertex order.
pub fn signed_area2(poly: &[ExactPoint]) -> BigRational {
    let origin = ExactPoint::from_ints(0, 0);
    edges(poly).fold(BigRational::zero(), |acc, (u, v)| {
        acc + determinant(&origin, u, v)
    })
}

/// `x` lies on the polygon boundary.
pub fn on_boundary(poly: &[ExactPoint], x: &ExactPoint) -> bool {
    edges(poly).any(|(u, v)| on_closed_segment(u, v, x))
}

/// Crossing-number test for a point known not to lie on the boundary.
fn strictly_inside_off_boundary(poly: &[ExactPoint], x: &ExactPoint) -> bool {
    let mut inside = false;
    for (u, v) in edges(poly) {
        let (u_above, v_above) = (u.y > x.y, v.y > x.y);
        if u_above == v_above {
            continue;
        }
        // The rightward ray from x crosses edge uv iff x is left of the
        // edge directed upwards.
        let o = orient(u, v, x);
        let crosses = if v_above {
            o == Orientation::CounterClockwise
        } else {
            o == Orientation::Clockwise
        };
        if crosses {
            inside = !inside;
        }
    }
    inside
}

/// `x` lies in the closed polygon region.
pub fn point_in_closed_polygon(poly: &[ExactPoint], x: &ExactPoint) -> bool {
    on_boundary(poly, x) || strictly_inside_off_boundary(poly, x)
}

/// `x` lies in the open polygon interior.
pub fn point_strictly_inside(poly: &[ExactPoint], x: &ExactPoint) -> bool {
    !on_boundary(poly, x) && strictly_inside_off_boundary(poly, x)
}

/// The open segment `(p, q)` meets the closed region bounded by the simple
/// polygon `poly`.
///
/// If the open segment misses the boundary it lies entirely inside or
/// entirely outside, which its midpoint decides.
pub fn segment_meets_polygon(p: &ExactPoint, q: &ExactPoint, poly: &[ExactPoint]) -> bool {
    if edges(poly).any(|(u, v)| open_meets_closed(p, q, u, v)) {
        return true;
    }
    let half = BigRational::new(1.into(), 2.into());
    strictly_inside_off_boundary(poly, &p.lerp(q, &half))
}

/// Why a vertex list is not a simple counterclockwise polygon.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolygonDefect {
    TooFewVertices,
    RepeatedVertex(usize),
    /// Edges starting at these vertex indices intersect improperly.
    SelfIntersection(usize, usize),
    ZeroArea,
    Clockwise,
}

pub fn polygon_defect(poly: &[ExactPoint]) -> Option<PolygonDefect> {
    let k = poly.len();
    if k < 3 {
        return Some(PolygonDefect::TooFewVertices);
    }
    for i in 0..k {
        if poly[i..].iter().skip(1).any(|p| *p == poly[i]) {
            return Some(PolygonDefect::RepeatedVertex(i));
        }
    }
    for i in 0..k {
        let (a, b) = (&poly[i], &poly[(i + 1) % k]);
        for j in i + 1..k {
            let (c, d) = (&poly[j], &poly[(j + 1) % k]);
            let adjacent = j == i + 1 || (i == 0 && j == k - 1);
            let bad = if adjacent {
                // Shared vertex only, unless the second edge folds back
                // along the first.
                let (shared, far_first, far_second) =
                    if j == i + 1 { (b, a, d) } else { (a, b, c) };
                orient(far_first, shared, far_second) == Orientation::Collinear
                    && (on_closed_segment(shared, far_first, far_second)
                        || on_closed_segment(shared, far_second, far_first))
            } else {
                closed_segments_meet(a, b, c, d)
            };
            if bad {
                return Some(PolygonDefect::SelfIntersection(i, j));
            }
        }
    }
    let area = signed_area2(poly);
    if area.is_zero() {
        Some(PolygonDefect::ZeroArea)
    } else if area.is_negative() {
        Some(PolygonDefect::Clockwise)
    } else {
        None
    }
}

/// Convex hull vertices in counterclockwise order (collinear boundary
/// points dropped). Monotone chain.
pub fn convex_hull(points: &[ExactPoint]) -> Vec<ExactPoint> {
    let mut pts: Vec<&ExactPoint> = points.iter().collect();
    pts.sort_by(|a, b| a.x.cmp(&b.x).then(a.y.cmp(&b.y)));
    pts.dedup();
    if pts.len() < 3 {
        return pts.into_iter().cloned().collect();
    }
    let mut hull: Vec<&ExactPoint> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &&ExactPoint>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for &p in iter {
            while hull.len() >= start + 2
                && orient(hull[hull.len() - 2], hull[hull.len() - 1], p)
                    != Orientation::CounterClockwise
            {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull.into_iter().cloned().collect()
}

/// `x` lies outside the closed convex hull given by [`convex_hull`].
pub fn strictly_outside_hull(hull: &[ExactPoint], x: &ExactPoint) -> bool {
    match hull.len() {
        0 => true,
        1 => *x != hull[0],
        2 => !on_closed_segment(&hull[0], &hull[1], x),
        _ => edges(hull).any(|(u, v)| orient(u, v, x) == Orientation::Clockwise),
    }
}
