//! Exact orientation predicate and chirotopes of planar point sets.
//!
//! Coordinates are arbitrary-precision rationals. A triple `abc` is
//! clockwise when `det [[ax,bx,cx],[ay,by,cy],[1,1,1]] < 0`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OrientationError {
    #[error("points {0}, {1}, {2} are collinear")]
    Collinear(usize, usize, usize),
    #[error("orientation of triple {{{0},{1},{2}}} is not assigned")]
    Unassigned(usize, usize, usize),
    #[error("triple {0:?} is not a sorted triple of distinct points below {1}")]
    BadTriple([usize; 3], usize),
    #[error("point list, entry {index}: {message}")]
    Format { index: usize, message: String },
    #[error("point JSON: {0}")]
    Json(String),
}

/// A point with exact rational coordinates.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExactPoint {
    pub x: BigRational,
    pub y: BigRational,
}

impl ExactPoint {
    pub fn new(x: BigRational, y: BigRational) -> Self {
        ExactPoint { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        ExactPoint {
            x: BigRational::from_integer(BigInt::from(x)),
            y: BigRational::from_integer(BigInt::from(y)),
        }
    }

    /// `x = x_num / x_den`, `y = y_num / y_den`. Panics on a zero denominator.
    pub fn from_fractions(x_num: i64, x_den: i64, y_num: i64, y_den: i64) -> Self {
        ExactPoint {
            x: BigRational::new(x_num.into(), x_den.into()),
            y: BigRational::new(y_num.into(), y_den.into()),
        }
    }

    pub fn translate(&self, dx: &BigRational, dy: &BigRational) -> Self {
        ExactPoint::new(&self.x + dx, &self.y + dy)
    }

    pub fn scale(&self, factor: &BigRational) -> Self {
        ExactPoint::new(&self.x * factor, &self.y * factor)
    }

    /// Point on the segment from `self` to `other` at parameter `t`.
    pub fn lerp(&self, other: &ExactPoint, t: &BigRational) -> Self {
        ExactPoint::new(
            &self.x + (&other.x - &self.x) * t,
            &self.y + (&other.y - &self.y) * t,
        )
    }
}

impl fmt::Debug for ExactPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Orientation {
    Clockwise,
    CounterClockwise,
    Collinear,
}

impl Orientation {
    pub fn reversed(self) -> Self {
        match self {
            Orientation::Clockwise => Orientation::CounterClockwise,
            Orientation::CounterClockwise => Orientation::Clockwise,
            Orientation::Collinear => Orientation::Collinear,
        }
    }
}

/// The lifted determinant `[abc]`.
pub fn determinant(a: &ExactPoint, b: &ExactPoint, c: &ExactPoint) -> BigRational {
    (&b.x - &a.x) * (&c.y - &a.y) - (&b.y - &a.y) * (&c.x - &a.x)
}

pub fn orient(a: &ExactPoint, b: &ExactPoint, c: &ExactPoint) -> Orientation {
    let det = determinant(a, b, c);
    if det.is_zero() {
        Orientation::Collinear
    } else if det.is_negative() {
        Orientation::Clockwise
    } else {
        Orientation::CounterClockwise
    }
}

/// Sorts a triple of distinct ids and reports whether `(a, b, c)` is an
/// even permutation of the sorted order.
pub fn canonical_triple(a: usize, b: usize, c: usize) -> ([usize; 3], bool) {
    let mut t = [a, b, c];
    let mut even = true;
    // Three-element bubble sort; each swap flips parity.
    for (i, j) in [(0, 1), (1, 2), (0, 1)] {
        if t[i] > t[j] {
            t.swap(i, j);
            even = !even;
        }
    }
    (t, even)
}

/// Lexicographic rank of a sorted triple among all sorted triples of `0..n`.
pub fn triple_rank(n: usize, t: [usize; 3]) -> usize {
    debug_assert!(t[0] < t[1] && t[1] < t[2] && t[2] < n);
    let c2 = |m: usize| m * m.saturating_sub(1) / 2;
    let c3 = |m: usize| m * m.saturating_sub(1) * m.saturating_sub(2) / 6;
    // Triples whose first element is below t[0], then within the block.
    let before_first = c3(n) - c3(n - t[0]);
    let rest = n - t[0] - 1;
    let before_second = c2(rest) - c2(n - t[1]);
    before_first + before_second + (t[2] - t[1] - 1)
}

/// All sorted triples of `0..n` in lexicographic order.
pub fn sorted_triples(n: usize) -> impl Iterator<Item = [usize; 3]> {
    (0..n).flat_map(move |a| (a + 1..n).flat_map(move |b| (b + 1..n).map(move |c| [a, b, c])))
}

/// A total assignment of clockwise / counter-clockwise to every triple of
/// `0..n`, stored by sorted triple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chirotope {
    n: usize,
    clockwise: Vec<bool>,
}

impl Chirotope {
    /// Builds a chirotope from an assignment of sorted triples, where `true`
    /// means the sorted-order triple is clockwise. Every triple must appear.
    pub fn from_assignment<I>(n: usize, entries: I) -> Result<Self, OrientationError>
    where
        I: IntoIterator<Item = ([usize; 3], bool)>,
    {
        let total = sorted_triples(n).count();
        let mut slots: Vec<Option<bool>> = vec![None; total];
        for (t, cw) in entries {
            if !(t[0] < t[1] && t[1] < t[2] && t[2] < n) {
                return Err(OrientationError::BadTriple(t, n));
            }
            slots[triple_rank(n, t)] = Some(cw);
        }
        let mut clockwise = Vec::with_capacity(total);
        for (t, slot) in sorted_triples(n).zip(slots) {
            clockwise.push(slot.ok_or(OrientationError::Unassigned(t[0], t[1], t[2]))?);
        }
        Ok(Chirotope { n, clockwise })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Whether the ordered triple `(a, b, c)` of distinct ids is clockwise.
    pub fn is_clockwise(&self, a: usize, b: usize, c: usize) -> bool {
        let (t, even) = canonical_triple(a, b, c);
        self.clockwise[triple_rank(self.n, t)] == even
    }

    pub fn orientation(&self, a: usize, b: usize, c: usize) -> Orientation {
        if self.is_clockwise(a, b, c) {
            Orientation::Clockwise
        } else {
            Orientation::CounterClockwise
        }
    }

    /// `(sorted triple, clockwise)` pairs in lexicographic order.
    pub fn entries(&self) -> impl Iterator<Item = ([usize; 3], bool)> + '_ {
        sorted_triples(self.n).zip(self.clockwise.iter().copied())
    }
}

/// Orientation of every triple of `points`; fails on the first collinear
/// triple in lexicographic order.
pub fn derive_chirotope(points: &[ExactPoint]) -> Result<Chirotope, OrientationError> {
    let n = points.len();
    let mut clockwise = Vec::with_capacity(sorted_triples(n).count());
    for [a, b, c] in sorted_triples(n) {
        match orient(&points[a], &points[b], &points[c]) {
            Orientation::Collinear => return Err(OrientationError::Collinear(a, b, c)),
            o => clockwise.push(o == Orientation::Clockwise),
        }
    }
    Ok(Chirotope { n, clockwise })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum AxiomRule {
    /// `abc, acd, adb` clockwise forces `bcd` clockwise.
    FourPoint,
    /// `abc, acd, ade, abe, ace` clockwise forces `abd` clockwise.
    FivePointAceToAbd,
    /// `abc, acd, ade, abe, abd` clockwise forces `ace` clockwise.
    FivePointAbdToAce,
}

/// One violated instantiation of an orientation axiom.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct AxiomViolation {
    pub rule: AxiomRule,
    /// The ordered tuple `(a, b, c, d)` or `(a, b, c, d, e)`.
    pub points: Vec<usize>,
}

/// Every violated instantiation of the 4-point rule and of the two clauses
/// of the 5-point rule.
///
/// Instantiations that are the same statement are reported once. The
/// 4-point rule and [`AxiomRule::FivePointAceToAbd`] are unchanged by
/// rotating `(b, c, d)`, so only tuples with `b = min(b, c, d)` are
/// reported; [`AxiomRule::FivePointAbdToAce`] is unchanged by rotating
/// `(c, d, e)` and is reported with `c = min(c, d, e)`.
pub fn check_axioms(chi: &Chirotope) -> Vec<AxiomViolation> {
    let n = chi.n;
    let cw = |a, b, c| chi.is_clockwise(a, b, c);
    let mut out = Vec::new();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let distinct = a != b && a != c && a != d && b != c && b != d && c != d;
                    if !distinct || b > c || b > d {
                        continue;
                    }
                    if cw(a, b, c) && cw(a, c, d) && cw(a, d, b) && !cw(b, c, d) {
                        out.push(AxiomViolation {
                            rule: AxiomRule::FourPoint,
                            points: vec![a, b, c, d],
                        });
                    }
                }
            }
        }
    }
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    for e in 0..n {
                        let ids = [a, b, c, d, e];
                        let distinct = (0..5).all(|i| (i + 1..5).all(|j| ids[i] != ids[j]));
                        if !distinct {
                            continue;
                        }
                        let premise = cw(a, b, c) && cw(a, c, d) && cw(a, d, e) && cw(a, b, e);
                        if !premise {
                            continue;
                        }
                        let (abd, ace) = (cw(a, b, d), cw(a, c, e));
                        if ace && !abd && b < c && b < d {
                            out.push(AxiomViolation {
                                rule: AxiomRule::FivePointAceToAbd,
                                points: ids.to_vec(),
                            });
                        }
                        if abd && !ace && c < d && c < e {
                            out.push(AxiomViolation {
                                rule: AxiomRule::FivePointAbdToAce,
                                points: ids.to_vec(),
                            });
                        }
                    }
                }
            }
        }
    }
    out
}

/// Deterministic perturbation into general position: point `i` moves by
/// `eps * (i, i^2)` with `eps = 2^-k` for the smallest `k >= 1` that leaves
/// no collinear triple and no coincident points. Returns the moved points
/// and `eps`.
pub fn perturb_to_general_position(points: &[ExactPoint]) -> (Vec<ExactPoint>, BigRational) {
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let mut eps = half.clone();
    loop {
        let moved: Vec<ExactPoint> = points
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let i = BigRational::from_integer(BigInt::from(i));
                p.translate(&(&eps * &i), &(&eps * &i * &i))
            })
            .collect();
        let distinct = (0..moved.len()).all(|i| (i + 1..moved.len()).all(|j| moved[i] != moved[j]));
        if distinct && derive_chirotope(&moved).is_ok() {
            return (moved, eps);
        }
        eps = &eps * &half;
    }
}

/// One coordinate pair in point-set JSON: `[x, y]` integers, or
/// `[x_num, x_den, y_num, y_den]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PointRecord(pub Vec<i64>);

impl PointRecord {
    pub fn to_point(&self, index: usize) -> Result<ExactPoint, OrientationError> {
        let bad = |message: &str| OrientationError::Format {
            index,
            message: message.to_string(),
        };
        match self.0.as_slice() {
            &[x, y] => Ok(ExactPoint::from_ints(x, y)),
            &[_, 0, _, _] | &[_, _, _, 0] => Err(bad("zero denominator")),
            &[xn, xd, yn, yd] => Ok(ExactPoint::from_fractions(xn, xd, yn, yd)),
            _ => Err(bad("expected [x, y] or [x_num, x_den, y_num, y_den]")),
        }
    }

    /// Integer shorthand when both coordinates are integers, otherwise the
    /// four-number form. Fails if a numerator or denominator exceeds `i64`.
    pub fn from_point(p: &ExactPoint) -> Option<Self> {
        let part = |r: &BigRational| -> Option<(i64, i64)> {
            Some((
                i64::try_from(r.numer()).ok()?,
                i64::try_from(r.denom()).ok()?,
            ))
        };
        let (xn, xd) = part(&p.x)?;
        let (yn, yd) = part(&p.y)?;
        Some(if xd == 1 && yd == 1 {
            PointRecord(vec![xn, yn])
        } else {
            PointRecord(vec![xn, xd, yn, yd])
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointSetJson {
    pub points: Vec<PointRecord>,
}

pub fn parse_points_json(text: &str) -> Result<Vec<ExactPoint>, OrientationError> {
    let doc: PointSetJson =
        serde_json::from_str(text).map_err(|e| OrientationError::Json(e.to_string()))?;
    doc.points
        .iter()
        .enumerate()
        .map(|(i, r)| r.to_point(i))
        .collect()
}
