//! Orientation axiom clauses.
//!
//! For each `k`-subset, only one representative per class of equivalent
//! instantiations is emitted: rotations of `(b, c, d)` leave the 4-point
//! clause and the first 5-point clause unchanged, and rotations of
//! `(c, d, e)` leave the second 5-point clause unchanged. That gives
//! `24 / 3 = 8` four-point clauses per 4-subset and `2 * 120 / 3 = 80`
//! five-point clauses per 5-subset.
//!
//! The eight four-point representatives of a subset are only two distinct
//! literal sets (each occurs four times); the copies are kept so the count
//! matches the per-subset formula, and the solver drops them on load.

use rayon::prelude::*;

use crate::cnf::{Clause, Lit};

use super::VariableTable;

/// `¬x_abc ∨ ¬x_acd ∨ ¬x_adb ∨ x_bcd`.
pub(crate) fn four_point_clause(vt: &VariableTable, [a, b, c, d]: [usize; 4]) -> Clause {
    vec![
        !vt.lit(a, b, c),
        !vt.lit(a, c, d),
        !vt.lit(a, d, b),
        vt.lit(b, c, d),
    ]
}

/// `¬x_abc ∨ ¬x_acd ∨ ¬x_ade ∨ ¬x_abe ∨ x_abd ∨ ¬x_ace`.
pub(crate) fn five_point_first(vt: &VariableTable, [a, b, c, d, e]: [usize; 5]) -> Clause {
    let mut clause = five_point_premise(vt, a, b, c, d, e);
    clause.push(vt.lit(a, b, d));
    clause.push(!vt.lit(a, c, e));
    clause
}

/// `¬x_abc ∨ ¬x_acd ∨ ¬x_ade ∨ ¬x_abe ∨ ¬x_abd ∨ x_ace`.
pub(crate) fn five_point_second(vt: &VariableTable, [a, b, c, d, e]: [usize; 5]) -> Clause {
    let mut clause = five_point_premise(vt, a, b, c, d, e);
    clause.push(!vt.lit(a, b, d));
    clause.push(vt.lit(a, c, e));
    clause
}

fn five_point_premise(
    vt: &VariableTable,
    a: usize,
    b: usize,
    c: usize,
    d: usize,
    e: usize,
) -> Vec<Lit> {
    vec![
        !vt.lit(a, b, c),
        !vt.lit(a, c, d),
        !vt.lit(a, d, e),
        !vt.lit(a, b, e),
    ]
}

fn subsets<const K: usize>(n: usize) -> Vec<[usize; K]> {
    let mut out = Vec::new();
    if K > n {
        return out;
    }
    let mut idx: [usize; K] = std::array::from_fn(|i| i);
    loop {
        out.push(idx);
        let mut i = K;
        while i > 0 && idx[i - 1] == n - K + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        idx[i - 1] += 1;
        for j in i..K {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Orderings `(b, c, d)` of three ids up to rotation, smallest first.
fn rotation_classes([x, y, z]: [usize; 3]) -> [[usize; 3]; 2] {
    let mut s = [x, y, z];
    s.sort_unstable();
    [[s[0], s[1], s[2]], [s[0], s[2], s[1]]]
}

fn four_point_for_subset(vt: &VariableTable, set: [usize; 4]) -> Vec<Clause> {
    let mut out = Vec::with_capacity(8);
    for i in 0..4 {
        let a = set[i];
        let rest: Vec<usize> = set.iter().copied().filter(|&v| v != a).collect();
        for [b, c, d] in rotation_classes([rest[0], rest[1], rest[2]]) {
            out.push(four_point_clause(vt, [a, b, c, d]));
        }
    }
    out
}

fn five_point_for_subset(vt: &VariableTable, set: [usize; 5]) -> Vec<Clause> {
    let mut out = Vec::with_capacity(80);
    for &a in &set {
        for &e in set.iter().filter(|&&v| v != a) {
            let rest: Vec<usize> = set.iter().copied().filter(|&v| v != a && v != e).collect();
            for [b, c, d] in rotation_classes([rest[0], rest[1], rest[2]]) {
                out.push(five_point_first(vt, [a, b, c, d, e]));
            }
        }
    }
    for &a in &set {
        for &b in set.iter().filter(|&&v| v != a) {
            let rest: Vec<usize> = set.iter().copied().filter(|&v| v != a && v != b).collect();
            for [c, d, e] in rotation_classes([rest[0], rest[1], rest[2]]) {
                out.push(five_point_second(vt, [a, b, c, d, e]));
            }
        }
    }
    out
}

/// The `8 * C(n,4)` four-point clauses, subsets in lexicographic order.
pub fn four_point_clauses(vt: &VariableTable) -> Vec<Clause> {
    subsets::<4>(vt.vertex_count())
        .into_par_iter()
        .flat_map_iter(|set| four_point_for_subset(vt, set))
        .collect()
}

/// The `80 * C(n,5)` five-point clauses, subsets in lexicographic order.
pub fn five_point_clauses(vt: &VariableTable) -> Vec<Clause> {
    subsets::<5>(vt.vertex_count())
        .into_par_iter()
        .flat_map_iter(|set| five_point_for_subset(vt, set))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::{BTreeSet, HashSet};

    fn binom(n: usize, k: usize) -> usize {
        if k > n {
            return 0;
        }
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
        if items.len() <= 1 {
            return vec![items.to_vec()];
        }
        let mut out = Vec::new();
        for i in 0..items.len() {
            let mut rest = items.to_vec();
            let head = rest.remove(i);
            for mut tail in permutations(&rest) {
                tail.insert(0, head);
                out.push(tail);
            }
        }
        out
    }

    fn literal_set(c: &Clause) -> BTreeSet<Lit> {
        c.iter().copied().collect()
    }

    #[test]
    fn counts_match_formula() {
        for n in 0..=12 {
            let vt = VariableTable::new(n);
            assert_eq!(four_point_clauses(&vt).len(), 8 * binom(n, 4), "n={n}");
            assert_eq!(five_point_clauses(&vt).len(), 80 * binom(n, 5), "n={n}");
        }
    }

    #[test]
    fn small_counts() {
        assert_eq!(four_point_clauses(&VariableTable::new(4)).len(), 8);
        assert_eq!(four_point_clauses(&VariableTable::new(3)).len(), 0);
        assert_eq!(five_point_clauses(&VariableTable::new(5)).len(), 80);
        assert_eq!(five_point_clauses(&VariableTable::new(4)).len(), 0);
        assert_eq!(four_point_clauses(&VariableTable::new(10)).len(), 1680);
        assert_eq!(five_point_clauses(&VariableTable::new(12)).len(), 63360);
    }

    #[test]
    fn every_instantiation_is_retained() {
        for n in [5, 6] {
            let vt = VariableTable::new(n);
            let four: HashSet<BTreeSet<Lit>> =
                four_point_clauses(&vt).iter().map(literal_set).collect();
            let five: HashSet<BTreeSet<Lit>> =
                five_point_clauses(&vt).iter().map(literal_set).collect();
            for set in subsets::<4>(n) {
                for p in permutations(&set) {
                    let c = four_point_clause(&vt, [p[0], p[1], p[2], p[3]]);
                    assert!(four.contains(&literal_set(&c)), "{p:?}");
                }
            }
            for set in subsets::<5>(n) {
                for p in permutations(&set) {
                    let t = [p[0], p[1], p[2], p[3], p[4]];
                    assert!(
                        five.contains(&literal_set(&five_point_first(&vt, t))),
                        "{p:?}"
                    );
                    assert!(
                        five.contains(&literal_set(&five_point_second(&vt, t))),
                        "{p:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn distinct_literal_sets_per_subset() {
        let vt = VariableTable::new(6);
        let four: HashSet<BTreeSet<Lit>> =
            four_point_clauses(&vt).iter().map(literal_set).collect();
        assert_eq!(four.len(), 2 * binom(6, 4));
        let five: HashSet<BTreeSet<Lit>> =
            five_point_clauses(&vt).iter().map(literal_set).collect();
        assert_eq!(five.len(), 80 * binom(6, 5));
    }

    #[test]
    fn clauses_have_distinct_variables() {
        let vt = VariableTable::new(6);
        for c in four_point_clauses(&vt)
            .iter()
            .chain(five_point_clauses(&vt).iter())
        {
            let vars: HashSet<usize> = c.iter().map(|l| l.var()).collect();
            assert_eq!(vars.len(), c.len());
        }
    }
}
