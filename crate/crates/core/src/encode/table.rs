use std::collections::BTreeMap;
use std::fmt;

use crate::cnf::Lit;
use crate::graph::Vertex;
use crate::orientation::{canonical_triple, sorted_triples, triple_rank};
use crate::paths::SimplePath;

use super::EncodeError;

/// An unordered vertex pair stored as `(min, max)`.
pub type Pair = (Vertex, Vertex);

/// Variable ids for one instance.
///
/// Ids are dense in `1..=num_vars`: all triple variables first (in
/// lexicographic order of sorted triples), then side variables (outside
/// `s{a,b}` or per-pair `s{a,b|c,d}`, lexicographic by key), then key-path
/// variables in generation order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariableTable {
    n: usize,
    num_triples: usize,
    side: BTreeMap<Pair, usize>,
    pair_side: BTreeMap<(Pair, Pair), usize>,
    first_key_path: usize,
    key_paths: Vec<KeyPathVar>,
}

/// `k{P|cd}`: path `P` is a key path with respect to the line through `cd`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyPathVar {
    pub path: SimplePath,
    pub line: Pair,
}

/// What a variable id stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarMeaning<'a> {
    /// The sorted triple is clockwise.
    Triple([Vertex; 3]),
    /// The special half-plane of non-edge `ab` holds the points `p` with
    /// `abp` clockwise.
    Side(Pair),
    /// The special half-plane of `ab` with respect to `cd` is the clockwise
    /// side of `ab`.
    PairSide {
        ab: Pair,
        cd: Pair,
    },
    KeyPath(&'a KeyPathVar),
}

impl fmt::Display for VarMeaning<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VarMeaning::Triple([a, b, c]) => write!(f, "x{{{a},{b},{c}}}"),
            VarMeaning::Side((a, b)) => write!(f, "s{{{a},{b}}}"),
            VarMeaning::PairSide { ab, cd } => {
                write!(f, "s{{{},{}|{},{}}}", ab.0, ab.1, cd.0, cd.1)
            }
            VarMeaning::KeyPath(k) => {
                let verts: Vec<String> = k.path.vertices().iter().map(|v| v.to_string()).collect();
                write!(f, "k{{{}|{},{}}}", verts.join(","), k.line.0, k.line.1)
            }
        }
    }
}

impl VariableTable {
    /// A table holding only the triple variables of `0..n`.
    pub fn new(n: usize) -> Self {
        let num_triples = n * n.saturating_sub(1) * n.saturating_sub(2) / 6;
        VariableTable {
            n,
            num_triples,
            side: BTreeMap::new(),
            pair_side: BTreeMap::new(),
            first_key_path: num_triples + 1,
            key_paths: Vec::new(),
        }
    }

    pub(crate) fn with_side_vars(n: usize, pairs: impl IntoIterator<Item = Pair>) -> Self {
        let mut table = VariableTable::new(n);
        for pair in pairs {
            let id = table.num_triples + table.side.len() + 1;
            table.side.entry(pair).or_insert(id);
        }
        table.first_key_path = table.num_triples + table.side.len() + 1;
        table
    }

    pub(crate) fn with_pair_side_vars(
        n: usize,
        keys: impl IntoIterator<Item = (Pair, Pair)>,
    ) -> Self {
        let mut table = VariableTable::new(n);
        let keys: std::collections::BTreeSet<(Pair, Pair)> = keys.into_iter().collect();
        for (i, key) in keys.into_iter().enumerate() {
            table.pair_side.insert(key, table.num_triples + i + 1);
        }
        table.first_key_path = table.num_triples + table.pair_side.len() + 1;
        table
    }

    pub(crate) fn push_key_path(&mut self, var: KeyPathVar) -> usize {
        self.key_paths.push(var);
        self.first_key_path + self.key_paths.len() - 1
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn num_vars(&self) -> usize {
        self.first_key_path + self.key_paths.len() - 1
    }

    pub fn num_triple_vars(&self) -> usize {
        self.num_triples
    }

    /// Id of the canonical variable of a sorted triple.
    pub fn triple_var(&self, t: [Vertex; 3]) -> usize {
        triple_rank(self.n, t) + 1
    }

    /// Literal stating that the ordered triple `(a, b, c)` is clockwise:
    /// the canonical variable when `(a, b, c)` is an even permutation of
    /// its sorted order, its negation otherwise.
    pub fn triple_literal(&self, a: Vertex, b: Vertex, c: Vertex) -> Result<Lit, EncodeError> {
        if a == b || b == c || a == c {
            return Err(EncodeError::RepeatedVertex([a, b, c]));
        }
        if let Some(&v) = [a, b, c].iter().find(|&&v| v >= self.n) {
            return Err(EncodeError::VertexOutOfRange {
                vertex: v,
                n: self.n,
            });
        }
        Ok(self.lit(a, b, c))
    }

    /// Unchecked [`VariableTable::triple_literal`] for the encoder's hot loops.
    pub(crate) fn lit(&self, a: Vertex, b: Vertex, c: Vertex) -> Lit {
        let (t, even) = canonical_triple(a, b, c);
        Lit::new(self.triple_var(t), even)
    }

    /// Id of `s{a,b}` for a sorted non-edge, if present.
    pub fn side_var(&self, pair: Pair) -> Option<usize> {
        self.side.get(&pair).copied()
    }

    pub fn pair_side_var(&self, ab: Pair, cd: Pair) -> Option<usize> {
        self.pair_side.get(&(ab, cd)).copied()
    }

    pub fn side_vars(&self) -> impl Iterator<Item = (Pair, usize)> + '_ {
        self.side.iter().map(|(&k, &v)| (k, v))
    }

    pub fn pair_side_vars(&self) -> impl Iterator<Item = ((Pair, Pair), usize)> + '_ {
        self.pair_side.iter().map(|(&k, &v)| (k, v))
    }

    /// `(id, key-path variable)` in id order.
    pub fn key_path_vars(&self) -> impl Iterator<Item = (usize, &KeyPathVar)> + '_ {
        self.key_paths
            .iter()
            .enumerate()
            .map(|(i, k)| (self.first_key_path + i, k))
    }

    pub fn meaning(&self, var: usize) -> Option<VarMeaning<'_>> {
        if var == 0 || var > self.num_vars() {
            return None;
        }
        if var <= self.num_triples {
            return sorted_triples(self.n).nth(var - 1).map(VarMeaning::Triple);
        }
        if var < self.first_key_path {
            if let Some((&pair, _)) = self.side.iter().find(|(_, &id)| id == var) {
                return Some(VarMeaning::Side(pair));
            }
            return self
                .pair_side
                .iter()
                .find(|(_, &id)| id == var)
                .map(|(&(ab, cd), _)| VarMeaning::PairSide { ab, cd });
        }
        self.key_paths
            .get(var - self.first_key_path)
            .map(VarMeaning::KeyPath)
    }

    /// `(id, meaning)` for every variable, in id order.
    pub fn meanings(&self) -> Vec<(usize, VarMeaning<'_>)> {
        let mut out: Vec<(usize, VarMeaning<'_>)> = Vec::with_capacity(self.num_vars());
        out.extend(
            sorted_triples(self.n)
                .enumerate()
                .map(|(i, t)| (i + 1, VarMeaning::Triple(t))),
        );
        out.extend(self.side.iter().map(|(&p, &id)| (id, VarMeaning::Side(p))));
        out.extend(
            self.pair_side
                .iter()
                .map(|(&(ab, cd), &id)| (id, VarMeaning::PairSide { ab, cd })),
        );
        out.sort_by_key(|&(id, _)| id);
        out.extend(
            self.key_path_vars()
                .map(|(id, k)| (id, VarMeaning::KeyPath(k))),
        );
        out
    }
}
