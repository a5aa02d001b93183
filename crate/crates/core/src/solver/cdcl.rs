//! Conflict-driven clause learning.
//!
//! Literals are `2 * var + sign` over 0-based variables (`sign = 1` for a
//! negative literal). A clause watches its first two literals; a reason
//! clause always has the implied literal first.

use std::collections::HashSet;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cnf::{CnfInstance, Lit, Model};

use super::{
    check_model, Budget, Outcome, RestartPolicy, SolverConfig, SolverError, SolverResult, Stats,
};

type L = u32;
type CRef = u32;

const UNDEF: u8 = 2;
const NO_REASON: CRef = CRef::MAX;

fn from_lit(l: Lit) -> L {
    ((l.var() as u32 - 1) << 1) | (!l.is_positive()) as u32
}

#[inline]
fn var(l: L) -> usize {
    (l >> 1) as usize
}

#[inline]
fn neg(l: L) -> L {
    l ^ 1
}

struct ClauseData {
    lits: Vec<L>,
    learnt: bool,
    deleted: bool,
    activity: f64,
    lbd: u32,
}

#[derive(Clone, Copy)]
struct Watcher {
    cref: CRef,
    blocker: L,
}

/// Max-heap of unassigned variables keyed by activity.
struct VarOrder {
    heap: Vec<u32>,
    index: Vec<usize>,
}

const NOT_IN_HEAP: usize = usize::MAX;

impl VarOrder {
    fn new(n: usize) -> Self {
        VarOrder {
            heap: Vec::with_capacity(n),
            index: vec![NOT_IN_HEAP; n],
        }
    }

    fn contains(&self, v: usize) -> bool {
        self.index[v] != NOT_IN_HEAP
    }

    fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    fn insert(&mut self, v: usize, act: &[f64]) {
        if self.contains(v) {
            return;
        }
        self.index[v] = self.heap.len();
        self.heap.push(v as u32);
        self.sift_up(self.heap.len() - 1, act);
    }

    fn increased(&mut self, v: usize, act: &[f64]) {
        if self.contains(v) {
            self.sift_up(self.index[v], act);
        }
    }

    fn pop(&mut self, act: &[f64]) -> Option<usize> {
        let top = *self.heap.first()? as usize;
        let last = self.heap.pop().unwrap();
        self.index[top] = NOT_IN_HEAP;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.index[last as usize] = 0;
            self.sift_down(0, act);
        }
        Some(top)
    }

    fn sift_up(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        while i > 0 {
            let parent = (i - 1) / 2;
            let p = self.heap[parent];
            if act[p as usize] >= act[v as usize] {
                break;
            }
            self.heap[i] = p;
            self.index[p as usize] = i;
            i = parent;
        }
        self.heap[i] = v;
        self.index[v as usize] = i;
    }

    fn sift_down(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        let len = self.heap.len();
        loop {
            let left = 2 * i + 1;
            if left >= len {
                break;
            }
            let right = left + 1;
            let child =
                if right < len && act[self.heap[right] as usize] > act[self.heap[left] as usize] {
                    right
                } else {
                    left
                };
            let c = self.heap[child];
            if act[c as usize] <= act[v as usize] {
                break;
            }
            self.heap[i] = c;
            self.index[c as usize] = i;
            i = child;
        }
        self.heap[i] = v;
        self.index[v as usize] = i;
    }
}

/// `luby(i)` for `i >= 0`: 1 1 2 1 1 2 4 1 1 2 1 1 2 4 8 ...
fn luby(mut i: u64) -> u64 {
    let (mut size, mut seq) = (1u64, 0u32);
    while size < i + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    while size - 1 != i {
        size = (size - 1) / 2;
        seq -= 1;
        i %= size;
    }
    1 << seq
}

struct Solver<'a> {
    config: &'a SolverConfig,
    clauses: Vec<ClauseData>,
    free_slots: Vec<CRef>,
    learnts: Vec<CRef>,
    watches: Vec<Vec<Watcher>>,
    assigns: Vec<u8>,
    level: Vec<u32>,
    reason: Vec<CRef>,
    polarity: Vec<bool>,
    activity: Vec<f64>,
    var_inc: f64,
    cla_inc: f64,
    order: VarOrder,
    trail: Vec<L>,
    trail_lim: Vec<usize>,
    qhead: usize,
    seen: Vec<bool>,
    analyze_stack: Vec<L>,
    analyze_clear: Vec<L>,
    lbd_stamp: Vec<u64>,
    lbd_counter: u64,
    max_learnts: f64,
    rng: ChaCha8Rng,
    stats: Stats,
}

enum Search {
    Sat,
    Unsat,
    Restart,
    Budget(Budget),
}

impl<'a> Solver<'a> {
    fn new(num_vars: usize, config: &'a SolverConfig) -> Self {
        Solver {
            config,
            clauses: Vec::new(),
            free_slots: Vec::new(),
            learnts: Vec::new(),
            watches: vec![Vec::new(); 2 * num_vars],
            assigns: vec![UNDEF; num_vars],
            level: vec![0; num_vars],
            reason: vec![NO_REASON; num_vars],
            polarity: vec![true; num_vars],
            activity: vec![0.0; num_vars],
            var_inc: 1.0,
            cla_inc: 1.0,
            order: VarOrder::new(num_vars),
            trail: Vec::with_capacity(num_vars),
            trail_lim: Vec::new(),
            qhead: 0,
            seen: vec![false; num_vars],
            analyze_stack: Vec::new(),
            analyze_clear: Vec::new(),
            lbd_stamp: Vec::new(),
            lbd_counter: 0,
            max_learnts: 0.0,
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            stats: Stats::default(),
        }
    }

    #[inline]
    fn value(&self, l: L) -> u8 {
        let a = self.assigns[var(l)];
        if a == UNDEF {
            UNDEF
        } else {
            a ^ (l & 1) as u8
        }
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    fn enqueue(&mut self, l: L, reason: CRef) {
        let v = var(l);
        self.assigns[v] = (l & 1 == 0) as u8;
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(l);
    }

    fn alloc(&mut self, lits: Vec<L>, learnt: bool, lbd: u32) -> CRef {
        let data = ClauseData {
            lits,
            learnt,
            deleted: false,
            activity: 0.0,
            lbd,
        };
        let cref = match self.free_slots.pop() {
            Some(slot) => {
                self.clauses[slot as usize] = data;
                slot
            }
            None => {
                self.clauses.push(data);
                (self.clauses.len() - 1) as CRef
            }
        };
        let c = &self.clauses[cref as usize].lits;
        let (w0, w1) = (c[0], c[1]);
        self.watches[neg(w0) as usize].push(Watcher { cref, blocker: w1 });
        self.watches[neg(w1) as usize].push(Watcher { cref, blocker: w0 });
        cref
    }

    /// Returns the conflicting clause, if any.
    fn propagate(&mut self) -> Option<CRef> {
        let level_now = self.decision_level();
        let Solver {
            clauses,
            watches,
            assigns,
            level,
            reason,
            trail,
            qhead,
            stats,
            ..
        } = self;
        let value = |assigns: &[u8], l: L| {
            let a = assigns[var(l)];
            if a == UNDEF {
                UNDEF
            } else {
                a ^ (l & 1) as u8
            }
        };
        let mut conflict = None;
        while *qhead < trail.len() {
            let p = trail[*qhead];
            *qhead += 1;
            stats.propagations += 1;
            let false_lit = neg(p);
            let mut ws = std::mem::take(&mut watches[p as usize]);
            let (mut i, mut j) = (0, 0);
            'watchers: while i < ws.len() {
                let w = ws[i];
                i += 1;
                if value(assigns, w.blocker) == 1 {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let cref = w.cref;
                let c = &mut clauses[cref as usize];
                if c.deleted {
                    continue;
                }
                if c.lits[0] == false_lit {
                    c.lits.swap(0, 1);
                }
                let first = c.lits[0];
                let first_value = value(assigns, first);
                if first != w.blocker && first_value == 1 {
                    ws[j] = Watcher {
                        cref,
                        blocker: first,
                    };
                    j += 1;
                    continue;
                }
                for k in 2..c.lits.len() {
                    let l = c.lits[k];
                    if value(assigns, l) != 0 {
                        c.lits.swap(1, k);
                        watches[neg(l) as usize].push(Watcher {
                            cref,
                            blocker: first,
                        });
                        continue 'watchers;
                    }
                }
                ws[j] = Watcher {
                    cref,
                    blocker: first,
                };
                j += 1;
                if first_value == 0 {
                    conflict = Some(cref);
                    while i < ws.len() {
                        ws[j] = ws[i];
                        i += 1;
                        j += 1;
                    }
                } else {
                    let v = var(first);
                    assigns[v] = (first & 1 == 0) as u8;
                    level[v] = level_now;
                    reason[v] = cref;
                    trail.push(first);
                }
            }
            ws.truncate(j);
            watches[p as usize] = ws;
            if conflict.is_some() {
                *qhead = trail.len();
                break;
            }
        }
        conflict
    }

    fn bump_var(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.order.increased(v, &self.activity);
    }

    fn bump_clause(&mut self, cref: CRef) {
        let c = &mut self.clauses[cref as usize];
        c.activity += self.cla_inc;
        if c.activity > 1e20 {
            for &l in &self.learnts {
                self.clauses[l as usize].activity *= 1e-20;
            }
            self.cla_inc *= 1e-20;
        }
    }

    fn abstract_level(&self, v: usize) -> u32 {
        1 << (self.level[v] & 31)
    }

    /// First-UIP learnt clause (asserting literal first) and the level to
    /// jump back to.
    fn analyze(&mut self, mut confl: CRef) -> (Vec<L>, u32) {
        let mut learnt: Vec<L> = vec![0];
        let mut path_count = 0;
        let mut p: Option<L> = None;
        let mut index = self.trail.len();
        loop {
            if self.clauses[confl as usize].learnt {
                self.bump_clause(confl);
            }
            let skip = usize::from(p.is_some());
            let len = self.clauses[confl as usize].lits.len();
            for k in skip..len {
                let q = self.clauses[confl as usize].lits[k];
                let v = var(q);
                if !self.seen[v] && self.level[v] > 0 {
                    self.bump_var(v);
                    self.seen[v] = true;
                    if self.level[v] >= self.decision_level() {
                        path_count += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                index -= 1;
                if self.seen[var(self.trail[index])] {
                    break;
                }
            }
            let lit = self.trail[index];
            p = Some(lit);
            confl = self.reason[var(lit)];
            self.seen[var(lit)] = false;
            path_count -= 1;
            if path_count == 0 {
                break;
            }
        }
        learnt[0] = neg(p.unwrap());

        // Recursive minimization.
        self.analyze_clear.clear();
        self.analyze_clear.extend_from_slice(&learnt);
        let levels = learnt[1..]
            .iter()
            .fold(0u32, |acc, &l| acc | self.abstract_level(var(l)));
        let mut kept = 1;
        for i in 1..learnt.len() {
            let l = learnt[i];
            if self.reason[var(l)] == NO_REASON || !self.redundant(l, levels) {
                learnt[kept] = l;
                kept += 1;
            }
        }
        learnt.truncate(kept);
        for i in 0..self.analyze_clear.len() {
            self.seen[var(self.analyze_clear[i])] = false;
        }

        let back = if learnt.len() == 1 {
            0
        } else {
            let mut max_i = 1;
            for i in 2..learnt.len() {
                if self.level[var(learnt[i])] > self.level[var(learnt[max_i])] {
                    max_i = i;
                }
            }
            learnt.swap(1, max_i);
            self.level[var(learnt[1])]
        };
        (learnt, back)
    }

    fn redundant(&mut self, p: L, levels: u32) -> bool {
        self.analyze_stack.clear();
        self.analyze_stack.push(p);
        let top = self.analyze_clear.len();
        while let Some(q) = self.analyze_stack.pop() {
            let cref = self.reason[var(q)];
            let len = self.clauses[cref as usize].lits.len();
            for k in 1..len {
                let l = self.clauses[cref as usize].lits[k];
                let v = var(l);
                if self.seen[v] || self.level[v] == 0 {
                    continue;
                }
                if self.reason[v] != NO_REASON && self.abstract_level(v) & levels != 0 {
                    self.seen[v] = true;
                    self.analyze_stack.push(l);
                    self.analyze_clear.push(l);
                } else {
                    for j in top..self.analyze_clear.len() {
                        self.seen[var(self.analyze_clear[j])] = false;
                    }
                    self.analyze_clear.truncate(top);
                    return false;
                }
            }
        }
        true
    }

    fn lbd(&mut self, lits: &[L]) -> u32 {
        self.lbd_counter += 1;
        let needed = self.decision_level() as usize + 1;
        if self.lbd_stamp.len() < needed {
            self.lbd_stamp.resize(needed, 0);
        }
        let mut count = 0;
        for &l in lits {
            let lv = self.level[var(l)] as usize;
            if self.lbd_stamp[lv] != self.lbd_counter {
                self.lbd_stamp[lv] = self.lbd_counter;
                count += 1;
            }
        }
        count
    }

    fn cancel_until(&mut self, level: u32) {
        if self.decision_level() <= level {
            return;
        }
        let lim = self.trail_lim[level as usize];
        for i in (lim..self.trail.len()).rev() {
            let l = self.trail[i];
            let v = var(l);
            self.assigns[v] = UNDEF;
            self.reason[v] = NO_REASON;
            self.polarity[v] = l & 1 == 1;
            self.order.insert(v, &self.activity);
        }
        self.trail.truncate(lim);
        self.trail_lim.truncate(level as usize);
        self.qhead = lim;
    }

    fn pick_branch(&mut self) -> Option<L> {
        if self.config.random_var_freq > 0.0
            && !self.order.is_empty()
            && self.rng.gen_bool(self.config.random_var_freq.min(1.0))
        {
            let v = self.order.heap[self.rng.gen_range(0..self.order.heap.len())] as usize;
            if self.assigns[v] == UNDEF {
                return Some(((v as u32) << 1) | self.polarity[v] as u32);
            }
        }
        while let Some(v) = self.order.pop(&self.activity) {
            if self.assigns[v] == UNDEF {
                return Some(((v as u32) << 1) | self.polarity[v] as u32);
            }
        }
        None
    }

    fn locked(&self, cref: CRef) -> bool {
        let c = &self.clauses[cref as usize];
        let v = var(c.lits[0]);
        self.reason[v] == cref && self.value(c.lits[0]) == 1
    }

    /// Deletes about half of the deletable learnt clauses, least active
    /// first. Clauses with small LBD and reasons are kept.
    fn reduce_db(&mut self) {
        let keep_lbd = self.config.keep_lbd;
        let mut candidates: Vec<CRef> = Vec::new();
        let mut kept: Vec<CRef> = Vec::new();
        for &cref in &self.learnts {
            let c = &self.clauses[cref as usize];
            if c.lbd <= keep_lbd || c.lits.len() <= 2 || self.locked(cref) {
                kept.push(cref);
            } else {
                candidates.push(cref);
            }
        }
        candidates.sort_by(|&a, &b| {
            let (ca, cb) = (&self.clauses[a as usize], &self.clauses[b as usize]);
            cb.lbd
                .cmp(&ca.lbd)
                .then(ca.activity.total_cmp(&cb.activity))
                .then(a.cmp(&b))
        });
        let remove = candidates.len() / 2;
        for &cref in &candidates[..remove] {
            let c = &mut self.clauses[cref as usize];
            c.deleted = true;
            c.lits.clear();
            c.lits.shrink_to_fit();
            self.stats.deleted_clauses += 1;
        }
        kept.extend_from_slice(&candidates[remove..]);
        kept.sort_unstable();
        self.learnts = kept;
        for ws in &mut self.watches {
            ws.retain(|w| !self.clauses[w.cref as usize].deleted);
        }
        for &cref in &candidates[..remove] {
            self.free_slots.push(cref);
        }
    }

    fn budget_exhausted(&self, start: Instant) -> Option<Budget> {
        if let Some(max) = self.config.conflict_budget {
            if self.stats.conflicts >= max {
                return Some(Budget::Conflicts);
            }
        }
        if let Some(limit) = self.config.time_budget {
            if start.elapsed() >= limit {
                return Some(Budget::Time);
            }
        }
        None
    }

    fn search(&mut self, conflict_limit: u64, start: Instant) -> Search {
        let mut conflicts_here = 0u64;
        loop {
            if let Some(confl) = self.propagate() {
                self.stats.conflicts += 1;
                conflicts_here += 1;
                if self.decision_level() == 0 {
                    return Search::Unsat;
                }
                let (learnt, back) = self.analyze(confl);
                let lbd = self.lbd(&learnt);
                self.cancel_until(back);
                if learnt.len() == 1 {
                    self.enqueue(learnt[0], NO_REASON);
                } else {
                    let first = learnt[0];
                    let cref = self.alloc(learnt, true, lbd);
                    self.learnts.push(cref);
                    self.bump_clause(cref);
                    self.enqueue(first, cref);
                }
                self.stats.learnt_clauses += 1;
                self.var_inc /= self.config.var_decay;
                self.cla_inc /= self.config.clause_decay;
                if let Some(b) = self.budget_exhausted(start) {
                    return Search::Budget(b);
                }
            } else {
                if conflicts_here >= conflict_limit {
                    self.cancel_until(0);
                    return Search::Restart;
                }
                if self.learnts.len() as f64 - self.trail.len() as f64 >= self.max_learnts {
                    self.reduce_db();
                    self.max_learnts *= self.config.learnt_growth;
                }
                if self.stats.decisions & 0x3ff == 0 {
                    if let Some(b) = self.budget_exhausted(start) {
                        return Search::Budget(b);
                    }
                }
                match self.pick_branch() {
                    None => return Search::Sat,
                    Some(l) => {
                        self.stats.decisions += 1;
                        self.trail_lim.push(self.trail.len());
                        self.enqueue(l, NO_REASON);
                    }
                }
            }
        }
    }
}

/// CDCL search. The result depends only on the instance and the config
/// (including its seed), except that a time budget may end it earlier.
pub fn solve(inst: &CnfInstance, config: &SolverConfig) -> Result<SolverResult, SolverError> {
    let start = Instant::now();
    let n = inst.num_vars();
    let mut s = Solver::new(n, config);
    let finish = |mut stats: Stats, outcome: Outcome| {
        stats.wall_time = start.elapsed();
        Ok(SolverResult { outcome, stats })
    };

    // Preprocessing: drop duplicate and tautological clauses, assert units.
    let mut seen_clauses: HashSet<Vec<L>> = HashSet::new();
    let mut units: Vec<L> = Vec::new();
    let mut original = 0usize;
    for clause in inst.clauses() {
        let mut lits: Vec<L> = clause.iter().map(|&l| from_lit(l)).collect();
        lits.sort_unstable();
        lits.dedup();
        if lits.windows(2).any(|w| w[0] == neg(w[1])) {
            continue;
        }
        if !seen_clauses.insert(lits.clone()) {
            s.stats.duplicate_clauses += 1;
            continue;
        }
        if lits.len() == 1 {
            units.push(lits[0]);
        } else {
            s.alloc(lits, false, 0);
            original += 1;
        }
    }
    drop(seen_clauses);
    for l in units {
        match s.value(l) {
            1 => {}
            0 => return finish(s.stats, Outcome::Unsat),
            _ => s.enqueue(l, NO_REASON),
        }
    }
    if s.propagate().is_some() {
        return finish(s.stats, Outcome::Unsat);
    }
    for v in 0..n {
        s.order.insert(v, &s.activity);
    }
    s.max_learnts = (original as f64 * config.learnt_fraction).max(2000.0);

    let mut restart_index = 0u64;
    let mut geometric_interval = match config.restart {
        RestartPolicy::Geometric { first, .. } => first.max(1) as f64,
        _ => 0.0,
    };
    loop {
        let limit = match config.restart {
            RestartPolicy::Geometric { factor, .. } => {
                let l = geometric_interval as u64;
                geometric_interval *= factor;
                l.max(1)
            }
            RestartPolicy::Luby { unit } => unit.max(1) * luby(restart_index),
            RestartPolicy::Never => u64::MAX,
        };
        match s.search(limit, start) {
            Search::Sat => {
                let model = Model::new(s.assigns.iter().map(|&a| a == 1).collect());
                check_model(inst, &model)?;
                return finish(s.stats, Outcome::Sat(model));
            }
            Search::Unsat => return finish(s.stats, Outcome::Unsat),
            Search::Budget(b) => return finish(s.stats, Outcome::Indeterminate(b)),
            Search::Restart => {
                s.stats.restarts += 1;
                restart_index += 1;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn luby_sequence() {
        let got: Vec<u64> = (0..15).map(luby).collect();
        assert_eq!(got, vec![1, 1, 2, 1, 1, 2, 4, 1, 1, 2, 1, 1, 2, 4, 8]);
    }

    #[test]
    fn literal_packing() {
        assert_eq!(from_lit(Lit::positive(1)), 0);
        assert_eq!(from_lit(Lit::negative(1)), 1);
        assert_eq!(from_lit(Lit::negative(3)), 5);
        assert_eq!(neg(4), 5);
        assert_eq!(var(5), 2);
    }

    #[test]
    fn heap_orders_by_activity() {
        let act = vec![0.5, 3.0, 1.0, 2.0];
        let mut h = VarOrder::new(4);
        for v in 0..4 {
            h.insert(v, &act);
        }
        let order: Vec<usize> = std::iter::from_fn(|| h.pop(&act)).collect();
        assert_eq!(order, vec![1, 3, 2, 0]);
    }
}
