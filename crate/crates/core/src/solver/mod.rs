//! Embedded SAT solving: a CDCL solver and an exhaustive oracle.

mod brute;
mod cdcl;

use std::fmt;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cnf::{CnfInstance, Model};

pub use brute::{brute_solve, BRUTE_MAX_VARS};
pub use cdcl::solve;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolverError {
    #[error("brute-force solving supports at most {max} variables, instance has {vars}")]
    TooManyVariables { vars: usize, max: usize },
    #[error("internal error: model violates clause {clause}")]
    ModelCheckFailed { clause: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum RestartPolicy {
    /// Restart after `first` conflicts, then multiply the interval by `factor`.
    Geometric {
        first: u64,
        factor: f64,
    },
    /// Restart intervals `unit * luby(i)`.
    Luby {
        unit: u64,
    },
    Never,
}

impl Default for RestartPolicy {
    fn default() -> Self {
        RestartPolicy::Geometric {
            first: 100,
            factor: 1.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub seed: u64,
    /// Stop with [`Outcome::Indeterminate`] after this many conflicts.
    pub conflict_budget: Option<u64>,
    /// Stop with [`Outcome::Indeterminate`] after this much wall time.
    #[serde(with = "opt_secs")]
    pub time_budget: Option<Duration>,
    pub restart: RestartPolicy,
    pub var_decay: f64,
    pub clause_decay: f64,
    /// Probability of branching on a random unassigned variable.
    pub random_var_freq: f64,
    /// Learnt clauses with at most this LBD are never deleted.
    pub keep_lbd: u32,
    /// Learnt-clause limit as a fraction of the original clause count.
    pub learnt_fraction: f64,
    /// Growth of the learnt-clause limit after each reduction.
    pub learnt_growth: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            seed: 0,
            conflict_budget: None,
            time_budget: None,
            restart: RestartPolicy::default(),
            var_decay: 0.95,
            clause_decay: 0.999,
            random_var_freq: 0.01,
            keep_lbd: 2,
            learnt_fraction: 1.0 / 3.0,
            learnt_growth: 1.1,
        }
    }
}

mod opt_secs {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};
    use std::time::Duration;

    pub fn serialize<S: Serializer>(d: &Option<Duration>, s: S) -> Result<S::Ok, S::Error> {
        d.map(|d| d.as_secs_f64()).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Duration>, D::Error> {
        let secs = Option::<f64>::deserialize(d)?;
        secs.map(|s| Duration::try_from_secs_f64(s).map_err(serde::de::Error::custom))
            .transpose()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Budget {
    Conflicts,
    Time,
    /// An external solver stopped without an answer.
    External,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Sat(Model),
    Unsat,
    /// The search stopped without an answer; says nothing about
    /// satisfiability.
    Indeterminate(Budget),
}

impl Outcome {
    pub fn is_sat(&self) -> bool {
        matches!(self, Outcome::Sat(_))
    }

    pub fn is_unsat(&self) -> bool {
        matches!(self, Outcome::Unsat)
    }

    pub fn model(&self) -> Option<&Model> {
        match self {
            Outcome::Sat(m) => Some(m),
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Outcome::Sat(_) => "SAT",
            Outcome::Unsat => "UNSAT",
            Outcome::Indeterminate(_) => "INDETERMINATE",
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Indeterminate(Budget::Conflicts) => {
                f.write_str("INDETERMINATE (conflict budget)")
            }
            Outcome::Indeterminate(Budget::Time) => f.write_str("INDETERMINATE (time budget)"),
            Outcome::Indeterminate(Budget::External) => {
                f.write_str("INDETERMINATE (external solver gave no answer)")
            }
            other => f.write_str(other.label()),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub decisions: u64,
    pub propagations: u64,
    pub conflicts: u64,
    pub restarts: u64,
    pub learnt_clauses: u64,
    pub deleted_clauses: u64,
    /// Clauses dropped before search as duplicates.
    pub duplicate_clauses: u64,
    #[serde(with = "secs")]
    pub wall_time: Duration,
}

impl Stats {
    /// Every counter except wall time.
    pub fn counters(&self) -> [u64; 7] {
        [
            self.decisions,
            self.propagations,
            self.conflicts,
            self.restarts,
            self.learnt_clauses,
            self.deleted_clauses,
            self.duplicate_clauses,
        ]
    }
}

mod secs {
    use serde::{Deserialize, Deserializer, Serializer};
    use std::time::Duration;

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(d.as_secs_f64())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        Duration::try_from_secs_f64(f64::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverResult {
    pub outcome: Outcome,
    pub stats: Stats,
}

fn check_model(inst: &CnfInstance, model: &Model) -> Result<(), SolverError> {
    match inst
        .clauses()
        .iter()
        .position(|c| !c.iter().any(|&l| model.lit_true(l)))
    {
        Some(clause) => Err(SolverError::ModelCheckFailed { clause }),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnf::eval_model;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn inst(num_vars: usize, clauses: &[&[i64]]) -> CnfInstance {
        CnfInstance::from_dimacs_clauses(num_vars, clauses.iter().copied()).unwrap()
    }

    fn random_3sat(rng: &mut ChaCha8Rng, vars: usize, clauses: usize) -> CnfInstance {
        let mut out = CnfInstance::new(vars);
        for _ in 0..clauses {
            let lits: Vec<i64> = (0..3)
                .map(|_| {
                    let v = rng.gen_range(1..=vars as i64);
                    if rng.gen_bool(0.5) {
                        v
                    } else {
                        -v
                    }
                })
                .collect();
            let lits: Vec<_> = lits
                .iter()
                .map(|&v| crate::cnf::Lit::from_dimacs(v).unwrap())
                .collect();
            out.add_clause(lits).unwrap();
        }
        out
    }

    /// `pigeons` pigeons into `holes` holes, one variable per pair.
    fn pigeonhole(pigeons: usize, holes: usize) -> CnfInstance {
        let var = |p: usize, h: usize| (p * holes + h + 1) as i64;
        let mut clauses: Vec<Vec<i64>> = (0..pigeons)
            .map(|p| (0..holes).map(|h| var(p, h)).collect())
            .collect();
        for h in 0..holes {
            for p in 0..pigeons {
                for q in p + 1..pigeons {
                    clauses.push(vec![-var(p, h), -var(q, h)]);
                }
            }
        }
        CnfInstance::from_dimacs_clauses(pigeons * holes, clauses).unwrap()
    }

    #[test]
    fn empty_instance_is_sat() {
        let r = solve(&CnfInstance::new(0), &SolverConfig::default()).unwrap();
        assert_eq!(r.outcome, Outcome::Sat(Model::new(vec![])));
        let r = brute_solve(&CnfInstance::new(3)).unwrap();
        assert!(r.outcome.is_sat());
    }

    #[test]
    fn contradictory_units() {
        let i = inst(1, &[&[1], &[-1]]);
        assert!(solve(&i, &SolverConfig::default())
            .unwrap()
            .outcome
            .is_unsat());
        assert!(brute_solve(&i).unwrap().outcome.is_unsat());
    }

    #[test]
    fn simple_sat() {
        let i = inst(2, &[&[1, 2]]);
        assert!(brute_solve(&i).unwrap().outcome.is_sat());
        let r = solve(&i, &SolverConfig::default()).unwrap();
        assert!(
            eval_model(&i, r.outcome.model().unwrap())
                .unwrap()
                .satisfied
        );
    }

    #[test]
    fn pigeonhole_unsat() {
        for (p, h) in [(3, 2), (4, 3), (5, 4), (7, 6)] {
            let i = pigeonhole(p, h);
            assert!(
                solve(&i, &SolverConfig::default())
                    .unwrap()
                    .outcome
                    .is_unsat(),
                "PHP({p},{h})"
            );
            if p * h <= BRUTE_MAX_VARS {
                assert!(brute_solve(&i).unwrap().outcome.is_unsat());
            }
        }
        assert!(solve(&pigeonhole(4, 4), &SolverConfig::default())
            .unwrap()
            .outcome
            .is_sat());
    }

    #[test]
    fn brute_guard() {
        let err = brute_solve(&CnfInstance::new(26)).unwrap_err();
        assert_eq!(err, SolverError::TooManyVariables { vars: 26, max: 25 });
    }

    #[test]
    fn differential_against_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let configs = [
            SolverConfig::default(),
            SolverConfig {
                restart: RestartPolicy::Luby { unit: 4 },
                seed: 3,
                random_var_freq: 0.2,
                ..SolverConfig::default()
            },
            SolverConfig {
                restart: RestartPolicy::Geometric {
                    first: 2,
                    factor: 1.1,
                },
                learnt_fraction: 0.01,
                keep_lbd: 0,
                ..SolverConfig::default()
            },
        ];
        let (mut sat, mut unsat) = (0, 0);
        for case in 0..1200 {
            let vars = rng.gen_range(1..=20);
            let ratio = rng.gen_range(2.0..6.0);
            let clauses = ((vars as f64) * ratio) as usize;
            let i = random_3sat(&mut rng, vars, clauses);
            let expected = brute_solve(&i).unwrap().outcome;
            let got = solve(&i, &configs[case % configs.len()]).unwrap().outcome;
            assert_eq!(got.is_sat(), expected.is_sat(), "case {case}");
            assert_eq!(got.is_unsat(), expected.is_unsat(), "case {case}");
            if let Some(m) = got.model() {
                assert!(eval_model(&i, m).unwrap().satisfied);
                sat += 1;
            } else {
                unsat += 1;
            }
        }
        assert!(sat > 100 && unsat > 100, "sat={sat} unsat={unsat}");
    }

    #[test]
    fn deterministic_given_seed() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let i = random_3sat(&mut rng, 120, 510);
        let config = SolverConfig {
            seed: 42,
            ..SolverConfig::default()
        };
        let a = solve(&i, &config).unwrap();
        let b = solve(&i, &config).unwrap();
        assert_eq!(a.outcome, b.outcome);
        assert_eq!(a.stats.counters(), b.stats.counters());
    }

    #[test]
    fn conflict_budget_is_indeterminate() {
        let i = pigeonhole(9, 8);
        let config = SolverConfig {
            conflict_budget: Some(50),
            ..SolverConfig::default()
        };
        let r = solve(&i, &config).unwrap();
        assert_eq!(r.outcome, Outcome::Indeterminate(Budget::Conflicts));
        assert_eq!(r.stats.conflicts, 50);
    }

    #[test]
    fn time_budget_is_indeterminate() {
        let i = pigeonhole(11, 10);
        let config = SolverConfig {
            time_budget: Some(Duration::from_millis(50)),
            ..SolverConfig::default()
        };
        let r = solve(&i, &config).unwrap();
        assert_eq!(r.outcome, Outcome::Indeterminate(Budget::Time));
    }

    #[test]
    fn duplicate_clauses_are_dropped() {
        let i = inst(3, &[&[1, 2], &[2, 1], &[1, 2], &[-1, 3]]);
        let r = solve(&i, &SolverConfig::default()).unwrap();
        assert_eq!(r.stats.duplicate_clauses, 2);
        assert!(r.outcome.is_sat());
    }

    #[test]
    fn model_check_detects_violation() {
        let i = inst(2, &[&[1], &[2]]);
        let bad = Model::new(vec![true, false]);
        assert_eq!(
            check_model(&i, &bad),
            Err(SolverError::ModelCheckFailed { clause: 1 })
        );
    }

    #[test]
    fn config_round_trips_through_json() {
        let config = SolverConfig {
            time_budget: Some(Duration::from_millis(1500)),
            restart: RestartPolicy::Luby { unit: 64 },
            ..SolverConfig::default()
        };
        let text = serde_json::to_string(&config).unwrap();
        assert_eq!(serde_json::from_str::<SolverConfig>(&text).unwrap(), config);
        let partial: SolverConfig = serde_json::from_str(r#"{"seed": 9}"#).unwrap();
        assert_eq!(partial.seed, 9);
        assert_eq!(partial.restart, RestartPolicy::default());
    }
}
