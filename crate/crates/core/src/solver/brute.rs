use std::time::Instant;

use crate::cnf::{CnfInstance, Model};

use super::{check_model, Outcome, SolverError, SolverResult, Stats};

pub const BRUTE_MAX_VARS: usize = 25;

/// Tries every assignment in increasing binary order (variable 1 is the
/// lowest bit) and returns the first model found.
pub fn brute_solve(inst: &CnfInstance) -> Result<SolverResult, SolverError> {
    let start = Instant::now();
    let vars = inst.num_vars();
    if vars > BRUTE_MAX_VARS {
        return Err(SolverError::TooManyVariables {
            vars,
            max: BRUTE_MAX_VARS,
        });
    }
    let masks: Vec<(u32, u32)> = inst
        .clauses()
        .iter()
        .map(|c| {
            c.iter().fold((0u32, 0u32), |(pos, neg), l| {
                let bit = 1u32 << (l.var() - 1);
                if l.is_positive() {
                    (pos | bit, neg)
                } else {
                    (pos, neg | bit)
                }
            })
        })
        .collect();
    let found = (0u32..(1u32 << vars)).find(|&m| {
        masks
            .iter()
            .all(|&(pos, neg)| m & pos != 0 || !m & neg != 0)
    });
    let outcome = match found {
        Some(m) => {
            let model = Model::new((0..vars).map(|i| m >> i & 1 == 1).collect());
            check_model(inst, &model)?;
            Outcome::Sat(model)
        }
        None => Outcome::Unsat,
    };
    Ok(SolverResult {
        outcome,
        stats: Stats {
            wall_time: start.elapsed(),
            ..Stats::default()
        },
    })
}
