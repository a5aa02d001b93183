//! Running a third-party SAT solver on an instance.

use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context, Result};
use obsnum::cnf::{eval_model, parse_solver_output, CnfInstance, SolverAnswer};
use obsnum::solver::{Budget, Outcome};

/// Removes the temporary instance file on drop.
struct TempFile(PathBuf);

impl Drop for TempFile {
    fn drop(&mut self) {
        let _ = std::fs::remove_file(&self.0);
    }
}

fn temp_path() -> PathBuf {
    let nanos = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_nanos())
        .unwrap_or(0);
    std::env::temp_dir().join(format!("obsnum-{}-{nanos}.cnf", std::process::id()))
}

/// Writes `dimacs` to a temporary file, runs `command` with the file path
/// appended, and reads the answer from its standard output. A reported
/// model is checked against `inst`.
pub fn run(command: &[String], inst: &CnfInstance, dimacs: &str) -> Result<(Outcome, Duration)> {
    let Some((program, args)) = command.split_first() else {
        bail!("empty external solver command");
    };
    let file = TempFile(temp_path());
    std::fs::write(&file.0, dimacs).with_context(|| format!("writing {}", file.0.display()))?;
    let start = Instant::now();
    let output = Command::new(program)
        .args(args)
        .arg(&file.0)
        .output()
        .with_context(|| format!("running external solver `{program}`"))?;
    let elapsed = start.elapsed();
    let stdout = String::from_utf8_lossy(&output.stdout);
    let answer =
        parse_solver_output(&stdout, inst.num_vars()).context("reading external solver output")?;
    let outcome = match answer {
        SolverAnswer::Satisfiable(model) => {
            let eval = eval_model(inst, &model)?;
            if let Some(clause) = eval.first_violated {
                bail!("external solver model violates clause {clause}");
            }
            Outcome::Sat(model)
        }
        SolverAnswer::Unsatisfiable => Outcome::Unsat,
        SolverAnswer::Unknown => Outcome::Indeterminate(Budget::External),
    };
    Ok((outcome, elapsed))
}

/// Splits a command string on whitespace.
pub fn split_command(text: &str) -> Vec<String> {
    text.split_whitespace().map(str::to_string).collect()
}
