//! CNF instances, DIMACS text, and model evaluation.

use std::fmt::{self, Write as _};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CnfError {
    #[error("literal 0 is not a valid literal")]
    ZeroLiteral,
    #[error("literal {lit} out of range for {num_vars} variables")]
    LiteralOutOfRange { lit: i64, num_vars: usize },
    #[error("empty clause")]
    EmptyClause,
    #[error("model covers {got} variables, instance has {expected}")]
    PartialModel { expected: usize, got: usize },
    #[error("model assigns variable {0} both ways")]
    ConflictingModel(usize),
    #[error("DIMACS line {line}: {message}")]
    Dimacs { line: usize, message: String },
    #[error("solver output line {line}: {message}")]
    SolverOutput { line: usize, message: String },
}

fn dimacs_err(line: usize, message: impl Into<String>) -> CnfError {
    CnfError::Dimacs {
        line,
        message: message.into(),
    }
}

/// A signed variable reference in DIMACS convention: `+v` or `-v`, `v >= 1`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit(i32);

impl Lit {
    pub fn new(var: usize, positive: bool) -> Self {
        assert!(
            var >= 1 && var <= i32::MAX as usize,
            "variable id {var} out of range"
        );
        let v = var as i32;
        Lit(if positive { v } else { -v })
    }

    pub fn positive(var: usize) -> Self {
        Lit::new(var, true)
    }

    pub fn negative(var: usize) -> Self {
        Lit::new(var, false)
    }

    pub fn from_dimacs(value: i64) -> Result<Self, CnfError> {
        if value == 0 {
            return Err(CnfError::ZeroLiteral);
        }
        i32::try_from(value)
            .ok()
            .filter(|v| *v != i32::MIN)
            .map(Lit)
            .ok_or(CnfError::LiteralOutOfRange {
                lit: value,
                num_vars: i32::MAX as usize,
            })
    }

    pub fn var(self) -> usize {
        self.0.unsigned_abs() as usize
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }

    pub fn to_dimacs(self) -> i32 {
        self.0
    }

    /// `self` when `keep` is true, its negation otherwise.
    pub fn signed(self, keep: bool) -> Self {
        if keep {
            self
        } else {
            !self
        }
    }
}

impl std::ops::Not for Lit {
    type Output = Lit;
    fn not(self) -> Lit {
        Lit(-self.0)
    }
}

impl fmt::Debug for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub type Clause = Vec<Lit>;

/// Clauses over variables `1..=num_vars`, kept in insertion order.
///
/// Every stored clause is nonempty, has no repeated literal and is not a
/// tautology.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CnfInstance {
    num_vars: usize,
    clauses: Vec<Clause>,
    comments: Vec<String>,
}

impl CnfInstance {
    pub fn new(num_vars: usize) -> Self {
        CnfInstance {
            num_vars,
            clauses: Vec::new(),
            comments: Vec::new(),
        }
    }

    /// Builds an instance from raw DIMACS integers, normalizing each clause
    /// with [`CnfInstance::add_clause`].
    pub fn from_dimacs_clauses<C>(num_vars: usize, clauses: C) -> Result<Self, CnfError>
    where
        C: IntoIterator,
        C::Item: AsRef<[i64]>,
    {
        let mut inst = CnfInstance::new(num_vars);
        for clause in clauses {
            let lits = clause
                .as_ref()
                .iter()
                .map(|&v| Lit::from_dimacs(v))
                .collect::<Result<Vec<_>, _>>()?;
            inst.add_clause(lits)?;
        }
        Ok(inst)
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    /// Raises the variable count; never lowers it.
    pub fn reserve_vars(&mut self, num_vars: usize) {
        self.num_vars = self.num_vars.max(num_vars);
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn comments(&self) -> &[String] {
        &self.comments
    }

    pub fn add_comment(&mut self, text: impl Into<String>) {
        self.comments.push(text.into());
    }

    /// Appends a clause. Repeated literals are dropped (first occurrence
    /// kept, order otherwise preserved). Returns `Ok(false)` without storing
    /// anything when the clause is a tautology.
    pub fn add_clause<I>(&mut self, lits: I) -> Result<bool, CnfError>
    where
        I: IntoIterator<Item = Lit>,
    {
        let mut clause: Clause = Vec::new();
        for lit in lits {
            if lit.var() > self.num_vars {
                return Err(CnfError::LiteralOutOfRange {
                    lit: lit.to_dimacs() as i64,
                    num_vars: self.num_vars,
                });
            }
            if clause.contains(&!lit) {
                return Ok(false);
            }
            if !clause.contains(&lit) {
                clause.push(lit);
            }
        }
        if clause.is_empty() {
            return Err(CnfError::EmptyClause);
        }
        self.clauses.push(clause);
        Ok(true)
    }
}

/// A total truth assignment to variables `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Model {
    values: Vec<bool>,
}

impl Model {
    pub fn new(values: Vec<bool>) -> Self {
        Model { values }
    }

    pub fn all_false(num_vars: usize) -> Self {
        Model {
            values: vec![false; num_vars],
        }
    }

    /// Builds a model from signed literals; every variable of
    /// `1..=num_vars` must be assigned exactly one way. Literals above
    /// `num_vars` are ignored.
    pub fn from_literals<I>(num_vars: usize, lits: I) -> Result<Self, CnfError>
    where
        I: IntoIterator<Item = Lit>,
    {
        let mut slots: Vec<Option<bool>> = vec![None; num_vars];
        for lit in lits {
            let Some(slot) = slots.get_mut(lit.var().wrapping_sub(1)) else {
                continue;
            };
            match slot {
                Some(v) if *v != lit.is_positive() => {
                    return Err(CnfError::ConflictingModel(lit.var()))
                }
                _ => *slot = Some(lit.is_positive()),
            }
        }
        let assigned = slots.iter().filter(|s| s.is_some()).count();
        if assigned < num_vars {
            return Err(CnfError::PartialModel {
                expected: num_vars,
                got: assigned,
            });
        }
        Ok(Model {
            values: slots.into_iter().map(|s| s.unwrap_or(false)).collect(),
        })
    }

    pub fn num_vars(&self) -> usize {
        self.values.len()
    }

    /// Value of variable `var` (1-based).
    pub fn value(&self, var: usize) -> bool {
        self.values[var - 1]
    }

    pub fn set(&mut self, var: usize, value: bool) {
        self.values[var - 1] = value;
    }

    pub fn lit_true(&self, lit: Lit) -> bool {
        self.value(lit.var()) == lit.is_positive()
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }

    /// Signed literals `1..=n`, positive where the variable is true.
    pub fn literals(&self) -> impl Iterator<Item = Lit> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(|(i, &v)| Lit::new(i + 1, v))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Evaluation {
    pub satisfied: bool,
    pub first_violated: Option<usize>,
}

/// Checks `model` against every clause in instance order.
pub fn eval_model(inst: &CnfInstance, model: &Model) -> Result<Evaluation, CnfError> {
    if model.num_vars() < inst.num_vars() {
        return Err(CnfError::PartialModel {
            expected: inst.num_vars(),
            got: model.num_vars(),
        });
    }
    let first_violated = inst
        .clauses()
        .iter()
        .position(|c| !c.iter().any(|&l| model.lit_true(l)));
    Ok(Evaluation {
        satisfied: first_violated.is_none(),
        first_violated,
    })
}

/// DIMACS CNF text: one `c ` line per comment, the `p cnf V C` header, then
/// one line per clause terminated by ` 0`.
pub fn write_dimacs(inst: &CnfInstance) -> String {
    let mut out = String::new();
    for comment in inst.comments() {
        if comment.is_empty() {
            out.push_str("c\n");
        } else {
            let _ = writeln!(out, "c {comment}");
        }
    }
    let _ = writeln!(out, "p cnf {} {}", inst.num_vars(), inst.num_clauses());
    for clause in inst.clauses() {
        for lit in clause {
            let _ = write!(out, "{lit} ");
        }
        out.push_str("0\n");
    }
    out
}

/// Parses DIMACS CNF. Comment lines (before or after the header) are kept
/// in order; clauses may span lines.
pub fn parse_dimacs(text: &str) -> Result<CnfInstance, CnfError> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut comments = Vec::new();
    let mut raw: Vec<(usize, Vec<i64>)> = Vec::new();
    let mut current: Vec<i64> = Vec::new();
    let mut current_start = 0;
    let mut last_line = 0;

    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        last_line = lineno;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('c') {
            if rest.is_empty() || rest.starts_with(char::is_whitespace) {
                comments.push(rest.strip_prefix(' ').unwrap_or(rest).to_string());
                continue;
            }
        }
        if trimmed.starts_with('p') {
            if header.is_some() {
                return Err(dimacs_err(lineno, "second problem line"));
            }
            let fields: Vec<&str> = trimmed.split_whitespace().collect();
            let parsed = match fields.as_slice() {
                ["p", "cnf", v, c] => v.parse().ok().zip(c.parse().ok()),
                _ => None,
            };
            let (v, c) = parsed
                .ok_or_else(|| dimacs_err(lineno, format!("malformed problem line `{trimmed}`")))?;
            header = Some((v, c, lineno));
            continue;
        }
        if trimmed == "%" {
            break;
        }
        let Some((num_vars, _, _)) = header else {
            return Err(dimacs_err(lineno, "clause before the `p cnf` header"));
        };
        for token in trimmed.split_whitespace() {
            let value: i64 = token
                .parse()
                .map_err(|_| dimacs_err(lineno, format!("invalid literal `{token}`")))?;
            if value == 0 {
                if current.is_empty() {
                    return Err(dimacs_err(lineno, "empty clause"));
                }
                raw.push((current_start, std::mem::take(&mut current)));
                continue;
            }
            if value.unsigned_abs() as usize > num_vars {
                return Err(dimacs_err(
                    lineno,
                    format!("literal {value} exceeds the declared {num_vars} variables"),
                ));
            }
            if current.is_empty() {
                current_start = lineno;
            }
            current.push(value);
        }
    }

    let (num_vars, num_clauses, header_line) =
        header.ok_or_else(|| dimacs_err(last_line.max(1), "missing `p cnf` header"))?;
    if !current.is_empty() {
        return Err(dimacs_err(current_start, "clause not terminated by 0"));
    }
    if raw.len() != num_clauses {
        return Err(dimacs_err(
            header_line,
            format!("header declares {num_clauses} clauses, found {}", raw.len()),
        ));
    }
    let mut inst = CnfInstance::new(num_vars);
    inst.comments = comments;
    for (line, clause) in raw {
        let lits = clause
            .into_iter()
            .map(Lit::from_dimacs)
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| dimacs_err(line, e.to_string()))?;
        inst.add_clause(lits)
            .map_err(|e| dimacs_err(line, e.to_string()))?;
    }
    Ok(inst)
}

/// What an external solver reported.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolverAnswer {
    Satisfiable(Model),
    Unsatisfiable,
    Unknown,
}

/// Reads solver output in any of the usual shapes: competition style
/// (`s SATISFIABLE` plus `v` lines), MiniSat result files (`SAT` then a
/// literal line), or a bare list of signed literals, one or more per line.
/// A satisfiable answer must assign all of `1..=num_vars`.
pub fn parse_solver_output(text: &str, num_vars: usize) -> Result<SolverAnswer, CnfError> {
    let mut status: Option<bool> = None;
    let mut unknown = false;
    let mut lits = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let trimmed = line.trim();
        let bad = |message: String| CnfError::SolverOutput {
            line: lineno,
            message,
        };
        let body = match trimmed.split_once(char::is_whitespace) {
            Some(("s", rest)) => {
                match rest.trim() {
                    "SATISFIABLE" => status = Some(true),
                    "UNSATISFIABLE" => status = Some(false),
                    _ => unknown = true,
                }
                continue;
            }
            Some(("c", _)) => continue,
            Some(("v", rest)) => rest,
            _ => match trimmed {
                "" | "c" => continue,
                "SAT" | "SATISFIABLE" => {
                    status = Some(true);
                    continue;
                }
                "UNSAT" | "UNSATISFIABLE" => {
                    status = Some(false);
                    continue;
                }
                "INDET" | "UNKNOWN" | "INDETERMINATE" => {
                    unknown = true;
                    continue;
                }
                "v" => continue,
                other => other,
            },
        };
        for token in body.split_whitespace() {
            let value: i64 = token
                .parse()
                .map_err(|_| bad(format!("unexpected token `{token}`")))?;
            if value != 0 {
                lits.push(Lit::from_dimacs(value).map_err(|e| bad(e.to_string()))?);
            }
        }
    }
    match status {
        Some(false) => Ok(SolverAnswer::Unsatisfiable),
        Some(true) => Ok(SolverAnswer::Satisfiable(Model::from_literals(
            num_vars, lits,
        )?)),
        None if !lits.is_empty() => Ok(SolverAnswer::Satisfiable(Model::from_literals(
            num_vars, lits,
        )?)),
        None if unknown => Ok(SolverAnswer::Unknown),
        None => Ok(SolverAnswer::Unknown),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn inst(num_vars: usize, clauses: &[&[i64]]) -> CnfInstance {
        CnfInstance::from_dimacs_clauses(num_vars, clauses.iter().copied()).unwrap()
    }

    #[test]
    fn write_examples() {
        assert_eq!(write_dimacs(&inst(1, &[&[1]])), "p cnf 1 1\n1 0\n");
        assert_eq!(write_dimacs(&CnfInstance::new(3)), "p cnf 3 0\n");
        let mut with_comment = inst(2, &[&[1, -2]]);
        with_comment.add_comment("hello");
        with_comment.add_comment("");
        assert_eq!(
            write_dimacs(&with_comment),
            "c hello\nc\np cnf 2 1\n1 -2 0\n"
        );
    }

    #[test]
    fn clause_normalization() {
        let mut i = CnfInstance::new(3);
        assert!(i
            .add_clause([Lit::positive(2), Lit::negative(1), Lit::positive(2)])
            .unwrap());
        assert_eq!(i.clauses()[0], vec![Lit::positive(2), Lit::negative(1)]);
        assert!(!i.add_clause([Lit::positive(1), Lit::negative(1)]).unwrap());
        assert_eq!(i.num_clauses(), 1);
        assert_eq!(i.add_clause([]), Err(CnfError::EmptyClause));
        assert!(matches!(
            i.add_clause([Lit::positive(4)]),
            Err(CnfError::LiteralOutOfRange { .. })
        ));
    }

    #[test]
    fn parse_errors() {
        let err = parse_dimacs("p cnf 3 5\n1 2 0\n2 3 0\n-1 0\n3 0\n").unwrap_err();
        assert!(matches!(err, CnfError::Dimacs { line: 1, .. }), "{err}");
        let err = parse_dimacs("c x\np cnf 6 1\n1 7 0\n").unwrap_err();
        assert!(matches!(err, CnfError::Dimacs { line: 3, .. }), "{err}");
        let err = parse_dimacs("p cnf 3 1\n1 2\n").unwrap_err();
        assert!(matches!(err, CnfError::Dimacs { line: 2, .. }), "{err}");
        assert!(parse_dimacs("1 2 0\n").is_err());
        assert!(parse_dimacs("p cnf x 1\n").is_err());
        assert!(parse_dimacs("p cnf 2 1\n1 y 0\n").is_err());
        assert!(parse_dimacs("").is_err());
    }

    #[test]
    fn parse_multiline_clause_and_comments() {
        let i = parse_dimacs("c first\np cnf 3 2\n1\n-2 0 3\n0\nc trailing\n").unwrap();
        assert_eq!(i.comments(), &["first".to_string(), "trailing".to_string()]);
        assert_eq!(i.num_clauses(), 2);
        assert_eq!(i.clauses()[0], vec![Lit::positive(1), Lit::negative(2)]);
    }

    #[test]
    fn eval_examples() {
        let unit = inst(1, &[&[1]]);
        let e = eval_model(&unit, &Model::new(vec![true])).unwrap();
        assert!(e.satisfied && e.first_violated.is_none());
        let contra = inst(1, &[&[1], &[-1]]);
        assert_eq!(
            eval_model(&contra, &Model::new(vec![true]))
                .unwrap()
                .first_violated,
            Some(1)
        );
        assert_eq!(
            eval_model(&contra, &Model::new(vec![false]))
                .unwrap()
                .first_violated,
            Some(0)
        );
        assert!(matches!(
            eval_model(&inst(2, &[&[1]]), &Model::new(vec![true])),
            Err(CnfError::PartialModel { .. })
        ));
    }

    #[test]
    fn model_from_literals() {
        let m = Model::from_literals(3, [1, -2, 3].map(|v| Lit::from_dimacs(v).unwrap())).unwrap();
        assert_eq!(m.values(), &[true, false, true]);
        assert!(matches!(
            Model::from_literals(3, [Lit::positive(1)]),
            Err(CnfError::PartialModel {
                expected: 3,
                got: 1
            })
        ));
        assert_eq!(
            Model::from_literals(1, [Lit::positive(1), Lit::negative(1)]),
            Err(CnfError::ConflictingModel(1))
        );
    }

    #[test]
    fn solver_output_shapes() {
        let comp = "c hi\ns SATISFIABLE\nv 1 -2\nv 3 0\n";
        assert_eq!(
            parse_solver_output(comp, 3).unwrap(),
            SolverAnswer::Satisfiable(Model::new(vec![true, false, true]))
        );
        assert_eq!(
            parse_solver_output("s UNSATISFIABLE\n", 3).unwrap(),
            SolverAnswer::Unsatisfiable
        );
        assert_eq!(
            parse_solver_output("UNSAT\n", 3).unwrap(),
            SolverAnswer::Unsatisfiable
        );
        assert_eq!(
            parse_solver_output("SAT\n-1 2 0\n", 2).unwrap(),
            SolverAnswer::Satisfiable(Model::new(vec![false, true]))
        );
        assert_eq!(
            parse_solver_output("1\n-2\n", 2).unwrap(),
            SolverAnswer::Satisfiable(Model::new(vec![true, false]))
        );
        assert_eq!(
            parse_solver_output("s UNKNOWN\n", 2).unwrap(),
            SolverAnswer::Unknown
        );
        assert!(parse_solver_output("s SATISFIABLE\nv 1 0\n", 2).is_err());
        assert!(parse_solver_output("v 1 x\n", 2).is_err());
    }

    fn arb_instance() -> impl Strategy<Value = CnfInstance> {
        (1usize..12).prop_flat_map(|n| {
            let lit = (1..=n as i64, any::<bool>()).prop_map(|(v, s)| if s { v } else { -v });
            proptest::collection::vec(proptest::collection::vec(lit, 1..6), 0..30).prop_map(
                move |cs| {
                    let mut i = CnfInstance::from_dimacs_clauses(n, cs).unwrap();
                    i.add_comment("generated");
                    i
                },
            )
        })
    }

    proptest! {
        #[test]
        fn dimacs_round_trip(i in arb_instance()) {
            prop_assert_eq!(parse_dimacs(&write_dimacs(&i)).unwrap(), i);
        }

        #[test]
        fn eval_agrees_with_brute(i in arb_instance(), bits in any::<u64>()) {
            let model = Model::new((0..i.num_vars()).map(|v| bits >> v & 1 == 1).collect());
            // Independent clause-by-clause evaluation on raw DIMACS integers.
            let mut expected = None;
            for (k, clause) in i.clauses().iter().enumerate() {
                let sat = clause.iter().any(|l| {
                    let v = l.to_dimacs();
                    let val = bits >> (v.unsigned_abs() - 1) & 1 == 1;
                    if v > 0 { val } else { !val }
                });
                if !sat { expected = Some(k); break; }
            }
            let e = eval_model(&i, &model).unwrap();
            prop_assert_eq!(e.first_violated, expected);
            prop_assert_eq!(e.satisfied, expected.is_none());
        }
    }
}
