mod external;
mod manifest;

use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use sha2::{Digest, Sha256};

use obsnum::cnf::{parse_dimacs, write_dimacs, CnfInstance};
use obsnum::encode::{encode, EncodeOptions, Encoding, KeyPathScope, Mode};
use obsnum::graph::{gyro_bipyramid, k_star, named_graph, parse_graph, serialize_graph, Graph};
use obsnum::orientation::{
    check_axioms, derive_chirotope, parse_points_json, perturb_to_general_position, PointRecord,
    PointSetJson,
};
use obsnum::solver::{solve, Budget, Outcome, RestartPolicy, SolverConfig, Stats};
use obsnum::verify::{assignment_of_drawing, check_representation, parse_drawing};

use manifest::{InstanceProvenance, RunManifest, SolverSpec, TOOL_VERSION};

/// `println!` that keeps going when the reader has closed standard output,
/// so `obsnum prove ... | head -1` still exits with the verdict's code.
macro_rules! out {
    ($($arg:tt)*) => {{
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

const EXIT_OK: u8 = 0;
const EXIT_INVALID: u8 = 1;
const EXIT_INPUT: u8 = 3;
const EXIT_SAT: u8 = 10;
const EXIT_UNSAT: u8 = 20;
const EXIT_BUDGET: u8 = 30;

#[derive(Parser)]
#[command(
    name = "obsnum",
    version,
    about = "SAT-based obstacle-number lower bounds and drawing checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print a graph as canonical JSON.
    Graph {
        #[command(subcommand)]
        which: GraphCommand,
        /// Write to this file instead of standard output.
        #[arg(long, global = true)]
        out: Option<PathBuf>,
    },
    /// Build the outside or single-obstacle instance of a graph as DIMACS.
    Encode {
        #[command(flatten)]
        instance: InstanceArgs,
        /// Write DIMACS here; the summary then goes to standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve a DIMACS instance.
    Solve {
        /// DIMACS file, or `-` for standard input.
        cnf: String,
        #[command(flatten)]
        solver: SolverArgs,
        /// Print the model as a `v` line when satisfiable.
        #[arg(long)]
        model: bool,
    },
    /// Check a drawing with polygonal obstacles exactly.
    Verify {
        /// Drawing JSON file.
        #[arg(long, value_name = "FILE")]
        drawing: PathBuf,
        /// Print the report as JSON instead of text.
        #[arg(long)]
        json: bool,
        /// Also derive the drawing's assignment for this instance and check
        /// that it satisfies every clause.
        #[arg(long, value_name = "MODE")]
        instance: Option<ModeArg>,
    },
    /// Encode, solve and state what the answer proves.
    Prove {
        #[command(flatten)]
        instance: InstanceArgs,
        #[command(flatten)]
        solver: SolverArgs,
        /// Name used in the verdict line (defaults to the graph argument).
        #[arg(long)]
        name: Option<String>,
        /// Also save the instance as DIMACS.
        #[arg(long, value_name = "FILE")]
        dimacs_out: Option<PathBuf>,
    },
    /// Print the orientation of every triple of a point set and check the
    /// 4- and 5-point rules.
    Chirotope {
        /// Point-set JSON: {"points": [[x, y], ...]}.
        points: PathBuf,
    },
    /// Move points into general position by an explicit small perturbation.
    Perturb { points: PathBuf },
}

#[derive(Subcommand)]
enum GraphCommand {
    /// Gyroelongated n-bipyramid X_n (2n + 2 vertices).
    Gyro { n: usize },
    /// K_{a,b} minus a matching of size a.
    Kstar { a: usize, b: usize },
    /// A catalog graph, e.g. petersen, icosahedron, cycle(8), complete_bipartite(2,3).
    Named { name: String },
    /// Read a JSON or graph6 file and print it canonically.
    Convert { file: String },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Outside,
    Single,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Outside => Mode::Outside,
            ModeArg::Single => Mode::Single,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ScopeArg {
    Through,
    Avoid,
}

#[derive(Clone, Copy, ValueEnum)]
enum RestartArg {
    Geometric,
    Luby,
    Never,
}

#[derive(Args)]
struct InstanceArgs {
    /// Graph file (JSON or graph6), `-` for standard input, or a catalog
    /// name such as gyro(4).
    graph: String,
    #[arg(long, value_enum, default_value = "outside")]
    mode: ModeArg,
    /// Only use paths with at most this many edges.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    max_path_len: Option<u64>,
    /// Single mode: key paths may pass through the line's endpoints
    /// (`through`) or must avoid them (`avoid`).
    #[arg(long, value_enum, default_value = "through")]
    key_paths: ScopeArg,
    /// Single mode: also constrain pairs of non-edges sharing a vertex.
    #[arg(long)]
    shared_endpoint: bool,
    /// Worker threads for clause generation (default: all cores).
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    jobs: Option<u64>,
}

impl InstanceArgs {
    fn options(&self) -> EncodeOptions {
        EncodeOptions {
            max_path_len: self.max_path_len.map(|k| k as usize),
            key_paths: match self.key_paths {
                ScopeArg::Through => KeyPathScope::ThroughLine,
                ScopeArg::Avoid => KeyPathScope::AvoidLine,
            },
            shared_endpoint: self.shared_endpoint,
        }
    }

    fn build(&self) -> Result<(Encoding, String)> {
        let (graph, name) = load_graph(&self.graph)?;
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(j) = self.jobs {
            builder = builder.num_threads(j as usize);
        }
        let pool = builder.build().context("starting worker threads")?;
        let encoding = pool.install(|| encode(&graph, self.mode.into(), &self.options()))?;
        Ok((encoding, name))
    }
}

#[derive(Args)]
struct SolverArgs {
    /// Give up (INDETERMINATE) after this many conflicts.
    #[arg(long)]
    conflict_budget: Option<u64>,
    /// Give up (INDETERMINATE) after this many seconds.
    #[arg(long)]
    time_budget: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "geometric")]
    restart: RestartArg,
    /// Run this solver command instead, with the DIMACS path appended.
    #[arg(long, value_name = "COMMAND")]
    external_solver: Option<String>,
    /// Also write the run manifest to this file.
    #[arg(long, value_name = "FILE")]
    manifest: Option<PathBuf>,
}

impl SolverArgs {
    fn config(&self) -> Result<SolverConfig> {
        let time_budget = match self.time_budget {
            Some(s) => {
                Some(Duration::try_from_secs_f64(s).map_err(|e| anyhow!("--time-budget: {e}"))?)
            }
            None => None,
        };
        Ok(SolverConfig {
            seed: self.seed,
            conflict_budget: self.conflict_budget,
            time_budget,
            restart: match self.restart {
                RestartArg::Geometric => RestartPolicy::default(),
                RestartArg::Luby => RestartPolicy::Luby { unit: 100 },
                RestartArg::Never => RestartPolicy::Never,
            },
            ..SolverConfig::default()
        })
    }

    fn spec(&self) -> Result<SolverSpec> {
        Ok(match &self.external_solver {
            Some(cmd) => SolverSpec::External {
                command: external::split_command(cmd),
            },
            None => SolverSpec::Embedded(self.config()?),
        })
    }
}

fn read_input(source: &str) -> Result<String> {
    if source == "-" {
        let mut text = String::new();
        std::io::stdin()
            .read_to_string(&mut text)
            .context("reading standard input")?;
        Ok(text)
    } else {
        std::fs::read_to_string(source).with_context(|| format!("reading {source}"))
    }
}

fn load_graph(source: &str) -> Result<(Graph, String)> {
    if source == "-" || Path::new(source).exists() {
        let text = read_input(source)?;
        let graph = parse_graph(&text).with_context(|| format!("parsing graph {source}"))?;
        let name = Path::new(source)
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "G".to_string());
        return Ok((graph, name));
    }
    let graph = named_graph(source)
        .with_context(|| format!("`{source}` is neither a file nor a catalog name"))?;
    Ok((graph, source.to_string()))
}

fn write_output(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn sha256_hex(text: &str) -> String {
    Sha256::digest(text.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn summary_text(e: &Encoding) -> String {
    let s = &e.summary;
    format!(
        "vars {}\nclauses {}\nfour-point {}\nfive-point {}\npath {}\nkey-path-definition {}\nkey-path-constraint {}\n",
        e.instance.num_vars(),
        e.instance.num_clauses(),
        s.four_point,
        s.five_point,
        s.path,
        s.key_path_definition,
        s.key_path_constraint
    )
}

/// Solves `inst` with the embedded or an external solver.
fn run_solver(args: &SolverArgs, inst: &CnfInstance, dimacs: &str) -> Result<(Outcome, Stats)> {
    match &args.external_solver {
        Some(cmd) => {
            let (outcome, wall_time) = external::run(&external::split_command(cmd), inst, dimacs)?;
            Ok((
                outcome,
                Stats {
                    wall_time,
                    ..Stats::default()
                },
            ))
        }
        None => {
            let result = solve(inst, &args.config()?)?;
            Ok((result.outcome, result.stats))
        }
    }
}

fn emit_manifest(args: &SolverArgs, manifest: &RunManifest) -> Result<()> {
    out!("c manifest {}", serde_json::to_string(manifest)?);
    if let Some(path) = &args.manifest {
        let text = serde_json::to_string_pretty(manifest)? + "\n";
        std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn stats_line(stats: &Stats) -> String {
    format!(
        "c decisions {} propagations {} conflicts {} restarts {} time {:.3}s",
        stats.decisions,
        stats.propagations,
        stats.conflicts,
        stats.restarts,
        stats.wall_time.as_secs_f64()
    )
}

fn exit_for(outcome: &Outcome) -> u8 {
    match outcome {
        Outcome::Sat(_) => EXIT_SAT,
        Outcome::Unsat => EXIT_UNSAT,
        Outcome::Indeterminate(_) => EXIT_BUDGET,
    }
}

fn cmd_graph(which: &GraphCommand, out: Option<&Path>) -> Result<u8> {
    let graph = match which {
        GraphCommand::Gyro { n } => gyro_bipyramid(*n)?,
        GraphCommand::Kstar { a, b } => k_star(*a, *b)?,
        GraphCommand::Named { name } => named_graph(name)?,
        GraphCommand::Convert { file } => load_graph(file)?.0,
    };
    write_output(out, &serialize_graph(&graph))?;
    Ok(EXIT_OK)
}

fn cmd_encode(instance: &InstanceArgs, out: Option<&Path>) -> Result<u8> {
    let (encoding, _) = instance.build()?;
    let dimacs = write_dimacs(&encoding.instance);
    write_output(out, &dimacs)?;
    let summary = summary_text(&encoding);
    if out.is_some() {
        let _ = std::io::stdout().write_all(summary.as_bytes());
    } else {
        eprint!("{summary}");
    }
    Ok(EXIT_OK)
}

fn cmd_solve(cnf: &str, args: &SolverArgs, print_model: bool) -> Result<u8> {
    let text = read_input(cnf)?;
    let inst = parse_dimacs(&text).with_context(|| format!("parsing {cnf}"))?;
    let (outcome, stats) = run_solver(args, &inst, &text)?;
    match &outcome {
        Outcome::Sat(model) => {
            out!("s SATISFIABLE");
            if print_model {
                let lits: Vec<String> = model.literals().map(|l| l.to_string()).collect();
                out!("v {} 0", lits.join(" "));
            }
        }
        Outcome::Unsat => out!("s UNSATISFIABLE"),
        Outcome::Indeterminate(_) => out!("s UNKNOWN\nc {outcome}"),
    }
    out!("{}", stats_line(&stats));
    let prov = InstanceProvenance::from_comments(inst.comments());
    let manifest = RunManifest {
        tool_version: TOOL_VERSION.to_string(),
        command_line: std::env::args().collect(),
        instance_sha256: sha256_hex(&text),
        graph_sha256: prov.graph_sha256,
        mode: prov.mode,
        max_path_len: prov.max_path_len,
        key_paths: prov.key_paths,
        shared_endpoint: prov.shared_endpoint,
        jobs: None,
        num_vars: inst.num_vars(),
        num_clauses: inst.num_clauses(),
        solver: args.spec()?,
        outcome: outcome.label().to_string(),
        stats,
    };
    emit_manifest(args, &manifest)?;
    Ok(exit_for(&outcome))
}

fn cmd_verify(drawing: &Path, json: bool, instance: Option<ModeArg>) -> Result<u8> {
    let text = std::fs::read_to_string(drawing)
        .with_context(|| format!("reading {}", drawing.display()))?;
    let d =
        parse_drawing(&text).with_context(|| format!("parsing drawing {}", drawing.display()))?;
    let report = check_representation(&d);
    if json {
        out!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        let pairs = |v: &[(usize, usize)]| {
            if v.is_empty() {
                "none".to_string()
            } else {
                v.iter()
                    .map(|(a, b)| format!("{a}-{b}"))
                    .collect::<Vec<_>>()
                    .join(" ")
            }
        };
        out!("valid: {}", if report.valid { "yes" } else { "no" });
        out!("obstacles: {}", d.obstacles().len());
        out!(
            "unblocked non-edges: {}",
            pairs(&report.unblocked_non_edges)
        );
        let pierced: Vec<String> = report
            .pierced_edges
            .iter()
            .map(|((a, b), o)| format!("{a}-{b} by obstacle {o}"))
            .collect();
        out!(
            "pierced edges: {}",
            if pierced.is_empty() {
                "none".into()
            } else {
                pierced.join(", ")
            }
        );
        let covered: Vec<String> = report
            .covered_vertices
            .iter()
            .map(|(v, o)| format!("{v} in obstacle {o}"))
            .collect();
        out!(
            "covered vertices: {}",
            if covered.is_empty() {
                "none".into()
            } else {
                covered.join(", ")
            }
        );
        for c in &report.outside_checks {
            match c.witness {
                Some(w) if c.passed => out!(
                    "outside obstacle {}: passed (its vertex {w} lies outside the hull of the drawing)",
                    c.obstacle
                ),
                Some(_) => out!("outside obstacle {}: failed (meets the drawing)", c.obstacle),
                None => out!("outside obstacle {}: failed (no vertex outside the hull of the drawing)", c.obstacle),
            }
        }
    }
    if let Some(mode) = instance {
        let mode: Mode = mode.into();
        let encoding = encode(d.graph(), mode, &EncodeOptions::default())?;
        match assignment_of_drawing(&d, &encoding) {
            Ok(_) => out!(
                "assignment satisfies the {mode} instance ({} vars, {} clauses)",
                encoding.instance.num_vars(),
                encoding.instance.num_clauses()
            ),
            Err(e) => {
                out!("assignment check failed: {e}");
                return Ok(EXIT_INVALID);
            }
        }
    }
    Ok(if report.valid { EXIT_OK } else { EXIT_INVALID })
}

fn cmd_prove(
    instance: &InstanceArgs,
    args: &SolverArgs,
    name: Option<&str>,
    dimacs_out: Option<&Path>,
) -> Result<u8> {
    let (encoding, default_name) = instance.build()?;
    let name = name.unwrap_or(&default_name);
    let dimacs = write_dimacs(&encoding.instance);
    if let Some(path) = dimacs_out {
        std::fs::write(path, &dimacs).with_context(|| format!("writing {}", path.display()))?;
    }
    let (outcome, stats) = run_solver(args, &encoding.instance, &dimacs)?;
    let param = match encoding.mode {
        Mode::Outside => "obsout",
        Mode::Single => "obs",
    };
    let (verdict, code) = match &outcome {
        Outcome::Unsat => (format!("{param}({name}) ≥ 2 PROVED"), EXIT_OK),
        Outcome::Sat(_) => ("no conclusion (instance satisfiable)".to_string(), EXIT_SAT),
        Outcome::Indeterminate(Budget::External) => (
            "no conclusion (solver gave no answer)".to_string(),
            EXIT_BUDGET,
        ),
        Outcome::Indeterminate(_) => ("no conclusion (budget)".to_string(), EXIT_BUDGET),
    };
    out!("{verdict}");
    out!(
        "c {} vars {} clauses, solver {}",
        encoding.instance.num_vars(),
        encoding.instance.num_clauses(),
        outcome
    );
    out!("{}", stats_line(&stats));
    let manifest = RunManifest {
        tool_version: TOOL_VERSION.to_string(),
        command_line: std::env::args().collect(),
        instance_sha256: sha256_hex(&dimacs),
        graph_sha256: Some(encoding.graph_hash.clone()),
        mode: Some(encoding.mode),
        max_path_len: encoding.options.max_path_len,
        key_paths: Some(encoding.options.key_paths),
        shared_endpoint: Some(encoding.options.shared_endpoint),
        jobs: instance.jobs.map(|j| j as usize),
        num_vars: encoding.instance.num_vars(),
        num_clauses: encoding.instance.num_clauses(),
        solver: args.spec()?,
        outcome: outcome.label().to_string(),
        stats,
    };
    emit_manifest(args, &manifest)?;
    Ok(code)
}

fn cmd_chirotope(points: &Path) -> Result<u8> {
    let text =
        std::fs::read_to_string(points).with_context(|| format!("reading {}", points.display()))?;
    let pts = parse_points_json(&text)?;
    let chi = derive_chirotope(&pts)
        .context("points are not in general position (see `obsnum perturb`)")?;
    for ([a, b, c], cw) in chi.entries() {
        out!("{a} {b} {c} {}", if cw { "cw" } else { "ccw" });
    }
    let violations = check_axioms(&chi);
    out!("axiom violations: {}", violations.len());
    for v in &violations {
        out!("  {:?} at {:?}", v.rule, v.points);
    }
    Ok(if violations.is_empty() {
        EXIT_OK
    } else {
        EXIT_INVALID
    })
}

fn cmd_perturb(points: &Path) -> Result<u8> {
    let text =
        std::fs::read_to_string(points).with_context(|| format!("reading {}", points.display()))?;
    let pts = parse_points_json(&text)?;
    let (moved, eps) = perturb_to_general_position(&pts);
    let records = moved
        .iter()
        .map(|p| {
            PointRecord::from_point(p)
                .ok_or_else(|| anyhow!("perturbed coordinate does not fit in 64 bits"))
        })
        .collect::<Result<Vec<_>>>()?;
    out!(
        "{}",
        serde_json::to_string(&PointSetJson { points: records })?
    );
    eprintln!("perturbation step {eps}");
    Ok(EXIT_OK)
}

fn run(cli: Cli) -> Result<u8> {
    match &cli.command {
        Command::Graph { which, out } => cmd_graph(which, out.as_deref()),
        Command::Encode { instance, out } => cmd_encode(instance, out.as_deref()),
        Command::Solve { cnf, solver, model } => cmd_solve(cnf, solver, *model),
        Command::Verify {
            drawing,
            json,
            instance,
        } => cmd_verify(drawing, *json, *instance),
        Command::Prove {
            instance,
            solver,
            name,
            dimacs_out,
        } => cmd_prove(instance, solver, name.as_deref(), dimacs_out.as_deref()),
        Command::Chirotope { points } => cmd_chirotope(points),
        Command::Perturb { points } => cmd_perturb(points),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}
