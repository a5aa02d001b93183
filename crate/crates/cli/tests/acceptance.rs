//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Run with `cargo test -p obsnum-cli --test acceptance`.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use obsnum::cnf::{eval_model, CnfInstance, Lit, Model};
use obsnum::encode::{encode_outside, Encoding, VariableTable};
use obsnum::graph::{
    complete, complete_bipartite, complete_multipartite, cycle, gyro_bipyramid, Graph,
};
use obsnum::orientation::{check_axioms, derive_chirotope, orient, ExactPoint, Orientation};
use obsnum::solver::{brute_solve, solve, Outcome, SolverConfig};
use obsnum::verify::{assignment_of_drawing, check_representation, parse_drawing, ObstacleDrawing};

const OUTSIDE_X4_BUDGET: Duration = Duration::from_secs(10 * 60);
const SINGLE_X4_BUDGET: Duration = Duration::from_secs(60 * 60);
const SINGLE_X4_CAP: usize = 4;
const OUTSIDE_X5_BUDGET: Duration = Duration::from_secs(12 * 60 * 60);
const SAT_BUDGET: Duration = Duration::from_secs(60);
const COUNT_BUDGET: Duration = Duration::from_secs(5);
const POINT_SETS: usize = 1000;
const RANDOM_CNFS: usize = 1000;

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_obsnum")
}

fn scratch_dir() -> PathBuf {
    std::env::temp_dir().join(format!("obsnum-acceptance-{}", std::process::id()))
}

fn scratch(name: &str) -> PathBuf {
    let dir = scratch_dir();
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn solve_within(inst: &CnfInstance, budget: Duration) -> Result<(Outcome, Duration), String> {
    let config = SolverConfig {
        time_budget: Some(budget),
        ..SolverConfig::default()
    };
    let r = solve(inst, &config).map_err(|e| e.to_string())?;
    Ok((r.outcome, r.stats.wall_time))
}

fn expect_unsat(graph: &Graph, budget: Duration) -> Verdict {
    let e = encode_outside(graph, None).map_err(|e| e.to_string())?;
    let (outcome, t) = solve_within(&e.instance, budget)?;
    let size = format!(
        "{} vars, {} clauses",
        e.instance.num_vars(),
        e.instance.num_clauses()
    );
    match outcome {
        Outcome::Unsat => Ok(format!("UNSAT in {:.2}s ({size})", t.as_secs_f64())),
        other => Err(format!("{other} after {:.2}s ({size})", t.as_secs_f64())),
    }
}

fn clause_counts() -> Verdict {
    let start = Instant::now();
    let mut seen = Vec::new();
    for (n, four, five) in [(10, 1680, 20160), (12, 3960, 63360)] {
        let e = encode_outside(&complete(n), None).map_err(|e| e.to_string())?;
        let (got4, got5) = (e.summary.four_point, e.summary.five_point);
        if (got4, got5) != (four, five) {
            return Err(format!(
                "n={n}: {got4} four-point and {got5} five-point, wanted {four} and {five}"
            ));
        }
        seen.push(format!("n={n}: {got4}/{got5}"));
    }
    let t = start.elapsed();
    if t >= COUNT_BUDGET {
        return Err(format!("counts correct but took {:.2}s", t.as_secs_f64()));
    }
    Ok(format!("{} in {:.2}s", seen.join(", "), t.as_secs_f64()))
}

fn outside_x4() -> Verdict {
    expect_unsat(&gyro_bipyramid(4).unwrap(), OUTSIDE_X4_BUDGET)
}

fn single_x4() -> Verdict {
    let manifest = scratch("single_x4_manifest.json");
    let out = Command::new(bin())
        .args(["prove", "gyro(4)", "--mode", "single", "--max-path-len"])
        .arg(SINGLE_X4_CAP.to_string())
        .arg("--time-budget")
        .arg(SINGLE_X4_BUDGET.as_secs().to_string())
        .arg("--manifest")
        .arg(&manifest)
        .output()
        .map_err(|e| e.to_string())?;
    let stdout = String::from_utf8_lossy(&out.stdout);
    let verdict = stdout.lines().next().unwrap_or("").to_string();
    if out.status.code() != Some(0) {
        return Err(format!("exit {:?}: {verdict}", out.status.code()));
    }
    let m: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&manifest).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
    if m["outcome"] != "UNSAT" || m["max_path_len"] != SINGLE_X4_CAP {
        return Err(format!(
            "manifest records outcome {} and cap {}",
            m["outcome"], m["max_path_len"]
        ));
    }
    Ok(format!(
        "{verdict}; cap {} recorded in manifest, {:.2}s",
        m["max_path_len"],
        m["stats"]["wall_time"].as_f64().unwrap_or(f64::NAN)
    ))
}

fn outside_x5() -> Verdict {
    expect_unsat(&gyro_bipyramid(5).unwrap(), OUTSIDE_X5_BUDGET)
}

fn satisfiable_cases() -> Verdict {
    let cases = [
        ("X_3", gyro_bipyramid(3).unwrap()),
        ("C_5", cycle(5).unwrap()),
        ("C_8", cycle(8).unwrap()),
        ("K_{2,3}", complete_bipartite(2, 3)),
        ("K_{1,1,3}", complete_multipartite(&[1, 1, 3])),
    ];
    let mut seen = Vec::new();
    for (name, g) in cases {
        let e = encode_outside(&g, None).map_err(|e| e.to_string())?;
        let (outcome, t) = solve_within(&e.instance, SAT_BUDGET)?;
        let Outcome::Sat(model) = outcome else {
            return Err(format!("{name}: {outcome}"));
        };
        if !eval_model(&e.instance, &model)
            .map_err(|e| e.to_string())?
            .satisfied
        {
            return Err(format!("{name}: model violates the instance"));
        }
        seen.push(format!("{name} {:.2}s", t.as_secs_f64()));
    }
    Ok(format!("all SAT ({})", seen.join(", ")))
}

fn random_general_position(rng: &mut ChaCha8Rng, n: usize) -> Vec<ExactPoint> {
    loop {
        let pts: Vec<ExactPoint> = (0..n)
            .map(|_| ExactPoint::from_ints(rng.gen_range(-60..=60), rng.gen_range(-60..=60)))
            .collect();
        if derive_chirotope(&pts).is_ok() {
            return pts;
        }
    }
}

fn chirotope_axioms() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let encodings: Vec<Encoding> = (0..=9)
        .map(|n| encode_outside(&complete(n.max(3)), None).unwrap())
        .collect();
    let mut by_size = [0usize; 10];
    for i in 0..POINT_SETS {
        let n = rng.gen_range(4..=9);
        by_size[n] += 1;
        let pts = random_general_position(&mut rng, n);
        let chi = derive_chirotope(&pts).map_err(|e| e.to_string())?;
        let violations = check_axioms(&chi);
        if !violations.is_empty() {
            return Err(format!("set {i}: {} axiom violations", violations.len()));
        }
        let e = &encodings[n];
        let mut model = Model::all_false(e.table.num_vars());
        for (t, cw) in chi.entries() {
            model.set(e.table.triple_var(t), cw);
        }
        let eval = eval_model(&e.instance, &model).map_err(|e| e.to_string())?;
        if let Some(c) = eval.first_violated {
            return Err(format!(
                "set {i}: clause {c} of the n={n} instance violated"
            ));
        }
    }
    Ok(format!(
        "{POINT_SETS} point sets, sizes 4..9 drawn {:?} times, 0 violations",
        &by_size[4..]
    ))
}

fn random_cnf(rng: &mut ChaCha8Rng) -> CnfInstance {
    let vars = rng.gen_range(1..=20);
    let clauses = rng.gen_range(1..=90);
    let mut inst = CnfInstance::new(vars);
    for _ in 0..clauses {
        let width = rng.gen_range(1..=5);
        let lits: Vec<Lit> = (0..width)
            .map(|_| Lit::new(rng.gen_range(1..=vars), rng.gen_bool(0.5)))
            .collect();
        inst.add_clause(lits).unwrap();
    }
    inst
}

fn solver_oracle() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut sat, mut unsat) = (0, 0);
    for i in 0..RANDOM_CNFS {
        let inst = random_cnf(&mut rng);
        let config = SolverConfig {
            seed: i as u64,
            ..SolverConfig::default()
        };
        let fast = solve(&inst, &config).map_err(|e| e.to_string())?.outcome;
        let slow = brute_solve(&inst).map_err(|e| e.to_string())?.outcome;
        if fast.is_sat() != slow.is_sat() || fast.is_unsat() != slow.is_unsat() {
            return Err(format!("instance {i}: solve {fast}, brute force {slow}"));
        }
        if let Some(m) = fast.model() {
            if !eval_model(&inst, m).map_err(|e| e.to_string())?.satisfied {
                return Err(format!("instance {i}: model fails eval_model"));
            }
            sat += 1;
        } else {
            unsat += 1;
        }
    }
    Ok(format!(
        "{RANDOM_CNFS} instances agree ({sat} SAT, {unsat} UNSAT)"
    ))
}

fn canonicalization() -> Verdict {
    // Points on a parabola are in convex, general position; the second
    // placement mixes orientations.
    let parabola: Vec<ExactPoint> = (0..6).map(|i| ExactPoint::from_ints(i, i * i)).collect();
    let mixed: Vec<ExactPoint> = [(0, 0), (7, 1), (3, 5), (-2, 4), (5, -3), (1, 2)]
        .iter()
        .map(|&(x, y)| ExactPoint::from_ints(x, y))
        .collect();
    let table = VariableTable::new(6);
    let mut checked = 0;
    for pts in [&parabola, &mixed] {
        let mut model = Model::all_false(table.num_vars());
        for t in obsnum::orientation::sorted_triples(6) {
            model.set(
                table.triple_var(t),
                orient(&pts[t[0]], &pts[t[1]], &pts[t[2]]) == Orientation::Clockwise,
            );
        }
        for a in 0..6 {
            for b in 0..6 {
                for c in 0..6 {
                    if a == b || b == c || a == c {
                        continue;
                    }
                    let lit = table.triple_literal(a, b, c).map_err(|e| e.to_string())?;
                    let geometric = orient(&pts[a], &pts[b], &pts[c]);
                    if geometric == Orientation::Collinear {
                        return Err(format!("placement has collinear triple {a},{b},{c}"));
                    }
                    if model.lit_true(lit) != (geometric == Orientation::Clockwise) {
                        return Err(format!("mismatch at ({a},{b},{c})"));
                    }
                    checked += 1;
                }
            }
        }
    }
    Ok(format!(
        "{checked} ordered triples over two placements, 0 mismatches"
    ))
}

fn certificates() -> Verdict {
    let path =
        Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures/c5_pentagram.json");
    let d = parse_drawing(&std::fs::read_to_string(&path).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let r = check_representation(&d);
    let outside_ok = d.obstacles().len() == 1
        && d.obstacles()[0].outside
        && r.outside_checks.iter().all(|c| c.passed);
    if !r.valid || !outside_ok {
        return Err(format!("pentagram report {r:?}"));
    }
    let e = encode_outside(&cycle(5).unwrap(), None).map_err(|e| e.to_string())?;
    assignment_of_drawing(&d, &e).map_err(|e| format!("pentagram assignment: {e}"))?;

    let square = [(0, 0), (1, 0), (1, 1), (0, 1)]
        .map(|(x, y)| ExactPoint::from_ints(x, y))
        .to_vec();
    let c4 =
        ObstacleDrawing::new(cycle(4).unwrap(), square, Vec::new()).map_err(|e| e.to_string())?;
    let r4 = check_representation(&c4);
    if r4.valid || r4.unblocked_non_edges.len() != 2 {
        return Err(format!(
            "C_4 without obstacles: valid {}, unblocked {:?}",
            r4.valid, r4.unblocked_non_edges
        ));
    }
    Ok(format!(
        "pentagram valid with one outside obstacle, its model satisfies {} clauses; C_4 invalid with unblocked {:?}",
        e.instance.num_clauses(),
        r4.unblocked_non_edges
    ))
}

fn determinism() -> Verdict {
    let mut sizes = Vec::new();
    for mode in ["outside", "single"] {
        let mut files = Vec::new();
        for (run, jobs) in [(0, "1"), (1, "4")] {
            let out = scratch(&format!("x4_{mode}_{run}.cnf"));
            let status = Command::new(bin())
                .args([
                    "encode",
                    "gyro(4)",
                    "--mode",
                    mode,
                    "--max-path-len",
                    "4",
                    "--jobs",
                    jobs,
                    "--out",
                ])
                .arg(&out)
                .output()
                .map_err(|e| e.to_string())?
                .status;
            if !status.success() {
                return Err(format!("encode {mode} exited {status}"));
            }
            files.push(std::fs::read(&out).map_err(|e| e.to_string())?);
        }
        if files[0] != files[1] {
            return Err(format!("{mode} DIMACS differs between runs"));
        }
        sizes.push(format!("{mode} {} bytes", files[0].len()));
    }
    Ok(format!(
        "byte-identical across runs with 1 and 4 threads ({})",
        sizes.join(", ")
    ))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("clause counts for n = 10, 12", clause_counts),
        ("outside instance of X_4 is UNSAT", outside_x4),
        ("single instance of X_4 is UNSAT", single_x4),
        ("outside instance of X_5 is UNSAT", outside_x5),
        (
            "outside instances of X_3, C_5, C_8, K_{2,3}, K_{1,1,3} are SAT",
            satisfiable_cases,
        ),
        ("random point sets satisfy the axioms", chirotope_axioms),
        ("CDCL agrees with brute force", solver_oracle),
        (
            "triple literal parity matches orientation",
            canonicalization,
        ),
        ("verifier certificates", certificates),
        ("deterministic DIMACS", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    let _ = std::fs::remove_dir_all(scratch_dir());
    println!(
        "{} of {} criteria pass",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
