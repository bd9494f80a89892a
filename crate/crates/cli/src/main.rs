use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use sharefair::generators::random_dorm_meta;
use sharefair::matching::{Graph, GraphFile};
use sharefair::oracle::assignment_count;
use sharefair::{
    check_pareto_prop, decide, fairness_report, named_instance, pad_clique, random_dorm, reduce_clique_to_ef,
    reduce_clique_to_pef, solve_pef_cap2, tight_instance, validate_instance, Assignment, AssignmentFile,
    CliqueInstance, FairnessReport, Instance, InstanceFile, NamedInstance, Notion, OracleError, Rational, Strategy,
    TightKind, DEFAULT_LIMIT,
};

#[derive(Parser)]
#[command(name = "sharefair", version, about = "Fair resource sharing with externalities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate an instance file.
    Validate { file: PathBuf },
    /// Compute a PEF assignment for a capacity-2 dorm-sharing instance.
    Solve {
        #[arg(long)]
        instance: PathBuf,
        /// Include the per-round solver trace.
        #[arg(long)]
        trace: bool,
    },
    /// Check a fairness property of an assignment.
    Check {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        assignment: PathBuf,
        #[arg(long, value_enum)]
        notion: CheckNotion,
        #[arg(long)]
        json: bool,
    },
    /// Decide EF or PEF existence by exhaustive search.
    Decide {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum)]
        notion: DecideNotion,
        #[arg(long, default_value_t = DEFAULT_LIMIT)]
        limit: u64,
    },
    /// Build an EF or PEF instance from a clique instance.
    Reduce {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum)]
        target: DecideNotion,
        #[arg(short = 'o', long = "out")]
        out: PathBuf,
    },
    /// Write a named or random instance.
    Gen {
        #[arg(long)]
        kind: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = 2)]
        c: usize,
        #[arg(long, default_value = "1/2")]
        p: Rational,
        #[arg(long, default_value_t = 3)]
        value_max: u64,
        #[arg(long = "T", default_value = "1")]
        t: Rational,
        #[arg(short = 'o', long = "out")]
        out: PathBuf,
    },
    /// Run the solver on random capacity-2 instances and print CSV timings.
    Bench {
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        max_m: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum CheckNotion {
    Ef,
    Pef,
    Prop,
    Pprop,
}

#[derive(Clone, Copy, ValueEnum)]
enum DecideNotion {
    Ef,
    Pef,
}

impl From<DecideNotion> for Notion {
    fn from(n: DecideNotion) -> Notion {
        match n {
            DecideNotion::Ef => Notion::Ef,
            DecideNotion::Pef => Notion::Pef,
        }
    }
}

const HOLDS: u8 = 0;
const FAILS: u8 = 1;
const INPUT_ERROR: u8 = 2;
const LIMIT_EXCEEDED: u8 = 3;

struct Failure {
    code: u8,
    message: String,
}

fn input_error(e: impl Display) -> Failure {
    Failure {
        code: INPUT_ERROR,
        message: e.to_string(),
    }
}

fn oracle_error(e: OracleError) -> Failure {
    let code = match e {
        OracleError::LimitExceeded { .. } => LIMIT_EXCEEDED,
        OracleError::TooLarge { .. } => INPUT_ERROR,
    };
    Failure {
        code,
        message: e.to_string(),
    }
}

fn verdict(ok: bool) -> u8 {
    if ok {
        HOLDS
    } else {
        FAILS
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(input_error)?;
    fs::write(path, text + "\n").map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn print_json(value: &impl serde::Serialize) {
    println!("{}", serde_json::to_string_pretty(value).expect("serializable"));
}

fn load_instance(path: &Path) -> Result<Instance, Failure> {
    let raw: InstanceFile = read_json(path)?;
    validate_instance(&raw).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn load_assignment(path: &Path, inst: &Instance) -> Result<Assignment, Failure> {
    let raw: AssignmentFile = read_json(path)?;
    Assignment::for_instance(inst, raw.assignment).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn pairs(list: &[(usize, usize)]) -> String {
    if list.is_empty() {
        "none".to_string()
    } else {
        list.iter()
            .map(|(i, j)| format!("({i},{j})"))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn render_text(inst: &Instance, report: &FairnessReport) {
    println!("agents: {}, resources: {}", inst.agent_count(), inst.resource_count());
    println!("EF violations: {}", pairs(&report.ef_violations));
    println!("PEF violations: {}", pairs(&report.pef_violations));
    match &report.min_prop_ratio {
        Some(alpha) => println!("min PROP ratio = {alpha}"),
        None => println!("min PROP ratio = undefined (single agent)"),
    }
    println!("EF: {} / PEF: {}", yes_no(report.is_ef()), yes_no(report.is_pef()));
}

fn validate(file: &Path) -> Result<u8, Failure> {
    let inst = load_instance(file)?;
    let profile = inst.profile();
    println!(
        "valid: n={}, m={}, capacities={:?}, dorm-sharing={}",
        inst.agent_count(),
        inst.resource_count(),
        inst.capacities(),
        profile.is_dorm_sharing()
    );
    Ok(HOLDS)
}

fn solve(instance: &Path, trace: bool) -> Result<u8, Failure> {
    let inst = load_instance(instance)?;
    match solve_pef_cap2(&inst) {
        Ok((x, t)) => {
            let file = AssignmentFile::from(&x);
            if trace {
                print_json(&json!({ "assignment": file.assignment, "trace": t }));
            } else {
                print_json(&file);
            }
            Ok(HOLDS)
        }
        Err(sharefair::SolverError::InvariantBreach { message, trace }) => {
            print_json(&json!({ "error": message, "trace": trace }));
            Err(Failure {
                code: FAILS,
                message: format!("solver invariant breach: {message}"),
            })
        }
        Err(e) => Err(input_error(e)),
    }
}

fn check(instance: &Path, assignment: &Path, notion: CheckNotion, as_json: bool) -> Result<u8, Failure> {
    let inst = load_instance(instance)?;
    let x = load_assignment(assignment, &inst)?;
    let report = fairness_report(&inst, &x).map_err(input_error)?;
    let (name, holds, pareto) = match notion {
        CheckNotion::Ef => ("ef", report.is_ef(), None),
        CheckNotion::Pef => ("pef", report.is_pef(), None),
        CheckNotion::Prop => {
            let holds = report
                .is_prop()
                .ok_or_else(|| input_error("PROP needs at least two agents"))?;
            ("prop", holds, None)
        }
        CheckNotion::Pprop => {
            let per_agent = (0..inst.agent_count())
                .map(|i| check_pareto_prop(&inst, &x, i))
                .collect::<Result<Vec<_>, _>>()
                .map_err(input_error)?;
            ("pprop", per_agent.iter().all(|p| p.holds()), Some(per_agent))
        }
    };
    if as_json {
        let mut doc = json!({ "notion": name, "holds": holds, "report": report });
        if let Some(p) = &pareto {
            doc["pareto_prop"] = json!(p);
        }
        print_json(&doc);
    } else {
        render_text(&inst, &report);
        if let Some(p) = &pareto {
            for (i, a) in p.iter().enumerate().filter(|(_, a)| !a.holds()) {
                println!(
                    "agent {i}: Pareto-PROP fails (weakly worse resources {}, external {} < {})",
                    a.weakly_worse_count, a.external, a.threshold
                );
            }
        }
        println!("{}: {}", name.to_uppercase(), if holds { "holds" } else { "fails" });
    }
    Ok(verdict(holds))
}

fn decide_cmd(instance: &Path, notion: DecideNotion, limit: u64) -> Result<u8, Failure> {
    let inst = load_instance(instance)?;
    let notion = Notion::from(notion);
    match decide(&inst, notion, limit, Strategy::Parallel).map_err(oracle_error)? {
        Some(x) => {
            print_json(&AssignmentFile::from(&x));
            Ok(HOLDS)
        }
        None => {
            println!(
                "no {notion} assignment among {} assignments",
                assignment_count(inst.capacities())
            );
            Ok(FAILS)
        }
    }
}

fn reduce(graph: &Path, k: usize, target: DecideNotion, out: &Path) -> Result<u8, Failure> {
    let raw: GraphFile = read_json(graph)?;
    let g = Graph::try_from(&raw).map_err(input_error)?;
    let ci = CliqueInstance::new(g, k).map_err(input_error)?;
    let padded = !ci.is_large_k();
    let ci = pad_clique(&ci);
    if padded {
        eprintln!("padded to |V|={}, k={}", ci.vertex_count(), ci.k());
    }
    let inst = match target {
        DecideNotion::Ef => reduce_clique_to_ef(&ci),
        DecideNotion::Pef => reduce_clique_to_pef(&ci),
    }
    .map_err(input_error)?;
    let mut file = InstanceFile::from(&inst);
    file.meta = Some(json!({
        "generator": "clique-reduction",
        "target": Notion::from(target),
        "vertices": raw.n,
        "k": k,
        "padded": padded,
    }));
    write_json(out, &file)?;
    Ok(HOLDS)
}

struct GenArgs {
    kind: String,
    seed: u64,
    m: usize,
    c: usize,
    p: Rational,
    value_max: u64,
    t: Rational,
}

fn sibling_assignment_path(out: &Path) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    out.with_file_name(format!("{stem}.assignment.json"))
}

fn generate(args: &GenArgs, out: &Path) -> Result<u8, Failure> {
    let (inst, x, meta) = if let Ok(which) = args.kind.parse::<NamedInstance>() {
        let (inst, x) = named_instance(which);
        (inst, x, json!({ "generator": which.name() }))
    } else if let Ok(kind) = args.kind.parse::<TightKind>() {
        let (inst, x) = tight_instance(kind, args.c, args.m, &args.t).map_err(input_error)?;
        let meta = json!({ "generator": kind.name(), "c": args.c, "m": args.m, "T": args.t });
        (inst, Some(x), meta)
    } else if args.kind == "random-dorm" {
        let inst = random_dorm(args.seed, args.m, args.c, &args.p, args.value_max).map_err(input_error)?;
        let meta = random_dorm_meta(args.seed, args.m, args.c, &args.p, args.value_max);
        (inst, None, meta)
    } else {
        let mut names: Vec<&str> = NamedInstance::ALL.iter().map(|p| p.name()).collect();
        names.extend(TightKind::ALL.iter().map(|k| k.name()));
        names.push("random-dorm");
        return Err(input_error(format!(
            "unknown kind {:?}; expected one of {}",
            args.kind,
            names.join(", ")
        )));
    };
    let mut file = InstanceFile::from(&inst);
    file.meta = Some(meta);
    write_json(out, &file)?;
    if let Some(x) = x {
        write_json(&sibling_assignment_path(out), &AssignmentFile::from(&x))?;
    }
    Ok(HOLDS)
}

fn bench(trials: u64, seed: u64, max_m: usize) -> Result<u8, Failure> {
    if max_m < 1 {
        return Err(input_error("--max-m must be at least 1"));
    }
    println!("seed,n,m,case1,case2,case3,case4,rounds,wall_us,pef_verified");
    let mut all_ok = true;
    for t in 0..trials {
        let s = seed + t;
        let m = 1 + (t as usize % max_m);
        let p = Rational::new(1 + (t % 3) as i64, 2 * m as i64);
        let inst = random_dorm(s, m, 2, &p, 5).map_err(input_error)?;
        let start = Instant::now();
        let result = solve_pef_cap2(&inst);
        let wall = start.elapsed().as_micros();
        let (cases, rounds, ok) = match &result {
            Ok((x, trace)) => {
                let mut cases = [0usize; 4];
                for r in &trace.rounds {
                    cases[r.case as usize - 1] += 1;
                }
                let ok = fairness_report(&inst, x).map(|r| r.is_pef()).unwrap_or(false);
                (cases, trace.rounds.len(), ok)
            }
            Err(e) => {
                eprintln!("seed {s}: {e}");
                ([0; 4], 0, false)
            }
        };
        all_ok &= ok;
        println!(
            "{s},{},{m},{},{},{},{},{rounds},{wall},{ok}",
            2 * m,
            cases[0],
            cases[1],
            cases[2],
            cases[3]
        );
    }
    Ok(verdict(all_ok))
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Validate { file } => validate(&file),
        Command::Solve { instance, trace } => solve(&instance, trace),
        Command::Check {
            instance,
            assignment,
            notion,
            json,
        } => check(&instance, &assignment, notion, json),
        Command::Decide {
            instance,
            notion,
            limit,
        } => decide_cmd(&instance, notion, limit),
        Command::Reduce { graph, k, target, out } => reduce(&graph, k, target, &out),
        Command::Gen {
            kind,
            seed,
            m,
            c,
            p,
            value_max,
            t,
            out,
        } => generate(
            &GenArgs {
                kind,
                seed,
                m,
                c,
                p,
                value_max,
                t,
            },
            &out,
        ),
        Command::Bench { trials, seed, max_m } => bench(trials, seed, max_m),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { INPUT_ERROR } else { HOLDS };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
