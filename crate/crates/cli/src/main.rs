//! Command-line front end: check proofs, classify them, run explanation
//! analysis, prove Diophantine non-solvability, and print arithmetic
//! trace tables.
//!
//! Exit codes: 0 success, 1 usage or parse error, 2 proof rejected or a
//! root was found.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use explain_core::dioph::{self, DiophError, IntPoly};
use explain_core::explain::{
    classify_proof, detect_cuts, max_enumeration_cases, run_explanation, Cut, ExplInput,
    ExplProgram, Explanation, FullReport, ProofCategory, ReportParams,
};
use explain_core::kernel::{check, sexpr, CheckReport, LemmaEntry, LemmaStore, Proof};
use explain_core::lang::{parse_formula, Formula};
use explain_core::library;
use explain_core::numeral;
use explain_core::{Int, Nat, Ratio};

#[derive(Parser)]
#[command(
    name = "explain",
    about = "Proof checking and explanation analysis for integer arithmetic statements",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a proof file against a goal formula
    Check(CheckArgs),
    /// Classify a proof into the three explanation categories
    Classify(ClassifyArgs),
    /// Detect universal cuts and compute explanation metrics
    Explain(ExplainArgs),
    /// Prove a univariate Diophantine equation has no natural solutions
    Dioph(DiophArgs),
    /// Print the repdigit multiplication table for a base and digit
    Trick(TrickArgs),
    /// Print a digit-level long multiplication trace
    Multiply(MultiplyArgs),
    /// Print a digit-level long division trace
    Divide(DivideArgs),
    /// Check and list the lemma library
    Lemmas(LemmasArgs),
}

#[derive(Args)]
struct CheckArgs {
    /// Proof file in s-expression format
    proof: PathBuf,
    /// Goal formula the proof must conclude
    #[arg(long)]
    goal: String,
    /// Directory of lemma files for lemma references
    #[arg(long)]
    lemmas: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ClassifyArgs {
    proof: PathBuf,
    /// Goal to check against first (otherwise the conclusion is
    /// synthesized)
    #[arg(long)]
    goal: Option<String>,
    #[arg(long, default_value_t = 12)]
    kmax: u64,
    #[arg(long)]
    lemmas: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ExplainArgs {
    proof: PathBuf,
    #[arg(long)]
    goal: String,
    /// Size-ratio threshold (rational, e.g. "1" or "3/2")
    #[arg(long, default_value = "1")]
    alpha: String,
    #[arg(long, default_value_t = 12)]
    kmax: u64,
    #[arg(long, default_value_t = 10_000_000)]
    step_limit: u64,
    #[arg(long)]
    lemmas: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct DiophArgs {
    /// Polynomial in one variable, e.g. "x^2 - 1800"
    poly: String,
    /// enum: bounded enumeration plus dominance tail; interval: two
    /// generic intervals around the threshold
    #[arg(long, value_parser = ["enum", "interval"])]
    mode: String,
    /// Write the produced proof to this file
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "1")]
    alpha: String,
    #[arg(long, default_value_t = 12)]
    kmax: u64,
    #[arg(long, default_value_t = 10_000_000)]
    step_limit: u64,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct TrickArgs {
    #[arg(long, default_value_t = 10)]
    base: u32,
    /// The named digit, 1 <= digit < base
    #[arg(long)]
    digit: u32,
    /// Block repetitions of the seed number
    #[arg(long, default_value_t = 1)]
    reps: u32,
}

#[derive(Args)]
struct MultiplyArgs {
    x: String,
    y: String,
    #[arg(long, default_value_t = 10)]
    base: u32,
}

#[derive(Args)]
struct DivideArgs {
    n: String,
    d: String,
    #[arg(long, default_value_t = 10)]
    base: u32,
}

#[derive(Args)]
struct LemmasArgs {
    /// Directory of lemma files; defaults to ./lemmas when present,
    /// otherwise the built-in library
    #[arg(long)]
    dir: Option<PathBuf>,
    /// Write the built-in library as proof files into this directory
    #[arg(long)]
    export: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

/// Error carrying the intended exit code.
struct Failure {
    code: u8,
    message: String,
}

fn usage_error(message: impl Into<String>) -> Failure {
    Failure {
        code: 1,
        message: message.into(),
    }
}

fn rejected(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap help/version are normal exits
            if e.use_stderr() {
                eprintln!("{e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    let result = match cli.command {
        Command::Check(args) => cmd_check(args),
        Command::Classify(args) => cmd_classify(args),
        Command::Explain(args) => cmd_explain(args),
        Command::Dioph(args) => cmd_dioph(args),
        Command::Trick(args) => cmd_trick(args),
        Command::Multiply(args) => cmd_multiply(args),
        Command::Divide(args) => cmd_divide(args),
        Command::Lemmas(args) => cmd_lemmas(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

// -------------------------------------------------------------------
// Shared plumbing
// -------------------------------------------------------------------

fn read_proof(path: &Path) -> Result<Proof, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage_error(format!("{}: {e}", path.display())))?;
    sexpr::parse_proof(text.trim())
        .map_err(|e| usage_error(format!("{}: {e}", path.display())))
}

fn parse_goal(text: &str) -> Result<Formula, Failure> {
    parse_formula(text).map_err(|e| usage_error(format!("goal: {e}")))
}

fn parse_alpha(text: &str) -> Result<Ratio, Failure> {
    explain_core::explain::centroid::parse_ratio(text)
        .map_err(|e| usage_error(format!("alpha: {e}")))
}

fn parse_nat(text: &str) -> Result<Nat, Failure> {
    Nat::from_str(text).map_err(|e| usage_error(format!("{text}: {e}")))
}

/// Load a lemma store: an explicit directory, `./lemmas` when present,
/// or the built-in library. Every file is re-checked before admission.
fn resolve_store(dir: &Option<PathBuf>) -> Result<LemmaStore, Failure> {
    let dir = match dir {
        Some(d) => Some(d.clone()),
        None => {
            let default = PathBuf::from("lemmas");
            default.is_dir().then_some(default)
        }
    };
    match dir {
        Some(dir) => load_lemma_dir(&dir),
        None => library::standard_library()
            .map_err(|e| rejected(format!("built-in library rejected: {e:?}"))),
    }
}

fn load_lemma_dir(dir: &Path) -> Result<LemmaStore, Failure> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| usage_error(format!("{}: {e}", dir.display())))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().map(|e| e == "sexp").unwrap_or(false))
        .collect();
    files.sort();
    let mut pending: Vec<(PathBuf, LemmaEntry)> = files
        .iter()
        .map(|path| {
            let text = std::fs::read_to_string(path)
                .map_err(|e| usage_error(format!("{}: {e}", path.display())))?;
            let entry = parse_lemma_file(&text)
                .map_err(|e| usage_error(format!("{}: {e}", path.display())))?;
            Ok((path.clone(), entry))
        })
        .collect::<Result<_, Failure>>()?;
    let mut store = LemmaStore::new();
    // insert in dependency order: retry until a full pass makes no
    // progress
    while !pending.is_empty() {
        let mut progressed = false;
        let mut rest = Vec::new();
        let mut last_error = None;
        for (path, entry) in pending {
            match store.insert_checked(entry.clone()) {
                Ok(_) => progressed = true,
                Err(e) => {
                    last_error = Some((path.clone(), e));
                    rest.push((path, entry));
                }
            }
        }
        if !progressed {
            let (path, e) = last_error.expect("pending nonempty");
            return Err(rejected(format!(
                "lemma {} rejected: {} at {:?}",
                path.display(),
                e.message,
                e.path
            )));
        }
        pending = rest;
    }
    Ok(store)
}

fn parse_lemma_file(text: &str) -> Result<LemmaEntry, String> {
    let expr = sexpr::parse_sexpr(text.trim()).map_err(|e| e.to_string())?;
    let sexpr::SExpr::List(items) = &expr else {
        return Err("expected (lemma name \"statement\" proof [tags...])".into());
    };
    match items.as_slice() {
        [sexpr::SExpr::Atom(tag), sexpr::SExpr::Atom(name), sexpr::SExpr::Str(statement), proof, rest @ ..]
            if tag == "lemma" =>
        {
            let statement = parse_formula(statement).map_err(|e| e.to_string())?;
            let proof = sexpr::parse_proof_sexpr(proof).map_err(|e| e.to_string())?;
            let tags = rest
                .iter()
                .map(|t| match t {
                    sexpr::SExpr::Atom(a) => Ok(a.clone()),
                    _ => Err("tags must be atoms".to_string()),
                })
                .collect::<Result<_, _>>()?;
            Ok(LemmaEntry {
                name: name.clone(),
                statement,
                proof,
                tags,
            })
        }
        _ => Err("expected (lemma name \"statement\" proof [tags...])".into()),
    }
}

fn lemma_file_text(entry: &LemmaEntry) -> String {
    let mut items = vec![
        sexpr::SExpr::Atom("lemma".into()),
        sexpr::SExpr::Atom(entry.name.clone()),
        sexpr::SExpr::Str(entry.statement.to_string()),
        sexpr::proof_sexpr(&entry.proof),
    ];
    items.extend(entry.tags.iter().map(|t| sexpr::SExpr::Atom(t.clone())));
    sexpr::print_sexpr(&sexpr::SExpr::List(items)) + "\n"
}

fn print_check_report(report: &CheckReport, json: bool) {
    if json {
        println!("{}", serde_json::to_string_pretty(report).expect("serialize"));
    } else {
        println!("accepted: {}", report.accepted);
        println!("steps: {}", report.steps);
        if let Some(failure) = &report.failure {
            println!("failure at {:?}: {}", failure.path, failure.message);
        }
    }
}

// -------------------------------------------------------------------
// Commands
// -------------------------------------------------------------------

fn cmd_check(args: CheckArgs) -> CmdResult {
    let proof = read_proof(&args.proof)?;
    let goal = parse_goal(&args.goal)?;
    let store = resolve_store(&args.lemmas)?;
    let report = check(&proof, &goal, &store);
    print_check_report(&report, args.json);
    if report.accepted {
        Ok(())
    } else {
        Err(rejected("proof rejected".to_string()))
    }
}

fn cmd_classify(args: ClassifyArgs) -> CmdResult {
    let proof = read_proof(&args.proof)?;
    let store = resolve_store(&args.lemmas)?;
    if let Some(goal) = &args.goal {
        let goal = parse_goal(goal)?;
        let report = check(&proof, &goal, &store);
        if !report.accepted {
            print_check_report(&report, args.json);
            return Err(rejected("proof rejected, not classifying"));
        }
    }
    let category = classify_proof(&proof, args.kmax, &store);
    let cuts = detect_cuts(&proof, &store);
    if args.json {
        let payload = serde_json::json!({
            "category": category.name(),
            "k": match &category {
                ProofCategory::CaseAnalytic { k } => Some(*k),
                _ => None,
            },
            "k_max": args.kmax,
            "cuts": cuts.iter().map(|c| serde_json::json!({
                "input": c.input.to_string(),
                "path": c.path,
            })).collect::<Vec<_>>(),
            "max_enumeration_cases": max_enumeration_cases(&proof),
        });
        println!("{}", serde_json::to_string_pretty(&payload).expect("serialize"));
    } else {
        print_category(&category, &cuts, args.kmax);
    }
    Ok(())
}

fn print_category(category: &ProofCategory, cuts: &[Cut], kmax: u64) {
    println!("category: {} (k_max = {kmax})", category.name());
    if let ProofCategory::CaseAnalytic { k } = category {
        println!("smallest case analysis on a cut: {k}");
    }
    for cut in cuts {
        println!(
            "cut at {:?}: parameter {}, input {}",
            cut.path, cut.template.param, cut.input
        );
    }
}

fn cmd_explain(args: ExplainArgs) -> CmdResult {
    let proof = read_proof(&args.proof)?;
    let goal = parse_goal(&args.goal)?;
    let store = resolve_store(&args.lemmas)?;
    let params = ReportParams {
        alpha: parse_alpha(&args.alpha)?,
        k_max: args.kmax,
        step_limit: args.step_limit,
    };
    let report = check(&proof, &goal, &store);
    if !report.accepted {
        print_check_report(&report, args.json);
        return Err(rejected("proof rejected, not explaining"));
    }
    let cuts = detect_cuts(&proof, &store);
    let category = classify_proof(&proof, params.k_max, &store);
    // explain through the outermost cut when there is one, otherwise
    // wrap the whole proof as a constant program
    let explanation = cuts
        .first()
        .map(|cut| Explanation {
            program: ExplProgram::Template(cut.template.clone()),
            input: ExplInput::Term(cut.input.clone()),
        })
        .filter(|e| run_explanation(e, &goal, &params, &store).is_ok())
        .unwrap_or_else(|| Explanation::from_proof(&proof, &goal));
    let (_, exp_report) = run_explanation(&explanation, &goal, &params, &store)
        .map_err(|e| rejected(format!("explanation run failed: {e}")))?;
    let full = FullReport::assemble(&category, &cuts, &exp_report, &params);
    if args.json {
        println!("{}", serde_json::to_string_pretty(&full).expect("serialize"));
    } else {
        print_category(&category, &cuts, params.k_max);
        print_metrics(&full);
    }
    Ok(())
}

fn print_metrics(full: &FullReport) {
    println!("program bytes:   {}", full.program_bytes);
    println!("input bytes:     {}", full.input_bytes);
    println!("statement bytes: {}", full.statement_bytes);
    println!("run steps:       {}", full.run_steps);
    println!(
        "ratio:           {} (alpha = {}, passes: {})",
        full.ratio, full.alpha, full.passes_threshold
    );
}

fn cmd_dioph(args: DiophArgs) -> CmdResult {
    let term = explain_core::lang::parse_term(&args.poly)
        .map_err(|e| usage_error(format!("polynomial: {e}")))?;
    let poly = IntPoly::from_term(&term).map_err(|e| usage_error(e.to_string()))?;
    let statement = poly.statement();
    let params = ReportParams {
        alpha: parse_alpha(&args.alpha)?,
        k_max: args.kmax,
        step_limit: args.step_limit,
    };
    let result = match args.mode.as_str() {
        "enum" => dioph::prove_no_solution_enum(&poly),
        "interval" => dioph::prove_no_solution_interval(&poly),
        _ => unreachable!("clap restricts the mode"),
    };
    let proof = match result {
        Ok(proof) => proof,
        Err(DiophError::RootFound(root)) => {
            let value = poly.eval(&Int::from(root.clone()));
            if args.json {
                let payload = serde_json::json!({
                    "statement": statement.to_string(),
                    "root_found": root.to_string(),
                    "value": value.to_string(),
                });
                println!("{}", serde_json::to_string_pretty(&payload).expect("serialize"));
            } else {
                println!("root found: x = {root} (p({root}) = {value})");
            }
            return Err(rejected(format!("{} has the natural root {root}", args.poly)));
        }
        Err(e) => return Err(usage_error(e.to_string())),
    };

    let store = LemmaStore::new();
    let report = check(&proof, &statement, &store);
    if !report.accepted {
        return Err(rejected(format!(
            "internal: produced proof rejected: {:?}",
            report.failure
        )));
    }
    if let Some(path) = &args.out {
        std::fs::write(path, sexpr::print_proof_pretty(&proof))
            .map_err(|e| usage_error(format!("{}: {e}", path.display())))?;
    }

    // measure and classify the proof as an explanation of the statement
    let explanation = Explanation::from_proof(&proof, &statement);
    let (produced, exp_report) = run_explanation(&explanation, &statement, &params, &store)
        .map_err(|e| rejected(format!("explanation run failed: {e}")))?;
    let category = classify_proof(&produced, params.k_max, &store);
    let cuts = detect_cuts(&produced, &store);
    let full = FullReport::assemble(&category, &cuts, &exp_report, &params);

    if args.json {
        let mut payload = serde_json::to_value(&full).expect("serialize");
        let extra = serde_json::json!({
            "statement": statement.to_string(),
            "mode": args.mode,
            "bound": dioph::bound(&poly).to_string(),
            "check_steps": report.steps,
            "enumeration_cases": max_enumeration_cases(&proof),
        });
        payload
            .as_object_mut()
            .expect("object")
            .extend(extra.as_object().expect("object").clone());
        println!("{}", serde_json::to_string_pretty(&payload).expect("serialize"));
    } else {
        println!("statement: {statement}");
        println!("mode: {}", args.mode);
        println!("bound: {}", dioph::bound(&poly));
        if args.mode == "interval" {
            let (t, below, above) = dioph::interval_threshold(&poly)
                .map_err(|e| rejected(e.to_string()))?;
            let k = poly.degree();
            println!("threshold: t = {t}, with {t}^{k} = {below} and {}^{k} = {above}", &t + 1);
        }
        println!("accepted: true (check steps: {})", report.steps);
        println!("category: {}", category.name());
        if let ProofCategory::CaseAnalytic { k } = &category {
            println!("case analysis size: {k}");
        }
        print_metrics(&full);
        if let Some(path) = &args.out {
            println!("proof written to {}", path.display());
        }
    }
    Ok(())
}

fn cmd_trick(args: TrickArgs) -> CmdResult {
    let table = numeral::trick_table(args.base, args.digit, args.reps)
        .map_err(|e| usage_error(e.to_string()))?;
    print!("{}", numeral::render_mult(&table.trace));
    Ok(())
}

fn cmd_multiply(args: MultiplyArgs) -> CmdResult {
    let x = parse_nat(&args.x)?;
    let y = parse_nat(&args.y)?;
    let trace = numeral::long_multiply_trace(&x, &y, args.base)
        .map_err(|e| usage_error(e.to_string()))?;
    print!("{}", numeral::render_mult(&trace));
    Ok(())
}

fn cmd_divide(args: DivideArgs) -> CmdResult {
    let n = parse_nat(&args.n)?;
    let d = parse_nat(&args.d)?;
    let trace = numeral::long_divide_trace(&n, &d, args.base)
        .map_err(|e| usage_error(e.to_string()))?;
    print!("{}", numeral::render_div(&trace));
    Ok(())
}

fn cmd_lemmas(args: LemmasArgs) -> CmdResult {
    if let Some(dir) = &args.export {
        std::fs::create_dir_all(dir)
            .map_err(|e| usage_error(format!("{}: {e}", dir.display())))?;
        let store = library::standard_library()
            .map_err(|e| rejected(format!("built-in library rejected: {e:?}")))?;
        for entry in store.entries() {
            let path = dir.join(format!("{}.sexp", entry.name));
            std::fs::write(&path, lemma_file_text(entry))
                .map_err(|e| usage_error(format!("{}: {e}", path.display())))?;
            println!("wrote {}", path.display());
        }
        return Ok(());
    }
    let store = resolve_store(&args.dir)?;
    if args.json {
        let payload: Vec<_> = store
            .entries()
            .iter()
            .map(|e| {
                serde_json::json!({
                    "name": e.name,
                    "statement": e.statement.to_string(),
                    "tags": e.tags,
                    "proof_bytes": e.proof.size_bytes(),
                })
            })
            .collect();
        println!("{}", serde_json::to_string_pretty(&payload).expect("serialize"));
    } else {
        for entry in store.entries() {
            println!("{}: {}", entry.name, entry.statement);
        }
        println!("{} lemmas checked", store.entries().len());
    }
    Ok(())
}
