//! Command-line front end: batch runs over the library modules with
//! deterministic report output.
//!
//! Exit codes: 0 success or certified, 1 counterexample or failed check,
//! 2 inconclusive (a budget or cap ran out), 3 input error.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use malcev::algebra::{load_algebra, FiniteAlgebra, TupleCode};
use malcev::clone::{self, CloneKind};
use malcev::closure::ClosureError;
use malcev::commutator::{
    CommutatorError, CommutatorLab, CommutatorMethod, SupernilpotenceStatus,
};
use malcev::duality::{finite_relatedness_scan, Candidates, ScanOptions, ScanStatus};
use malcev::partition::{congruence_lattice, Partition};
use malcev::relation::{load_relation, PartialFunction};
use malcev::report::{join_values, Report};
use malcev::witness::{
    setup_witness_with, verify_ghost_absent, SumRule, WitnessElement, WitnessError,
    WitnessOptions, WitnessSetup,
};
use malcev::z4::{z4_algebra, z4_normal_form_tables, z4_verify_duality, VerifyMode};

const EXIT_OK: u8 = 0;
const EXIT_COUNTEREXAMPLE: u8 = 1;
const EXIT_INCONCLUSIVE: u8 = 2;
const EXIT_INPUT: u8 = 3;

const DEFAULT_BUDGET: usize = 8_000_000;

#[derive(Parser)]
#[command(
    name = "malcev",
    version = malcev::VERSION,
    about = "Commutator, clone, and dualizability checks for finite algebras"
)]
struct Cli {
    /// Element budget for clone-slice generation; defaults to the
    /// MALCEV_BUDGET environment variable, then 8000000.
    #[arg(long, global = true)]
    budget: Option<usize>,

    /// Write the report to this file instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the term or polynomial operations of an algebra up to an
    /// arity.
    Clone(CloneArgs),
    /// Congruence lattice, lower central series, and commutator tables.
    Commutators(CommutatorsArgs),
    /// Scan for partial operations that preserve candidate relations but
    /// extend to no term.
    DualizeScan(DualizeScanArgs),
    /// Exhaustive extension check for preserving partial operations on the
    /// four-element benchmark algebra.
    Z4Verify(Z4VerifyArgs),
    /// Build non-dualizability witness elements and run the parity and
    /// ghost checks.
    Witness(WitnessArgs),
}

#[derive(Args)]
struct CloneArgs {
    /// Algebra description file.
    #[arg(long)]
    algebra: PathBuf,

    /// Arity of the generated slice.
    #[arg(long)]
    arity: usize,

    /// Term operations only, or polynomials (all constants adjoined).
    #[arg(long, value_enum, default_value_t = KindArg::Term)]
    kind: KindArg,

    /// Dump every table in the slice, one value row per line.
    #[arg(long)]
    emit_tables: bool,

    /// Also search the ternary term slice for a Mal'cev operation.
    #[arg(long)]
    find_malcev: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Term,
    Polynomial,
}

impl KindArg {
    fn to_kind(self) -> CloneKind {
        match self {
            KindArg::Term => CloneKind::Term,
            KindArg::Polynomial => CloneKind::Polynomial,
        }
    }

    fn label(self) -> &'static str {
        match self {
            KindArg::Term => "term",
            KindArg::Polynomial => "polynomial",
        }
    }
}

#[derive(Args)]
struct CommutatorsArgs {
    /// Algebra description file.
    #[arg(long)]
    algebra: PathBuf,

    /// Highest supernilpotence degree to test.
    #[arg(long, default_value_t = 4)]
    cap: usize,
}

#[derive(Args)]
struct DualizeScanArgs {
    /// Algebra description file.
    #[arg(long)]
    algebra: PathBuf,

    /// Largest partial-operation arity to scan.
    #[arg(long)]
    max_arity: usize,

    /// Candidate relation file; repeat for several relations.
    #[arg(long)]
    relation: Vec<PathBuf>,

    /// Use every subuniverse of this power of the algebra as candidates.
    #[arg(long, conflicts_with = "relation")]
    subpower: Option<usize>,

    /// Maximum distinct domains per arity.
    #[arg(long, default_value_t = 100_000)]
    domain_cap: usize,

    /// Backtracking node budget per arity.
    #[arg(long, default_value_t = 50_000_000)]
    node_budget: u64,

    /// Report counterexamples as found, without greedy shrinking.
    #[arg(long)]
    no_shrink: bool,
}

#[derive(Args)]
struct Z4VerifyArgs {
    /// Arity of the partial operations and their domains (1 to 3).
    #[arg(long)]
    arity: usize,

    /// Product-arity cap of the truncated algebra used for clone dumps
    /// (2 to 5).
    #[arg(long, default_value_t = 2)]
    truncation: usize,

    /// Dump the truncated algebra's term clone at the arity, next to the
    /// normal-form count.
    #[arg(long)]
    emit_clone: bool,

    /// Scan only this many pseudo-randomly selected domains.
    #[arg(long)]
    sample: Option<usize>,

    /// Seed for domain sampling.
    #[arg(long, default_value_t = 0, requires = "sample")]
    seed: u64,
}

#[derive(Args)]
struct WitnessArgs {
    /// Algebra description file.
    #[arg(long)]
    algebra: PathBuf,

    /// Window length; the window is centered on index 0.
    #[arg(long, default_value_t = 30)]
    window: i64,

    /// Closure depth for the ghost check.
    #[arg(long, default_value_t = 1)]
    depth: usize,

    /// Force the signed-sum rule instead of scanning for one.
    #[arg(long, value_enum)]
    case_override: Option<RuleArg>,

    /// Cap on elements generated during the ghost check.
    #[arg(long, default_value_t = 200_000)]
    element_budget: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RuleArg {
    Plain,
    Alternating,
}

impl RuleArg {
    fn to_rule(self) -> SumRule {
        match self {
            RuleArg::Plain => SumRule::Plain,
            RuleArg::Alternating => SumRule::Alternating,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Help and version render to stdout and are not input errors.
            let code = if err.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    let budget = match resolve_budget(cli.budget) {
        Ok(b) => b,
        Err(msg) => return input_error(&msg),
    };
    let outcome = match &cli.command {
        Command::Clone(args) => run_clone(args, budget),
        Command::Commutators(args) => run_commutators(args, budget),
        Command::DualizeScan(args) => run_dualize_scan(args, budget),
        Command::Z4Verify(args) => run_z4_verify(args, budget),
        Command::Witness(args) => run_witness(args, budget),
    };
    match outcome {
        Ok((report, code)) => {
            let text = report.render();
            if let Some(path) = &cli.output {
                if let Err(err) = fs::write(path, &text) {
                    return input_error(&format!("cannot write {}: {err}", path.display()));
                }
            } else {
                print!("{text}");
            }
            ExitCode::from(code)
        }
        Err(msg) => input_error(&msg),
    }
}

fn input_error(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_INPUT)
}

fn resolve_budget(flag: Option<usize>) -> Result<usize, String> {
    if let Some(b) = flag {
        return Ok(b);
    }
    match std::env::var("MALCEV_BUDGET") {
        Ok(raw) => raw
            .trim()
            .parse()
            .map_err(|_| format!("MALCEV_BUDGET is not a number: {raw}")),
        Err(_) => Ok(DEFAULT_BUDGET),
    }
}

fn load(path: &PathBuf) -> Result<FiniteAlgebra, String> {
    load_algebra(path).map_err(|err| format!("{}: {err}", path.display()))
}

fn run_clone(args: &CloneArgs, budget: usize) -> Result<(Report, u8), String> {
    let alg = load(&args.algebra)?;
    let mut r = Report::new("clone");
    r.kv("algebra", args.algebra.display());
    r.kv("size", alg.size());
    r.kv("arity", args.arity);
    r.kv("kind", args.kind.label());
    r.kv("budget", budget);
    let slice = match clone::clone_upto(&alg, args.arity, args.kind.to_kind(), budget) {
        Ok(slice) => slice,
        Err(err @ ClosureError::Budget { .. }) => {
            r.section("verdict");
            r.kv("status", "inconclusive");
            r.kv("reason", err);
            return Ok((r, EXIT_INCONCLUSIVE));
        }
        Err(err) => return Err(err.to_string()),
    };
    r.section("results");
    r.kv("tables", slice.len());
    let mut code = EXIT_OK;
    if args.find_malcev {
        r.section("malcev");
        match clone::find_malcev(&alg, budget) {
            Ok(Some(m)) => {
                r.kv("found", "yes");
                r.kv("table", join_values(m.values()));
            }
            Ok(None) => r.kv("found", "no"),
            Err(err @ ClosureError::Budget { .. }) => {
                r.kv("found", "inconclusive");
                r.kv("reason", err);
                code = EXIT_INCONCLUSIVE;
            }
            Err(err) => return Err(err.to_string()),
        }
    }
    if args.emit_tables {
        r.section("tables");
        for table in slice.tables() {
            r.raw(join_values(table.values()));
        }
    }
    r.section("verdict");
    r.kv(
        "status",
        if code == EXIT_OK { "ok" } else { "inconclusive" },
    );
    Ok((r, code))
}

fn run_commutators(args: &CommutatorsArgs, budget: usize) -> Result<(Report, u8), String> {
    let alg = load(&args.algebra)?;
    let mut r = Report::new("commutators");
    r.kv("algebra", args.algebra.display());
    r.kv("size", alg.size());
    r.kv("budget", budget);
    r.kv("supernilpotence-cap", args.cap);
    let lattice = congruence_lattice(&alg);
    r.section("congruence lattice");
    r.kv("congruences", lattice.len());
    for (i, theta) in lattice.iter().enumerate() {
        r.kv(&format!("theta[{i}]"), theta);
    }
    let lab = CommutatorLab::new(&alg, budget);
    let nilpotence = match lab.report(args.cap) {
        Ok(n) => n,
        Err(CommutatorError::Closure(err @ ClosureError::Budget { .. })) => {
            r.section("verdict");
            r.kv("status", "inconclusive");
            r.kv("reason", err);
            return Ok((r, EXIT_INCONCLUSIVE));
        }
        Err(err) => return Err(err.to_string()),
    };
    r.section("lower central series");
    for (n, s) in nilpotence.series.iter().enumerate() {
        r.kv(&format!("s[{n}]"), s);
    }
    match nilpotence.class {
        Some(c) => r.kv("class", c),
        None => r.kv("class", "none (not nilpotent)"),
    }
    match nilpotence.supernilpotence {
        SupernilpotenceStatus::Degree(d) => r.kv("supernilpotence", d),
        SupernilpotenceStatus::ExceedsCap { cap } => {
            r.kv("supernilpotence", format_args!("none at degree <= {cap}"))
        }
        SupernilpotenceStatus::NotSupernilpotent => {
            r.kv("supernilpotence", "not supernilpotent")
        }
    }
    // Label the generation method: on non-nilpotent algebras these tables
    // are the absorbing-pair congruences, with no term-condition claim.
    r.section("binary commutators");
    r.kv("method", "absorbing generation");
    for i in 0..lattice.len() {
        for j in i..lattice.len() {
            let pair = [lattice[i].clone(), lattice[j].clone()];
            match lab.higher_commutator(&pair, CommutatorMethod::AbsorbingGeneration) {
                Ok(c) => r.kv(&format!("comm[{i}][{j}]"), c),
                Err(CommutatorError::Closure(err @ ClosureError::Budget { .. })) => {
                    r.section("verdict");
                    r.kv("status", "inconclusive");
                    r.kv("reason", err);
                    return Ok((r, EXIT_INCONCLUSIVE));
                }
                Err(err) => return Err(err.to_string()),
            }
        }
    }
    r.section("verdict");
    r.kv("status", "ok");
    Ok((r, EXIT_OK))
}

fn run_dualize_scan(args: &DualizeScanArgs, budget: usize) -> Result<(Report, u8), String> {
    let alg = load(&args.algebra)?;
    let mut r = Report::new("dualize-scan");
    r.kv("algebra", args.algebra.display());
    r.kv("size", alg.size());
    r.kv("max-arity", args.max_arity);
    r.kv("clone-budget", budget);
    r.kv("domain-cap", args.domain_cap);
    r.kv("node-budget", args.node_budget);
    r.kv("shrink", if args.no_shrink { "no" } else { "yes" });
    let candidates = if let Some(power) = args.subpower {
        if power == 0 {
            return Err("subpower must be positive".into());
        }
        r.kv("candidates", format_args!("all subuniverses of power {power}"));
        Candidates::AllSubpower { power }
    } else if args.relation.is_empty() {
        return Err("choose a candidate source: --relation or --subpower".into());
    } else {
        let mut relations = Vec::new();
        for path in &args.relation {
            let rel =
                load_relation(path).map_err(|err| format!("{}: {err}", path.display()))?;
            if rel.size() != alg.size() {
                return Err(format!(
                    "{}: relation is over {} elements, algebra has {}",
                    path.display(),
                    rel.size(),
                    alg.size()
                ));
            }
            r.kv(
                "candidate",
                format_args!("{} (arity {}, {} tuples)", path.display(), rel.arity(), rel.len()),
            );
            relations.push(rel);
        }
        Candidates::Explicit(relations)
    };
    let opts = ScanOptions {
        clone_budget: budget,
        domain_cap: args.domain_cap,
        node_budget: args.node_budget,
        shrink: !args.no_shrink,
    };
    let verdict = finite_relatedness_scan(&alg, &candidates, args.max_arity, &opts);
    r.section("arity statistics");
    for stat in &verdict.stats {
        r.kv(
            &format!("arity {}", stat.arity),
            format_args!(
                "domains={} preserving={} pruned={}",
                stat.domains, stat.preserving, stat.pruned
            ),
        );
    }
    r.section("verdict");
    match &verdict.status {
        ScanStatus::Certified => {
            r.kv("status", "certified");
            r.kv("scanned-arity", verdict.scanned_arity);
            Ok((r, EXIT_OK))
        }
        ScanStatus::Counterexample(cex) => {
            r.kv("status", "counterexample");
            r.kv("reverified", if cex.reverified { "yes" } else { "no" });
            r.section("counterexample domain");
            for tuple in cex.domain.tuples() {
                r.raw(join_values(&tuple));
            }
            r.section("counterexample function");
            describe_partial(&mut r, &cex.function);
            Ok((r, EXIT_COUNTEREXAMPLE))
        }
        ScanStatus::Inconclusive { arity, reason } => {
            r.kv("status", "inconclusive");
            r.kv("arity", arity);
            r.kv("reason", reason);
            Ok((r, EXIT_INCONCLUSIVE))
        }
    }
}

fn describe_partial(r: &mut Report, f: &PartialFunction) {
    for &code in f.domain_codes() {
        let args = TupleCode {
            arity: f.arity(),
            code,
        }
        .decode(f.size());
        let value = f.get_code(code).unwrap();
        r.raw(format_args!("{} -> {value}", join_values(&args)));
    }
}

fn run_z4_verify(args: &Z4VerifyArgs, budget: usize) -> Result<(Report, u8), String> {
    if !(1..=3).contains(&args.arity) {
        return Err("arity must be between 1 and 3".into());
    }
    if !(2..=5).contains(&args.truncation) {
        return Err("truncation must be between 2 and 5".into());
    }
    if args.sample == Some(0) {
        return Err("sample count must be positive".into());
    }
    let mut r = Report::new("z4-verify");
    r.kv("arity", args.arity);
    r.kv("truncation", args.truncation);
    r.kv("budget", budget);
    let mode = match args.sample {
        Some(count) => VerifyMode::Sampled {
            count,
            seed: args.seed,
        },
        None => VerifyMode::Full,
    };
    let outcome = z4_verify_duality(args.arity, mode);
    r.kv("sampled", if outcome.sampled { "yes" } else { "no" });
    if let Some(seed) = outcome.seed {
        r.kv("sample", outcome.domains_scanned);
        r.kv("seed", seed);
    }
    r.section("results");
    r.kv("domains-total", outcome.domains_total);
    r.kv("domains-scanned", outcome.domains_scanned);
    r.kv("functions-preserving", outcome.functions_preserving);
    r.kv("functions-extended", outcome.functions_extended);
    r.kv("assignments-pruned", outcome.assignments_pruned);
    r.kv("hom-check-failures", outcome.hom_check_failures);
    r.kv("counterexamples", outcome.counterexamples.len());
    if !outcome.counterexamples.is_empty() {
        r.section("counterexamples");
        for f in &outcome.counterexamples {
            describe_partial(&mut r, f);
        }
    }
    let mut code = EXIT_OK;
    if args.emit_clone {
        r.section("clone");
        r.kv("normal-forms", z4_normal_form_tables(args.arity).len());
        match clone::clone_upto(
            &z4_algebra(args.truncation),
            args.arity,
            CloneKind::Term,
            budget,
        ) {
            Ok(slice) => {
                r.kv("truncation-tables", slice.len());
                for table in slice.tables() {
                    r.raw(join_values(table.values()));
                }
            }
            Err(err @ ClosureError::Budget { .. }) => {
                r.kv("truncation-tables", "inconclusive");
                r.kv("reason", err);
                code = EXIT_INCONCLUSIVE;
            }
            Err(err) => return Err(err.to_string()),
        }
    }
    r.section("verdict");
    let failed = !outcome.counterexamples.is_empty() || outcome.hom_check_failures > 0;
    if failed {
        r.kv("status", "counterexamples found");
        code = EXIT_COUNTEREXAMPLE;
    } else if code == EXIT_INCONCLUSIVE {
        r.kv("status", "inconclusive");
    } else if outcome.sampled {
        r.kv("status", "zero counterexamples (sampled)");
    } else {
        r.kv("status", "zero counterexamples");
    }
    Ok((r, code))
}

fn run_witness(args: &WitnessArgs, budget: usize) -> Result<(Report, u8), String> {
    let alg = load(&args.algebra)?;
    if args.window < 1 {
        return Err("window length must be positive".into());
    }
    let lo = -(args.window / 2);
    let hi = lo + args.window - 1;
    let mut r = Report::new("witness");
    r.kv("algebra", args.algebra.display());
    r.kv("size", alg.size());
    r.kv("budget", budget);
    r.kv("window", format_args!("[{lo}, {hi}]"));
    r.kv("depth", args.depth);
    r.kv("element-budget", args.element_budget);
    match args.case_override {
        Some(rule) => r.kv("case-override", rule.to_rule()),
        None => r.kv("case-override", "auto"),
    }
    let beta = Partition::one(alg.size());
    let opts = WitnessOptions {
        rule_override: args.case_override.map(RuleArg::to_rule),
        ..WitnessOptions::default()
    };
    let setup = match setup_witness_with(&alg, &beta, lo, hi, budget, opts) {
        Ok(setup) => setup,
        Err(err) if is_budget_witness_error(&err) => {
            r.section("verdict");
            r.kv("status", "inconclusive");
            r.kv("reason", err);
            return Ok((r, EXIT_INCONCLUSIVE));
        }
        Err(err) => return Err(err.to_string()),
    };
    r.section("setup");
    r.kv("alpha", setup.alpha());
    r.kv("gamma", setup.gamma());
    r.kv("degree", setup.degree());
    r.kv("case", setup.rule());
    r.kv("commutator", join_values(setup.commutator().values()));
    r.kv("witness-args", join_values(setup.witness_args()));
    r.kv("base", setup.base());
    r.kv("t", setup.t());
    let generators = setup.generators();
    r.section("generators");
    r.kv("count", generators.len());
    for (name, g) in &generators {
        r.kv(name, format_element(&setup, g));
    }
    let report = match verify_ghost_absent(&setup, args.depth, args.element_budget) {
        Ok(report) => report,
        Err(err) => return Err(err.to_string()),
    };
    r.section("ghost");
    r.kv("element", format_element(&setup, &setup.ghost().unwrap()));
    r.kv("found", if report.ghost_found { "yes" } else { "no" });
    r.kv(
        "parity-applicable",
        if report.ghost_applicable { "yes" } else { "no" },
    );
    r.kv(
        "fails-parity",
        if report.ghost_fails_parity { "yes" } else { "no" },
    );
    r.section("verification");
    r.kv("depth-requested", report.depth_requested);
    r.kv("depth-completed", report.depth_completed);
    r.kv("partial", if report.partial { "yes" } else { "no" });
    r.kv("generators", report.generators);
    r.kv("elements", report.elements);
    r.kv("parity-applicable-elements", report.applicable);
    r.kv("parity-violations", report.violations);
    r.section("verdict");
    let failed = report.violations > 0 || report.ghost_found || !report.ghost_fails_parity;
    let code = if failed {
        r.kv("status", "failed");
        EXIT_COUNTEREXAMPLE
    } else if report.partial {
        r.kv(
            "status",
            format_args!(
                "partial: ghost absent and parity unviolated in the depth-{} fragment",
                report.depth_completed
            ),
        );
        EXIT_INCONCLUSIVE
    } else {
        r.kv(
            "status",
            format_args!(
                "ghost absent from depth-{} closure; parity invariant unviolated",
                report.depth_completed
            ),
        );
        EXIT_OK
    };
    Ok((r, code))
}

fn is_budget_witness_error(err: &WitnessError) -> bool {
    matches!(
        err,
        WitnessError::Closure(ClosureError::Budget { .. })
            | WitnessError::Commutator(CommutatorError::Closure(ClosureError::Budget { .. }))
    )
}

/// One-line rendering of a witness element: the entries that differ from
/// the base tuple, or `all=(…)` when the element is constant on the window.
fn format_element(setup: &WitnessSetup, w: &WitnessElement) -> String {
    let base = setup.o_tuple();
    let first = w.tuple_at(w.lo()).to_vec();
    let mut constant = true;
    let mut parts = Vec::new();
    for i in w.lo()..=w.hi() {
        let t = w.tuple_at(i);
        if t != first.as_slice() {
            constant = false;
        }
        if t != base.as_slice() {
            parts.push(format!("[{i}]=({})", join_values(t)));
        }
    }
    if constant {
        format!("all=({})", join_values(&first))
    } else {
        parts.join(" ")
    }
}
