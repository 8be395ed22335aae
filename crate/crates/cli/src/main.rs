//! `teamlogic`: evaluate team-semantics formulas, translate between
//! inclusion-exclusion logic and ESO, and run the verification suites.
//!
//! Exit codes: 0 true or pass, 1 false or failure, 2 budget exhausted,
//! 3 usage, parse or input error.

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use teamlogic::eval::{satisfies, EvalBudget, EvalError, DEFAULT_MAX_NODES};
use teamlogic::harness::corpus::{self, Group};
use teamlogic::harness::{self as h, CaseSpace, Failure, Outcome, Report};
use teamlogic::structures::{model_from_json, team_from_json, Team};
use teamlogic::syntax::{
    arity_profile, desugar, free_variables, parse_eso_with, parse_formula_with, pretty_print, pretty_print_eso,
    EsoFormula, Formula, ParseOptions, Vocabulary,
};
use teamlogic::translate::{eso_to_inex, free_tuple, free_tuples, inex_to_eso, TranslationContext};

/// `println!` that ignores a closed stdout.
macro_rules! out {
    ($($t:tt)*) => {{
        let _ = writeln!(std::io::stdout(), $($t)*);
    }};
}

#[derive(Parser)]
#[command(name = "teamlogic", version, about = "Team semantics toolkit for inclusion and exclusion logic")]
struct Cli {
    /// Node budget of each evaluation.
    #[arg(long, global = true, env = "TEAMLOGIC_BUDGET", default_value_t = DEFAULT_MAX_NODES,
          value_parser = clap::value_parser!(u64).range(1..))]
    budget: u64,
    /// Accept variables from the reserved `$` namespace.
    #[arg(long, global = true)]
    allow_reserved: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct FormulaInput {
    /// Formula text.
    formula: Option<String>,
    /// Read the formula from a file instead.
    #[arg(long, conflicts_with = "formula")]
    formula_file: Option<PathBuf>,
}

impl FormulaInput {
    fn text(&self) -> Result<String, String> {
        match (&self.formula, &self.formula_file) {
            (Some(t), _) => Ok(t.clone()),
            (None, Some(p)) => read(p),
            (None, None) => Err("no formula given".into()),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Decide M ⊨_X φ.
    Eval {
        /// Model file.
        #[arg(long)]
        model: PathBuf,
        /// Team file; defaults to the team holding only the empty assignment.
        #[arg(long)]
        team: Option<PathBuf>,
        #[command(flatten)]
        input: FormulaInput,
    },
    /// Translate between inclusion-exclusion logic and ESO.
    Translate {
        #[command(subcommand)]
        direction: Direction,
    },
    /// Run a verification suite.
    Suite {
        name: SuiteName,
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..=6))]
        max_universe: u64,
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..))]
        max_rows: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u64).range(1..=5))]
        max_vertices: u64,
        /// Do not fail on cases the budget could not decide.
        #[arg(long)]
        allow_exhaustion: bool,
    },
    /// Print the expansion of a formula into the core language.
    Desugar {
        #[command(flatten)]
        input: FormulaInput,
        /// Relation symbols as NAME:ARITY.
        #[arg(long, value_delimiter = ',', default_value = "U:1,E:2")]
        vocab: Vec<String>,
    },
    /// Inspect the built-in corpus.
    Corpus {
        #[command(subcommand)]
        action: CorpusAction,
    },
}

#[derive(Subcommand)]
enum Direction {
    /// Inclusion-exclusion formula to an ESO sentence over R = X(ȳ).
    ToEso {
        #[command(flatten)]
        input: FormulaInput,
        /// The tuple ȳ; defaults to the free variables in sorted order.
        #[arg(long, value_delimiter = ',')]
        free: Option<Vec<String>>,
        /// Arity bound k; defaults to the largest atom arity.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        arity: Option<u64>,
        #[arg(long, value_delimiter = ',', default_value = "U:1,E:2")]
        vocab: Vec<String>,
        /// Check the translation on the default case space.
        #[arg(long)]
        verify: bool,
    },
    /// ESO formula to an inclusion-exclusion formula.
    ToInex {
        #[command(flatten)]
        input: FormulaInput,
        /// Team variables for a free relation variable, as R=y1,y2.
        #[arg(long)]
        bind: Vec<String>,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        arity: Option<u64>,
        #[arg(long, value_delimiter = ',', default_value = "U:1,E:2")]
        vocab: Vec<String>,
        #[arg(long)]
        verify: bool,
    },
}

#[derive(Subcommand)]
enum CorpusAction {
    List,
    Show { name: String },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SuiteName {
    Closures,
    Counterexamples,
    Graphs,
    Infinity,
    Relativization,
    Equivalence,
    Operators,
    Mutations,
    All,
}

fn read(p: &PathBuf) -> Result<String, String> {
    fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))
}

fn vocabulary(spec: &[String]) -> Result<Vocabulary, String> {
    spec.iter().filter(|s| !s.is_empty()).try_fold(Vocabulary::new(), |v, s| {
        let (name, arity) = s.split_once(':').ok_or_else(|| format!("bad vocabulary entry `{s}`, expected NAME:ARITY"))?;
        let arity = arity.parse().map_err(|_| format!("bad arity in `{s}`"))?;
        Ok(v.with_relation(name, arity))
    })
}

fn options(cli: &Cli) -> ParseOptions {
    ParseOptions { allow_reserved: cli.allow_reserved }
}

fn parse(cli: &Cli, text: &str, vocab: &Vocabulary) -> Result<Formula, String> {
    parse_formula_with(text, vocab, options(cli)).map_err(|e| e.to_string())
}

fn parse_eso(cli: &Cli, text: &str, vocab: &Vocabulary) -> Result<EsoFormula, String> {
    parse_eso_with(text, vocab, options(cli)).map_err(|e| e.to_string())
}

fn budget(cli: &Cli) -> EvalBudget {
    EvalBudget::with_nodes(cli.budget)
}

fn eval(cli: &Cli, model: &PathBuf, team: &Option<PathBuf>, input: &FormulaInput) -> Result<u8, String> {
    let m = model_from_json(&read(model)?).map_err(|e| format!("{}: {e}", model.display()))?;
    let x = match team {
        Some(p) => {
            let (x, normalized) = team_from_json(&read(p)?).map_err(|e| format!("{}: {e}", p.display()))?;
            if normalized {
                eprintln!("warning: {}: duplicate rows dropped", p.display());
            }
            x
        }
        None => Team::unit(),
    };
    let phi = parse(cli, &input.text()?, &m.vocabulary())?;
    match satisfies(&m, &x, &phi, &budget(cli)) {
        Ok(o) => {
            out!("{}", o.value);
            Ok(if o.value { 0 } else { 1 })
        }
        Err(EvalError::BudgetExhausted(_)) => {
            out!("budget-exceeded");
            Ok(2)
        }
        Err(e) => Err(e.to_string()),
    }
}

fn arity(given: Option<u64>, found: usize) -> usize {
    given.map(|k| k as usize).unwrap_or(found.max(1))
}

fn verify_space(cli: &Cli, vocab: &Vocabulary, vars: BTreeSet<String>) -> CaseSpace {
    let domain: Vec<&str> = vars.iter().map(|s| s.as_str()).collect();
    let mut space = CaseSpace::new(3, 3, if domain.is_empty() { &["x"] } else { &domain }).with_budget(budget(cli));
    space.vocab = vocab.clone();
    space
}

fn verified(r: &Report) -> u8 {
    let exhausted = if r.exhausted > 0 { format!(", {} exhausted", r.exhausted) } else { String::new() };
    if r.passed() {
        out!("verified: {} cases, 0 mismatches{exhausted}", r.cases);
        0
    } else {
        out!("mismatch: {} cases, {} mismatches{exhausted}", r.cases, r.failed);
        if let Some(f) = r.failures.first() {
            out!("{}", serde_json::to_string(f).expect("failure JSON"));
        }
        1
    }
}

fn translate(cli: &Cli, direction: &Direction) -> Result<u8, String> {
    match direction {
        Direction::ToEso { input, free, arity: k, vocab, verify } => {
            let vocab = vocabulary(vocab)?;
            let phi = parse(cli, &input.text()?, &vocab)?;
            let found = arity_profile(&phi).map_err(|e| e.to_string())?.max_arity();
            let mut ctx = TranslationContext::new(arity(*k, found), vocab.clone());
            ctx.free = free.clone();
            let out = inex_to_eso(&phi, &ctx).map_err(|e| e.to_string())?;
            out!("{}", pretty_print_eso(&out));
            if !*verify {
                return Ok(0);
            }
            let mut vars = free_variables(&phi);
            vars.extend(free_tuple(&phi, &ctx));
            let space = verify_space(cli, &vocab, vars);
            let r = h::check_equivalence_inex_eso(&phi, &ctx, &space).map_err(|e| e.to_string())?;
            Ok(verified(&r))
        }
        Direction::ToInex { input, bind, arity: k, vocab, verify } => {
            let vocab = vocabulary(vocab)?;
            let phi = parse_eso(cli, &input.text()?, &vocab)?;
            let mut ctx = TranslationContext::new(arity(*k, phi.max_arity()), vocab.clone());
            for b in bind {
                let (r, vars) = b.split_once('=').ok_or_else(|| format!("bad binding `{b}`, expected R=y1,y2"))?;
                let vars: Vec<&str> = vars.split(',').collect();
                ctx = ctx.with_binding(r, &vars);
            }
            let out = eso_to_inex(&phi, &ctx).map_err(|e| e.to_string())?;
            out!("{}", pretty_print(&out));
            if !*verify {
                return Ok(0);
            }
            let vars = free_tuples(&phi, &ctx).map_err(|e| e.to_string())?.into_iter().flat_map(|(_, v)| v).collect();
            let space = verify_space(cli, &vocab, vars).nonempty();
            let r = h::check_equivalence_eso_inex(&phi, &ctx, &space).map_err(|e| e.to_string())?;
            Ok(verified(&r))
        }
    }
}

fn mutation_report(space: &CaseSpace) -> Report {
    let mut r = Report::new("mutations");
    for m in h::run_mutation_suite(space) {
        let outcome = match m.witness {
            Some(_) => Outcome::Pass,
            None => Outcome::Fail(Box::new(Failure {
                formula: m.mutation.name().into(),
                model: serde_json::Value::Null,
                team: serde_json::Value::Null,
                detail: "mutation not detected by the forward suite".into(),
            })),
        };
        r.record(outcome, 1);
    }
    r
}

fn suite(cli: &Cli, name: SuiteName, space: &CaseSpace, max_vertices: usize) -> Vec<Report> {
    use SuiteName::*;
    let nf_space = space.clone().with_max_universe(space.max_universe.min(2));
    match name {
        Closures => vec![h::run_closure_suite(space)],
        Counterexamples => vec![h::run_counterexample_suite()],
        Graphs => vec![h::run_graph_suite(max_vertices, budget(cli))],
        Infinity => vec![h::run_infinity_suite(space)],
        Relativization => vec![h::run_relativization_suite(space)],
        Equivalence => {
            vec![h::run_forward_suite(space), h::run_backward_suite(space), h::run_normal_form_suite(&nf_space)]
        }
        Operators => h::run_operator_suite(space).into_iter().map(|(_, r)| r).collect(),
        Mutations => vec![mutation_report(space)],
        All => [Counterexamples, Closures, Equivalence, Operators, Graphs, Infinity, Relativization, Mutations]
            .into_iter()
            .flat_map(|n| suite(cli, n, space, max_vertices))
            .collect(),
    }
}

fn corpus_cmd(action: &CorpusAction) -> Result<u8, String> {
    match action {
        CorpusAction::List => {
            for e in corpus::corpus() {
                out!("{:<20} {:<15} {}", e.name, e.group.name(), e.text);
            }
            Ok(0)
        }
        CorpusAction::Show { name } => {
            let e = corpus::entry(name).ok_or_else(|| format!("no corpus entry `{name}`"))?;
            out!("name: {}\ngroup: {}\narity: {}\nformula: {}\nexpected: {}", e.name, e.group.name(), e.arity(), e.text, e.note);
            if e.group == Group::Forward {
                let ctx = TranslationContext::new(e.arity(), corpus::default_vocabulary());
                let out = inex_to_eso(&e.formula(), &ctx).map_err(|e| e.to_string())?;
                out!("eso: {}", pretty_print_eso(&out));
            }
            Ok(0)
        }
    }
}

fn run(cli: &Cli) -> Result<u8, String> {
    match &cli.command {
        Command::Eval { model, team, input } => eval(cli, model, team, input),
        Command::Translate { direction } => translate(cli, direction),
        Command::Suite { name, max_universe, max_rows, seed, max_vertices, allow_exhaustion } => {
            let mut space = CaseSpace::new(*max_universe as usize, *max_rows as usize, &["x", "y"]).with_budget(budget(cli));
            space.seed = *seed;
            let reports = suite(cli, *name, &space, *max_vertices as usize);
            for r in &reports {
                out!("{}", r.summary());
                out!("{}", r.to_json());
            }
            Ok(if reports.iter().any(|r| !r.passed()) {
                1
            } else if !allow_exhaustion && reports.iter().any(|r| r.exhausted > 0) {
                2
            } else {
                0
            })
        }
        Command::Desugar { input, vocab } => {
            let phi = parse(cli, &input.text()?, &vocabulary(vocab)?)?;
            out!("{}", pretty_print(&desugar(&phi).map_err(|e| e.to_string())?));
            Ok(0)
        }
        Command::Corpus { action } => corpus_cmd(action),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
