//! `gemcheck`: batch verification runs over finite mereological structures.
//!
//! Exit codes: 0 success, 1 an obligation failed, 2 usage or parse error,
//! 3 a search exceeded its capacity ceiling.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gemcheck_core::export::{self, ExportError};
use gemcheck_core::search::{
    check_theory, json_without_timing, Search, SearchBounds, SearchError, Strategy, DEFAULT_CAPACITY,
};
use gemcheck_core::structures::{literal, Kind, Structure, StructureError};
use gemcheck_core::theory::{self, Theory, TheoryError};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "gemcheck", version, about = "Finite-model checks for classical mereology")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check one structure against a theory.
    Check {
        /// Structure literal file.
        structure: PathBuf,
        /// Built-in theory name or path to a .thy file.
        #[arg(long, default_value = "gem_f")]
        theory: String,
        #[command(flatten)]
        output: Output,
    },
    /// Verify that both axiomatizations have the same finite models.
    Equiv {
        #[command(flatten)]
        bounds: Bounds,
        #[command(flatten)]
        output: Output,
    },
    /// Check the lemma registry on every model within bounds.
    Lemmas {
        /// Only this lemma.
        #[arg(long)]
        name: Option<String>,
        /// Also check the canonical model built from this many atoms.
        #[arg(long = "canonical", default_values_t = [3u32])]
        canonical: Vec<u32>,
        #[command(flatten)]
        bounds: Bounds,
        #[command(flatten)]
        output: Output,
    },
    /// List the models of a theory of one size.
    Models {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        theory: String,
        #[command(flatten)]
        bounds: Bounds,
        #[command(flatten)]
        output: Output,
    },
    /// Search for a model of a theory on which a target sentence fails.
    Countermodel {
        /// Base theory.
        #[arg(long, default_value = "gem_f")]
        theory: String,
        /// Signature of a theory read from a .thy file.
        #[arg(long, value_enum, default_value = "fusion")]
        kind: KindArg,
        /// Obligation removed from the base theory.
        #[arg(long)]
        drop: Option<String>,
        /// Obligation of the theory or registry lemma to falsify.
        #[arg(long)]
        target: String,
        /// Largest size searched (overrides the bound for the theory's kind).
        #[arg(long = "max-n")]
        max_n: Option<usize>,
        #[arg(long, value_enum, default_value = "exhaustive")]
        strategy: StrategyArg,
        /// Random structures drawn by the random strategy.
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        #[command(flatten)]
        bounds: Bounds,
        #[command(flatten)]
        output: Output,
    },
    /// Write lemmas as TPTP problem files.
    Export {
        /// Every registry lemma.
        #[arg(long, conflicts_with = "name", required_unless_present = "name")]
        all: bool,
        /// A single registry lemma.
        #[arg(long)]
        name: Option<String>,
        #[arg(long, default_value = "problems")]
        out: PathBuf,
    },
}

#[derive(Args, Clone)]
struct Bounds {
    #[arg(long = "max-part", default_value_t = 4)]
    max_part: usize,
    #[arg(long = "max-fusion", default_value_t = 3)]
    max_fusion: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u64).range(1..))]
    workers: u64,
    /// Most candidates enumerated for a single size.
    #[arg(long, default_value_t = DEFAULT_CAPACITY)]
    capacity: u64,
}

impl Bounds {
    fn search_bounds(&self) -> SearchBounds {
        SearchBounds {
            max_n_part: self.max_part,
            max_n_fusion: self.max_fusion,
            seed: self.seed,
            workers: self.workers as usize,
            capacity: self.capacity,
            ..SearchBounds::default()
        }
    }
}

#[derive(Args, Clone)]
struct Output {
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Leave `elapsed_ms` out of JSON reports.
    #[arg(long = "no-timing")]
    no_timing: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Part,
    Fusion,
}

impl From<KindArg> for Kind {
    fn from(k: KindArg) -> Kind {
        match k {
            KindArg::Part => Kind::Part,
            KindArg::Fusion => Kind::Fusion,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Exhaustive,
    Random,
}

enum Failure {
    Usage(String),
    Capacity(String),
}

impl From<SearchError> for Failure {
    fn from(e: SearchError) -> Failure {
        match e {
            SearchError::Capacity { .. }
            | SearchError::Permutations { .. }
            | SearchError::Structure(StructureError::Capacity { .. }) => Failure::Capacity(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

impl From<StructureError> for Failure {
    fn from(e: StructureError) -> Failure {
        match e {
            StructureError::Capacity { .. } => Failure::Capacity(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

impl From<TheoryError> for Failure {
    fn from(e: TheoryError) -> Failure {
        Failure::Usage(e.to_string())
    }
}

impl From<ExportError> for Failure {
    fn from(e: ExportError) -> Failure {
        Failure::Usage(e.to_string())
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

/// A built-in theory by name, or a `.thy` file read as a theory of `kind`.
fn resolve_theory(source: &str, kind: Kind) -> Result<Theory, Failure> {
    if let Some(t) = theory::builtin(source) {
        return Ok(t);
    }
    let path = Path::new(source);
    if !path.exists() {
        return Err(Failure::Usage(format!(
            "unknown theory `{source}` (built-ins: {})",
            theory::BUILTIN_NAMES.join(", ")
        )));
    }
    let name = path.file_stem().map_or_else(|| source.to_string(), |s| s.to_string_lossy().into_owned());
    Ok(Theory::from_thy(name, kind, &read(path)?)?)
}

fn emit<T: Serialize + std::fmt::Display>(report: &T, output: &Output) {
    match output.format {
        Format::Text => println!("{report}"),
        Format::Json if output.no_timing => println!("{}", json_without_timing(report)),
        Format::Json => println!("{}", serde_json::to_string_pretty(report).expect("reports serialize")),
    }
}

fn status(passed: bool) -> u8 {
    if passed {
        0
    } else {
        1
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Check { structure, theory: source, output } => {
            let s: Structure = literal::parse(&read(&structure)?)?;
            let t = resolve_theory(&source, s.kind())?;
            let report = check_theory(&s, &t)?;
            emit(&report, &output);
            Ok(status(report.passed()))
        }
        Command::Equiv { bounds, output } => {
            let report = Search::new(bounds.search_bounds())?.verify_equivalence()?;
            emit(&report, &output);
            Ok(status(report.passed()))
        }
        Command::Lemmas { name, canonical, bounds, output } => {
            if let Some(name) = &name {
                if theory::lemma(name).is_none() {
                    return Err(Failure::Usage(format!("no lemma named `{name}`")));
                }
            }
            let report = Search::new(bounds.search_bounds())?.check_lemmas(name.as_deref(), &canonical)?;
            emit(&report, &output);
            Ok(status(report.passed()))
        }
        Command::Models { kind, n, theory: source, bounds, output } => {
            let kind = Kind::from(kind);
            let t = resolve_theory(&source, kind)?;
            let report = Search::new(bounds.search_bounds())?.models_report(kind, n, &t)?;
            match output.format {
                Format::Text => {
                    for s in &report.structures {
                        println!("{s}\n");
                    }
                    println!("{} models of {} among {} candidates", report.models, report.theory, report.candidates);
                }
                Format::Json if output.no_timing => println!("{}", json_without_timing(&report)),
                Format::Json => println!("{}", serde_json::to_string_pretty(&report).expect("reports serialize")),
            }
            Ok(0)
        }
        Command::Countermodel { theory: source, kind, drop, target, max_n, strategy, samples, bounds, output } => {
            let full = resolve_theory(&source, kind.into())?;
            let target = match full.get(&target) {
                Some(o) => o.clone(),
                None => theory::lemma(&target)
                    .map(|l| l.obligation)
                    .ok_or_else(|| Failure::Usage(format!("no obligation or lemma named `{target}`")))?,
            };
            let base = match &drop {
                Some(name) => full.without(name)?,
                None => full,
            };
            let mut b = bounds.search_bounds();
            b.random_samples = samples;
            if let Some(n) = max_n {
                match base.kind {
                    Kind::Part => b.max_n_part = n,
                    Kind::Fusion => b.max_n_fusion = n,
                }
            }
            let strategy = match strategy {
                StrategyArg::Exhaustive => Strategy::Exhaustive,
                StrategyArg::Random => Strategy::Random,
            };
            let report = Search::new(b)?.countermodel_report(&base, &target, strategy)?;
            match output.format {
                Format::Text => {
                    println!("base {}, target {}", report.theory, report.target);
                    match (&report.structure, &report.witness) {
                        (Some(s), Some(w)) => println!("countermodel:\n{s}\nwitness: [{w}]"),
                        _ => println!("no countermodel ({}, {} candidates)", report.outcome, report.candidates),
                    }
                }
                Format::Json if output.no_timing => println!("{}", json_without_timing(&report)),
                Format::Json => println!("{}", serde_json::to_string_pretty(&report).expect("reports serialize")),
            }
            Ok(0)
        }
        Command::Export { all, name, out } => {
            let obligations = if all {
                export::emit_all()
            } else {
                let name = name.expect("clap requires --name without --all");
                vec![export::emit_lemma(&name)?]
            };
            for path in export::write_all(&out, &obligations)? {
                println!("{}", path.display());
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Capacity(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
