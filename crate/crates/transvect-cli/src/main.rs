mod acceptance;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use transvect::classify::{classify, ClassifyOptions};
use transvect::graph::build_graph;
use transvect::io::{emit_words, graph_csv, graph_dot, graph_json, parse_instance, Instance, TransvectionRecord};
use transvect::oracle::{cayley_diameter, closure_order, group_order};
use transvect::pipeline::{synthesize, SynthesisOptions, DEFAULT_CAP};
use transvect::Error;

#[derive(Parser)]
#[command(name = "transvect", version, about = "Transvection graphs, classification and word synthesis for SL, Sp and SU")]
struct Cli {
    /// Closure cap for enumerations.
    #[arg(long, global = true)]
    cap: Option<usize>,
    /// Confirm classification claims by closure enumeration.
    #[arg(long, global = true)]
    strict: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Irreducibility, defining field and family of the generated group.
    Classify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// The labelled transvection graph of the generators.
    Graph {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Words for every transvection over the generators.
    Synthesize {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        budget: Option<usize>,
        /// Report and word files.
        #[arg(long, num_args = 2, value_names = ["REPORT", "WORDS"])]
        emit: Option<Vec<PathBuf>>,
        /// Stop before producing every transvection.
        #[arg(long)]
        no_sweep: bool,
    },
    /// Brute-force reference computations.
    Oracle {
        #[command(subcommand)]
        query: OracleQuery,
    },
    /// Runs the acceptance criteria.
    Acceptance {
        /// Criterion numbers to run; all when omitted.
        #[arg(long, value_delimiter = ',')]
        only: Vec<usize>,
    },
}

#[derive(Subcommand)]
enum OracleQuery {
    /// Group order from the order formula.
    Order {
        #[arg(long)]
        input: PathBuf,
    },
    /// Order of the group generated by the generators, by enumeration.
    Closure {
        #[arg(long)]
        input: PathBuf,
    },
    /// Cayley graph diameter on the generators and their inverses.
    Diameter {
        #[arg(long)]
        input: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Dot,
    Csv,
}

/// Failure with its exit code.
struct Failure {
    code: u8,
    kind: String,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Parse(_)
            | Error::InvalidField(_)
            | Error::DimensionMismatch { .. }
            | Error::InvalidForm(_)
            | Error::NotNilpotent
            | Error::ZeroData
            | Error::NonSingularVector => 4,
            Error::UnsupportedQ(_) | Error::ExceptionalField(_) => 5,
            Error::BudgetExceeded(_) | Error::CapExceeded(_) | Error::TooManyVertices(_) | Error::TooLarge => 3,
            _ => 2,
        };
        let debug = format!("{e:?}");
        let kind = debug.split(['(', ' ']).next().unwrap_or("Error").to_string();
        Failure { code, kind, message: e.to_string() }
    }
}

fn io_failure(path: &std::path::Path, e: std::io::Error) -> Failure {
    Failure { code: 4, kind: "Io".into(), message: format!("{}: {e}", path.display()) }
}

fn load(path: &std::path::Path) -> Result<Instance, Failure> {
    let text = fs::read_to_string(path).map_err(|e| io_failure(path, e))?;
    Ok(parse_instance(&text)?)
}

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn run(cli: Cli) -> Result<ExitCode, Failure> {
    match cli.command {
        Command::Classify { input, seed } => {
            let inst = load(&input)?;
            let f = &inst.spec.field;
            let opts = ClassifyOptions {
                seed: seed.unwrap_or(inst.options.seed),
                strict_cap: (cli.strict || inst.options.strict).then(|| cli.cap.unwrap_or(inst.options.cap)),
                ..ClassifyOptions::default()
            };
            let r = classify(f, &inst.transvections(), &opts);
            let witness = |w: &Option<Vec<transvect::Transvection>>| {
                w.as_ref().map(|c| c.iter().map(|t| TransvectionRecord::of(f, t)).collect::<Vec<_>>())
            };
            print_json(&json!({
                "irreducible": r.irreducible,
                "defining_field": {"order": r.defining_subfield.order(f.p()), "degree": r.defining_subfield.divisor},
                "family": r.family.map(|fam| fam.name()),
                "witness": witness(&r.witness),
                "witness_unitary": witness(&r.witness_unitary),
                "confirmed_order": r.confirmed_order,
            }));
        }
        Command::Graph { input, format } => {
            let inst = load(&input)?;
            let g = build_graph(&inst.spec.field, &inst.transvections());
            match format {
                Format::Json => println!("{}", graph_json(&g)),
                Format::Dot => print!("{}", graph_dot(&g)),
                Format::Csv => print!("{}", graph_csv(&g)),
            }
        }
        Command::Synthesize { input, seed, budget, emit, no_sweep } => {
            let inst = load(&input)?;
            let opts = SynthesisOptions {
                seed: seed.unwrap_or(inst.options.seed),
                budget: budget.unwrap_or(inst.options.budget),
                cap: cli.cap.unwrap_or(inst.options.cap),
                generate_all: !no_sweep,
            };
            let gs = synthesize(&inst.spec, &inst.matrices(), &opts)?;
            let flags: Vec<usize> = (1..=8).filter(|&p| gs.has_flag(p)).collect();
            let mut report = serde_json::to_value(&gs.report).expect("serializable");
            report["flags"] = json!(flags);
            report["verified"] = json!(gs.verify_all());
            match emit {
                Some(paths) => {
                    let text = serde_json::to_string_pretty(&report).expect("serializable") + "\n";
                    fs::write(&paths[0], text).map_err(|e| io_failure(&paths[0], e))?;
                    fs::write(&paths[1], emit_words(&gs)).map_err(|e| io_failure(&paths[1], e))?;
                }
                None => print_json(&report),
            }
        }
        Command::Oracle { query } => match query {
            OracleQuery::Order { input } => {
                let inst = load(&input)?;
                let order = group_order(&inst.spec).map(|o| o.to_string());
                print_json(&json!({ "order": order }));
            }
            OracleQuery::Closure { input } => {
                let inst = load(&input)?;
                let order = closure_order(&inst.spec.field, &inst.matrices(), cli.cap.unwrap_or(inst.options.cap))?;
                print_json(&json!({ "order": order }));
            }
            OracleQuery::Diameter { input } => {
                let inst = load(&input)?;
                let d = cayley_diameter(&inst.spec.field, &inst.matrices(), cli.cap.unwrap_or(DEFAULT_CAP))?;
                print_json(&json!({ "diameter": d }));
            }
        },
        Command::Acceptance { only } => {
            let exe = std::env::current_exe().ok();
            let outcomes = acceptance::run(&only, exe.as_deref(), |o| println!("{o}"));
            if outcomes.iter().any(|o| !o.pass) {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("{}", json!({ "error": f.kind, "message": f.message, "exit_code": f.code }));
            ExitCode::from(f.code)
        }
    }
}
