mod commands;
mod workspace;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use relforge_core::formats::kind_from;
use relforge_core::{Error, Result};

use commands::{render_json, Report, Status};
use workspace::{Point, Workspace};

#[derive(Parser)]
#[command(name = "relforge", version, about = "Relations among Mahler functions and E-functions")]
struct Cli {
    /// Print a machine-readable JSON report instead of the summary.
    #[arg(long, global = true)]
    json: bool,
    /// Corpus directory; overrides RELFORGE_CORPUS.
    #[arg(long, global = true)]
    corpus: Option<std::path::PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Clone, Default)]
struct BoundArgs {
    /// Maximal operator order.
    #[arg(long)]
    order: Option<usize>,
    /// Maximal coefficient degree.
    #[arg(long)]
    degree: Option<usize>,
    /// Truncation order of the series.
    #[arg(long)]
    terms: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Print the first coefficients of a function.
    Series {
        #[arg(long)]
        function: String,
        #[arg(long, default_value_t = 20)]
        terms: usize,
    },
    /// Guess a linear relation among functions, or a differential operator.
    Guess {
        #[arg(long, value_delimiter = ',', required = true)]
        functions: Vec<String>,
        #[command(flatten)]
        bounds: BoundArgs,
        #[arg(long)]
        inhomogeneous: bool,
    },
    /// Minimal annihilating operator with its certificate.
    Minimize {
        #[arg(long)]
        function: String,
        #[command(flatten)]
        bounds: BoundArgs,
    },
    /// Mahler denominator of a function.
    Denominator {
        #[arg(long)]
        function: String,
        #[command(flatten)]
        bounds: BoundArgs,
    },
    /// Operator of level R annihilating a function.
    Level {
        #[arg(long)]
        function: String,
        #[arg(long)]
        radius: String,
        #[command(flatten)]
        bounds: BoundArgs,
    },
    /// Remove singularities of an operator from the punctured disk.
    Regularize {
        #[arg(long)]
        operator: Option<String>,
        #[arg(long)]
        function: Option<String>,
        #[arg(long)]
        radius: String,
    },
    /// Decide whether a point is regular for an operator or system.
    RegularPoint {
        #[arg(long)]
        operator: Option<String>,
        #[arg(long)]
        function: Option<String>,
        #[arg(long)]
        point: String,
    },
    /// Iterated system matrix.
    Iterate {
        #[arg(long)]
        operator: Option<String>,
        #[arg(long)]
        function: Option<String>,
        #[arg(long, default_value_t = 1)]
        times: usize,
    },
    /// Guess algebraic relations among prolonged functions.
    Relations {
        #[arg(long, value_delimiter = ',', required = true)]
        functions: Vec<String>,
        /// `sigma` or `delta`; defaults to the kind of the functions.
        #[arg(long)]
        kind: Option<String>,
        #[arg(long)]
        q: Option<u64>,
        #[arg(long, default_value_t = 1)]
        depth: usize,
        #[arg(long, default_value_t = 2)]
        total: u32,
        #[arg(long, default_value_t = 2)]
        degree: usize,
        #[arg(long, default_value_t = 256)]
        terms: usize,
    },
    /// Specialize a relation at a point.
    Degenerate {
        #[arg(long)]
        relation: String,
        #[arg(long)]
        point: String,
        #[arg(long, default_value_t = 30)]
        digits: u32,
        /// Coefficient degree of the bounded banality search.
        #[arg(long)]
        banality_degree: Option<usize>,
        #[arg(long, default_value_t = 128)]
        banality_terms: usize,
    },
    /// Degeneration points of a relation in a punctured disk.
    Scan {
        #[arg(long)]
        relation: String,
        #[arg(long)]
        radius: String,
    },
    /// Reduced Groebner basis of the ideal spanned by relations.
    Groebner {
        #[arg(long = "relation", required = true)]
        relations: Vec<String>,
        #[arg(long)]
        grevlex: bool,
    },
    /// Elimination bad set keeping the listed variables.
    Badset {
        #[arg(long = "relation", required = true)]
        relations: Vec<String>,
        /// Variables as `label.depth`.
        #[arg(long, value_delimiter = ',', required = true)]
        keep: Vec<String>,
    },
    /// Rewrite a linear relation with algebraic coefficients over Q.
    Descend {
        #[arg(long)]
        relation: String,
        #[arg(long)]
        point: String,
        #[arg(long, default_value_t = 256)]
        terms: usize,
    },
    /// Apply a field automorphism to a relation.
    Conjugate {
        #[arg(long)]
        relation: String,
        #[arg(long, default_value_t = 1)]
        automorphism: usize,
    },
    /// Split a Mahler function along its algebraic values.
    Decompose {
        #[arg(long)]
        function: String,
        /// `point=value`, value in the field of the point.
        #[arg(long = "value", required = true)]
        values: Vec<String>,
        #[arg(long, default_value = "9/10")]
        radius: String,
        #[arg(long, default_value_t = 30)]
        digits: u32,
        #[arg(long, default_value_t = 256)]
        terms: usize,
    },
    /// Certified enclosure of a function value.
    Eval {
        #[arg(long)]
        function: String,
        #[arg(long)]
        point: String,
        #[arg(long, default_value_t = 30)]
        digits: u32,
    },
    /// Compare a candidate algebraic value with an enclosure.
    CheckValue {
        #[arg(long)]
        function: String,
        #[arg(long)]
        point: String,
        #[arg(long)]
        value: String,
        #[arg(long, default_value_t = 30)]
        digits: u32,
    },
    /// Check a relation on power series.
    Verify {
        #[arg(long)]
        relation: String,
        #[arg(long, default_value_t = 256)]
        terms: usize,
    },
    /// List or validate the corpus.
    Corpus {
        #[arg(long)]
        validate: bool,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Series { .. } => "series",
            Command::Guess { .. } => "guess",
            Command::Minimize { .. } => "minimize",
            Command::Denominator { .. } => "denominator",
            Command::Level { .. } => "level",
            Command::Regularize { .. } => "regularize",
            Command::RegularPoint { .. } => "regular-point",
            Command::Iterate { .. } => "iterate",
            Command::Relations { .. } => "relations",
            Command::Degenerate { .. } => "degenerate",
            Command::Scan { .. } => "scan",
            Command::Groebner { .. } => "groebner",
            Command::Badset { .. } => "badset",
            Command::Descend { .. } => "descend",
            Command::Conjugate { .. } => "conjugate",
            Command::Decompose { .. } => "decompose",
            Command::Eval { .. } => "eval",
            Command::CheckValue { .. } => "check-value",
            Command::Verify { .. } => "verify",
            Command::Corpus { .. } => "corpus",
        }
    }
}

fn point_value(ws: &Workspace, spec: &str) -> Result<(Point, String)> {
    let (p, v) = spec.split_once('=').ok_or_else(|| Error::InvalidInput(format!("`{spec}` is not of the form point=value")))?;
    Ok((ws.point(p.trim())?, v.trim().to_string()))
}

fn run(ws: &Workspace, cmd: &Command) -> Result<Report> {
    use commands as c;
    match cmd {
        Command::Series { function, terms } => c::series(ws, function, *terms),
        Command::Guess { functions, bounds, inhomogeneous } => {
            c::guess(ws, functions, bounds.order, bounds.degree, bounds.terms, *inhomogeneous)
        }
        Command::Minimize { function, bounds } => c::minimize(ws, function, bounds.order, bounds.degree, bounds.terms),
        Command::Denominator { function, bounds } => {
            c::denominator(ws, function, bounds.order, bounds.degree, bounds.terms)
        }
        Command::Level { function, radius, bounds } => {
            c::level(ws, function, &c::parse_q(radius)?, bounds.order, bounds.degree, bounds.terms)
        }
        Command::Regularize { operator, function, radius } => {
            c::regularize(ws, operator.as_deref(), function.as_deref(), &c::parse_q(radius)?)
        }
        Command::RegularPoint { operator, function, point } => {
            c::regular_point(ws, operator.as_deref(), function.as_deref(), &ws.point(point)?)
        }
        Command::Iterate { operator, function, times } => c::iterate(ws, operator.as_deref(), function.as_deref(), *times),
        Command::Relations { functions, kind, q, depth, total, degree, terms } => {
            let kind = kind.as_deref().map(|k| kind_from(k, *q)).transpose()?;
            c::relations(ws, functions, kind, *depth, *total, *degree, *terms)
        }
        Command::Degenerate { relation, point, digits, banality_degree, banality_terms } => {
            c::degenerate(ws, relation, &ws.point(point)?, *digits, banality_degree.map(|d| (d, *banality_terms)))
        }
        Command::Scan { relation, radius } => c::scan(ws, relation, &c::parse_q(radius)?),
        Command::Groebner { relations, grevlex } => c::groebner(ws, relations, *grevlex),
        Command::Badset { relations, keep } => c::badset(ws, relations, keep),
        Command::Descend { relation, point, terms } => c::descend(ws, relation, &ws.point(point)?, *terms),
        Command::Conjugate { relation, automorphism } => c::conjugate(ws, relation, *automorphism),
        Command::Decompose { function, values, radius, digits, terms } => {
            let vals = values.iter().map(|v| point_value(ws, v)).collect::<Result<Vec<_>>>()?;
            c::decompose(ws, function, &vals, &c::parse_q(radius)?, *digits, *terms)
        }
        Command::Eval { function, point, digits } => c::eval(ws, function, &ws.point(point)?, *digits),
        Command::CheckValue { function, point, value, digits } => {
            c::check_value(ws, function, &ws.point(point)?, value, *digits)
        }
        Command::Verify { relation, terms } => c::verify(ws, relation, *terms),
        Command::Corpus { validate } => c::corpus(ws, *validate),
    }
}

/// Input problems exit 2; mathematical failures exit 1.
fn exit_code(outcome: &Result<Report>) -> u8 {
    match outcome {
        Ok(r) if r.status == Status::Ok => 0,
        Ok(_) => 1,
        Err(Error::SyntaxError { .. } | Error::InvalidInput(_) | Error::UnknownCorpusEntry(_) | Error::Io(_)) => 2,
        Err(_) => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ws = match &cli.corpus {
        Some(dir) => Workspace::new(dir.clone()),
        None => Workspace::from_env(),
    };
    let outcome = run(&ws, &cli.command);
    if cli.json {
        println!("{}", serde_json::to_string_pretty(&render_json(cli.command.name(), &outcome)).expect("serializable"));
    } else {
        match &outcome {
            Ok(r) => {
                for l in &r.lines {
                    println!("{l}");
                }
            }
            Err(e) => eprintln!("error: {} ({e})", e.name()),
        }
    }
    ExitCode::from(exit_code(&outcome))
}
