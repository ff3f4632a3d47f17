//! Command line front end. Reads a graph document, dispatches to the
//! library, and prints exact rational reports.
//!
//! Exit codes: 0 success, 1 usage or unparseable input, 2 semantically
//! invalid input (disconnected graph, bad polarization, unknown names),
//! 3 identity violation from `check`.

mod document;
mod report;

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use arakgraph::{
    admissible_of_point, arakelov_asymptotics, delta_asymptotics, intersection, lear_coefficients,
    omega_a, parse_rational, random_polarized_graph, rat, verify_identities, Point,
    PointError, PolarizedMetrizedGraph,
};

use document::{parse_document, render_desingularized_document, ParsedInput};
use report::{Format, Report};

#[derive(Parser)]
#[command(
    name = "arakgraph",
    version,
    about = "Exact invariants of polarized metrized graphs and semistable degenerations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Append decimal approximations with this many digits
    #[arg(long, global = true, value_name = "DIGITS")]
    decimal: Option<usize>,
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    /// Aligned keys with value descriptions
    Text,
    /// One `key = value` line per entry, `#` comments for the rest
    Machine,
}

#[derive(Subcommand)]
enum Command {
    /// Scalar invariants of the graph or fiber
    Invariants { file: PathBuf },
    /// Admissible Green's function between two points
    Green { file: PathBuf, x: String, y: String },
    /// Effective resistance between two points
    Resistance { file: PathBuf, x: String, y: String },
    /// Degeneration slopes and Lear coefficients of a nodal fiber
    Asymptotics {
        file: PathBuf,
        /// Section at which to expand the point-dependent asymptotics
        #[arg(long, value_name = "NAME")]
        p: Option<String>,
        /// Second section, paired against --p
        #[arg(long, value_name = "NAME", requires = "p")]
        q: Option<String>,
    },
    /// Deligne pairings of the admissible bundles at two vertices
    Pairing { file: PathBuf, x: String, y: String },
    /// Replace every multiple node by a chain of unit nodes
    Desingularize { file: PathBuf },
    /// Run the exact identity suite on a document or on random graphs
    Check {
        file: Option<PathBuf>,
        /// Verify this many random graphs instead of a file
        #[arg(long, value_name = "N", conflicts_with = "file")]
        random: Option<u64>,
        /// Seed for graph generation and probe points
        #[arg(long, value_name = "S")]
        seed: Option<u64>,
        /// Record one artificial failure to exercise the violation path
        #[arg(long, hide = true)]
        inject_failure: bool,
    },
}

pub enum CliError {
    Parse(String),
    Semantic(String),
    Violation(String),
}

impl CliError {
    pub fn semantic(e: impl fmt::Display) -> CliError {
        CliError::Semantic(e.to_string())
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse(_) => 1,
            CliError::Semantic(_) => 2,
            CliError::Violation(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Parse(m) | CliError::Semantic(m) | CliError::Violation(m) => m,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(output) => {
            print!("{output}");
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {}", err.message());
            ExitCode::from(err.exit_code())
        }
    }
}

fn run(cli: &Cli) -> Result<String, CliError> {
    let format = match cli.format {
        FormatArg::Text => Format::Text,
        FormatArg::Machine => Format::Machine,
    };
    let render = |report: Report| report.render(format, cli.decimal);
    match &cli.command {
        Command::Invariants { file } => Ok(render(cmd_invariants(&load(file)?))),
        Command::Green { file, x, y } => Ok(render(cmd_green(&load(file)?, x, y)?)),
        Command::Resistance { file, x, y } => {
            let input = load(file)?;
            let x = parse_point(&input, x)?;
            let y = parse_point(&input, y)?;
            let mut report = Report::new();
            report.exact(
                "resistance",
                "effective resistance r(x, y) of the edge-length network",
                input.graph.graph().resistance(&x, &y),
            );
            Ok(render(report))
        }
        Command::Asymptotics { file, p, q } => Ok(render(cmd_asymptotics(
            &load(file)?,
            p.as_deref(),
            q.as_deref(),
        )?)),
        Command::Pairing { file, x, y } => Ok(render(cmd_pairing(&load(file)?, x, y)?)),
        Command::Desingularize { file } => {
            let input = load(file)?;
            let fiber = input.fiber()?;
            Ok(render_desingularized_document(fiber, &input.names))
        }
        Command::Check {
            file,
            random,
            seed,
            inject_failure,
        } => cmd_check(
            file.as_deref(),
            *random,
            seed.unwrap_or(0),
            *inject_failure,
            &render,
        ),
    }
}

fn load(path: &Path) -> Result<ParsedInput, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))?;
    parse_document(&text)
}

/// A point argument is a vertex id or `edge:ID@POSITION` with a rational
/// position along the edge, measured from its `from` endpoint.
fn parse_point(input: &ParsedInput, spec: &str) -> Result<Point, CliError> {
    let graph = input.graph.graph();
    if let Some(rest) = spec.strip_prefix("edge:") {
        let (id, position) = rest.rsplit_once('@').ok_or_else(|| {
            CliError::Semantic(format!(
                "point {spec:?}: edge points are written edge:ID@POSITION"
            ))
        })?;
        let e = *input
            .names
            .edge_index
            .get(id)
            .ok_or_else(|| CliError::Semantic(format!("unknown edge {id:?}")))?;
        let s = parse_rational(position)
            .map_err(|err| CliError::Semantic(format!("point {spec:?}: {err}")))?;
        graph.point_on_edge(e, s).map_err(|err| match err {
            PointError::OutsideEdge { s, length, .. } => CliError::Semantic(format!(
                "position {s} lies outside [0, {length}] on edge {id:?}"
            )),
            other => CliError::semantic(other),
        })
    } else {
        let v = *input
            .names
            .vertex_index
            .get(spec)
            .ok_or_else(|| CliError::Semantic(format!("unknown vertex {spec:?}")))?;
        graph.point_at_vertex(v).map_err(CliError::semantic)
    }
}

fn lookup_vertex(input: &ParsedInput, spec: &str) -> Result<usize, CliError> {
    input.names.vertex_index.get(spec).copied().ok_or_else(|| {
        CliError::Semantic(format!(
            "unknown vertex {spec:?}; this command takes vertex ids"
        ))
    })
}

fn cmd_invariants(input: &ParsedInput) -> Report {
    let p = &input.graph;
    let graph = p.graph();
    let model = graph.model();
    let mut r = Report::new();
    r.exact(
        "delta",
        "volume of the graph, the sum of all edge lengths",
        model.total_length(),
    );
    r.exact(
        "epsilon",
        "integral of g(y, y) against (2h-2) mu + delta_K",
        p.epsilon(),
    );
    r.exact(
        "tau",
        "half the integral of r(x, .) against the canonical measure",
        graph.tau(),
    );
    r.exact("eta", "one third of the sum of F(e)^2 l(e)", graph.eta());
    r.count("betti", "first Betti number", model.betti_number());
    r.exact(
        "tree_constant",
        "sum over spanning trees of the product of reciprocal edge lengths",
        model.weighted_tree_count(),
    );
    for (e, name) in input.names.edge_names.iter().enumerate() {
        r.exact(
            format!("foster.{name}"),
            "Foster coefficient l(e)/(l(e) + r(e))",
            graph.foster_coefficient(e),
        );
    }
    r
}

fn cmd_green(input: &ParsedInput, x_spec: &str, y_spec: &str) -> Result<Report, CliError> {
    let p = &input.graph;
    let x = parse_point(input, x_spec)?;
    let y = parse_point(input, y_spec)?;
    let mut r = Report::new();
    r.exact(
        "green",
        "admissible Green's function g(x, y)",
        p.green_admissible(&x, &y),
    );
    let resistance = p.graph().resistance(&x, &y);
    r.exact(
        "resistance",
        "effective resistance r(x, y)",
        resistance.clone(),
    );
    if let (Point::AtVertex(_), Point::AtVertex(_)) = (&x, &y) {
        r.exact(
            "g_bar",
            "Green's function of the degree-zero theory, -r(x, y)/2",
            -&resistance / rat(2, 1),
        );
    }
    Ok(r)
}

fn cmd_asymptotics(
    input: &ParsedInput,
    p_name: Option<&str>,
    q_name: Option<&str>,
) -> Result<Report, CliError> {
    let fiber = input.fiber()?;
    let base = delta_asymptotics(fiber).map_err(CliError::semantic)?;
    let lear = lear_coefficients(fiber, p_name, q_name).map_err(CliError::semantic)?;
    let mut r = Report::new();
    r.exact(
        "delta_slope",
        "coefficient of -log|t| in the Faltings delta invariant, delta + epsilon",
        base.delta_slope,
    );
    r.count("betti", "first Betti number of the dual graph", base.betti);
    r.exact(
        "tree_constant",
        "sum over spanning trees of the product of reciprocal multiplicities",
        base.tree_constant,
    );
    r.note("note", base.note);
    if let Some(name) = p_name {
        let arak = arakelov_asymptotics(fiber, name, q_name).map_err(CliError::semantic)?;
        r.exact(
            "metric_slope",
            "slope of log of the Arakelov metric at the section, -g(x, x)",
            arak.metric_slope,
        );
        if let Some(slope) = arak.green_slope {
            r.exact(
                "green_slope",
                "degeneration slope of the Arakelov Green's function at the sections, g(x, y)",
                slope,
            );
        }
    }
    r.exact(
        "lear.omega_omega",
        "Lear coefficient of <omega, omega>, equal to -epsilon",
        lear.omega_omega,
    );
    if let Some(v) = lear.p_omega {
        r.exact(
            "lear.p_omega",
            "Lear coefficient of <section, omega>, equal to -g(x, x)",
            v,
        );
    }
    if let Some(v) = lear.pq {
        r.exact(
            "lear.pq",
            "Lear coefficient of the pairing of the two sections, g(x, y)",
            v,
        );
    }
    if let Some(v) = lear.kappa {
        r.exact(
            "lear.kappa",
            "Lear coefficient of the self-pairing of (2h-2)P - K",
            v,
        );
    }
    if let Some(v) = lear.delta_b {
        r.exact(
            "lear.delta_b",
            "Lear coefficient of the pulled-back diagonal, -r(x, y)",
            v,
        );
    }
    if let Some(v) = lear.delta_pb_sq {
        r.exact(
            "lear.delta_pb_sq",
            "Lear coefficient of the squared diagonal, -(4h g(x, x) + epsilon)",
            v,
        );
    }
    if let Some(v) = lear.delta_pb_sq_of_lears {
        r.exact(
            "lear.delta_pb_sq_of_lears",
            "squared diagonal paired as Lear extensions; off by eta of the unit model",
            v,
        );
    }
    Ok(r)
}

fn cmd_pairing(input: &ParsedInput, x_spec: &str, y_spec: &str) -> Result<Report, CliError> {
    let p = &input.graph;
    let x = lookup_vertex(input, x_spec)?;
    let y = lookup_vertex(input, y_spec)?;
    let bx = admissible_of_point(p, x);
    let by = admissible_of_point(p, y);
    let omega = omega_a(p);
    let mut r = Report::new();
    r.exact(
        "omega_omega",
        "self-pairing of the admissible canonical bundle, -epsilon",
        intersection(p, &omega.base, &omega.base),
    );
    r.exact(
        "p_p",
        "self-pairing of the first point bundle, g(x, x)",
        intersection(p, &bx.base, &bx.base),
    );
    r.exact(
        "p_q",
        "pairing of the two point bundles, g(x, y)",
        intersection(p, &bx.base, &by.base),
    );
    r.exact(
        "q_q",
        "self-pairing of the second point bundle, g(y, y)",
        intersection(p, &by.base, &by.base),
    );
    r.exact(
        "p_omega",
        "first point bundle against the canonical bundle, -g(x, x)",
        intersection(p, &bx.base, &omega.base),
    );
    r.exact(
        "q_omega",
        "second point bundle against the canonical bundle, -g(y, y)",
        intersection(p, &by.base, &omega.base),
    );
    r.exact(
        "adjunction_p",
        "first point against omega twisted by it; zero by adjunction",
        intersection(p, &bx.base, &omega.tensor(&bx).base),
    );
    r.exact(
        "adjunction_q",
        "second point against omega twisted by it; zero by adjunction",
        intersection(p, &by.base, &omega.tensor(&by).base),
    );
    Ok(r)
}

fn cmd_check(
    file: Option<&Path>,
    random: Option<u64>,
    seed: u64,
    inject_failure: bool,
    render: &dyn Fn(Report) -> String,
) -> Result<String, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut graphs = 0usize;
    let mut checks = 0usize;
    let mut failures: Vec<String> = Vec::new();
    let mut run_suite = |p: &PolarizedMetrizedGraph, label: String, rng: &mut ChaCha8Rng| {
        let outcome = verify_identities(p, rng);
        graphs += 1;
        checks += outcome.checks.len();
        for check in outcome.checks {
            if !check.pass {
                failures.push(format!("{label}: {} (residual {})", check.name, check.residual));
            }
        }
    };
    match (file, random) {
        (Some(path), None) => {
            let input = load(path)?;
            run_suite(&input.graph, "document".to_string(), &mut rng);
        }
        (None, Some(n)) => {
            for i in 0..n {
                let p = random_polarized_graph(&mut rng);
                run_suite(&p, format!("graph {i}"), &mut rng);
            }
        }
        (None, None) => {
            return Err(CliError::Parse(
                "check needs a FILE or --random N".to_string(),
            ))
        }
        (Some(_), Some(_)) => unreachable!("clap rejects file together with --random"),
    }
    if inject_failure {
        checks += 1;
        failures.push("negative control: deliberately recorded failure".to_string());
    }

    let mut r = Report::new();
    r.count("graphs", "polarized graphs put through the identity suite", graphs);
    r.count("checks", "identities evaluated", checks);
    r.count("failures", "identities with nonzero residual", failures.len());
    for failure in &failures {
        r.note("FAIL", failure.clone());
    }
    let rendered = render(r);
    if failures.is_empty() {
        Ok(rendered)
    } else {
        print!("{rendered}");
        Err(CliError::Violation(format!(
            "{} of {} identities failed",
            failures.len(),
            checks
        )))
    }
}
