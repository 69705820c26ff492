//! Command-line front end for `ratiolab`.
//!
//! Exit codes: 0 on success, 1 when an input or an assumption of the
//! requested analysis is not met, 2 when a bound check fails or a numerical
//! self-check detects a fault.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use ratiolab::bounds::BoundCheck;
use ratiolab::perturbation::{self, EdgeSign};
use ratiolab::spectral::{self, Method};
use ratiolab::{edgelist, Edge, Error, FamilySpec, Graph};

pub mod checks;
pub mod sweep;

use checks::{CheckOptions, CHECK_NAMES};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PRECONDITION: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "ratiolab", version, about = "Principal ratios of graphs and their response to one-edge edits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a graph and write it as an edge list.
    Construct {
        /// Family spec, e.g. `ring:r=20,d=3` or `lex:cycle:10,empty:40`.
        spec: String,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Top of the adjacency spectrum and the spectral gaps.
    Spectrum {
        /// Family spec or edge-list file.
        graph: String,
        #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
        method: MethodArg,
    },
    /// Principal ratio q_max / q_min.
    Ratio {
        graph: String,
        /// For ring specs, use the ring with its designated edge added.
        #[arg(long)]
        plus_e: bool,
        #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
        method: MethodArg,
    },
    /// Certify the ratio of a regular graph after adding or deleting one edge.
    Perturb {
        graph: String,
        /// Edge as `u,v`.
        #[arg(long, value_parser = parse_edge)]
        edge: Edge,
        /// `+` to add the edge, `-` to delete it.
        #[arg(long, allow_hyphen_values = true, value_parser = parse_sign)]
        sign: EdgeSign,
        /// Contraction parameter in (0, 1).
        #[arg(long)]
        c: f64,
    },
    /// Evaluate bound checks and print one CSV row per check.
    Verify {
        /// A check name or `all`.
        check: String,
        graph: String,
        /// Sampled vertex pairs or edges for the sampled checks.
        #[arg(long, default_value_t = 10)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Edit used by the expander check.
        #[arg(long, value_enum, default_value_t = EdgeOpArg::Plus)]
        edge_op: EdgeOpArg,
        /// Use this edge instead of sampling one.
        #[arg(long, value_parser = parse_edge)]
        edge: Option<Edge>,
        /// Distance allowance for removal_poly (default: the measured distance).
        #[arg(long)]
        c_dist: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Run analyses over a grid of family parameters.
    Sweep {
        /// Flat `key = value` file.
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's `output`.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Auto,
    Dense,
    Power,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Auto => Method::Auto,
            MethodArg::Dense => Method::Dense,
            MethodArg::Power => Method::Power,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum EdgeOpArg {
    Plus,
    Minus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

pub fn parse_edge(s: &str) -> Result<Edge, String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("edge must look like 'u,v', got '{s}'"))?;
    let a = a.trim().parse().map_err(|_| format!("bad vertex '{a}'"))?;
    let b = b.trim().parse().map_err(|_| format!("bad vertex '{b}'"))?;
    Edge::new(a, b).map_err(|e| e.to_string())
}

fn parse_sign(s: &str) -> Result<EdgeSign, String> {
    s.parse::<EdgeSign>().map_err(|e| e.to_string())
}

/// A family spec, or an edge-list path when the string is not a spec.
pub fn resolve_graph(s: &str) -> Result<FamilySpec, Error> {
    match s.parse::<FamilySpec>() {
        Ok(spec) => Ok(spec),
        Err(parse_err) => {
            if Path::new(s).is_file() {
                Ok(FamilySpec::FromFile(PathBuf::from(s)))
            } else {
                Err(parse_err)
            }
        }
    }
}

/// The assumption an error says was not met.
fn assumption(e: &Error) -> Option<&'static str> {
    Some(match e {
        Error::NotRegular => "the analysis assumes a connected d-regular graph",
        Error::NonRegularRequired => "the bound is stated for connected nonregular graphs",
        Error::Disconnected => "principal vectors are only unique and positive on connected graphs",
        Error::BridgeRemoval(_) => "edge deletions assume the edge is not a bridge",
        Error::EdgeExists(_) => "adding an edge needs a non-edge of the graph",
        Error::EdgeMissing(_) => "deleting an edge needs an edge of the graph",
        Error::GapTooSmall { .. } => "the certificate assumes delta > (2/c) sqrt(n) + 2",
        Error::DistanceTooLarge { .. } => "the polynomial bound assumes the endpoints stay close after removal",
        Error::ParametersTooSmall(_) => "the exponential bound is stated for n > 18 d^3",
        _ => return None,
    })
}

pub(crate) fn report_error(err: &mut dyn Write, context: &str, e: &Error) -> i32 {
    let _ = match assumption(e) {
        Some(a) => writeln!(err, "error: {context}: {e} ({a})"),
        None => writeln!(err, "error: {context}: {e}"),
    };
    if checks::is_fault(e) {
        EXIT_VIOLATION
    } else {
        EXIT_PRECONDITION
    }
}

fn write_json<T: Serialize>(out: &mut dyn Write, value: &T) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)
}

#[derive(Serialize)]
struct Tagged<'a, T: Serialize> {
    spec: String,
    vertices: usize,
    edges: usize,
    #[serde(flatten)]
    report: &'a T,
}

fn tagged<'a, T: Serialize>(spec: &FamilySpec, g: &Graph, report: &'a T) -> Tagged<'a, T> {
    Tagged { spec: spec.to_string(), vertices: g.n(), edges: g.m(), report }
}

/// Runs the CLI with process stdout and stderr.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{}", e.render());
                return EXIT_OK;
            }
            let _ = write!(err, "{}", e.render());
            return EXIT_PRECONDITION;
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(Failure::Core(context, e)) => report_error(err, &context, &e),
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_PRECONDITION
        }
    }
}

/// Why a command stopped before producing its output.
#[derive(Debug)]
pub enum Failure {
    Core(String, Error),
    Usage(String),
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Core("output".into(), e.into())
    }
}

trait Context<T> {
    fn ctx(self, what: &str) -> Result<T, Failure>;
}

impl<T> Context<T> for Result<T, Error> {
    fn ctx(self, what: &str) -> Result<T, Failure> {
        self.map_err(|e| Failure::Core(what.to_string(), e))
    }
}

fn load(s: &str) -> Result<(FamilySpec, Graph), Failure> {
    let spec = resolve_graph(s).ctx("graph")?;
    let g = spec.build().ctx(&format!("building {spec}"))?;
    Ok((spec, g))
}

fn dispatch(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    match cmd {
        Command::Construct { spec, output } => {
            let (spec, g) = load(&spec)?;
            edgelist::write(&g, &output).ctx("writing edge list")?;
            write_json(out, &tagged(&spec, &g, &g.structure_summary()))?;
            Ok(EXIT_OK)
        }
        Command::Spectrum { graph, method } => {
            let (spec, g) = load(&graph)?;
            let s = spectral::spectrum_summary_with::<f64>(&g, method.into()).ctx("spectrum")?;
            write_json(out, &tagged(&spec, &g, &s))?;
            Ok(EXIT_OK)
        }
        Command::Ratio { graph, plus_e, method } => {
            let mut spec = resolve_graph(&graph).ctx("graph")?;
            if plus_e {
                spec = match spec {
                    FamilySpec::Ring(r, d) | FamilySpec::RingPlusE(r, d) => FamilySpec::RingPlusE(r, d),
                    other => return Err(Failure::Usage(format!("--plus-e applies to ring:r=..,d=.. specs, got {other}"))),
                };
            }
            let g = spec.build().ctx(&format!("building {spec}"))?;
            let r = spectral::ratio_with::<f64>(&g, method.into()).ctx("ratio")?;
            write_json(out, &tagged(&spec, &g, &r))?;
            Ok(EXIT_OK)
        }
        Command::Perturb { graph, edge, sign, c } => {
            let (spec, g) = load(&graph)?;
            let rep = perturbation::certify_ratio::<f64>(&g, edge, sign, c).ctx("perturb")?;
            write_json(out, &tagged(&spec, &g, &rep))?;
            Ok(if rep.certified { EXIT_OK } else { EXIT_VIOLATION })
        }
        Command::Verify { check, graph, samples, seed, edge_op, edge, c_dist, format } => {
            let (spec, g) = load(&graph)?;
            let opts = CheckOptions {
                samples,
                edge,
                edge_op: match edge_op {
                    EdgeOpArg::Plus => EdgeSign::Plus,
                    EdgeOpArg::Minus => EdgeSign::Minus,
                },
                c_dist,
            };
            verify(&check, &spec, &g, &opts, seed, format, out, err)
        }
        Command::Sweep { config, output } => sweep::run_sweep(&config, output.as_deref(), out, err),
    }
}

#[allow(clippy::too_many_arguments)]
fn verify(
    check: &str,
    spec: &FamilySpec,
    g: &Graph,
    opts: &CheckOptions,
    seed: u64,
    format: Format,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, Failure> {
    let all = check == "all";
    if !all && !CHECK_NAMES.contains(&check) {
        return Err(Failure::Usage(format!("unknown check '{check}'; expected one of {} or all", CHECK_NAMES.join(", "))));
    }
    let names: Vec<&str> = if all { CHECK_NAMES.to_vec() } else { vec![check] };
    let mut rows: Vec<BoundCheck> = Vec::new();
    for (k, name) in names.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(k as u64));
        match checks::run_check(name, spec, g, opts, &mut rng) {
            Ok(r) => rows.extend(r),
            Err(e) if all && !checks::is_fault(&e) => {
                let _ = writeln!(err, "skipped {name}: {e}");
            }
            Err(e) => return Err(Failure::Core(name.to_string(), e)),
        }
    }
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record(BoundCheck::CSV_HEADER).map_err(csv_err)?;
            for r in &rows {
                w.write_record(r.csv_fields()).map_err(csv_err)?;
            }
            w.flush()?;
        }
        Format::Json => write_json(out, &rows)?,
    }
    let failed = rows.iter().filter(|r| !r.holds).count();
    if failed > 0 {
        let _ = writeln!(err, "{failed} of {} checks violated", rows.len());
        return Ok(EXIT_VIOLATION);
    }
    Ok(EXIT_OK)
}

pub(crate) fn csv_err(e: csv::Error) -> Failure {
    Failure::Core("csv output".into(), Error::Io(e.to_string()))
}
