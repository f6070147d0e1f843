//! Command-line front end: dataset ingestion, pipeline orchestration and
//! CSV/JSON/DOT emission.
//!
//! The binary is a thin wrapper around [`run`], which takes argv plus
//! output sinks and returns the process exit code: 0 on success, 1 on
//! domain errors (reported on stderr), 2 on usage errors.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use evidenceflow::flow::{evidence_flow, verify_conservation, EvidenceFlowNetwork};
use evidenceflow::hat::{hat_matrix, HatMatrix};
use evidenceflow::model::{
    adjust_multiarm, apply_heterogeneity, parse_aggregate, parse_contrasts, pool_edges,
    AggregateNetwork, ParseOptions,
};
use evidenceflow::randomwalk::{
    analytic_currents, make_absorbing, simulate_crossings, transition_matrix,
};
use evidenceflow::streams::{
    enumerate_paths, legacy_average, legacy_streams, proportion_contributions, stream_flows,
    stream_transition_matrix, EvidenceStream, LegacyStrategy,
};

/// Environment variable consulted for the default seed.
pub const SEED_ENV: &str = "EVIDENCEFLOW_SEED";

#[derive(Parser)]
#[command(
    name = "evidenceflow",
    version,
    about = "Network meta-analysis evidence flows, streams and proportion contributions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum InputKind {
    /// Contrast-level rows: study,treat1,treat2,effect,se
    Contrasts,
    /// Pre-pooled rows: treat1,treat2,direct_estimate,weight
    Aggregate,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    /// Analytic random-walk streams (all paths)
    Rw,
    /// Legacy iterative decomposition, shortest path first
    Shortest,
    /// Legacy iterative decomposition, random path order
    Random,
    /// Mean over repeated random-order runs
    Average,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FlowFormat {
    Csv,
    Dot,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ContributionFormat {
    Csv,
    Json,
}

#[derive(Args)]
struct InputArgs {
    /// Input CSV file
    #[arg(long)]
    input: PathBuf,
    /// How to interpret the input file
    #[arg(long, value_enum, default_value_t = InputKind::Contrasts)]
    kind: InputKind,
    /// Heterogeneity variance added to every contrast (contrast input only)
    #[arg(long, default_value_t = 0.0)]
    tau2: f64,
    /// Significant digits in emitted numbers (1-17)
    #[arg(long, default_value_t = 15)]
    digits: usize,
}

#[derive(Args)]
struct ComparisonArg {
    /// Treatment pair "A,B": walk source A, sink B
    #[arg(long)]
    comparison: String,
}

#[derive(Args)]
struct SeedArgs {
    /// Random seed (default: EVIDENCEFLOW_SEED or 0)
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Pool contrast-level data and emit the aggregate network as CSV
    Aggregate {
        #[command(flatten)]
        input: InputArgs,
    },
    /// Emit the hat matrix as CSV with edge labels
    Hatmatrix {
        #[command(flatten)]
        input: InputArgs,
    },
    /// Evidence flow network for one comparison
    Flow {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        comparison: ComparisonArg,
        #[arg(long, value_enum, default_value_t = FlowFormat::Csv)]
        format: FlowFormat,
    },
    /// Analytic edge currents, optionally with a Monte Carlo cross-check
    Walk {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        comparison: ComparisonArg,
        /// Also simulate walkers and report means and standard errors
        #[arg(long)]
        simulate: bool,
        /// Number of simulated walkers
        #[arg(long, default_value_t = 100_000)]
        walkers: u64,
        #[command(flatten)]
        seed: SeedArgs,
    },
    /// Evidence streams (paths and flows) for one comparison
    Streams {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        comparison: ComparisonArg,
        #[arg(long, value_enum, default_value_t = Method::Rw)]
        method: Method,
        /// Runs to average for --method average
        #[arg(long, default_value_t = 1000)]
        runs: u64,
        #[command(flatten)]
        seed: SeedArgs,
    },
    /// Per-edge proportion contributions for one comparison
    Contributions {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        comparison: ComparisonArg,
        #[arg(long, value_enum, default_value_t = Method::Rw)]
        method: Method,
        #[arg(long, default_value_t = 1000)]
        runs: u64,
        #[command(flatten)]
        seed: SeedArgs,
        #[arg(long, value_enum, default_value_t = ContributionFormat::Csv)]
        format: ContributionFormat,
    },
    /// Verify conservation and the current/hat-row equivalence everywhere
    Check {
        #[command(flatten)]
        input: InputArgs,
    },
}

enum CliError {
    Usage(String),
    Domain(String),
    /// Output consumer went away (e.g. piping into `head`); not an error.
    ClosedPipe,
}

impl CliError {
    fn usage(msg: impl Into<String>) -> Self {
        Self::Usage(msg.into())
    }
}

macro_rules! domain_from {
    ($($ty:ty => $name:literal),*) => {
        $(impl From<$ty> for CliError {
            fn from(e: $ty) -> Self {
                CliError::Domain(format!(concat!($name, ": {}"), e))
            }
        })*
    };
}

domain_from!(
    evidenceflow::model::ModelError => "model",
    evidenceflow::numerics::NumericsError => "numerics",
    evidenceflow::flow::FlowError => "flow",
    evidenceflow::randomwalk::WalkError => "randomwalk",
    evidenceflow::streams::StreamError => "streams"
);

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            CliError::ClosedPipe
        } else {
            CliError::Domain(format!("io: {e}"))
        }
    }
}

/// Formats `x` with the given number of significant digits, positional
/// where reasonable and scientific otherwise, trailing zeros trimmed.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let scientific = format!("{:.*e}", digits.saturating_sub(1), x);
    let exp: i32 = scientific[scientific.find('e').unwrap() + 1..]
        .parse()
        .unwrap();
    if exp >= -4 && exp < digits as i32 {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        let mut out = format!("{x:.decimals$}");
        if out.contains('.') {
            while out.ends_with('0') {
                out.pop();
            }
            if out.ends_with('.') {
                out.pop();
            }
        }
        out
    } else {
        let (mantissa, exponent) = scientific.split_at(scientific.find('e').unwrap());
        let mut m = mantissa.to_string();
        if m.contains('.') {
            while m.ends_with('0') {
                m.pop();
            }
            if m.ends_with('.') {
                m.pop();
            }
        }
        format!("{m}{exponent}")
    }
}

/// Parses argv, runs the requested pipeline and returns the exit code.
pub fn run<I, S>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are successful exits.
            use clap::error::ErrorKind;
            let kind = e.kind();
            if matches!(kind, ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return 0;
            }
            let _ = write!(stderr, "{e}");
            return 2;
        }
    };
    match dispatch(cli, stdout) {
        Ok(()) | Err(CliError::ClosedPipe) => 0,
        Err(CliError::Usage(msg)) => {
            let _ = writeln!(stderr, "usage error: {msg}");
            2
        }
        Err(CliError::Domain(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            1
        }
    }
}

fn resolve_seed(seed: &SeedArgs) -> Result<u64, CliError> {
    if let Some(s) = seed.seed {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(text) => text
            .parse()
            .map_err(|_| CliError::usage(format!("{SEED_ENV} must be an integer, got {text:?}"))),
        Err(_) => Ok(0),
    }
}

fn validate_input(args: &InputArgs) -> Result<(), CliError> {
    if !(1..=17).contains(&args.digits) {
        return Err(CliError::usage("--digits must be between 1 and 17"));
    }
    if args.tau2 < 0.0 {
        return Err(CliError::usage("--tau2 must be non-negative"));
    }
    if args.kind == InputKind::Aggregate && args.tau2 != 0.0 {
        return Err(CliError::usage(
            "--tau2 applies to contrast-level input only; aggregate weights are final",
        ));
    }
    Ok(())
}

fn load_network(args: &InputArgs) -> Result<AggregateNetwork<f64>, CliError> {
    validate_input(args)?;
    let text = std::fs::read_to_string(&args.input)?;
    let options = ParseOptions::default();
    let net = match args.kind {
        InputKind::Aggregate => parse_aggregate(&text, &options)?,
        InputKind::Contrasts => {
            let studies = parse_contrasts::<f64>(&text, &options)?;
            let studies = studies
                .iter()
                .map(|s| apply_heterogeneity(s, args.tau2))
                .collect::<Result<Vec<_>, _>>()?;
            let adjusted = studies
                .iter()
                .map(adjust_multiarm)
                .collect::<Result<Vec<_>, _>>()?;
            pool_edges(&adjusted, &studies)?
        }
    };
    Ok(net)
}

fn parse_comparison<'a>(
    net: &AggregateNetwork<f64>,
    text: &'a str,
) -> Result<(&'a str, &'a str), CliError> {
    let (a, b) = text
        .split_once(',')
        .ok_or_else(|| CliError::usage("--comparison expects two labels, e.g. 1,3"))?;
    let (a, b) = (a.trim(), b.trim());
    if a == b {
        return Err(CliError::usage("--comparison treatments must differ"));
    }
    for label in [a, b] {
        if net.node_index(label).is_none() {
            return Err(CliError::Domain(format!(
                "model: unknown treatment {label}"
            )));
        }
    }
    Ok((a, b))
}

fn comparison_flow(
    net: &AggregateNetwork<f64>,
    hat: &HatMatrix<f64>,
    comparison: &str,
) -> Result<EvidenceFlowNetwork<f64>, CliError> {
    let (a, b) = parse_comparison(net, comparison)?;
    Ok(evidence_flow(hat, a, b)?)
}

fn streams_by_method(
    fnet: &EvidenceFlowNetwork<f64>,
    method: Method,
    runs: u64,
    seed: u64,
) -> Result<Vec<EvidenceStream<f64>>, CliError> {
    if runs < 1 {
        return Err(CliError::usage("--runs must be at least 1"));
    }
    let streams = match method {
        Method::Rw => {
            let transition = stream_transition_matrix(fnet)?;
            stream_flows(&transition, &enumerate_paths(fnet)?)
        }
        Method::Shortest => legacy_streams(fnet, LegacyStrategy::Shortest)?,
        Method::Random => legacy_streams(fnet, LegacyStrategy::Random { seed })?,
        Method::Average => legacy_average(fnet, runs, seed)?,
    };
    Ok(streams)
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Aggregate { input } => {
            let net = load_network(&input)?;
            emit_aggregate(&net, input.digits, out)
        }
        Command::Hatmatrix { input } => {
            let net = load_network(&input)?;
            let hat = hat_matrix(&net)?;
            emit_hat_matrix(&hat, input.digits, out)
        }
        Command::Flow {
            input,
            comparison,
            format,
        } => {
            let net = load_network(&input)?;
            let hat = hat_matrix(&net)?;
            let fnet = comparison_flow(&net, &hat, &comparison.comparison)?;
            match format {
                FlowFormat::Csv => emit_flow_csv(&fnet, input.digits, out),
                FlowFormat::Dot => emit_flow_dot(&fnet, input.digits, out),
            }
        }
        Command::Walk {
            input,
            comparison,
            simulate,
            walkers,
            seed,
        } => {
            if walkers < 1 {
                return Err(CliError::usage("--walkers must be at least 1"));
            }
            let seed = resolve_seed(&seed)?;
            let net = load_network(&input)?;
            let (a, b) = parse_comparison(&net, &comparison.comparison)?;
            let currents = analytic_currents(&net, a, b)?;
            let estimate = if simulate {
                let t_abs = make_absorbing(&transition_matrix(&net), b)?;
                Some(simulate_crossings(&t_abs, a, walkers, seed)?)
            } else {
                None
            };
            emit_walk(&net, &currents, estimate.as_ref(), input.digits, out)
        }
        Command::Streams {
            input,
            comparison,
            method,
            runs,
            seed,
        } => {
            let seed = resolve_seed(&seed)?;
            let net = load_network(&input)?;
            let hat = hat_matrix(&net)?;
            let fnet = comparison_flow(&net, &hat, &comparison.comparison)?;
            let streams = streams_by_method(&fnet, method, runs, seed)?;
            writeln!(out, "path,flow")?;
            for stream in &streams {
                writeln!(
                    out,
                    "{},{}",
                    stream.label(fnet.treatments()),
                    format_sig(stream.flow, input.digits)
                )?;
            }
            Ok(())
        }
        Command::Contributions {
            input,
            comparison,
            method,
            runs,
            seed,
            format,
        } => {
            let seed = resolve_seed(&seed)?;
            let net = load_network(&input)?;
            let hat = hat_matrix(&net)?;
            let fnet = comparison_flow(&net, &hat, &comparison.comparison)?;
            let streams = streams_by_method(&fnet, method, runs, seed)?;
            let row = proportion_contributions(&fnet, &streams);
            match format {
                ContributionFormat::Csv => {
                    writeln!(out, "edge,proportion")?;
                    for &((u, v), p) in row.entries() {
                        writeln!(
                            out,
                            "{}-{},{}",
                            fnet.treatments()[u],
                            fnet.treatments()[v],
                            format_sig(p, input.digits)
                        )?;
                    }
                    Ok(())
                }
                ContributionFormat::Json => emit_contributions_json(&fnet, &streams, &row, out),
            }
        }
        Command::Check { input } => {
            let net = load_network(&input)?;
            check_network(&net, out)
        }
    }
}

fn emit_aggregate(
    net: &AggregateNetwork<f64>,
    digits: usize,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    writeln!(out, "treat1,treat2,direct_estimate,weight")?;
    for (k, &(u, v)) in net.edges().iter().enumerate() {
        writeln!(
            out,
            "{},{},{},{}",
            net.treatments()[u],
            net.treatments()[v],
            format_sig(net.direct_estimates()[k], digits),
            format_sig(net.weights()[k], digits)
        )?;
    }
    Ok(())
}

fn emit_hat_matrix(
    hat: &HatMatrix<f64>,
    digits: usize,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let labels: Vec<String> = (0..hat.n_edges()).map(|k| hat.edge_label(k)).collect();
    writeln!(out, "edge,{}", labels.join(","))?;
    for (k, label) in labels.iter().enumerate() {
        let row: Vec<String> = hat.row(k).iter().map(|&h| format_sig(h, digits)).collect();
        writeln!(out, "{label},{}", row.join(","))?;
    }
    Ok(())
}

fn emit_flow_csv(
    fnet: &EvidenceFlowNetwork<f64>,
    digits: usize,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    writeln!(out, "from,to,flow")?;
    for (&(c, d), &f) in fnet.flows() {
        writeln!(
            out,
            "{},{},{}",
            fnet.treatments()[c],
            fnet.treatments()[d],
            format_sig(f, digits)
        )?;
    }
    Ok(())
}

fn emit_flow_dot(
    fnet: &EvidenceFlowNetwork<f64>,
    digits: usize,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let max_flow = fnet
        .flows()
        .values()
        .fold(0.0f64, |acc, &f| acc.max(f))
        .max(f64::MIN_POSITIVE);
    writeln!(out, "digraph evidence_flow {{")?;
    writeln!(out, "  rankdir=LR;")?;
    for label in fnet.treatments() {
        writeln!(out, "  \"{label}\";")?;
    }
    for (&(c, d), &f) in fnet.flows() {
        // Pen width linear in flow, scaled into [0.5, 5].
        let penwidth = 0.5 + 4.5 * f / max_flow;
        writeln!(
            out,
            "  \"{}\" -> \"{}\" [label=\"{}\", penwidth={}];",
            fnet.treatments()[c],
            fnet.treatments()[d],
            format_sig(f, digits),
            format_sig(penwidth, 3)
        )?;
    }
    writeln!(out, "}}")?;
    Ok(())
}

fn emit_walk(
    net: &AggregateNetwork<f64>,
    currents: &[f64],
    estimate: Option<&evidenceflow::randomwalk::CrossingEstimate<f64>>,
    digits: usize,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    match estimate {
        None => {
            writeln!(out, "treat1,treat2,current")?;
            for (k, &(u, v)) in net.edges().iter().enumerate() {
                writeln!(
                    out,
                    "{},{},{}",
                    net.treatments()[u],
                    net.treatments()[v],
                    format_sig(currents[k], digits)
                )?;
            }
        }
        Some(estimate) => {
            writeln!(out, "treat1,treat2,current,sim_mean,sim_se")?;
            for (k, &(u, v)) in net.edges().iter().enumerate() {
                let (mean, se) = estimate
                    .for_pair(u, v)
                    .expect("simulation covers every edge");
                writeln!(
                    out,
                    "{},{},{},{},{}",
                    net.treatments()[u],
                    net.treatments()[v],
                    format_sig(currents[k], digits),
                    format_sig(mean, digits),
                    format_sig(se, digits)
                )?;
            }
        }
    }
    Ok(())
}

fn emit_contributions_json(
    fnet: &EvidenceFlowNetwork<f64>,
    streams: &[EvidenceStream<f64>],
    row: &evidenceflow::streams::ContributionRow<f64>,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let (a, b) = fnet.comparison();
    let stream_values: Vec<serde_json::Value> = streams
        .iter()
        .map(|s| {
            serde_json::json!({
                "path": s.path.iter().map(|&i| fnet.treatments()[i].clone()).collect::<Vec<_>>(),
                "flow": s.flow,
            })
        })
        .collect();
    let contributions: BTreeMap<String, f64> = row
        .entries()
        .iter()
        .map(|&((u, v), p)| {
            (
                format!("{}-{}", fnet.treatments()[u], fnet.treatments()[v]),
                p,
            )
        })
        .collect();
    let value = serde_json::json!({
        "comparison": [fnet.treatments()[a], fnet.treatments()[b]],
        "streams": stream_values,
        "contributions": contributions,
    });
    writeln!(
        out,
        "{}",
        serde_json::to_string_pretty(&value).expect("json")
    )?;
    Ok(())
}

fn check_network(net: &AggregateNetwork<f64>, out: &mut dyn Write) -> Result<(), CliError> {
    const TOL: f64 = 1e-9;
    let hat = hat_matrix(net)?;
    let mut max_conservation = 0.0f64;
    let mut max_divergence = 0.0f64;
    let mut all_acyclic = true;
    for (k, &(a, b)) in net.edges().iter().enumerate() {
        let la = net.treatments()[a].clone();
        let lb = net.treatments()[b].clone();
        let fnet = evidence_flow(&hat, &la, &lb)?;
        let report = verify_conservation(&fnet);
        max_conservation = max_conservation.max(report.max_residual());
        all_acyclic &= report.acyclic;
        let currents = analytic_currents(net, &la, &lb)?;
        for (c, &h) in hat.row(k).iter().enumerate() {
            max_divergence = max_divergence.max((currents[c] - h).abs());
        }
    }
    writeln!(out, "comparisons checked: {}", net.n_edges())?;
    writeln!(
        out,
        "max conservation residual: {}",
        format_sig(max_conservation, 3)
    )?;
    writeln!(
        out,
        "max |current - hat row| divergence: {}",
        format_sig(max_divergence, 3)
    )?;
    writeln!(out, "all flow networks acyclic: {all_acyclic}")?;
    let pass = all_acyclic && max_conservation <= TOL && max_divergence <= TOL;
    writeln!(out, "check: {}", if pass { "PASS" } else { "FAIL" })?;
    if pass {
        Ok(())
    } else {
        Err(CliError::Domain(
            "check failed: residuals above tolerance".into(),
        ))
    }
}
