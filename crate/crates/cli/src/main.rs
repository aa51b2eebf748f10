//! `unsplit`: round fractional flows and ring loadings with a cost guarantee,
//! generate random instances, compare solvers against enumeration, and
//! re-verify emitted reports.

mod campaign;
mod diag;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use unsplit_core::fpra::{BruteForceRing, BruteForceSsuf, GreedyPathStrip, RingSearchMode, SsufFpra, Strictness};
use unsplit_core::generate::{random_ring, random_ssuf, RingParams, SsufParams};
use unsplit_core::io::{parse_instance, Instance, InstanceDocument, Report, RingDocument, SsufDocument};
use unsplit_core::meta::round_with_cost;
use unsplit_core::model::{BoxErrorBody, FractionalFlow, RingFractionalSolution, RingInstance, WeightedSsufNetwork};
use unsplit_core::rational::{parse, ratio};
use unsplit_core::ring::{ring_round_with_cost, RingRunConfig};
use unsplit_core::solvers::{min_cost_flow_bounded, ring_restricted_min_cost, ArcBounds};
use unsplit_core::verify::{verify_report, verify_report_text};
use unsplit_core::{Lambda, Rational};

use diag::{Failure, FAILED, OK};

#[derive(Parser)]
#[command(
    name = "unsplit",
    version,
    about = "Cost-aware rounding for unsplittable flow and ring loading"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Round a fractional single-source flow to an unsplittable one.
    SsufRound(SsufRoundArgs),
    /// Round a fractional ring loading to an unsplittable one.
    RingRound(RingRoundArgs),
    /// Write a random instance.
    Generate(GenerateArgs),
    /// Compare the exact solvers against vertex enumeration on random instances.
    OracleCompare(OracleArgs),
    /// Re-check a report from its instance and recorded solution.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct Common {
    /// Instance file (JSON).
    instance: PathBuf,
    /// Cost tradeoff parameter in (0, 1].
    #[arg(long, default_value = "1", value_parser = parse_lambda)]
    lambda: Lambda,
    /// Fail on any failed certificate check (default).
    #[arg(long, conflicts_with = "report")]
    strict: bool,
    /// Emit the report even if certificate checks fail; the exit code is still 1.
    #[arg(long)]
    report: bool,
    /// Compute a min-cost fractional solution when the instance has none.
    #[arg(long)]
    solve_fractional: bool,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn strictness(&self) -> Strictness {
        if self.report {
            Strictness::Report
        } else {
            Strictness::Strict
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FpraName {
    Brute,
    Greedy,
}

#[derive(Args)]
struct SsufRoundArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_enum, default_value = "brute")]
    fpra: FpraName,
    /// Radius of the symmetric error body; defaults to the largest demand.
    #[arg(long, value_parser = parse_nonnegative)]
    radius: Option<Rational>,
    /// Cap on the number of path assignments the brute force may enumerate.
    #[arg(long)]
    cap: Option<u128>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SearchMode {
    Direct,
    Uniform,
}

#[derive(Args)]
struct RingRoundArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_enum, default_value = "brute")]
    fpra: FpraName,
    /// Additive guarantee of the FPRA in units of the largest demand.
    #[arg(long, default_value = "13/10", value_parser = parse_nonnegative)]
    alpha: Rational,
    /// How the brute force phrases its body check.
    #[arg(long, value_enum, default_value = "direct")]
    search: SearchMode,
    /// Cap on the number of split commodities the brute force may enumerate over.
    #[arg(long)]
    cap: Option<u32>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Ssuf,
    Ring,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(value_enum)]
    kind: Kind,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    nodes: Option<usize>,
    /// Flow instances only.
    #[arg(long)]
    arcs: Option<usize>,
    /// Flow instances only.
    #[arg(long)]
    terminals: Option<usize>,
    /// Flow instances only: paths mixed per terminal, at most.
    #[arg(long)]
    max_paths: Option<usize>,
    /// Ring instances only.
    #[arg(long)]
    commodities: Option<usize>,
    /// Ring instances only: give every edge a capacity with this numerator bound.
    #[arg(long)]
    max_capacity: Option<i64>,
    /// Ring instances only: denominator of the random splits.
    #[arg(long)]
    split_denominator: Option<i64>,
    #[arg(long)]
    max_numerator: Option<i64>,
    #[arg(long)]
    max_denominator: Option<i64>,
    #[arg(long)]
    max_cost: Option<i64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    /// Number of random instances.
    #[arg(long, default_value_t = 100)]
    instances: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Perturb solver objectives so that every comparison must disagree.
    #[arg(long, hide = true)]
    inject_fault: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Report file (JSON) written by `ssuf-round` or `ring-round`.
    report: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_rational(text: &str) -> Result<Rational, String> {
    parse(text).map_err(|e| e.to_string())
}

fn parse_lambda(text: &str) -> Result<Lambda, String> {
    Lambda::new(parse_rational(text)?).map_err(|e| e.to_string())
}

fn parse_nonnegative(text: &str) -> Result<Rational, String> {
    let value = parse_rational(text)?;
    if value < Rational::from_integer(0.into()) {
        return Err("must be nonnegative".into());
    }
    Ok(value)
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))
}

fn write(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => {
            fs::write(path, text).map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn min_cost_flow(network: &WeightedSsufNetwork) -> Result<FractionalFlow, Failure> {
    // No arc of an acyclic min-cost flow carries more than the total demand,
    // so that bound stands in for an infinite upper bound.
    let m = network.arc_count();
    let bounds = ArcBounds::new(
        vec![Rational::from_integer(0.into()); m],
        vec![network.total_demand(); m],
    )
    .expect("valid bounds");
    min_cost_flow_bounded(network, &bounds)
        .map(|opt| opt.point)
        .map_err(|e| Failure::input(format!("no fractional solution: {e}")))
}

fn min_cost_splits(ring: &RingInstance) -> Result<RingFractionalSolution, Failure> {
    // A body as wide as the total demand leaves only the split bounds active.
    let k = ring.commodities().len();
    let start = RingFractionalSolution::new(vec![ratio(1, 2); k]).expect("splits in [0, 1]");
    let body = BoxErrorBody::symmetric(ring.edge_count(), &ring.total_demand()).expect("nonnegative radius");
    ring_restricted_min_cost(ring, &start, &body, &Lambda::one())
        .map(|opt| opt.point)
        .map_err(|e| Failure::input(format!("no fractional solution: {e}")))
}

/// Attaches the standalone verification, writes the report, and maps the
/// outcome to an exit code.
fn finish(mut report: Report, certified: bool, out: Option<&Path>) -> Result<u8, Failure> {
    let verification = verify_report(&report)?;
    let verified = verification.passed();
    report.set_verification(verification);
    write(out, &report.to_text())?;
    Ok(if certified && verified { OK } else { FAILED })
}

fn ssuf_round(args: &SsufRoundArgs) -> Result<u8, Failure> {
    let common = &args.common;
    let (network, fractional) = match parse_instance(&read(&common.instance)?)? {
        Instance::Ssuf { network, fractional } => (network, fractional),
        Instance::Ring { .. } => return Err(Failure::input("expected an ssuf instance, found a ring instance")),
    };
    let x = match fractional {
        Some(x) => x,
        None if common.solve_fractional => min_cost_flow(&network)?,
        None => {
            return Err(Failure::input(
                "the instance has no fractional solution; pass --solve-fractional",
            ))
        }
    };
    let radius = args.radius.clone().unwrap_or_else(|| network.max_demand());
    let body = BoxErrorBody::symmetric(network.arc_count(), &radius).expect("nonnegative radius");
    let brute;
    let fpra: &dyn SsufFpra = match args.fpra {
        FpraName::Brute => {
            let mut b = BruteForceSsuf::default();
            if let Some(cap) = args.cap {
                b.max_assignments = cap;
            }
            brute = b;
            &brute
        }
        FpraName::Greedy => &GreedyPathStrip,
    };
    let run = round_with_cost(&network, &x, fpra, &body, &common.lambda, common.strictness())?;
    let certified = run.certificate.passed();
    finish(
        Report::from_ssuf_run(&network, &x, &run),
        certified,
        common.out.as_deref(),
    )
}

fn ring_round(args: &RingRoundArgs) -> Result<u8, Failure> {
    let common = &args.common;
    if matches!(args.fpra, FpraName::Greedy) {
        return Err(Failure::input("ring loading supports only the brute-force FPRA"));
    }
    let (ring, fractional) = match parse_instance(&read(&common.instance)?)? {
        Instance::Ring { ring, fractional } => (ring, fractional),
        Instance::Ssuf { .. } => return Err(Failure::input("expected a ring instance, found an ssuf instance")),
    };
    let x = match fractional {
        Some(x) => x,
        None if common.solve_fractional => min_cost_splits(&ring)?,
        None => {
            return Err(Failure::input(
                "the instance has no fractional solution; pass --solve-fractional",
            ))
        }
    };
    let mut fpra = BruteForceRing {
        mode: match args.search {
            SearchMode::Direct => RingSearchMode::Direct,
            SearchMode::Uniform => RingSearchMode::Uniform,
        },
        ..Default::default()
    };
    if let Some(cap) = args.cap {
        fpra.cap = cap;
    }
    let config = RingRunConfig {
        alpha: args.alpha.clone(),
        lambda: common.lambda.clone(),
        strictness: common.strictness(),
    };
    let run = ring_round_with_cost(&ring, &x, &fpra, &config)?;
    let certified = run.certificate.passed();
    finish(Report::from_ring_run(&ring, &x, &run), certified, common.out.as_deref())
}

fn generate(args: &GenerateArgs) -> Result<u8, Failure> {
    let unsatisfiable =
        |e: unsplit_core::generate::GenerateError| Failure::new(diag::INPUT, "unsatisfiable_params", e.to_string());
    let doc = match args.kind {
        Kind::Ssuf => {
            let d = SsufParams::default();
            let p = SsufParams {
                nodes: args.nodes.unwrap_or(d.nodes),
                arcs: args.arcs.unwrap_or(d.arcs),
                terminals: args.terminals.unwrap_or(d.terminals),
                max_numerator: args.max_numerator.unwrap_or(d.max_numerator),
                max_denominator: args.max_denominator.unwrap_or(d.max_denominator),
                max_cost: args.max_cost.unwrap_or(d.max_cost),
                max_paths: args.max_paths.unwrap_or(d.max_paths),
            };
            let (network, x) = random_ssuf(args.seed, &p).map_err(unsatisfiable)?;
            InstanceDocument::Ssuf(SsufDocument::from_network(&network, Some(&x)))
        }
        Kind::Ring => {
            let d = RingParams::default();
            let p = RingParams {
                nodes: args.nodes.unwrap_or(d.nodes),
                commodities: args.commodities.unwrap_or(d.commodities),
                max_numerator: args.max_numerator.unwrap_or(d.max_numerator),
                max_denominator: args.max_denominator.unwrap_or(d.max_denominator),
                max_cost: args.max_cost.unwrap_or(d.max_cost),
                max_capacity: args.max_capacity.or(d.max_capacity),
                split_denominator: args.split_denominator.unwrap_or(d.split_denominator),
            };
            let (ring, x) = random_ring(args.seed, &p).map_err(unsatisfiable)?;
            InstanceDocument::Ring(RingDocument::from_ring(&ring, Some(&x)))
        }
    };
    write(args.out.as_deref(), &doc.to_text())?;
    Ok(OK)
}

fn oracle_compare(args: &OracleArgs) -> Result<u8, Failure> {
    let config = campaign::CampaignConfig {
        instances: args.instances,
        seed: args.seed,
        inject_fault: args.inject_fault,
    };
    let (summary, ok) = campaign::run(&config);
    let mut text = serde_json::to_string_pretty(&summary).expect("summaries serialize");
    text.push('\n');
    write(args.out.as_deref(), &text)?;
    Ok(if ok { OK } else { FAILED })
}

fn verify(args: &VerifyArgs) -> Result<u8, Failure> {
    let verification = verify_report_text(&read(&args.report)?)?;
    let mut text = serde_json::to_string_pretty(&verification).expect("verification reports serialize");
    text.push('\n');
    write(args.out.as_deref(), &text)?;
    Ok(if verification.passed() { OK } else { FAILED })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::SsufRound(args) => ssuf_round(args),
        Command::RingRound(args) => ring_round(args),
        Command::Generate(args) => generate(args),
        Command::OracleCompare(args) => oracle_compare(args),
        Command::Verify(args) => verify(args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(failure) => failure.emit(),
    }
}
