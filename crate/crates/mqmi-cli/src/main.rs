//! Command-line front end: state specs in, measure values, tables and
//! verification reports out. Data goes to stdout, diagnostics to stderr.
//! Exit codes: 0 success (and no property failures for `verify`),
//! 1 property failures, 2 parse/usage errors, 3 dimension or partition
//! errors.

mod lang;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use mqmi::error::Error;
use mqmi::measures::{
    DualForm, Evaluator, MeasureId, MeasureReport, Partition, TotalForm, WeightVector,
};
use mqmi::states::StateSpec;
use mqmi::verify::{run_property_suite, scan_conjectures, SampleMix, SuiteConfig, ViolationReport};
use mqmi::SubsystemSet;

use lang::{
    parse_channel, parse_partition, parse_state_spec, parse_subsystems, render_partition,
    render_subsystems,
};

#[derive(Parser)]
#[command(
    name = "mqmi",
    version,
    about = "Multiparty entropic correlation measures on density matrices"
)]
struct Cli {
    /// Output format for data on stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Numerical tolerance for verification suites; falls back to the
    /// MQMI_DEFAULT_TOL environment variable, then 1e-9.
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Master seed for commands that sample randomness.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one measure on one state.
    Compute(ComputeArgs),
    /// Tabulate measure profiles for a list of states or the built-in
    /// benchmark family.
    Table(TableArgs),
    /// Seven-region breakdown of a three-block cut.
    Regions(RegionsArgs),
    /// Run the property suite over seeded random states.
    Verify(SuiteArgs),
    /// Scan the conjectured claims; violations are findings, exit is 0.
    Scan(SuiteArgs),
    /// Information deviation |Q(Φ(ρ)) − Q(ρ)| under a channel.
    Deviate(DeviateArgs),
}

#[derive(Args)]
struct MeasureArgs {
    /// Measure id: M, T, S, C, combined, gcmi, or profile.
    #[arg(long)]
    measure: String,

    /// Index k for --measure M.
    #[arg(long)]
    k: Option<usize>,

    /// Comma-separated convex weights for --measure combined.
    #[arg(long)]
    weights: Option<String>,

    /// Conditioning parties for --measure gcmi, e.g. "3" or "3,4".
    #[arg(long)]
    cond: Option<String>,

    /// Equivalent form for T (entropic|relative|chain|regions) or
    /// S (entropic|chain|regions|complement).
    #[arg(long)]
    form: Option<String>,
}

#[derive(Args)]
struct ComputeArgs {
    /// State spec: kind:key=val,... or @file.json.
    #[arg(long)]
    state: String,

    /// Block partition like "1,2;3"; defaults to singletons.
    #[arg(long)]
    blocks: Option<String>,

    #[command(flatten)]
    measure: MeasureArgs,
}

#[derive(Args)]
struct TableArgs {
    /// Tabulate the built-in benchmark family.
    #[arg(long = "builtin-table1", default_value_t = false)]
    builtin: bool,

    /// Probability parameter for the generalized GHZ rows.
    #[arg(long, default_value_t = 0.5)]
    p: f64,

    /// States to tabulate (repeatable) when not using the built-in list.
    #[arg(long = "state")]
    states: Vec<String>,
}

#[derive(Args)]
struct RegionsArgs {
    #[arg(long)]
    state: String,

    /// Three blocks like "1;2;3"; defaults to singletons of a 3-party
    /// state.
    #[arg(long)]
    blocks: Option<String>,
}

#[derive(Args)]
struct SuiteArgs {
    /// Number of parties of the sampled states.
    #[arg(long, default_value_t = 3)]
    n: usize,

    /// Dimension of each party.
    #[arg(long, default_value_t = 2)]
    d: usize,

    /// Number of sampled states.
    #[arg(long, default_value_t = 100)]
    samples: usize,

    /// Comma-separated check names; defaults to all applicable.
    #[arg(long)]
    properties: Option<String>,

    /// Sampling mix of trial states.
    #[arg(long, value_enum, default_value_t = MixArg::Balanced)]
    mix: MixArg,

    /// Number of random-channel monotonicity events.
    #[arg(long)]
    channel_samples: Option<usize>,

    /// Number of measure-and-broadcast events.
    #[arg(long)]
    broadcast_samples: Option<usize>,

    /// Kraus rank of the sampled channels.
    #[arg(long, default_value_t = 2)]
    kraus_rank: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MixArg {
    Balanced,
    Pure,
    Mixed,
}

#[derive(Args)]
struct DeviateArgs {
    #[arg(long)]
    state: String,

    /// Channel spec: depolarize:party=1,p=1 | random:party=1,rank=2,seed=5
    /// | identity:party=1 | @file.json.
    #[arg(long)]
    channel: String,

    #[arg(long)]
    blocks: Option<String>,

    #[command(flatten)]
    measure: MeasureArgs,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let tol = cli.tol.unwrap_or_else(|| {
        std::env::var("MQMI_DEFAULT_TOL")
            .ok()
            .and_then(|v| v.parse().ok())
            .unwrap_or(1e-9)
    });
    match run(&cli, tol) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::InvalidParams(_) | Error::UnknownMeasure(_) | Error::Json(_) | Error::Io(_) => 2,
        Error::DimensionMismatch(_)
        | Error::InvalidState(_)
        | Error::InvalidSubsystems(_)
        | Error::InvalidPartition(_)
        | Error::InvalidChannel(_) => 3,
    }
}

fn run(cli: &Cli, tol: f64) -> mqmi::Result<ExitCode> {
    match &cli.command {
        Command::Compute(args) => cmd_compute(cli, args),
        Command::Table(args) => cmd_table(cli, args),
        Command::Regions(args) => cmd_regions(cli, args),
        Command::Verify(args) => cmd_suite(cli, args, tol, false),
        Command::Scan(args) => cmd_suite(cli, args, tol, true),
        Command::Deviate(args) => cmd_deviate(cli, args),
    }
}

/// Renders a float with six significant digits, the precision the
/// benchmark table is printed at. Magnitudes below 1e-6 are display noise
/// for these order-one quantities and print as 0; JSON output carries
/// full precision.
fn sig6(x: f64) -> String {
    if x.abs() < 1e-6 {
        return "0".into();
    }
    if x.abs() < 1e-4 {
        return format!("{x:.5e}");
    }
    let mag = x.abs().log10().floor() as i32;
    let decimals = (5 - mag).max(0) as usize;
    let s = format!("{:.*}", decimals, x);
    let trimmed = s.trim_end_matches('0').trim_end_matches('.');
    if trimmed.is_empty() || trimmed == "-" {
        "0".into()
    } else {
        trimmed.to_string()
    }
}

fn parse_measure_id(args: &MeasureArgs, n_blocks: usize) -> mqmi::Result<MeasureId> {
    let lower = args.measure.to_ascii_lowercase();
    match lower.as_str() {
        "m" | "m_k" | "mk" => {
            let k = args
                .k
                .ok_or_else(|| Error::InvalidParams("--measure M needs --k".into()))?;
            Ok(MeasureId::MutualK { k })
        }
        "t" | "total" => Ok(MeasureId::Total {
            form: parse_total_form(args.form.as_deref())?,
        }),
        "s" | "dual" => Ok(MeasureId::Dual {
            form: parse_dual_form(args.form.as_deref())?,
        }),
        "c" | "common" => Ok(MeasureId::Common),
        "combined" | "mw" => {
            let text = args
                .weights
                .as_ref()
                .ok_or_else(|| Error::InvalidParams("--measure combined needs --weights".into()))?;
            let weights = text
                .split(',')
                .map(|w| {
                    w.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::InvalidParams(format!("bad weight `{w}`")))
                })
                .collect::<mqmi::Result<Vec<f64>>>()?;
            WeightVector::new(weights.clone())?;
            if weights.len() != n_blocks {
                return Err(Error::InvalidParams(format!(
                    "{} weights for {} blocks",
                    weights.len(),
                    n_blocks
                )));
            }
            Ok(MeasureId::Combined { weights })
        }
        "gcmi" | "i" => {
            let cond = match &args.cond {
                Some(text) => parse_subsystems(text)?,
                None => SubsystemSet::empty(),
            };
            Ok(MeasureId::Gcmi { cond })
        }
        other => Err(Error::UnknownMeasure(other.into())),
    }
}

fn parse_total_form(text: Option<&str>) -> mqmi::Result<TotalForm> {
    match text.unwrap_or("entropic") {
        "entropic" => Ok(TotalForm::Entropic),
        "relative" => Ok(TotalForm::Relative),
        "chain" => Ok(TotalForm::Chain),
        "regions" => Ok(TotalForm::Regions),
        other => Err(Error::InvalidParams(format!("unknown T form `{other}`"))),
    }
}

fn parse_dual_form(text: Option<&str>) -> mqmi::Result<DualForm> {
    match text.unwrap_or("entropic") {
        "entropic" => Ok(DualForm::Entropic),
        "chain" => Ok(DualForm::Chain),
        "regions" => Ok(DualForm::Regions),
        "complement" => Ok(DualForm::Complement),
        other => Err(Error::InvalidParams(format!("unknown S form `{other}`"))),
    }
}

fn partition_for(spec_blocks: &Option<String>, n: usize) -> mqmi::Result<Partition> {
    match spec_blocks {
        Some(text) => parse_partition(text),
        None => Ok(Partition::singletons(n)),
    }
}

/// 1-based JSON rendering of a measure report, with the dense state
/// attached so results are exactly reproducible from the output alone.
fn report_json(report: &MeasureReport, spec: &StateSpec, state: &mqmi::MultipartiteState) -> serde_json::Value {
    json!({
        "measure": report.name,
        "value": report.value,
        "blocks": report.blocks.iter().map(|b| b.iter().map(|i| i + 1).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "conditioning": report.conditioning.iter().map(|i| i + 1).collect::<Vec<_>>(),
        "terms": report.terms.iter().map(|t| json!({
            "parties": t.parties.iter().map(|i| i + 1).collect::<Vec<_>>(),
            "coefficient": t.coefficient,
            "entropy": t.entropy,
        })).collect::<Vec<_>>(),
        "input": spec,
        "state": StateSpec::dense_from_state(state),
    })
}

fn cmd_compute(cli: &Cli, args: &ComputeArgs) -> mqmi::Result<ExitCode> {
    if args.measure.measure.eq_ignore_ascii_case("profile") {
        return cmd_profile(cli, args);
    }
    let spec = parse_state_spec(&args.state)?;
    let state = spec.build()?;
    let parts = partition_for(&args.blocks, state.n_parties())?;
    let id = parse_measure_id(&args.measure, parts.len())?;
    let ev = Evaluator::new(&state)?;
    let report = ev.report(&id, &parts)?;
    match cli.format {
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(&report_json(&report, &spec, &state))?
        ),
        Format::Csv => {
            println!("measure,blocks,cond,value");
            println!(
                "{},{},{},{}",
                report.name,
                render_partition(&parts).replace(';', "|"),
                args.measure.cond.as_deref().unwrap_or(""),
                sig6(report.value)
            );
        }
        Format::Text => {
            println!("{} = {}", report.name, sig6(report.value));
            println!("  blocks: {}", render_partition(&parts));
            if !report.conditioning.is_empty() {
                let cond = SubsystemSet::new(report.conditioning.iter().copied());
                println!("  conditioning: {}", render_subsystems(&cond));
            }
            for t in &report.terms {
                let set = SubsystemSet::new(t.parties.iter().copied());
                println!(
                    "  {:+.1} * S({}) = {:+.6}",
                    t.coefficient,
                    render_subsystems(&set),
                    t.entropy
                );
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_profile(cli: &Cli, args: &ComputeArgs) -> mqmi::Result<ExitCode> {
    let spec = parse_state_spec(&args.state)?;
    let state = spec.build()?;
    let parts = partition_for(&args.blocks, state.n_parties())?;
    let ev = Evaluator::new(&state)?;
    let profile = ev.mqmi_profile(&parts)?;
    let common = ev.common_information(&parts)?;
    match cli.format {
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(&json!({
                "input": spec,
                "blocks": parts.blocks().iter().map(|b| b.iter().map(|i| i + 1).collect::<Vec<_>>()).collect::<Vec<_>>(),
                "profile": profile,
                "common": common,
            }))?
        ),
        Format::Csv => {
            println!("k,value");
            for (i, v) in profile.iter().enumerate() {
                println!("{},{}", i + 1, sig6(*v));
            }
            println!("C,{}", sig6(common));
        }
        Format::Text => {
            for (i, v) in profile.iter().enumerate() {
                println!("M_{} = {}", i + 1, sig6(*v));
            }
            println!("C = {}", sig6(common));
        }
    }
    Ok(ExitCode::SUCCESS)
}

struct TableRow {
    label: String,
    n: usize,
    profile: Vec<f64>,
    common: f64,
}

fn table_row(label: &str, spec: &StateSpec) -> mqmi::Result<TableRow> {
    let state = spec.build()?;
    let n = state.n_parties();
    let ev = Evaluator::new(&state)?;
    let parts = Partition::singletons(n);
    Ok(TableRow {
        label: label.into(),
        n,
        profile: ev.mqmi_profile(&parts)?,
        common: ev.common_information(&parts)?,
    })
}

fn builtin_rows(p: f64) -> Vec<(String, StateSpec)> {
    let mut rows = Vec::new();
    for n in 2..=5 {
        rows.push((format!("gGHZ_{n}"), StateSpec::ggz(n, p, 0.0)));
    }
    rows.insert(2, ("D_3^1".into(), StateSpec::dicke(3, 1)));
    rows.insert(3, ("psi_as".into(), StateSpec::antisym3()));
    rows.insert(5, ("D_4^1".into(), StateSpec::dicke(4, 1)));
    rows.insert(6, ("D_4^2".into(), StateSpec::dicke(4, 2)));
    rows.insert(7, ("C_4".into(), StateSpec::cluster4()));
    rows.insert(8, ("HS_4".into(), StateSpec::hs4()));
    rows.push(("D_5^1".into(), StateSpec::dicke(5, 1)));
    rows.push(("D_5^2".into(), StateSpec::dicke(5, 2)));
    rows
}

fn cmd_table(cli: &Cli, args: &TableArgs) -> mqmi::Result<ExitCode> {
    let sources: Vec<(String, StateSpec)> = if args.builtin {
        if !(0.0..=1.0).contains(&args.p) {
            return Err(Error::InvalidParams(format!("p = {} outside [0, 1]", args.p)));
        }
        builtin_rows(args.p)
    } else {
        if args.states.is_empty() {
            return Err(Error::InvalidParams(
                "table needs --builtin-table1 or at least one --state".into(),
            ));
        }
        args.states
            .iter()
            .map(|s| Ok((s.clone(), parse_state_spec(s)?)))
            .collect::<mqmi::Result<Vec<_>>>()?
    };
    let rows = sources
        .iter()
        .map(|(label, spec)| table_row(label, spec))
        .collect::<mqmi::Result<Vec<_>>>()?;
    let max_k = 4usize;
    match cli.format {
        Format::Json => {
            let items: Vec<serde_json::Value> = rows
                .iter()
                .map(|r| {
                    let cells: Vec<serde_json::Value> = (1..=max_k)
                        .map(|k| {
                            if k <= r.n {
                                json!(r.profile[k - 1])
                            } else {
                                serde_json::Value::Null
                            }
                        })
                        .collect();
                    json!({"state": r.label, "m": cells, "common": r.common})
                })
                .collect();
            println!("{}", serde_json::to_string_pretty(&items)?);
        }
        Format::Csv => {
            println!("state,M1,M2,M3,M4,C");
            for r in &rows {
                let cells: Vec<String> = (1..=max_k)
                    .map(|k| {
                        if k <= r.n {
                            sig6(r.profile[k - 1])
                        } else {
                            "x".into()
                        }
                    })
                    .collect();
                println!("{},{},{}", r.label, cells.join(","), sig6(r.common));
            }
        }
        Format::Text => {
            println!(
                "{:<10} {:>10} {:>10} {:>10} {:>10} {:>10}",
                "state", "M_1", "M_2", "M_3", "M_4", "C"
            );
            for r in &rows {
                let cells: Vec<String> = (1..=max_k)
                    .map(|k| {
                        if k <= r.n {
                            sig6(r.profile[k - 1])
                        } else {
                            "x".into()
                        }
                    })
                    .collect();
                println!(
                    "{:<10} {:>10} {:>10} {:>10} {:>10} {:>10}",
                    r.label,
                    cells[0],
                    cells[1],
                    cells[2],
                    cells[3],
                    sig6(r.common)
                );
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_regions(cli: &Cli, args: &RegionsArgs) -> mqmi::Result<ExitCode> {
    let spec = parse_state_spec(&args.state)?;
    let state = spec.build()?;
    let parts = partition_for(&args.blocks, state.n_parties())?;
    let regions = Evaluator::new(&state)?.tripartite_regions(&parts)?;
    match cli.format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&regions)?),
        Format::Csv => {
            println!("region,value");
            for (name, v) in [
                ("a", regions.a),
                ("b", regions.b),
                ("c", regions.c),
                ("ab", regions.ab),
                ("ac", regions.ac),
                ("bc", regions.bc),
                ("abc", regions.abc),
                ("T_3", regions.total),
                ("S_3", regions.dual),
            ] {
                println!("{name},{}", sig6(v));
            }
        }
        Format::Text => {
            println!(
                "a = {}  b = {}  c = {}",
                sig6(regions.a),
                sig6(regions.b),
                sig6(regions.c)
            );
            println!(
                "ab = {}  ac = {}  bc = {}  abc = {}",
                sig6(regions.ab),
                sig6(regions.ac),
                sig6(regions.bc),
                sig6(regions.abc)
            );
            println!("T_3 = {}  S_3 = {}", sig6(regions.total), sig6(regions.dual));
            println!(
                "decomposition residuals: T {:.2e}, S {:.2e}",
                regions.total_regions_residual, regions.dual_regions_residual
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn suite_config(cli: &Cli, args: &SuiteArgs, tol: f64) -> SuiteConfig {
    let mut config = SuiteConfig::new(args.n, args.samples, cli.seed.unwrap_or(1));
    config.party_dim = args.d;
    config.tol = tol;
    config.mix = match args.mix {
        MixArg::Balanced => SampleMix::Balanced,
        MixArg::Pure => SampleMix::PureOnly,
        MixArg::Mixed => SampleMix::MixedOnly,
    };
    config.kraus_rank = args.kraus_rank;
    if let Some(c) = args.channel_samples {
        config.channel_samples = c;
    }
    if let Some(b) = args.broadcast_samples {
        config.broadcast_samples = b;
    }
    if let Some(props) = &args.properties {
        config.properties = Some(props.split(',').map(|s| s.trim().to_string()).collect());
    }
    config
}

fn print_report(cli: &Cli, report: &ViolationReport) -> mqmi::Result<()> {
    match cli.format {
        Format::Json => println!("{}", serde_json::to_string(report)?),
        Format::Csv => {
            println!("check,trials,failures,worst_residual");
            for c in &report.checks {
                println!("{},{},{},{:e}", c.name, c.trials, c.failures, c.worst_residual);
            }
        }
        Format::Text => print!("{}", report.to_text()),
    }
    Ok(())
}

fn cmd_suite(cli: &Cli, args: &SuiteArgs, tol: f64, scan: bool) -> mqmi::Result<ExitCode> {
    let config = suite_config(cli, args, tol);
    let report = if scan {
        scan_conjectures(&config)?
    } else {
        run_property_suite(&config)?
    };
    print_report(cli, &report)?;
    if scan || report.passed {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(1))
    }
}

fn cmd_deviate(cli: &Cli, args: &DeviateArgs) -> mqmi::Result<ExitCode> {
    let spec = parse_state_spec(&args.state)?;
    let state = spec.build()?;
    let parts = partition_for(&args.blocks, state.n_parties())?;
    let id = parse_measure_id(&args.measure, parts.len())?;
    let recipe = parse_channel(&args.channel)?;
    let channel = recipe.materialize(state.dims())?;
    let value = mqmi::channels::deviation(&state, &channel, &id, &parts)?;
    match cli.format {
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(&json!({
                "measure": id.name(),
                "deviation": value,
                "input": spec,
            }))?
        ),
        Format::Csv => {
            println!("measure,deviation");
            println!("{},{}", id.name(), sig6(value));
        }
        Format::Text => println!("deviation = {}", sig6(value)),
    }
    Ok(ExitCode::SUCCESS)
}
