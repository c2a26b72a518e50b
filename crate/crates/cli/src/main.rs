//! `qsa`: run auction scenarios, attack sweeps, the worked three-party
//! example and the qubit-efficiency table.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use qsa_core::harness::{
    render_report, run_trials_seeded, sweep_decoys, table2, EfficiencyRow, Report, ReportFormat,
    RunStatistics, SweepPoint,
};
use qsa_core::protocol::{run_auction_seeded, Bid, Verdict};
use qsa_core::{load_scenario, AttackDescriptor, BasisPolicy, Channel, Scenario, ScenarioError};

/// Scenario could not be loaded or is invalid.
const EXIT_SCENARIO: u8 = 2;
/// A single run ended without a completed auction.
const EXIT_NOT_COMPLETED: u8 = 3;

#[derive(Parser)]
#[command(name = "qsa", version, about = "Quantum sealed-bid auction simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario once (printing its transcript) or as a batch of trials.
    Run(RunArgs),
    /// Run a scenario under an attack, optionally sweeping the decoy count.
    Attack(AttackArgs),
    /// Run the built-in three-party example and print its transcript.
    Example3 {
        /// Include raw amplitudes in quantum payloads.
        #[arg(long)]
        debug: bool,
    },
    /// Print the qubit consumption comparison.
    Table2 {
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value_t = TableFormat::Text)]
        format: TableFormat,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

impl From<Format> for ReportFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Json => ReportFormat::Json,
            Format::Csv => ReportFormat::Csv,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum TableFormat {
    Text,
    Json,
    Csv,
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    scenario: PathBuf,
    /// Overrides the scenario's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Report destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: Common,
    /// Number of independent trials; absent means one traced run.
    #[arg(long)]
    trials: Option<u64>,
    /// Also write the JSONL transcript of a single run here.
    #[arg(long)]
    transcript: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum AttackKind {
    PassThrough,
    Cnot,
    InterceptResend,
    FalseAnnouncement,
    Collusion,
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    FixedZ,
    FixedX,
    UniformXy,
    UniformZxy,
}

impl From<PolicyArg> for BasisPolicy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::FixedZ => BasisPolicy::FixedZ,
            PolicyArg::FixedX => BasisPolicy::FixedX,
            PolicyArg::UniformXy => BasisPolicy::UniformXy,
            PolicyArg::UniformZxy => BasisPolicy::UniformZxy,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ChannelArg {
    S2,
    S5,
    S6,
}

impl From<ChannelArg> for Channel {
    fn from(c: ChannelArg) -> Self {
        match c {
            ChannelArg::S2 => Channel::S2,
            ChannelArg::S5 => Channel::S5,
            ChannelArg::S6 => Channel::S6,
        }
    }
}

#[derive(Args)]
struct AttackArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long = "type", value_enum)]
    kind: AttackKind,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    /// Decoy counts per carrier sequence, e.g. 1,2,4,8,16.
    #[arg(long, value_delimiter = ',')]
    sweep_decoys: Vec<usize>,
    #[arg(long, value_enum, default_value_t = PolicyArg::UniformXy)]
    basis_policy: PolicyArg,
    /// Bidders whose traffic the tap sees.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    targets: Vec<usize>,
    #[arg(long, value_enum, default_value_t = ChannelArg::S2)]
    channel: ChannelArg,
    /// Bidder the auctioneer falsely declares the winner.
    #[arg(long, default_value_t = 1)]
    winner: usize,
    #[arg(long)]
    fabricated_bid: Option<Bid>,
    #[arg(long, value_delimiter = ',', default_value = "2")]
    colluders: Vec<usize>,
}

impl AttackArgs {
    fn descriptor(&self, scenario: &Scenario) -> AttackDescriptor {
        let targets = self.targets.clone();
        let channel = self.channel.into();
        match self.kind {
            AttackKind::PassThrough => AttackDescriptor::PassThrough { targets, channel },
            AttackKind::Cnot => AttackDescriptor::Cnot { targets, channel },
            AttackKind::InterceptResend => AttackDescriptor::InterceptResend {
                basis_policy: self.basis_policy.into(),
                targets,
                channel,
            },
            AttackKind::FalseAnnouncement => AttackDescriptor::FalseAnnouncement {
                winner: self.winner,
                fabricated_bid: self.fabricated_bid.clone().unwrap_or_else(|| {
                    Bid::new(vec![true; scenario.bid_length]).expect("bid_length is positive")
                }),
            },
            AttackKind::Collusion => AttackDescriptor::Collusion {
                colluders: self.colluders.clone(),
            },
        }
    }
}

fn load(path: &Path) -> Result<Scenario, ScenarioError> {
    let scenario = load_scenario(path)?;
    scenario.validate()?;
    Ok(scenario)
}

fn write_out(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(args: RunArgs, scenario: Scenario) -> Result<ExitCode> {
    let seed = args.common.seed.unwrap_or(scenario.seed);
    let format = args.common.format.into();
    match args.trials {
        Some(trials) => {
            let stats = run_trials_seeded(&scenario, trials, seed)?;
            let report = Report::new(&scenario, seed, stats);
            write_out(args.common.out.as_deref(), &render_report(&report, format)?)?;
            Ok(ExitCode::SUCCESS)
        }
        None => {
            let (outcome, transcript) = run_auction_seeded(&scenario, seed)?;
            let jsonl = transcript.to_jsonl();
            if let Some(path) = &args.transcript {
                fs::write(path, &jsonl)
                    .with_context(|| format!("cannot write {}", path.display()))?;
            }
            match &args.common.out {
                Some(path) => {
                    let stats = RunStatistics::from_run(&outcome, &transcript);
                    let report = Report::new(&scenario, seed, stats);
                    write_out(Some(path), &render_report(&report, format)?)?;
                }
                None => print!("{jsonl}"),
            }
            Ok(verdict_code(outcome.verdict))
        }
    }
}

fn verdict_code(v: Verdict) -> ExitCode {
    if v == Verdict::Completed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_NOT_COMPLETED)
    }
}

fn sweep_csv(points: &[SweepPoint]) -> String {
    let mut s = String::from("decoys,detection,count,trials,ci99_low,ci99_high,analytic,sigmas\n");
    for p in points {
        let r = &p.detection;
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            p.decoys, r.value, r.count, r.trials, r.ci99_low, r.ci99_high, p.analytic, p.sigmas
        );
    }
    s
}

fn attack(args: AttackArgs, mut scenario: Scenario) -> Result<ExitCode> {
    let seed = args.common.seed.unwrap_or(scenario.seed);
    let descriptor = args.descriptor(&scenario);
    let text = if args.sweep_decoys.is_empty() {
        scenario.attack = Some(descriptor);
        scenario.validate()?;
        let stats = run_trials_seeded(&scenario, args.trials, seed)?;
        render_report(
            &Report::new(&scenario, seed, stats),
            args.common.format.into(),
        )?
    } else {
        let mut probe = scenario.clone();
        probe.attack = Some(descriptor.clone());
        probe.validate()?;
        let points = sweep_decoys(
            &scenario,
            &descriptor,
            &args.sweep_decoys,
            args.trials,
            seed,
        )?;
        match args.common.format {
            Format::Json => {
                let mut t = serde_json::to_string_pretty(&points)?;
                t.push('\n');
                t
            }
            Format::Csv => sweep_csv(&points),
        }
    };
    write_out(args.common.out.as_deref(), &text)?;
    Ok(ExitCode::SUCCESS)
}

fn table_text(rows: &[EfficiencyRow]) -> String {
    let mut s = format!(
        "{:<14} {:>7} {:>6} {:>6}  {}\n",
        "protocol", "qubits", "cbits", "xi", "overhead"
    );
    for r in rows {
        let overhead = r
            .overhead
            .iter()
            .map(|o| format!("{} {} ({}/cbit)", o.item, o.qubits, o.per_cbit))
            .collect::<Vec<_>>()
            .join("; ");
        let _ = writeln!(
            s,
            "{:<14} {:>7} {:>6} {:>6.1}  {}",
            r.family.name(),
            r.qubits,
            r.cbits,
            r.xi,
            if overhead.is_empty() {
                "-".to_string()
            } else {
                overhead
            }
        );
    }
    s
}

fn table_csv(rows: &[EfficiencyRow]) -> String {
    let mut s = String::from(
        "protocol,qubits,cbits,xi,measured,decoy_qubits_per_cbit,epr_qubits_per_cbit\n",
    );
    for r in rows {
        let per = |i: usize| {
            r.overhead
                .get(i)
                .map(|o| o.per_cbit.to_string())
                .unwrap_or_default()
        };
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            r.family.name(),
            r.qubits,
            r.cbits,
            r.xi,
            r.measured,
            per(0),
            per(1)
        );
    }
    s
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Run(args) => {
            let scenario = match load(&args.common.scenario) {
                Ok(s) => s,
                Err(e) => return Ok(scenario_failure(&e)),
            };
            run(args, scenario)
        }
        Command::Attack(args) => {
            let scenario = match load(&args.common.scenario) {
                Ok(s) => s,
                Err(e) => return Ok(scenario_failure(&e)),
            };
            attack(args, scenario)
        }
        Command::Example3 { debug } => {
            let mut scenario = Scenario::example3();
            scenario.debug = debug;
            let (outcome, transcript) = run_auction_seeded(&scenario, scenario.seed)?;
            print!("{}", transcript.to_jsonl());
            Ok(verdict_code(outcome.verdict))
        }
        Command::Table2 {
            trials,
            seed,
            format,
        } => {
            let mut scenario = Scenario::example3();
            scenario.carriers = None;
            scenario.permutations = None;
            let seed = seed.unwrap_or(scenario.seed);
            let rows = table2(&scenario, trials, seed)?;
            let text = match format {
                TableFormat::Text => table_text(&rows),
                TableFormat::Json => serde_json::to_string_pretty(&rows)? + "\n",
                TableFormat::Csv => table_csv(&rows),
            };
            print!("{text}");
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn scenario_failure(e: &ScenarioError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(EXIT_SCENARIO)
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<ScenarioError>().is_some() {
                ExitCode::from(EXIT_SCENARIO)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
