use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use shellroute::experiments::{route, with_jobs, Campaign};
use shellroute::{
    build_routing_data, generate_gsl_trace, load_gsl_trace, presets, summarize, Error,
    ScenarioConfig, ShellPair, Strategy, Weights,
};

/// Inter-shell LEO routing: GSL traces, single solves and experiment campaigns.
#[derive(Parser)]
#[command(name = "shellroute", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a GSL trace CSV from a scenario config or bundled preset.
    GenTrace {
        #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
        config: Option<PathBuf>,
        #[arg(long)]
        preset: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Route one satellite pair over a trace.
    Solve {
        #[arg(long)]
        trace: PathBuf,
        /// Source satellite index in shell A.
        #[arg(long)]
        src: usize,
        /// Destination satellite index in shell B.
        #[arg(long)]
        dst: usize,
        /// dp-irc, min-hop or adaptive.
        #[arg(long, default_value = "dp-irc")]
        strategy: Strategy,
        /// Hop-count weight; the switching weight is 1 - alpha.
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        #[arg(long, default_value_t = 0.6)]
        similarity: f64,
        /// Scenario config supplying the shell geometry of the trace.
        #[arg(long, conflicts_with = "shells")]
        scenario: Option<PathBuf>,
        /// Preset supplying the shell geometry of the trace.
        #[arg(long, default_value = "starlink_oneweb")]
        shells: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a multi-pair, multi-strategy campaign.
    Campaign {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
        /// Worker threads (default: all cores).
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Write a bundled preset as an editable scenario config.
    ExportPreset {
        #[arg(long)]
        name: String,
        #[arg(long)]
        out: PathBuf,
    },
}

const EXIT_CONFIG: u8 = 1;
const EXIT_UNROUTABLE: u8 = 2;
const EXIT_TRACE: u8 = 3;

fn exit_code(e: &Error) -> u8 {
    match e.root() {
        Error::UnroutableSlot { .. } => EXIT_UNROUTABLE,
        Error::TraceParse { .. } | Error::DuplicateEntry { .. } => EXIT_TRACE,
        _ => EXIT_CONFIG,
    }
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(exit_code(e))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_CONFIG)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match cli.command {
        Command::GenTrace {
            config,
            preset,
            out,
        } => gen_trace(config.as_deref(), preset.as_deref(), &out),
        Command::Solve {
            trace,
            src,
            dst,
            strategy,
            alpha,
            similarity,
            scenario,
            shells,
            out,
        } => solve(SolveArgs {
            trace,
            src,
            dst,
            strategy,
            alpha,
            similarity,
            scenario,
            shells,
            out,
        }),
        Command::Campaign {
            config,
            out_dir,
            jobs,
        } => campaign(&config, &out_dir, jobs),
        Command::ExportPreset { name, out } => export_preset(&name, &out),
    }
}

fn gen_trace(config: Option<&Path>, preset: Option<&str>, out: &Path) -> ExitCode {
    let cfg = match (config, preset) {
        (Some(path), _) => ScenarioConfig::from_path(path),
        (None, Some(name)) => presets::preset(name),
        (None, None) => unreachable!("clap requires one of --config/--preset"),
    };
    let trace = match cfg.and_then(|c| generate_gsl_trace(&c)) {
        Ok(t) => t,
        Err(e) => return fail(&e),
    };
    if let Err(e) = trace.write_csv(out) {
        return fail(&e);
    }
    let cov = trace.coverage();
    let rows = trace.to_csv_string().lines().count() - 1;
    println!(
        "slots={} ground_stations={} rows={} linked_min={} linked_max={} linked_mean={:.2}",
        trace.n_slots(),
        trace.gs_ids().len(),
        rows,
        cov.iter().min().unwrap(),
        cov.iter().max().unwrap(),
        cov.iter().sum::<usize>() as f64 / cov.len() as f64,
    );
    ExitCode::SUCCESS
}

struct SolveArgs {
    trace: PathBuf,
    src: usize,
    dst: usize,
    strategy: Strategy,
    alpha: f64,
    similarity: f64,
    scenario: Option<PathBuf>,
    shells: String,
    out: Option<PathBuf>,
}

fn solve(a: SolveArgs) -> ExitCode {
    let weights = match Weights::from_alpha(a.alpha) {
        Ok(w) => w,
        Err(e) => return fail(&e),
    };
    if !(0.0..=1.0).contains(&a.similarity) {
        eprintln!("error: --similarity must lie in [0, 1]");
        return ExitCode::from(EXIT_CONFIG);
    }
    let shells: ShellPair = match &a.scenario {
        Some(p) => match ScenarioConfig::from_path(p) {
            Ok(c) => c.shells(),
            Err(e) => return fail(&e),
        },
        None => match presets::preset(&a.shells) {
            Ok(c) => c.shells(),
            Err(e) => return fail(&e),
        },
    };
    let trace = match load_gsl_trace(&a.trace, &shells) {
        Ok(t) => t,
        // anything wrong with the trace file itself is a trace error
        Err(e @ (Error::Io(_) | Error::IndexOutOfRange { .. })) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_TRACE);
        }
        Err(e) => return fail(&e),
    };
    let solution = build_routing_data(a.src, a.dst, &trace, &shells)
        .and_then(|data| route(a.strategy, &data, &weights, a.similarity));
    let solution = match solution {
        Ok(s) => s,
        Err(e) => return fail(&e),
    };
    let m = summarize(&solution);

    if let Some(out) = &a.out {
        let mut csv = String::from("slot,gs_selected,hops,delta_isl,switching_rate,cumulative_irc\n");
        for t in 0..m.per_slot_hops.len() {
            let rate = m.per_slot_switching_rate[t]
                .map(|r| format!("{r:.6}"))
                .unwrap_or_default();
            let _ = writeln!(
                csv,
                "{t},{},{},{},{rate},{:.6}",
                solution.gs_sequence[t], m.per_slot_hops[t], m.per_slot_delta_isl[t], m.per_slot_cumulative_irc[t],
            );
        }
        if let Err(e) = fs::write(out, csv) {
            return fail(&Error::Io(e));
        }
    }

    let rate = m
        .mean_switching_rate()
        .map(|r| format!("{r:.6}"))
        .unwrap_or_else(|| "undefined".into());
    println!(
        "strategy={} slots={} mean_switching_rate={rate} cumulative_distance={} cumulative_irc={:.6} gs_sequence={}",
        solution.strategy,
        solution.n_slots(),
        m.cumulative_distance,
        m.cumulative_irc,
        solution
            .gs_sequence
            .iter()
            .map(|g| g.to_string())
            .collect::<Vec<_>>()
            .join(" "),
    );
    ExitCode::SUCCESS
}

fn campaign(config: &Path, out_dir: &Path, jobs: Option<usize>) -> ExitCode {
    let c = match Campaign::from_path(config) {
        Ok(c) => c,
        Err(e) => return fail(&e),
    };
    let (report, failure) = match with_jobs(jobs, || shellroute::experiments::run_campaign_partial(&c)) {
        Ok(r) => r,
        Err(e) => return fail(&e),
    };
    if let Err(e) = report.write_to_dir(out_dir) {
        return fail(&e);
    }
    for a in &report.aggregates {
        println!(
            "strategy={} gs_count={} mean_switching_rate={} mean_cumulative_distance={:.6} gs_load_variance={:.6}",
            a.strategy,
            a.gs_count,
            a.mean_switching_rate
                .map(|r| format!("{r:.6}"))
                .unwrap_or_else(|| "undefined".into()),
            a.mean_cumulative_distance,
            a.gs_load_variance,
        );
    }
    match failure {
        None => ExitCode::SUCCESS,
        Some(e) => fail(&e),
    }
}

fn export_preset(name: &str, out: &Path) -> ExitCode {
    let cfg = match presets::preset(name) {
        Ok(c) => c,
        Err(e) => return fail(&e),
    };
    match fs::write(out, cfg.to_toml()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(&Error::Io(e)),
    }
}
