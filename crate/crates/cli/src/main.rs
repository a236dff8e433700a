//! `touchboard`: trace replay, VGA timing report and evaluation statistics.

mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use touchboard_core::device::{
    check_order, replay_trace, DeviceConfig, DeviceError, FrameLog, FrameLogEntry,
};
use touchboard_core::evalstats::{
    difficulty_means, solve_lambda, subgroup_resample, survey_stats, task_means, DiscoveryMatrix,
    DiscoveryModel, EvalError, SurveyTable, TaskMatrix,
};
use touchboard_core::trace::parse_trace;
use touchboard_core::video_out::{export_ppm, TimingReport, VgaTimingParams};
use touchboard_core::{fixtures, Execution};

use crate::report::Format;

const DEFAULT_SEED: u64 = 0x7b0a_2d5e;

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Order(String),
    #[error("{0}")]
    Invariant(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Parse(_) => 2,
            CliError::Order(_) => 3,
            CliError::Invariant(_) => 4,
        }
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::Csv(_) | EvalError::RaggedRow { .. } | EvalError::EmptyMatrix => {
                CliError::Parse(e.to_string())
            }
            other => CliError::Invariant(other.to_string()),
        }
    }
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

#[derive(Debug, Parser)]
#[command(
    name = "touchboard",
    version,
    about = "Touchscreen drawing board simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Replay a trace file and write the final frame, frame log and summary.
    Replay(ReplayArgs),
    /// Step the VGA timing generator and report tick and sync counts.
    VgaReport {
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        frames: u64,
    },
    /// Evaluation statistics.
    Evalstats {
        #[command(subcommand)]
        kind: EvalKind,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SnapshotCadence {
    End,
    Events,
}

#[derive(Debug, Args)]
struct ReplayArgs {
    trace: PathBuf,
    #[arg(long, short)]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = SnapshotCadence::End)]
    snapshot_every: SnapshotCadence,
    #[arg(long, default_value_t = touchboard_core::device::DEFAULT_DELAY_DEPTH)]
    delay_depth: u64,
}

#[derive(Debug, Args)]
struct TableInput {
    /// Use the bundled evaluation tables.
    #[arg(long, conflicts_with = "input")]
    fixtures: bool,
    #[arg(long, required_unless_present = "fixtures")]
    input: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Debug, Subcommand)]
enum EvalKind {
    /// Task completion time means.
    Times(TableInput),
    /// Task difficulty means (1..5 scale).
    Difficulty(TableInput),
    /// Three-point survey frequencies, percentages, means and band.
    Survey {
        #[command(flatten)]
        input: TableInput,
        /// Restrict bundled tables to one factor.
        #[arg(long, requires = "fixtures", value_parser = clap::builder::PossibleValuesParser::new(fixtures::SURVEY_FACTORS))]
        factor: Option<String>,
    },
    /// Problem-discovery curve: evaluate at λ, or solve λ from a target.
    Discovery {
        #[arg(long, conflicts_with = "target", required_unless_present = "target")]
        lambda: Option<f64>,
        #[arg(long)]
        target: Option<f64>,
        #[arg(long)]
        n: u32,
    },
    /// Subgroup resampling over a user × problem discovery matrix.
    Resample {
        #[arg(
            long,
            conflicts_with = "synthetic",
            required_unless_present = "synthetic"
        )]
        input: Option<PathBuf>,
        /// Generate a random matrix instead of reading one.
        #[arg(long)]
        synthetic: bool,
        #[arg(long, default_value_t = 60)]
        users: usize,
        #[arg(long, default_value_t = 40)]
        problems: usize,
        #[arg(long, default_value_t = 0.3)]
        p_hit: f64,
        /// Group sizes to sample.
        #[arg(long, value_delimiter = ',', default_value = "5,10,15,20,30,40,50")]
        k: Vec<usize>,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, env = "TOUCHBOARD_SEED", default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

fn read_input(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| io_err(path, e))
}

fn replay(args: &ReplayArgs) -> Result<String, CliError> {
    let text = read_input(&args.trace)?;
    let events = parse_trace(&text)
        .map_err(|e| CliError::Parse(format!("{}: {e}", args.trace.display())))?;
    check_order(&events).map_err(|e| CliError::Order(e.to_string()))?;
    let config = DeviceConfig {
        delay_depth: args.delay_depth,
        ..Default::default()
    };
    if args.delay_depth == 0 {
        return Err(CliError::Invariant(DeviceError::ZeroDelay.to_string()));
    }

    fs::create_dir_all(&args.out).map_err(|e| io_err(&args.out, e))?;
    let mut log = FrameLog::default();
    let mut write_err = None;
    let state = replay_trace(&events, config, |i, st| {
        log.entries.push(FrameLogEntry {
            event_index: i,
            tick: events[i].at,
            fb_hash: st.framebuffer().content_hash(),
            digits: *st.digits(),
        });
        if args.snapshot_every == SnapshotCadence::Events && write_err.is_none() {
            let p = args.out.join(format!("event_{i:05}.ppm"));
            if let Err(e) = fs::write(&p, export_ppm(st.framebuffer())) {
                write_err = Some(io_err(&p, e));
            }
        }
    })
    .map_err(|e| CliError::Order(e.to_string()))?;
    if let Some(e) = write_err {
        return Err(e);
    }

    let summary = format!(
        "events {} ticks {} power {} mode {} color {} digits {} final_hash {}\n",
        events.len(),
        state.tick_count(),
        state.power().name(),
        state.mode().name(),
        state.color().name(),
        state.digits(),
        state.framebuffer().content_hash(),
    );
    let writes = [
        ("final.ppm", export_ppm(state.framebuffer())),
        ("framelog.txt", log.to_string().into_bytes()),
        ("summary.txt", summary.clone().into_bytes()),
    ];
    for (name, bytes) in writes {
        let p = args.out.join(name);
        fs::write(&p, bytes).map_err(|e| io_err(&p, e))?;
    }
    Ok(summary)
}

fn load_matrix(input: &TableInput, fixture: fn() -> TaskMatrix) -> Result<TaskMatrix, CliError> {
    match &input.input {
        Some(p) if !input.fixtures => Ok(TaskMatrix::from_csv(read_input(p)?.as_bytes())?),
        _ => Ok(fixture()),
    }
}

fn evalstats(kind: &EvalKind) -> Result<String, CliError> {
    match kind {
        EvalKind::Times(input) => {
            let m = load_matrix(input, fixtures::task_times)?;
            Ok(report::means(&m, &task_means(&m)?, input.format))
        }
        EvalKind::Difficulty(input) => {
            let m = load_matrix(input, fixtures::task_difficulty)?;
            Ok(report::means(&m, &difficulty_means(&m)?, input.format))
        }
        EvalKind::Survey { input, factor } => {
            let tables: Vec<(String, SurveyTable)> = match (&input.input, factor) {
                (Some(p), _) if !input.fixtures => {
                    let name = p
                        .file_stem()
                        .map(|s| s.to_string_lossy().into_owned())
                        .unwrap_or_default();
                    vec![(name, SurveyTable::from_csv(read_input(p)?.as_bytes())?)]
                }
                (_, Some(f)) => vec![(f.clone(), fixtures::survey(f).expect("validated by clap"))],
                _ => fixtures::surveys()?
                    .into_iter()
                    .map(|(n, t)| (n.to_string(), t))
                    .collect(),
            };
            let mut out = String::new();
            for (name, t) in &tables {
                out.push_str(&report::survey(name, &survey_stats(t)?, input.format));
            }
            Ok(out)
        }
        EvalKind::Discovery { lambda, target, n } => match (lambda, target) {
            (Some(l), _) => {
                let m = DiscoveryModel::new(*l)?;
                Ok(format!(
                    "lambda {l} n {n} proportion {:.4}\n",
                    m.proportion(*n)
                ))
            }
            (None, Some(p)) => {
                let l = solve_lambda(*p, *n)?;
                Ok(format!("target {p} n {n} lambda {l:.6}\n"))
            }
            (None, None) => unreachable!("clap requires one of --lambda/--target"),
        },
        EvalKind::Resample {
            input,
            synthetic,
            users,
            problems,
            p_hit,
            k,
            trials,
            seed,
            format,
        } => {
            let d = match input {
                Some(p) if !synthetic => DiscoveryMatrix::from_csv(read_input(p)?.as_bytes())?,
                _ => DiscoveryMatrix::synthetic(*users, *problems, *p_hit, *seed)?,
            };
            let rows = k
                .iter()
                .map(|&k| subgroup_resample(&d, k, *trials, *seed, Execution::Parallel))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(report::resample(&d, &rows, *seed, *format))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Replay(args) => replay(args),
        Command::VgaReport { frames } => {
            Ok(TimingReport::run(&VgaTimingParams::default(), *frames).to_string())
        }
        Command::Evalstats { kind } => evalstats(kind),
    };
    match result {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("touchboard: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
