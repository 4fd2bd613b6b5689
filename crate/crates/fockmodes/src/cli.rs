//! `fockmodes` subcommands. Each one parses its inputs, makes the matching
//! library call and renders the result; no numerics live here.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use fockmodes_core::entanglement::Partition;
use fockmodes_core::fock::PureState;
use fockmodes_core::optimize::{optimize_entanglement, Direction, OptConfig};
use fockmodes_core::transform::apply_redefinition;
use fockmodes_core::Error as CoreError;

use crate::ket::{format_state, parse_state, ParseError};
use crate::partition_arg::parse_partition;
use crate::report::Report;
use crate::suite::run_reference_suite;
use crate::unitary_file::{parse_unitary, unitary_to_json, UnitaryFileError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_SUITE_MISMATCH: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_PARSE: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "fockmodes",
    version,
    about = "Entanglement between bosonic modes under mode redefinitions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DirectionArg {
    Min,
    Max,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Schmidt spectrum and entropy of a state across a partition
    Entropy {
        #[arg(allow_hyphen_values = true)]
        state: String,
        /// Modes on each side, e.g. `0,1|2,3`
        #[arg(long)]
        partition: String,
        #[arg(long)]
        json: bool,
    },
    /// Rewrites a state in the modes defined by a unitary file
    Transform {
        #[arg(allow_hyphen_values = true)]
        state: String,
        #[arg(long)]
        unitary: PathBuf,
        /// Decimal places of the printed coefficients
        #[arg(long, default_value_t = 7)]
        precision: usize,
    },
    /// Searches mode redefinitions for the least or most entanglement
    Optimize {
        #[arg(allow_hyphen_values = true)]
        state: String,
        #[arg(long)]
        partition: String,
        #[arg(long, value_enum)]
        direction: DirectionArg,
        #[arg(long, default_value_t = 24)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
        /// Also write the best unitary to this file
        #[arg(long)]
        save_unitary: Option<PathBuf>,
    },
    /// Upper bound on the Schmidt rank over all mode redefinitions
    RankBound {
        #[arg(allow_hyphen_values = true)]
        state: String,
        #[arg(long)]
        partition: String,
        #[arg(long)]
        json: bool,
    },
    /// Recomputes the reference values and compares them with expectations
    #[command(name = "paper-suite")]
    ReferenceSuite {
        #[arg(long)]
        json: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<CoreError> for Failure {
    fn from(e: CoreError) -> Self {
        let code = match e {
            CoreError::Dimension { .. }
            | CoreError::Partition(_)
            | CoreError::Index(_)
            | CoreError::TooLarge { .. } => EXIT_USAGE,
            CoreError::DegenerateState | CoreError::NotSquare { .. } => EXIT_PARSE,
            CoreError::NotUnitary { .. }
            | CoreError::Numerical(_)
            | CoreError::NonFinite { .. } => EXIT_NUMERICAL,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<UnitaryFileError> for Failure {
    fn from(e: UnitaryFileError) -> Self {
        Self {
            code: EXIT_PARSE,
            message: e.to_string(),
        }
    }
}

fn parse_failure(text: &str, e: ParseError) -> Failure {
    let mut message = format!("cannot parse state: {e}");
    if let Some(offset) = e.offset() {
        let col = text[..offset.min(text.len())].chars().count();
        message.push_str(&format!("\n  {text}\n  {}^", " ".repeat(col)));
    }
    Failure {
        code: EXIT_PARSE,
        message,
    }
}

fn read_state(text: &str) -> Result<PureState, Failure> {
    parse_state(text).map_err(|e| parse_failure(text, e))
}

fn read_inputs(state: &str, partition: &str) -> Result<(PureState, Partition), Failure> {
    let s = read_state(state)?;
    let p = parse_partition(partition, s.mode_count())?;
    Ok((s, p))
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

fn emit_report(out: &mut dyn Write, report: &Report, json: bool) -> std::io::Result<()> {
    if json {
        writeln!(out, "{}", report.to_json())
    } else {
        write!(out, "{}", report.render_table())
    }
}

fn execute(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    let io = |e: std::io::Error| Failure::usage(format!("write failed: {e}"));
    let start = Instant::now();
    match cmd {
        Command::Entropy {
            state,
            partition,
            json,
        }
        | Command::RankBound {
            state,
            partition,
            json,
        } => {
            let (s, p) = read_inputs(&state, &partition)?;
            let mut report = Report::analyze(&state, &s, &p)?;
            report.wall_ms = elapsed_ms(start);
            emit_report(out, &report, json).map_err(io)?;
        }
        Command::Transform {
            state,
            unitary,
            precision,
        } => {
            let s = read_state(&state)?;
            let text = std::fs::read_to_string(&unitary)
                .map_err(|e| Failure::usage(format!("cannot read {}: {e}", unitary.display())))?;
            let u = parse_unitary(&text)?;
            let rewritten = apply_redefinition(&s, &u)?;
            writeln!(out, "{}", format_state(&rewritten, precision)).map_err(io)?;
        }
        Command::Optimize {
            state,
            partition,
            direction,
            restarts,
            seed,
            json,
            save_unitary,
        } => {
            let (s, p) = read_inputs(&state, &partition)?;
            let direction = match direction {
                DirectionArg::Min => Direction::Min,
                DirectionArg::Max => Direction::Max,
            };
            if restarts == 0 {
                return Err(Failure::usage("--restarts must be at least 1"));
            }
            let cfg = OptConfig::new(direction)
                .with_restarts(restarts)
                .with_seed(seed);
            let result = optimize_entanglement(&s, &p, &cfg)?;
            let mut report = Report::analyze(&state, &s, &p)?.with_optimization(&cfg, &result);
            report.wall_ms = elapsed_ms(start);
            if let Some(path) = save_unitary {
                std::fs::write(&path, unitary_to_json(&result.best_unitary) + "\n")
                    .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))?;
            }
            emit_report(out, &report, json).map_err(io)?;
        }
        Command::ReferenceSuite { json, seed } => {
            let suite = run_reference_suite(seed)?;
            let wall_ms = elapsed_ms(start);
            if json {
                writeln!(out, "{}", suite.to_json()).map_err(io)?;
                let _ = writeln!(err, "paper-suite wall_ms {wall_ms:.1}");
            } else {
                write!(out, "{}", suite.render_table()).map_err(io)?;
                writeln!(out, "wall_ms {wall_ms:.1}").map_err(io)?;
            }
            return Ok(if suite.all_pass() {
                EXIT_OK
            } else {
                EXIT_SUITE_MISMATCH
            });
        }
    }
    Ok(EXIT_OK)
}

/// Runs one invocation. `args` includes the program name.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{rendered}");
                EXIT_USAGE
            } else {
                let _ = write!(out, "{rendered}");
                EXIT_OK
            };
        }
    };
    match execute(cli.command, out, err) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}
