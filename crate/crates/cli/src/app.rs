//! Command dispatch. [`run`] never panics on bad input: usage errors exit
//! with 2, domain errors with 1.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use fdgame::choice::{self, DEFAULT_MAX_NODES};
use fdgame::evolution::{blink_game, classify_two_strategy, default_budget, derive_seed, Dynamics, Tactic};
use fdgame::game::{analyze, fmdc};
use fdgame::normal_form::{pure_nash_oracle, to_fd_game};
use fdgame::{Exec, FdGame};
use serde::Serialize;

use crate::format::{emit_dot, parse_fdg, parse_nfg, serialize_fdg, DotOptions};
use crate::report::{self, Analysis, AnalyzeDoc, AuditDoc, EvolveDoc, FromNfgDoc, FORMAT_VERSION};

/// Largest batch `evolve` accepts.
pub const MAX_TRIALS: u64 = 10_000_000;

#[derive(Debug, Parser)]
#[command(name = "fdgame", version, about = "Analyze feasibility/desirability games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GraphFormat {
    Text,
    Json,
    Dot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DataFormat {
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Equilibria of an .fdg game
    Analyze {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = GraphFormat::Text)]
        format: GraphFormat,
        /// With --format dot, append a digraph of the reduced graph
        #[arg(long)]
        reduced: bool,
    },
    /// Convert an .nfg payoff matrix and analyze it
    FromNfg {
        file: PathBuf,
        /// Print the converted game as .fdg text instead of a report
        #[arg(long)]
        emit_fdg: bool,
        #[arg(long, value_enum, default_value_t = GraphFormat::Text)]
        format: GraphFormat,
        #[arg(long)]
        reduced: bool,
    },
    /// Check the choice conditions of a game's FMDC relation on all subsets
    ChoiceAudit {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_MAX_NODES)]
        max_nodes: usize,
        #[arg(long, value_enum, default_value_t = DataFormat::Text)]
        format: DataFormat,
    },
    /// Simulate random FMDC moves from a start situation
    Evolve {
        file: PathBuf,
        #[arg(long)]
        start: String,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, env = "FDGAME_SEED", default_value_t = 0)]
        seed: u64,
        /// Moves per trajectory; defaults to the number of situations squared
        #[arg(long)]
        max_steps: Option<usize>,
        #[arg(long, value_enum, default_value_t = DataFormat::Text)]
        format: DataFormat,
        /// Write every trajectory to this file, one per line
        #[arg(long, value_name = "FILE")]
        dump_trajectories: Option<PathBuf>,
    },
    /// The two-token blink game under one tactic
    Blink {
        #[arg(long, value_parser = parse_tactic)]
        tactic: Tactic,
        #[arg(long, value_enum, default_value_t = GraphFormat::Text)]
        format: GraphFormat,
        #[arg(long)]
        reduced: bool,
    },
}

fn parse_tactic(s: &str) -> Result<Tactic, String> {
    s.parse().map_err(|e: fdgame::evolution::EvolutionError| e.to_string())
}

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("cannot read `{}`: {e}", path.display()))
}

fn load_fdg(path: &Path) -> Result<FdGame, String> {
    parse_fdg(&read(path)?).map_err(|e| format!("{}:{e}", path.display()))
}

fn json<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("report types serialize");
    s.push('\n');
    s
}

fn graph_output(game: &FdGame, format: GraphFormat, reduced: bool) -> String {
    let report = analyze(game);
    let analysis = Analysis::new(game.agents(), &report);
    match format {
        GraphFormat::Text => report::analysis_text(&analysis),
        GraphFormat::Json => json(&AnalyzeDoc {
            format_version: FORMAT_VERSION,
            command: "analyze".into(),
            analysis,
        }),
        GraphFormat::Dot => emit_dot(&report, DotOptions { reduced }),
    }
}

fn execute(command: Command) -> Result<String, String> {
    match command {
        Command::Analyze { file, format, reduced } => Ok(graph_output(&load_fdg(&file)?, format, reduced)),
        Command::FromNfg {
            file,
            emit_fdg,
            format,
            reduced,
        } => {
            let nf = parse_nfg(&read(&file)?).map_err(|e| format!("{}: {e}", file.display()))?;
            let game = to_fd_game(&nf).map_err(|e| e.to_string())?;
            if emit_fdg {
                return Ok(serialize_fdg(&game));
            }
            if format == GraphFormat::Dot {
                return Ok(graph_output(&game, format, reduced));
            }
            let doc = FromNfgDoc {
                format_version: FORMAT_VERSION,
                command: "from-nfg".into(),
                players: nf.players().names().to_vec(),
                strategies: (0..nf.player_count())
                    .map(|p| nf.strategies(p).names().to_vec())
                    .collect(),
                pure_nash: pure_nash_oracle(&nf).iter().map(|p| nf.profile_name(p)).collect(),
                analysis: Analysis::new(game.agents(), &analyze(&game)),
            };
            Ok(match format {
                GraphFormat::Json => json(&doc),
                _ => report::from_nfg_text(&nf, &doc),
            })
        }
        Command::ChoiceAudit {
            file,
            max_nodes,
            format,
        } => {
            let game = load_fdg(&file)?;
            let audit = choice::audit(&fmdc(&game), max_nodes).map_err(|e| e.to_string())?;
            let doc = AuditDoc::new(&audit);
            Ok(match format {
                DataFormat::Text => report::audit_text(&doc),
                DataFormat::Json => json(&doc),
            })
        }
        Command::Evolve {
            file,
            start,
            trials,
            seed,
            max_steps,
            format,
            dump_trajectories,
        } => {
            if trials > MAX_TRIALS {
                return Err(format!("at most {MAX_TRIALS} trials are supported"));
            }
            let game = load_fdg(&file)?;
            let dynamics = Dynamics::new(&game);
            let start = dynamics.situation(&start).map_err(|e| e.to_string())?;
            let budget = max_steps.unwrap_or_else(|| default_budget(game.situations().len()));
            let stats = dynamics
                .absorption_stats(start, trials, budget, seed, Exec::default())
                .map_err(|e| e.to_string())?;
            if let Some(path) = dump_trajectories {
                let mut lines = String::new();
                for i in 0..trials {
                    let t = dynamics
                        .trajectory(start, budget, derive_seed(seed, i))
                        .map_err(|e| e.to_string())?;
                    lines += &report::trajectory_line(game.situations(), &t.steps);
                    lines.push('\n');
                }
                fs::write(&path, lines).map_err(|e| format!("cannot write `{}`: {e}", path.display()))?;
            }
            let doc = EvolveDoc::new(game.situations(), &stats);
            Ok(match format {
                DataFormat::Text => report::evolve_text(&doc),
                DataFormat::Json => json(&doc),
            })
        }
        Command::Blink {
            tactic,
            format,
            reduced,
        } => {
            let game = blink_game(tactic);
            if format == GraphFormat::Dot {
                return Ok(graph_output(&game, format, reduced));
            }
            let outcome = classify_two_strategy(&game).map_err(|e| e.to_string())?;
            let doc = report::blink_doc(tactic, outcome, Analysis::new(game.agents(), &analyze(&game)));
            Ok(match format {
                GraphFormat::Json => json(&doc),
                _ => report::blink_text(&doc),
            })
        }
    }
}

/// Runs the command line `args` (program name first) and returns the exit
/// code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{}", e.render());
                    0
                }
                _ => {
                    let _ = write!(stderr, "{}", e.render());
                    2
                }
            };
        }
    };
    match execute(cli.command) {
        Ok(text) => match stdout.write_all(text.as_bytes()).and_then(|()| stdout.flush()) {
            Ok(()) => 0,
            Err(e) => {
                let _ = writeln!(stderr, "error: cannot write output: {e}");
                1
            }
        },
        Err(msg) => {
            let _ = writeln!(stderr, "error: {msg}");
            1
        }
    }
}
