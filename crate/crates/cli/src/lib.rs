//! The `aaul` command-line tool.
//!
//! Exit status: 0 for `true` or success, 1 for `false` or nothing found,
//! 2 for any error. A path of `-` reads standard input.

use std::ffi::OsString;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use aaul::checker::{Budget, Checker};
use aaul::error::EvalError;
use aaul::kripke::{export_dot, load_model, save_model, KripkeModel, ModelError};
use aaul::syntax::{parse_formula, parse_update, print_formula, Formula, SyntaxError};
use aaul::tiling::{build_torus_model, find_periodic_tiling, parse_tiles, TileError, TileInstance, TilingEncoding};
use aaul::updates::apply_update;
use clap::{Parser, Subcommand};
use thiserror::Error;

mod search;

#[derive(Debug, Parser)]
#[command(name = "aaul", version, about = "Arbitrary arrow update logic on finite Kripke models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide a formula at a state; prints `true` or `false`.
    Check {
        model: PathBuf,
        formula: String,
        /// State name; defaults to the model's `point:`.
        #[arg(long)]
        state: Option<String>,
        /// Largest number of arrow blocks a `[*]` may enumerate.
        #[arg(long, default_value_t = Budget::default().max_arrow_blocks)]
        max_blocks: usize,
    },
    /// Apply an update literal such as `{(true, a, p)}`.
    Apply {
        model: PathBuf,
        #[arg(long)]
        update: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Print the coarsest bisimulation, one block per line.
    Bisim { model: PathBuf },
    /// Print the tiling formula of a tile file, or one named part of it.
    EncodeTiling {
        tiles: PathBuf,
        /// One of psi1 psi2 psi3_x psi4_x propd_x return_x (x in u d l r),
        /// inverse commute one_tile one_color tile_colors tile_match refl_a
        /// psi_types.
        #[arg(long)]
        conjunct: Option<String>,
    },
    /// Search periods 1..=K for a torus tiling.
    TileSearch {
        tiles: PathBuf,
        #[arg(long)]
        max_period: usize,
    },
    /// Build the torus model of a tiling with the given period.
    WitnessModel {
        tiles: PathBuf,
        #[arg(long)]
        period: usize,
        /// Add a proposition unique to every cell.
        #[arg(long)]
        cell_props: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Graphviz export.
    Dot {
        model: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Bounded search for a pointed model of a formula. Exponential in the
    /// number of states; absence is not unsatisfiability.
    SatSearch {
        formula: String,
        #[arg(long)]
        max_states: usize,
        /// Comma-separated agent names.
        #[arg(long, value_delimiter = ',')]
        agents: Vec<String>,
        /// Comma-separated proposition names.
        #[arg(long, value_delimiter = ',', default_value = "")]
        props: Vec<String>,
        /// Refuse to start if some state count has more raw candidates.
        #[arg(long, default_value_t = search::DEFAULT_MAX_CANDIDATES)]
        max_candidates: u64,
        #[arg(long, default_value_t = Budget::default().max_arrow_blocks)]
        max_blocks: usize,
    },
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Model { path: String, source: ModelError },
    #[error("{path}: {source}")]
    Tiles { path: String, source: TileError },
    #[error("formula: {0}")]
    Syntax(#[from] SyntaxError),
    #[error("{0}")]
    Eval(#[from] EvalError),
    #[error("{0}")]
    Usage(String),
}

enum Outcome {
    Yes,
    No,
}

struct Io<'a> {
    stdin: &'a mut dyn Read,
    stdout: &'a mut dyn Write,
}

impl Io<'_> {
    fn read(&mut self, path: &Path) -> Result<String, CliError> {
        let io_err = |source| CliError::Io {
            path: path.display().to_string(),
            source,
        };
        if path == Path::new("-") {
            let mut text = String::new();
            self.stdin.read_to_string(&mut text).map_err(io_err)?;
            Ok(text)
        } else {
            fs::read_to_string(path).map_err(io_err)
        }
    }

    fn model(&mut self, path: &Path) -> Result<KripkeModel, CliError> {
        load_model(&self.read(path)?).map_err(|source| CliError::Model {
            path: path.display().to_string(),
            source,
        })
    }

    fn tiles(&mut self, path: &Path) -> Result<TileInstance, CliError> {
        parse_tiles(&self.read(path)?).map_err(|source| CliError::Tiles {
            path: path.display().to_string(),
            source,
        })
    }

    fn emit(&mut self, text: &str, output: Option<&Path>) -> Result<(), CliError> {
        let (path, result) = match output {
            Some(p) if p != Path::new("-") => (p.display().to_string(), fs::write(p, text)),
            _ => ("<stdout>".to_string(), self.stdout.write_all(text.as_bytes())),
        };
        result.map_err(|source| CliError::Io { path, source })
    }
}

/// Runs one invocation and returns the exit status.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = if e.use_stderr() {
                write!(stderr, "{e}")
            } else {
                write!(stdout, "{e}")
            };
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let mut io = Io { stdin, stdout };
    match execute(cli.command, &mut io) {
        Ok(Outcome::Yes) => 0,
        Ok(Outcome::No) => 1,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            2
        }
    }
}

fn line(io: &mut Io, text: &str) -> Result<(), CliError> {
    io.emit(&format!("{text}\n"), None)
}

fn execute(cmd: Command, io: &mut Io) -> Result<Outcome, CliError> {
    match cmd {
        Command::Check {
            model,
            formula,
            state,
            max_blocks,
        } => {
            let m = io.model(&model)?;
            let f = parse_formula(&formula)?;
            let s = match &state {
                Some(name) => m
                    .state_index(name)
                    .ok_or_else(|| CliError::Usage(format!("no state named `{name}`")))?,
                None => m
                    .point()
                    .ok_or_else(|| CliError::Usage("the model has no point; pass --state".into()))?,
            };
            let checker = Checker::new(Budget::default().with_max_arrow_blocks(max_blocks));
            let holds = checker.satisfies(&m, s, &f)?;
            line(io, if holds { "true" } else { "false" })?;
            Ok(if holds { Outcome::Yes } else { Outcome::No })
        }
        Command::Apply { model, update, output } => {
            let m = io.model(&model)?;
            let u = parse_update(&update)?;
            let out = apply_update(&m, &u, &Checker::default())?;
            io.emit(&save_model(&out), output.as_deref())?;
            Ok(Outcome::Yes)
        }
        Command::Bisim { model } => {
            let m = io.model(&model)?;
            let part = aaul::bisim::coarsest_partition(&m);
            for block in part.blocks() {
                let names: Vec<&str> = block.iter().map(|&s| m.state_name(s)).collect();
                line(io, &names.join(" "))?;
            }
            Ok(Outcome::Yes)
        }
        Command::EncodeTiling { tiles, conjunct } => {
            let inst = io.tiles(&tiles)?;
            let enc = TilingEncoding::new(&inst);
            let f = match conjunct {
                None => enc.psi_types(),
                Some(name) => enc
                    .named(&name)
                    .ok_or_else(|| CliError::Usage(format!("unknown conjunct `{name}`")))?,
            };
            line(io, &print_formula(&f))?;
            Ok(Outcome::Yes)
        }
        Command::TileSearch { tiles, max_period } => {
            let inst = io.tiles(&tiles)?;
            if max_period == 0 {
                return Err(CliError::Usage("--max-period must be at least 1".into()));
            }
            match aaul::tiling::search_periodic_tiling(&inst, max_period) {
                Some(t) => {
                    line(io, &format!("period {}", t.period()))?;
                    io.emit(&t.render(&inst), None)?;
                    Ok(Outcome::Yes)
                }
                None => {
                    line(io, &format!("no periodic tiling with period <= {max_period}"))?;
                    Ok(Outcome::No)
                }
            }
        }
        Command::WitnessModel {
            tiles,
            period,
            cell_props,
            output,
        } => {
            let inst = io.tiles(&tiles)?;
            if period == 0 {
                return Err(CliError::Usage("--period must be at least 1".into()));
            }
            match find_periodic_tiling(&inst, period) {
                Some(t) => {
                    let m = build_torus_model(&inst, &t, cell_props);
                    io.emit(&save_model(&m), output.as_deref())?;
                    Ok(Outcome::Yes)
                }
                None => {
                    line(io, &format!("no periodic tiling with period {period}"))?;
                    Ok(Outcome::No)
                }
            }
        }
        Command::Dot { model, output } => {
            let m = io.model(&model)?;
            io.emit(&export_dot(&m), output.as_deref())?;
            Ok(Outcome::Yes)
        }
        Command::SatSearch {
            formula,
            max_states,
            agents,
            props,
            max_candidates,
            max_blocks,
        } => {
            let f: Formula = parse_formula(&formula)?;
            let props: Vec<String> = props.into_iter().filter(|p| !p.is_empty()).collect();
            let query = search::Query {
                formula: &f,
                max_states,
                agents: &agents,
                props: &props,
                max_candidates,
                budget: Budget::default().with_max_arrow_blocks(max_blocks),
            };
            let report = search::run(&query).map_err(CliError::Usage)?;
            match report.model {
                Some(m) => {
                    line(io, &format!("satisfiable in a model with {} states:", m.num_states()))?;
                    io.emit(&save_model(&m), None)?;
                    Ok(Outcome::Yes)
                }
                None => {
                    let mut msg = format!(
                        "none up to {max_states} states (bounded search, absence is not unsatisfiability)"
                    );
                    if report.over_budget > 0 {
                        msg.push_str(&format!("; {} candidates exceeded the quantifier budget", report.over_budget));
                    }
                    line(io, &msg)?;
                    Ok(Outcome::No)
                }
            }
        }
    }
}
