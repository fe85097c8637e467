//! Command-line front end. Exit codes: 0 success, 1 input or usage error,
//! 2 theorem claim violated.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::digraph::DotOptions;
use crate::game::SymmetricGame;
use crate::io::{self, IoError};
use crate::metagame::{self, DEFAULT_STRATEGY_CAP};
use crate::metrics::{self, EvaluationReport};
use crate::oracle::{self, GameFilter, DEFAULT_MAX_ATTEMPTS};
use crate::response::{self, Variant};
use crate::selfplay::{self, SelfPlayConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "sinkrank", version, about = "Sink-equilibrium strategy evaluation for symmetric games")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sink equilibria and preferred strategy sets under the BD/ND metrics.
    Analyze {
        /// Game file (JSON or CSV); `-` reads stdin.
        game: String,
        #[arg(long, value_enum, default_value_t = MetricArg::Both)]
        metric: MetricArg,
        /// Directory for `best_response.dot` / `non_dominated.dot`.
        #[arg(long, value_name = "DIR")]
        dot: Option<PathBuf>,
        /// Leave self-loops out of DOT output.
        #[arg(long)]
        omit_self_loops: bool,
        /// Emit JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Batch self-play; prints the share of runs that learn each strategy.
    Selfplay {
        game: String,
        #[arg(long, value_enum, default_value_t = VariantArg::Strict)]
        variant: VariantArg,
        #[arg(long, default_value_t = 300)]
        tau_max: usize,
        #[arg(long, default_value_t = 10)]
        memory: usize,
        #[arg(long, default_value_t = 10_000)]
        runs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write `strategy,frequency` rows to this file.
        #[arg(long, value_name = "PATH")]
        csv: Option<PathBuf>,
    },
    /// Check every theorem-level claim on a game; JSON report on stdout.
    Verify { game: String },
    /// Random integer games, optionally filtered by structural predicates.
    Generate {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
        low: i64,
        #[arg(long, default_value_t = 9, allow_negative_numbers = true)]
        high: i64,
        #[arg(long, value_enum, value_delimiter = ',')]
        filter: Vec<FilterArg>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value_t = DEFAULT_MAX_ATTEMPTS)]
        max_attempts: usize,
        /// Write `game_NNNN.json` files here instead of stdout.
        #[arg(long, value_name = "DIR")]
        out_dir: Option<PathBuf>,
    },
    /// Meta-game of a stochastic game over stationary deterministic strategies.
    Metagame {
        stochastic_game: String,
        /// Output game file; stdout when absent.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_STRATEGY_CAP)]
        cap: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MetricArg {
    Bd,
    Nd,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Strict,
    Weak,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Strict => Variant::Strict,
            VariantArg::Weak => Variant::Weak,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FilterArg {
    #[value(name = "no-self-br")]
    NoSelfBr,
    #[value(name = "no-mutual-br")]
    NoMutualBr,
    Generic,
}

/// Result of one command: text for stdout plus exit code.
struct Outcome {
    stdout: String,
    code: i32,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome {
            stdout,
            code: EXIT_OK,
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match execute(cli.command) {
        Ok(outcome) => match stdout.write_all(outcome.stdout.as_bytes()) {
            Ok(()) => outcome.code,
            Err(e) => {
                let _ = writeln!(stderr, "error: writing output: {e}");
                EXIT_INPUT
            }
        },
        Err(message) => {
            let _ = writeln!(stderr, "error: {message}");
            EXIT_INPUT
        }
    }
}

fn execute(command: Command) -> Result<Outcome, String> {
    match command {
        Command::Analyze {
            game,
            metric,
            dot,
            omit_self_loops,
            json,
        } => analyze(&game, metric, dot.as_deref(), omit_self_loops, json),
        Command::Selfplay {
            game,
            variant,
            tau_max,
            memory,
            runs,
            seed,
            csv,
        } => {
            let config = SelfPlayConfig {
                tau_max,
                memory_length: memory,
                seed,
                initial: None,
            };
            selfplay_cmd(&game, variant.into(), &config, runs, csv.as_deref())
        }
        Command::Verify { game } => verify(&game),
        Command::Generate {
            n,
            low,
            high,
            filter,
            seed,
            count,
            max_attempts,
            out_dir,
        } => generate(n, low, high, &filter, seed, count, max_attempts, out_dir.as_deref()),
        Command::Metagame {
            stochastic_game,
            out,
            cap,
        } => metagame_cmd(&stochastic_game, out.as_deref(), cap),
    }
}

fn load(path: &str) -> Result<SymmetricGame, String> {
    io::load_game(path).map_err(|e| e.to_string())
}

fn write_out(path: &Path, contents: &str) -> Result<(), String> {
    io::write_file(path, contents).map_err(|e: IoError| e.to_string())
}

fn label_set<'a>(game: &'a SymmetricGame, items: impl IntoIterator<Item = &'a usize>) -> String {
    let names: Vec<&str> = items.into_iter().map(|&s| game.label(s)).collect();
    format!("{{{}}}", names.join(","))
}

fn analyze(
    path: &str,
    metric: MetricArg,
    dot: Option<&Path>,
    omit_self_loops: bool,
    as_json: bool,
) -> Result<Outcome, String> {
    let game = load(path)?;
    let reports: Vec<EvaluationReport> = match metric {
        MetricArg::Bd => vec![metrics::evaluate_bd(&game)],
        MetricArg::Nd => vec![metrics::evaluate_nd(&game)],
        MetricArg::Both => vec![metrics::evaluate_bd(&game), metrics::evaluate_nd(&game)],
    };
    let self_br = game.self_best_response_strategies();
    let mutual = game.mutual_best_response_pairs();

    if let Some(dir) = dot {
        std::fs::create_dir_all(dir).map_err(|e| format!("cannot create {}: {e}", dir.display()))?;
        let options = DotOptions {
            omit_self_loops,
            ..DotOptions::default()
        };
        for report in &reports {
            let (graph, file) = match report.kind {
                metrics::MetricKind::Bd => (response::best_response_digraph(&game), "best_response.dot"),
                metrics::MetricKind::Nd => (response::non_dominated_digraph(&game), "non_dominated.dot"),
            };
            write_out(&dir.join(file), &graph.to_dot(Some(&report.sink_equilibria), &options))?;
        }
    }

    let mut out = String::new();
    if as_json {
        let names = |v: &[usize]| v.iter().map(|&s| game.label(s)).collect::<Vec<_>>();
        let mut doc = json!({
            "n": game.n(),
            "labels": game.labels(),
            "self_best_response": names(&self_br),
            "mutual_best_response_pairs": mutual
                .iter()
                .map(|&(a, b)| [game.label(a), game.label(b)])
                .collect::<Vec<_>>(),
        });
        for report in &reports {
            let key = match report.kind {
                metrics::MetricKind::Bd => "bd",
                metrics::MetricKind::Nd => "nd",
            };
            doc[key] = json!({
                "sink_equilibria": report
                    .sink_equilibria
                    .components
                    .iter()
                    .map(|c| names(c))
                    .collect::<Vec<_>>(),
                "preferred": report.preferred.iter().map(|&s| game.label(s)).collect::<Vec<_>>(),
                "metric_values": report.metric_values,
            });
        }
        out = serde_json::to_string_pretty(&doc).expect("report serializes");
        out.push('\n');
    } else {
        let _ = writeln!(out, "strategies: {}", game.n());
        let _ = writeln!(out, "self best-response strategies: {}", label_set(&game, &self_br));
        let pairs: Vec<String> = mutual
            .iter()
            .map(|&(a, b)| format!("{{{},{}}}", game.label(a), game.label(b)))
            .collect();
        let _ = writeln!(out, "mutual best-response pairs: [{}]", pairs.join(", "));
        for report in &reports {
            let tag = match report.kind {
                metrics::MetricKind::Bd => "BD",
                metrics::MetricKind::Nd => "ND",
            };
            let sinks: Vec<String> = report
                .sink_equilibria
                .components
                .iter()
                .map(|c| label_set(&game, c))
                .collect();
            let _ = writeln!(out, "{tag} sink equilibria: {}", sinks.join(", "));
            let _ = writeln!(out, "{tag} preferred: {}", label_set(&game, &report.preferred));
        }
    }
    Ok(Outcome::ok(out))
}

fn selfplay_cmd(
    path: &str,
    variant: Variant,
    config: &SelfPlayConfig,
    runs: usize,
    csv: Option<&Path>,
) -> Result<Outcome, String> {
    let game = load(path)?;
    let batch = selfplay::batch_frequencies(&game, variant, config, runs).map_err(|e| e.to_string())?;
    let mut table = String::from("strategy,frequency\n");
    let mut out = String::new();
    let _ = writeln!(
        out,
        "variant: {variant}, runs: {runs}, tau_max: {}, memory: {}, seed: {}",
        config.tau_max, config.memory_length, config.seed
    );
    for (s, f) in batch.frequencies.iter().enumerate() {
        let _ = writeln!(table, "{},{f:.4}", game.label(s));
        let _ = writeln!(out, "{}\t{f:.4}", game.label(s));
    }
    if let Some(p) = csv {
        write_out(p, &table)?;
    }
    Ok(Outcome::ok(out))
}

fn verify(path: &str) -> Result<Outcome, String> {
    let game = load(path)?;
    let report = oracle::check_theorems(&game);
    let mut out = serde_json::to_string_pretty(&report).expect("report serializes");
    out.push('\n');
    let code = if report.all_applicable_hold() {
        EXIT_OK
    } else {
        EXIT_VIOLATION
    };
    Ok(Outcome { stdout: out, code })
}

#[allow(clippy::too_many_arguments)]
fn generate(
    n: usize,
    low: i64,
    high: i64,
    filters: &[FilterArg],
    seed: u64,
    count: usize,
    max_attempts: usize,
    out_dir: Option<&Path>,
) -> Result<Outcome, String> {
    let filter = GameFilter {
        no_self_best_response: filters.contains(&FilterArg::NoSelfBr),
        no_mutual_best_response_pairs: filters.contains(&FilterArg::NoMutualBr),
        generic_best_responses: filters.contains(&FilterArg::Generic),
    };
    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir).map_err(|e| format!("cannot create {}: {e}", dir.display()))?;
    }
    let mut out = String::new();
    for i in 0..count {
        let game_seed = selfplay::derive_run_seed(seed, i as u64);
        let game = oracle::random_game(n, low, high, filter, game_seed, max_attempts)
            .map_err(|e| format!("game {}: {e}", i + 1))?;
        match out_dir {
            Some(dir) => {
                let file = dir.join(format!("game_{:04}.json", i + 1));
                write_out(&file, &(io::game_to_json(&game) + "\n"))?;
                let _ = writeln!(out, "{}", file.display());
            }
            None if count == 1 => {
                out.push_str(&io::game_to_json(&game));
                out.push('\n');
            }
            None => {
                out.push_str(&io::game_to_json_line(&game));
                out.push('\n');
            }
        }
    }
    Ok(Outcome::ok(out))
}

fn metagame_cmd(path: &str, out_path: Option<&Path>, cap: usize) -> Result<Outcome, String> {
    let sg = io::load_stochastic_game(path).map_err(|e| e.to_string())?;
    let game = metagame::build_meta_game(&sg, cap).map_err(|e| format!("{path}: {e}"))?;
    let text = io::game_to_json(&game) + "\n";
    match out_path {
        Some(p) => {
            write_out(p, &text)?;
            Ok(Outcome::ok(String::new()))
        }
        None => Ok(Outcome::ok(text)),
    }
}
