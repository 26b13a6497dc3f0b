use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use islab_cli::{cache_admin, cache_dir, run_experiment, CacheAction, CliError, CliResult, RunOptions};
use islab_core::{encode_pair, encode_set, run, BitString, Program, RunKind};

#[derive(Parser)]
#[command(name = "islab", version, about = "Interaction-as-intersection workbench")]
struct Cli {
    /// Worker threads for searches and family scans (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Log progress to stderr (repeat for more).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment config and write its report.
    Run {
        config: PathBuf,
        /// Cache directory (default: $ISLAB_CACHE_DIR or .islab-cache).
        #[arg(long)]
        cache_dir: Option<PathBuf>,
        /// Keep exact-search results in memory only.
        #[arg(long, conflicts_with = "cache_dir")]
        no_cache: bool,
    },
    /// Reference machine utilities.
    Machine {
        #[command(subcommand)]
        command: MachineCommand,
    },
    /// Self-delimiting encodings.
    Encode {
        #[command(subcommand)]
        command: EncodeCommand,
    },
    /// Inspect or maintain the persistent search cache.
    Cache {
        action: CacheArg,
        #[arg(long)]
        dir: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum MachineCommand {
    /// Execute one program and print its outcome as JSON.
    Run {
        /// Program bits, e.g. 101111.
        #[arg(long, required_unless_present = "ops", conflicts_with = "ops")]
        program: Option<String>,
        /// Program in opcode symbols: > < ~ [ ] . , !
        #[arg(long)]
        ops: Option<String>,
        #[arg(long, default_value = "")]
        aux: String,
        #[arg(long)]
        max_steps: u64,
    },
}

#[derive(Subcommand)]
enum EncodeCommand {
    /// The pair code of two strings.
    Pair { x: String, y: String },
    /// The canonical code of a set of strings (order and repeats ignored).
    Set { members: Vec<String> },
}

#[derive(Clone, Copy, ValueEnum)]
enum CacheArg {
    Stats,
    Verify,
    Clear,
}

fn bits(s: &str) -> CliResult<BitString> {
    s.parse().map_err(|e: islab_core::Error| CliError::Schema(e.to_string()))
}

fn dispatch(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Run {
            config,
            cache_dir: dir,
            no_cache,
        } => {
            let options = RunOptions {
                cache_dir: (!no_cache).then(|| cache_dir(dir.as_deref())),
            };
            run_experiment(&config, &options).map(|_| ())
        }
        Command::Machine {
            command:
                MachineCommand::Run {
                    program,
                    ops,
                    aux,
                    max_steps,
                },
        } => {
            let program = match (program, ops) {
                (Some(p), _) => Program::new(bits(&p)?),
                (None, Some(o)) => Program::from_symbols(&o)?,
                (None, None) => unreachable!("clap requires one of them"),
            };
            let out = run(&program, &bits(&aux)?, max_steps);
            let kind = match out.kind {
                RunKind::Halted => "halted",
                RunKind::Failed => "failed",
                RunKind::OutOfBudget => "out_of_budget",
            };
            let report = json!({
                "program": program.bits(),
                "ops": program.symbols(),
                "kind": kind,
                "output": out.output,
                "steps": out.steps,
                "print_times": out.print_times,
            });
            println!("{}", serde_json::to_string_pretty(&report).expect("json"));
            Ok(())
        }
        Command::Encode { command } => {
            let code = match command {
                EncodeCommand::Pair { x, y } => encode_pair(&bits(&x)?, &bits(&y)?),
                EncodeCommand::Set { members } => {
                    let parsed = members.iter().map(|m| bits(m)).collect::<CliResult<Vec<_>>>()?;
                    encode_set(parsed.iter())
                }
            };
            println!("{code}");
            Ok(())
        }
        Command::Cache { action, dir } => {
            let action = match action {
                CacheArg::Stats => CacheAction::Stats,
                CacheArg::Verify => CacheAction::Verify,
                CacheArg::Clear => CacheAction::Clear,
            };
            let (text, status) = cache_admin(action, &cache_dir(dir.as_deref()));
            print!("{text}");
            status
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.workers {
        pool = pool.num_threads(n.max(1));
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("islab: cannot start workers: {e}");
            return ExitCode::from(1);
        }
    };
    match pool.install(|| dispatch(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("islab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
