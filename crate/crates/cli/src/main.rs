use std::io::{IsTerminal, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use escrow_core::laws::{LawSuiteConfig, Suite};
use escrow_core::MonoidStr;
use escrowctl::commands::{
    cmd_check_laws, cmd_compose, cmd_explain, cmd_run, Outcome, Status, Structures, Style,
    TraceFormat,
};

#[derive(Parser)]
#[command(
    name = "escrowctl",
    version,
    about = "Escrow optics: law checks, composition and settlement traces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the exhaustive law suites.
    CheckLaws {
        /// Size of the atomic sets.
        #[arg(long, default_value_t = 2)]
        max_size: usize,
        #[arg(long, default_value_t = 2)]
        max_residual: usize,
        /// Suites to run (default: all).
        #[arg(long = "suite", value_delimiter = ',')]
        suites: Vec<Suite>,
        /// Check K random cases per law instead of all of them.
        #[arg(long, value_name = "K")]
        sample: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Orders of the cyclic monoids to test against.
        #[arg(long, value_delimiter = ',', default_value = "2,3")]
        monoids: Vec<usize>,
        #[arg(long, hide = true)]
        corrupt_diamond: bool,
    },
    /// Compose two named optics or escrows from a definition file.
    Compose {
        file: PathBuf,
        name1: String,
        name2: String,
        #[arg(long, value_enum)]
        style: Style,
        /// Write the composite as a definition file.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        monoid: Option<String>,
        #[arg(long)]
        module: Option<String>,
        #[arg(long)]
        comodule: Option<String>,
    },
    /// Execute a scenario and print its settlement trace.
    Run {
        file: PathBuf,
        scenario: String,
        #[arg(long, value_enum, default_value_t = TraceFormat::Text)]
        trace: TraceFormat,
    },
    /// Print an optic's representative and lens normal form.
    Explain { file: PathBuf, name: String },
}

fn execute(command: Command) -> Outcome {
    match command {
        Command::CheckLaws {
            max_size,
            max_residual,
            suites,
            sample,
            seed,
            monoids,
            corrupt_diamond,
        } => {
            let config = LawSuiteConfig {
                max_size,
                max_residual,
                monoids: monoids.into_iter().map(MonoidStr::cyclic).collect(),
                suites: if suites.is_empty() {
                    Suite::ALL.to_vec()
                } else {
                    suites
                },
                sample,
                seed,
                corrupt_diamond,
                ..LawSuiteConfig::default()
            };
            cmd_check_laws(&config)
        }
        Command::Compose {
            file,
            name1,
            name2,
            style,
            out,
            monoid,
            module,
            comodule,
        } => cmd_compose(
            &file,
            &name1,
            &name2,
            style,
            out.as_deref(),
            &Structures {
                monoid,
                module,
                comodule,
            },
        ),
        Command::Run {
            file,
            scenario,
            trace,
        } => cmd_run(&file, &scenario, trace),
        Command::Explain { file, name } => cmd_explain(&file, &name),
    }
}

fn paint(status: Status) -> String {
    let word = status.word();
    let color = std::io::stderr().is_terminal() && std::env::var_os("NO_COLOR").is_none();
    if !color {
        return word.to_string();
    }
    let code = match status {
        Status::Ok => "32",
        Status::Blocked => "33",
        _ => "31",
    };
    format!("\x1b[{code}m{word}\x1b[0m")
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            if code == 1 {
                let first = e.to_string();
                let first = first
                    .lines()
                    .next()
                    .unwrap_or("")
                    .trim_start_matches("error: ");
                eprintln!("{} usage: {first}", paint(Status::Invalid));
            }
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = execute(cli.command);
    eprintln!("{} {}", paint(outcome.status), outcome.headline);
    let mut stdout = std::io::stdout().lock();
    let _ = stdout.write_all(outcome.stdout.as_bytes());
    let _ = stdout.flush();
    ExitCode::from(outcome.code() as u8)
}
