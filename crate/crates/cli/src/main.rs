use std::net::{IpAddr, SocketAddr};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use supercluster::compat::Mode;
use supercluster_cli::commands::{self, Format, Outcome};
use supercluster_cli::EXIT_MALFORMED;

#[derive(Parser)]
#[command(name = "supercluster", version, about = "Quantum cluster superalgebra toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
#[group(multiple = false)]
struct ModeFlags {
    /// Require every d_j > 0.
    #[arg(long)]
    strict: bool,
    /// Also accept d_j = 0 on zero columns of B.
    #[arg(long)]
    permissive: bool,
}

impl ModeFlags {
    fn get(&self) -> Option<Mode> {
        match (self.strict, self.permissive) {
            (true, _) => Some(Mode::Strict),
            (_, true) => Some(Mode::Permissive),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Pretty,
    Latex,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check compatibility of the pair in FILE.
    Validate {
        file: PathBuf,
        #[command(flatten)]
        mode: ModeFlags,
    },
    /// Apply a mutation sequence and print the resulting variables.
    Mutate {
        file: PathBuf,
        /// Comma-separated 1-based vertices.
        #[arg(long, default_value = "")]
        seq: String,
        #[arg(long, value_enum, default_value = "pretty")]
        format: FormatArg,
        #[command(flatten)]
        mode: ModeFlags,
    },
    /// Certify exact, integral divisions along a sequence.
    LaurentCheck {
        file: PathBuf,
        #[arg(long, default_value = "")]
        seq: String,
        /// Check every allowed sequence up to this length instead.
        #[arg(long, conflicts_with = "seq")]
        all_sequences: Option<usize>,
        #[command(flatten)]
        mode: ModeFlags,
    },
    /// Compare the two allowedness tests on an exhaustive quiver family.
    AllowedReport {
        #[arg(long, default_value_t = 3)]
        max_n: usize,
        #[arg(long, default_value_t = 2)]
        max_m: usize,
        #[arg(long, default_value_t = 2)]
        max_mult: u32,
        /// Number of discrepancies to list.
        #[arg(long, default_value_t = 50)]
        sample: usize,
    },
    /// Run the HTTP session service.
    Serve {
        #[arg(long, env = "SUPERCLUSTER_PORT", default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: IpAddr,
        /// Directory for per-session JSON snapshots.
        #[arg(long)]
        state_dir: Option<PathBuf>,
    },
}

fn finish(o: Outcome) -> ExitCode {
    print!("{}", o.stdout);
    eprint!("{}", o.stderr);
    ExitCode::from(o.code as u8)
}

fn seq_or_exit(text: &str) -> Result<Vec<usize>, ExitCode> {
    commands::parse_seq(text).map_err(|e| {
        eprintln!("error: {e}");
        ExitCode::from(EXIT_MALFORMED as u8)
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_MALFORMED as u8) } else { ExitCode::SUCCESS };
        }
    };
    match cli.cmd {
        Cmd::Validate { file, mode } => finish(commands::validate(&file, mode.get())),
        Cmd::Mutate { file, seq, format, mode } => {
            let seq = match seq_or_exit(&seq) {
                Ok(s) => s,
                Err(c) => return c,
            };
            let format = match format {
                FormatArg::Json => Format::Json,
                FormatArg::Pretty => Format::Pretty,
                FormatArg::Latex => Format::Latex,
            };
            finish(commands::mutate(&file, &seq, format, mode.get()))
        }
        Cmd::LaurentCheck { file, seq, all_sequences, mode } => {
            let seq = match seq_or_exit(&seq) {
                Ok(s) => s,
                Err(c) => return c,
            };
            finish(commands::laurent_check(&file, &seq, all_sequences, mode.get()))
        }
        Cmd::AllowedReport { max_n, max_m, max_mult, sample } => {
            finish(commands::allowed_report(max_n, max_m, max_mult, sample))
        }
        Cmd::Serve { port, host, state_dir } => {
            let rt = tokio::runtime::Runtime::new().expect("tokio runtime");
            match rt.block_on(supercluster_cli::server::serve(SocketAddr::new(host, port), state_dir)) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::FAILURE
                }
            }
        }
    }
}
