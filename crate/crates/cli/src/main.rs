mod commands;
mod report;

use cgmt_core::{Error, Family};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "cgmt", version, about = "Exact Hausdorff premeasures and subset constructions on binary trees")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Flags shared by every command. Each command reads the ones it needs.
#[derive(Args, Clone, Debug)]
pub struct Common {
    /// Tree-spec file, or a builtin name: full, branch-left, branch-right, dyadic:P/2^E.
    /// Defaults to full. With --code, the code is validated against it.
    #[arg(long)]
    pub tree: Option<String>,
    /// Exponent s as P/Q.
    #[arg(long, default_value = "1/2")]
    pub s: String,
    #[arg(long, default_value_t = 0)]
    pub n: u32,
    /// Target measure: a dyadic (3/4, 1/2^5, 0.75) or a ring literal Q:r0,r1,...
    #[arg(long)]
    pub c: Option<String>,
    #[arg(long)]
    pub eps: Option<String>,
    #[arg(long)]
    pub theta: Option<String>,
    #[arg(long)]
    pub stages: Option<u32>,
    #[arg(long)]
    pub depth: Option<u32>,
    #[arg(long)]
    pub window: Option<u32>,
    #[arg(long)]
    pub cap: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// H̃^s_n at blocks 0..=depth of a tree or of a code from a report.
    Measure {
        #[command(flatten)]
        common: Common,
        /// DAG code, or a report whose results carry one.
        #[arg(long)]
        code: Option<PathBuf>,
        /// Include the minimum cover at each block.
        #[arg(long)]
        witness: bool,
    },
    /// Check a cover file, or recheck every certificate of a besicovitch report.
    CoverVerify {
        #[command(flatten)]
        common: Common,
        #[arg(long, conflicts_with = "certificate")]
        cover: Option<PathBuf>,
        #[arg(long)]
        certificate: Option<PathBuf>,
        #[arg(long)]
        code: Option<PathBuf>,
    },
    /// Subset with every block from m to depth in [c, c + eps).
    Extract {
        #[command(flatten)]
        common: Common,
    },
    /// As extract, starting from and preserving the pruned tree.
    ExtractPruned {
        #[command(flatten)]
        common: Common,
    },
    /// Make every level-n subtree theta-thin.
    Thin {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        code: Option<PathBuf>,
    },
    /// Staged extraction with certificates H̃_{n0} ≥ c and H̃_n < c + 2^{-n}.
    Besicovitch {
        #[command(flatten)]
        common: Common,
    },
    /// Path through a tree of promised dyadic measure c.
    LebesguePath {
        #[command(flatten)]
        common: Common,
    },
    /// Meet seeded random substring codes along a path.
    Baire {
        #[command(flatten)]
        common: Common,
    },
    /// Build and decode a range gadget for an injection table.
    Gadget {
        #[command(flatten)]
        common: Common,
        /// Gadget name or "all".
        #[arg(long, default_value = "all")]
        kind: String,
        /// Comma-separated table values; random from the seed when absent.
        #[arg(long)]
        table: Option<String>,
        /// Horizon of a random table.
        #[arg(long, default_value_t = 16)]
        horizon: usize,
    },
    /// Dynamic program against the brute-force oracle on random markings.
    VerifySuite {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 200)]
        trials: u32,
    },
}

pub enum CliError {
    Io(String),
    Usage(String),
    Core(Error),
    Mismatch(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Mismatch(_) => 8,
            CliError::Core(e) => match e.family() {
                Family::Input => 2,
                Family::Encoding => 3,
                Family::Validation => 4,
                Family::Measure => 5,
                Family::Construction => 6,
                Family::Search => 7,
            },
        }
    }

    fn describe(&self) -> (String, String) {
        match self {
            CliError::Io(m) => ("Io".into(), m.clone()),
            CliError::Usage(m) => ("Usage".into(), m.clone()),
            CliError::Mismatch(m) => ("VerificationMismatch".into(), m.clone()),
            CliError::Core(e) => (e.kind().into(), e.to_string()),
        }
    }
}

impl Common {
    pub fn tree_name(&self) -> &str {
        self.tree.as_deref().unwrap_or("full")
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Rendered output plus an optional failure raised after the report is built.
pub struct Outcome {
    pub text: String,
    pub failure: Option<CliError>,
}

fn run(cli: Cli) -> CliResult<(Outcome, Option<PathBuf>)> {
    use commands as c;
    let (out, common) = match cli.command {
        Command::Measure { common, code, witness } => (c::measure(&common, code.as_deref(), witness)?, common),
        Command::CoverVerify { common, cover, certificate, code } => {
            (c::cover_verify(&common, cover.as_deref(), certificate.as_deref(), code.as_deref())?, common)
        }
        Command::Extract { common } => (c::extract(&common, false)?, common),
        Command::ExtractPruned { common } => (c::extract(&common, true)?, common),
        Command::Thin { common, code } => (c::thin(&common, code.as_deref())?, common),
        Command::Besicovitch { common } => (c::besicovitch(&common)?, common),
        Command::LebesguePath { common } => (c::lebesgue(&common)?, common),
        Command::Baire { common } => (c::baire(&common)?, common),
        Command::Gadget { common, kind, table, horizon } => (c::gadget(&common, &kind, table.as_deref(), horizon)?, common),
        Command::VerifySuite { common, trials } => (c::verify_suite(&common, trials)?, common),
    };
    Ok((out, common.output))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let failure = match run(cli) {
        Ok((out, path)) => {
            let written = match path {
                Some(p) => std::fs::write(&p, &out.text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
                None => std::io::stdout().write_all(out.text.as_bytes()).map_err(|e| CliError::Io(e.to_string())),
            };
            written.err().or(out.failure)
        }
        Err(e) => Some(e),
    };
    match failure {
        None => ExitCode::SUCCESS,
        Some(e) => {
            let (kind, message) = e.describe();
            let body = serde_json::json!({ "error": kind, "message": message, "exit_code": e.code() });
            eprintln!("{body}");
            ExitCode::from(e.code())
        }
    }
}
