use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use fatlab::verifier::SuiteId;
use fatlab_cli::report::Format;
use fatlab_cli::{parse_field, run_command, write_report, Command, RunConfig, SpecSource, EXIT_ERROR};

/// Exact invariants and containment checks for symbolic powers of fat points.
#[derive(Parser, Debug)]
#[command(name = "fatlab", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// Scheme-spec file, or `M-control` for the irrelevant ideal.
    #[arg(long, global = true)]
    spec: Option<String>,

    /// `rationals`, `prime:<p>` or a bare prime; overrides the spec file.
    #[arg(long, global = true)]
    field: Option<String>,

    #[arg(long, global = true, value_enum, default_value_t = OutFormat::Json)]
    format: OutFormat,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Result cache directory; defaults to $FATLAB_CACHE_DIR when set.
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,

    #[arg(long, global = true)]
    m_max: Option<usize>,

    #[arg(long, global = true)]
    r_max: Option<usize>,

    #[arg(long, global = true)]
    t_max: Option<usize>,

    #[arg(long, global = true)]
    k_max: Option<usize>,

    /// Comma-separated seeds for general-point corpora.
    #[arg(long, global = true, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OutFormat {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Initial degree of each symbolic power.
    Alpha,
    /// Least degree with two coprime forms, for each symbolic power (plane only).
    Beta,
    /// Hilbert function of each symbolic power up to --t-max (default: its regularity).
    Hilbert,
    /// Regularity of each symbolic power.
    Regularity,
    /// Exact Waldschmidt bracket from alpha of the first --m-max symbolic powers.
    Gamma,
    /// Decide I^(m) ⊆ M^j I^r.
    Contains {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        j: usize,
        #[arg(long)]
        r: usize,
    },
    /// Run a verification suite.
    Suite {
        #[arg(value_parser = parse_suite)]
        id: SuiteId,
    },
}

fn parse_suite(s: &str) -> Result<SuiteId, String> {
    s.parse().map_err(|e: fatlab::Error| {
        let ids: Vec<&str> = SuiteId::ALL.iter().map(|i| i.as_str()).collect();
        format!("{e}; expected one of {}", ids.join(", "))
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let field = match cli.field.as_deref().map(parse_field).transpose() {
        Ok(f) => f,
        Err(e) => {
            eprintln!("fatlab: {e}");
            return ExitCode::from(EXIT_ERROR as u8);
        }
    };
    let command = match cli.command {
        Cmd::Alpha => Command::Alpha,
        Cmd::Beta => Command::Beta,
        Cmd::Hilbert => Command::Hilbert,
        Cmd::Regularity => Command::Regularity,
        Cmd::Gamma => Command::Gamma,
        Cmd::Contains { m, j, r } => Command::Contains { m, j, r },
        Cmd::Suite { id } => Command::Suite { id },
    };
    let config = RunConfig {
        command,
        spec: cli.spec.as_deref().map(SpecSource::parse_arg),
        field,
        m_max: cli.m_max,
        r_max: cli.r_max,
        t_max: cli.t_max,
        k_max: cli.k_max,
        seeds: cli.seeds,
        format: match cli.format {
            OutFormat::Json => Format::Json,
            OutFormat::Csv => Format::Csv,
        },
        out: cli.out,
        cache_dir: cli.cache_dir,
    };
    let doc = run_command(&config);
    if let fatlab_cli::report::ReportBody::Error { message } = &doc.body {
        eprintln!("fatlab: {message}");
    }
    match write_report(&config, &doc) {
        Ok(Some(bytes)) => {
            if std::io::stdout().write_all(&bytes).is_err() {
                return ExitCode::from(EXIT_ERROR as u8);
            }
        }
        Ok(None) => {}
        Err(e) => {
            eprintln!("fatlab: {e}");
            return ExitCode::from(EXIT_ERROR as u8);
        }
    }
    ExitCode::from(doc.exit_status as u8)
}
