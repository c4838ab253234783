mod commands;
mod input;
mod output;

use clap::{Args, Parser, Subcommand, ValueEnum};
use commands::{execute, parse_window, CliError, Command, Job};
use input::{parse_input, FieldChoice};
use std::path::PathBuf;
use std::process::ExitCode;
use toric_tate::linalg::{PrimeField, Rationals};
use toric_tate::par;

#[derive(Parser)]
#[command(name = "toric-tate", version, about = "Sheaf cohomology on toric stacks via Tate resolutions")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Table,
    Json,
}

#[derive(Args)]
struct Common {
    /// Input file (JSON).
    file: PathBuf,
    /// Module to use when the file defines several.
    #[arg(long)]
    module: Option<String>,
    /// Degree window, `lo:hi` per class group coordinate, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    window: Option<String>,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Work over GF(p) instead of the field named in the file.
    #[arg(long)]
    prime: Option<u64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Cohomology table of the sheaf attached to a module.
    Cohomology {
        #[command(flatten)]
        common: Common,
        /// Truncation degree for the weighted construction.
        #[arg(long, allow_hyphen_values = true)]
        d: Option<i64>,
    },
    /// Tate resolution: generators in the window and the cohomology table.
    Tate {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        d: Option<i64>,
    },
    /// Betti numbers of a module, read off from the exterior side.
    Betti {
        #[command(flatten)]
        common: Common,
    },
    /// Čech computation of sheaf or local cohomology.
    Oracle {
        #[command(flatten)]
        common: Common,
        /// Local cohomology with respect to B instead of sheaf cohomology.
        #[arg(long)]
        local: bool,
    },
    /// Resolution of the diagonal.
    Diagonal {
        #[command(flatten)]
        common: Common,
        /// Check exactness and H_0 on the window.
        #[arg(long)]
        verify: bool,
    },
    /// 0-regularity and the resulting Betti number bounds.
    Regularity {
        #[command(flatten)]
        common: Common,
        /// Largest degree checked (rank 1).
        #[arg(long, allow_hyphen_values = true)]
        dmax: Option<i64>,
        /// Window for the regularity checks (rank at least 2).
        #[arg(long, allow_hyphen_values = true)]
        regularity_window: Option<String>,
    },
    /// Compare the fast table against the Čech oracle.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Also check N random monomial quotients, seeded by TATE_SEED.
        #[arg(long, default_value_t = 0)]
        random: usize,
    },
}

fn run(cli: Cli) -> Result<(String, bool), CliError> {
    let mut reg_window = None;
    let (common, command) = match cli.cmd {
        Cmd::Cohomology { common, d } => (common, Command::Cohomology { d }),
        Cmd::Tate { common, d } => (common, Command::Tate { d }),
        Cmd::Betti { common } => (common, Command::Betti),
        Cmd::Oracle { common, local } => (common, Command::Oracle { local }),
        Cmd::Diagonal { common, verify } => (common, Command::Diagonal { verify }),
        Cmd::Regularity { common, dmax, regularity_window } => {
            reg_window = regularity_window;
            (common, Command::Regularity { dmax, regularity_window: None })
        }
        Cmd::Verify { common, random } => {
            let seed = match std::env::var("TATE_SEED") {
                Ok(s) => s.parse().map_err(|_| CliError::Schema(format!("TATE_SEED={s:?} is not an integer")))?,
                Err(_) => 0,
            };
            (common, Command::Verify { random, seed })
        }
    };
    let text = std::fs::read_to_string(&common.file)
        .map_err(|e| CliError::Other(anyhow::anyhow!("reading {}: {e}", common.file.display())))?;
    let input = parse_input(&text).map_err(CliError::Schema)?;
    let r = input.x.r;
    let window = common.window.as_deref().map(|w| parse_window(w, r)).transpose()?;
    let command = match command {
        Command::Regularity { dmax, .. } => {
            Command::Regularity { dmax, regularity_window: reg_window.as_deref().map(|w| parse_window(w, r)).transpose()? }
        }
        c => c,
    };
    if common.threads > 0 {
        par::set_threads(common.threads);
    }
    let job = Job { input, module: common.module, window, command };
    let field = match common.prime {
        Some(p) => FieldChoice::Prime(p),
        None => job.input.field.clone(),
    };
    let report = match field {
        FieldChoice::Prime(p) => {
            let k = PrimeField::new(p).map_err(|e| CliError::Schema(e.to_string()))?;
            execute(&k, &job)?
        }
        FieldChoice::Rationals => execute(&Rationals, &job)?,
    };
    let out = match common.format {
        Format::Table => report.render(),
        Format::Json => report.to_json() + "\n",
    };
    Ok((out, report.ok()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((out, ok)) => {
            print!("{out}");
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(5)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
