mod commands;
mod config;
mod equation;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use phigal_core::ec_char3::BaseField;
use phigal_core::local_fields::install_catalog;
use phigal_core::padic::set_default_working_precision;

use commands::{Outcome, EXIT_FAILURE};
use config::CliConfig;

/// Filtered (phi, Gal)-modules of elliptic curves over Q3 with potentially
/// good reduction: classification and table verification.
#[derive(Parser)]
#[command(name = "phigal", version)]
struct Cli {
    #[command(flatten)]
    config: CliConfig,
    /// Field catalog file to use instead of the built-in one.
    #[arg(long, global = true)]
    catalog: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check conditions and admissibility of a module file and name its class.
    Classify { file: PathBuf },
    /// Rebuild the classification table and the curve-pair table.
    VerifyTable,
    /// Point count, trace and automorphisms of a curve over F3 or F9.
    EcInfo {
        #[arg(long, value_enum, default_value_t = FieldArg::F3)]
        field: FieldArg,
        /// `y^2 = x^3 - x + 1`, or coefficients `a4,a6` / `a2,a4,a6` / `a1,a2,a3,a4,a6`.
        curve: String,
    },
    /// Catalog fields.
    Fields {
        #[command(subcommand)]
        command: FieldsCommand,
    },
}

#[derive(Subcommand)]
enum FieldsCommand {
    /// List catalog fields, optionally those with ramification index `e`.
    List {
        #[arg(long)]
        e: Option<u32>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FieldArg {
    F3,
    F9,
}

fn setup(cli: &Cli) -> Result<(), String> {
    if !set_default_working_precision(cli.config.precision) {
        return Err(format!("precision {} out of range", cli.config.precision));
    }
    if let Some(path) = &cli.catalog {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        install_catalog(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = match setup(&cli) {
        Err(e) => Outcome {
            code: EXIT_FAILURE,
            report: serde_json::json!({ "status": "invalid", "error": e }),
            human: String::new(),
            error: Some(e),
        },
        Ok(()) => match &cli.command {
            Command::Classify { file } => commands::classify_file(file, &cli.config),
            Command::VerifyTable => commands::verify(&cli.config),
            Command::EcInfo { field, curve } => {
                let f = match field {
                    FieldArg::F3 => BaseField::F3,
                    FieldArg::F9 => BaseField::F9,
                };
                commands::ec_info(f, curve)
            }
            Command::Fields { command: FieldsCommand::List { e } } => commands::fields_list(*e),
        },
    };
    if cli.config.json() {
        println!("{}", serde_json::to_string_pretty(&out.report).expect("report serializes"));
    } else {
        print!("{}", out.human);
    }
    if let Some(e) = &out.error {
        eprintln!("error: {e}");
    }
    ExitCode::from(out.code as u8)
}
