use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use monopole_qes::cli::{self, Command, Exit, Format, RunConfig};
use monopole_qes::Error;

#[derive(Parser)]
#[command(name = "monopole-qes", version, about = "QES spectra near a global monopole with AB flux")]
struct Args {
    #[command(subcommand)]
    command: Sub,

    /// JSON configuration file, or `-` for standard input
    #[arg(long, global = true)]
    config: Option<String>,

    /// Named configuration (fig1a..fig2d, coulomb, kratzer, suite, certification, phi-sweep, l-sweep)
    #[arg(long, global = true)]
    preset: Option<String>,

    /// Write the table here instead of standard output
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = OutFormat::Csv, global = true)]
    format: OutFormat,
}

#[derive(Subcommand, Clone, Copy)]
enum Sub {
    /// Constrained energy levels for the requested modes
    Spectrum,
    /// Effective-potential profiles
    Potential,
    /// Certify analytic levels against the numerical eigen-solver
    Verify,
    /// Energies along a phi, alpha or l axis
    Sweep,
}

#[derive(ValueEnum, Clone, Copy)]
enum OutFormat {
    Csv,
    Json,
}

fn load(args: &Args) -> Result<Vec<RunConfig>, Error> {
    match (&args.config, &args.preset) {
        (Some(_), Some(_)) => Err(Error::Config("use either --config or --preset, not both".into())),
        (None, None) => Err(Error::Config("one of --config or --preset is required".into())),
        (None, Some(name)) => cli::preset(name),
        (Some(path), None) => {
            let text = if path == "-" {
                let mut s = String::new();
                std::io::stdin().read_to_string(&mut s)?;
                s
            } else {
                std::fs::read_to_string(path)?
            };
            Ok(vec![RunConfig::from_json(&text)?])
        }
    }
}

fn execute(args: &Args) -> Result<Exit, Error> {
    let command = match args.command {
        Sub::Spectrum => Command::Spectrum,
        Sub::Potential => Command::Potential,
        Sub::Verify => Command::Verify,
        Sub::Sweep => Command::Sweep,
    };
    let format = match args.format {
        OutFormat::Csv => Format::Csv,
        OutFormat::Json => Format::Json,
    };
    let configs = load(args)?;
    let (table, exit) = cli::run(command, &configs)?;
    let text = table.render(format)?;
    match &args.output {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(exit)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(exit) => ExitCode::from(exit.code() as u8),
        Err(e) => {
            eprintln!("error: {e}");
            let exit = if e.is_configuration() { Exit::Config } else { Exit::VerifyFailed };
            ExitCode::from(exit.code() as u8)
        }
    }
}
