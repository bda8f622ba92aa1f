use clap::{Parser, Subcommand};
use cryomux_cli::{load_scenario, registry, run_scenario, write_outputs, CliError, Format};
use std::path::PathBuf;
use std::process::ExitCode;

/// Runs the cryomux scenarios and writes plot-ready tables.
#[derive(Parser)]
#[command(name = "cryomux", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file and write its output tables.
    Run {
        file: PathBuf,
        #[arg(long, env = "CRYOMUX_OUT_DIR", default_value = ".")]
        out_dir: PathBuf,
        /// Overrides the seed in the file.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// List the registered scenarios.
    List {
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Parse and check a scenario file without running it.
    Validate {
        file: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn list(format: Option<Format>) -> String {
    match format {
        None => registry()
            .iter()
            .map(|e| format!("{:<18} {}\n", e.name, e.description))
            .collect(),
        Some(Format::Csv) => {
            let mut s = String::from("name,description\n");
            for e in registry() {
                s.push_str(&format!("{},\"{}\"\n", e.name, e.description.replace('"', "\"\"")));
            }
            s
        }
        Some(Format::Json) => {
            let v: Vec<_> = registry()
                .iter()
                .map(|e| serde_json::json!({ "name": e.name, "description": e.description }))
                .collect();
            serde_json::to_string_pretty(&v).expect("json values serialize") + "\n"
        }
    }
}

fn execute(command: Command) -> Result<(), CliError> {
    match command {
        Command::Run {
            file,
            out_dir,
            seed,
            format,
        } => {
            let scenario = load_scenario(&file, seed)?;
            let output = run_scenario(&scenario)?;
            for path in write_outputs(&scenario, &output, format, &out_dir)? {
                println!("{}", path.display());
            }
        }
        Command::List { format } => print!("{}", list(format)),
        Command::Validate { file, seed } => {
            let s = load_scenario(&file, seed)?;
            println!("ok {} sha256:{} seed {}", s.name, s.hash, s.seed);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let _ = e.print();
            // Exit 2 is reserved for unknown scenarios.
            return ExitCode::from(1);
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
