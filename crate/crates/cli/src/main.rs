mod commands;
mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use config::{Cli, ExperimentConfig};

const EXIT_INTERNAL: u8 = 1;
const EXIT_VALIDATION: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Debug)]
pub enum Failure {
    Validation(String),
    Internal(String),
}

impl From<hierarchy_forge::Error> for Failure {
    fn from(e: hierarchy_forge::Error) -> Self {
        match e {
            hierarchy_forge::Error::InternalInconsistency(_) => Failure::Internal(e.to_string()),
            _ => Failure::Validation(e.to_string()),
        }
    }
}

/// Header plus rows, written in one go.
pub struct Csv {
    name: &'static str,
    text: String,
}

impl Csv {
    pub fn new(name: &'static str, header: &[&str]) -> Self {
        Csv { name, text: header.join(",") + "\n" }
    }

    pub fn row<I: IntoIterator<Item = String>>(&mut self, cells: I) {
        let cells: Vec<String> = cells.into_iter().collect();
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
    }
}

pub enum Artifact {
    Csv(Csv),
    Json(&'static str, serde_json::Value),
}

fn write_artifacts(dir: &Path, artifacts: Vec<Artifact>) -> Result<Vec<PathBuf>, Failure> {
    std::fs::create_dir_all(dir).map_err(|e| Failure::Validation(format!("cannot create {}: {e}", dir.display())))?;
    let mut written = Vec::new();
    for artifact in artifacts {
        let (name, bytes) = match artifact {
            Artifact::Csv(csv) => (csv.name, csv.text),
            Artifact::Json(name, value) => {
                let mut s = serde_json::to_string_pretty(&value).expect("JSON values serialize");
                s.push('\n');
                (name, s)
            }
        };
        let path = dir.join(name);
        std::fs::write(&path, bytes).map_err(|e| Failure::Validation(format!("cannot write {}: {e}", path.display())))?;
        written.push(path);
    }
    Ok(written)
}

fn run(cfg: &ExperimentConfig) -> Result<Vec<PathBuf>, Failure> {
    let artifacts = commands::run(cfg)?;
    write_artifacts(&cfg.out, artifacts)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                ErrorKind::InvalidSubcommand
                | ErrorKind::MissingSubcommand
                | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand
                | ErrorKind::UnknownArgument => EXIT_USAGE,
                _ => EXIT_VALIDATION,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = ExperimentConfig::resolve(cli.command, cli.flags).and_then(|cfg| run(&cfg));
    match outcome {
        Ok(paths) => {
            for p in paths {
                println!("wrote {}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(Failure::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_VALIDATION)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal inconsistency: {msg}");
            ExitCode::from(EXIT_INTERNAL)
        }
    }
}
