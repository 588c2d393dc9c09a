//! One function per subcommand. Each returns its artifacts; nothing touches
//! the file system here.

mod bump;
mod linear;
mod moments;
mod nonlinear;
mod riccati;

use hierarchy_forge::scalar::format_f64;
use hierarchy_forge::Rational;

use crate::config::{Backend, Command, ExperimentConfig};
use crate::{Artifact, Failure};

pub fn run(cfg: &ExperimentConfig) -> Result<Vec<Artifact>, Failure> {
    macro_rules! by_backend {
        ($($f:ident)::+) => {
            match cfg.backend {
                Backend::Exact => $($f)::+::<Rational>(cfg),
                Backend::Float => $($f)::+::<f64>(cfg),
            }
        };
    }
    match cfg.command {
        Command::Riccati => by_backend!(riccati::run),
        Command::LinearRepro => by_backend!(linear::repro),
        Command::Table1 => by_backend!(linear::table1),
        Command::Fig1 => by_backend!(bump::fig1),
        Command::Fig2 => by_backend!(bump::fig2),
        Command::Fig3 => by_backend!(linear::fig3),
        Command::NonlinearCoverage => nonlinear::coverage(cfg),
        Command::Moments => by_backend!(moments::run),
    }
}

fn f(v: f64) -> String {
    format_f64(v)
}
