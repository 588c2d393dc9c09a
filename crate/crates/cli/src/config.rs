use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hierarchy_forge::{Rational, Scalar};
use num::{BigInt, Zero};
use serde::Deserialize;

use crate::Failure;

pub const OUT_ENV: &str = "HIERARCHY_FORGE_OUT";

#[derive(Parser, Debug)]
#[command(name = "hierarchy-forge", version, about = "Truncated-series experiments for infinite ODE hierarchies")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Reparametrization classes and determining-equation residuals of the single Riccati equation
    Riccati,
    /// Reparametrized constants and the flow identity for the linear hierarchy
    LinearRepro,
    /// Convergence domains of both solutions for the four families of initial data
    Table1,
    /// Two global solutions and their agreement intervals (γ = 1 by default)
    Fig1,
    /// Same as fig1 with a narrow bump (γ = 0.001 by default)
    Fig2,
    /// First four levels of both linear solutions with y₀ = G(0,ε)·e^{−ε}1
    Fig3,
    /// Coverage of the special solutions by the λ Ansatz
    NonlinearCoverage,
    /// Moments: closed form vs solved form vs truncation
    Moments,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Riccati => "riccati",
            Command::LinearRepro => "linear-repro",
            Command::Table1 => "table1",
            Command::Fig1 => "fig1",
            Command::Fig2 => "fig2",
            Command::Fig3 => "fig3",
            Command::NonlinearCoverage => "nonlinear-coverage",
            Command::Moments => "moments",
        }
    }

    fn backends(&self) -> &'static [Backend] {
        match self {
            Command::NonlinearCoverage => &[Backend::Float],
            // factorial-sized coefficients and cancellation in G(0,ε)·v
            Command::Table1 => &[Backend::Exact],
            _ => &[Backend::Exact, Backend::Float],
        }
    }
}

#[derive(ValueEnum, Deserialize, Debug, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Exact,
    Float,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::Exact => "exact",
            Backend::Float => "float",
        })
    }
}

/// Numbers are kept as text until the backend is known, so `0.1` stays 1/10
/// on the exact backend.
#[derive(Args, Debug, Default, Clone)]
pub struct Flags {
    /// Number of hierarchy levels N
    #[arg(long, global = true)]
    pub depth: Option<usize>,
    /// Series order K
    #[arg(long, global = true)]
    pub order: Option<usize>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub epsilon: Option<String>,
    /// Bump width γ
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub gamma: Option<String>,
    /// Agreement threshold δ
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub delta: Option<String>,
    /// Expansion point
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub a: Option<String>,
    #[arg(long, global = true)]
    pub backend: Option<Backend>,
    /// Output directory (default: $HIERARCHY_FORGE_OUT, else the current directory)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// End time for `moments`
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub tmax: Option<String>,
    /// TOML file whose keys override the flags
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Deserialize, Debug, Clone, PartialEq)]
#[serde(untagged)]
enum Number {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Number {
    fn text(self) -> String {
        match self {
            Number::Int(v) => v.to_string(),
            Number::Float(v) => v.to_string(),
            Number::Text(s) => s,
        }
    }
}

#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    depth: Option<usize>,
    order: Option<usize>,
    epsilon: Option<Number>,
    gamma: Option<Number>,
    delta: Option<Number>,
    a: Option<Number>,
    backend: Option<Backend>,
    out: Option<PathBuf>,
    tmax: Option<Number>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub command: Command,
    pub depth: usize,
    pub order: usize,
    pub epsilon: String,
    pub gamma: String,
    pub delta: String,
    pub a: String,
    pub tmax: String,
    pub backend: Backend,
    pub out: PathBuf,
}

impl ExperimentConfig {
    pub fn resolve(command: Command, mut flags: Flags) -> Result<Self, Failure> {
        if let Some(path) = flags.config.take() {
            let file = read_config(&path)?;
            let set = |slot: &mut Option<String>, v: Option<Number>| {
                if let Some(v) = v {
                    *slot = Some(v.text());
                }
            };
            flags.depth = file.depth.or(flags.depth);
            flags.order = file.order.or(flags.order);
            set(&mut flags.epsilon, file.epsilon);
            set(&mut flags.gamma, file.gamma);
            set(&mut flags.delta, file.delta);
            set(&mut flags.a, file.a);
            set(&mut flags.tmax, file.tmax);
            flags.backend = file.backend.or(flags.backend);
            flags.out = file.out.or(flags.out);
        }
        let backend = flags.backend.unwrap_or(command.backends()[0]);
        if !command.backends().contains(&backend) {
            return Err(Failure::Validation(format!("{} does not support the {backend} backend", command.name())));
        }
        let out = flags
            .out
            .or_else(|| std::env::var_os(OUT_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("."));
        let cfg = ExperimentConfig {
            command,
            depth: flags.depth.unwrap_or(8),
            order: flags.order.unwrap_or(match command {
                Command::Table1 => 200,
                Command::Moments => 80,
                _ => 40,
            }),
            epsilon: flags.epsilon.unwrap_or_else(|| "1".into()),
            gamma: flags.gamma.unwrap_or_else(|| if command == Command::Fig2 { "0.001" } else { "1" }.into()),
            delta: flags.delta.unwrap_or_else(|| "0.01".into()),
            a: flags.a.unwrap_or_else(|| if command == Command::NonlinearCoverage { "1" } else { "0" }.into()),
            tmax: flags.tmax.unwrap_or_else(|| "0.5".into()),
            backend,
            out,
        };
        if cfg.depth == 0 {
            return Err(Failure::Validation("--depth must be at least 1".into()));
        }
        for (name, text) in [("epsilon", &cfg.epsilon), ("gamma", &cfg.gamma), ("delta", &cfg.delta), ("a", &cfg.a), ("tmax", &cfg.tmax)] {
            parse_rational(text).map_err(|e| Failure::Validation(format!("--{name}: {e}")))?;
        }
        Ok(cfg)
    }

    pub fn scalar<S: Scalar>(&self, text: &str) -> S {
        S::from_rational(&parse_rational(text).expect("validated in resolve"))
    }
}

fn read_config(path: &Path) -> Result<ConfigFile, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Validation(format!("cannot read config {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| Failure::Validation(format!("config {}: {e}", path.display())))
}

/// `p/q`, integers and decimals with an optional exponent, all exactly.
pub fn parse_rational(text: &str) -> Result<Rational, String> {
    let t = text.trim();
    let bad = || format!("not a number: {text:?}");
    if let Some((p, q)) = t.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
        let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
        if q.is_zero() {
            return Err(format!("zero denominator in {text:?}"));
        }
        return Ok(Rational::new(p, q));
    }
    let (mantissa, exponent) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty()
        || !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let all: String = format!("{int_part}{frac_part}");
    let mut value = Rational::from_integer(BigInt::from_str(&all).map_err(|_| bad())?);
    let shift = exponent - frac_part.len() as i32;
    let ten = Rational::from_integer(BigInt::from(10));
    let scale = num::pow(ten, shift.unsigned_abs() as usize);
    value = if shift >= 0 { value * scale } else { value / scale };
    if negative {
        value = -value;
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimals_are_exact() {
        assert_eq!(parse_rational("0.1").unwrap(), Rational::ratio(1, 10));
        assert_eq!(parse_rational("-2.5e-3").unwrap(), Rational::ratio(-1, 400));
        assert_eq!(parse_rational("3/6").unwrap(), Rational::ratio(1, 2));
        assert_eq!(parse_rational("1e3").unwrap(), Rational::ratio(1000, 1));
        assert_eq!(parse_rational(".5").unwrap(), Rational::ratio(1, 2));
        for bad in ["", "x", "1/0", "1..2", "-", "e3"] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
    }
}
