//! Model files, grids and the CLI error type.

use std::path::Path;

use lnsum_core::{LognormalComponent, SumModel};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(lnsum_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<lnsum_core::Error> for CliError {
    fn from(e: lnsum_core::Error) -> Self {
        use lnsum_core::Error as E;
        match e {
            E::InvalidArgument(_) | E::Domain(_) | E::EngineAxisMismatch { .. } => CliError::Config(e.to_string()),
            other => CliError::Numerical(other),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub fn config(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

/// Parses a model document: one component per line as `mu=<value> sigma=<value>`
/// (comma or whitespace separated, `mu` defaults to 0). Blank lines and
/// `#` comments are ignored.
pub fn parse_model(text: &str) -> CliResult<SumModel> {
    let mut components = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let mut line = raw.split('#').next().unwrap_or("").replace('\t', " ");
        while line.contains(" =") || line.contains("= ") {
            line = line.replace(" =", "=").replace("= ", "=");
        }
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (mut mu, mut sigma) = (0.0, None);
        for field in line.split(|c: char| c == ',' || c.is_whitespace()).filter(|f| !f.is_empty()) {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| config(format!("line {}: expected key=value, got '{field}'", lineno + 1)))?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| config(format!("line {}: '{value}' is not a number", lineno + 1)))?;
            match key.trim() {
                "mu" => mu = value,
                "sigma" => sigma = Some(value),
                other => return Err(config(format!("line {}: unknown key '{other}'", lineno + 1))),
            }
        }
        let sigma = sigma.ok_or_else(|| config(format!("line {}: missing sigma", lineno + 1)))?;
        components.push(LognormalComponent::new(mu, sigma).map_err(|e| config(format!("line {}: {e}", lineno + 1)))?);
    }
    SumModel::new(components).map_err(|e| config(format!("model file: {e}")))
}

pub fn read_model(path: &Path) -> CliResult<SumModel> {
    let text = std::fs::read_to_string(path).map_err(|e| config(format!("cannot read {}: {e}", path.display())))?;
    parse_model(&text)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub log: bool,
}

impl GridSpec {
    pub fn points(&self) -> CliResult<Vec<f64>> {
        let GridSpec { min, max, count, log } = *self;
        if count == 1 && min == max {
            return Ok(vec![min]);
        }
        if !(min < max) || count < 2 || !min.is_finite() || !max.is_finite() {
            return Err(config(format!("grid needs min < max and count >= 2, got [{min}, {max}] x {count}")));
        }
        if log && !(min > 0.0) {
            return Err(config("a log grid needs a positive minimum"));
        }
        let last = (count - 1) as f64;
        let mut g: Vec<f64> = if log {
            let (l, h) = (min.ln(), max.ln());
            (0..count).map(|i| (l + (h - l) * i as f64 / last).exp()).collect()
        } else {
            (0..count).map(|i| min + (max - min) * i as f64 / last).collect()
        };
        g[0] = min;
        g[count - 1] = max;
        Ok(g)
    }
}
