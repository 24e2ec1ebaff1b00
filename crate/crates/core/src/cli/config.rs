//! Experiment configs: JSON objects, or the same fields given as flags.

use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::jacobi::{JacobiCoeffs, MeasureSpec};
use crate::realset::{fat_cantor, GapSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Capacity,
    Green,
    Cantor,
    Coeffs,
    Sumrule,
    Theorem,
    Homogeneity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// One run. `set`, `measure` and `jacobi` accept the shorthand strings
/// described on [`parse_set`], [`parse_measure`] and [`parse_jacobi`], or
/// inline JSON objects.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Command,
    #[serde(default)]
    pub set: Option<Value>,
    #[serde(default)]
    pub measure: Option<Value>,
    /// Explicit coefficients whose spectral measure is `measure`.
    #[serde(default)]
    pub jacobi: Option<Value>,
    /// Step count, coefficient count, Cantor level or `n_max`, by command.
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub quad_order: Option<usize>,
    /// Sampling density for profiles and homogeneity grids.
    #[serde(default)]
    pub samples: Option<usize>,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
    /// Plot data file; two whitespace-separated columns per series.
    #[serde(default)]
    pub plot: Option<PathBuf>,
}

pub const MAX_N: usize = 5000;
pub const MAX_SAMPLES: usize = 100_000;
pub const MAX_QUAD_ORDER: usize = 4096;

impl ExperimentConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        let c: ExperimentConfig = serde_json::from_str(s)?;
        c.validate()?;
        Ok(c)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut c = Self::from_json(&text)?;
        c.resolve_relative(path.parent().unwrap_or(Path::new(".")));
        Ok(c)
    }

    /// Output and `@file` references in a config file are relative to it.
    fn resolve_relative(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let Some(p) = self.out.as_mut() {
            fix(p);
        }
        if let Some(p) = self.plot.as_mut() {
            fix(p);
        }
        for v in [&mut self.set, &mut self.measure, &mut self.jacobi].into_iter().flatten() {
            if let Value::String(s) = v {
                if let Some(rest) = s.strip_prefix('@') {
                    let mut p = PathBuf::from(rest);
                    fix(&mut p);
                    *s = format!("@{}", p.display());
                }
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        let range = |name: &str, v: Option<usize>, lo: usize, hi: usize| match v {
            Some(x) if x < lo || x > hi => Err(Error::InvalidInput(format!("{name} = {x} outside [{lo}, {hi}]"))),
            _ => Ok(()),
        };
        range("n", self.n, 1, MAX_N)?;
        range("quad_order", self.quad_order, 4, MAX_QUAD_ORDER)?;
        range("samples", self.samples, 1, MAX_SAMPLES)?;
        let needs_set = !matches!(self.command, Command::Cantor);
        if needs_set && self.set.is_none() {
            return Err(Error::InvalidInput(format!("{:?} needs a set", self.command).to_lowercase()));
        }
        for v in [&self.set, &self.measure, &self.jacobi].into_iter().flatten() {
            if let Value::String(s) = v {
                if let Some(p) = s.strip_prefix('@') {
                    if !Path::new(p).exists() {
                        return Err(Error::InvalidInput(format!("referenced file {p} does not exist")));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn set(&self) -> Result<Option<GapSet>> {
        self.set.as_ref().map(parse_set).transpose()
    }

    pub fn measure(&self) -> Result<MeasureSpec> {
        match &self.measure {
            None => Ok(MeasureSpec::equilibrium()),
            Some(v) => parse_measure(v),
        }
    }

    pub fn jacobi(&self) -> Result<Option<JacobiCoeffs>> {
        self.jacobi.as_ref().map(parse_jacobi).transpose()
    }
}

fn at_file(s: &str) -> Result<Option<String>> {
    match s.strip_prefix('@') {
        Some(p) => Ok(Some(std::fs::read_to_string(p)?)),
        None => Ok(None),
    }
}

/// A gap set from `"fat_cantor:n"`, `"interval:a,b"`, `"@file.json"`, a JSON
/// string or a JSON object `{"alpha", "beta", "gaps"}`.
pub fn parse_set(v: &Value) -> Result<GapSet> {
    match v {
        Value::String(s) => {
            if let Some(text) = at_file(s)? {
                return Ok(serde_json::from_str(&text)?);
            }
            if let Some(level) = s.strip_prefix("fat_cantor:") {
                let level: u32 = level
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidInput(format!("bad fat_cantor level in {s:?}")))?;
                return fat_cantor(level);
            }
            if let Some(ends) = s.strip_prefix("interval:") {
                let parts: Vec<f64> = ends
                    .split(',')
                    .map(|p| p.trim().parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| Error::InvalidInput(format!("bad interval in {s:?}")))?;
                if parts.len() != 2 {
                    return Err(Error::InvalidInput(format!("interval needs two endpoints: {s:?}")));
                }
                return GapSet::interval(parts[0], parts[1]);
            }
            Ok(serde_json::from_str(s)?)
        }
        other => Ok(serde_json::from_value(other.clone())?),
    }
}

/// A measure from `"equilibrium"`, `"@file.json"`, a JSON string or object.
pub fn parse_measure(v: &Value) -> Result<MeasureSpec> {
    match v {
        Value::String(s) if s == "equilibrium" => Ok(MeasureSpec::equilibrium()),
        Value::String(s) => match at_file(s)? {
            Some(text) => Ok(serde_json::from_str(&text)?),
            None => Ok(serde_json::from_str(s)?),
        },
        other => Ok(serde_json::from_value(other.clone())?),
    }
}

/// Coefficients from `"free_b1:x"`, `"@file.csv"`, `"@file.json"`, a JSON
/// string or object.
pub fn parse_jacobi(v: &Value) -> Result<JacobiCoeffs> {
    match v {
        Value::String(s) => {
            if let Some(b1) = s.strip_prefix("free_b1:") {
                let b1: f64 = b1
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidInput(format!("bad b1 in {s:?}")))?;
                return JacobiCoeffs::free_with_b1(b1);
            }
            if let Some(p) = s.strip_prefix('@') {
                let text = std::fs::read_to_string(p)?;
                return if p.ends_with(".csv") {
                    JacobiCoeffs::from_csv(&text)
                } else {
                    JacobiCoeffs::from_json(&text)
                };
            }
            JacobiCoeffs::from_json(s)
        }
        other => Ok(serde_json::from_value(other.clone())?),
    }
}

/// Command-line flags.
#[derive(Debug, Parser)]
#[command(name = "potlab", version, about = "Potential theory and Jacobi sum rules on finite-gap sets")]
pub struct Args {
    /// JSON config file; other flags are then ignored.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub command: Option<Command>,
    #[arg(long)]
    pub set: Option<String>,
    #[arg(long)]
    pub measure: Option<String>,
    #[arg(long)]
    pub jacobi: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub quad_order: Option<usize>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub plot: Option<PathBuf>,
}

/// Inline JSON stays JSON; anything else is a shorthand string.
fn flag_value(s: String) -> Value {
    if s.trim_start().starts_with('{') {
        serde_json::from_str(&s).unwrap_or(Value::String(s))
    } else {
        Value::String(s)
    }
}

impl Args {
    pub fn into_config(self) -> Result<ExperimentConfig> {
        if let Some(path) = &self.config {
            return ExperimentConfig::from_file(path);
        }
        let command = self
            .command
            .ok_or_else(|| Error::InvalidInput("either --config or --command is required".into()))?;
        let c = ExperimentConfig {
            command,
            set: self.set.map(flag_value),
            measure: self.measure.map(flag_value),
            jacobi: self.jacobi.map(flag_value),
            n: self.n,
            quad_order: self.quad_order,
            samples: self.samples,
            out: self.out,
            format: self.format,
            plot: self.plot,
        };
        c.validate()?;
        Ok(c)
    }
}
