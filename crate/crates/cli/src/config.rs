//! System definitions read from TOML.
//!
//! ```toml
//! map = [1, 2, 3, 0]            # image of each point; identity when absent
//!
//! [space]
//! points = ["a", "b", "c", "d"] # optional labels
//! weights = ["1/4", "1/4", "0.25", 0.25]
//!
//! [options]
//! log_base = "e"                # or "2"
//! numeric = "rational"          # or "float"
//! tolerance = 1e-9              # float mode only
//!
//! [partitions]
//! A = [["1", "1", "0", "0"], ["0", "0", "1", "1"]]
//! ```
//!
//! Numbers may be written as `"p/q"` strings, decimal strings or TOML
//! numbers. Decimals are read digit by digit, so `"0.1"` is exactly `1/10`.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use mv_entropy::{DynamicalSystem, Error, FiniteSpace, LogBase, MvElement, NumericMode, Partition, Scalar};
use serde::Deserialize;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Literal {
    Text(String),
    Integer(i64),
    Float(f64),
}

impl Literal {
    fn text(&self) -> String {
        match self {
            Literal::Text(s) => s.trim().to_string(),
            Literal::Integer(i) => i.to_string(),
            Literal::Float(f) => format!("{f}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSpace {
    #[serde(default)]
    pub points: Option<Vec<String>>,
    pub weights: Vec<Literal>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawOptions {
    #[serde(default)]
    pub log_base: Option<String>,
    #[serde(default)]
    pub numeric: Option<String>,
    #[serde(default)]
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    #[serde(default)]
    pub map: Option<Vec<i64>>,
    pub space: RawSpace,
    #[serde(default)]
    pub options: RawOptions,
    #[serde(default)]
    pub partitions: BTreeMap<String, Vec<Vec<Literal>>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Numeric {
    Rational,
    Float,
}

impl Numeric {
    pub fn name(self) -> &'static str {
        match self {
            Numeric::Rational => "rational",
            Numeric::Float => "float",
        }
    }
}

pub fn parse_log_base(s: &str) -> CliResult<LogBase> {
    match s {
        "e" => Ok(LogBase::Natural),
        "2" => Ok(LogBase::Two),
        other => Err(CliError::field(
            "options.log_base",
            format!("expected \"e\" or \"2\", got {other:?}"),
        )),
    }
}

pub fn parse_numeric(s: &str) -> CliResult<Numeric> {
    match s {
        "rational" => Ok(Numeric::Rational),
        "float" => Ok(Numeric::Float),
        other => Err(CliError::field(
            "options.numeric",
            format!("expected \"rational\" or \"float\", got {other:?}"),
        )),
    }
}

/// A config file together with its raw text, which feeds the input digest.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedConfig {
    pub text: String,
    pub config: SystemConfig,
}

impl LoadedConfig {
    pub fn from_path(path: &Path) -> CliResult<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
        Self::from_text(&text)
    }

    pub fn from_text(text: &str) -> CliResult<Self> {
        let config: SystemConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        Ok(LoadedConfig {
            text: text.to_string(),
            config,
        })
    }
}

/// A validated system with its named partitions.
#[derive(Debug, Clone)]
pub struct System<S: Scalar> {
    pub dynamics: DynamicalSystem<S>,
    pub partitions: BTreeMap<String, Partition<S>>,
}

impl<S: Scalar> System<S> {
    pub fn space(&self) -> &Arc<FiniteSpace<S>> {
        self.dynamics.space()
    }

    pub fn partition(&self, name: &str) -> CliResult<&Partition<S>> {
        self.partitions.get(name).ok_or_else(|| {
            let known: Vec<&str> = self.partitions.keys().map(String::as_str).collect();
            CliError::Config(format!("unknown partition `{name}` (defined: {})", known.join(", ")))
        })
    }
}

impl SystemConfig {
    pub fn log_base(&self) -> CliResult<Option<LogBase>> {
        self.options.log_base.as_deref().map(parse_log_base).transpose()
    }

    pub fn numeric(&self) -> CliResult<Option<Numeric>> {
        self.options.numeric.as_deref().map(parse_numeric).transpose()
    }

    /// Validates everything and builds the system in the arithmetic `S`.
    pub fn build<S: Scalar>(&self, tolerance: Option<f64>) -> CliResult<System<S>> {
        let tolerance = tolerance
            .or(self.options.tolerance)
            .unwrap_or(NumericMode::DEFAULT_TOLERANCE);
        if !S::EXACT && !(tolerance > 0.0 && tolerance.is_finite()) {
            return Err(CliError::field(
                "options.tolerance",
                format!("must be positive, got {tolerance}"),
            ));
        }
        let space = self.build_space::<S>(tolerance)?;
        let dynamics = self.build_map(&space)?;
        let mut partitions = BTreeMap::new();
        for (name, rows) in &self.partitions {
            partitions.insert(name.clone(), build_partition(&space, name, rows)?);
        }
        Ok(System { dynamics, partitions })
    }

    fn build_space<S: Scalar>(&self, tolerance: f64) -> CliResult<Arc<FiniteSpace<S>>> {
        let weights = self
            .space
            .weights
            .iter()
            .enumerate()
            .map(|(i, w)| S::parse_literal(&w.text()).map_err(|e| CliError::field(format!("space.weights[{i}]"), e)))
            .collect::<CliResult<Vec<S>>>()?;
        let ids = match &self.space.points {
            Some(ids) if ids.len() != weights.len() => {
                return Err(CliError::field(
                    "space.points",
                    format!("{} labels for {} weights", ids.len(), weights.len()),
                ))
            }
            Some(ids) => ids.clone(),
            None => (0..weights.len()).map(|i| format!("p{i}")).collect(),
        };
        FiniteSpace::with_tolerance(ids, weights, tolerance).map_err(|e| match e {
            Error::NegativeWeight { point } => CliError::field(format!("space.weights[{point}]"), e),
            Error::DuplicatePoint(_) => CliError::field("space.points", e),
            other => CliError::field("space.weights", other),
        })
    }

    fn build_map<S: Scalar>(&self, space: &Arc<FiniteSpace<S>>) -> CliResult<DynamicalSystem<S>> {
        let Some(raw) = &self.map else {
            return Ok(DynamicalSystem::identity(space));
        };
        if raw.len() != space.len() {
            return Err(CliError::field(
                "map",
                format!("{} entries for {} points", raw.len(), space.len()),
            ));
        }
        let map = raw
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                usize::try_from(v)
                    .ok()
                    .filter(|&v| v < space.len())
                    .ok_or_else(|| CliError::field(format!("map[{i}]"), format!("image {v} is not a point index")))
            })
            .collect::<CliResult<Vec<usize>>>()?;
        DynamicalSystem::new(space, map).map_err(|e| CliError::field("map", e))
    }
}

fn build_partition<S: Scalar>(
    space: &Arc<FiniteSpace<S>>,
    name: &str,
    rows: &[Vec<Literal>],
) -> CliResult<Partition<S>> {
    let field = format!("partitions.{name}");
    if rows.is_empty() {
        return Err(CliError::field(&field, "partition needs at least one row"));
    }
    let mut elements = Vec::with_capacity(rows.len());
    for (r, row) in rows.iter().enumerate() {
        if row.len() != space.len() {
            return Err(CliError::field(
                format!("{field}[{r}]"),
                format!("{} values for {} points", row.len(), space.len()),
            ));
        }
        let values = row
            .iter()
            .enumerate()
            .map(|(p, v)| S::parse_literal(&v.text()).map_err(|e| CliError::field(format!("{field}[{r}][{p}]"), e)))
            .collect::<CliResult<Vec<S>>>()?;
        let element = MvElement::new(space, values).map_err(|e| match e {
            Error::OutOfUnitInterval { point, .. } => CliError::field(format!("{field}[{r}][{point}]"), e),
            other => CliError::field(format!("{field}[{r}]"), other),
        })?;
        elements.push(element);
    }
    Partition::new(elements).map_err(|e| CliError::field(field, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use mv_entropy::Rational;

    const CYCLE: &str = r#"
map = [1, 2, 3, 0]

[space]
points = ["a", "b", "c", "d"]
weights = ["1/4", "1/4", 0.25, "0.25"]

[partitions]
A = [[1, 1, 0, 0], ["0", "0", "1", "1"]]
"#;

    #[test]
    fn parses_mixed_literals() {
        let cfg = LoadedConfig::from_text(CYCLE).unwrap().config;
        let sys = cfg.build::<Rational>(None).unwrap();
        assert_eq!(sys.space().len(), 4);
        assert_eq!(sys.dynamics.tau().map(), &[1, 2, 3, 0]);
        assert!(sys.partition("A").unwrap().is_idempotent());
        assert!(sys.partition("B").is_err());
    }

    fn error_for(text: &str) -> String {
        let cfg = LoadedConfig::from_text(text).unwrap().config;
        match cfg.build::<Rational>(None) {
            Err(CliError::Config(msg)) => msg,
            other => panic!("expected a config error, got {other:?}"),
        }
    }

    #[test]
    fn errors_name_the_field_and_point() {
        let msg = error_for("[space]\nweights = [\"1/2\", \"x\"]\n");
        assert!(msg.starts_with("space.weights[1]"), "{msg}");
        let msg = error_for("map = [0, 5]\n[space]\nweights = [\"1/2\", \"1/2\"]\n");
        assert!(msg.starts_with("map[1]"), "{msg}");
        let msg =
            error_for("[space]\nweights = [\"1/2\", \"1/2\"]\n[partitions]\nA = [[\"1\", \"3/2\"], [\"0\", \"0\"]]\n");
        assert!(msg.starts_with("partitions.A[0][1]"), "{msg}");
        let msg =
            error_for("[space]\nweights = [\"1/2\", \"1/2\"]\n[partitions]\nA = [[\"1\", \"1/2\"], [\"0\", \"0\"]]\n");
        assert!(msg.starts_with("partitions.A") && msg.contains("point 1"), "{msg}");
        let msg = error_for("[space]\nweights = [\"1/2\", \"1/3\"]\n");
        assert!(msg.starts_with("space.weights"), "{msg}");
        let msg = error_for("map = [1, 1]\n[space]\nweights = [\"1/2\", \"1/2\"]\n");
        assert!(msg.starts_with("map:") && msg.contains("point"), "{msg}");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(LoadedConfig::from_text("[space]\nweights = [1]\nextra = 2\n").is_err());
    }
}
