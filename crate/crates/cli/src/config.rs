//! Command-line flags, the JSON config file that mirrors them, and the
//! validated views the subcommands work from.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use fadres_core::enhancement::DEFAULT_INTERVAL;
use fadres_core::{AggregateMode, Coupling, GridRange, QuadratureSpec, RootFindSpec, Variant};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "fadres",
    version,
    about = "Three-body resonance enhancement of a light particle between two heavy bodies"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Enhancement factor at a single (t0, rho) point.
    Xi(Options),
    /// Enhancement factor on a (t0, rho) grid.
    Surface(Options),
    /// Enhancement factor averaged over a t0 interval, per rho.
    Bigxi(Options),
    /// Resonance distances at fixed t0.
    Resonances(Options),
    /// Poles of the pair amplitude in the complex t0 plane.
    Pole(Options),
    /// Dimensionless variables to CGS units.
    Convert(Options),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Xi(_) => "xi",
            Command::Surface(_) => "surface",
            Command::Bigxi(_) => "bigxi",
            Command::Resonances(_) => "resonances",
            Command::Pole(_) => "pole",
            Command::Convert(_) => "convert",
        }
    }

    pub fn options(&self) -> &Options {
        match self {
            Command::Xi(o)
            | Command::Surface(o)
            | Command::Bigxi(o)
            | Command::Resonances(o)
            | Command::Pole(o)
            | Command::Convert(o) => o,
        }
    }
}

/// Every flag is optional here so that a config file can supply it.
/// Flags a subcommand does not use are ignored.
#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct Options {
    /// Pair coupling strength.
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,

    /// Channel contraction: summed, diagonal or offdiag.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variant: Option<String>,

    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t0: Option<f64>,

    /// Grid of t0 values as start:stop:count.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t0_range: Option<String>,

    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,

    /// Grid of rho values as start:stop:count (resonances also takes start:stop).
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho_range: Option<String>,

    /// t0 interval of the aggregate as a:b.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub interval: Option<String>,

    /// Aggregate over the interval: mean or integral.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,

    /// Percentile of the denominator that bounds resonance regions.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub percentile: Option<f64>,

    /// Range parameter beta in cm^-1.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,

    /// Relative tolerance of quadrature and root finding.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,

    /// Output format: csv or json.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<String>,

    /// Output path; stdout when absent.
    #[arg(long)]
    #[serde(skip_serializing)]
    pub out: Option<PathBuf>,

    /// JSON file with default values for any of these flags.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

impl Options {
    /// Fills every unset field from `base`.
    pub fn or(self, base: Options) -> Options {
        Options {
            lambda: self.lambda.or(base.lambda),
            variant: self.variant.or(base.variant),
            t0: self.t0.or(base.t0),
            t0_range: self.t0_range.or(base.t0_range),
            rho: self.rho.or(base.rho),
            rho_range: self.rho_range.or(base.rho_range),
            interval: self.interval.or(base.interval),
            mode: self.mode.or(base.mode),
            percentile: self.percentile.or(base.percentile),
            beta: self.beta.or(base.beta),
            tol: self.tol.or(base.tol),
            format: self.format.or(base.format),
            out: self.out.or(base.out),
            config: self.config.or(base.config),
        }
    }

    pub fn from_file(path: &Path) -> Result<Options, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("bad config {}: {e}", path.display())))
    }

    /// Command-line values layered over the config file, if one is named.
    pub fn resolve(self) -> Result<Options, CliError> {
        match &self.config {
            Some(path) => {
                let file = Options::from_file(path)?;
                Ok(self.or(file))
            }
            None => Ok(self),
        }
    }

    pub fn coupling(&self) -> Result<Coupling, CliError> {
        let lambda = self.lambda.ok_or_else(|| missing("--lambda"))?;
        Ok(Coupling::new(lambda)?)
    }

    pub fn variant(&self) -> Result<Variant, CliError> {
        match &self.variant {
            Some(v) => Ok(v.parse()?),
            None => Ok(Variant::default()),
        }
    }

    pub fn mode(&self) -> Result<AggregateMode, CliError> {
        match self.mode.as_deref() {
            None | Some("mean") => Ok(AggregateMode::Mean),
            Some("integral") => Ok(AggregateMode::Integral),
            Some(other) => Err(CliError::Usage(format!(
                "unknown mode '{other}', expected mean or integral"
            ))),
        }
    }

    pub fn format(&self) -> Result<Format, CliError> {
        match self.format.as_deref() {
            None | Some("csv") => Ok(Format::Csv),
            Some("json") => Ok(Format::Json),
            Some(other) => Err(CliError::Usage(format!(
                "unknown format '{other}', expected csv or json"
            ))),
        }
    }

    pub fn quadrature(&self) -> Result<QuadratureSpec, CliError> {
        let default = QuadratureSpec::default();
        match self.tol {
            Some(tol) => Ok(QuadratureSpec::new(tol * 1e-2, tol, default.max_subdivisions)?),
            None => Ok(default),
        }
    }

    pub fn root_finding(&self) -> Result<RootFindSpec, CliError> {
        let default = RootFindSpec::default();
        match self.tol {
            Some(tol) => Ok(RootFindSpec::new(tol, default.max_iterations)?),
            None => Ok(default),
        }
    }

    pub fn t0_axis(&self) -> Result<Option<Axis>, CliError> {
        axis("--t0", self.t0, "--t0-range", self.t0_range.as_deref())
    }

    pub fn rho_axis(&self) -> Result<Option<Axis>, CliError> {
        axis("--rho", self.rho, "--rho-range", self.rho_range.as_deref())
    }

    pub fn interval(&self) -> Result<(f64, f64), CliError> {
        match &self.interval {
            None => Ok(DEFAULT_INTERVAL),
            Some(text) => match parse_span(text)? {
                (a, b, None) => Ok((a, b)),
                _ => Err(CliError::Usage(format!("--interval takes a:b, got '{text}'"))),
            },
        }
    }
}

fn missing(flag: &str) -> CliError {
    CliError::Usage(format!("{flag} is required"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// A single value or a span of values along one variable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Axis {
    Point(f64),
    Span {
        start: f64,
        stop: f64,
        count: Option<usize>,
    },
}

impl Axis {
    /// The grid this axis describes; a span needs an explicit count.
    pub fn grid(self, flag: &str) -> Result<GridRange, CliError> {
        match self {
            Axis::Span {
                start,
                stop,
                count: Some(n),
            } => Ok(GridRange::new(start, stop, n)?),
            _ => Err(CliError::Usage(format!("{flag} needs start:stop:count"))),
        }
    }

    pub fn values(self, flag: &str) -> Result<Vec<f64>, CliError> {
        match self {
            Axis::Point(x) => Ok(vec![x]),
            span => Ok(span.grid(flag)?.points()),
        }
    }
}

fn axis(point_flag: &str, point: Option<f64>, span_flag: &str, span: Option<&str>) -> Result<Option<Axis>, CliError> {
    match (point, span) {
        (Some(_), Some(_)) => Err(CliError::Usage(format!(
            "give either {point_flag} or {span_flag}, not both"
        ))),
        (Some(x), None) => Ok(Some(Axis::Point(x))),
        (None, Some(text)) => {
            let (start, stop, count) = parse_span(text)?;
            Ok(Some(Axis::Span { start, stop, count }))
        }
        (None, None) => Ok(None),
    }
}

/// Parses `a:b` or `a:b:n`.
pub fn parse_span(text: &str) -> Result<(f64, f64, Option<usize>), CliError> {
    let bad = || CliError::Usage(format!("expected a:b or a:b:n, got '{text}'"));
    let parts: Vec<&str> = text.split(':').collect();
    let number = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
    match parts.as_slice() {
        [a, b] => Ok((number(a)?, number(b)?, None)),
        [a, b, n] => {
            let n = n.trim().parse::<usize>().map_err(|_| bad())?;
            Ok((number(a)?, number(b)?, Some(n)))
        }
        _ => Err(bad()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spans() {
        assert_eq!(parse_span("1:6").unwrap(), (1.0, 6.0, None));
        assert_eq!(parse_span("-3:-0.2:50").unwrap(), (-3.0, -0.2, Some(50)));
        assert!(parse_span("1:2:3:4").is_err());
        assert!(parse_span("1:x").is_err());
        assert!(parse_span("1:2:2.5").is_err());
    }

    #[test]
    fn flags_override_file_values() {
        let file = Options {
            lambda: Some(-0.95),
            t0: Some(0.12),
            format: Some("json".into()),
            ..Options::default()
        };
        let flags = Options {
            lambda: Some(-0.5),
            ..Options::default()
        };
        let merged = flags.or(file);
        assert_eq!(merged.lambda, Some(-0.5));
        assert_eq!(merged.t0, Some(0.12));
        assert_eq!(merged.format.as_deref(), Some("json"));
    }

    #[test]
    fn config_keys_mirror_flags() {
        let o: Options = serde_json::from_str(r#"{"lambda": -0.97, "t0-range": "0.001:0.6:10", "rho": 2}"#).unwrap();
        assert_eq!(o.lambda, Some(-0.97));
        assert_eq!(o.t0_range.as_deref(), Some("0.001:0.6:10"));
        assert!(serde_json::from_str::<Options>(r#"{"lamda": 1}"#).is_err());
    }

    #[test]
    fn point_and_range_are_exclusive() {
        let o = Options {
            t0: Some(0.1),
            t0_range: Some("0:1:3".into()),
            ..Options::default()
        };
        assert!(o.t0_axis().is_err());
    }
}
