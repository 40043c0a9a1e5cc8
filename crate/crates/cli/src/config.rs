//! Run configuration: flat `key = value` lines with dotted section keys.
//!
//! ```text
//! # comment
//! contract = call:75
//! grid.n = 4
//! qnute.domain_size = 2
//! sweep.options = call:75; strangle:50,100
//! ```
//!
//! Every key is optional. [`RunConfig::to_canonical`] prints all keys in a
//! fixed order, which is what `parse` followed by serialize produces.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use qnute::{BasisChoice, Boundary, OptionContract, OptionKind, TermStrategy};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, got {text:?}")]
    Syntax { line: usize, text: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: key `{key}` given twice")]
    Duplicate { line: usize, key: String },
    #[error("invalid value for `{key}`: {message}")]
    Value { key: String, message: String },
}

fn value_err(key: &str, message: impl ToString) -> ConfigError {
    ConfigError::Value { key: key.to_string(), message: message.to_string() }
}

/// How each fitted unitary's terms are grouped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StrategyChoice {
    /// One term for exact mode, windows of `D` with stride 1 otherwise.
    #[default]
    Auto,
    Fixed(TermStrategy),
}

impl StrategyChoice {
    pub fn resolve(self, n: usize, domain_size: usize) -> TermStrategy {
        match self {
            StrategyChoice::Fixed(s) => s,
            StrategyChoice::Auto if domain_size >= n => TermStrategy::Single,
            StrategyChoice::Auto => TermStrategy::Windows { size: domain_size, stride: 1 },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub contract: OptionContract,
    pub x0: f64,
    pub xn: f64,
    pub n: usize,
    pub r: f64,
    pub sigma: f64,
    pub maturity: f64,
    pub steps: usize,
    /// `None` means exact mode (`D = n`).
    pub domain_size: Option<usize>,
    pub basis: BasisChoice,
    pub term_strategy: StrategyChoice,
    pub lstsq_rel_tol: f64,
    pub track_step_fidelity: bool,
    pub boundary: Boundary,
    pub sweep_options: Vec<OptionContract>,
    pub sweep_n: Vec<usize>,
    pub sweep_domain_sizes: Vec<usize>,
    pub output_dir: Option<PathBuf>,
    pub output_formats: Vec<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            contract: OptionContract::with_default_strikes(OptionKind::Call),
            x0: 0.0,
            xn: 150.0,
            n: 4,
            r: 0.04,
            sigma: 0.2,
            maturity: 3.0,
            steps: 500,
            domain_size: None,
            basis: BasisChoice::Auto,
            term_strategy: StrategyChoice::Auto,
            lstsq_rel_tol: 1e-8,
            track_step_fidelity: true,
            boundary: Boundary::Linear,
            sweep_options: vec![OptionContract::with_default_strikes(OptionKind::Call)],
            sweep_n: vec![2, 3, 4, 5, 6],
            sweep_domain_sizes: vec![2, 4, 6],
            output_dir: None,
            output_formats: vec!["csv".into()],
        }
    }
}

const KEYS: &[&str] = &[
    "contract",
    "grid.x0",
    "grid.xn",
    "grid.n",
    "params.r",
    "params.sigma",
    "schedule.maturity",
    "schedule.steps",
    "qnute.domain_size",
    "qnute.basis_mode",
    "qnute.term_strategy",
    "qnute.lstsq_rel_tol",
    "qnute.track_step_fidelity",
    "hamiltonian.boundary",
    "sweep.options",
    "sweep.n",
    "sweep.domain_sizes",
    "output.dir",
    "output.formats",
];

fn parse_num<V: FromStr>(key: &str, v: &str) -> Result<V, ConfigError>
where
    V::Err: std::fmt::Display,
{
    v.parse::<V>().map_err(|e| value_err(key, format!("{v:?}: {e}")))
}

fn parse_list<V: FromStr>(key: &str, v: &str) -> Result<Vec<V>, ConfigError>
where
    V::Err: std::fmt::Display,
{
    v.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()).map(|t| parse_num(key, t)).collect()
}

fn join<V: ToString>(items: &[V], sep: &str) -> String {
    items.iter().map(ToString::to_string).collect::<Vec<_>>().join(sep)
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = RunConfig::default();
        let mut seen = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (key, value) = body
                .split_once('=')
                .ok_or_else(|| ConfigError::Syntax { line, text: raw.trim().to_string() })?;
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                return Err(ConfigError::UnknownKey { line, key: key.into() });
            }
            if seen.contains(&key) {
                return Err(ConfigError::Duplicate { line, key: key.into() });
            }
            seen.push(key);
            cfg.set(key, value)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn set(&mut self, key: &str, v: &str) -> Result<(), ConfigError> {
        match key {
            "contract" => self.contract = v.parse().map_err(|e| value_err(key, e))?,
            "grid.x0" => self.x0 = parse_num(key, v)?,
            "grid.xn" => self.xn = parse_num(key, v)?,
            "grid.n" => self.n = parse_num(key, v)?,
            "params.r" => self.r = parse_num(key, v)?,
            "params.sigma" => self.sigma = parse_num(key, v)?,
            "schedule.maturity" => self.maturity = parse_num(key, v)?,
            "schedule.steps" => self.steps = parse_num(key, v)?,
            "qnute.domain_size" => {
                self.domain_size = if v.eq_ignore_ascii_case("exact") { None } else { Some(parse_num(key, v)?) }
            }
            "qnute.basis_mode" => self.basis = v.parse().map_err(|e| value_err(key, e))?,
            "qnute.term_strategy" => {
                self.term_strategy = if v.eq_ignore_ascii_case("auto") {
                    StrategyChoice::Auto
                } else {
                    StrategyChoice::Fixed(v.parse().map_err(|e| value_err(key, e))?)
                }
            }
            "qnute.lstsq_rel_tol" => self.lstsq_rel_tol = parse_num(key, v)?,
            "qnute.track_step_fidelity" => self.track_step_fidelity = parse_num(key, v)?,
            "hamiltonian.boundary" => self.boundary = v.parse().map_err(|e| value_err(key, e))?,
            "sweep.options" => {
                self.sweep_options = v
                    .split(';')
                    .map(str::trim)
                    .filter(|t| !t.is_empty())
                    .map(|t| t.parse().map_err(|e| value_err(key, e)))
                    .collect::<Result<_, _>>()?
            }
            "sweep.n" => self.sweep_n = parse_list(key, v)?,
            "sweep.domain_sizes" => self.sweep_domain_sizes = parse_list(key, v)?,
            "output.dir" => self.output_dir = if v.is_empty() { None } else { Some(PathBuf::from(v)) },
            "output.formats" => self.output_formats = parse_list(key, v)?,
            _ => unreachable!("key list checked by the caller"),
        }
        Ok(())
    }

    /// Checks that do not depend on the subcommand.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.x0.is_finite() && self.xn.is_finite() && self.x0 >= 0.0 && self.x0 < self.xn) {
            return Err(value_err("grid.x0", format!("need 0 <= x0 < xn, got [{}, {}]", self.x0, self.xn)));
        }
        if !(self.r.is_finite() && self.r >= 0.0) {
            return Err(value_err("params.r", "must be non-negative"));
        }
        if !(self.sigma.is_finite() && self.sigma >= 0.0) {
            return Err(value_err("params.sigma", "must be non-negative"));
        }
        if !(self.maturity.is_finite() && self.maturity >= 0.0) {
            return Err(value_err("schedule.maturity", "must be non-negative"));
        }
        if !(self.lstsq_rel_tol > 0.0 && self.lstsq_rel_tol < 1.0) {
            return Err(value_err("qnute.lstsq_rel_tol", "must lie in (0, 1)"));
        }
        if let Some(bad) = self.output_formats.iter().find(|f| f.as_str() != "csv") {
            return Err(value_err("output.formats", format!("unsupported format {bad:?} (only csv)")));
        }
        Ok(())
    }

    pub fn domain_size_for(&self, n: usize) -> usize {
        self.domain_size.unwrap_or(n)
    }

    pub fn to_canonical(&self) -> String {
        let mut out = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        put("contract", self.contract.to_string());
        put("grid.x0", self.x0.to_string());
        put("grid.xn", self.xn.to_string());
        put("grid.n", self.n.to_string());
        put("params.r", self.r.to_string());
        put("params.sigma", self.sigma.to_string());
        put("schedule.maturity", self.maturity.to_string());
        put("schedule.steps", self.steps.to_string());
        put("qnute.domain_size", self.domain_size.map_or("exact".into(), |d| d.to_string()));
        put("qnute.basis_mode", self.basis.to_string());
        put(
            "qnute.term_strategy",
            match self.term_strategy {
                StrategyChoice::Auto => "auto".into(),
                StrategyChoice::Fixed(s) => s.to_string(),
            },
        );
        put("qnute.lstsq_rel_tol", format!("{:e}", self.lstsq_rel_tol));
        put("qnute.track_step_fidelity", self.track_step_fidelity.to_string());
        put("hamiltonian.boundary", self.boundary.to_string());
        put("sweep.options", join(&self.sweep_options, "; "));
        put("sweep.n", join(&self.sweep_n, ", "));
        put("sweep.domain_sizes", join(&self.sweep_domain_sizes, ", "));
        put("output.dir", self.output_dir.as_ref().map_or(String::new(), |p| p.display().to_string()));
        put("output.formats", join(&self.output_formats, ", "));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_text_gives_defaults() {
        let cfg = RunConfig::parse("# nothing\n\n").unwrap();
        assert_eq!(cfg, RunConfig::default());
        assert_eq!((cfg.x0, cfg.xn, cfg.maturity, cfg.steps, cfg.r, cfg.sigma), (0.0, 150.0, 3.0, 500, 0.04, 0.2));
    }

    #[test]
    fn parses_sections() {
        let text = "contract = strangle:50,100\ngrid.n = 3  # small\nqnute.domain_size = 2\n\
                    qnute.term_strategy = windows(2,1)\nqnute.basis_mode = full\n\
                    sweep.options = call:75; put:80\nsweep.n = 2, 3\nhamiltonian.boundary = central\n";
        let cfg = RunConfig::parse(text).unwrap();
        assert_eq!(cfg.contract.to_string(), "strangle:50,100");
        assert_eq!(cfg.n, 3);
        assert_eq!(cfg.domain_size, Some(2));
        assert_eq!(cfg.term_strategy, StrategyChoice::Fixed(TermStrategy::Windows { size: 2, stride: 1 }));
        assert_eq!(cfg.sweep_options.len(), 2);
        assert_eq!(cfg.sweep_n, vec![2, 3]);
        assert_eq!(cfg.boundary, Boundary::Central);
    }

    #[test]
    fn canonical_round_trip() {
        let text = "sweep.options = put:75;call:80\ngrid.xn=200\nqnute.lstsq_rel_tol = 0.000001\noutput.dir = runs/a\n";
        let cfg = RunConfig::parse(text).unwrap();
        let canon = cfg.to_canonical();
        assert_eq!(RunConfig::parse(&canon).unwrap(), cfg);
        assert_eq!(RunConfig::parse(&canon).unwrap().to_canonical(), canon);
        assert_eq!(RunConfig::default().to_canonical(), RunConfig::parse(&RunConfig::default().to_canonical()).unwrap().to_canonical());
    }

    #[test]
    fn errors_name_the_field() {
        let err = RunConfig::parse("contract = call:").unwrap_err();
        assert!(err.to_string().contains("contract"), "{err}");
        assert!(matches!(RunConfig::parse("grid.q = 1"), Err(ConfigError::UnknownKey { .. })));
        assert!(matches!(RunConfig::parse("grid.n = 2\ngrid.n = 3"), Err(ConfigError::Duplicate { line: 2, .. })));
        assert!(matches!(RunConfig::parse("just words"), Err(ConfigError::Syntax { line: 1, .. })));
        assert!(RunConfig::parse("grid.n = two").unwrap_err().to_string().contains("grid.n"));
        assert!(RunConfig::parse("grid.x0 = 200").is_err());
        assert!(RunConfig::parse("output.formats = json").is_err());
    }

    #[test]
    fn strategy_resolution() {
        assert_eq!(StrategyChoice::Auto.resolve(4, 4), TermStrategy::Single);
        assert_eq!(StrategyChoice::Auto.resolve(4, 2), TermStrategy::Windows { size: 2, stride: 1 });
    }
}
