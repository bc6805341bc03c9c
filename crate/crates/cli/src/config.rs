//! Experiment configuration: a single JSON document plus command-line overrides.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Deserialize;
use tensor_growth::cartan::{CartanType, RootDatum, Weight};
use tensor_growth::gaussian::DEFAULT_TRUNCATION;
use tensor_growth::tensor_growth::{Backend, GrowthOptions, Mode, RepSpec};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SummandConfig {
    pub highest_weight: Vec<i64>,
    #[serde(default = "one")]
    pub multiplicity: u64,
}

fn one() -> u64 {
    1
}

fn default_n_max() -> usize {
    10
}

fn default_budget() -> u64 {
    8 << 30
}

fn default_truncation() -> f64 {
    DEFAULT_TRUNCATION
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub group: String,
    #[serde(default)]
    pub rep: Vec<SummandConfig>,
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default)]
    pub backend: Backend,
    #[serde(default)]
    pub window: Option<(usize, usize)>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default = "default_budget")]
    pub memory_budget_bytes: u64,
    #[serde(default = "default_truncation")]
    pub truncation: f64,
    /// Powers compared by `gauss`; defaults to `[n_max]`.
    #[serde(default)]
    pub n_list: Option<Vec<usize>>,
    /// Allowed `|r_hat - target|` for `fit`; defaults to `0.1 max(1, u)`.
    #[serde(default)]
    pub tolerance: Option<f64>,
    /// Precomputed series for `fit` instead of running the engine.
    #[serde(default)]
    pub series_csv: Option<PathBuf>,
    /// Character file checked by `check` instead of the tensor powers of `rep`.
    #[serde(default)]
    pub fixture: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
    /// Fill the `seconds` column of series.csv (makes output run-dependent).
    #[serde(default)]
    pub timing: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("defaults")
    }
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub group: Option<String>,
    pub rep: Option<String>,
    pub n_max: Option<usize>,
}

/// Parses `1,0:2/0,1` into summands: `/` separates summands, `,` coordinates,
/// and an optional `:m` gives the multiplicity.
pub fn parse_rep_flag(s: &str) -> Result<Vec<SummandConfig>, CliError> {
    s.split('/')
        .enumerate()
        .map(|(i, part)| {
            let bad = |what: &str| CliError::Config(format!("--rep summand {i}: {what} in `{part}`"));
            let (coords, mult) = match part.split_once(':') {
                Some((c, m)) => (c, m.trim().parse().map_err(|_| bad("bad multiplicity"))?),
                None => (part, 1),
            };
            let highest_weight = coords
                .split(',')
                .map(|k| k.trim().parse::<i64>().map_err(|_| bad("bad coordinate")))
                .collect::<Result<_, _>>()?;
            Ok(SummandConfig {
                highest_weight,
                multiplicity: mult,
            })
        })
        .collect()
}

/// A validated configuration with resolved paths.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub config: ExperimentConfig,
    pub spec: RepSpec,
    pub out_dir: PathBuf,
}

impl Experiment {
    pub fn load(config_path: Option<&Path>, out: Option<&Path>, overrides: &Overrides) -> Result<Self, CliError> {
        let (mut config, base) = match config_path {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
                let config: ExperimentConfig = serde_json::from_str(&text).map_err(|e| {
                    CliError::Config(format!("{}: line {} column {}: {e}", path.display(), e.line(), e.column()))
                })?;
                let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
                (config, base)
            }
            None => (ExperimentConfig::default(), PathBuf::new()),
        };
        if let Some(g) = &overrides.group {
            config.group = g.clone();
        }
        if let Some(r) = &overrides.rep {
            config.rep = parse_rep_flag(r)?;
        }
        if let Some(n) = overrides.n_max {
            config.n_max = n;
        }
        let resolve = |p: &Option<PathBuf>| p.as_ref().map(|p| if p.is_absolute() { p.clone() } else { base.join(p) });
        config.series_csv = resolve(&config.series_csv);
        config.fixture = resolve(&config.fixture);
        let out_dir = match out {
            Some(o) => o.to_path_buf(),
            None => resolve(&config.output_dir).unwrap_or_else(|| PathBuf::from(".")),
        };
        let spec = config.validate()?;
        Ok(Experiment { config, spec, out_dir })
    }

    pub fn growth_options(&self) -> GrowthOptions {
        GrowthOptions {
            mode: self.config.mode,
            backend: self.config.backend,
            memory_budget_bytes: self.config.memory_budget_bytes,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<RepSpec, CliError> {
        if self.group.trim().is_empty() {
            return Err(CliError::Config("field `group`: missing".into()));
        }
        let ct: CartanType = self
            .group
            .parse()
            .map_err(|e| CliError::Config(format!("field `group`: {e}")))?;
        let datum = Arc::new(RootDatum::new(&ct));
        if self.rep.is_empty() {
            return Err(CliError::Config("field `rep`: at least one summand required".into()));
        }
        for (i, s) in self.rep.iter().enumerate() {
            if s.highest_weight.len() != datum.rank() {
                return Err(CliError::Config(format!(
                    "field `rep[{i}].highest_weight`: length {} does not match rank {} of {ct}",
                    s.highest_weight.len(),
                    datum.rank()
                )));
            }
        }
        if self.n_max == 0 {
            return Err(CliError::Config("field `n_max`: must be at least 1".into()));
        }
        if let Some((lo, hi)) = self.window {
            if lo == 0 || lo > hi || hi > self.n_max {
                return Err(CliError::Config(format!(
                    "field `window`: [{lo}, {hi}] is not inside [1, {}]",
                    self.n_max
                )));
            }
        }
        if !(self.truncation > 0.0) {
            return Err(CliError::Config("field `truncation`: must be positive".into()));
        }
        let summands = self
            .rep
            .iter()
            .map(|s| (Weight(s.highest_weight.clone()), s.multiplicity))
            .collect();
        RepSpec::new(datum, summands).map_err(|e| CliError::Config(format!("field `rep`: {e}")))
    }
}
