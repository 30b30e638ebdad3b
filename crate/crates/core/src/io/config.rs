use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generator::GenConfig;
use crate::losses::SimilarityConfig;
use crate::stats::StatsOptions;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Generate,
    Stats,
    Radviz,
    Preinterp,
    Validate,
    LossesSelftest,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LossesOptions {
    pub similarity: SimilarityConfig,
    /// Random fixtures per loss in the self-test.
    pub selftest_cases: usize,
}

impl Default for LossesOptions {
    fn default() -> Self {
        Self {
            similarity: SimilarityConfig::default(),
            selftest_cases: 64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PreinterpOptions {
    pub ratio: f64,
}

impl Default for PreinterpOptions {
    fn default() -> Self {
        Self { ratio: 0.125 }
    }
}

/// One run of the command-line tool. Sections for other commands may be
/// present and are validated too.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    /// Master seed; overrides `generate.seed`.
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub generate: GenConfig,
    #[serde(default)]
    pub stats: StatsOptions,
    #[serde(default)]
    pub losses: LossesOptions,
    #[serde(default)]
    pub preinterp: PreinterpOptions,
    #[serde(default)]
    pub input: Option<PathBuf>,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            seed: 0,
            generate: GenConfig::default(),
            stats: StatsOptions::default(),
            losses: LossesOptions::default(),
            preinterp: PreinterpOptions::default(),
            input: None,
            output: None,
        }
    }

    pub fn violations(&self) -> Vec<String> {
        let mut errs: Vec<String> = self.generate.violations().into_iter().map(|e| format!("generate.{e}")).collect();
        errs.extend(self.stats.violations().into_iter().map(|e| format!("stats.{e}")));
        if let Err(Error::Config(e)) = self.losses.similarity.validate() {
            errs.extend(e.into_iter().map(|e| format!("losses.similarity.{e}")));
        }
        if self.losses.selftest_cases == 0 {
            errs.push("losses.selftest_cases must be at least 1".into());
        }
        let r = self.preinterp.ratio;
        if !(r > 0.0 && r < 1.0) {
            errs.push(format!("preinterp.ratio must lie in (0, 1), got {r}"));
        }
        errs
    }
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text).map_err(|e| match e {
        Error::Config(errs) => Error::Config(errs.into_iter().map(|m| format!("{}: {m}", path.display())).collect()),
        other => other,
    })
}

/// Parses, applies defaults, and validates. Type errors report the key path
/// and the line/column; constraint violations are all listed.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let mut cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        Error::Config(vec![format!("{path}: {inner}")])
    })?;
    cfg.generate.seed = cfg.seed;
    let errs = cfg.violations();
    if errs.is_empty() {
        Ok(cfg)
    } else {
        Err(Error::Config(errs))
    }
}
