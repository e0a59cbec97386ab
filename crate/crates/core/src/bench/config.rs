//! TOML experiment configuration.
//!
//! ```toml
//! seed = 7
//! trials = 2
//!
//! [dataset.synthetic]          # or: [dataset] path = "faces/"
//! classes = 5
//! per_class = 8
//! height = 16
//! width = 14
//! subspace_dim = 4
//! noise_sigma = 2.0
//!
//! [split]
//! mode = "ratio"               # ratio | count | manifest
//! ratio = 0.5
//!
//! [[features]]
//! kind = "downsample"
//! height = 8
//! width = 7
//!
//! [[classifiers]]
//! method = "bsbl"              # bsbl | l1 (src) | block_l1 (bsco) | nn | ns
//! robust = true
//!
//! [[corruption]]
//! kind = "pixel"               # none | pixel | block
//! fraction = 0.3
//! ```

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::data_io::{default_occluder, read_image, Corruption, SplitMode, SynthSpec};
use crate::error::{Error, Result};
use crate::features::ExtractorKind;
use crate::solver::{SolverKind, SolverOptions};

/// Residual bound used by the l1 classifiers when none is configured.
pub const DEFAULT_EPSILON: f64 = 0.05;
/// Subspace dimension of the nearest-subspace classifier when none is configured.
pub const DEFAULT_NS_DIM: usize = 9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub dataset: DatasetConfig,
    #[serde(default)]
    pub split: SplitConfig,
    pub features: Vec<ExtractorKind>,
    pub classifiers: Vec<ClassifierConfig>,
    #[serde(default = "default_corruption")]
    pub corruption: Vec<CorruptionConfig>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    /// Worker threads; absent or 1 runs sequentially.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    /// Record per-cell wall time. Off by default so reports are reproducible byte for byte.
    #[serde(default)]
    pub timing: bool,
    /// Directory that relative paths are resolved against.
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

fn default_trials() -> usize {
    1
}

fn default_corruption() -> Vec<CorruptionConfig> {
    vec![CorruptionConfig::None]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub synthetic: Option<SyntheticConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticConfig {
    pub classes: usize,
    pub per_class: usize,
    pub height: usize,
    pub width: usize,
    pub subspace_dim: usize,
    pub noise_sigma: f64,
    /// Fixed dataset seed. When absent each trial draws a fresh dataset.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl SyntheticConfig {
    pub fn spec(&self, seed: u64) -> SynthSpec {
        SynthSpec {
            classes: self.classes,
            per_class: self.per_class,
            height: self.height,
            width: self.width,
            subspace_dim: self.subspace_dim,
            noise_sigma: self.noise_sigma,
            seed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitModeName {
    Ratio,
    Count,
    Manifest,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitConfig {
    pub mode: SplitModeName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    /// Defaults to the master seed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Manifest files: one `class/file` identifier per line.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub train: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub test: Option<PathBuf>,
}

impl Default for SplitConfig {
    fn default() -> Self {
        Self { mode: SplitModeName::Ratio, ratio: Some(0.5), count: None, seed: None, train: None, test: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Bsbl,
    #[serde(alias = "src")]
    L1,
    #[serde(alias = "bsco")]
    BlockL1,
    Nn,
    Ns,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Bsbl => "bsbl",
            Method::L1 => "l1",
            Method::BlockL1 => "block_l1",
            Method::Nn => "nn",
            Method::Ns => "ns",
        }
    }

    pub fn solver(self) -> Option<SolverKind> {
        match self {
            Method::Bsbl => Some(SolverKind::Bsbl),
            Method::L1 => Some(SolverKind::L1),
            Method::BlockL1 => Some(SolverKind::BlockL1),
            Method::Nn | Method::Ns => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifierConfig {
    pub method: Method,
    /// Code over `[Phi, I]` and discount the estimated outliers.
    #[serde(default)]
    pub robust: bool,
    /// Row label; defaults to the method name, suffixed `_robust` in robust mode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    /// Nearest-subspace dimension.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iters: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convergence_tol: Option<f64>,
}

impl ClassifierConfig {
    pub fn new(method: Method, robust: bool) -> Self {
        Self { method, robust, name: None, epsilon: None, dim: None, max_iters: None, convergence_tol: None }
    }

    pub fn label(&self) -> String {
        match &self.name {
            Some(n) => n.clone(),
            None if self.robust => format!("{}_robust", self.method.name()),
            None => self.method.name().to_string(),
        }
    }

    pub fn solver_options(&self) -> SolverOptions {
        let mut opts = SolverOptions::default();
        if matches!(self.method, Method::L1 | Method::BlockL1) {
            opts.epsilon = self.epsilon.unwrap_or(DEFAULT_EPSILON);
        }
        if let Some(it) = self.max_iters {
            opts.max_iters = it;
            opts.baseline_max_iters = opts.baseline_max_iters.max(it);
        }
        if let Some(tol) = self.convergence_tol {
            opts.convergence_tol = tol;
        }
        opts
    }

    pub fn ns_dim(&self) -> usize {
        self.dim.unwrap_or(DEFAULT_NS_DIM)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CorruptionConfig {
    None,
    Pixel {
        fraction: f64,
    },
    Block {
        fraction: f64,
        /// Occluder image (`.pgm` or `.csv`); a generated pattern when absent.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        occluder: Option<PathBuf>,
    },
}

impl CorruptionConfig {
    pub fn kind(&self) -> &'static str {
        match self {
            CorruptionConfig::None => "none",
            CorruptionConfig::Pixel { .. } => "pixel",
            CorruptionConfig::Block { .. } => "block",
        }
    }

    pub fn fraction(&self) -> f64 {
        match self {
            CorruptionConfig::None => 0.0,
            CorruptionConfig::Pixel { fraction } | CorruptionConfig::Block { fraction, .. } => *fraction,
        }
    }

    /// Stable identifier used in seeds and labels.
    pub fn id(&self) -> String {
        match self {
            CorruptionConfig::None => "none".into(),
            _ => format!("{}_{}", self.kind(), self.fraction()),
        }
    }
}

/// Stable identifier of a feature configuration, used in seeds and labels.
pub fn feature_id(kind: &ExtractorKind) -> String {
    let (h, w) = kind.output_dims();
    match kind {
        ExtractorKind::Downsample { .. } => format!("downsample_{h}x{w}"),
        _ => format!("{}_{h}", kind.name()),
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    /// Parses a config file; relative paths inside it resolve against its directory.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut config = Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })?;
        config.base_dir = path.parent().map(Path::to_path_buf);
        Ok(config)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn resolve(&self, path: &Path) -> PathBuf {
        match &self.base_dir {
            Some(base) if path.is_relative() => base.join(path),
            _ => path.to_path_buf(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        match (&self.dataset.path, &self.dataset.synthetic) {
            (Some(_), Some(_)) | (None, None) => {
                return bad("dataset needs exactly one of `path` or `synthetic`".into())
            }
            (None, Some(s)) => {
                s.spec(0).validate().map_err(|e| Error::Config(format!("dataset.synthetic: {e}")))?;
            }
            _ => {}
        }
        match self.split.mode {
            SplitModeName::Ratio => match self.split.ratio {
                Some(r) if r > 0.0 && r < 1.0 => {}
                other => return bad(format!("split.ratio must be in (0, 1), got {other:?}")),
            },
            SplitModeName::Count => match self.split.count {
                Some(c) if c >= 1 => {}
                other => return bad(format!("split.count must be >= 1, got {other:?}")),
            },
            SplitModeName::Manifest => {
                if self.split.train.is_none() || self.split.test.is_none() {
                    return bad("split.mode = \"manifest\" needs split.train and split.test files".into());
                }
            }
        }
        if self.features.is_empty() {
            return bad("features must not be empty".into());
        }
        if self.classifiers.is_empty() {
            return bad("classifiers must not be empty".into());
        }
        if self.corruption.is_empty() {
            return bad("corruption must not be empty (use kind = \"none\")".into());
        }
        if self.trials == 0 {
            return bad("trials must be >= 1".into());
        }
        if self.threads == Some(0) {
            return bad("threads must be >= 1".into());
        }
        let mut labels = HashSet::new();
        for c in &self.classifiers {
            if c.robust && c.method.solver().is_none() {
                return bad(format!("robust mode needs a sparse solver, not {}", c.method.name()));
            }
            if !labels.insert(c.label()) {
                return bad(format!("duplicate classifier label {:?}; set `name`", c.label()));
            }
            if let Some(e) = c.epsilon {
                if !(e >= 0.0 && e.is_finite()) {
                    return bad(format!("{}: epsilon must be >= 0", c.label()));
                }
            }
            c.solver_options().validate().map_err(|e| Error::Config(format!("{}: {e}", c.label())))?;
        }
        let mut ids = HashSet::new();
        for f in &self.features {
            let (h, w) = f.output_dims();
            if h == 0 || w == 0 {
                return bad(format!("feature {} has zero dimension", f.name()));
            }
            if !ids.insert(feature_id(f)) {
                return bad(format!("duplicate feature {}", feature_id(f)));
            }
        }
        let mut ids = HashSet::new();
        for c in &self.corruption {
            let f = c.fraction();
            if !(0.0..=crate::data_io::MAX_FRACTION).contains(&f) {
                return bad(format!("corruption fraction {f} outside [0, {}]", crate::data_io::MAX_FRACTION));
            }
            if !ids.insert(c.id()) {
                return bad(format!("duplicate corruption {}", c.id()));
            }
        }
        Ok(())
    }

    /// The corruption generator for an entry, loading its occluder if one is named.
    pub fn corruption_model(&self, c: &CorruptionConfig) -> Result<Corruption> {
        Ok(match c {
            CorruptionConfig::None => Corruption::None,
            CorruptionConfig::Pixel { fraction } => Corruption::Pixel { fraction: *fraction },
            CorruptionConfig::Block { fraction, occluder } => Corruption::Block {
                fraction: *fraction,
                occluder: match occluder {
                    Some(p) => read_image(&self.resolve(p))?,
                    None => default_occluder(),
                },
            },
        })
    }

    /// Split rule for one trial. Ratio and count splits reshuffle every trial.
    pub fn split_mode(&self) -> Result<SplitMode> {
        Ok(match self.split.mode {
            SplitModeName::Ratio => SplitMode::PerClassRatio(self.split.ratio.unwrap_or(0.5)),
            SplitModeName::Count => SplitMode::PerClassCount(self.split.count.unwrap_or(1)),
            SplitModeName::Manifest => {
                let read = |p: &Option<PathBuf>| -> Result<Vec<String>> {
                    let path = self.resolve(p.as_deref().unwrap_or(Path::new("")));
                    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
                    Ok(text
                        .lines()
                        .map(str::trim)
                        .filter(|l| !l.is_empty() && !l.starts_with('#'))
                        .map(String::from)
                        .collect())
                };
                SplitMode::Manifest { train: read(&self.split.train)?, test: read(&self.split.test)? }
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
        seed = 3
        [dataset.synthetic]
        classes = 3
        per_class = 4
        height = 6
        width = 5
        subspace_dim = 2
        noise_sigma = 1.0
        [[features]]
        kind = "downsample"
        height = 3
        width = 5
        [[classifiers]]
        method = "src"
        [[classifiers]]
        method = "bsbl"
        robust = true
    "#;

    #[test]
    fn parses_with_defaults() {
        let c = ExperimentConfig::from_toml_str(MINIMAL).unwrap();
        assert_eq!(c.trials, 1);
        assert_eq!(c.corruption, vec![CorruptionConfig::None]);
        assert_eq!(c.classifiers[0].method, Method::L1);
        assert_eq!(c.classifiers[1].label(), "bsbl_robust");
        assert_eq!(c.split.mode, SplitModeName::Ratio);
        assert_eq!(c.classifiers[0].solver_options().epsilon, DEFAULT_EPSILON);
        let again = ExperimentConfig::from_toml_str(&c.to_toml_string().unwrap()).unwrap();
        assert_eq!(again, c);
    }

    #[test]
    fn rejects_bad_configs() {
        let with = |extra: &str| ExperimentConfig::from_toml_str(&format!("{extra}\n{MINIMAL}"));
        assert!(matches!(with("trials = 0"), Err(Error::Config(_))));
        assert!(matches!(with("bogus = 1"), Err(Error::Config(_))));
        let robust_nn = MINIMAL.replace("method = \"src\"", "method = \"nn\"\nrobust = true");
        assert!(ExperimentConfig::from_toml_str(&robust_nn).is_err());
        let dup = MINIMAL.replace("method = \"bsbl\"\n        robust = true", "method = \"l1\"");
        assert!(ExperimentConfig::from_toml_str(&dup).is_err());
        let no_features = MINIMAL.replace("[[features]]", "[unused]");
        assert!(ExperimentConfig::from_toml_str(&no_features).is_err());
    }

    #[test]
    fn identifiers() {
        assert_eq!(CorruptionConfig::Pixel { fraction: 0.3 }.id(), "pixel_0.3");
        assert_eq!(feature_id(&ExtractorKind::Downsample { height: 12, width: 10 }), "downsample_12x10");
        assert_eq!(feature_id(&ExtractorKind::Eigenfaces { dim: 30 }), "eigenfaces_30");
    }
}
