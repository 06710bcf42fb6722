use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::analysis::{DEFAULT_LCC_CUTOFF, DEFAULT_WEIGHT_FLOOR};
use crate::cohort::GenConfig;
use crate::error::{Error, Result};
use crate::preprocess::{ImputeConfig, SmoteConfig};
use crate::sage::TrainConfig;
use crate::seeds;
use crate::simgraph::Alpha;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    KnnGcn,
    DiffusionGcn,
    DiffusionGcnAge,
    Logistic,
    Knn,
}

impl Variant {
    pub const ALL: [Variant; 5] = [
        Variant::KnnGcn,
        Variant::DiffusionGcn,
        Variant::DiffusionGcnAge,
        Variant::Logistic,
        Variant::Knn,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::KnnGcn => "knn-gcn",
            Variant::DiffusionGcn => "diffusion-gcn",
            Variant::DiffusionGcnAge => "diffusion-gcn-age",
            Variant::Logistic => "logistic",
            Variant::Knn => "knn",
        }
    }

    pub fn is_graph_model(self) -> bool {
        matches!(self, Variant::KnnGcn | Variant::DiffusionGcn | Variant::DiffusionGcnAge)
    }

    pub fn uses_diffusion(self) -> bool {
        matches!(self, Variant::DiffusionGcn | Variant::DiffusionGcnAge)
    }

    pub fn uses_age(self) -> bool {
        self == Variant::DiffusionGcnAge
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Variant::ALL.iter().map(|v| v.name()).collect();
                Error::Config(format!("unknown variant {s:?} (expected one of {})", names.join(", ")))
            })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputPaths {
    pub vitals: PathBuf,
    pub patients: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GraphSettings {
    /// Neighbor count for the training graph.
    pub train_k: usize,
    /// Neighbor count for validation, test and analysis graphs.
    pub eval_k: usize,
    pub alpha: Alpha,
    /// Edges at or below this weight are not used for neighbor sampling.
    pub topology_floor: f64,
    /// Which nodes share the validation and test inference graphs.
    pub inference: InferenceGraph,
}

/// Node set of the graphs used to score validation and test patients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InferenceGraph {
    /// Only the patients being scored.
    Separate,
    /// The training nodes (including synthetic ones) plus the patients being
    /// scored; their labels are never read.
    WithTrain,
}

impl Default for GraphSettings {
    fn default() -> Self {
        GraphSettings {
            train_k: 200,
            eval_k: 100,
            alpha: Alpha::Auto,
            topology_floor: 0.0,
            inference: InferenceGraph::WithTrain,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitSettings {
    pub train_fraction: f64,
    /// Share of the training partition held out for early stopping and
    /// threshold selection.
    pub validation_fraction: f64,
}

impl Default for SplitSettings {
    fn default() -> Self {
        SplitSettings {
            train_fraction: 0.6,
            validation_fraction: 0.2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BaselineSettings {
    pub l2_lambda: f64,
    pub max_iters: usize,
    pub tol: f64,
    pub knn_k: usize,
}

impl Default for BaselineSettings {
    fn default() -> Self {
        BaselineSettings {
            l2_lambda: 1e-3,
            max_iters: 1000,
            tol: 1e-6,
            knn_k: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisSettings {
    pub weight_floor: f64,
    pub lcc_cutoff: f64,
}

impl Default for AnalysisSettings {
    fn default() -> Self {
        AnalysisSettings {
            weight_floor: DEFAULT_WEIGHT_FLOOR,
            lcc_cutoff: DEFAULT_LCC_CUTOFF,
        }
    }
}

/// Everything a pipeline command needs. Seeds inside the sub-tables are
/// ignored: all randomness is derived from `seed`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub seed: u64,
    pub variant: Variant,
    pub day: u32,
    pub out: PathBuf,
    /// Cohort CSV files. When absent the cohort is generated.
    pub input: Option<InputPaths>,
    pub generate: Option<GenConfig>,
    pub graph: GraphSettings,
    pub train: TrainConfig,
    pub impute: ImputeConfig,
    pub smote: SmoteConfig,
    pub split: SplitSettings,
    pub baselines: BaselineSettings,
    pub analysis: AnalysisSettings,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            seed: 0,
            variant: Variant::DiffusionGcn,
            day: 1,
            out: PathBuf::from("out"),
            input: None,
            generate: None,
            graph: GraphSettings::default(),
            train: TrainConfig::default(),
            impute: ImputeConfig::default(),
            smote: SmoteConfig::default(),
            split: SplitSettings::default(),
            baselines: BaselineSettings::default(),
            analysis: AnalysisSettings::default(),
        }
    }
}

/// Sub-seeds fanned out from the master seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SubSeeds {
    pub cohort: u64,
    pub impute: u64,
    pub split: u64,
    pub validation: u64,
    pub smote: u64,
    pub train: u64,
}

impl SubSeeds {
    pub fn from_master(seed: u64) -> Self {
        SubSeeds {
            cohort: seeds::derive(seed, "cohort"),
            impute: seeds::derive(seed, "impute"),
            split: seeds::derive(seed, "split"),
            validation: seeds::derive(seed, "validation"),
            smote: seeds::derive(seed, "smote"),
            train: seeds::derive(seed, "train"),
        }
    }
}

impl PipelineConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// Fill the generator when no input is given, and push the derived
    /// sub-seeds into every stochastic component.
    pub fn resolved(&self) -> Result<Self> {
        self.validate()?;
        let mut c = self.clone();
        let s = SubSeeds::from_master(c.seed);
        if c.input.is_none() && c.generate.is_none() {
            c.generate = Some(GenConfig::default());
        }
        if let Some(g) = c.generate.as_mut() {
            g.seed = s.cohort;
        }
        c.impute.seed = s.impute;
        c.smote.seed = s.smote;
        c.train.seed = s.train;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if self.input.is_some() && self.generate.is_some() {
            return bad("give either [input] or [generate], not both");
        }
        if let Some(g) = &self.generate {
            g.validate()?;
        }
        if self.day == 0 {
            return bad("day must be ≥ 1");
        }
        if self.graph.train_k == 0 || self.graph.eval_k == 0 {
            return bad("graph.train_k and graph.eval_k must be ≥ 1");
        }
        if let Alpha::Fixed(a) = self.graph.alpha {
            if !(a > 0.0) {
                return bad("graph.alpha must be > 0 or \"auto\"");
            }
        }
        if !(self.graph.topology_floor >= 0.0) || !(self.analysis.weight_floor >= 0.0) {
            return bad("weight floors must be ≥ 0");
        }
        if !(0.0..=1.0).contains(&self.analysis.lcc_cutoff) {
            return bad("analysis.lcc_cutoff must lie in [0,1]");
        }
        let s = &self.split;
        if !(s.train_fraction > 0.0 && s.train_fraction < 1.0) {
            return bad("split.train_fraction must lie in (0,1)");
        }
        if !(s.validation_fraction > 0.0 && s.validation_fraction < 1.0) {
            return bad("split.validation_fraction must lie in (0,1)");
        }
        if self.impute.n_iterations == 0 || !(self.impute.ridge_lambda >= 0.0) {
            return bad("impute.n_iterations must be ≥ 1 and impute.ridge_lambda ≥ 0");
        }
        if self.smote.k_neighbors == 0
            || !(self.smote.target_ratio > 0.0 && self.smote.target_ratio <= 1.0)
        {
            return bad("smote.k_neighbors must be ≥ 1 and smote.target_ratio in (0,1]");
        }
        if self.baselines.knn_k == 0 || !(self.baselines.l2_lambda >= 0.0) {
            return bad("baselines.knn_k must be ≥ 1 and baselines.l2_lambda ≥ 0");
        }
        self.train
            .validate()
            .map_err(|e| Error::Config(e.to_string()))?;
        Ok(())
    }

    /// SHA-256 of the resolved configuration, ignoring the output directory.
    pub fn hash(&self) -> Result<String> {
        let mut c = self.resolved()?;
        c.out = PathBuf::new();
        let json = serde_json::to_string(&c)?;
        Ok(hex::encode(Sha256::digest(json.as_bytes())))
    }

    /// Directory holding the artifacts of this variant and day.
    pub fn run_dir(&self) -> PathBuf {
        self.out.join(self.variant.name()).join(format!("day{}", self.day))
    }
}
