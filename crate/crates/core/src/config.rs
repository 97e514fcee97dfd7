//! Run configuration: one JSON file drives the whole pipeline.
//!
//! Any missing section takes its default, so `{}` is a complete
//! configuration. All randomness flows from the single root `seed`; every
//! stochastic component (clustering init, forest bootstraps, fold shuffles,
//! the synthetic generator) draws a sub-seed derived from it, which is what
//! makes a whole pipeline run reproducible from the manifest alone.

use serde::{Deserialize, Serialize};

use crate::cluster::KmeansConfig;
use crate::features::PlayerBins;
use crate::projection::{EvalParams, ForestParams, KnnParams, ModelKind, WeightKind};
use crate::scoring::ScoringParams;
use crate::synth::{derive_seed, GeneratorConfig};
use crate::{CampError, Result};

/// Sub-seed streams hanging off the root seed.
pub mod seed_stream {
    pub const SIMULATE: u64 = 0x51;
    pub const KMEANS: u64 = 0x52;
    pub const FOLDS: u64 = 0x53;
    pub const FOREST: u64 = 0x54;
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct PathsConfig {
    pub balls: String,
    pub summaries: String,
    pub venue_map: Option<String>,
    pub resource_table: Option<String>,
    pub out_dir: String,
}

impl Default for PathsConfig {
    fn default() -> Self {
        PathsConfig {
            balls: "balls.csv".to_owned(),
            summaries: "summaries.csv".to_owned(),
            venue_map: None,
            resource_table: None,
            out_dir: "out".to_owned(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ClusteringSection {
    pub k_teams: usize,
    pub k_batters: usize,
    pub k_bowlers: usize,
    pub max_iters: usize,
    pub tol: f64,
}

impl Default for ClusteringSection {
    fn default() -> Self {
        let k = KmeansConfig::default();
        ClusteringSection {
            k_teams: k.k_teams,
            k_batters: k.k_batters,
            k_bowlers: k.k_bowlers,
            max_iters: k.max_iters,
            tol: k.tol,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct KnnSection {
    pub epsilon: f64,
    pub cap: Option<usize>,
    pub weighting: WeightKind,
}

impl Default for KnnSection {
    fn default() -> Self {
        let k = KnnParams::default();
        KnnSection {
            epsilon: k.epsilon,
            cap: k.cap,
            weighting: k.weighting,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProjectionSection {
    pub lambda: f64,
    pub k_folds: usize,
    pub forest: ForestParams,
    pub knn: KnnSection,
}

impl Default for ProjectionSection {
    fn default() -> Self {
        ProjectionSection {
            lambda: 1.0,
            k_folds: 5,
            forest: ForestParams::default(),
            knn: KnnSection::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub paths: PathsConfig,
    pub seed: u64,
    pub scheduled_overs: u32,
    pub excluded_teams: Vec<String>,
    /// Projection model used for ratings.
    pub model: ModelKind,
    /// Exclude the rated match from its own nearest-neighbour candidates.
    pub leave_one_out: bool,
    /// Dataset directory for the optional dataset-dependent checks.
    pub with_dataset: Option<String>,
    pub scoring: ScoringParams,
    pub bins: PlayerBins,
    pub clustering: ClusteringSection,
    pub projection: ProjectionSection,
    /// Nominal first-innings total for the baseline projection.
    pub lnc_z: f64,
    /// Generator settings for `simulate`; its seed is derived from the root
    /// seed, never read from this section.
    pub synthetic: GeneratorConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            paths: PathsConfig::default(),
            seed: 42,
            scheduled_overs: 50,
            excluded_teams: vec!["BAN".to_owned(), "ZIM".to_owned()],
            model: ModelKind::Knn,
            leave_one_out: true,
            with_dataset: None,
            scoring: ScoringParams::default(),
            bins: PlayerBins::default(),
            clustering: ClusteringSection::default(),
            projection: ProjectionSection::default(),
            lnc_z: crate::lnc::DEFAULT_FIRST_INNINGS_Z,
            synthetic: GeneratorConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn from_json(reader: impl std::io::Read) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_reader(reader)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.scoring.validate()?;
        self.kmeans_config().validate()?;
        self.projection.forest.validate()?;
        if self.scheduled_overs < 1 || self.scheduled_overs > 50 {
            return Err(CampError::validation("scheduled_overs must be in 1..=50"));
        }
        if self.projection.lambda < 0.0 {
            return Err(CampError::validation("projection.lambda must be >= 0"));
        }
        if self.projection.k_folds < 2 {
            return Err(CampError::validation("projection.k_folds must be >= 2"));
        }
        if self.projection.knn.epsilon <= 0.0 {
            return Err(CampError::validation("projection.knn.epsilon must be > 0"));
        }
        if self.lnc_z <= 0.0 {
            return Err(CampError::validation("lnc_z must be > 0"));
        }
        let mut synth = self.synthetic.clone();
        synth.seed = 0;
        synth.validate()?;
        Ok(())
    }

    pub fn kmeans_config(&self) -> KmeansConfig {
        KmeansConfig {
            k_teams: self.clustering.k_teams,
            k_batters: self.clustering.k_batters,
            k_bowlers: self.clustering.k_bowlers,
            max_iters: self.clustering.max_iters,
            tol: self.clustering.tol,
            seed: derive_seed(self.seed, seed_stream::KMEANS),
        }
    }

    pub fn knn_params(&self) -> KnnParams {
        KnnParams {
            epsilon: self.projection.knn.epsilon,
            cap: self.projection.knn.cap,
            weighting: self.projection.knn.weighting,
            leave_one_out: self.leave_one_out,
        }
    }

    pub fn eval_params(&self) -> EvalParams {
        EvalParams {
            k_folds: self.projection.k_folds,
            seed: derive_seed(self.seed, seed_stream::FOLDS),
            lambda: self.projection.lambda,
            forest: self.projection.forest,
            knn: self.knn_params(),
        }
    }

    pub fn forest_seed(&self) -> u64 {
        derive_seed(self.seed, seed_stream::FOREST)
    }

    pub fn generator_config(&self) -> GeneratorConfig {
        GeneratorConfig {
            seed: derive_seed(self.seed, seed_stream::SIMULATE),
            ..self.synthetic.clone()
        }
    }
}
