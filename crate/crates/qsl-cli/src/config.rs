//! Experiment configuration: JSON-backed, strictly validated before any
//! computation. The accepted document shape is published in
//! `docs/config.schema.json`; unknown fields are rejected.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use qsl::optimize::OptimizerKind;
use qsl::similarity::MeasureSpec;
use qsl::train::{InitialWeights, TrainConfig};

/// Top-level field names accepted by [`ExperimentConfig`]; kept next to the
/// struct so the published schema can be checked against it in tests.
pub const TOP_LEVEL_FIELDS: &[&str] = &[
    "experiment",
    "seed",
    "output_dir",
    "embedding",
    "measure",
    "train",
    "dataset",
    "toy",
    "classify",
    "transition",
    "graph",
    "generate",
    "partial_study",
    "batch_study",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    /// Dataset family used by train/eval: "image", "blobs" or "moons".
    pub experiment: String,
    pub seed: u64,
    pub output_dir: Option<String>,
    pub embedding: EmbeddingSection,
    pub measure: MeasureSpec,
    pub train: TrainSection,
    pub dataset: DatasetSection,
    pub toy: ToySection,
    pub classify: ClassifySection,
    pub transition: TransitionSection,
    pub graph: GraphSection,
    pub generate: GenerateSection,
    pub partial_study: PartialStudySection,
    pub batch_study: BatchStudySection,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            experiment: "image".to_string(),
            seed: 2024,
            output_dir: None,
            embedding: EmbeddingSection::default(),
            measure: MeasureSpec::PartialSwap(2),
            train: TrainSection::default(),
            dataset: DatasetSection::default(),
            toy: ToySection::default(),
            classify: ClassifySection::default(),
            transition: TransitionSection::default(),
            graph: GraphSection::default(),
            generate: GenerateSection::default(),
            partial_study: PartialStudySection::default(),
            batch_study: BatchStudySection::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EmbeddingSection {
    pub n_qubits: usize,
    pub n_layers: usize,
}

impl Default for EmbeddingSection {
    fn default() -> Self {
        EmbeddingSection { n_qubits: 4, n_layers: 2 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainSection {
    pub batch_size: usize,
    pub max_evals: usize,
    pub optimizer: OptimizerKind,
    pub rho_begin: f64,
    pub rho_end: f64,
    pub initial_weights: InitialWeights,
    pub shrink_patience: usize,
}

impl Default for TrainSection {
    fn default() -> Self {
        TrainSection {
            batch_size: 80,
            max_evals: 1500,
            optimizer: OptimizerKind::Cobyla,
            rho_begin: 0.5,
            rho_end: 1e-6,
            initial_weights: InitialWeights::UniformPi,
            shrink_patience: 6,
        }
    }
}

impl TrainSection {
    pub fn to_train_config(self, seed: u64) -> TrainConfig {
        TrainConfig {
            batch_size: self.batch_size,
            max_evals: self.max_evals,
            seed,
            optimizer: self.optimizer,
            rho_begin: self.rho_begin,
            rho_end: self.rho_end,
            initial_weights: self.initial_weights,
            shrink_patience: self.shrink_patience,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DatasetSection {
    /// First-space sample count (images or points).
    pub n_x: usize,
    /// Second-space sample count.
    pub n_xt: usize,
    /// Cluster centers of the second space (or of the blob experiment).
    pub centers: Vec<Vec<f64>>,
    pub spread: f64,
    /// Gaussian noise of the moons construction.
    pub moon_noise: f64,
    /// Held-out sample count for evaluation summaries.
    pub n_held_out: usize,
}

impl Default for DatasetSection {
    fn default() -> Self {
        DatasetSection {
            n_x: 100,
            n_xt: 100,
            centers: vec![vec![0.2, 0.2], vec![0.8, 0.8]],
            spread: 0.07,
            moon_noise: 0.08,
            n_held_out: 20,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ToySection {
    /// Heatmap grid points per axis (grid includes the origin).
    pub heatmap_n: usize,
    /// Density-of-states grid points per axis over (0, 2pi].
    pub dos_grid_n: usize,
    pub dos_bins: usize,
    /// Retrieval anchors.
    pub x_s: f64,
    pub x_d: f64,
    /// Grid for the retrieval loss curve and its optimum.
    pub retrieval_grid_n: usize,
    /// Improvement-map resolution per axis.
    pub lambda_grid_n: usize,
}

impl Default for ToySection {
    fn default() -> Self {
        ToySection {
            heatmap_n: 101,
            dos_grid_n: 200,
            dos_bins: 40,
            x_s: 0.3,
            x_d: 0.5,
            retrieval_grid_n: 200,
            lambda_grid_n: 50,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ClassifySection {
    /// "blobs" (one-shot, untrained angle encoding) or "moons" (trained).
    pub kind: String,
    pub resolution: usize,
    /// Train before classifying; defaults off for blobs, on for moons.
    pub trained: Option<bool>,
}

impl Default for ClassifySection {
    fn default() -> Self {
        ClassifySection { kind: "blobs".to_string(), resolution: 40, trained: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TransitionSection {
    pub deltas: Vec<f64>,
    pub n_repeats: usize,
    pub eps: f64,
    /// Reuse trained weights from this JSON file instead of retraining.
    pub weights_path: Option<String>,
}

impl Default for TransitionSection {
    fn default() -> Self {
        TransitionSection {
            deltas: vec![0.0, 0.25, 0.5, 0.75, 1.0],
            n_repeats: 20,
            eps: 0.1,
            weights_path: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GraphSection {
    pub n_nodes: usize,
    pub clusters: usize,
    pub dim: usize,
    pub spread_low: f64,
    pub spread_high: f64,
    pub observed_fraction: f64,
    pub threshold: f64,
}

impl Default for GraphSection {
    fn default() -> Self {
        GraphSection {
            n_nodes: 30,
            clusters: 2,
            dim: 2,
            spread_low: 0.5,
            spread_high: 1.5,
            observed_fraction: 0.1,
            threshold: 0.5,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GenerateSection {
    /// Class of the support image: "left" or "right".
    pub support: String,
    /// Starting point in the raw unit square of the second space.
    pub start: Vec<f64>,
    pub steps: usize,
    pub learning_rate: f64,
    /// Cost-landscape resolution per axis.
    pub resolution: usize,
    pub weights_path: Option<String>,
}

impl Default for GenerateSection {
    fn default() -> Self {
        GenerateSection {
            support: "right".to_string(),
            start: vec![0.3, 0.7],
            steps: 60,
            learning_rate: 0.3,
            resolution: 30,
            weights_path: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PartialStudySection {
    pub dims: Vec<usize>,
    pub m_choices: Vec<usize>,
    pub n_instances: usize,
    pub n_images: usize,
    pub n_points: usize,
    pub cluster_spread: f64,
}

impl Default for PartialStudySection {
    fn default() -> Self {
        PartialStudySection {
            dims: vec![1, 2, 3, 4],
            m_choices: vec![1, 2, 3, 4],
            n_instances: 10,
            n_images: 12,
            n_points: 12,
            cluster_spread: 0.07,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BatchStudySection {
    pub batch_sizes: Vec<usize>,
    pub n_draws: usize,
}

impl Default for BatchStudySection {
    fn default() -> Self {
        BatchStudySection { batch_sizes: vec![8, 20, 40, 80, 160], n_draws: 100 }
    }
}

/// A configuration problem: reported as machine-readable error JSON and a
/// non-zero exit.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

impl std::error::Error for ConfigError {}

impl ExperimentConfig {
    /// Parse and validate a JSON document.
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let config: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| ConfigError(format!("schema violation: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    /// Range checks beyond the structural schema.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let fail = |msg: String| Err(ConfigError(msg));
        if !["image", "blobs", "moons"].contains(&self.experiment.as_str()) {
            return fail(format!("unknown experiment family {:?}", self.experiment));
        }
        if self.embedding.n_qubits == 0 || self.embedding.n_qubits > 10 {
            return fail(format!("embedding.n_qubits {} outside 1..=10", self.embedding.n_qubits));
        }
        if self.embedding.n_layers == 0 {
            return fail("embedding.n_layers must be at least 1".to_string());
        }
        let m = match self.measure {
            MeasureSpec::FullOverlap => self.embedding.n_qubits,
            MeasureSpec::PartialSwap(m) | MeasureSpec::PartialProjection(m) => m,
        };
        if m == 0 || m > self.embedding.n_qubits {
            return fail(format!("measure acts on {m} qubits, outside the register"));
        }
        self.train
            .to_train_config(self.seed)
            .validate()
            .map_err(|e| ConfigError(e.to_string()))?;
        if self.dataset.n_x == 0 || self.dataset.n_x % 2 != 0 {
            return fail(format!("dataset.n_x {} must be even and positive", self.dataset.n_x));
        }
        if self.dataset.centers.is_empty() {
            return fail("dataset.centers must be nonempty".to_string());
        }
        if self.dataset.n_xt == 0 || self.dataset.n_xt % self.dataset.centers.len() != 0 {
            return fail(format!(
                "dataset.n_xt {} must split evenly over {} clusters",
                self.dataset.n_xt,
                self.dataset.centers.len()
            ));
        }
        if self.dataset.spread < 0.0 || self.dataset.moon_noise < 0.0 {
            return fail("dataset spreads must be non-negative".to_string());
        }
        if self.toy.heatmap_n < 2 || self.toy.dos_grid_n < 10 || self.toy.dos_bins == 0 {
            return fail("toy grids too small".to_string());
        }
        if self.toy.retrieval_grid_n == 0 || self.toy.lambda_grid_n == 0 {
            return fail("toy retrieval grids must be positive".to_string());
        }
        if !["blobs", "moons"].contains(&self.classify.kind.as_str()) {
            return fail(format!("classify.kind {:?} must be blobs or moons", self.classify.kind));
        }
        if self.classify.resolution < 2 {
            return fail("classify.resolution must be at least 2".to_string());
        }
        if self.transition.deltas.is_empty() || self.transition.n_repeats == 0 {
            return fail("transition needs deltas and repeats".to_string());
        }
        if self.transition.deltas.iter().any(|d| !(0.0..=1.0).contains(d)) {
            return fail("transition deltas must lie in [0, 1]".to_string());
        }
        if self.graph.n_nodes < 2
            || self.graph.clusters == 0
            || self.graph.dim == 0
            || !(0.0 < self.graph.observed_fraction && self.graph.observed_fraction <= 1.0)
            || !(self.graph.spread_low > 0.0 && self.graph.spread_high >= self.graph.spread_low)
        {
            return fail("graph section out of range".to_string());
        }
        if self.generate.start.len() != 2 {
            return fail("generate.start must be a 2-vector".to_string());
        }
        if !["left", "right"].contains(&self.generate.support.as_str()) {
            return fail(format!("generate.support {:?} must be left or right", self.generate.support));
        }
        if self.generate.steps == 0 || self.generate.learning_rate <= 0.0 || self.generate.resolution < 2 {
            return fail("generate section out of range".to_string());
        }
        if self.partial_study.dims.is_empty()
            || self.partial_study.m_choices.is_empty()
            || self.partial_study.n_instances == 0
        {
            return fail("partial_study needs dims, m choices and instances".to_string());
        }
        if self.batch_study.batch_sizes.is_empty()
            || self.batch_study.batch_sizes.iter().any(|b| *b < 2 || *b % 2 != 0)
            || self.batch_study.n_draws < 2
        {
            return fail("batch_study needs even batch sizes >= 2 and >= 2 draws".to_string());
        }
        Ok(())
    }

    /// Hash of the resolved configuration; embedded in every output file.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        let mut hasher = Sha256::new();
        hasher.update(canonical.as_bytes());
        hex::encode(hasher.finalize())
    }
}

/// Parse the `--measure` flag: `full`, `swap:m` or `proj:m`.
pub fn parse_measure_flag(text: &str) -> Result<MeasureSpec, ConfigError> {
    if text == "full" {
        return Ok(MeasureSpec::FullOverlap);
    }
    let (kind, m) = text
        .split_once(':')
        .ok_or_else(|| ConfigError(format!("measure {text:?} is not full, swap:m or proj:m")))?;
    let m: usize = m
        .parse()
        .map_err(|_| ConfigError(format!("measure qubit count {m:?} is not a number")))?;
    match kind {
        "swap" => Ok(MeasureSpec::PartialSwap(m)),
        "proj" => Ok(MeasureSpec::PartialProjection(m)),
        other => Err(ConfigError(format!("unknown measure kind {other:?}"))),
    }
}
