//! Subcommand implementations and the experiment assembly they share.

pub mod batch;
pub mod classify;
pub mod generate;
pub mod graph;
pub mod partial;
pub mod toy;
pub mod train_eval;
pub mod transition;

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use qsl::dataset::{build_pairs, gen_clusters, gen_half_images, gen_moons, LabeledPoints, LEFT, RIGHT};
use qsl::embedding::{EmbeddingSpec, FeatureVector, WeightVector};
use qsl::seed;
use qsl::similarity::{MeasureSpec, SimilarityModel};
use qsl::train::{train, PairDataset, TrainResult};

use crate::config::ExperimentConfig;

/// A runtime failure after configuration validation.
#[derive(Debug)]
pub struct RunError(pub String);

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

impl std::error::Error for RunError {}

impl From<qsl::Error> for RunError {
    fn from(e: qsl::Error) -> Self {
        RunError(e.to_string())
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError(format!("io: {e}"))
    }
}

pub type CmdResult<T> = Result<T, RunError>;

/// The two labeled spaces of a pairwise experiment plus their pair dataset.
pub struct ExperimentData {
    pub x_points: LabeledPoints,
    pub xt_points: LabeledPoints,
    pub dataset: PairDataset,
    /// Feature dimensions of the two spaces.
    pub dim_x: usize,
    pub dim_xt: usize,
}

/// Normalize raw moon coordinates into the unit square using the fixed
/// bounds of the construction (x in [-1, 2], y in [-1, 1]).
pub fn moons_to_unit(p: &FeatureVector) -> FeatureVector {
    let v = p.values();
    FeatureVector::new(vec![(v[0] + 1.0) / 3.0, (v[1] + 1.0) / 2.0]).expect("finite")
}

/// Build the configured experiment family's training data.
pub fn build_data(config: &ExperimentConfig) -> CmdResult<ExperimentData> {
    let root = config.seed;
    match config.experiment.as_str() {
        "image" => {
            let images = gen_half_images(config.dataset.n_x, &mut seed::rng(root, "images"))?;
            let points = gen_clusters(
                config.dataset.n_xt,
                &config.dataset.centers,
                config.dataset.spread,
                &mut seed::rng(root, "points"),
            )?
            .to_angles()?;
            let assoc: BTreeMap<usize, usize> = [(LEFT, 0), (RIGHT, 1)].into();
            let dataset = build_pairs(&images, &points, &assoc)?;
            let dim_xt = config.dataset.centers[0].len();
            Ok(ExperimentData { x_points: images, xt_points: points, dataset, dim_x: 4, dim_xt })
        }
        "blobs" => {
            let points = gen_clusters(
                config.dataset.n_xt,
                &config.dataset.centers,
                config.dataset.spread,
                &mut seed::rng(root, "points"),
            )?
            .to_angles()?;
            let assoc: BTreeMap<usize, usize> =
                (0..config.dataset.centers.len()).map(|c| (c, c)).collect();
            let dataset = build_pairs(&points, &points, &assoc)?;
            let dim = config.dataset.centers[0].len();
            Ok(ExperimentData {
                x_points: points.clone(),
                xt_points: points,
                dataset,
                dim_x: dim,
                dim_xt: dim,
            })
        }
        "moons" => {
            let raw = gen_moons(config.dataset.n_x, config.dataset.moon_noise, &mut seed::rng(root, "moons"))?;
            let unit = LabeledPoints::new(
                raw.points.iter().map(moons_to_unit).collect(),
                raw.labels.clone(),
            )?
            .to_angles()?;
            let assoc: BTreeMap<usize, usize> = [(0, 0), (1, 1)].into();
            let dataset = build_pairs(&unit, &unit, &assoc)?;
            Ok(ExperimentData {
                x_points: unit.clone(),
                xt_points: unit,
                dataset,
                dim_x: 2,
                dim_xt: 2,
            })
        }
        other => Err(RunError(format!("unknown experiment family {other:?}"))),
    }
}

/// Template model for an experiment: the image family embeds the two spaces
/// with independent parameters, the same-space families share one embedding.
pub fn build_template(config: &ExperimentConfig, data: &ExperimentData) -> CmdResult<SimilarityModel> {
    let spec_x = EmbeddingSpec::new(config.embedding.n_qubits, config.embedding.n_layers, data.dim_x)?;
    let spec_xt =
        EmbeddingSpec::new(config.embedding.n_qubits, config.embedding.n_layers, data.dim_xt)?;
    let model = if config.experiment == "image" {
        SimilarityModel::separate(
            spec_x,
            spec_xt,
            WeightVector::zeros(spec_x.weight_count()),
            WeightVector::zeros(spec_xt.weight_count()),
        )?
    } else {
        SimilarityModel::shared(spec_x, spec_xt, WeightVector::zeros(spec_x.weight_count()))?
    };
    Ok(model)
}

/// Persisted model document (the `result` payload of weights.json).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SavedModel {
    pub model: SimilarityModel,
    pub measure: MeasureSpec,
    pub initial_full_loss: f64,
    pub final_full_loss: f64,
}

/// Train the configured experiment and return the fitted model.
pub fn train_experiment(
    config: &ExperimentConfig,
    data: &ExperimentData,
) -> CmdResult<(SimilarityModel, TrainResult)> {
    let template = build_template(config, data)?;
    let train_config = config.train.to_train_config(config.seed);
    let result = train(&template, config.measure, &data.dataset, &train_config)?;
    let trained = template.with_weights(result.theta.clone(), result.eta.clone())?;
    Ok((trained, result))
}

/// Load a persisted model from a weights.json written by the train command.
pub fn load_model(path: &Path) -> CmdResult<SavedModel> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| RunError(format!("cannot read weights file {}: {e}", path.display())))?;
    let doc: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| RunError(format!("weights file is not JSON: {e}")))?;
    let payload = doc
        .get("result")
        .ok_or_else(|| RunError("weights file has no result field".to_string()))?;
    serde_json::from_value(payload.clone())
        .map_err(|e| RunError(format!("weights file does not hold a model: {e}")))
}
