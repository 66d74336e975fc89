//! End-to-end application drivers: fidelity classification and decision
//! grids, graph completion from a partially observed adjacency matrix,
//! generative feature-space optimization, the interpolated-image transition
//! scan, and the partial-measurement study.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::analysis::wasserstein_1d;
use crate::dataset::{
    build_pairs, gen_clusters, gen_delta_images, gen_half_images, GraphProblem, LabeledPoints,
    SymmetricMask, LEFT, RIGHT,
};
use crate::embedding::{EmbeddingSpec, FeatureVector, WeightVector};
use crate::error::{Error, Result};
use crate::seed;
use crate::similarity::{similarity, MeasureSpec, SimilarityModel};
use crate::train::{feature_gradient, train, PairDataset, TrainConfig, TrainResult};

/// Outcome of a fidelity classification: the winning class and the mean
/// similarity to each class's exemplars.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub class: usize,
    pub scores: BTreeMap<usize, f64>,
}

impl Classification {
    /// Scores rescaled to sum to one (uniform when all scores vanish).
    pub fn normalized_scores(&self) -> BTreeMap<usize, f64> {
        let total: f64 = self.scores.values().sum();
        if total > 0.0 {
            self.scores.iter().map(|(k, v)| (*k, v / total)).collect()
        } else {
            let u = 1.0 / self.scores.len() as f64;
            self.scores.keys().map(|k| (*k, u)).collect()
        }
    }
}

/// Assign the class whose exemplars have the highest mean similarity to `x`;
/// ties break toward the smallest class id.
pub fn classify_fidelity(
    model: &SimilarityModel,
    measure: MeasureSpec,
    exemplars: &BTreeMap<usize, Vec<FeatureVector>>,
    x: &FeatureVector,
) -> Result<Classification> {
    if exemplars.is_empty() {
        return Err(Error::EmptyInput("exemplar map"));
    }
    let mut scores = BTreeMap::new();
    for (class, points) in exemplars {
        if points.is_empty() {
            return Err(Error::EmptyInput("exemplar class"));
        }
        let mut acc = 0.0;
        for e in points {
            acc += similarity(model, measure, x, e)?;
        }
        scores.insert(*class, acc / points.len() as f64);
    }
    // BTreeMap iterates in ascending class order, so a strict comparison
    // keeps the smallest id on ties
    let mut class = *scores.keys().next().expect("nonempty");
    let mut best = f64::NEG_INFINITY;
    for (c, s) in &scores {
        if *s > best {
            best = *s;
            class = *c;
        }
    }
    Ok(Classification { class, scores })
}

/// Classification result at every node of a rectangular grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecisionGrid {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    /// Row-major over (y, x): `cells[iy * xs.len() + ix]`.
    pub cells: Vec<GridCell>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    pub class: usize,
    /// Normalized scores (sum to one).
    pub scores: BTreeMap<usize, f64>,
}

/// Classify every node of a `resolution x resolution` grid spanning
/// `bounds = ((x_lo, x_hi), (y_lo, y_hi))` in the model's angle units.
pub fn decision_grid(
    model: &SimilarityModel,
    measure: MeasureSpec,
    exemplars: &BTreeMap<usize, Vec<FeatureVector>>,
    bounds: ((f64, f64), (f64, f64)),
    resolution: usize,
) -> Result<DecisionGrid> {
    if resolution < 2 {
        return Err(Error::arg("grid resolution must be at least 2"));
    }
    let linspace = |(lo, hi): (f64, f64)| -> Vec<f64> {
        (0..resolution)
            .map(|i| lo + (hi - lo) * i as f64 / (resolution - 1) as f64)
            .collect()
    };
    let xs = linspace(bounds.0);
    let ys = linspace(bounds.1);
    let mut cells = Vec::with_capacity(resolution * resolution);
    for &y in &ys {
        for &x in &xs {
            let point = FeatureVector::new(vec![x, y])?;
            let c = classify_fidelity(model, measure, exemplars, &point)?;
            cells.push(GridCell { class: c.class, scores: c.normalized_scores() });
        }
    }
    Ok(DecisionGrid { xs, ys, cells })
}

/// Configuration for graph completion.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphCompleteConfig {
    pub n_qubits: usize,
    pub n_layers: usize,
    pub measure: MeasureSpec,
    pub train: TrainConfig,
    /// Edge-prediction threshold on the symmetrized similarity.
    pub threshold: f64,
}

impl Default for GraphCompleteConfig {
    fn default() -> Self {
        GraphCompleteConfig {
            n_qubits: 4,
            n_layers: 1,
            measure: MeasureSpec::PartialSwap(2),
            train: TrainConfig::default(),
            threshold: 0.5,
        }
    }
}

/// Result of completing a partially observed graph.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompletionResult {
    /// Observed entries passed through, unobserved entries predicted.
    pub predicted_adjacency: SymmetricMask,
    /// Accuracy over the unobserved off-diagonal entries (1.0 when nothing
    /// was unobserved).
    pub accuracy_unobserved: f64,
    pub threshold: f64,
    /// Training outcome on the observed pairs (absent when nothing was
    /// unobserved, in which case no training runs).
    pub train_result: Option<TrainResult>,
}

/// Learn node similarity from the observed adjacency entries and predict the
/// unobserved ones.
///
/// Node attributes embed both sides of each pair with one shared-weight
/// embedding (an undirected graph forces the symmetry), training reads only
/// observed entries, and predictions threshold the symmetrized similarity
/// `(S(i,j) + S(j,i)) / 2`.
pub fn graph_complete(problem: &GraphProblem, config: &GraphCompleteConfig) -> Result<CompletionResult> {
    let n = problem.adjacency.n();
    let attrs = if problem.attributes.angle_scale == 1.0 {
        problem.attributes.to_angles()?
    } else {
        problem.attributes.clone()
    };
    let dim = attrs.points.first().map(|p| p.len()).ok_or(Error::EmptyInput("graph nodes"))?;

    let mut observed_pairs = Vec::new();
    let mut unobserved = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if problem.observed.get(i, j) {
                observed_pairs.push((i, j, problem.adjacency.get(i, j)));
            } else {
                unobserved.push((i, j));
            }
        }
    }
    if observed_pairs.is_empty() {
        return Err(Error::EmptyInput("observed adjacency entries"));
    }
    if unobserved.is_empty() {
        return Ok(CompletionResult {
            predicted_adjacency: problem.adjacency.clone(),
            accuracy_unobserved: 1.0,
            threshold: config.threshold,
            train_result: None,
        });
    }
    let n_edges = observed_pairs.iter().filter(|(_, _, e)| *e).count();
    if n_edges == 0 || n_edges == observed_pairs.len() {
        return Err(Error::arg(
            "observed entries carry a single label; similarity training needs both",
        ));
    }

    let pairs: Vec<crate::train::LabeledPair> = observed_pairs
        .iter()
        .map(|&(i, j, edge)| crate::train::LabeledPair {
            x: attrs.points[i].clone(),
            xt: attrs.points[j].clone(),
            similar: edge,
        })
        .collect();
    let dataset = PairDataset::new(pairs)?;

    let spec = EmbeddingSpec::new(config.n_qubits, config.n_layers, dim)?;
    let template = SimilarityModel::shared(spec, spec, WeightVector::zeros(spec.weight_count()))?;
    let outcome = train(&template, config.measure, &dataset, &config.train)?;
    let trained = template.with_weights(outcome.theta.clone(), outcome.eta.clone())?;

    let mut predicted = SymmetricMask::new(n);
    for i in 0..n {
        for j in (i + 1)..n {
            if problem.observed.get(i, j) {
                predicted.set_pair(i, j, problem.adjacency.get(i, j));
            }
        }
    }
    let mut correct = 0usize;
    for &(i, j) in &unobserved {
        let sij = similarity(&trained, config.measure, &attrs.points[i], &attrs.points[j])?;
        let sji = similarity(&trained, config.measure, &attrs.points[j], &attrs.points[i])?;
        let edge = 0.5 * (sij + sji) >= config.threshold;
        predicted.set_pair(i, j, edge);
        if edge == problem.adjacency.get(i, j) {
            correct += 1;
        }
    }

    Ok(CompletionResult {
        predicted_adjacency: predicted,
        accuracy_unobserved: correct as f64 / unobserved.len() as f64,
        threshold: config.threshold,
        train_result: Some(outcome),
    })
}

/// Gradient-descent generation of a second-space point most similar to a
/// support point, with objective `1 - S(x_s, xt)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenerateResult {
    pub final_point: FeatureVector,
    pub final_objective: f64,
    /// Visited points with their objective values, starting point included.
    pub trajectory: Vec<(FeatureVector, f64)>,
}

/// Minimize `1 - S(x_s, xt)` over `xt` by parameter-shift gradient descent
/// with backtracking (the step halves whenever the objective would rise).
/// Stops at the step budget or when the gradient norm falls below 1e-6.
pub fn generate(
    model: &SimilarityModel,
    measure: MeasureSpec,
    x_support: &FeatureVector,
    xt0: &FeatureVector,
    steps: usize,
    learning_rate: f64,
) -> Result<GenerateResult> {
    if learning_rate <= 0.0 {
        return Err(Error::arg("learning rate must be positive"));
    }
    const GRAD_TOL: f64 = 1e-6;
    const MAX_BACKTRACKS: usize = 30;

    let objective = |xt: &FeatureVector| -> Result<f64> {
        Ok(1.0 - similarity(model, measure, x_support, xt)?)
    };

    let mut current = xt0.clone();
    let mut value = objective(&current)?;
    let mut trajectory = vec![(current.clone(), value)];

    for _ in 0..steps {
        let grad_s = feature_gradient(model, measure, x_support, &current)?;
        // d(1 - S)/dxt = -dS/dxt
        let gnorm = grad_s.iter().map(|g| g * g).sum::<f64>().sqrt();
        if gnorm < GRAD_TOL {
            break;
        }
        let mut lr = learning_rate;
        let mut accepted = false;
        for _ in 0..MAX_BACKTRACKS {
            let candidate = FeatureVector::new(
                current
                    .values()
                    .iter()
                    .zip(&grad_s)
                    .map(|(v, g)| v + lr * g)
                    .collect(),
            )?;
            let cv = objective(&candidate)?;
            if cv <= value {
                current = candidate;
                value = cv;
                trajectory.push((current.clone(), value));
                accepted = true;
                break;
            }
            lr /= 2.0;
        }
        if !accepted {
            break;
        }
    }

    Ok(GenerateResult { final_point: current, final_objective: value, trajectory })
}

/// Mean and variance of the per-image distribution distance along the
/// interpolation parameter.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransitionCurve {
    pub deltas: Vec<f64>,
    pub mean_distance: Vec<f64>,
    pub variance: Vec<f64>,
    pub n_repeats: usize,
}

/// For each interpolation value, draw `n_repeats` interpolated images,
/// compute each image's similarity samples against the two reference sets,
/// and record the mean and variance of the Wasserstein distance between the
/// two sample sets.
#[allow(clippy::too_many_arguments)]
pub fn transition_scan(
    model: &SimilarityModel,
    measure: MeasureSpec,
    red_refs: &[FeatureVector],
    blue_refs: &[FeatureVector],
    delta_grid: &[f64],
    n_repeats: usize,
    eps: f64,
    angle_scale: f64,
    scan_seed: u64,
) -> Result<TransitionCurve> {
    if red_refs.is_empty() || blue_refs.is_empty() {
        return Err(Error::EmptyInput("transition reference sets"));
    }
    if n_repeats == 0 || delta_grid.is_empty() {
        return Err(Error::arg("transition scan needs repeats and a delta grid"));
    }
    let mut mean_distance = Vec::with_capacity(delta_grid.len());
    let mut variance = Vec::with_capacity(delta_grid.len());
    for (di, &delta) in delta_grid.iter().enumerate() {
        let mut rng = seed::rng_indexed(scan_seed, "transition-delta", di as u64);
        let images = gen_delta_images(delta, n_repeats, eps, &mut rng)?;
        let mut distances = Vec::with_capacity(n_repeats);
        for image in images {
            let x = image.scaled(angle_scale);
            let mut to_red = Vec::with_capacity(red_refs.len());
            for r in red_refs {
                to_red.push(similarity(model, measure, &x, r)?);
            }
            let mut to_blue = Vec::with_capacity(blue_refs.len());
            for b in blue_refs {
                to_blue.push(similarity(model, measure, &x, b)?);
            }
            distances.push(wasserstein_1d(&to_red, &to_blue)?);
        }
        let mean = distances.iter().sum::<f64>() / n_repeats as f64;
        let var = distances.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / n_repeats as f64;
        mean_distance.push(mean);
        variance.push(var);
    }
    Ok(TransitionCurve { deltas: delta_grid.to_vec(), mean_distance, variance, n_repeats })
}

/// Configuration of the partial-measurement study.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartialStudyConfig {
    /// Images per instance (X space), split half left / half right.
    pub n_images: usize,
    /// Cluster points per instance (second space), split over two clusters.
    pub n_points: usize,
    /// Spread of the two corner clusters in the unit cube.
    pub cluster_spread: f64,
    pub embedding_layers: usize,
    /// Per-run training budget; its seed is re-derived per instance.
    pub train: TrainConfig,
    pub seed: u64,
}

impl Default for PartialStudyConfig {
    fn default() -> Self {
        PartialStudyConfig {
            n_images: 12,
            n_points: 12,
            cluster_spread: 0.07,
            embedding_layers: 1,
            train: TrainConfig { batch_size: 20, max_evals: 250, ..TrainConfig::default() },
            seed: 0,
        }
    }
}

/// Aggregated training quality for one (second-space dimension, measured
/// qubits) combination.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartialStudyRow {
    pub dim: usize,
    pub m: usize,
    pub mean_min_loss: f64,
    pub variance: f64,
}

/// For each second-space dimension, generate per-instance synthetic data
/// (half images against two corner clusters in the unit cube) and train once
/// per measured-qubit choice with the partial-projection measure on exactly
/// the same data and batch stream, recording the minimum training loss.
pub fn partial_measurement_study(
    dims: &[usize],
    m_choices: &[usize],
    n_instances: usize,
    config: &PartialStudyConfig,
) -> Result<Vec<PartialStudyRow>> {
    const N_QUBITS: usize = 4; // the image register fixes the width
    if n_instances == 0 {
        return Err(Error::arg("study needs at least one instance"));
    }
    if m_choices.iter().any(|m| *m == 0 || *m > N_QUBITS) {
        return Err(Error::arg(format!("measured qubits must lie in 1..={N_QUBITS}")));
    }
    if dims.iter().any(|d| *d == 0 || *d > N_QUBITS) {
        return Err(Error::arg(format!("cluster dimensions must lie in 1..={N_QUBITS}")));
    }

    let mut rows = Vec::new();
    for &dim in dims {
        let mut per_m: BTreeMap<usize, Vec<f64>> = m_choices.iter().map(|m| (*m, Vec::new())).collect();
        for instance in 0..n_instances {
            let inst_seed =
                seed::derive_indexed(config.seed, "study-instance", (dim * 10_000 + instance) as u64);
            let images = gen_half_images(config.n_images, &mut seed::rng(inst_seed, "images"))?;
            let centers = vec![vec![0.25; dim], vec![0.75; dim]];
            let points = gen_clusters(
                config.n_points,
                &centers,
                config.cluster_spread,
                &mut seed::rng(inst_seed, "points"),
            )?
            .to_angles()?;
            let assoc: BTreeMap<usize, usize> = [(LEFT, 0), (RIGHT, 1)].into();
            let dataset = build_pairs(&images, &points, &assoc)?;

            let spec_x = EmbeddingSpec::new(N_QUBITS, config.embedding_layers, 4)?;
            let spec_xt = EmbeddingSpec::new(N_QUBITS, config.embedding_layers, dim)?;
            let template = SimilarityModel::separate(
                spec_x,
                spec_xt,
                WeightVector::zeros(spec_x.weight_count()),
                WeightVector::zeros(spec_xt.weight_count()),
            )?;

            for &m in m_choices {
                let train_config = TrainConfig { seed: inst_seed, ..config.train };
                let outcome =
                    train(&template, MeasureSpec::PartialProjection(m), &dataset, &train_config)?;
                per_m.get_mut(&m).expect("initialized").push(outcome.best_batch_loss);
            }
        }
        for (m, losses) in per_m {
            let mean = losses.iter().sum::<f64>() / losses.len() as f64;
            let var = losses.iter().map(|l| (l - mean).powi(2)).sum::<f64>() / losses.len() as f64;
            rows.push(PartialStudyRow { dim, m, mean_min_loss: mean, variance: var });
        }
    }
    Ok(rows)
}

/// Reference points of the image experiment: the second-space cluster points
/// associated with the left and right image classes.
pub fn class_references(points: &LabeledPoints, class: usize) -> Vec<FeatureVector> {
    points.of_class(class).into_iter().cloned().collect()
}
