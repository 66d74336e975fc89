//! Pair datasets, the squared similarity loss, stochastic batching and the
//! gradient-free training driver, plus exact parameter-shift gradients with
//! respect to data features.
//!
//! Training minimizes the mean of `(S(x, xt) - y)^2` over labeled pairs.
//! Every objective evaluation draws a fresh half-similar/half-dissimilar
//! batch from a seeded stream, so runs are reproducible bit for bit.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::embedding::{FeatureVector, WeightVector};
use crate::error::{Error, Result};
use crate::optimize::{minimize, OptimOptions, OptimizerKind};
use crate::seed;
use crate::similarity::{eval_measure_circuits, similarity, MeasureSpec, SimilarityModel};

/// One labeled pair; `similar` is the regression target (1 or 0).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabeledPair {
    pub x: FeatureVector,
    pub xt: FeatureVector,
    pub similar: bool,
}

impl LabeledPair {
    pub fn target(&self) -> f64 {
        if self.similar {
            1.0
        } else {
            0.0
        }
    }
}

/// Labeled pairs partitioned into the similar set E and dissimilar set D.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairDataset {
    pairs: Vec<LabeledPair>,
    similar_idx: Vec<usize>,
    dissimilar_idx: Vec<usize>,
}

impl PairDataset {
    pub fn new(pairs: Vec<LabeledPair>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::EmptyInput("pair dataset"));
        }
        let dim_x = pairs[0].x.len();
        let dim_xt = pairs[0].xt.len();
        for p in &pairs {
            if p.x.len() != dim_x || p.xt.len() != dim_xt {
                return Err(Error::dim("inconsistent feature dimensions across pairs".to_string()));
            }
        }
        let similar_idx = pairs
            .iter()
            .enumerate()
            .filter(|(_, p)| p.similar)
            .map(|(i, _)| i)
            .collect();
        let dissimilar_idx = pairs
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.similar)
            .map(|(i, _)| i)
            .collect();
        Ok(PairDataset { pairs, similar_idx, dissimilar_idx })
    }

    pub fn pairs(&self) -> &[LabeledPair] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Indices of the similar pairs (y = 1).
    pub fn similar_indices(&self) -> &[usize] {
        &self.similar_idx
    }

    /// Indices of the dissimilar pairs (y = 0).
    pub fn dissimilar_indices(&self) -> &[usize] {
        &self.dissimilar_idx
    }
}

/// How training weights are initialized.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialWeights {
    Zeros,
    /// Uniform in (-pi, pi), drawn from the seeded `init` stream.
    UniformPi,
}

/// Training configuration; all randomness flows from `seed`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub batch_size: usize,
    pub max_evals: usize,
    pub seed: u64,
    pub optimizer: OptimizerKind,
    pub rho_begin: f64,
    pub rho_end: f64,
    pub initial_weights: InitialWeights,
    /// Consecutive failed trust steps before the radius shrinks; raising it
    /// makes the radius schedule robust to batch noise.
    #[serde(default = "default_shrink_patience")]
    pub shrink_patience: usize,
}

fn default_shrink_patience() -> usize {
    3
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            batch_size: 80,
            max_evals: 1000,
            seed: 0,
            optimizer: OptimizerKind::Cobyla,
            rho_begin: 0.5,
            rho_end: 1e-4,
            initial_weights: InitialWeights::UniformPi,
            shrink_patience: 3,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch_size < 2 || self.batch_size % 2 != 0 {
            return Err(Error::arg(format!(
                "batch_size must be even and >= 2, got {}",
                self.batch_size
            )));
        }
        if !(self.rho_begin > self.rho_end && self.rho_end > 0.0) {
            return Err(Error::arg("trust radii must satisfy rho_begin > rho_end > 0"));
        }
        if self.max_evals == 0 {
            return Err(Error::arg("max_evals must be positive"));
        }
        Ok(())
    }

    fn optim_options(&self, stochastic_batches: bool) -> OptimOptions {
        OptimOptions {
            rho_begin: self.rho_begin,
            rho_end: self.rho_end,
            max_evals: self.max_evals,
            shrink_patience: self.shrink_patience,
            // when batches subsample the dataset every evaluation is noisy,
            // so the incumbent is re-measured to keep comparisons unbiased
            refresh_incumbent: stochastic_batches,
        }
    }
}

/// Result of a training run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainResult {
    pub theta: WeightVector,
    pub eta: WeightVector,
    /// Every objective evaluation as `(eval_index, batch_loss)`.
    pub loss_history: Vec<(usize, f64)>,
    /// Full-dataset loss at the initial weights.
    pub initial_full_loss: f64,
    /// Full-dataset loss at the returned weights.
    pub final_full_loss: f64,
    /// Smallest batch loss seen during the run.
    pub best_batch_loss: f64,
    pub evals: usize,
}

/// Mean of `(S - y)^2` over the given pairs.
pub fn loss(model: &SimilarityModel, measure: MeasureSpec, pairs: &[&LabeledPair]) -> Result<f64> {
    if pairs.is_empty() {
        return Err(Error::EmptyInput("loss subset"));
    }
    let mut acc = 0.0;
    for p in pairs {
        let s = similarity(model, measure, &p.x, &p.xt)?;
        let d = s - p.target();
        acc += d * d;
    }
    Ok(acc / pairs.len() as f64)
}

/// Mean loss over dataset entries selected by index.
pub fn loss_indexed(
    model: &SimilarityModel,
    measure: MeasureSpec,
    dataset: &PairDataset,
    indices: &[usize],
) -> Result<f64> {
    let subset: Vec<&LabeledPair> = indices.iter().map(|&i| &dataset.pairs[i]).collect();
    loss(model, measure, &subset)
}

/// Mean loss over the whole dataset.
pub fn full_loss(model: &SimilarityModel, measure: MeasureSpec, dataset: &PairDataset) -> Result<f64> {
    let subset: Vec<&LabeledPair> = dataset.pairs.iter().collect();
    loss(model, measure, &subset)
}

/// Draw `size/2` similar and `size/2` dissimilar pair indices.
///
/// Within each class the draw is uniform without replacement (a partial
/// shuffle), so a batch of exactly `|E| + |D|` with balanced classes covers
/// every pair once. A class smaller than `size/2` is sampled with
/// replacement instead, with a logged warning.
pub fn stochastic_batch(
    dataset: &PairDataset,
    size: usize,
    rng: &mut impl Rng,
) -> Result<Vec<usize>> {
    if size < 2 || size % 2 != 0 {
        return Err(Error::arg(format!("batch size must be even and >= 2, got {size}")));
    }
    let half = size / 2;
    let mut out = Vec::with_capacity(size);
    for (name, class) in [
        ("similar", &dataset.similar_idx),
        ("dissimilar", &dataset.dissimilar_idx),
    ] {
        if class.is_empty() {
            log::warn!("{name} class is empty; batch drawn from the other class only");
            continue;
        }
        if class.len() >= half {
            // partial Fisher-Yates: the first `half` entries of a shuffle
            let mut pool = class.clone();
            for i in 0..half {
                let j = rng.gen_range(i..pool.len());
                pool.swap(i, j);
                out.push(pool[i]);
            }
        } else {
            log::warn!(
                "{name} class has {} pairs, fewer than half a batch ({half}); sampling with replacement",
                class.len()
            );
            for _ in 0..half {
                out.push(class[rng.gen_range(0..class.len())]);
            }
        }
    }
    if out.is_empty() {
        return Err(Error::EmptyInput("both pair classes are empty"));
    }
    Ok(out)
}

fn initial_point(model: &SimilarityModel, config: &TrainConfig) -> Vec<f64> {
    let len = if model.shared_weights() {
        model.spec_x().weight_count()
    } else {
        model.spec_x().weight_count() + model.spec_xt().weight_count()
    };
    match config.initial_weights {
        InitialWeights::Zeros => vec![0.0; len],
        InitialWeights::UniformPi => {
            let mut rng = seed::rng(config.seed, "init");
            (0..len).map(|_| rng.gen_range(-core::f64::consts::PI..core::f64::consts::PI)).collect()
        }
    }
}

fn split_weights(model: &SimilarityModel, point: &[f64]) -> (WeightVector, WeightVector) {
    if model.shared_weights() {
        let w = WeightVector::new(point.to_vec());
        (w.clone(), w)
    } else {
        let cut = model.spec_x().weight_count();
        (
            WeightVector::new(point[..cut].to_vec()),
            WeightVector::new(point[cut..].to_vec()),
        )
    }
}

/// Train the model's weights on the dataset.
///
/// The model argument supplies the embedding structure and sharing mode; the
/// starting point comes from `config.initial_weights`. Theta and eta are
/// optimized jointly as one concatenated vector (or a single shared vector).
/// Each objective evaluation draws a fresh stochastic batch from the seeded
/// `batch` stream; the returned weights are the best-seen point and the full
/// dataset loss is recomputed there.
pub fn train(
    model: &SimilarityModel,
    measure: MeasureSpec,
    dataset: &PairDataset,
    config: &TrainConfig,
) -> Result<TrainResult> {
    config.validate()?;
    measure.validate(model.n_qubits())?;
    if dataset.is_empty() {
        return Err(Error::EmptyInput("training dataset"));
    }

    let x0 = initial_point(model, config);
    let (theta0, eta0) = split_weights(model, &x0);
    let initial_model = model.with_weights(theta0, eta0)?;
    let initial_full_loss = full_loss(&initial_model, measure, dataset)?;

    let mut batch_rng = seed::rng(config.seed, "batch");
    let objective = |point: &[f64]| -> f64 {
        let (theta, eta) = split_weights(model, point);
        let candidate = match model.with_weights(theta, eta) {
            Ok(m) => m,
            Err(_) => return f64::NAN,
        };
        let batch = match stochastic_batch(dataset, config.batch_size, &mut batch_rng) {
            Ok(b) => b,
            Err(_) => return f64::NAN,
        };
        loss_indexed(&candidate, measure, dataset, &batch).unwrap_or(f64::NAN)
    };

    let stochastic = config.batch_size < dataset.len()
        || dataset.similar_indices().len() != dataset.dissimilar_indices().len();
    let outcome =
        minimize(config.optimizer, objective, &x0, &config.optim_options(stochastic))?;

    // Under batch noise the smallest batch loss is an optimistic draw, so the
    // optimizer's terminal incumbent can beat the best-seen point on the full
    // dataset; return whichever is actually better there.
    let mut chosen = &outcome.best_point;
    let (theta, eta) = split_weights(model, chosen);
    let mut final_full_loss =
        full_loss(&model.with_weights(theta, eta)?, measure, dataset)?;
    if outcome.final_point != outcome.best_point {
        let (theta, eta) = split_weights(model, &outcome.final_point);
        let incumbent_loss = full_loss(&model.with_weights(theta, eta)?, measure, dataset)?;
        if incumbent_loss < final_full_loss {
            chosen = &outcome.final_point;
            final_full_loss = incumbent_loss;
        }
    }

    let (theta, eta) = split_weights(model, chosen);
    Ok(TrainResult {
        theta,
        eta,
        loss_history: outcome.history,
        initial_full_loss,
        final_full_loss,
        best_batch_loss: outcome.best_value,
        evals: outcome.evals,
    })
}

/// Exact gradient of the similarity with respect to the second-space
/// features, by the parameter-shift rule.
///
/// Every feature slot enters only RX/RY/RZZ gates (half-Pauli generators),
/// so for each tagged occurrence the derivative is
/// `[S(occ + pi/2) - S(occ - pi/2)] / 2` with the shift applied to that
/// single gate; the slot derivative is the sum over its occurrences. The
/// first-space circuit stays fixed, so for the partial-SWAP measure only the
/// second register is shifted.
pub fn feature_gradient(
    model: &SimilarityModel,
    measure: MeasureSpec,
    x: &FeatureVector,
    xt: &FeatureVector,
) -> Result<Vec<f64>> {
    measure.validate(model.n_qubits())?;
    let circ_u = model.circuit_x(x)?;
    let base_v = model.circuit_xt(xt)?;
    let shift = core::f64::consts::FRAC_PI_2;

    let mut grad = vec![0.0; xt.len()];
    for (slot, g) in grad.iter_mut().enumerate() {
        for occ in base_v.feature_occurrences(slot) {
            let mut plus = base_v.clone();
            plus.gates[occ] = plus.gates[occ].shifted(shift);
            let mut minus = base_v.clone();
            minus.gates[occ] = minus.gates[occ].shifted(-shift);
            let s_plus = eval_measure_circuits(&circ_u, &plus, measure)?;
            let s_minus = eval_measure_circuits(&circ_u, &minus, measure)?;
            *g += (s_plus - s_minus) / 2.0;
        }
    }
    Ok(grad)
}

/// Central finite-difference gradient of the similarity in the second-space
/// features; the independent oracle used to cross-check the shift rule.
pub fn feature_gradient_fd(
    model: &SimilarityModel,
    measure: MeasureSpec,
    x: &FeatureVector,
    xt: &FeatureVector,
    h: f64,
) -> Result<Vec<f64>> {
    let mut grad = vec![0.0; xt.len()];
    for (slot, g) in grad.iter_mut().enumerate() {
        let plus = similarity(model, measure, x, &xt.with_shifted(slot, h))?;
        let minus = similarity(model, measure, x, &xt.with_shifted(slot, -h))?;
        *g = (plus - minus) / (2.0 * h);
    }
    Ok(grad)
}
