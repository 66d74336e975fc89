//! Similarity functionals over embedded pairs.
//!
//! Three measures are supported for a pair `(x, xt)` embedded by circuits
//! `U(x)` and `V(xt)` acting on `|0^n>`:
//!
//! - full overlap `|<0^n| U(x)^dag V(xt) |0^n>|^2`,
//! - partial-SWAP `Tr[rho_m(x) sigma_m(xt)]` of the m-qubit reduced states,
//!   computed exactly from the reduced density matrices rather than via an
//!   ancilla circuit (identical expectation value),
//! - partial projection: the probability that the first m qubits of
//!   `U(x)^dag V(xt) |0^n>` all measure 0, which need not be symmetric in
//!   `x` and `xt`.

use serde::{Deserialize, Serialize};

use crate::embedding::{qaoa_embedding, EmbeddingSpec, FeatureVector, WeightVector};
use crate::error::{Error, Result};
use crate::state::{
    hs_overlap, overlap_pure, partial_trace_first_m, prob_zero_prefix, run_circuit,
    run_circuit_from_zero, Circuit, StateVector,
};

/// Which similarity functional to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "m", rename_all = "snake_case")]
pub enum MeasureSpec {
    FullOverlap,
    PartialSwap(usize),
    PartialProjection(usize),
}

impl MeasureSpec {
    /// Number of measured qubits for a register of `n` qubits.
    pub fn measured_qubits(&self, n_qubits: usize) -> usize {
        match self {
            MeasureSpec::FullOverlap => n_qubits,
            MeasureSpec::PartialSwap(m) | MeasureSpec::PartialProjection(m) => *m,
        }
    }

    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        let m = self.measured_qubits(n_qubits);
        if m == 0 || m > n_qubits {
            return Err(Error::arg(format!(
                "measure acts on m={m} qubits, outside 1..={n_qubits}"
            )));
        }
        Ok(())
    }
}

/// Weight storage for the two embeddings; sharing is enforced structurally.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum ModelWeights {
    Shared(WeightVector),
    Separate { theta: WeightVector, eta: WeightVector },
}

/// Embedding specs and trainable weights for both input spaces.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimilarityModel {
    spec_x: EmbeddingSpec,
    spec_xt: EmbeddingSpec,
    weights: ModelWeights,
}

impl SimilarityModel {
    /// Model with one weight vector used by both embeddings.
    pub fn shared(spec_x: EmbeddingSpec, spec_xt: EmbeddingSpec, theta: WeightVector) -> Result<Self> {
        Self::check_specs(&spec_x, &spec_xt)?;
        if theta.len() != spec_x.weight_count() {
            return Err(Error::dim(format!(
                "shared weights have {} entries, spec expects {}",
                theta.len(),
                spec_x.weight_count()
            )));
        }
        Ok(SimilarityModel { spec_x, spec_xt, weights: ModelWeights::Shared(theta) })
    }

    /// Model with independent weight vectors per space.
    pub fn separate(
        spec_x: EmbeddingSpec,
        spec_xt: EmbeddingSpec,
        theta: WeightVector,
        eta: WeightVector,
    ) -> Result<Self> {
        Self::check_specs(&spec_x, &spec_xt)?;
        if theta.len() != spec_x.weight_count() || eta.len() != spec_xt.weight_count() {
            return Err(Error::dim("weight lengths do not match embedding specs".to_string()));
        }
        Ok(SimilarityModel { spec_x, spec_xt, weights: ModelWeights::Separate { theta, eta } })
    }

    fn check_specs(spec_x: &EmbeddingSpec, spec_xt: &EmbeddingSpec) -> Result<()> {
        spec_x.validate()?;
        spec_xt.validate()?;
        if spec_x.n_qubits != spec_xt.n_qubits {
            return Err(Error::dim(format!(
                "both embeddings must share one register: {} vs {} qubits",
                spec_x.n_qubits, spec_xt.n_qubits
            )));
        }
        Ok(())
    }

    pub fn spec_x(&self) -> &EmbeddingSpec {
        &self.spec_x
    }

    pub fn spec_xt(&self) -> &EmbeddingSpec {
        &self.spec_xt
    }

    pub fn n_qubits(&self) -> usize {
        self.spec_x.n_qubits
    }

    pub fn shared_weights(&self) -> bool {
        matches!(self.weights, ModelWeights::Shared(_))
    }

    pub fn theta(&self) -> &WeightVector {
        match &self.weights {
            ModelWeights::Shared(w) => w,
            ModelWeights::Separate { theta, .. } => theta,
        }
    }

    pub fn eta(&self) -> &WeightVector {
        match &self.weights {
            ModelWeights::Shared(w) => w,
            ModelWeights::Separate { eta, .. } => eta,
        }
    }

    /// Copy with replaced weights, keeping the sharing mode.
    pub fn with_weights(&self, theta: WeightVector, eta: WeightVector) -> Result<Self> {
        match self.weights {
            ModelWeights::Shared(_) => {
                if theta != eta {
                    return Err(Error::arg("shared-weight model requires theta == eta"));
                }
                Self::shared(self.spec_x, self.spec_xt, theta)
            }
            ModelWeights::Separate { .. } => {
                Self::separate(self.spec_x, self.spec_xt, theta, eta)
            }
        }
    }

    /// Embedding circuit for a point of the first space.
    pub fn circuit_x(&self, x: &FeatureVector) -> Result<Circuit> {
        qaoa_embedding(&self.spec_x, x, self.theta())
    }

    /// Embedding circuit for a point of the second space.
    pub fn circuit_xt(&self, xt: &FeatureVector) -> Result<Circuit> {
        qaoa_embedding(&self.spec_xt, xt, self.eta())
    }
}

/// Evaluate a measure given the two embedding circuits explicitly.
///
/// This is the shared kernel behind [`similarity`] and the parameter-shift
/// gradients, which need to evaluate shifted copies of one circuit.
pub(crate) fn eval_measure_circuits(
    circ_u: &Circuit,
    circ_v: &Circuit,
    measure: MeasureSpec,
) -> Result<f64> {
    if circ_u.n_qubits != circ_v.n_qubits {
        return Err(Error::dim("pair circuits act on different registers".to_string()));
    }
    let n = circ_u.n_qubits;
    measure.validate(n)?;
    match measure {
        MeasureSpec::FullOverlap => {
            let a = run_circuit_from_zero(circ_u)?;
            let b = run_circuit_from_zero(circ_v)?;
            overlap_pure(&a, &b)
        }
        MeasureSpec::PartialSwap(m) => {
            let rho = partial_trace_first_m(&run_circuit_from_zero(circ_u)?, m)?;
            let sigma = partial_trace_first_m(&run_circuit_from_zero(circ_v)?, m)?;
            hs_overlap(&rho, &sigma)
        }
        MeasureSpec::PartialProjection(m) => {
            let after_v = run_circuit_from_zero(circ_v)?;
            let pair_state = run_circuit(&circ_u.adjoint(), &after_v)?;
            prob_zero_prefix(&pair_state, m)
        }
    }
}

/// Similarity of a pair `(x, xt)` under the model and measure. Always lies in
/// `[0, 1]`.
pub fn similarity(
    model: &SimilarityModel,
    measure: MeasureSpec,
    x: &FeatureVector,
    xt: &FeatureVector,
) -> Result<f64> {
    let circ_u = model.circuit_x(x)?;
    let circ_v = model.circuit_xt(xt)?;
    eval_measure_circuits(&circ_u, &circ_v, measure)
}

/// Similarity of a pair embedded by a single circuit over the concatenated
/// features: the probability that the first `m` qubits of `circuit |0^n>`
/// all measure 0. With `m = n` this is the full-overlap value of the pair
/// embedding.
pub fn pair_projection_similarity(circuit: &Circuit, m: usize) -> Result<f64> {
    let state = run_circuit_from_zero(circuit)?;
    prob_zero_prefix(&state, m)
}

/// Distance induced by a similarity value: `sqrt(max(0, 2 - 2 s))`.
pub fn distance(
    model: &SimilarityModel,
    measure: MeasureSpec,
    x: &FeatureVector,
    xt: &FeatureVector,
) -> Result<f64> {
    Ok(distance_from_similarity(similarity(model, measure, x, xt)?))
}

pub fn distance_from_similarity(s: f64) -> f64 {
    (2.0 - 2.0 * s).max(0.0).sqrt()
}

/// Subspace-dimension ratio of a partial measurement on `m` of `n` qubits.
///
/// Embeddings satisfying the similar-pair constraint live in a subspace of
/// dimension `2^(n-m)`; those satisfying the dissimilar-pair constraint in
/// one of dimension `2^n - 2^(n-m)`. The ratio `1/(2^m - 1)` describes the
/// relative difficulty of the two training constraints.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Zeta {
    /// Numerator of the exact ratio (always 1).
    pub numerator: u64,
    /// Denominator of the exact ratio: `2^m - 1`.
    pub denominator: u64,
    /// Dimension available to similar-pair embeddings: `2^(n-m)`.
    pub dim_similar: u64,
    /// Dimension available to dissimilar-pair embeddings: `2^n - 2^(n-m)`.
    pub dim_dissimilar: u64,
}

impl Zeta {
    pub fn value(&self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }
}

/// Compute the capacity ratio for `m` measured qubits out of `n`.
pub fn zeta(n: usize, m: usize) -> Result<Zeta> {
    if m == 0 || m > n {
        return Err(Error::arg(format!("m={m} out of range 1..={n}")));
    }
    if n >= 63 {
        return Err(Error::arg("register too large for exact subspace dimensions"));
    }
    let total = 1u64 << n;
    let dim_similar = 1u64 << (n - m);
    Ok(Zeta {
        numerator: 1,
        denominator: (1u64 << m) - 1,
        dim_similar,
        dim_dissimilar: total - dim_similar,
    })
}

/// Closed form for the pair circuit's two-qubit projection similarity:
/// `cos^2(x/2) cos^2(xt/2)`.
pub fn toy_s2_closed(x: f64, xt: f64) -> f64 {
    (x / 2.0).cos().powi(2) * (xt / 2.0).cos().powi(2)
}

/// Closed form for the pair circuit's one-qubit projection similarity:
/// `[cos(x - xt) + cos(x + xt)]/4 + 1/2`.
pub fn toy_s1_closed(x: f64, xt: f64) -> f64 {
    ((x - xt).cos() + (x + xt).cos()) / 4.0 + 0.5
}

/// Run one circuit pair state and keep it around for repeated prefix
/// probabilities; used by analysis sweeps.
pub fn pair_state(circuit: &Circuit) -> Result<StateVector> {
    run_circuit_from_zero(circuit)
}
