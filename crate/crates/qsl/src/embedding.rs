//! Parameterized embedding circuits.
//!
//! Two constructions are provided: the layered data-embedding ansatz used by
//! the numerical experiments (feature RX sublayer, trainable ring ZZ
//! couplings, trainable per-qubit RY rotations, with a trailing feature
//! sublayer after the last layer), and the fixed two-qubit pair circuit of
//! the analytic study.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::{Circuit, Gate, ParamBinding};

/// Shape of a layered embedding: register size, layer count and how many
/// leading qubits carry data features.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingSpec {
    pub n_qubits: usize,
    pub n_layers: usize,
    pub feature_dim: usize,
}

impl EmbeddingSpec {
    pub fn new(n_qubits: usize, n_layers: usize, feature_dim: usize) -> Result<Self> {
        let spec = EmbeddingSpec { n_qubits, n_layers, feature_dim };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_qubits == 0 {
            return Err(Error::arg("embedding needs at least one qubit"));
        }
        if self.n_layers == 0 {
            return Err(Error::arg("embedding needs at least one layer"));
        }
        if self.feature_dim == 0 {
            return Err(Error::arg("embedding needs at least one feature"));
        }
        if self.feature_dim > self.n_qubits {
            return Err(Error::arg(format!(
                "feature_dim {} exceeds qubit count {}; multi-gate feature packing is not supported",
                self.feature_dim, self.n_qubits
            )));
        }
        Ok(())
    }

    /// Ring coupling pairs: `(0,1), (1,2), ..., (n-1,0)` for n >= 3, the
    /// single pair for n = 2, none for a lone qubit.
    pub fn ring_pairs(&self) -> Vec<(usize, usize)> {
        match self.n_qubits {
            1 => Vec::new(),
            2 => vec![(0, 1)],
            n => (0..n).map(|i| (i, (i + 1) % n)).collect(),
        }
    }

    /// Number of trainable angles: `n_layers * (ring_size + n_qubits)`.
    pub fn weight_count(&self) -> usize {
        self.n_layers * (self.ring_pairs().len() + self.n_qubits)
    }

    /// Total gate count of the built circuit, including the trailing feature
    /// sublayer.
    pub fn gate_count(&self) -> usize {
        self.n_layers * (self.n_qubits + self.ring_pairs().len() + self.n_qubits) + self.n_qubits
    }
}

/// Data features entering gate angles, already in radians.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    values: Vec<f64>,
}

impl FeatureVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::arg("feature values must be finite"));
        }
        Ok(FeatureVector { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Component-wise rescaled copy.
    pub fn scaled(&self, factor: f64) -> FeatureVector {
        FeatureVector { values: self.values.iter().map(|v| v * factor).collect() }
    }

    /// Copy with one component shifted; used by the generative optimizer.
    pub fn with_shifted(&self, index: usize, delta: f64) -> FeatureVector {
        let mut values = self.values.clone();
        values[index] += delta;
        FeatureVector { values }
    }
}

impl From<Vec<f64>> for FeatureVector {
    fn from(values: Vec<f64>) -> Self {
        FeatureVector { values }
    }
}

/// Trainable angles for one embedding.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightVector {
    values: Vec<f64>,
}

impl WeightVector {
    pub fn new(values: Vec<f64>) -> Self {
        WeightVector { values }
    }

    pub fn zeros(len: usize) -> Self {
        WeightVector { values: vec![0.0; len] }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl From<Vec<f64>> for WeightVector {
    fn from(values: Vec<f64>) -> Self {
        WeightVector { values }
    }
}

/// Build the layered embedding circuit for the given features and weights.
///
/// Per layer: a feature RX sublayer (`RX(x_k)` on qubit k for k below the
/// feature dimension, `RX(0)` on the padding qubits), ring RZZ couplings with
/// trainable angles, then a trainable RY on every qubit. One more feature
/// sublayer follows the last layer, so feature slot k occurs `n_layers + 1`
/// times. All feature gates are tagged with their slot so gradient code can
/// shift individual occurrences.
pub fn qaoa_embedding(spec: &EmbeddingSpec, x: &FeatureVector, w: &WeightVector) -> Result<Circuit> {
    spec.validate()?;
    if x.len() != spec.feature_dim {
        return Err(Error::dim(format!(
            "feature vector has {} entries, spec expects {}",
            x.len(),
            spec.feature_dim
        )));
    }
    if w.len() != spec.weight_count() {
        return Err(Error::dim(format!(
            "weight vector has {} entries, spec expects {}",
            w.len(),
            spec.weight_count()
        )));
    }

    let ring = spec.ring_pairs();
    let mut gates = Vec::with_capacity(spec.gate_count());
    let mut weight_slot = 0usize;

    let feature_sublayer = |gates: &mut Vec<Gate>| {
        for q in 0..spec.n_qubits {
            if q < spec.feature_dim {
                gates.push(Gate::Rx {
                    qubit: q,
                    angle: x.values()[q],
                    binding: ParamBinding::Feature(q),
                });
            } else {
                gates.push(Gate::rx(q, 0.0));
            }
        }
    };

    for _ in 0..spec.n_layers {
        feature_sublayer(&mut gates);
        for &(a, b) in &ring {
            gates.push(Gate::Rzz {
                qubit_a: a,
                qubit_b: b,
                angle: w.values()[weight_slot],
                binding: ParamBinding::Weight(weight_slot),
            });
            weight_slot += 1;
        }
        for q in 0..spec.n_qubits {
            gates.push(Gate::Ry {
                qubit: q,
                angle: w.values()[weight_slot],
                binding: ParamBinding::Weight(weight_slot),
            });
            weight_slot += 1;
        }
    }
    feature_sublayer(&mut gates);

    debug_assert_eq!(weight_slot, spec.weight_count());
    Circuit::new(spec.n_qubits, gates)
}

/// The fixed two-qubit pair-embedding circuit of the analytic study.
///
/// Gate sequence (applied left to right): `RX(xt)` on qubit 0, `CNOT(0,1)`,
/// `RY(x)` on qubit 0. This is the composition whose full unitary matches the
/// closed-form matrix used as the golden oracle; feature slot 0 tags `x` and
/// slot 1 tags `xt`.
pub fn toy_pair_circuit(x: f64, xt: f64) -> Circuit {
    Circuit {
        n_qubits: 2,
        gates: vec![
            Gate::Rx { qubit: 0, angle: xt, binding: ParamBinding::Feature(1) },
            Gate::cnot(0, 1),
            Gate::Ry { qubit: 0, angle: x, binding: ParamBinding::Feature(0) },
        ],
    }
}
