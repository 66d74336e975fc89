//! Dense statevector simulation of small qubit registers.
//!
//! Conventions, fixed once for the whole crate:
//!
//! - Qubit 0 is the **most significant bit** of a basis-state index, so the
//!   "first m qubits" of a register are the m most significant bits and the
//!   amplitudes of states `|0^m i>` form a contiguous prefix of the array.
//! - Rotation gates use the generator convention `exp(-i * angle * P / 2)`
//!   for Pauli strings `P` (X, Y, Z(x)Z).
//!
//! Registers in this crate stay small (at most a handful of qubits), so all
//! operations work on dense `Vec<Complex64>` storage.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest register accepted by [`circuit_unitary`]; the dense matrix has
/// `4^n` entries.
pub const MAX_UNITARY_QUBITS: usize = 10;

const NORM_TOL: f64 = 1e-12;
const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const PSD_TOL: f64 = -1e-10;

/// How a gate angle is bound to model inputs.
///
/// `Feature` slots mark the gates that carry data so the same feature index
/// can be located at every occurrence; parameter-shift differentiation shifts
/// one occurrence at a time.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ParamBinding {
    Fixed,
    Feature(usize),
    Weight(usize),
}

/// A single gate of the supported set.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Gate {
    Rx { qubit: usize, angle: f64, binding: ParamBinding },
    Ry { qubit: usize, angle: f64, binding: ParamBinding },
    Rzz { qubit_a: usize, qubit_b: usize, angle: f64, binding: ParamBinding },
    Cnot { control: usize, target: usize },
}

impl Gate {
    pub fn rx(qubit: usize, angle: f64) -> Self {
        Gate::Rx { qubit, angle, binding: ParamBinding::Fixed }
    }

    pub fn ry(qubit: usize, angle: f64) -> Self {
        Gate::Ry { qubit, angle, binding: ParamBinding::Fixed }
    }

    pub fn rzz(qubit_a: usize, qubit_b: usize, angle: f64) -> Self {
        Gate::Rzz { qubit_a, qubit_b, angle, binding: ParamBinding::Fixed }
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Gate::Cnot { control, target }
    }

    pub fn binding(&self) -> ParamBinding {
        match self {
            Gate::Rx { binding, .. } | Gate::Ry { binding, .. } | Gate::Rzz { binding, .. } => {
                *binding
            }
            Gate::Cnot { .. } => ParamBinding::Fixed,
        }
    }

    pub fn angle(&self) -> Option<f64> {
        match self {
            Gate::Rx { angle, .. } | Gate::Ry { angle, .. } | Gate::Rzz { angle, .. } => {
                Some(*angle)
            }
            Gate::Cnot { .. } => None,
        }
    }

    /// Shift the angle of a rotation gate; no-op for CNOT.
    pub fn shifted(&self, delta: f64) -> Self {
        let mut g = *self;
        match &mut g {
            Gate::Rx { angle, .. } | Gate::Ry { angle, .. } | Gate::Rzz { angle, .. } => {
                *angle += delta;
            }
            Gate::Cnot { .. } => {}
        }
        g
    }

    /// The inverse gate: negated angle for rotations, CNOT is self-inverse.
    pub fn adjoint(&self) -> Self {
        let mut g = *self;
        match &mut g {
            Gate::Rx { angle, .. } | Gate::Ry { angle, .. } | Gate::Rzz { angle, .. } => {
                *angle = -*angle;
            }
            Gate::Cnot { .. } => {}
        }
        g
    }

    fn check_qubits(&self, n_qubits: usize) -> Result<()> {
        let check = |q: usize| {
            if q < n_qubits {
                Ok(())
            } else {
                Err(Error::QubitOutOfRange { qubit: q, n_qubits })
            }
        };
        match self {
            Gate::Rx { qubit, .. } | Gate::Ry { qubit, .. } => check(*qubit),
            Gate::Rzz { qubit_a, qubit_b, .. } => {
                check(*qubit_a)?;
                check(*qubit_b)?;
                if qubit_a == qubit_b {
                    return Err(Error::arg("two-qubit gate on identical qubits"));
                }
                Ok(())
            }
            Gate::Cnot { control, target } => {
                check(*control)?;
                check(*target)?;
                if control == target {
                    return Err(Error::arg("CNOT control equals target"));
                }
                Ok(())
            }
        }
    }
}

/// An ordered gate list, applied left to right to the initial state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    pub n_qubits: usize,
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize, gates: Vec<Gate>) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::arg("circuit needs at least one qubit"));
        }
        for g in &gates {
            g.check_qubits(n_qubits)?;
        }
        Ok(Circuit { n_qubits, gates })
    }

    pub fn empty(n_qubits: usize) -> Self {
        Circuit { n_qubits, gates: Vec::new() }
    }

    /// The adjoint circuit: reversed gate order with negated angles.
    pub fn adjoint(&self) -> Circuit {
        Circuit {
            n_qubits: self.n_qubits,
            gates: self.gates.iter().rev().map(Gate::adjoint).collect(),
        }
    }

    /// Indices of the gates bound to the given feature slot, in order.
    pub fn feature_occurrences(&self, slot: usize) -> Vec<usize> {
        self.gates
            .iter()
            .enumerate()
            .filter(|(_, g)| g.binding() == ParamBinding::Feature(slot))
            .map(|(i, _)| i)
            .collect()
    }
}

/// Normalized complex amplitudes of an n-qubit register.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// The all-zeros computational basis state `|0^n>`.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        Self::basis(n_qubits, 0)
    }

    /// A computational basis state by index (qubit 0 = most significant bit).
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::arg("state needs at least one qubit"));
        }
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::arg(format!(
                "basis index {index} out of range for {n_qubits} qubits"
            )));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector { n_qubits, amplitudes })
    }

    /// Build from raw amplitudes; the length must be a power of two and the
    /// norm must be 1 within 1e-12.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let dim = amplitudes.len();
        if dim < 2 || !dim.is_power_of_two() {
            return Err(Error::dim(format!("amplitude count {dim} is not a power of two >= 2")));
        }
        let n_qubits = dim.trailing_zeros() as usize;
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::arg(format!("state norm {norm} is not 1")));
        }
        Ok(StateVector { n_qubits, amplitudes })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Measurement probability of a single basis state.
    pub fn probability(&self, index: usize) -> f64 {
        self.amplitudes[index].norm_sqr()
    }

    fn bit_mask(&self, qubit: usize) -> usize {
        1usize << (self.n_qubits - 1 - qubit)
    }
}

fn apply_single_qubit(state: &mut StateVector, qubit: usize, u: [[Complex64; 2]; 2]) {
    let mask = state.bit_mask(qubit);
    let dim = state.amplitudes.len();
    for i in 0..dim {
        if i & mask == 0 {
            let j = i | mask;
            let a = state.amplitudes[i];
            let b = state.amplitudes[j];
            state.amplitudes[i] = u[0][0] * a + u[0][1] * b;
            state.amplitudes[j] = u[1][0] * a + u[1][1] * b;
        }
    }
}

pub(crate) fn apply_gate_in_place(state: &mut StateVector, gate: &Gate) -> Result<()> {
    gate.check_qubits(state.n_qubits)?;
    match *gate {
        Gate::Rx { qubit, angle, .. } => {
            let (c, s) = ((angle / 2.0).cos(), (angle / 2.0).sin());
            apply_single_qubit(
                state,
                qubit,
                [
                    [Complex64::new(c, 0.0), Complex64::new(0.0, -s)],
                    [Complex64::new(0.0, -s), Complex64::new(c, 0.0)],
                ],
            );
        }
        Gate::Ry { qubit, angle, .. } => {
            let (c, s) = ((angle / 2.0).cos(), (angle / 2.0).sin());
            apply_single_qubit(
                state,
                qubit,
                [
                    [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
                    [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
                ],
            );
        }
        Gate::Rzz { qubit_a, qubit_b, angle, .. } => {
            let ma = state.bit_mask(qubit_a);
            let mb = state.bit_mask(qubit_b);
            let even = Complex64::from_polar(1.0, -angle / 2.0);
            let odd = Complex64::from_polar(1.0, angle / 2.0);
            for (i, amp) in state.amplitudes.iter_mut().enumerate() {
                let parity = ((i & ma) != 0) ^ ((i & mb) != 0);
                *amp *= if parity { odd } else { even };
            }
        }
        Gate::Cnot { control, target } => {
            let mc = state.bit_mask(control);
            let mt = state.bit_mask(target);
            let dim = state.amplitudes.len();
            for i in 0..dim {
                if i & mc != 0 && i & mt == 0 {
                    state.amplitudes.swap(i, i | mt);
                }
            }
        }
    }
    Ok(())
}

/// Apply a single gate, returning the new state. Norm is preserved.
pub fn apply_gate(state: &StateVector, gate: &Gate) -> Result<StateVector> {
    let mut out = state.clone();
    apply_gate_in_place(&mut out, gate)?;
    Ok(out)
}

/// Fold [`apply_gate`] over the circuit's gates in order.
pub fn run_circuit(circuit: &Circuit, initial: &StateVector) -> Result<StateVector> {
    if circuit.n_qubits != initial.n_qubits {
        return Err(Error::dim(format!(
            "circuit on {} qubits applied to {}-qubit state",
            circuit.n_qubits, initial.n_qubits
        )));
    }
    let mut state = initial.clone();
    for gate in &circuit.gates {
        apply_gate_in_place(&mut state, gate)?;
    }
    Ok(state)
}

/// Run a circuit starting from `|0^n>`.
pub fn run_circuit_from_zero(circuit: &Circuit) -> Result<StateVector> {
    run_circuit(circuit, &StateVector::zero(circuit.n_qubits)?)
}

/// A dense square matrix of complex entries (row-major).
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        ComplexMatrix { dim, entries: vec![Complex64::new(0.0, 0.0); dim * dim] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.entries[row * self.dim + col] = value;
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// Max-norm of `U^dagger U - I`, the unitarity residual.
    pub fn unitarity_residual(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..d {
                    acc += self.get(k, i).conj() * self.get(k, j);
                }
                let expect = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((acc - Complex64::new(expect, 0.0)).norm());
            }
        }
        worst
    }

    /// Largest entrywise absolute difference to another matrix.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// The full unitary of a circuit, built column by column from basis states.
///
/// Guarded to small registers; the workloads in this crate never exceed a few
/// qubits and the matrix is only used for testing and analysis.
pub fn circuit_unitary(circuit: &Circuit) -> Result<ComplexMatrix> {
    if circuit.n_qubits > MAX_UNITARY_QUBITS {
        return Err(Error::RegisterTooLarge {
            n_qubits: circuit.n_qubits,
            limit: MAX_UNITARY_QUBITS,
        });
    }
    let dim = 1usize << circuit.n_qubits;
    let mut u = ComplexMatrix::zeros(dim);
    for col in 0..dim {
        let out = run_circuit(circuit, &StateVector::basis(circuit.n_qubits, col)?)?;
        for row in 0..dim {
            u.set(row, col, out.amplitudes[row]);
        }
    }
    Ok(u)
}

/// Reduced density matrix of the first (most significant) `m` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    entries: Vec<Complex64>,
}

impl DensityMatrix {
    /// Build from raw entries for an `m`-qubit system; checks hermiticity and
    /// unit trace. Positive semidefiniteness is checked by [`Self::validate`].
    pub fn from_entries(n_qubits: usize, entries: Vec<Complex64>) -> Result<Self> {
        let dim = 1usize << n_qubits;
        if entries.len() != dim * dim {
            return Err(Error::dim(format!(
                "expected {} entries for a {n_qubits}-qubit density matrix, got {}",
                dim * dim,
                entries.len()
            )));
        }
        let dm = DensityMatrix { n_qubits, entries };
        dm.check_hermitian_trace()?;
        Ok(dm)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1usize << self.n_qubits
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim() + col]
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim()).map(|i| self.get(i, i)).sum()
    }

    fn check_hermitian_trace(&self) -> Result<()> {
        let d = self.dim();
        for i in 0..d {
            for j in i..d {
                let diff = (self.get(i, j) - self.get(j, i).conj()).norm();
                if diff > HERMITIAN_TOL {
                    return Err(Error::arg(format!(
                        "density matrix not hermitian at ({i},{j}): residual {diff:e}"
                    )));
                }
            }
        }
        let tr = self.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::arg(format!("density matrix trace {tr} is not 1")));
        }
        Ok(())
    }

    /// Full invariant check including positive semidefiniteness up to the
    /// round-off tolerance -1e-10 on eigenvalues.
    pub fn validate(&self) -> Result<()> {
        self.check_hermitian_trace()?;
        let eigs = hermitian_eigenvalues(self.dim(), &self.entries);
        if let Some(min) = eigs.first() {
            if *min < PSD_TOL {
                return Err(Error::arg(format!(
                    "density matrix has negative eigenvalue {min:e}"
                )));
            }
        }
        Ok(())
    }

    /// Sorted (ascending) eigenvalues; useful for spectrum checks in tests.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(self.dim(), &self.entries)
    }
}

/// Trace out the last `n - m` qubits of a pure state, keeping the first `m`.
///
/// With qubit 0 as the most significant index bit, block `a` of size
/// `2^(n-m)` holds the amplitudes with kept-prefix `a`, so the reduced matrix
/// is a sum of outer products of contiguous blocks. `m = n` returns the full
/// rank-1 projector.
pub fn partial_trace_first_m(state: &StateVector, m: usize) -> Result<DensityMatrix> {
    let n = state.n_qubits;
    if m == 0 || m > n {
        return Err(Error::arg(format!("kept qubits m={m} out of range 1..={n}")));
    }
    let kept = 1usize << m;
    let tail = 1usize << (n - m);
    let mut entries = vec![Complex64::new(0.0, 0.0); kept * kept];
    for a in 0..kept {
        for b in 0..kept {
            let mut acc = Complex64::new(0.0, 0.0);
            for t in 0..tail {
                acc += state.amplitudes[a * tail + t] * state.amplitudes[b * tail + t].conj();
            }
            entries[a * kept + b] = acc;
        }
    }
    DensityMatrix::from_entries(m, entries)
}

/// Probability that the first `m` qubits all measure 0:
/// the sum of `|<0^m i|psi>|^2` over the trailing bit patterns `i`.
pub fn prob_zero_prefix(state: &StateVector, m: usize) -> Result<f64> {
    let n = state.n_qubits;
    if m == 0 || m > n {
        return Err(Error::arg(format!("prefix length m={m} out of range 1..={n}")));
    }
    let tail = 1usize << (n - m);
    Ok(state.amplitudes[..tail].iter().map(|a| a.norm_sqr()).sum())
}

/// Pure-state overlap `|<a|b>|^2`.
pub fn overlap_pure(a: &StateVector, b: &StateVector) -> Result<f64> {
    if a.n_qubits != b.n_qubits {
        return Err(Error::dim(format!(
            "overlap between {}-qubit and {}-qubit states",
            a.n_qubits, b.n_qubits
        )));
    }
    let inner: Complex64 = a
        .amplitudes
        .iter()
        .zip(&b.amplitudes)
        .map(|(x, y)| x.conj() * y)
        .sum();
    Ok(inner.norm_sqr().clamp(0.0, 1.0))
}

/// Hilbert-Schmidt overlap `Re Tr[rho sigma]`, clamped into [0, 1].
///
/// For hermitian inputs the trace is real up to round-off; tiny negative or
/// above-one values from contraction noise are clamped because downstream
/// loss terms assume the unit interval.
pub fn hs_overlap(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.n_qubits != sigma.n_qubits {
        return Err(Error::dim(format!(
            "hilbert-schmidt overlap between {}-qubit and {}-qubit operators",
            rho.n_qubits, sigma.n_qubits
        )));
    }
    let d = rho.dim();
    let mut tr = Complex64::new(0.0, 0.0);
    for a in 0..d {
        for b in 0..d {
            tr += rho.get(a, b) * sigma.get(b, a);
        }
    }
    Ok(tr.re.clamp(0.0, 1.0))
}

/// Eigenvalues (ascending) of a hermitian matrix given in row-major order.
///
/// Uses the real embedding `H = A + iB  ->  [[A, -B], [B, A]]`, which is
/// symmetric with each eigenvalue of `H` doubled, followed by cyclic Jacobi
/// sweeps. Fine for the tiny matrices handled here.
fn hermitian_eigenvalues(dim: usize, entries: &[Complex64]) -> Vec<f64> {
    let n = 2 * dim;
    let mut m = vec![0.0f64; n * n];
    for i in 0..dim {
        for j in 0..dim {
            let e = entries[i * dim + j];
            m[i * n + j] = e.re;
            m[(i + dim) * n + (j + dim)] = e.re;
            m[i * n + (j + dim)] = -e.im;
            m[(i + dim) * n + j] = e.im;
        }
    }
    jacobi_symmetric_eigenvalues(n, &mut m)
        .into_iter()
        .step_by(2)
        .collect()
}

fn jacobi_symmetric_eigenvalues(n: usize, m: &mut [f64]) -> Vec<f64> {
    const SWEEPS: usize = 60;
    const OFF_TOL: f64 = 1e-14;
    for _ in 0..SWEEPS {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off += m[p * n + q] * m[p * n + q];
            }
        }
        if off.sqrt() < OFF_TOL {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let tau = (aqq - app) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = m[k * n + p];
                    let akq = m[k * n + q];
                    m[k * n + p] = c * akp - s * akq;
                    m[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = m[p * n + k];
                    let aqk = m[q * n + k];
                    m[p * n + k] = c * apk - s * aqk;
                    m[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut eigs: Vec<f64> = (0..n).map(|i| m[i * n + i]).collect();
    eigs.sort_by(|a, b| a.partial_cmp(b).expect("eigenvalues are finite"));
    eigs
}
