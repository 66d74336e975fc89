//! Property tests for the structural invariants: norm preservation,
//! unitarity, marginal consistency, measure ranges, and distance identities.

use num_complex::Complex64;
use proptest::prelude::*;

use qsl::embedding::{qaoa_embedding, EmbeddingSpec, FeatureVector, WeightVector};
use qsl::similarity::{distance_from_similarity, similarity, MeasureSpec, SimilarityModel};
use qsl::state::{
    circuit_unitary, partial_trace_first_m, prob_zero_prefix, run_circuit, Circuit, Gate,
    StateVector,
};

#[derive(Clone, Debug)]
enum GateSpec {
    Rx(usize, f64),
    Ry(usize, f64),
    Rzz(usize, usize, f64),
    Cnot(usize, usize),
}

fn gate_strategy(n_qubits: usize) -> impl Strategy<Value = GateSpec> {
    let angle = -std::f64::consts::PI..std::f64::consts::PI;
    prop_oneof![
        (0..n_qubits, angle.clone()).prop_map(|(q, a)| GateSpec::Rx(q, a)),
        (0..n_qubits, angle.clone()).prop_map(|(q, a)| GateSpec::Ry(q, a)),
        (0..n_qubits, 1..n_qubits, angle).prop_map(move |(q, off, a)| {
            GateSpec::Rzz(q, (q + off) % n_qubits, a)
        }),
        (0..n_qubits, 1..n_qubits)
            .prop_map(move |(c, off)| GateSpec::Cnot(c, (c + off) % n_qubits)),
    ]
}

fn build_circuit(n_qubits: usize, specs: &[GateSpec]) -> Circuit {
    let gates = specs
        .iter()
        .map(|g| match *g {
            GateSpec::Rx(q, a) => Gate::rx(q, a),
            GateSpec::Ry(q, a) => Gate::ry(q, a),
            GateSpec::Rzz(a, b, t) => Gate::rzz(a, b, t),
            GateSpec::Cnot(c, t) => Gate::cnot(c, t),
        })
        .collect();
    Circuit::new(n_qubits, gates).unwrap()
}

fn state_strategy(n_qubits: usize) -> impl Strategy<Value = StateVector> {
    let dim = 1usize << n_qubits;
    proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim).prop_filter_map(
        "state must have usable norm",
        |parts| {
            let norm: f64 = parts.iter().map(|(re, im)| re * re + im * im).sum::<f64>().sqrt();
            if norm < 1e-3 {
                return None;
            }
            let amps = parts
                .into_iter()
                .map(|(re, im)| Complex64::new(re / norm, im / norm))
                .collect();
            StateVector::from_amplitudes(amps).ok()
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn circuits_preserve_norm(
        n in 2usize..=6,
        specs in proptest::collection::vec(gate_strategy(6), 0..30),
    ) {
        let specs: Vec<GateSpec> = specs
            .into_iter()
            .map(|g| match g {
                GateSpec::Rx(q, a) => GateSpec::Rx(q % n, a),
                GateSpec::Ry(q, a) => GateSpec::Ry(q % n, a),
                GateSpec::Rzz(a, b, t) => {
                    let a = a % n;
                    let mut b = b % n;
                    if b == a { b = (a + 1) % n; }
                    GateSpec::Rzz(a, b, t)
                }
                GateSpec::Cnot(c, t) => {
                    let c = c % n;
                    let mut t = t % n;
                    if t == c { t = (c + 1) % n; }
                    GateSpec::Cnot(c, t)
                }
            })
            .collect();
        let circuit = build_circuit(n, &specs);
        let state = StateVector::zero(n).unwrap();
        let out = run_circuit(&circuit, &state).unwrap();
        prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn small_circuits_are_unitary(
        specs in proptest::collection::vec(gate_strategy(3), 0..15),
    ) {
        let circuit = build_circuit(3, &specs);
        let u = circuit_unitary(&circuit).unwrap();
        prop_assert!(u.unitarity_residual() < 1e-10);
    }

    #[test]
    fn prefix_probability_matches_reduced_corner(
        state in state_strategy(4),
        m in 1usize..=4,
    ) {
        let p = prob_zero_prefix(&state, m).unwrap();
        let rho = partial_trace_first_m(&state, m).unwrap();
        prop_assert!((p - rho.get(0, 0).re).abs() < 1e-12);
        rho.validate().unwrap();
    }

    #[test]
    fn prefix_convention_agrees_on_basis_states(bits in 0usize..16, m in 1usize..=4) {
        // the kept qubits of a basis state are its top index bits under the
        // qubit-0-is-most-significant convention
        let state = StateVector::basis(4, bits).unwrap();
        let p = prob_zero_prefix(&state, m).unwrap();
        let expect = if bits >> (4 - m) == 0 { 1.0 } else { 0.0 };
        prop_assert!((p - expect).abs() < 1e-15);
        let rho = partial_trace_first_m(&state, m).unwrap();
        prop_assert!((rho.get(0, 0).re - expect).abs() < 1e-15);
    }

    #[test]
    fn measures_stay_in_unit_interval_and_coincide_at_full_register(
        weights in proptest::collection::vec(-std::f64::consts::PI..std::f64::consts::PI, 9),
        xs in proptest::collection::vec(0.0..std::f64::consts::TAU, 2),
        xts in proptest::collection::vec(0.0..std::f64::consts::TAU, 2),
        m in 1usize..=3,
    ) {
        let spec = EmbeddingSpec::new(3, 1, 2).unwrap();
        prop_assert_eq!(spec.weight_count(), 6);
        let theta = WeightVector::new(weights[..6].to_vec());
        let eta = WeightVector::new(weights[3..9].to_vec());
        let model = SimilarityModel::separate(spec, spec, theta, eta).unwrap();
        let x = FeatureVector::new(xs).unwrap();
        let xt = FeatureVector::new(xts).unwrap();
        for measure in [
            MeasureSpec::FullOverlap,
            MeasureSpec::PartialSwap(m),
            MeasureSpec::PartialProjection(m),
        ] {
            let s = similarity(&model, measure, &x, &xt).unwrap();
            prop_assert!((0.0..=1.0).contains(&s), "{:?} gave {}", measure, s);
        }
        let full = similarity(&model, MeasureSpec::FullOverlap, &x, &xt).unwrap();
        let swap = similarity(&model, MeasureSpec::PartialSwap(3), &x, &xt).unwrap();
        let proj = similarity(&model, MeasureSpec::PartialProjection(3), &x, &xt).unwrap();
        prop_assert!((full - swap).abs() < 1e-10);
        prop_assert!((full - proj).abs() < 1e-10);
    }

    #[test]
    fn embedding_construction_is_deterministic_with_tagged_slots(
        n in 1usize..=5,
        layers in 1usize..=3,
        x0 in 0.0..std::f64::consts::TAU,
    ) {
        let feature_dim = 1;
        let spec = EmbeddingSpec::new(n, layers, feature_dim).unwrap();
        let x = FeatureVector::new(vec![x0]).unwrap();
        let w = WeightVector::zeros(spec.weight_count());
        let a = qaoa_embedding(&spec, &x, &w).unwrap();
        let b = qaoa_embedding(&spec, &x, &w).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(a.feature_occurrences(0).len(), layers + 1);
        prop_assert_eq!(a.gates.len(), spec.gate_count());
    }

    #[test]
    fn distance_respects_the_similarity_identity(s in 0.0f64..=1.0) {
        let d = distance_from_similarity(s);
        prop_assert!(d >= 0.0);
        prop_assert!((d * d - (2.0 - 2.0 * s)).abs() < 1e-12);
    }

    #[test]
    fn wasserstein_is_a_metric_on_samples(
        a in proptest::collection::vec(-5.0f64..5.0, 1..12),
        b in proptest::collection::vec(-5.0f64..5.0, 1..12),
        c in proptest::collection::vec(-5.0f64..5.0, 1..12),
    ) {
        use qsl::analysis::wasserstein_1d;
        let ab = wasserstein_1d(&a, &b).unwrap();
        let ba = wasserstein_1d(&b, &a).unwrap();
        prop_assert!((ab - ba).abs() < 1e-9);
        prop_assert!(wasserstein_1d(&a, &a).unwrap() < 1e-12);
        let ac = wasserstein_1d(&a, &c).unwrap();
        let cb = wasserstein_1d(&c, &b).unwrap();
        prop_assert!(ac + cb >= ab - 1e-9);
    }
}
