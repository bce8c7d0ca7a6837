use proptest::prelude::*;

use qdepol::channels::{depolarize, twirl_channel, DepolarizingChannel, KrausChannel, PauliChannel};
use qdepol::circuit::{build_ansatz, simulate_noisy_with, simulate_pure, AnsatzSpec, BoundCircuit, Entangler, NoiseModel};
use qdepol::clifford::clifford_group;
use qdepol::linalg::{c64, haar_unitary, hermitian_eig, kron, ComplexMatrix};
use qdepol::mitigation::{mitigate_expectation, purity_from_tomography, rate_from_purity, tomography};
use qdepol::pauli::{expectation, Observable, PauliString};
use qdepol::projection::theoretical_q;
use qdepol::rng::SeedStream;
use qdepol::state::{purity, von_neumann_entropy, DensityMatrix, HilbertSpec, PureState};
use qdepol::vqe::{build_tfim, exact_diagonalize, initial_params, TfimSpec};

fn space(n: usize) -> HilbertSpec {
    HilbertSpec::new(n).unwrap()
}

/// Random mixed state: a convex mixture of `k` Haar pure states.
fn mixed_state(n: usize, k: usize, rng: &mut SeedStream) -> DensityMatrix {
    let sp = space(n);
    let weights: Vec<f64> = (0..k).map(|_| rand::Rng::random_range(rng, 0.01..1.0)).collect();
    let total: f64 = weights.iter().sum();
    let mut m = ComplexMatrix::zeros(sp.dim(), sp.dim());
    for w in weights {
        let rho = PureState::haar_random(sp, rng).to_density();
        m = &m + &rho.matrix().scale_real(w / total);
    }
    DensityMatrix::new(sp, m).unwrap()
}

/// Random traceless observable with coefficients in [−1, 1].
fn traceless_observable(n: usize, rng: &mut SeedStream) -> Observable {
    let terms = PauliString::all(n)
        .into_iter()
        .filter(|p| !p.is_identity())
        .map(|p| (rand::Rng::random_range(rng, -1.0..1.0), p))
        .collect();
    Observable::new(space(n), terms).unwrap()
}

fn random_hermitian(d: usize, rng: &mut SeedStream) -> ComplexMatrix {
    let u = haar_unitary(d, rng);
    let v = haar_unitary(d, rng);
    let a = &u + &v.scale_real(0.5);
    &a + &a.dagger()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn eigendecomposition_reconstructs(seed in any::<u64>(), d in 1usize..=16) {
        let m = random_hermitian(d, &mut SeedStream::new(seed, 0));
        let eig = hermitian_eig(&m, 1e-10).unwrap();
        prop_assert!(eig.reconstruct().max_abs_diff(&m) <= 1e-10);
        prop_assert!(eig.values.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn state_spectra_are_probability_vectors(seed in any::<u64>(), n in 1usize..=4, k in 1usize..=5) {
        let rho = mixed_state(n, k, &mut SeedStream::new(seed, 0));
        let ev = rho.eigenvalues();
        prop_assert!(ev.iter().all(|&l| l >= -1e-12));
        prop_assert!((ev.iter().sum::<f64>() - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn kron_is_associative(seed in any::<u64>(), da in 1usize..=3, db in 1usize..=3, dc in 1usize..=3) {
        // Gaussian-integer entries multiply without rounding, so equality is exact.
        let mut rng = SeedStream::new(seed, 0);
        let mut int_matrix = |d: usize| {
            ComplexMatrix::from_fn(d, d, |_, _| {
                c64(rand::Rng::random_range(&mut rng, -9..=9) as f64, rand::Rng::random_range(&mut rng, -9..=9) as f64)
            })
        };
        let (a, b, c) = (int_matrix(da), int_matrix(db), int_matrix(dc));
        prop_assert_eq!(kron(&kron(&a, &b), &c), kron(&a, &kron(&b, &c)));
        // General floats agree to rounding.
        let a = haar_unitary(da, &mut rng);
        let b = haar_unitary(db, &mut rng);
        let c = haar_unitary(dc, &mut rng);
        prop_assert!(kron(&kron(&a, &b), &c).max_abs_diff(&kron(&a, &kron(&b, &c))) <= 1e-15);
    }

    #[test]
    fn parseval_purity(seed in any::<u64>(), n in 1usize..=3, k in 1usize..=4) {
        let rho = mixed_state(n, k, &mut SeedStream::new(seed, 0));
        let d = rho.space().dim() as f64;
        let sum: f64 = PauliString::all(n).iter().map(|p| p.trace_with(rho.matrix()).re.powi(2)).sum();
        prop_assert!((purity(&rho) - sum / d).abs() <= 1e-10);
        let t = tomography(&rho, 0, &mut SeedStream::new(seed, 1)).unwrap();
        prop_assert!((purity_from_tomography(&t).unwrap() - purity(&rho)).abs() <= 1e-10);
    }

    #[test]
    fn entropy_is_unitarily_invariant(seed in any::<u64>(), n in 1usize..=4, k in 1usize..=5) {
        let mut rng = SeedStream::new(seed, 0);
        let rho = mixed_state(n, k, &mut rng);
        let u = haar_unitary(rho.space().dim(), &mut rng);
        let rotated = DensityMatrix::new(rho.space(), rho.matrix().conjugate_by(&u)).unwrap();
        prop_assert!((von_neumann_entropy(&rho, 2.0) - von_neumann_entropy(&rotated, 2.0)).abs() <= 1e-9);
    }

    #[test]
    fn depolarizing_scales_traceless_expectations(seed in any::<u64>(), n in 1usize..=3, r in 0.0f64..=1.0) {
        let mut rng = SeedStream::new(seed, 0);
        let rho = mixed_state(n, 2, &mut rng);
        let obs = traceless_observable(n, &mut rng);
        let noisy = depolarize(&rho, r).unwrap();
        let lhs = expectation(&obs, &noisy).unwrap();
        let rhs = (1.0 - r) * expectation(&obs, &rho).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12);
    }

    #[test]
    fn observable_trace_matches_identity_coefficient(seed in any::<u64>(), n in 1usize..=4, c in -3.0f64..3.0) {
        let mut rng = SeedStream::new(seed, 0);
        let mut terms = traceless_observable(n, &mut rng).terms().to_vec();
        terms.push((c, PauliString::identity(n)));
        let obs = Observable::new(space(n), terms).unwrap();
        prop_assert!((obs.matrix().trace().re - obs.trace()).abs() <= 1e-10);
        prop_assert!((obs.trace() - c * space(n).dim() as f64).abs() <= 1e-12);
    }

    #[test]
    fn tfim_is_traceless(n in 2usize..=6, x in -2.0f64..2.0) {
        let h = build_tfim(&TfimSpec::new(n, x).unwrap());
        prop_assert!(h.matrix().trace().norm() <= 1e-10);
    }

    #[test]
    fn pauli_channel_matches_its_kraus_form(seed in any::<u64>(), n in 1usize..=2) {
        let mut rng = SeedStream::new(seed, 0);
        let strings = PauliString::all(n);
        let raw: Vec<f64> = strings.iter().map(|_| rand::Rng::random_range(&mut rng, 0.0..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let probs = strings.into_iter().zip(raw.iter().map(|p| p / total)).collect();
        let ch = PauliChannel::new(space(n), probs).unwrap();
        let rho = mixed_state(n, 2, &mut rng);
        let a = ch.apply(&rho).unwrap();
        let b = ch.to_kraus().apply(&rho).unwrap();
        prop_assert!(a.matrix().max_abs_diff(b.matrix()) <= 1e-12);
        prop_assert!(a.check_invariants(1e-9).is_ok());
    }

    #[test]
    fn kraus_outputs_are_states(seed in any::<u64>(), n in 1usize..=2, k in 1usize..=4) {
        // Kraus set from a random isometry: rows of a Haar unitary on d·k.
        let mut rng = SeedStream::new(seed, 0);
        let d = space(n).dim();
        let big = haar_unitary(d * k, &mut rng);
        let ops = (0..k)
            .map(|j| ComplexMatrix::from_fn(d, d, |r, c| big.get(j * d + r, c)))
            .collect();
        let ch = KrausChannel::new(space(n), ops).unwrap();
        let out = ch.apply(&mixed_state(n, 3, &mut rng)).unwrap();
        prop_assert!(out.check_invariants(1e-9).is_ok());
    }

    #[test]
    fn depolarizing_composition_law(seed in any::<u64>(), n in 1usize..=3, layers in 1usize..=8, r in 0.0f64..0.5) {
        let mut rng = SeedStream::new(seed, 0);
        let sp = space(n);
        let us = (0..layers).map(|_| haar_unitary(sp.dim(), &mut rng)).collect();
        let circuit = BoundCircuit::from_unitaries(sp, us).unwrap();
        let noise = NoiseModel::every_layer(DepolarizingChannel::new(sp, r).unwrap(), layers).unwrap();
        let zero = PureState::zero(sp);
        let noisy = simulate_noisy_with(&circuit, &zero.to_density(), &noise, true).unwrap();
        let pure = simulate_pure(&circuit, &zero).unwrap().to_density();
        let big_r = 1.0 - (1.0 - r).powi(layers as i32);
        let expected = depolarize(&pure, big_r).unwrap();
        prop_assert!(noisy.matrix().max_abs_diff(expected.matrix()) <= 1e-10);
    }

    #[test]
    fn mitigation_roundtrip(seed in any::<u64>(), n in 1usize..=3, r in 0.0f64..=0.9) {
        let mut rng = SeedStream::new(seed, 0);
        let sp = space(n);
        let rho = PureState::haar_random(sp, &mut rng).to_density();
        let obs = traceless_observable(n, &mut rng);
        let noisy = depolarize(&rho, r).unwrap();
        let rate = rate_from_purity(purity(&noisy), sp).unwrap();
        let mitigated = mitigate_expectation(expectation(&obs, &noisy).unwrap(), rate, obs.trace(), sp).unwrap();
        prop_assert!((mitigated - expectation(&obs, &rho).unwrap()).abs() <= 1e-9);
    }

    #[test]
    fn variational_bound(seed in any::<u64>(), n in 2usize..=3, depth in 0usize..=3, x in -1.5f64..1.5) {
        let circuit = build_ansatz(&AnsatzSpec { n_qubits: n, depth, entangler: Entangler::Ring }).unwrap();
        let h = build_tfim(&TfimSpec::new(n, x).unwrap());
        let e0 = exact_diagonalize(&h).unwrap().ground_energy();
        let params = initial_params(circuit.n_params(), seed);
        let psi = simulate_pure(&circuit.bind(&params).unwrap(), &PureState::zero(circuit.space())).unwrap();
        prop_assert!(h.expectation(&psi.to_density()).unwrap() >= e0 - 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    /// Any mixture of Pauli conjugations twirls to a depolarizing channel
    /// whose q is `1 − (1 − q_1)·(total error)`.
    #[test]
    fn clifford_twirl_of_pauli_mixture_is_depolarizing(px in 0.0f64..0.4, py in 0.0f64..0.3, pz in 0.0f64..0.3) {
        let sp = space(1);
        let probs = [("I", 1.0 - px - py - pz), ("X", px), ("Y", py), ("Z", pz)]
            .into_iter()
            .map(|(s, p)| (s.parse::<PauliString>().unwrap(), p))
            .collect();
        let ch = PauliChannel::new(sp, probs).unwrap();
        let t = twirl_channel(&ch.to_kraus(), &clifford_group(1).unwrap()).unwrap();
        prop_assert!(t.projection.residue <= 1e-12);
        let expected_q = 1.0 - (1.0 - theoretical_q(sp)) * (px + py + pz);
        prop_assert!((t.projection.q - expected_q).abs() <= 1e-12);
    }
}
