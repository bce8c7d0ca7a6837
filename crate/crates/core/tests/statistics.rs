//! Sampling-based checks with fixed seeds.

use qdepol::channels::depolarize;
use qdepol::circuit::{measurement_probabilities, sample_measurements};
use qdepol::linalg::{c64, haar_unitary, hermitian_eig, ComplexMatrix, C64};
use qdepol::mitigation::{mitigate_expectation, purity_from_tomography, rate_from_purity, tomography};
use qdepol::pauli::{Pauli, PauliString};
use qdepol::projection::{run_twirl_experiment, TwirlExperimentSpec, TwirlMode};
use qdepol::rng::{derive_seed, SeedStream};
use qdepol::state::{HilbertSpec, PureState};
use qdepol::vqe::build_tfim;
use qdepol::vqe::TfimSpec;

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Eigenphases of a 2×2 unitary from its characteristic polynomial.
fn eigenphases_2x2(u: &ComplexMatrix) -> [f64; 2] {
    let tr = u.trace();
    let det = u.get(0, 0) * u.get(1, 1) - u.get(0, 1) * u.get(1, 0);
    let disc = (tr * tr - det * 4.0).sqrt();
    let l1: C64 = (tr + disc) / 2.0;
    let l2: C64 = (tr - disc) / 2.0;
    [l1.arg(), l2.arg()]
}

#[test]
fn haar_eigenphases_are_uniform() {
    // Pearson χ² over 10 equal bins; 21.666 is the 1% critical value at 9 dof.
    let mut rng = SeedStream::new(2718, 0);
    let bins = 10;
    let mut counts = vec![0usize; bins];
    let samples = 10_000;
    for _ in 0..samples {
        for phase in eigenphases_2x2(&haar_unitary(2, &mut rng)) {
            let t = (phase + std::f64::consts::PI) / (2.0 * std::f64::consts::PI);
            counts[((t * bins as f64) as usize).min(bins - 1)] += 1;
        }
    }
    let expected = (2 * samples) as f64 / bins as f64;
    let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    assert!(chi2 < 21.666, "chi2 = {chi2}, counts = {counts:?}");
}

#[test]
fn haar_first_moments() {
    // E[U] = 0 and E[|U_ij|²] = 1/d.
    let d = 3;
    let n = 100_000;
    let mut rng = SeedStream::new(99, 0);
    let mut mean = vec![c64(0.0, 0.0); d * d];
    let mut second = vec![0.0; d * d];
    for _ in 0..n {
        let u = haar_unitary(d, &mut rng);
        for (k, z) in u.to_row_major().into_iter().enumerate() {
            mean[k] += z;
            second[k] += z.norm_sqr();
        }
    }
    // |mean entry| has scale √(1/(dn))
    let tol = 5.0 * (1.0 / (d as f64 * n as f64)).sqrt();
    for k in 0..d * d {
        assert!((mean[k] / n as f64).norm() < tol, "mean[{k}]");
        assert!((second[k] / n as f64 - 1.0 / d as f64).abs() < 0.01, "second[{k}]");
    }
}

#[test]
fn haar_unitaries_are_unitary_and_hermitian_eig_works_on_them() {
    let mut rng = SeedStream::new(4, 4);
    for d in [2, 5, 16] {
        let u = haar_unitary(d, &mut rng);
        assert!(qdepol::linalg::is_unitary(&u, 1e-12));
        let h = &u + &u.dagger();
        assert!(hermitian_eig(&h, 1e-10).unwrap().reconstruct().max_abs_diff(&h) < 1e-10);
    }
}

#[test]
fn shot_frequencies_converge_at_root_n() {
    let sp = HilbertSpec::new(2).unwrap();
    let mut rng = SeedStream::new(31, 0);
    let rho = depolarize(&PureState::haar_random(sp, &mut rng).to_density(), 0.2).unwrap();
    let basis: PauliString = "XY".parse().unwrap();
    let probs = measurement_probabilities(&rho, &basis).unwrap();
    let mut rms = Vec::new();
    for shots in [1_000u64, 100_000] {
        let mut z2 = Vec::new();
        let mut sq_err = 0.0;
        for rep in 0..50 {
            let counts = sample_measurements(&rho, &basis, shots, &mut SeedStream::new(rep, shots)).unwrap();
            assert_eq!(counts.shots(), shots);
            for (i, &p) in probs.iter().enumerate() {
                let err = counts.count(i) as f64 / shots as f64 - p;
                z2.push(err * err / (p * (1.0 - p) / shots as f64));
                sq_err += err * err;
            }
        }
        let max_z = z2.iter().cloned().fold(0.0, f64::max).sqrt();
        let mean_z2 = z2.iter().sum::<f64>() / z2.len() as f64;
        assert!(max_z < 4.5, "shots {shots}: max |z| {max_z}");
        assert!((0.6..1.5).contains(&mean_z2), "shots {shots}: mean z² {mean_z2}");
        rms.push(sq_err.sqrt());
    }
    // 100× the shots should shrink the error 10×
    let ratio = rms[0] / rms[1];
    assert!((7.0..14.0).contains(&ratio), "error ratio {ratio}");
}

#[test]
fn tomography_standard_error() {
    // Each sampled ⟨P⟩ has variance (1 − ⟨P⟩²)/shots.
    let sp = HilbertSpec::new(2).unwrap();
    let mut rng = SeedStream::new(8, 0);
    let rho = depolarize(&PureState::haar_random(sp, &mut rng).to_density(), 0.1).unwrap();
    let exact = tomography(&rho, 0, &mut rng).unwrap();
    let shots = 4_000u64;
    let reps = 200;
    for p in PauliString::all(2).iter().filter(|p| !p.is_identity()) {
        let truth = exact.get(p).unwrap();
        let sigma = ((1.0 - truth * truth) / shots as f64).sqrt();
        let estimates: Vec<f64> = (0..reps)
            .map(|r| tomography(&rho, shots, &mut SeedStream::new(r, 1)).unwrap().get(p).unwrap())
            .collect();
        let mean = estimates.iter().sum::<f64>() / reps as f64;
        let var = estimates.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (reps - 1) as f64;
        assert!((mean - truth).abs() <= 3.0 * sigma / (reps as f64).sqrt(), "{p}: bias");
        // sample std within ±20% of the binomial prediction (≈ 3σ for 200 reps)
        assert!((var.sqrt() / sigma - 1.0).abs() < 0.2, "{p}: std {} vs {sigma}", var.sqrt());
    }
}

#[test]
fn sampled_mitigation_error_shrinks_as_root_shots() {
    let sp = HilbertSpec::new(2).unwrap();
    let h = build_tfim(&TfimSpec::new(2, -1.0).unwrap());
    let mut rng = SeedStream::new(21, 0);
    let pure = PureState::haar_random(sp, &mut rng).to_density();
    let truth = h.expectation(&pure).unwrap();
    let noisy = depolarize(&pure, 0.3).unwrap();
    let raw = h.expectation(&noisy).unwrap();
    let error_at = |shots: u64| {
        median(
            (0..20)
                .map(|r| {
                    let t = tomography(&noisy, shots, &mut SeedStream::new(derive_seed(shots, r), 0)).unwrap();
                    let purity = purity_from_tomography(&t).unwrap().min(1.0);
                    let rate = rate_from_purity(purity, sp).unwrap();
                    (mitigate_expectation(raw, rate, 0.0, sp).unwrap() - truth).abs()
                })
                .collect(),
        )
    };
    let coarse = error_at(10_000);
    let fine = error_at(1_000_000);
    assert!(fine < 5.0 * coarse / 10.0, "fine {fine:.3e} coarse {coarse:.3e}");
}

#[test]
fn twirl_entropy_median_is_monotone_in_length() {
    // Past saturation the medians scatter around the limit, so each step
    // may dip by at most two standard errors of the median.
    let layers = vec![1, 2, 8, 32, 128, 512];
    let seeds = 21;
    let mut per_l = vec![Vec::new(); layers.len()];
    for s in 0..seeds {
        let spec = TwirlExperimentSpec {
            n_qubits: 1,
            layer_counts: layers.clone(),
            pauli: Pauli::Y,
            mode: TwirlMode::ExactAverage,
            seed: derive_seed(404, s),
        };
        for (i, row) in run_twirl_experiment(&spec).unwrap().into_iter().enumerate() {
            per_l[i].push(row.entropy);
        }
    }
    let stats: Vec<(f64, f64)> = per_l
        .into_iter()
        .map(|v| {
            let m = median(v.clone());
            let mad = median(v.iter().map(|e| (e - m).abs()).collect());
            (m, 1.2533 * 1.4826 * mad / (seeds as f64).sqrt())
        })
        .collect();
    for w in stats.windows(2) {
        let ((m0, se0), (m1, se1)) = (w[0], w[1]);
        assert!(m1 >= m0 - 2.0 * (se0 * se0 + se1 * se1).sqrt(), "{stats:?}");
    }
    // The early, unsaturated part rises strictly.
    assert!(stats[0].0 < stats[1].0 && stats[1].0 < stats[2].0, "{stats:?}");
}

#[test]
fn sampled_twirl_mode_approaches_exact_mode() {
    let base = TwirlExperimentSpec {
        n_qubits: 1,
        layer_counts: vec![64],
        pauli: Pauli::X,
        mode: TwirlMode::ExactAverage,
        seed: 12,
    };
    let exact = run_twirl_experiment(&base).unwrap()[0].entropy;
    let sampled = run_twirl_experiment(&TwirlExperimentSpec {
        mode: TwirlMode::Sampled { trials: 200_000 },
        ..base
    })
    .unwrap()[0]
        .entropy;
    assert!((exact - sampled).abs() < 5e-3, "{exact} vs {sampled}");
}
