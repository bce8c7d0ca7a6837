//! Variational ground-state search for the periodic transverse-field Ising
//! model `H = x Σ X_i X_{i+1} − Σ Z_i`, with noisy and purity-mitigated
//! energy evaluation.

mod optimizer;

pub use optimizer::{OptimizerConfig, OptimizerMethod, Step};

use rand::Rng;

use crate::channels::PauliChannel;
use crate::circuit::{simulate_compiled, simulate_pure, CompiledNoise, LayeredCircuit, NoiseModel};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, DEFAULT_TOL, MAX_DIM};
use crate::mitigation::{purity_from_tomography, tomography, MitigationEstimate};
use crate::pauli::{Observable, Pauli, PauliString};
use crate::rng::SeedStream;
use crate::state::{DensityMatrix, HilbertSpec, PureState};

use optimizer::Optimizer;

/// Consecutive iterations above the initial energy before giving up.
pub const DIVERGENCE_PATIENCE: usize = 50;
/// Eigenvalues within this distance of `E₀` span the ground space.
pub const DEGENERACY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TfimSpec {
    n_qubits: usize,
    coupling: f64,
}

impl TfimSpec {
    pub fn new(n_qubits: usize, coupling: f64) -> Result<Self> {
        if n_qubits < 2 {
            return Err(Error::BadSpec(format!("TFIM needs at least 2 sites, got {n_qubits}")));
        }
        HilbertSpec::new(n_qubits)?;
        if !coupling.is_finite() {
            return Err(Error::BadSpec("coupling must be finite".into()));
        }
        Ok(Self { n_qubits, coupling })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn space(&self) -> HilbertSpec {
        HilbertSpec::new(self.n_qubits).expect("validated")
    }
}

/// `x Σ_i X_i X_{i+1 mod N} − Σ_i Z_i`. For two sites both bonds are kept,
/// so the coupling term is `2x X_0 X_1`.
pub fn build_tfim(spec: &TfimSpec) -> Observable {
    let n = spec.n_qubits;
    let mut terms = Vec::with_capacity(2 * n);
    for i in 0..n {
        let mut letters = vec![Pauli::I; n];
        letters[i] = Pauli::X;
        letters[(i + 1) % n] = Pauli::X;
        terms.push((spec.coupling, PauliString::new(letters)));
    }
    for i in 0..n {
        terms.push((-1.0, PauliString::single(n, i, Pauli::Z)));
    }
    Observable::new(spec.space(), terms).expect("terms built on the spec's register")
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenSolution {
    /// Ascending.
    pub energies: Vec<f64>,
    pub states: Vec<PureState>,
}

impl EigenSolution {
    pub fn ground_energy(&self) -> f64 {
        self.energies[0]
    }

    /// Eigenstates whose energy lies within [`DEGENERACY_TOL`] of `E₀`.
    pub fn ground_space(&self) -> &[PureState] {
        let e0 = self.energies[0];
        let k = self.energies.iter().take_while(|e| **e - e0 <= DEGENERACY_TOL).count();
        &self.states[..k]
    }

    /// Norm of the projection of `psi` onto the ground space.
    pub fn ground_overlap(&self, psi: &PureState) -> Result<f64> {
        let mut total = 0.0;
        for g in self.ground_space() {
            total += g.inner(psi)?.norm_sqr();
        }
        Ok(total.sqrt().min(1.0))
    }
}

pub fn exact_diagonalize(obs: &Observable) -> Result<EigenSolution> {
    let space = obs.space();
    if space.dim() > MAX_DIM {
        return Err(Error::TooLarge(space.dim()));
    }
    let eig = hermitian_eig(&obs.matrix(), DEFAULT_TOL)?;
    let mut energies = eig.values.clone();
    let mut states: Vec<PureState> = (0..energies.len())
        .map(|k| PureState::normalized(space, eig.vector(k)))
        .collect::<Result<_>>()?;
    energies.reverse();
    states.reverse();
    Ok(EigenSolution { energies, states })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MitigationMode {
    Off,
    /// Purity computed directly from the noisy density matrix.
    ExactPurity,
    /// Purity estimated by sampled Pauli tomography.
    Tomography { shots: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyEstimate {
    pub raw: f64,
    pub mitigated: Option<f64>,
    pub estimate: Option<MitigationEstimate>,
}

/// Applies `circuit(params)` to `|0…0⟩` with `noise` and returns the noisy
/// state.
pub fn noisy_state(circuit: &LayeredCircuit, params: &[f64], noise: &NoiseModel) -> Result<DensityMatrix> {
    let bound = circuit.bind(params)?;
    let compiled = CompiledNoise::new(&bound, noise)?;
    simulate_compiled(&bound, &PureState::zero(circuit.space()).to_density(), &compiled, false)
}

/// Raw noisy energy and, if enabled, its purity-mitigated counterpart.
pub fn energy(
    circuit: &LayeredCircuit,
    params: &[f64],
    hamiltonian: &Observable,
    noise: &NoiseModel,
    mitigation: MitigationMode,
    rng: &mut SeedStream,
) -> Result<EnergyEstimate> {
    let rho = noisy_state(circuit, params, noise)?;
    energy_of_state(&rho, hamiltonian, mitigation, rng)
}

pub fn energy_of_state(
    rho: &DensityMatrix,
    hamiltonian: &Observable,
    mitigation: MitigationMode,
    rng: &mut SeedStream,
) -> Result<EnergyEstimate> {
    let raw = hamiltonian.expectation(rho)?;
    let purity = match mitigation {
        MitigationMode::Off => {
            return Ok(EnergyEstimate {
                raw,
                mitigated: None,
                estimate: None,
            })
        }
        MitigationMode::ExactPurity => rho.purity(),
        MitigationMode::Tomography { shots } => {
            if shots == 0 {
                return Err(Error::InvalidArgument("tomography mitigation needs shots > 0".into()));
            }
            purity_from_tomography(&tomography(rho, shots, rng)?)?
        }
    };
    let space = rho.space();
    let est = MitigationEstimate::from_purity(purity.min(1.0), space)?;
    Ok(EnergyEstimate {
        raw,
        mitigated: Some(est.apply(raw, hamiltonian.trace(), space)?),
        estimate: Some(est),
    })
}

/// Overlap of the noiseless circuit output with the exact ground space.
pub fn ground_overlap(circuit: &LayeredCircuit, params: &[f64], tfim: &TfimSpec) -> Result<f64> {
    let solution = exact_diagonalize(&build_tfim(tfim))?;
    let psi = simulate_pure(&circuit.bind(params)?, &PureState::zero(circuit.space()))?;
    solution.ground_overlap(&psi)
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    pub params: Vec<f64>,
    pub raw: f64,
    pub mitigated: Option<f64>,
    pub overlap: f64,
    /// Lowest raw energy seen up to and including this iteration.
    pub best_raw: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DescentTrace {
    pub records: Vec<IterationRecord>,
    pub initial_params: Vec<f64>,
    pub initial_raw: f64,
    pub converged: bool,
    pub exact_ground_energy: f64,
    /// Mitigation measured at the final iterate.
    pub final_estimate: Option<MitigationEstimate>,
}

impl DescentTrace {
    pub fn last(&self) -> Option<&IterationRecord> {
        self.records.last()
    }

    pub fn final_overlap(&self) -> f64 {
        self.last().map_or(0.0, |r| r.overlap)
    }
}

/// Uniform draws in `[−π, π]` from stream 0 of `seed`.
pub fn initial_params(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = SeedStream::new(seed, 0);
    (0..n)
        .map(|_| rng.random_range(-std::f64::consts::PI..=std::f64::consts::PI))
        .collect()
}

/// Minimizes the raw noisy energy of `circuit` for `tfim`.
///
/// Each iteration records the optimizer's current iterate, its raw and
/// mitigated energies and the noiseless overlap with the exact ground space.
/// Stops after `max_iterations` or once the overlap reaches the target.
/// Streams of `opt.seed`: 0 initial parameters, 1 optimizer, 2 tomography.
pub fn run_vqe(
    circuit: &LayeredCircuit,
    tfim: &TfimSpec,
    noise: &NoiseModel,
    mitigation: MitigationMode,
    opt: &OptimizerConfig,
) -> Result<DescentTrace> {
    opt.validate()?;
    if circuit.space() != tfim.space() {
        return Err(Error::SpaceMismatch {
            left: circuit.space().n_qubits(),
            right: tfim.n_qubits,
        });
    }
    let h = build_tfim(tfim);
    let solution = exact_diagonalize(&h)?;
    let zero = PureState::zero(circuit.space());
    let zero_rho = zero.to_density();
    let mut tomo_rng = SeedStream::new(opt.seed, 2);

    let mut objective = |p: &[f64]| -> Result<f64> {
        let bound = circuit.bind(p)?;
        let compiled = CompiledNoise::new(&bound, noise)?;
        h.expectation(&simulate_compiled(&bound, &zero_rho, &compiled, false)?)
    };

    let x0 = initial_params(circuit.n_params(), opt.seed);
    let initial_raw = objective(&x0)?;
    let mut optimizer = Optimizer::new(opt.method, x0.clone(), SeedStream::new(opt.seed, 1), &mut objective)?;

    let mut records = Vec::new();
    let mut best_raw = initial_raw;
    let mut above = 0usize;
    let mut converged = false;
    let mut final_estimate = None;
    for iteration in 0..opt.max_iterations {
        let step = optimizer.step(&mut objective)?;
        if !step.value.is_finite() {
            return Err(Error::OptimizerDiverged { iteration });
        }
        if step.value > initial_raw {
            above += 1;
            if above >= DIVERGENCE_PATIENCE {
                return Err(Error::OptimizerDiverged { iteration });
            }
        } else {
            above = 0;
        }
        best_raw = best_raw.min(step.value);
        let rho = noisy_state(circuit, &step.params, noise)?;
        let est = energy_of_state(&rho, &h, mitigation, &mut tomo_rng)?;
        final_estimate = est.estimate;
        let psi = simulate_pure(&circuit.bind(&step.params)?, &zero)?;
        let overlap = solution.ground_overlap(&psi)?;
        records.push(IterationRecord {
            iteration,
            params: step.params,
            raw: step.value,
            mitigated: est.mitigated,
            overlap,
            best_raw,
        });
        if overlap >= opt.target_overlap {
            converged = true;
            break;
        }
    }
    Ok(DescentTrace {
        records,
        initial_params: x0,
        initial_raw,
        converged,
        exact_ground_energy: solution.ground_energy(),
        final_estimate,
    })
}

/// Independent bit flips of type `pauli` with probability `p` on every gate
/// target: `{P: p}` after single-qubit gates and the product of two such
/// channels after CNOTs.
pub fn per_gate_pauli_noise(pauli: Pauli, p: f64) -> Result<NoiseModel> {
    let single = PauliChannel::single_error(PauliString::new(vec![pauli]), p)?;
    let space2 = HilbertSpec::new(2)?;
    let mut probs = std::collections::BTreeMap::new();
    probs.insert(PauliString::new(vec![pauli, Pauli::I]), p * (1.0 - p));
    probs.insert(PauliString::new(vec![Pauli::I, pauli]), p * (1.0 - p));
    probs.insert(PauliString::new(vec![pauli, pauli]), p * p);
    probs.insert(PauliString::identity(2), (1.0 - p) * (1.0 - p));
    let double = PauliChannel::new(space2, probs)?;
    NoiseModel::noiseless().with_single_qubit(single)?.with_cnot(double)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::DepolarizingChannel;
    use crate::circuit::{build_ansatz, AnsatzSpec, Entangler};

    fn ansatz(n: usize, depth: usize) -> LayeredCircuit {
        build_ansatz(&AnsatzSpec {
            n_qubits: n,
            depth,
            entangler: Entangler::Ring,
        })
        .unwrap()
    }

    #[test]
    fn tfim_examples() {
        let h = build_tfim(&TfimSpec::new(2, 0.0).unwrap());
        let expected = Observable::new(
            HilbertSpec::new(2).unwrap(),
            vec![(-1.0, "ZI".parse().unwrap()), (-1.0, "IZ".parse().unwrap())],
        )
        .unwrap();
        assert!(h.matrix().approx_eq(&expected.matrix(), 1e-15));
        for (n, x) in [(2, -1.0), (3, 0.7), (5, -0.25)] {
            let h = build_tfim(&TfimSpec::new(n, x).unwrap());
            assert_eq!(h.trace(), 0.0);
            assert!(h.matrix().trace().norm() < 1e-12);
        }
        assert!(TfimSpec::new(1, 1.0).is_err());
    }

    #[test]
    fn tfim_two_site_spectrum() {
        let sol = exact_diagonalize(&build_tfim(&TfimSpec::new(2, -1.0).unwrap())).unwrap();
        let s2 = 2f64.sqrt();
        let expected = [-2.0 * s2, -2.0, 2.0, 2.0 * s2];
        for (e, x) in sol.energies.iter().zip(expected) {
            assert!((e - x).abs() < 1e-10);
        }
    }

    #[test]
    fn field_only_ground_state() {
        let sol = exact_diagonalize(&build_tfim(&TfimSpec::new(2, 0.0).unwrap())).unwrap();
        assert!((sol.ground_energy() + 2.0).abs() < 1e-12);
        assert!((sol.energies[1] - sol.energies[0] - 2.0).abs() < 1e-12);
        let zero = PureState::zero(HilbertSpec::new(2).unwrap());
        assert!((sol.ground_overlap(&zero).unwrap() - 1.0).abs() < 1e-12);
        let one = PureState::basis(HilbertSpec::new(2).unwrap(), 3);
        assert!(sol.ground_overlap(&one).unwrap() < 1e-12);
    }

    #[test]
    fn eigenstates_orthonormal() {
        let sol = exact_diagonalize(&build_tfim(&TfimSpec::new(3, -0.6).unwrap())).unwrap();
        for (i, a) in sol.states.iter().enumerate() {
            for (j, b) in sol.states.iter().enumerate() {
                let ip = a.inner(b).unwrap().norm();
                assert!((ip - if i == j { 1.0 } else { 0.0 }).abs() < 1e-9);
            }
        }
        assert!(sol.energies.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn zero_params_overlap_at_zero_coupling() {
        let c = ansatz(2, 1);
        let tfim = TfimSpec::new(2, 0.0).unwrap();
        assert!((ground_overlap(&c, &vec![0.0; c.n_params()], &tfim).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn noiseless_energy_is_pure_expectation() {
        let c = ansatz(2, 2);
        let h = build_tfim(&TfimSpec::new(2, -1.0).unwrap());
        let params = initial_params(c.n_params(), 3);
        let e = energy(&c, &params, &h, &NoiseModel::noiseless(), MitigationMode::Off, &mut SeedStream::new(0, 0)).unwrap();
        let psi = simulate_pure(&c.bind(&params).unwrap(), &PureState::zero(c.space())).unwrap();
        assert!((e.raw - h.expectation(&psi.to_density()).unwrap()).abs() < 1e-12);
        assert!(e.mitigated.is_none());
    }

    #[test]
    fn depolarizing_mitigation_is_exact() {
        let c = ansatz(2, 2);
        let space = c.space();
        let h = build_tfim(&TfimSpec::new(2, -1.0).unwrap());
        let params = initial_params(c.n_params(), 4);
        let clean = energy(&c, &params, &h, &NoiseModel::noiseless(), MitigationMode::Off, &mut SeedStream::new(0, 0))
            .unwrap()
            .raw;
        let noise = NoiseModel::every_layer(DepolarizingChannel::new(space, 0.05).unwrap(), c.n_layers()).unwrap();
        let e = energy(&c, &params, &h, &noise, MitigationMode::ExactPurity, &mut SeedStream::new(0, 0)).unwrap();
        assert!((e.mitigated.unwrap() - clean).abs() < 1e-9);
        assert!((e.raw - clean).abs() > 1e-3);
    }

    #[test]
    fn vqe_trace_bookkeeping_and_determinism() {
        let c = ansatz(2, 1);
        let tfim = TfimSpec::new(2, -0.5).unwrap();
        let opt = OptimizerConfig {
            max_iterations: 40,
            seed: 11,
            ..OptimizerConfig::default()
        };
        let noise = per_gate_pauli_noise(Pauli::X, 0.002).unwrap();
        let a = run_vqe(&c, &tfim, &noise, MitigationMode::ExactPurity, &opt).unwrap();
        let b = run_vqe(&c, &tfim, &noise, MitigationMode::ExactPurity, &opt).unwrap();
        assert_eq!(a, b);
        assert!(a.records.len() <= 40);
        assert!(a.records.windows(2).all(|w| w[1].best_raw <= w[0].best_raw));
        assert!(a.records.iter().all(|r| (0.0..=1.0).contains(&r.overlap)));
        assert!(a.final_estimate.is_some());
    }

    #[test]
    fn spsa_runs() {
        let c = ansatz(2, 1);
        let tfim = TfimSpec::new(2, -0.5).unwrap();
        let opt = OptimizerConfig {
            method: OptimizerMethod::spsa(),
            max_iterations: 30,
            seed: 2,
            ..OptimizerConfig::default()
        };
        let t = run_vqe(&c, &tfim, &NoiseModel::noiseless(), MitigationMode::Off, &opt).unwrap();
        assert!(!t.records.is_empty());
    }
}
