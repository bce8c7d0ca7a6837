//! Layered parametric circuits, the hardware-efficient VQE ansatz, and
//! pure-state / density-matrix simulation with gate-attached noise.

use std::collections::BTreeMap;

use rand_distr::{Binomial, Distribution};

use crate::channels::Channel;
use crate::error::{Error, Result};
use crate::linalg::{embed_operator, gates, is_unitary, kron, ComplexMatrix, DEFAULT_TOL};
use crate::pauli::{Pauli, PauliString};
use crate::rng::SeedStream;
use crate::state::{DensityMatrix, HilbertSpec, PureState};

#[derive(Debug, Clone, PartialEq)]
pub enum GateKind {
    Rx { param: usize },
    Rz { param: usize },
    Cnot,
    Fixed(ComplexMatrix),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    kind: GateKind,
    targets: Vec<usize>,
}

impl Gate {
    pub fn rx(qubit: usize, param: usize) -> Self {
        Self {
            kind: GateKind::Rx { param },
            targets: vec![qubit],
        }
    }

    pub fn rz(qubit: usize, param: usize) -> Self {
        Self {
            kind: GateKind::Rz { param },
            targets: vec![qubit],
        }
    }

    pub fn cnot(control: usize, target: usize) -> Result<Self> {
        if control == target {
            return Err(Error::DuplicateTarget(control));
        }
        Ok(Self {
            kind: GateKind::Cnot,
            targets: vec![control, target],
        })
    }

    /// An arbitrary unitary on `targets` (first target most significant).
    pub fn fixed(matrix: ComplexMatrix, targets: Vec<usize>) -> Result<Self> {
        if matrix.rows() != 1 << targets.len() || !is_unitary(&matrix, DEFAULT_TOL) {
            return Err(Error::BadSpec("fixed gate must be a unitary matching its targets".into()));
        }
        Ok(Self {
            kind: GateKind::Fixed(matrix),
            targets,
        })
    }

    pub fn kind(&self) -> &GateKind {
        &self.kind
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn param_index(&self) -> Option<usize> {
        match self.kind {
            GateKind::Rx { param } | GateKind::Rz { param } => Some(param),
            _ => None,
        }
    }

    fn local_unitary(&self, params: &[f64]) -> ComplexMatrix {
        match &self.kind {
            GateKind::Rx { param } => gates::rx(params[*param]),
            GateKind::Rz { param } => gates::rz(params[*param]),
            GateKind::Cnot => gates::cnot(),
            GateKind::Fixed(m) => m.clone(),
        }
    }
}

/// Gates executed simultaneously; no qubit is touched twice.
#[derive(Debug, Clone, PartialEq)]
pub struct CircuitLayer {
    gates: Vec<Gate>,
}

impl CircuitLayer {
    pub fn new(gates: Vec<Gate>) -> Result<Self> {
        let mut used: Vec<usize> = Vec::new();
        for g in &gates {
            for &t in &g.targets {
                if used.contains(&t) {
                    return Err(Error::DuplicateTarget(t));
                }
                used.push(t);
            }
        }
        Ok(Self { gates })
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }
}

/// `U_L = u_{L-1} ⋯ u_0`.
#[derive(Debug, Clone, PartialEq)]
pub struct LayeredCircuit {
    space: HilbertSpec,
    layers: Vec<CircuitLayer>,
    n_params: usize,
}

impl LayeredCircuit {
    pub fn new(space: HilbertSpec, layers: Vec<CircuitLayer>, n_params: usize) -> Result<Self> {
        for layer in &layers {
            for g in &layer.gates {
                crate::linalg::check_targets(&g.targets, space.n_qubits())?;
                if let Some(p) = g.param_index() {
                    if p >= n_params {
                        return Err(Error::BadSpec(format!(
                            "parameter index {p} out of range for {n_params} parameters"
                        )));
                    }
                }
            }
        }
        Ok(Self {
            space,
            layers,
            n_params,
        })
    }

    pub fn space(&self) -> HilbertSpec {
        self.space
    }

    pub fn layers(&self) -> &[CircuitLayer] {
        &self.layers
    }

    pub fn n_layers(&self) -> usize {
        self.layers.len()
    }

    pub fn n_params(&self) -> usize {
        self.n_params
    }

    pub fn bind(&self, params: &[f64]) -> Result<BoundCircuit> {
        bind(self, params)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundLayer {
    unitary: ComplexMatrix,
    /// Target sets of the layer's gates, in gate order.
    gate_targets: Vec<Vec<usize>>,
}

impl BoundLayer {
    pub fn unitary(&self) -> &ComplexMatrix {
        &self.unitary
    }

    pub fn gate_targets(&self) -> &[Vec<usize>] {
        &self.gate_targets
    }
}

/// A circuit with every rotation angle fixed.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundCircuit {
    space: HilbertSpec,
    layers: Vec<BoundLayer>,
}

impl BoundCircuit {
    pub fn space(&self) -> HilbertSpec {
        self.space
    }

    pub fn layers(&self) -> &[BoundLayer] {
        &self.layers
    }

    /// Product of all layer unitaries.
    pub fn unitary(&self) -> ComplexMatrix {
        self.layers
            .iter()
            .fold(ComplexMatrix::identity(self.space.dim()), |acc, l| l.unitary.matmul(&acc))
    }

    /// One layer per unitary; each layer is a single whole-register gate.
    pub fn from_unitaries(space: HilbertSpec, unitaries: Vec<ComplexMatrix>) -> Result<Self> {
        let all: Vec<usize> = (0..space.n_qubits()).collect();
        let layers = unitaries
            .into_iter()
            .map(|u| {
                if u.rows() != space.dim() || !is_unitary(&u, DEFAULT_TOL) {
                    return Err(Error::BadSpec("layer matrix is not a unitary on the register".into()));
                }
                Ok(BoundLayer {
                    unitary: u,
                    gate_targets: vec![all.clone()],
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { space, layers })
    }
}

/// Realizes every rotation as a concrete unitary.
pub fn bind(circuit: &LayeredCircuit, params: &[f64]) -> Result<BoundCircuit> {
    if params.len() != circuit.n_params {
        return Err(Error::ParamLengthMismatch {
            expected: circuit.n_params,
            got: params.len(),
        });
    }
    let n = circuit.space.n_qubits();
    let layers = circuit
        .layers
        .iter()
        .map(|layer| {
            let unitary = layer_unitary(layer, params, n)?;
            Ok(BoundLayer {
                unitary,
                gate_targets: layer.gates.iter().map(|g| g.targets.clone()).collect(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BoundCircuit {
        space: circuit.space,
        layers,
    })
}

fn layer_unitary(layer: &CircuitLayer, params: &[f64], n_qubits: usize) -> Result<ComplexMatrix> {
    // Fast path: one single-qubit gate per qubit in qubit order is a plain Kronecker product.
    let full_single = layer.gates.len() == n_qubits
        && layer
            .gates
            .iter()
            .enumerate()
            .all(|(q, g)| g.targets.len() == 1 && g.targets[0] == q);
    if full_single {
        return Ok(layer
            .gates
            .iter()
            .fold(ComplexMatrix::identity(1), |acc, g| kron(&acc, &g.local_unitary(params))));
    }
    let dim = 1 << n_qubits;
    layer.gates.iter().try_fold(ComplexMatrix::identity(dim), |acc, g| {
        Ok(embed_operator(&g.local_unitary(params), &g.targets, n_qubits)?.matmul(&acc))
    })
}

/// Applies each layer unitary to the state vector in order.
pub fn simulate_pure(circuit: &BoundCircuit, initial: &PureState) -> Result<PureState> {
    circuit.space.ensure_same(initial.space())?;
    let amps = circuit
        .layers
        .iter()
        .fold(initial.amplitudes().to_vec(), |psi, l| l.unitary.mul_vec(&psi));
    Ok(PureState::from_raw(circuit.space, amps))
}

/// Noise attached to circuit gates and layers.
///
/// After each layer's unitary, every gate receives its template channel on
/// its own targets (single-qubit template for one-target gates, two-qubit
/// template for CNOTs and two-target fixed gates). A layer with an override
/// instead receives the override as a whole-register channel. Idle qubits
/// receive no noise.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct NoiseModel {
    after_single_qubit: Option<Channel>,
    after_cnot: Option<Channel>,
    layer_overrides: BTreeMap<usize, Channel>,
}

impl NoiseModel {
    pub fn noiseless() -> Self {
        Self::default()
    }

    pub fn with_single_qubit(mut self, ch: impl Into<Channel>) -> Result<Self> {
        let ch = ch.into();
        check_template(&ch, 1)?;
        self.after_single_qubit = Some(ch);
        Ok(self)
    }

    pub fn with_cnot(mut self, ch: impl Into<Channel>) -> Result<Self> {
        let ch = ch.into();
        check_template(&ch, 2)?;
        self.after_cnot = Some(ch);
        Ok(self)
    }

    pub fn with_layer_override(mut self, layer: usize, ch: impl Into<Channel>) -> Result<Self> {
        let ch = ch.into();
        if !ch.validate_cptp(DEFAULT_TOL) {
            return Err(Error::IncompleteKraus {
                deviation: ch.to_kraus().completeness_deviation(),
            });
        }
        self.layer_overrides.insert(layer, ch);
        Ok(self)
    }

    /// The same whole-register channel after each of the first `n_layers` layers.
    pub fn every_layer(ch: impl Into<Channel>, n_layers: usize) -> Result<Self> {
        let ch = ch.into();
        (0..n_layers).try_fold(Self::default(), |m, l| m.with_layer_override(l, ch.clone()))
    }

    pub fn after_single_qubit(&self) -> Option<&Channel> {
        self.after_single_qubit.as_ref()
    }

    pub fn after_cnot(&self) -> Option<&Channel> {
        self.after_cnot.as_ref()
    }

    pub fn layer_overrides(&self) -> &BTreeMap<usize, Channel> {
        &self.layer_overrides
    }

    pub fn is_noiseless(&self) -> bool {
        self.after_single_qubit.is_none() && self.after_cnot.is_none() && self.layer_overrides.is_empty()
    }
}

fn check_template(ch: &Channel, arity: usize) -> Result<()> {
    if ch.space().n_qubits() != arity {
        return Err(Error::ChannelSpaceMismatch {
            channel: ch.space().n_qubits(),
            expected: arity,
        });
    }
    if !ch.validate_cptp(DEFAULT_TOL) {
        return Err(Error::IncompleteKraus {
            deviation: ch.to_kraus().completeness_deviation(),
        });
    }
    Ok(())
}

/// Noise model resolved against a concrete circuit: the channels to apply
/// after each layer, already embedded in the full register.
#[derive(Debug, Clone)]
pub struct CompiledNoise {
    per_layer: Vec<Vec<Channel>>,
}

impl CompiledNoise {
    pub fn new(circuit: &BoundCircuit, noise: &NoiseModel) -> Result<Self> {
        let space = circuit.space;
        let mut cache: BTreeMap<Vec<usize>, Channel> = BTreeMap::new();
        let mut per_layer = Vec::with_capacity(circuit.layers.len());
        for (idx, layer) in circuit.layers.iter().enumerate() {
            if let Some(ch) = noise.layer_overrides.get(&idx) {
                if ch.space() != space {
                    return Err(Error::ChannelSpaceMismatch {
                        channel: ch.space().n_qubits(),
                        expected: space.n_qubits(),
                    });
                }
                per_layer.push(vec![ch.clone()]);
                continue;
            }
            let mut chans = Vec::new();
            for targets in &layer.gate_targets {
                let template = match targets.len() {
                    1 => noise.after_single_qubit.as_ref(),
                    2 => noise.after_cnot.as_ref(),
                    _ => None,
                };
                let Some(template) = template else { continue };
                if let Some(c) = cache.get(targets) {
                    chans.push(c.clone());
                    continue;
                }
                let embedded = template.embed(targets, space)?;
                cache.insert(targets.clone(), embedded.clone());
                chans.push(embedded);
            }
            per_layer.push(chans);
        }
        Ok(Self { per_layer })
    }
}

/// Density-matrix simulation: `ρ ↦ u ρ u†` per layer, then that layer's noise.
pub fn simulate_noisy(circuit: &BoundCircuit, initial: &DensityMatrix, noise: &NoiseModel) -> Result<DensityMatrix> {
    simulate_noisy_with(circuit, initial, noise, false)
}

/// [`simulate_noisy`] with optional validation of the density-matrix
/// invariants after every layer.
pub fn simulate_noisy_with(
    circuit: &BoundCircuit,
    initial: &DensityMatrix,
    noise: &NoiseModel,
    check_invariants: bool,
) -> Result<DensityMatrix> {
    let compiled = CompiledNoise::new(circuit, noise)?;
    simulate_compiled(circuit, initial, &compiled, check_invariants)
}

pub fn simulate_compiled(
    circuit: &BoundCircuit,
    initial: &DensityMatrix,
    noise: &CompiledNoise,
    check_invariants: bool,
) -> Result<DensityMatrix> {
    circuit.space.ensure_same(initial.space())?;
    let mut rho = initial.clone();
    for (layer, chans) in circuit.layers.iter().zip(&noise.per_layer) {
        rho = DensityMatrix::from_matrix_unchecked(circuit.space, rho.matrix().conjugate_by(&layer.unitary))?;
        for ch in chans {
            rho = ch.apply(&rho)?;
        }
        if check_invariants {
            rho.check_invariants(1e-9)?;
        }
    }
    Ok(rho)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Entangler {
    Ring,
    Line,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnsatzSpec {
    pub n_qubits: usize,
    /// Number of entangling blocks.
    pub depth: usize,
    pub entangler: Entangler,
}

/// Builds `[RX, RZ]` followed by `depth` blocks of `[CNOT layers, RX, RZ]`.
///
/// Parameters are numbered block by block: within block `b`, `RX` on qubit
/// `q` uses index `2Nb + q` and `RZ` uses `2Nb + N + q`. Entangling gates are
/// `CNOT(i → i+1)`; the ring adds `CNOT(N−1 → 0)`. They are packed into
/// disjoint layers: even `i`, odd `i`, and for odd `N` a separate layer for the
/// wrap-around gate. For `N = 2` the ring and the line coincide (one CNOT).
pub fn build_ansatz(spec: &AnsatzSpec) -> Result<LayeredCircuit> {
    let n = spec.n_qubits;
    if n == 0 || (spec.entangler == Entangler::Ring && n < 2) {
        return Err(Error::BadSpec(format!("ansatz needs at least {} qubits", match spec.entangler {
            Entangler::Ring => 2,
            Entangler::Line => 1,
        })));
    }
    let space = HilbertSpec::new(n)?;
    let n_params = 2 * n * (spec.depth + 1);

    let rotation_block = |b: usize| -> Result<[CircuitLayer; 2]> {
        Ok([
            CircuitLayer::new((0..n).map(|q| Gate::rx(q, 2 * n * b + q)).collect())?,
            CircuitLayer::new((0..n).map(|q| Gate::rz(q, 2 * n * b + n + q)).collect())?,
        ])
    };

    let mut pairs: Vec<(usize, usize)> = (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect();
    if spec.entangler == Entangler::Ring && n > 2 {
        pairs.push((n - 1, 0));
    }
    let mut entangling: Vec<CircuitLayer> = Vec::new();
    let even: Vec<Gate> = pairs
        .iter()
        .filter(|(i, j)| i % 2 == 0 && *j != 0)
        .map(|&(i, j)| Gate::cnot(i, j))
        .collect::<Result<_>>()?;
    let odd: Vec<Gate> = pairs
        .iter()
        .filter(|(i, j)| i % 2 == 1 && (*j != 0 || n % 2 == 0))
        .map(|&(i, j)| Gate::cnot(i, j))
        .collect::<Result<_>>()?;
    let wrap: Vec<Gate> = pairs
        .iter()
        .filter(|(i, j)| *j == 0 && i % 2 == 0)
        .map(|&(i, j)| Gate::cnot(i, j))
        .collect::<Result<_>>()?;
    for gates in [even, odd, wrap] {
        if !gates.is_empty() {
            entangling.push(CircuitLayer::new(gates)?);
        }
    }

    let mut layers = Vec::new();
    layers.extend(rotation_block(0)?);
    for b in 1..=spec.depth {
        layers.extend(entangling.iter().cloned());
        layers.extend(rotation_block(b)?);
    }
    LayeredCircuit::new(space, layers, n_params)
}

/// Outcome counts indexed by computational-basis index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasurementCounts {
    n_qubits: usize,
    counts: Vec<u64>,
}

impl MeasurementCounts {
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn shots(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn count(&self, index: usize) -> u64 {
        self.counts[index]
    }

    /// Nonzero counts keyed by bitstring, qubit 0 first.
    pub fn to_bitstrings(&self) -> BTreeMap<String, u64> {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, &c)| (format!("{:0width$b}", i, width = self.n_qubits), c))
            .collect()
    }
}

/// Basis-change unitary for a per-qubit measurement setting:
/// `X → H`, `Y → H·S†`, `Z`/`I` → identity.
pub fn measurement_rotation(basis: &PauliString) -> ComplexMatrix {
    basis.letters().iter().fold(ComplexMatrix::identity(1), |acc, p| {
        let local = match p {
            Pauli::X => gates::hadamard(),
            Pauli::Y => gates::hadamard().matmul(&gates::s_dagger()),
            Pauli::Z | Pauli::I => ComplexMatrix::identity(2),
        };
        kron(&acc, &local)
    })
}

/// Outcome probabilities after rotating into `basis`.
pub fn measurement_probabilities(rho: &DensityMatrix, basis: &PauliString) -> Result<Vec<f64>> {
    if basis.n_qubits() != rho.space().n_qubits() {
        return Err(Error::SpaceMismatch {
            left: rho.space().n_qubits(),
            right: basis.n_qubits(),
        });
    }
    let needs_rotation = basis.letters().iter().any(|p| matches!(p, Pauli::X | Pauli::Y));
    let rotated = if needs_rotation {
        rho.matrix().conjugate_by(&measurement_rotation(basis))
    } else {
        rho.matrix().clone()
    };
    Ok((0..rotated.rows()).map(|i| rotated.get(i, i).re.max(0.0)).collect())
}

/// Draws `shots` outcomes in `basis`, reported as counts.
///
/// Counts are drawn as a multinomial through sequential binomials, which is
/// distributionally identical to drawing shots one by one.
pub fn sample_measurements(
    rho: &DensityMatrix,
    basis: &PauliString,
    shots: u64,
    rng: &mut SeedStream,
) -> Result<MeasurementCounts> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be at least 1".into()));
    }
    let probs = measurement_probabilities(rho, basis)?;
    let total: f64 = probs.iter().sum();
    let mut remaining = shots;
    let mut mass = total;
    let mut counts = vec![0u64; probs.len()];
    for (i, &p) in probs.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        if i == probs.len() - 1 || mass <= 0.0 {
            counts[i] = remaining;
            break;
        }
        let frac = (p / mass).clamp(0.0, 1.0);
        let k = Binomial::new(remaining, frac)
            .map_err(|e| Error::InvalidArgument(e.to_string()))?
            .sample(rng);
        counts[i] = k;
        remaining -= k;
        mass -= p;
    }
    Ok(MeasurementCounts {
        n_qubits: basis.n_qubits(),
        counts,
    })
}
