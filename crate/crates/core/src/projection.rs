//! Depolarizing projection of layered Pauli noise.
//!
//! Under layer-independent Pauli noise with total error probability `p`
//! per layer, the number of error events in an `L`-layer circuit is binomial.
//! Keeping only single-error terms and averaging the error over a unitary
//! 2-design turns the noisy state into a depolarized one:
//!
//! `ρ' ≈ [1 − pL(1 − q)]ρ + pL(1 − q)·I/d`, with `q = −1/(d² − 1)`.
//!
//! This module provides the closed forms, the twirl entropy experiment that
//! checks the 2-design average numerically, and the layer budget needed to
//! reach a given accuracy.

use crate::channels::{twirl_channel, DepolarizingChannel, PauliChannel};
use crate::clifford::clifford_group;
use crate::error::{Error, Result};
use crate::linalg::{c64, haar_unitary, hermitian_eig, ComplexMatrix, C64, DEFAULT_TOL};
use crate::pauli::{Observable, Pauli, PauliString};
use crate::rng::SeedStream;
use crate::state::{DensityMatrix, HilbertSpec, PureState};

use rand::Rng;

/// `q = −1/(d² − 1)`.
pub fn theoretical_q(space: HilbertSpec) -> f64 {
    let d = space.dim() as f64;
    -1.0 / (d * d - 1.0)
}

/// `ρ_d = qρ₀ + (1 − q)·I/d` for a pure `ρ₀`.
pub fn project_rho_d(rho0: &DensityMatrix) -> Result<DensityMatrix> {
    let purity = rho0.purity();
    if (purity - 1.0).abs() > DEFAULT_TOL {
        return Err(Error::NotPure { purity });
    }
    let q = theoretical_q(rho0.space());
    Ok(mix_with_identity(rho0, q))
}

// a·ρ + (1 − a)·I/d
fn mix_with_identity(rho: &DensityMatrix, a: f64) -> DensityMatrix {
    let d = rho.space().dim();
    let mut m = rho.matrix().scale_real(a);
    for i in 0..d {
        m.set(i, i, m.get(i, i) + c64((1.0 - a) / d as f64, 0.0));
    }
    DensityMatrix::from_matrix_unchecked(rho.space(), m).expect("shape preserved")
}

/// Closed-form entropy of `ρ_d`: `log(d+1) + d/(d+1)·log((d−1)/d)`.
pub fn theoretical_entropy(space: HilbertSpec, log_base: f64) -> f64 {
    let d = space.dim() as f64;
    ((d + 1.0).ln() + d / (d + 1.0) * ((d - 1.0) / d).ln()) / log_base.ln()
}

/// Error-count distribution for `L` layers with per-layer error probability `p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinomialErrorModel {
    p: f64,
    layers: u64,
}

impl BinomialErrorModel {
    pub fn new(p: f64, layers: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::RateOutOfRange(p));
        }
        Ok(Self { p, layers })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn layers(&self) -> u64 {
        self.layers
    }

    pub fn weight(&self, m: u64) -> Result<f64> {
        error_weight(self, m)
    }
}

/// `P(M) = C(L, M)·p^M·(1 − p)^(L − M)`; evaluated in log space for `L > 60`.
pub fn error_weight(model: &BinomialErrorModel, m: u64) -> Result<f64> {
    let (p, l) = (model.p, model.layers);
    if m > l {
        return Err(Error::MOutOfRange { m, layers: l });
    }
    if p == 0.0 {
        return Ok(if m == 0 { 1.0 } else { 0.0 });
    }
    if p == 1.0 {
        return Ok(if m == l { 1.0 } else { 0.0 });
    }
    let k = m.min(l - m);
    if l <= 60 {
        // exact in u64 up to C(60, 30) ≈ 1.2e17
        let mut c: u64 = 1;
        for i in 1..=k {
            c = c * (l - k + i) / i;
        }
        return Ok(c as f64 * p.powi(m as i32) * (1.0 - p).powi((l - m) as i32));
    }
    let ln_c: f64 = (1..=k).map(|i| (((l - k + i) as f64) / i as f64).ln()).sum();
    Ok((ln_c + m as f64 * p.ln() + (l - m) as f64 * (-p).ln_1p()).exp())
}

/// `[1 − pL(1 − q)]ρ + pL(1 − q)·I/d`, valid to first order in `pL`.
pub fn first_order_noisy_state(rho: &DensityMatrix, p: f64, layers: u64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::RateOutOfRange(p));
    }
    let pl = p * layers as f64;
    if pl >= 1.0 {
        return Err(Error::FirstOrderInvalid(pl));
    }
    let purity = rho.purity();
    if (purity - 1.0).abs() > DEFAULT_TOL {
        return Err(Error::NotPure { purity });
    }
    let q = theoretical_q(rho.space());
    Ok(mix_with_identity(rho, 1.0 - pl * (1.0 - q)))
}

/// Shrink factor `1 − pL(1 − q)` that traceless expectations pick up at first order.
pub fn first_order_scale(space: HilbertSpec, p: f64, layers: u64) -> f64 {
    1.0 - p * layers as f64 * (1.0 - theoretical_q(space))
}

/// Twirls a whole-register Pauli channel over the Clifford group of the
/// register (one or two qubits) and returns the resulting depolarizing channel.
pub fn clifford_twirled_depolarizing(ch: &PauliChannel) -> Result<DepolarizingChannel> {
    let frame = clifford_group(ch.space().n_qubits())?;
    let twirled = twirl_channel(&ch.to_kraus(), &frame)?;
    let q = twirled
        .depolarizing_q()
        .ok_or_else(|| Error::BadSpec(format!("twirl residue {:.3e}", twirled.projection.residue)))?;
    DepolarizingChannel::new(ch.space(), (1.0 - q).clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TwirlMode {
    /// Uniform average over every insertion position.
    ExactAverage,
    /// `trials` insertion positions drawn uniformly with replacement.
    Sampled { trials: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwirlExperimentSpec {
    pub n_qubits: usize,
    pub layer_counts: Vec<usize>,
    /// Inserted on qubit 0.
    pub pauli: Pauli,
    pub mode: TwirlMode,
    pub seed: u64,
}

impl TwirlExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        HilbertSpec::new(self.n_qubits)?;
        if self.layer_counts.is_empty() {
            return Err(Error::BadSpec("layer_counts is empty".into()));
        }
        if self.layer_counts[0] == 0 || self.layer_counts.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::BadSpec("layer_counts must be positive and strictly increasing".into()));
        }
        if self.pauli == Pauli::I {
            return Err(Error::BadSpec("inserted Pauli must be X, Y or Z".into()));
        }
        if let TwirlMode::Sampled { trials } = self.mode {
            if trials == 0 {
                return Err(Error::BadSpec("sampled mode needs at least one trial".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwirlRow {
    pub layers: usize,
    /// Base-2 entropy of the averaged state.
    pub entropy: f64,
    /// `1 − S/N`.
    pub purity_gap: f64,
}

/// Base-2 entropy of `ρ_d` expressed as `1 − S/N`.
pub fn theoretical_purity_gap(space: HilbertSpec) -> f64 {
    1.0 - theoretical_entropy(space, 2.0) / space.n_qubits() as f64
}

/// Runs the single-insertion twirl experiment for every `L` in the grid.
///
/// For each `L` a sequence `u_0 … u_{L−1}` of Haar unitaries is drawn once
/// (stream `2k` of the seed for the `k`-th grid point). The averaged state is
/// `(1/T) Σ u_{L−1}⋯u_{i+1} · P · u_i⋯u_0 |0…0⟩⟨…|` over the insertion
/// positions `i` (all of them in exact mode; draws from stream `2k + 1` in
/// sampled mode).
pub fn run_twirl_experiment(spec: &TwirlExperimentSpec) -> Result<Vec<TwirlRow>> {
    spec.validate()?;
    let space = HilbertSpec::new(spec.n_qubits)?;
    let pauli = PauliString::single(spec.n_qubits, 0, spec.pauli);
    spec.layer_counts
        .iter()
        .enumerate()
        .map(|(k, &l)| {
            let mut unitary_rng = SeedStream::new(spec.seed, 2 * k as u64);
            let unitaries: Vec<ComplexMatrix> = (0..l).map(|_| haar_unitary(space.dim(), &mut unitary_rng)).collect();
            let weights = match spec.mode {
                TwirlMode::ExactAverage => vec![1.0 / l as f64; l],
                TwirlMode::Sampled { trials } => {
                    let mut rng = SeedStream::new(spec.seed, 2 * k as u64 + 1);
                    let mut w = vec![0.0; l];
                    for _ in 0..trials {
                        w[rng.random_range(0..l)] += 1.0;
                    }
                    w.iter_mut().for_each(|x| *x /= trials as f64);
                    w
                }
            };
            let rho = insertion_average(space, &unitaries, &pauli, &weights)?;
            let entropy = rho.von_neumann_entropy(2.0);
            Ok(TwirlRow {
                layers: l,
                entropy,
                purity_gap: 1.0 - entropy / spec.n_qubits as f64,
            })
        })
        .collect()
}

/// `Σ_i w_i |ψ_i⟩⟨ψ_i|` with `ψ_i = u_{L−1}⋯u_{i+1} P u_i⋯u_0 |0⟩`.
pub fn insertion_average(
    space: HilbertSpec,
    unitaries: &[ComplexMatrix],
    pauli: &PauliString,
    weights: &[f64],
) -> Result<DensityMatrix> {
    let d = space.dim();
    let (mask, phases) = pauli.monomial();
    // forward prefix states u_i⋯u_0|0⟩
    let mut prefix: Vec<Vec<C64>> = Vec::with_capacity(unitaries.len());
    let mut psi = PureState::zero(space).amplitudes().to_vec();
    for u in unitaries {
        psi = u.mul_vec(&psi);
        prefix.push(psi.clone());
    }
    let mut acc = vec![c64(0.0, 0.0); d * d];
    let mut suffix = ComplexMatrix::identity(d);
    for i in (0..unitaries.len()).rev() {
        let w = weights[i];
        if w > 0.0 {
            // P|φ⟩: amplitude of |j^x⟩ is phase[j]·φ_j
            let mut flipped = vec![c64(0.0, 0.0); d];
            for (j, a) in prefix[i].iter().enumerate() {
                flipped[j ^ mask] = phases[j] * a;
            }
            let out = suffix.mul_vec(&flipped);
            for r in 0..d {
                let wr = out[r] * w;
                for c in 0..d {
                    acc[r * d + c] += wr * out[c].conj();
                }
            }
        }
        suffix = suffix.matmul(&unitaries[i]);
    }
    DensityMatrix::from_matrix_unchecked(space, ComplexMatrix::from_row_major(d, d, acc)?)
}

/// Accuracy/confidence target for the layer budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayerBudget {
    delta: f64,
    epsilon: f64,
    h_norm: f64,
}

impl LayerBudget {
    pub fn new(delta: f64, epsilon: f64, h_norm: f64) -> Result<Self> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::InvalidArgument(format!("delta = {delta} must lie in (0, 1)")));
        }
        if !(epsilon > 0.0) {
            return Err(Error::InvalidArgument(format!("epsilon = {epsilon} must be positive")));
        }
        if !(h_norm > 0.0) {
            return Err(Error::InvalidArgument(format!("h_norm = {h_norm} must be positive")));
        }
        Ok(Self { delta, epsilon, h_norm })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn h_norm(&self) -> f64 {
        self.h_norm
    }

    /// `ln(2/δ)·‖H‖²/(2ε²)` before rounding.
    pub fn raw_layers(&self) -> f64 {
        (2.0 / self.delta).ln() * self.h_norm * self.h_norm / (2.0 * self.epsilon * self.epsilon)
    }
}

/// Number of layers needed for accuracy `ε` at confidence `1 − δ`.
pub fn required_layers(budget: &LayerBudget) -> u64 {
    (budget.raw_layers().ceil() as u64).max(1)
}

/// Largest absolute eigenvalue of the realized observable.
pub fn operator_norm(obs: &Observable) -> Result<f64> {
    let eig = hermitian_eig(&obs.matrix(), DEFAULT_TOL)?;
    Ok(eig.values.iter().map(|l| l.abs()).fold(0.0, f64::max))
}
