//! Purity estimation by Pauli-basis tomography and the depolarizing-rate
//! inversion used to rescale noisy expectation values.
//!
//! For a pure ideal state `ρ` and whole-register depolarizing noise of rate
//! `r`, `Tr(ρ'²) = (1 − r)²(1 − 1/d) + 1/d`, which inverts to
//! `r = 1 − √((Tr ρ'² − 1/d)/(1 − 1/d))`. A traceless observable then obeys
//! `Tr(Oρ) = Tr(Oρ')/(1 − r)`.

use std::collections::BTreeMap;

use rand::RngCore;

use crate::circuit::{sample_measurements, MeasurementCounts};
use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString};
use crate::rng::SeedStream;
use crate::state::{DensityMatrix, HilbertSpec};

/// Purity domain checks allow this much slack before erroring.
pub const PURITY_TOL: f64 = 1e-6;
/// Rates this close to one are treated as total depolarization.
pub const FULL_DEPOLARIZATION_TOL: f64 = 1e-9;

/// Anything that can be measured in a Pauli product basis.
pub trait MeasurementBackend {
    fn space(&self) -> HilbertSpec;

    fn measure(&self, basis: &PauliString, shots: u64, rng: &mut SeedStream) -> Result<MeasurementCounts>;

    /// `Tr(Pρ)` when the backend can compute it without sampling.
    fn exact_expectation(&self, _pauli: &PauliString) -> Option<f64> {
        None
    }
}

impl MeasurementBackend for DensityMatrix {
    fn space(&self) -> HilbertSpec {
        DensityMatrix::space(self)
    }

    fn measure(&self, basis: &PauliString, shots: u64, rng: &mut SeedStream) -> Result<MeasurementCounts> {
        sample_measurements(self, basis, shots, rng)
    }

    fn exact_expectation(&self, pauli: &PauliString) -> Option<f64> {
        Some(pauli.trace_with(self.matrix()).re)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TomographyResult {
    pub space: HilbertSpec,
    pub pauli_expectations: BTreeMap<PauliString, f64>,
    /// 0 in exact mode.
    pub shots_per_setting: u64,
}

impl TomographyResult {
    pub fn get(&self, p: &PauliString) -> Option<f64> {
        self.pauli_expectations.get(p).copied()
    }

    /// `(1/d) Σ_a ⟨P_a⟩ P_a`.
    pub fn reconstruct(&self) -> Result<DensityMatrix> {
        let d = self.space.dim();
        let mut m = crate::linalg::ComplexMatrix::zeros(d, d);
        for (p, &v) in &self.pauli_expectations {
            let (mask, phases) = p.monomial();
            for j in 0..d {
                let i = j ^ mask;
                m.set(i, j, m.get(i, j) + phases[j] * (v / d as f64));
            }
        }
        DensityMatrix::from_matrix_unchecked(self.space, m)
    }
}

/// Estimates `⟨P_a⟩` for all `4^N` Pauli strings.
///
/// `shots = 0` computes every expectation exactly. Otherwise each
/// non-identity string is its own measurement setting with `shots` shots;
/// setting `a` draws from stream `a` of a seed taken from `rng`, so settings
/// are independent of evaluation order.
pub fn tomography<B: MeasurementBackend + ?Sized>(source: &B, shots: u64, rng: &mut SeedStream) -> Result<TomographyResult> {
    let space = source.space();
    let base = rng.next_u64();
    let mut out = BTreeMap::new();
    for (a, p) in PauliString::all(space.n_qubits()).into_iter().enumerate() {
        let value = if p.is_identity() {
            1.0
        } else if shots == 0 {
            match source.exact_expectation(&p) {
                Some(v) => v,
                None => return Err(Error::InvalidArgument("backend has no exact mode; pass shots > 0".into())),
            }
        } else {
            let mut setting_rng = SeedStream::new(base, a as u64);
            let counts = source.measure(&p, shots, &mut setting_rng)?;
            parity_expectation(&p, &counts)
        };
        out.insert(p, value.clamp(-1.0, 1.0));
    }
    Ok(TomographyResult {
        space,
        pauli_expectations: out,
        shots_per_setting: shots,
    })
}

// Mean of (−1)^(parity of the outcome bits on the non-identity qubits).
fn parity_expectation(p: &PauliString, counts: &MeasurementCounts) -> f64 {
    let n = p.n_qubits();
    let mask = p
        .letters()
        .iter()
        .enumerate()
        .filter(|(_, l)| **l != Pauli::I)
        .fold(0usize, |m, (q, _)| m | 1 << (n - 1 - q));
    let signed: i64 = counts
        .counts()
        .iter()
        .enumerate()
        .map(|(i, &c)| if (i & mask).count_ones() % 2 == 0 { c as i64 } else { -(c as i64) })
        .sum();
    signed as f64 / counts.shots() as f64
}

/// `Tr(ρ²) = (1/d) Σ_a ⟨P_a⟩²`.
pub fn purity_from_tomography(t: &TomographyResult) -> Result<f64> {
    let all = PauliString::all(t.space.n_qubits());
    if let Some(missing) = all.iter().find(|p| !t.pauli_expectations.contains_key(p)) {
        return Err(Error::IncompletePauliSet(missing.to_string()));
    }
    let sum: f64 = all.iter().map(|p| t.pauli_expectations[p].powi(2)).sum();
    Ok(sum / t.space.dim() as f64)
}

/// Depolarizing rate consistent with `purity`, assuming a pure ideal state.
pub fn rate_from_purity(purity: f64, space: HilbertSpec) -> Result<f64> {
    let inv_d = 1.0 / space.dim() as f64;
    if purity < inv_d - PURITY_TOL {
        return Err(Error::PurityBelowFloor { purity, floor: inv_d });
    }
    if purity > 1.0 + PURITY_TOL {
        return Err(Error::PurityAboveOne(purity));
    }
    let ratio = ((purity - inv_d) / (1.0 - inv_d)).clamp(0.0, 1.0);
    Ok((1.0 - ratio.sqrt()).clamp(0.0, 1.0))
}

/// `(raw − r·Tr O/d)/(1 − r)`.
pub fn mitigate_expectation(raw: f64, r: f64, obs_trace: f64, space: HilbertSpec) -> Result<f64> {
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::RateOutOfRange(r));
    }
    if r >= 1.0 - FULL_DEPOLARIZATION_TOL {
        return Err(Error::FullyDepolarized(r));
    }
    Ok((raw - r * obs_trace / space.dim() as f64) / (1.0 - r))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MitigationEstimate {
    pub purity: f64,
    pub rate: f64,
    /// `1/(1 − r)`.
    pub factor: f64,
}

impl MitigationEstimate {
    pub fn from_purity(purity: f64, space: HilbertSpec) -> Result<Self> {
        let rate = rate_from_purity(purity, space)?;
        if rate >= 1.0 - FULL_DEPOLARIZATION_TOL {
            return Err(Error::FullyDepolarized(rate));
        }
        Ok(Self {
            purity,
            rate,
            factor: 1.0 / (1.0 - rate),
        })
    }

    pub fn apply(&self, raw: f64, obs_trace: f64, space: HilbertSpec) -> Result<f64> {
        mitigate_expectation(raw, self.rate, obs_trace, space)
    }
}
