//! Quantum channels in Kraus, Pauli and depolarizing form.
//!
//! Channels are kept in their most specific representation. Pauli and
//! depolarizing channels apply through the monomial structure of Pauli
//! strings and only become Kraus families when a caller asks for one.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::linalg::{c64, embed_operator, is_unitary, ComplexMatrix, C64, DEFAULT_TOL};
use crate::pauli::PauliString;
use crate::state::{DensityMatrix, HilbertSpec};

/// Tolerance on `Σ p_a = 1` for Pauli channels.
pub const PAULI_SUM_TOL: f64 = 1e-12;

/// Off-form residue below which a twirl result is reported as depolarizing.
pub const DEPOLARIZING_RESIDUE_TOL: f64 = 1e-10;

/// `ρ ↦ Σ A_k ρ A_k†`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    space: HilbertSpec,
    operators: Vec<ComplexMatrix>,
    complete: bool,
}

impl KrausChannel {
    /// Builds the channel and checks completeness `Σ A†A = I` within 1e-10.
    pub fn new(space: HilbertSpec, operators: Vec<ComplexMatrix>) -> Result<Self> {
        let ch = Self::from_operators_unchecked(space, operators)?;
        let deviation = ch.completeness_deviation();
        if deviation > DEFAULT_TOL {
            return Err(Error::IncompleteKraus { deviation });
        }
        Ok(Self { complete: true, ..ch })
    }

    /// Checks only operator shapes; completeness is verified on application.
    pub fn from_operators_unchecked(space: HilbertSpec, operators: Vec<ComplexMatrix>) -> Result<Self> {
        if operators.is_empty() {
            return Err(Error::BadSpec("a Kraus channel needs at least one operator".into()));
        }
        let d = space.dim();
        if let Some(bad) = operators.iter().find(|a| a.rows() != d || a.cols() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: bad.rows(),
            });
        }
        Ok(Self {
            space,
            operators,
            complete: false,
        })
    }

    pub fn identity(space: HilbertSpec) -> Self {
        Self {
            space,
            operators: vec![ComplexMatrix::identity(space.dim())],
            complete: true,
        }
    }

    /// Conjugation by a single unitary.
    pub fn unitary(space: HilbertSpec, u: ComplexMatrix) -> Result<Self> {
        Self::new(space, vec![u])
    }

    pub fn space(&self) -> HilbertSpec {
        self.space
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    /// `max |Σ A†A − I|`.
    pub fn completeness_deviation(&self) -> f64 {
        let d = self.space.dim();
        let sum = self
            .operators
            .iter()
            .fold(ComplexMatrix::zeros(d, d), |acc, a| &acc + &a.dagger().matmul(a));
        sum.max_abs_diff(&ComplexMatrix::identity(d))
    }

    pub fn validate_cptp(&self, tol: f64) -> bool {
        self.completeness_deviation() <= tol
    }

    pub fn apply_matrix(&self, m: &ComplexMatrix) -> ComplexMatrix {
        let d = self.space.dim();
        self.operators
            .iter()
            .fold(ComplexMatrix::zeros(d, d), |acc, a| &acc + &m.conjugate_by(a))
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        self.space.ensure_same(rho.space())?;
        if !self.complete {
            let deviation = self.completeness_deviation();
            if deviation > DEFAULT_TOL {
                return Err(Error::IncompleteKraus { deviation });
            }
        }
        DensityMatrix::from_matrix_unchecked(self.space, self.apply_matrix(rho.matrix()))
    }
}

pub fn apply_kraus(ch: &KrausChannel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    ch.apply(rho)
}

pub fn validate_cptp(ch: &KrausChannel, tol: f64) -> bool {
    ch.validate_cptp(tol)
}

/// `ρ ↦ Σ p_a P_a ρ P_a`.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliChannel {
    space: HilbertSpec,
    probabilities: BTreeMap<PauliString, f64>,
}

impl PauliChannel {
    pub fn new(space: HilbertSpec, probabilities: BTreeMap<PauliString, f64>) -> Result<Self> {
        let mut total = 0.0;
        for (p, &w) in &probabilities {
            if p.n_qubits() != space.n_qubits() {
                return Err(Error::SpaceMismatch {
                    left: space.n_qubits(),
                    right: p.n_qubits(),
                });
            }
            if !(w >= 0.0) {
                return Err(Error::InvalidPauliChannel(format!("negative probability {w} for {p}")));
            }
            total += w;
        }
        if (total - 1.0).abs() > PAULI_SUM_TOL {
            return Err(Error::InvalidPauliChannel(format!("probabilities sum to {total}")));
        }
        Ok(Self { space, probabilities })
    }

    /// `(1 − p)·id + p·(P · P)`.
    pub fn single_error(error: PauliString, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::RateOutOfRange(p));
        }
        let space = HilbertSpec::new(error.n_qubits())?;
        let mut probabilities = BTreeMap::new();
        if error.is_identity() {
            probabilities.insert(error, 1.0);
        } else {
            probabilities.insert(PauliString::identity(space.n_qubits()), 1.0 - p);
            probabilities.insert(error, p);
        }
        Self::new(space, probabilities)
    }

    /// Pauli form of the depolarizing channel: `p_a = r/d²` for `a ≠ I`.
    pub fn depolarizing(space: HilbertSpec, r: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&r) {
            return Err(Error::RateOutOfRange(r));
        }
        let d2 = (space.dim() * space.dim()) as f64;
        let probabilities = PauliString::all(space.n_qubits())
            .into_iter()
            .map(|p| {
                let w = if p.is_identity() { 1.0 - r + r / d2 } else { r / d2 };
                (p, w)
            })
            .collect();
        Self::new(space, probabilities)
    }

    pub fn space(&self) -> HilbertSpec {
        self.space
    }

    pub fn probabilities(&self) -> &BTreeMap<PauliString, f64> {
        &self.probabilities
    }

    /// Total weight on non-identity strings.
    pub fn total_error(&self) -> f64 {
        self.probabilities
            .iter()
            .filter(|(p, _)| !p.is_identity())
            .map(|(_, w)| w)
            .sum()
    }

    pub fn apply_matrix(&self, m: &ComplexMatrix) -> ComplexMatrix {
        let d = self.space.dim();
        let mut out = ComplexMatrix::zeros(d, d);
        for (p, &w) in &self.probabilities {
            if w == 0.0 {
                continue;
            }
            let term = if p.is_identity() { m.clone() } else { p.conjugate(m) };
            out = &out + &term.scale_real(w);
        }
        out
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        self.space.ensure_same(rho.space())?;
        DensityMatrix::from_matrix_unchecked(self.space, self.apply_matrix(rho.matrix()))
    }

    /// Kraus family `{√p_a P_a}` (zero-weight terms dropped).
    pub fn to_kraus(&self) -> KrausChannel {
        let operators = self
            .probabilities
            .iter()
            .filter(|(_, &w)| w > 0.0)
            .map(|(p, &w)| p.matrix().scale_real(w.sqrt()))
            .collect();
        KrausChannel {
            space: self.space,
            operators,
            complete: true,
        }
    }

    pub fn embed(&self, targets: &[usize], space: HilbertSpec) -> Result<PauliChannel> {
        if targets.len() != self.space.n_qubits() {
            return Err(Error::ChannelSpaceMismatch {
                channel: self.space.n_qubits(),
                expected: targets.len(),
            });
        }
        let mut probabilities = BTreeMap::new();
        for (p, &w) in &self.probabilities {
            *probabilities
                .entry(p.embed(targets, space.n_qubits())?)
                .or_insert(0.0) += w;
        }
        Ok(PauliChannel { space, probabilities })
    }
}

pub fn apply_pauli_channel(ch: &PauliChannel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    ch.apply(rho)
}

/// `ρ ↦ (1 − r)ρ + r·I/d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DepolarizingChannel {
    space: HilbertSpec,
    rate: f64,
}

impl DepolarizingChannel {
    pub fn new(space: HilbertSpec, rate: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&rate) {
            return Err(Error::RateOutOfRange(rate));
        }
        Ok(Self { space, rate })
    }

    pub fn space(&self) -> HilbertSpec {
        self.space
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        self.space.ensure_same(rho.space())?;
        Ok(rho.affine(1.0 - self.rate, &DensityMatrix::maximally_mixed(self.space), self.rate))
    }

    pub fn to_pauli(&self) -> PauliChannel {
        PauliChannel::depolarizing(self.space, self.rate).expect("rate validated")
    }
}

/// `(1 − r)ρ + r·I/d`.
pub fn depolarize(rho: &DensityMatrix, r: f64) -> Result<DensityMatrix> {
    DepolarizingChannel::new(rho.space(), r)?.apply(rho)
}

/// A channel in whichever representation it was specified.
#[derive(Debug, Clone, PartialEq)]
pub enum Channel {
    Kraus(KrausChannel),
    Pauli(PauliChannel),
    Depolarizing(DepolarizingChannel),
}

impl Channel {
    pub fn space(&self) -> HilbertSpec {
        match self {
            Channel::Kraus(c) => c.space(),
            Channel::Pauli(c) => c.space(),
            Channel::Depolarizing(c) => c.space(),
        }
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        match self {
            Channel::Kraus(c) => c.apply(rho),
            Channel::Pauli(c) => c.apply(rho),
            Channel::Depolarizing(c) => c.apply(rho),
        }
    }

    pub fn to_kraus(&self) -> KrausChannel {
        match self {
            Channel::Kraus(c) => c.clone(),
            Channel::Pauli(c) => c.to_kraus(),
            Channel::Depolarizing(c) => c.to_pauli().to_kraus(),
        }
    }

    pub fn validate_cptp(&self, tol: f64) -> bool {
        match self {
            Channel::Kraus(c) => c.validate_cptp(tol),
            // validated on construction
            Channel::Pauli(_) | Channel::Depolarizing(_) => true,
        }
    }

    /// Lifts a channel on `targets.len()` qubits into `space`.
    ///
    /// A depolarizing channel on a strict subset of the register becomes a
    /// Pauli channel (local depolarizing is not global depolarizing).
    pub fn embed(&self, targets: &[usize], space: HilbertSpec) -> Result<Channel> {
        let k = self.space().n_qubits();
        if targets.len() != k {
            return Err(Error::ChannelSpaceMismatch {
                channel: k,
                expected: targets.len(),
            });
        }
        let is_full_identity = k == space.n_qubits() && targets.iter().enumerate().all(|(i, &t)| i == t);
        if is_full_identity {
            return Ok(self.clone());
        }
        match self {
            Channel::Kraus(c) => Ok(Channel::Kraus(embed_channel(c, targets, space)?)),
            Channel::Pauli(c) => Ok(Channel::Pauli(c.embed(targets, space)?)),
            Channel::Depolarizing(c) => Ok(Channel::Pauli(c.to_pauli().embed(targets, space)?)),
        }
    }
}

impl From<KrausChannel> for Channel {
    fn from(c: KrausChannel) -> Self {
        Channel::Kraus(c)
    }
}

impl From<PauliChannel> for Channel {
    fn from(c: PauliChannel) -> Self {
        Channel::Pauli(c)
    }
}

impl From<DepolarizingChannel> for Channel {
    fn from(c: DepolarizingChannel) -> Self {
        Channel::Depolarizing(c)
    }
}

/// Tensors every Kraus operator with identity on the non-target qubits.
pub fn embed_channel(ch: &KrausChannel, targets: &[usize], space: HilbertSpec) -> Result<KrausChannel> {
    if targets.len() != ch.space.n_qubits() {
        return Err(Error::ChannelSpaceMismatch {
            channel: ch.space.n_qubits(),
            expected: targets.len(),
        });
    }
    let operators = ch
        .operators
        .iter()
        .map(|a| embed_operator(a, targets, space.n_qubits()))
        .collect::<Result<Vec<_>>>()?;
    Ok(KrausChannel {
        space,
        operators,
        complete: ch.complete,
    })
}

/// Real degrees of freedom of a `d²`-operator Kraus decomposition after gauge
/// fixing: `d⁴ − d²`.
pub fn cptp_free_parameters(space: HilbertSpec) -> u128 {
    let d = space.dim() as u128;
    d.pow(4) - d.pow(2)
}

/// Closest map of the form `ρ ↦ qρ + (1 − q)·Tr(ρ)·I/d` and the distance to it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DepolarizingProjection {
    pub q: f64,
    /// Largest entrywise deviation of the Choi matrix from the projected form.
    pub residue: f64,
}

impl DepolarizingProjection {
    /// The equivalent depolarizing rate `1 − q` (may exceed 1 for `q < 0`).
    pub fn rate(&self) -> f64 {
        1.0 - self.q
    }
}

/// Projects a channel onto depolarizing form.
///
/// `q` comes from the entanglement fidelity, `q = (Σ_k |Tr A_k|² − 1)/(d² − 1)`;
/// the residue compares the full Choi matrix against `q·|Ω⟩⟨Ω| + (1 − q)·I/d`.
pub fn depolarizing_projection(ch: &KrausChannel) -> DepolarizingProjection {
    let d = ch.space.dim();
    let fid: f64 = ch.operators.iter().map(|a| a.trace().norm_sqr()).sum();
    let q = (fid - 1.0) / ((d * d) as f64 - 1.0);
    // J_{(i,a),(j,b)} = Σ_k A_{a i} conj(A_{b j})
    let dd = d * d;
    let mut choi = vec![c64(0.0, 0.0); dd * dd];
    let mut vecs: Vec<C64> = vec![c64(0.0, 0.0); dd];
    for a in &ch.operators {
        for i in 0..d {
            for row in 0..d {
                vecs[i * d + row] = a.get(row, i);
            }
        }
        for (x, vx) in vecs.iter().enumerate() {
            if vx.norm_sqr() == 0.0 {
                continue;
            }
            for (y, vy) in vecs.iter().enumerate() {
                choi[x * dd + y] += vx * vy.conj();
            }
        }
    }
    let mut residue = 0.0f64;
    for i in 0..d {
        for a in 0..d {
            for j in 0..d {
                for b in 0..d {
                    let mut target = 0.0;
                    if i == a && j == b {
                        target += q;
                    }
                    if i == j && a == b {
                        target += (1.0 - q) / d as f64;
                    }
                    let got = choi[(i * d + a) * dd + (j * d + b)];
                    residue = residue.max((got - c64(target, 0.0)).norm());
                }
            }
        }
    }
    DepolarizingProjection { q, residue }
}

/// Result of [`twirl_channel`].
#[derive(Debug, Clone)]
pub struct TwirledChannel {
    /// Concatenated, weight-scaled Kraus family `{U† A_k U / √|frame|}`.
    pub kraus: KrausChannel,
    pub projection: DepolarizingProjection,
}

impl TwirledChannel {
    /// `q` when the twirl is depolarizing to within [`DEPOLARIZING_RESIDUE_TOL`].
    pub fn depolarizing_q(&self) -> Option<f64> {
        (self.projection.residue < DEPOLARIZING_RESIDUE_TOL).then_some(self.projection.q)
    }
}

/// `ρ ↦ (1/|F|) Σ_U U† · ch(U ρ U†) · U`.
pub fn twirl_channel(ch: &KrausChannel, frame: &[ComplexMatrix]) -> Result<TwirledChannel> {
    if frame.is_empty() {
        return Err(Error::BadSpec("empty twirl frame".into()));
    }
    let d = ch.space.dim();
    for (index, u) in frame.iter().enumerate() {
        if u.rows() != d || !is_unitary(u, DEFAULT_TOL) {
            return Err(Error::NonUnitaryFrame { index });
        }
    }
    let w = 1.0 / (frame.len() as f64).sqrt();
    let mut operators = Vec::with_capacity(frame.len() * ch.operators.len());
    for u in frame {
        let ud = u.dagger();
        for a in &ch.operators {
            operators.push(ud.matmul(a).matmul(u).scale_real(w));
        }
    }
    let kraus = KrausChannel {
        space: ch.space,
        operators,
        complete: ch.complete,
    };
    let projection = depolarizing_projection(&kraus);
    Ok(TwirledChannel { kraus, projection })
}
