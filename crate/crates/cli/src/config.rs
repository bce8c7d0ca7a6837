//! Experiment configuration files.
//!
//! ```text
//! # comment
//! seed = 42
//! out = results/twirl.csv
//!
//! [twirl-entropy]
//! n_qubits = 1
//! pauli = X
//! layers = 16, 64, 256, 1024, 4096
//! ```
//!
//! Top-level keys come before the first section header. Exactly one section
//! is allowed; its name selects the experiment. Every problem in the file is
//! reported, not just the first.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use qdepol::pauli::Pauli;
use qdepol::projection::{LayerBudget, TwirlExperimentSpec, TwirlMode};
use qdepol::vqe::{OptimizerConfig, OptimizerMethod, TfimSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Parse,
    Validation,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub kind: ErrorKind,
    pub line: Option<usize>,
    pub column: Option<usize>,
    pub key: Option<String>,
    pub message: String,
}

impl ConfigError {
    fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Self {
            kind: ErrorKind::Parse,
            line: Some(line),
            column: Some(column),
            key: None,
            message: message.into(),
        }
    }

    fn validation(key: &str, at: Option<(usize, usize)>, message: impl Into<String>) -> Self {
        Self {
            kind: ErrorKind::Validation,
            line: at.map(|a| a.0),
            column: at.map(|a| a.1),
            key: Some(key.to_string()),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            ErrorKind::Parse => "parse error",
            ErrorKind::Validation => "invalid value",
        };
        match (self.line, self.column) {
            (Some(l), Some(c)) => write!(f, "{l}:{c}: {kind}")?,
            _ => write!(f, "{kind}")?,
        }
        if let Some(k) = &self.key {
            write!(f, " for `{k}`")?;
        }
        write!(f, ": {}", self.message)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ExperimentKind {
    TwirlEntropy,
    VqeSweep,
    VqeDescent,
    LayerBudget,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 4] = [
        ExperimentKind::TwirlEntropy,
        ExperimentKind::VqeSweep,
        ExperimentKind::VqeDescent,
        ExperimentKind::LayerBudget,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::TwirlEntropy => "twirl-entropy",
            ExperimentKind::VqeSweep => "vqe-sweep",
            ExperimentKind::VqeDescent => "vqe-descent",
            ExperimentKind::LayerBudget => "layer-budget",
        }
    }
}

impl FromStr for ExperimentKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown experiment `{s}`"))
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MitigationSetting {
    Off,
    Exact,
    Tomography,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwirlEntropyConfig {
    pub n_qubits: usize,
    pub pauli: Pauli,
    pub layers: Vec<usize>,
    /// `None` for the exact insertion average.
    pub trials: Option<usize>,
    pub replicates: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    Coupling,
    Depth,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSettings {
    pub pauli: Pauli,
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VqeSettings {
    pub n_qubits: usize,
    pub noise: NoiseSettings,
    pub mitigation: MitigationSetting,
    pub shots: u64,
    pub optimizer: OptimizerMethod,
    pub max_iterations: usize,
    pub target_overlap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VqeSweepConfig {
    pub vqe: VqeSettings,
    pub axis: SweepAxis,
    /// Couplings or depths, depending on `axis`.
    pub values: Vec<f64>,
    /// Held fixed when sweeping depth.
    pub coupling: f64,
    /// Held fixed when sweeping coupling.
    pub depth: usize,
    pub replicates: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VqeDescentConfig {
    pub vqe: VqeSettings,
    pub coupling: f64,
    pub depth: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayerBudgetConfig {
    pub deltas: Vec<f64>,
    pub epsilons: Vec<f64>,
    pub h_norms: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Experiment {
    TwirlEntropy(TwirlEntropyConfig),
    VqeSweep(VqeSweepConfig),
    VqeDescent(VqeDescentConfig),
    LayerBudget(LayerBudgetConfig),
}

impl Experiment {
    pub fn kind(&self) -> ExperimentKind {
        match self {
            Experiment::TwirlEntropy(_) => ExperimentKind::TwirlEntropy,
            Experiment::VqeSweep(_) => ExperimentKind::VqeSweep,
            Experiment::VqeDescent(_) => ExperimentKind::VqeDescent,
            Experiment::LayerBudget(_) => ExperimentKind::LayerBudget,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub experiment: Experiment,
}

pub const DEFAULT_SEED: u64 = 0;

struct Entry {
    value: String,
    line: usize,
    column: usize,
}

#[derive(Default)]
struct Document {
    top: BTreeMap<String, Entry>,
    section: Option<(String, usize, usize)>,
    body: BTreeMap<String, Entry>,
}

fn tokenize(text: &str) -> (Document, Vec<ConfigError>) {
    let mut doc = Document::default();
    let mut errors = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let trimmed = content.trim();
        if trimmed.is_empty() {
            continue;
        }
        let indent = content.len() - content.trim_start().len();
        if let Some(rest) = trimmed.strip_prefix('[') {
            let Some(name) = rest.strip_suffix(']') else {
                errors.push(ConfigError::parse(line, indent + 1, "section header is missing `]`"));
                continue;
            };
            let name = name.trim();
            if name.is_empty() {
                errors.push(ConfigError::parse(line, indent + 1, "empty section name"));
            } else if let Some((prev, l, _)) = &doc.section {
                errors.push(ConfigError::parse(
                    line,
                    indent + 1,
                    format!("second section `{name}`; `{prev}` was already opened on line {l}"),
                ));
            } else {
                doc.section = Some((name.to_string(), line, indent + 1));
            }
            continue;
        }
        let Some(eq) = content.find('=') else {
            errors.push(ConfigError::parse(line, indent + 1, "expected `key = value`"));
            continue;
        };
        let key = content[..eq].trim();
        let value = content[eq + 1..].trim();
        if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            errors.push(ConfigError::parse(line, indent + 1, format!("invalid key `{key}`")));
            continue;
        }
        if value.is_empty() {
            errors.push(ConfigError::parse(line, eq + 2, format!("missing value for `{key}`")));
            continue;
        }
        let value_col = eq + 2 + (content[eq + 1..].len() - content[eq + 1..].trim_start().len());
        let target = if doc.section.is_some() { &mut doc.body } else { &mut doc.top };
        if let Some(prev) = target.get(key) {
            errors.push(ConfigError::parse(
                line,
                indent + 1,
                format!("duplicate key `{key}` (first set on line {})", prev.line),
            ));
            continue;
        }
        target.insert(
            key.to_string(),
            Entry {
                value: value.to_string(),
                line,
                column: value_col,
            },
        );
    }
    (doc, errors)
}

/// Typed, error-collecting access to one block of entries.
struct Block<'a> {
    entries: &'a BTreeMap<String, Entry>,
    used: Vec<&'static str>,
    errors: Vec<ConfigError>,
}

impl<'a> Block<'a> {
    fn new(entries: &'a BTreeMap<String, Entry>) -> Self {
        Self {
            entries,
            used: Vec::new(),
            errors: Vec::new(),
        }
    }

    fn at(&self, key: &str) -> Option<(usize, usize)> {
        self.entries.get(key).map(|e| (e.line, e.column))
    }

    fn fail(&mut self, key: &str, message: impl Into<String>) {
        let at = self.at(key);
        self.errors.push(ConfigError::validation(key, at, message));
    }

    fn parsed<T: FromStr>(&mut self, key: &'static str, default: T, what: &str) -> T {
        self.used.push(key);
        let Some(e) = self.entries.get(key) else { return default };
        match e.value.parse() {
            Ok(v) => v,
            Err(_) => {
                let msg = format!("`{}` is not {what}", e.value);
                self.fail(key, msg);
                default
            }
        }
    }

    fn list<T: FromStr>(&mut self, key: &'static str, default: Vec<T>, what: &str) -> Vec<T> {
        self.used.push(key);
        let Some(e) = self.entries.get(key) else { return default };
        let mut out = Vec::new();
        for item in e.value.split(',') {
            match item.trim().parse() {
                Ok(v) => out.push(v),
                Err(_) => {
                    let msg = format!("`{}` is not {what}", item.trim());
                    self.fail(key, msg);
                    return default;
                }
            }
        }
        out
    }

    fn choice<T: Copy>(&mut self, key: &'static str, default: T, options: &[(&str, T)]) -> T {
        self.used.push(key);
        let Some(e) = self.entries.get(key) else { return default };
        if let Some((_, v)) = options.iter().find(|(name, _)| name.eq_ignore_ascii_case(&e.value)) {
            return *v;
        }
        let names: Vec<&str> = options.iter().map(|o| o.0).collect();
        let msg = format!("`{}` is not one of {}", e.value, names.join(", "));
        self.fail(key, msg);
        default
    }

    fn has(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    fn finish(mut self) -> Vec<ConfigError> {
        for (k, e) in self.entries {
            if !self.used.contains(&k.as_str()) {
                self.errors.push(ConfigError::validation(
                    k,
                    Some((e.line, e.column)),
                    format!("unknown key `{k}`"),
                ));
            }
        }
        self.errors
    }
}

const PAULIS: [(&str, Pauli); 3] = [("X", Pauli::X), ("Y", Pauli::Y), ("Z", Pauli::Z)];

/// Parses and validates a configuration.
///
/// `kind` is the experiment requested on the command line; a section with
/// a different name is rejected. A file without a section uses the defaults
/// for `kind`. Errors are sorted by position; parse errors come first.
pub fn parse_config(text: &str, kind: ExperimentKind) -> Result<ExperimentConfig, Vec<ConfigError>> {
    let (doc, parse_errors) = tokenize(text);
    if !parse_errors.is_empty() {
        return Err(parse_errors);
    }
    let mut errors = Vec::new();

    let mut top = Block::new(&doc.top);
    let seed = top.parsed("seed", DEFAULT_SEED, "an unsigned 64-bit integer");
    top.used.push("out");
    let out = doc.top.get("out").map(|e| PathBuf::from(&e.value));
    errors.extend(top.finish());

    if let Some((name, line, col)) = &doc.section {
        match name.parse::<ExperimentKind>() {
            Ok(k) if k == kind => {}
            Ok(k) => errors.push(ConfigError::validation(
                "section",
                Some((*line, *col)),
                format!("file describes `{k}` but `{kind}` was requested"),
            )),
            Err(e) => errors.push(ConfigError::validation("section", Some((*line, *col)), e)),
        }
    }

    let mut block = Block::new(&doc.body);
    let experiment = match kind {
        ExperimentKind::TwirlEntropy => Experiment::TwirlEntropy(twirl_entropy(&mut block)),
        ExperimentKind::VqeSweep => Experiment::VqeSweep(vqe_sweep(&mut block)),
        ExperimentKind::VqeDescent => Experiment::VqeDescent(vqe_descent(&mut block)),
        ExperimentKind::LayerBudget => Experiment::LayerBudget(layer_budget(&mut block)),
    };
    errors.extend(block.finish());

    let cfg = ExperimentConfig { seed, out, experiment };
    // Keys that failed to resolve hold defaults; skip range checks on them.
    let reported: Vec<Option<String>> = errors.iter().map(|e| e.key.clone()).collect();
    errors.extend(validate(&cfg).into_iter().filter(|e| !reported.contains(&e.key)));
    if errors.is_empty() {
        Ok(cfg)
    } else {
        errors.sort_by_key(|e| (e.line, e.column));
        Err(errors)
    }
}

fn twirl_entropy(b: &mut Block) -> TwirlEntropyConfig {
    let n_qubits = b.parsed("n_qubits", 1, "a qubit count");
    let pauli = b.choice("pauli", Pauli::X, &PAULIS);
    let default_layers: Vec<usize> = (0..=12).map(|k| 1usize << k).collect();
    let layers = b.list("layers", default_layers, "a layer count");
    let sampled = b.choice("mode", false, &[("exact", false), ("sampled", true)]);
    let trials: usize = b.parsed("trials", 1000, "a trial count");
    if b.has("trials") && !sampled {
        b.fail("trials", "only meaningful with `mode = sampled`");
    }
    let replicates = b.parsed("replicates", 1, "a replicate count");
    TwirlEntropyConfig {
        n_qubits,
        pauli,
        layers,
        trials: sampled.then_some(trials),
        replicates,
    }
}

fn vqe_settings(b: &mut Block, default_n: usize) -> VqeSettings {
    let n_qubits = b.parsed("n_qubits", default_n, "a qubit count");
    let pauli = b.choice("noise_pauli", Pauli::X, &PAULIS);
    let p = b.parsed("noise_p", 0.002, "a probability");
    let mitigation = b.choice(
        "mitigation",
        MitigationSetting::Exact,
        &[
            ("off", MitigationSetting::Off),
            ("exact", MitigationSetting::Exact),
            ("tomography", MitigationSetting::Tomography),
        ],
    );
    let shots = b.parsed("shots", 10_000, "a shot count");
    if b.has("shots") && mitigation != MitigationSetting::Tomography {
        b.fail("shots", "only meaningful with `mitigation = tomography`");
    }
    let optimizer = b.choice(
        "optimizer",
        OptimizerMethod::nelder_mead(),
        &[("nelder-mead", OptimizerMethod::nelder_mead()), ("spsa", OptimizerMethod::spsa())],
    );
    let max_iterations = b.parsed("max_iterations", 500, "an iteration count");
    let target_overlap = b.parsed("target_overlap", 1.0, "a number");
    VqeSettings {
        n_qubits,
        noise: NoiseSettings { pauli, p },
        mitigation,
        shots,
        optimizer,
        max_iterations,
        target_overlap,
    }
}

fn vqe_sweep(b: &mut Block) -> VqeSweepConfig {
    let vqe = vqe_settings(b, 2);
    let axis = b.choice("sweep", SweepAxis::Coupling, &[("coupling", SweepAxis::Coupling), ("depth", SweepAxis::Depth)]);
    let default_values = match axis {
        SweepAxis::Coupling => vec![-0.25, -0.5, -0.75, -1.0],
        SweepAxis::Depth => vec![1.0, 2.0, 4.0],
    };
    let values: Vec<f64> = b.list("values", default_values, "a number");
    let coupling = b.parsed("coupling", -1.0, "a number");
    let depth = b.parsed("depth", 2, "a circuit depth");
    if axis == SweepAxis::Coupling && b.has("coupling") {
        b.fail("coupling", "fixed coupling conflicts with `sweep = coupling`");
    }
    if axis == SweepAxis::Depth && b.has("depth") {
        b.fail("depth", "fixed depth conflicts with `sweep = depth`");
    }
    if axis == SweepAxis::Depth && values.iter().any(|v| v.fract() != 0.0 || *v < 0.0) {
        b.fail("values", "depths must be non-negative integers");
    }
    let replicates = b.parsed("replicates", 1, "a replicate count");
    VqeSweepConfig {
        vqe,
        axis,
        values,
        coupling,
        depth,
        replicates,
    }
}

fn vqe_descent(b: &mut Block) -> VqeDescentConfig {
    let vqe = vqe_settings(b, 2);
    let coupling = b.parsed("coupling", -1.0, "a number");
    let depth = b.parsed("depth", 2, "a circuit depth");
    VqeDescentConfig { vqe, coupling, depth }
}

fn layer_budget(b: &mut Block) -> LayerBudgetConfig {
    LayerBudgetConfig {
        deltas: b.list("delta", vec![0.05], "a number"),
        epsilons: b.list("epsilon", vec![0.1], "a number"),
        h_norms: b.list("h_norm", vec![1.0], "a number"),
    }
}

/// Checks every parameter against the preconditions of the library call it
/// feeds, so that nothing fails after computation has started.
pub fn validate(cfg: &ExperimentConfig) -> Vec<ConfigError> {
    let mut errors = Vec::new();
    let mut bad = |key: &str, msg: String| errors.push(ConfigError::validation(key, None, msg));
    match &cfg.experiment {
        Experiment::TwirlEntropy(t) => {
            let spec = TwirlExperimentSpec {
                n_qubits: t.n_qubits,
                layer_counts: t.layers.clone(),
                pauli: t.pauli,
                mode: t.trials.map_or(TwirlMode::ExactAverage, |trials| TwirlMode::Sampled { trials }),
                seed: cfg.seed,
            };
            if let Err(e) = spec.validate() {
                let key = if t.n_qubits == 0 || t.n_qubits > 10 {
                    "n_qubits"
                } else if t.trials == Some(0) {
                    "trials"
                } else {
                    "layers"
                };
                bad(key, e.to_string());
            }
            if t.replicates == 0 {
                bad("replicates", "must be at least 1".into());
            }
        }
        Experiment::VqeSweep(s) => {
            check_vqe(&s.vqe, &mut bad);
            if s.values.is_empty() {
                bad("values", "must not be empty".into());
            }
            let couplings: Vec<f64> = match s.axis {
                SweepAxis::Coupling => s.values.clone(),
                SweepAxis::Depth => vec![s.coupling],
            };
            for x in couplings {
                if let Err(e) = TfimSpec::new(s.vqe.n_qubits, x) {
                    bad(if s.axis == SweepAxis::Coupling { "values" } else { "coupling" }, e.to_string());
                }
            }
            if s.replicates == 0 {
                bad("replicates", "must be at least 1".into());
            }
        }
        Experiment::VqeDescent(d) => {
            check_vqe(&d.vqe, &mut bad);
            if let Err(e) = TfimSpec::new(d.vqe.n_qubits, d.coupling) {
                bad("coupling", e.to_string());
            }
        }
        Experiment::LayerBudget(l) => {
            for (key, values) in [("delta", &l.deltas), ("epsilon", &l.epsilons), ("h_norm", &l.h_norms)] {
                if values.is_empty() {
                    bad(key, "must not be empty".into());
                }
            }
            for &d in &l.deltas {
                if LayerBudget::new(d, 1.0, 1.0).is_err() {
                    bad("delta", format!("{d} must lie in (0, 1)"));
                }
            }
            for &e in &l.epsilons {
                if LayerBudget::new(0.5, e, 1.0).is_err() {
                    bad("epsilon", format!("{e} must be positive"));
                }
            }
            for &h in &l.h_norms {
                if LayerBudget::new(0.5, 1.0, h).is_err() {
                    bad("h_norm", format!("{h} must be positive"));
                }
            }
        }
    }
    errors
}

fn check_vqe(v: &VqeSettings, bad: &mut impl FnMut(&str, String)) {
    if v.n_qubits < 2 || v.n_qubits > 10 {
        bad("n_qubits", format!("{} is outside 2..=10", v.n_qubits));
    }
    if !(0.0..=1.0).contains(&v.noise.p) {
        bad("noise_p", format!("{} is not a probability", v.noise.p));
    }
    if v.mitigation == MitigationSetting::Tomography && v.shots == 0 {
        bad("shots", "must be at least 1".into());
    }
    let opt = OptimizerConfig {
        method: v.optimizer,
        max_iterations: v.max_iterations,
        seed: 0,
        target_overlap: v.target_overlap,
    };
    if let Err(e) = opt.validate() {
        let key = if v.max_iterations == 0 { "max_iterations" } else { "target_overlap" };
        bad(key, e.to_string());
    }
}

fn fmt_list<T: fmt::Display>(v: &[T]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

impl ExperimentConfig {
    /// Fully resolved configuration in the file grammar, excluding `out`.
    /// Two configs that run the same computation render identically.
    pub fn canonical(&self) -> String {
        let mut s = format!("seed = {}\n\n[{}]\n", self.seed, self.experiment.kind());
        let mut kv = |k: &str, v: String| s.push_str(&format!("{k} = {v}\n"));
        match &self.experiment {
            Experiment::TwirlEntropy(t) => {
                kv("n_qubits", t.n_qubits.to_string());
                kv("pauli", t.pauli.letter().to_string());
                kv("layers", fmt_list(&t.layers));
                match t.trials {
                    None => kv("mode", "exact".into()),
                    Some(n) => {
                        kv("mode", "sampled".into());
                        kv("trials", n.to_string());
                    }
                }
                kv("replicates", t.replicates.to_string());
            }
            Experiment::VqeSweep(v) => {
                vqe_canonical(&v.vqe, &mut kv);
                match v.axis {
                    SweepAxis::Coupling => {
                        kv("sweep", "coupling".into());
                        kv("depth", v.depth.to_string());
                    }
                    SweepAxis::Depth => {
                        kv("sweep", "depth".into());
                        kv("coupling", format!("{:?}", v.coupling));
                    }
                }
                kv("values", v.values.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(", "));
                kv("replicates", v.replicates.to_string());
            }
            Experiment::VqeDescent(d) => {
                vqe_canonical(&d.vqe, &mut kv);
                kv("coupling", format!("{:?}", d.coupling));
                kv("depth", d.depth.to_string());
            }
            Experiment::LayerBudget(l) => {
                let f = |v: &[f64]| v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(", ");
                kv("delta", f(&l.deltas));
                kv("epsilon", f(&l.epsilons));
                kv("h_norm", f(&l.h_norms));
            }
        }
        s
    }
}

fn vqe_canonical(v: &VqeSettings, kv: &mut impl FnMut(&str, String)) {
    kv("n_qubits", v.n_qubits.to_string());
    kv("noise_pauli", v.noise.pauli.letter().to_string());
    kv("noise_p", format!("{:?}", v.noise.p));
    match v.mitigation {
        MitigationSetting::Off => kv("mitigation", "off".into()),
        MitigationSetting::Exact => kv("mitigation", "exact".into()),
        MitigationSetting::Tomography => {
            kv("mitigation", "tomography".into());
            kv("shots", v.shots.to_string());
        }
    }
    let name = match v.optimizer {
        OptimizerMethod::Spsa { .. } => "spsa",
        OptimizerMethod::NelderMead { .. } => "nelder-mead",
    };
    kv("optimizer", name.into());
    kv("max_iterations", v.max_iterations.to_string());
    kv("target_overlap", format!("{:?}", v.target_overlap));
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_twirl_config() {
        let text = "seed = 3\n[twirl-entropy]\nn_qubits = 1\npauli = X\nlayers = 1, 2, 4  # grid\n";
        let cfg = parse_config(text, ExperimentKind::TwirlEntropy).unwrap();
        assert_eq!(cfg.seed, 3);
        let Experiment::TwirlEntropy(t) = cfg.experiment else { panic!() };
        assert_eq!(t.layers, vec![1, 2, 4]);
        assert_eq!(t.pauli, Pauli::X);
        assert_eq!(t.trials, None);
    }

    #[test]
    fn unknown_key_is_named() {
        let errs = parse_config("[layer-budget]\ndelta = 0.1\nfoo = 2\n", ExperimentKind::LayerBudget).unwrap_err();
        assert_eq!(errs.len(), 1);
        assert_eq!(errs[0].kind, ErrorKind::Validation);
        assert_eq!(errs[0].key.as_deref(), Some("foo"));
        assert_eq!(errs[0].line, Some(3));
    }

    #[test]
    fn delta_out_of_range() {
        let errs = parse_config("[layer-budget]\ndelta = 1.5\n", ExperimentKind::LayerBudget).unwrap_err();
        assert_eq!(errs[0].key.as_deref(), Some("delta"));
        assert_eq!(errs[0].kind, ErrorKind::Validation);
    }

    #[test]
    fn all_errors_reported() {
        let text = "[vqe-descent]\nn_qubits = two\nnoise_pauli = W\nbogus = 1\n";
        let errs = parse_config(text, ExperimentKind::VqeDescent).unwrap_err();
        let keys: Vec<_> = errs.iter().map(|e| e.key.clone().unwrap()).collect();
        assert_eq!(keys, vec!["n_qubits", "noise_pauli", "bogus"]);
    }

    #[test]
    fn parse_errors_have_positions() {
        let errs = parse_config("seed = 1\n  what\n[oops\nx = \n", ExperimentKind::LayerBudget).unwrap_err();
        assert_eq!(errs.len(), 3);
        assert!(errs.iter().all(|e| e.kind == ErrorKind::Parse));
        assert_eq!((errs[0].line, errs[0].column), (Some(2), Some(3)));
        assert_eq!(errs[1].line, Some(3));
        assert_eq!(errs[2].line, Some(4));
    }

    #[test]
    fn duplicate_keys_and_sections() {
        let errs = parse_config("seed = 1\nseed = 2\n", ExperimentKind::LayerBudget).unwrap_err();
        assert!(errs[0].message.contains("duplicate"));
        let errs = parse_config("[layer-budget]\n[layer-budget]\n", ExperimentKind::LayerBudget).unwrap_err();
        assert!(errs[0].message.contains("second section"));
    }

    #[test]
    fn section_must_match_subcommand() {
        let errs = parse_config("[twirl-entropy]\n", ExperimentKind::LayerBudget).unwrap_err();
        assert_eq!(errs[0].key.as_deref(), Some("section"));
        let errs = parse_config("[nonsense]\n", ExperimentKind::LayerBudget).unwrap_err();
        assert!(errs[0].message.contains("unknown experiment"));
    }

    #[test]
    fn empty_file_uses_defaults() {
        for kind in ExperimentKind::ALL {
            let cfg = parse_config("", kind).unwrap();
            assert_eq!(cfg.experiment.kind(), kind);
            assert_eq!(cfg.seed, DEFAULT_SEED);
        }
    }

    #[test]
    fn canonical_form_reparses_to_same_config() {
        let text = "seed = 9\nout = x.csv\n[vqe-sweep]\nsweep = depth\nvalues = 1, 2\ncoupling = -0.5\nmitigation = tomography\nshots = 100\n";
        let cfg = parse_config(text, ExperimentKind::VqeSweep).unwrap();
        let again = parse_config(&cfg.canonical(), ExperimentKind::VqeSweep).unwrap();
        assert_eq!(again.experiment, cfg.experiment);
        assert_eq!(again.seed, cfg.seed);
        assert_eq!(again.out, None);
    }

    #[test]
    fn sweep_conflicts_are_rejected() {
        let errs = parse_config("[vqe-sweep]\nsweep = depth\ndepth = 3\n", ExperimentKind::VqeSweep).unwrap_err();
        assert_eq!(errs[0].key.as_deref(), Some("depth"));
        let errs = parse_config("[vqe-sweep]\nsweep = depth\nvalues = 1.5\n", ExperimentKind::VqeSweep).unwrap_err();
        assert_eq!(errs[0].key.as_deref(), Some("values"));
    }
}
