//! Dispatches a validated configuration to the library and collects rows.
//!
//! Work units (replicates, grid points) run on a rayon pool. Each unit owns
//! its seed, and results are gathered in grid order, so the table does not
//! depend on the thread count.

use rayon::prelude::*;

use qdepol::circuit::{build_ansatz, AnsatzSpec, Entangler, NoiseModel};
use qdepol::projection::{required_layers, run_twirl_experiment, theoretical_entropy, LayerBudget, TwirlExperimentSpec, TwirlMode};
use qdepol::rng::derive_seed;
use qdepol::state::HilbertSpec;
use qdepol::vqe::{per_gate_pauli_noise, run_vqe, MitigationMode, OptimizerConfig, TfimSpec};

use crate::config::{
    Experiment, ExperimentConfig, LayerBudgetConfig, MitigationSetting, SweepAxis, TwirlEntropyConfig, VqeDescentConfig,
    VqeSettings, VqeSweepConfig,
};
use crate::table::{Cell, Provenance, ResultTable};

pub const TWIRL_COLUMNS: [&str; 5] = ["L", "seed", "S", "one_minus_S_over_N", "S_theory"];
pub const SWEEP_TAIL: [&str; 6] = ["seed", "E_raw", "E_mitigated", "E_exact", "r", "purity"];
pub const DESCENT_COLUMNS: [&str; 4] = ["iteration", "E_raw", "E_mitigated", "overlap"];
pub const BUDGET_COLUMNS: [&str; 4] = ["delta", "epsilon", "h_norm", "L"];

/// Seed of replicate `r` under master seed `seed`.
pub fn replicate_seed(seed: u64, r: usize) -> u64 {
    derive_seed(seed, r as u64)
}

/// Runs on a pool of `threads` workers (0 lets rayon decide).
pub fn run_experiment(cfg: &ExperimentConfig, threads: usize) -> qdepol::Result<ResultTable> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| qdepol::Error::InvalidArgument(format!("thread pool: {e}")))?;
    pool.install(|| run_in_pool(cfg))
}

fn run_in_pool(cfg: &ExperimentConfig) -> qdepol::Result<ResultTable> {
    let prov = Provenance::for_config(cfg);
    match &cfg.experiment {
        Experiment::TwirlEntropy(t) => twirl_entropy(t, cfg.seed, prov),
        Experiment::VqeSweep(s) => vqe_sweep(s, cfg.seed, prov),
        Experiment::VqeDescent(d) => vqe_descent(d, cfg.seed, prov),
        Experiment::LayerBudget(l) => Ok(layer_budget(l, prov)),
    }
}

fn twirl_entropy(t: &TwirlEntropyConfig, seed: u64, prov: Provenance) -> qdepol::Result<ResultTable> {
    let theory = theoretical_entropy(HilbertSpec::new(t.n_qubits)?, 2.0);
    let per_replicate: Vec<_> = (0..t.replicates)
        .into_par_iter()
        .map(|r| {
            let s = replicate_seed(seed, r);
            let spec = TwirlExperimentSpec {
                n_qubits: t.n_qubits,
                layer_counts: t.layers.clone(),
                pauli: t.pauli,
                mode: t.trials.map_or(TwirlMode::ExactAverage, |trials| TwirlMode::Sampled { trials }),
                seed: s,
            };
            run_twirl_experiment(&spec).map(|rows| (s, rows))
        })
        .collect::<qdepol::Result<_>>()?;
    let mut table = ResultTable::new(&TWIRL_COLUMNS, prov);
    for (s, rows) in per_replicate {
        for row in rows {
            table.push(vec![row.layers.into(), s.into(), row.entropy.into(), row.purity_gap.into(), theory.into()]);
        }
    }
    Ok(table)
}

fn noise_model(v: &VqeSettings) -> qdepol::Result<NoiseModel> {
    if v.noise.p == 0.0 {
        return Ok(NoiseModel::noiseless());
    }
    per_gate_pauli_noise(v.noise.pauli, v.noise.p)
}

fn mitigation_mode(v: &VqeSettings) -> MitigationMode {
    match v.mitigation {
        MitigationSetting::Off => MitigationMode::Off,
        MitigationSetting::Exact => MitigationMode::ExactPurity,
        MitigationSetting::Tomography => MitigationMode::Tomography { shots: v.shots },
    }
}

fn optimizer(v: &VqeSettings, seed: u64) -> OptimizerConfig {
    OptimizerConfig {
        method: v.optimizer,
        max_iterations: v.max_iterations,
        seed,
        target_overlap: v.target_overlap,
    }
}

fn ansatz(n_qubits: usize, depth: usize) -> qdepol::Result<qdepol::circuit::LayeredCircuit> {
    build_ansatz(&AnsatzSpec {
        n_qubits,
        depth,
        entangler: Entangler::Ring,
    })
}

fn vqe_sweep(s: &VqeSweepConfig, seed: u64, prov: Provenance) -> qdepol::Result<ResultTable> {
    let noise = noise_model(&s.vqe)?;
    let mode = mitigation_mode(&s.vqe);
    let grid: Vec<(usize, usize)> = (0..s.values.len())
        .flat_map(|i| (0..s.replicates).map(move |r| (i, r)))
        .collect();
    let rows: Vec<Vec<Cell>> = grid
        .par_iter()
        .map(|&(i, r)| {
            let value = s.values[i];
            let (x, depth) = match s.axis {
                SweepAxis::Coupling => (value, s.depth),
                SweepAxis::Depth => (s.coupling, value as usize),
            };
            let rs = replicate_seed(seed, r);
            let tfim = TfimSpec::new(s.vqe.n_qubits, x)?;
            let circuit = ansatz(s.vqe.n_qubits, depth)?;
            let trace = run_vqe(&circuit, &tfim, &noise, mode, &optimizer(&s.vqe, rs))?;
            let last = trace
                .last()
                .ok_or_else(|| qdepol::Error::InvalidArgument("empty descent trace".into()))?;
            let key: Cell = match s.axis {
                SweepAxis::Coupling => value.into(),
                SweepAxis::Depth => depth.into(),
            };
            Ok(vec![
                key,
                rs.into(),
                last.raw.into(),
                last.mitigated.into(),
                trace.exact_ground_energy.into(),
                trace.final_estimate.map(|e| e.rate).into(),
                trace.final_estimate.map(|e| e.purity).into(),
            ])
        })
        .collect::<qdepol::Result<_>>()?;
    let first = match s.axis {
        SweepAxis::Coupling => "x",
        SweepAxis::Depth => "depth",
    };
    let columns: Vec<&str> = std::iter::once(first).chain(SWEEP_TAIL).collect();
    let mut table = ResultTable::new(&columns, prov);
    rows.into_iter().for_each(|r| table.push(r));
    Ok(table)
}

fn vqe_descent(d: &VqeDescentConfig, seed: u64, prov: Provenance) -> qdepol::Result<ResultTable> {
    let tfim = TfimSpec::new(d.vqe.n_qubits, d.coupling)?;
    let circuit = ansatz(d.vqe.n_qubits, d.depth)?;
    let trace = run_vqe(&circuit, &tfim, &noise_model(&d.vqe)?, mitigation_mode(&d.vqe), &optimizer(&d.vqe, seed))?;
    let mut table = ResultTable::new(&DESCENT_COLUMNS, prov);
    for rec in &trace.records {
        table.push(vec![rec.iteration.into(), rec.raw.into(), rec.mitigated.into(), rec.overlap.into()]);
    }
    Ok(table)
}

fn layer_budget(l: &LayerBudgetConfig, prov: Provenance) -> ResultTable {
    let mut table = ResultTable::new(&BUDGET_COLUMNS, prov);
    for &delta in &l.deltas {
        for &eps in &l.epsilons {
            for &h in &l.h_norms {
                let b = LayerBudget::new(delta, eps, h).expect("validated at parse time");
                table.push(vec![delta.into(), eps.into(), h.into(), (required_layers(&b) as usize).into()]);
            }
        }
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{parse_config, ExperimentKind};

    #[test]
    fn layer_budget_default_row() {
        let cfg = parse_config("", ExperimentKind::LayerBudget).unwrap();
        let t = run_experiment(&cfg, 1).unwrap();
        assert_eq!(t.rows.len(), 1);
        assert_eq!(t.rows[0][3], Cell::Int(185));
    }

    #[test]
    fn twirl_rows_per_replicate_and_layer() {
        let text = "[twirl-entropy]\nlayers = 2, 8\nreplicates = 3\n";
        let cfg = parse_config(text, ExperimentKind::TwirlEntropy).unwrap();
        let t = run_experiment(&cfg, 2).unwrap();
        assert_eq!(t.rows.len(), 6);
        assert_eq!(t.columns, TWIRL_COLUMNS);
    }

    #[test]
    fn thread_count_does_not_change_rows() {
        let text = "seed = 5\n[vqe-sweep]\nvalues = -0.25, -1.0\nreplicates = 2\nmax_iterations = 20\ndepth = 1\n";
        let cfg = parse_config(text, ExperimentKind::VqeSweep).unwrap();
        let a = run_experiment(&cfg, 1).unwrap();
        let b = run_experiment(&cfg, 4).unwrap();
        assert_eq!(a.render(), b.render());
        assert_eq!(a.columns[0], "x");
    }
}
