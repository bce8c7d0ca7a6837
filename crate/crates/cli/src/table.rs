//! CSV result tables with a provenance preamble.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Real(f64),
    /// Written as an empty field.
    Missing,
}

impl Cell {
    fn render(&self, out: &mut String) {
        match self {
            Cell::Int(v) => write!(out, "{v}").unwrap(),
            // 17 significant digits round-trip every f64
            Cell::Real(v) => write!(out, "{v:.16e}").unwrap(),
            Cell::Missing => {}
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Missing, Cell::Real)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

/// Seeds are written as their two's-complement `i64` so every cell fits
/// one integer type; [`seed_from_cell`] undoes it.
impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}

pub fn seed_from_cell(v: i64) -> u64 {
    v as u64
}

#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub experiment: String,
    pub config_hash: String,
    pub seed: u64,
    pub version: String,
}

impl Provenance {
    pub fn for_config(cfg: &ExperimentConfig) -> Self {
        Self {
            experiment: cfg.experiment.kind().name().to_string(),
            config_hash: config_hash(cfg),
            seed: cfg.seed,
            version: VERSION.to_string(),
        }
    }
}

/// SHA-256 of the canonical configuration text.
pub fn config_hash(cfg: &ExperimentConfig) -> String {
    hex::encode(Sha256::digest(cfg.canonical().as_bytes()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub provenance: Provenance,
}

impl ResultTable {
    pub fn new(columns: &[&str], provenance: Provenance) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            provenance,
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let p = &self.provenance;
        let mut out = format!(
            "# qdepol {}\n# experiment = {}\n# config_hash = sha256:{}\n# seed = {}\n",
            p.version, p.experiment, p.config_hash, p.seed
        );
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            for (i, cell) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                cell.render(&mut out);
            }
            out.push('\n');
        }
        out
    }
}

pub fn emit_table(table: &ResultTable, path: &Path) -> io::Result<()> {
    std::fs::write(path, table.render())
}

/// Parses a rendered table back. Integer-looking fields become `Int`.
pub fn parse_table(text: &str) -> Option<(Vec<String>, Vec<Vec<Cell>>)> {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let columns: Vec<String> = lines.next()?.split(',').map(str::to_string).collect();
    let mut rows = Vec::new();
    for line in lines {
        let row = line
            .split(',')
            .map(|f| {
                if f.is_empty() {
                    Some(Cell::Missing)
                } else if let Ok(i) = f.parse::<i64>() {
                    Some(Cell::Int(i))
                } else {
                    f.parse::<f64>().ok().map(Cell::Real)
                }
            })
            .collect::<Option<Vec<_>>>()?;
        rows.push(row);
    }
    Some((columns, rows))
}
