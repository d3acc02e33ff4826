use std::fmt;
use std::path::Path as FsPath;

use super::config::GridConfig;
use super::{atomic_write, OrchestrateError};
use crate::types::{Method, PathWeights, Scenario};

pub const MANIFEST_FILE: &str = "manifest.csv";
pub const MANIFEST_HEADER: [&str; 6] = ["scenario_id", "a", "b", "c_prime", "n", "status"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pending,
    Done,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pending => "pending",
            Status::Done => "done",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ManifestRow {
    pub scenario_id: u32,
    pub weights: PathWeights,
    pub n: usize,
    pub status: Status,
}

/// Simulation controls shared by every scenario in a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Controls {
    pub resamples: usize,
    pub repeats: usize,
    pub alpha: f64,
    pub master_seed: u64,
    pub methods: Vec<Method>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Manifest {
    pub controls: Controls,
    pub rows: Vec<ManifestRow>,
}

impl Manifest {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn row(&self, id: u32) -> Option<&ManifestRow> {
        self.rows.get(id as usize)
    }

    pub fn scenario(&self, id: u32) -> Option<Scenario> {
        self.row(id).map(|r| Scenario {
            id: r.scenario_id,
            weights: r.weights,
            n: r.n,
            resamples: self.controls.resamples,
            repeats: self.controls.repeats,
            alpha: self.controls.alpha,
            master_seed: self.controls.master_seed,
        })
    }

    pub fn pending(&self) -> Vec<u32> {
        self.rows
            .iter()
            .filter(|r| r.status == Status::Pending)
            .map(|r| r.scenario_id)
            .collect()
    }

    pub fn mark(&mut self, id: u32, status: Status) {
        if let Some(r) = self.rows.get_mut(id as usize) {
            r.status = status;
        }
    }

    pub fn to_csv(&self) -> Result<Vec<u8>, OrchestrateError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(MANIFEST_HEADER)?;
        for r in &self.rows {
            w.write_record([
                r.scenario_id.to_string(),
                r.weights.a.to_string(),
                r.weights.b.to_string(),
                r.weights.c_prime.to_string(),
                r.n.to_string(),
                r.status.to_string(),
            ])?;
        }
        w.into_inner().map_err(|e| OrchestrateError::Io(e.into_error()))
    }

    pub fn write(&self, dir: &FsPath) -> Result<(), OrchestrateError> {
        atomic_write(&dir.join(MANIFEST_FILE), &self.to_csv()?)
    }
}

/// Cartesian product of the four ranges, `n` outermost, then `a`, `b`, `c′`.
pub fn build_grid(cfg: &GridConfig) -> Result<Manifest, OrchestrateError> {
    let count = cfg.scenario_count();
    if count > u32::MAX as usize {
        return Err(OrchestrateError::ConfigInvalid(format!("grid too large: {count} scenarios")));
    }
    let (a, b, c) = (cfg.a.values(), cfg.b.values(), cfg.c_prime.values());
    let mut rows = Vec::with_capacity(count);
    for &n in &cfg.n.values() {
        for &a in &a {
            for &b in &b {
                for &c_prime in &c {
                    rows.push(ManifestRow {
                        scenario_id: rows.len() as u32,
                        weights: PathWeights { a, b, c_prime },
                        n,
                        status: Status::Pending,
                    });
                }
            }
        }
    }
    Ok(Manifest {
        controls: Controls {
            resamples: cfg.resamples,
            repeats: cfg.repeats,
            alpha: cfg.alpha,
            master_seed: cfg.master_seed,
            methods: cfg.methods.clone(),
        },
        rows,
    })
}
