//! Grid construction, the on-disk manifest, and resumable sharded execution.
//!
//! A results directory holds `manifest.csv`, a copy of the grid config and
//! one `scn_<id>.csv` record per finished scenario. Records are the source of
//! truth: the manifest is rebuilt from them by [`scan_results`], so any run
//! can be killed at any point and picked up again with [`resume`].

pub mod config;
pub mod manifest;
pub mod record;

use std::fmt;
use std::io::Write;
use std::path::{Path as FsPath, PathBuf};
use std::str::FromStr;
use std::sync::mpsc;
use std::time::{Duration, Instant};

use rayon::prelude::*;

pub use config::{Decimal, DecimalRange, GridConfig, SizeRange};
pub use manifest::{build_grid, Controls, Manifest, ManifestRow, Status, MANIFEST_FILE};
pub use record::{
    load_results, merge, read_record, record_path, MergeSummary, ResultRow, RESULTS_FILE,
};

use crate::power::run_scenario;

/// Name of the config copy stored next to the manifest.
pub const CONFIG_FILE: &str = "grid.conf";

/// Minimum spacing between manifest rewrites during a run.
const MANIFEST_INTERVAL: Duration = Duration::from_secs(1);

#[derive(Debug, thiserror::Error)]
pub enum OrchestrateError {
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
    #[error("results do not match the configuration: {0}")]
    ConfigMismatch(String),
    #[error("invalid results table: {0}")]
    InvalidResults(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Sim(#[from] crate::Error),
}

/// Write `bytes` to a sibling temp file, then rename over `path`.
pub fn atomic_write(path: &FsPath, bytes: &[u8]) -> Result<(), OrchestrateError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(FsPath::new("."));
    let name = path
        .file_name()
        .and_then(|n| n.to_str())
        .ok_or_else(|| OrchestrateError::ConfigInvalid(format!("bad output path {}", path.display())))?;
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Residue class `index` of `count` over scenario ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Shard {
    pub index: u32,
    pub count: u32,
}

impl Shard {
    pub const ALL: Shard = Shard { index: 0, count: 1 };

    pub fn new(index: u32, count: u32) -> Result<Self, OrchestrateError> {
        if count == 0 || index >= count {
            return Err(OrchestrateError::ConfigInvalid(format!(
                "shard must satisfy 0 <= k < K, got {index}/{count}"
            )));
        }
        Ok(Shard { index, count })
    }

    pub fn contains(&self, id: u32) -> bool {
        id % self.count == self.index
    }
}

impl FromStr for Shard {
    type Err = OrchestrateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || OrchestrateError::ConfigInvalid(format!("shard must look like k/K, got {s:?}"));
        let (k, n) = s.split_once('/').ok_or_else(bad)?;
        Shard::new(k.trim().parse().map_err(|_| bad())?, n.trim().parse().map_err(|_| bad())?)
    }
}

impl fmt::Display for Shard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.index, self.count)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExecOptions {
    pub shard: Shard,
    pub workers: usize,
    /// Maximum number of scenarios started by this invocation.
    pub cap: Option<usize>,
}

impl Default for ExecOptions {
    fn default() -> Self {
        ExecOptions {
            shard: Shard::ALL,
            workers: 1,
            cap: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ExecuteSummary {
    pub completed: Vec<u32>,
    pub failed: Vec<(u32, String)>,
    /// Pending ids in the shard that this invocation did not attempt.
    pub remaining: usize,
}

impl ExecuteSummary {
    /// True when every scenario targeted by the shard is done.
    pub fn all_done(&self) -> bool {
        self.failed.is_empty() && self.remaining == 0
    }
}

/// Build the manifest for `cfg` and write it, with the config, into `dir`.
pub fn plan(cfg: &GridConfig, dir: &FsPath) -> Result<Manifest, OrchestrateError> {
    std::fs::create_dir_all(dir)?;
    check_config_copy(cfg, dir)?;
    let mut manifest = build_grid(cfg)?;
    scan_results(dir, &mut manifest)?;
    atomic_write(&dir.join(CONFIG_FILE), cfg.to_text().as_bytes())?;
    manifest.write(dir)?;
    Ok(manifest)
}

fn check_config_copy(cfg: &GridConfig, dir: &FsPath) -> Result<(), OrchestrateError> {
    let path = dir.join(CONFIG_FILE);
    match std::fs::read_to_string(&path) {
        Ok(text) => {
            let stored: GridConfig = text.parse()?;
            if stored != *cfg {
                return Err(OrchestrateError::ConfigMismatch(format!(
                    "{} was planned with a different config",
                    dir.display()
                )));
            }
            Ok(())
        }
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(()),
        Err(e) => Err(e.into()),
    }
}

/// Mark scenarios with a valid record as done, the rest as pending.
///
/// Returns the pending ids. Invalid records count as missing; valid records
/// that disagree with the manifest are an error.
pub fn scan_results(dir: &FsPath, manifest: &mut Manifest) -> Result<Vec<u32>, OrchestrateError> {
    for row in &mut manifest.rows {
        row.status = Status::Pending;
    }
    for id in record::record_ids(dir)? {
        let Some(rows) = read_record(dir, id) else {
            continue;
        };
        check_record(manifest, id, &rows)?;
        manifest.mark(id, Status::Done);
    }
    Ok(manifest.pending())
}

fn check_record(manifest: &Manifest, id: u32, rows: &[ResultRow]) -> Result<(), OrchestrateError> {
    let mismatch = |what: &str| {
        OrchestrateError::ConfigMismatch(format!("scenario {id}: {what} differs from the manifest"))
    };
    let expected = manifest
        .row(id)
        .ok_or_else(|| OrchestrateError::ConfigMismatch(format!("record for unknown scenario {id}")))?;
    let got = &rows[0];
    let c = &manifest.controls;
    if got.weights != expected.weights {
        return Err(mismatch("path weights"));
    }
    if got.n != expected.n {
        return Err(mismatch("sample size"));
    }
    if got.resamples != c.resamples || got.repeats != c.repeats {
        return Err(mismatch("B or R"));
    }
    if got.alpha != c.alpha {
        return Err(mismatch("alpha"));
    }
    if got.master_seed != c.master_seed {
        return Err(mismatch("master seed"));
    }
    if record::record_methods(rows) != c.methods {
        return Err(mismatch("method set"));
    }
    Ok(())
}

/// Run pending scenarios of one shard, lowest ids first.
///
/// Each finished scenario writes its record atomically before its manifest
/// flag flips. A failing scenario is reported and stays pending.
pub fn execute(
    dir: &FsPath,
    manifest: &mut Manifest,
    opts: ExecOptions,
) -> Result<ExecuteSummary, OrchestrateError> {
    if opts.workers == 0 {
        return Err(OrchestrateError::ConfigInvalid("workers must be at least 1".into()));
    }
    std::fs::create_dir_all(dir)?;
    let targeted: Vec<u32> = manifest.pending().into_iter().filter(|&id| opts.shard.contains(id)).collect();
    let take = opts.cap.unwrap_or(usize::MAX).min(targeted.len());
    let (batch, rest) = targeted.split_at(take);
    let jobs = batch
        .iter()
        .map(|&id| manifest.scenario(id).map(|s| (id, s)))
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| OrchestrateError::ConfigInvalid("pending id outside the manifest".into()))?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers)
        .build()
        .map_err(|e| OrchestrateError::ConfigInvalid(format!("cannot start worker pool: {e}")))?;
    let methods = manifest.controls.methods.clone();
    let mut summary = ExecuteSummary {
        remaining: rest.len(),
        ..ExecuteSummary::default()
    };

    let (tx, rx) = mpsc::channel::<(u32, Result<(), OrchestrateError>)>();
    std::thread::scope(|scope| -> Result<(), OrchestrateError> {
        let methods = &methods;
        let jobs = &jobs;
        let pool = &pool;
        scope.spawn(move || {
            pool.install(|| {
                jobs.par_iter().with_max_len(1).for_each_with(tx, |tx, (id, s)| {
                    let outcome = run_scenario(s)
                        .map_err(OrchestrateError::from)
                        .and_then(|res| record::write_record(dir, &record::record_rows(s, &res, methods)));
                    let _ = tx.send((*id, outcome));
                });
            });
        });

        let mut last_write = Instant::now();
        for (id, outcome) in rx {
            match outcome {
                Ok(()) => {
                    manifest.mark(id, Status::Done);
                    summary.completed.push(id);
                }
                Err(e) => summary.failed.push((id, e.to_string())),
            }
            if last_write.elapsed() >= MANIFEST_INTERVAL {
                manifest.write(dir)?;
                last_write = Instant::now();
            }
        }
        Ok(())
    })?;
    manifest.write(dir)?;
    summary.completed.sort_unstable();
    summary.failed.sort_unstable_by_key(|(id, _)| *id);
    Ok(summary)
}

/// Scan `dir`, then execute whatever is still pending.
pub fn resume(
    dir: &FsPath,
    manifest: &mut Manifest,
    opts: ExecOptions,
) -> Result<ExecuteSummary, OrchestrateError> {
    scan_results(dir, manifest)?;
    execute(dir, manifest, opts)
}

/// Plan (or re-open) `dir` for `cfg` and run the shard to the cap.
pub fn run(cfg: &GridConfig, dir: &FsPath, opts: ExecOptions) -> Result<ExecuteSummary, OrchestrateError> {
    let mut manifest = plan(cfg, dir)?;
    execute(dir, &mut manifest, opts)
}

/// Default location of the merged table inside a results directory.
pub fn results_file(dir: &FsPath) -> PathBuf {
    dir.join(RESULTS_FILE)
}
