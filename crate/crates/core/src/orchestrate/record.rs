//! Per-scenario result records (`scn_<id>.csv`) and the merged table.

use std::collections::BTreeSet;
use std::path::{Path as FsPath, PathBuf};

use super::{atomic_write, OrchestrateError};
use crate::types::{total_effect, Method, Path, PathWeights, PowerResult, Scenario};

pub const RESULTS_FILE: &str = "results.csv";
pub const RESULT_HEADER: [&str; 16] = [
    "scenario_id",
    "a",
    "b",
    "c_prime",
    "n",
    "c_total",
    "B",
    "R",
    "alpha",
    "master_seed",
    "method",
    "path",
    "repeats_completed",
    "significant_count",
    "power",
    "degenerate_resamples",
];

/// One `(scenario, method, path)` line of a result record.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub scenario_id: u32,
    pub weights: PathWeights,
    pub n: usize,
    pub c_total: f64,
    pub resamples: usize,
    pub repeats: usize,
    pub alpha: f64,
    pub master_seed: u64,
    pub method: Method,
    pub path: Path,
    pub repeats_completed: u64,
    pub significant_count: u64,
    pub power: f64,
    pub degenerate_resamples: u64,
}

impl ResultRow {
    fn fields(&self) -> [String; 16] {
        [
            self.scenario_id.to_string(),
            self.weights.a.to_string(),
            self.weights.b.to_string(),
            self.weights.c_prime.to_string(),
            self.n.to_string(),
            self.c_total.to_string(),
            self.resamples.to_string(),
            self.repeats.to_string(),
            self.alpha.to_string(),
            self.master_seed.to_string(),
            self.method.to_string(),
            self.path.to_string(),
            self.repeats_completed.to_string(),
            self.significant_count.to_string(),
            self.power.to_string(),
            self.degenerate_resamples.to_string(),
        ]
    }

    fn parse(rec: &csv::StringRecord) -> Result<Self, String> {
        if rec.len() != RESULT_HEADER.len() {
            return Err(format!("expected {} fields, got {}", RESULT_HEADER.len(), rec.len()));
        }
        fn field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize) -> Result<T, String> {
            rec[i]
                .parse()
                .map_err(|_| format!("bad {} value {:?}", RESULT_HEADER[i], &rec[i]))
        }
        let weights = PathWeights::new(field(rec, 1)?, field(rec, 2)?, field(rec, 3)?)
            .map_err(|e| e.to_string())?;
        Ok(ResultRow {
            scenario_id: field(rec, 0)?,
            weights,
            n: field(rec, 4)?,
            c_total: field(rec, 5)?,
            resamples: field(rec, 6)?,
            repeats: field(rec, 7)?,
            alpha: field(rec, 8)?,
            master_seed: field(rec, 9)?,
            method: rec[10].parse().map_err(|e: crate::Error| e.to_string())?,
            path: rec[11].parse().map_err(|e: crate::Error| e.to_string())?,
            repeats_completed: field(rec, 12)?,
            significant_count: field(rec, 13)?,
            power: field(rec, 14)?,
            degenerate_resamples: field(rec, 15)?,
        })
    }

    fn same_scenario(&self, other: &ResultRow) -> bool {
        self.scenario_id == other.scenario_id
            && self.weights == other.weights
            && self.n == other.n
            && self.c_total == other.c_total
            && self.resamples == other.resamples
            && self.repeats == other.repeats
            && self.alpha == other.alpha
            && self.master_seed == other.master_seed
            && self.repeats_completed == other.repeats_completed
            && self.degenerate_resamples == other.degenerate_resamples
    }
}

pub fn record_path(dir: &FsPath, id: u32) -> PathBuf {
    dir.join(format!("scn_{id}.csv"))
}

/// Id encoded in a `scn_<id>.csv` file name.
pub fn record_id(file_name: &str) -> Option<u32> {
    let id = file_name.strip_prefix("scn_")?.strip_suffix(".csv")?;
    if id.is_empty() || !id.bytes().all(|b| b.is_ascii_digit()) || (id.len() > 1 && id.starts_with('0')) {
        return None;
    }
    id.parse().ok()
}

/// Rows for the requested methods, every path, in canonical order.
pub fn record_rows(s: &Scenario, res: &PowerResult, methods: &[Method]) -> Vec<ResultRow> {
    let mut rows = Vec::with_capacity(methods.len() * Path::ALL.len());
    for &method in methods {
        for path in Path::ALL {
            rows.push(ResultRow {
                scenario_id: s.id,
                weights: s.weights,
                n: s.n,
                c_total: total_effect(&s.weights),
                resamples: s.resamples,
                repeats: s.repeats,
                alpha: s.alpha,
                master_seed: s.master_seed,
                method,
                path,
                repeats_completed: res.repeats_completed,
                significant_count: res.significant_count(method, path),
                power: res.power(method, path),
                degenerate_resamples: res.degenerate_resample_count,
            });
        }
    }
    rows
}

pub fn rows_to_csv(rows: &[ResultRow]) -> Result<Vec<u8>, OrchestrateError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(RESULT_HEADER)?;
    for r in rows {
        w.write_record(r.fields())?;
    }
    w.into_inner().map_err(|e| OrchestrateError::Io(e.into_error()))
}

/// Parse a result table with the exact expected header.
pub fn parse_rows(bytes: &[u8]) -> Result<Vec<ResultRow>, String> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(bytes);
    let header = r.headers().map_err(|e| e.to_string())?;
    if header.iter().ne(RESULT_HEADER) {
        return Err(format!("unexpected header {header:?}"));
    }
    r.records()
        .map(|rec| ResultRow::parse(&rec.map_err(|e| e.to_string())?))
        .collect()
}

/// Structural checks on a single scenario's rows.
pub fn validate_record(id: u32, rows: &[ResultRow]) -> Result<(), String> {
    let first = rows.first().ok_or("record has no rows")?;
    if first.scenario_id != id {
        return Err(format!("record holds scenario {}, expected {id}", first.scenario_id));
    }
    if first.c_total != total_effect(&first.weights) {
        return Err("c_total disagrees with the weights".into());
    }
    if first.repeats_completed > first.repeats as u64 {
        return Err("more repeats completed than configured".into());
    }
    let mut seen = BTreeSet::new();
    for r in rows {
        if !r.same_scenario(first) {
            return Err("rows disagree on scenario parameters".into());
        }
        if r.significant_count > r.repeats_completed {
            return Err("significant count exceeds completed repeats".into());
        }
        let expected = if r.repeats_completed == 0 {
            0.0
        } else {
            r.significant_count as f64 / r.repeats_completed as f64
        };
        if r.power != expected {
            return Err(format!("power {} is not {}/{}", r.power, r.significant_count, r.repeats_completed));
        }
        if !seen.insert((r.method, r.path)) {
            return Err(format!("duplicate row for {} {}", r.method, r.path));
        }
    }
    let methods: BTreeSet<Method> = seen.iter().map(|(m, _)| *m).collect();
    if seen.len() != methods.len() * Path::ALL.len() {
        return Err("record does not cover every path for each method".into());
    }
    Ok(())
}

/// Methods present in a validated record, in canonical order.
pub fn record_methods(rows: &[ResultRow]) -> Vec<Method> {
    let set: BTreeSet<Method> = rows.iter().map(|r| r.method).collect();
    set.into_iter().collect()
}

/// Read `scn_<id>.csv`; `None` when absent or invalid.
pub fn read_record(dir: &FsPath, id: u32) -> Option<Vec<ResultRow>> {
    let bytes = std::fs::read(record_path(dir, id)).ok()?;
    let rows = parse_rows(&bytes).ok()?;
    validate_record(id, &rows).ok()?;
    Some(rows)
}

pub fn write_record(dir: &FsPath, rows: &[ResultRow]) -> Result<(), OrchestrateError> {
    let id = rows
        .first()
        .map(|r| r.scenario_id)
        .ok_or_else(|| OrchestrateError::ConfigInvalid("refusing to write an empty record".into()))?;
    atomic_write(&record_path(dir, id), &rows_to_csv(rows)?)
}

/// Ids of every `scn_<id>.csv` in `dir`, ascending.
pub fn record_ids(dir: &FsPath) -> Result<Vec<u32>, OrchestrateError> {
    let mut ids = Vec::new();
    if !dir.exists() {
        return Ok(ids);
    }
    for entry in std::fs::read_dir(dir)? {
        let entry = entry?;
        if let Some(id) = entry.file_name().to_str().and_then(record_id) {
            ids.push(id);
        }
    }
    ids.sort_unstable();
    Ok(ids)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergeSummary {
    pub records: usize,
    pub rows: usize,
    /// Ids whose record failed validation and was left out.
    pub skipped: Vec<u32>,
}

/// All valid records of `dir`, ascending by id.
pub fn collect_rows(dir: &FsPath) -> Result<(Vec<ResultRow>, MergeSummary), OrchestrateError> {
    let mut all = Vec::new();
    let mut summary = MergeSummary {
        records: 0,
        rows: 0,
        skipped: Vec::new(),
    };
    for id in record_ids(dir)? {
        match read_record(dir, id) {
            Some(rows) => {
                summary.records += 1;
                all.extend(rows);
            }
            None => summary.skipped.push(id),
        }
    }
    summary.rows = all.len();
    Ok((all, summary))
}

/// Concatenate every valid record under one header into `out`.
pub fn merge(dir: &FsPath, out: &FsPath) -> Result<MergeSummary, OrchestrateError> {
    let (rows, summary) = collect_rows(dir)?;
    atomic_write(out, &rows_to_csv(&rows)?)?;
    Ok(summary)
}

/// Result rows from either a merged table file or a directory of records.
pub fn load_results(path: &FsPath) -> Result<Vec<ResultRow>, OrchestrateError> {
    if path.is_dir() {
        return Ok(collect_rows(path)?.0);
    }
    let bytes = std::fs::read(path)?;
    parse_rows(&bytes).map_err(|e| OrchestrateError::InvalidResults(format!("{}: {e}", path.display())))
}
