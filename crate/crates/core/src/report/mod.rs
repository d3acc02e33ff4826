//! Figure tables, n80 summaries and SVG line charts from merged results.

mod svg;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::path::{Path as FsPath, PathBuf};

pub use svg::render_chart;

use crate::orchestrate::{atomic_write, OrchestrateError, ResultRow};
use crate::types::{Method, Path, PathWeights};

pub const FIGURES: [u8; 6] = [2, 3, 4, 5, 6, 7];
pub const TABLE_HEADER: &str = "figure,panel,series,n,power";
pub const TARGET_POWER: f64 = 0.8;

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("results lack {} required entries: {}", .0.len(), .0.join("; "))]
    MissingScenarios(Vec<String>),
    #[error("unknown figure {0}; expected one of 2..=7")]
    UnknownFigure(u8),
    #[error("nothing to plot")]
    EmptyData,
    #[error("results hold two rows for {0}")]
    Duplicate(String),
    #[error(transparent)]
    Io(#[from] OrchestrateError),
}

/// Power against `n` for one fixed `(weights, method, path)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerCurve {
    pub weights: PathWeights,
    pub method: Method,
    pub path: Path,
    /// Ascending in `n`.
    pub points: Vec<(usize, f64)>,
}

/// Smallest grid `n` whose power reaches 0.8.
pub fn n80(curve: &PowerCurve) -> Option<usize> {
    curve.points.iter().find(|(_, p)| *p >= TARGET_POWER).map(|(n, _)| *n)
}

type Key = (u64, u64, u64, usize, Method, Path);

fn key(w: &PathWeights, n: usize, method: Method, path: Path) -> Key {
    // +0.0 keeps -0.0 and 0.0 on the same key.
    let bits = |v: f64| (v + 0.0).to_bits();
    (bits(w.a), bits(w.b), bits(w.c_prime), n, method, path)
}

fn describe(w: &PathWeights, n: usize, method: Method, path: Path) -> String {
    format!("a={} b={} c_prime={} n={n} {method} {path}", w.a, w.b, w.c_prime)
}

/// Lookup of power by scenario parameters.
#[derive(Debug, Clone)]
pub struct ResultIndex {
    power: HashMap<Key, f64>,
    sizes: Vec<usize>,
}

impl ResultIndex {
    pub fn new(rows: &[ResultRow]) -> Result<Self, ReportError> {
        let mut power = HashMap::with_capacity(rows.len());
        let mut sizes = BTreeSet::new();
        for r in rows {
            if power.insert(key(&r.weights, r.n, r.method, r.path), r.power).is_some() {
                return Err(ReportError::Duplicate(describe(&r.weights, r.n, r.method, r.path)));
            }
            sizes.insert(r.n);
        }
        Ok(ResultIndex {
            power,
            sizes: sizes.into_iter().collect(),
        })
    }

    /// Distinct sample sizes present, ascending.
    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn power(&self, w: &PathWeights, n: usize, method: Method, path: Path) -> Option<f64> {
        self.power.get(&key(w, n, method, path)).copied()
    }

    /// Curve over every `n` at which the combination is present.
    pub fn curve(&self, w: &PathWeights, method: Method, path: Path) -> PowerCurve {
        let points = self
            .sizes
            .iter()
            .filter_map(|&n| self.power(w, n, method, path).map(|p| (n, p)))
            .collect();
        PowerCurve {
            weights: *w,
            method,
            path,
            points,
        }
    }

    fn contains_weights(&self, w: &PathWeights) -> bool {
        self.sizes.iter().any(|&n| self.power(w, n, Method::BiasCorrected, Path::Ab).is_some())
    }
}

/// One line of a tidy figure table. For figure 7 `n` holds the value of `a`.
#[derive(Debug, Clone, PartialEq)]
pub struct FigureRow {
    pub figure: u8,
    pub panel: String,
    pub series: String,
    pub n: f64,
    pub power: f64,
}

fn w(a: f64, b: f64, c_prime: f64) -> PathWeights {
    PathWeights { a, b, c_prime }
}

/// Grid values `lo..=hi` in tenths, exact as decimal literals.
fn tenths(lo: i32, hi: i32) -> Vec<f64> {
    (lo..=hi).map(|k| format!("{}", f64::from(k) / 10.0).parse().unwrap()).collect()
}

struct Builder<'a> {
    idx: &'a ResultIndex,
    figure: u8,
    rows: Vec<FigureRow>,
    missing: Vec<String>,
}

impl Builder<'_> {
    #[allow(clippy::too_many_arguments)]
    fn push(&mut self, panel: &str, series: &str, x: f64, wt: PathWeights, n: usize, m: Method, p: Path) {
        match self.idx.power(&wt, n, m, p) {
            Some(power) => self.rows.push(FigureRow {
                figure: self.figure,
                panel: panel.to_string(),
                series: series.to_string(),
                n: x,
                power,
            }),
            None => self.missing.push(describe(&wt, n, m, p)),
        }
    }

    fn curve(&mut self, panel: &str, series: &str, wt: PathWeights, m: Method, p: Path) {
        for n in self.idx.sizes().to_vec() {
            self.push(panel, series, n as f64, wt, n, m, p);
        }
    }
}

/// Long-format table for one figure.
pub fn figure_dataset(results: &[ResultRow], figure: u8) -> Result<Vec<FigureRow>, ReportError> {
    if !FIGURES.contains(&figure) {
        return Err(ReportError::UnknownFigure(figure));
    }
    if results.is_empty() {
        return Err(ReportError::EmptyData);
    }
    let idx = ResultIndex::new(results)?;
    let mut b = Builder {
        idx: &idx,
        figure,
        rows: Vec::new(),
        missing: Vec::new(),
    };
    let bc = Method::BiasCorrected;
    match figure {
        2 => {
            for a in tenths(1, 5).into_iter().rev() {
                for bv in tenths(0, 5) {
                    b.curve(&format!("a{a}"), &format!("b={bv}"), w(a, bv, 0.0), bc, Path::Ab);
                }
            }
        }
        3 => {
            for c in tenths(0, 5) {
                b.curve("a0.3_b0.3", &format!("c_prime={c}"), w(0.3, 0.3, c), bc, Path::Ab);
            }
        }
        4 => {
            for m in Method::ALL {
                b.curve("a0.3_b0.3_c_prime0", m.as_str(), w(0.3, 0.3, 0.0), m, Path::Ab);
            }
        }
        5 => {
            let values: BTreeSet<u64> = results
                .iter()
                .filter(|r| r.weights.c_prime == 0.0)
                .flat_map(|r| [r.weights.a.to_bits(), r.weights.b.to_bits()])
                .collect();
            let mut values: Vec<f64> = values.into_iter().map(f64::from_bits).collect();
            values.sort_by(f64::total_cmp);
            for (i, &lo) in values.iter().enumerate() {
                for &hi in &values[i + 1..] {
                    let (ab, ba) = (w(lo, hi, 0.0), w(hi, lo, 0.0));
                    if !(idx.contains_weights(&ab) && idx.contains_weights(&ba)) {
                        continue;
                    }
                    let panel = format!("pair{lo}_{hi}");
                    b.curve(&panel, &format!("a={lo},b={hi}"), ab, bc, Path::Ab);
                    b.curve(&panel, &format!("a={hi},b={lo}"), ba, bc, Path::Ab);
                }
            }
        }
        6 => {
            for (a, bv, c) in SUPPRESSION {
                let panel = format!("a{a}_b{bv}_c_prime{c}");
                for p in [Path::Ab, Path::C] {
                    b.curve(&panel, p.as_str(), w(a, bv, c), bc, p);
                }
            }
        }
        7 => {
            for a in tenths(-5, 5) {
                b.push("n100_b0.3_c_prime0.3", "c_prime", a, w(a, 0.3, 0.3), 100, bc, Path::CPrime);
            }
        }
        _ => unreachable!(),
    }
    if !b.missing.is_empty() {
        return Err(ReportError::MissingScenarios(b.missing));
    }
    if b.rows.is_empty() {
        return Err(ReportError::EmptyData);
    }
    Ok(b.rows)
}

/// Weight triples of the suppression figure.
pub const SUPPRESSION: [(f64, f64, f64); 3] = [(0.3, -0.3, 0.1), (-0.3, 0.3, 0.1), (0.3, 0.3, -0.1)];

pub fn table_to_csv(rows: &[FigureRow]) -> String {
    let mut out = String::from(TABLE_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(out, "{},{},{},{},{}", r.figure, r.panel, r.series, r.n, r.power);
    }
    out
}

/// Rows grouped by panel, in order of first appearance.
pub fn panels(rows: &[FigureRow]) -> Vec<(String, Vec<FigureRow>)> {
    let mut order: Vec<String> = Vec::new();
    let mut groups: BTreeMap<String, Vec<FigureRow>> = BTreeMap::new();
    for r in rows {
        if !groups.contains_key(&r.panel) {
            order.push(r.panel.clone());
        }
        groups.entry(r.panel.clone()).or_default().push(r.clone());
    }
    order
        .into_iter()
        .map(|p| {
            let rows = groups.remove(&p).unwrap_or_default();
            (p, rows)
        })
        .collect()
}

/// Write `fig<k>.csv` plus one `fig<k>_<panel>.svg` per panel into `out`.
pub fn write_figure(results: &[ResultRow], figure: u8, out: &FsPath) -> Result<Vec<PathBuf>, ReportError> {
    let rows = figure_dataset(results, figure)?;
    std::fs::create_dir_all(out).map_err(OrchestrateError::from)?;
    let mut written = Vec::new();
    let table = out.join(format!("fig{figure}.csv"));
    atomic_write(&table, table_to_csv(&rows).as_bytes())?;
    written.push(table);
    for (panel, rows) in panels(&rows) {
        let path = out.join(format!("fig{figure}_{panel}.svg"));
        atomic_write(&path, render_chart(&rows)?.as_bytes())?;
        written.push(path);
    }
    Ok(written)
}
