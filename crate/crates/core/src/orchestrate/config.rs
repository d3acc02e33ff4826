//! Grid configuration: a flat `key=value` text file.
//!
//! ```text
//! # weights: min, max, step
//! a_min=-0.5
//! a_max=0.5
//! a_step=0.1
//! ...
//! n_min=10
//! n_max=200
//! n_step=10
//! B=1000
//! R=1000
//! alpha=0.05
//! master_seed=1
//! methods=PER,BC,BCA
//! ```

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::path::Path as FsPath;
use std::str::FromStr;

use super::OrchestrateError;
use crate::types::Method;

/// A decimal literal held exactly as `units · 10^-scale`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Decimal {
    units: i64,
    scale: u32,
}

impl Decimal {
    fn rescale(self, scale: u32) -> i64 {
        self.units * 10i64.pow(scale - self.scale)
    }
}

impl FromStr for Decimal {
    type Err = OrchestrateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || OrchestrateError::ConfigInvalid(format!("not a decimal number: {s:?}"));
        let t = s.trim();
        let (neg, body) = match t.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, t.strip_prefix('+').unwrap_or(t)),
        };
        let (int, frac) = body.split_once('.').unwrap_or((body, ""));
        if (int.is_empty() && frac.is_empty())
            || !int.bytes().all(|b| b.is_ascii_digit())
            || !frac.bytes().all(|b| b.is_ascii_digit())
            || frac.len() > 9
        {
            return Err(bad());
        }
        let digits = format!("{int}{frac}");
        let units: i64 = if digits.is_empty() { 0 } else { digits.parse().map_err(|_| bad())? };
        Ok(Decimal {
            units: if neg { -units } else { units },
            scale: frac.len() as u32,
        })
    }
}

impl fmt::Display for Decimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.units < 0 { "-" } else { "" };
        let abs = self.units.unsigned_abs();
        if self.scale == 0 {
            return write!(f, "{sign}{abs}");
        }
        let p = 10u64.pow(self.scale);
        write!(f, "{sign}{}.{:0width$}", abs / p, abs % p, width = self.scale as usize)
    }
}

/// Inclusive decimal range `min, min+step, …` not exceeding `max`.
///
/// Values are materialized from integer multiples of the step and then
/// converted once, so every grid point is the double nearest its decimal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecimalRange {
    pub min: Decimal,
    pub max: Decimal,
    pub step: Decimal,
}

impl DecimalRange {
    pub fn new(min: Decimal, max: Decimal, step: Decimal) -> Result<Self, OrchestrateError> {
        let r = Self { min, max, step };
        let (lo, hi, st) = r.scaled();
        if st <= 0 {
            return Err(OrchestrateError::ConfigInvalid(format!("step must be positive, got {step}")));
        }
        if lo > hi {
            return Err(OrchestrateError::ConfigInvalid(format!("min {min} exceeds max {max}")));
        }
        Ok(r)
    }

    pub fn parse(min: &str, max: &str, step: &str) -> Result<Self, OrchestrateError> {
        Self::new(min.parse()?, max.parse()?, step.parse()?)
    }

    fn scale(&self) -> u32 {
        self.min.scale.max(self.max.scale).max(self.step.scale)
    }

    fn scaled(&self) -> (i64, i64, i64) {
        let s = self.scale();
        (self.min.rescale(s), self.max.rescale(s), self.step.rescale(s))
    }

    pub fn len(&self) -> usize {
        let (lo, hi, st) = self.scaled();
        ((hi - lo) / st) as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn decimals(&self) -> Vec<Decimal> {
        let (lo, _, st) = self.scaled();
        let scale = self.scale();
        (0..self.len() as i64)
            .map(|k| Decimal {
                units: lo + k * st,
                scale,
            })
            .collect()
    }

    pub fn values(&self) -> Vec<f64> {
        self.decimals()
            .iter()
            .map(|d| d.to_string().parse().expect("decimal text parses as f64"))
            .collect()
    }
}

/// Inclusive integer range for sample sizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SizeRange {
    pub min: usize,
    pub max: usize,
    pub step: usize,
}

impl SizeRange {
    pub fn new(min: usize, max: usize, step: usize) -> Result<Self, OrchestrateError> {
        if step == 0 {
            return Err(OrchestrateError::ConfigInvalid("n_step must be positive".into()));
        }
        if min > max {
            return Err(OrchestrateError::ConfigInvalid(format!("n_min {min} exceeds n_max {max}")));
        }
        if min < crate::Scenario::MIN_N {
            return Err(OrchestrateError::ConfigInvalid(format!(
                "n_min must be at least {}",
                crate::Scenario::MIN_N
            )));
        }
        Ok(Self { min, max, step })
    }

    pub fn values(&self) -> Vec<usize> {
        (self.min..=self.max).step_by(self.step).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridConfig {
    pub a: DecimalRange,
    pub b: DecimalRange,
    pub c_prime: DecimalRange,
    pub n: SizeRange,
    pub resamples: usize,
    pub repeats: usize,
    pub alpha: f64,
    pub master_seed: u64,
    /// Methods written to result records, in canonical order.
    pub methods: Vec<Method>,
}

pub const DEFAULT_RESAMPLES: usize = 1000;
pub const DEFAULT_REPEATS: usize = 1000;
pub const DEFAULT_ALPHA: f64 = 0.05;

impl GridConfig {
    /// Full default grid: n 10..200 by 10, every weight −0.5..0.5 by 0.1.
    pub fn full_grid(master_seed: u64) -> Self {
        let w = DecimalRange::parse("-0.5", "0.5", "0.1").expect("static range");
        Self {
            a: w,
            b: w,
            c_prime: w,
            n: SizeRange::new(10, 200, 10).expect("static range"),
            resamples: DEFAULT_RESAMPLES,
            repeats: DEFAULT_REPEATS,
            alpha: DEFAULT_ALPHA,
            master_seed,
            methods: Method::ALL.to_vec(),
        }
    }

    pub fn scenario_count(&self) -> usize {
        self.n.values().len() * self.a.len() * self.b.len() * self.c_prime.len()
    }

    pub fn load(path: &FsPath) -> Result<Self, OrchestrateError> {
        let text = std::fs::read_to_string(path)?;
        text.parse()
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (name, r) in [("a", &self.a), ("b", &self.b), ("c_prime", &self.c_prime)] {
            let _ = writeln!(s, "{name}_min={}\n{name}_max={}\n{name}_step={}", r.min, r.max, r.step);
        }
        let _ = writeln!(s, "n_min={}\nn_max={}\nn_step={}", self.n.min, self.n.max, self.n.step);
        let _ = writeln!(s, "B={}\nR={}\nalpha={}\nmaster_seed={}", self.resamples, self.repeats, self.alpha, self.master_seed);
        let methods: Vec<&str> = self.methods.iter().map(|m| m.as_str()).collect();
        let _ = writeln!(s, "methods={}", methods.join(","));
        s
    }
}

const KNOWN_KEYS: [&str; 17] = [
    "a_min", "a_max", "a_step", "b_min", "b_max", "b_step", "c_prime_min", "c_prime_max",
    "c_prime_step", "n_min", "n_max", "n_step", "B", "R", "alpha", "master_seed", "methods",
];

impl FromStr for GridConfig {
    type Err = OrchestrateError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let invalid = |msg: String| OrchestrateError::ConfigInvalid(msg);
        let mut kv = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| invalid(format!("line {}: expected key=value", lineno + 1)))?;
            let k = k.trim();
            if !KNOWN_KEYS.contains(&k) {
                return Err(invalid(format!("line {}: unknown key {k:?}", lineno + 1)));
            }
            if kv.insert(k.to_string(), v.trim().to_string()).is_some() {
                return Err(invalid(format!("duplicate key {k:?}")));
            }
        }
        let get = |k: &str| kv.get(k).map(String::as_str).ok_or_else(|| invalid(format!("missing key {k:?}")));
        let num = |k: &str, default: Option<&str>| -> Result<String, OrchestrateError> {
            match (kv.get(k), default) {
                (Some(v), _) => Ok(v.clone()),
                (None, Some(d)) => Ok(d.to_string()),
                (None, None) => Err(invalid(format!("missing key {k:?}"))),
            }
        };
        let range = |p: &str| {
            DecimalRange::parse(get(&format!("{p}_min"))?, get(&format!("{p}_max"))?, get(&format!("{p}_step"))?)
        };
        let int = |k: &str, v: String| {
            v.parse::<usize>().map_err(|_| invalid(format!("{k} must be a non-negative integer, got {v:?}")))
        };
        let n = SizeRange::new(
            int("n_min", get("n_min")?.to_string())?,
            int("n_max", get("n_max")?.to_string())?,
            int("n_step", get("n_step")?.to_string())?,
        )?;
        let resamples = int("B", num("B", Some("1000"))?)?;
        let repeats = int("R", num("R", Some("1000"))?)?;
        if resamples == 0 || repeats == 0 {
            return Err(invalid("B and R must be at least 1".into()));
        }
        let alpha_text = num("alpha", Some("0.05"))?;
        let alpha: f64 = alpha_text
            .parse()
            .map_err(|_| invalid(format!("alpha is not a number: {alpha_text:?}")))?;
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(invalid(format!("alpha must lie in (0, 1), got {alpha}")));
        }
        let seed_text = num("master_seed", Some("0"))?;
        let master_seed = seed_text
            .parse::<u64>()
            .map_err(|_| invalid(format!("master_seed must be an unsigned integer, got {seed_text:?}")))?;
        let mut methods = match kv.get("methods") {
            Some(list) => list
                .split(',')
                .map(|m| m.parse::<Method>().map_err(|e| invalid(e.to_string())))
                .collect::<Result<Vec<_>, _>>()?,
            None => Method::ALL.to_vec(),
        };
        methods.sort();
        methods.dedup();
        if methods.is_empty() {
            return Err(invalid("methods must name at least one of PER, BC, BCA".into()));
        }
        Ok(GridConfig {
            a: range("a")?,
            b: range("b")?,
            c_prime: range("c_prime")?,
            n,
            resamples,
            repeats,
            alpha,
            master_seed,
            methods,
        })
    }
}
