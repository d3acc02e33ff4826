//! Domain types shared across the crate and the path algebra of the
//! single-mediator model `X -> M -> Y`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// True generative weights of one scenario.
///
/// `a` is the X→M weight, `b` the M→Y weight given X, and `c_prime` the
/// X→Y weight given M.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathWeights {
    pub a: f64,
    pub b: f64,
    pub c_prime: f64,
}

impl PathWeights {
    pub fn new(a: f64, b: f64, c_prime: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && c_prime.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "path weights must be finite, got ({a}, {b}, {c_prime})"
            )));
        }
        Ok(Self { a, b, c_prime })
    }

    pub fn indirect(&self) -> f64 {
        self.a * self.b
    }
}

/// Total effect of X on Y implied by the weights: `c = c' + a·b`.
pub fn total_effect(w: &PathWeights) -> f64 {
    w.c_prime + w.a * w.b
}

/// One cell of the grid together with its simulation controls.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub id: u32,
    pub weights: PathWeights,
    pub n: usize,
    /// Bootstrap resamples per repeat (B).
    pub resamples: usize,
    /// Simulated datasets per scenario (R).
    pub repeats: usize,
    pub alpha: f64,
    pub master_seed: u64,
}

impl Scenario {
    pub const MIN_N: usize = 4;

    pub fn validate(&self) -> Result<()> {
        PathWeights::new(self.weights.a, self.weights.b, self.weights.c_prime)?;
        if self.n < Self::MIN_N {
            return Err(Error::InvalidInput(format!(
                "sample size {} below minimum {}",
                self.n,
                Self::MIN_N
            )));
        }
        if self.resamples == 0 || self.repeats == 0 {
            return Err(Error::InvalidInput(
                "resamples and repeats must be at least 1".into(),
            ));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidInput(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        Ok(())
    }
}

/// Three row-paired vectors. Row `i` is one simulated participant.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    x: Vec<f64>,
    m: Vec<f64>,
    y: Vec<f64>,
}

impl Dataset {
    pub fn new(x: Vec<f64>, m: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != m.len() || x.len() != y.len() {
            return Err(Error::InvalidInput(format!(
                "column lengths differ: x={}, m={}, y={}",
                x.len(),
                m.len(),
                y.len()
            )));
        }
        if x.iter().chain(&m).chain(&y).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("dataset contains non-finite values".into()));
        }
        Ok(Self { x, m, y })
    }

    pub(crate) fn from_parts_unchecked(x: Vec<f64>, m: Vec<f64>, y: Vec<f64>) -> Self {
        debug_assert!(x.len() == m.len() && x.len() == y.len());
        Self { x, m, y }
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn m(&self) -> &[f64] {
        &self.m
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn row(&self, i: usize) -> (f64, f64, f64) {
        (self.x[i], self.m[i], self.y[i])
    }

    /// Copy of the dataset with row `skip` removed.
    pub fn without_row(&self, skip: usize) -> Dataset {
        let keep = |v: &[f64]| {
            v.iter()
                .enumerate()
                .filter(|&(i, _)| i != skip)
                .map(|(_, &x)| x)
                .collect::<Vec<_>>()
        };
        Dataset::from_parts_unchecked(keep(&self.x), keep(&self.m), keep(&self.y))
    }
}

/// Fitted path coefficients for one dataset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathEstimates {
    pub a_hat: f64,
    pub b_hat: f64,
    pub c_hat: f64,
    pub c_prime_hat: f64,
    pub ab_hat: f64,
}

impl PathEstimates {
    pub fn get(&self, path: Path) -> f64 {
        match path {
            Path::A => self.a_hat,
            Path::B => self.b_hat,
            Path::C => self.c_hat,
            Path::CPrime => self.c_prime_hat,
            Path::Ab => self.ab_hat,
        }
    }
}

/// Confidence-interval construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Percentile,
    BiasCorrected,
    BiasCorrectedAccelerated,
}

impl Method {
    pub const ALL: [Method; 3] = [
        Method::Percentile,
        Method::BiasCorrected,
        Method::BiasCorrectedAccelerated,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Percentile => "PER",
            Method::BiasCorrected => "BC",
            Method::BiasCorrectedAccelerated => "BCA",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "PER" => Ok(Method::Percentile),
            "BC" => Ok(Method::BiasCorrected),
            "BCA" => Ok(Method::BiasCorrectedAccelerated),
            other => Err(Error::InvalidInput(format!("unknown CI method {other:?}"))),
        }
    }
}

/// Regression path whose significance is tested.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Path {
    A,
    B,
    C,
    CPrime,
    Ab,
}

impl Path {
    pub const ALL: [Path; 5] = [Path::A, Path::B, Path::C, Path::CPrime, Path::Ab];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Path::A => "a",
            Path::B => "b",
            Path::C => "c",
            Path::CPrime => "c_prime",
            Path::Ab => "ab",
        }
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Path {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "a" => Ok(Path::A),
            "b" => Ok(Path::B),
            "c" => Ok(Path::C),
            "c_prime" => Ok(Path::CPrime),
            "ab" => Ok(Path::Ab),
            other => Err(Error::InvalidInput(format!("unknown path {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfidenceInterval {
    pub lower: f64,
    pub upper: f64,
    pub method: Method,
    pub alpha: f64,
}

/// An endpoint sitting exactly on zero counts as overlapping it.
pub fn ci_excludes_zero(ci: &ConfidenceInterval) -> bool {
    ci.lower > 0.0 || ci.upper < 0.0
}

/// Significance counts for every method × path of one scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerResult {
    pub scenario_id: u32,
    /// `significant[method][path]`
    pub significant: [[u64; 5]; 3],
    pub repeats_completed: u64,
    pub failed_repeats: u64,
    pub degenerate_resample_count: u64,
}

impl PowerResult {
    pub fn empty(scenario_id: u32) -> Self {
        Self {
            scenario_id,
            significant: [[0; 5]; 3],
            repeats_completed: 0,
            failed_repeats: 0,
            degenerate_resample_count: 0,
        }
    }

    pub fn significant_count(&self, method: Method, path: Path) -> u64 {
        self.significant[method.index()][path.index()]
    }

    pub fn power(&self, method: Method, path: Path) -> f64 {
        if self.repeats_completed == 0 {
            return 0.0;
        }
        self.significant_count(method, path) as f64 / self.repeats_completed as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w(a: f64, b: f64, c_prime: f64) -> PathWeights {
        PathWeights::new(a, b, c_prime).unwrap()
    }

    fn ci(lower: f64, upper: f64) -> ConfidenceInterval {
        ConfidenceInterval {
            lower,
            upper,
            method: Method::Percentile,
            alpha: 0.05,
        }
    }

    #[test]
    fn total_effect_examples() {
        assert!((total_effect(&w(0.3, 0.3, 0.1)) - 0.19).abs() < 1e-15);
        assert_eq!(total_effect(&w(0.0, 0.0, 0.0)), 0.0);
        assert!((total_effect(&w(0.5, -0.3, 0.2)) - 0.05).abs() < 1e-15);
    }

    #[test]
    fn excludes_zero_examples() {
        assert!(ci_excludes_zero(&ci(0.1, 0.5)));
        assert!(!ci_excludes_zero(&ci(-0.1, 0.2)));
        assert!(ci_excludes_zero(&ci(-0.5, -0.1)));
        assert!(!ci_excludes_zero(&ci(0.0, 0.4)));
        assert!(!ci_excludes_zero(&ci(-0.4, 0.0)));
    }

    #[test]
    fn rejects_non_finite_weights() {
        assert!(PathWeights::new(f64::NAN, 0.0, 0.0).is_err());
        assert!(PathWeights::new(0.0, f64::INFINITY, 0.0).is_err());
    }

    #[test]
    fn dataset_checks_lengths() {
        assert!(Dataset::new(vec![1.0; 3], vec![1.0; 3], vec![1.0; 2]).is_err());
        assert!(Dataset::new(vec![1.0], vec![f64::NAN], vec![1.0]).is_err());
        let d = Dataset::new(vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0], vec![7.0, 8.0, 9.0]).unwrap();
        assert_eq!(d.without_row(1).x(), &[1.0, 3.0]);
        assert_eq!(d.without_row(1).y(), &[7.0, 9.0]);
    }

    #[test]
    fn scenario_validation() {
        let mut s = Scenario {
            id: 0,
            weights: w(0.1, 0.2, 0.3),
            n: 4,
            resamples: 1,
            repeats: 1,
            alpha: 0.05,
            master_seed: 0,
        };
        assert!(s.validate().is_ok());
        s.n = 3;
        assert!(s.validate().is_err());
        s.n = 10;
        s.alpha = 1.0;
        assert!(s.validate().is_err());
        s.alpha = 0.05;
        s.repeats = 0;
        assert!(s.validate().is_err());
    }

    #[test]
    fn labels_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.as_str().parse::<Method>().unwrap(), m);
        }
        for p in Path::ALL {
            assert_eq!(p.as_str().parse::<Path>().unwrap(), p);
        }
    }

    proptest! {
        #[test]
        fn total_effect_symmetric_in_a_b(a in -10.0f64..10.0, b in -10.0f64..10.0, c in -10.0f64..10.0) {
            prop_assert_eq!(total_effect(&w(a, b, c)), total_effect(&w(b, a, c)));
        }

        #[test]
        fn interval_touching_zero_is_not_significant(u in 0.0f64..1e6) {
            prop_assert!(!ci_excludes_zero(&ci(0.0, u)));
        }
    }
}
