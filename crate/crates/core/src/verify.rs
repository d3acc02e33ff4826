//! Self-check suite: fast kernels against the reference implementations in
//! [`crate::oracle`], plus exact identities between the interval methods.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::bootstrap::{ci_bc, ci_bc_with_bias, ci_bca, ci_percentile, jackknife_estimates};
use crate::normal::normal_quantile;
use crate::oracle::{jackknife_by_refit, ols_normal_equations, paths_by_normal_equations, percentile_by_ranks};
use crate::regress::{estimate_paths, fit_bivariate, fit_simple};
use crate::simulate::{generate_dataset_with, stream_rng};
use crate::types::{ConfidenceInterval, Path, PathWeights};

pub const FIT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl std::fmt::Display for Check {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag} {}: {}", self.name, self.detail)
    }
}

fn random_weights<R: Rng>(rng: &mut R) -> PathWeights {
    let mut w = || rng.random_range(-5..=5) as f64 / 10.0;
    PathWeights::new(w(), w(), w()).expect("finite")
}

/// Fits and path decomposition on `count` model datasets with `n ∈ [4, 30]`.
pub fn fit_equivalence(seed: u64, count: usize) -> Check {
    let mut rng = stream_rng(seed);
    let (mut worst_fit, mut worst_identity, mut skipped) = (0.0f64, 0.0f64, 0usize);
    for _ in 0..count {
        let w = random_weights(&mut rng);
        let n = rng.random_range(4..=30);
        let d = generate_dataset_with(&w, n, &mut rng);
        let (Some(simple), Some(both)) = (ols_normal_equations(&[d.x()], d.m()), ols_normal_equations(&[d.x(), d.m()], d.y())) else {
            skipped += 1;
            continue;
        };
        let (Ok(s), Ok(bv), Ok(p)) = (fit_simple(d.x(), d.m()), fit_bivariate(d.x(), d.m(), d.y()), estimate_paths(&d)) else {
            skipped += 1;
            continue;
        };
        let diffs = [
            s.intercept - simple[0],
            s.slope - simple[1],
            bv.intercept - both[0],
            bv.coef_x - both[1],
            bv.coef_m - both[2],
        ];
        if let Some(o) = paths_by_normal_equations(d.x(), d.m(), d.y()) {
            for path in Path::ALL {
                worst_fit = worst_fit.max((p.get(path) - o[path.index()]).abs());
            }
        }
        worst_fit = diffs.iter().fold(worst_fit, |acc, d| acc.max(d.abs()));
        worst_identity = worst_identity.max((p.c_hat - (p.c_prime_hat + p.a_hat * p.b_hat)).abs());
    }
    Check {
        name: "fit_equivalence",
        passed: worst_fit <= FIT_TOL && worst_identity <= FIT_TOL && skipped == 0,
        detail: format!(
            "{count} datasets, max |fit - oracle| = {worst_fit:.3e}, max |c - (c' + ab)| = {worst_identity:.3e}, singular = {skipped}"
        ),
    }
}

fn same(x: &ConfidenceInterval, y: &ConfidenceInterval) -> bool {
    x.lower.to_bits() == y.lower.to_bits() && x.upper.to_bits() == y.upper.to_bits()
}

/// BCa(accel = 0) ≡ BC and BC(z₀ = 0) ≡ percentile on `count` random vectors.
pub fn ci_nesting(seed: u64, count: usize) -> Check {
    let mut rng = stream_rng(seed);
    let alphas = [0.05, 0.1, 0.01];
    let mut failures = Vec::new();
    for k in 0..count {
        let b = rng.random_range(20..=2000);
        let centre = rng.random_range(-1.0..1.0);
        let spread = rng.random_range(0.01..2.0);
        let normal = Normal::new(centre, spread).expect("positive spread");
        // Every fifth vector is coarse so ties show up.
        let values: Vec<f64> = (0..b)
            .map(|_| {
                let v: f64 = normal.sample(&mut rng);
                if k % 5 == 0 { (v * 4.0).round() / 4.0 } else { v }
            })
            .collect();
        let point = values[rng.random_range(0..b)] + rng.random_range(-0.1..0.1);
        let alpha = alphas[k % alphas.len()];
        let bc = ci_bc(&values, point, alpha).expect("valid input");
        let bca = ci_bca(&values, point, 0.0, alpha).expect("valid input");
        let per = ci_percentile(&values, alpha).expect("valid input");
        let bc0 = ci_bc_with_bias(&values, 0.0, alpha).expect("valid input");
        let (lo, hi) = percentile_by_ranks(&values, alpha / 2.0, 1.0 - alpha / 2.0);
        if !same(&bc, &bca) {
            failures.push(format!("vector {k}: BCa(0) {bca:?} != BC {bc:?}"));
        }
        if !same(&bc0, &per) {
            failures.push(format!("vector {k}: BC(z0=0) {bc0:?} != percentile {per:?}"));
        }
        if per.lower != lo || per.upper != hi {
            failures.push(format!("vector {k}: percentile ({}, {}) != ranks ({lo}, {hi})", per.lower, per.upper));
        }
    }
    Check {
        name: "ci_nesting",
        passed: failures.is_empty(),
        detail: if failures.is_empty() {
            format!("{count} vectors, all endpoints identical")
        } else {
            failures.join("; ")
        },
    }
}

/// Downdated leave-one-out estimates against brute-force refits.
pub fn jackknife_equivalence(seed: u64, count: usize) -> Check {
    let mut rng = stream_rng(seed);
    let mut worst = 0.0f64;
    let mut skipped = 0usize;
    for _ in 0..count {
        let w = random_weights(&mut rng);
        let n = rng.random_range(5..=30);
        let d = generate_dataset_with(&w, n, &mut rng);
        let (Ok(fast), Some(slow)) = (jackknife_estimates(&d), jackknife_by_refit(&d)) else {
            skipped += 1;
            continue;
        };
        for (e, o) in fast.estimates.iter().zip(&slow) {
            for path in Path::ALL {
                worst = worst.max((e.get(path) - o[path.index()]).abs());
            }
        }
    }
    Check {
        name: "jackknife_equivalence",
        passed: worst <= 1e-9 && skipped == 0,
        detail: format!("{count} datasets, max |downdate - refit| = {worst:.3e}, singular = {skipped}"),
    }
}

/// Inverse normal CDF at high-precision reference points.
pub fn quantile_reference() -> Check {
    const REFERENCE: [(f64, f64); 4] = [
        (0.975, 1.959_963_984_540_054_2),
        (0.6, 0.253_347_103_135_799_8),
        (0.9995, 3.290_526_731_491_894_8),
        (0.5, 0.0),
    ];
    let worst = REFERENCE
        .iter()
        .map(|&(p, z)| normal_quantile(p).map_or(f64::INFINITY, |q| (q - z).abs()))
        .fold(0.0f64, f64::max);
    Check {
        name: "normal_quantile",
        passed: worst <= 1e-12,
        detail: format!("max error {worst:.3e} over {} reference points", REFERENCE.len()),
    }
}

/// The full suite with fixed sizes.
pub fn oracle_suite(seed: u64) -> Vec<Check> {
    vec![
        fit_equivalence(seed, 1000),
        ci_nesting(seed.wrapping_add(1), 200),
        jackknife_equivalence(seed.wrapping_add(2), 200),
        quantile_reference(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_passes() {
        for check in oracle_suite(11) {
            assert!(check.passed, "{check}");
        }
    }

    #[test]
    fn display_format() {
        let c = Check {
            name: "x",
            passed: false,
            detail: "boom".into(),
        };
        assert_eq!(c.to_string(), "FAIL x: boom");
    }
}
