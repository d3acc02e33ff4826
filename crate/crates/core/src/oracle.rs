//! Reference implementations used to cross-check the fast kernels.
//!
//! Nothing here shares code with `regress` or `bootstrap`: least squares is
//! solved from the raw normal equations `(XᵀX)β = Xᵀy` by Gaussian
//! elimination, and leave-one-out estimates are brute-force refits.

use crate::types::Dataset;

/// Solve a small dense system in place with partial pivoting.
fn solve(mut a: Vec<Vec<f64>>, mut rhs: Vec<f64>) -> Option<Vec<f64>> {
    let k = rhs.len();
    for col in 0..k {
        let pivot = (col..k).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        rhs.swap(col, pivot);
        for row in col + 1..k {
            let f = a[row][col] / a[col][col];
            for c in col..k {
                a[row][c] -= f * a[col][c];
            }
            rhs[row] -= f * rhs[col];
        }
    }
    let mut beta = vec![0.0; k];
    for row in (0..k).rev() {
        let tail: f64 = (row + 1..k).map(|c| a[row][c] * beta[c]).sum();
        beta[row] = (rhs[row] - tail) / a[row][row];
    }
    Some(beta)
}

/// Intercept-first OLS coefficients of `y` on the given predictor columns.
pub fn ols_normal_equations(predictors: &[&[f64]], y: &[f64]) -> Option<Vec<f64>> {
    let n = y.len();
    let k = predictors.len() + 1;
    let column = |j: usize, i: usize| if j == 0 { 1.0 } else { predictors[j - 1][i] };
    let mut xtx = vec![vec![0.0; k]; k];
    let mut xty = vec![0.0; k];
    for i in 0..n {
        for r in 0..k {
            xty[r] += column(r, i) * y[i];
            for c in 0..k {
                xtx[r][c] += column(r, i) * column(c, i);
            }
        }
    }
    solve(xtx, xty)
}

/// `[a, b, c, c', ab]` from three independent normal-equation solves.
pub fn paths_by_normal_equations(x: &[f64], m: &[f64], y: &[f64]) -> Option<[f64; 5]> {
    let a = ols_normal_equations(&[x], m)?[1];
    let c = ols_normal_equations(&[x], y)?[1];
    let both = ols_normal_equations(&[x, m], y)?;
    let (c_prime, b) = (both[1], both[2]);
    Some([a, b, c, c_prime, a * b])
}

/// Leave-one-out path estimates by refitting `n` reduced datasets.
pub fn jackknife_by_refit(d: &Dataset) -> Option<Vec<[f64; 5]>> {
    (0..d.len())
        .map(|i| {
            let r = d.without_row(i);
            paths_by_normal_equations(r.x(), r.m(), r.y())
        })
        .collect()
}

/// Percentile endpoints by explicit order statistics on a fresh sort.
pub fn percentile_by_ranks(values: &[f64], p_lo: f64, p_hi: f64) -> (f64, f64) {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let b = v.len();
    // Rank rule written out longhand: smallest rank r with r ≥ p·B, largest with r ≤ p·B.
    let lo = (1..=b).find(|&r| r as f64 >= p_lo * b as f64 - 1e-9).unwrap_or(b);
    let hi = (1..=b).rev().find(|&r| r as f64 <= p_hi * b as f64 + 1e-9).unwrap_or(1);
    let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    (v[lo - 1], v[hi - 1])
}
