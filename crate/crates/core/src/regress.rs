//! Closed-form least squares for the three mediation regressions.
//!
//! All fits carry an intercept and are solved on centered cross-products,
//! which makes `ĉ = ĉ′ + â·b̂` hold to round-off on every dataset.

use crate::error::{Error, Result};
use crate::types::{Dataset, PathEstimates};

/// Relative tolerance below which a design is treated as rank-deficient.
pub const RANK_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimpleFit {
    pub intercept: f64,
    pub slope: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BivariateFit {
    pub intercept: f64,
    pub coef_x: f64,
    pub coef_m: f64,
}

/// Means and centered cross-products of `(x, m, y)` rows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Moments {
    pub n: f64,
    pub mean_x: f64,
    pub mean_m: f64,
    pub mean_y: f64,
    pub sxx: f64,
    pub sxm: f64,
    pub sxy: f64,
    pub smm: f64,
    pub smy: f64,
}

impl Moments {
    /// Two-pass accumulation over `len` rows supplied by `row`.
    #[inline]
    pub fn from_rows(len: usize, row: impl Fn(usize) -> (f64, f64, f64)) -> Self {
        let (mut sx, mut sm, mut sy) = (0.0, 0.0, 0.0);
        for k in 0..len {
            let (x, m, y) = row(k);
            sx += x;
            sm += m;
            sy += y;
        }
        let n = len as f64;
        let (mean_x, mean_m, mean_y) = (sx / n, sm / n, sy / n);
        let (mut sxx, mut sxm, mut sxy, mut smm, mut smy) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for k in 0..len {
            let (x, m, y) = row(k);
            let (u, v, w) = (x - mean_x, m - mean_m, y - mean_y);
            sxx += u * u;
            sxm += u * v;
            sxy += u * w;
            smm += v * v;
            smy += v * w;
        }
        Self {
            n,
            mean_x,
            mean_m,
            mean_y,
            sxx,
            sxm,
            sxy,
            smm,
            smy,
        }
    }

    fn x_degenerate(&self) -> bool {
        self.sxx <= RANK_TOL * (self.sxx + self.n * self.mean_x * self.mean_x)
    }

    fn m_degenerate(&self) -> bool {
        self.smm <= RANK_TOL * (self.smm + self.n * self.mean_m * self.mean_m)
    }

    /// `Sxx·Smm − Sxm²`, or an error when it is negligible relative to `Sxx·Smm`.
    fn determinant(&self) -> Result<f64> {
        if self.x_degenerate() {
            return Err(Error::SingularDesign("x has zero variance"));
        }
        if self.m_degenerate() {
            return Err(Error::SingularDesign("m has zero variance"));
        }
        let scale = self.sxx * self.smm;
        let det = scale - self.sxm * self.sxm;
        if det <= RANK_TOL * scale {
            return Err(Error::SingularDesign("x and m are collinear"));
        }
        Ok(det)
    }

    pub fn paths(&self) -> Result<PathEstimates> {
        let det = self.determinant()?;
        let a_hat = self.sxm / self.sxx;
        let c_hat = self.sxy / self.sxx;
        let c_prime_hat = (self.smm * self.sxy - self.sxm * self.smy) / det;
        let b_hat = (self.sxx * self.smy - self.sxm * self.sxy) / det;
        Ok(PathEstimates {
            a_hat,
            b_hat,
            c_hat,
            c_prime_hat,
            ab_hat: a_hat * b_hat,
        })
    }
}

fn check_lengths(lens: &[usize], min: usize) -> Result<usize> {
    let n = lens[0];
    if lens.iter().any(|&l| l != n) {
        return Err(Error::InvalidInput(format!("vector lengths differ: {lens:?}")));
    }
    if n < min {
        return Err(Error::InvalidInput(format!("need at least {min} rows, got {n}")));
    }
    Ok(n)
}

/// Least-squares line `response ≈ intercept + slope·predictor`.
pub fn fit_simple(predictor: &[f64], response: &[f64]) -> Result<SimpleFit> {
    let n = check_lengths(&[predictor.len(), response.len()], 3)?;
    // Reuse the three-column accumulator with the response in both slots.
    let mo = Moments::from_rows(n, |i| (predictor[i], response[i], response[i]));
    if mo.x_degenerate() {
        return Err(Error::SingularDesign("predictor has zero variance"));
    }
    let slope = mo.sxy / mo.sxx;
    Ok(SimpleFit {
        intercept: mo.mean_y - slope * mo.mean_x,
        slope,
    })
}

/// Least-squares plane `y ≈ intercept + coef_x·x + coef_m·m`.
pub fn fit_bivariate(x: &[f64], m: &[f64], y: &[f64]) -> Result<BivariateFit> {
    let n = check_lengths(&[x.len(), m.len(), y.len()], 4)?;
    let mo = Moments::from_rows(n, |i| (x[i], m[i], y[i]));
    let det = mo.determinant()?;
    let coef_x = (mo.smm * mo.sxy - mo.sxm * mo.smy) / det;
    let coef_m = (mo.sxx * mo.smy - mo.sxm * mo.sxy) / det;
    Ok(BivariateFit {
        intercept: mo.mean_y - coef_x * mo.mean_x - coef_m * mo.mean_m,
        coef_x,
        coef_m,
    })
}

/// Fit `M ~ X`, `Y ~ X + M` and `Y ~ X` and collect the path coefficients.
pub fn estimate_paths(d: &Dataset) -> Result<PathEstimates> {
    if d.len() < 4 {
        return Err(Error::InvalidInput(format!(
            "need at least 4 rows, got {}",
            d.len()
        )));
    }
    Moments::from_rows(d.len(), |i| d.row(i)).paths()
}
