//! Row-paired bootstrap resampling, jackknife estimates, and the interval
//! constructions built on them.

mod interval;
mod jackknife;

pub use interval::{bias_correction, ci_bc, ci_bc_with_bias, ci_bca, ci_percentile};
pub use jackknife::{acceleration, jackknife_estimates, JackknifeSet};

pub(crate) use interval::{bias_correction_sorted, interval_sorted, sorted};

use rand::Rng;

use crate::error::{Error, Result};
use crate::regress::Moments;
use crate::types::{Dataset, Path};

/// Bootstrap estimates of every path; all vectors share length `B`.
#[derive(Debug, Clone, PartialEq)]
pub struct PathDistribution {
    /// `values[path.index()]`, one entry per accepted resample.
    pub values: [Vec<f64>; 5],
    /// Rank-deficient resamples that were discarded and redrawn.
    pub degenerate_redraws: u64,
}

impl PathDistribution {
    pub fn path(&self, path: Path) -> &[f64] {
        &self.values[path.index()]
    }

    pub fn len(&self) -> usize {
        self.values[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.values[0].is_empty()
    }
}

fn draw_indices<R: Rng + ?Sized>(n: usize, rng: &mut R, idx: &mut Vec<usize>) {
    idx.clear();
    idx.extend((0..n).map(|_| rng.random_range(0..n)));
}

/// `n` rows drawn uniformly with replacement, pairing preserved.
pub fn resample<R: Rng + ?Sized>(d: &Dataset, rng: &mut R) -> Dataset {
    let mut idx = Vec::with_capacity(d.len());
    draw_indices(d.len(), rng, &mut idx);
    let pick = |col: &[f64]| idx.iter().map(|&i| col[i]).collect::<Vec<_>>();
    Dataset::from_parts_unchecked(pick(d.x()), pick(d.m()), pick(d.y()))
}

/// `B` resamples, each fitted with all three regressions.
///
/// A resample with a rank-deficient design is discarded and redrawn; after
/// `10·B` consecutive failures the dataset is declared degenerate.
pub fn bootstrap_distribution<R: Rng + ?Sized>(
    d: &Dataset,
    resamples: usize,
    rng: &mut R,
) -> Result<PathDistribution> {
    if resamples == 0 {
        return Err(Error::InvalidInput("need at least one resample".into()));
    }
    let n = d.len();
    if n < 4 {
        return Err(Error::InvalidInput(format!("need at least 4 rows, got {n}")));
    }
    let (x, m, y) = (d.x(), d.m(), d.y());
    let mut values: [Vec<f64>; 5] = std::array::from_fn(|_| Vec::with_capacity(resamples));
    let mut idx = Vec::with_capacity(n);
    let mut redraws = 0u64;
    let mut consecutive = 0usize;
    let limit = resamples.saturating_mul(10);
    while values[0].len() < resamples {
        draw_indices(n, rng, &mut idx);
        match Moments::from_rows(n, |k| {
            let i = idx[k];
            (x[i], m[i], y[i])
        })
        .paths()
        {
            Ok(est) => {
                consecutive = 0;
                for p in Path::ALL {
                    values[p.index()].push(est.get(p));
                }
            }
            Err(Error::SingularDesign(_)) => {
                redraws += 1;
                consecutive += 1;
                if consecutive >= limit {
                    return Err(Error::DegenerateData { consecutive });
                }
            }
            Err(e) => return Err(e),
        }
    }
    Ok(PathDistribution {
        values,
        degenerate_redraws: redraws,
    })
}
