//! The Monte Carlo loop: simulate, fit, bootstrap, test, count.

use rayon::prelude::*;

use crate::bootstrap::{
    acceleration, bias_correction_sorted, bootstrap_distribution, interval_sorted,
    jackknife_estimates, sorted,
};
use crate::error::{Error, Result};
use crate::regress::estimate_paths;
use crate::simulate::{derive_seed, generate_dataset_with, stream_rng, SeedRecipe};
use crate::types::{
    ci_excludes_zero, ConfidenceInterval, Method, Path, PathEstimates, PowerResult, Scenario,
};

/// Share of repeats allowed to fail before the whole scenario is rejected.
pub const MAX_FAILED_FRACTION: f64 = 0.01;

/// One simulate → fit → bootstrap → interval cycle.
#[derive(Debug, Clone, PartialEq)]
pub struct RepeatOutcome {
    pub repeat_index: u32,
    pub point: PathEstimates,
    /// `intervals[method][path]`
    pub intervals: [[ConfidenceInterval; 5]; 3],
    pub significant: [[bool; 5]; 3],
    pub degenerate_redraws: u64,
}

pub fn run_repeat(s: &Scenario, repeat_index: u32) -> Result<RepeatOutcome> {
    s.validate()?;
    let seed = derive_seed(SeedRecipe {
        master_seed: s.master_seed,
        scenario_id: s.id,
        repeat_index,
    });
    let mut rng = stream_rng(seed);
    let data = generate_dataset_with(&s.weights, s.n, &mut rng);
    let point = estimate_paths(&data)?;
    let dist = bootstrap_distribution(&data, s.resamples, &mut rng)?;
    // Leave-one-out needs five rows; at n = 4 BCa runs without acceleration.
    let jack = if data.len() >= 5 {
        Some(jackknife_estimates(&data)?)
    } else {
        None
    };

    let placeholder = ConfidenceInterval {
        lower: 0.0,
        upper: 0.0,
        method: Method::Percentile,
        alpha: s.alpha,
    };
    let mut intervals = [[placeholder; 5]; 3];
    let mut significant = [[false; 5]; 3];
    for path in Path::ALL {
        let values = sorted(dist.path(path));
        let z0 = bias_correction_sorted(&values, point.get(path));
        let accel = jack.as_ref().map_or(0.0, |j| acceleration(&j.path(path)));
        let built = [
            interval_sorted(&values, 0.0, 0.0, s.alpha, Method::Percentile),
            interval_sorted(&values, z0, 0.0, s.alpha, Method::BiasCorrected),
            interval_sorted(&values, z0, accel, s.alpha, Method::BiasCorrectedAccelerated),
        ];
        for (mi, ci) in built.into_iter().enumerate() {
            significant[mi][path.index()] = ci_excludes_zero(&ci);
            intervals[mi][path.index()] = ci;
        }
    }
    Ok(RepeatOutcome {
        repeat_index,
        point,
        intervals,
        significant,
        degenerate_redraws: dist.degenerate_redraws,
    })
}

/// Fold repeat outcomes into counts. Order-independent.
pub fn aggregate<'a>(
    scenario_id: u32,
    outcomes: impl IntoIterator<Item = &'a Result<RepeatOutcome>>,
) -> PowerResult {
    let mut res = PowerResult::empty(scenario_id);
    for outcome in outcomes {
        match outcome {
            Ok(o) => {
                res.repeats_completed += 1;
                res.degenerate_resample_count += o.degenerate_redraws;
                for m in Method::ALL {
                    for p in Path::ALL {
                        res.significant[m.index()][p.index()] +=
                            u64::from(o.significant[m.index()][p.index()]);
                    }
                }
            }
            Err(_) => res.failed_repeats += 1,
        }
    }
    res
}

/// Run all `R` repeats of a scenario on the current rayon pool.
pub fn run_scenario(s: &Scenario) -> Result<PowerResult> {
    s.validate()?;
    let repeats = u32::try_from(s.repeats)
        .map_err(|_| Error::InvalidInput(format!("too many repeats: {}", s.repeats)))?;
    let outcomes: Vec<Result<RepeatOutcome>> = (0..repeats)
        .into_par_iter()
        .map(|r| run_repeat(s, r))
        .collect();
    let res = aggregate(s.id, &outcomes);
    if res.failed_repeats as f64 > MAX_FAILED_FRACTION * s.repeats as f64 {
        return Err(Error::ScenarioFailed {
            scenario_id: s.id,
            failed: res.failed_repeats as usize,
            repeats: s.repeats,
        });
    }
    Ok(res)
}
