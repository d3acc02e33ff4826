//! Monte Carlo power analysis for the single-mediator model `X -> M -> Y`.
//!
//! Synthetic datasets are generated from known path weights, the three
//! mediation regressions are fitted, and significance of every path is
//! judged by bootstrap confidence intervals (percentile, bias-corrected and
//! bias-corrected-accelerated). Repeating this per grid scenario yields
//! power; [`orchestrate`] runs whole grids resumably and [`report`] turns
//! the results into figure tables and SVG charts.

pub mod bootstrap;
pub mod error;
pub mod normal;
pub mod orchestrate;
pub mod oracle;
pub mod power;
pub mod regress;
pub mod report;
pub mod simulate;
pub mod types;
pub mod verify;

pub use error::{Error, Result};
pub use types::{
    ci_excludes_zero, total_effect, ConfidenceInterval, Dataset, Method, Path, PathEstimates,
    PathWeights, PowerResult, Scenario,
};
