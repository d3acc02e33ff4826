//! Benchmark fixtures shared by the criterion targets.

use medpower::simulate::generate_dataset;
use medpower::{Dataset, PathWeights, Scenario};

pub fn medium_weights() -> PathWeights {
    PathWeights::new(0.3, 0.3, 0.0).expect("finite weights")
}

pub fn dataset(n: usize) -> Dataset {
    generate_dataset(&medium_weights(), n, 17)
}

pub fn scenario(n: usize, resamples: usize) -> Scenario {
    Scenario {
        id: 0,
        weights: medium_weights(),
        n,
        resamples,
        repeats: 1,
        alpha: 0.05,
        master_seed: 17,
    }
}
