use thiserror::Error;

/// Failures of the numerical pipeline (fits, resampling, the Monte Carlo loop).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("singular design: {0}")]
    SingularDesign(&'static str),

    #[error("degenerate data: {consecutive} consecutive bootstrap resamples were rank-deficient")]
    DegenerateData { consecutive: usize },

    #[error("scenario {scenario_id} failed: {failed} of {repeats} repeats hit degenerate data")]
    ScenarioFailed {
        scenario_id: u32,
        failed: usize,
        repeats: usize,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
