use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("invalid channel variances: {0}")]
    InvalidVariances(String),

    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// Outage already exceeds the target at the smallest representable rate.
    #[error("infeasible target: outage {floor:.3e} at rate {rate:.3e} already exceeds epsilon {epsilon:.3e}")]
    Infeasible { epsilon: f64, rate: f64, floor: f64 },

    /// Outage never rose above the target while the upper rate was doubled.
    #[error(
        "could not bracket epsilon {epsilon:.3e}: outage still {outage:.3e} at rate {rate_hi}"
    )]
    NotBracketed {
        epsilon: f64,
        rate_hi: f64,
        outage: f64,
    },

    #[error("outage evaluator is not monotone in the rate near R = {rate}")]
    NonMonotone { rate: f64 },

    #[error("Monte Carlo budget of {trials} trials exhausted; capacity bracketed in [{lo}, {hi}]")]
    McBudgetExceeded { trials: u64, lo: f64, hi: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn param(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::InvalidParameter {
            name,
            value,
            reason,
        }
    }
}
