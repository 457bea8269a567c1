use std::path::PathBuf;

use thiserror::Error;

use crate::modulation::ModulationScheme;

#[derive(Debug, Error)]
pub enum Error {
    #[error("silent scheme {0} has no BER")]
    SilentScheme(ModulationScheme),

    #[error("{family}{order} is not in the modulation catalog")]
    NotInCatalog { family: String, order: u32 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("search space of {size:e} assignments exceeds the limit of {limit:e}")]
    SearchSpace { size: f64, limit: f64 },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("insufficient data: need at least {needed} values, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("undefined ratio: reference system carries zero bits")]
    ZeroReference,

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
