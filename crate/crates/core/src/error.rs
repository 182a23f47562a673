use std::path::PathBuf;

use thiserror::Error;

use crate::graph::fd::DispersionCheckReport;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{what} = {value} is outside the domain {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("invalid tube vector ({0}, {1}): p must be nonzero, p = (0,0) is the whole sheet, not a tube")]
    InvalidTube(i64, i64),

    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("failed to read potential file {path}: {source}")]
    PotentialFile {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed potential CSV: {0}")]
    PotentialCsv(#[from] csv::Error),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("finite-difference assembly is not Hermitian: {0}")]
    Assembly(String),

    #[error("dispersion check failed: {} unmatched eigenvalue(s)", .0.failures.len())]
    DispersionMismatch(Box<DispersionCheckReport>),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
