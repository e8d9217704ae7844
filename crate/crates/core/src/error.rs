use thiserror::Error;

/// Error taxonomy shared by the whole crate.
///
/// `Config` is for invalid distribution/model parameters, `Usage` for
/// structurally impossible requests (window too small, parity mismatch),
/// `Domain` for arguments outside a function's mathematical domain and
/// `Numeric` for runtime failures of the numerics (non-convergence,
/// off-circle roots).
#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("usage error: {0}")]
    Usage(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("numeric error: {0}")]
    Numeric(String),
}

pub type Result<T> = std::result::Result<T, Error>;
