use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("point {index} lies outside the closed unit disk (|x| = {modulus})")]
    OutOfDomain { index: usize, modulus: f64 },
    #[error("precision {needed} bits needed but the backend delivers {available}")]
    Precision { needed: u32, available: u32 },
    #[error("factorization residual {best_residual:e} above target 2^-{target_bits}")]
    Factorization { best_residual: f64, target_bits: u32 },
    #[error("no convergence after {iterations} iterations (last step {last_step:e})")]
    NonConvergence { iterations: usize, last_step: f64 },
    #[error("precision m = {m} exceeds cap {cap} with {certified} of {degree} roots certified; input is probably not squarefree")]
    NonTermination { m: u32, cap: u64, certified: usize, degree: usize },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
