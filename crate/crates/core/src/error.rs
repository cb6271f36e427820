use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid mode count {n}: at least {min} modes required")]
    InvalidModeCount { n: usize, min: usize },

    #[error("dimension mismatch: expected {expected} sites, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{n} modes exceeds the dense statevector limit of {max}")]
    TooManyModes { n: usize, max: usize },

    #[error("state is not normalized: squared norm {norm_sqr}")]
    NotNormalized { norm_sqr: f64 },

    #[error("undefined conditional: condition has zero probability")]
    UndefinedConditional,

    #[error("enumeration infeasible: n = {n} exceeds the ceiling of {ceiling}")]
    EnumerationInfeasible { n: usize, ceiling: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}
