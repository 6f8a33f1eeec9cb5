use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("q must satisfy 0 < q < 1, got {0}")]
    InvalidQ(f64),

    #[error("shift parameters must satisfy 0 <= alpha1 <= alpha2 <= beta1 <= beta2, got ({alpha1}, {alpha2}, {beta1}, {beta2})")]
    InvalidParams {
        alpha1: f64,
        alpha2: f64,
        beta1: f64,
        beta2: f64,
    },

    #[error("invalid argument `{arg}`: {reason}")]
    InvalidArgument { arg: &'static str, reason: String },

    #[error("invalid operator spec: {0}")]
    InvalidSpec(String),

    #[error("jackson series not converged after {terms} terms (last term bound {bound:e})")]
    Truncation { terms: usize, bound: f64 },

    #[error("function `{name}` is not finite at x = {x}")]
    NotFinite { name: String, x: f64 },

    #[error("function `{name}` has no {what}")]
    MissingMetadata { name: String, what: &'static str },

    #[error("function `{name}` violates its Lipschitz metadata between {t} and {x}")]
    LipschitzViolation { name: String, t: f64, x: f64 },

    #[error("x = {x} is outside the operator domain [{lo}, {hi}]")]
    OutsideDomain { x: f64, lo: f64, hi: f64 },

    #[error("delta_n^2 is negative ({0:e}) for this parameter regime")]
    NegativeDeltaSquared(f64),
}
