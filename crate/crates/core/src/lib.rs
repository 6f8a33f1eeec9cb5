//! Numerics for q-Bernstein–Stancu operators of Kantorovich type.
//!
//! Layers, bottom to top: q-calculus ([`qcalc`]), basis weights ([`basis`]),
//! the operator family ([`operators`]), moment formulas ([`moments`]) and
//! error-bound experiments ([`analysis`]).

pub mod analysis;
pub mod basis;
pub mod error;
pub mod function;
pub mod moments;
pub mod operators;
pub mod qcalc;
pub mod quadrature;

pub use basis::{BasisWeights, StancuDomain, StancuParams};
pub use error::{Error, Result};
pub use function::{builtins, Lipschitz, TargetFunction};
pub use operators::{apply, BoundOperator, OperatorKind, OperatorSpec, SampleNode};
pub use qcalc::{JacksonTolerance, QValue};
