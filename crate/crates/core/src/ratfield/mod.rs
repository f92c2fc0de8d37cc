//! Exact arithmetic in `Q(h, q, u, u1, u2, u3, u4)` and matrices over it.

mod matrix;
mod poly;
mod ratfunc;
mod verify;

pub use matrix::{index_labels, Label, LabeledMatrix, MatrixJson};
pub use poly::{gcd, Mono, Poly, Var, NVARS};
pub use ratfunc::{monomial, RatFunc};
pub use verify::{verify_identity, verify_products, Counterexample, Verdict, VerifyMode};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RatError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("not regular at infinity")]
    NotRegularAtInfinity,
    #[error("label mismatch: {0}")]
    LabelMismatch(String),
    #[error("shape error: {0}")]
    Shape(String),
    #[error("singular matrix")]
    Singular,
    #[error("could not build an evaluation grid avoiding denominator zeros")]
    GridExhausted,
}
