//! Exact integer linear algebra and integer polynomials.

mod elimination;
mod matrix;
mod poly;
mod smith;

pub use elimination::{det, rank_exact, rank_mod_p, scaled_inverse};
pub(crate) use elimination::{inv_mod_prime, mul_mod, reduce_mod};
pub use matrix::IntMatrix;
pub use poly::{char_poly, discriminant, resultant, sylvester_resultant, IntPoly};
pub use smith::{largest_invariant, local_smith, ord_p, smith_normal_form, LocalSmith, SmithDecomposition};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LinalgError {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("the zero polynomial has no discriminant")]
    ZeroPolynomial,
    #[error("discriminant needs degree at least 1")]
    ConstantPolynomial,
}
