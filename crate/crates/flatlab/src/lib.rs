//! Local testing and local correction of Reed-Muller codes and lifted
//! affine-invariant codes over `F_q`, together with an exact laboratory for
//! the affine Grassmann graph and its Cayley-graph surrogate.
//!
//! Everything that is a probability or a measure is computed as an exact
//! rational unless an operation is explicitly Monte Carlo; Monte Carlo paths
//! always carry a seed, a sample count and a standard error.

pub mod corrector;
pub mod flats;
pub mod generate;
pub mod gf;
pub mod io;
pub mod lifted;
pub mod poly;
pub mod report;
pub mod spectral;
pub mod tester;

pub use gf::{FieldElement, FieldSpec};
pub use poly::{Monomial, ReducedPoly, TruthTable};

use num::BigRational;
use thiserror::Error;

/// Exact rational used for all measures, rejection probabilities and
/// distances.
pub type Ratio = BigRational;

/// Default cap on the number of flats an exact enumeration may visit.
pub const DEFAULT_ENUMERATION_CAP: u64 = 10_000_000;

/// Default cap on the number of codewords the brute-force distance oracle
/// may enumerate.
pub const DEFAULT_CODEWORD_CAP: u64 = 1 << 24;

/// Default cap on the Cayley graph vertex count `q^{k(l+1)}`.
pub const DEFAULT_VERTEX_CAP: u64 = 1 << 20;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{p} is not prime")]
    NotPrime { p: u64 },

    #[error("division by zero in F_{q}")]
    DivisionByZero { q: u32 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("vectors are linearly dependent")]
    DependentVectors,

    #[error("enumeration of {needed} items exceeds the cap {cap}; use Monte Carlo instead")]
    CapExceeded { needed: String, cap: u64 },

    #[error("operation needs a nonempty set")]
    EmptySet,

    #[error("the function already passes the test everywhere")]
    AlreadyPassing,

    #[error("correction step did not strictly decrease the rejection probability")]
    NoProgress,

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error in {path}: {message}")]
    Parse { path: String, message: String },
}

/// Convenience constructor for small exact rationals.
pub fn ratio_of(num: u64, den: u64) -> Ratio {
    Ratio::new(num.into(), den.into())
}

pub(crate) fn ratio_to_f64(r: &Ratio) -> f64 {
    use num::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}
