//! The free algebra `F = (Z/pZ)<x, y>` and its graded quotients.

mod gs;
mod ideal;
mod monomial;
mod padding;
mod poly;
mod units;

pub use gs::{gs_audit, gs_bound, parse_rational, GsBudget, GsVerdict};
pub use ideal::{EchelonBasis, HomogeneousIdeal};
pub use monomial::{Letter, Monomial, MAX_DEGREE};
pub use padding::{pad_presentation, unpad, PaddedEntry};
pub use poly::{check_prime, poly_mul, Poly, SUPPORTED_PRIMES};
pub use units::{unit_inverse, unit_top_component, unit_word_to_poly, UnitLetter, UnitWord};

pub const DEFAULT_MODULUS: u32 = 2;
pub const DEFAULT_MAXDEG: usize = 16;
pub const DEFAULT_UNIT_EXPONENT: usize = 13;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("degree {0} exceeds the largest representable degree {MAX_DEGREE}")]
    DegreeOverflow(usize),
    #[error("modulus {0} is not one of the supported primes 2, 3, 5, 7")]
    UnsupportedModulus(u32),
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u32, u32),
    #[error("cannot parse {input:?} at byte {at}: {reason}")]
    Parse { input: String, at: usize, reason: String },
    #[error("generator {0} is not homogeneous")]
    NotHomogeneous(String),
    #[error("degree {degree} is beyond the horizon maxdeg = {maxdeg}")]
    Horizon { degree: usize, maxdeg: usize },
    #[error("epsilon must lie in (0, 1], got {0}")]
    Epsilon(String),
    #[error("bad rational {0:?}")]
    BadRational(String),
    #[error("unit words need x^{exponent} and y^{exponent} among the generators")]
    MissingUnitRelations { exponent: usize },
    #[error("unit exponent must be at least 2, got {0}")]
    UnitExponent(usize),
    #[error("padded stream, line {line}: {reason}")]
    Padding { line: usize, reason: String },
}
