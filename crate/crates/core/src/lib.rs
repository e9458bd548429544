//! Certified approximate maximization of polynomials over the mixed-integer
//! points of rational polytopes, in exact rational arithmetic.
//!
//! The pure-integer engine ([`integer_opt`]) bounds and approximately
//! maximizes non-negative objectives from moment sums. The mixed-integer
//! drivers ([`mixed_opt`]) reduce to it through a `1/m` grid whose size is
//! derived from the instance and the requested accuracy.

pub mod error;
pub mod instance;
pub mod integer_opt;
mod linalg;
pub mod mixed_opt;
pub mod numeric;
pub mod polynomial;
pub mod polytope;
pub mod solution;

pub use error::{Error, Result};
pub use instance::Instance;
pub use mixed_opt::{FptasOptions, GridPlan, RangeState};
pub use numeric::{ExactInt, ExactRat};
pub use polynomial::Polynomial;
pub use polytope::{MixedPoint, Polytope};
pub use solution::{Certificate, Guarantee, GuaranteeKind, Solution};
