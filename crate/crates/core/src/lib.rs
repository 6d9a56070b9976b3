//! Exact average formulas for central Rankin–Selberg L-values attached to
//! imaginary quadratic fields, together with an independent weight-2 check
//! through Brandt modules of definite quaternion algebras.
//!
//! The modules are layered bottom-up:
//!
//! * [`exactmath`]: rationals, cyclotomic fields, Legendre polynomials, matrices.
//! * [`quadfield`]: class groups of Q(√−D) via reduced binary quadratic forms.
//! * [`repnum`]: ideal-counting functions r_A(m), r_Ψ(m), R(m), σ_N(m).
//! * [`kernel`]: Fourier coefficients of the kernel forms G_A and G_A^cusp.
//! * [`average`]: the exact average identity, stability and subconvexity reports.
//! * [`brandt`]: quaternion ideal classes, Brandt matrices, Gross points.
//! * [`scanner`]: positivity and mod-p non-vanishing certificates.

pub mod average;
pub mod brandt;
pub mod error;
pub mod exactmath;
pub mod kernel;
pub mod quadfield;
pub mod repnum;
pub mod scanner;

pub use error::{Error, Result};
pub use exactmath::{CyclotomicValue, Rational};
pub use quadfield::{ClassCharacter, ClassGroup, FundamentalDiscriminant, ReducedForm};
