//! Exact truncated polynomial arithmetic: rational scalars, multi-indices,
//! role-tagged coefficients, jets with exactness accounting, the symmetric
//! inner product, and rational binomial combinatorics.

mod binomial;
mod coeff;
mod multi_index;
mod poly;
mod scalar;
mod zseries;

pub use binomial::{binomial_inversion_sum, falling_factorial, rational_binomial};
pub use coeff::{Coeff, Role};
pub use multi_index::MultiIndex;
pub use poly::{number_scale, radial_power, sym_inner, Degree, JetPoly};
pub use scalar::Rat;
pub use zseries::ZSeries;
