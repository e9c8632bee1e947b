//! Exact jets of heat kernel coefficients.
//!
//! This crate computes, in exact rational arithmetic, the Taylor jets at a
//! basepoint of the coefficients `a_k` in the small-time heat expansion of a
//! generalized Laplacian given in normal coordinates. The pipeline builds the
//! difference series `e^{-zL} e^{zD}` of the operator `L` against the flat
//! Laplacian `D`, reads off the value of that series at the origin, and
//! reassembles the jets of every `a_k`; independent routes (an inversion
//! formula for the diagonal values and a power-series identity for the value
//! table) cross-check the result. All outputs are germs at the basepoint:
//! jets of `a_k` at the chosen origin, nothing more.

pub mod cli;
pub mod diffop;
pub mod error;
pub mod heatcoeff;
pub mod io;
pub mod jet_algebra;
pub mod laplacian;
pub mod pipeline;
pub mod verify;

pub use error::{Error, Result};
