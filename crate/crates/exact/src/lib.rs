//! Exact number types used throughout the workspace.
//!
//! Everything here works over the rationals with arbitrary precision.
//! There is no floating point anywhere: extended rationals carry the two
//! infinities, [`TPoly`] handles limits in a large negative parameter, and
//! the series types track their own truncation orders.

mod error;
mod ext;
mod linalg;
mod poly2;
mod puiseux_series;
mod roots;
mod series;
mod symmat;
mod tpoly;

pub use error::ExactError;
pub use ext::{parse_rational, rat, rat_str, ExtRational, Rational};
pub use linalg::{det, inverse, kernel, mat_vec, rank, rref, solve_linear, LinearSolution};
pub use poly2::Poly2;
pub use puiseux_series::PuiseuxSeries;
pub use roots::{rational_nth_root, rational_roots, RootReport};
pub use series::{compose_series, Series1, TruncSeries2};
pub use symmat::{chi_det, is_negative_definite, SymMatrixExt};
pub use tpoly::{sign_at_neg_infinity, Magnitude, TPoly};
