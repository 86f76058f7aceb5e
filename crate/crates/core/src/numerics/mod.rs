//! Quadrature rules, orthogonal polynomials and interpolation on uniform grids.

pub mod interp;
pub mod laguerre;
pub mod quadrature;

pub use interp::{CubicSpline, QuinticHermite};
pub use laguerre::{laguerre, laguerre_all};
pub use quadrature::{adaptive_gk15, composite_nodes, GaussLegendre, QuadOutcome};
