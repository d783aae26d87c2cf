//! Numerical building blocks: double-double arithmetic, compensated sums,
//! Gauss–Legendre quadrature, Richardson extrapolation and small fits.

pub mod dd;
pub mod fit;
pub mod quadrature;
pub mod richardson;
pub mod sum;

pub use dd::DoubleDouble;
pub use fit::{fit_line, least_squares, LineFit};
pub use quadrature::GaussLegendre;
pub use richardson::richardson_even;
pub use sum::{compensated_sum, pairwise_sum, CompensatedSum};
