//! Exact arithmetic for diagonal restrictions of Hilbert Eisenstein series over
//! totally real fields.
//!
//! The exact pipeline runs on [`Rational`]; numeric side routes (quadrature,
//! lattice pruning, zeta tails) run on `f64`. Linear algebra, polynomials and
//! q-series are generic over [`Scalar`] so both views share one implementation.

pub mod cubic;
pub mod field;
pub mod ideal;
pub mod intfactor;
pub mod lattice;
pub mod linalg;
pub mod modp;
pub mod petersson;
pub mod poly;
pub mod qseries;
pub mod report;
pub mod restrict;
pub mod scalar;
pub mod zeta;

pub use num_bigint::BigInt;
pub use scalar::Scalar;

pub type Rational = num_rational::BigRational;

pub type MatrixQ = linalg::Matrix<Rational>;
pub type MatrixF = linalg::Matrix<f64>;
pub type PolyQ = poly::Poly<Rational>;
pub type PolyF = poly::Poly<f64>;
pub type QSeriesQ = qseries::QSeries<Rational>;
pub type QSeriesF = qseries::QSeries<f64>;
