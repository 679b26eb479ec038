//! Exact dense linear algebra over arbitrary-precision rationals.

mod matrix;
mod poly;
mod rational;

pub use matrix::{
    char_poly, det, linear_combination, mat_mul, ComplexMatrix, Matrix, RationalMatrix, Scalar,
};
pub use poly::{count_real_roots, Bound, Interval, Polynomial, RealRoot};
pub use rational::{
    approximate_f64, format_rational, frac, from_f64, int, parse_rational, simplest_between,
    to_f64, ComplexRational, Rational,
};
