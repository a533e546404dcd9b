//! Exact arithmetic: rationals, dense linear algebra, bilinear maps,
//! sparse polynomials and affine base changes.

pub mod basemap;
pub mod bilinear;
pub mod linalg;
pub mod poly;
pub mod scalar;

pub use basemap::BaseMap;
pub use bilinear::{bilinear_apply, Bilinear};
pub use linalg::{Matrix, Vector};
pub use poly::{poly_compose, Poly};
pub use scalar::{frac, int, one, parse_scalar, zero, Ring, Scalar};

/// Free-standing inverse with the kernel's error type.
pub fn mat_inverse(m: &Matrix) -> crate::Result<Matrix> {
    m.inverse()
}
