//! Numeric kernels shared by the controllers: a bound-constrained
//! Nelder-Mead simplex search, adaptive Gauss-Kronrod quadrature and scalar
//! bisection.

mod bisect;
mod nelder_mead;
mod quadrature;

pub use bisect::{bisect, bisect_counted};
pub use nelder_mead::{nelder_mead, Minimum, NelderMeadSettings};
pub use quadrature::{integrate, integrate_01, DEFAULT_REL_TOL};
