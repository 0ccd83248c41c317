//! Shared numerical machinery: quadrature, polynomials, root finding,
//! an embedded Runge–Kutta pair with dense output, and a seedable RNG.

pub mod ode;
pub mod poly;
pub mod quad;
pub mod rng;
pub mod roots;
pub mod special;
