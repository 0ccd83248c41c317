//! Numerical laboratory for the isoperimetric problem with a radial density
//! and a radial potential.
//!
//! The energy of a set F ⊂ ℝⁿ is
//!
//! ```text
//! E(F) = ∫_{∂F} f dH^{n-1} + ∫_F g·f dx,      f = e^ψ,
//! ```
//!
//! with ψ, g radial profiles. The crate provides, as separate modules:
//!
//! - [`weights`]: radial weight pairs (ψ, g) with exact derivatives,
//!   admissibility classification, and two counterexample constructions
//!   where centered balls fail to minimize;
//! - [`radial`]: weighted volumes and ball energies, the volume map Φ and
//!   its inverse, the energy profile with analytic derivatives, and
//!   off-center ball energies by tensor quadrature;
//! - [`one_dim`]: the exact n = 1 theory via the cumulative transforms
//!   F, H = F⁻¹, K, plus a brute-force oracle over interval unions;
//! - [`curve`]: shooting integration of the constant-weighted-mean-curvature
//!   generating curve with axis-crossing event detection and phase
//!   diagnostics;
//! - [`nearly_spherical`]: energies of graph sets over spheres, the second
//!   variation, spherical-harmonic analysis, and the quantitative stability
//!   gap check;
//! - [`symmetrize`]: spherical symmetrization on exactly measurable polar
//!   sets;
//! - [`calibrate`]: the large-volume calibration certificate (the field
//!   h = ℓ' + ℓ(ψ' + g + (n−1)/r) and the level-set inequality).
//!
//! All evaluation is pure: values are immutable after construction and safe
//! to share across worker threads.

pub mod calibrate;
pub mod curve;
pub mod nearly_spherical;
pub mod num;
pub mod one_dim;
pub mod radial;
pub mod sphere;
pub mod symmetrize;
pub mod weights;

use std::fmt;

/// Crate-wide error type.
///
/// Variants mirror the failure modes of the numerical operations: domain
/// violations are reported eagerly, accuracy failures carry the achieved
/// estimate, and construction failures name the violated inequality.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Argument outside the mathematical domain of the operation.
    Domain(String),
    /// Derivative order exceeds the profile's available smoothness.
    UnsupportedOrder { requested: u32, available: u32 },
    /// Only n = 2 and n = 3 are supported by this operation.
    UnsupportedDimension(u32),
    /// A quadrature did not reach the requested tolerance.
    Accuracy { requested: f64, achieved: f64 },
    /// A volume or coordinate fell outside the tabulated range.
    OutOfRange(String),
    /// r = 0 (or another removable singularity) was passed where a
    /// strictly positive value is required.
    SingularInput(String),
    /// A counterexample construction precondition failed; the message
    /// names the violated inequality.
    ConstructionInfeasible(String),
    /// A constructed weight would not stay positive on its working range.
    PositivityViolated(String),
    /// The ODE integrator could not continue (step-size underflow).
    IntegrationFailure(String),
    /// Grid resolution is insufficient for the requested spectral band.
    Resolution(String),
    /// sup|u| ≥ 1: the graph no longer describes an embedded boundary.
    Embedding(String),
    /// Newton/bisection could not bracket a volume correction.
    CorrectionInfeasible(String),
    /// A stated precondition of the operation does not hold.
    Precondition(String),
    /// No sublevel set matches the requested measure.
    InfeasibleMass(String),
    /// The value is not available in the object's current state.
    State(String),
    /// Malformed serialized input.
    Parse(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(m) => write!(f, "domain error: {m}"),
            Error::UnsupportedOrder {
                requested,
                available,
            } => write!(
                f,
                "unsupported derivative order {requested} (profile provides up to {available})"
            ),
            Error::UnsupportedDimension(n) => write!(f, "unsupported dimension n = {n}"),
            Error::Accuracy {
                requested,
                achieved,
            } => write!(
                f,
                "quadrature accuracy {requested:.3e} not reached (achieved {achieved:.3e})"
            ),
            Error::OutOfRange(m) => write!(f, "out of range: {m}"),
            Error::SingularInput(m) => write!(f, "singular input: {m}"),
            Error::ConstructionInfeasible(m) => write!(f, "construction infeasible: {m}"),
            Error::PositivityViolated(m) => write!(f, "positivity violated: {m}"),
            Error::IntegrationFailure(m) => write!(f, "integration failure: {m}"),
            Error::Resolution(m) => write!(f, "resolution error: {m}"),
            Error::Embedding(m) => write!(f, "embedding error: {m}"),
            Error::CorrectionInfeasible(m) => write!(f, "correction infeasible: {m}"),
            Error::Precondition(m) => write!(f, "precondition failed: {m}"),
            Error::InfeasibleMass(m) => write!(f, "infeasible mass: {m}"),
            Error::State(m) => write!(f, "state error: {m}"),
            Error::Parse(m) => write!(f, "parse error: {m}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
