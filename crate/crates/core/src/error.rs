//! Shared error type for all kernel computations.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A frequency fell outside a tabulated grid.
    #[error("omega = {omega} outside grid range [{min}, {max}]")]
    OutOfRange { omega: f64, min: f64, max: f64 },

    /// Negative imaginary susceptibility: the medium would amplify.
    #[error("passivity violated: Im chi = {im_chi} at omega = {omega}")]
    Passivity { omega: f64, im_chi: f64 },

    /// A frequency grid cannot resolve the requested time argument.
    #[error("grid too coarse for t = {t}: max spacing {max_spacing:.3e} exceeds {bound:.3e}")]
    Resolution { t: f64, max_spacing: f64, bound: f64 },

    /// Principal-value transforms are unreliable near the grid ends.
    #[error("omega = {omega} within the edge margin ({margin} samples) of the grid")]
    EdgeTruncation { omega: f64, margin: usize },

    /// A kernel denominator vanished on the evaluation point.
    #[error("kernel pole: |denominator| = {magnitude:.3e} below {threshold:.3e}")]
    Pole { magnitude: f64, threshold: f64 },

    /// epsilon(omega) ~ 0: the longitudinal response is singular.
    #[error("singular permittivity at omega = {omega}: |epsilon| = {magnitude:.3e}")]
    SingularPermittivity { omega: f64, magnitude: f64 },

    /// The quadratic form has no positive-definite symplectic spectrum.
    #[error("unstable quadratic form: {0}")]
    Stability(String),

    /// Inverse Laplace transform failed to reach the requested tolerance.
    #[error("inverse Laplace did not converge: estimate {estimate:.3e} > tol {tol:.3e} after {terms} terms")]
    Convergence { estimate: f64, tol: f64, terms: usize },

    /// An operation was called outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// The medium model kind is not supported by this operation.
    #[error("unsupported model: {0}")]
    Unsupported(String),

    /// Malformed input data.
    #[error("invalid input: {0}")]
    Invalid(String),

    /// A root finder or iterative scheme failed to converge.
    #[error("numerical failure: {0}")]
    Numerical(String),
}
