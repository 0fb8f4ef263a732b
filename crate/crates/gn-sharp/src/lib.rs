//! Sharp constants for Gagliardo-Nirenberg inequalities
//!
//! ```text
//! ‖u‖_{m+1} ≤ C ‖u‖_{q+1}^{1-θ} ‖∇u‖_p^θ
//! ```
//!
//! together with the radial extremal profiles that attain them.
//!
//! * [`params`] validates `(d, p, q, m)` and derives the exponents.
//! * [`specialfn`] provides Gamma, Beta, the unnormalized incomplete Beta
//!   function and its inverse.
//! * [`closed_forms`] evaluates every known closed-form profile and constant.
//! * [`solver`] builds profiles numerically (shooting, exterior scheme) and
//!   integrates norms.
//! * [`verify`] checks the inequality, energy identities, decay laws and limits.

pub mod closed_forms;
pub mod ode;
pub mod params;
pub mod quad;
pub mod solver;
pub mod specialfn;
pub mod verify;

pub use closed_forms::{ClosedForm, Decay, ProfileCoefficients, ProfileRepr, RadialProfile, Support};
pub use params::{Exponents, ExtReal, ParamSet, Regime};
pub use solver::{BestConstantResult, Method, ShootingConfig};

/// Errors produced anywhere in the library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("inadmissible parameters: {0}")]
    Admissibility(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("parameter family mismatch: {0}")]
    FamilyMismatch(String),
    #[error("Sobolev-critical case p(α+1) = d has no finite-mass profile")]
    SobolevCritical,
    #[error("shooting bracket does not enclose a sign change: {0}")]
    Bracket(String),
    #[error("no convergence: {0}")]
    NonConvergence(String),
    #[error("Richardson extrapolation diverges: {0}")]
    ExtrapolationDivergence(String),
    #[error("integral does not converge: {0}")]
    NonIntegrable(String),
    #[error("profile tail too short for a decay fit: {0}")]
    InsufficientTail(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

impl Error {
    /// True for failures of the numerical machinery rather than of the input.
    pub fn is_solver_failure(&self) -> bool {
        matches!(
            self,
            Error::Bracket(_)
                | Error::NonConvergence(_)
                | Error::ExtrapolationDivergence(_)
                | Error::NonIntegrable(_)
                | Error::InsufficientTail(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
