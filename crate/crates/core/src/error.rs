use thiserror::Error;

/// Broad class of a failure, used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// The requested physics is outside the model's domain.
    Domain,
    /// A numerical method failed to reach its tolerance.
    Numerical,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("critical coupling: alpha = {alpha} >= l + D/2 - 1 = {lam}")]
    CriticalCoupling { alpha: f64, lam: f64 },
    #[error("invalid quantum numbers: {0}")]
    InvalidQuantumNumbers(String),
    #[error("no bound state: {0}")]
    NoBoundState(String),
    #[error("outside validity domain: {0}")]
    ValidityViolation(String),
    #[error("energy sits on a bound-state pole (nu = {nu}, N = {n_eff})")]
    AtPole { nu: f64, n_eff: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("pole of the gamma function at {0}")]
    PoleOfGamma(f64),
    #[error("overflow: {0}")]
    Overflow(String),
    #[error("order 2mu = {two_mu} is too close to an integer for this route")]
    NearDegenerateOrder { two_mu: f64 },
    #[error("quadrature hit the depth limit (estimate {value}, error {abs_err})")]
    MaxDepthExceeded { value: f64, abs_err: f64 },
    #[error("integrand tail does not decay: {0}")]
    DivergentTail(String),
    #[error("no convergence: {0}")]
    Nonconvergence(String),
    #[error("root bracketing failed: {0}")]
    BracketFailure(String),
    #[error("residue extrapolation inconsistent: {0}")]
    PoleMismatch(String),
    #[error("branch-cut limit unstable: {0}")]
    BranchError(String),
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::CriticalCoupling { .. }
            | Error::InvalidQuantumNumbers(_)
            | Error::NoBoundState(_)
            | Error::ValidityViolation(_)
            | Error::AtPole { .. }
            | Error::InvalidArgument(_)
            | Error::PoleOfGamma(_) => ErrorClass::Domain,
            _ => ErrorClass::Numerical,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
