use alloc::string::String;

/// Errors shared by every module in the crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Shapes of two inputs do not line up (series vs. model, residual vs. loss, ...).
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    /// A constructor or operation received an argument outside its contract.
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// No blocking plan satisfies 2*mu*a + d <= n (or the candidate plan violates it).
    #[error("infeasible blocking plan: {0}")]
    InfeasiblePlan(String),
    /// eta' = eta - 2*mu*beta <= 0: mixing too strong for the requested confidence.
    #[error("mixing too strong for requested confidence (eta' = {eta_prime})")]
    ConfidenceExhausted { eta_prime: f64 },
    /// Argument outside the mathematical domain of the operation.
    #[error("out of domain: {0}")]
    OutOfDomain(String),
    /// A linear system is singular or numerically rank deficient.
    #[error("singular system: {0}")]
    Singular(String),
    /// Transition matrix has spectral radius >= 1 - 1e-10.
    #[error("nonstationary model: spectral radius {rho} >= 1 - 1e-10")]
    NonStationary { rho: f64 },
    /// A model class has no finite capacity, so no finite bound exists.
    #[error("no finite capacity bound for this model class")]
    InfiniteCapacity,
}
