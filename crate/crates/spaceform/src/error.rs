//! Error taxonomy shared by the whole crate.
//!
//! The CLI maps these onto exit codes: configuration and domain problems are
//! usage errors, precondition and check failures are verification failures,
//! and solver breakdowns are numerical failures.

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A point lies outside its chart's domain.
    #[error("point outside chart domain: {0}")]
    Domain(String),

    /// Invalid parameters (case parameter out of range, bad mesh resolution, ...).
    #[error("configuration error: {0}")]
    Config(String),

    /// A check was invoked on data that violates its stated hypotheses.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Iterative solver failed to converge.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// The discrete bilinear form lost positivity, so the solvability bound
    /// lambda_1(Omega) > (n+1)K cannot hold on this domain.
    #[error(
        "coercivity failure: CG encountered a non-positive curvature direction; \
         estimated lambda_1,h = {lambda1:.6} does not exceed the required bound (n+1)K = {bound:.6}"
    )]
    Coercivity { lambda1: f64, bound: f64 },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// Mesh file violates the exchange format.
    #[error("mesh format error: {0}")]
    MeshFormat(String),
}

pub type Result<T> = std::result::Result<T, Error>;
