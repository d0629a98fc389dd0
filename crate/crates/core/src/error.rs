use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    // graph construction
    #[error("graph is not connected ({components} components)")]
    DisconnectedGraph { components: usize },
    #[error("edge `{edge}` is a self-loop at vertex `{vertex}`")]
    SelfLoopEdge { edge: String, vertex: String },
    #[error("edge `{edge}` has invalid length {length}")]
    NonPositiveLength { edge: String, length: f64 },
    #[error("duplicate identifier `{0}`")]
    DuplicateId(String),
    #[error("edge `{edge}` references unknown vertex `{vertex}`")]
    DanglingEndpoint { edge: String, vertex: String },
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("graph has no edges")]
    NoEdges,
    #[error("vertex `{vertex}` has non-finite coupling {sigma}")]
    InvalidCoupling { vertex: String, sigma: f64 },
    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    // expression language
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown function `{name}` at byte {offset}")]
    UnknownFunction { name: String, offset: usize },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("domain error: {0}")]
    Domain(String),

    // numerics
    #[error("quadrature did not converge: estimate {estimate:e} > tolerance {tol:e}")]
    NonConvergent { estimate: f64, tol: f64 },
    #[error("ODE step size underflow at x = {x}")]
    StepFailure { x: f64 },
    #[error("Wronskian drift {drift:e} exceeds limit {limit:e}")]
    WronskianViolation { drift: f64, limit: f64 },
    #[error("spectrum is not certified: {found} eigenvalues, Weyl estimate {expected}")]
    UncertifiedSpectrum { found: usize, expected: usize },
    #[error("mass matrix is not positive definite")]
    MassNotPositiveDefinite,
    #[error("function is discontinuous at vertex `{0}`")]
    DiscontinuousAtVertex(String),
    #[error("test function has zero norm")]
    DegenerateNorm,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
