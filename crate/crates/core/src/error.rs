use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what} = {value} is outside its domain ({domain})")]
    Domain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },
    #[error("centers {first} and {second} coincide")]
    CoincidentCenters { first: usize, second: usize },
    #[error("configuration has no centers")]
    NoCenters,
    #[error("matrix is not Hermitian (max asymmetry {asymmetry:e})")]
    NonHermitian { asymmetry: f64 },
    #[error("coefficient vector is not a null vector of L (relative residual {residual:e})")]
    NotAnEigenvector { residual: f64 },
    #[error("state has zero signature and cannot be normalized")]
    NullState,
    #[error("energy grid is not strictly increasing inside (-1, 1)")]
    BadGrid,
    #[error("branch tracking failed between E = {lo} and E = {hi}")]
    GridTooCoarse { lo: f64, hi: f64 },
    #[error("E = {energy} is a pole: |lambda| = {lambda:e}")]
    Pole { energy: f64, lambda: f64 },
    #[error("{what} did not converge (last residual {residual:e})")]
    NonConvergence { what: &'static str, residual: f64 },
    #[error("{0}")]
    Config(String),
}

impl Error {
    pub(crate) fn domain(what: &'static str, value: f64, domain: &'static str) -> Self {
        Error::Domain {
            what,
            value,
            domain,
        }
    }
}
