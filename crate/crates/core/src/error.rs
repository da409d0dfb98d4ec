use thiserror::Error;

use crate::linalg::LinalgError;
use crate::roots::RootError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("photon number {n} outside 1..={max}")]
    BadPhotonNumber { n: usize, max: usize },
    #[error("not a density operator: {0}")]
    NotDensityOperator(String),
    #[error("expected a {expected}x{expected} operator, got {rows}x{cols}")]
    BadDimension {
        expected: usize,
        rows: usize,
        cols: usize,
    },
    #[error("state is not in the symmetrized span (fit residual {residual:e})")]
    NotSymmetrized { residual: f64 },
    #[error("infeasible block coefficients ({0})")]
    InfeasibleR(String),
    #[error("squash construction infeasible: choi min eigenvalue {choi_min_eig:e}, constraint residual {constraint_residual:e} after {iterations} iterations")]
    Infeasible {
        choi_min_eig: f64,
        constraint_residual: f64,
        iterations: usize,
    },
    #[error("{what} = {value} outside its domain {domain}")]
    DomainError {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },
    #[error("closed form and direct trace disagree by {deviation:e} ({what})")]
    CrossCheck { what: &'static str, deviation: f64 },
    #[error("group closure exceeded {limit} elements")]
    ClosureOverflow { limit: usize },
    #[error("neglect rule violated for N = {n} at e_b = {e_b}: {reason}")]
    NeglectViolation { n: usize, e_b: f64, reason: String },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Root(#[from] RootError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
