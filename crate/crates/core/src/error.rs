use thiserror::Error;

/// Errors produced by the tensor algebra, the solvers and the frontends.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not {p}-block circulant (max deviation {deviation:.3e})")]
    NotCirculant { p: usize, deviation: f64 },

    #[error("Fourier blocks violate conjugate symmetry (max deviation {deviation:.3e})")]
    ConjugateSymmetry { deviation: f64 },

    #[error("imaginary residue {residue:.3e} exceeds tolerance")]
    ImaginaryResidue { residue: f64 },

    #[error("tensor is singular (Fourier block {block} condition estimate {condition:.3e})")]
    Singular { block: usize, condition: f64 },

    #[error("tensor is not symmetric (relative deviation {deviation:.3e})")]
    NotSymmetric { deviation: f64 },

    #[error("tensor is not T-positive semidefinite (min T-eigenvalue {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("tensor is not T-positive definite (min T-eigenvalue {min_eigenvalue:.3e})")]
    NotPd { min_eigenvalue: f64 },

    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("function is not twice T-differentiable at X (circulant deviation {deviation:.3e})")]
    NotTwiceTDifferentiable { deviation: f64 },

    #[error("function evaluation returned a non-finite value")]
    NonFinite,

    #[error("degenerate Schur complement system (condition estimate {condition:.3e})")]
    Degenerate { condition: f64 },

    #[error("p = {p} does not divide the basis size {size}; valid choices: {divisors:?}")]
    InvalidTubeSize {
        p: usize,
        size: usize,
        divisors: Vec<usize>,
    },

    #[error("polynomial degree {0} is odd")]
    OddDegree(usize),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
