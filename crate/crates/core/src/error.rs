use thiserror::Error;

/// Errors shared across the library.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("cutoff mismatch: {left} vs {right}")]
    CutoffMismatch { left: usize, right: usize },

    #[error("index {index} outside truncated basis of dimension {cutoff}")]
    CutoffExceeded { index: usize, cutoff: usize },

    #[error("truncation tail {tail:.3e} exceeds {limit:.3e}; a cutoff of at least {required} is needed")]
    Truncation { tail: f64, limit: f64, required: usize },

    #[error("state vector has zero norm")]
    ZeroNorm,

    #[error("degenerate N=0 N00N state rejected (pass allow_vacuum to permit it)")]
    DegenerateNoon,

    #[error("imaginary residue {residue:.3e} in a quantity that must be real")]
    ImaginaryResidue { residue: f64 },

    #[error("finite-difference step unstable: {coarse} at h vs {fine} at h/2")]
    DerivativeInstability { coarse: f64, fine: f64 },

    #[error("no grid point had usable variance")]
    DegenerateGrid,

    #[error("quadrature bound violated: slack {slack:.3e} (moments are inconsistent)")]
    BoundViolation { slack: f64 },

    #[error(
        "no restart converged (best gradient norm {grad_norm:.3e}, penalty residual {penalty:.3e})"
    )]
    NonConvergence { grad_norm: f64, penalty: f64 },
}

pub type Result<T> = std::result::Result<T, CoreError>;
