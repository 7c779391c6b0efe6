use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("operator is not Hermitian (defect {defect:.3e})")]
    NonHermitian { defect: f64 },
    #[error("generator has an eigenvalue {re:.3e}{im:+.3e}i outside the open left half-plane")]
    UnstableGenerator { re: f64, im: f64 },
    #[error("kernel is not diagonalizable (biorthogonal Gram condition {condition:.3e})")]
    DegenerateKernel { condition: f64 },
    #[error("stationary state is not unique (kernel dimension {dim})")]
    DegenerateSteadyState { dim: usize },
    #[error("right-hand side is not in the decaying subspace (relative defect {defect:.3e})")]
    ProjectionViolation { defect: f64 },
    #[error("linear solve failed (relative residual {residual:.3e})")]
    SolverFailure { residual: f64 },
    #[error("integrator step size collapsed at t = {t:.6e} (h = {h:.3e})")]
    Stiffness { t: f64, h: f64 },
    #[error("decay fit rejected (R² = {r2:.4})")]
    FitQuality { r2: f64 },
    #[error("operator basis does not span the dissipator (relative residual {residual:.3e})")]
    BasisMismatch { residual: f64 },
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("outside the perturbative regime: {0}")]
    Regime(String),
    #[error("numerical failure: {0}")]
    NumericalFailure(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter { name, reason: reason.into() }
}

/// Non-fatal regime diagnostics attached to reductions.
#[derive(Debug, Clone, PartialEq)]
pub enum Warning {
    /// `gap / (g‖E‖)` below the recommended separation of time scales.
    WeakGap { ratio: f64 },
    /// `ε‖L₁‖ / gap` above the recommended perturbative bound.
    StrongPerturbation { ratio: f64 },
    /// Large-`ω₂` asymptotics evaluated with `ω₂ / max(κ, |Δ|, ω̄₁)` below 1.
    AsymptoticRegime { ratio: f64 },
}

impl std::fmt::Display for Warning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Warning::WeakGap { ratio } => write!(f, "gap/g = {ratio:.3} < 5, elimination may be inaccurate"),
            Warning::StrongPerturbation { ratio } => {
                write!(f, "eps*|L1|/gap = {ratio:.3} > 0.2, perturbation series may not converge")
            }
            Warning::AsymptoticRegime { ratio } => {
                write!(f, "omega2 exceeds the other rates only by {ratio:.3}, asymptotic form is unreliable")
            }
        }
    }
}
