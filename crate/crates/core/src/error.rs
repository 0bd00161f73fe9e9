//! Error type shared by all modules of the crate.

/// Everything that can go wrong across the model, equilibrium search,
/// stability analysis, normal-form construction, contour extraction and
/// orbit integration.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("input `{name}` must be positive")]
    NonPositiveInput { name: &'static str },
    #[error("radiation pressure exceeds gravity (q1 = {q1})")]
    NegativeFactor { q1: f64 },
    #[error("parameter `{name}` out of range (got {value})")]
    ParameterOutOfRange { name: &'static str, value: f64 },
    #[error("evaluation point inside the singularity guard of primary {index}")]
    SingularityAtPrimary { index: u8 },
    #[error("belt potential singular at r = T = 0 with Mb > 0")]
    Singularity,
    #[error("negative radicand in distance locus at y = {y}")]
    NegativeRadicand { y: f64 },
    #[error("triangular points degenerate (radicand = {radicand})")]
    DegenerateTriangular { radicand: f64 },
    #[error("Newton iteration failed to converge (residual {residual} after {iterations} iterations)")]
    NoConvergence { residual: f64, iterations: usize },
    #[error("iteration converged onto primary {index}")]
    ConvergedToPrimary { index: u8 },
    #[error("no sign change of the on-axis gradient in the {label} bracket")]
    RootNotBracketed { label: &'static str },
    #[error("equilibrium is not linearly stable")]
    NotStable,
    #[error("libration frequencies degenerate (|omega1 - omega2| = {gap})")]
    DegenerateFrequencies { gap: f64 },
    #[error("gauge J11 = J12 = 0 unreachable (vanishing eigenvector component)")]
    GaugeUnreachable,
    #[error("mode signature incompatible with the target normal form")]
    SignatureConflict,
    #[error("stability verdict does not change over the mass-ratio range")]
    NoSignChange,
    #[error("trajectory entered the singularity guard at t = {t}")]
    SingularityEncountered { t: f64 },
    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
