use thiserror::Error;

/// Errors produced by the simulation and diagnostics layers.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("grid size must be even with n >= 8, got n = {0}")]
    InvalidGridSize(usize),

    #[error("box side length must be positive and finite, got L = {0}")]
    InvalidBoxLength(f64),

    #[error("fields live on different grids: {0}^2 (L = {1}) vs {2}^2 (L = {3})")]
    GridMismatch(usize, f64, usize, f64),

    #[error("multiplier is not finite at xi = ({0}, {1})")]
    NonFiniteMultiplier(f64, f64),

    #[error("unsupported Lp exponent p = {0}; only p = 2 and p = 4 are supported")]
    UnsupportedExponent(u32),

    #[error("gaussian width sigma = {sigma} exceeds L/8 = {limit}: periodic images would contaminate the box")]
    GaussianTooWide { sigma: f64, limit: f64 },

    #[error("dealiased products are exact only up to cubic degree, got {0} factors")]
    UnsupportedProductDegree(usize),

    #[error(
        "invalid solver configuration: dt = {dt}, t_final = {t_final}, record_stride = {stride}"
    )]
    InvalidSolverConfig {
        dt: f64,
        t_final: f64,
        stride: usize,
    },

    #[error("non-finite samples after step {step} (t = {t}); integration aborted")]
    IntegrationFailure { step: usize, t: f64 },

    #[error("relative mass drift {drift:.3e} exceeded 1e-6 at step {step}; dt is too large or the run is unstable")]
    MassDrift { step: usize, drift: f64 },

    #[error("multiplier regularity must satisfy 0 < s < 1, got s = {0}")]
    InvalidRegularity(f64),

    #[error("frequency cutoff must be positive and finite, got N = {0}")]
    InvalidCutoff(f64),

    #[error(
        "pair (q = {q}, r = {r}) violates the admissibility relation 2/q = 2(1/2 - 1/r), q > 2"
    )]
    NonAdmissiblePair { q: f64, r: f64 },

    #[error("planner requires s > 1/4, got s = {0}")]
    RegimeError(f64),

    #[error("no lambda in [{lo:.1e}, {hi:.1e}] brackets the energy target {target}")]
    LambdaBracketing { lo: f64, hi: f64, target: f64 },

    #[error("grid policy exhausted: needed n > {max_n} to resolve the rescaled data")]
    GridPolicyExhausted { max_n: usize },

    #[error("interaction scale M = {m_scale} exceeds L/4 = {limit}: periodic wraparound corrupts the interaction range")]
    InteractionScaleTooLarge { m_scale: f64, limit: f64 },

    #[error("weight functions are defined for r >= 0, got r = {0}")]
    NegativeRadius(f64),

    #[error("hessian of the interaction weight is singular at w = 0")]
    SingularSeparation,

    #[error("need at least {need} trajectory samples, got {got}")]
    TooFewSamples { need: usize, got: usize },

    #[error("direct-sum oracle refuses n = {n} (guard n <= {max_n}: O(n^4) cost)")]
    OracleSizeGuard { n: usize, max_n: usize },

    #[error("region {region} sample constraints are unsatisfiable for N = {n_cutoff}")]
    EmptyRegion { region: u8, n_cutoff: f64 },

    #[error("snapshot decode failed: {0}")]
    SnapshotFormat(String),

    #[error("almost-Morawetz partition failed: a single sample interval contributes {contribution:.3e} > eps^4 = {budget:.3e}")]
    PartitionCellOverflow { contribution: f64, budget: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
