use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Library-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter violates its domain (negative frequency, `alpha1 >= 1`, ...).
    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    /// Resonator friction `gamma = 2 pi kappa Omega` reaches `2 Omega`; the
    /// shifted frequency of the effective bath would be imaginary.
    #[error("overdamped resonator: kappa = {kappa} >= 1/pi")]
    Overdamped { kappa: f64 },

    /// A retained perturbative denominator fell below the resonance guard.
    #[error("near-resonance denominator {denom:.3e} below guard {guard:.3e} (p = {p}, k = {k})")]
    NearResonance { denom: f64, guard: f64, p: i64, k: i64 },

    /// Requested quadrature tolerance could not be met.
    #[error("quadrature tolerance not met: achieved {achieved:.3e}, requested {requested:.3e}")]
    ToleranceNotMet { achieved: f64, requested: f64 },

    /// A series did not converge within the iteration cap.
    #[error("series did not converge: {0}")]
    NonConvergence(String),

    /// Correlation-function decay is too slow to truncate the kernel
    /// integrals at a finite horizon.
    #[error("correlation decay too slow: required tau_max {required:.3e} exceeds cap {cap:.3e}")]
    SlowDecay { required: f64, cap: f64 },

    /// `k0^+(0)` vanished; the steady-state population is undefined.
    #[error("degenerate kernel: |k0^+(0)| = {magnitude:.3e}")]
    DegenerateKernel { magnitude: f64 },

    /// No point of the grid produced a usable response; calibration is impossible.
    #[error("flat response: max |omega_p Im chi| = {max_abs:.3e}")]
    FlatResponse { max_abs: f64 },

    /// Every grid point failed.
    #[error("all {total} grid points failed; first error: {first}")]
    AllPointsFailed { total: usize, first: String },

    /// Argument outside the validated accuracy range of a special function.
    #[error("special function argument outside validated range: {0}")]
    AccuracyRange(String),

    /// Malformed run configuration.
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
