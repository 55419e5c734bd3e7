use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("wavevector ({}, {}) is not on the dual lattice of the grid", .k[0], .k[1])]
    OffLattice { k: [f64; 2] },

    #[error("wavenumber modulus {kappa} exceeds the overflow guard {kappa_max}")]
    KappaTooLarge { kappa: f64, kappa_max: f64 },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("expected {expected} samples, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("fluid layer degenerates at node {index} (local depth {depth:e})")]
    DegenerateLayer { index: usize, depth: f64 },

    #[error("near-cusp parameterization at node {index}: |d(X,Y)/dλ|² = {speed2:e}")]
    NearCusp { index: usize, speed2: f64 },

    #[error("required field `{0}` is missing")]
    MissingField(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("order ({n},{m}) is not part of the implemented hierarchy")]
    UnimplementedOrder { n: u32, m: u32 },

    #[error("implicit solve did not converge after {iterations} iterations (last update {update:e})")]
    NonConvergence { iterations: usize, update: f64 },

    #[error("degenerate coefficient 1 + κ·ξ_X = {value:e} at node {index}")]
    DegenerateCoefficient { index: usize, value: f64 },

    #[error("σ̂ = 1/3 removes the dispersive term; travelling-wave constants are undefined")]
    DispersionlessLimit,

    #[error("{family} family not admitted: {reason}")]
    FamilyNotAdmitted { family: &'static str, reason: String },

    #[error("profile denominator vanishes at αz = {alpha_z}")]
    BlowUp { alpha_z: f64 },

    #[error("amplitude {amplitude:e} passed the overflow guard at t = {t}")]
    Overflow { t: f64, amplitude: f64 },

    #[error("degenerate sweep: {0}")]
    DegenerateSweep(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of the numerics (as opposed to rejected inputs).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. }
                | Error::DegenerateCoefficient { .. }
                | Error::BlowUp { .. }
                | Error::Overflow { .. }
                | Error::DegenerateSweep(_)
                | Error::KappaTooLarge { .. }
                | Error::NearCusp { .. }
                | Error::DegenerateLayer { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
