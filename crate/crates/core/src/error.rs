use thiserror::Error;

/// Errors raised anywhere in the simulator.
///
/// The CLI maps each family onto a process exit code, see [`Error::exit_code`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("degenerate kinematics: {0}")]
    DegenerateKinematics(String),

    #[error("channel closed: {0}")]
    ChannelClosed(String),

    #[error("propagator resonance at n1 = {n1}: |q_mid^2 - m*^2| = {offshell:.6e} eV^2 below guard {guard:.6e} eV^2")]
    Resonance { n1: i32, offshell: f64, guard: f64 },

    #[error("convergence failure: {what} (achieved {achieved:.3e}, requested {requested:.3e})")]
    Convergence {
        what: String,
        achieved: f64,
        requested: f64,
    },

    #[error("undefined state: {0}")]
    UndefinedState(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// 0 success, 2 config error, 3 physics-domain error, 4 convergence failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Json(_) => 2,
            Error::DegenerateKinematics(_)
            | Error::ChannelClosed(_)
            | Error::Resonance { .. }
            | Error::UndefinedState(_)
            | Error::Domain(_)
            | Error::Contract(_) => 3,
            Error::Convergence { .. } => 4,
            Error::Io(_) | Error::Csv(_) => 1,
        }
    }
}
