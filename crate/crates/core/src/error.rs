use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Composition or logarithm requested for a series with nonzero constant term.
    #[error("series has nonzero constant term {constant}; {operation} is undefined")]
    NonZeroConstant {
        operation: &'static str,
        constant: String,
    },

    /// A result that the algebra guarantees was violated. Indicates a bug.
    #[error("internal inconsistency: {0}")]
    Internal(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("order-by-order solve hit a zero pivot at order {order}")]
    SolverDegenerate { order: usize },

    #[error("requested row {row} outside 1..={max}")]
    RowOutOfRange { row: usize, max: usize },

    /// No real constants: 1 - 4 x0 - 4 u0 < 0.
    #[error("no real solution: 1 - 4*x0 - 4*u0 = {discriminant} < 0 (u0 = {u0} > (1 - 4*x0)/4 = {limit})")]
    Breakdown {
        x0: f64,
        u0: f64,
        discriminant: f64,
        limit: f64,
    },

    #[error("pole at t = {t} (eps*t = C)")]
    Pole { t: f64 },

    #[error("step size underflow at t = {t} (x = {x}, u = {u})")]
    Stiffness { t: f64, x: f64, u: f64 },

    #[error("trace stopped at t = {t} without crossing the nullcline")]
    TraceIncomplete { t: f64 },

    #[error("bracket [{lo}, {hi}] does not straddle the threshold (both ends {fate})")]
    Bracket { lo: f64, hi: f64, fate: String },

    #[error("fate undecided for x0 = {x0}, u0 = {u0} by t = {t_max}")]
    Undecided { x0: f64, u0: f64, t_max: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
}

impl Error {
    /// Stable machine-readable tag, used by the CLI's JSON error output and the C status codes.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NonZeroConstant { .. } => "non_zero_constant",
            Error::Internal(_) => "internal",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::SolverDegenerate { .. } => "solver_degenerate",
            Error::RowOutOfRange { .. } => "row_out_of_range",
            Error::Breakdown { .. } => "breakdown",
            Error::Pole { .. } => "pole",
            Error::Stiffness { .. } => "stiffness",
            Error::TraceIncomplete { .. } => "trace_incomplete",
            Error::Bracket { .. } => "bracket",
            Error::Undecided { .. } => "undecided",
            Error::InsufficientData(_) => "insufficient_data",
            Error::DegenerateFit(_) => "degenerate_fit",
        }
    }
}
