use std::fmt;

/// Errors raised by the solvers, state machines and experiment runner.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Two vectors that must share a dimension do not.
    DimensionMismatch { expected: usize, got: usize },
    /// Box bounds are non-finite or inverted.
    InvalidBox { index: usize, lower: f64, upper: f64 },
    /// A closed form that needs the saddle inside the boxes was asked for a boundary saddle.
    SaddleNotInterior { x: f64, y: f64 },
    /// Weight and member lists of a combination differ in length.
    LengthMismatch { weights: usize, members: usize },
    /// Weights are not a probability vector.
    OffSimplex { sum: f64 },
    /// Clipped-simplex input has no positive mass.
    ZeroWeights,
    /// Clipped-simplex floor `alpha` is outside `(0, 1]`.
    InvalidAlpha { alpha: f64 },
    /// Hedge weights or their exponentiated update became NaN or infinite.
    NonFiniteWeights,
    /// A learning rate left `(0, inf)`.
    NonPositiveRate { name: &'static str, value: f64 },
    /// Iterative inner solve ran out of iterations.
    InnerSolveDiverged { residual: f64, iterations: usize },
    /// Optimistic auxiliary gap went below zero.
    NegativeDelta { player: u8, value: f64 },
    /// `observe` was called without a matching `emit`.
    ObserveWithoutEmit,
    /// An invariant monitored during a run was violated.
    InvariantBreach { invariant: String, round: u64, detail: String },
    /// Invalid experiment configuration.
    Config(String),
    /// Filesystem failure while writing outputs.
    Io(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            Self::InvalidBox { index, lower, upper } => {
                write!(f, "invalid box bounds at coordinate {index}: [{lower}, {upper}]")
            }
            Self::SaddleNotInterior { x, y } => {
                write!(f, "saddle-not-interior: ({x}, {y}) lies outside the feasible boxes")
            }
            Self::LengthMismatch { weights, members } => {
                write!(f, "{weights} weights for {members} members")
            }
            Self::OffSimplex { sum } => write!(f, "weights are off the simplex (sum {sum})"),
            Self::ZeroWeights => write!(f, "clipped simplex input is identically zero"),
            Self::InvalidAlpha { alpha } => write!(f, "floor parameter {alpha} outside (0, 1]"),
            Self::NonFiniteWeights => write!(f, "hedge weights became non-finite"),
            Self::NonPositiveRate { name, value } => {
                write!(f, "learning rate {name} = {value} is not positive and finite")
            }
            Self::InnerSolveDiverged { residual, iterations } => write!(
                f,
                "inner-solve-diverged: residual {residual:e} after {iterations} iterations"
            ),
            Self::NegativeDelta { player, value } => {
                write!(f, "negative-delta: player {player} recorded {value:e}")
            }
            Self::ObserveWithoutEmit => write!(f, "observe called before emit"),
            Self::InvariantBreach { invariant, round, detail } => {
                write!(f, "invariant `{invariant}` violated at round {round}: {detail}")
            }
            Self::Config(msg) => write!(f, "config error: {msg}"),
            Self::Io(msg) => write!(f, "io error: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
