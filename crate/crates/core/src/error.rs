use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter violates its declared range.
    InvalidParameter { name: &'static str, value: f64 },
    /// A position or argument lies outside the domain of the operation.
    Domain { what: &'static str, value: f64 },
    /// Gamma evaluated at a non-positive integer, or a hypergeometric `c` on a pole.
    Pole { at: f64 },
    /// A series hit its term budget before meeting the requested tolerance.
    Truncation { terms: usize },
    /// Two independent evaluation routes disagree beyond tolerance.
    RouteDisagreement { first: f64, second: f64 },
    /// Zero elapsed time.
    ZeroTime,
    /// The requested time mode or system is not supported by this operation.
    Unsupported(&'static str),
    /// Real-time oscillator evaluation outside the first caustic interval.
    Caustic { phase: f64 },
    /// Energy within the exclusion band of a bound-state pole.
    NearPole { energy: f64, pole: f64 },
    /// Eigenfunction index above the supported maximum.
    IndexOverflow { index: usize, max: usize },
    /// No normalizable zero-energy ground state exists.
    NonNormalizable,
    /// An iterative routine failed to converge.
    Convergence(&'static str),
    /// Spectrum extraction cannot resolve the requested levels.
    IllConditioned { gap_factor: f64 },
    /// Not enough data for the requested estimate.
    InsufficientData { needed: usize, got: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter { name, value } => {
                write!(f, "invalid parameter {name} = {value}")
            }
            Error::Domain { what, value } => write!(f, "{what} out of domain: {value}"),
            Error::Pole { at } => write!(f, "pole at {at}"),
            Error::Truncation { terms } => {
                write!(f, "series not converged after {terms} terms")
            }
            Error::RouteDisagreement { first, second } => {
                write!(f, "evaluation routes disagree: {first} vs {second}")
            }
            Error::ZeroTime => f.write_str("elapsed time must be nonzero"),
            Error::Unsupported(what) => write!(f, "unsupported: {what}"),
            Error::Caustic { phase } => {
                write!(f, "omega*tau = {phase} outside the first caustic interval (0, pi)")
            }
            Error::NearPole { energy, pole } => {
                write!(f, "energy {energy} too close to pole {pole}")
            }
            Error::IndexOverflow { index, max } => {
                write!(f, "index {index} exceeds supported maximum {max}")
            }
            Error::NonNormalizable => f.write_str("ground state is not normalizable"),
            Error::Convergence(what) => write!(f, "{what} failed to converge"),
            Error::IllConditioned { gap_factor } => {
                write!(f, "level gap unresolved (exp(-gap*beta_min) = {gap_factor})")
            }
            Error::InsufficientData { needed, got } => {
                write!(f, "need at least {needed} samples, got {got}")
            }
        }
    }
}

impl core::error::Error for Error {}
