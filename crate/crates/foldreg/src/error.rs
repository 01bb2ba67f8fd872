use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("outside domain: {0}")]
    Domain(String),
    #[error("degenerate configuration: {0}")]
    Degenerate(String),
    #[error("no return to section: {0}")]
    NoReturn(String),
    #[error("no equilibrium: {0}")]
    NoEquilibrium(String),
    #[error("unfolding is not versal: {0}")]
    NotVersal(String),
    #[error("manifold extension failed at x = {x}: {msg}")]
    Extension { x: f64, msg: String },
    #[error("no periodic orbit: {0}")]
    NoOrbit(String),
    #[error("no saddle-node: {0}")]
    NoSaddleNode(String),
    #[error("indeterminate: {0}")]
    Indeterminate(String),
    #[error("trajectory escaped at t = {t}, (x, v) = ({x}, {v})")]
    Escape { t: f64, x: f64, v: f64 },
    #[error("usage: {0}")]
    Usage(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Numerical(_) => "NumericalError",
            Error::Domain(_) => "DomainError",
            Error::Degenerate(_) => "DegenerateError",
            Error::NoReturn(_) => "NoReturnError",
            Error::NoEquilibrium(_) => "NoEquilibrium",
            Error::NotVersal(_) => "NotVersal",
            Error::Extension { .. } => "ExtensionError",
            Error::NoOrbit(_) => "NoOrbit",
            Error::NoSaddleNode(_) => "NoSaddleNode",
            Error::Indeterminate(_) => "Indeterminate",
            Error::Escape { .. } => "EscapeError",
            Error::Usage(_) => "UsageError",
        }
    }
}
