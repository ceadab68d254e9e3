use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid degree distribution: {0}")]
    Distribution(String),

    #[error("value out of domain: {0}")]
    Domain(String),

    #[error("degree sequence cannot be realized: {0}")]
    Parity(String),

    #[error("invalid graph: {0}")]
    Graph(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("no simple graph after {attempts} attempts")]
    SamplingExhausted { attempts: usize },

    #[error("power iteration did not converge after {iterations} iterations (last estimate {last_estimate})")]
    NonConvergence { iterations: usize, last_estimate: f64 },

    #[error("Ihara-Bass oracle failed: {0}")]
    Oracle(String),

    #[error("statistics error: {0}")]
    Statistics(String),

    #[error("immersion violated: {0}")]
    Immersion(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
