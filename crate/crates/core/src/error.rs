//! Error type shared by every module in the crate.

/// Everything that can go wrong in the pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A catalogue lookup with a name we do not know.
    #[error("unknown system '{name}'; available: {available}")]
    UnknownSystem { name: String, available: String },

    /// An argument violates an operation's preconditions.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A series is shorter than the operation requires.
    #[error("series too short: need at least {needed} samples, got {got}")]
    SeriesTooShort { needed: usize, got: usize },

    /// The integrator left the finite-overflow guard.
    #[error("trajectory diverged at step {step}: component magnitude exceeded {guard:e}")]
    Divergence { step: usize, guard: f64 },

    /// A cross-map library has fewer points than the neighbor rule needs.
    #[error("library too small: need at least {needed} points, got {got}")]
    LibraryTooSmall { needed: usize, got: usize },

    /// A segment produced by clustering cannot support cross mapping.
    #[error("segment too small for cross mapping: {size} points, minimum {minimum}")]
    SegmentTooSmall { size: usize, minimum: usize },

    /// Input degenerate for the requested computation (constant series,
    /// coincident points, ...).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// A numerical procedure lost too much precision to be trusted.
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn messages_name_the_quantities() {
        let e = Error::SeriesTooShort { needed: 40, got: 7 };
        assert_eq!(e.to_string(), "series too short: need at least 40 samples, got 7");
        let e = Error::Divergence { step: 41, guard: 1e12 };
        assert!(e.to_string().contains("step 41"));
        let e = Error::SegmentTooSmall { size: 11, minimum: 20 };
        assert!(e.to_string().contains("11 points"));
    }
}
