use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The theorem being audited only speaks about exponents above its bound.
    #[error("exponent {p} is outside the theorem range (requires p > {bound})")]
    OutOfTheoremRange { p: u64, bound: u64 },

    /// Exhaustive search was asked to run on a value above its documented cap.
    #[error("{n} exceeds the brute-force search cap of {cap}")]
    TooLarge { n: String, cap: u64 },

    /// `n` shares a factor with `2d`, so the unramified comparison does not apply.
    #[error("G_{p} shares a factor with 2*{d}; not audited")]
    Ramified { p: u64, d: u64 },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
