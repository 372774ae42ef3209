use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("deformation parameter q = {0} is outside (0, 1]")]
    InvalidParameter(f64),

    #[error("exact mode needs a rational square root s = {num}/{den} with 0 < s <= 1")]
    InvalidExactParameter { num: i64, den: i64 },

    #[error("operands carry different deformation parameters")]
    ParameterMismatch,

    #[error("corepresentation degree {requested} exceeds the configured maximum {max}")]
    DegreeTooLarge { requested: u32, max: u32 },

    #[error("element is not in the Podles sphere (nonzero left degree)")]
    NotPodles,

    #[error("vector has support outside the Podles labels (2m, i, m)")]
    NotPodlesSupport,

    #[error("generator `{tag}` is not available at q = {q}")]
    IncompatibleTag { tag: &'static str, q: f64 },

    #[error("point kind does not match the q-branch of the spectrum")]
    BranchMismatch,

    #[error("invalid configuration field `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
