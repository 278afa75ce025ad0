use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid modulus {0}: must be a positive integer")]
    InvalidModulus(u64),

    #[error("character label {label:?} is not valid for modulus {q}")]
    InvalidLabel { q: u64, label: String },

    #[error("character mod {q} is not primitive (conductor {conductor})")]
    NotPrimitive { q: u64, conductor: u64 },

    #[error("modulus mismatch: expected {expected}, found {found}")]
    ModulusMismatch { expected: u64, found: u64 },

    #[error("x = {x} exceeds the sieve ceiling {ceiling}; use the zero-side mode for larger arguments")]
    CapacityExceeded { x: f64, ceiling: u64 },

    #[error("incomplete character list: got {got} of {expected} characters mod {q}")]
    IncompleteCharacters { q: u64, got: usize, expected: u64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("requested precision of {digits} digits is unattainable within {max_bits} working bits")]
    PrecisionUnattainable { digits: u32, max_bits: u32 },

    #[error("insufficient zero precision: {available} digits available, {required} required")]
    InsufficientPrecision { available: u32, required: u32 },

    #[error("zero set for {label} is not verified ({status}); pass allow_unverified to override")]
    UnverifiedZeros { label: String, status: String },

    #[error("missing zero set for character {0}")]
    MissingZeros(String),

    #[error("zero file schema violation at line {line}: {message}")]
    Schema { line: usize, message: String },

    #[error("tally cache: {0}")]
    Cache(String),

    #[error("memory budget exceeded: {cells} cells requested, budget {budget}; use the streaming mode")]
    MemoryBudget { cells: u128, budget: u128 },

    #[error("search bound N = {n} is too large for exhaustive scanning (limit {limit})")]
    SearchTooLarge { n: String, limit: u64 },

    #[error("no synchronized n >= {floor} found up to N = {n} ({hits} hits in total, lower bound {bound:.3})")]
    SyncMiss { floor: String, n: String, hits: usize, bound: f64 },

    #[error("family error: {0}")]
    Family(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
