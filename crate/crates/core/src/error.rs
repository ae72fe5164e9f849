use thiserror::Error;

/// Errors surfaced by the library. Preconditions, budgets and retry caps map
/// onto distinct variants so callers (notably the CLI) can translate them
/// into exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("zero has no inverse")]
    ZeroInverse,

    #[error("unsupported field order {0} (need a prime < 2^16 or 2^k with k <= 16)")]
    UnsupportedField(u64),

    #[error("dimension mismatch: expected vectors of length {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("ambient space mismatch between operands")]
    AmbientMismatch,

    #[error("element {0} is not in the field of order {1}")]
    NotInField(u64, u64),

    #[error("enumeration budget exceeded: need {required} items, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u128 },

    #[error("retry cap of {cap} exceeded in {context}")]
    RetryCapExceeded { cap: usize, context: String },

    #[error("graph is not regular: vertex {vertex} has out-degree {out_degree} and in-degree {in_degree}, expected {expected}")]
    NotRegular {
        vertex: usize,
        out_degree: usize,
        in_degree: usize,
        expected: usize,
    },

    #[error("mapping is not a bijection: {0}")]
    NotBijection(String),

    #[error("capacity precondition violated: {0}")]
    Precondition(String),

    #[error("assignment is missing a label for vertex {0}")]
    MissingLabel(usize),

    #[error("oracle answered with the wrong domain: {0}")]
    MalformedAnswer(String),

    #[error("no edge decodes index {0}: decoding distribution undefined")]
    EmptyIndexClass(usize),

    #[error("circuit has no satisfying assignment")]
    UnsatisfiableCircuit,

    #[error("malformed input: {0}")]
    Malformed(String),
}
