use thiserror::Error;

/// Errors produced by the grouping pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid Pauli label character '{0}' (expected I, X, Y or Z)")]
    InvalidLabel(char),

    #[error("qubit count mismatch: {0} vs {1}")]
    QubitMismatch(usize, usize),

    #[error("index {index} out of range for {n} qubits")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("CNOT control and target must differ (got {0})")]
    DegenerateCnot(usize),

    #[error("excitation term is not canonical: {0}")]
    NonCanonicalTerm(String),

    #[error("conjugate coefficients differ beyond tolerance for {key}: {a} vs {b}")]
    NonHermitian { key: String, a: f64, b: f64 },

    #[error("term violates the spin selection rule: {0}")]
    SpinForbidden(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("subset {0:?} does not belong to the schedule")]
    SubsetNotInSchedule(Vec<usize>),

    #[error("duplicate subset {0:?} in greedy input")]
    DuplicateSubset(Vec<usize>),

    #[error("stage flow {got} below required {want}; schedule construction is inconsistent")]
    FlowShortfall { got: i64, want: i64 },

    #[error("group failed the pairwise commutation check: {0}")]
    GroupNotCommuting(String),

    #[error("string {0} was not diagonalized by the synthesized circuit")]
    NotDiagonalized(String),

    #[error("group has a string the pipeline cannot classify: {0}")]
    UnclassifiableString(String),

    #[error("statevector limited to {max} qubits (requested {n})")]
    StateTooLarge { n: usize, max: usize },

    #[error("circuit does not diagonalize its group: {0}")]
    UnverifiedCircuit(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
