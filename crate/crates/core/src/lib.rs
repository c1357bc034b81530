//! Measurement grouping for second-quantized electronic-structure Hamiltonians.
//!
//! The pipeline turns a molecular Hamiltonian (FCIDUMP integrals or a
//! synthesized benchmark) into a small number of simultaneously measurable
//! sets of Pauli strings, plus the Clifford circuit that diagonalizes each
//! set:
//!
//! 1. [`hamiltonian`] parses integral files and emits spin-orbital excitation
//!    terms in a blocked layout (alpha orbitals first, then beta).
//! 2. [`fermion`] pairs each excitation with its Hermitian conjugate and
//!    expands it into Pauli strings under the Jordan-Wigner mapping.
//! 3. [`baranyai`] partitions the k-subsets of an n-set into classes of
//!    disjoint subsets via staged integral max flow, and packs sparse inputs
//!    greedily against that schedule.
//! 4. [`grouping`] runs the full spin-factorized partition: same-spin double
//!    excitations, cross doubles via rotated pair matchings, repeated-index
//!    triples split into two commuting halves, and one computational-basis
//!    group for the diagonal strings.
//! 5. [`circuit`] synthesizes a {H, Rx(pi/2), CNOT} circuit with a linear
//!    gate count that maps every member of a commuting group to a Z/I string.
//! 6. [`estimator`] is a dense statevector engine used to check that grouped
//!    measurement reproduces direct expectation values exactly and under
//!    multinomial sampling.

pub mod baranyai;
pub mod circuit;
pub mod error;
pub mod estimator;
pub mod fermion;
pub mod grouping;
pub mod hamiltonian;
pub mod pauli;
pub(crate) mod rng;

pub use error::Error;
pub use pauli::{CliffordCircuit, CliffordGate, PauliString, PauliSum, WeightedPauli};

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;
