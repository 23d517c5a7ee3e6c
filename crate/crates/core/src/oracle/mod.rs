//! Exact small-system fermionic algebra: normal-ordered operators, the
//! Jordan–Wigner map, η-sector matrices and exact Trotter errors.

mod commutator_bounds;
mod fock;
mod operator;
mod pauli;
mod soundness;

pub use commutator_bounds::{fermionic_commutator_norms, pauli_commutator_norms, CommutatorNorms};
pub use fock::{
    binomial, dense_matrix, exact_trotter_error, fock_matrix, fock_matrix_real, sector_basis,
    sector_block, spectral_norm, spectral_norm_real, SectorSystem, TrotterOrdering,
    FULL_FOCK_LIMIT, SECTOR_LIMIT,
};
pub use operator::{DumpTerm, NormalOrderedOperator, TermKey, MODE_LIMIT, TERM_LIMIT};
pub use pauli::{jordan_wigner, PauliOperator, PauliString, DENSE_QUBIT_LIMIT, JW_MODE_LIMIT};
pub use soundness::{
    check_all, check_spec, exceeds, soundness_grid, SoundnessRecord, Violation, ABSOLUTE_SLACK,
    RELATIVE_SLACK, SMALL_LATTICES,
};
