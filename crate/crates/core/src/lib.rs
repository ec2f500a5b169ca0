//! Feasibility and synthesis of completely positive maps interpolating
//! between commuting families of Hermitian matrices.
//!
//! Given families {A_1, …, A_k} and {B_1, …, B_k}, the library decides
//! whether a completely positive map Φ with Φ(A_i) = B_i exists — plain,
//! unital, trace preserving, or both — and constructs explicit realizations:
//! Kraus operators from a nonnegative transfer matrix between the joint
//! spectra, and mixed-unitary forms via Birkhoff decomposition or the
//! equal-weight Schur–Horn construction. A verification layer re-derives
//! every claimed property from the operators alone.

pub mod analytic;
pub mod config;
pub mod construct;
pub mod error;
pub mod feasibility;
pub mod linalg;
pub mod matrix;
pub mod pipeline;
pub mod random;
pub mod verify;

pub use analytic::{
    classify, cp_single_feasible, majorizes, tp_single_feasible, unital_single_feasible,
    ClassVerdict, Feasibility, FeasibilityReport, GammaPair, MapClass, SingleSpectrumPair,
};
pub use config::Config;
pub use construct::{
    birkhoff_decompose, dual_map, equal_weight_unitaries, kraus_from_transfer,
    mixed_unitary_from_decomposition, schur_horn_unitary, unital_extension,
    BirkhoffDecomposition, KrausMap, MixedUnitaryMap,
};
pub use error::{Error, Result};
pub use feasibility::{
    find_columnwise, find_transfer_matrix, phase1_simplex, solve_transfer, FeasibilityOutcome,
    FeasibilitySystem, StochasticClass, TransferMatrix,
};
pub use linalg::{
    eig_hermitian, is_commuting_family, pinch_average, simultaneous_diagonalize,
    EigenDecomposition, SpectrumTable,
};
pub use matrix::{C64, ComplexMatrix, HermitianMatrix};
pub use pipeline::{
    analyze_families, synthesize_map, Analysis, Synthesis, SynthesisClass, SynthesizedMap,
};
pub use verify::{
    apply_map, check_properties, choi_matrix, kraus_from_choi, numrange_contained,
    numrange_margins, numrange_support, ChoiMatrix, VerificationReport,
};
