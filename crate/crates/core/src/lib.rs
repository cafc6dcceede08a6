//! Heaps of pieces over a finite concurrency structure.

mod bitset;
pub mod classify;
pub mod error;
pub mod heap;
pub mod linalg;
pub mod props;
pub mod structure;
pub mod tl;
pub mod verify;

pub use bitset::VertexSet;
pub use error::{Error, Result};
pub use heap::{heaps_equal, Heap, TrivialFactor};
pub use linalg::{boundary_map, is_acyclic, is_strongly_acyclic, kernel_dim, BoundaryMap, FieldChoice};
pub use props::{
    balanced_convex_chains, contract, descents, dismantle, exposes, has_p1, has_p2,
    replay_dismantling, BalancedConvexChain, DescentSets, Exposure, Removal, Side,
};
pub use structure::{ConcurrencyStructure, Piece};
pub use tl::{deletion_test, is_monomial_basis_element, tl_reduce, tl_reduce_random, DeletionOutcome, TlMonomial};
pub use classify::{
    classify_component, connected_components, gamma_pqr, has_property_r, witness_for_component,
    witness_nonregular, Component, FamilyTag, GammaPqr, NonRegularReason, WitnessCertificate,
};
pub use verify::{
    check_kernel_identity, check_regularity, check_universal_implications, connected_labelled_graphs,
    enumerate_heaps, enumerate_p2_heaps, labelled_graphs, run_suite, EnumerationSpec, HeapEnumerator,
    RegularityVerdict, Suite, VerificationReport, Violation,
};
