//! Finite groups, group-labelled complete digraphs and balanced cycles.
//!
//! A cycle is balanced when the product of its arc labels, taken in order,
//! is the identity. The crate provides exact balanced-cycle detection by
//! subset dynamic programming, the shifting and inversion calculus on
//! labellings, constructive stabilizer certificates and efficient tuples, and
//! a harness that checks `n(Γ) = |Γ| + 1` on small groups.

pub mod constructions;
pub mod error;
pub mod group;
pub mod harness;
pub mod labelling;
pub mod paths;
pub mod proof;
pub mod subset;

pub use error::{Error, Result};
pub use group::{build_group, FiniteGroup, GroupElement, GroupSpec, Side};
pub use harness::{compute_n, verify_all, verify_random, CampaignMode, NReport, VerdictReport};
pub use labelling::{CycleWitness, Labelling, LabellingJson, PathWitness, ShiftWitness};
pub use proof::{
    augment_tuple, key_lemma, make_efficient_tuple, prime_finder, validate_tuple, Dichotomy, EfficientTuple,
    KeyLemmaOutcome, StabilizerCertificate, TupleReport,
};
pub use subset::GroupSubset;
