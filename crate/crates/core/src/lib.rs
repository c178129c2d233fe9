//! Coalition formation for competitive cross-silo federated learning.
//!
//! Participants ("silos") train better models together, but some of them
//! compete with each other and must not exchange value, even indirectly.
//! This crate partitions the participants into coalitions that respect two
//! collaboration principles:
//!
//! 1. **No free riders** — in any coalition of two or more, every member
//!    both contributes benefit to, and gains benefit from, the rest.
//! 2. **Competitor isolation** — no participant's data may reach a
//!    competitor through any chain of within-coalition collaborations.
//!
//! The entry point is [`former::form_coalitions`], which seeds coalitions
//! from a clique cover of the "not competing" graph refined by strongly
//! connected components of the benefit graph, then greedily merges
//! coalitions along cycles, paths, and edges of the coalition-level quotient
//! graphs until no admissible merge remains. The [`oracle`] module checks
//! both principles and searches exhaustively for utility-improving merges
//! the former might have missed, so one side can always audit the other.

pub mod error;
pub mod former;
pub mod graph;
pub mod oracle;
pub mod primitives;

pub use error::Error;
pub use former::{
    baseline_partition, form_coalitions, form_from_baseline, FormConfig, FormationResult,
    MergeCandidate, MergeKind, QuotientState,
};
pub use graph::{BenefitGraph, Coalition, CompetingGraph, DataUsageGraph, NodeId, Partition};
pub use oracle::{verify, MergeMode, MissingFlow, VerificationReport, Violation};
pub use primitives::TieBreak;

/// Tolerance for every floating-point utility comparison in this crate.
pub const UTILITY_TOL: f64 = 1e-9;
