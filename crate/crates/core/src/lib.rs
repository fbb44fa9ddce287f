//! Optimal-size sorting network search by generate-and-prune.
//!
//! The library builds complete sets of filters `N^n_k` level by level,
//! pruning networks that subsume one another, until a level contains a
//! sorting network. Subsumption can be tested two ways: by filtered
//! enumeration of all n! channel permutations, or by enumerating the perfect
//! matchings of a bipartite compatibility graph between channel positions,
//! which examines orders of magnitude fewer candidates.
//!
//! Modules:
//!
//! * [`network`] — comparator networks, binary output sets, clusters and
//!   their zeros/ones structure;
//! * [`subsumption`] — the ST1..ST3 prechecks and both testing variants;
//! * [`matching`] — bipartite perfect-matching search and enumeration;
//! * [`generate`] — the level generator, optimal-size search and the
//!   brute-force oracle;
//! * [`notation`] / [`persist`] — text notation, level files and stats
//!   records.

pub mod generate;
pub mod matching;
pub mod network;
pub mod notation;
pub mod persist;
pub mod subsumption;

pub use generate::{
    brute_force_all, default_ceiling, generate_level, generate_up_to, search_optimal_size,
    FilterEntry, FilterSet, GenerateError, GenerationStats,
};
pub use matching::{BipartiteGraph, Matching, PerfectMatchings};
pub use network::{Comparator, ComparatorNetwork, NetworkError, OutputSet, Sequence, MAX_CHANNELS};
pub use notation::{infer_channels, parse_network, render_network, ParseError};
pub use subsumption::{
    build_subsumption_graph, check_permutation, precheck, subsumes_by_matchings,
    subsumes_by_permutations, NetworkSignature, Permutation, PrecheckStage, Rejection,
    SubsumptionOutcome, Variant,
};
