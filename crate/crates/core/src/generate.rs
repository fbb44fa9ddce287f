//! Level-by-level construction of complete sets of filters and the
//! optimal-size search built on it.
//!
//! Level k is produced from level k-1 by appending every non-redundant
//! comparator to every entry and keeping a candidate only if no present entry
//! subsumes it; an accepted candidate in turn evicts every entry it subsumes.
//! Candidates are processed in a fixed order (parent insertion order, then
//! comparator `(i, j)` ascending), so the resulting sets are identical run to
//! run and for any worker count.
//!
//! Parallel runs batch the candidates: the expensive scans of a batch run
//! concurrently against an immutable snapshot of the current set, and a
//! single merger applies additions and evictions in candidate order.
//! Subsumption is transitive, so a verdict computed against the snapshot
//! stays correct even when the merger has meanwhile evicted the exact entry
//! that produced it.

use std::time::{Duration, Instant};

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use thiserror::Error;

use crate::network::{Comparator, ComparatorNetwork, OutputSet};
use crate::subsumption::{precheck, NetworkSignature, PrecheckStage, Variant};

/// How many candidates go through one snapshot/merge round. Fixed (rather
/// than derived from the worker count) so that the statistics counters are
/// reproducible across runs with different parallelism.
const BATCH: usize = 1024;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenerateError {
    #[error("brute-force enumeration of {count} networks exceeds the oracle bound {bound}")]
    OracleBound { count: u128, bound: u128 },
    #[error("no sorting network on {channels} channels within {ceiling} comparators")]
    CeilingReached { channels: usize, ceiling: usize },
}

/// One kept network with the cached data the subsumption tests read.
#[derive(Clone, Debug)]
pub struct FilterEntry {
    pub network: ComparatorNetwork,
    pub outputs: OutputSet,
    pub signature: NetworkSignature,
    /// Insertion sequence number, unique within the set and increasing in
    /// insertion order.
    pub stable_id: u32,
}

impl FilterEntry {
    fn new(network: ComparatorNetwork, outputs: OutputSet, stable_id: u32) -> FilterEntry {
        let signature = NetworkSignature::of(&outputs);
        FilterEntry {
            network,
            outputs,
            signature,
            stable_id,
        }
    }
}

/// A complete set of filters at one level: networks of equal size on the same
/// channel count, pairwise unrelated under subsumption.
#[derive(Clone, Debug)]
pub struct FilterSet {
    channels: usize,
    level: usize,
    entries: Vec<FilterEntry>,
}

impl FilterSet {
    /// Level 0: the singleton set holding the empty network.
    pub fn initial(channels: usize) -> FilterSet {
        let network = ComparatorNetwork::empty(channels).expect("valid channel count");
        let outputs = network.outputs();
        FilterSet {
            channels,
            level: 0,
            entries: vec![FilterEntry::new(network, outputs, 0)],
        }
    }

    /// Rebuilds a set from bare networks (e.g. a persisted level), recomputing
    /// output sets and signatures. The networks must all have `channels`
    /// channels and `level` comparators.
    pub fn from_networks(
        channels: usize,
        level: usize,
        networks: Vec<ComparatorNetwork>,
    ) -> FilterSet {
        let recompute = |network: ComparatorNetwork| {
            assert_eq!(network.channels(), channels, "channel count mismatch");
            assert_eq!(network.size(), level, "comparator count mismatch");
            let outputs = network.outputs();
            (network, outputs)
        };
        #[cfg(feature = "parallel")]
        let computed: Vec<_> = networks.into_par_iter().map(recompute).collect();
        #[cfg(not(feature = "parallel"))]
        let computed: Vec<_> = networks.into_iter().map(recompute).collect();
        let entries = computed
            .into_iter()
            .enumerate()
            .map(|(id, (network, outputs))| FilterEntry::new(network, outputs, id as u32))
            .collect();
        FilterSet {
            channels,
            level,
            entries,
        }
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    /// The level k: every entry has exactly this many comparators.
    pub fn level(&self) -> usize {
        self.level
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[FilterEntry] {
        &self.entries
    }

    pub fn networks(&self) -> impl Iterator<Item = &ComparatorNetwork> {
        self.entries.iter().map(|e| &e.network)
    }

    /// First entry whose output set collapses to n+1 sequences, if any.
    pub fn find_sorting_network(&self) -> Option<&FilterEntry> {
        self.entries.iter().find(|e| e.outputs.is_sorting())
    }
}

/// Precheck rejections broken down by stage.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PrecheckRejects {
    pub st1: u64,
    pub st2: u64,
    pub st3: u64,
}

impl PrecheckRejects {
    pub fn total(&self) -> u64 {
        self.st1 + self.st2 + self.st3
    }
}

/// Per-level generation statistics, the columns of the experiment tables.
#[derive(Clone, Debug, Default)]
pub struct GenerationStats {
    /// Directed subsumption tests attempted (each runs at least the
    /// prechecks).
    pub total_checks: u64,
    /// Tests that established subsumption.
    pub subsumptions_found: u64,
    /// Candidate permutations examined by the variant machinery, summed over
    /// all tests: ST4 filter evaluations for the permutation variant, fully
    /// verified perfect matchings for the matching variant.
    pub permutations_checked: u64,
    pub precheck_rejects: PrecheckRejects,
    /// Candidates skipped because the appended comparator was redundant.
    pub redundant_skipped: u64,
    pub elapsed: Duration,
}

#[derive(Clone, Copy, Default)]
struct CheckCounters {
    total: u64,
    found: u64,
    perms: u64,
    st1: u64,
    st2: u64,
    st3: u64,
}

impl CheckCounters {
    fn absorb(&mut self, other: &CheckCounters) {
        self.total += other.total;
        self.found += other.found;
        self.perms += other.perms;
        self.st1 += other.st1;
        self.st2 += other.st2;
        self.st3 += other.st3;
    }
}

/// One directed test: does the network behind `(a_sig, a_out)` subsume the
/// one behind `(b_sig, b_out)`?
fn test_subsumes(
    a_sig: &NetworkSignature,
    a_out: &OutputSet,
    b_sig: &NetworkSignature,
    b_out: &OutputSet,
    variant: Variant,
    c: &mut CheckCounters,
) -> bool {
    c.total += 1;
    match precheck(a_sig, b_sig) {
        Err(PrecheckStage::St1) => {
            c.st1 += 1;
            return false;
        }
        Err(PrecheckStage::St2) => {
            c.st2 += 1;
            return false;
        }
        Err(PrecheckStage::St3) => {
            c.st3 += 1;
            return false;
        }
        Ok(()) => {}
    }
    let outcome = variant.subsumes(a_out, b_out);
    c.perms += outcome.candidates_examined;
    if outcome.subsumes {
        c.found += 1;
        true
    } else {
        false
    }
}

struct Survivor {
    network: ComparatorNetwork,
    outputs: OutputSet,
    signature: NetworkSignature,
    /// Snapshot indices of strictly-larger entries the candidate subsumes.
    removals: Vec<u32>,
}

enum EvalKind {
    Redundant,
    Subsumed,
    Survivor(Box<Survivor>),
}

struct CandidateEval {
    kind: EvalKind,
    counters: CheckCounters,
}

fn eval_candidate(
    parent: &FilterEntry,
    comp: Comparator,
    snapshot: &[FilterEntry],
    variant: Variant,
) -> CandidateEval {
    let mut counters = CheckCounters::default();
    if parent.outputs.is_redundant(comp) {
        return CandidateEval {
            kind: EvalKind::Redundant,
            counters,
        };
    }
    let outputs = parent.outputs.extend(comp);
    let signature = NetworkSignature::of(&outputs);

    for entry in snapshot {
        if test_subsumes(
            &entry.signature,
            &entry.outputs,
            &signature,
            &outputs,
            variant,
            &mut counters,
        ) {
            return CandidateEval {
                kind: EvalKind::Subsumed,
                counters,
            };
        }
    }

    // The candidate survived every forward test, so by the mutuality of
    // equal-size subsumption it cannot subsume an equal-size entry either;
    // only strictly larger output sets need the reverse test.
    let mut removals = Vec::new();
    for (idx, entry) in snapshot.iter().enumerate() {
        if entry.signature.total() > signature.total()
            && test_subsumes(
                &signature,
                &outputs,
                &entry.signature,
                &entry.outputs,
                variant,
                &mut counters,
            )
        {
            removals.push(idx as u32);
        }
    }

    CandidateEval {
        kind: EvalKind::Survivor(Box::new(Survivor {
            network: parent.network.extended(comp),
            outputs,
            signature,
            removals,
        })),
        counters,
    }
}

/// All comparators on `channels` channels in lexicographic `(i, j)` order.
fn comparator_universe(channels: usize) -> Vec<Comparator> {
    let mut comps = Vec::with_capacity(channels * (channels - 1) / 2);
    for i in 0..channels {
        for j in (i + 1)..channels {
            comps.push(Comparator::new(i, j));
        }
    }
    comps
}

fn generate_level_inner(prev: &FilterSet, variant: Variant, parallel: bool) -> (FilterSet, GenerationStats) {
    let start = Instant::now();
    let comps = comparator_universe(prev.channels);
    let per_parent = comps.len();
    let candidate_count = prev.entries.len() * per_parent;

    let mut entries: Vec<FilterEntry> = Vec::new();
    let mut alive: Vec<bool> = Vec::new();
    let mut counters = CheckCounters::default();
    let mut redundant_skipped = 0u64;
    let mut next_id = 0u32;

    let mut batch_start = 0usize;
    while batch_start < candidate_count {
        let batch_end = (batch_start + BATCH).min(candidate_count);
        let eval = |g: usize| {
            let parent = &prev.entries[g / per_parent];
            let comp = comps[g % per_parent];
            eval_candidate(parent, comp, &entries, variant)
        };
        let evals = eval_batch(batch_start..batch_end, parallel, &eval);

        let mut batch_added: Vec<usize> = Vec::new();
        for eval in evals {
            counters.absorb(&eval.counters);
            match eval.kind {
                EvalKind::Redundant => redundant_skipped += 1,
                EvalKind::Subsumed => {}
                EvalKind::Survivor(survivor) => {
                    let Survivor {
                        network,
                        outputs,
                        signature,
                        removals,
                    } = *survivor;
                    // Entries added since the snapshot still need the forward
                    // test.
                    let mut subsumed = false;
                    for &ai in &batch_added {
                        if !alive[ai] {
                            continue;
                        }
                        let e = &entries[ai];
                        if test_subsumes(
                            &e.signature,
                            &e.outputs,
                            &signature,
                            &outputs,
                            variant,
                            &mut counters,
                        ) {
                            subsumed = true;
                            break;
                        }
                    }
                    if subsumed {
                        continue;
                    }
                    for &idx in &removals {
                        alive[idx as usize] = false;
                    }
                    for &ai in &batch_added {
                        if !alive[ai] {
                            continue;
                        }
                        let e = &entries[ai];
                        if e.signature.total() > signature.total()
                            && test_subsumes(
                                &signature,
                                &outputs,
                                &e.signature,
                                &e.outputs,
                                variant,
                                &mut counters,
                            )
                        {
                            alive[ai] = false;
                        }
                    }
                    let entry = FilterEntry {
                        network,
                        outputs,
                        signature,
                        stable_id: next_id,
                    };
                    next_id += 1;
                    batch_added.push(entries.len());
                    entries.push(entry);
                    alive.push(true);
                }
            }
        }

        // Compact evicted entries before the next batch snapshots the set.
        if alive.iter().any(|&a| !a) {
            let mut keep = alive.iter().copied();
            entries.retain(|_| keep.next().unwrap());
            alive.clear();
            alive.resize(entries.len(), true);
        }
        batch_start = batch_end;
    }

    let stats = GenerationStats {
        total_checks: counters.total,
        subsumptions_found: counters.found,
        permutations_checked: counters.perms,
        precheck_rejects: PrecheckRejects {
            st1: counters.st1,
            st2: counters.st2,
            st3: counters.st3,
        },
        redundant_skipped,
        elapsed: start.elapsed(),
    };
    let set = FilterSet {
        channels: prev.channels,
        level: prev.level + 1,
        entries,
    };
    (set, stats)
}

fn eval_batch(
    range: std::ops::Range<usize>,
    parallel: bool,
    eval: &(impl Fn(usize) -> CandidateEval + Sync),
) -> Vec<CandidateEval> {
    #[cfg(feature = "parallel")]
    if parallel {
        return range.into_par_iter().map(eval).collect();
    }
    let _ = parallel;
    range.map(eval).collect()
}

fn run_with_workers<T>(workers: usize, f: impl FnOnce(bool) -> T + Send) -> T
where
    T: Send,
{
    assert!(workers >= 1, "worker count must be at least 1");
    #[cfg(feature = "parallel")]
    if workers > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .expect("worker pool");
        return pool.install(|| f(true));
    }
    let _ = workers;
    f(false)
}

/// Produces level k from level k-1. The result is deterministic: identical
/// inputs give an identical set for any `workers` value.
pub fn generate_level(
    prev: &FilterSet,
    variant: Variant,
    workers: usize,
) -> (FilterSet, GenerationStats) {
    run_with_workers(workers, |parallel| {
        generate_level_inner(prev, variant, parallel)
    })
}

/// Runs levels 1..=k_max, invoking `visit` on each completed level, and
/// returns the final set. Only two levels are held in memory at a time;
/// callers that want every level persist them from the callback.
pub fn generate_up_to<F>(
    channels: usize,
    k_max: usize,
    variant: Variant,
    workers: usize,
    mut visit: F,
) -> FilterSet
where
    F: FnMut(&FilterSet, &GenerationStats) + Send,
{
    generate_from(FilterSet::initial(channels), k_max, variant, workers, &mut visit)
}

/// Same as [`generate_up_to`] but continuing from an existing level (e.g. a
/// persisted set loaded for resumption).
pub fn generate_from<F>(
    start: FilterSet,
    k_max: usize,
    variant: Variant,
    workers: usize,
    visit: &mut F,
) -> FilterSet
where
    F: FnMut(&FilterSet, &GenerationStats) + Send,
{
    run_with_workers(workers, move |parallel| {
        let mut current = start;
        while current.level < k_max {
            let (next, stats) = generate_level_inner(&current, variant, parallel);
            visit(&next, &stats);
            current = next;
        }
        current
    })
}

/// Searches the smallest k whose filter set contains a sorting network and
/// returns it with one such network, fully re-verified on all 2^n inputs.
pub fn search_optimal_size(
    channels: usize,
    variant: Variant,
    workers: usize,
    k_ceiling: usize,
) -> Result<(usize, ComparatorNetwork), GenerateError> {
    run_with_workers(workers, |parallel| {
        let mut current = FilterSet::initial(channels);
        for k in 1..=k_ceiling {
            let (next, _) = generate_level_inner(&current, variant, parallel);
            if let Some(entry) = next.find_sorting_network() {
                assert!(
                    entry.network.sorts_all_inputs(),
                    "witness failed full zero-one verification"
                );
                return Ok((k, entry.network.clone()));
            }
            current = next;
        }
        Err(GenerateError::CeilingReached {
            channels,
            ceiling: k_ceiling,
        })
    })
}

/// Every comparator always sorts two channels, so the bubble network on
/// n(n-1)/2 comparators is a universal ceiling for [`search_optimal_size`].
pub fn default_ceiling(channels: usize) -> usize {
    channels * (channels - 1) / 2
}

/// Brute-force oracle: all networks with `channels` channels and exactly `k`
/// comparators, in lexicographic order of their comparator sequences.
/// Rejects requests beyond 10^7 networks.
pub fn brute_force_all(channels: usize, k: usize) -> Result<Vec<ComparatorNetwork>, GenerateError> {
    const BOUND: u128 = 10_000_000;
    let comps = comparator_universe(channels);
    let m = comps.len() as u128;
    let count = m.pow(k as u32);
    if count > BOUND {
        return Err(GenerateError::OracleBound { count, bound: BOUND });
    }
    let mut result = Vec::with_capacity(count as usize);
    let mut digits = vec![0usize; k];
    loop {
        let network = ComparatorNetwork::new(
            channels,
            digits.iter().map(|&d| comps[d]).collect(),
        )
        .expect("comparators from the universe are valid");
        result.push(network);
        // odometer over comparator indices, most significant digit first
        let mut pos = k;
        loop {
            if pos == 0 {
                return Ok(result);
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < comps.len() {
                break;
            }
            digits[pos] = 0;
        }
    }
}
