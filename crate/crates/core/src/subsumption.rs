//! Subsumption testing between comparator networks.
//!
//! Network `a` subsumes network `b` when some channel permutation maps every
//! output sequence of `a` into the output set of `b`; subsumed networks are
//! prunable during generation. Deciding it starts with the cheap signature
//! prechecks ST1..ST3, then either
//!
//! * variant 1: enumerate all n! permutations, filter each through the
//!   per-cluster zeros/ones inclusion test (ST4) and fully verify the
//!   survivors, or
//! * variant 2: build the bipartite subsumption graph between channel
//!   positions and verify only its perfect matchings, which are exactly the
//!   permutations that survive the positionwise compatibility conditions.

use std::fmt;

use crate::matching::{next_permutation, BipartiteGraph};
use crate::network::{full_mask, OutputSet, Sequence};

/// Which subsumption-testing variant to run after the prechecks.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Variant {
    /// Enumerate all n! permutations, ST4-filtered.
    Permutation,
    /// Enumerate the perfect matchings of the subsumption graph.
    Matching,
}

impl Variant {
    pub fn subsumes(self, a: &OutputSet, b: &OutputSet) -> SubsumptionOutcome {
        match self {
            Variant::Permutation => subsumes_by_permutations(a, b),
            Variant::Matching => subsumes_by_matchings(a, b),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Variant::Permutation => "permutation",
            Variant::Matching => "matching",
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Variant, String> {
        match s {
            "permutation" => Ok(Variant::Permutation),
            "matching" => Ok(Variant::Matching),
            other => Err(format!(
                "unknown variant {other:?}, expected \"permutation\" or \"matching\""
            )),
        }
    }
}

/// Cheap fingerprint of an output set: total and per-cluster sizes plus the
/// zeros/ones masks and their popcounts. Everything ST1..ST3 and the graph
/// construction read, without the sequences themselves.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct NetworkSignature {
    channels: usize,
    total: u32,
    cluster_sizes: Vec<u16>,
    zeros_masks: Vec<u16>,
    zeros_counts: Vec<u8>,
    ones_masks: Vec<u16>,
    ones_counts: Vec<u8>,
}

impl NetworkSignature {
    pub fn of(outputs: &OutputSet) -> NetworkSignature {
        let n = outputs.channels();
        let cluster_sizes: Vec<u16> = (0..=n).map(|p| outputs.cluster_size(p) as u16).collect();
        let zeros_masks: Vec<u16> = (0..=n).map(|p| outputs.zeros_mask(p)).collect();
        let ones_masks: Vec<u16> = (0..=n).map(|p| outputs.ones_mask(p)).collect();
        NetworkSignature {
            channels: n,
            total: cluster_sizes.iter().map(|&s| s as u32).sum(),
            zeros_counts: zeros_masks.iter().map(|m| m.count_ones() as u8).collect(),
            ones_counts: ones_masks.iter().map(|m| m.count_ones() as u8).collect(),
            cluster_sizes,
            zeros_masks,
            ones_masks,
        }
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    /// Total output-set size.
    pub fn total(&self) -> u32 {
        self.total
    }

    pub fn cluster_size(&self, p: usize) -> usize {
        self.cluster_sizes[p] as usize
    }

    pub fn zeros_mask(&self, p: usize) -> u16 {
        self.zeros_masks[p]
    }

    pub fn ones_mask(&self, p: usize) -> u16 {
        self.ones_masks[p]
    }
}

/// Which precheck stage rejected a pair.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PrecheckStage {
    /// Total output-set size comparison.
    St1,
    /// Per-cluster size comparison.
    St2,
    /// Per-cluster zeros/ones count comparison.
    St3,
}

/// Runs ST1..ST3 on two signatures. `Ok(())` means the pair survives the
/// prechecks, not that subsumption holds.
pub fn precheck(a: &NetworkSignature, b: &NetworkSignature) -> Result<(), PrecheckStage> {
    assert_eq!(
        a.channels, b.channels,
        "precheck requires equal channel counts"
    );
    if a.total > b.total {
        return Err(PrecheckStage::St1);
    }
    for (sa, sb) in a.cluster_sizes.iter().zip(&b.cluster_sizes) {
        if sa > sb {
            return Err(PrecheckStage::St2);
        }
    }
    for p in 0..=a.channels {
        if a.zeros_counts[p] > b.zeros_counts[p] || a.ones_counts[p] > b.ones_counts[p] {
            return Err(PrecheckStage::St3);
        }
    }
    Ok(())
}

fn precheck_outputs(a: &OutputSet, b: &OutputSet) -> Result<(), PrecheckStage> {
    assert_eq!(
        a.channels(),
        b.channels(),
        "subsumption requires equal channel counts"
    );
    if a.len() > b.len() {
        return Err(PrecheckStage::St1);
    }
    let n = a.channels();
    for p in 0..=n {
        if a.cluster_size(p) > b.cluster_size(p) {
            return Err(PrecheckStage::St2);
        }
    }
    for p in 0..=n {
        if a.zeros_mask(p).count_ones() > b.zeros_mask(p).count_ones()
            || a.ones_mask(p).count_ones() > b.ones_mask(p).count_ones()
        {
            return Err(PrecheckStage::St3);
        }
    }
    Ok(())
}

/// A channel permutation; `map()[i]` is the image of channel `i`.
///
/// Applied to a sequence, the bit on channel `i` moves to channel `map[i]`,
/// so the zeros/ones position sets of a permuted sequence are the forward
/// images of the original sets.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Permutation {
    map: Vec<usize>,
}

impl Permutation {
    /// Panics unless `map` is a bijection on `0..map.len()`.
    pub fn new(map: Vec<usize>) -> Permutation {
        let mut seen = 0u32;
        for &j in &map {
            assert!(j < map.len() && seen & (1 << j) == 0, "not a permutation");
            seen |= 1 << j;
        }
        Permutation { map }
    }

    pub fn identity(n: usize) -> Permutation {
        Permutation {
            map: (0..n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn apply_to_sequence(&self, s: Sequence) -> Sequence {
        let mut bits = 0u16;
        let mut rest = s.bits();
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            bits |= 1 << self.map[i];
        }
        Sequence::from_bits(bits)
    }

    /// Forward image of a channel-position set.
    pub fn apply_to_mask(&self, mask: u16) -> u16 {
        let mut out = 0u16;
        let mut rest = mask;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            out |= 1 << self.map[i];
        }
        out
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, j) in self.map.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{j}")?;
        }
        write!(f, ")")
    }
}

/// Why a pair was rejected.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Rejection {
    St1,
    St2,
    St3,
    /// The subsumption graph has no perfect matching (variant 2 only).
    NoPerfectMatching,
    /// Every candidate permutation was tried and none verified.
    Exhausted,
}

impl From<PrecheckStage> for Rejection {
    fn from(stage: PrecheckStage) -> Rejection {
        match stage {
            PrecheckStage::St1 => Rejection::St1,
            PrecheckStage::St2 => Rejection::St2,
            PrecheckStage::St3 => Rejection::St3,
        }
    }
}

/// Outcome of a subsumption test, with the counters the experiment tables
/// report.
#[derive(Clone, Debug)]
pub struct SubsumptionOutcome {
    pub subsumes: bool,
    /// A verified witness permutation when `subsumes` is true.
    pub witness: Option<Permutation>,
    pub rejected_by: Option<Rejection>,
    /// Permutations fully verified against the output sets.
    pub candidates_checked: u64,
    /// Candidate permutations the variant examined: permutations passed
    /// through the ST4 filter (variant 1) or perfect matchings produced by
    /// the enumerator (variant 2).
    pub candidates_examined: u64,
}

impl SubsumptionOutcome {
    fn rejected(by: Rejection, checked: u64, examined: u64) -> SubsumptionOutcome {
        SubsumptionOutcome {
            subsumes: false,
            witness: None,
            rejected_by: Some(by),
            candidates_checked: checked,
            candidates_examined: examined,
        }
    }

    fn found(witness: Permutation, checked: u64, examined: u64) -> SubsumptionOutcome {
        SubsumptionOutcome {
            subsumes: true,
            witness: Some(witness),
            rejected_by: None,
            candidates_checked: checked,
            candidates_examined: examined,
        }
    }
}

/// Verifies the subsumption definition for one permutation: every sequence of
/// every cluster of `a`, permuted, must appear in the same cluster of `b`.
pub fn check_permutation(pi: &Permutation, a: &OutputSet, b: &OutputSet) -> bool {
    debug_assert_eq!(a.channels(), b.channels());
    debug_assert_eq!(pi.len(), a.channels());
    for p in 0..=a.channels() {
        let target = b.cluster(p);
        for &s in a.cluster(p) {
            if target.binary_search(&pi.apply_to_sequence(s)).is_err() {
                return false;
            }
        }
    }
    true
}

/// The ST4 inclusion checks for one pair, cluster by cluster (zeros before
/// ones), with the trivially satisfied ones dropped: a source mask of zero
/// can never violate the inclusion, nor can a full destination mask.
fn st4_filters(a: &OutputSet, b: &OutputSet) -> Vec<(u16, u16)> {
    let n = a.channels();
    let full = full_mask(n);
    let mut filters = Vec::with_capacity(2 * (n + 1));
    for p in 0..=n {
        for (src, dst) in [
            (a.zeros_mask(p), b.zeros_mask(p)),
            (a.ones_mask(p), b.ones_mask(p)),
        ] {
            if src != 0 && dst != full {
                filters.push((src, dst));
            }
        }
    }
    filters
}

/// Does the forward image of `src` under `pi` stay inside `dst`?
fn mask_maps_into(pi: &Permutation, src: u16, dst: u16) -> bool {
    let mut rest = src;
    while rest != 0 {
        let i = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        if (dst >> pi.map[i]) & 1 == 0 {
            return false;
        }
    }
    true
}

/// Variant 1: iterate all n! permutations in lexicographic order, filter each
/// through the per-cluster ST4 inclusions (early exit at the first violated
/// cluster) and fully verify the survivors. Returns the first witness.
pub fn subsumes_by_permutations(a: &OutputSet, b: &OutputSet) -> SubsumptionOutcome {
    if let Err(stage) = precheck_outputs(a, b) {
        return SubsumptionOutcome::rejected(stage.into(), 0, 0);
    }
    let filters = st4_filters(a, b);
    let mut pi = Permutation::identity(a.channels());
    let mut examined = 0u64;
    let mut checked = 0u64;
    loop {
        examined += 1;
        if filters
            .iter()
            .all(|&(src, dst)| mask_maps_into(&pi, src, dst))
        {
            checked += 1;
            if check_permutation(&pi, a, b) {
                return SubsumptionOutcome::found(pi, checked, examined);
            }
        }
        if !next_permutation(&mut pi.map) {
            return SubsumptionOutcome::rejected(Rejection::Exhausted, checked, examined);
        }
    }
}

fn graph_rows(a: &OutputSet, b: &OutputSet, strengthened: bool) -> Vec<u16> {
    debug_assert_eq!(a.channels(), b.channels());
    let n = a.channels();
    let full = full_mask(n);
    let mut rows = vec![full; n];
    for p in 0..=n {
        let za = a.zeros_mask(p);
        let zb = b.zeros_mask(p);
        let oa = a.ones_mask(p);
        let ob = b.ones_mask(p);
        let reverse = strengthened && a.cluster_size(p) == b.cluster_size(p);
        for (i, row) in rows.iter_mut().enumerate() {
            let bit = 1u16 << i;
            if za & bit != 0 {
                *row &= zb;
            } else if reverse {
                *row &= !zb & full;
            }
            if oa & bit != 0 {
                *row &= ob;
            } else if reverse {
                *row &= !ob & full;
            }
        }
    }
    rows
}

/// Builds the bipartite subsumption graph between channel positions of the
/// two networks: an edge `(i, j)` requires, for every cluster `p`, that a
/// zero (one) on channel `i` in `a` implies a zero (one) on channel `j` in
/// `b`. Every subsuming permutation is a perfect matching of this graph.
pub fn build_subsumption_graph_basic(a: &OutputSet, b: &OutputSet) -> BipartiteGraph {
    BipartiteGraph::from_rows(graph_rows(a, b, false))
}

/// The subsumption graph with the equal-cluster-size strengthening: for every
/// cluster `p` with `|cluster(a,p)| = |cluster(b,p)|` the reverse
/// implications must hold as well, which can only delete edges. A subsuming
/// permutation maps equal-size clusters onto each other bijectively, so it
/// remains a perfect matching of the strengthened graph.
pub fn build_subsumption_graph(a: &OutputSet, b: &OutputSet) -> BipartiteGraph {
    BipartiteGraph::from_rows(graph_rows(a, b, true))
}

/// Variant 2: enumerate the perfect matchings of the subsumption graph and
/// fully verify each one, read as the permutation `i -> matched j`. Returns
/// the first witness; if the graph has no perfect matching at all the pair
/// is rejected without verifying anything.
pub fn subsumes_by_matchings(a: &OutputSet, b: &OutputSet) -> SubsumptionOutcome {
    if let Err(stage) = precheck_outputs(a, b) {
        return SubsumptionOutcome::rejected(stage.into(), 0, 0);
    }
    let graph = build_subsumption_graph(a, b);
    let mut checked = 0u64;
    for m in graph.perfect_matchings() {
        checked += 1;
        let pi = Permutation::new(m.into_pairing());
        if check_permutation(&pi, a, b) {
            return SubsumptionOutcome::found(pi, checked, checked);
        }
    }
    if checked == 0 {
        SubsumptionOutcome::rejected(Rejection::NoPerfectMatching, 0, 0)
    } else {
        SubsumptionOutcome::rejected(Rejection::Exhausted, checked, checked)
    }
}
