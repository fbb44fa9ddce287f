//! Comparator networks on binary inputs.
//!
//! By the zero-one principle it is enough to study a network's behaviour on
//! the 2^n binary sequences, so everything here works on bit words: channel
//! `i` lives in bit `i` of a [`Sequence`]. The central object is the
//! [`OutputSet`] of a network, partitioned into clusters by population count
//! and carrying the per-cluster zeros/ones masks that the subsumption tests
//! read.

use std::fmt;

use thiserror::Error;

/// Largest supported channel count. Sequences are stored in a 16-bit word.
pub const MAX_CHANNELS: usize = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NetworkError {
    #[error("channel count {0} not in 1..={MAX_CHANNELS}")]
    ChannelsOutOfRange(usize),
    #[error("comparator {low}:{high} does not fit a {channels}-channel network")]
    ComparatorOutOfRange {
        low: usize,
        high: usize,
        channels: usize,
    },
}

/// A compare-exchange gate between two channels.
///
/// After the gate, the smaller value sits on `low` and the larger on `high`.
/// Only standard comparators (`low < high`) are representable.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Comparator {
    low: u8,
    high: u8,
}

impl Comparator {
    /// Panics if `low >= high` or `high` exceeds [`MAX_CHANNELS`].
    pub fn new(low: usize, high: usize) -> Self {
        assert!(
            low < high && high < MAX_CHANNELS,
            "invalid comparator {low}:{high}"
        );
        Comparator {
            low: low as u8,
            high: high as u8,
        }
    }

    pub fn low(self) -> usize {
        self.low as usize
    }

    pub fn high(self) -> usize {
        self.high as usize
    }
}

impl fmt::Debug for Comparator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.low, self.high)
    }
}

/// A binary sequence on up to [`MAX_CHANNELS`] channels; channel `i` is bit `i`.
///
/// Textual renderings print channel 0 leftmost, so `1010` assigns 1 to
/// channel 0, 0 to channel 1, and so on.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Sequence(u16);

impl Sequence {
    pub const fn from_bits(bits: u16) -> Self {
        Sequence(bits)
    }

    pub const fn bits(self) -> u16 {
        self.0
    }

    pub fn bit(self, channel: usize) -> bool {
        (self.0 >> channel) & 1 == 1
    }

    /// Number of channels carrying a 1 (the cluster index of this sequence).
    pub fn ones(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Runs one comparator over the sequence.
    pub fn apply(self, c: Comparator) -> Sequence {
        let lo = (self.0 >> c.low) & 1;
        let hi = (self.0 >> c.high) & 1;
        if lo > hi {
            Sequence(self.0 ^ ((1 << c.low) | (1 << c.high)))
        } else {
            self
        }
    }

    /// True iff the bits are non-decreasing from channel 0 to `channels - 1`,
    /// i.e. all zeros precede all ones.
    pub fn is_sorted(self, channels: usize) -> bool {
        let p = self.ones() as u32;
        self.0 == (((1u32 << p) - 1) << (channels as u32 - p)) as u16
    }

    /// Renders the sequence as a 0/1 string, channel 0 leftmost.
    pub fn render(self, channels: usize) -> String {
        (0..channels)
            .map(|ch| if self.bit(ch) { '1' } else { '0' })
            .collect()
    }

    /// Parses a 0/1 string, channel 0 leftmost.
    pub fn parse(text: &str) -> Option<Sequence> {
        if text.is_empty() || text.len() > MAX_CHANNELS {
            return None;
        }
        let mut bits = 0u16;
        for (ch, b) in text.bytes().enumerate() {
            match b {
                b'1' => bits |= 1 << ch,
                b'0' => {}
                _ => return None,
            }
        }
        Some(Sequence(bits))
    }
}

impl fmt::Debug for Sequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Sequence({:#06x})", self.0)
    }
}

/// An ordered sequence of comparators on a fixed number of channels.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ComparatorNetwork {
    channels: usize,
    comparators: Vec<Comparator>,
}

impl ComparatorNetwork {
    pub fn new(channels: usize, comparators: Vec<Comparator>) -> Result<Self, NetworkError> {
        if channels == 0 || channels > MAX_CHANNELS {
            return Err(NetworkError::ChannelsOutOfRange(channels));
        }
        for c in &comparators {
            if c.high() >= channels {
                return Err(NetworkError::ComparatorOutOfRange {
                    low: c.low(),
                    high: c.high(),
                    channels,
                });
            }
        }
        Ok(ComparatorNetwork {
            channels,
            comparators,
        })
    }

    pub fn empty(channels: usize) -> Result<Self, NetworkError> {
        Self::new(channels, Vec::new())
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    /// The network's size, i.e. its comparator count.
    pub fn size(&self) -> usize {
        self.comparators.len()
    }

    pub fn comparators(&self) -> &[Comparator] {
        &self.comparators
    }

    /// The concatenation `self;(c)`, one comparator longer.
    pub fn extended(&self, c: Comparator) -> ComparatorNetwork {
        debug_assert!(c.high() < self.channels);
        let mut comparators = Vec::with_capacity(self.comparators.len() + 1);
        comparators.extend_from_slice(&self.comparators);
        comparators.push(c);
        ComparatorNetwork {
            channels: self.channels,
            comparators,
        }
    }

    /// Passes `input` through every comparator in order.
    pub fn apply(&self, input: Sequence) -> Sequence {
        self.comparators.iter().fold(input, |s, &c| s.apply(c))
    }

    /// Computes the exact output set by enumerating all 2^n binary inputs.
    pub fn outputs(&self) -> OutputSet {
        let mut clusters: Vec<Vec<Sequence>> = vec![Vec::new(); self.channels + 1];
        for bits in 0..(1u32 << self.channels) {
            let out = self.apply(Sequence(bits as u16));
            clusters[out.ones()].push(out);
        }
        OutputSet::from_clusters(self.channels, clusters)
    }

    /// Full zero-one verification: sorts every one of the 2^n binary inputs.
    pub fn sorts_all_inputs(&self) -> bool {
        (0..(1u32 << self.channels))
            .all(|bits| self.apply(Sequence(bits as u16)).is_sorted(self.channels))
    }
}

impl fmt::Debug for ComparatorNetwork {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComparatorNetwork(n={}, [", self.channels)?;
        for (i, c) in self.comparators.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c:?}")?;
        }
        write!(f, "])")
    }
}

/// The output set of a comparator network, partitioned into the n+1 clusters
/// by population count, with cached per-cluster zeros/ones masks.
///
/// Cluster `p` holds the output sequences with exactly `p` ones, as a sorted
/// word list. `zeros_mask(p)` has bit `i` set iff some sequence of cluster `p`
/// carries a 0 on channel `i`; `ones_mask(p)` likewise for 1s.
#[derive(Clone, PartialEq, Eq)]
pub struct OutputSet {
    channels: usize,
    words: Vec<Sequence>,
    offsets: Vec<u32>,
    zeros_masks: Vec<u16>,
    ones_masks: Vec<u16>,
}

impl OutputSet {
    fn from_clusters(channels: usize, clusters: Vec<Vec<Sequence>>) -> OutputSet {
        debug_assert_eq!(clusters.len(), channels + 1);
        let full = full_mask(channels);
        let mut words = Vec::new();
        let mut offsets = Vec::with_capacity(channels + 2);
        let mut zeros_masks = Vec::with_capacity(channels + 1);
        let mut ones_masks = Vec::with_capacity(channels + 1);
        offsets.push(0);
        for mut cluster in clusters {
            cluster.sort_unstable();
            cluster.dedup();
            let mut zeros = 0u16;
            let mut ones = 0u16;
            for &s in &cluster {
                zeros |= !s.bits() & full;
                ones |= s.bits();
            }
            zeros_masks.push(zeros);
            ones_masks.push(ones);
            words.extend_from_slice(&cluster);
            offsets.push(words.len() as u32);
        }
        OutputSet {
            channels,
            words,
            offsets,
            zeros_masks,
            ones_masks,
        }
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    /// Total number of distinct output sequences.
    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// The sequences with exactly `p` ones, sorted ascending by word value.
    pub fn cluster(&self, p: usize) -> &[Sequence] {
        &self.words[self.offsets[p] as usize..self.offsets[p + 1] as usize]
    }

    pub fn cluster_size(&self, p: usize) -> usize {
        (self.offsets[p + 1] - self.offsets[p]) as usize
    }

    pub fn cluster_sizes(&self) -> Vec<usize> {
        (0..=self.channels).map(|p| self.cluster_size(p)).collect()
    }

    /// Channels on which at least one sequence of cluster `p` carries a 0.
    pub fn zeros_mask(&self, p: usize) -> u16 {
        self.zeros_masks[p]
    }

    /// Channels on which at least one sequence of cluster `p` carries a 1.
    pub fn ones_mask(&self, p: usize) -> u16 {
        self.ones_masks[p]
    }

    /// Renders the zeros set of cluster `p` with `0` on member channels and
    /// `*` elsewhere, e.g. `0*0*`.
    pub fn zeros_seq(&self, p: usize) -> String {
        render_masked(self.zeros_masks[p], self.channels, '0')
    }

    /// Renders the ones set of cluster `p` with `1` on member channels and
    /// `*` elsewhere, e.g. `*1*1`.
    pub fn ones_seq(&self, p: usize) -> String {
        render_masked(self.ones_masks[p], self.channels, '1')
    }

    pub fn iter(&self) -> impl Iterator<Item = Sequence> + '_ {
        self.words.iter().copied()
    }

    pub fn contains(&self, s: Sequence) -> bool {
        self.cluster(s.ones()).binary_search(&s).is_ok()
    }

    /// The output set of the extended network `C;(c)`, computed incrementally
    /// from this set instead of re-enumerating 2^n inputs.
    pub fn extend(&self, c: Comparator) -> OutputSet {
        let clusters = (0..=self.channels)
            .map(|p| self.cluster(p).iter().map(|&s| s.apply(c)).collect())
            .collect();
        OutputSet::from_clusters(self.channels, clusters)
    }

    /// True iff appending `c` would leave the output set unchanged, i.e.
    /// no output sequence carries a 1 on `c.low` and a 0 on `c.high`.
    pub fn is_redundant(&self, c: Comparator) -> bool {
        self.words
            .iter()
            .all(|s| !(s.bit(c.low()) && !s.bit(c.high())))
    }

    /// A network is a sorting network iff its output set has exactly n+1
    /// elements, one per cluster.
    pub fn is_sorting(&self) -> bool {
        self.len() == self.channels + 1
    }
}

impl fmt::Debug for OutputSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "OutputSet(n={}, ", self.channels)?;
        for p in 0..=self.channels {
            if p > 0 {
                write!(f, " | ")?;
            }
            let strings: Vec<String> =
                self.cluster(p).iter().map(|s| s.render(self.channels)).collect();
            write!(f, "{{{}}}", strings.join(","))?;
        }
        write!(f, ")")
    }
}

pub(crate) fn full_mask(channels: usize) -> u16 {
    (((1u32 << channels) - 1) & 0xffff) as u16
}

fn render_masked(mask: u16, channels: usize, member: char) -> String {
    (0..channels)
        .map(|ch| if (mask >> ch) & 1 == 1 { member } else { '*' })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn net(channels: usize, comps: &[(usize, usize)]) -> ComparatorNetwork {
        ComparatorNetwork::new(
            channels,
            comps.iter().map(|&(i, j)| Comparator::new(i, j)).collect(),
        )
        .unwrap()
    }

    fn seq(text: &str) -> Sequence {
        Sequence::parse(text).unwrap()
    }

    fn cluster_strings(out: &OutputSet, p: usize) -> Vec<String> {
        // clusters are sorted by word value; sort the renderings for
        // comparison against listings in reading order
        let mut v: Vec<String> = out
            .cluster(p)
            .iter()
            .map(|s| s.render(out.channels()))
            .collect();
        v.sort();
        v
    }

    // Figure-1 network of the 4-channel sorting example, 0-based.
    fn fig1() -> ComparatorNetwork {
        net(4, &[(0, 1), (2, 3), (1, 3), (0, 2), (1, 2)])
    }

    #[test]
    fn apply_fig1_example() {
        assert_eq!(fig1().apply(seq("1010")), seq("0011"));
    }

    #[test]
    fn apply_empty_network_is_identity() {
        let c = ComparatorNetwork::empty(4).unwrap();
        assert_eq!(c.apply(seq("1010")), seq("1010"));
    }

    #[test]
    fn apply_all_zero_is_fixed_point() {
        assert_eq!(fig1().apply(seq("0000")), seq("0000"));
    }

    #[test]
    fn apply_preserves_popcount() {
        let c = fig1();
        for bits in 0..16u16 {
            let s = Sequence::from_bits(bits);
            assert_eq!(c.apply(s).ones(), s.ones());
        }
    }

    #[test]
    fn outputs_two_comparator_example() {
        // (0,1);(2,3) on 4 channels, the worked cluster listing.
        let out = net(4, &[(0, 1), (2, 3)]).outputs();
        assert_eq!(cluster_strings(&out, 0), ["0000"]);
        assert_eq!(cluster_strings(&out, 1), ["0001", "0100"]);
        assert_eq!(cluster_strings(&out, 2), ["0011", "0101", "1100"]);
        assert_eq!(cluster_strings(&out, 3), ["0111", "1101"]);
        assert_eq!(cluster_strings(&out, 4), ["1111"]);
        assert_eq!(out.len(), 9);
        assert!(!out.is_sorting());
    }

    #[test]
    fn outputs_empty_network() {
        let out = ComparatorNetwork::empty(3).unwrap().outputs();
        assert_eq!(out.len(), 8);
        assert_eq!(out.cluster_sizes(), [1, 3, 3, 1]);
    }

    #[test]
    fn outputs_sorting_network_has_one_per_cluster() {
        let out = fig1().outputs();
        assert!(out.is_sorting());
        let rendered: Vec<String> = out.iter().map(|s| s.render(4)).collect();
        assert_eq!(rendered, ["0000", "0001", "0011", "0111", "1111"]);
    }

    #[test]
    fn extend_matches_scratch_outputs_from_empty() {
        let empty = ComparatorNetwork::empty(4).unwrap();
        let extended = empty.outputs().extend(Comparator::new(0, 1));
        let scratch = net(4, &[(0, 1)]).outputs();
        assert_eq!(extended, scratch);
        assert_eq!(extended.len(), 12);
    }

    #[test]
    fn extend_with_repeated_comparator_is_identity() {
        let base = net(4, &[(0, 1), (2, 3)]).outputs();
        assert_eq!(base.extend(Comparator::new(0, 1)), base);
    }

    #[test]
    fn extend_matches_scratch_outputs() {
        let base = net(4, &[(0, 1), (2, 3)]).outputs();
        let extended = base.extend(Comparator::new(1, 3));
        let scratch = net(4, &[(0, 1), (2, 3), (1, 3)]).outputs();
        assert_eq!(extended, scratch);
    }

    #[test]
    fn zeros_and_ones_renderings() {
        let out = net(4, &[(0, 1), (2, 3)]).outputs();
        // zeros(C,3) = {0,2}: rendered 0*0*
        assert_eq!(out.zeros_seq(3), "0*0*");
        assert_eq!(out.zeros_mask(3), 0b0101);
        // ones(C,1) = {1,3}: rendered *1*1
        assert_eq!(out.ones_seq(1), "*1*1");
        assert_eq!(out.ones_mask(1), 0b1010);
        // the zero cluster has no ones at all
        assert_eq!(out.ones_seq(0), "****");
        assert_eq!(out.ones_mask(0), 0);
    }

    #[test]
    fn redundant_repeated_comparator() {
        let out = net(2, &[(0, 1)]).outputs();
        assert!(out.is_redundant(Comparator::new(0, 1)));
    }

    #[test]
    fn non_redundant_on_empty_network() {
        let out = ComparatorNetwork::empty(2).unwrap().outputs();
        assert!(!out.is_redundant(Comparator::new(0, 1)));
    }

    #[test]
    fn non_redundant_when_witness_sequence_exists() {
        // 1100 is an output of (0,1);(2,3) and violates x0 <= x2.
        let out = net(4, &[(0, 1), (2, 3)]).outputs();
        assert!(out.contains(seq("1100")));
        assert!(!out.is_redundant(Comparator::new(0, 2)));
    }

    #[test]
    fn sorting_predicate_examples() {
        assert!(fig1().outputs().is_sorting());
        assert!(!ComparatorNetwork::empty(2).unwrap().outputs().is_sorting());
        assert!(!net(4, &[(0, 1), (2, 3)]).outputs().is_sorting());
    }

    #[test]
    fn repeated_final_comparator_is_idempotent() {
        let c = Comparator::new(1, 2);
        let base = net(4, &[(0, 1), (2, 3)]);
        let once = base.extended(c);
        let twice = once.extended(c);
        for bits in 0..16u16 {
            let s = Sequence::from_bits(bits);
            assert_eq!(once.apply(s), twice.apply(s));
        }
    }

    #[test]
    fn sorted_predicate() {
        assert!(seq("0011").is_sorted(4));
        assert!(seq("0000").is_sorted(4));
        assert!(seq("1111").is_sorted(4));
        assert!(!seq("0101").is_sorted(4));
        assert!(!seq("1000").is_sorted(4));
    }

    #[test]
    fn rejects_out_of_range_channels() {
        assert!(ComparatorNetwork::empty(0).is_err());
        assert!(ComparatorNetwork::empty(17).is_err());
        assert!(ComparatorNetwork::new(3, vec![Comparator::new(0, 3)]).is_err());
    }

    #[test]
    fn zero_one_principle_at_output_set_level() {
        // is_sorting(outputs(C)) iff C sorts every binary input.
        for comps in [
            vec![(0, 1), (2, 3)],
            vec![(0, 1), (2, 3), (1, 3), (0, 2), (1, 2)],
            vec![(0, 1), (1, 2), (0, 1)],
            vec![(0, 1), (1, 2), (2, 3), (0, 1), (1, 2), (0, 1)],
        ] {
            let c = net(4, &comps);
            assert_eq!(c.outputs().is_sorting(), c.sorts_all_inputs());
        }
    }
}
