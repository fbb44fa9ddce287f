//! Bipartite matching machinery: one perfect matching via augmenting paths,
//! and lazy enumeration of all perfect matchings.
//!
//! Graphs here are tiny (both sides have at most [`MAX_CHANNELS`] vertices),
//! so adjacency is a bitmask row per left vertex. The enumerator follows the
//! classic partition scheme: starting from a seed matching, find an
//! alternating cycle, emit the swapped matching, then split the search into
//! the subproblem that forces the pivot edge and the one that excludes it.

use crate::network::MAX_CHANNELS;

/// A bipartite graph with equal sides `A = B = {0, …, n-1}`.
///
/// `rows[i]` is the neighbour bitmask of left vertex `i`. Immutable once
/// built; enumeration works on internal copies.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BipartiteGraph {
    n: usize,
    rows: Vec<u16>,
}

impl BipartiteGraph {
    pub fn from_rows(rows: Vec<u16>) -> BipartiteGraph {
        let n = rows.len();
        assert!(n <= MAX_CHANNELS, "side size {n} above {MAX_CHANNELS}");
        debug_assert!(rows.iter().all(|&r| r < (1u32 << n) as u16 || n == 16));
        BipartiteGraph { n, rows }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> BipartiteGraph {
        let mut rows = vec![0u16; n];
        for &(i, j) in edges {
            assert!(i < n && j < n);
            rows[i] |= 1 << j;
        }
        BipartiteGraph::from_rows(rows)
    }

    pub fn complete(n: usize) -> BipartiteGraph {
        BipartiteGraph::from_rows(vec![crate::network::full_mask(n); n])
    }

    /// Side size n (= |A| = |B|).
    pub fn side_len(&self) -> usize {
        self.n
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        (self.rows[i] >> j) & 1 == 1
    }

    pub fn row(&self, i: usize) -> u16 {
        self.rows[i]
    }

    pub fn edge_count(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones() as usize).sum()
    }

    /// Ascending right neighbours of left vertex `i`.
    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        let mut row = self.rows[i];
        std::iter::from_fn(move || {
            if row == 0 {
                None
            } else {
                let j = row.trailing_zeros() as usize;
                row &= row - 1;
                Some(j)
            }
        })
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .flat_map(|i| self.neighbors(i).map(move |j| (i, j)))
            .collect()
    }

    /// Searches a perfect matching with augmenting paths, processing left
    /// vertices and their neighbours in ascending order. Returns `None` iff
    /// the graph has no perfect matching.
    pub fn find_perfect_matching(&self) -> Option<Matching> {
        let mut owner = vec![usize::MAX; self.n];
        for u in 0..self.n {
            let mut visited = 0u16;
            if !self.augment(u, &mut visited, &mut owner) {
                return None;
            }
        }
        let mut pairing = vec![0usize; self.n];
        for (v, &u) in owner.iter().enumerate() {
            pairing[u] = v;
        }
        Some(Matching { pairing })
    }

    fn augment(&self, u: usize, visited: &mut u16, owner: &mut [usize]) -> bool {
        let mut candidates = self.rows[u] & !*visited;
        while candidates != 0 {
            let v = candidates.trailing_zeros() as usize;
            candidates &= candidates - 1;
            *visited |= 1 << v;
            if owner[v] == usize::MAX || self.augment(owner[v], visited, owner) {
                owner[v] = u;
                return true;
            }
        }
        false
    }

    /// Lazily yields every perfect matching exactly once, in a deterministic
    /// order. The graph itself is never mutated, so independent enumerations
    /// may run concurrently.
    pub fn perfect_matchings(&self) -> PerfectMatchings {
        let seed = self.find_perfect_matching();
        let mut stack = Vec::new();
        if let Some(m) = &seed {
            stack.push(Frame {
                rows: self.rows.clone(),
                active: crate::network::full_mask(self.n),
                pairing: m.pairing.clone(),
            });
        }
        PerfectMatchings {
            n: self.n,
            first: seed,
            stack,
        }
    }

    /// Test oracle: counts perfect matchings by filtering all n! permutations
    /// through edge membership. Panics beyond the oracle bound `n <= 9`.
    pub fn count_perfect_matchings_brute(&self) -> u64 {
        assert!(self.n <= 9, "brute-force oracle limited to n <= 9");
        let mut map: Vec<usize> = (0..self.n).collect();
        let mut count = 0u64;
        loop {
            if map.iter().enumerate().all(|(i, &j)| self.has_edge(i, j)) {
                count += 1;
            }
            if !next_permutation(&mut map) {
                return count;
            }
        }
    }
}

/// A perfect matching: `pairing()[i]` is the right vertex matched to left
/// vertex `i`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Matching {
    pairing: Vec<usize>,
}

impl Matching {
    pub fn pairing(&self) -> &[usize] {
        &self.pairing
    }

    pub fn into_pairing(self) -> Vec<usize> {
        self.pairing
    }

    pub fn len(&self) -> usize {
        self.pairing.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairing.is_empty()
    }
}

struct Frame {
    rows: Vec<u16>,
    /// Left vertices whose pairing may still change in this subproblem.
    active: u16,
    /// A perfect matching of the subproblem, already emitted by the caller.
    pairing: Vec<usize>,
}

/// Iterator over all perfect matchings of a [`BipartiteGraph`].
pub struct PerfectMatchings {
    n: usize,
    first: Option<Matching>,
    stack: Vec<Frame>,
}

impl Iterator for PerfectMatchings {
    type Item = Matching;

    fn next(&mut self) -> Option<Matching> {
        if let Some(m) = self.first.take() {
            return Some(m);
        }
        while let Some(frame) = self.stack.pop() {
            if let Some((entry, swaps)) = find_alternating_cycle(self.n, &frame) {
                let mut swapped = frame.pairing.clone();
                for &(u, v) in &swaps {
                    swapped[u] = v;
                }
                // Pivot on the matched edge (entry, v0): the cycle entered the
                // entry vertex through it, so the swapped matching avoids it.
                let v0 = frame.pairing[entry];

                // Subproblem without the pivot edge; `swapped` is its base.
                let mut rows_excl = frame.rows.clone();
                rows_excl[entry] &= !(1 << v0);
                self.stack.push(Frame {
                    rows: rows_excl,
                    active: frame.active,
                    pairing: swapped.clone(),
                });

                // Subproblem forcing the pivot edge; the old pairing is its
                // base. The forced right vertex disappears from other rows.
                let mut rows_incl = frame.rows;
                for (u, row) in rows_incl.iter_mut().enumerate() {
                    if u != entry {
                        *row &= !(1 << v0);
                    }
                }
                rows_incl[entry] = 1 << v0;
                self.stack.push(Frame {
                    rows: rows_incl,
                    active: frame.active & !(1 << entry),
                    pairing: frame.pairing,
                });

                return Some(Matching { pairing: swapped });
            }
        }
        None
    }
}

/// Finds a cycle that alternates unmatched and matched edges with respect to
/// `frame.pairing`, restricted to active vertices. Returns the left vertex
/// the cycle re-enters plus the `(left, new right)` reassignments along it.
fn find_alternating_cycle(n: usize, frame: &Frame) -> Option<(usize, Vec<(usize, usize)>)> {
    let mut owner = vec![usize::MAX; n];
    for u in 0..n {
        owner[frame.pairing[u]] = u;
    }
    let mut visited = 0u16;
    let mut path: Vec<(usize, usize)> = Vec::new();
    for start in 0..n {
        if frame.active & (1 << start) == 0 || visited & (1 << start) != 0 {
            continue;
        }
        let mut on_path = 0u16;
        if let Some(entry) = cycle_dfs(start, frame, &owner, &mut visited, &mut on_path, &mut path)
        {
            let at = path.iter().position(|&(u, _)| u == entry).unwrap();
            return Some((entry, path.split_off(at)));
        }
        debug_assert!(path.is_empty());
    }
    None
}

fn cycle_dfs(
    u: usize,
    frame: &Frame,
    owner: &[usize],
    visited: &mut u16,
    on_path: &mut u16,
    path: &mut Vec<(usize, usize)>,
) -> Option<usize> {
    *visited |= 1 << u;
    *on_path |= 1 << u;
    let mut candidates = frame.rows[u] & !(1 << frame.pairing[u]);
    while candidates != 0 {
        let v = candidates.trailing_zeros() as usize;
        candidates &= candidates - 1;
        let w = owner[v];
        debug_assert_ne!(w, usize::MAX);
        path.push((u, v));
        if *on_path & (1 << w) != 0 {
            return Some(w);
        }
        if *visited & (1 << w) == 0 {
            if let Some(entry) = cycle_dfs(w, frame, owner, visited, on_path, path) {
                return Some(entry);
            }
        }
        path.pop();
    }
    *on_path &= !(1 << u);
    None
}

/// Advances `map` to the lexicographically next permutation in place.
/// Returns false (leaving `map` sorted ascending) after the last one.
pub(crate) fn next_permutation(map: &mut [usize]) -> bool {
    if map.len() < 2 {
        return false;
    }
    let mut i = map.len() - 1;
    while i > 0 && map[i - 1] >= map[i] {
        i -= 1;
    }
    if i == 0 {
        map.reverse();
        return false;
    }
    let pivot = i - 1;
    let mut j = map.len() - 1;
    while map[j] <= map[pivot] {
        j -= 1;
    }
    map.swap(pivot, j);
    map[i..].reverse();
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The worked 5-channel subsumption graph (0-based edges).
    fn example_graph() -> BipartiteGraph {
        BipartiteGraph::from_edges(
            5,
            &[
                (0, 1),
                (0, 2),
                (1, 0),
                (1, 1),
                (1, 2),
                (2, 1),
                (2, 2),
                (3, 3),
                (3, 4),
                (4, 3),
                (4, 4),
            ],
        )
    }

    fn pairings(g: &BipartiteGraph) -> Vec<Vec<usize>> {
        g.perfect_matchings().map(|m| m.into_pairing()).collect()
    }

    #[test]
    fn finds_perfect_matching_in_example_graph() {
        let m = example_graph().find_perfect_matching().unwrap();
        let p = m.pairing();
        assert_eq!(p.len(), 5);
        for (i, &j) in p.iter().enumerate() {
            assert!(example_graph().has_edge(i, j));
        }
        let mut sorted = p.to_vec();
        sorted.sort_unstable();
        assert_eq!(sorted, [0, 1, 2, 3, 4]);
    }

    #[test]
    fn no_perfect_matching_with_isolated_vertex() {
        let g = BipartiteGraph::from_edges(3, &[(0, 1), (0, 2), (1, 1), (1, 2), (2, 1), (2, 2)]);
        // left vertex 0..2 all avoid right 0
        assert!(g.find_perfect_matching().is_none());
        assert_eq!(pairings(&g).len(), 0);
        let isolated = BipartiteGraph::from_edges(3, &[(1, 0), (1, 1), (2, 2)]);
        assert!(isolated.find_perfect_matching().is_none());
    }

    #[test]
    fn complete_graph_has_a_matching() {
        let m = BipartiteGraph::complete(3).find_perfect_matching().unwrap();
        let mut sorted = m.pairing().to_vec();
        sorted.sort_unstable();
        assert_eq!(sorted, [0, 1, 2]);
    }

    #[test]
    fn enumerates_the_four_example_matchings() {
        let mut found = pairings(&example_graph());
        found.sort();
        assert_eq!(
            found,
            vec![
                vec![1, 0, 2, 3, 4],
                vec![1, 0, 2, 4, 3],
                vec![2, 0, 1, 3, 4],
                vec![2, 0, 1, 4, 3],
            ]
        );
    }

    #[test]
    fn enumerates_all_six_on_complete_3() {
        let found = pairings(&BipartiteGraph::complete(3));
        assert_eq!(found.len(), 6);
        let distinct: std::collections::HashSet<_> = found.iter().collect();
        assert_eq!(distinct.len(), 6);
    }

    #[test]
    fn identity_graph_has_exactly_one() {
        let g = BipartiteGraph::from_edges(4, &[(0, 0), (1, 1), (2, 2), (3, 3)]);
        assert_eq!(pairings(&g), vec![vec![0, 1, 2, 3]]);
    }

    #[test]
    fn brute_count_matches_examples() {
        assert_eq!(example_graph().count_perfect_matchings_brute(), 4);
        assert_eq!(BipartiteGraph::complete(4).count_perfect_matchings_brute(), 24);
    }

    #[test]
    fn enumeration_is_deterministic() {
        let g = example_graph();
        assert_eq!(pairings(&g), pairings(&g));
    }

    #[test]
    fn enumeration_matches_brute_count_on_random_graphs() {
        // tiny xorshift so the test needs no external RNG
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut rng = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for _ in 0..300 {
            let n = 1 + (rng() % 6) as usize;
            let rows: Vec<u16> = (0..n)
                .map(|_| (rng() as u16) & crate::network::full_mask(n))
                .collect();
            let g = BipartiteGraph::from_rows(rows);
            let listed: Vec<_> = pairings(&g);
            let distinct: std::collections::HashSet<_> = listed.iter().collect();
            assert_eq!(distinct.len(), listed.len(), "duplicate matching emitted");
            assert_eq!(listed.len() as u64, g.count_perfect_matchings_brute());
            for m in &listed {
                for (i, &j) in m.iter().enumerate() {
                    assert!(g.has_edge(i, j));
                }
            }
        }
    }

    #[test]
    fn find_none_iff_brute_zero() {
        let mut state = 0x243f6a8885a308d3u64;
        let mut rng = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for _ in 0..300 {
            let n = 1 + (rng() % 7) as usize;
            let rows: Vec<u16> = (0..n)
                .map(|_| (rng() as u16) & crate::network::full_mask(n))
                .collect();
            let g = BipartiteGraph::from_rows(rows);
            assert_eq!(
                g.find_perfect_matching().is_none(),
                g.count_perfect_matchings_brute() == 0
            );
        }
    }

    #[test]
    fn next_permutation_is_lexicographic() {
        let mut map = vec![0, 1, 2];
        let mut seen = vec![map.clone()];
        while next_permutation(&mut map) {
            seen.push(map.clone());
        }
        assert_eq!(
            seen,
            vec![
                vec![0, 1, 2],
                vec![0, 2, 1],
                vec![1, 0, 2],
                vec![1, 2, 0],
                vec![2, 0, 1],
                vec![2, 1, 0],
            ]
        );
        assert_eq!(map, vec![0, 1, 2]);
    }
}
