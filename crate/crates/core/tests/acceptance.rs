//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the measured numbers (run with `--nocapture` to see them all).
//!
//! The generation runs are shared between criteria through lazy caches, and
//! a global lock serializes the tests so the wall-clock budgets are measured
//! on an otherwise idle process. Budgets assume an 8-thread run on desk
//! hardware.

use std::sync::{Mutex, MutexGuard, OnceLock};
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;

use sortnet_core::generate::{
    self, brute_force_all, generate_up_to, search_optimal_size, GenerationStats,
};
use sortnet_core::matching::BipartiteGraph;
use sortnet_core::network::{Comparator, ComparatorNetwork};
use sortnet_core::persist::{self, FileFormat};
use sortnet_core::subsumption::{
    build_subsumption_graph_basic, check_permutation, precheck, subsumes_by_matchings,
    subsumes_by_permutations, NetworkSignature, Permutation, PrecheckStage, Variant,
};

const WORKERS: usize = 8;

fn lock() -> MutexGuard<'static, ()> {
    static GUARD: OnceLock<Mutex<()>> = OnceLock::new();
    GUARD
        .get_or_init(|| Mutex::new(()))
        .lock()
        .unwrap_or_else(|e| e.into_inner())
}

struct LevelRow {
    size: usize,
    stats: GenerationStats,
}

struct Run {
    rows: Vec<LevelRow>,
    elapsed: Duration,
}

impl Run {
    /// Row for level k (1-based).
    fn level(&self, k: usize) -> &LevelRow {
        &self.rows[k - 1]
    }
}

fn run_generate(channels: usize, k_max: usize, variant: Variant) -> Run {
    let mut rows = Vec::new();
    let start = Instant::now();
    generate_up_to(channels, k_max, variant, WORKERS, |set, stats| {
        rows.push(LevelRow {
            size: set.len(),
            stats: stats.clone(),
        });
    });
    Run {
        rows,
        elapsed: start.elapsed(),
    }
}

fn match_7() -> &'static Run {
    static RUN: OnceLock<Run> = OnceLock::new();
    RUN.get_or_init(|| run_generate(7, 10, Variant::Matching))
}

fn match_8() -> &'static Run {
    static RUN: OnceLock<Run> = OnceLock::new();
    RUN.get_or_init(|| run_generate(8, 9, Variant::Matching))
}

fn match_9() -> &'static Run {
    static RUN: OnceLock<Run> = OnceLock::new();
    RUN.get_or_init(|| run_generate(9, 10, Variant::Matching))
}

fn perm_7() -> &'static Run {
    static RUN: OnceLock<Run> = OnceLock::new();
    RUN.get_or_init(|| run_generate(7, 10, Variant::Permutation))
}

fn perm_8() -> &'static Run {
    static RUN: OnceLock<Run> = OnceLock::new();
    RUN.get_or_init(|| run_generate(8, 9, Variant::Permutation))
}

#[test]
fn criterion_1_golden_sizes_n7() {
    let _g = lock();
    let run = match_7();
    assert_eq!(run.level(9).size, 678, "|N^7_9|");
    assert_eq!(run.level(10).size, 510, "|N^7_10|");
    assert!(
        run.elapsed < Duration::from_secs(60),
        "n=7 run took {:?}",
        run.elapsed
    );
    println!(
        "criterion 1: PASS — |N^7_9|=678, |N^7_10|=510 in {:.2?} (< 60 s)",
        run.elapsed
    );
}

#[test]
fn criterion_2_golden_sizes_n8() {
    let _g = lock();
    let run = match_8();
    assert_eq!(run.level(7).size, 648, "|N^8_7|");
    assert_eq!(run.level(8).size, 2088, "|N^8_8|");
    assert_eq!(run.level(9).size, 5703, "|N^8_9|");
    assert!(
        run.elapsed < Duration::from_secs(300),
        "n=8 run took {:?}",
        run.elapsed
    );
    println!(
        "criterion 2: PASS — |N^8_7..9| = 648, 2088, 5703 in {:.2?} (< 5 min)",
        run.elapsed
    );
}

#[test]
fn criterion_3_golden_sizes_n9_prefix() {
    let _g = lock();
    let run = match_9();
    let expected = [1, 3, 7, 20, 59, 208, 807, 3415, 14343, 55991];
    let sizes: Vec<usize> = run.rows.iter().map(|r| r.size).collect();
    assert_eq!(sizes, expected, "|N^9_k| for k = 1..=10");
    assert!(
        run.elapsed < Duration::from_secs(1800),
        "n=9 run took {:?}",
        run.elapsed
    );
    println!(
        "criterion 3: PASS — |N^9_1..10| = {sizes:?} in {:.2?} (< 30 min)",
        run.elapsed
    );
}

#[test]
fn criterion_4_counter_sanity() {
    let _g = lock();
    // Table 1 perm_2 column
    let table = [
        (7usize, 9usize, 33_120u64),
        (7, 10, 24_362),
        (8, 7, 49_142),
        (8, 8, 283_614),
        (8, 9, 1_303_340),
    ];
    let mut details = Vec::new();
    for (n, k, perm2_paper) in table {
        let (matching, permutation) = if n == 7 {
            (match_7(), perm_7())
        } else {
            (match_8(), perm_8())
        };
        let ours_v2 = matching.level(k).stats.permutations_checked;
        let ours_v1 = permutation.level(k).stats.permutations_checked;
        assert!(
            ours_v2 >= perm2_paper / 10 && ours_v2 <= perm2_paper * 10,
            "({n},{k}): matching counter {ours_v2} not within 10x of {perm2_paper}"
        );
        assert!(
            ours_v2 * 100 <= ours_v1,
            "({n},{k}): matching counter {ours_v2} not 100x below permutation counter {ours_v1}"
        );
        details.push(format!(
            "({n},{k}) {ours_v2} vs table {perm2_paper}, {}x below variant 1",
            ours_v1 / ours_v2.max(1)
        ));
    }
    println!("criterion 4: PASS — {}", details.join("; "));
}

#[test]
fn criterion_5_speedup_direction() {
    let _g = lock();
    // level 9 is the (8,9) row; compare per-level elapsed times
    let t_match = match_8().level(9).stats.elapsed;
    let t_perm = perm_8().level(9).stats.elapsed;
    assert!(
        t_perm >= t_match * 10,
        "(8,9): permutation {t_perm:?} not 10x slower than matching {t_match:?}"
    );
    println!(
        "criterion 5: PASS — (8,9) permutation {:.2?} vs matching {:.2?} ({:.0}x)",
        t_perm,
        t_match,
        t_perm.as_secs_f64() / t_match.as_secs_f64()
    );
}

#[test]
fn criterion_6_optimal_sizes_desk_scale() {
    let _g = lock();
    let expected = [(2, 1), (3, 3), (4, 5), (5, 9), (6, 12), (7, 16)];
    let mut details = Vec::new();
    for (n, s_expected) in expected {
        let budget = if n <= 6 {
            Duration::from_secs(60)
        } else {
            Duration::from_secs(1800)
        };
        let start = Instant::now();
        let (s, witness) =
            search_optimal_size(n, Variant::Matching, WORKERS, generate::default_ceiling(n))
                .expect("search succeeds");
        let elapsed = start.elapsed();
        assert_eq!(s, s_expected, "s_{n}");
        assert_eq!(witness.size(), s_expected);
        assert!(witness.sorts_all_inputs(), "witness for n={n} must sort");
        assert!(elapsed < budget, "search n={n} took {elapsed:?}");
        details.push(format!("s_{n}={s} in {elapsed:.2?}"));
    }
    println!("criterion 6: PASS — {}", details.join(", "));
}

#[test]
fn criterion_7_worked_examples() {
    let _g = lock();

    // cluster listing of (0,1);(2,3) on 4 channels
    let net = sortnet_core::parse_network("0:1,2:3", 4).unwrap();
    let out = net.outputs();
    let cluster =
        |p: usize| -> Vec<String> {
            let mut v: Vec<String> = out.cluster(p).iter().map(|s| s.render(4)).collect();
            v.sort();
            v
        };
    assert_eq!(cluster(0), ["0000"]);
    assert_eq!(cluster(1), ["0001", "0100"]);
    assert_eq!(cluster(2), ["0011", "0101", "1100"]);
    assert_eq!(cluster(3), ["0111", "1101"]);
    assert_eq!(cluster(4), ["1111"]);

    // subsumption witness (0,1,3,2)
    let a = sortnet_core::parse_network("0:1,1:2,0:3", 4).unwrap().outputs();
    let b = sortnet_core::parse_network("0:1,0:2,1:3", 4).unwrap().outputs();
    let witness = Permutation::new(vec![0, 1, 3, 2]);
    assert!(check_permutation(&witness, &a, &b));
    assert!(subsumes_by_permutations(&a, &b).subsumes);
    assert!(subsumes_by_matchings(&a, &b).subsumes);

    // ST3 rejection
    let a = sortnet_core::parse_network("0:1,2:3,1:3,0:4,0:2", 5).unwrap().outputs();
    let b = sortnet_core::parse_network("0:1,2:3,0:2,2:4,0:2", 5).unwrap().outputs();
    assert_eq!(
        precheck(&NetworkSignature::of(&a), &NetworkSignature::of(&b)),
        Err(PrecheckStage::St3)
    );

    // subsumption graph edge set and its exactly 4 perfect matchings
    let a = sortnet_core::parse_network("0:1,2:3,1:3,1:4", 5).unwrap().outputs();
    let b = sortnet_core::parse_network("0:1,2:3,0:3,1:4", 5).unwrap().outputs();
    let graph = build_subsumption_graph_basic(&a, &b);
    let mut edges = graph.edges();
    edges.sort_unstable();
    assert_eq!(
        edges,
        vec![
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
            (4, 4)
        ]
    );
    let mut pairings: Vec<Vec<usize>> = graph
        .perfect_matchings()
        .map(|m| m.into_pairing())
        .collect();
    pairings.sort();
    assert_eq!(
        pairings,
        vec![
            vec![1, 0, 2, 3, 4],
            vec![1, 0, 2, 4, 3],
            vec![2, 0, 1, 3, 4],
            vec![2, 0, 1, 4, 3]
        ]
    );
    println!("criterion 7: PASS — worked cluster listing, witness, ST3 rejection, graph + 4 matchings");
}

fn random_network(rng: &mut StdRng, channels: usize, max_size: usize) -> ComparatorNetwork {
    let size = rng.gen_range(0..=max_size);
    let comparators = (0..size)
        .map(|_| {
            let i = rng.gen_range(0..channels - 1);
            let j = rng.gen_range(i + 1..channels);
            Comparator::new(i, j)
        })
        .collect();
    ComparatorNetwork::new(channels, comparators).unwrap()
}

#[test]
fn criterion_8a_variant_agreement_random_pairs() {
    let _g = lock();
    let mut rng = StdRng::seed_from_u64(0xacce_0001);
    let pairs: Vec<(ComparatorNetwork, ComparatorNetwork)> = (0..10_000)
        .map(|_| {
            let n = rng.gen_range(2..=8);
            (
                random_network(&mut rng, n, n + 4),
                random_network(&mut rng, n, n + 4),
            )
        })
        .collect();
    let disagreements = pairs
        .par_iter()
        .filter(|(a, b)| {
            let out_a = a.outputs();
            let out_b = b.outputs();
            let v1 = subsumes_by_permutations(&out_a, &out_b);
            let v2 = subsumes_by_matchings(&out_a, &out_b);
            for outcome in [&v1, &v2] {
                if let Some(w) = &outcome.witness {
                    assert!(check_permutation(w, &out_a, &out_b));
                }
            }
            v1.subsumes != v2.subsumes
        })
        .count();
    assert_eq!(disagreements, 0, "variant disagreement on random pairs");
    println!("criterion 8a: PASS — 10000 random pairs (n <= 8), zero disagreements");
}

#[test]
fn criterion_8b_matching_enumeration_vs_brute() {
    let _g = lock();
    let mut rng = StdRng::seed_from_u64(0xacce_0002);
    for i in 0..1_000 {
        let n = rng.gen_range(1..=7);
        let full: u16 = ((1u32 << n) - 1) as u16;
        let rows: Vec<u16> = (0..n).map(|_| rng.gen::<u16>() & full).collect();
        let g = BipartiteGraph::from_rows(rows);
        let enumerated = g.perfect_matchings().count() as u64;
        assert_eq!(
            enumerated,
            g.count_perfect_matchings_brute(),
            "graph #{i} (n={n}) count mismatch"
        );
    }
    println!("criterion 8b: PASS — 1000 random graphs (n <= 7), enumeration matches brute force");
}

#[test]
fn criterion_8c_extend_equals_scratch_exhaustive() {
    let _g = lock();
    let mut cases = 0u64;
    for n in 2..=5usize {
        let comparators: Vec<Comparator> = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| Comparator::new(i, j)))
            .collect();
        for k in 0..=5usize {
            let bases = brute_force_all(n, k).unwrap();
            let bad = bases
                .par_iter()
                .map(|base| {
                    let out = base.outputs();
                    let mut bad = 0u64;
                    for &c in &comparators {
                        if out.extend(c) != base.extended(c).outputs() {
                            bad += 1;
                        }
                    }
                    bad
                })
                .sum::<u64>();
            assert_eq!(bad, 0, "extend mismatch at n={n} k={k}");
            cases += bases.len() as u64 * comparators.len() as u64;
        }
    }
    println!("criterion 8c: PASS — extend == from-scratch on {cases} exhaustive cases (n <= 5, k <= 5)");
}

#[test]
fn criterion_8d_deterministic_files() {
    let _g = lock();
    let levels_as_bytes = |n: usize, k: usize, workers: usize| -> Vec<Vec<u8>> {
        let mut files = Vec::new();
        generate_up_to(n, k, Variant::Matching, workers, |set, _| {
            let mut buf = Vec::new();
            persist::write_filter_set(&mut buf, set, FileFormat::Text).unwrap();
            files.push(buf);
        });
        files
    };
    for n in [6usize, 7] {
        let k = 8;
        let w1 = levels_as_bytes(n, k, 1);
        let w8 = levels_as_bytes(n, k, 8);
        let w8_again = levels_as_bytes(n, k, 8);
        assert_eq!(w1, w8, "n={n}: workers 1 vs 8 differ");
        assert_eq!(w8, w8_again, "n={n}: repeated runs differ");
    }
    println!("criterion 8d: PASS — byte-identical level files across reruns and worker counts (n = 6, 7)");
}
