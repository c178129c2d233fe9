//! Cross-checks of the graph primitives against brute-force enumeration.
//!
//! Every primitive gets a second, independent implementation here that is
//! too slow to ship but simple enough to trust: subset scans, permutation
//! scans, and Floyd–Warshall closure. The fast implementations must agree
//! with them exactly, canonical form included, on seeded random graphs.

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fedcoalitions::graph::Partition;
use fedcoalitions::primitives::{
    enumerate_cycles, enumerate_simple_paths, maximal_cliques, reachable,
    strongly_connected_components, DirectedGraph, UndirectedGraph,
};

fn random_undirected(rng: &mut ChaCha8Rng, n: usize, p: f64) -> UndirectedGraph {
    let mut edges = Vec::new();
    for a in 0..n {
        for b in (a + 1)..n {
            if rng.random::<f64>() < p {
                edges.push((a, b));
            }
        }
    }
    UndirectedGraph::new(n, edges).unwrap()
}

fn random_directed(rng: &mut ChaCha8Rng, n: usize, p: f64) -> DirectedGraph {
    let mut edges = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if a != b && rng.random::<f64>() < p {
                edges.push((a, b));
            }
        }
    }
    DirectedGraph::new(n, edges).unwrap()
}

/// Maximal cliques by scanning every vertex subset.
fn brute_maximal_cliques(g: &UndirectedGraph) -> Vec<Vec<usize>> {
    let n = g.n();
    let is_clique = |set: &[usize]| {
        set.iter()
            .enumerate()
            .all(|(i, &a)| set[i + 1..].iter().all(|&b| g.has_edge(a, b)))
    };
    let mut out = Vec::new();
    for mask in 1u32..(1 << n) {
        let set: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        if !is_clique(&set) {
            continue;
        }
        let extendable = (0..n)
            .any(|v| !set.contains(&v) && set.iter().all(|&u| g.has_edge(u, v)));
        if !extendable {
            out.push(set);
        }
    }
    out.sort();
    out
}

/// Transitive closure by Floyd–Warshall; `closure[i][j]` means a directed
/// path of length ≥ 1 from i to j.
fn closure(g: &DirectedGraph) -> Vec<Vec<bool>> {
    let n = g.n();
    let mut reach = vec![vec![false; n]; n];
    for (v, row) in reach.iter_mut().enumerate() {
        for &w in g.successors(v) {
            row[w] = true;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                reach[i][j] = reach[i][j] || (reach[i][k] && reach[k][j]);
            }
        }
    }
    reach
}

/// Strongly connected components from mutual closure reachability.
fn brute_scc(g: &DirectedGraph) -> Partition {
    let n = g.n();
    let reach = closure(g);
    let mutual = |i: usize, j: usize| i == j || (reach[i][j] && reach[j][i]);
    let mut assigned = vec![false; n];
    let mut blocks = Vec::new();
    for i in 0..n {
        if assigned[i] {
            continue;
        }
        let comp: Vec<usize> = (i..n).filter(|&j| mutual(i, j)).collect();
        for &j in &comp {
            assigned[j] = true;
        }
        blocks.push(comp);
    }
    Partition::from_index_blocks(n, blocks).unwrap()
}

/// Elementary cycles by trying every permutation of every vertex subset,
/// with the rotation fixed at the subset's minimum.
fn brute_cycles(g: &DirectedGraph) -> Vec<Vec<usize>> {
    let n = g.n();
    let mut out = Vec::new();
    for mask in 1u32..(1 << n) {
        let set: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        if set.len() < 2 {
            continue;
        }
        let first = set[0];
        let rest = &set[1..];
        for perm in rest.iter().copied().permutations(rest.len()) {
            let mut cyc = vec![first];
            cyc.extend(perm);
            let closed = cyc
                .windows(2)
                .all(|w| g.has_edge(w[0], w[1]))
                && g.has_edge(*cyc.last().unwrap(), first);
            if closed {
                out.push(cyc);
            }
        }
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

/// Simple s→t paths by trying every permutation of every subset of
/// intermediate vertices.
fn brute_paths(g: &DirectedGraph, s: usize, t: usize) -> Vec<Vec<usize>> {
    let n = g.n();
    let middle: Vec<usize> = (0..n).filter(|&v| v != s && v != t).collect();
    let mut out = Vec::new();
    for k in 0..=middle.len() {
        for perm in middle.iter().copied().permutations(k) {
            let mut path = vec![s];
            path.extend(perm);
            path.push(t);
            if path.windows(2).all(|w| g.has_edge(w[0], w[1])) {
                out.push(path);
            }
        }
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

const DENSITIES: [f64; 3] = [0.2, 0.5, 0.8];

#[test]
fn maximal_cliques_match_subset_scan() {
    for seed in 0..250u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 1 + (seed as usize % 8);
        let g = random_undirected(&mut rng, n, DENSITIES[seed as usize % 3]);
        assert_eq!(
            maximal_cliques(&g).unwrap(),
            brute_maximal_cliques(&g),
            "clique mismatch at seed {seed}"
        );
    }
}

#[test]
fn sccs_match_floyd_warshall() {
    for seed in 0..250u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1_000 + seed);
        let n = 1 + (seed as usize % 8);
        let g = random_directed(&mut rng, n, DENSITIES[seed as usize % 3]);
        assert_eq!(
            strongly_connected_components(&g),
            brute_scc(&g),
            "SCC mismatch at seed {seed}"
        );
    }
}

#[test]
fn cycles_match_permutation_scan() {
    for seed in 0..250u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(2_000 + seed);
        let n = 2 + (seed as usize % 6); // up to 7 nodes
        let g = random_directed(&mut rng, n, [0.2, 0.35, 0.5][seed as usize % 3]);
        assert_eq!(
            enumerate_cycles(&g, usize::MAX).unwrap(),
            brute_cycles(&g),
            "cycle mismatch at seed {seed}"
        );
    }
}

#[test]
fn paths_match_permutation_scan() {
    for seed in 0..250u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(3_000 + seed);
        let n = 2 + (seed as usize % 6);
        let g = random_directed(&mut rng, n, [0.2, 0.35, 0.5][seed as usize % 3]);
        let s = rng.random_range(0..n);
        let t = (s + 1 + rng.random_range(0..n - 1)) % n;
        assert_ne!(s, t);
        assert_eq!(
            enumerate_simple_paths(&g, s, t, usize::MAX).unwrap(),
            brute_paths(&g, s, t),
            "path mismatch at seed {seed} (s={s}, t={t})"
        );
    }
}

#[test]
fn reachability_matches_closure() {
    for seed in 0..250u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(4_000 + seed);
        let n = 1 + (seed as usize % 8);
        let g = random_directed(&mut rng, n, DENSITIES[seed as usize % 3]);
        let reach = closure(&g);
        for (s, row) in reach.iter().enumerate() {
            for (t, &expected) in row.iter().enumerate() {
                assert_eq!(
                    reachable(&g, s, t),
                    expected,
                    "reachability mismatch at seed {seed} for {s}→{t}"
                );
            }
        }
    }
}
