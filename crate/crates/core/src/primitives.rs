//! Shared graph machinery: maximal cliques, greedy clique cover, strongly
//! connected components, and exhaustive cycle/path enumeration.
//!
//! Everything here is deterministic: outputs come back in a canonical order
//! (sorted node lists, cycles rotated to start at their smallest node, lists
//! sorted shortest-first then lexicographically), so downstream consumers
//! can serialize results byte-for-byte reproducibly.
//!
//! The exponential enumerations are guarded. [`maximal_cliques`] refuses
//! graphs above a configurable node count, and the cycle/path enumerators
//! abort with [`Error::EnumerationLimit`] instead of returning a truncated
//! result set that a caller might mistake for the whole truth.

use std::collections::BTreeSet;

use crate::error::Error;
use crate::graph::{BenefitGraph, CompetingGraph, Partition};

/// Default node-count guard for [`maximal_cliques`]. Bron–Kerbosch is
/// exponential in the worst case; past this size callers must opt in
/// explicitly via [`maximal_cliques_guarded`].
pub const DEFAULT_MAX_CLIQUE_NODES: usize = 128;

/// Default cap on the number of cycles or paths an enumeration may produce.
pub const DEFAULT_ENUM_LIMIT: usize = 1_000_000;

/// Simple undirected graph on `[0, n)` with adjacency sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UndirectedGraph {
    n: usize,
    adj: Vec<BTreeSet<usize>>,
}

impl UndirectedGraph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, Error> {
        let mut adj = vec![BTreeSet::new(); n];
        for (a, b) in edges {
            if a >= n {
                return Err(Error::NodeOutOfRange { node: a, n });
            }
            if b >= n {
                return Err(Error::NodeOutOfRange { node: b, n });
            }
            if a == b {
                return Err(Error::SelfLoop { node: a });
            }
            adj[a].insert(b);
            adj[b].insert(a);
        }
        Ok(UndirectedGraph { n, adj })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn neighbors(&self, v: usize) -> &BTreeSet<usize> {
        &self.adj[v]
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj.get(a).is_some_and(|s| s.contains(&b))
    }

    /// Edges as `(a, b)` with `a < b`, ascending.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.n {
            for &b in self.adj[a].range((a + 1)..) {
                out.push((a, b));
            }
        }
        out
    }
}

/// Simple directed graph on `[0, n)`. Parallel edges collapse; self-loops
/// are rejected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedGraph {
    n: usize,
    adj: Vec<Vec<usize>>,
}

impl DirectedGraph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, Error> {
        let mut adj = vec![BTreeSet::new(); n];
        for (src, dst) in edges {
            if src >= n {
                return Err(Error::NodeOutOfRange { node: src, n });
            }
            if dst >= n {
                return Err(Error::NodeOutOfRange { node: dst, n });
            }
            if src == dst {
                return Err(Error::SelfLoop { node: src });
            }
            adj[src].insert(dst);
        }
        Ok(DirectedGraph {
            n,
            adj: adj.into_iter().map(|s| s.into_iter().collect()).collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Successors of `v` in ascending order.
    pub fn successors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn has_edge(&self, src: usize, dst: usize) -> bool {
        self.adj.get(src).is_some_and(|s| s.binary_search(&dst).is_ok())
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum()
    }
}

/// The "can collaborate" graph: an edge for every pair that does *not*
/// compete. Cliques of this graph are exactly the conflict-free groups.
pub fn inverse_graph(c: &CompetingGraph) -> UndirectedGraph {
    let n = c.n();
    let mut adj = vec![BTreeSet::new(); n];
    for a in 0..n {
        for b in (a + 1)..n {
            if !c.competing(a.into(), b.into()) {
                adj[a].insert(b);
                adj[b].insert(a);
            }
        }
    }
    UndirectedGraph { n, adj }
}

/// All maximal cliques of `g` under the default node guard. See
/// [`maximal_cliques_guarded`].
pub fn maximal_cliques(g: &UndirectedGraph) -> Result<Vec<Vec<usize>>, Error> {
    maximal_cliques_guarded(g, DEFAULT_MAX_CLIQUE_NODES)
}

/// All maximal cliques of `g`, each sorted, the list sorted
/// lexicographically. Refuses graphs with more than `max_nodes` nodes.
///
/// Bron–Kerbosch with pivoting: the pivot `u` maximizes `|P ∩ N(u)|`, which
/// prunes the branching to non-neighbors of `u`.
pub fn maximal_cliques_guarded(
    g: &UndirectedGraph,
    max_nodes: usize,
) -> Result<Vec<Vec<usize>>, Error> {
    if g.n() > max_nodes {
        return Err(Error::SizeLimit {
            what: "maximal clique enumeration",
            limit: max_nodes,
            actual: g.n(),
        });
    }
    if g.n() == 0 {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let mut r = Vec::new();
    let p: BTreeSet<usize> = (0..g.n()).collect();
    bron_kerbosch(g, &mut r, p, BTreeSet::new(), &mut out);
    for clique in &mut out {
        clique.sort_unstable();
    }
    out.sort_unstable();
    Ok(out)
}

fn bron_kerbosch(
    g: &UndirectedGraph,
    r: &mut Vec<usize>,
    mut p: BTreeSet<usize>,
    mut x: BTreeSet<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if p.is_empty() && x.is_empty() {
        out.push(r.clone());
        return;
    }
    let pivot = p
        .iter()
        .chain(x.iter())
        .copied()
        .max_by_key(|&u| p.intersection(g.neighbors(u)).count())
        .expect("P ∪ X is non-empty here");
    let branch: Vec<usize> = p.difference(g.neighbors(pivot)).copied().collect();
    for v in branch {
        r.push(v);
        let p2 = p.intersection(g.neighbors(v)).copied().collect();
        let x2 = x.intersection(g.neighbors(v)).copied().collect();
        bron_kerbosch(g, r, p2, x2, out);
        r.pop();
        p.remove(&v);
        x.insert(v);
    }
}

/// Tie-breaking strategy for the greedy clique cover.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    /// Largest clique first; ties broken by the heaviest internal benefit
    /// (when a benefit graph is supplied), then by lexicographically
    /// smallest member list.
    #[default]
    MaxCardinality,
    /// Lexicographically smallest member list, ignoring size and weight.
    Lexicographic,
}

/// Greedy clique cover: repeatedly pick a maximal clique of the residual
/// graph per `tie`, remove it, and recurse until every node is covered.
/// Returns the chosen cliques as a [`Partition`].
pub fn clique_partition(
    g: &UndirectedGraph,
    tie: TieBreak,
    benefit: Option<&BenefitGraph>,
    max_nodes: usize,
) -> Result<Partition, Error> {
    cover_greedy(g, None, tie, benefit, max_nodes)
}

/// Greedy clique cover with the first block forced to `first`, which must be
/// a clique of `g`. Useful for auditing every possible first choice.
pub fn clique_partition_from(
    g: &UndirectedGraph,
    first: &[usize],
    tie: TieBreak,
    benefit: Option<&BenefitGraph>,
    max_nodes: usize,
) -> Result<Partition, Error> {
    cover_greedy(g, Some(first), tie, benefit, max_nodes)
}

fn cover_greedy(
    g: &UndirectedGraph,
    first: Option<&[usize]>,
    tie: TieBreak,
    benefit: Option<&BenefitGraph>,
    max_nodes: usize,
) -> Result<Partition, Error> {
    if g.n() > max_nodes {
        return Err(Error::SizeLimit {
            what: "greedy clique cover",
            limit: max_nodes,
            actual: g.n(),
        });
    }
    let mut remaining: BTreeSet<usize> = (0..g.n()).collect();
    let mut blocks: Vec<Vec<usize>> = Vec::new();

    if let Some(first) = first {
        let set: BTreeSet<usize> = first.iter().copied().collect();
        if set.is_empty() {
            return Err(Error::EmptyCoalition);
        }
        if set.len() != first.len() {
            return Err(Error::InvalidPartition {
                reason: "forced first clique repeats a node".into(),
            });
        }
        for &v in &set {
            if v >= g.n() {
                return Err(Error::NodeOutOfRange { node: v, n: g.n() });
            }
        }
        for &a in &set {
            for &b in set.range((a + 1)..) {
                if !g.has_edge(a, b) {
                    return Err(Error::InvalidPartition {
                        reason: format!("forced first block is not a clique: v{a} and v{b} are not adjacent"),
                    });
                }
            }
        }
        remaining.retain(|v| !set.contains(v));
        blocks.push(set.into_iter().collect());
    }

    while !remaining.is_empty() {
        // Dense residual graph plus a map back to original ids.
        let ids: Vec<usize> = remaining.iter().copied().collect();
        let pos = |v: usize| ids.binary_search(&v).expect("id is in residual");
        let mut edges = Vec::new();
        for (k, &v) in ids.iter().enumerate() {
            for &w in g.neighbors(v) {
                if w > v && remaining.contains(&w) {
                    edges.push((k, pos(w)));
                }
            }
        }
        let sub = UndirectedGraph::new(ids.len(), edges)?;
        let cliques = maximal_cliques_guarded(&sub, max_nodes)?;
        let chosen = cliques
            .into_iter()
            .map(|c| c.into_iter().map(|k| ids[k]).collect::<Vec<usize>>())
            .reduce(|best, cand| pick_clique(best, cand, tie, benefit))
            .expect("a non-empty graph has at least one maximal clique");
        remaining.retain(|v| !chosen.contains(v));
        blocks.push(chosen);
    }

    Partition::from_index_blocks(g.n(), blocks)
}

/// Internal benefit exchanged inside a prospective block, used as a greedy
/// tie-breaker: heavier groups are more productive seeds.
fn internal_weight(benefit: &BenefitGraph, clique: &[usize]) -> f64 {
    let mut total = 0.0;
    for &i in clique {
        for &j in clique {
            if i != j {
                total += benefit.weight(i.into(), j.into());
            }
        }
    }
    total
}

fn pick_clique(
    best: Vec<usize>,
    cand: Vec<usize>,
    tie: TieBreak,
    benefit: Option<&BenefitGraph>,
) -> Vec<usize> {
    match tie {
        TieBreak::Lexicographic => {
            if cand < best {
                cand
            } else {
                best
            }
        }
        TieBreak::MaxCardinality => {
            if cand.len() != best.len() {
                return if cand.len() > best.len() { cand } else { best };
            }
            if let Some(b) = benefit {
                let (wb, wc) = (internal_weight(b, &best), internal_weight(b, &cand));
                if wc > wb {
                    return cand;
                }
                if wc < wb {
                    return best;
                }
            }
            if cand < best {
                cand
            } else {
                best
            }
        }
    }
}

/// Strongly connected components via Tarjan's algorithm, returned as a
/// [`Partition`] of `[0, n)` (components sorted, blocks by smallest member).
pub fn strongly_connected_components(g: &DirectedGraph) -> Partition {
    struct State<'a> {
        g: &'a DirectedGraph,
        index: Vec<Option<usize>>,
        low: Vec<usize>,
        on_stack: Vec<bool>,
        stack: Vec<usize>,
        next_index: usize,
        comps: Vec<Vec<usize>>,
    }

    fn strongconnect(st: &mut State<'_>, v: usize) {
        st.index[v] = Some(st.next_index);
        st.low[v] = st.next_index;
        st.next_index += 1;
        st.stack.push(v);
        st.on_stack[v] = true;

        for &w in st.g.successors(v) {
            if st.index[w].is_none() {
                strongconnect(st, w);
                st.low[v] = st.low[v].min(st.low[w]);
            } else if st.on_stack[w] {
                st.low[v] = st.low[v].min(st.index[w].unwrap());
            }
        }

        if st.low[v] == st.index[v].unwrap() {
            let mut comp = Vec::new();
            loop {
                let w = st.stack.pop().unwrap();
                st.on_stack[w] = false;
                comp.push(w);
                if w == v {
                    break;
                }
            }
            st.comps.push(comp);
        }
    }

    let n = g.n();
    let mut st = State {
        g,
        index: vec![None; n],
        low: vec![0; n],
        on_stack: vec![false; n],
        stack: Vec::new(),
        next_index: 0,
        comps: Vec::new(),
    };
    for v in 0..n {
        if st.index[v].is_none() {
            strongconnect(&mut st, v);
        }
    }
    let mut comps = st.comps;
    for c in &mut comps {
        c.sort_unstable();
    }
    comps.sort_unstable();
    Partition::from_index_blocks(n, comps).expect("SCCs partition the node set")
}

/// All elementary cycles of `g`, each rotated to start at its smallest node,
/// the list sorted shortest-first then lexicographically.
///
/// Johnson-style enumeration rooted at each start node in ascending order,
/// visiting only nodes with larger ids, with blocked sets and deferred
/// unblock lists. Aborts with [`Error::EnumerationLimit`] once more than
/// `limit` cycles exist.
pub fn enumerate_cycles(g: &DirectedGraph, limit: usize) -> Result<Vec<Vec<usize>>, Error> {
    struct Enumerator<'a> {
        g: &'a DirectedGraph,
        root: usize,
        blocked: Vec<bool>,
        block_lists: Vec<Vec<usize>>,
        stack: Vec<usize>,
        out: Vec<Vec<usize>>,
        limit: usize,
    }

    impl Enumerator<'_> {
        fn unblock(&mut self, v: usize) {
            self.blocked[v] = false;
            for u in std::mem::take(&mut self.block_lists[v]) {
                if self.blocked[u] {
                    self.unblock(u);
                }
            }
        }

        fn circuit(&mut self, v: usize) -> Result<bool, Error> {
            let mut found = false;
            self.stack.push(v);
            self.blocked[v] = true;
            for k in 0..self.g.successors(v).len() {
                let w = self.g.successors(v)[k];
                if w < self.root {
                    continue; // cycles through smaller ids are rooted there
                }
                if w == self.root {
                    if self.out.len() == self.limit {
                        return Err(Error::EnumerationLimit {
                            what: "cycle enumeration",
                            limit: self.limit,
                        });
                    }
                    self.out.push(self.stack.clone());
                    found = true;
                } else if !self.blocked[w] && self.circuit(w)? {
                    found = true;
                }
            }
            if found {
                self.unblock(v);
            } else {
                for k in 0..self.g.successors(v).len() {
                    let w = self.g.successors(v)[k];
                    if w >= self.root && !self.block_lists[w].contains(&v) {
                        self.block_lists[w].push(v);
                    }
                }
            }
            self.stack.pop();
            Ok(found)
        }
    }

    let n = g.n();
    let mut cycles = Vec::new();
    for root in 0..n {
        let mut e = Enumerator {
            g,
            root,
            blocked: vec![false; n],
            block_lists: vec![Vec::new(); n],
            stack: Vec::new(),
            out: std::mem::take(&mut cycles),
            limit,
        };
        e.circuit(root)?;
        cycles = e.out;
    }
    cycles.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    Ok(cycles)
}

/// All simple directed paths from `s` to `t`, sorted shortest-first then
/// lexicographically. Aborts with [`Error::EnumerationLimit`] once more than
/// `limit` paths exist.
pub fn enumerate_simple_paths(
    g: &DirectedGraph,
    s: usize,
    t: usize,
    limit: usize,
) -> Result<Vec<Vec<usize>>, Error> {
    let n = g.n();
    for v in [s, t] {
        if v >= n {
            return Err(Error::NodeOutOfRange { node: v, n });
        }
    }
    if s == t {
        return Err(Error::SamePathEndpoints { node: s });
    }

    fn dfs(
        g: &DirectedGraph,
        v: usize,
        t: usize,
        on_path: &mut Vec<bool>,
        path: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
        limit: usize,
    ) -> Result<(), Error> {
        for &w in g.successors(v) {
            if w == t {
                if out.len() == limit {
                    return Err(Error::EnumerationLimit {
                        what: "path enumeration",
                        limit,
                    });
                }
                let mut p = path.clone();
                p.push(t);
                out.push(p);
            } else if !on_path[w] {
                on_path[w] = true;
                path.push(w);
                dfs(g, w, t, on_path, path, out, limit)?;
                path.pop();
                on_path[w] = false;
            }
        }
        Ok(())
    }

    let mut out = Vec::new();
    let mut on_path = vec![false; n];
    on_path[s] = true;
    let mut path = vec![s];
    dfs(g, s, t, &mut on_path, &mut path, &mut out, limit)?;
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    Ok(out)
}

/// True iff a directed path of length ≥ 1 leads from `s` to `t`. With
/// `s == t` this asks whether `s` lies on a cycle.
pub fn reachable(g: &DirectedGraph, s: usize, t: usize) -> bool {
    let mut visited = vec![false; g.n()];
    let mut stack: Vec<usize> = g.successors(s).to_vec();
    while let Some(v) = stack.pop() {
        if v == t {
            return true;
        }
        if !visited[v] {
            visited[v] = true;
            stack.extend(g.successors(v).iter().copied());
        }
    }
    false
}
