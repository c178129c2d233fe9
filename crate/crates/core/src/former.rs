//! Coalition formation.
//!
//! A run has two phases:
//!
//! 1. **Baseline.** Cover the "can collaborate" graph (complement of the
//!    competition graph) with maximal cliques, greedily, then split every
//!    clique into strongly connected components of its induced benefit
//!    subgraph. Each component becomes a seed coalition: internally every
//!    member both gives and receives (or is a singleton), and no coalition
//!    contains competitors.
//!
//! 2. **Merging.** Build the coalition-level quotient graphs — a directed
//!    edge wherever any member of one coalition benefits any member of
//!    another, an undirected edge wherever members compete — and grow
//!    coalitions by three moves, each applied exhaustively before the next
//!    is considered: merge along a cycle that contains a singleton, merge
//!    along a path between two grown coalitions that carries a singleton,
//!    and merge two grown coalitions joined by an edge. Every move requires
//!    all participating coalitions to be pairwise non-competing, so the two
//!    collaboration principles survive every step.
//!
//! All candidate selection is deterministic (shortest first, then
//! lexicographic on coalition ids), so a run is a pure function of its
//! inputs.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::Error;
use crate::graph::{BenefitGraph, Coalition, CompetingGraph, Partition};
use crate::primitives::{
    clique_partition, enumerate_cycles, enumerate_simple_paths, inverse_graph,
    strongly_connected_components, DirectedGraph, TieBreak, DEFAULT_ENUM_LIMIT,
    DEFAULT_MAX_CLIQUE_NODES,
};

/// Tunables for a formation run.
#[derive(Debug, Clone)]
pub struct FormConfig {
    /// Greedy clique-cover tie-breaking strategy.
    pub tie_break: TieBreak,
    /// Node-count guard for maximal clique enumeration.
    pub max_clique_nodes: usize,
    /// Cap on cycle/path enumeration during candidate search.
    pub enum_limit: usize,
}

impl Default for FormConfig {
    fn default() -> Self {
        FormConfig {
            tie_break: TieBreak::MaxCardinality,
            max_clique_nodes: DEFAULT_MAX_CLIQUE_NODES,
            enum_limit: DEFAULT_ENUM_LIMIT,
        }
    }
}

/// Which merge move produced a candidate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MergeKind {
    Cycle,
    Path,
    Neighbors,
}

impl MergeKind {
    pub fn name(self) -> &'static str {
        match self {
            MergeKind::Cycle => "cycle",
            MergeKind::Path => "path",
            MergeKind::Neighbors => "neighbors",
        }
    }
}

/// A merge the former decided to perform: the move and the coalition ids it
/// unions, in canonical order (cycles rotated to start at their smallest id,
/// paths in edge order, neighbor pairs ascending).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergeCandidate {
    pub kind: MergeKind,
    pub coalition_ids: Vec<usize>,
}

/// The coalition-level view of a partition: one node per coalition, a
/// directed benefit edge wherever some member of one coalition benefits some
/// member of another, and an undirected competing edge wherever members
/// compete across the pair.
///
/// Ids are stable for the lifetime of a run: the baseline blocks get
/// `0..k` in canonical block order, and every merge retires its operand ids
/// and mints a fresh one.
#[derive(Debug, Clone)]
pub struct QuotientState {
    n: usize,
    coalitions: BTreeMap<usize, Coalition>,
    benefit_edges: BTreeSet<(usize, usize)>,
    competing_edges: BTreeSet<(usize, usize)>, // stored (lo, hi)
    next_id: usize,
}

impl QuotientState {
    /// Quotient of `p` under the two participant-level graphs.
    pub fn build(b: &BenefitGraph, c: &CompetingGraph, p: &Partition) -> Result<Self, Error> {
        if b.n() != c.n() {
            return Err(Error::NodeCountMismatch {
                left: b.n(),
                right: c.n(),
            });
        }
        if b.n() != p.n() {
            return Err(Error::NodeCountMismatch {
                left: b.n(),
                right: p.n(),
            });
        }
        let mut block_of = vec![0usize; p.n()];
        for (id, block) in p.blocks().iter().enumerate() {
            for v in block.members() {
                block_of[v.0] = id;
            }
        }
        let mut benefit_edges = BTreeSet::new();
        for (src, dst, _) in b.edges() {
            let (a, z) = (block_of[src.0], block_of[dst.0]);
            if a != z {
                benefit_edges.insert((a, z));
            }
        }
        let mut competing_edges = BTreeSet::new();
        for (x, y) in c.pairs() {
            let (a, z) = (block_of[x.0], block_of[y.0]);
            if a != z {
                competing_edges.insert((a.min(z), a.max(z)));
            }
        }
        Ok(QuotientState {
            n: p.n(),
            coalitions: p
                .blocks()
                .iter()
                .cloned()
                .enumerate()
                .collect(),
            benefit_edges,
            competing_edges,
            next_id: p.len(),
        })
    }

    /// Live coalition ids in ascending order.
    pub fn ids(&self) -> impl Iterator<Item = usize> + '_ {
        self.coalitions.keys().copied()
    }

    pub fn coalition(&self, id: usize) -> Option<&Coalition> {
        self.coalitions.get(&id)
    }

    pub fn len(&self) -> usize {
        self.coalitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coalitions.is_empty()
    }

    /// Id that the next merge will assign.
    pub fn next_id(&self) -> usize {
        self.next_id
    }

    /// Directed coalition-level benefit edges, ascending.
    pub fn benefit_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.benefit_edges.iter().copied()
    }

    /// Undirected coalition-level competing edges as `(lo, hi)`, ascending.
    pub fn competing_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.competing_edges.iter().copied()
    }

    /// True iff no member of `a` competes with any member of `b`.
    pub fn independent(&self, a: usize, b: usize) -> bool {
        !self.competing_edges.contains(&(a.min(b), a.max(b)))
    }

    fn pairwise_independent(&self, ids: &[usize]) -> bool {
        for (k, &a) in ids.iter().enumerate() {
            for &b in &ids[k + 1..] {
                if !self.independent(a, b) {
                    return false;
                }
            }
        }
        true
    }

    fn size(&self, id: usize) -> usize {
        self.coalitions.get(&id).map_or(0, Coalition::len)
    }

    /// The participant-level partition this state currently represents.
    pub fn partition(&self) -> Partition {
        Partition::new(self.n, self.coalitions.values().cloned().collect())
            .expect("quotient coalitions always partition the universe")
    }

    /// Dense renumbering of the live ids plus the benefit quotient as a
    /// plain directed graph, for the enumeration primitives.
    fn dense_benefit(&self) -> (Vec<usize>, DirectedGraph) {
        let ids: Vec<usize> = self.ids().collect();
        let pos = |id: usize| ids.binary_search(&id).expect("live id");
        let edges: Vec<(usize, usize)> = self
            .benefit_edges
            .iter()
            .map(|&(a, z)| (pos(a), pos(z)))
            .collect();
        let g = DirectedGraph::new(ids.len(), edges).expect("quotient edges are loop-free");
        (ids, g)
    }

    /// Shortest cycle in the benefit quotient that contains at least one
    /// singleton coalition and whose coalitions are pairwise non-competing;
    /// ties broken lexicographically. Everyone on such a cycle both gives
    /// and receives once merged.
    pub fn find_cycle_candidate(&self, limit: usize) -> Result<Option<MergeCandidate>, Error> {
        let (ids, g) = self.dense_benefit();
        // Sorted shortest-first then lexicographically; the dense
        // renumbering preserves id order, so the first hit is canonical.
        for cycle in enumerate_cycles(&g, limit)? {
            let mapped: Vec<usize> = cycle.into_iter().map(|k| ids[k]).collect();
            if mapped.iter().any(|&id| self.size(id) == 1) && self.pairwise_independent(&mapped) {
                return Ok(Some(MergeCandidate {
                    kind: MergeKind::Cycle,
                    coalition_ids: mapped,
                }));
            }
        }
        Ok(None)
    }

    /// Shortest benefit-quotient path between two coalitions of size ≥ 2
    /// that carries at least one singleton and is pairwise non-competing;
    /// ties broken lexicographically. The endpoints already sustain
    /// themselves, and the interior singletons plugged into the path gain
    /// both an inflow and an outflow.
    ///
    /// Callers must have exhausted cycle merges first; otherwise the chosen
    /// path may overlap an outstanding cycle candidate.
    pub fn find_path_candidate(&self, limit: usize) -> Result<Option<MergeCandidate>, Error> {
        let (ids, g) = self.dense_benefit();
        let grown: Vec<usize> = (0..ids.len()).filter(|&k| self.size(ids[k]) >= 2).collect();
        let mut best: Option<Vec<usize>> = None;
        for &s in &grown {
            for &t in &grown {
                if s == t || !self.independent(ids[s], ids[t]) {
                    continue;
                }
                for path in enumerate_simple_paths(&g, s, t, limit)? {
                    let mapped: Vec<usize> = path.iter().map(|&k| ids[k]).collect();
                    let has_singleton = mapped.iter().any(|&id| self.size(id) == 1);
                    if has_singleton && self.pairwise_independent(&mapped) {
                        // Paths for this endpoint pair arrive sorted, so the
                        // first qualifying one is the pair's minimum.
                        let better = match &best {
                            None => true,
                            Some(b) => {
                                (mapped.len(), &mapped) < (b.len(), b)
                            }
                        };
                        if better {
                            best = Some(mapped);
                        }
                        break;
                    }
                }
            }
        }
        Ok(best.map(|coalition_ids| MergeCandidate {
            kind: MergeKind::Path,
            coalition_ids,
        }))
    }

    /// Lexicographically smallest pair of non-competing coalitions, both of
    /// size ≥ 2, joined by a benefit edge in either direction. Both sides
    /// already sustain themselves, so the union does too.
    ///
    /// Callers must have exhausted cycle and path merges first.
    pub fn find_neighbors_candidate(&self) -> Option<MergeCandidate> {
        self.benefit_edges
            .iter()
            .filter(|&&(a, z)| {
                self.size(a) >= 2 && self.size(z) >= 2 && self.independent(a, z)
            })
            .map(|&(a, z)| (a.min(z), a.max(z)))
            .min()
            .map(|(lo, hi)| MergeCandidate {
                kind: MergeKind::Neighbors,
                coalition_ids: vec![lo, hi],
            })
    }

    fn validate_candidate(&self, cand: &MergeCandidate) -> Result<(), Error> {
        let ids = &cand.coalition_ids;
        if ids.len() < 2 {
            return Err(Error::InvalidCandidate {
                reason: "a merge needs at least two coalitions".into(),
            });
        }
        let distinct: BTreeSet<usize> = ids.iter().copied().collect();
        if distinct.len() != ids.len() {
            return Err(Error::InvalidCandidate {
                reason: "candidate repeats a coalition id".into(),
            });
        }
        for &id in ids {
            if !self.coalitions.contains_key(&id) {
                return Err(Error::StaleCandidate { id });
            }
        }
        if !self.pairwise_independent(ids) {
            return Err(Error::InvalidCandidate {
                reason: "candidate coalitions are not pairwise non-competing".into(),
            });
        }
        let edge = |a: usize, z: usize| self.benefit_edges.contains(&(a, z));
        let has_singleton = ids.iter().any(|&id| self.size(id) == 1);
        match cand.kind {
            MergeKind::Cycle => {
                if !has_singleton {
                    return Err(Error::InvalidCandidate {
                        reason: "cycle merge requires a singleton coalition".into(),
                    });
                }
                for k in 0..ids.len() {
                    let (a, z) = (ids[k], ids[(k + 1) % ids.len()]);
                    if !edge(a, z) {
                        return Err(Error::InvalidCandidate {
                            reason: format!("cycle edge {a}→{z} is missing from the quotient"),
                        });
                    }
                }
            }
            MergeKind::Path => {
                if !has_singleton {
                    return Err(Error::InvalidCandidate {
                        reason: "path merge requires a singleton coalition".into(),
                    });
                }
                if self.size(ids[0]) < 2 || self.size(*ids.last().unwrap()) < 2 {
                    return Err(Error::InvalidCandidate {
                        reason: "path merge endpoints must have at least two members".into(),
                    });
                }
                for pair in ids.windows(2) {
                    if !edge(pair[0], pair[1]) {
                        return Err(Error::InvalidCandidate {
                            reason: format!(
                                "path edge {}→{} is missing from the quotient",
                                pair[0], pair[1]
                            ),
                        });
                    }
                }
            }
            MergeKind::Neighbors => {
                if ids.len() != 2 {
                    return Err(Error::InvalidCandidate {
                        reason: "neighbor merge takes exactly two coalitions".into(),
                    });
                }
                if self.size(ids[0]) < 2 || self.size(ids[1]) < 2 {
                    return Err(Error::InvalidCandidate {
                        reason: "neighbor merge requires both coalitions to have two members"
                            .into(),
                    });
                }
                if !edge(ids[0], ids[1]) && !edge(ids[1], ids[0]) {
                    return Err(Error::InvalidCandidate {
                        reason: "neighbor merge requires a benefit edge between the pair".into(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Union the candidate's coalitions into a fresh node, rerouting every
    /// quotient edge onto it. Internal edges vanish (no self-loops) and
    /// parallel edges collapse. Returns the fresh id.
    pub fn merge(&mut self, cand: &MergeCandidate) -> Result<usize, Error> {
        self.validate_candidate(cand)?;
        let merged: BTreeSet<usize> = cand.coalition_ids.iter().copied().collect();
        let new_id = self.next_id;
        self.next_id += 1;

        let mut union: Option<Coalition> = None;
        for id in &merged {
            let part = self.coalitions.remove(id).expect("validated as live");
            union = Some(match union {
                None => part,
                Some(u) => u.union(&part),
            });
        }
        self.coalitions
            .insert(new_id, union.expect("candidate is non-empty"));

        let reroute = |id: usize| if merged.contains(&id) { new_id } else { id };
        self.benefit_edges = self
            .benefit_edges
            .iter()
            .filter_map(|&(a, z)| {
                let (a, z) = (reroute(a), reroute(z));
                (a != z).then_some((a, z))
            })
            .collect();
        self.competing_edges = self
            .competing_edges
            .iter()
            .filter_map(|&(a, z)| {
                let (a, z) = (reroute(a), reroute(z));
                (a != z).then_some((a.min(z), a.max(z)))
            })
            .collect();
        Ok(new_id)
    }
}

/// Split every block of `cover` into strongly connected components of its
/// induced benefit subgraph.
pub fn scc_refine(b: &BenefitGraph, cover: &Partition) -> Result<Partition, Error> {
    if b.n() != cover.n() {
        return Err(Error::NodeCountMismatch {
            left: b.n(),
            right: cover.n(),
        });
    }
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for block in cover.blocks() {
        let ids = block.indices();
        let pos = |v: usize| ids.binary_search(&v).expect("member of block");
        let edges: Vec<(usize, usize)> = b
            .edges()
            .filter(|&(s, d, _)| block.contains(s) && block.contains(d))
            .map(|(s, d, _)| (pos(s.0), pos(d.0)))
            .collect();
        let sub = DirectedGraph::new(ids.len(), edges)?;
        for comp in strongly_connected_components(&sub).blocks() {
            blocks.push(comp.members().map(|v| ids[v.0]).collect());
        }
    }
    Partition::from_index_blocks(b.n(), blocks)
}

/// The seed partition: greedy clique cover of the "can collaborate" graph,
/// refined into strongly connected components of the benefit graph.
pub fn baseline_partition(
    b: &BenefitGraph,
    c: &CompetingGraph,
    cfg: &FormConfig,
) -> Result<Partition, Error> {
    if b.n() != c.n() {
        return Err(Error::NodeCountMismatch {
            left: b.n(),
            right: c.n(),
        });
    }
    let cover = clique_partition(
        &inverse_graph(c),
        cfg.tie_break,
        Some(b),
        cfg.max_clique_nodes,
    )?;
    scc_refine(b, &cover)
}

/// Everything a formation run produces.
#[derive(Debug, Clone)]
pub struct FormationResult {
    /// The seed partition the merges started from.
    pub baseline: Partition,
    /// The final partition.
    pub partition: Partition,
    /// Every merge performed, in order.
    pub trace: Vec<MergeCandidate>,
    /// Final quotient state; callers can confirm no candidate remains.
    pub quotient: QuotientState,
}

fn merge_cycles(
    q: &mut QuotientState,
    limit: usize,
    trace: &mut Vec<MergeCandidate>,
) -> Result<(), Error> {
    while let Some(cand) = q.find_cycle_candidate(limit)? {
        q.merge(&cand)?;
        trace.push(cand);
    }
    Ok(())
}

fn merge_paths(
    q: &mut QuotientState,
    limit: usize,
    trace: &mut Vec<MergeCandidate>,
) -> Result<(), Error> {
    // Each path merge can create fresh cycles, which take priority.
    loop {
        match q.find_path_candidate(limit)? {
            Some(cand) => {
                q.merge(&cand)?;
                trace.push(cand);
                merge_cycles(q, limit, trace)?;
            }
            None => return Ok(()),
        }
    }
}

fn merge_neighbor_pairs(
    q: &mut QuotientState,
    limit: usize,
    trace: &mut Vec<MergeCandidate>,
) -> Result<(), Error> {
    loop {
        match q.find_neighbors_candidate() {
            Some(cand) => {
                q.merge(&cand)?;
                trace.push(cand);
                merge_cycles(q, limit, trace)?;
                merge_paths(q, limit, trace)?;
            }
            None => return Ok(()),
        }
    }
}

/// Run the merge phase on an existing seed partition.
pub fn form_from_baseline(
    b: &BenefitGraph,
    c: &CompetingGraph,
    baseline: &Partition,
    cfg: &FormConfig,
) -> Result<FormationResult, Error> {
    let mut q = QuotientState::build(b, c, baseline)?;
    let mut trace = Vec::new();
    merge_cycles(&mut q, cfg.enum_limit, &mut trace)?;
    merge_paths(&mut q, cfg.enum_limit, &mut trace)?;
    merge_neighbor_pairs(&mut q, cfg.enum_limit, &mut trace)?;
    Ok(FormationResult {
        baseline: baseline.clone(),
        partition: q.partition(),
        trace,
        quotient: q,
    })
}

/// Full pipeline: baseline seeding, then cycle, path, and neighbor merges to
/// a fixpoint.
pub fn form_coalitions(
    b: &BenefitGraph,
    c: &CompetingGraph,
    cfg: &FormConfig,
) -> Result<FormationResult, Error> {
    let baseline = baseline_partition(b, c, cfg)?;
    form_from_baseline(b, c, &baseline, cfg)
}
