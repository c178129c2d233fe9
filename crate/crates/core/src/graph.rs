//! Participant-level graph model.
//!
//! Three graphs over a fixed universe of `n` participants drive everything
//! else in this crate:
//!
//! * [`BenefitGraph`] — weighted directed edges; `(j, i)` with weight `w > 0`
//!   means training data from `j` improves `i`'s model.
//! * [`CompetingGraph`] — undirected pairs of participants that compete and
//!   therefore must never (even transitively) feed each other.
//! * [`DataUsageGraph`] — given a partition into coalitions, the benefit
//!   edges that are actually exercised: exactly those inside a coalition.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::Error;

/// Index of a participant in the fixed universe `[0, n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub usize);

impl NodeId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl From<usize> for NodeId {
    fn from(i: usize) -> Self {
        NodeId(i)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

fn check_node(node: usize, n: usize) -> Result<(), Error> {
    if node >= n {
        Err(Error::NodeOutOfRange { node, n })
    } else {
        Ok(())
    }
}

/// A non-empty set of participants. Members are kept sorted, so iteration
/// order (and any serialization derived from it) is canonical.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Coalition(BTreeSet<NodeId>);

impl Coalition {
    pub fn new(members: impl IntoIterator<Item = NodeId>) -> Result<Self, Error> {
        let set: BTreeSet<NodeId> = members.into_iter().collect();
        if set.is_empty() {
            return Err(Error::EmptyCoalition);
        }
        Ok(Coalition(set))
    }

    /// Convenience constructor from raw indices.
    pub fn from_indices(members: impl IntoIterator<Item = usize>) -> Result<Self, Error> {
        Self::new(members.into_iter().map(NodeId))
    }

    pub fn singleton(v: NodeId) -> Self {
        Coalition(BTreeSet::from([v]))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false // non-emptiness is a construction invariant
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.0.contains(&v)
    }

    /// Members in ascending order.
    pub fn members(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.0.iter().copied()
    }

    /// Smallest member; well-defined because coalitions are non-empty.
    pub fn min_member(&self) -> NodeId {
        *self.0.iter().next().expect("coalition is non-empty")
    }

    /// Set union with another coalition.
    pub fn union(&self, other: &Coalition) -> Coalition {
        Coalition(self.0.union(&other.0).copied().collect())
    }

    pub fn indices(&self) -> Vec<usize> {
        self.0.iter().map(|v| v.0).collect()
    }
}

impl fmt::Display for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, v) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

/// A partition of `[0, n)` into disjoint, covering coalitions.
///
/// Blocks are stored sorted by smallest member, so two partitions over the
/// same universe are equal iff they have identical block structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    n: usize,
    blocks: Vec<Coalition>,
}

impl Partition {
    pub fn new(n: usize, blocks: Vec<Coalition>) -> Result<Self, Error> {
        let mut seen = vec![false; n];
        for b in &blocks {
            for v in b.members() {
                check_node(v.0, n)?;
                if seen[v.0] {
                    return Err(Error::InvalidPartition {
                        reason: format!("{v} appears in more than one block"),
                    });
                }
                seen[v.0] = true;
            }
        }
        if let Some(missing) = seen.iter().position(|covered| !covered) {
            return Err(Error::InvalidPartition {
                reason: format!("v{missing} is not covered by any block"),
            });
        }
        let mut blocks = blocks;
        blocks.sort_by_key(|b| b.min_member());
        Ok(Partition { n, blocks })
    }

    /// Construct from raw index sets.
    pub fn from_index_blocks(
        n: usize,
        blocks: impl IntoIterator<Item = Vec<usize>>,
    ) -> Result<Self, Error> {
        let blocks = blocks
            .into_iter()
            .map(Coalition::from_indices)
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(n, blocks)
    }

    /// The finest partition: every participant alone.
    pub fn singletons(n: usize) -> Self {
        Partition {
            n,
            blocks: (0..n).map(|i| Coalition::singleton(NodeId(i))).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Coalition] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// The block containing `v`.
    pub fn block_of(&self, v: NodeId) -> Result<&Coalition, Error> {
        check_node(v.0, self.n)?;
        Ok(self
            .blocks
            .iter()
            .find(|b| b.contains(v))
            .expect("partition covers the universe"))
    }

    /// True iff every block of `self` is contained in a single block of
    /// `coarser` (i.e. `coarser` can be obtained by merging blocks of `self`).
    pub fn refines(&self, coarser: &Partition) -> bool {
        if self.n != coarser.n {
            return false;
        }
        self.blocks.iter().all(|b| {
            let host = coarser.block_of(b.min_member()).expect("same universe");
            b.members().all(|v| host.contains(v))
        })
    }
}

/// Weighted directed benefit relation over `[0, n)`.
///
/// Edge `(src, dst)` with weight `w > 0` reads "src benefits dst". Absent
/// edges have weight zero; zero or negative weights are rejected at
/// construction rather than stored.
#[derive(Debug, Clone, PartialEq)]
pub struct BenefitGraph {
    n: usize,
    edges: BTreeMap<(NodeId, NodeId), f64>,
}

impl BenefitGraph {
    pub fn empty(n: usize) -> Self {
        BenefitGraph {
            n,
            edges: BTreeMap::new(),
        }
    }

    pub fn from_edges(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self, Error> {
        let mut map = BTreeMap::new();
        for (src, dst, w) in edges {
            check_node(src, n)?;
            check_node(dst, n)?;
            if src == dst {
                return Err(Error::SelfLoop { node: src });
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::BadWeight { src, dst, weight: w });
            }
            if map.insert((NodeId(src), NodeId(dst)), w).is_some() {
                return Err(Error::DuplicateEdge { src, dst });
            }
        }
        Ok(BenefitGraph { n, edges: map })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Weight of `(src, dst)`, zero when the edge is absent.
    pub fn weight(&self, src: NodeId, dst: NodeId) -> f64 {
        self.edges.get(&(src, dst)).copied().unwrap_or(0.0)
    }

    pub fn has_edge(&self, src: NodeId, dst: NodeId) -> bool {
        self.edges.contains_key(&(src, dst))
    }

    /// All edges as `(src, dst, weight)` in ascending `(src, dst)` order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId, f64)> + '_ {
        self.edges.iter().map(|(&(s, d), &w)| (s, d, w))
    }

    fn check_members(&self, s: &Coalition) -> Result<(), Error> {
        for v in s.members() {
            check_node(v.0, self.n)?;
        }
        Ok(())
    }

    /// Restriction to the coalition `s`: same universe, only edges with both
    /// endpoints in `s`.
    pub fn induced_subgraph(&self, s: &Coalition) -> Result<BenefitGraph, Error> {
        self.check_members(s)?;
        let edges = self
            .edges
            .iter()
            .filter(|&(&(src, dst), _)| s.contains(src) && s.contains(dst))
            .map(|(&k, &w)| (k, w))
            .collect();
        Ok(BenefitGraph { n: self.n, edges })
    }

    /// Total benefit exchanged inside `s`: the sum of all induced edge
    /// weights.
    pub fn coalition_utility(&self, s: &Coalition) -> Result<f64, Error> {
        self.check_members(s)?;
        let mut total = 0.0;
        for src in s.members() {
            for dst in s.members() {
                if src != dst {
                    total += self.weight(src, dst);
                }
            }
        }
        Ok(total)
    }

    /// What member `i` gains from `s`: the sum of weights flowing into `i`
    /// from the other members.
    pub fn member_utility(&self, s: &Coalition, i: NodeId) -> Result<f64, Error> {
        self.check_members(s)?;
        if !s.contains(i) {
            return Err(Error::NotAMember { node: i.0 });
        }
        let mut total = 0.0;
        for j in s.members() {
            if j != i {
                total += self.weight(j, i);
            }
        }
        Ok(total)
    }

    /// The mutual-benefit condition: in a coalition of two or more, every
    /// member must both contribute to someone and gain from someone inside
    /// the coalition. Singletons pass vacuously.
    pub fn is_coalition_valid(&self, s: &Coalition) -> Result<bool, Error> {
        self.check_members(s)?;
        if s.len() == 1 {
            return Ok(true);
        }
        for i in s.members() {
            let gives = s.members().any(|j| j != i && self.has_edge(i, j));
            let gains = s.members().any(|j| j != i && self.has_edge(j, i));
            if !gives || !gains {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The benefit edges a partition actually exercises: the union of each
    /// block's induced subgraph. No edge crosses a block boundary.
    pub fn data_usage_graph(&self, p: &Partition) -> Result<DataUsageGraph, Error> {
        if p.n() != self.n {
            return Err(Error::NodeCountMismatch {
                left: self.n,
                right: p.n(),
            });
        }
        let mut edges = BTreeSet::new();
        for block in p.blocks() {
            for (src, dst, _) in self.induced_subgraph(block)?.edges() {
                edges.insert((src, dst));
            }
        }
        Ok(DataUsageGraph { n: self.n, edges })
    }
}

/// Undirected competition relation over `[0, n)`. Pairs are stored with the
/// smaller id first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompetingGraph {
    n: usize,
    pairs: BTreeSet<(NodeId, NodeId)>,
}

impl CompetingGraph {
    pub fn empty(n: usize) -> Self {
        CompetingGraph {
            n,
            pairs: BTreeSet::new(),
        }
    }

    pub fn from_pairs(
        n: usize,
        pairs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, Error> {
        let mut set = BTreeSet::new();
        for (a, b) in pairs {
            check_node(a, n)?;
            check_node(b, n)?;
            if a == b {
                return Err(Error::SelfLoop { node: a });
            }
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            if !set.insert((NodeId(lo), NodeId(hi))) {
                return Err(Error::DuplicateEdge { src: lo, dst: hi });
            }
        }
        Ok(CompetingGraph { n, pairs: set })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pair_count(&self) -> usize {
        self.pairs.len()
    }

    pub fn competing(&self, a: NodeId, b: NodeId) -> bool {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        self.pairs.contains(&(lo, hi))
    }

    /// All pairs `(a, b)` with `a < b`, ascending.
    pub fn pairs(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.pairs.iter().copied()
    }
}

/// The directed edges along which data actually flows under a given
/// partition. Produced by [`BenefitGraph::data_usage_graph`]; weights are
/// irrelevant here, only connectivity matters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DataUsageGraph {
    n: usize,
    edges: BTreeSet<(NodeId, NodeId)>,
}

impl DataUsageGraph {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, src: NodeId, dst: NodeId) -> bool {
        self.edges.contains(&(src, dst))
    }

    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.edges.iter().copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coalition(members: &[usize]) -> Coalition {
        Coalition::from_indices(members.iter().copied()).unwrap()
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(matches!(
            BenefitGraph::from_edges(3, [(0, 0, 1.0)]),
            Err(Error::SelfLoop { node: 0 })
        ));
        assert!(matches!(
            BenefitGraph::from_edges(3, [(0, 1, 0.0)]),
            Err(Error::BadWeight { .. })
        ));
        assert!(matches!(
            BenefitGraph::from_edges(3, [(0, 1, -2.0)]),
            Err(Error::BadWeight { .. })
        ));
        assert!(matches!(
            BenefitGraph::from_edges(3, [(0, 3, 1.0)]),
            Err(Error::NodeOutOfRange { node: 3, n: 3 })
        ));
        assert!(matches!(
            BenefitGraph::from_edges(3, [(0, 1, 1.0), (0, 1, 2.0)]),
            Err(Error::DuplicateEdge { src: 0, dst: 1 })
        ));
        assert!(matches!(
            CompetingGraph::from_pairs(3, [(1, 2), (2, 1)]),
            Err(Error::DuplicateEdge { src: 1, dst: 2 })
        ));
    }

    #[test]
    fn induced_subgraph_keeps_only_internal_edges() {
        let g = BenefitGraph::from_edges(3, [(0, 1, 1.0), (1, 2, 2.0), (2, 0, 3.0)]).unwrap();
        let sub = g.induced_subgraph(&coalition(&[0, 1])).unwrap();
        assert_eq!(sub.edge_count(), 1);
        assert_eq!(sub.weight(NodeId(0), NodeId(1)), 1.0);
        // Full coalition keeps everything; singleton keeps nothing.
        assert_eq!(g.induced_subgraph(&coalition(&[0, 1, 2])).unwrap(), g);
        assert_eq!(
            g.induced_subgraph(&coalition(&[1])).unwrap().edge_count(),
            0
        );
    }

    #[test]
    fn coalition_utility_sums_induced_weights() {
        let g = BenefitGraph::from_edges(3, [(0, 1, 1.0), (1, 2, 1.0), (2, 0, 1.0)]).unwrap();
        assert_eq!(g.coalition_utility(&coalition(&[0, 1, 2])).unwrap(), 3.0);
        assert_eq!(g.coalition_utility(&coalition(&[0, 2])).unwrap(), 1.0);
        assert_eq!(g.coalition_utility(&coalition(&[1])).unwrap(), 0.0);
        let h = BenefitGraph::from_edges(2, [(0, 1, 2.5), (1, 0, 0.5)]).unwrap();
        assert_eq!(h.coalition_utility(&coalition(&[0, 1])).unwrap(), 3.0);
    }

    #[test]
    fn member_utility_sums_incoming_weights() {
        let g = BenefitGraph::from_edges(3, [(0, 1, 2.0), (2, 1, 3.0)]).unwrap();
        assert_eq!(
            g.member_utility(&coalition(&[0, 1, 2]), NodeId(1)).unwrap(),
            5.0
        );
        assert_eq!(
            g.member_utility(&coalition(&[0, 1]), NodeId(1)).unwrap(),
            2.0
        );
        assert_eq!(
            g.member_utility(&coalition(&[0, 1]), NodeId(0)).unwrap(),
            0.0
        );
        assert!(matches!(
            g.member_utility(&coalition(&[0, 1]), NodeId(2)),
            Err(Error::NotAMember { node: 2 })
        ));
    }

    #[test]
    fn utility_is_additive_over_members() {
        let g = BenefitGraph::from_edges(
            4,
            [
                (0, 1, 1.0),
                (1, 0, 0.25),
                (1, 2, 2.0),
                (3, 2, 0.5),
                (2, 3, 1.5),
            ],
        )
        .unwrap();
        let s = coalition(&[0, 1, 2, 3]);
        let sum: f64 = s
            .members()
            .map(|v| g.member_utility(&s, v).unwrap())
            .sum();
        assert!((sum - g.coalition_utility(&s).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn coalition_validity_needs_flow_in_both_directions() {
        // One-way edge: 0 gains nothing, 1 contributes nothing.
        let g = BenefitGraph::from_edges(2, [(0, 1, 1.0)]).unwrap();
        assert!(!g.is_coalition_valid(&coalition(&[0, 1])).unwrap());
        // Mutual pair is fine.
        let h = BenefitGraph::from_edges(2, [(0, 1, 1.0), (1, 0, 1.0)]).unwrap();
        assert!(h.is_coalition_valid(&coalition(&[0, 1])).unwrap());
        // A cycle gives everyone both an inflow and an outflow.
        let c = BenefitGraph::from_edges(3, [(0, 1, 1.0), (1, 2, 1.0), (2, 0, 1.0)]).unwrap();
        assert!(c.is_coalition_valid(&coalition(&[0, 1, 2])).unwrap());
        // Singletons pass regardless of edges.
        assert!(g.is_coalition_valid(&coalition(&[0])).unwrap());
        // 2 sits inside {0,1,2} with no edges at all: invalid.
        let lonely = BenefitGraph::from_edges(3, [(0, 1, 1.0), (1, 0, 1.0)]).unwrap();
        assert!(!lonely.is_coalition_valid(&coalition(&[0, 1, 2])).unwrap());
        // Out-of-range members are an error, not a verdict.
        assert!(h.is_coalition_valid(&coalition(&[0, 1, 2])).is_err());
    }

    #[test]
    fn data_usage_graph_never_crosses_blocks() {
        let g = BenefitGraph::from_edges(4, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 2, 1.0)])
            .unwrap();
        let p = Partition::from_index_blocks(4, [vec![0, 1], vec![2, 3]]).unwrap();
        let u = g.data_usage_graph(&p).unwrap();
        assert!(u.has_edge(NodeId(0), NodeId(1)));
        assert!(u.has_edge(NodeId(2), NodeId(3)));
        assert!(u.has_edge(NodeId(3), NodeId(2)));
        assert!(!u.has_edge(NodeId(1), NodeId(2)), "cross-block edge leaked");
        assert_eq!(u.edge_count(), 3);

        // Singleton partition uses nothing; grand coalition uses everything.
        let fine = g.data_usage_graph(&Partition::singletons(4)).unwrap();
        assert_eq!(fine.edge_count(), 0);
        let grand = Partition::from_index_blocks(4, [vec![0, 1, 2, 3]]).unwrap();
        assert_eq!(g.data_usage_graph(&grand).unwrap().edge_count(), 4);
    }

    #[test]
    fn partition_validation_catches_overlap_and_gaps() {
        assert!(Partition::from_index_blocks(3, [vec![0, 1], vec![1, 2]]).is_err());
        assert!(Partition::from_index_blocks(3, [vec![0, 1]]).is_err());
        assert!(Partition::from_index_blocks(3, [vec![0, 1], vec![2]]).is_ok());
        assert!(Partition::from_index_blocks(3, [vec![0, 3], vec![1, 2]]).is_err());
    }

    #[test]
    fn partition_blocks_are_canonically_ordered() {
        let p = Partition::from_index_blocks(5, [vec![3, 4], vec![2, 0], vec![1]]).unwrap();
        let mins: Vec<usize> = p.blocks().iter().map(|b| b.min_member().0).collect();
        assert_eq!(mins, vec![0, 1, 3]);
        let q = Partition::from_index_blocks(5, [vec![1], vec![0, 2], vec![4, 3]]).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn refinement_is_detected() {
        let fine = Partition::from_index_blocks(4, [vec![0], vec![1], vec![2, 3]]).unwrap();
        let coarse = Partition::from_index_blocks(4, [vec![0, 1], vec![2, 3]]).unwrap();
        assert!(fine.refines(&coarse));
        assert!(!coarse.refines(&fine));
        assert!(fine.refines(&fine));
    }
}
