//! Independent verification of formed partitions.
//!
//! The former in [`crate::former`] is greedy and incremental; this module
//! re-derives everything from first principles so the two sides can audit
//! each other. [`verify`] checks the two collaboration principles directly
//! against the participant-level graphs and then searches *exhaustively*
//! over subsets of the partition for a merge that would be admissible and
//! strictly more valuable — the certificate that the former stopped too
//! early. A formed partition is optimal precisely when no such subset
//! exists.

use itertools::Itertools;

use crate::error::Error;
use crate::graph::{BenefitGraph, Coalition, CompetingGraph, NodeId, Partition};
use crate::primitives::{reachable, DirectedGraph};
use crate::UTILITY_TOL;

/// Default cap on partition size for [`find_blocking_merge`]; the search is
/// exponential in the number of blocks.
pub const DEFAULT_ORACLE_BLOCK_CAP: usize = 15;

/// How strictly a prospective merged coalition is vetted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MergeMode {
    /// Competitors may never share a coalition at all. This is what the
    /// former guarantees, so it is the default.
    #[default]
    StrictIndependence,
    /// Competitors may share a coalition as long as neither can reach the
    /// other through the coalition's own benefit edges. A deliberately
    /// looser reading, useful for probing how much the strict rule costs.
    Reachability,
}

impl MergeMode {
    pub fn name(self) -> &'static str {
        match self {
            MergeMode::StrictIndependence => "strict-independence",
            MergeMode::Reachability => "reachability",
        }
    }
}

/// Which half of the mutual-benefit condition a member is missing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MissingFlow {
    /// The member contributes nothing to the rest of the coalition.
    Outgoing,
    /// The member gains nothing from the rest of the coalition.
    Incoming,
}

/// One concrete defect found in a partition.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// Principle 1: a coalition member rides for free in one direction.
    FreeRider {
        coalition: Coalition,
        member: NodeId,
        missing: MissingFlow,
    },
    /// Principle 2: data from `from` can reach its competitor `to` through
    /// the edges the partition actually exercises.
    CompetitorReach { from: NodeId, to: NodeId },
    /// Blocks whose union would be admissible and strictly more valuable
    /// than keeping them apart.
    BlockingMerge {
        block_indices: Vec<usize>,
        gain: f64,
    },
}

/// A utility-improving admissible merge, the certificate of non-optimality.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockingMerge {
    /// Indices into the partition's canonical block order.
    pub block_indices: Vec<usize>,
    /// How much total utility the union adds over the separate blocks.
    pub gain: f64,
}

/// Principle 1 — no free riders. Every member of every multi-member
/// coalition must both contribute benefit to and gain benefit from the rest
/// of its coalition. Returns one finding per member and missing direction.
pub fn check_principle1(b: &BenefitGraph, p: &Partition) -> Result<Vec<Violation>, Error> {
    if b.n() != p.n() {
        return Err(Error::NodeCountMismatch {
            left: b.n(),
            right: p.n(),
        });
    }
    let mut findings = Vec::new();
    for block in p.blocks() {
        if block.len() == 1 {
            continue;
        }
        for i in block.members() {
            let gives = block.members().any(|j| j != i && b.has_edge(i, j));
            let gains = block.members().any(|j| j != i && b.has_edge(j, i));
            if !gives {
                findings.push(Violation::FreeRider {
                    coalition: block.clone(),
                    member: i,
                    missing: MissingFlow::Outgoing,
                });
            }
            if !gains {
                findings.push(Violation::FreeRider {
                    coalition: block.clone(),
                    member: i,
                    missing: MissingFlow::Incoming,
                });
            }
        }
    }
    Ok(findings)
}

/// Principle 2 — competitor isolation. For every competing pair, neither
/// side may reach the other along the data-usage graph (the benefit edges
/// the partition actually exercises). Returns one finding per violating
/// ordered pair.
pub fn check_principle2(
    b: &BenefitGraph,
    c: &CompetingGraph,
    p: &Partition,
) -> Result<Vec<Violation>, Error> {
    if b.n() != c.n() {
        return Err(Error::NodeCountMismatch {
            left: b.n(),
            right: c.n(),
        });
    }
    let usage = b.data_usage_graph(p)?;
    let g = DirectedGraph::new(usage.n(), usage.edges().map(|(s, d)| (s.0, d.0)))?;
    let mut findings = Vec::new();
    for (x, y) in c.pairs() {
        if reachable(&g, x.0, y.0) {
            findings.push(Violation::CompetitorReach { from: x, to: y });
        }
        if reachable(&g, y.0, x.0) {
            findings.push(Violation::CompetitorReach { from: y, to: x });
        }
    }
    Ok(findings)
}

/// Competing pairs that ended up in the same coalition — the stronger
/// structural guarantee the former maintains, checked directly.
pub fn competitors_sharing_a_coalition(
    c: &CompetingGraph,
    p: &Partition,
) -> Result<Vec<(NodeId, NodeId)>, Error> {
    if c.n() != p.n() {
        return Err(Error::NodeCountMismatch {
            left: c.n(),
            right: p.n(),
        });
    }
    let mut pairs = Vec::new();
    for (x, y) in c.pairs() {
        if p.block_of(x)?.contains(y) {
            pairs.push((x, y));
        }
    }
    Ok(pairs)
}

/// Would `union` be acceptable as a single coalition under `mode`?
///
/// Both modes demand the mutual-benefit condition. Strict independence
/// additionally bans any internal competing pair; reachability mode only
/// bans internal competing pairs that can reach each other through the
/// union's own benefit edges.
pub fn merged_admissible(
    b: &BenefitGraph,
    c: &CompetingGraph,
    union: &Coalition,
    mode: MergeMode,
) -> Result<bool, Error> {
    if b.n() != c.n() {
        return Err(Error::NodeCountMismatch {
            left: b.n(),
            right: c.n(),
        });
    }
    if !b.is_coalition_valid(union)? {
        return Ok(false);
    }
    let internal: Vec<(NodeId, NodeId)> = c
        .pairs()
        .filter(|&(x, y)| union.contains(x) && union.contains(y))
        .collect();
    match mode {
        MergeMode::StrictIndependence => Ok(internal.is_empty()),
        MergeMode::Reachability => {
            if internal.is_empty() {
                return Ok(true);
            }
            let induced = b.induced_subgraph(union)?;
            let g = DirectedGraph::new(induced.n(), induced.edges().map(|(s, d, _)| (s.0, d.0)))?;
            for (x, y) in internal {
                if reachable(&g, x.0, y.0) || reachable(&g, y.0, x.0) {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}

/// Exhaustive search for a set of two or more blocks whose union is
/// admissible and strictly more valuable (beyond [`UTILITY_TOL`]) than the
/// blocks separately. Subsets are tried smallest-first, lexicographically,
/// so the reported counterexample is minimal. Refuses partitions with more
/// than `cap` blocks — the subset space doubles per block.
pub fn find_blocking_merge(
    b: &BenefitGraph,
    c: &CompetingGraph,
    p: &Partition,
    mode: MergeMode,
    cap: usize,
) -> Result<Option<BlockingMerge>, Error> {
    let k = p.len();
    if k > cap {
        return Err(Error::SizeLimit {
            what: "blocking-merge search",
            limit: cap,
            actual: k,
        });
    }
    let block_utility: Vec<f64> = p
        .blocks()
        .iter()
        .map(|s| b.coalition_utility(s))
        .collect::<Result<_, _>>()?;
    for size in 2..=k {
        for combo in (0..k).combinations(size) {
            let union = combo
                .iter()
                .map(|&i| p.blocks()[i].clone())
                .reduce(|u, s| u.union(&s))
                .expect("combinations are non-empty");
            if !merged_admissible(b, c, &union, mode)? {
                continue;
            }
            let apart: f64 = combo.iter().map(|&i| block_utility[i]).sum();
            let gain = b.coalition_utility(&union)? - apart;
            if gain > UTILITY_TOL {
                return Ok(Some(BlockingMerge {
                    block_indices: combo,
                    gain,
                }));
            }
        }
    }
    Ok(None)
}

/// The full audit: both principles plus the optimality search.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub principle1_ok: bool,
    pub principle2_ok: bool,
    pub optimal_ok: bool,
    pub mode: MergeMode,
    pub violations: Vec<Violation>,
}

impl VerificationReport {
    pub fn all_ok(&self) -> bool {
        self.principle1_ok && self.principle2_ok && self.optimal_ok
    }
}

/// Run every check against `p` and bundle the findings.
pub fn verify(
    b: &BenefitGraph,
    c: &CompetingGraph,
    p: &Partition,
    mode: MergeMode,
    cap: usize,
) -> Result<VerificationReport, Error> {
    let mut violations = check_principle1(b, p)?;
    let p1 = violations.is_empty();
    let reach = check_principle2(b, c, p)?;
    let p2 = reach.is_empty();
    violations.extend(reach);
    let blocking = find_blocking_merge(b, c, p, mode, cap)?;
    let optimal = blocking.is_none();
    if let Some(bm) = blocking {
        violations.push(Violation::BlockingMerge {
            block_indices: bm.block_indices,
            gain: bm.gain,
        });
    }
    Ok(VerificationReport {
        principle1_ok: p1,
        principle2_ok: p2,
        optimal_ok: optimal,
        mode,
        violations,
    })
}
