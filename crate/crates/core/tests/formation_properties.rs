//! Property tests for the utility model and the formation pipeline.

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;

use fedcoalitions::former::{form_coalitions, FormConfig, QuotientState};
use fedcoalitions::graph::{BenefitGraph, Coalition, CompetingGraph, Partition};
use fedcoalitions::oracle::{
    check_principle1, check_principle2, competitors_sharing_a_coalition,
};
use fedcoalitions::UTILITY_TOL;

const MAX_N: usize = 8;

/// Random instance: up to `MAX_N` participants, ~35% of ordered pairs carry
/// benefit, ~25% of unordered pairs compete.
fn arb_instance() -> impl Strategy<Value = (BenefitGraph, CompetingGraph)> {
    (1..=MAX_N).prop_flat_map(|n| {
        let benefit = proptest::collection::vec(
            proptest::option::weighted(0.35, 0.1f64..2.0),
            n * n,
        );
        let competing = proptest::collection::vec(
            proptest::bool::weighted(0.25),
            n * n.saturating_sub(1) / 2,
        );
        (Just(n), benefit, competing).prop_map(|(n, bvec, cvec)| {
            let mut edges = Vec::new();
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        if let Some(w) = bvec[i * n + j] {
                            edges.push((i, j, w));
                        }
                    }
                }
            }
            let mut pairs = Vec::new();
            let mut k = 0;
            for a in 0..n {
                for b in (a + 1)..n {
                    if cvec[k] {
                        pairs.push((a, b));
                    }
                    k += 1;
                }
            }
            (
                BenefitGraph::from_edges(n, edges).unwrap(),
                CompetingGraph::from_pairs(n, pairs).unwrap(),
            )
        })
    })
}

fn to_coalition(n: usize, mask: &[bool]) -> Option<Coalition> {
    let members: Vec<usize> = (0..n).filter(|&i| mask[i]).collect();
    Coalition::from_indices(members).ok()
}

proptest! {
    /// Coalition utility decomposes exactly into the members' utilities.
    #[test]
    fn utilities_add_up(
        (b, _) in arb_instance(),
        mask in proptest::collection::vec(any::<bool>(), MAX_N),
    ) {
        let s = match to_coalition(b.n(), &mask) {
            Some(s) => s,
            None => return Ok(()),
        };
        let total = b.coalition_utility(&s).unwrap();
        let by_member: f64 = s.members().map(|v| b.member_utility(&s, v).unwrap()).sum();
        prop_assert!((total - by_member).abs() <= UTILITY_TOL * (1.0 + total.abs()));
    }

    /// Growing a coalition never hurts an existing member: weights are
    /// positive, so inflow only accumulates.
    #[test]
    fn member_utility_is_monotone(
        (b, _) in arb_instance(),
        small in proptest::collection::vec(any::<bool>(), MAX_N),
        extra in proptest::collection::vec(any::<bool>(), MAX_N),
    ) {
        let n = b.n();
        let s = match to_coalition(n, &small) {
            Some(s) => s,
            None => return Ok(()),
        };
        let grown: Vec<bool> = (0..n).map(|i| small[i] || extra[i]).collect();
        let s2 = to_coalition(n, &grown).unwrap();
        for v in s.members() {
            let before = b.member_utility(&s, v).unwrap();
            let after = b.member_utility(&s2, v).unwrap();
            prop_assert!(after + UTILITY_TOL >= before);
        }
    }

    /// The data-usage graph is exactly the within-block benefit edges.
    #[test]
    fn data_usage_is_block_local(
        (b, _) in arb_instance(),
        labels in proptest::collection::vec(0..MAX_N, MAX_N),
    ) {
        let n = b.n();
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (v, &label) in labels.iter().enumerate().take(n) {
            groups.entry(label).or_default().push(v);
        }
        let p = Partition::from_index_blocks(n, groups.into_values()).unwrap();
        let usage = b.data_usage_graph(&p).unwrap();
        for (s, d) in usage.edges() {
            prop_assert!(p.block_of(s).unwrap().contains(d), "edge crosses blocks");
            prop_assert!(b.has_edge(s, d), "usage edge not in benefit graph");
        }
        for block in p.blocks() {
            for s in block.members() {
                for d in block.members() {
                    if s != d && b.has_edge(s, d) {
                        prop_assert!(usage.has_edge(s, d), "internal edge missing");
                    }
                }
            }
        }
    }

    /// Seed coalitions are already self-sustaining: every baseline block
    /// passes the mutual-benefit condition and contains no competitors.
    #[test]
    fn baseline_blocks_sustain_themselves((b, c) in arb_instance()) {
        let baseline =
            fedcoalitions::former::baseline_partition(&b, &c, &FormConfig::default()).unwrap();
        for block in baseline.blocks() {
            prop_assert!(b.is_coalition_valid(block).unwrap());
        }
        prop_assert!(competitors_sharing_a_coalition(&c, &baseline).unwrap().is_empty());
    }

    /// The full pipeline output satisfies both principles, only coarsens the
    /// baseline, never loses utility, and leaves no merge candidate behind.
    #[test]
    fn formed_partitions_keep_every_promise((b, c) in arb_instance()) {
        let cfg = FormConfig::default();
        let out = form_coalitions(&b, &c, &cfg).unwrap();

        prop_assert!(check_principle1(&b, &out.partition).unwrap().is_empty());
        prop_assert!(check_principle2(&b, &c, &out.partition).unwrap().is_empty());
        prop_assert!(competitors_sharing_a_coalition(&c, &out.partition).unwrap().is_empty());

        prop_assert!(out.baseline.refines(&out.partition));

        let total = |p: &Partition| -> f64 {
            p.blocks().iter().map(|s| b.coalition_utility(s).unwrap()).sum()
        };
        prop_assert!(total(&out.partition) + UTILITY_TOL >= total(&out.baseline));
        for v in (0..b.n()).map(fedcoalitions::NodeId) {
            let before = b
                .member_utility(out.baseline.block_of(v).unwrap(), v)
                .unwrap();
            let after = b
                .member_utility(out.partition.block_of(v).unwrap(), v)
                .unwrap();
            prop_assert!(after + UTILITY_TOL >= before, "{v} lost utility");
        }

        let q = &out.quotient;
        prop_assert!(q.find_cycle_candidate(1_000_000).unwrap().is_none());
        prop_assert!(q.find_path_candidate(1_000_000).unwrap().is_none());
        prop_assert!(q.find_neighbors_candidate().is_none());

        // Same inputs, same answer — the pipeline has no hidden state.
        let again = form_coalitions(&b, &c, &cfg).unwrap();
        prop_assert_eq!(&again.partition, &out.partition);
        prop_assert_eq!(&again.trace, &out.trace);
    }

    /// The incrementally maintained quotient equals one rebuilt from scratch
    /// on the final partition, up to the canonical id renaming.
    #[test]
    fn merged_quotient_matches_rebuild((b, c) in arb_instance()) {
        let out = form_coalitions(&b, &c, &FormConfig::default()).unwrap();
        let q = &out.quotient;

        let mut by_min: Vec<(usize, usize)> = q
            .ids()
            .map(|id| (q.coalition(id).unwrap().min_member().0, id))
            .collect();
        by_min.sort();
        let rank: BTreeMap<usize, usize> = by_min
            .iter()
            .enumerate()
            .map(|(r, &(_, id))| (id, r))
            .collect();

        let rebuilt = QuotientState::build(&b, &c, &out.partition).unwrap();
        let benefit: BTreeSet<(usize, usize)> = q
            .benefit_edges()
            .map(|(a, z)| (rank[&a], rank[&z]))
            .collect();
        prop_assert_eq!(benefit, rebuilt.benefit_edges().collect::<BTreeSet<_>>());
        let competing: BTreeSet<(usize, usize)> = q
            .competing_edges()
            .map(|(a, z)| {
                let (a, z) = (rank[&a], rank[&z]);
                (a.min(z), a.max(z))
            })
            .collect();
        prop_assert_eq!(competing, rebuilt.competing_edges().collect::<BTreeSet<_>>());
    }
}
