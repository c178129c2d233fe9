//! Minimal end-to-end use: form coalitions, then audit the result.

use fedcoalitions::oracle::DEFAULT_ORACLE_BLOCK_CAP;
use fedcoalitions::{
    form_coalitions, verify, BenefitGraph, CompetingGraph, FormConfig, MergeMode,
};

fn main() -> Result<(), fedcoalitions::Error> {
    let benefit = BenefitGraph::from_edges(3, [(0, 1, 0.7), (1, 0, 0.2), (1, 2, 0.9)])?;
    let competing = CompetingGraph::from_pairs(3, [(0, 2)])?;

    let out = form_coalitions(&benefit, &competing, &FormConfig::default())?;
    for block in out.partition.blocks() {
        println!("{block}");
    }

    let report = verify(
        &benefit,
        &competing,
        &out.partition,
        MergeMode::StrictIndependence,
        DEFAULT_ORACLE_BLOCK_CAP,
    )?;
    assert!(report.all_ok());
    Ok(())
}
