//! Run one instance end to end, or sweep competition intensity, and package
//! the results as serializable reports.
//!
//! JSON output is deterministic: timing data is attached only on request, so
//! two runs over the same instance with the same options produce
//! byte-identical documents.

use std::time::Instant;

use fedcoalitions::{
    baseline_partition, form_from_baseline, verify, BenefitGraph, MergeMode, MissingFlow,
    Partition, QuotientState, VerificationReport, Violation, UTILITY_TOL,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::CliError;
use crate::instance::{Instance, InstanceSpec, WeightDist};

pub use fedcoalitions::FormConfig;

/// When to run the exhaustive audit after forming coalitions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum VerifyPolicy {
    /// Verify when the baseline has at most `oracle_cap` blocks, skip
    /// otherwise. The audit is exponential in the block count, so this keeps
    /// large runs fast while still auditing everything small.
    #[default]
    Auto,
    /// Always verify; large partitions abort with a limit error rather than
    /// silently skipping the audit.
    Always,
    /// Never verify.
    Never,
}

/// Everything that shapes a run besides the instance itself.
#[derive(Debug, Clone)]
pub struct EngineOptions {
    pub form: FormConfig,
    pub mode: MergeMode,
    pub oracle_cap: usize,
    pub verify: VerifyPolicy,
    /// Attach wall-clock timings to the report. Off by default so equal runs
    /// produce byte-identical output.
    pub timings: bool,
}

impl Default for EngineOptions {
    fn default() -> Self {
        EngineOptions {
            form: FormConfig::default(),
            mode: MergeMode::default(),
            oracle_cap: fedcoalitions::oracle::DEFAULT_ORACLE_BLOCK_CAP,
            verify: VerifyPolicy::default(),
            timings: false,
        }
    }
}

/// One merge step, resolved to concrete member sets for readability.
#[derive(Debug, Clone, Serialize)]
pub struct TraceEntryDoc {
    /// Which move fired: `cycle`, `path`, or `neighbors`.
    pub kind: &'static str,
    /// Quotient-graph ids of the merged coalitions, in canonical order.
    pub coalition_ids: Vec<usize>,
    /// The member sets behind those ids at the moment of the merge.
    pub members: Vec<Vec<usize>>,
    /// The id minted for the union.
    pub merged_id: usize,
}

/// A serializable defect, resolved to plain indices.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ViolationDoc {
    FreeRider {
        coalition: Vec<usize>,
        member: usize,
        missing: &'static str,
    },
    CompetitorReach {
        from: usize,
        to: usize,
    },
    BlockingMerge {
        block_indices: Vec<usize>,
        blocks: Vec<Vec<usize>>,
        gain: f64,
    },
}

/// Audit results in report form.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationDoc {
    pub principle1_ok: bool,
    pub principle2_ok: bool,
    pub optimal_ok: bool,
    pub all_ok: bool,
    pub mode: &'static str,
    pub violations: Vec<ViolationDoc>,
}

/// Wall-clock phase timings in milliseconds. Only attached on request.
#[derive(Debug, Clone, Serialize)]
pub struct TimingsDoc {
    pub baseline_ms: f64,
    pub merge_ms: f64,
    pub verify_ms: f64,
    pub total_ms: f64,
}

/// The full record of one formation run.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub n: usize,
    pub baseline: Vec<Vec<usize>>,
    pub partition: Vec<Vec<usize>>,
    pub baseline_utility: f64,
    pub total_utility: f64,
    /// Indexed by participant: benefit flowing to them inside their block.
    pub per_member_utilities: Vec<f64>,
    pub merge_trace: Vec<TraceEntryDoc>,
    /// `null` when verification was skipped by policy.
    pub verification: Option<VerificationDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<TimingsDoc>,
}

/// Sum of every block's internal utility.
pub fn partition_utility(b: &BenefitGraph, p: &Partition) -> Result<f64, CliError> {
    let mut total = 0.0;
    for block in p.blocks() {
        total += b.coalition_utility(block)?;
    }
    Ok(total)
}

fn blocks_as_indices(p: &Partition) -> Vec<Vec<usize>> {
    p.blocks().iter().map(|b| b.indices()).collect()
}

/// Resolve an audit report against the partition it judged.
pub fn verification_doc(report: &VerificationReport, p: &Partition) -> VerificationDoc {
    let violations = report
        .violations
        .iter()
        .map(|v| match v {
            Violation::FreeRider {
                coalition,
                member,
                missing,
            } => ViolationDoc::FreeRider {
                coalition: coalition.indices(),
                member: member.index(),
                missing: match missing {
                    MissingFlow::Outgoing => "outgoing",
                    MissingFlow::Incoming => "incoming",
                },
            },
            Violation::CompetitorReach { from, to } => ViolationDoc::CompetitorReach {
                from: from.index(),
                to: to.index(),
            },
            Violation::BlockingMerge {
                block_indices,
                gain,
            } => ViolationDoc::BlockingMerge {
                block_indices: block_indices.clone(),
                blocks: block_indices
                    .iter()
                    .map(|&i| p.blocks()[i].indices())
                    .collect(),
                gain: *gain,
            },
        })
        .collect();
    VerificationDoc {
        principle1_ok: report.principle1_ok,
        principle2_ok: report.principle2_ok,
        optimal_ok: report.optimal_ok,
        all_ok: report.all_ok(),
        mode: report.mode.name(),
        violations,
    }
}

/// Replay the merge trace against a fresh quotient to recover the member
/// sets each step actually merged.
fn resolve_trace(
    inst: &Instance,
    baseline: &Partition,
    trace: &[fedcoalitions::MergeCandidate],
) -> Result<Vec<TraceEntryDoc>, CliError> {
    let mut q = QuotientState::build(&inst.benefit, &inst.competing, baseline)?;
    let mut out = Vec::with_capacity(trace.len());
    for cand in trace {
        let members = cand
            .coalition_ids
            .iter()
            .map(|&id| {
                q.coalition(id)
                    .map(|c| c.indices())
                    .ok_or_else(|| CliError::Validation(format!("trace references dead id {id}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let merged_id = q.merge(cand)?;
        out.push(TraceEntryDoc {
            kind: cand.kind.name(),
            coalition_ids: cand.coalition_ids.clone(),
            members,
            merged_id,
        });
    }
    Ok(out)
}

fn ms_since(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

/// Decide whether to audit, per policy, and do it.
fn maybe_verify(
    inst: &Instance,
    partition: &Partition,
    baseline_len: usize,
    opts: &EngineOptions,
) -> Result<Option<VerificationReport>, CliError> {
    match opts.verify {
        VerifyPolicy::Never => Ok(None),
        VerifyPolicy::Auto if baseline_len > opts.oracle_cap => Ok(None),
        VerifyPolicy::Auto | VerifyPolicy::Always => Ok(Some(verify(
            &inst.benefit,
            &inst.competing,
            partition,
            opts.mode,
            opts.oracle_cap,
        )?)),
    }
}

/// Form coalitions on `inst` and assemble the full report.
pub fn run_instance(inst: &Instance, opts: &EngineOptions) -> Result<RunReport, CliError> {
    let t_start = Instant::now();
    let baseline = baseline_partition(&inst.benefit, &inst.competing, &opts.form)?;
    let baseline_ms = ms_since(t_start);

    let t_merge = Instant::now();
    let out = form_from_baseline(&inst.benefit, &inst.competing, &baseline, &opts.form)?;
    let merge_ms = ms_since(t_merge);

    let baseline_utility = partition_utility(&inst.benefit, &out.baseline)?;
    let total_utility = partition_utility(&inst.benefit, &out.partition)?;
    assert!(
        total_utility >= baseline_utility - UTILITY_TOL,
        "merging lost utility: {total_utility} < {baseline_utility}"
    );

    let per_member_utilities = (0..inst.n())
        .map(|v| {
            let block = out.partition.block_of(v.into())?;
            Ok(inst.benefit.member_utility(block, v.into())?)
        })
        .collect::<Result<Vec<f64>, CliError>>()?;

    let merge_trace = resolve_trace(inst, &out.baseline, &out.trace)?;

    let t_verify = Instant::now();
    let verification = maybe_verify(inst, &out.partition, out.baseline.len(), opts)?
        .map(|r| verification_doc(&r, &out.partition));
    let verify_ms = ms_since(t_verify);

    let timings = opts.timings.then(|| TimingsDoc {
        baseline_ms,
        merge_ms,
        verify_ms,
        total_ms: ms_since(t_start),
    });

    Ok(RunReport {
        n: inst.n(),
        baseline: blocks_as_indices(&out.baseline),
        partition: blocks_as_indices(&out.partition),
        baseline_utility,
        total_utility,
        per_member_utilities,
        merge_trace,
        verification,
        timings,
    })
}

/// Parameters for a competition-intensity sweep.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub n: usize,
    /// Competition probabilities to sweep over.
    pub alphas: Vec<f64>,
    /// Instances generated per alpha.
    pub trials: usize,
    pub benefit_density: f64,
    pub weight_dist: WeightDist,
    /// Master seed; per-trial seeds are derived from it.
    pub seed: u64,
}

/// Aggregates for one alpha.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub alpha: f64,
    pub formed_utility_mean: f64,
    pub formed_utility_std: f64,
    pub baseline_utility_mean: f64,
    pub baseline_utility_std: f64,
    pub coalition_count_mean: f64,
    /// How many trials the audit actually ran on (policy may skip).
    pub verified_trials: usize,
    /// Fraction of audited trials that passed; `null` when none were audited.
    pub verification_pass_rate: Option<f64>,
}

/// The full sweep record.
#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub n: usize,
    pub trials: usize,
    pub benefit_density: f64,
    pub weight_dist: String,
    pub mode: &'static str,
    pub seed: u64,
    pub rows: Vec<SweepRow>,
}

struct TrialOutcome {
    alpha_index: usize,
    formed: f64,
    baseline: f64,
    blocks: usize,
    /// `None` when the audit was skipped by policy.
    passed: Option<bool>,
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Population standard deviation; zero for a single sample.
fn std_dev(xs: &[f64]) -> f64 {
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / xs.len() as f64).sqrt()
}

/// Run `trials` instances per alpha in parallel and aggregate. Per-trial
/// seeds are drawn up front from the master seed, so the result does not
/// depend on thread scheduling.
pub fn sweep(cfg: &SweepConfig, opts: &EngineOptions) -> Result<SweepReport, CliError> {
    if cfg.trials == 0 {
        return Err(CliError::Validation("trials must be at least 1".into()));
    }
    if cfg.alphas.is_empty() {
        return Err(CliError::Validation("need at least one alpha".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut jobs = Vec::with_capacity(cfg.alphas.len() * cfg.trials);
    for (alpha_index, &alpha) in cfg.alphas.iter().enumerate() {
        for _ in 0..cfg.trials {
            jobs.push((alpha_index, alpha, rng.random::<u64>()));
        }
    }

    let outcomes = jobs
        .par_iter()
        .map(|&(alpha_index, alpha, seed)| {
            let inst = InstanceSpec {
                n: cfg.n,
                alpha,
                benefit_density: cfg.benefit_density,
                weight_dist: cfg.weight_dist,
                seed,
            }
            .generate()?;
            let baseline = baseline_partition(&inst.benefit, &inst.competing, &opts.form)?;
            let out = form_from_baseline(&inst.benefit, &inst.competing, &baseline, &opts.form)?;
            let passed = maybe_verify(&inst, &out.partition, baseline.len(), opts)?
                .map(|r| r.all_ok());
            let formed = partition_utility(&inst.benefit, &out.partition)?;
            let baseline = partition_utility(&inst.benefit, &out.baseline)?;
            debug_assert!(
                formed >= baseline - UTILITY_TOL,
                "merging lost utility on a sweep trial (seed {seed})"
            );
            Ok(TrialOutcome {
                alpha_index,
                formed,
                baseline,
                blocks: out.partition.len(),
                passed,
            })
        })
        .collect::<Result<Vec<TrialOutcome>, CliError>>()?;

    let rows = cfg
        .alphas
        .iter()
        .enumerate()
        .map(|(i, &alpha)| {
            let trials: Vec<&TrialOutcome> =
                outcomes.iter().filter(|o| o.alpha_index == i).collect();
            let formed: Vec<f64> = trials.iter().map(|o| o.formed).collect();
            let baseline: Vec<f64> = trials.iter().map(|o| o.baseline).collect();
            let counts: Vec<f64> = trials.iter().map(|o| o.blocks as f64).collect();
            let verified_trials = trials.iter().filter(|o| o.passed.is_some()).count();
            let passed = trials.iter().filter(|o| o.passed == Some(true)).count();
            SweepRow {
                alpha,
                formed_utility_mean: mean(&formed),
                formed_utility_std: std_dev(&formed),
                baseline_utility_mean: mean(&baseline),
                baseline_utility_std: std_dev(&baseline),
                coalition_count_mean: mean(&counts),
                verified_trials,
                verification_pass_rate: (verified_trials > 0)
                    .then(|| passed as f64 / verified_trials as f64),
            }
        })
        .collect();

    Ok(SweepReport {
        n: cfg.n,
        trials: cfg.trials,
        benefit_density: cfg.benefit_density,
        weight_dist: cfg.weight_dist.to_string(),
        mode: opts.mode.name(),
        seed: cfg.seed,
        rows,
    })
}

fn write_blocks(out: &mut String, blocks: &[Vec<usize>]) {
    for block in blocks {
        let members: Vec<String> = block.iter().map(|v| v.to_string()).collect();
        out.push_str(&format!("  {{{}}}\n", members.join(", ")));
    }
}

/// Human-oriented rendering of a run report.
pub fn render_report_text(r: &RunReport) -> String {
    let mut s = String::new();
    s.push_str(&format!("participants: {}\n", r.n));
    s.push_str(&format!(
        "baseline: {} coalitions, utility {:.6}\n",
        r.baseline.len(),
        r.baseline_utility
    ));
    write_blocks(&mut s, &r.baseline);
    s.push_str(&format!(
        "final: {} coalitions, utility {:.6}\n",
        r.partition.len(),
        r.total_utility
    ));
    write_blocks(&mut s, &r.partition);
    if r.merge_trace.is_empty() {
        s.push_str("merges: none\n");
    } else {
        s.push_str("merges:\n");
        for entry in &r.merge_trace {
            let parts: Vec<String> = entry
                .members
                .iter()
                .map(|m| {
                    let ids: Vec<String> = m.iter().map(|v| v.to_string()).collect();
                    format!("{{{}}}", ids.join(", "))
                })
                .collect();
            s.push_str(&format!("  {}: {}\n", entry.kind, parts.join(" + ")));
        }
    }
    match &r.verification {
        None => s.push_str("verification: skipped\n"),
        Some(v) => {
            s.push_str(&format!(
                "verification ({}): {}\n",
                v.mode,
                if v.all_ok { "ok" } else { "FAILED" }
            ));
            for violation in &v.violations {
                s.push_str(&format!("  {}\n", render_violation(violation)));
            }
        }
    }
    if let Some(t) = &r.timings {
        s.push_str(&format!(
            "timings: baseline {:.3} ms, merge {:.3} ms, verify {:.3} ms, total {:.3} ms\n",
            t.baseline_ms, t.merge_ms, t.verify_ms, t.total_ms
        ));
    }
    s
}

fn render_violation(v: &ViolationDoc) -> String {
    match v {
        ViolationDoc::FreeRider {
            coalition,
            member,
            missing,
        } => format!(
            "free rider: member {member} of {coalition:?} has no {missing} benefit"
        ),
        ViolationDoc::CompetitorReach { from, to } => {
            format!("competitor reach: data of {from} reaches competitor {to}")
        }
        ViolationDoc::BlockingMerge { blocks, gain, .. } => {
            format!("blocking merge: union of {blocks:?} gains {gain:.6}")
        }
    }
}

/// Human-oriented rendering of a standalone audit.
pub fn render_verification_text(v: &VerificationDoc) -> String {
    let yes_no = |ok: bool| if ok { "ok" } else { "FAILED" };
    let mut s = format!(
        "mode: {}\nno free riders: {}\ncompetitor isolation: {}\nno blocking merge: {}\noverall: {}\n",
        v.mode,
        yes_no(v.principle1_ok),
        yes_no(v.principle2_ok),
        yes_no(v.optimal_ok),
        yes_no(v.all_ok)
    );
    for violation in &v.violations {
        s.push_str(&format!("  {}\n", render_violation(violation)));
    }
    s
}

/// Human-oriented rendering of a sweep report.
pub fn render_sweep_text(s: &SweepReport) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "sweep: n={}, trials={}, density={}, weights={}, mode={}, seed={}\n",
        s.n, s.trials, s.benefit_density, s.weight_dist, s.mode, s.seed
    ));
    out.push_str(
        "alpha  formed(mean±std)      baseline(mean±std)    coalitions  verified  pass\n",
    );
    for row in &s.rows {
        let pass = match row.verification_pass_rate {
            Some(rate) => format!("{:.2}", rate),
            None => "-".to_string(),
        };
        out.push_str(&format!(
            "{:<5}  {:>8.4} ± {:<8.4}  {:>8.4} ± {:<8.4}  {:>10.2}  {:>8}  {:>4}\n",
            row.alpha,
            row.formed_utility_mean,
            row.formed_utility_std,
            row.baseline_utility_mean,
            row.baseline_utility_std,
            row.coalition_count_mean,
            row.verified_trials,
            pass
        ));
    }
    out
}
