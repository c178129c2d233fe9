//! Problem instances: the two input graphs, random generation, and JSON I/O.
//!
//! The on-disk document is deliberately small:
//!
//! ```json
//! {
//!   "n": 3,
//!   "benefit": [{ "src": 0, "dst": 1, "w": 0.5 }],
//!   "competing": [[1, 2]],
//!   "labels": ["alice", "bob", "carol"]
//! }
//! ```
//!
//! `labels` is optional and purely cosmetic (it only affects DOT export).
//! Serialization is canonical — edges are emitted in sorted order — so equal
//! instances produce byte-identical documents.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use fedcoalitions::{BenefitGraph, CompetingGraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Distribution the generator draws benefit-edge weights from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightDist {
    /// Uniform on `[lo, hi)`.
    Uniform { lo: f64, hi: f64 },
    /// Every edge gets the same weight.
    Constant { w: f64 },
}

impl Default for WeightDist {
    fn default() -> Self {
        WeightDist::Uniform { lo: 0.1, hi: 1.0 }
    }
}

impl WeightDist {
    fn validate(&self) -> Result<(), CliError> {
        let ok = match *self {
            WeightDist::Uniform { lo, hi } => {
                lo.is_finite() && hi.is_finite() && lo > 0.0 && lo <= hi
            }
            WeightDist::Constant { w } => w.is_finite() && w > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(CliError::Validation(format!(
                "weight distribution must be positive and ordered, got {self}"
            )))
        }
    }
}

impl fmt::Display for WeightDist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            WeightDist::Uniform { lo, hi } => write!(f, "uniform:{lo},{hi}"),
            WeightDist::Constant { w } => write!(f, "constant:{w}"),
        }
    }
}

impl FromStr for WeightDist {
    type Err = String;

    /// Parses `uniform:LO,HI` or `constant:W`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (kind, args) = s
            .split_once(':')
            .ok_or_else(|| format!("expected `uniform:LO,HI` or `constant:W`, got `{s}`"))?;
        match kind {
            "uniform" => {
                let (lo, hi) = args
                    .split_once(',')
                    .ok_or_else(|| format!("expected `uniform:LO,HI`, got `{s}`"))?;
                let lo: f64 = lo.trim().parse().map_err(|e| format!("bad LO: {e}"))?;
                let hi: f64 = hi.trim().parse().map_err(|e| format!("bad HI: {e}"))?;
                Ok(WeightDist::Uniform { lo, hi })
            }
            "constant" => {
                let w: f64 = args.trim().parse().map_err(|e| format!("bad W: {e}"))?;
                Ok(WeightDist::Constant { w })
            }
            other => Err(format!("unknown weight distribution `{other}`")),
        }
    }
}

/// Parameters for random instance generation.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceSpec {
    /// Number of participants.
    pub n: usize,
    /// Probability that an unordered pair competes.
    pub alpha: f64,
    /// Probability that an ordered pair carries a benefit edge.
    pub benefit_density: f64,
    /// Weight distribution for benefit edges.
    pub weight_dist: WeightDist,
    /// RNG seed; equal specs generate equal instances.
    pub seed: u64,
}

impl InstanceSpec {
    pub fn new(n: usize) -> Self {
        InstanceSpec {
            n,
            alpha: 0.2,
            benefit_density: 0.5,
            weight_dist: WeightDist::default(),
            seed: 0,
        }
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.n == 0 {
            return Err(CliError::Validation(
                "instance must have at least one participant".into(),
            ));
        }
        for (name, p) in [("alpha", self.alpha), ("density", self.benefit_density)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(CliError::Validation(format!(
                    "{name} must lie in [0, 1], got {p}"
                )));
            }
        }
        self.weight_dist.validate()
    }

    /// Generates the instance for this spec.
    ///
    /// The draw order is part of the format and must not change: first one
    /// uniform draw per unordered pair `(a, b)` with `a < b` in
    /// lexicographic order (competition), then per ordered pair `(src, dst)`,
    /// `src != dst`, in lexicographic order one draw for edge presence
    /// followed — only if the edge is present and the distribution is not
    /// constant — by one draw for its weight.
    pub fn generate(&self) -> Result<Instance, CliError> {
        self.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);

        let mut competing = Vec::new();
        for a in 0..self.n {
            for b in (a + 1)..self.n {
                if rng.random::<f64>() < self.alpha {
                    competing.push((a, b));
                }
            }
        }

        let mut benefit = Vec::new();
        for src in 0..self.n {
            for dst in 0..self.n {
                if src == dst {
                    continue;
                }
                if rng.random::<f64>() < self.benefit_density {
                    let w = match self.weight_dist {
                        WeightDist::Uniform { lo, hi } => lo + (hi - lo) * rng.random::<f64>(),
                        WeightDist::Constant { w } => w,
                    };
                    benefit.push((src, dst, w));
                }
            }
        }

        Ok(Instance {
            benefit: BenefitGraph::from_edges(self.n, benefit)?,
            competing: CompetingGraph::from_pairs(self.n, competing)?,
            labels: None,
        })
    }
}

/// A complete problem instance: who benefits whom, and who competes.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub benefit: BenefitGraph,
    pub competing: CompetingGraph,
    /// Optional display names, one per participant.
    pub labels: Option<Vec<String>>,
}

impl Instance {
    pub fn n(&self) -> usize {
        self.benefit.n()
    }

    /// The display name for participant `v`: its label if present, else `v{v}`.
    pub fn label(&self, v: usize) -> String {
        match &self.labels {
            Some(labels) => labels[v].clone(),
            None => format!("v{v}"),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct BenefitEdgeDoc {
    src: usize,
    dst: usize,
    w: f64,
}

#[derive(Serialize, Deserialize)]
struct InstanceDoc {
    n: usize,
    benefit: Vec<BenefitEdgeDoc>,
    competing: Vec<(usize, usize)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

/// Renders an instance as a canonical pretty-printed JSON document.
pub fn to_json(inst: &Instance) -> String {
    let doc = InstanceDoc {
        n: inst.n(),
        benefit: inst
            .benefit
            .edges()
            .map(|(src, dst, w)| BenefitEdgeDoc {
                src: src.index(),
                dst: dst.index(),
                w,
            })
            .collect(),
        competing: inst
            .competing
            .pairs()
            .map(|(a, b)| (a.index(), b.index()))
            .collect(),
        labels: inst.labels.clone(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("instance document serializes");
    s.push('\n');
    s
}

/// Parses and validates an instance document.
pub fn from_json(text: &str) -> Result<Instance, CliError> {
    let doc: InstanceDoc = serde_json::from_str(text)?;
    let benefit = BenefitGraph::from_edges(
        doc.n,
        doc.benefit.iter().map(|e| (e.src, e.dst, e.w)),
    )?;
    let competing = CompetingGraph::from_pairs(doc.n, doc.competing)?;
    if let Some(labels) = &doc.labels {
        if labels.len() != doc.n {
            return Err(CliError::Validation(format!(
                "expected {} labels, got {}",
                doc.n,
                labels.len()
            )));
        }
    }
    Ok(Instance {
        benefit,
        competing,
        labels: doc.labels,
    })
}

pub fn load(path: &Path) -> Result<Instance, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    from_json(&text)
}

pub fn save(path: &Path, inst: &Instance) -> Result<(), CliError> {
    std::fs::write(path, to_json(inst))
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weight_dist_parses_both_forms() {
        assert_eq!(
            "uniform:0.1,1.0".parse::<WeightDist>().unwrap(),
            WeightDist::Uniform { lo: 0.1, hi: 1.0 }
        );
        assert_eq!(
            "constant:0.5".parse::<WeightDist>().unwrap(),
            WeightDist::Constant { w: 0.5 }
        );
        assert!("gaussian:0,1".parse::<WeightDist>().is_err());
        assert!("uniform:0.1".parse::<WeightDist>().is_err());
        assert!("uniform".parse::<WeightDist>().is_err());
    }

    #[test]
    fn weight_dist_round_trips_through_display() {
        for dist in [
            WeightDist::Uniform { lo: 0.25, hi: 2.0 },
            WeightDist::Constant { w: 1.5 },
        ] {
            assert_eq!(dist.to_string().parse::<WeightDist>().unwrap(), dist);
        }
    }

    #[test]
    fn generation_is_deterministic_per_seed() {
        let spec = InstanceSpec {
            alpha: 0.3,
            seed: 42,
            ..InstanceSpec::new(12)
        };
        let a = spec.generate().unwrap();
        let b = spec.generate().unwrap();
        assert_eq!(a, b);
        let c = InstanceSpec { seed: 43, ..spec }.generate().unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn alpha_extremes_generate_no_or_all_rivalries() {
        let none = InstanceSpec {
            alpha: 0.0,
            ..InstanceSpec::new(10)
        }
        .generate()
        .unwrap();
        assert_eq!(none.competing.pairs().count(), 0);

        let all = InstanceSpec {
            alpha: 1.0,
            ..InstanceSpec::new(10)
        }
        .generate()
        .unwrap();
        assert_eq!(all.competing.pairs().count(), 10 * 9 / 2);
    }

    #[test]
    fn density_extremes_generate_no_or_all_edges() {
        let none = InstanceSpec {
            benefit_density: 0.0,
            ..InstanceSpec::new(8)
        }
        .generate()
        .unwrap();
        assert_eq!(none.benefit.edges().count(), 0);

        let all = InstanceSpec {
            benefit_density: 1.0,
            ..InstanceSpec::new(8)
        }
        .generate()
        .unwrap();
        assert_eq!(all.benefit.edges().count(), 8 * 7);
    }

    #[test]
    fn constant_weights_skip_the_weight_draw() {
        // With a constant distribution the competing pattern and the edge
        // pattern must match the uniform run bit for bit — only weights may
        // differ, because no draw is consumed for them.
        let base = InstanceSpec {
            benefit_density: 1.0,
            seed: 7,
            ..InstanceSpec::new(6)
        };
        let uniform = base.generate().unwrap();
        let constant = InstanceSpec {
            weight_dist: WeightDist::Constant { w: 1.0 },
            ..base
        }
        .generate()
        .unwrap();
        assert_eq!(
            uniform.competing.pairs().collect::<Vec<_>>(),
            constant.competing.pairs().collect::<Vec<_>>()
        );
        let uniform_edges: Vec<_> = uniform.benefit.edges().map(|(s, d, _)| (s, d)).collect();
        let constant_edges: Vec<_> = constant.benefit.edges().map(|(s, d, _)| (s, d)).collect();
        assert_eq!(uniform_edges, constant_edges);
        assert!(constant.benefit.edges().all(|(_, _, w)| w == 1.0));
    }

    #[test]
    fn generated_weights_respect_the_uniform_range() {
        let inst = InstanceSpec {
            benefit_density: 1.0,
            weight_dist: WeightDist::Uniform { lo: 0.5, hi: 0.75 },
            seed: 3,
            ..InstanceSpec::new(9)
        }
        .generate()
        .unwrap();
        assert!(inst.benefit.edges().all(|(_, _, w)| (0.5..0.75).contains(&w)));
    }

    #[test]
    fn json_round_trip_preserves_instances() {
        for seed in 0..100 {
            let spec = InstanceSpec {
                alpha: 0.25,
                benefit_density: 0.4,
                seed,
                ..InstanceSpec::new(3 + (seed as usize % 9))
            };
            let inst = spec.generate().unwrap();
            let text = to_json(&inst);
            let back = from_json(&text).unwrap();
            assert_eq!(inst, back, "seed {seed}");
            // Canonical form: a second render is byte-identical.
            assert_eq!(text, to_json(&back), "seed {seed}");
        }
    }

    #[test]
    fn labels_survive_the_round_trip() {
        let mut inst = InstanceSpec::new(3).generate().unwrap();
        inst.labels = Some(vec!["a".into(), "b".into(), "c".into()]);
        let back = from_json(&to_json(&inst)).unwrap();
        assert_eq!(back.labels, inst.labels);
        assert_eq!(back.label(1), "b");
        inst.labels = None;
        assert_eq!(inst.label(1), "v1");
    }

    #[test]
    fn malformed_documents_are_rejected() {
        // Not JSON at all.
        assert!(matches!(from_json("not json"), Err(CliError::Validation(_))));
        // Structurally valid JSON, wrong shape.
        assert!(from_json(r#"{"n": 2}"#).is_err());
        // Node out of range.
        let bad = r#"{"n": 2, "benefit": [{"src": 0, "dst": 5, "w": 1.0}], "competing": []}"#;
        assert!(matches!(from_json(bad), Err(CliError::Validation(_))));
        // Non-positive weight.
        let bad = r#"{"n": 2, "benefit": [{"src": 0, "dst": 1, "w": -1.0}], "competing": []}"#;
        assert!(from_json(bad).is_err());
        // Duplicate benefit edge.
        let bad = r#"{"n": 2, "benefit": [{"src": 0, "dst": 1, "w": 1.0}, {"src": 0, "dst": 1, "w": 2.0}], "competing": []}"#;
        assert!(matches!(from_json(bad), Err(CliError::Validation(_))));
        // Self-rivalry.
        let bad = r#"{"n": 2, "benefit": [], "competing": [[1, 1]]}"#;
        assert!(from_json(bad).is_err());
        // Wrong label count.
        let bad = r#"{"n": 2, "benefit": [], "competing": [], "labels": ["only-one"]}"#;
        assert!(from_json(bad).is_err());
    }

    #[test]
    fn spec_validation_rejects_bad_parameters() {
        assert!(InstanceSpec::new(0).generate().is_err());
        assert!(InstanceSpec {
            alpha: 1.5,
            ..InstanceSpec::new(3)
        }
        .generate()
        .is_err());
        assert!(InstanceSpec {
            benefit_density: -0.1,
            ..InstanceSpec::new(3)
        }
        .generate()
        .is_err());
        assert!(InstanceSpec {
            weight_dist: WeightDist::Uniform { lo: -1.0, hi: 1.0 },
            ..InstanceSpec::new(3)
        }
        .generate()
        .is_err());
        assert!(InstanceSpec {
            weight_dist: WeightDist::Constant { w: 0.0 },
            ..InstanceSpec::new(3)
        }
        .generate()
        .is_err());
    }

    #[test]
    fn competing_pair_count_tracks_alpha() {
        // Monte-Carlo sanity check on the generator: over T trials the mean
        // number of competing pairs should be close to alpha * C(n, 2).
        let n = 10usize;
        let alpha = 0.3;
        let trials = 200u64;
        let pairs = (n * (n - 1) / 2) as f64;
        let mut total = 0usize;
        for seed in 0..trials {
            let inst = InstanceSpec {
                alpha,
                seed,
                ..InstanceSpec::new(n)
            }
            .generate()
            .unwrap();
            total += inst.competing.pairs().count();
        }
        let mean = total as f64 / trials as f64;
        let expected = alpha * pairs;
        // Std of a single trial is sqrt(pairs * alpha * (1 - alpha)); the
        // mean of `trials` runs concentrates by another sqrt(trials).
        let sigma = (pairs * alpha * (1.0 - alpha)).sqrt() / (trials as f64).sqrt();
        assert!(
            (mean - expected).abs() < 3.0 * sigma,
            "mean {mean} too far from {expected} (sigma {sigma})"
        );
    }
}
