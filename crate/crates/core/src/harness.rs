//! Per-presentation analysis with oracle cross-checks, and seeded sweeps.

use std::fmt;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::abelian::{abelian_invariants, AbelianInvariants};
use crate::complex::{generators_occurring_once, hypergraph_stats, HypergraphStats};
use crate::freeness::{certified_rank_identity, detect_free, FreenessVerdict};
use crate::model::{floor_density_power, num_relators, sample_presentation, Density, Model, ModelError, Presentation};
use crate::rng;
use crate::triviality::{detect_trivial, TrivialityStatus, TrivialityVerdict};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Violation {
    /// Trivial-certified but the abelianization is not the allowed cyclic group.
    Trivial { abelianization: String },
    /// Free-certified but the abelianization is not `Z^rank`.
    Free { rank: usize, abelianization: String },
    /// Certified rank differs from `n - |R|`.
    RankIdentity { rank: usize, expected: i64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Trivial { abelianization } => {
                write!(f, "trivial-certified but abelianization is {abelianization}")
            }
            Violation::Free { rank, abelianization } => {
                write!(f, "free-certified with rank {rank} but abelianization is {abelianization}")
            }
            Violation::RankIdentity { rank, expected } => write!(f, "certified rank {rank} but n - |R| = {expected}"),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub model: Model,
    pub n: u32,
    pub d: Density,
    pub seed: u64,
    pub relators: usize,
    pub positive_relators: usize,
    pub trivial: TrivialityVerdict,
    pub free: FreenessVerdict,
    pub hypergraphs: HypergraphStats,
    pub leafless: bool,
    pub abelianization: AbelianInvariants,
    pub violations: Vec<Violation>,
}

impl AnalysisReport {
    pub fn is_consistent(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "presentation: model={} n={} d={} seed={} relators={} positive={}\n",
            self.model, self.n, self.d, self.seed, self.relators, self.positive_relators
        );
        match &self.trivial.certificate {
            Some(c) => out.push_str(&format!(
                "trivial: certified tree_edges={} odd_walk={}\n",
                c.tree.len(),
                c.odd_walk.len() - 1
            )),
            None => out.push_str("trivial: unknown\n"),
        }
        match &self.free {
            FreenessVerdict::Certified(c) => out.push_str(&format!(
                "free: certified rank={} removals={} leftover_loops={}\n",
                c.rank,
                c.removals.len(),
                c.leftover_loops
            )),
            FreenessVerdict::NotCertified(nc) => {
                out.push_str(&format!("free: not-certified witness=hypergraph[{}] {}\n", nc.hypergraph, nc.witness))
            }
        }
        let h = &self.hypergraphs;
        out.push_str(&format!(
            "hypergraphs: components={} trees={} embedded={} leaves={}\n",
            h.components, h.trees, h.embedded, h.leaves
        ));
        out.push_str(&format!("abelianization: {}\n", self.abelianization));
        for v in &self.violations {
            out.push_str(&format!("violation: {v}\n"));
        }
        out
    }
}

/// Runs every detector and the abelianization oracle, and records any
/// disagreement between them.
pub fn analyze(p: &Presentation) -> AnalysisReport {
    let trivial = detect_trivial(p);
    let free = detect_free(p);
    let hypergraphs = hypergraph_stats(p);
    let ab = abelian_invariants(p);
    let mut violations = Vec::new();
    if trivial.status == TrivialityStatus::Certified {
        let ok = match p.model() {
            Model::PositiveSquare => ab.is_cyclic_of_order(4),
            Model::Square => ab.is_cyclic_of_order(4) || ab.is_cyclic_of_order(2),
        };
        if !ok {
            violations.push(Violation::Trivial { abelianization: ab.to_string() });
        }
    }
    if let FreenessVerdict::Certified(cert) = &free {
        if !(ab.is_free() && ab.free_rank == cert.rank) {
            violations.push(Violation::Free { rank: cert.rank, abelianization: ab.to_string() });
        }
        if !certified_rank_identity(cert, p) {
            violations.push(Violation::RankIdentity {
                rank: cert.rank,
                expected: p.n() as i64 - p.relators().len() as i64,
            });
        }
    }
    AnalysisReport {
        model: p.model(),
        n: p.n(),
        d: p.density().clone(),
        seed: p.seed(),
        relators: p.relators().len(),
        positive_relators: p.positive_subset().len(),
        trivial,
        free,
        hypergraphs,
        leafless: generators_occurring_once(p).is_empty(),
        abelianization: ab,
        violations,
    }
}

/// Everything needed to rerun a failing analysis.
pub fn reproduction_bundle(p: &Presentation, violations: &[Violation]) -> String {
    let mut out = p.to_text();
    for v in violations {
        out.push_str(&format!("# violation: {v}\n"));
    }
    out
}

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("config: {0}")]
    Config(String),
    #[error("d' = {d_prime} must be below d = {d}")]
    DensityOrder { d: String, d_prime: String },
    #[error("cross-check failed for n={n} d={d} trial={trial}: {violation}")]
    CrossCheck { n: u32, d: String, trial: u64, violation: Violation, bundle: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum DensityValue {
    Text(String),
    Number(f64),
}

impl DensityValue {
    fn to_density(&self) -> Result<Density, ModelError> {
        match self {
            DensityValue::Text(s) => Density::parse(s),
            DensityValue::Number(x) => Density::from_f64(*x),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    model: String,
    n: Vec<u32>,
    d: Vec<DensityValue>,
    trials: u64,
    seed: u64,
    #[serde(default = "yes")]
    trivial: bool,
    #[serde(default = "yes")]
    free: bool,
    #[serde(default = "yes")]
    hypergraph: bool,
    #[serde(default = "yes")]
    leafless: bool,
    positive_fraction: Option<DensityValue>,
    #[serde(default = "yes")]
    cross_check: bool,
}

fn yes() -> bool {
    true
}

/// A grid of `(n, d)` cells. Read from flat TOML:
///
/// ```toml
/// model = "positive"
/// n = [50]
/// d = ["0.4", "0.5", "0.65"]
/// trials = 100
/// seed = 1
/// positive_fraction = "0.3"   # d' for the positive-fraction column
/// free = false                # detectors default to on
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub model: Model,
    pub n: Vec<u32>,
    pub d: Vec<Density>,
    pub trials: u64,
    pub seed: u64,
    pub trivial: bool,
    pub free: bool,
    pub hypergraph: bool,
    pub leafless: bool,
    pub positive_fraction: Option<Density>,
    /// Run the abelianization oracle on every trial and stop on a mismatch.
    pub cross_check: bool,
}

impl SweepConfig {
    pub fn new(model: Model, n: Vec<u32>, d: Vec<Density>, trials: u64, seed: u64) -> Self {
        SweepConfig {
            model,
            n,
            d,
            trials,
            seed,
            trivial: true,
            free: true,
            hypergraph: true,
            leafless: true,
            positive_fraction: None,
            cross_check: true,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        let model: Model = raw.model.parse().map_err(HarnessError::Config)?;
        let d = raw.d.iter().map(DensityValue::to_density).collect::<Result<Vec<_>, _>>()?;
        let positive_fraction = raw.positive_fraction.as_ref().map(DensityValue::to_density).transpose()?;
        let cfg = SweepConfig {
            model,
            n: raw.n,
            d,
            trials: raw.trials,
            seed: raw.seed,
            trivial: raw.trivial,
            free: raw.free,
            hypergraph: raw.hypergraph,
            leafless: raw.leafless,
            positive_fraction,
            cross_check: raw.cross_check,
        };
        cfg.check()?;
        Ok(cfg)
    }

    fn check(&self) -> Result<(), HarnessError> {
        if self.trials == 0 {
            return Err(HarnessError::Config("trials must be at least 1".into()));
        }
        if self.n.is_empty() || self.d.is_empty() {
            return Err(HarnessError::Config("n and d lists must be nonempty".into()));
        }
        Ok(())
    }
}

/// One line of sweep output. Field order is the CSV column order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub n: u32,
    pub d: String,
    pub model: String,
    pub trials: u64,
    pub seed: u64,
    pub num_relators: u64,
    pub trivial_rate: Option<f64>,
    pub free_rate: Option<f64>,
    pub mean_certified_rank: Option<f64>,
    pub embedded_tree_rate: Option<f64>,
    pub leafless_rate: Option<f64>,
    pub positive_fraction_rate: Option<f64>,
}

pub const SWEEP_HEADER: [&str; 12] = [
    "n",
    "d",
    "model",
    "trials",
    "seed",
    "num_relators",
    "trivial_rate",
    "free_rate",
    "mean_certified_rank",
    "embedded_tree_rate",
    "leafless_rate",
    "positive_fraction_rate",
];

pub fn cell_trial_seed(master: u64, n: u32, d: &Density, trial: u64) -> u64 {
    rng::derive_seed(master, &[&n.to_le_bytes(), d.as_str().as_bytes(), &trial.to_le_bytes()])
}

#[derive(Debug, Clone, Copy, Default)]
struct TrialOutcome {
    trivial: bool,
    free_rank: Option<usize>,
    embedded: bool,
    leafless: bool,
    positive_above: bool,
}

fn run_trial(cfg: &SweepConfig, n: u32, d: &Density, trial: u64, threshold: Option<u64>) -> Result<TrialOutcome, HarnessError> {
    let p = sample_presentation(n, d, cfg.model, cell_trial_seed(cfg.seed, n, d, trial))?;
    let mut out = TrialOutcome::default();
    if cfg.cross_check {
        let report = analyze(&p);
        if let Some(v) = report.violations.first() {
            return Err(HarnessError::CrossCheck {
                n,
                d: d.to_string(),
                trial,
                violation: v.clone(),
                bundle: reproduction_bundle(&p, &report.violations),
            });
        }
        out.trivial = report.trivial.is_certified();
        out.free_rank = report.free.rank();
        out.embedded = report.hypergraphs.all_embedded();
        out.leafless = report.leafless;
    } else {
        if cfg.trivial {
            out.trivial = detect_trivial(&p).is_certified();
        }
        if cfg.free {
            out.free_rank = detect_free(&p).rank();
        }
        if cfg.hypergraph {
            out.embedded = hypergraph_stats(&p).all_embedded();
        }
        if cfg.leafless {
            out.leafless = generators_occurring_once(&p).is_empty();
        }
    }
    if let Some(t) = threshold {
        out.positive_above = p.positive_subset().len() as u64 > t;
    }
    Ok(out)
}

fn rate(hits: usize, trials: u64) -> f64 {
    hits as f64 / trials as f64
}

/// One row per `(n, d)` cell, `n` outer. Trials run in parallel; the
/// result depends only on the config.
pub fn sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>, HarnessError> {
    cfg.check()?;
    let mut rows = Vec::new();
    for &n in &cfg.n {
        for d in &cfg.d {
            let threshold = cfg.positive_fraction.as_ref().map(|dp| floor_density_power(n as u64, dp));
            let outcomes: Vec<TrialOutcome> = (0..cfg.trials)
                .into_par_iter()
                .map(|t| run_trial(cfg, n, d, t, threshold))
                .collect::<Result<_, _>>()?;
            let count = |f: fn(&TrialOutcome) -> bool| outcomes.iter().filter(|o| f(o)).count();
            let ranks: Vec<usize> = outcomes.iter().filter_map(|o| o.free_rank).collect();
            rows.push(SweepRow {
                n,
                d: d.to_string(),
                model: cfg.model.to_string(),
                trials: cfg.trials,
                seed: cfg.seed,
                num_relators: num_relators(n, d, cfg.model)?,
                trivial_rate: cfg.trivial.then(|| rate(count(|o| o.trivial), cfg.trials)),
                free_rate: cfg.free.then(|| rate(ranks.len(), cfg.trials)),
                mean_certified_rank: (cfg.free && !ranks.is_empty())
                    .then(|| ranks.iter().sum::<usize>() as f64 / ranks.len() as f64),
                embedded_tree_rate: cfg.hypergraph.then(|| rate(count(|o| o.embedded), cfg.trials)),
                leafless_rate: cfg.leafless.then(|| rate(count(|o| o.leafless), cfg.trials)),
                positive_fraction_rate: threshold.map(|_| rate(count(|o| o.positive_above), cfg.trials)),
            });
        }
    }
    Ok(rows)
}

pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_HEADER)?;
    for r in rows {
        w.write_record([
            r.n.to_string(),
            r.d.clone(),
            r.model.clone(),
            r.trials.to_string(),
            r.seed.to_string(),
            r.num_relators.to_string(),
            opt(r.trivial_rate),
            opt(r.free_rate),
            opt(r.mean_certified_rank),
            opt(r.embedded_tree_rate),
            opt(r.leafless_rate),
            opt(r.positive_fraction_rate),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Fraction of square-model trials with more than `n^{4d'}` positive
/// relators.
pub fn positive_fraction_experiment(
    n: u32,
    d: &Density,
    d_prime: &Density,
    trials: u64,
    seed: u64,
) -> Result<f64, HarnessError> {
    if d_prime >= d {
        return Err(HarnessError::DensityOrder { d: d.to_string(), d_prime: d_prime.to_string() });
    }
    if trials == 0 {
        return Err(HarnessError::Config("trials must be at least 1".into()));
    }
    let threshold = floor_density_power(n as u64, d_prime);
    let hits = (0..trials)
        .into_par_iter()
        .map(|t| {
            let p = sample_presentation(n, d, Model::Square, cell_trial_seed(seed, n, d, t))?;
            Ok(p.positive_subset().len() as u64 > threshold)
        })
        .collect::<Result<Vec<bool>, HarnessError>>()?;
    Ok(rate(hits.iter().filter(|&&h| h).count(), trials))
}
