//! Attack metrics, the end-to-end experiment pipeline, and the ablation
//! harness.

mod ablation;
mod experiment;
mod histogram;
mod report;
mod synth;

pub use ablation::{run_ablation, AblationAxis, AblationCell, AblationGrid, AblationSpec};
pub use experiment::{run_experiment, ExperimentConfig, ExperimentOutcome};
pub use histogram::{score_histogram, ScoreHistogram};
pub use report::{
    grid_heat_table, markdown_summary, write_decisions_csv, write_grid_csv, write_histogram_csv,
    write_reports_csv, REPORT_CSV_COLUMNS,
};
pub use synth::{synth_kg, SynthConfig};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::attacks::{AttackDecision, AttackError, AttackKind};
use crate::kg::KgError;
use crate::models::{LossKind, ModelError, ModelKind};
use crate::oracle::OracleError;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("metrics need a non-empty decision list")]
    EmptyDecisions,
    #[error("decisions and truth have different lengths ({decisions} vs {truth})")]
    LengthMismatch { decisions: usize, truth: usize },
    #[error("synthetic KG config invalid: {0}")]
    BadSynthConfig(String),
    #[error("experiment config invalid: {0}")]
    BadExperimentConfig(String),
    #[error(transparent)]
    Attack(#[from] AttackError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Kg(#[from] KgError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("failed to write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// The four standard attack metrics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub accuracy: f64,
    pub f1: f64,
    pub precision: f64,
    pub recall: f64,
}

/// Metrics from confusion counts. Precision is 0 when nothing is predicted
/// positive, recall 0 when there are no positives, F1 0 when its
/// denominator vanishes.
pub fn metrics_from_counts(tp: u64, fp: u64, fn_: u64, tn: u64) -> Metrics {
    let total = (tp + fp + fn_ + tn) as f64;
    let accuracy = if total == 0.0 { 0.0 } else { (tp + tn) as f64 / total };
    let precision = if tp + fp == 0 { 0.0 } else { tp as f64 / (tp + fp) as f64 };
    let recall = if tp + fn_ == 0 { 0.0 } else { tp as f64 / (tp + fn_) as f64 };
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    Metrics { accuracy, f1, precision, recall }
}

/// Score a decision list against ground-truth member bits.
pub fn compute_metrics(decisions: &[AttackDecision], truth: &[bool]) -> Result<Metrics, EvalError> {
    if decisions.is_empty() {
        return Err(EvalError::EmptyDecisions);
    }
    if decisions.len() != truth.len() {
        return Err(EvalError::LengthMismatch { decisions: decisions.len(), truth: truth.len() });
    }
    let mut tp = 0u64;
    let mut fp = 0u64;
    let mut fn_ = 0u64;
    let mut tn = 0u64;
    for (d, &y) in decisions.iter().zip(truth) {
        match (d.predicted_member, y) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => tn += 1,
        }
    }
    Ok(metrics_from_counts(tp, fp, fn_, tn))
}

/// Named training regimes scaling the configured epoch count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    EarlyStop,
    Default,
    Overfit,
}

impl Regime {
    pub const ALL: [Regime; 3] = [Regime::EarlyStop, Regime::Default, Regime::Overfit];

    pub fn multiplier(self) -> f64 {
        match self {
            Regime::EarlyStop => 0.1,
            Regime::Default => 1.0,
            Regime::Overfit => 5.0,
        }
    }

    /// Scaled epoch count, at least 1.
    pub fn apply(self, epochs: usize) -> usize {
        ((epochs as f64 * self.multiplier()).round() as usize).max(1)
    }

    pub fn name(self) -> &'static str {
        match self {
            Regime::EarlyStop => "early-stop",
            Regime::Default => "default",
            Regime::Overfit => "overfit",
        }
    }

    pub fn parse(s: &str) -> Option<Regime> {
        match s.to_ascii_lowercase().as_str() {
            "early-stop" | "earlystop" | "early" => Some(Regime::EarlyStop),
            "default" => Some(Regime::Default),
            "overfit" => Some(Regime::Overfit),
            _ => None,
        }
    }
}

/// One attack run's results, ready for CSV or markdown export.
#[derive(Debug, Clone, Serialize)]
pub struct AttackReport {
    pub attack: AttackKind,
    pub model: ModelKind,
    pub dataset: String,
    pub shadow_model: ModelKind,
    pub shadow_dataset: String,
    pub regime: Regime,
    pub seed: u64,
    pub metrics: Metrics,
    pub overfit_level: f64,
    /// PLA only: which loss metric scored the candidates.
    pub pla_metric: Option<LossKind>,
    /// False when any stage ran with hogwild workers.
    pub deterministic: bool,
    /// Hash of the canonical config serialization.
    pub fingerprint: String,
    /// Where the per-candidate decision CSV was written, when persisted.
    pub decisions_path: Option<String>,
}
