//! CSV and markdown export of attack results.

use std::path::Path;

use super::{AblationGrid, AttackReport, EvalError, ScoreHistogram};
use crate::attacks::AttackDecision;

pub const REPORT_CSV_COLUMNS: [&str; 14] = [
    "attack",
    "model",
    "dataset",
    "shadow_model",
    "shadow_dataset",
    "regime",
    "seed",
    "accuracy",
    "f1",
    "precision",
    "recall",
    "overfit_level",
    "deterministic",
    "fingerprint",
];

fn io_err(path: &Path) -> impl Fn(csv::Error) -> EvalError + '_ {
    move |e| EvalError::Io {
        path: path.display().to_string(),
        source: std::io::Error::other(e),
    }
}

/// One row per report, columns as in [`REPORT_CSV_COLUMNS`] plus
/// `pla_metric` and `decisions_path`.
pub fn write_reports_csv(reports: &[AttackReport], path: &Path) -> Result<(), EvalError> {
    let mut w = csv::Writer::from_path(path).map_err(io_err(path))?;
    let mut header: Vec<&str> = REPORT_CSV_COLUMNS.to_vec();
    header.push("pla_metric");
    header.push("decisions_path");
    w.write_record(&header).map_err(io_err(path))?;
    for r in reports {
        w.write_record([
            r.attack.name().to_string(),
            r.model.name().to_string(),
            r.dataset.clone(),
            r.shadow_model.name().to_string(),
            r.shadow_dataset.clone(),
            r.regime.name().to_string(),
            r.seed.to_string(),
            format!("{}", r.metrics.accuracy),
            format!("{}", r.metrics.f1),
            format!("{}", r.metrics.precision),
            format!("{}", r.metrics.recall),
            format!("{}", r.overfit_level),
            r.deterministic.to_string(),
            r.fingerprint.clone(),
            r.pla_metric.map(|m| m.name().to_string()).unwrap_or_default(),
            r.decisions_path.clone().unwrap_or_default(),
        ])
        .map_err(io_err(path))?;
    }
    w.flush().map_err(|e| EvalError::Io { path: path.display().to_string(), source: e })
}

/// Per-candidate decisions: triple ids, evidence, prediction, ground truth.
pub fn write_decisions_csv(
    decisions: &[AttackDecision],
    truth: &[bool],
    path: &Path,
) -> Result<(), EvalError> {
    if decisions.len() != truth.len() {
        return Err(EvalError::LengthMismatch { decisions: decisions.len(), truth: truth.len() });
    }
    let mut w = csv::Writer::from_path(path).map_err(io_err(path))?;
    w.write_record(["head", "relation", "tail", "evidence", "predicted_member", "member"])
        .map_err(io_err(path))?;
    for (d, &y) in decisions.iter().zip(truth) {
        w.write_record([
            d.triple.head.to_string(),
            d.triple.relation.to_string(),
            d.triple.tail.to_string(),
            format!("{}", d.evidence),
            (d.predicted_member as u8).to_string(),
            (y as u8).to_string(),
        ])
        .map_err(io_err(path))?;
    }
    w.flush().map_err(|e| EvalError::Io { path: path.display().to_string(), source: e })
}

/// Histogram rows: bin bounds and both sets' counts.
pub fn write_histogram_csv(hist: &ScoreHistogram, path: &Path) -> Result<(), EvalError> {
    let mut w = csv::Writer::from_path(path).map_err(io_err(path))?;
    w.write_record(["bin_lo", "bin_hi", "member_count", "non_member_count"])
        .map_err(io_err(path))?;
    for i in 0..hist.bins() {
        let (lo, hi) = hist.bin_range(i);
        w.write_record([
            format!("{lo}"),
            format!("{hi}"),
            hist.member_counts[i].to_string(),
            hist.non_member_counts[i].to_string(),
        ])
        .map_err(io_err(path))?;
    }
    w.flush().map_err(|e| EvalError::Io { path: path.display().to_string(), source: e })
}

/// Grid cells as CSV: label, seed, metrics or error.
pub fn write_grid_csv(grid: &AblationGrid, path: &Path) -> Result<(), EvalError> {
    let mut w = csv::Writer::from_path(path).map_err(io_err(path))?;
    w.write_record([
        "axis",
        "target_dataset",
        "target_model",
        "shadow",
        "seed",
        "accuracy",
        "f1",
        "precision",
        "recall",
        "overfit_level",
        "error",
    ])
    .map_err(io_err(path))?;
    for cell in &grid.cells {
        let (acc, f1, pre, rec, ofl, err) = match &cell.report {
            Ok(r) => (
                format!("{}", r.metrics.accuracy),
                format!("{}", r.metrics.f1),
                format!("{}", r.metrics.precision),
                format!("{}", r.metrics.recall),
                format!("{}", r.overfit_level),
                String::new(),
            ),
            Err(e) => (
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                e.clone(),
            ),
        };
        w.write_record([
            grid.axis.name().to_string(),
            grid.target_dataset.clone(),
            grid.target_model.name().to_string(),
            cell.shadow_label.clone(),
            cell.seed.to_string(),
            acc,
            f1,
            pre,
            rec,
            ofl,
            err,
        ])
        .map_err(io_err(path))?;
    }
    w.flush().map_err(|e| EvalError::Io { path: path.display().to_string(), source: e })
}

/// Plain-text heat table of grid accuracies, one row per cell.
pub fn grid_heat_table(grid: &AblationGrid) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "TA accuracy | target {} on {} | axis {}\n",
        grid.target_model.name(),
        grid.target_dataset,
        grid.axis.name()
    ));
    for cell in &grid.cells {
        match &cell.report {
            Ok(r) => out.push_str(&format!(
                "  {:<12} {:>7.4}  {}\n",
                cell.shadow_label,
                r.metrics.accuracy,
                bar(r.metrics.accuracy)
            )),
            Err(e) => out.push_str(&format!("  {:<12} FAILED  {e}\n", cell.shadow_label)),
        }
    }
    out
}

fn bar(fraction: f64) -> String {
    let n = (fraction.clamp(0.0, 1.0) * 40.0).round() as usize;
    "#".repeat(n)
}

/// Markdown table mirroring the per-model metric layout of the result
/// tables: one row per model kind, four metric columns.
pub fn markdown_summary(title: &str, reports: &[AttackReport]) -> String {
    let mut out = String::new();
    out.push_str(&format!("## {title}\n\n"));
    out.push_str("| attack | model | dataset | regime | accuracy | F1 | precision | recall | overfit |\n");
    out.push_str("|---|---|---|---|---|---|---|---|---|\n");
    for r in reports {
        out.push_str(&format!(
            "| {} | {} | {} | {} | {:.4} | {:.4} | {:.4} | {:.4} | {:.4} |\n",
            r.attack.name(),
            r.model.name(),
            r.dataset,
            r.regime.name(),
            r.metrics.accuracy,
            r.metrics.f1,
            r.metrics.precision,
            r.metrics.recall,
            r.overfit_level,
        ));
    }
    out
}
