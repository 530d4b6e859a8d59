//! Binned score distributions for members vs non-members, the diagnostic
//! behind the sign-convention checks and transfer-failure analysis.

use super::EvalError;
use crate::attacks::AttackError;
use crate::kg::Triple;
use crate::oracle::BlackBoxOracle;

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreHistogram {
    pub lo: f64,
    pub hi: f64,
    pub member_counts: Vec<u64>,
    pub non_member_counts: Vec<u64>,
}

impl ScoreHistogram {
    pub fn bins(&self) -> usize {
        self.member_counts.len()
    }

    pub fn bin_width(&self) -> f64 {
        (self.hi - self.lo) / self.bins() as f64
    }

    /// Bin edges `(lo, hi)` for row `i`.
    pub fn bin_range(&self, i: usize) -> (f64, f64) {
        let w = self.bin_width();
        (self.lo + i as f64 * w, self.lo + (i + 1) as f64 * w)
    }

    /// Number of bins where both sets have mass.
    pub fn overlap_bins(&self) -> usize {
        self.member_counts
            .iter()
            .zip(&self.non_member_counts)
            .filter(|(&m, &n)| m > 0 && n > 0)
            .count()
    }
}

/// Bin both sets' oracle scores on a shared range. The range spans the
/// combined min/max; identical scores collapse to a single-point range that
/// is widened by 1 so binning stays defined.
pub fn score_histogram(
    oracle: &dyn BlackBoxOracle,
    members: &[Triple],
    non_members: &[Triple],
    bins: usize,
) -> Result<ScoreHistogram, EvalError> {
    if members.is_empty() || non_members.is_empty() {
        return Err(EvalError::Attack(AttackError::EmptyCandidates));
    }
    if bins == 0 {
        return Err(EvalError::BadExperimentConfig("histogram needs at least 1 bin".into()));
    }
    let score_all = |set: &[Triple]| -> Result<Vec<f64>, EvalError> {
        set.iter().map(|&t| oracle.score(t).map_err(EvalError::from)).collect()
    };
    let member_scores = score_all(members)?;
    let non_member_scores = score_all(non_members)?;

    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &s in member_scores.iter().chain(&non_member_scores) {
        lo = lo.min(s);
        hi = hi.max(s);
    }
    if lo == hi {
        hi = lo + 1.0;
    }

    let mut member_counts = vec![0u64; bins];
    let mut non_member_counts = vec![0u64; bins];
    let width = (hi - lo) / bins as f64;
    let mut fill = |scores: &[f64], counts: &mut [u64]| {
        for &s in scores {
            let idx = (((s - lo) / width) as usize).min(bins - 1);
            counts[idx] += 1;
        }
    };
    fill(&member_scores, &mut member_counts);
    fill(&non_member_scores, &mut non_member_counts);

    Ok(ScoreHistogram { lo, hi, member_counts, non_member_counts })
}
