//! Prediction-loss attack: a candidate is a member when its loss under the
//! target's scores is at or below the average loss of the queried set.
//!
//! Two loss metrics mirror the training objectives. The logistic metric is
//! `softplus(score)`, the per-triple positive term of the logistic loss.
//! The margin metric pairs each candidate with `k` fresh corruptions and
//! averages `max(γ + S(τ) − S(τ′), 0)` over them; `k` defaults to 1.

use super::{AttackDecision, AttackError, MembershipQuery};
use crate::kg::Corruptor;
use crate::models::LossKind;
use crate::oracle::BlackBoxOracle;
use crate::rng::SplitMix64;

#[derive(Debug, Clone)]
pub struct PlaConfig {
    pub metric: LossKind,
    /// Margin γ of the margin metric; ignored by the logistic metric.
    pub margin: f64,
    /// Corruptions per candidate for the margin metric.
    pub corruptions_per_candidate: usize,
}

impl Default for PlaConfig {
    fn default() -> Self {
        PlaConfig { metric: LossKind::Logistic, margin: 4.0, corruptions_per_candidate: 1 }
    }
}

fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

/// Run the attack: compute each candidate's loss, average into δ, and
/// predict member iff loss ≤ δ. Evidence is the loss value. The margin
/// metric draws corruptions from the candidate vocabulary, so the entity
/// and relation counts of the queried KG are required.
pub fn pla_infer(
    target: &dyn BlackBoxOracle,
    candidates: &[MembershipQuery],
    config: &PlaConfig,
    n_entities: usize,
    n_relations: usize,
    rng: &mut SplitMix64,
) -> Result<Vec<AttackDecision>, AttackError> {
    if candidates.is_empty() {
        return Err(AttackError::EmptyCandidates);
    }
    if config.metric == LossKind::Margin && config.corruptions_per_candidate == 0 {
        return Err(AttackError::BadConfig("margin metric needs at least one corruption".into()));
    }

    let losses: Vec<f64> = match config.metric {
        LossKind::Logistic => candidates
            .iter()
            .map(|q| Ok(softplus(target.score(q.triple)?)))
            .collect::<Result<_, AttackError>>()?,
        LossKind::Margin => {
            let mut corruptor = Corruptor::new(n_entities, n_relations)?;
            let mut out = Vec::with_capacity(candidates.len());
            for q in candidates {
                let pos = target.score(q.triple)?;
                let mut acc = 0.0;
                for _ in 0..config.corruptions_per_candidate {
                    let neg = corruptor.sample(q.triple, rng).corrupted;
                    acc += (config.margin + pos - target.score(neg)?).max(0.0);
                }
                out.push(acc / config.corruptions_per_candidate as f64);
            }
            out
        }
    };

    let delta: f64 = losses.iter().sum::<f64>() / losses.len() as f64;
    Ok(candidates
        .iter()
        .zip(losses)
        .map(|(q, loss)| AttackDecision {
            triple: q.triple,
            predicted_member: loss <= delta,
            evidence: loss,
        })
        .collect())
}
