//! Transfer attack: replicate the target with a shadow model, label the
//! shadow's own train/test scores, fit an MLP on those labeled scores, and
//! apply it to target-oracle scores.

use super::mlp::{AttackClassifier, MlpConfig};
use super::{AttackDecision, AttackError, MembershipQuery};
use crate::kg::Triple;
use crate::models::{train, ModelKind, TrainConfig};
use crate::oracle::{BlackBoxOracle, TargetOracle};
use crate::rng::{sample_indices, SplitMix64};

/// Knobs of the transfer attack beyond the shadow training config.
#[derive(Debug, Clone, Default)]
pub struct TaConfig {
    pub mlp: MlpConfig,
}

/// Train the shadow model with the same architecture and training algorithm
/// as the target's declared configuration, and wrap it in an oracle.
pub fn ta_train_shadow(
    kind: ModelKind,
    shadow_train: &[Triple],
    n_entities: usize,
    n_relations: usize,
    config: &TrainConfig,
) -> Result<TargetOracle, AttackError> {
    let trained = train(kind, shadow_train, n_entities, n_relations, config)?;
    Ok(TargetOracle::new(trained.model))
}

/// Build the labeled attack set: shadow-train scores labeled 1 (members),
/// shadow-test scores labeled 0, balanced by down-sampling the larger side
/// under `rng`.
pub fn ta_build_attack_set(
    shadow_oracle: &dyn BlackBoxOracle,
    shadow_train: &[Triple],
    shadow_test: &[Triple],
    rng: &mut SplitMix64,
) -> Result<Vec<(f64, u8)>, AttackError> {
    if shadow_train.is_empty() {
        return Err(AttackError::EmptyAttackSide { side: "shadow-train" });
    }
    if shadow_test.is_empty() {
        return Err(AttackError::EmptyAttackSide { side: "shadow-test" });
    }
    let keep = shadow_train.len().min(shadow_test.len());
    let pick = |triples: &[Triple], rng: &mut SplitMix64| -> Vec<Triple> {
        if triples.len() == keep {
            triples.to_vec()
        } else {
            sample_indices(triples.len(), keep, rng).into_iter().map(|i| triples[i]).collect()
        }
    };
    let members = pick(shadow_train, rng);
    let non_members = pick(shadow_test, rng);

    let mut set = Vec::with_capacity(2 * keep);
    for t in members {
        set.push((shadow_oracle.score(t)?, 1u8));
    }
    for t in non_members {
        set.push((shadow_oracle.score(t)?, 0u8));
    }
    Ok(set)
}

/// Fit the attack MLP with default hyperparameters under `seed`.
pub fn ta_fit(attack_set: &[(f64, u8)], seed: u64) -> Result<(AttackClassifier, f64), AttackError> {
    ta_fit_with(attack_set, &TaConfig { mlp: MlpConfig { seed, ..MlpConfig::default() } })
}

/// Fit the attack MLP with explicit hyperparameters.
pub fn ta_fit_with(
    attack_set: &[(f64, u8)],
    config: &TaConfig,
) -> Result<(AttackClassifier, f64), AttackError> {
    AttackClassifier::fit(attack_set, &config.mlp)
}

/// Query the target for each candidate's score and run it through the
/// fitted classifier. Evidence is the membership probability; ties at 0.5
/// count as member.
pub fn ta_infer(
    classifier: &AttackClassifier,
    target: &dyn BlackBoxOracle,
    candidates: &[MembershipQuery],
) -> Result<Vec<AttackDecision>, AttackError> {
    if candidates.is_empty() {
        return Err(AttackError::EmptyCandidates);
    }
    candidates
        .iter()
        .map(|q| {
            let score = target.score(q.triple)?;
            Ok(AttackDecision {
                triple: q.triple,
                predicted_member: classifier.decide(score),
                evidence: classifier.probability(score),
            })
        })
        .collect()
}
