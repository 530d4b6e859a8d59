//! The three membership inference attacks.
//!
//! Every attack consumes the [`BlackBoxOracle`] trait and nothing else, so
//! the adversary's knowledge boundary is enforced by the compiler: scores
//! and hard labels go in, membership bits come out.
//!
//! - [`ta`]: transfer attack — shadow model + MLP on plausibility scores.
//! - [`pla`]: prediction-loss attack — member iff loss ≤ average loss.
//! - [`pca`]: prediction-correctness attack — member iff the oracle labels
//!   the triple consistently with its true label.

pub mod mlp;
pub mod pca;
pub mod pla;
pub mod ta;

pub use mlp::{AttackClassifier, MlpConfig};
pub use pca::pca_infer;
pub use pla::{pla_infer, PlaConfig};
pub use ta::{ta_build_attack_set, ta_fit, ta_fit_with, ta_infer, ta_train_shadow, TaConfig};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kg::{KgError, Triple};
use crate::models::ModelError;
use crate::oracle::{OracleError, TripleLabel};

#[derive(Debug, Error)]
pub enum AttackError {
    #[error("candidate list is empty")]
    EmptyCandidates,
    #[error("attack set needs non-empty {side} triples")]
    EmptyAttackSide { side: &'static str },
    #[error("attack set contains a single class; cannot fit a classifier")]
    SingleClass,
    #[error("bad attack config: {0}")]
    BadConfig(String),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Kg(#[from] KgError),
}

/// Which attack produced a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AttackKind {
    Ta,
    Pla,
    Pca,
}

impl AttackKind {
    pub fn name(self) -> &'static str {
        match self {
            AttackKind::Ta => "ta",
            AttackKind::Pla => "pla",
            AttackKind::Pca => "pca",
        }
    }

    pub fn parse(s: &str) -> Option<AttackKind> {
        match s.to_ascii_lowercase().as_str() {
            "ta" => Some(AttackKind::Ta),
            "pla" => Some(AttackKind::Pla),
            "pca" => Some(AttackKind::Pca),
            _ => None,
        }
    }
}

/// A candidate triple to test for membership. `true_label` is consumed only
/// by the correctness attack; evaluation candidates are true facts, so it
/// defaults to `Correct`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MembershipQuery {
    pub triple: Triple,
    pub true_label: TripleLabel,
}

impl MembershipQuery {
    /// A true-fact candidate.
    pub fn fact(triple: Triple) -> Self {
        MembershipQuery { triple, true_label: TripleLabel::Correct }
    }
}

/// One membership verdict. `evidence` is attack-specific: the classifier
/// probability for TA, the loss value for PLA, the label-agreement bit for
/// PCA.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttackDecision {
    pub triple: Triple,
    pub predicted_member: bool,
    pub evidence: f64,
}
