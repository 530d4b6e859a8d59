//! Prediction-correctness attack: the adversary sees only hard labels and
//! predicts membership exactly when the target classifies the candidate
//! consistently with its true label.

use super::{AttackDecision, AttackError, MembershipQuery};
use crate::oracle::BlackBoxOracle;

/// Member iff `label(τ) == true_label`. Evidence is the agreement bit.
/// Fails with the oracle's error when it is uncalibrated.
pub fn pca_infer(
    target: &dyn BlackBoxOracle,
    candidates: &[MembershipQuery],
) -> Result<Vec<AttackDecision>, AttackError> {
    if candidates.is_empty() {
        return Err(AttackError::EmptyCandidates);
    }
    candidates
        .iter()
        .map(|q| {
            let agree = target.label(q.triple)? == q.true_label;
            Ok(AttackDecision {
                triple: q.triple,
                predicted_member: agree,
                evidence: agree as u8 as f64,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attacks::test_oracle::TestOracle;
    use crate::kg::Triple;
    use crate::oracle::TripleLabel;
    use std::collections::HashMap;

    #[test]
    fn correctly_labeled_fact_is_member() {
        let t = Triple::new(0, 0, 1);
        let oracle = TestOracle { scores: HashMap::from([(t, -1.0)]), threshold: 0.0 };
        let out = pca_infer(&oracle, &[MembershipQuery::fact(t)]).unwrap();
        assert!(out[0].predicted_member);
        assert_eq!(out[0].evidence, 1.0);
    }

    #[test]
    fn misclassified_fact_is_non_member() {
        let t = Triple::new(0, 0, 1);
        let oracle = TestOracle { scores: HashMap::from([(t, 3.0)]), threshold: 0.0 };
        let out = pca_infer(&oracle, &[MembershipQuery::fact(t)]).unwrap();
        assert!(!out[0].predicted_member);
        assert_eq!(out[0].evidence, 0.0);
    }

    #[test]
    fn corrupted_candidates_use_their_own_label() {
        // A candidate whose true label is Corrupted counts as member when
        // the oracle also says Corrupted.
        let t = Triple::new(2, 0, 2);
        let oracle = TestOracle { scores: HashMap::from([(t, 9.0)]), threshold: 0.0 };
        let q = MembershipQuery { triple: t, true_label: TripleLabel::Corrupted };
        let out = pca_infer(&oracle, &[q]).unwrap();
        assert!(out[0].predicted_member);
    }

    /// On balanced member/non-member fact sets, accuracy is exactly
    /// (r_m + 1 − r_n)/2 where r_m and r_n are the oracle's correct-label
    /// rates on each set — verified by brute force.
    #[test]
    fn accuracy_identity_holds() {
        let mut scores = HashMap::new();
        let mut members = Vec::new();
        let mut non_members = Vec::new();
        // 10 members: 7 labeled correct; 10 non-members: 4 labeled correct.
        for i in 0..10u32 {
            let m = Triple::new(i, 0, i + 1);
            scores.insert(m, if i < 7 { -1.0 } else { 1.0 });
            members.push(m);
            let n = Triple::new(100 + i, 0, 100 + i + 1);
            scores.insert(n, if i < 4 { -1.0 } else { 1.0 });
            non_members.push(n);
        }
        let oracle = TestOracle { scores, threshold: 0.0 };
        let candidates: Vec<MembershipQuery> = members
            .iter()
            .chain(non_members.iter())
            .map(|&t| MembershipQuery::fact(t))
            .collect();
        let decisions = pca_infer(&oracle, &candidates).unwrap();
        let truth: Vec<bool> =
            (0..20).map(|i| i < 10).collect();
        let hits = decisions
            .iter()
            .zip(&truth)
            .filter(|(d, &y)| d.predicted_member == y)
            .count();
        let accuracy = hits as f64 / 20.0;
        let r_m = 0.7;
        let r_n = 0.4;
        assert!((accuracy - (r_m + 1.0 - r_n) / 2.0).abs() < 1e-15);
        // Recall over members equals r_m.
        let recall = decisions[..10].iter().filter(|d| d.predicted_member).count() as f64 / 10.0;
        assert!((recall - r_m).abs() < 1e-15);
    }

    #[test]
    fn empty_candidates_error() {
        let oracle = TestOracle { scores: HashMap::new(), threshold: 0.0 };
        assert!(matches!(pca_infer(&oracle, &[]), Err(AttackError::EmptyCandidates)));
    }
}
