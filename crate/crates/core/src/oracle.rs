//! The black-box boundary around a frozen model.
//!
//! Adversaries see exactly two operations: the plausibility score of a
//! triple and the hard correct/corrupted label derived from calibrated
//! per-relation thresholds. Nothing here exposes or reconstructs embedding
//! rows; attacks are written against the [`BlackBoxOracle`] trait so they
//! cannot reach model internals at compile time.
//!
//! Thresholds follow the standard triple-classification protocol: each
//! validation positive is paired with one corruption, candidate thresholds
//! are the midpoints of consecutive distinct scores, and the accuracy-
//! maximizing midpoint wins (ties to the smallest). Relations unseen at
//! calibration time fall back to a threshold pooled over all relations.

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};

use thiserror::Error;

use crate::kg::{Corruptor, KgError, Triple};
use crate::models::{KgeModel, ModelError};
use crate::rng::SplitMix64;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("triple {0} is outside the model's vocabulary")]
    InvalidTriple(Triple),
    #[error("label queries need a calibrated oracle; run calibrate() first")]
    NotCalibrated,
    #[error("calibration needs a non-empty validation set")]
    EmptyValidation,
    #[error("accuracy diagnostics need non-empty triple sets")]
    EmptyEvalSet,
    #[error("query budget of {cap} exhausted")]
    QueryBudgetExhausted { cap: u64 },
    #[error("corruption sampling failed: {0}")]
    Corruption(#[from] KgError),
    #[error("calibration file {path}: {reason}")]
    BadCalibrationFile { path: String, reason: String },
    #[error("failed to access {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Hard label of the triple-classification task.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TripleLabel {
    Correct,
    Corrupted,
}

/// The two operations an adversary may invoke.
pub trait BlackBoxOracle: Sync {
    fn score(&self, triple: Triple) -> Result<f64, OracleError>;
    fn label(&self, triple: Triple) -> Result<TripleLabel, OracleError>;
}

/// Threshold and the validation accuracy it achieved.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelationThreshold {
    pub threshold: f64,
    pub accuracy: f64,
}

/// Per-relation thresholds plus the pooled fallback.
#[derive(Debug, Clone, PartialEq)]
pub struct Calibration {
    pub per_relation: BTreeMap<u32, RelationThreshold>,
    pub global: RelationThreshold,
}

impl Calibration {
    pub fn threshold_for(&self, relation: u32) -> f64 {
        self.per_relation.get(&relation).map(|t| t.threshold).unwrap_or(self.global.threshold)
    }
}

/// A frozen model behind the score/label interface, with query accounting.
pub struct TargetOracle {
    model: KgeModel,
    calibration: Option<Calibration>,
    score_queries: AtomicU64,
    label_queries: AtomicU64,
    invalid_queries: AtomicU64,
    query_cap: Option<u64>,
}

impl TargetOracle {
    pub fn new(model: KgeModel) -> Self {
        TargetOracle {
            model,
            calibration: None,
            score_queries: AtomicU64::new(0),
            label_queries: AtomicU64::new(0),
            invalid_queries: AtomicU64::new(0),
            query_cap: None,
        }
    }

    pub fn with_calibration(model: KgeModel, calibration: Calibration) -> Self {
        let mut oracle = TargetOracle::new(model);
        oracle.calibration = Some(calibration);
        oracle
    }

    /// Enforce a hard total query budget (scores + labels). `None` tracks
    /// without enforcing.
    pub fn set_query_cap(&mut self, cap: Option<u64>) {
        self.query_cap = cap;
    }

    pub fn n_entities(&self) -> usize {
        self.model.n_entities()
    }

    pub fn n_relations(&self) -> usize {
        self.model.n_relations()
    }

    pub fn score_query_count(&self) -> u64 {
        self.score_queries.load(Ordering::Relaxed)
    }

    pub fn label_query_count(&self) -> u64 {
        self.label_queries.load(Ordering::Relaxed)
    }

    pub fn invalid_query_count(&self) -> u64 {
        self.invalid_queries.load(Ordering::Relaxed)
    }

    pub fn calibration(&self) -> Option<&Calibration> {
        self.calibration.as_ref()
    }

    pub fn is_calibrated(&self) -> bool {
        self.calibration.is_some()
    }

    fn charge(&self, counter: &AtomicU64) -> Result<(), OracleError> {
        if let Some(cap) = self.query_cap {
            let used = self.score_queries.load(Ordering::Relaxed)
                + self.label_queries.load(Ordering::Relaxed);
            if used >= cap {
                return Err(OracleError::QueryBudgetExhausted { cap });
            }
        }
        counter.fetch_add(1, Ordering::Relaxed);
        Ok(())
    }

    fn checked_score(&self, triple: Triple) -> Result<f64, OracleError> {
        match self.model.score(triple) {
            Ok(s) => Ok(s),
            Err(ModelError::IdOutOfRange { .. }) => {
                self.invalid_queries.fetch_add(1, Ordering::Relaxed);
                Err(OracleError::InvalidTriple(triple))
            }
            Err(_) => Err(OracleError::InvalidTriple(triple)),
        }
    }

    /// Calibrate per-relation thresholds on the model owner's validation
    /// positives. Each positive is paired with one unfiltered corruption
    /// drawn from `rng`; the stored calibration also carries the pooled
    /// global fallback.
    pub fn calibrate(
        &mut self,
        validation: &[Triple],
        rng: &mut SplitMix64,
    ) -> Result<&Calibration, OracleError> {
        if validation.is_empty() {
            return Err(OracleError::EmptyValidation);
        }
        let mut corruptor = Corruptor::new(self.model.n_entities(), self.model.n_relations())?;
        // (relation, score, is_positive) for positives and their corruptions.
        let mut scored: Vec<(u32, f64, bool)> = Vec::with_capacity(validation.len() * 2);
        for &pos in validation {
            let pos_score = self.checked_score(pos)?;
            let neg = corruptor.sample(pos, rng).corrupted;
            let neg_score = self.checked_score(neg)?;
            scored.push((pos.relation, pos_score, true));
            scored.push((neg.relation, neg_score, false));
        }

        let mut by_relation: BTreeMap<u32, Vec<(f64, bool)>> = BTreeMap::new();
        for &(rel, score, is_pos) in &scored {
            by_relation.entry(rel).or_default().push((score, is_pos));
        }
        let per_relation: BTreeMap<u32, RelationThreshold> = by_relation
            .into_iter()
            .map(|(rel, pairs)| (rel, best_midpoint_threshold(&pairs)))
            .collect();
        let pooled: Vec<(f64, bool)> = scored.iter().map(|&(_, s, p)| (s, p)).collect();
        let global = best_midpoint_threshold(&pooled);

        self.calibration = Some(Calibration { per_relation, global });
        Ok(self.calibration.as_ref().unwrap())
    }

    /// Overfit diagnostic: balanced triple-classification accuracy on train
    /// positives (plus 1:1 corruptions) minus the same on test positives.
    pub fn overfit_level(
        &self,
        train_positives: &[Triple],
        test_positives: &[Triple],
        rng: &mut SplitMix64,
    ) -> Result<f64, OracleError> {
        if self.calibration.is_none() {
            return Err(OracleError::NotCalibrated);
        }
        if train_positives.is_empty() || test_positives.is_empty() {
            return Err(OracleError::EmptyEvalSet);
        }
        let train_acc = self.balanced_accuracy(train_positives, rng)?;
        let test_acc = self.balanced_accuracy(test_positives, rng)?;
        Ok(train_acc - test_acc)
    }

    /// Balanced accuracy over positives plus one corruption each.
    pub fn balanced_accuracy(
        &self,
        positives: &[Triple],
        rng: &mut SplitMix64,
    ) -> Result<f64, OracleError> {
        if positives.is_empty() {
            return Err(OracleError::EmptyEvalSet);
        }
        let mut corruptor = Corruptor::new(self.model.n_entities(), self.model.n_relations())?;
        let mut pos_correct = 0usize;
        let mut neg_correct = 0usize;
        for &pos in positives {
            if self.label(pos)? == TripleLabel::Correct {
                pos_correct += 1;
            }
            let neg = corruptor.sample(pos, rng).corrupted;
            if self.label(neg)? == TripleLabel::Corrupted {
                neg_correct += 1;
            }
        }
        let n = positives.len() as f64;
        Ok((pos_correct as f64 / n + neg_correct as f64 / n) / 2.0)
    }

    /// Correct-label rate on a set of true facts.
    pub fn correct_rate(&self, positives: &[Triple]) -> Result<f64, OracleError> {
        if positives.is_empty() {
            return Err(OracleError::EmptyEvalSet);
        }
        let mut hits = 0usize;
        for &t in positives {
            if self.label(t)? == TripleLabel::Correct {
                hits += 1;
            }
        }
        Ok(hits as f64 / positives.len() as f64)
    }
}

impl BlackBoxOracle for TargetOracle {
    fn score(&self, triple: Triple) -> Result<f64, OracleError> {
        self.charge(&self.score_queries)?;
        self.checked_score(triple)
    }

    fn label(&self, triple: Triple) -> Result<TripleLabel, OracleError> {
        let calibration = self.calibration.as_ref().ok_or(OracleError::NotCalibrated)?;
        self.charge(&self.label_queries)?;
        let score = self.checked_score(triple)?;
        if score <= calibration.threshold_for(triple.relation) {
            Ok(TripleLabel::Correct)
        } else {
            Ok(TripleLabel::Corrupted)
        }
    }
}

/// Accuracy-maximizing midpoint threshold for `(score, is_positive)` pairs
/// under the rule "correct iff score ≤ threshold". Candidates are the
/// midpoints of consecutive distinct sorted scores; ties resolve to the
/// smallest. A single distinct score is its own threshold.
fn best_midpoint_threshold(pairs: &[(f64, bool)]) -> RelationThreshold {
    debug_assert!(!pairs.is_empty());
    let mut scores: Vec<f64> = pairs.iter().map(|&(s, _)| s).collect();
    scores.sort_by(|a, b| a.partial_cmp(b).unwrap());
    scores.dedup();

    let accuracy_at = |thr: f64| -> f64 {
        let hits = pairs.iter().filter(|&&(s, pos)| (s <= thr) == pos).count();
        hits as f64 / pairs.len() as f64
    };

    if scores.len() == 1 {
        let thr = scores[0];
        return RelationThreshold { threshold: thr, accuracy: accuracy_at(thr) };
    }
    let mut best = RelationThreshold { threshold: f64::NEG_INFINITY, accuracy: f64::NEG_INFINITY };
    for pair in scores.windows(2) {
        let thr = (pair[0] + pair[1]) / 2.0;
        let acc = accuracy_at(thr);
        if acc > best.accuracy {
            best = RelationThreshold { threshold: thr, accuracy: acc };
        }
    }
    best
}

/// Write a calibration as TSV: a `#global` header row carrying the pooled
/// threshold, then one `relation_id<TAB>threshold<TAB>accuracy` row per
/// relation.
pub fn save_calibration(calibration: &Calibration, path: &Path) -> Result<(), OracleError> {
    let io_err = |source| OracleError::Io { path: path.display().to_string(), source };
    let mut w = std::io::BufWriter::new(std::fs::File::create(path).map_err(io_err)?);
    let res: std::io::Result<()> = (|| {
        writeln!(w, "#global\t{}\t{}", calibration.global.threshold, calibration.global.accuracy)?;
        for (rel, t) in &calibration.per_relation {
            writeln!(w, "{rel}\t{}\t{}", t.threshold, t.accuracy)?;
        }
        w.flush()
    })();
    res.map_err(|source| OracleError::Io { path: path.display().to_string(), source })
}

pub fn load_calibration(path: &Path) -> Result<Calibration, OracleError> {
    let display = path.display().to_string();
    let bad = |reason: String| OracleError::BadCalibrationFile { path: display.clone(), reason };
    let file = std::fs::File::open(path)
        .map_err(|source| OracleError::Io { path: display.clone(), source })?;
    let mut lines = BufReader::new(file).lines();

    let header = lines
        .next()
        .ok_or_else(|| bad("empty file".into()))?
        .map_err(|source| OracleError::Io { path: display.clone(), source })?;
    let parts: Vec<&str> = header.split('\t').collect();
    if parts.len() != 3 || parts[0] != "#global" {
        return Err(bad("first line must be `#global<TAB>threshold<TAB>accuracy`".into()));
    }
    let global = RelationThreshold {
        threshold: parts[1]
            .parse()
            .map_err(|_| bad(format!("bad global threshold {:?}", parts[1])))?,
        accuracy: parts[2]
            .parse()
            .map_err(|_| bad(format!("bad global accuracy {:?}", parts[2])))?,
    };

    let mut per_relation = BTreeMap::new();
    for (idx, line) in lines.enumerate() {
        let line = line.map_err(|source| OracleError::Io { path: display.clone(), source })?;
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split('\t').collect();
        if parts.len() != 3 {
            return Err(bad(format!("line {}: expected 3 fields", idx + 2)));
        }
        let rel: u32 =
            parts[0].parse().map_err(|_| bad(format!("line {}: bad relation id", idx + 2)))?;
        let threshold: f64 =
            parts[1].parse().map_err(|_| bad(format!("line {}: bad threshold", idx + 2)))?;
        let accuracy: f64 =
            parts[2].parse().map_err(|_| bad(format!("line {}: bad accuracy", idx + 2)))?;
        per_relation.insert(rel, RelationThreshold { threshold, accuracy });
    }
    Ok(Calibration { per_relation, global })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{ModelKind, NormKind};

    /// dim-1 DistMult with hand-set entity values and relation value 1:
    /// score(h, r, t) = −(h·t), fully controlled by the entity values.
    fn toy_model(entity_values: &[f64]) -> KgeModel {
        KgeModel::from_parts(
            ModelKind::DistMult,
            NormKind::L2,
            1,
            entity_values.len(),
            1,
            entity_values.to_vec(),
            vec![],
            vec![1.0],
            vec![],
            vec![],
        )
        .unwrap()
    }

    #[test]
    fn score_passthrough_and_counting() {
        let model = toy_model(&[1.0, 2.0, 3.0]);
        let direct = model.clone();
        let oracle = TargetOracle::new(model);
        for _ in 0..10 {
            for h in 0..3u32 {
                let t = Triple::new(h, 0, (h + 1) % 3);
                assert_eq!(oracle.score(t).unwrap(), direct.score(t).unwrap());
            }
        }
        assert_eq!(oracle.score_query_count(), 30);
        assert_eq!(oracle.invalid_query_count(), 0);
    }

    #[test]
    fn thousand_queries_count_to_a_thousand() {
        let oracle = TargetOracle::new(toy_model(&[1.0, 2.0]));
        let t = Triple::new(0, 0, 1);
        for _ in 0..1000 {
            oracle.score(t).unwrap();
        }
        assert_eq!(oracle.score_query_count(), 1000);
    }

    #[test]
    fn invalid_ids_counted_separately() {
        let oracle = TargetOracle::new(toy_model(&[1.0, 2.0]));
        assert!(matches!(oracle.score(Triple::new(9, 0, 0)), Err(OracleError::InvalidTriple(_))));
        assert_eq!(oracle.invalid_query_count(), 1);
    }

    #[test]
    fn query_cap_enforced() {
        let mut oracle = TargetOracle::new(toy_model(&[1.0, 2.0]));
        oracle.set_query_cap(Some(3));
        let t = Triple::new(0, 0, 1);
        for _ in 0..3 {
            oracle.score(t).unwrap();
        }
        assert!(matches!(oracle.score(t), Err(OracleError::QueryBudgetExhausted { cap: 3 })));
    }

    #[test]
    fn separable_calibration_picks_midpoint() {
        // Entities 1 and -1: the positive (0,r,0) scores -1; with only two
        // entities every corruption hits entity 1 and scores +1. Midpoint 0,
        // accuracy 1.0.
        let model = toy_model(&[1.0, -1.0]);
        let mut oracle = TargetOracle::new(model);
        let mut rng = SplitMix64::new(4);
        let validation = vec![Triple::new(0, 0, 0); 8];
        let calib = oracle.calibrate(&validation, &mut rng).unwrap().clone();
        assert_eq!(calib.global.threshold, 0.0);
        assert_eq!(calib.global.accuracy, 1.0);
        assert_eq!(calib.per_relation[&0].threshold, 0.0);
    }

    #[test]
    fn degenerate_identical_scores_give_half_accuracy() {
        let pairs = vec![(2.0, true), (2.0, false), (2.0, true), (2.0, false)];
        let t = best_midpoint_threshold(&pairs);
        assert_eq!(t.threshold, 2.0);
        assert_eq!(t.accuracy, 0.5);
    }

    #[test]
    fn chosen_threshold_matches_exhaustive_sweep() {
        let mut rng = SplitMix64::new(31);
        for _ in 0..50 {
            // Coarse scores so ties between candidate thresholds occur.
            let pairs: Vec<(f64, bool)> =
                (0..40).map(|_| (rng.next_range(-3.0, 3.0).round(), rng.next_bool())).collect();
            let picked = best_midpoint_threshold(&pairs);
            let mut scores: Vec<f64> = pairs.iter().map(|p| p.0).collect();
            scores.sort_by(|a, b| a.partial_cmp(b).unwrap());
            scores.dedup();
            let acc = |thr: f64| {
                pairs.iter().filter(|&&(s, p)| (s <= thr) == p).count() as f64 / pairs.len() as f64
            };
            let (mut best_thr, mut best_acc) = (scores[0], acc(scores[0]));
            if scores.len() > 1 {
                best_acc = f64::NEG_INFINITY;
                for w in scores.windows(2) {
                    let thr = (w[0] + w[1]) / 2.0;
                    if acc(thr) > best_acc {
                        best_acc = acc(thr);
                        best_thr = thr;
                    }
                }
            }
            assert_eq!(picked.threshold, best_thr);
            assert_eq!(picked.accuracy, best_acc);
        }
    }

    #[test]
    fn labels_follow_threshold_sign() {
        let model = toy_model(&[1.0, -1.0, 0.5, -0.5, 0.25, -0.25, 2.0, -2.0]);
        let mut oracle = TargetOracle::new(model);
        let mut rng = SplitMix64::new(8);
        let validation: Vec<Triple> = (0..8).map(|i| Triple::new(i, 0, (i + 2) % 8)).collect();
        oracle.calibrate(&validation, &mut rng).unwrap();
        let calib = oracle.calibration().unwrap().clone();
        for _ in 0..10_000 {
            let t = Triple::new(rng.next_below(8) as u32, 0, rng.next_below(8) as u32);
            let score = oracle.score(t).unwrap();
            let label = oracle.label(t).unwrap();
            let expect = if score <= calib.threshold_for(0) {
                TripleLabel::Correct
            } else {
                TripleLabel::Corrupted
            };
            assert_eq!(label, expect);
        }
    }

    #[test]
    fn unseen_relation_uses_global_fallback() {
        let model = KgeModel::from_parts(
            ModelKind::DistMult,
            NormKind::L2,
            1,
            4,
            2,
            vec![1.0, -1.0, 0.5, -0.5],
            vec![],
            vec![1.0, 1.0],
            vec![],
            vec![],
        )
        .unwrap();
        let mut oracle = TargetOracle::new(model);
        let mut rng = SplitMix64::new(3);
        let validation: Vec<Triple> = (0..4).map(|i| Triple::new(i, 0, (i + 1) % 4)).collect();
        oracle.calibrate(&validation, &mut rng).unwrap();
        let calib = oracle.calibration().unwrap();
        assert!(!calib.per_relation.contains_key(&1));
        assert_eq!(calib.threshold_for(1), calib.global.threshold);
        oracle.label(Triple::new(0, 1, 1)).unwrap();
    }

    #[test]
    fn uncalibrated_label_errors() {
        let oracle = TargetOracle::new(toy_model(&[1.0, 2.0]));
        assert!(matches!(oracle.label(Triple::new(0, 0, 1)), Err(OracleError::NotCalibrated)));
    }

    #[test]
    fn label_everything_correct_gives_zero_overfit() {
        let model = toy_model(&[1.0, -1.0, 0.5, -0.5]);
        let calibration = Calibration {
            per_relation: BTreeMap::new(),
            global: RelationThreshold { threshold: f64::INFINITY, accuracy: 0.5 },
        };
        let oracle = TargetOracle::with_calibration(model, calibration);
        let train: Vec<Triple> = (0..4).map(|i| Triple::new(i, 0, (i + 1) % 4)).collect();
        let test: Vec<Triple> = (0..4).map(|i| Triple::new(i, 0, (i + 2) % 4)).collect();
        let mut rng = SplitMix64::new(6);
        let level = oracle.overfit_level(&train, &test, &mut rng).unwrap();
        assert_eq!(level, 0.0);
    }

    /// ComplEx construction whose train triples score exactly −1 while every
    /// corruption of them and every test-side triple scores exactly 0: train
    /// accuracy 1.0, test accuracy 0.5, overfit level exactly 0.5.
    #[test]
    fn memorized_train_random_test_gives_half_overfit() {
        let pairs = 16usize;
        let test_entities = 32usize;
        let n_e = 2 * pairs + test_entities;
        let dim = pairs;
        let mut entity_re = vec![0.0; n_e * dim];
        let mut entity_im = vec![0.0; n_e * dim];
        for i in 0..pairs {
            entity_re[(2 * i) * dim + i] = 1.0; // head_i = e_i (real axis)
            entity_im[(2 * i + 1) * dim + i] = 1.0; // tail_i = i·e_i
        }
        let relation_re = vec![0.0; dim];
        let relation_im = vec![1.0; dim]; // r = i·1
        let model = KgeModel::from_parts(
            ModelKind::ComplEx,
            NormKind::L2,
            dim,
            n_e,
            1,
            entity_re,
            entity_im,
            relation_re,
            relation_im,
            vec![],
        )
        .unwrap();
        let train: Vec<Triple> =
            (0..pairs as u32).map(|i| Triple::new(2 * i, 0, 2 * i + 1)).collect();
        let base = 2 * pairs as u32;
        let test: Vec<Triple> = (0..(test_entities as u32) / 2)
            .map(|i| Triple::new(base + 2 * i, 0, base + 2 * i + 1))
            .collect();
        for &t in &train {
            assert!((model.score(t).unwrap() + 1.0).abs() < 1e-12);
        }
        for &t in &test {
            assert_eq!(model.score(t).unwrap(), 0.0);
        }
        let mut oracle = TargetOracle::new(model);
        let mut rng = SplitMix64::new(12);
        oracle.calibrate(&train, &mut rng).unwrap();
        let level = oracle.overfit_level(&train, &test, &mut rng).unwrap();
        assert!((level - 0.5).abs() < 1e-9, "overfit level {level}");
    }

    #[test]
    fn untrained_model_has_no_overfit_signal() {
        // Random scores make train and test statistically indistinguishable;
        // the mean level over 5 seeds sits inside ±0.05.
        let mut levels = Vec::new();
        for seed in 0..5u64 {
            let model = KgeModel::init(ModelKind::DistMult, NormKind::L2, 8, 200, 3, seed);
            let mut oracle = TargetOracle::new(model);
            let mut rng = SplitMix64::new(seed ^ 0xF00D);
            let train: Vec<Triple> = (0..500)
                .map(|i| Triple::new((i * 3) % 200, i % 3, (i * 7 + 11) % 200))
                .collect();
            let test: Vec<Triple> = (0..500)
                .map(|i| Triple::new((i * 3 + 1) % 200, i % 3, (i * 7 + 87) % 200))
                .collect();
            oracle.calibrate(&train, &mut rng).unwrap();
            levels.push(oracle.overfit_level(&train, &test, &mut rng).unwrap());
        }
        let mean = levels.iter().sum::<f64>() / levels.len() as f64;
        assert!(mean.abs() <= 0.05, "mean overfit level {mean} from {levels:?}");
    }

    #[test]
    fn calibration_tsv_round_trip() {
        let mut per_relation = BTreeMap::new();
        per_relation.insert(0, RelationThreshold { threshold: -0.125, accuracy: 0.9375 });
        per_relation.insert(7, RelationThreshold { threshold: 2.5, accuracy: 0.75 });
        let calib = Calibration {
            per_relation,
            global: RelationThreshold { threshold: 0.0625, accuracy: 0.875 },
        };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("calib.tsv");
        save_calibration(&calib, &path).unwrap();
        let loaded = load_calibration(&path).unwrap();
        assert_eq!(calib, loaded);
    }

    #[test]
    fn empty_validation_is_rejected() {
        let mut oracle = TargetOracle::new(toy_model(&[1.0, 2.0]));
        let mut rng = SplitMix64::new(0);
        assert!(matches!(oracle.calibrate(&[], &mut rng), Err(OracleError::EmptyValidation)));
    }
}
