//! The end-to-end pipeline: split → train target → calibrate → attack →
//! metrics.
//!
//! All randomness is derived from the experiment seed through fixed stage
//! tags, so a report is reproducible from its config alone. The member
//! evaluation set is the target train split, the non-member set the target
//! test split, balanced by seeded down-sampling.

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::{compute_metrics, AttackReport, EvalError, Regime};
use crate::attacks::{
    pca_infer, pla_infer, ta_build_attack_set, ta_fit_with, ta_infer, AttackDecision, AttackKind,
    MembershipQuery, MlpConfig, PlaConfig, TaConfig,
};
use crate::kg::{make_split, SplitPlan, Triple, TripleStore};
use crate::models::{train, ModelKind, TrainConfig};
use crate::oracle::TargetOracle;
use crate::rng::{derive_seed, sample_indices, SplitMix64};

// Stage tags for seed derivation (see `rng::derive_seed`).
const TAG_TARGET_TRAIN: u64 = 1;
const TAG_CALIB_PICK: u64 = 2;
const TAG_CALIB_DRAWS: u64 = 3;
const TAG_SHADOW_TRAIN: u64 = 4;
const TAG_SHADOW_SPLIT: u64 = 5;
const TAG_ATTACK_SET: u64 = 6;
const TAG_MLP: u64 = 7;
const TAG_EVAL_BALANCE: u64 = 8;
const TAG_PLA: u64 = 9;
const TAG_OVERFIT: u64 = 10;

/// Everything a single attack run depends on. Serialized canonically into
/// the report fingerprint.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig {
    pub dataset: String,
    pub model: ModelKind,
    pub attack: AttackKind,
    pub train: TrainConfig,
    pub regime: Regime,
    /// TA: shadow architecture override (cross-model ablations).
    pub shadow_model: Option<ModelKind>,
    /// TA: name of the shadow dataset when it differs from the target's.
    pub shadow_dataset: Option<String>,
    /// TA: z-score attack-set scores before fitting the MLP.
    pub normalize_ta_scores: bool,
    pub pla: PlaConfigSer,
    pub seed: u64,
}

/// Serializable mirror of [`PlaConfig`] (kept separate so the attack module
/// stays independent of serde).
#[derive(Debug, Clone, Serialize)]
pub struct PlaConfigSer {
    pub metric: crate::models::LossKind,
    pub margin: f64,
    pub corruptions_per_candidate: usize,
}

impl From<&PlaConfigSer> for PlaConfig {
    fn from(c: &PlaConfigSer) -> Self {
        PlaConfig {
            metric: c.metric,
            margin: c.margin,
            corruptions_per_candidate: c.corruptions_per_candidate,
        }
    }
}

impl ExperimentConfig {
    pub fn new(dataset: &str, model: ModelKind, attack: AttackKind, seed: u64) -> Self {
        let mut train = TrainConfig::for_kind(model);
        train.seed = seed;
        ExperimentConfig {
            dataset: dataset.to_string(),
            model,
            attack,
            train,
            regime: Regime::Default,
            shadow_model: None,
            shadow_dataset: None,
            normalize_ta_scores: false,
            pla: PlaConfigSer {
                metric: crate::models::LossKind::Logistic,
                margin: 4.0,
                corruptions_per_candidate: 1,
            },
            seed,
        }
    }

    /// Hash of the canonical JSON serialization, truncated to 16 hex chars.
    pub fn fingerprint(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        let mut hasher = Sha256::new();
        hasher.update(json.as_bytes());
        let digest = hasher.finalize();
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    fn effective_shadow_model(&self) -> ModelKind {
        self.shadow_model.unwrap_or(self.model)
    }
}

/// The run's artifacts: the report plus everything needed for follow-up
/// diagnostics (decision export, histograms, recall identities).
pub struct ExperimentOutcome {
    pub report: AttackReport,
    pub decisions: Vec<AttackDecision>,
    pub truth: Vec<bool>,
    pub members: Vec<Triple>,
    pub non_members: Vec<Triple>,
    pub oracle: TargetOracle,
    pub split: SplitPlan,
}

/// Balanced members (train split) and non-members (test split),
/// down-sampling the larger side under `seed`.
fn balanced_candidates(split: &SplitPlan, seed: u64) -> (Vec<Triple>, Vec<Triple>) {
    let keep = split.target_train.len().min(split.target_test.len());
    let mut rng = SplitMix64::new(seed);
    let mut pick = |side: &[Triple]| -> Vec<Triple> {
        if side.len() == keep {
            side.to_vec()
        } else {
            sample_indices(side.len(), keep, &mut rng).into_iter().map(|i| side[i]).collect()
        }
    };
    let members = pick(&split.target_train);
    let non_members = pick(&split.target_test);
    (members, non_members)
}

/// Seeded 10% carve-out of the train split used as calibration validation.
fn calibration_carveout(train_split: &[Triple], seed: u64) -> Vec<Triple> {
    let k = (train_split.len() / 10).max(1);
    let mut rng = SplitMix64::new(seed);
    sample_indices(train_split.len(), k, &mut rng).into_iter().map(|i| train_split[i]).collect()
}

/// Run one experiment. `shadow_store` supplies the shadow dataset for
/// cross-dataset transfer attacks; `None` means the shadow halves of the
/// target store's own split, which is the standard protocol.
pub fn run_experiment(
    target_store: &TripleStore,
    shadow_store: Option<&TripleStore>,
    config: &ExperimentConfig,
) -> Result<ExperimentOutcome, EvalError> {
    if shadow_store.is_some() != config.shadow_dataset.is_some() {
        return Err(EvalError::BadExperimentConfig(
            "shadow_store and config.shadow_dataset must be supplied together".into(),
        ));
    }
    if config.attack != AttackKind::Ta
        && (config.shadow_model.is_some() || config.shadow_dataset.is_some())
    {
        return Err(EvalError::BadExperimentConfig(
            "shadow overrides only apply to transfer attacks".into(),
        ));
    }

    let split = make_split(target_store, config.seed)?;
    let epochs = config.regime.apply(config.train.epochs);

    // Target model.
    let mut target_cfg = config.train.clone();
    target_cfg.epochs = epochs;
    target_cfg.seed = derive_seed(config.seed, TAG_TARGET_TRAIN);
    let trained = train(
        config.model,
        &split.target_train,
        target_store.n_entities(),
        target_store.n_relations(),
        &target_cfg,
    )?;
    let mut deterministic = trained.deterministic;
    let mut oracle = TargetOracle::new(trained.model);

    // Owner-side threshold calibration on a train carve-out.
    let validation =
        calibration_carveout(&split.target_train, derive_seed(config.seed, TAG_CALIB_PICK));
    let mut calib_rng = SplitMix64::new(derive_seed(config.seed, TAG_CALIB_DRAWS));
    oracle.calibrate(&validation, &mut calib_rng)?;

    // Balanced evaluation candidates.
    let (members, non_members) =
        balanced_candidates(&split, derive_seed(config.seed, TAG_EVAL_BALANCE));
    let candidates: Vec<MembershipQuery> = members
        .iter()
        .chain(non_members.iter())
        .map(|&t| MembershipQuery::fact(t))
        .collect();
    let truth: Vec<bool> = members
        .iter()
        .map(|_| true)
        .chain(non_members.iter().map(|_| false))
        .collect();

    // Attack.
    let decisions = match config.attack {
        AttackKind::Ta => {
            let shadow_kind = config.effective_shadow_model();
            let mut shadow_cfg = if shadow_kind == config.model {
                config.train.clone()
            } else {
                // A different family keeps its own objective and step size
                // but shares the structural hyperparameters.
                let mut c = TrainConfig::for_kind(shadow_kind);
                c.dim = config.train.dim;
                c.batch_size = config.train.batch_size;
                c.negatives_per_positive = config.train.negatives_per_positive;
                c.jobs = config.train.jobs;
                c
            };
            shadow_cfg.epochs = epochs;
            shadow_cfg.seed = derive_seed(config.seed, TAG_SHADOW_TRAIN);

            // Shadow data: the target split's shadow halves, or the shadow
            // store's own split when the adversary uses another dataset.
            let foreign_split = match shadow_store {
                Some(store) => Some(make_split(store, derive_seed(config.seed, TAG_SHADOW_SPLIT))?),
                None => None,
            };
            let (shadow_train, shadow_test, sh_entities, sh_relations) = match &foreign_split {
                Some(fs) => {
                    let store = shadow_store.unwrap();
                    (&fs.shadow_train, &fs.shadow_test, store.n_entities(), store.n_relations())
                }
                None => (
                    &split.shadow_train,
                    &split.shadow_test,
                    target_store.n_entities(),
                    target_store.n_relations(),
                ),
            };

            let shadow_trained =
                train(shadow_kind, shadow_train, sh_entities, sh_relations, &shadow_cfg)?;
            deterministic &= shadow_trained.deterministic;
            let shadow_oracle = TargetOracle::new(shadow_trained.model);

            let mut set_rng = SplitMix64::new(derive_seed(config.seed, TAG_ATTACK_SET));
            let attack_set =
                ta_build_attack_set(&shadow_oracle, shadow_train, shadow_test, &mut set_rng)?;
            let ta_cfg = TaConfig {
                mlp: MlpConfig {
                    seed: derive_seed(config.seed, TAG_MLP),
                    normalize: config.normalize_ta_scores,
                    ..MlpConfig::default()
                },
            };
            let (classifier, _loss) = ta_fit_with(&attack_set, &ta_cfg)?;
            ta_infer(&classifier, &oracle, &candidates)?
        }
        AttackKind::Pla => {
            let mut pla_rng = SplitMix64::new(derive_seed(config.seed, TAG_PLA));
            pla_infer(
                &oracle,
                &candidates,
                &PlaConfig::from(&config.pla),
                target_store.n_entities(),
                target_store.n_relations(),
                &mut pla_rng,
            )?
        }
        AttackKind::Pca => pca_infer(&oracle, &candidates)?,
    };

    let metrics = compute_metrics(&decisions, &truth)?;
    let mut overfit_rng = SplitMix64::new(derive_seed(config.seed, TAG_OVERFIT));
    let overfit_level =
        oracle.overfit_level(&split.target_train, &split.target_test, &mut overfit_rng)?;

    let report = AttackReport {
        attack: config.attack,
        model: config.model,
        dataset: config.dataset.clone(),
        shadow_model: config.effective_shadow_model(),
        shadow_dataset: config.shadow_dataset.clone().unwrap_or_else(|| config.dataset.clone()),
        regime: config.regime,
        seed: config.seed,
        metrics,
        overfit_level,
        pla_metric: (config.attack == AttackKind::Pla).then_some(config.pla.metric),
        deterministic,
        fingerprint: config.fingerprint(),
        decisions_path: None,
    };

    Ok(ExperimentOutcome { report, decisions, truth, members, non_members, oracle, split })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::{synth_kg, SynthConfig};

    fn small_store() -> TripleStore {
        synth_kg(&SynthConfig {
            n_entities: 120,
            n_relations: 4,
            n_triples: 1200,
            seed: 7,
            degree_exponent: 0.5,
        })
        .unwrap()
    }

    fn quick_config(attack: AttackKind, seed: u64) -> ExperimentConfig {
        let mut cfg = ExperimentConfig::new("synth-small", ModelKind::TransE, attack, seed);
        cfg.train.dim = 12;
        cfg.train.epochs = 12;
        cfg
    }

    use crate::models::ModelKind;

    #[test]
    fn same_seed_reproduces_report_and_decisions() {
        let store = small_store();
        let cfg = quick_config(AttackKind::Pla, 11);
        let a = run_experiment(&store, None, &cfg).unwrap();
        let b = run_experiment(&store, None, &cfg).unwrap();
        assert_eq!(a.report.fingerprint, b.report.fingerprint);
        assert_eq!(a.report.metrics, b.report.metrics);
        assert_eq!(a.report.overfit_level, b.report.overfit_level);
        assert_eq!(a.decisions, b.decisions);
    }

    #[test]
    fn candidate_sets_are_balanced_and_disjoint() {
        let store = small_store();
        let cfg = quick_config(AttackKind::Pca, 3);
        let out = run_experiment(&store, None, &cfg).unwrap();
        assert_eq!(out.members.len(), out.non_members.len());
        let member_set: std::collections::HashSet<_> = out.members.iter().collect();
        assert!(out.non_members.iter().all(|t| !member_set.contains(t)));
        assert_eq!(out.truth.iter().filter(|&&b| b).count(), out.members.len());
    }

    #[test]
    fn pca_recall_equals_oracle_correct_rate_on_members() {
        let store = small_store();
        let mut cfg = quick_config(AttackKind::Pca, 5);
        cfg.regime = Regime::Overfit;
        let out = run_experiment(&store, None, &cfg).unwrap();
        let r_m = out.oracle.correct_rate(&out.members).unwrap();
        assert!((out.report.metrics.recall - r_m).abs() < 1e-15);
    }

    #[test]
    fn ta_runs_end_to_end() {
        let store = small_store();
        let mut cfg = quick_config(AttackKind::Ta, 9);
        cfg.train.epochs = 8;
        let out = run_experiment(&store, None, &cfg).unwrap();
        assert!(out.report.metrics.accuracy.is_finite());
        assert!(out.report.deterministic);
        assert_eq!(out.report.shadow_model, ModelKind::TransE);
        assert_eq!(out.report.shadow_dataset, "synth-small");
    }

    #[test]
    fn shadow_override_requires_matching_args() {
        let store = small_store();
        let mut cfg = quick_config(AttackKind::Ta, 9);
        cfg.shadow_dataset = Some("other".into());
        assert!(matches!(
            run_experiment(&store, None, &cfg),
            Err(EvalError::BadExperimentConfig(_))
        ));
        let mut cfg = quick_config(AttackKind::Pla, 9);
        cfg.shadow_model = Some(ModelKind::ComplEx);
        assert!(matches!(
            run_experiment(&store, None, &cfg),
            Err(EvalError::BadExperimentConfig(_))
        ));
    }

    #[test]
    fn fingerprint_tracks_config_changes() {
        let a = quick_config(AttackKind::Ta, 1).fingerprint();
        let mut cfg = quick_config(AttackKind::Ta, 1);
        cfg.train.learning_rate += 0.1;
        assert_ne!(a, cfg.fingerprint());
        assert_eq!(a, quick_config(AttackKind::Ta, 1).fingerprint());
    }
}
