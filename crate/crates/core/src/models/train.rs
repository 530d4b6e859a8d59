//! Mini-batch SGD training for the four models.
//!
//! The single-threaded path is bit-reproducible from the config seed:
//! init, per-epoch shuffle, negative draws, and update order are all fixed.
//! With `jobs > 1` each epoch's batches are sharded across workers that
//! update the shared tables without synchronization (hogwild); throughput
//! scales, determinism is forfeited, and the result records that.
//!
//! Constraint schedule: TransH hyperplane normals are re-normalized after
//! every batch update; TransE/TransH entity rows are projected back to the
//! unit ball at the end of every epoch.

use std::cell::UnsafeCell;

use super::grad::{pair_loss_gradients, GradMap, Table};
use super::{normalize_row, EntityConstraint, KgeModel, ModelError, ModelKind, NormKind,
    TrainConfig};
use crate::kg::{Corruptor, Triple};
use crate::rng::{derive_seed, shuffle, SplitMix64};

/// A frozen model plus its training trace.
#[derive(Debug, Clone)]
pub struct TrainedModel {
    pub model: KgeModel,
    /// Mean pair loss per epoch, measured during the epoch.
    pub loss_curve: Vec<f64>,
    /// False when hogwild workers were used.
    pub deterministic: bool,
}

/// Train a model of `kind` on `triples` over vocabularies of the given
/// sizes. See the module docs for the exact schedule.
pub fn train(
    kind: ModelKind,
    triples: &[Triple],
    n_entities: usize,
    n_relations: usize,
    config: &TrainConfig,
) -> Result<TrainedModel, ModelError> {
    config.validate()?;
    if triples.is_empty() {
        return Err(ModelError::EmptyTrainingSet);
    }

    let mut model =
        KgeModel::init(kind, config.norm, config.dim, n_entities, n_relations, config.seed);
    for &t in triples {
        model.check_ids(t)?;
    }

    let mut order: Vec<Triple> = triples.to_vec();
    let mut shuffle_rng = SplitMix64::new(derive_seed(config.seed, 0x5348_5546)); // "SHUF"
    let mut loss_curve = Vec::with_capacity(config.epochs);

    for epoch in 0..config.epochs {
        shuffle(&mut order, &mut shuffle_rng);
        let epoch_seed = derive_seed(config.seed, 0x4550_0000 ^ epoch as u64); // "EP.."
        let mean_loss = if config.jobs <= 1 {
            run_epoch_serial(&mut model, &order, config, epoch, epoch_seed)?
        } else {
            run_epoch_hogwild(&mut model, &order, config, epoch, epoch_seed)?
        };
        if kind.uses_norm() {
            constrain_entities(&mut model, config.entity_constraint);
        }
        loss_curve.push(mean_loss);
    }

    if !model.all_finite() {
        return Err(ModelError::NonFiniteLoss { epoch: config.epochs, batch: 0 });
    }
    model.quantize_to_storage();
    Ok(TrainedModel { model, loss_curve, deterministic: config.jobs <= 1 })
}

fn run_epoch_serial(
    model: &mut KgeModel,
    order: &[Triple],
    config: &TrainConfig,
    epoch: usize,
    epoch_seed: u64,
) -> Result<f64, ModelError> {
    let mut rng = SplitMix64::new(epoch_seed);
    let mut corruptor = Corruptor::new(model.n_entities(), model.n_relations())
        .map_err(|e| ModelError::BadConfig(e.to_string()))?;
    let mut grads = GradMap::new(config.dim);
    let mut epoch_loss = 0.0;
    let mut epoch_pairs = 0usize;

    for (batch_idx, batch) in order.chunks(config.batch_size).enumerate() {
        grads.clear();
        let mut batch_loss = 0.0;
        let mut pairs = 0usize;
        for &pos in batch {
            for _ in 0..config.negatives_per_positive {
                let neg = corruptor.sample(pos, &mut rng).corrupted;
                batch_loss += pair_loss_gradients(
                    model,
                    pos,
                    neg,
                    config.loss,
                    config.margin,
                    1.0,
                    &mut grads,
                )?;
                pairs += 1;
            }
        }
        if !batch_loss.is_finite() {
            return Err(ModelError::NonFiniteLoss { epoch, batch: batch_idx });
        }
        apply_batch(model, &grads, config.learning_rate / pairs as f64);
        epoch_loss += batch_loss;
        epoch_pairs += pairs;
    }
    Ok(epoch_loss / epoch_pairs as f64)
}

fn apply_batch(model: &mut KgeModel, grads: &GradMap, scale: f64) {
    let dim = model.dim();
    for (&(table, row), grad) in grads.iter() {
        let base = row as usize * dim;
        let slice = &mut model.table_mut(table)[base..base + dim];
        for (v, g) in slice.iter_mut().zip(grad) {
            *v -= scale * g;
        }
        if table == Table::RelationNormal {
            normalize_row(slice);
        }
    }
}

/// Apply the configured entity-norm constraint.
fn constrain_entities(model: &mut KgeModel, constraint: EntityConstraint) {
    let dim = model.dim();
    for row in model.table_mut(Table::EntityRe).chunks_mut(dim) {
        let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
        let rescale = match constraint {
            EntityConstraint::Ball => norm > 1.0,
            EntityConstraint::Sphere => norm > 0.0,
        };
        if rescale {
            for v in row.iter_mut() {
                *v /= norm;
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Hogwild mode
// ---------------------------------------------------------------------------

/// Shared-table cell for hogwild workers. Workers create short-lived
/// references through the cell for score reads and row writes; concurrent
/// unsynchronized updates are the point, so torn or stale reads are
/// accepted, exactly as in the lock-free SGD literature.
struct HogwildCell<'a> {
    model: UnsafeCell<&'a mut KgeModel>,
}

unsafe impl Sync for HogwildCell<'_> {}

impl<'a> HogwildCell<'a> {
    fn new(model: &'a mut KgeModel) -> Self {
        HogwildCell { model: UnsafeCell::new(model) }
    }

    #[allow(clippy::mut_from_ref)]
    unsafe fn get(&self) -> &mut KgeModel {
        unsafe { &mut **self.model.get() }
    }
}

fn run_epoch_hogwild(
    model: &mut KgeModel,
    order: &[Triple],
    config: &TrainConfig,
    epoch: usize,
    epoch_seed: u64,
) -> Result<f64, ModelError> {
    let jobs = config.jobs.min(order.len()).max(1);
    let shard_len = order.len().div_ceil(jobs);
    let n_entities = model.n_entities();
    let n_relations = model.n_relations();
    let cell = HogwildCell::new(model);

    let results: Vec<Result<(f64, usize), ModelError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = order
            .chunks(shard_len)
            .enumerate()
            .map(|(worker, shard)| {
                let cell = &cell;
                scope.spawn(move || -> Result<(f64, usize), ModelError> {
                    let mut rng = SplitMix64::new(derive_seed(epoch_seed, worker as u64 + 1));
                    let mut corruptor = Corruptor::new(n_entities, n_relations)
                        .map_err(|e| ModelError::BadConfig(e.to_string()))?;
                    let mut grads = GradMap::new(config.dim);
                    let mut shard_loss = 0.0;
                    let mut shard_pairs = 0usize;
                    for (batch_idx, batch) in shard.chunks(config.batch_size).enumerate() {
                        grads.clear();
                        let mut batch_loss = 0.0;
                        let mut pairs = 0usize;
                        for &pos in batch {
                            for _ in 0..config.negatives_per_positive {
                                let neg = corruptor.sample(pos, &mut rng).corrupted;
                                // Racy read of the current tables.
                                let snapshot: &KgeModel = unsafe { cell.get() };
                                batch_loss += pair_loss_gradients(
                                    snapshot,
                                    pos,
                                    neg,
                                    config.loss,
                                    config.margin,
                                    1.0,
                                    &mut grads,
                                )?;
                                pairs += 1;
                            }
                        }
                        if !batch_loss.is_finite() {
                            return Err(ModelError::NonFiniteLoss { epoch, batch: batch_idx });
                        }
                        // Racy write of the update.
                        let tables: &mut KgeModel = unsafe { cell.get() };
                        apply_batch(tables, &grads, config.learning_rate / pairs as f64);
                        shard_loss += batch_loss;
                        shard_pairs += pairs;
                    }
                    Ok((shard_loss, shard_pairs))
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });

    let mut total_loss = 0.0;
    let mut total_pairs = 0usize;
    for r in results {
        let (l, p) = r?;
        total_loss += l;
        total_pairs += p;
    }
    Ok(total_loss / total_pairs as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kg::TripleStore;
    use crate::models::LossKind;

    fn cycle3() -> (Vec<Triple>, usize, usize) {
        // {(a,r,b), (b,r,c), (c,r,a)}
        (
            vec![Triple::new(0, 0, 1), Triple::new(1, 0, 2), Triple::new(2, 0, 0)],
            3,
            1,
        )
    }

    /// Every distinct single-slot entity corruption of the cycle triples.
    fn cycle3_corruptions(triples: &[Triple]) -> Vec<Triple> {
        let mut out = std::collections::BTreeSet::new();
        for &t in triples {
            for e in 0..3u32 {
                if e != t.head {
                    out.insert(Triple::new(e, t.relation, t.tail));
                }
                if e != t.tail {
                    out.insert(Triple::new(t.head, t.relation, e));
                }
            }
        }
        out.into_iter().filter(|t| !triples.contains(t)).collect()
    }

    #[test]
    fn transe_separates_cycle_from_corruptions() {
        // A directed 3-cycle admits no exact TransE embedding; separation
        // relies on the ranking pressure of several negatives per positive.
        let (triples, n_e, n_r) = cycle3();
        let mut cfg = TrainConfig::for_kind(ModelKind::TransE);
        cfg.dim = 16;
        cfg.epochs = 200;
        cfg.batch_size = 1;
        cfg.learning_rate = 0.05;
        cfg.margin = 1.0;
        cfg.negatives_per_positive = 5;
        let trained = train(ModelKind::TransE, &triples, n_e, n_r, &cfg).unwrap();
        let pos_mean: f64 = triples
            .iter()
            .map(|&t| trained.model.score(t).unwrap())
            .sum::<f64>()
            / triples.len() as f64;
        let corr = cycle3_corruptions(&triples);
        let neg_mean: f64 =
            corr.iter().map(|&t| trained.model.score(t).unwrap()).sum::<f64>() / corr.len() as f64;
        assert!(
            pos_mean < neg_mean,
            "train mean {pos_mean} should undercut corruption mean {neg_mean}"
        );
    }

    #[test]
    fn training_is_seed_deterministic() {
        let (triples, n_e, n_r) = cycle3();
        let mut cfg = TrainConfig::for_kind(ModelKind::ComplEx);
        cfg.epochs = 5;
        cfg.dim = 6;
        let a = train(ModelKind::ComplEx, &triples, n_e, n_r, &cfg).unwrap();
        let b = train(ModelKind::ComplEx, &triples, n_e, n_r, &cfg).unwrap();
        assert_eq!(a.model, b.model);
        assert_eq!(a.loss_curve, b.loss_curve);
        assert!(a.deterministic);
    }

    #[test]
    fn loss_curve_trends_down_on_real_sized_store() {
        let rows: Vec<(String, String, String)> = (0..120)
            .map(|i| {
                (format!("e{}", i % 30), format!("r{}", i / 30), format!("e{}", (i * 11 + 7) % 30))
            })
            .collect();
        let store = TripleStore::from_string_triples(&rows);
        assert!(store.len() >= 100);
        for loss in [LossKind::Margin, LossKind::Logistic] {
            let mut deltas = Vec::new();
            for seed in [1, 2, 3] {
                let kind =
                    if loss == LossKind::Margin { ModelKind::TransE } else { ModelKind::DistMult };
                let mut cfg = TrainConfig::for_kind(kind);
                cfg.seed = seed;
                cfg.epochs = 30;
                cfg.dim = 16;
                let trained =
                    train(kind, store.triples(), store.n_entities(), store.n_relations(), &cfg)
                        .unwrap();
                deltas.push(trained.loss_curve[0] - *trained.loss_curve.last().unwrap());
            }
            let mean_delta: f64 = deltas.iter().sum::<f64>() / deltas.len() as f64;
            assert!(mean_delta > 0.0, "{loss:?}: mean first-to-last loss drop {mean_delta}");
        }
    }

    #[test]
    fn entity_norms_projected_for_translation_models() {
        let (triples, n_e, n_r) = cycle3();
        for kind in [ModelKind::TransE, ModelKind::TransH] {
            let mut cfg = TrainConfig::for_kind(kind);
            cfg.epochs = 10;
            cfg.dim = 8;
            let trained = train(kind, &triples, n_e, n_r, &cfg).unwrap();
            assert!(trained.model.max_entity_norm() <= 1.0 + 1e-6);
        }
    }

    #[test]
    fn transh_normals_stay_unit() {
        let (triples, n_e, n_r) = cycle3();
        let mut cfg = TrainConfig::for_kind(ModelKind::TransH);
        cfg.epochs = 25;
        cfg.dim = 8;
        let trained = train(ModelKind::TransH, &triples, n_e, n_r, &cfg).unwrap();
        assert!(trained.model.max_normal_unit_error() < 1e-6);
    }

    #[test]
    fn empty_training_set_errors() {
        let cfg = TrainConfig::for_kind(ModelKind::TransE);
        assert!(matches!(
            train(ModelKind::TransE, &[], 2, 1, &cfg),
            Err(ModelError::EmptyTrainingSet)
        ));
    }

    #[test]
    fn out_of_range_triple_errors() {
        let cfg = TrainConfig::for_kind(ModelKind::TransE);
        let err = train(ModelKind::TransE, &[Triple::new(5, 0, 0)], 2, 1, &cfg);
        assert!(matches!(err, Err(ModelError::IdOutOfRange { .. })));
    }

    #[test]
    fn bad_config_rejected() {
        let (triples, n_e, n_r) = cycle3();
        let mut cfg = TrainConfig::for_kind(ModelKind::TransE);
        cfg.learning_rate = 0.0;
        assert!(matches!(
            train(ModelKind::TransE, &triples, n_e, n_r, &cfg),
            Err(ModelError::BadConfig(_))
        ));
    }

    #[test]
    fn hogwild_mode_trains_and_flags_nondeterminism() {
        let rows: Vec<(String, String, String)> = (0..200)
            .map(|i| (format!("e{}", i % 50), "r".to_string(), format!("e{}", (i * 3 + 1) % 50)))
            .collect();
        let store = TripleStore::from_string_triples(&rows);
        let mut cfg = TrainConfig::for_kind(ModelKind::TransE);
        cfg.epochs = 10;
        cfg.dim = 8;
        cfg.jobs = 2;
        let trained =
            train(ModelKind::TransE, store.triples(), store.n_entities(), store.n_relations(), &cfg)
                .unwrap();
        assert!(!trained.deterministic);
        assert!(trained.model.all_finite());
        assert!(trained.model.max_entity_norm() <= 1.0 + 1e-6);
    }
}
