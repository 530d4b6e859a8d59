//! The four embedding models, their scores, losses, training, and storage.
//!
//! Scores follow a single convention: **lower means more plausible**.
//! Translation models (TransE, TransH) score with the raw translation
//! distance, which is non-negative; product models (DistMult, ComplEx)
//! score with the negated (real) trilinear product. The two training
//! objectives — margin ranking and logistic — both push positive-triple
//! scores below negative-triple scores under this convention.

mod grad;
mod io;
mod train;

pub use grad::{loss_logistic, loss_margin, pair_loss, pair_loss_gradients, score_gradients,
    GradMap, ParamKey, Table};
pub use io::{load_model, save_model, FORMAT_VERSION, MAGIC};
pub use train::{train, TrainedModel};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kg::Triple;
use crate::rng::SplitMix64;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("triple {triple} out of range for model with {n_entities} entities, {n_relations} relations")]
    IdOutOfRange {
        triple: Triple,
        n_entities: usize,
        n_relations: usize,
    },
    #[error("cannot train on an empty triple list")]
    EmptyTrainingSet,
    #[error("invalid training config: {0}")]
    BadConfig(String),
    #[error("non-finite loss at epoch {epoch}, batch {batch}")]
    NonFiniteLoss { epoch: usize, batch: usize },
    #[error("model file {path}: {reason}")]
    BadModelFile { path: String, reason: String },
    #[error("failed to access {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Which embedding model a table set belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    TransE,
    TransH,
    DistMult,
    ComplEx,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] =
        [ModelKind::TransE, ModelKind::TransH, ModelKind::DistMult, ModelKind::ComplEx];

    /// Translation models train with the margin objective, product models
    /// with the logistic objective.
    pub fn natural_loss(self) -> LossKind {
        match self {
            ModelKind::TransE | ModelKind::TransH => LossKind::Margin,
            ModelKind::DistMult | ModelKind::ComplEx => LossKind::Logistic,
        }
    }

    pub fn uses_norm(self) -> bool {
        matches!(self, ModelKind::TransE | ModelKind::TransH)
    }

    pub fn has_imaginary(self) -> bool {
        matches!(self, ModelKind::ComplEx)
    }

    pub fn has_relation_normal(self) -> bool {
        matches!(self, ModelKind::TransH)
    }

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::TransE => "transe",
            ModelKind::TransH => "transh",
            ModelKind::DistMult => "distmult",
            ModelKind::ComplEx => "complex",
        }
    }

    pub fn parse(s: &str) -> Option<ModelKind> {
        match s.to_ascii_lowercase().as_str() {
            "transe" => Some(ModelKind::TransE),
            "transh" => Some(ModelKind::TransH),
            "distmult" => Some(ModelKind::DistMult),
            "complex" => Some(ModelKind::ComplEx),
            _ => None,
        }
    }
}

/// Distance norm for the translation models.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormKind {
    L1,
    L2,
}

impl NormKind {
    pub fn name(self) -> &'static str {
        match self {
            NormKind::L1 => "l1",
            NormKind::L2 => "l2",
        }
    }

    pub fn parse(s: &str) -> Option<NormKind> {
        match s.to_ascii_lowercase().as_str() {
            "l1" => Some(NormKind::L1),
            "l2" => Some(NormKind::L2),
            _ => None,
        }
    }
}

/// Per-epoch norm constraint on entity rows (translation models only;
/// product models train unconstrained).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntityConstraint {
    /// Scale rows with L2 norm above 1 back to the unit sphere.
    Ball,
    /// Normalize every row to unit length, as in the original translation
    /// model training loops.
    Sphere,
}

impl EntityConstraint {
    pub fn name(self) -> &'static str {
        match self {
            EntityConstraint::Ball => "ball",
            EntityConstraint::Sphere => "sphere",
        }
    }

    pub fn parse(s: &str) -> Option<EntityConstraint> {
        match s.to_ascii_lowercase().as_str() {
            "ball" => Some(EntityConstraint::Ball),
            "sphere" => Some(EntityConstraint::Sphere),
            _ => None,
        }
    }
}

/// Training objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LossKind {
    Margin,
    Logistic,
}

impl LossKind {
    pub fn name(self) -> &'static str {
        match self {
            LossKind::Margin => "margin",
            LossKind::Logistic => "logistic",
        }
    }

    pub fn parse(s: &str) -> Option<LossKind> {
        match s.to_ascii_lowercase().as_str() {
            "margin" => Some(LossKind::Margin),
            "logistic" => Some(LossKind::Logistic),
            _ => None,
        }
    }
}

/// Hyperparameters for [`train`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub dim: usize,
    pub learning_rate: f64,
    /// Margin γ of the ranking loss; unused by the logistic objective.
    pub margin: f64,
    pub negatives_per_positive: usize,
    pub batch_size: usize,
    pub seed: u64,
    pub loss: LossKind,
    pub norm: NormKind,
    /// Entity norm constraint for translation models.
    pub entity_constraint: EntityConstraint,
    /// Worker threads. 1 is deterministic; >1 shards batches hogwild-style
    /// and forfeits determinism.
    pub jobs: usize,
}

impl TrainConfig {
    /// Defaults for a model kind: margin objective at lr 0.5 with γ=4 and
    /// the L1 norm for translation models, logistic at lr 0.05 for product
    /// models.
    pub fn for_kind(kind: ModelKind) -> Self {
        let loss = kind.natural_loss();
        TrainConfig {
            epochs: 100,
            dim: 32,
            learning_rate: match loss {
                LossKind::Margin => 0.5,
                LossKind::Logistic => 0.05,
            },
            margin: 4.0,
            negatives_per_positive: 1,
            batch_size: 128,
            seed: 42,
            loss,
            norm: NormKind::L1,
            entity_constraint: EntityConstraint::Sphere,
            jobs: 1,
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let mut problems = Vec::new();
        if self.epochs == 0 {
            problems.push("epochs must be positive");
        }
        if self.dim == 0 {
            problems.push("dim must be positive");
        }
        if !(self.learning_rate > 0.0) {
            problems.push("learning_rate must be positive");
        }
        if self.loss == LossKind::Margin && !(self.margin > 0.0) {
            problems.push("margin must be positive");
        }
        if self.negatives_per_positive == 0 {
            problems.push("negatives_per_positive must be positive");
        }
        if self.batch_size == 0 {
            problems.push("batch_size must be positive");
        }
        if self.jobs == 0 {
            problems.push("jobs must be positive");
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(ModelError::BadConfig(problems.join("; ")))
        }
    }
}

/// Embedding tables for one model.
///
/// All tables are row-major `f64`. `entity_im`/`relation_im` are empty
/// except for ComplEx; `relation_normal` (the per-relation hyperplane
/// normals) is empty except for TransH. The persisted format stores f32;
/// frozen models coming out of [`train`] are already rounded to that grid
/// so scores are identical before and after a save/load round trip.
#[derive(Debug, Clone, PartialEq)]
pub struct KgeModel {
    kind: ModelKind,
    norm: NormKind,
    dim: usize,
    n_entities: usize,
    n_relations: usize,
    pub(crate) entity_re: Vec<f64>,
    pub(crate) entity_im: Vec<f64>,
    pub(crate) relation_re: Vec<f64>,
    pub(crate) relation_im: Vec<f64>,
    pub(crate) relation_normal: Vec<f64>,
}

impl KgeModel {
    /// Random-initialized model: all tables uniform in
    /// `[-6/sqrt(dim), +6/sqrt(dim)]` under `seed`; TransH normals are then
    /// normalized to unit length.
    pub fn init(
        kind: ModelKind,
        norm: NormKind,
        dim: usize,
        n_entities: usize,
        n_relations: usize,
        seed: u64,
    ) -> Self {
        let bound = 6.0 / (dim as f64).sqrt();
        let mut rng = SplitMix64::new(seed);
        let mut table = |rows: usize| -> Vec<f64> {
            (0..rows * dim).map(|_| rng.next_range(-bound, bound)).collect()
        };
        let entity_re = table(n_entities);
        let relation_re = table(n_relations);
        let entity_im = if kind.has_imaginary() { table(n_entities) } else { Vec::new() };
        let relation_im = if kind.has_imaginary() { table(n_relations) } else { Vec::new() };
        let mut relation_normal =
            if kind.has_relation_normal() { table(n_relations) } else { Vec::new() };
        for row in relation_normal.chunks_mut(dim) {
            normalize_row(row);
        }
        KgeModel {
            kind,
            norm,
            dim,
            n_entities,
            n_relations,
            entity_re,
            entity_im,
            relation_re,
            relation_im,
            relation_normal,
        }
    }

    /// Assemble a model from explicit tables. Table lengths must match the
    /// declared shape.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        kind: ModelKind,
        norm: NormKind,
        dim: usize,
        n_entities: usize,
        n_relations: usize,
        entity_re: Vec<f64>,
        entity_im: Vec<f64>,
        relation_re: Vec<f64>,
        relation_im: Vec<f64>,
        relation_normal: Vec<f64>,
    ) -> Result<Self, ModelError> {
        let expect = |name: &str, got: usize, want: usize| -> Result<(), ModelError> {
            if got == want {
                Ok(())
            } else {
                Err(ModelError::BadConfig(format!("{name} has {got} values, expected {want}")))
            }
        };
        expect("entity_re", entity_re.len(), n_entities * dim)?;
        expect("relation_re", relation_re.len(), n_relations * dim)?;
        let im = if kind.has_imaginary() { dim } else { 0 };
        expect("entity_im", entity_im.len(), n_entities * im)?;
        expect("relation_im", relation_im.len(), n_relations * im)?;
        let wn = if kind.has_relation_normal() { dim } else { 0 };
        expect("relation_normal", relation_normal.len(), n_relations * wn)?;
        Ok(KgeModel {
            kind,
            norm,
            dim,
            n_entities,
            n_relations,
            entity_re,
            entity_im,
            relation_re,
            relation_im,
            relation_normal,
        })
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn norm(&self) -> NormKind {
        self.norm
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_entities(&self) -> usize {
        self.n_entities
    }

    pub fn n_relations(&self) -> usize {
        self.n_relations
    }

    pub fn check_ids(&self, triple: Triple) -> Result<(), ModelError> {
        if (triple.head as usize) < self.n_entities
            && (triple.tail as usize) < self.n_entities
            && (triple.relation as usize) < self.n_relations
        {
            Ok(())
        } else {
            Err(ModelError::IdOutOfRange {
                triple,
                n_entities: self.n_entities,
                n_relations: self.n_relations,
            })
        }
    }

    /// Plausibility score, lower = more plausible. See the module docs for
    /// the per-model formulas.
    pub fn score(&self, triple: Triple) -> Result<f64, ModelError> {
        self.check_ids(triple)?;
        Ok(self.score_unchecked(triple))
    }

    pub(crate) fn score_unchecked(&self, triple: Triple) -> f64 {
        let d = self.dim;
        let h = triple.head as usize * d;
        let r = triple.relation as usize * d;
        let t = triple.tail as usize * d;
        match self.kind {
            ModelKind::TransE => {
                let he = &self.entity_re[h..h + d];
                let re = &self.relation_re[r..r + d];
                let te = &self.entity_re[t..t + d];
                let mut acc = 0.0;
                match self.norm {
                    NormKind::L1 => {
                        for i in 0..d {
                            acc += (he[i] + re[i] - te[i]).abs();
                        }
                        acc
                    }
                    NormKind::L2 => {
                        for i in 0..d {
                            let v = he[i] + re[i] - te[i];
                            acc += v * v;
                        }
                        acc.sqrt()
                    }
                }
            }
            ModelKind::TransH => {
                let he = &self.entity_re[h..h + d];
                let re = &self.relation_re[r..r + d];
                let te = &self.entity_re[t..t + d];
                let w = &self.relation_normal[r..r + d];
                let wh: f64 = (0..d).map(|i| w[i] * he[i]).sum();
                let wt: f64 = (0..d).map(|i| w[i] * te[i]).sum();
                let mut acc = 0.0;
                match self.norm {
                    NormKind::L1 => {
                        for i in 0..d {
                            let v = (he[i] - wh * w[i]) + re[i] - (te[i] - wt * w[i]);
                            acc += v.abs();
                        }
                        acc
                    }
                    NormKind::L2 => {
                        for i in 0..d {
                            let v = (he[i] - wh * w[i]) + re[i] - (te[i] - wt * w[i]);
                            acc += v * v;
                        }
                        acc.sqrt()
                    }
                }
            }
            ModelKind::DistMult => {
                let he = &self.entity_re[h..h + d];
                let re = &self.relation_re[r..r + d];
                let te = &self.entity_re[t..t + d];
                let mut acc = 0.0;
                for i in 0..d {
                    acc += he[i] * re[i] * te[i];
                }
                -acc
            }
            ModelKind::ComplEx => {
                // -Re<h, r, conj(t)> with h=a+bi, r=c+di, t=e+fi.
                let (a, b) = (&self.entity_re[h..h + d], &self.entity_im[h..h + d]);
                let (c, dd) = (&self.relation_re[r..r + d], &self.relation_im[r..r + d]);
                let (e, f) = (&self.entity_re[t..t + d], &self.entity_im[t..t + d]);
                let mut acc = 0.0;
                for i in 0..d {
                    acc += a[i] * c[i] * e[i] + b[i] * c[i] * f[i] + a[i] * dd[i] * f[i]
                        - b[i] * dd[i] * e[i];
                }
                -acc
            }
        }
    }

    /// True when no table holds a NaN or infinity.
    pub fn all_finite(&self) -> bool {
        self.tables().iter().all(|t| t.iter().all(|v| v.is_finite()))
    }

    pub(crate) fn tables(&self) -> [&Vec<f64>; 5] {
        [
            &self.entity_re,
            &self.entity_im,
            &self.relation_re,
            &self.relation_im,
            &self.relation_normal,
        ]
    }

    /// Round every table to f32 precision, the storage grid of the model
    /// file. Applied when a trained model is frozen so in-memory scoring
    /// matches scoring after a save/load round trip.
    pub(crate) fn quantize_to_storage(&mut self) {
        for table in [
            &mut self.entity_re,
            &mut self.entity_im,
            &mut self.relation_re,
            &mut self.relation_im,
            &mut self.relation_normal,
        ] {
            for v in table.iter_mut() {
                *v = *v as f32 as f64;
            }
        }
    }

    /// Max L2 norm over entity rows (real part).
    pub fn max_entity_norm(&self) -> f64 {
        self.entity_re
            .chunks(self.dim)
            .map(|row| row.iter().map(|v| v * v).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }

    /// Max deviation of TransH normal rows from unit length. Zero for other
    /// kinds.
    pub fn max_normal_unit_error(&self) -> f64 {
        self.relation_normal
            .chunks(self.dim)
            .map(|row| (row.iter().map(|v| v * v).sum::<f64>().sqrt() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

pub(crate) fn normalize_row(row: &mut [f64]) {
    let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        for v in row.iter_mut() {
            *v /= norm;
        }
    } else {
        // Degenerate zero row: point along the first axis.
        row[0] = 1.0;
    }
}
