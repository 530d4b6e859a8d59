//! Score and loss gradients for SGD training.
//!
//! Gradients are accumulated sparsely into a [`GradMap`] keyed by
//! `(table, row)`. The map is ordered so updates apply in a fixed order,
//! which keeps single-threaded training bit-reproducible.

use std::collections::BTreeMap;

use super::{KgeModel, LossKind, ModelError, ModelKind, NormKind};
use crate::kg::Triple;

/// Which embedding table a parameter row lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Table {
    EntityRe,
    EntityIm,
    RelationRe,
    RelationIm,
    RelationNormal,
}

impl Table {
    pub const ALL: [Table; 5] = [
        Table::EntityRe,
        Table::EntityIm,
        Table::RelationRe,
        Table::RelationIm,
        Table::RelationNormal,
    ];
}

/// `(table, row)` address of one embedding vector.
pub type ParamKey = (Table, u32);

/// Sparse per-row gradient accumulator.
#[derive(Debug)]
pub struct GradMap {
    dim: usize,
    rows: BTreeMap<ParamKey, Vec<f64>>,
}

impl GradMap {
    pub fn new(dim: usize) -> Self {
        GradMap { dim, rows: BTreeMap::new() }
    }

    pub fn clear(&mut self) {
        self.rows.clear();
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn row_mut(&mut self, key: ParamKey) -> &mut [f64] {
        self.rows.entry(key).or_insert_with(|| vec![0.0; self.dim])
    }

    pub fn get(&self, key: ParamKey) -> Option<&[f64]> {
        self.rows.get(&key).map(|v| v.as_slice())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ParamKey, &[f64])> {
        self.rows.iter().map(|(k, v)| (k, v.as_slice()))
    }
}

impl KgeModel {
    /// Read-only view of one table.
    pub fn table(&self, table: Table) -> &[f64] {
        match table {
            Table::EntityRe => &self.entity_re,
            Table::EntityIm => &self.entity_im,
            Table::RelationRe => &self.relation_re,
            Table::RelationIm => &self.relation_im,
            Table::RelationNormal => &self.relation_normal,
        }
    }

    /// Mutable view of one table. The model is the owner-side artifact;
    /// invariants are re-established by the trainer, not enforced here.
    pub fn table_mut(&mut self, table: Table) -> &mut [f64] {
        match table {
            Table::EntityRe => &mut self.entity_re,
            Table::EntityIm => &mut self.entity_im,
            Table::RelationRe => &mut self.relation_re,
            Table::RelationIm => &mut self.relation_im,
            Table::RelationNormal => &mut self.relation_normal,
        }
    }
}

/// Margin ranking loss: `max(γ + S(pos) − S(neg), 0)`.
pub fn loss_margin(
    model: &KgeModel,
    positive: Triple,
    negative: Triple,
    margin: f64,
) -> Result<f64, ModelError> {
    let sp = model.score(positive)?;
    let sn = model.score(negative)?;
    Ok((margin + sp - sn).max(0.0))
}

/// Logistic loss: `softplus(S(pos)) + softplus(−S(neg))`, numerically
/// stable for large |scores|.
pub fn loss_logistic(
    model: &KgeModel,
    positive: Triple,
    negative: Triple,
) -> Result<f64, ModelError> {
    let sp = model.score(positive)?;
    let sn = model.score(negative)?;
    Ok(softplus(sp) + softplus(-sn))
}

pub(crate) fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

pub(crate) fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Loss value for one (positive, negative) pair under `loss`.
pub fn pair_loss(
    model: &KgeModel,
    positive: Triple,
    negative: Triple,
    loss: LossKind,
    margin: f64,
) -> Result<f64, ModelError> {
    match loss {
        LossKind::Margin => loss_margin(model, positive, negative, margin),
        LossKind::Logistic => loss_logistic(model, positive, negative),
    }
}

/// Accumulate `weight · ∂loss/∂θ` for one pair into `acc` and return the
/// pair's loss value. Positive and negative may share rows; contributions
/// sum.
pub fn pair_loss_gradients(
    model: &KgeModel,
    positive: Triple,
    negative: Triple,
    loss: LossKind,
    margin: f64,
    weight: f64,
    acc: &mut GradMap,
) -> Result<f64, ModelError> {
    model.check_ids(positive)?;
    model.check_ids(negative)?;
    let sp = model.score_unchecked(positive);
    let sn = model.score_unchecked(negative);
    match loss {
        LossKind::Margin => {
            let value = margin + sp - sn;
            if value > 0.0 {
                score_gradients(model, positive, weight, acc);
                score_gradients(model, negative, -weight, acc);
            }
            Ok(value.max(0.0))
        }
        LossKind::Logistic => {
            score_gradients(model, positive, weight * sigmoid(sp), acc);
            score_gradients(model, negative, -weight * sigmoid(-sn), acc);
            Ok(softplus(sp) + softplus(-sn))
        }
    }
}

/// Accumulate `weight · ∂S(triple)/∂θ` into `acc`.
///
/// Ids must already be validated. The TransH normal gradient treats the
/// normal vector as a free parameter; re-normalization is a separate
/// projection step in the trainer.
pub fn score_gradients(model: &KgeModel, triple: Triple, weight: f64, acc: &mut GradMap) {
    let d = model.dim();
    let hi = triple.head;
    let ri = triple.relation;
    let ti = triple.tail;
    let h = hi as usize * d;
    let r = ri as usize * d;
    let t = ti as usize * d;

    match model.kind() {
        ModelKind::TransE => {
            let he = &model.entity_re[h..h + d];
            let re = &model.relation_re[r..r + d];
            let te = &model.entity_re[t..t + d];
            let diff: Vec<f64> = (0..d).map(|i| he[i] + re[i] - te[i]).collect();
            let g = distance_grad(&diff, model.norm());
            add(acc.row_mut((Table::EntityRe, hi)), &g, weight);
            add(acc.row_mut((Table::RelationRe, ri)), &g, weight);
            add(acc.row_mut((Table::EntityRe, ti)), &g, -weight);
        }
        ModelKind::TransH => {
            let he = &model.entity_re[h..h + d];
            let re = &model.relation_re[r..r + d];
            let te = &model.entity_re[t..t + d];
            let w = &model.relation_normal[r..r + d];
            let wh: f64 = (0..d).map(|i| w[i] * he[i]).sum();
            let wt: f64 = (0..d).map(|i| w[i] * te[i]).sum();
            let diff: Vec<f64> =
                (0..d).map(|i| (he[i] - wh * w[i]) + re[i] - (te[i] - wt * w[i])).collect();
            let g = distance_grad(&diff, model.norm());
            let gw: f64 = (0..d).map(|i| g[i] * w[i]).sum();
            // ∂S/∂h = g − (g·w) w ; ∂S/∂t is its negation.
            let proj: Vec<f64> = (0..d).map(|i| g[i] - gw * w[i]).collect();
            add(acc.row_mut((Table::EntityRe, hi)), &proj, weight);
            add(acc.row_mut((Table::RelationRe, ri)), &g, weight);
            add(acc.row_mut((Table::EntityRe, ti)), &proj, -weight);
            // ∂S/∂w = (g·w)(t − h) + (w·(t − h)) g.
            let wu = wt - wh;
            let wrow = acc.row_mut((Table::RelationNormal, ri));
            for i in 0..d {
                wrow[i] += weight * (gw * (te[i] - he[i]) + wu * g[i]);
            }
        }
        ModelKind::DistMult => {
            let he = &model.entity_re[h..h + d];
            let re = &model.relation_re[r..r + d];
            let te = &model.entity_re[t..t + d];
            {
                let row = acc.row_mut((Table::EntityRe, hi));
                for i in 0..d {
                    row[i] += weight * (-re[i] * te[i]);
                }
            }
            {
                let row = acc.row_mut((Table::RelationRe, ri));
                for i in 0..d {
                    row[i] += weight * (-he[i] * te[i]);
                }
            }
            {
                let row = acc.row_mut((Table::EntityRe, ti));
                for i in 0..d {
                    row[i] += weight * (-he[i] * re[i]);
                }
            }
        }
        ModelKind::ComplEx => {
            // S = −Σ (a c e + b c f + a d f − b d e), h=a+bi, r=c+di, t=e+fi.
            let a = &model.entity_re[h..h + d];
            let b = &model.entity_im[h..h + d];
            let c = &model.relation_re[r..r + d];
            let dd = &model.relation_im[r..r + d];
            let e = &model.entity_re[t..t + d];
            let f = &model.entity_im[t..t + d];
            {
                let row = acc.row_mut((Table::EntityRe, hi));
                for i in 0..d {
                    row[i] += weight * -(c[i] * e[i] + dd[i] * f[i]);
                }
            }
            {
                let row = acc.row_mut((Table::EntityIm, hi));
                for i in 0..d {
                    row[i] += weight * -(c[i] * f[i] - dd[i] * e[i]);
                }
            }
            {
                let row = acc.row_mut((Table::RelationRe, ri));
                for i in 0..d {
                    row[i] += weight * -(a[i] * e[i] + b[i] * f[i]);
                }
            }
            {
                let row = acc.row_mut((Table::RelationIm, ri));
                for i in 0..d {
                    row[i] += weight * -(a[i] * f[i] - b[i] * e[i]);
                }
            }
            {
                let row = acc.row_mut((Table::EntityRe, ti));
                for i in 0..d {
                    row[i] += weight * -(a[i] * c[i] - b[i] * dd[i]);
                }
            }
            {
                let row = acc.row_mut((Table::EntityIm, ti));
                for i in 0..d {
                    row[i] += weight * -(a[i] * dd[i] + b[i] * c[i]);
                }
            }
        }
    }
}

fn distance_grad(diff: &[f64], norm: NormKind) -> Vec<f64> {
    match norm {
        NormKind::L1 => diff
            .iter()
            .map(|v| if *v == 0.0 { 0.0 } else { v.signum() })
            .collect(),
        NormKind::L2 => {
            let len = diff.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-12);
            diff.iter().map(|v| v / len).collect()
        }
    }
}

fn add(row: &mut [f64], g: &[f64], weight: f64) {
    for (ri, gi) in row.iter_mut().zip(g) {
        *ri += weight * gi;
    }
}
