//! The attack classifier: a small MLP over one scalar input.
//!
//! Architecture 1 → 64 → 64 → 1, rectifier hidden units, sigmoid output,
//! trained with binary cross-entropy by mini-batch gradient descent. The
//! input is a single plausibility score, so this is deliberately tiny; it
//! exists to learn an arbitrary (possibly non-monotone) decision rule over
//! the score axis.

use super::AttackError;
use crate::rng::{shuffle, SplitMix64};

#[derive(Debug, Clone)]
pub struct MlpConfig {
    pub hidden: usize,
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
    /// Z-score the input scores (fit-time statistics are stored in the
    /// classifier). Off by default; useful when shadow and target model
    /// families score on different scales.
    pub normalize: bool,
}

impl Default for MlpConfig {
    fn default() -> Self {
        MlpConfig {
            hidden: 64,
            learning_rate: 0.01,
            epochs: 200,
            batch_size: 128,
            seed: 42,
            normalize: false,
        }
    }
}

/// Fitted MLP. Decision rule: member iff probability ≥ 0.5 (logit ≥ 0);
/// exact ties count as member.
#[derive(Debug, Clone)]
pub struct AttackClassifier {
    hidden: usize,
    w1: Vec<f64>,
    b1: Vec<f64>,
    w2: Vec<f64>, // row-major [hidden][hidden]
    b2: Vec<f64>,
    w3: Vec<f64>,
    b3: f64,
    /// (mean, std) applied to inputs when fitted with normalization.
    normalization: Option<(f64, f64)>,
}

struct Gradients {
    w1: Vec<f64>,
    b1: Vec<f64>,
    w2: Vec<f64>,
    b2: Vec<f64>,
    w3: Vec<f64>,
    b3: f64,
}

impl Gradients {
    fn zeros(hidden: usize) -> Self {
        Gradients {
            w1: vec![0.0; hidden],
            b1: vec![0.0; hidden],
            w2: vec![0.0; hidden * hidden],
            b2: vec![0.0; hidden],
            w3: vec![0.0; hidden],
            b3: 0.0,
        }
    }

    fn clear(&mut self) {
        self.w1.iter_mut().for_each(|v| *v = 0.0);
        self.b1.iter_mut().for_each(|v| *v = 0.0);
        self.w2.iter_mut().for_each(|v| *v = 0.0);
        self.b2.iter_mut().for_each(|v| *v = 0.0);
        self.w3.iter_mut().for_each(|v| *v = 0.0);
        self.b3 = 0.0;
    }
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

fn bce_from_logit(logit: f64, y: f64) -> f64 {
    // softplus(logit) − y·logit, stable at both tails.
    logit.max(0.0) + (-logit.abs()).exp().ln_1p() - y * logit
}

impl AttackClassifier {
    fn init(hidden: usize, seed: u64) -> Self {
        let mut rng = SplitMix64::new(seed);
        let mut uniform = |fan_in: usize, fan_out: usize, n: usize| -> Vec<f64> {
            let bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
            (0..n).map(|_| rng.next_range(-bound, bound)).collect()
        };
        AttackClassifier {
            hidden,
            w1: uniform(1, hidden, hidden),
            b1: vec![0.0; hidden],
            w2: uniform(hidden, hidden, hidden * hidden),
            b2: vec![0.0; hidden],
            w3: uniform(hidden, 1, hidden),
            b3: 0.0,
            normalization: None,
        }
    }

    fn normalized(&self, x: f64) -> f64 {
        match self.normalization {
            Some((mean, std)) => (x - mean) / std,
            None => x,
        }
    }

    /// Raw output logit for one score.
    pub fn logit(&self, score: f64) -> f64 {
        let x = self.normalized(score);
        let h = self.hidden;
        let mut a1 = vec![0.0; h];
        for j in 0..h {
            a1[j] = (self.w1[j] * x + self.b1[j]).max(0.0);
        }
        let mut a2 = vec![0.0; h];
        for k in 0..h {
            let mut z = self.b2[k];
            let row = &self.w2[k * h..(k + 1) * h];
            for j in 0..h {
                z += row[j] * a1[j];
            }
            a2[k] = z.max(0.0);
        }
        let mut z3 = self.b3;
        for k in 0..h {
            z3 += self.w3[k] * a2[k];
        }
        z3
    }

    /// Membership probability for one score.
    pub fn probability(&self, score: f64) -> f64 {
        sigmoid(self.logit(score))
    }

    /// Decision: member iff probability ≥ 0.5.
    pub fn decide(&self, score: f64) -> bool {
        self.logit(score) >= 0.0
    }

    /// Fraction of `data` the fitted classifier labels correctly.
    pub fn accuracy(&self, data: &[(f64, u8)]) -> f64 {
        let hits = data.iter().filter(|&&(x, y)| self.decide(x) == (y == 1)).count();
        hits as f64 / data.len() as f64
    }

    /// Mean binary cross-entropy over `data`.
    pub fn mean_loss(&self, data: &[(f64, u8)]) -> f64 {
        let total: f64 =
            data.iter().map(|&(x, y)| bce_from_logit(self.logit(x), y as f64)).sum();
        total / data.len() as f64
    }

    /// Fit on `(score, label)` pairs. Returns the classifier and its final
    /// mean training loss. Requires both classes to be present.
    pub fn fit(data: &[(f64, u8)], config: &MlpConfig) -> Result<(Self, f64), AttackError> {
        if data.is_empty() {
            return Err(AttackError::EmptyAttackSide { side: "training" });
        }
        let n_pos = data.iter().filter(|&&(_, y)| y == 1).count();
        if n_pos == 0 || n_pos == data.len() {
            return Err(AttackError::SingleClass);
        }
        if config.hidden == 0 || config.epochs == 0 || config.batch_size == 0 {
            return Err(AttackError::BadConfig(
                "hidden, epochs, and batch_size must be positive".into(),
            ));
        }

        let mut clf = AttackClassifier::init(config.hidden, config.seed);
        if config.normalize {
            let mean = data.iter().map(|&(x, _)| x).sum::<f64>() / data.len() as f64;
            let var = data.iter().map(|&(x, _)| (x - mean) * (x - mean)).sum::<f64>()
                / data.len() as f64;
            clf.normalization = Some((mean, var.sqrt().max(1e-12)));
        }

        let h = config.hidden;
        let mut grads = Gradients::zeros(h);
        let mut order: Vec<(f64, u8)> = data.to_vec();
        let mut rng = SplitMix64::new(config.seed ^ 0x4D4C_5000); // "MLP"
        let mut a1 = vec![0.0; h];
        let mut a2 = vec![0.0; h];
        let mut delta2 = vec![0.0; h];
        let mut delta1 = vec![0.0; h];

        for _epoch in 0..config.epochs {
            shuffle(&mut order, &mut rng);
            for batch in order.chunks(config.batch_size) {
                grads.clear();
                for &(raw_x, y) in batch {
                    let x = clf.normalized(raw_x);
                    // Forward.
                    for j in 0..h {
                        a1[j] = (clf.w1[j] * x + clf.b1[j]).max(0.0);
                    }
                    for k in 0..h {
                        let mut z = clf.b2[k];
                        let row = &clf.w2[k * h..(k + 1) * h];
                        for j in 0..h {
                            z += row[j] * a1[j];
                        }
                        a2[k] = z.max(0.0);
                    }
                    let mut z3 = clf.b3;
                    for k in 0..h {
                        z3 += clf.w3[k] * a2[k];
                    }
                    // Backward.
                    let d3 = sigmoid(z3) - y as f64;
                    grads.b3 += d3;
                    for k in 0..h {
                        grads.w3[k] += d3 * a2[k];
                        delta2[k] = if a2[k] > 0.0 { d3 * clf.w3[k] } else { 0.0 };
                    }
                    for j in 0..h {
                        delta1[j] = 0.0;
                    }
                    for k in 0..h {
                        if delta2[k] == 0.0 {
                            continue;
                        }
                        let row = &clf.w2[k * h..(k + 1) * h];
                        let grow = &mut grads.w2[k * h..(k + 1) * h];
                        for j in 0..h {
                            grow[j] += delta2[k] * a1[j];
                            delta1[j] += delta2[k] * row[j];
                        }
                        grads.b2[k] += delta2[k];
                    }
                    for j in 0..h {
                        if a1[j] > 0.0 {
                            grads.w1[j] += delta1[j] * x;
                            grads.b1[j] += delta1[j];
                        }
                    }
                }
                let step = config.learning_rate / batch.len() as f64;
                for j in 0..h {
                    clf.w1[j] -= step * grads.w1[j];
                    clf.b1[j] -= step * grads.b1[j];
                    clf.b2[j] -= step * grads.b2[j];
                    clf.w3[j] -= step * grads.w3[j];
                }
                for i in 0..h * h {
                    clf.w2[i] -= step * grads.w2[i];
                }
                clf.b3 -= step * grads.b3;
            }
        }

        let final_loss = clf.mean_loss(data);
        Ok((clf, final_loss))
    }
}
