//! Knowledge-graph-embedding training with a membership-inference attack
//! suite.
//!
//! The crate trains four standard embedding models (TransE, TransH,
//! DistMult, ComplEx) on triple datasets, freezes them behind a black-box
//! oracle exposing only plausibility scores and hard labels, and mounts
//! three membership inference attacks against that oracle:
//!
//! - **TA** — transfer attack: a shadow model trained on similar data
//!   labels its own train/test scores, an MLP learns the boundary, and the
//!   MLP is applied to target-model scores.
//! - **PLA** — prediction-loss attack: a triple is called a member when its
//!   loss under the target's scores is at or below the average loss of the
//!   queried candidate set.
//! - **PCA** — prediction-correctness attack: a triple is called a member
//!   when the target's hard label matches the triple's true label.
//!
//! Module map: [`kg`] datasets/splits/corruption, [`models`] embedding
//! models and training, [`oracle`] the black-box boundary, [`attacks`] the
//! three attacks, [`eval`] metrics/pipeline/ablations, [`rng`] the
//! documented deterministic generator.

pub mod attacks;
pub mod eval;
pub mod kg;
pub mod models;
pub mod oracle;
pub mod rng;
