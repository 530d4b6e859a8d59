//! Ablation grids: vary the shadow dataset or the shadow architecture
//! against a fixed target definition.
//!
//! Each cell is a complete, independent experiment under its own derived
//! seed (`derive_seed(grid seed, cell index)`), so cells can run in
//! parallel and any single cell can be reproduced with `run_experiment`
//! from the config recorded in its report. A failed cell records its error
//! string; the grid always completes.

use super::experiment::{run_experiment, ExperimentConfig};
use super::AttackReport;
use crate::attacks::AttackKind;
use crate::kg::TripleStore;
use crate::models::ModelKind;
use crate::rng::derive_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AblationAxis {
    ShadowDataset,
    ShadowModel,
}

impl AblationAxis {
    pub fn name(self) -> &'static str {
        match self {
            AblationAxis::ShadowDataset => "shadow-dataset",
            AblationAxis::ShadowModel => "shadow-model",
        }
    }
}

/// Grid definition: one fixed target, one varying shadow axis.
pub struct AblationSpec<'a> {
    pub axis: AblationAxis,
    pub target_dataset: (&'a str, &'a TripleStore),
    pub target_model: ModelKind,
    /// Cells of the dataset axis; the target store may be among them.
    pub shadow_datasets: Vec<(&'a str, &'a TripleStore)>,
    /// Cells of the model axis.
    pub shadow_models: Vec<ModelKind>,
    /// Template config; per-cell configs derive from it (seed, overrides).
    pub base: ExperimentConfig,
    /// Worker threads for cell execution.
    pub jobs: usize,
}

#[derive(Debug, Clone)]
pub struct AblationCell {
    /// What varies in this cell (dataset name or model name).
    pub shadow_label: String,
    pub seed: u64,
    pub report: Result<AttackReport, String>,
}

#[derive(Debug, Clone)]
pub struct AblationGrid {
    pub axis: AblationAxis,
    pub target_dataset: String,
    pub target_model: ModelKind,
    pub cells: Vec<AblationCell>,
}

pub fn run_ablation(spec: &AblationSpec<'_>) -> AblationGrid {
    let cell_count = match spec.axis {
        AblationAxis::ShadowDataset => spec.shadow_datasets.len(),
        AblationAxis::ShadowModel => spec.shadow_models.len(),
    };

    let run_cell = |index: usize| -> AblationCell {
        let seed = derive_seed(spec.base.seed, index as u64);
        let mut cfg = spec.base.clone();
        cfg.dataset = spec.target_dataset.0.to_string();
        cfg.model = spec.target_model;
        cfg.attack = AttackKind::Ta;
        cfg.seed = seed;

        let (label, shadow_store) = match spec.axis {
            AblationAxis::ShadowDataset => {
                let (name, store) = spec.shadow_datasets[index];
                if name != spec.target_dataset.0 {
                    cfg.shadow_dataset = Some(name.to_string());
                    (name.to_string(), Some(store))
                } else {
                    (name.to_string(), None)
                }
            }
            AblationAxis::ShadowModel => {
                let kind = spec.shadow_models[index];
                if kind != spec.target_model {
                    cfg.shadow_model = Some(kind);
                }
                (kind.name().to_string(), None)
            }
        };

        let report = run_experiment(spec.target_dataset.1, shadow_store, &cfg)
            .map(|outcome| outcome.report)
            .map_err(|e| e.to_string());
        AblationCell { shadow_label: label, seed, report }
    };

    let cells: Vec<AblationCell> = if spec.jobs <= 1 || cell_count <= 1 {
        (0..cell_count).map(run_cell).collect()
    } else {
        // Fan the cells over a bounded worker pool; order restored by index.
        let slots = std::sync::Mutex::new(vec![None; cell_count]);
        let next = std::sync::atomic::AtomicUsize::new(0);
        std::thread::scope(|scope| {
            for _ in 0..spec.jobs.min(cell_count) {
                scope.spawn(|| loop {
                    let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                    if i >= cell_count {
                        break;
                    }
                    let cell = run_cell(i);
                    slots.lock().unwrap()[i] = Some(cell);
                });
            }
        });
        slots.into_inner().unwrap().into_iter().map(|c| c.expect("all cells ran")).collect()
    };

    AblationGrid {
        axis: spec.axis,
        target_dataset: spec.target_dataset.0.to_string(),
        target_model: spec.target_model,
        cells,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::{synth_kg, SynthConfig};

    fn store(seed: u64) -> TripleStore {
        synth_kg(&SynthConfig {
            n_entities: 100,
            n_relations: 3,
            n_triples: 800,
            seed,
            degree_exponent: 0.5,
        })
        .unwrap()
    }

    fn base_config() -> ExperimentConfig {
        let mut cfg = ExperimentConfig::new("a", ModelKind::TransE, AttackKind::Ta, 21);
        cfg.train.dim = 10;
        cfg.train.epochs = 6;
        cfg
    }

    #[test]
    fn diagonal_cell_reproduces_run_experiment() {
        let a = store(1);
        let b = store(2);
        let spec = AblationSpec {
            axis: AblationAxis::ShadowDataset,
            target_dataset: ("a", &a),
            target_model: ModelKind::TransE,
            shadow_datasets: vec![("a", &a), ("b", &b)],
            shadow_models: vec![],
            base: base_config(),
            jobs: 1,
        };
        let grid = run_ablation(&spec);
        assert_eq!(grid.cells.len(), 2);
        let diag = grid.cells[0].report.as_ref().unwrap();

        // Rebuild the diagonal cell's config and run it directly.
        let mut cfg = base_config();
        cfg.seed = grid.cells[0].seed;
        let direct = run_experiment(&a, None, &cfg).unwrap().report;
        assert_eq!(diag.metrics, direct.metrics);
        assert_eq!(diag.overfit_level, direct.overfit_level);
        assert_eq!(diag.fingerprint, direct.fingerprint);
    }

    #[test]
    fn model_axis_covers_requested_kinds() {
        let a = store(1);
        let spec = AblationSpec {
            axis: AblationAxis::ShadowModel,
            target_dataset: ("a", &a),
            target_model: ModelKind::TransE,
            shadow_datasets: vec![],
            shadow_models: vec![ModelKind::TransE, ModelKind::TransH],
            base: base_config(),
            jobs: 1,
        };
        let grid = run_ablation(&spec);
        let labels: Vec<&str> = grid.cells.iter().map(|c| c.shadow_label.as_str()).collect();
        assert_eq!(labels, vec!["transe", "transh"]);
        for cell in &grid.cells {
            let report = cell.report.as_ref().unwrap();
            assert_eq!(report.model, ModelKind::TransE);
        }
        assert_eq!(grid.cells[1].report.as_ref().unwrap().shadow_model, ModelKind::TransH);
    }

    #[test]
    fn failed_cell_is_recorded_and_grid_completes() {
        let a = store(1);
        // A store too small to split: forces a cell error.
        let tiny = TripleStore::from_string_triples(&[("x", "r", "y"), ("y", "r", "z")]);
        let spec = AblationSpec {
            axis: AblationAxis::ShadowDataset,
            target_dataset: ("a", &a),
            target_model: ModelKind::TransE,
            shadow_datasets: vec![("tiny", &tiny), ("a", &a)],
            shadow_models: vec![],
            base: base_config(),
            jobs: 1,
        };
        let grid = run_ablation(&spec);
        assert!(grid.cells[0].report.is_err());
        assert!(grid.cells[1].report.is_ok());
    }

    #[test]
    fn parallel_cells_match_serial_cells() {
        let a = store(1);
        let spec = |jobs: usize| AblationSpec {
            axis: AblationAxis::ShadowModel,
            target_dataset: ("a", &a),
            target_model: ModelKind::TransE,
            shadow_datasets: vec![],
            shadow_models: vec![ModelKind::TransE, ModelKind::TransH, ModelKind::DistMult],
            base: base_config(),
            jobs,
        };
        let serial = run_ablation(&spec(1));
        let parallel = run_ablation(&spec(3));
        for (s, p) in serial.cells.iter().zip(&parallel.cells) {
            assert_eq!(s.seed, p.seed);
            assert_eq!(
                s.report.as_ref().unwrap().metrics,
                p.report.as_ref().unwrap().metrics
            );
        }
    }
}
