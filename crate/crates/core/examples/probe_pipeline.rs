use kgmia_core::attacks::AttackKind;
use kgmia_core::eval::{run_experiment, synth_kg, ExperimentConfig, Regime, SynthConfig};
use kgmia_core::models::{LossKind, ModelKind};
use std::time::Instant;

fn tuned(kind: ModelKind, seed: u64) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new("synth", kind, AttackKind::Ta, seed);
    cfg.train.dim = 64;
    cfg.train.epochs = 100;
    cfg.regime = Regime::Overfit;
    match kind {
        ModelKind::TransE | ModelKind::TransH => {
            cfg.train.margin = 2.0;
            cfg.train.negatives_per_positive = 2;
        }
        _ => cfg.train.learning_rate = 0.2,
    }
    cfg
}

fn main() {
    let store = synth_kg(&SynthConfig::default()).unwrap();
    // TransE boosters
    for (label, negs, dim, ep) in
        [("negs5", 5usize, 64usize, 100usize), ("negs5-dim100", 5, 100, 100), ("negs2-ep150", 2, 64, 150), ("negs5-ep150", 5, 64, 150)]
    {
        let t0 = Instant::now();
        let mut accs = vec![];
        for seed in [42u64, 43, 44] {
            let mut cfg = tuned(ModelKind::TransE, seed);
            cfg.train.negatives_per_positive = negs;
            cfg.train.dim = dim;
            cfg.train.epochs = ep;
            accs.push(run_experiment(&store, None, &cfg).unwrap().report.metrics.accuracy);
        }
        println!("transe {label}: mean {:.3} {:?} | {:.0?}", accs.iter().sum::<f64>()/3.0,
            accs.iter().map(|a| (a*1000.0).round()/1000.0).collect::<Vec<_>>(), t0.elapsed());
    }
    // ComplEx lr trim + PLA gap
    for lr in [0.15f64, 0.2] {
        let mut ta = vec![]; let mut pla = vec![];
        for seed in [42u64, 43, 44] {
            let mut cfg = tuned(ModelKind::ComplEx, seed);
            cfg.train.learning_rate = lr;
            ta.push(run_experiment(&store, None, &cfg).unwrap().report.metrics.accuracy);
            let mut c2 = cfg.clone(); c2.attack = AttackKind::Pla; c2.pla.metric = LossKind::Logistic;
            pla.push(run_experiment(&store, None, &c2).unwrap().report.metrics.accuracy);
        }
        let mta = ta.iter().sum::<f64>()/3.0; let mpla = pla.iter().sum::<f64>()/3.0;
        println!("complex lr={lr}: TA {:.3} PLA {:.3} gap {:.3}", mta, mpla, mta - mpla);
    }
    // criterion 8 cells
    let cells: [(ModelKind, ModelKind); 6] = [
        (ModelKind::TransE, ModelKind::TransH),   // same family off-diag
        (ModelKind::DistMult, ModelKind::ComplEx),// same family off-diag
        (ModelKind::TransE, ModelKind::DistMult), // cross
        (ModelKind::TransE, ModelKind::ComplEx),  // cross
        (ModelKind::DistMult, ModelKind::TransE), // cross
        (ModelKind::ComplEx, ModelKind::TransH),  // cross
    ];
    for (target, shadow) in cells {
        let mut accs = vec![];
        for seed in [42u64, 43, 44] {
            let mut cfg = tuned(target, seed);
            cfg.shadow_model = Some(shadow);
            accs.push(run_experiment(&store, None, &cfg).unwrap().report.metrics.accuracy);
        }
        println!("target {:<9} shadow {:<9}: mean {:.3} {:?}", target.name(), shadow.name(),
            accs.iter().sum::<f64>()/3.0, accs.iter().map(|a| (a*1000.0).round()/1000.0).collect::<Vec<_>>());
    }
}
