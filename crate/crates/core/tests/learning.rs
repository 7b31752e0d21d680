use laserphm::models::{train_detector, train_rul, DEFAULT_TAU_FRACTION};
use laserphm::nn::{
    adam_step, Activation, AdamConfig, AdamState, Architecture, Gradients, LstmNetwork,
    NetworkMeta, Readout, Target, CLIP_NORM,
};
use laserphm::preprocess::build_feature_windows;
use laserphm::rng::rng_from_seed;
use laserphm::sim::{generate_dataset, DegradationMode, ModeCounts};
use laserphm::{FeatureWindow, SgFilterSpec, TrainConfig};
use rand::Rng;

fn windows(counts: ModeCounts, seed: u64) -> Vec<FeatureWindow> {
    let data = generate_dataset(counts, seed).unwrap();
    build_feature_windows(&data, SgFilterSpec::default(), DEFAULT_TAU_FRACTION).unwrap()
}

fn small_config(epochs: usize) -> TrainConfig {
    TrainConfig {
        epochs,
        batch_size: 8,
        learning_rate: 5e-3,
        seed: 9,
        train_fraction: 0.75,
    }
}

#[test]
fn memorizes_ten_examples() {
    let arch = Architecture {
        input_dim: 4,
        hidden_dims: vec![16],
        output_dim: 3,
        activation: Activation::Softmax,
        readout: Readout::Final,
    };
    let meta = NetworkMeta {
        purpose: "memorize".into(),
        input_channels: Vec::new(),
    };
    let mut net = LstmNetwork::new(&arch, meta, 1).unwrap();
    let mut rng = rng_from_seed(2);
    let steps = 10;
    let examples: Vec<(Vec<f64>, Target)> = (0..10)
        .map(|i| {
            let x = (0..steps * 4).map(|_| rng.random_range(0.0..1.0)).collect();
            (x, Target::Class(i % 3))
        })
        .collect();
    let mut state = AdamState::new(
        &net,
        AdamConfig {
            learning_rate: 1e-2,
            ..AdamConfig::default()
        },
    );
    let mut loss = f64::INFINITY;
    for _ in 0..2000 {
        let mut grads = Gradients::zeros_like(&net);
        loss = 0.0;
        for (x, t) in &examples {
            loss += net.accumulate_gradients(x, steps, t, &mut grads).unwrap();
        }
        loss /= examples.len() as f64;
        if loss < 0.01 {
            break;
        }
        grads.scale(0.1);
        grads.clip_global_norm(CLIP_NORM);
        adam_step(&mut net, &grads, &mut state).unwrap();
    }
    assert!(loss < 0.01, "final loss {loss}");
}

#[test]
fn detector_training_is_deterministic() {
    let w = windows(ModeCounts::new(8, 8, 8), 31);
    let (a, log_a) = train_detector(&w, &small_config(2)).unwrap();
    let (b, log_b) = train_detector(&w, &small_config(2)).unwrap();
    assert_eq!(a.net, b.net);
    assert_eq!(log_a, log_b);
    assert_eq!(a.net.to_json().unwrap(), b.net.to_json().unwrap());
}

#[test]
fn rul_training_reduces_loss() {
    let w = windows(ModeCounts::new(0, 0, 16), 17);
    let (_, log) = train_rul(&w, DegradationMode::Gradual, &small_config(6)).unwrap();
    let first = log.records.first().unwrap().train_loss;
    let last = log.last().unwrap().train_loss;
    assert!(last < first, "loss went from {first} to {last}");
    assert!(log.records.iter().all(|r| r.holdout_metric.is_finite()));
}
