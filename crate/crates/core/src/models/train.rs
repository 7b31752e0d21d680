use std::io::Write;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nn::{adam_step, AdamConfig, AdamState, Gradients, LstmNetwork, Target, CLIP_NORM};
use crate::preprocess::{FeatureWindow, WINDOW_LEN};
use crate::rng::{derive_seed, rng_from_seed};
use crate::sim::DegradationMode;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub seed: u64,
    /// Fraction of each class used for training; the rest is held out.
    pub train_fraction: f64,
}

impl TrainConfig {
    pub fn detector_default() -> Self {
        TrainConfig {
            epochs: 30,
            batch_size: 32,
            learning_rate: 1e-3,
            seed: 42,
            train_fraction: 0.8,
        }
    }

    pub fn rul_default() -> Self {
        TrainConfig {
            epochs: 50,
            ..Self::detector_default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 || self.batch_size == 0 {
            return Err(Error::Input(
                "epochs and batch size must be positive".into(),
            ));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(Error::Input("learning rate must be positive".into()));
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(Error::Input("train fraction must lie in (0, 1)".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    pub holdout_metric: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainingLog {
    pub records: Vec<EpochRecord>,
}

impl TrainingLog {
    pub fn last(&self) -> Option<&EpochRecord> {
        self.records.last()
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "epoch,train_loss,holdout_metric")?;
        for r in &self.records {
            writeln!(out, "{},{},{}", r.epoch, r.train_loss, r.holdout_metric)?;
        }
        Ok(())
    }
}

/// Splits window indices per class into train and held-out sets.
///
/// Each class is shuffled with its own stream keyed by `seed` and the class,
/// so splitting a subset that contains a whole class yields the same
/// partition of that class as splitting the full set. Both index lists are
/// ascending.
pub fn stratified_split(
    windows: &[FeatureWindow],
    train_fraction: f64,
    seed: u64,
) -> (Vec<usize>, Vec<usize>) {
    let mut train = Vec::new();
    let mut test = Vec::new();
    for mode in DegradationMode::ALL {
        let mut members: Vec<usize> = (0..windows.len())
            .filter(|&i| windows[i].mode == mode)
            .collect();
        members.sort_by_key(|&i| windows[i].source_id);
        let mut rng = rng_from_seed(derive_seed(seed, 0x5EED_0000 + mode.index() as u64));
        members.shuffle(&mut rng);
        let n_train = (train_fraction * members.len() as f64).round() as usize;
        train.extend_from_slice(&members[..n_train]);
        test.extend_from_slice(&members[n_train..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    (train, test)
}

/// Mini-batch Adam with global-norm clipping. `holdout` is evaluated after
/// every epoch and recorded in the log.
pub(crate) fn fit(
    net: &mut LstmNetwork,
    examples: &[(Vec<f64>, Target)],
    cfg: &TrainConfig,
    mut holdout: impl FnMut(&LstmNetwork) -> Result<f64>,
) -> Result<TrainingLog> {
    cfg.validate()?;
    if examples.is_empty() {
        return Err(Error::Dataset("no training examples".into()));
    }
    let mut state = AdamState::new(
        net,
        AdamConfig {
            learning_rate: cfg.learning_rate,
            ..AdamConfig::default()
        },
    );
    let mut rng = rng_from_seed(derive_seed(cfg.seed, 0xBA7C4));
    let mut order: Vec<usize> = (0..examples.len()).collect();
    let mut log = TrainingLog::default();

    for epoch in 1..=cfg.epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        for batch in order.chunks(cfg.batch_size) {
            let mut grads = Gradients::zeros_like(net);
            for &i in batch {
                let (inputs, target) = &examples[i];
                epoch_loss += net.accumulate_gradients(inputs, WINDOW_LEN, target, &mut grads)?;
            }
            grads.scale(1.0 / batch.len() as f64);
            grads.clip_global_norm(CLIP_NORM);
            adam_step(net, &grads, &mut state)?;
        }
        let train_loss = epoch_loss / examples.len() as f64;
        if !train_loss.is_finite() {
            return Err(Error::Domain(format!(
                "training loss diverged in epoch {epoch}"
            )));
        }
        log.records.push(EpochRecord {
            epoch,
            train_loss,
            holdout_metric: holdout(net)?,
        });
    }
    Ok(log)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn window(id: u64, mode: DegradationMode) -> FeatureWindow {
        FeatureWindow {
            source_id: id,
            mode,
            current: vec![0.0; WINDOW_LEN],
            temperature: 0.5,
            optical_power: 0.5,
            wavelength: 0.5,
            step_rul_labels: None,
            rul_spec: None,
            end_time_h: 1.0,
        }
    }

    #[test]
    fn split_is_disjoint_and_stratified() {
        let windows: Vec<FeatureWindow> = (0..30)
            .map(|i| window(i, DegradationMode::from_index(i as usize % 3).unwrap()))
            .collect();
        let (train, test) = stratified_split(&windows, 0.8, 7);
        assert_eq!(train.len(), 24);
        assert_eq!(test.len(), 6);
        assert!(train.iter().all(|i| !test.contains(i)));
        for mode in DegradationMode::ALL {
            assert_eq!(test.iter().filter(|&&i| windows[i].mode == mode).count(), 2);
        }
    }

    #[test]
    fn split_of_one_class_matches_full_split() {
        let windows: Vec<FeatureWindow> = (0..40)
            .map(|i| window(i, DegradationMode::from_index(i as usize % 3).unwrap()))
            .collect();
        let (_, test_full) = stratified_split(&windows, 0.8, 3);
        let gradual: Vec<FeatureWindow> = windows
            .iter()
            .filter(|w| w.mode == DegradationMode::Gradual)
            .cloned()
            .collect();
        let (_, test_sub) = stratified_split(&gradual, 0.8, 3);
        let ids_full: Vec<u64> = test_full
            .iter()
            .filter(|&&i| windows[i].mode == DegradationMode::Gradual)
            .map(|&i| windows[i].source_id)
            .collect();
        let ids_sub: Vec<u64> = test_sub.iter().map(|&i| gradual[i].source_id).collect();
        assert_eq!(ids_full, ids_sub);
    }

    #[test]
    fn config_validation() {
        assert!(TrainConfig::detector_default().validate().is_ok());
        let bad = TrainConfig {
            train_fraction: 1.0,
            ..TrainConfig::detector_default()
        };
        assert!(bad.validate().is_err());
    }
}
