//! The fault detector, the per-mode RUL regressors and the piecewise RUL
//! labeling rule they are trained against.

mod labels;
mod train;

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nn::{Activation, Architecture, LstmNetwork, NetworkMeta, Readout, Target};
use crate::preprocess::{FeatureWindow, INPUT_CHANNELS, WINDOW_LEN};
use crate::rng::derive_seed;
use crate::sim::DegradationMode;

pub use self::labels::{label_rul, rul_to_hours, RulLabelSpec, DEFAULT_TAU_FRACTION};
pub use self::train::{stratified_split, EpochRecord, TrainConfig, TrainingLog};

pub const DETECTOR_PURPOSE: &str = "fault-detector";
pub const DETECTOR_HIDDEN: usize = 50;
pub const RUL_HIDDEN: [usize; 2] = [64, 32];

pub fn rul_purpose(mode: DegradationMode) -> Result<&'static str> {
    match mode {
        DegradationMode::Sudden => Ok("rul-sudden"),
        DegradationMode::Gradual => Ok("rul-gradual"),
        DegradationMode::Normal => Err(Error::Input("normal operation has no RUL model".into())),
    }
}

fn meta(purpose: &str) -> NetworkMeta {
    NetworkMeta {
        purpose: purpose.into(),
        input_channels: INPUT_CHANNELS.map(String::from).to_vec(),
    }
}

fn detector_architecture() -> Architecture {
    Architecture {
        input_dim: INPUT_CHANNELS.len(),
        hidden_dims: vec![DETECTOR_HIDDEN],
        output_dim: DegradationMode::ALL.len(),
        activation: Activation::Softmax,
        readout: Readout::Final,
    }
}

fn rul_architecture() -> Architecture {
    Architecture {
        input_dim: INPUT_CHANNELS.len(),
        hidden_dims: RUL_HIDDEN.to_vec(),
        output_dim: 1,
        activation: Activation::Sigmoid,
        readout: Readout::PerStep,
    }
}

fn check_architecture(net: &LstmNetwork, purpose: &str, arch: &Architecture) -> Result<()> {
    net.validate()?;
    let hidden: Vec<usize> = net.lstm_layers.iter().map(|l| l.hidden_dim).collect();
    let matches = net.meta.purpose == purpose
        && net.input_dim() == arch.input_dim
        && hidden == arch.hidden_dims
        && net.output_dim() == arch.output_dim
        && net.dense.activation == arch.activation
        && net.readout == arch.readout;
    if matches {
        Ok(())
    } else {
        Err(Error::Format(format!(
            "network {:?} is not a valid {purpose} model",
            net.meta.purpose
        )))
    }
}

fn load_network(path: &Path) -> Result<LstmNetwork> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    LstmNetwork::from_json(&text)
}

fn save_network(net: &LstmNetwork, path: &Path) -> Result<()> {
    std::fs::write(path, net.to_json()? + "\n").map_err(|e| Error::io(path, e))
}

/// Three-class LSTM classifier: one LSTM layer of 50 units, softmax over
/// (Normal, Sudden, Gradual) read from the last hidden state.
#[derive(Debug, Clone, PartialEq)]
pub struct FaultDetectorModel {
    pub net: LstmNetwork,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModePrediction {
    pub mode: DegradationMode,
    pub probabilities: [f64; 3],
}

impl FaultDetectorModel {
    pub fn new(seed: u64) -> Result<Self> {
        Ok(FaultDetectorModel {
            net: LstmNetwork::new(&detector_architecture(), meta(DETECTOR_PURPOSE), seed)?,
        })
    }

    /// All parameters zero; predicts the uniform distribution.
    pub fn zeros() -> Self {
        FaultDetectorModel {
            net: LstmNetwork::zeros(&detector_architecture(), meta(DETECTOR_PURPOSE)),
        }
    }

    pub fn from_network(net: LstmNetwork) -> Result<Self> {
        check_architecture(&net, DETECTOR_PURPOSE, &detector_architecture())?;
        Ok(FaultDetectorModel { net })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_network(load_network(path)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        save_network(&self.net, path)
    }

    /// Most probable class; ties go to the earlier class in
    /// [`DegradationMode::ALL`].
    pub fn predict_mode(&self, window: &FeatureWindow) -> Result<ModePrediction> {
        window.validate()?;
        let out = self.net.forward(&window.inputs(), WINDOW_LEN)?.output;
        let probabilities: [f64; 3] = out
            .values
            .as_slice()
            .try_into()
            .map_err(|_| Error::Shape("detector must emit three probabilities".into()))?;
        let best = (1..3).fold(0, |best, k| {
            if probabilities[k] > probabilities[best] {
                k
            } else {
                best
            }
        });
        Ok(ModePrediction {
            mode: DegradationMode::ALL[best],
            probabilities,
        })
    }
}

/// Stacked two-layer LSTM regressor (64 then 32 units) with a sigmoid
/// output on every step. One model per degrading mode.
#[derive(Debug, Clone, PartialEq)]
pub struct RulPredictorModel {
    pub mode: DegradationMode,
    pub net: LstmNetwork,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RulPrediction {
    /// Predicted normalized life per window step.
    pub curve: Vec<f64>,
    /// Prediction at the last step.
    pub last: f64,
}

impl RulPredictorModel {
    pub fn new(mode: DegradationMode, seed: u64) -> Result<Self> {
        let purpose = rul_purpose(mode)?;
        Ok(RulPredictorModel {
            mode,
            net: LstmNetwork::new(&rul_architecture(), meta(purpose), seed)?,
        })
    }

    pub fn zeros(mode: DegradationMode) -> Result<Self> {
        Ok(RulPredictorModel {
            mode,
            net: LstmNetwork::zeros(&rul_architecture(), meta(rul_purpose(mode)?)),
        })
    }

    pub fn from_network(net: LstmNetwork) -> Result<Self> {
        let mode = match net.meta.purpose.as_str() {
            "rul-sudden" => DegradationMode::Sudden,
            "rul-gradual" => DegradationMode::Gradual,
            other => return Err(Error::Format(format!("{other:?} is not a RUL model"))),
        };
        check_architecture(&net, rul_purpose(mode)?, &rul_architecture())?;
        Ok(RulPredictorModel { mode, net })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_network(load_network(path)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        save_network(&self.net, path)
    }

    pub fn predict_rul(&self, window: &FeatureWindow) -> Result<RulPrediction> {
        window.validate()?;
        let curve = self
            .net
            .forward(&window.inputs(), WINDOW_LEN)?
            .output
            .values;
        let last = *curve
            .last()
            .ok_or_else(|| Error::Shape("empty RUL output".into()))?;
        Ok(RulPrediction { curve, last })
    }
}

/// Fraction of `windows` whose predicted mode matches the label.
pub fn detector_accuracy(model: &FaultDetectorModel, windows: &[&FeatureWindow]) -> Result<f64> {
    if windows.is_empty() {
        return Ok(0.0);
    }
    let mut correct = 0usize;
    for w in windows {
        if model.predict_mode(w)?.mode == w.mode {
            correct += 1;
        }
    }
    Ok(correct as f64 / windows.len() as f64)
}

/// Root mean squared error over every step of every window.
pub fn rul_holdout_rmse(model: &RulPredictorModel, windows: &[&FeatureWindow]) -> Result<f64> {
    let mut sum = 0.0;
    let mut count = 0usize;
    for w in windows {
        let labels = w
            .step_rul_labels
            .as_ref()
            .ok_or_else(|| Error::Dataset(format!("window {} has no RUL labels", w.source_id)))?;
        let pred = model.predict_rul(w)?;
        sum += pred
            .curve
            .iter()
            .zip(labels)
            .map(|(p, l)| (p - l) * (p - l))
            .sum::<f64>();
        count += labels.len();
    }
    Ok(if count == 0 {
        0.0
    } else {
        (sum / count as f64).sqrt()
    })
}

/// Trains the fault detector on the training part of a stratified split.
pub fn train_detector(
    windows: &[FeatureWindow],
    cfg: &TrainConfig,
) -> Result<(FaultDetectorModel, TrainingLog)> {
    cfg.validate()?;
    for w in windows {
        w.validate()?;
    }
    let (train_idx, test_idx) = stratified_split(windows, cfg.train_fraction, cfg.seed);
    for mode in DegradationMode::ALL {
        if !train_idx.iter().any(|&i| windows[i].mode == mode) {
            return Err(Error::Dataset(format!(
                "no {mode} windows in the training split"
            )));
        }
    }

    let examples: Vec<(Vec<f64>, Target)> = train_idx
        .iter()
        .map(|&i| (windows[i].inputs(), Target::Class(windows[i].mode.index())))
        .collect();
    let holdout: Vec<&FeatureWindow> = test_idx.iter().map(|&i| &windows[i]).collect();

    let mut model = FaultDetectorModel::new(derive_seed(cfg.seed, 0xDE7EC7))?;
    let log = train::fit(&mut model.net, &examples, cfg, |net| {
        let m = FaultDetectorModel { net: net.clone() };
        detector_accuracy(&m, &holdout)
    })?;
    Ok((model, log))
}

/// Trains the RUL regressor for `mode` on all timesteps of the labeled
/// windows (MSE loss). The log's holdout metric is the held-out RMSE.
pub fn train_rul(
    windows: &[FeatureWindow],
    mode: DegradationMode,
    cfg: &TrainConfig,
) -> Result<(RulPredictorModel, TrainingLog)> {
    cfg.validate()?;
    rul_purpose(mode)?;
    for w in windows {
        w.validate()?;
        if w.mode != mode {
            return Err(Error::Dataset(format!(
                "window {} is {} but the model is for {mode}",
                w.source_id, w.mode
            )));
        }
        if w.step_rul_labels.is_none() {
            return Err(Error::Dataset(format!(
                "window {} has no RUL labels",
                w.source_id
            )));
        }
    }
    let (train_idx, test_idx) = stratified_split(windows, cfg.train_fraction, cfg.seed);
    if train_idx.is_empty() {
        return Err(Error::Dataset(format!("no {mode} windows to train on")));
    }
    let examples: Vec<(Vec<f64>, Target)> = train_idx
        .iter()
        .map(|&i| {
            let labels = windows[i].step_rul_labels.clone().expect("checked above");
            (windows[i].inputs(), Target::Values(labels))
        })
        .collect();
    let holdout: Vec<&FeatureWindow> = test_idx.iter().map(|&i| &windows[i]).collect();

    let mut model =
        RulPredictorModel::new(mode, derive_seed(cfg.seed, 0x2017 + mode.index() as u64))?;
    let log = train::fit(&mut model.net, &examples, cfg, |net| {
        let m = RulPredictorModel {
            mode,
            net: net.clone(),
        };
        rul_holdout_rmse(&m, &holdout)
    })?;
    Ok((model, log))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preprocess::{build_feature_windows, SgFilterSpec};
    use crate::sim::{generate_dataset, ModeCounts};

    fn windows(counts: ModeCounts, seed: u64) -> Vec<FeatureWindow> {
        let data = generate_dataset(counts, seed).unwrap();
        build_feature_windows(&data, SgFilterSpec::default(), DEFAULT_TAU_FRACTION).unwrap()
    }

    #[test]
    fn zero_detector_ties_to_normal() {
        let w = &windows(ModeCounts::new(0, 0, 1), 1)[0];
        let p = FaultDetectorModel::zeros().predict_mode(w).unwrap();
        assert_eq!(p.mode, DegradationMode::Normal);
        assert!(p
            .probabilities
            .iter()
            .all(|&v| (v - 1.0 / 3.0).abs() < 1e-15));
    }

    #[test]
    fn zero_rul_model_predicts_half() {
        let w = &windows(ModeCounts::new(0, 1, 0), 2)[0];
        let pred = RulPredictorModel::zeros(DegradationMode::Sudden)
            .unwrap()
            .predict_rul(w)
            .unwrap();
        assert_eq!(pred.curve.len(), WINDOW_LEN);
        assert!(pred.curve.iter().all(|&v| v == 0.5));
        assert_eq!(pred.last, 0.5);
    }

    #[test]
    fn random_model_outputs_are_valid() {
        let ws = windows(ModeCounts::new(1, 1, 1), 3);
        let det = FaultDetectorModel::new(5).unwrap();
        let rul = RulPredictorModel::new(DegradationMode::Gradual, 5).unwrap();
        for w in &ws {
            let p = det.predict_mode(w).unwrap();
            assert!((p.probabilities.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            let r = rul.predict_rul(w).unwrap();
            assert!(r.curve.iter().all(|&v| v > 0.0 && v < 1.0));
        }
    }

    #[test]
    fn detector_needs_every_class() {
        let ws = windows(ModeCounts::new(3, 0, 3), 4);
        let cfg = TrainConfig {
            epochs: 1,
            ..TrainConfig::detector_default()
        };
        assert!(matches!(train_detector(&ws, &cfg), Err(Error::Dataset(_))));
    }

    #[test]
    fn rul_training_rejects_foreign_windows() {
        let ws = windows(ModeCounts::new(1, 2, 2), 4);
        let cfg = TrainConfig {
            epochs: 1,
            ..TrainConfig::rul_default()
        };
        assert!(matches!(
            train_rul(&ws, DegradationMode::Gradual, &cfg),
            Err(Error::Dataset(_))
        ));
        assert!(train_rul(&ws, DegradationMode::Normal, &cfg).is_err());
    }

    #[test]
    fn purpose_checked_on_load() {
        let det = FaultDetectorModel::new(1).unwrap();
        assert!(RulPredictorModel::from_network(det.net.clone()).is_err());
        let rul = RulPredictorModel::new(DegradationMode::Sudden, 1).unwrap();
        assert!(FaultDetectorModel::from_network(rul.net.clone()).is_err());
        assert_eq!(
            RulPredictorModel::from_network(rul.net.clone())
                .unwrap()
                .mode,
            DegradationMode::Sudden
        );
    }
}
