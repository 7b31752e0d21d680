//! Detection and prognosis metrics: confusion matrix, accuracy, RMSE in
//! normalized life and in hours, and RUL trajectory dumps.

use std::io::Write;

use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{rul_to_hours, FaultDetectorModel, RulPredictorModel};
use crate::preprocess::{FeatureWindow, WINDOW_LEN};
use crate::rng::rng_from_seed;
use crate::sim::DegradationMode;

/// Number of windows in the trajectory dump.
pub const TRAJECTORY_SAMPLES: usize = 6;

/// First window step of the final fifth of life.
pub const FINAL_QUINTILE_START: usize = 80;

/// Counts indexed `[true][predicted]` in [`DegradationMode::ALL`] order.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub counts: [[u64; 3]; 3],
}

impl ConfusionMatrix {
    pub fn get(&self, truth: DegradationMode, predicted: DegradationMode) -> u64 {
        self.counts[truth.index()][predicted.index()]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..3).map(|i| self.counts[i][i]).sum()
    }

    pub fn row_sum(&self, truth: DegradationMode) -> u64 {
        self.counts[truth.index()].iter().sum()
    }

    /// Off-diagonal cells as `(true, predicted, count)`.
    pub fn off_diagonal(&self) -> Vec<(DegradationMode, DegradationMode, u64)> {
        let mut out = Vec::with_capacity(6);
        for t in DegradationMode::ALL {
            for p in DegradationMode::ALL {
                if t != p {
                    out.push((t, p, self.get(t, p)));
                }
            }
        }
        out
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "true_mode,pred_normal,pred_sudden,pred_gradual")?;
        for t in DegradationMode::ALL {
            let row = self.counts[t.index()];
            writeln!(out, "{t},{},{},{}", row[0], row[1], row[2])?;
        }
        Ok(())
    }
}

pub fn confusion(
    truth: &[DegradationMode],
    predicted: &[DegradationMode],
) -> Result<ConfusionMatrix> {
    if truth.len() != predicted.len() {
        return Err(Error::Input(format!(
            "{} true labels but {} predictions",
            truth.len(),
            predicted.len()
        )));
    }
    let mut m = ConfusionMatrix::default();
    for (t, p) in truth.iter().zip(predicted) {
        m.counts[t.index()][p.index()] += 1;
    }
    Ok(m)
}

pub fn accuracy(matrix: &ConfusionMatrix) -> Result<f64> {
    let total = matrix.total();
    if total == 0 {
        return Err(Error::Input("accuracy of an empty confusion matrix".into()));
    }
    Ok(matrix.trace() as f64 / total as f64)
}

pub fn rmse(pred: &[f64], truth: &[f64]) -> Result<f64> {
    if pred.len() != truth.len() || pred.is_empty() {
        return Err(Error::Input(format!(
            "rmse over {} predictions and {} targets",
            pred.len(),
            truth.len()
        )));
    }
    let sum: f64 = pred.iter().zip(truth).map(|(p, t)| (p - t) * (p - t)).sum();
    Ok((sum / pred.len() as f64).sqrt())
}

/// Accuracy of one RUL model on the held-out windows of its mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RulMetrics {
    pub mode: DegradationMode,
    pub windows: usize,
    /// Normalized life, every step of every window.
    pub rmse_normalized: f64,
    /// Normalized life, steps in the final fifth of life.
    pub rmse_final_quintile: f64,
    /// Normalized life, last step only.
    pub rmse_last_step: f64,
    /// Mean over windows of the per-window all-step RMSE converted with that
    /// window's own degradation span.
    pub rmse_hours: f64,
    /// Last-step error converted to hours, root mean square over windows.
    pub rmse_hours_last_step: f64,
}

/// RUL output for a window the detector called degrading.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub window_id: u64,
    pub true_mode: DegradationMode,
    pub predicted_mode: DegradationMode,
    pub model_used: DegradationMode,
    pub true_rul: Option<Vec<f64>>,
    pub pred_rul: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub confusion: ConfusionMatrix,
    pub accuracy: f64,
    pub tau_fraction: Option<f64>,
    pub rul: Vec<RulMetrics>,
    /// Every routed RUL prediction, in test-window order.
    pub records: Vec<TrajectoryRecord>,
    /// Indices into `records` picked for the trajectory dump.
    pub sampled: Vec<usize>,
}

/// The two regressors, looked up by detected mode.
#[derive(Debug, Clone, Copy)]
pub struct RulModels<'a> {
    pub sudden: &'a RulPredictorModel,
    pub gradual: &'a RulPredictorModel,
}

impl<'a> RulModels<'a> {
    pub fn for_mode(&self, mode: DegradationMode) -> Option<&'a RulPredictorModel> {
        match mode {
            DegradationMode::Normal => None,
            DegradationMode::Sudden => Some(self.sudden),
            DegradationMode::Gradual => Some(self.gradual),
        }
    }
}

fn rul_metrics(model: &RulPredictorModel, windows: &[FeatureWindow]) -> Result<Option<RulMetrics>> {
    let mut all = (Vec::new(), Vec::new());
    let mut quintile = (Vec::new(), Vec::new());
    let mut last = (Vec::new(), Vec::new());
    let mut hours_sum = 0.0;
    let mut hours_last_sq = 0.0;
    let mut n = 0usize;

    for w in windows.iter().filter(|w| w.mode == model.mode) {
        let (Some(labels), Some(spec)) = (&w.step_rul_labels, &w.rul_spec) else {
            return Err(Error::Dataset(format!(
                "window {} has no RUL labels",
                w.source_id
            )));
        };
        let pred = model.predict_rul(w)?;
        let window_rmse = rmse(&pred.curve, labels)?;
        hours_sum += rul_to_hours(window_rmse, spec);
        let last_err = rul_to_hours((pred.last - labels[WINDOW_LEN - 1]).abs(), spec);
        hours_last_sq += last_err * last_err;

        all.0.extend_from_slice(&pred.curve);
        all.1.extend_from_slice(labels);
        quintile
            .0
            .extend_from_slice(&pred.curve[FINAL_QUINTILE_START..]);
        quintile
            .1
            .extend_from_slice(&labels[FINAL_QUINTILE_START..]);
        last.0.push(pred.last);
        last.1.push(labels[WINDOW_LEN - 1]);
        n += 1;
    }
    if n == 0 {
        return Ok(None);
    }
    Ok(Some(RulMetrics {
        mode: model.mode,
        windows: n,
        rmse_normalized: rmse(&all.0, &all.1)?,
        rmse_final_quintile: rmse(&quintile.0, &quintile.1)?,
        rmse_last_step: rmse(&last.0, &last.1)?,
        rmse_hours: hours_sum / n as f64,
        rmse_hours_last_step: (hours_last_sq / n as f64).sqrt(),
    }))
}

/// Runs the detection-then-prognosis flow over `test` and aggregates the
/// metrics. Windows detected as normal get no RUL prediction. Each RUL
/// model is additionally scored on the test windows of its own mode.
pub fn build_report(
    detector: &FaultDetectorModel,
    rul_models: RulModels<'_>,
    test: &[FeatureWindow],
    trajectory_seed: u64,
) -> Result<EvalReport> {
    if test.is_empty() {
        return Err(Error::Input("empty test set".into()));
    }
    let mut truth = Vec::with_capacity(test.len());
    let mut predicted = Vec::with_capacity(test.len());
    let mut records = Vec::new();

    for w in test {
        let mode = detector.predict_mode(w)?.mode;
        truth.push(w.mode);
        predicted.push(mode);
        if let Some(model) = rul_models.for_mode(mode) {
            let pred = model.predict_rul(w)?;
            records.push(TrajectoryRecord {
                window_id: w.source_id,
                true_mode: w.mode,
                predicted_mode: mode,
                model_used: model.mode,
                true_rul: w.step_rul_labels.clone(),
                pred_rul: pred.curve,
            });
        }
    }

    let matrix = confusion(&truth, &predicted)?;
    let mut rul = Vec::new();
    for model in [rul_models.sudden, rul_models.gradual] {
        if let Some(m) = rul_metrics(model, test)? {
            rul.push(m);
        }
    }

    let mut rng = rng_from_seed(trajectory_seed);
    let take = TRAJECTORY_SAMPLES.min(records.len());
    let mut sampled = sample(&mut rng, records.len(), take).into_vec();
    sampled.sort_unstable();

    Ok(EvalReport {
        confusion: matrix,
        accuracy: accuracy(&matrix)?,
        tau_fraction: test.iter().find_map(|w| w.rul_spec.map(|s| s.tau_fraction)),
        rul,
        records,
        sampled,
    })
}

impl EvalReport {
    pub fn rul_for(&self, mode: DegradationMode) -> Option<&RulMetrics> {
        self.rul.iter().find(|m| m.mode == mode)
    }

    pub fn metrics(&self) -> Vec<(String, f64)> {
        let mut out = vec![
            ("accuracy".to_string(), self.accuracy),
            ("test_windows".to_string(), self.confusion.total() as f64),
        ];
        if let Some(tau) = self.tau_fraction {
            out.push(("tau_fraction".into(), tau));
        }
        for m in &self.rul {
            let mode = m.mode;
            out.push((format!("rul_{mode}_windows"), m.windows as f64));
            out.push((format!("rul_{mode}_rmse_normalized"), m.rmse_normalized));
            out.push((
                format!("rul_{mode}_rmse_final_quintile"),
                m.rmse_final_quintile,
            ));
            out.push((format!("rul_{mode}_rmse_last_step"), m.rmse_last_step));
            out.push((format!("rul_{mode}_rmse_hours"), m.rmse_hours));
            out.push((
                format!("rul_{mode}_rmse_hours_last_step"),
                m.rmse_hours_last_step,
            ));
        }
        out
    }

    pub fn write_metrics_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "name,value")?;
        for (name, value) in self.metrics() {
            writeln!(out, "{name},{value}")?;
        }
        Ok(())
    }

    pub fn write_trajectories_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "window_id,step,true_rul,pred_rul")?;
        for &i in &self.sampled {
            let r = &self.records[i];
            for (step, pred) in r.pred_rul.iter().enumerate() {
                let truth = r
                    .true_rul
                    .as_ref()
                    .map(|t| t[step].to_string())
                    .unwrap_or_default();
                writeln!(out, "{},{step},{truth},{pred}", r.window_id)?;
            }
        }
        Ok(())
    }
}
