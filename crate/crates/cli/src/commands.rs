use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use laserphm::eval::{build_report, RulModels};
use laserphm::models::{stratified_split, train_detector, train_rul, TrainingLog};
use laserphm::preprocess::{build_feature_window, build_feature_windows, write_feature_windows};
use laserphm::rng::derive_seed;
use laserphm::sim::{generate_dataset, read_sequences, write_sequences};
use laserphm::{
    DegradationMode, EvalReport, FaultDetectorModel, FeatureWindow, RulPredictorModel,
    RunToFailureSequence, SgFilterSpec,
};
use serde::{Deserialize, Serialize};

use crate::config::{RunConfig, RESOLVED_CONFIG_NAME};
use crate::CliError;

pub const MANIFEST_NAME: &str = "manifest.json";
pub const FEATURES_NAME: &str = "features.csv";
pub const DETECTOR_FILE: &str = "fault-detector.json";
pub const CONFUSION_NAME: &str = "confusion.csv";
pub const METRICS_NAME: &str = "metrics.csv";
pub const TRAJECTORIES_NAME: &str = "trajectories.csv";
pub const DIAGNOSIS_NAME: &str = "diagnosis.json";

pub fn sequence_file(mode: DegradationMode) -> String {
    format!("{mode}.csv")
}

pub fn rul_model_file(mode: DegradationMode) -> String {
    format!("rul-{mode}.json")
}

fn log_file(stem: &str) -> String {
    format!("{stem}-log.csv")
}

fn create_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

fn create_file(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::io(path, e))
}

fn write_with<F>(path: &Path, body: F) -> Result<(), CliError>
where
    F: FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
{
    let mut out = create_file(path)?;
    body(&mut out)
        .and_then(|_| out.flush())
        .map_err(|e| CliError::io(path, e))
}

/// Creates `dir` and stores the resolved configuration in it.
fn prepare_output(dir: &Path, cfg: &RunConfig) -> Result<(), CliError> {
    create_dir(dir)?;
    let path = dir.join(RESOLVED_CONFIG_NAME);
    fs::write(&path, cfg.to_text()).map_err(|e| CliError::io(&path, e))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub seed: u64,
    pub normal: usize,
    pub sudden: usize,
    pub gradual: usize,
    pub sequences: usize,
    pub samples: usize,
    pub files: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenerateSummary {
    pub manifest: Manifest,
    pub data_dir: PathBuf,
}

pub fn generate(cfg: &RunConfig) -> Result<GenerateSummary, CliError> {
    let dir = cfg.data_dir();
    prepare_output(&dir, cfg)?;
    let sequences = generate_dataset(cfg.counts, cfg.seed)?;
    let mut files = Vec::new();
    for mode in DegradationMode::ALL {
        let name = sequence_file(mode);
        let path = dir.join(&name);
        let subset: Vec<RunToFailureSequence> = sequences
            .iter()
            .filter(|s| s.mode_label == mode)
            .cloned()
            .collect();
        let mut out = create_file(&path)?;
        write_sequences(&mut out, &subset)?;
        out.flush().map_err(|e| CliError::io(&path, e))?;
        files.push(name);
    }
    let manifest = Manifest {
        seed: cfg.seed,
        normal: cfg.counts.normal,
        sudden: cfg.counts.sudden,
        gradual: cfg.counts.gradual,
        sequences: sequences.len(),
        samples: sequences.iter().map(|s| s.len()).sum(),
        files,
    };
    let path = dir.join(MANIFEST_NAME);
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    fs::write(&path, text + "\n").map_err(|e| CliError::io(&path, e))?;
    Ok(GenerateSummary {
        manifest,
        data_dir: dir,
    })
}

pub fn read_sequence_file(path: &Path) -> Result<Vec<RunToFailureSequence>, CliError> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    read_sequences(BufReader::new(file))
        .map_err(|e| match e {
            laserphm::Error::Parse { line, message } => laserphm::Error::Parse {
                line,
                message: format!("{}: {message}", path.display()),
            },
            other => other,
        })
        .map_err(CliError::from)
}

/// Reads the three per-mode files of a generated dataset.
pub fn load_dataset(data_dir: &Path) -> Result<Vec<RunToFailureSequence>, CliError> {
    let mut all = Vec::new();
    for mode in DegradationMode::ALL {
        let seqs = read_sequence_file(&data_dir.join(sequence_file(mode)))?;
        if let Some(s) = seqs.iter().find(|s| s.mode_label != mode) {
            return Err(laserphm::Error::Dataset(format!(
                "sequence {} labeled {} in the {mode} file",
                s.id, s.mode_label
            ))
            .into());
        }
        all.extend(seqs);
    }
    Ok(all)
}

fn load_windows(cfg: &RunConfig) -> Result<Vec<FeatureWindow>, CliError> {
    let sequences = load_dataset(&cfg.data_dir())?;
    Ok(build_feature_windows(&sequences, cfg.sg, cfg.tau_fraction)?)
}

/// Writes the feature windows of the generated dataset. Training and
/// evaluation rebuild the same windows from the sequence files.
pub fn preprocess(cfg: &RunConfig) -> Result<usize, CliError> {
    let windows = load_windows(cfg)?;
    let dir = cfg.features_dir();
    prepare_output(&dir, cfg)?;
    let path = dir.join(FEATURES_NAME);
    let mut out = create_file(&path)?;
    write_feature_windows(&mut out, &windows)?;
    out.flush().map_err(|e| CliError::io(&path, e))?;
    Ok(windows.len())
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainSummary {
    pub detector: TrainingLog,
    pub sudden: TrainingLog,
    pub gradual: TrainingLog,
}

fn write_log(path: &Path, log: &TrainingLog) -> Result<(), CliError> {
    write_with(path, |out| log.write_csv(out))
}

fn mode_windows(windows: &[FeatureWindow], mode: DegradationMode) -> Vec<FeatureWindow> {
    windows.iter().filter(|w| w.mode == mode).cloned().collect()
}

/// Trains the detector on all windows and each RUL model on the windows of
/// its mode. All three use the same seed and train fraction, so the held-out
/// windows are the same.
pub fn train(cfg: &RunConfig) -> Result<TrainSummary, CliError> {
    let windows = load_windows(cfg)?;
    let dir = cfg.model_dir();
    prepare_output(&dir, cfg)?;

    let (detector, detector_log) = train_detector(&windows, &cfg.detector_config())?;
    detector.save(&dir.join(DETECTOR_FILE))?;
    write_log(&dir.join(log_file("fault-detector")), &detector_log)?;

    let mut logs = Vec::new();
    for mode in [DegradationMode::Sudden, DegradationMode::Gradual] {
        let (model, log) = train_rul(&mode_windows(&windows, mode), mode, &cfg.rul_config())?;
        model.save(&dir.join(rul_model_file(mode)))?;
        write_log(&dir.join(log_file(&format!("rul-{mode}"))), &log)?;
        logs.push(log);
    }
    let gradual = logs.pop().expect("two logs");
    let sudden = logs.pop().expect("two logs");
    Ok(TrainSummary {
        detector: detector_log,
        sudden,
        gradual,
    })
}

/// Scores the trained models on the held-out windows and writes the report.
pub fn evaluate(cfg: &RunConfig) -> Result<EvalReport, CliError> {
    let windows = load_windows(cfg)?;
    let model_dir = cfg.model_dir();
    let detector = FaultDetectorModel::load(&model_dir.join(DETECTOR_FILE))?;
    let sudden = RulPredictorModel::load(&model_dir.join(rul_model_file(DegradationMode::Sudden)))?;
    let gradual =
        RulPredictorModel::load(&model_dir.join(rul_model_file(DegradationMode::Gradual)))?;

    let (_, test_idx) = stratified_split(&windows, cfg.train_fraction, cfg.seed);
    let test: Vec<FeatureWindow> = test_idx.iter().map(|&i| windows[i].clone()).collect();
    let report = build_report(
        &detector,
        RulModels {
            sudden: &sudden,
            gradual: &gradual,
        },
        &test,
        derive_seed(cfg.seed, 0x7EA7),
    )?;

    let dir = cfg.report_dir();
    prepare_output(&dir, cfg)?;
    write_with(&dir.join(CONFUSION_NAME), |out| {
        report.confusion.write_csv(out)
    })?;
    write_with(&dir.join(METRICS_NAME), |out| report.write_metrics_csv(out))?;
    write_with(&dir.join(TRAJECTORIES_NAME), |out| {
        report.write_trajectories_csv(out)
    })?;
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeProbabilities {
    pub normal: f64,
    pub sudden: f64,
    pub gradual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnosis {
    pub sequence_id: u64,
    pub mode: DegradationMode,
    pub probabilities: ModeProbabilities,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model_used: Option<DegradationMode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rul_fraction: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rul_hours: Option<f64>,
}

impl Diagnosis {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("diagnosis serializes")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnoseInputs {
    pub detector: PathBuf,
    pub rul_sudden: PathBuf,
    pub rul_gradual: PathBuf,
    pub sequences: PathBuf,
    /// Sequence to diagnose; may be omitted when the file holds one.
    pub sequence_id: Option<u64>,
    pub sg: SgFilterSpec,
    pub tau_fraction: f64,
}

impl DiagnoseInputs {
    pub fn from_config(cfg: &RunConfig, sequences: PathBuf, sequence_id: Option<u64>) -> Self {
        let dir = cfg.model_dir();
        DiagnoseInputs {
            detector: dir.join(DETECTOR_FILE),
            rul_sudden: dir.join(rul_model_file(DegradationMode::Sudden)),
            rul_gradual: dir.join(rul_model_file(DegradationMode::Gradual)),
            sequences,
            sequence_id,
            sg: cfg.sg,
            tau_fraction: cfg.tau_fraction,
        }
    }

    fn rul_path(&self, mode: DegradationMode) -> Option<&Path> {
        match mode {
            DegradationMode::Normal => None,
            DegradationMode::Sudden => Some(&self.rul_sudden),
            DegradationMode::Gradual => Some(&self.rul_gradual),
        }
    }
}

/// Hours left when the observed window ends at `t_now_h` and the predicted
/// normalized life is `fraction`, assuming the label onset sits at
/// `tau_fraction` of the unknown failure time.
pub fn remaining_hours(fraction: f64, t_now_h: f64, tau_fraction: f64) -> f64 {
    let span = 1.0 - tau_fraction;
    let f = fraction.clamp(0.0, 1.0);
    f * span * t_now_h / (1.0 - f * span)
}

/// Classifies one sequence and, when it is degrading, predicts its remaining
/// life with the model of the detected mode. Only that model is loaded.
pub fn diagnose(inputs: &DiagnoseInputs) -> Result<Diagnosis, CliError> {
    let sequences = read_sequence_file(&inputs.sequences)?;
    let seq = match inputs.sequence_id {
        Some(id) => sequences.iter().find(|s| s.id == id).ok_or_else(|| {
            laserphm::Error::Dataset(format!(
                "no sequence {id} in {}",
                inputs.sequences.display()
            ))
        })?,
        None if sequences.len() == 1 => &sequences[0],
        None => {
            return Err(laserphm::Error::Dataset(format!(
                "{} holds {} sequences; choose one by id",
                inputs.sequences.display(),
                sequences.len()
            ))
            .into())
        }
    };
    let window = build_feature_window(seq, inputs.sg, inputs.tau_fraction)?;
    let detector = FaultDetectorModel::load(&inputs.detector)?;
    let prediction = detector.predict_mode(&window)?;
    let [normal, sudden, gradual] = prediction.probabilities;
    let mut diagnosis = Diagnosis {
        sequence_id: seq.id,
        mode: prediction.mode,
        probabilities: ModeProbabilities {
            normal,
            sudden,
            gradual,
        },
        model_used: None,
        rul_fraction: None,
        rul_hours: None,
    };
    if let Some(path) = inputs.rul_path(prediction.mode) {
        let model = RulPredictorModel::load(path)?;
        if model.mode != prediction.mode {
            return Err(laserphm::Error::Format(format!(
                "{} holds a {} model, expected {}",
                path.display(),
                model.mode,
                prediction.mode
            ))
            .into());
        }
        let fraction = model.predict_rul(&window)?.last;
        diagnosis.model_used = Some(model.mode);
        diagnosis.rul_fraction = Some(fraction);
        diagnosis.rul_hours = Some(remaining_hours(
            fraction,
            window.end_time_h,
            inputs.tau_fraction,
        ));
    }
    Ok(diagnosis)
}

pub fn write_diagnosis(path: &Path, diagnosis: &Diagnosis) -> Result<(), CliError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        create_dir(parent)?;
    }
    fs::write(path, diagnosis.to_json() + "\n").map_err(|e| CliError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn remaining_hours_inverts_the_label() {
        let (tau_fraction, tf) = (0.6, 500.0);
        for t in [320.0, 400.0, 480.0, 500.0] {
            let f = (tf - t) / (tf - tau_fraction * tf);
            assert!((remaining_hours(f, t, tau_fraction) - (tf - t)).abs() < 1e-9);
        }
    }

    #[test]
    fn file_names() {
        assert_eq!(sequence_file(DegradationMode::Sudden), "sudden.csv");
        assert_eq!(rul_model_file(DegradationMode::Gradual), "rul-gradual.json");
    }
}
