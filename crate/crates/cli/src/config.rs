//! Flat `key = value` run configuration.
//!
//! Blank lines and lines starting with `#` are ignored. Every key is
//! optional; see [`RunConfig::default`] for the defaults. Output directories
//! that are not set explicitly live under `out_dir`.
//!
//! | key | meaning |
//! |-----|---------|
//! | `seed` | seed for generation, splitting, initialization and shuffling |
//! | `count_normal`, `count_sudden`, `count_gradual` | sequences per mode |
//! | `sg_window`, `sg_order` | Savitzky-Golay window length and order |
//! | `tau_fraction` | RUL onset as a fraction of the failure time |
//! | `train_fraction` | per-class training share of the split |
//! | `detector_epochs`, `detector_batch_size`, `detector_learning_rate` | detector training |
//! | `rul_epochs`, `rul_batch_size`, `rul_learning_rate` | RUL regressor training |
//! | `out_dir` | base output directory |
//! | `data_dir`, `features_dir`, `model_dir`, `report_dir` | per-stage directories |

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use laserphm::models::DEFAULT_TAU_FRACTION;
use laserphm::{ModeCounts, SgFilterSpec, TrainConfig};

use crate::CliError;

/// File name of the resolved configuration written next to every output.
pub const RESOLVED_CONFIG_NAME: &str = "config.resolved";

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    pub counts: ModeCounts,
    pub sg: SgFilterSpec,
    pub tau_fraction: f64,
    pub train_fraction: f64,
    pub detector: StageTraining,
    pub rul: StageTraining,
    pub out_dir: PathBuf,
    data_dir: Option<PathBuf>,
    features_dir: Option<PathBuf>,
    model_dir: Option<PathBuf>,
    report_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StageTraining {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
}

impl From<TrainConfig> for StageTraining {
    fn from(c: TrainConfig) -> Self {
        StageTraining {
            epochs: c.epochs,
            batch_size: c.batch_size,
            learning_rate: c.learning_rate,
        }
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 42,
            counts: ModeCounts::new(200, 200, 200),
            sg: SgFilterSpec::default(),
            tau_fraction: DEFAULT_TAU_FRACTION,
            train_fraction: 0.8,
            detector: TrainConfig::detector_default().into(),
            rul: TrainConfig::rul_default().into(),
            out_dir: PathBuf::from("run"),
            data_dir: None,
            features_dir: None,
            model_dir: None,
            report_dir: None,
        }
    }
}

fn parse_value<T: FromStr>(key: &str, value: &str, line: usize) -> Result<T, CliError> {
    value
        .parse()
        .map_err(|_| CliError::Config(format!("line {line}: bad value {value:?} for {key}")))
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = RunConfig::default();
        let mut seen = BTreeSet::new();
        let (mut sg_window, mut sg_order) = (cfg.sg.window_length, cfg.sg.poly_order);
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let (key, value) = trimmed
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {line}: expected key = value")))?;
            let (key, value) = (key.trim(), value.trim());
            if !seen.insert(key.to_string()) {
                return Err(CliError::Config(format!(
                    "line {line}: duplicate key {key}"
                )));
            }
            match key {
                "seed" => cfg.seed = parse_value(key, value, line)?,
                "count_normal" => cfg.counts.normal = parse_value(key, value, line)?,
                "count_sudden" => cfg.counts.sudden = parse_value(key, value, line)?,
                "count_gradual" => cfg.counts.gradual = parse_value(key, value, line)?,
                "sg_window" => sg_window = parse_value(key, value, line)?,
                "sg_order" => sg_order = parse_value(key, value, line)?,
                "tau_fraction" => cfg.tau_fraction = parse_value(key, value, line)?,
                "train_fraction" => cfg.train_fraction = parse_value(key, value, line)?,
                "detector_epochs" => cfg.detector.epochs = parse_value(key, value, line)?,
                "detector_batch_size" => cfg.detector.batch_size = parse_value(key, value, line)?,
                "detector_learning_rate" => {
                    cfg.detector.learning_rate = parse_value(key, value, line)?
                }
                "rul_epochs" => cfg.rul.epochs = parse_value(key, value, line)?,
                "rul_batch_size" => cfg.rul.batch_size = parse_value(key, value, line)?,
                "rul_learning_rate" => cfg.rul.learning_rate = parse_value(key, value, line)?,
                "out_dir" => cfg.out_dir = PathBuf::from(value),
                "data_dir" => cfg.data_dir = Some(PathBuf::from(value)),
                "features_dir" => cfg.features_dir = Some(PathBuf::from(value)),
                "model_dir" => cfg.model_dir = Some(PathBuf::from(value)),
                "report_dir" => cfg.report_dir = Some(PathBuf::from(value)),
                _ => return Err(CliError::Config(format!("line {line}: unknown key {key}"))),
            }
        }
        cfg.sg =
            SgFilterSpec::new(sg_window, sg_order).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |e: laserphm::Error| CliError::Config(e.to_string());
        self.detector_config().validate().map_err(bad)?;
        self.rul_config().validate().map_err(bad)?;
        SgFilterSpec::new(self.sg.window_length, self.sg.poly_order).map_err(bad)?;
        if !(self.tau_fraction > 0.0 && self.tau_fraction < 1.0) {
            return Err(CliError::Config(format!(
                "tau_fraction must lie in (0, 1), got {}",
                self.tau_fraction
            )));
        }
        let dirs = [
            self.data_dir(),
            self.features_dir(),
            self.model_dir(),
            self.report_dir(),
        ];
        let distinct: BTreeSet<&PathBuf> = dirs.iter().collect();
        if distinct.len() != dirs.len() {
            return Err(CliError::Config(
                "data_dir, features_dir, model_dir and report_dir must be distinct".into(),
            ));
        }
        Ok(())
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_out_dir(mut self, dir: impl Into<PathBuf>) -> Self {
        self.out_dir = dir.into();
        self
    }

    pub fn data_dir(&self) -> PathBuf {
        self.data_dir
            .clone()
            .unwrap_or_else(|| self.out_dir.join("data"))
    }

    pub fn features_dir(&self) -> PathBuf {
        self.features_dir
            .clone()
            .unwrap_or_else(|| self.out_dir.join("features"))
    }

    pub fn model_dir(&self) -> PathBuf {
        self.model_dir
            .clone()
            .unwrap_or_else(|| self.out_dir.join("models"))
    }

    pub fn report_dir(&self) -> PathBuf {
        self.report_dir
            .clone()
            .unwrap_or_else(|| self.out_dir.join("reports"))
    }

    pub fn detector_config(&self) -> TrainConfig {
        self.train_config(self.detector)
    }

    pub fn rul_config(&self) -> TrainConfig {
        self.train_config(self.rul)
    }

    fn train_config(&self, stage: StageTraining) -> TrainConfig {
        TrainConfig {
            epochs: stage.epochs,
            batch_size: stage.batch_size,
            learning_rate: stage.learning_rate,
            seed: self.seed,
            train_fraction: self.train_fraction,
        }
    }

    /// Every key with its effective value, in schema order. Parsing the
    /// result yields the same configuration.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut put = |k: &str, v: &dyn std::fmt::Display| {
            let _ = writeln!(s, "{k} = {v}");
        };
        put("seed", &self.seed);
        put("count_normal", &self.counts.normal);
        put("count_sudden", &self.counts.sudden);
        put("count_gradual", &self.counts.gradual);
        put("sg_window", &self.sg.window_length);
        put("sg_order", &self.sg.poly_order);
        put("tau_fraction", &self.tau_fraction);
        put("train_fraction", &self.train_fraction);
        put("detector_epochs", &self.detector.epochs);
        put("detector_batch_size", &self.detector.batch_size);
        put("detector_learning_rate", &self.detector.learning_rate);
        put("rul_epochs", &self.rul.epochs);
        put("rul_batch_size", &self.rul.batch_size);
        put("rul_learning_rate", &self.rul.learning_rate);
        put("out_dir", &self.out_dir.display());
        put("data_dir", &self.data_dir().display());
        put("features_dir", &self.features_dir().display());
        put("model_dir", &self.model_dir().display());
        put("report_dir", &self.report_dir().display());
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_text_gives_defaults() {
        assert_eq!(RunConfig::parse("").unwrap(), RunConfig::default());
    }

    #[test]
    fn keys_and_comments() {
        let cfg =
            RunConfig::parse("# small run\nseed = 7\n\ncount_sudden=3\nrul_learning_rate = 0.01\n")
                .unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.counts.sudden, 3);
        assert_eq!(cfg.rul.learning_rate, 0.01);
        assert_eq!(cfg.rul_config().seed, 7);
    }

    #[test]
    fn resolved_text_round_trips() {
        let cfg =
            RunConfig::parse("seed = 9\nsg_window = 7\nout_dir = /tmp/x\nreport_dir = /tmp/r")
                .unwrap();
        assert_eq!(
            RunConfig::parse(&cfg.to_text()).unwrap().to_text(),
            cfg.to_text()
        );
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            RunConfig::parse("seed = x"),
            Err(CliError::Config(_))
        ));
        assert!(matches!(
            RunConfig::parse("colour = red"),
            Err(CliError::Config(_))
        ));
        assert!(matches!(
            RunConfig::parse("seed = 1\nseed = 2"),
            Err(CliError::Config(_))
        ));
        assert!(matches!(RunConfig::parse("seed"), Err(CliError::Config(_))));
        assert!(matches!(
            RunConfig::parse("sg_window = 4"),
            Err(CliError::Config(_))
        ));
        assert!(matches!(
            RunConfig::parse("tau_fraction = 1.5"),
            Err(CliError::Config(_))
        ));
        assert!(matches!(
            RunConfig::parse("train_fraction = 0"),
            Err(CliError::Config(_))
        ));
    }

    #[test]
    fn output_dirs_must_differ() {
        let err = RunConfig::parse("data_dir = same\nmodel_dir = same").unwrap_err();
        assert!(matches!(err, CliError::Config(_)));
    }
}
