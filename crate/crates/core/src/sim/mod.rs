//! Synthetic run-to-failure current traces.
//!
//! The operating current of a laser at constant output power drifts as
//!
//! ```text
//! I(t) = I0 + beta * exp(k t) + noise,    k = P^n * exp(mu0 - E_A / (k_B T))
//! ```
//!
//! where the exponential term is the non-radiative current. A device fails
//! once the noiseless current has risen 20 % above `I0`.

mod csv;

use std::fmt;
use std::str::FromStr;

use rand::Rng as _;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{derive_seed, rng_from_seed, Rng};

pub use self::csv::{read_sequences, write_sequences, SEQUENCE_CSV_HEADER};

/// Boltzmann constant in eV/K.
pub const BOLTZMANN_EV_PER_K: f64 = 8.617_333_262e-5;

/// Relative rise of the operating current over `I0` that marks end of life.
pub const EOL_CURRENT_RISE: f64 = 0.2;

pub const TEMPERATURE_RANGE_K: (f64, f64) = (293.0, 358.0);
pub const OPTICAL_POWER_RANGE_MW: (f64, f64) = (1.0, 10.0);
pub const WAVELENGTH_RANGE_NM: (f64, f64) = (1530.0, 1570.0);
pub const THRESHOLD_CURRENT_RANGE_MA: (f64, f64) = (15.0, 35.0);

/// Noise standard deviation as a fraction of `I0`.
pub const NOISE_STD_FRACTION: f64 = 0.003;

/// Draws allowed before [`sample_scenario`] gives up.
pub const SCENARIO_RETRY_BUDGET: usize = 100;

/// Degrading sequences must span at least this many sampling intervals.
pub const MIN_INTERVALS_TO_FAILURE: f64 = 10.0;

const DERATING_EXPONENT: f64 = 2.0;
const ACTIVATION_ENERGY_EV: (f64, f64) = (0.4, 0.02);
const SCALE_PARAM_STD: f64 = 0.3;

const NORMAL_HORIZON_H: f64 = 1000.0;
const NORMAL_INTERVAL_H: f64 = 1.0;

/// Per-mode sampling of the degradation coefficients.
struct ModeProfile {
    /// Mean and standard deviation of `beta`, as fractions of `I0`.
    beta_fraction: (f64, f64),
    scale_param_mean: f64,
    sampling_interval_h: f64,
    /// Admissible failure times; the upper end doubles as the horizon.
    failure_band_h: (f64, f64),
}

// The scale-parameter means put the failure time of a mid-range device
// (T = 325.5 K, P = 5.5 mW) at the geometric centre of the failure band.
const GRADUAL: ModeProfile = ModeProfile {
    beta_fraction: (0.05, 0.01),
    scale_param_mean: 4.27,
    sampling_interval_h: 1.0,
    failure_band_h: (200.0, 5000.0),
};

const SUDDEN: ModeProfile = ModeProfile {
    beta_fraction: (1e-4, 2e-5),
    scale_param_mean: 9.77,
    sampling_interval_h: 1.0 / 60.0,
    failure_band_h: (10.0, 50.0),
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DegradationMode {
    Normal,
    Sudden,
    Gradual,
}

impl DegradationMode {
    /// Class order used for one-hot encoding and tie breaking.
    pub const ALL: [DegradationMode; 3] = [
        DegradationMode::Normal,
        DegradationMode::Sudden,
        DegradationMode::Gradual,
    ];

    pub fn index(self) -> usize {
        match self {
            DegradationMode::Normal => 0,
            DegradationMode::Sudden => 1,
            DegradationMode::Gradual => 2,
        }
    }

    pub fn from_index(index: usize) -> Option<Self> {
        Self::ALL.get(index).copied()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            DegradationMode::Normal => "normal",
            DegradationMode::Sudden => "sudden",
            DegradationMode::Gradual => "gradual",
        }
    }

    pub fn is_degrading(self) -> bool {
        self != DegradationMode::Normal
    }
}

impl fmt::Display for DegradationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DegradationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "normal" => Ok(DegradationMode::Normal),
            "sudden" => Ok(DegradationMode::Sudden),
            "gradual" => Ok(DegradationMode::Gradual),
            other => Err(Error::Input(format!("unknown degradation mode {other:?}"))),
        }
    }
}

/// Datasheet-level operating point of a laser.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatingConditions {
    pub temperature_k: f64,
    pub optical_power_mw: f64,
    pub wavelength_nm: f64,
    /// `I0` in the current model.
    pub threshold_current_ma: f64,
}

impl OperatingConditions {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("temperature", self.temperature_k),
            ("optical power", self.optical_power_mw),
            ("wavelength", self.wavelength_nm),
            ("threshold current", self.threshold_current_ma),
        ];
        for (name, value) in fields {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::Input(format!(
                    "{name} must be positive, got {value}"
                )));
            }
        }
        Ok(())
    }
}

/// Coefficients of the current model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DegradationParams {
    /// Non-radiative current amplitude `beta` (mA).
    pub beta_ma: f64,
    /// De-rating exponent `n`.
    pub derating_exponent: f64,
    /// Scale parameter `mu0`.
    pub scale_param: f64,
    /// Activation energy `E_A` (eV).
    pub activation_energy_ev: f64,
    pub noise_mean_ma: f64,
    pub noise_std_ma: f64,
}

impl DegradationParams {
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.beta_ma,
            self.derating_exponent,
            self.scale_param,
            self.activation_energy_ev,
            self.noise_mean_ma,
            self.noise_std_ma,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::Input("degradation parameters must be finite".into()));
        }
        if self.beta_ma < 0.0 || self.noise_std_ma < 0.0 || self.activation_energy_ev < 0.0 {
            return Err(Error::Input(
                "beta, noise std and activation energy must be non-negative".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DegradationScenario {
    pub mode: DegradationMode,
    pub conditions: OperatingConditions,
    pub params: DegradationParams,
    pub sampling_interval_h: f64,
    pub horizon_h: f64,
    /// Seed of the measurement-noise stream.
    pub seed: u64,
}

impl DegradationScenario {
    pub fn validate(&self) -> Result<()> {
        self.conditions.validate()?;
        self.params.validate()?;
        if !(self.sampling_interval_h.is_finite() && self.sampling_interval_h > 0.0) {
            return Err(Error::Input("sampling interval must be positive".into()));
        }
        if !(self.horizon_h.is_finite() && self.horizon_h >= self.sampling_interval_h) {
            return Err(Error::Input(
                "horizon must be at least one sampling interval".into(),
            ));
        }
        Ok(())
    }

    pub fn rate_k(&self) -> Result<f64> {
        compute_rate_k(&self.conditions, &self.params)
    }
}

/// One simulated (or loaded) current trace.
#[derive(Debug, Clone, PartialEq)]
pub struct RunToFailureSequence {
    pub id: u64,
    pub mode_label: DegradationMode,
    pub conditions: OperatingConditions,
    pub times_h: Vec<f64>,
    pub currents_ma: Vec<f64>,
    /// Failure time `t_f`; `None` for normal operation.
    pub failure_time_h: Option<f64>,
    /// Generating scenario. Absent for sequences read back from CSV.
    pub scenario: Option<DegradationScenario>,
}

impl RunToFailureSequence {
    pub fn len(&self) -> usize {
        self.times_h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times_h.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        if self.times_h.len() != self.currents_ma.len() {
            return Err(Error::Input(format!(
                "sequence {}: {} times but {} currents",
                self.id,
                self.times_h.len(),
                self.currents_ma.len()
            )));
        }
        if self.times_h.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Input(format!(
                "sequence {}: times must be strictly increasing",
                self.id
            )));
        }
        if let Some(tf) = self.failure_time_h {
            if !(tf.is_finite() && tf > 0.0) {
                return Err(Error::Input(format!(
                    "sequence {}: failure time must be positive, got {tf}",
                    self.id
                )));
            }
        }
        Ok(())
    }
}

/// Degradation rate `k = P^n exp(mu0 - E_A / (k_B T))` in 1/h.
pub fn compute_rate_k(conditions: &OperatingConditions, params: &DegradationParams) -> Result<f64> {
    let exponent = params.scale_param
        - params.activation_energy_ev / (BOLTZMANN_EV_PER_K * conditions.temperature_k);
    let k = conditions.optical_power_mw.powf(params.derating_exponent) * exponent.exp();
    if k.is_finite() {
        Ok(k)
    } else {
        Err(Error::Domain(format!(
            "degradation rate overflowed (exponent {exponent})"
        )))
    }
}

/// `I0 + beta exp(k t) + noise_sample`.
pub fn current_at(t_h: f64, scenario: &DegradationScenario, noise_sample: f64) -> Result<f64> {
    if !(t_h >= 0.0) {
        return Err(Error::Input(format!(
            "time must be non-negative, got {t_h}"
        )));
    }
    let k = scenario.rate_k()?;
    let current = scenario.conditions.threshold_current_ma
        + scenario.params.beta_ma * (k * t_h).exp()
        + noise_sample;
    if current.is_finite() {
        Ok(current)
    } else {
        Err(Error::Domain(format!("current overflowed at t = {t_h} h")))
    }
}

/// Earliest time at which the noiseless current reaches `(1 + EOL_CURRENT_RISE) * I0`.
///
/// Returns `None` when `beta` is zero or the crossing lies beyond the horizon.
/// A device already past the threshold at `t = 0` fails at `Some(0.0)`.
pub fn failure_time(scenario: &DegradationScenario) -> Option<f64> {
    let beta = scenario.params.beta_ma;
    if !(beta > 0.0) {
        return None;
    }
    let margin = EOL_CURRENT_RISE * scenario.conditions.threshold_current_ma;
    if beta >= margin {
        return Some(0.0);
    }
    let k = scenario.rate_k().ok().filter(|k| *k > 0.0)?;
    let tf = (margin / beta).ln() / k;
    (tf.is_finite() && tf <= scenario.horizon_h).then_some(tf)
}

/// Samples the current model on a uniform grid and adds Gaussian noise.
///
/// Degrading sequences stop at the first sample at or after the failure
/// time; normal sequences cover the whole horizon.
pub fn generate_sequence(scenario: &DegradationScenario) -> Result<RunToFailureSequence> {
    scenario.validate()?;
    let dt = scenario.sampling_interval_h;

    let (last_index, failure_time_h) = if scenario.mode.is_degrading() {
        let tf = failure_time(scenario).ok_or_else(|| {
            Error::ScenarioRejected(format!(
                "{} scenario never reaches end of life within {} h",
                scenario.mode, scenario.horizon_h
            ))
        })?;
        if tf < MIN_INTERVALS_TO_FAILURE * dt {
            return Err(Error::ScenarioRejected(format!(
                "failure at {tf} h is shorter than {MIN_INTERVALS_TO_FAILURE} sampling intervals"
            )));
        }
        let mut last = (tf / dt).ceil() as usize;
        if last > 0 && (last - 1) as f64 * dt >= tf {
            last -= 1;
        }
        while (last as f64) * dt < tf {
            last += 1;
        }
        (last, Some(tf))
    } else {
        ((scenario.horizon_h / dt + 1e-9).floor() as usize, None)
    };

    let noise = Normal::new(scenario.params.noise_mean_ma, scenario.params.noise_std_ma)
        .map_err(|e| Error::Input(format!("noise distribution: {e}")))?;
    let mut rng = rng_from_seed(scenario.seed);

    let mut times_h = Vec::with_capacity(last_index + 1);
    let mut currents_ma = Vec::with_capacity(last_index + 1);
    for i in 0..=last_index {
        let t = i as f64 * dt;
        times_h.push(t);
        currents_ma.push(current_at(t, scenario, noise.sample(&mut rng))?);
    }

    Ok(RunToFailureSequence {
        id: 0,
        mode_label: scenario.mode,
        conditions: scenario.conditions,
        times_h,
        currents_ma,
        failure_time_h,
        scenario: Some(*scenario),
    })
}

fn truncated_normal(rng: &mut Rng, mean: f64, std: f64) -> f64 {
    if std == 0.0 {
        return mean;
    }
    let normal = Normal::new(mean, std).expect("finite positive std");
    loop {
        let x = normal.sample(rng);
        if (x - mean).abs() <= 3.0 * std {
            return x;
        }
    }
}

fn uniform(rng: &mut Rng, (lo, hi): (f64, f64)) -> f64 {
    rng.random_range(lo..=hi)
}

fn draw_conditions(rng: &mut Rng) -> OperatingConditions {
    OperatingConditions {
        temperature_k: uniform(rng, TEMPERATURE_RANGE_K),
        optical_power_mw: uniform(rng, OPTICAL_POWER_RANGE_MW),
        wavelength_nm: uniform(rng, WAVELENGTH_RANGE_NM),
        threshold_current_ma: uniform(rng, THRESHOLD_CURRENT_RANGE_MA),
    }
}

/// Draws one scenario for `mode` from the datasheet ranges and per-mode
/// coefficient distributions. Degrading draws are kept only when their
/// failure time lands in the mode's band.
pub fn sample_scenario(mode: DegradationMode, seed: u64) -> Result<DegradationScenario> {
    let mut rng = rng_from_seed(seed);

    for _ in 0..SCENARIO_RETRY_BUDGET {
        let conditions = draw_conditions(&mut rng);
        let i0 = conditions.threshold_current_ma;
        let noise_std_ma = NOISE_STD_FRACTION * i0;

        let profile = match mode {
            DegradationMode::Normal => {
                let params = DegradationParams {
                    beta_ma: 0.0,
                    derating_exponent: DERATING_EXPONENT,
                    scale_param: GRADUAL.scale_param_mean,
                    activation_energy_ev: ACTIVATION_ENERGY_EV.0,
                    noise_mean_ma: 0.0,
                    noise_std_ma,
                };
                return Ok(DegradationScenario {
                    mode,
                    conditions,
                    params,
                    sampling_interval_h: NORMAL_INTERVAL_H,
                    horizon_h: NORMAL_HORIZON_H,
                    seed: rng.random(),
                });
            }
            DegradationMode::Sudden => &SUDDEN,
            DegradationMode::Gradual => &GRADUAL,
        };

        let (beta_mean, beta_std) = profile.beta_fraction;
        let params = DegradationParams {
            beta_ma: truncated_normal(&mut rng, beta_mean * i0, beta_std * i0),
            derating_exponent: DERATING_EXPONENT,
            scale_param: truncated_normal(&mut rng, profile.scale_param_mean, SCALE_PARAM_STD),
            activation_energy_ev: truncated_normal(
                &mut rng,
                ACTIVATION_ENERGY_EV.0,
                ACTIVATION_ENERGY_EV.1,
            ),
            noise_mean_ma: 0.0,
            noise_std_ma,
        };
        let scenario = DegradationScenario {
            mode,
            conditions,
            params,
            sampling_interval_h: profile.sampling_interval_h,
            horizon_h: profile.failure_band_h.1,
            seed: rng.random(),
        };

        let accepted = failure_time(&scenario).is_some_and(|tf| {
            tf >= profile.failure_band_h.0
                && tf >= MIN_INTERVALS_TO_FAILURE * profile.sampling_interval_h
        });
        if accepted {
            return Ok(scenario);
        }
    }

    Err(Error::Generation {
        mode: mode.as_str(),
        attempts: SCENARIO_RETRY_BUDGET,
    })
}

/// Number of sequences to generate per mode.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModeCounts {
    pub normal: usize,
    pub sudden: usize,
    pub gradual: usize,
}

impl ModeCounts {
    pub fn new(normal: usize, sudden: usize, gradual: usize) -> Self {
        ModeCounts {
            normal,
            sudden,
            gradual,
        }
    }

    pub fn get(&self, mode: DegradationMode) -> usize {
        match mode {
            DegradationMode::Normal => self.normal,
            DegradationMode::Sudden => self.sudden,
            DegradationMode::Gradual => self.gradual,
        }
    }

    pub fn total(&self) -> usize {
        self.normal + self.sudden + self.gradual
    }
}

/// Seed of the `index`-th sequence of `mode`. Independent of the other
/// modes' counts.
pub fn sequence_seed(base_seed: u64, mode: DegradationMode, index: usize) -> u64 {
    derive_seed(base_seed, ((mode.index() as u64) << 32) | index as u64)
}

/// Generates `counts` sequences, normal first, then sudden, then gradual.
/// Sequence ids are assigned consecutively from 0 in that order.
pub fn generate_dataset(counts: ModeCounts, base_seed: u64) -> Result<Vec<RunToFailureSequence>> {
    let mut out = Vec::with_capacity(counts.total());
    for mode in DegradationMode::ALL {
        for index in 0..counts.get(mode) {
            let scenario = sample_scenario(mode, sequence_seed(base_seed, mode, index))?;
            let mut seq = generate_sequence(&scenario)?;
            seq.id = out.len() as u64;
            out.push(seq);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use approx::assert_relative_eq;

    use super::*;

    fn conditions(p: f64, t: f64, i0: f64) -> OperatingConditions {
        OperatingConditions {
            temperature_k: t,
            optical_power_mw: p,
            wavelength_nm: 1550.0,
            threshold_current_ma: i0,
        }
    }

    fn params(beta: f64, n: f64, mu0: f64, ea: f64) -> DegradationParams {
        DegradationParams {
            beta_ma: beta,
            derating_exponent: n,
            scale_param: mu0,
            activation_energy_ev: ea,
            noise_mean_ma: 0.0,
            noise_std_ma: 0.0,
        }
    }

    /// I0 = 20 mA, beta = 0.5 mA, k = 0.01 / h.
    fn reference_scenario(mode: DegradationMode, horizon: f64) -> DegradationScenario {
        DegradationScenario {
            mode,
            conditions: conditions(1.0, 300.0, 20.0),
            params: params(0.5, 2.0, 0.01f64.ln(), 0.0),
            sampling_interval_h: 1.0,
            horizon_h: horizon,
            seed: 7,
        }
    }

    #[test]
    fn rate_k_examples() {
        for n in [0.0, 1.0, 3.5] {
            let k = compute_rate_k(&conditions(1.0, 310.0, 20.0), &params(0.0, n, 0.0, 0.0));
            assert_eq!(k.unwrap(), 1.0);
        }
        // exp(-0.4 / (k_B * 300))
        let k = compute_rate_k(&conditions(1.0, 300.0, 20.0), &params(0.0, 2.0, 0.0, 0.4)).unwrap();
        assert_relative_eq!(k, 1.906_758_770_883_301e-7, max_relative = 1e-12);
        let k =
            compute_rate_k(&conditions(4.0, 123.0, 20.0), &params(0.0, 0.5, -3.0, 0.0)).unwrap();
        assert_relative_eq!(k, 0.099_574_136_735_727_89, max_relative = 1e-12);
    }

    #[test]
    fn rate_k_overflow_is_domain_error() {
        let err = compute_rate_k(&conditions(1.0, 300.0, 20.0), &params(0.0, 1.0, 800.0, 0.0));
        assert!(matches!(err, Err(Error::Domain(_))));
    }

    #[test]
    fn current_examples() {
        let mut s = reference_scenario(DegradationMode::Gradual, 1000.0);
        assert_relative_eq!(
            current_at(100.0, &s, 0.0).unwrap(),
            21.359_140_914_229_524,
            max_relative = 1e-12
        );
        assert_eq!(current_at(0.0, &s, 0.0).unwrap(), 20.5);
        s.params.beta_ma = 0.0;
        assert_eq!(current_at(1234.5, &s, 0.0).unwrap(), 20.0);
        assert!(current_at(-1.0, &s, 0.0).is_err());
    }

    #[test]
    fn failure_time_examples() {
        let mut s = reference_scenario(DegradationMode::Gradual, 1000.0);
        assert_relative_eq!(
            failure_time(&s).unwrap(),
            207.944_154_167_983_58,
            max_relative = 1e-12
        );
        s.horizon_h = 200.0;
        assert_eq!(failure_time(&s), None);
        s.horizon_h = 1000.0;
        s.params.beta_ma = 0.0;
        assert_eq!(failure_time(&s), None);
        s.params.beta_ma = 4.0;
        assert_eq!(failure_time(&s), Some(0.0));
    }

    #[test]
    fn degrading_sequence_ends_at_first_sample_past_failure() {
        let s = reference_scenario(DegradationMode::Gradual, 1000.0);
        let seq = generate_sequence(&s).unwrap();
        assert_eq!(seq.len(), 209);
        assert_eq!(*seq.times_h.last().unwrap(), 208.0);
        assert_eq!(seq.failure_time_h, failure_time(&s));
    }

    #[test]
    fn immediate_failure_is_rejected() {
        let mut s = reference_scenario(DegradationMode::Sudden, 1000.0);
        s.params.beta_ma = 4.0;
        assert!(matches!(
            generate_sequence(&s),
            Err(Error::ScenarioRejected(_))
        ));
        s.params.beta_ma = 0.0;
        assert!(matches!(
            generate_sequence(&s),
            Err(Error::ScenarioRejected(_))
        ));
    }

    #[test]
    fn noiseless_normal_sequence_is_flat() {
        let mut s = reference_scenario(DegradationMode::Normal, 50.0);
        s.params.beta_ma = 0.0;
        let seq = generate_sequence(&s).unwrap();
        assert_eq!(seq.len(), 51);
        assert!(seq.currents_ma.iter().all(|&c| c == 20.0));
        assert_eq!(seq.failure_time_h, None);
    }

    #[test]
    fn generation_is_deterministic() {
        let s = sample_scenario(DegradationMode::Sudden, 99).unwrap();
        assert_eq!(s, sample_scenario(DegradationMode::Sudden, 99).unwrap());
        let a = generate_sequence(&s).unwrap();
        let b = generate_sequence(&s).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn normal_draws_have_no_degradation() {
        for seed in 0..20 {
            let s = sample_scenario(DegradationMode::Normal, seed).unwrap();
            assert_eq!(s.params.beta_ma, 0.0);
            assert_eq!(failure_time(&s), None);
        }
    }

    #[test]
    fn gradual_failure_times_stay_in_band() {
        for seed in 0..1000 {
            let s = sample_scenario(DegradationMode::Gradual, seed).unwrap();
            let tf = failure_time(&s).unwrap();
            assert!((200.0..=5000.0).contains(&tf), "seed {seed}: t_f = {tf}");
        }
    }

    #[test]
    fn dataset_bookkeeping() {
        assert!(generate_dataset(ModeCounts::new(0, 0, 0), 1)
            .unwrap()
            .is_empty());
        let data = generate_dataset(ModeCounts::new(3, 2, 4), 42).unwrap();
        assert_eq!(data.len(), 9);
        for mode in DegradationMode::ALL {
            let n = data.iter().filter(|s| s.mode_label == mode).count();
            assert_eq!(n, ModeCounts::new(3, 2, 4).get(mode));
        }
        let ids: Vec<u64> = data.iter().map(|s| s.id).collect();
        assert_eq!(ids, (0..9).collect::<Vec<_>>());
    }

    #[test]
    fn mode_parsing() {
        for mode in DegradationMode::ALL {
            assert_eq!(mode.as_str().parse::<DegradationMode>().unwrap(), mode);
            assert_eq!(DegradationMode::from_index(mode.index()), Some(mode));
        }
        assert!("rapid".parse::<DegradationMode>().is_err());
    }
}
