//! Central finite-difference verification of the analytic gradients.

use rand::seq::index::sample;

use super::network::{Gradients, LstmNetwork, Target};
use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

/// Networks with more parameters than this are checked on a random subset.
pub const FULL_CHECK_LIMIT: usize = 10_000;

/// Size of the random subset for large networks.
pub const SUBSET_SIZE: usize = 2_000;

/// Denominator floor of the relative error, so parameters whose gradient is
/// numerically zero are judged by absolute error instead.
pub const RELATIVE_ERROR_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct GradCheckReport {
    pub checked: usize,
    pub max_relative_error: f64,
    pub mean_relative_error: f64,
    /// Flat index of the worst parameter.
    pub worst_index: usize,
    pub tolerance: f64,
}

impl GradCheckReport {
    pub fn passed(&self) -> bool {
        self.max_relative_error < self.tolerance
    }
}

pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(RELATIVE_ERROR_FLOOR)
}

fn locate(tensors: &[usize], mut flat: usize) -> (usize, usize) {
    for (t, &len) in tensors.iter().enumerate() {
        if flat < len {
            return (t, flat);
        }
        flat -= len;
    }
    unreachable!("flat index within parameter count")
}

/// Compares BPTT gradients of the loss on `(inputs, target)` against central
/// differences with the given `step`.
pub fn gradient_check(
    net: &LstmNetwork,
    inputs: &[f64],
    steps: usize,
    target: &Target,
    step: f64,
    tolerance: f64,
    seed: u64,
) -> Result<GradCheckReport> {
    if !(step > 0.0) {
        return Err(Error::Input(format!(
            "finite-difference step must be positive, got {step}"
        )));
    }
    let mut analytic = Gradients::zeros_like(net);
    net.accumulate_gradients(inputs, steps, target, &mut analytic)?;
    let analytic_flat: Vec<f64> = analytic
        .tensors()
        .iter()
        .flat_map(|t| t.iter().copied())
        .collect();

    let total = net.parameter_count();
    let indices: Vec<usize> = if total > FULL_CHECK_LIMIT {
        let mut rng = rng_from_seed(seed);
        let mut picked = sample(&mut rng, total, SUBSET_SIZE).into_vec();
        picked.sort_unstable();
        picked
    } else {
        (0..total).collect()
    };

    let lens: Vec<usize> = net.tensors().iter().map(|t| t.len()).collect();
    let mut probe = net.clone();
    let mut loss_at = |flat: usize, value: f64| -> Result<f64> {
        let (t, i) = locate(&lens, flat);
        let original = probe.tensors()[t][i];
        probe.tensors_mut()[t][i] = value;
        let out = probe.forward(inputs, steps)?.output;
        let loss = probe.loss(&out, target);
        probe.tensors_mut()[t][i] = original;
        loss
    };

    let mut max_err: f64 = 0.0;
    let mut sum_err = 0.0;
    let mut worst = 0;
    for &flat in &indices {
        let (t, i) = locate(&lens, flat);
        let theta = net.tensors()[t][i];
        let numeric = (loss_at(flat, theta + step)? - loss_at(flat, theta - step)?) / (2.0 * step);
        let err = relative_error(analytic_flat[flat], numeric);
        sum_err += err;
        if err > max_err {
            max_err = err;
            worst = flat;
        }
    }

    Ok(GradCheckReport {
        checked: indices.len(),
        max_relative_error: max_err,
        mean_relative_error: if indices.is_empty() {
            0.0
        } else {
            sum_err / indices.len() as f64
        },
        worst_index: worst,
        tolerance,
    })
}
