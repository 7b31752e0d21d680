use crate::error::{Error, Result};

/// Probability floor applied before taking logarithms.
pub const PROBABILITY_FLOOR: f64 = 1e-12;

/// Shift-stabilized softmax.
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|z| (z - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / total).collect()
}

/// `-ln p[target]` with the probability floored at [`PROBABILITY_FLOOR`].
pub fn cross_entropy(probs: &[f64], target: usize) -> Result<f64> {
    let p = probs
        .get(target)
        .ok_or_else(|| Error::Shape(format!("target class {target} out of {}", probs.len())))?;
    Ok(-p.max(PROBABILITY_FLOOR).ln())
}

/// Gradient of [`cross_entropy`] with respect to the probabilities.
pub fn cross_entropy_grad(probs: &[f64], target: usize) -> Result<Vec<f64>> {
    let p = *probs
        .get(target)
        .ok_or_else(|| Error::Shape(format!("target class {target} out of {}", probs.len())))?;
    let mut g = vec![0.0; probs.len()];
    if p > PROBABILITY_FLOOR {
        g[target] = -1.0 / p;
    }
    Ok(g)
}

pub fn mse(pred: &[f64], label: &[f64]) -> Result<f64> {
    if pred.len() != label.len() || pred.is_empty() {
        return Err(Error::Shape(format!(
            "mse over {} predictions and {} labels",
            pred.len(),
            label.len()
        )));
    }
    let sum: f64 = pred.iter().zip(label).map(|(p, l)| (p - l) * (p - l)).sum();
    Ok(sum / pred.len() as f64)
}

pub fn mse_grad(pred: &[f64], label: &[f64]) -> Result<Vec<f64>> {
    if pred.len() != label.len() || pred.is_empty() {
        return Err(Error::Shape(format!(
            "mse over {} predictions and {} labels",
            pred.len(),
            label.len()
        )));
    }
    let scale = 2.0 / pred.len() as f64;
    Ok(pred
        .iter()
        .zip(label)
        .map(|(p, l)| scale * (p - l))
        .collect())
}
