//! A small double-precision LSTM engine: stacked LSTM layers, a dense
//! head, softmax/sigmoid outputs, cross-entropy and MSE losses, exact
//! backpropagation through time, Adam, and a finite-difference checker.

mod adam;
mod dense;
mod gradcheck;
mod loss;
mod lstm;
mod network;

pub use self::adam::{adam_step, AdamConfig, AdamState};
pub use self::dense::{Activation, DenseGrads, DenseLayer};
pub use self::gradcheck::{
    gradient_check, relative_error, GradCheckReport, FULL_CHECK_LIMIT, RELATIVE_ERROR_FLOOR,
    SUBSET_SIZE,
};
pub use self::loss::{cross_entropy, mse, softmax, PROBABILITY_FLOOR};
pub use self::lstm::{LstmCache, LstmGrads, LstmLayer, GATE_ORDER};
pub use self::network::{
    Architecture, ForwardCache, Gradients, LstmNetwork, NetworkMeta, Output, Readout, Target,
    FORMAT_VERSION,
};

/// Global-norm threshold for gradient clipping during training.
pub const CLIP_NORM: f64 = 5.0;

#[inline]
pub(crate) fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Dot product with four independent accumulators.
#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [0.0; 4];
    let mut ca = a.chunks_exact(4);
    let mut cb = b.chunks_exact(4);
    for (x, y) in (&mut ca).zip(&mut cb) {
        acc[0] += x[0] * y[0];
        acc[1] += x[1] * y[1];
        acc[2] += x[2] * y[2];
        acc[3] += x[3] * y[3];
    }
    let tail: f64 = ca
        .remainder()
        .iter()
        .zip(cb.remainder())
        .map(|(x, y)| x * y)
        .sum();
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// `y += alpha * x`
#[inline]
pub(crate) fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigmoid_is_stable() {
        assert_eq!(sigmoid(0.0), 0.5);
        assert!(sigmoid(-800.0) >= 0.0 && sigmoid(-800.0).is_finite());
        assert_eq!(sigmoid(800.0), 1.0);
    }

    #[test]
    fn dot_matches_naive() {
        let a: Vec<f64> = (0..11).map(|v| v as f64 * 0.5).collect();
        let b: Vec<f64> = (0..11).map(|v| 3.0 - v as f64).collect();
        let naive: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
        assert!((dot(&a, &b) - naive).abs() < 1e-12);
    }
}
