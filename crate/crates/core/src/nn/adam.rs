use serde::{Deserialize, Serialize};

use super::network::{Gradients, LstmNetwork};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig {
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

/// Moment estimates, one buffer per parameter tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub config: AdamConfig,
    pub step: u64,
    pub first_moment: Vec<Vec<f64>>,
    pub second_moment: Vec<Vec<f64>>,
}

impl AdamState {
    pub fn new(net: &LstmNetwork, config: AdamConfig) -> Self {
        let zeros: Vec<Vec<f64>> = net.tensors().iter().map(|t| vec![0.0; t.len()]).collect();
        AdamState {
            config,
            step: 0,
            first_moment: zeros.clone(),
            second_moment: zeros,
        }
    }
}

/// One bias-corrected Adam update of `net` in place.
pub fn adam_step(net: &mut LstmNetwork, grads: &Gradients, state: &mut AdamState) -> Result<()> {
    let grad_tensors = grads.tensors();
    let params = net.tensors_mut();
    let shapes_match = params.len() == grad_tensors.len()
        && params.len() == state.first_moment.len()
        && params
            .iter()
            .zip(&grad_tensors)
            .zip(&state.first_moment)
            .all(|((p, g), m)| p.len() == g.len() && p.len() == m.len());
    if !shapes_match {
        return Err(Error::Shape(
            "Adam state, gradients and parameters differ in shape".into(),
        ));
    }

    state.step += 1;
    let AdamConfig {
        learning_rate,
        beta1,
        beta2,
        epsilon,
    } = state.config;
    let bias1 = 1.0 - beta1.powi(state.step as i32);
    let bias2 = 1.0 - beta2.powi(state.step as i32);

    for (((p, g), m), v) in params
        .into_iter()
        .zip(grad_tensors)
        .zip(&mut state.first_moment)
        .zip(&mut state.second_moment)
    {
        for i in 0..p.len() {
            m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
            v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
            let m_hat = m[i] / bias1;
            let v_hat = v[i] / bias2;
            p[i] -= learning_rate * m_hat / (v_hat.sqrt() + epsilon);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::{Activation, Architecture, NetworkMeta, Readout};

    fn net() -> LstmNetwork {
        let arch = Architecture {
            input_dim: 2,
            hidden_dims: vec![2],
            output_dim: 1,
            activation: Activation::Sigmoid,
            readout: Readout::PerStep,
        };
        LstmNetwork::new(
            &arch,
            NetworkMeta {
                purpose: "adam".into(),
                input_channels: vec![],
            },
            5,
        )
        .unwrap()
    }

    fn constant_grads(net: &LstmNetwork) -> Gradients {
        let mut g = Gradients::zeros_like(net);
        for (k, t) in g.tensors_mut().into_iter().enumerate() {
            for (i, v) in t.iter_mut().enumerate() {
                *v = if (i + k) % 2 == 0 { 0.37 } else { -2.5 };
            }
        }
        g
    }

    #[test]
    fn zero_gradient_leaves_parameters() {
        let mut n = net();
        let before = n.clone();
        let mut state = AdamState::new(&n, AdamConfig::default());
        adam_step(&mut n, &Gradients::zeros_like(&before), &mut state).unwrap();
        assert_eq!(n, before);
        assert_eq!(state.step, 1);
    }

    #[test]
    fn first_step_moves_by_learning_rate() {
        let mut n = net();
        let before = n.clone();
        let g = constant_grads(&n);
        let mut state = AdamState::new(&n, AdamConfig::default());
        adam_step(&mut n, &g, &mut state).unwrap();
        for ((p1, p0), gt) in n.tensors().iter().zip(before.tensors()).zip(g.tensors()) {
            for ((a, b), gi) in p1.iter().zip(p0).zip(gt) {
                let expected = -1e-3 * gi.signum();
                assert!(((a - b) - expected).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn constant_gradient_updates_do_not_grow() {
        let mut n = net();
        let g = constant_grads(&n);
        let mut state = AdamState::new(&n, AdamConfig::default());
        let p0 = n.clone();
        adam_step(&mut n, &g, &mut state).unwrap();
        let p1 = n.clone();
        adam_step(&mut n, &g, &mut state).unwrap();
        for ((a, b), c) in p0.tensors().iter().zip(p1.tensors()).zip(n.tensors()) {
            for ((x0, x1), x2) in a.iter().zip(b).zip(c) {
                assert!((x2 - x1).abs() <= (x1 - x0).abs() * (1.0 + 1e-6));
            }
        }
    }

    #[test]
    fn shape_mismatch() {
        let mut n = net();
        let mut state = AdamState::new(&n, AdamConfig::default());
        let mut g = Gradients::zeros_like(&n);
        g.dense.b.push(0.0);
        assert!(matches!(
            adam_step(&mut n, &g, &mut state),
            Err(Error::Shape(_))
        ));
    }
}
