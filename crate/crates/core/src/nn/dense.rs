use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::loss::softmax;
use super::{axpy, dot, sigmoid};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Softmax,
    Sigmoid,
    Identity,
}

impl fmt::Display for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Activation::Softmax => "softmax",
            Activation::Sigmoid => "sigmoid",
            Activation::Identity => "identity",
        })
    }
}

impl FromStr for Activation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "softmax" => Ok(Activation::Softmax),
            "sigmoid" => Ok(Activation::Sigmoid),
            "identity" => Ok(Activation::Identity),
            other => Err(Error::Format(format!("unknown activation {other:?}"))),
        }
    }
}

/// Fully connected output head, `w` is `out x in` row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseLayer {
    pub input_dim: usize,
    pub output_dim: usize,
    pub activation: Activation,
    pub w: Vec<f64>,
    pub b: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseGrads {
    pub w: Vec<f64>,
    pub b: Vec<f64>,
}

impl DenseGrads {
    pub fn zeros_like(layer: &DenseLayer) -> Self {
        DenseGrads {
            w: vec![0.0; layer.w.len()],
            b: vec![0.0; layer.b.len()],
        }
    }
}

impl DenseLayer {
    pub fn zeros(input_dim: usize, output_dim: usize, activation: Activation) -> Self {
        DenseLayer {
            input_dim,
            output_dim,
            activation,
            w: vec![0.0; input_dim * output_dim],
            b: vec![0.0; output_dim],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.input_dim == 0 || self.output_dim == 0 {
            return Err(Error::Shape("dense dimensions must be positive".into()));
        }
        if self.w.len() != self.input_dim * self.output_dim || self.b.len() != self.output_dim {
            return Err(Error::Shape(format!(
                "dense {}->{} has inconsistent parameter sizes",
                self.input_dim, self.output_dim
            )));
        }
        if !self.w.iter().chain(&self.b).all(|v| v.is_finite()) {
            return Err(Error::Domain("dense parameters must be finite".into()));
        }
        Ok(())
    }

    /// Activated output for one input vector.
    pub fn forward(&self, x: &[f64]) -> Vec<f64> {
        let logits: Vec<f64> = (0..self.output_dim)
            .map(|r| self.b[r] + dot(&self.w[r * self.input_dim..(r + 1) * self.input_dim], x))
            .collect();
        match self.activation {
            Activation::Softmax => softmax(&logits),
            Activation::Sigmoid => logits.into_iter().map(sigmoid).collect(),
            Activation::Identity => logits,
        }
    }

    /// Backward pass for one input given the activated output `y` and the
    /// loss gradient with respect to `y`. Accumulates into `grads` and adds
    /// the input gradient into `d_x`.
    pub fn backward(
        &self,
        x: &[f64],
        y: &[f64],
        d_y: &[f64],
        grads: &mut DenseGrads,
        d_x: &mut [f64],
    ) {
        let d_logits: Vec<f64> = match self.activation {
            Activation::Softmax => {
                let inner = dot(d_y, y);
                y.iter().zip(d_y).map(|(p, g)| p * (g - inner)).collect()
            }
            Activation::Sigmoid => y.iter().zip(d_y).map(|(s, g)| g * s * (1.0 - s)).collect(),
            Activation::Identity => d_y.to_vec(),
        };
        for (r, &d) in d_logits.iter().enumerate() {
            let row = r * self.input_dim..(r + 1) * self.input_dim;
            grads.b[r] += d;
            axpy(d, x, &mut grads.w[row.clone()]);
            axpy(d, &self.w[row], d_x);
        }
    }
}
