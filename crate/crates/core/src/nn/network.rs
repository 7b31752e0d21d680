use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::dense::{Activation, DenseGrads, DenseLayer};
use super::loss::{cross_entropy, cross_entropy_grad, mse, mse_grad};
use super::lstm::{LstmCache, LstmGrads, LstmLayer, GATE_ORDER};
use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

/// Current model file version.
pub const FORMAT_VERSION: u32 = 1;

/// Which hidden states feed the dense head.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Readout {
    /// Only the last step; one output vector per sequence.
    Final,
    /// Every step; one output vector per time step.
    PerStep,
}

/// Shape of a network, used to build freshly initialized parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Architecture {
    pub input_dim: usize,
    pub hidden_dims: Vec<usize>,
    pub output_dim: usize,
    pub activation: Activation,
    pub readout: Readout,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkMeta {
    pub purpose: String,
    pub input_channels: Vec<String>,
}

/// Stacked LSTM layers followed by a dense head.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LstmNetwork {
    pub meta: NetworkMeta,
    pub readout: Readout,
    pub lstm_layers: Vec<LstmLayer>,
    pub dense: DenseLayer,
}

/// Network output: `rows x cols`, one row for [`Readout::Final`] and one per
/// step for [`Readout::PerStep`].
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub rows: usize,
    pub cols: usize,
    pub values: Vec<f64>,
}

impl Output {
    pub fn row(&self, r: usize) -> &[f64] {
        &self.values[r * self.cols..(r + 1) * self.cols]
    }
}

#[derive(Debug, Clone)]
pub struct ForwardCache {
    pub layers: Vec<LstmCache>,
    pub output: Output,
}

/// Parameter gradients laid out like [`LstmNetwork`].
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub lstm_layers: Vec<LstmGrads>,
    pub dense: DenseGrads,
}

impl Gradients {
    pub fn zeros_like(net: &LstmNetwork) -> Self {
        Gradients {
            lstm_layers: net.lstm_layers.iter().map(LstmGrads::zeros_like).collect(),
            dense: DenseGrads::zeros_like(&net.dense),
        }
    }

    /// Parameter tensors in canonical order: per layer `w, u, b`, then the
    /// head's `w, b`.
    pub fn tensors(&self) -> Vec<&[f64]> {
        let mut out: Vec<&[f64]> = Vec::new();
        for l in &self.lstm_layers {
            out.extend([l.w.as_slice(), &l.u, &l.b]);
        }
        out.extend([self.dense.w.as_slice(), &self.dense.b]);
        out
    }

    pub fn tensors_mut(&mut self) -> Vec<&mut [f64]> {
        let mut out: Vec<&mut [f64]> = Vec::new();
        for l in &mut self.lstm_layers {
            out.push(&mut l.w);
            out.push(&mut l.u);
            out.push(&mut l.b);
        }
        out.push(&mut self.dense.w);
        out.push(&mut self.dense.b);
        out
    }

    pub fn scale(&mut self, factor: f64) {
        for t in self.tensors_mut() {
            t.iter_mut().for_each(|v| *v *= factor);
        }
    }

    pub fn add(&mut self, other: &Gradients) {
        for (a, b) in self.tensors_mut().into_iter().zip(other.tensors()) {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
        }
    }

    pub fn global_norm(&self) -> f64 {
        self.tensors()
            .iter()
            .flat_map(|t| t.iter())
            .map(|v| v * v)
            .sum::<f64>()
            .sqrt()
    }

    /// Rescales so the global L2 norm is at most `max_norm`. Returns the norm
    /// before clipping.
    pub fn clip_global_norm(&mut self, max_norm: f64) -> f64 {
        let norm = self.global_norm();
        if norm > max_norm {
            self.scale(max_norm / norm);
        }
        norm
    }
}

/// Supervision for one input sequence.
#[derive(Debug, Clone, PartialEq)]
pub enum Target {
    /// Class index against a final-step softmax output.
    Class(usize),
    /// Values for every output entry, compared by mean squared error.
    Values(Vec<f64>),
}

impl LstmNetwork {
    /// All parameters zero, including gate biases.
    pub fn zeros(arch: &Architecture, meta: NetworkMeta) -> Self {
        let mut lstm_layers = Vec::with_capacity(arch.hidden_dims.len());
        let mut fan = arch.input_dim;
        for &h in &arch.hidden_dims {
            lstm_layers.push(LstmLayer::zeros(fan, h));
            fan = h;
        }
        LstmNetwork {
            meta,
            readout: arch.readout,
            lstm_layers,
            dense: DenseLayer::zeros(fan, arch.output_dim, arch.activation),
        }
    }

    /// Uniform weights in `[-1/sqrt(fan_in), 1/sqrt(fan_in)]`, zero biases
    /// except the forget gate, which starts at 1. The LSTM fan-in counts the
    /// input and recurrent connections of a gate unit.
    pub fn new(arch: &Architecture, meta: NetworkMeta, seed: u64) -> Result<Self> {
        if arch.hidden_dims.is_empty() {
            return Err(Error::Shape("network needs at least one LSTM layer".into()));
        }
        let mut net = Self::zeros(arch, meta);
        let mut rng = rng_from_seed(seed);
        for layer in &mut net.lstm_layers {
            let bound = 1.0 / ((layer.input_dim + layer.hidden_dim) as f64).sqrt();
            for v in layer.w.iter_mut().chain(layer.u.iter_mut()) {
                *v = rng.random_range(-bound..=bound);
            }
            let h = layer.hidden_dim;
            layer.b[h..2 * h].iter_mut().for_each(|b| *b = 1.0);
        }
        let bound = 1.0 / (net.dense.input_dim as f64).sqrt();
        for v in &mut net.dense.w {
            *v = rng.random_range(-bound..=bound);
        }
        net.validate()?;
        Ok(net)
    }

    pub fn input_dim(&self) -> usize {
        self.lstm_layers.first().map_or(0, |l| l.input_dim)
    }

    pub fn output_dim(&self) -> usize {
        self.dense.output_dim
    }

    pub fn parameter_count(&self) -> usize {
        self.tensors().iter().map(|t| t.len()).sum()
    }

    pub fn validate(&self) -> Result<()> {
        if self.lstm_layers.is_empty() {
            return Err(Error::Shape("network needs at least one LSTM layer".into()));
        }
        for layer in &self.lstm_layers {
            layer.validate()?;
        }
        for pair in self.lstm_layers.windows(2) {
            if pair[1].input_dim != pair[0].hidden_dim {
                return Err(Error::Shape(format!(
                    "LSTM layer of width {} feeds a layer expecting {}",
                    pair[0].hidden_dim, pair[1].input_dim
                )));
            }
        }
        self.dense.validate()?;
        let last = self.lstm_layers.last().expect("non-empty").hidden_dim;
        if self.dense.input_dim != last {
            return Err(Error::Shape(format!(
                "dense head expects {} inputs but the last LSTM layer has {last}",
                self.dense.input_dim
            )));
        }
        Ok(())
    }

    pub fn tensors(&self) -> Vec<&[f64]> {
        let mut out: Vec<&[f64]> = Vec::new();
        for l in &self.lstm_layers {
            out.extend([l.w.as_slice(), &l.u, &l.b]);
        }
        out.extend([self.dense.w.as_slice(), &self.dense.b]);
        out
    }

    pub fn tensors_mut(&mut self) -> Vec<&mut [f64]> {
        let mut out: Vec<&mut [f64]> = Vec::new();
        for l in &mut self.lstm_layers {
            out.push(&mut l.w);
            out.push(&mut l.u);
            out.push(&mut l.b);
        }
        out.push(&mut self.dense.w);
        out.push(&mut self.dense.b);
        out
    }

    /// Forward pass over `inputs` (`steps x input_dim`, row-major).
    pub fn forward(&self, inputs: &[f64], steps: usize) -> Result<ForwardCache> {
        let mut layers: Vec<LstmCache> = Vec::with_capacity(self.lstm_layers.len());
        for layer in &self.lstm_layers {
            let x = layers.last().map_or(inputs, |c| c.hidden.as_slice());
            layers.push(layer.forward(x, steps)?);
        }
        let top = layers.last().expect("validated non-empty");
        let h = self.dense.input_dim;
        let cols = self.dense.output_dim;
        let output = match self.readout {
            Readout::Final => Output {
                rows: 1,
                cols,
                values: self.dense.forward(&top.hidden[(steps - 1) * h..]),
            },
            Readout::PerStep => Output {
                rows: steps,
                cols,
                values: top
                    .hidden
                    .chunks_exact(h)
                    .flat_map(|ht| self.dense.forward(ht))
                    .collect(),
            },
        };
        Ok(ForwardCache { layers, output })
    }

    /// Backpropagation through the head and every LSTM layer, accumulating
    /// into `grads`. `d_output` is the loss gradient with respect to the
    /// activated outputs.
    pub fn backward(
        &self,
        cache: &ForwardCache,
        d_output: &[f64],
        grads: &mut Gradients,
    ) -> Result<()> {
        if cache.layers.len() != self.lstm_layers.len()
            || d_output.len() != cache.output.values.len()
        {
            return Err(Error::State(
                "forward cache does not match this network or output gradient".into(),
            ));
        }
        let top = cache.layers.last().expect("validated non-empty");
        let (steps, h) = (top.steps, self.dense.input_dim);
        let cols = self.dense.output_dim;
        let mut d_hidden = vec![0.0; steps * h];
        match self.readout {
            Readout::Final => {
                let t = steps - 1;
                self.dense.backward(
                    &top.hidden[t * h..],
                    &cache.output.values,
                    d_output,
                    &mut grads.dense,
                    &mut d_hidden[t * h..],
                );
            }
            Readout::PerStep => {
                for t in 0..steps {
                    let out = t * cols..(t + 1) * cols;
                    self.dense.backward(
                        &top.hidden[t * h..(t + 1) * h],
                        &cache.output.values[out.clone()],
                        &d_output[out],
                        &mut grads.dense,
                        &mut d_hidden[t * h..(t + 1) * h],
                    );
                }
            }
        }
        for (idx, layer) in self.lstm_layers.iter().enumerate().rev() {
            d_hidden =
                layer.backward(&cache.layers[idx], &d_hidden, &mut grads.lstm_layers[idx])?;
        }
        Ok(())
    }

    pub fn loss(&self, output: &Output, target: &Target) -> Result<f64> {
        match target {
            Target::Class(c) => cross_entropy(&output.values, *c),
            Target::Values(v) => mse(&output.values, v),
        }
    }

    fn loss_grad(&self, output: &Output, target: &Target) -> Result<Vec<f64>> {
        match target {
            Target::Class(c) => {
                if self.readout != Readout::Final {
                    return Err(Error::Shape(
                        "class targets need a final-step readout".into(),
                    ));
                }
                cross_entropy_grad(&output.values, *c)
            }
            Target::Values(v) => mse_grad(&output.values, v),
        }
    }

    /// Loss for one sequence; its gradient is added into `grads`.
    pub fn accumulate_gradients(
        &self,
        inputs: &[f64],
        steps: usize,
        target: &Target,
        grads: &mut Gradients,
    ) -> Result<f64> {
        let cache = self.forward(inputs, steps)?;
        let loss = self.loss(&cache.output, target)?;
        let d_output = self.loss_grad(&cache.output, target)?;
        self.backward(&cache, &d_output, grads)?;
        Ok(loss)
    }

    pub fn to_json(&self) -> Result<String> {
        let file = ModelFile {
            format_version: FORMAT_VERSION,
            purpose: self.meta.purpose.clone(),
            input_channels: self.meta.input_channels.clone(),
            readout: self.readout,
            gate_order: GATE_ORDER.map(String::from).to_vec(),
            gate_activation: "sigmoid".into(),
            cell_activation: "tanh".into(),
            head_activation: self.dense.activation.to_string(),
            lstm_layers: self.lstm_layers.clone(),
            dense: self.dense.clone(),
        };
        serde_json::to_string_pretty(&file).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        let version = value
            .get("format_version")
            .and_then(serde_json::Value::as_u64)
            .ok_or_else(|| Error::Format("missing format_version".into()))?;
        if version != u64::from(FORMAT_VERSION) {
            return Err(Error::Format(format!(
                "unsupported model format version {version}, expected {FORMAT_VERSION}"
            )));
        }
        let file: ModelFile =
            serde_json::from_value(value).map_err(|e| Error::Format(e.to_string()))?;
        if file.gate_order != GATE_ORDER
            || file.gate_activation != "sigmoid"
            || file.cell_activation != "tanh"
        {
            return Err(Error::Format("unsupported LSTM cell layout".into()));
        }
        if file.head_activation.parse::<Activation>()? != file.dense.activation {
            return Err(Error::Format("head activation mismatch".into()));
        }
        let net = LstmNetwork {
            meta: NetworkMeta {
                purpose: file.purpose,
                input_channels: file.input_channels,
            },
            readout: file.readout,
            lstm_layers: file.lstm_layers,
            dense: file.dense,
        };
        net.validate().map_err(|e| Error::Format(e.to_string()))?;
        Ok(net)
    }
}

/// On-disk layout. Weight arrays are row-major decimal floats.
#[derive(Serialize, Deserialize)]
struct ModelFile {
    format_version: u32,
    purpose: String,
    input_channels: Vec<String>,
    readout: Readout,
    gate_order: Vec<String>,
    gate_activation: String,
    cell_activation: String,
    head_activation: String,
    lstm_layers: Vec<LstmLayer>,
    dense: DenseLayer,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn meta() -> NetworkMeta {
        NetworkMeta {
            purpose: "test".into(),
            input_channels: vec!["a".into(), "b".into()],
        }
    }

    fn classifier() -> Architecture {
        Architecture {
            input_dim: 2,
            hidden_dims: vec![3],
            output_dim: 3,
            activation: Activation::Softmax,
            readout: Readout::Final,
        }
    }

    #[test]
    fn zero_classifier_is_uniform() {
        let net = LstmNetwork::zeros(&classifier(), meta());
        let out = net.forward(&[0.4; 10], 5).unwrap().output;
        assert_eq!(out.rows, 1);
        assert!(out.values.iter().all(|&p| (p - 1.0 / 3.0).abs() < 1e-15));
    }

    #[test]
    fn zero_loss_gradient_gives_zero_gradients() {
        let net = LstmNetwork::new(&classifier(), meta(), 4).unwrap();
        let cache = net.forward(&[0.1, 0.9, 0.5, 0.5], 2).unwrap();
        let mut grads = Gradients::zeros_like(&net);
        net.backward(&cache, &[0.0; 3], &mut grads).unwrap();
        assert_eq!(grads.global_norm(), 0.0);
    }

    #[test]
    fn duplicated_example_doubles_gradient() {
        let net = LstmNetwork::new(&classifier(), meta(), 9).unwrap();
        let x = [0.2, 0.7, 0.9, 0.1, 0.3, 0.3];
        let mut once = Gradients::zeros_like(&net);
        net.accumulate_gradients(&x, 3, &Target::Class(2), &mut once)
            .unwrap();
        let mut twice = Gradients::zeros_like(&net);
        for _ in 0..2 {
            net.accumulate_gradients(&x, 3, &Target::Class(2), &mut twice)
                .unwrap();
        }
        for (a, b) in once.tensors().iter().zip(twice.tensors()) {
            for (x, y) in a.iter().zip(b) {
                assert!((2.0 * x - y).abs() <= 1e-15 * y.abs().max(1.0));
            }
        }
    }

    #[test]
    fn clipping_bounds_norm() {
        let net = LstmNetwork::new(&classifier(), meta(), 1).unwrap();
        let mut g = Gradients::zeros_like(&net);
        g.dense.b = vec![30.0, 40.0, 0.0];
        assert_eq!(g.clip_global_norm(5.0), 50.0);
        assert!((g.global_norm() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn json_round_trip_is_exact() {
        let net = LstmNetwork::new(&classifier(), meta(), 77).unwrap();
        let back = LstmNetwork::from_json(&net.to_json().unwrap()).unwrap();
        assert_eq!(back, net);
        let x = [0.3, 0.1, 0.8, 0.6];
        assert_eq!(
            net.forward(&x, 2).unwrap().output,
            back.forward(&x, 2).unwrap().output
        );
    }

    #[test]
    fn loader_rejects_unknown_version() {
        let net = LstmNetwork::new(&classifier(), meta(), 77).unwrap();
        let text = net
            .to_json()
            .unwrap()
            .replace("\"format_version\": 1", "\"format_version\": 2");
        assert!(matches!(
            LstmNetwork::from_json(&text),
            Err(Error::Format(_))
        ));
    }

    #[test]
    fn loader_rejects_inconsistent_dims() {
        let mut net = LstmNetwork::new(&classifier(), meta(), 77).unwrap();
        net.dense.input_dim = 4;
        net.dense.w.push(0.0);
        net.dense.w.push(0.0);
        net.dense.w.push(0.0);
        assert!(LstmNetwork::from_json(&net.to_json().unwrap()).is_err());
    }
}
