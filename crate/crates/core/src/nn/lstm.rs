use serde::{Deserialize, Serialize};

use super::{axpy, dot, sigmoid};
use crate::error::{Error, Result};

/// Gate blocks inside the stacked weight matrices, top to bottom.
pub const GATE_ORDER: [&str; 4] = ["i", "f", "o", "g"];

/// One LSTM layer. The four gate matrices are stacked row-wise in
/// [`GATE_ORDER`]: `w` is `4H x I`, `u` is `4H x H`, `b` has `4H` entries.
///
/// ```text
/// i = sigmoid(W_i x + U_i h + b_i)    f = sigmoid(W_f x + U_f h + b_f)
/// o = sigmoid(W_o x + U_o h + b_o)    g = tanh(W_g x + U_g h + b_g)
/// c' = f * c + i * g                  h' = o * tanh(c')
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LstmLayer {
    pub input_dim: usize,
    pub hidden_dim: usize,
    pub w: Vec<f64>,
    pub u: Vec<f64>,
    pub b: Vec<f64>,
}

/// Activations recorded by [`LstmLayer::forward`] for the backward pass.
#[derive(Debug, Clone)]
pub struct LstmCache {
    pub steps: usize,
    pub inputs: Vec<f64>,
    /// Post-activation gates per step, `T x 4H`.
    pub gates: Vec<f64>,
    pub cell: Vec<f64>,
    pub tanh_cell: Vec<f64>,
    /// Hidden states, `T x H`; the layer output.
    pub hidden: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LstmGrads {
    pub w: Vec<f64>,
    pub u: Vec<f64>,
    pub b: Vec<f64>,
}

impl LstmGrads {
    pub fn zeros_like(layer: &LstmLayer) -> Self {
        LstmGrads {
            w: vec![0.0; layer.w.len()],
            u: vec![0.0; layer.u.len()],
            b: vec![0.0; layer.b.len()],
        }
    }
}

impl LstmLayer {
    pub fn zeros(input_dim: usize, hidden_dim: usize) -> Self {
        let rows = 4 * hidden_dim;
        LstmLayer {
            input_dim,
            hidden_dim,
            w: vec![0.0; rows * input_dim],
            u: vec![0.0; rows * hidden_dim],
            b: vec![0.0; rows],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let rows = 4 * self.hidden_dim;
        if self.input_dim == 0 || self.hidden_dim == 0 {
            return Err(Error::Shape("LSTM dimensions must be positive".into()));
        }
        if self.w.len() != rows * self.input_dim
            || self.u.len() != rows * self.hidden_dim
            || self.b.len() != rows
        {
            return Err(Error::Shape(format!(
                "LSTM {}->{} has inconsistent parameter sizes",
                self.input_dim, self.hidden_dim
            )));
        }
        if !self
            .w
            .iter()
            .chain(&self.u)
            .chain(&self.b)
            .all(|v| v.is_finite())
        {
            return Err(Error::Domain("LSTM parameters must be finite".into()));
        }
        Ok(())
    }

    /// Runs the layer over `inputs` (`steps x input_dim`, row-major) from a
    /// zero initial state.
    pub fn forward(&self, inputs: &[f64], steps: usize) -> Result<LstmCache> {
        let (n_in, h) = (self.input_dim, self.hidden_dim);
        if steps == 0 || inputs.len() != steps * n_in {
            return Err(Error::Shape(format!(
                "LSTM expects {steps} x {n_in} inputs, got {} values",
                inputs.len()
            )));
        }
        let mut gates = vec![0.0; steps * 4 * h];
        let mut cell = vec![0.0; steps * h];
        let mut tanh_cell = vec![0.0; steps * h];
        let mut hidden = vec![0.0; steps * h];
        let zeros = vec![0.0; h];

        for t in 0..steps {
            let x = &inputs[t * n_in..(t + 1) * n_in];
            let (h_prev, c_prev) = if t == 0 {
                (&zeros[..], &zeros[..])
            } else {
                (&hidden[(t - 1) * h..t * h], &cell[(t - 1) * h..t * h])
            };
            let mut z = self.b.clone();
            for (r, zr) in z.iter_mut().enumerate() {
                *zr += dot(&self.w[r * n_in..(r + 1) * n_in], x)
                    + dot(&self.u[r * h..(r + 1) * h], h_prev);
            }
            let mut c_new = vec![0.0; h];
            let g_t = &mut gates[t * 4 * h..(t + 1) * 4 * h];
            for k in 0..h {
                let i = sigmoid(z[k]);
                let f = sigmoid(z[h + k]);
                let o = sigmoid(z[2 * h + k]);
                let g = z[3 * h + k].tanh();
                g_t[k] = i;
                g_t[h + k] = f;
                g_t[2 * h + k] = o;
                g_t[3 * h + k] = g;
                c_new[k] = f * c_prev[k] + i * g;
            }
            for k in 0..h {
                let tc = c_new[k].tanh();
                tanh_cell[t * h + k] = tc;
                hidden[t * h + k] = g_t[2 * h + k] * tc;
            }
            cell[t * h..(t + 1) * h].copy_from_slice(&c_new);
        }

        Ok(LstmCache {
            steps,
            inputs: inputs.to_vec(),
            gates,
            cell,
            tanh_cell,
            hidden,
        })
    }

    /// Backpropagation through time. `d_hidden` is the loss gradient with
    /// respect to every output hidden state (`T x H`). Parameter gradients
    /// are accumulated into `grads`; the gradient with respect to the inputs
    /// is returned.
    pub fn backward(
        &self,
        cache: &LstmCache,
        d_hidden: &[f64],
        grads: &mut LstmGrads,
    ) -> Result<Vec<f64>> {
        let (n_in, h, steps) = (self.input_dim, self.hidden_dim, cache.steps);
        if cache.hidden.len() != steps * h
            || cache.inputs.len() != steps * n_in
            || d_hidden.len() != steps * h
        {
            return Err(Error::State(
                "LSTM cache does not match the layer or the output gradient".into(),
            ));
        }
        if grads.w.len() != self.w.len() || grads.u.len() != self.u.len() {
            return Err(Error::Shape(
                "gradient buffers do not match the layer".into(),
            ));
        }

        let mut d_inputs = vec![0.0; steps * n_in];
        let mut dh_next = vec![0.0; h];
        let mut dc_next = vec![0.0; h];
        let mut dz = vec![0.0; 4 * h];
        let zeros = vec![0.0; h];

        for t in (0..steps).rev() {
            let g_t = &cache.gates[t * 4 * h..(t + 1) * 4 * h];
            let tc = &cache.tanh_cell[t * h..(t + 1) * h];
            let c_prev = if t == 0 {
                &zeros[..]
            } else {
                &cache.cell[(t - 1) * h..t * h]
            };
            for k in 0..h {
                let (i, f, o, g) = (g_t[k], g_t[h + k], g_t[2 * h + k], g_t[3 * h + k]);
                let dh = d_hidden[t * h + k] + dh_next[k];
                let d_o = dh * tc[k];
                let dc = dh * o * (1.0 - tc[k] * tc[k]) + dc_next[k];
                dz[k] = dc * g * i * (1.0 - i);
                dz[h + k] = dc * c_prev[k] * f * (1.0 - f);
                dz[2 * h + k] = d_o * o * (1.0 - o);
                dz[3 * h + k] = dc * i * (1.0 - g * g);
                dc_next[k] = dc * f;
            }

            let x = &cache.inputs[t * n_in..(t + 1) * n_in];
            let h_prev = if t == 0 {
                &zeros[..]
            } else {
                &cache.hidden[(t - 1) * h..t * h]
            };
            let dx = &mut d_inputs[t * n_in..(t + 1) * n_in];
            dh_next.iter_mut().for_each(|v| *v = 0.0);
            for (r, &d) in dz.iter().enumerate() {
                if d == 0.0 {
                    continue;
                }
                grads.b[r] += d;
                axpy(d, x, &mut grads.w[r * n_in..(r + 1) * n_in]);
                axpy(d, h_prev, &mut grads.u[r * h..(r + 1) * h]);
                axpy(d, &self.w[r * n_in..(r + 1) * n_in], dx);
                axpy(d, &self.u[r * h..(r + 1) * h], &mut dh_next);
            }
        }
        Ok(d_inputs)
    }
}
