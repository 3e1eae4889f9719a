use super::{ModelError, Result};
use crate::linalg::Matrix;
use crate::rng::{self, Stream};
use rand::Rng;
use std::io::{BufRead, Write};

/// Layer widths from input to output; hidden layers use ReLU and the single
/// output unit a sigmoid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MlpSpec {
    pub layer_sizes: Vec<usize>,
    pub init_seed: u64,
}

impl MlpSpec {
    pub fn new(input: usize, hidden: &[usize], init_seed: u64) -> Self {
        let mut layer_sizes = Vec::with_capacity(hidden.len() + 2);
        layer_sizes.push(input);
        layer_sizes.extend_from_slice(hidden);
        layer_sizes.push(1);
        Self {
            layer_sizes,
            init_seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.layer_sizes.len() < 3 {
            return Err(ModelError::Spec(
                "need an input layer, at least one hidden layer and an output".into(),
            ));
        }
        if *self.layer_sizes.last().unwrap() != 1 {
            return Err(ModelError::Spec("final layer must have width 1".into()));
        }
        if self.layer_sizes.contains(&0) {
            return Err(ModelError::Spec("layer widths must be positive".into()));
        }
        Ok(())
    }

    pub fn n_params(&self) -> usize {
        self.layer_sizes
            .windows(2)
            .map(|w| w[0] * w[1] + w[1])
            .sum()
    }
}

#[derive(Debug, Clone, Copy)]
struct Layer {
    inputs: usize,
    outputs: usize,
    /// Offset of the `outputs x inputs` row-major weight block; biases follow.
    offset: usize,
}

impl Layer {
    fn bias_offset(&self) -> usize {
        self.offset + self.inputs * self.outputs
    }
}

/// Scratch buffers for one forward/backward pass.
#[derive(Debug, Clone)]
pub struct Workspace {
    /// Post-activation values per layer, index 0 is the input copy.
    acts: Vec<Vec<f64>>,
    /// Pre-activation values per non-input layer.
    pre: Vec<Vec<f64>>,
    delta: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    sizes: Vec<usize>,
    params: Vec<f64>,
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Binary cross-entropy of the logit `z` against label `y`.
fn bce_with_logit(z: f64, y: f64) -> f64 {
    z.max(0.0) - y * z + (-z.abs()).exp().ln_1p()
}

impl Mlp {
    /// Weights and biases uniform in `+-1/sqrt(fan_in)`.
    pub fn init(spec: &MlpSpec) -> Result<Self> {
        spec.validate()?;
        let mut rng = rng::stream(spec.init_seed, Stream::Init);
        let mut params = Vec::with_capacity(spec.n_params());
        for w in spec.layer_sizes.windows(2) {
            let bound = 1.0 / (w[0] as f64).sqrt();
            for _ in 0..(w[0] * w[1] + w[1]) {
                params.push(rng.random_range(-bound..bound));
            }
        }
        Ok(Self {
            sizes: spec.layer_sizes.clone(),
            params,
        })
    }

    pub fn from_params(layer_sizes: Vec<usize>, params: Vec<f64>) -> Result<Self> {
        let spec = MlpSpec {
            layer_sizes,
            init_seed: 0,
        };
        spec.validate()?;
        if params.len() != spec.n_params() {
            return Err(ModelError::Shape {
                expected: spec.n_params(),
                found: params.len(),
            });
        }
        Ok(Self {
            sizes: spec.layer_sizes,
            params,
        })
    }

    pub fn layer_sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn input_width(&self) -> usize {
        self.sizes[0]
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn n_params(&self) -> usize {
        self.params.len()
    }

    fn layers(&self) -> Vec<Layer> {
        let mut offset = 0;
        self.sizes
            .windows(2)
            .map(|w| {
                let l = Layer {
                    inputs: w[0],
                    outputs: w[1],
                    offset,
                };
                offset += w[0] * w[1] + w[1];
                l
            })
            .collect()
    }

    pub fn workspace(&self) -> Workspace {
        Workspace {
            acts: self.sizes.iter().map(|&n| vec![0.0; n]).collect(),
            pre: self.sizes[1..].iter().map(|&n| vec![0.0; n]).collect(),
            delta: self.sizes[1..].iter().map(|&n| vec![0.0; n]).collect(),
        }
    }

    fn check_width(&self, width: usize) -> Result<()> {
        if width != self.input_width() {
            return Err(ModelError::Dimension {
                expected: self.input_width(),
                found: width,
            });
        }
        Ok(())
    }

    /// Output logit; fills the workspace activations.
    fn forward_ws(&self, layers: &[Layer], x: &[f64], ws: &mut Workspace) -> f64 {
        ws.acts[0].copy_from_slice(x);
        let last = layers.len() - 1;
        for (li, layer) in layers.iter().enumerate() {
            let (before, after) = ws.acts.split_at_mut(li + 1);
            let input = &before[li];
            let out = &mut after[0];
            let w = &self.params[layer.offset..layer.bias_offset()];
            let b = &self.params[layer.bias_offset()..layer.bias_offset() + layer.outputs];
            for o in 0..layer.outputs {
                let row = &w[o * layer.inputs..(o + 1) * layer.inputs];
                let mut z = b[o];
                for (wi, xi) in row.iter().zip(input.iter()) {
                    z += wi * xi;
                }
                ws.pre[li][o] = z;
                out[o] = if li == last { z } else { z.max(0.0) };
            }
        }
        ws.pre[last][0]
    }

    pub fn score(&self, x: &[f64]) -> Result<f64> {
        self.check_width(x.len())?;
        let mut ws = self.workspace();
        Ok(sigmoid(self.forward_ws(&self.layers(), x, &mut ws)))
    }

    /// Scores in (0, 1) for each row.
    pub fn forward(&self, x: &Matrix) -> Result<Vec<f64>> {
        self.check_width(x.cols())?;
        let layers = self.layers();
        let mut ws = self.workspace();
        Ok(x.iter_rows()
            .map(|row| sigmoid(self.forward_ws(&layers, row, &mut ws)))
            .collect())
    }

    /// Loss of one record and its gradient written (not accumulated) to `out`.
    pub(crate) fn sample_gradient(
        &self,
        x: &[f64],
        y: f64,
        ws: &mut Workspace,
        out: &mut [f64],
    ) -> f64 {
        let layers = self.layers();
        let z = self.forward_ws(&layers, x, ws);
        let last = layers.len() - 1;
        ws.delta[last][0] = sigmoid(z) - y;
        for li in (0..layers.len()).rev() {
            let layer = layers[li];
            let input = &ws.acts[li];
            let (w_off, b_off) = (layer.offset, layer.bias_offset());
            for o in 0..layer.outputs {
                let d = ws.delta[li][o];
                let g = &mut out[w_off + o * layer.inputs..w_off + (o + 1) * layer.inputs];
                for (gi, xi) in g.iter_mut().zip(input.iter()) {
                    *gi = d * xi;
                }
                out[b_off + o] = d;
            }
            if li > 0 {
                let w = &self.params[w_off..b_off];
                let (prev, cur) = ws.delta.split_at_mut(li);
                let prev = &mut prev[li - 1];
                let cur = &cur[0];
                for (i, p) in prev.iter_mut().enumerate() {
                    if ws.pre[li - 1][i] > 0.0 {
                        let mut s = 0.0;
                        for (o, d) in cur.iter().enumerate() {
                            s += w[o * layer.inputs + i] * d;
                        }
                        *p = s;
                    } else {
                        *p = 0.0;
                    }
                }
            }
        }
        bce_with_logit(z, y)
    }

    /// One gradient row per record; also returns the summed loss.
    pub fn per_sample_gradients_into(&self, x: &Matrix, y: &[u8], out: &mut Matrix) -> Result<f64> {
        self.check_width(x.cols())?;
        if x.rows() == 0 {
            return Err(ModelError::EmptyBatch);
        }
        if y.len() != x.rows() || out.rows() != x.rows() || out.cols() != self.n_params() {
            return Err(ModelError::Shape {
                expected: x.rows(),
                found: y.len(),
            });
        }
        let mut ws = self.workspace();
        let mut loss = 0.0;
        for (r, row) in x.iter_rows().enumerate() {
            loss += self.sample_gradient(row, f64::from(y[r]), &mut ws, out.row_mut(r));
        }
        Ok(loss)
    }

    pub fn per_sample_gradients(&self, x: &Matrix, y: &[u8]) -> Result<Matrix> {
        let mut out = Matrix::zeros(x.rows(), self.n_params());
        self.per_sample_gradients_into(x, y, &mut out)?;
        Ok(out)
    }

    /// Gradient of the mean loss over the batch.
    pub fn batch_gradient(&self, x: &Matrix, y: &[u8]) -> Result<Vec<f64>> {
        let per = self.per_sample_gradients(x, y)?;
        let mut g = vec![0.0; self.n_params()];
        for row in per.iter_rows() {
            for (a, b) in g.iter_mut().zip(row) {
                *a += b;
            }
        }
        let n = x.rows() as f64;
        g.iter_mut().for_each(|v| *v /= n);
        Ok(g)
    }

    /// Mean binary cross-entropy over the rows.
    pub fn loss(&self, x: &Matrix, y: &[u8]) -> Result<f64> {
        self.check_width(x.cols())?;
        if y.len() != x.rows() {
            return Err(ModelError::Shape {
                expected: x.rows(),
                found: y.len(),
            });
        }
        let layers = self.layers();
        let mut ws = self.workspace();
        let total: f64 = x
            .iter_rows()
            .zip(y)
            .map(|(row, &t)| bce_with_logit(self.forward_ws(&layers, row, &mut ws), f64::from(t)))
            .sum();
        Ok(total / x.rows().max(1) as f64)
    }

    /// Text dump: a `layers` header line with the widths, then one parameter
    /// per line (per layer: row-major weights, then biases).
    pub fn write_weights<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let widths: Vec<String> = self.sizes.iter().map(usize::to_string).collect();
        writeln!(w, "layers {}", widths.join(" "))?;
        for p in &self.params {
            writeln!(w, "{p:e}")?;
        }
        Ok(())
    }

    pub fn read_weights<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| ModelError::Format("empty weight file".into()))?
            .map_err(|e| ModelError::Format(e.to_string()))?;
        let sizes = header
            .strip_prefix("layers ")
            .ok_or_else(|| ModelError::Format("missing layers header".into()))?
            .split_whitespace()
            .map(|s| {
                s.parse::<usize>()
                    .map_err(|e| ModelError::Format(e.to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        let params = lines
            .map(|l| {
                l.map_err(|e| ModelError::Format(e.to_string()))?
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| ModelError::Format(e.to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_params(sizes, params)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_weights_score_one_half() {
        let m = Mlp::from_params(
            vec![3, 2, 1],
            vec![0.0; MlpSpec::new(3, &[2], 0).n_params()],
        )
        .unwrap();
        assert_eq!(m.score(&[1.0, -4.0, 9.0]).unwrap(), 0.5);
    }

    #[test]
    fn identity_hidden_unit_gives_sigmoid_wx() {
        // 1-1-1 net: hidden relu(x) (x > 0), output w * h
        let w = 0.7;
        let m = Mlp::from_params(vec![1, 1, 1], vec![1.0, 0.0, w, 0.0]).unwrap();
        let x = 2.0;
        assert!((m.score(&[x]).unwrap() - 1.0 / (1.0 + (-w * x).exp())).abs() < 1e-15);
    }

    #[test]
    fn batched_forward_matches_rows() {
        let m = Mlp::init(&MlpSpec::new(4, &[5, 3], 3)).unwrap();
        let x = Matrix::from_rows(&[vec![0.1, -1.0, 2.0, 0.0], vec![1.0, 1.0, -0.5, 3.0]]);
        let batch = m.forward(&x).unwrap();
        for (r, s) in batch.iter().enumerate() {
            assert_eq!(*s, m.score(x.row(r)).unwrap());
        }
    }

    #[test]
    fn dimension_mismatch() {
        let m = Mlp::init(&MlpSpec::new(4, &[5], 3)).unwrap();
        assert!(matches!(
            m.score(&[1.0]),
            Err(ModelError::Dimension {
                expected: 4,
                found: 1
            })
        ));
        assert!(MlpSpec::new(4, &[], 0).validate().is_err());
    }

    #[test]
    fn weight_dump_round_trips() {
        let m = Mlp::init(&MlpSpec::new(3, &[4, 2], 8)).unwrap();
        let mut buf = Vec::new();
        m.write_weights(&mut buf).unwrap();
        assert!(buf.starts_with(b"layers 3 4 2 1\n"));
        let back = Mlp::read_weights(&buf[..]).unwrap();
        assert_eq!(back, m);
    }
}
