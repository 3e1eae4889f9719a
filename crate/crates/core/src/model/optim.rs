use super::{ModelError, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OptimizerKind {
    Sgd,
    Adam,
}

pub const ADAM_BETA1: f64 = 0.9;
pub const ADAM_BETA2: f64 = 0.999;
pub const ADAM_EPS: f64 = 1e-8;

/// Optimizer moments for a flat parameter vector.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerState {
    kind: OptimizerKind,
    m: Vec<f64>,
    v: Vec<f64>,
    t: u64,
}

impl OptimizerState {
    pub fn new(kind: OptimizerKind, n_params: usize) -> Self {
        let n = if kind == OptimizerKind::Adam {
            n_params
        } else {
            0
        };
        Self {
            kind,
            m: vec![0.0; n],
            v: vec![0.0; n],
            t: 0,
        }
    }

    pub fn kind(&self) -> OptimizerKind {
        self.kind
    }

    pub fn steps(&self) -> u64 {
        self.t
    }

    pub fn step(&mut self, params: &mut [f64], grad: &[f64], learning_rate: f64) -> Result<()> {
        if params.len() != grad.len() {
            return Err(ModelError::Shape {
                expected: params.len(),
                found: grad.len(),
            });
        }
        self.t += 1;
        match self.kind {
            OptimizerKind::Sgd => {
                for (w, g) in params.iter_mut().zip(grad) {
                    *w -= learning_rate * g;
                }
            }
            OptimizerKind::Adam => {
                if self.m.len() != params.len() {
                    return Err(ModelError::Shape {
                        expected: self.m.len(),
                        found: params.len(),
                    });
                }
                let t = self.t as i32;
                let c1 = 1.0 - ADAM_BETA1.powi(t);
                let c2 = 1.0 - ADAM_BETA2.powi(t);
                for i in 0..params.len() {
                    let g = grad[i];
                    self.m[i] = ADAM_BETA1 * self.m[i] + (1.0 - ADAM_BETA1) * g;
                    self.v[i] = ADAM_BETA2 * self.v[i] + (1.0 - ADAM_BETA2) * g * g;
                    let m_hat = self.m[i] / c1;
                    let v_hat = self.v[i] / c2;
                    params[i] -= learning_rate * m_hat / (v_hat.sqrt() + ADAM_EPS);
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_learning_rate_keeps_weights() {
        for kind in [OptimizerKind::Sgd, OptimizerKind::Adam] {
            let mut w = vec![0.3, -1.2];
            let mut s = OptimizerState::new(kind, 2);
            s.step(&mut w, &[5.0, -7.0], 0.0).unwrap();
            assert_eq!(w, vec![0.3, -1.2]);
        }
    }

    #[test]
    fn sgd_step() {
        let mut w = vec![1.0, 2.0];
        OptimizerState::new(OptimizerKind::Sgd, 2)
            .step(&mut w, &[0.5, -0.25], 0.1)
            .unwrap();
        assert_eq!(w, vec![1.0 - 0.1 * 0.5, 2.0 - 0.1 * -0.25]);
    }

    #[test]
    fn adam_two_steps_on_constant_gradient() {
        // m1 = 0.1 g, v1 = 0.001 g^2 -> m_hat = g, v_hat = g^2 -> step lr*g/(|g|+eps)
        // the same holds at t = 2 because the bias corrections undo the decay exactly
        let (g, lr) = (2.0, 0.01);
        let mut w = vec![0.0];
        let mut s = OptimizerState::new(OptimizerKind::Adam, 1);
        s.step(&mut w, &[g], lr).unwrap();
        let one = lr * g / (g + ADAM_EPS);
        assert!((w[0] + one).abs() < 1e-15);
        s.step(&mut w, &[g], lr).unwrap();
        let m2 = 0.9 * 0.1 * g + 0.1 * g;
        let v2 = 0.999 * 0.001 * g * g + 0.001 * g * g;
        let two = lr * (m2 / (1.0 - 0.81)) / ((v2 / (1.0 - 0.998001)).sqrt() + ADAM_EPS);
        assert!((w[0] + one + two).abs() < 1e-15);
    }

    #[test]
    fn shape_mismatch() {
        let mut w = vec![0.0; 3];
        assert!(OptimizerState::new(OptimizerKind::Sgd, 3)
            .step(&mut w, &[1.0], 0.1)
            .is_err());
        assert!(OptimizerState::new(OptimizerKind::Adam, 2)
            .step(&mut w, &[1.0; 3], 0.1)
            .is_err());
    }
}
