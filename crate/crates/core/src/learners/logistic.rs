use serde::{Deserialize, Serialize};

use super::{check_xy, LearnError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LrParams {
    pub lr: f64,
    pub epochs: usize,
    pub l2: f64,
}

impl Default for LrParams {
    fn default() -> Self {
        LrParams {
            lr: 0.1,
            epochs: 500,
            l2: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LrModel {
    pub weights: Vec<f64>,
    pub bias: f64,
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

impl LrModel {
    fn z(&self, x: &[f64]) -> f64 {
        self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + self.bias
    }

    pub fn score(&self, x: &[f64]) -> f64 {
        sigmoid(self.z(x))
    }

    pub fn predict(&self, x: &[f64]) -> u8 {
        u8::from(self.score(x) >= 0.5)
    }
}

/// Objective and its gradient at `m`:
/// `mean_i [softplus(z_i) − y_i z_i] + (l2 / 2)·‖w‖²`, where
/// `z_i = w·x_i + b`. The bias is not penalized.
pub fn loss_and_gradient(m: &LrModel, x: &[Vec<f64>], y: &[u8], l2: f64) -> (f64, Vec<f64>, f64) {
    let n = x.len() as f64;
    let mut loss = 0.0;
    let mut gw = vec![0.0; m.weights.len()];
    let mut gb = 0.0;
    for (row, &label) in x.iter().zip(y) {
        let z = m.z(row);
        let t = f64::from(label);
        loss += softplus(z) - t * z;
        let r = sigmoid(z) - t;
        for (g, v) in gw.iter_mut().zip(row) {
            *g += r * v;
        }
        gb += r;
    }
    loss /= n;
    gb /= n;
    for (g, w) in gw.iter_mut().zip(&m.weights) {
        *g = *g / n + l2 * w;
    }
    loss += 0.5 * l2 * m.weights.iter().map(|w| w * w).sum::<f64>();
    (loss, gw, gb)
}

/// Full-batch gradient descent from zero weights.
pub fn train_lr(x: &[Vec<f64>], y: &[u8], params: &LrParams) -> Result<LrModel, LearnError> {
    train_lr_traced(x, y, params).map(|(m, _)| m)
}

/// Like [`train_lr`], also returning the objective before each epoch.
pub fn train_lr_traced(
    x: &[Vec<f64>],
    y: &[u8],
    params: &LrParams,
) -> Result<(LrModel, Vec<f64>), LearnError> {
    check_xy(x, y)?;
    let mut m = LrModel {
        weights: vec![0.0; x[0].len()],
        bias: 0.0,
    };
    let mut losses = Vec::with_capacity(params.epochs);
    for epoch in 0..params.epochs {
        let (loss, gw, gb) = loss_and_gradient(&m, x, y, params.l2);
        if !loss.is_finite() {
            return Err(LearnError::Diverged { epoch });
        }
        losses.push(loss);
        for (w, g) in m.weights.iter_mut().zip(&gw) {
            *w -= params.lr * g;
        }
        m.bias -= params.lr * gb;
    }
    if m.weights.iter().any(|w| !w.is_finite()) || !m.bias.is_finite() {
        return Err(LearnError::Diverged {
            epoch: params.epochs,
        });
    }
    Ok((m, losses))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_epochs_scores_one_half() {
        let p = LrParams {
            epochs: 0,
            ..LrParams::default()
        };
        let m = train_lr(&[vec![1.0], vec![-3.0]], &[1, 0], &p).unwrap();
        assert_eq!(m.score(&[7.0]), 0.5);
        assert_eq!(m.predict(&[7.0]), 1);
    }

    #[test]
    fn separable_loss_strictly_decreases() {
        let x: Vec<Vec<f64>> = (-5..5).map(|i| vec![f64::from(i) / 3.0]).collect();
        let y: Vec<u8> = (-5..5).map(|i| u8::from(i >= 0)).collect();
        let (m, losses) = train_lr_traced(&x, &y, &LrParams::default()).unwrap();
        assert_eq!(losses.len(), 500);
        assert!(losses.windows(2).all(|w| w[1] < w[0]));
        assert_eq!(m.predict(&[1.0]), 1);
        assert_eq!(m.predict(&[-1.0]), 0);
    }

    #[test]
    fn divergence_is_reported() {
        let p = LrParams {
            lr: 1e300,
            epochs: 10,
            l2: 1.0,
        };
        let r = train_lr(&[vec![1e10], vec![-1e10]], &[1, 0], &p);
        assert!(matches!(r, Err(LearnError::Diverged { .. })));
    }

    #[test]
    fn stable_extremes() {
        assert_eq!(softplus(1000.0), 1000.0);
        assert_eq!(softplus(-1000.0), 0.0);
        assert_eq!(sigmoid(-1000.0), 0.0);
        assert_eq!(sigmoid(1000.0), 1.0);
    }
}
