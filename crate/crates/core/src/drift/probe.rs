use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::EmbeddingMatrix;
use crate::stability::LabelVector;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeConfig {
    pub l2_penalty: f64,
    pub grad_tol: f64,
    pub max_iter: usize,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self { l2_penalty: 1.0, grad_tol: 1e-6, max_iter: 5000 }
    }
}

/// Multinomial logistic probe: logits = W x + b, with W of shape C x d.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProbe {
    pub weights: DMatrix<f64>,
    pub bias: DVector<f64>,
    pub iterations: usize,
    pub grad_norm: f64,
    pub converged: bool,
}

impl LinearProbe {
    pub fn n_classes(&self) -> usize {
        self.weights.nrows()
    }

    pub fn logits(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        let mut z = x * self.weights.transpose();
        for mut row in z.row_iter_mut() {
            row += self.bias.transpose();
        }
        z
    }

    /// Argmax class per row (ties go to the lowest class index).
    pub fn predict(&self, x: &DMatrix<f64>) -> Vec<usize> {
        let z = self.logits(x);
        z.row_iter()
            .map(|r| {
                let mut best = 0;
                for c in 1..r.len() {
                    if r[c] > r[best] {
                        best = c;
                    }
                }
                best
            })
            .collect()
    }

    pub fn accuracy(&self, x: &DMatrix<f64>, y: &LabelVector) -> Result<f64> {
        y.check_rows(x.nrows())?;
        let hits = self.predict(x).iter().zip(y.as_slice()).filter(|(p, t)| p == t).count();
        Ok(hits as f64 / x.nrows() as f64)
    }
}

/// Penalized mean cross-entropy and its gradient with respect to (W, b).
/// Gradient with respect to the weights and the bias.
type Gradient = (DMatrix<f64>, DVector<f64>);

/// The penalty `l2 / (2n) * ||W||^2` leaves the bias free.
fn objective(
    x: &DMatrix<f64>,
    y: &[usize],
    w: &DMatrix<f64>,
    b: &DVector<f64>,
    l2: f64,
    with_grad: bool,
) -> (f64, Option<Gradient>) {
    let n = x.nrows() as f64;
    let mut z = x * w.transpose();
    let mut loss = 0.0;
    for (i, mut row) in z.row_iter_mut().enumerate() {
        row += b.transpose();
        let m = row.max();
        let lse = m + row.iter().map(|v| (v - m).exp()).sum::<f64>().ln();
        loss += lse - row[y[i]];
        if with_grad {
            row.apply(|v| *v = (*v - lse).exp());
            row[y[i]] -= 1.0;
        }
    }
    let value = loss / n + 0.5 * l2 / n * w.norm_squared();
    if !with_grad {
        return (value, None);
    }
    let gw = (z.transpose() * x + w * l2) / n;
    let gb = DVector::from_iterator(z.ncols(), z.column_iter().map(|c| c.sum() / n));
    (value, Some((gw, gb)))
}

/// Fits the probe by gradient descent with backtracking from zero weights.
/// A run that hits `max_iter` is returned with `converged = false`.
pub fn train_linear_probe(x: &EmbeddingMatrix, y: &LabelVector, cfg: &ProbeConfig) -> Result<LinearProbe> {
    y.check_rows(x.nrows())?;
    if y.class_counts().iter().filter(|c| **c > 0).count() < 2 {
        return Err(Error::SingleClass);
    }
    if cfg.l2_penalty < 0.0 || cfg.grad_tol <= 0.0 {
        return Err(Error::InvalidParameter("need l2_penalty >= 0 and grad_tol > 0".into()));
    }
    let m = x.matrix();
    let labels = y.as_slice();
    let c = y.n_classes();
    let mut w = DMatrix::zeros(c, m.ncols());
    let mut b = DVector::zeros(c);
    let mut step = 1.0;
    let mut iterations = 0;
    let (mut f, mut g) = objective(m, labels, &w, &b, cfg.l2_penalty, true);
    let mut grad_norm;
    loop {
        let (gw, gb) = g.take().expect("gradient requested");
        grad_norm = (gw.norm_squared() + gb.norm_squared()).sqrt();
        if grad_norm <= cfg.grad_tol || iterations >= cfg.max_iter {
            break;
        }
        let g2 = grad_norm * grad_norm;
        // Armijo backtracking; the step grows again after each accepted move
        loop {
            let wn = &w - &gw * step;
            let bn = &b - &gb * step;
            let (fn_, _) = objective(m, labels, &wn, &bn, cfg.l2_penalty, false);
            if fn_ <= f - 0.5 * step * g2 || step < 1e-12 {
                w = wn;
                b = bn;
                break;
            }
            step *= 0.5;
        }
        step *= 2.0;
        iterations += 1;
        let next = objective(m, labels, &w, &b, cfg.l2_penalty, true);
        f = next.0;
        g = next.1;
    }
    Ok(LinearProbe { weights: w, bias: b, iterations, grad_norm, converged: grad_norm <= cfg.grad_tol })
}
