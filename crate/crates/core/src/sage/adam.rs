use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::SageParams;

/// Adam moment estimates for every weight matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdamState {
    pub m: Vec<Array2<f64>>,
    pub v: Vec<Array2<f64>>,
    pub step: u64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl AdamState {
    pub fn new(params: &SageParams) -> Self {
        let zeros: Vec<Array2<f64>> = params
            .weights
            .iter()
            .map(|w| Array2::zeros(w.raw_dim()))
            .collect();
        AdamState {
            m: zeros.clone(),
            v: zeros,
            step: 0,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }

    /// One bias-corrected Adam update in place.
    pub fn update(&mut self, params: &mut SageParams, grads: &[Array2<f64>], lr: f64) {
        self.step += 1;
        let t = self.step as i32;
        let (b1, b2, eps) = (self.beta1, self.beta2, self.eps);
        let c1 = 1.0 - b1.powi(t);
        let c2 = 1.0 - b2.powi(t);
        for ((w, g), (m, v)) in params
            .weights
            .iter_mut()
            .zip(grads)
            .zip(self.m.iter_mut().zip(self.v.iter_mut()))
        {
            ndarray::Zip::from(w)
                .and(g)
                .and(m)
                .and(v)
                .for_each(|w, &g, m, v| {
                    *m = b1 * *m + (1.0 - b1) * g;
                    *v = b2 * *v + (1.0 - b2) * g * g;
                    *w -= lr * (*m / c1) / ((*v / c2).sqrt() + eps);
                });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn first_step_moves_by_learning_rate() {
        let mut p = SageParams {
            weights: vec![array![[0.0]]],
        };
        let mut s = AdamState::new(&p);
        s.update(&mut p, &[array![[1.0]]], 0.05);
        assert!((p.weights[0][[0, 0]] + 0.05).abs() < 1e-8);
        assert_eq!(s.step, 1);
    }

    #[test]
    fn zero_gradient_leaves_params() {
        let mut p = SageParams {
            weights: vec![array![[0.3, -0.2]]],
        };
        let before = p.clone();
        let mut s = AdamState::new(&p);
        s.update(&mut p, &[array![[0.0, 0.0]]], 0.05);
        assert_eq!(p, before);
    }
}
