use ndarray::{Array1, Array2, Axis};
use serde::{Deserialize, Serialize};

/// Per-column z-scoring learned from training rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Array1<f64>,
    /// Population standard deviation.
    pub sd: Array1<f64>,
}

/// Fit column means and population standard deviations.
///
/// Panics if `x_train` has no rows.
pub fn fit_standardizer(x_train: &Array2<f64>) -> Standardizer {
    assert!(x_train.nrows() > 0, "fit_standardizer: empty training matrix");
    let mean = x_train.mean_axis(Axis(0)).expect("non-empty");
    let sd = x_train.std_axis(Axis(0), 0.0);
    Standardizer { mean, sd }
}

impl Standardizer {
    fn is_constant(&self, j: usize) -> bool {
        self.sd[j] <= 1e-12 * self.mean[j].abs().max(1.0)
    }

    pub fn apply(&self, x: &Array2<f64>) -> Array2<f64> {
        let mut out = x.clone();
        for (j, mut col) in out.axis_iter_mut(Axis(1)).enumerate() {
            if self.is_constant(j) {
                col.fill(0.0);
            } else {
                col.mapv_inplace(|v| (v - self.mean[j]) / self.sd[j]);
            }
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn two_point_column() {
        let s = fit_standardizer(&array![[0.0], [2.0]]);
        assert_eq!(s.mean[0], 1.0);
        assert_eq!(s.sd[0], 1.0);
        assert_eq!(s.apply(&array![[4.0]]), array![[3.0]]);
    }

    #[test]
    fn constant_column_maps_to_zero() {
        let x = array![[0.1, 1.0], [0.1, 2.0], [0.1, 6.0]];
        let s = fit_standardizer(&x);
        let z = s.apply(&x);
        assert!(z.column(0).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn training_columns_have_zero_mean_unit_sd() {
        let x = array![[1.0, 10.0], [2.0, -4.0], [7.0, 3.5], [-3.0, 0.0]];
        let z = fit_standardizer(&x).apply(&x);
        for col in z.axis_iter(Axis(1)) {
            assert!(col.mean().unwrap().abs() <= 1e-9);
            assert!((col.std(0.0) - 1.0).abs() <= 1e-9);
        }
    }
}
