use nalgebra::DMatrix;

use crate::data::{summarize, ResponseMatrix, VarianceMode};
use crate::error::{Error, Result};

/// Cronbach's alpha, `K/(K-1) * (1 - sum(item var) / total var)`.
///
/// The variance normalization cancels between numerator and denominator,
/// so `mode` does not change the result.
pub fn cronbach_alpha(m: &ResponseMatrix, mode: VarianceMode) -> Result<f64> {
    if m.n_items() < 2 {
        return Err(Error::SingleItem);
    }
    let s = summarize(m, mode);
    alpha_parts(m.n_items(), s.item_variances.iter().sum(), s.total_variance)
}

/// Alpha computed directly from an item covariance matrix.
pub fn alpha_from_covariance(cov: &DMatrix<f64>) -> Result<f64> {
    let k = cov.nrows();
    if k < 2 {
        return Err(Error::SingleItem);
    }
    alpha_parts(k, cov.diagonal().sum(), cov.sum())
}

fn alpha_parts(k: usize, item_var_sum: f64, total_var: f64) -> Result<f64> {
    if total_var <= f64::EPSILON * item_var_sum.abs().max(1.0) {
        return Err(Error::ZeroTotalVariance);
    }
    let k = k as f64;
    Ok(k / (k - 1.0) * (1.0 - item_var_sum / total_var))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_items(a: &[f64], b: &[f64]) -> ResponseMatrix {
        ResponseMatrix::from_columns(&[a, b], vec!["a".into(), "b".into()]).unwrap()
    }

    #[test]
    fn identical_items() {
        let m = two_items(&[1., 2., 3.], &[1., 2., 3.]);
        assert_eq!(cronbach_alpha(&m, VarianceMode::Sample).unwrap(), 1.0);
    }

    #[test]
    fn cancelling_items_have_no_total_variance() {
        let m = two_items(&[1., 2., 3.], &[3., 2., 1.]);
        assert!(matches!(
            cronbach_alpha(&m, VarianceMode::Sample),
            Err(Error::ZeroTotalVariance)
        ));
    }

    #[test]
    fn hand_computed_two_thirds() {
        // item variances 1 and 1, totals (2, 5, 5) with variance 3
        let m = two_items(&[1., 2., 3.], &[1., 3., 2.]);
        for mode in [VarianceMode::Sample, VarianceMode::Population] {
            let a = cronbach_alpha(&m, mode).unwrap();
            assert!((a - 2.0 / 3.0).abs() < 1e-12, "{mode:?}: {a}");
        }
    }

    #[test]
    fn single_item_rejected() {
        let m = ResponseMatrix::from_rows(&[[1.0], [2.0]]).unwrap();
        assert!(matches!(
            cronbach_alpha(&m, VarianceMode::Sample),
            Err(Error::SingleItem)
        ));
    }
}
