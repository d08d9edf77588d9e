use crate::error::{Error, Result};

/// Two-sided trimmed mean: drops the `ceil(trim · len)` smallest and largest
/// samples and averages the rest. Falls back to the median when trimming
/// would leave nothing.
///
/// This is the robust mean estimator behind the one-pass distinct-element
/// estimator. Buckets holding an item with frequency above one are the
/// corrupted samples; trimming removes them.
pub fn robust_mean_est(samples: &[f64], trim: f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    if !(0.0..0.5).contains(&trim) {
        return Err(Error::InvalidParameter(format!(
            "trim must lie in [0, 0.5), got {trim}"
        )));
    }
    let len = samples.len();
    if trim == 0.0 {
        return Ok(samples.iter().sum::<f64>() / len as f64);
    }
    // Guard against trim · len landing a hair above an integer.
    let cut = (trim * len as f64 - 1e-9).ceil().max(0.0) as usize;
    let mut sorted = samples.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    if 2 * cut >= len {
        let mid = len / 2;
        return Ok(if len % 2 == 1 {
            sorted[mid]
        } else {
            (sorted[mid - 1] + sorted[mid]) / 2.0
        });
    }
    let kept = &sorted[cut..len - cut];
    Ok(kept.iter().sum::<f64>() / kept.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_samples() {
        for trim in [0.0, 0.1, 0.25, 0.49] {
            assert_eq!(robust_mean_est(&[5.0; 4], trim).unwrap(), 5.0);
        }
    }

    #[test]
    fn drops_outliers() {
        assert_eq!(robust_mean_est(&[0.0, 0.0, 0.0, 1000.0], 0.25).unwrap(), 0.0);
        assert_eq!(robust_mean_est(&[1.0, 2.0, 3.0, 4.0, 100.0], 0.2).unwrap(), 3.0);
    }

    #[test]
    fn zero_trim_is_the_mean() {
        let xs = [1.0, 2.0, 4.0, 8.0];
        assert_eq!(robust_mean_est(&xs, 0.0).unwrap(), 3.75);
    }

    #[test]
    fn over_trimming_falls_back_to_median() {
        assert_eq!(robust_mean_est(&[1.0, 9.0], 0.4).unwrap(), 5.0);
        assert_eq!(robust_mean_est(&[7.0], 0.3).unwrap(), 7.0);
    }

    #[test]
    fn errors() {
        assert!(matches!(robust_mean_est(&[], 0.1), Err(Error::EmptyInput)));
        assert!(robust_mean_est(&[1.0], 0.5).is_err());
        assert!(robust_mean_est(&[1.0], -0.1).is_err());
    }
}
