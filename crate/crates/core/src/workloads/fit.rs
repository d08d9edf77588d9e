use crate::error::{Error, Result};

/// Fitted power law `x_i ≈ scale / i^exponent`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZipfFit {
    pub exponent: f64,
    pub scale: f64,
}

/// Unweighted least squares of `ln x_i` on `ln i` over the positive entries
/// of a rank-ordered histogram (rank 1 first).
pub fn fit_zipf(histogram: &[u64]) -> Result<ZipfFit> {
    let xs: Vec<f64> = histogram.iter().map(|&x| x as f64).collect();
    fit_zipf_real(&xs)
}

/// [`fit_zipf`] over real-valued frequencies.
pub fn fit_zipf_real(values: &[f64]) -> Result<ZipfFit> {
    let points: Vec<(f64, f64)> = values
        .iter()
        .enumerate()
        .filter(|(_, &x)| x > 0.0)
        .map(|(i, &x)| (((i + 1) as f64).ln(), x.ln()))
        .collect();
    if points.len() < 2 {
        return Err(Error::DegenerateInput(format!(
            "need at least two positive counts, got {}",
            points.len()
        )));
    }
    let m = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / m;
    let my = points.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Ok(ZipfFit {
        exponent: -slope,
        scale: (my - slope * mx).exp(),
    })
}

/// `scale / i^exponent` for ranks `1..=len`, unrounded.
pub fn zipf_series(scale: f64, exponent: f64, len: usize) -> Vec<f64> {
    (1..=len).map(|i| scale / (i as f64).powf(exponent)).collect()
}
