//! Small descriptive statistics used across metrics and the harness.

use crate::error::{Error, Result};

pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

/// Population (1/n) standard deviation.
pub fn population_std(values: &[f64]) -> f64 {
    let m = mean(values);
    let var = values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / values.len() as f64;
    var.sqrt()
}

/// Sample (1/(n-1)) standard deviation; 0 for fewer than two values.
pub fn sample_std(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let m = mean(values);
    let var = values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (values.len() - 1) as f64;
    var.sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct LinearFit {
    pub r_squared: f64,
    pub slope: f64,
    pub intercept: f64,
}

/// Ordinary least squares of `y` on `x`.
///
/// A constant `x` is an error. A `y` that is constant up to rounding
/// (std <= 1e-12 * max(1, |mean|)) explains nothing and gets R^2 = 0.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    assert_eq!(x.len(), y.len());
    let (mx, my) = (mean(x), mean(y));
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let n = x.len() as f64;
    if (sxx / n).sqrt() <= 1e-12 * mx.abs().max(1.0) {
        return Err(Error::DegenerateVariance("regressor"));
    }
    if (syy / n).sqrt() <= 1e-12 * my.abs().max(1.0) {
        return Ok(LinearFit {
            r_squared: 0.0,
            slope: 0.0,
            intercept: my,
        });
    }
    let slope = sxy / sxx;
    let r_squared = ((sxy * sxy) / (sxx * syy)).clamp(0.0, 1.0);
    Ok(LinearFit {
        r_squared,
        slope,
        intercept: my - slope * mx,
    })
}

/// Average ranks (1-based), ties share the mean rank.
pub fn ranks(values: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut out = vec![0.0; values.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && values[idx[j + 1]] == values[idx[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            out[k] = rank;
        }
        i = j + 1;
    }
    out
}

pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let (mx, my) = (mean(x), mean(y));
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    sxy / (sxx * syy).sqrt()
}

/// Spearman rank correlation (Pearson on average ranks).
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    pearson(&ranks(x), &ranks(y))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn std_variants() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert!((population_std(&v) - 1.25f64.sqrt()).abs() < 1e-15);
        assert!((sample_std(&v) - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn exact_line_and_constant_response() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y = [1.0, 3.0, 5.0, 7.0];
        let f = linear_fit(&x, &y).unwrap();
        assert!((f.r_squared - 1.0).abs() < 1e-15);
        assert!((f.slope - 2.0).abs() < 1e-15);
        assert!((f.intercept - 1.0).abs() < 1e-15);
        let c = linear_fit(&x, &[1.0, 1.0 + 1e-16, 1.0, 1.0]).unwrap();
        assert_eq!(c.r_squared, 0.0);
        assert!(linear_fit(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn spearman_ties_and_monotone() {
        assert_eq!(ranks(&[3.0, 1.0, 3.0, 2.0]), vec![3.5, 1.0, 3.5, 2.0]);
        assert!((spearman(&[1.0, 2.0, 3.0], &[10.0, 20.0, 35.0]) - 1.0).abs() < 1e-15);
        assert!((spearman(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]) + 1.0).abs() < 1e-15);
    }
}
