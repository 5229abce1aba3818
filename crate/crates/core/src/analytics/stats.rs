use serde::{Deserialize, Serialize};

use super::AnalyticsError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormalizationMode {
    /// `(x - min) / (max - min)`
    #[default]
    MinMax,
    /// `x / (max - min)`
    RangeDivide,
}

/// Rescale by the range of `values`. Constant input maps to all zeros
/// under either mode.
pub fn normalize(values: &[f64], mode: NormalizationMode) -> Vec<f64> {
    let Some((min, max)) = min_max(values) else {
        return Vec::new();
    };
    let range = max - min;
    if range == 0.0 {
        return vec![0.0; values.len()];
    }
    values.iter().map(|&x| rescale(x, min, max, mode)).collect()
}

/// One value under the transform defined by the range `[min, max]`.
pub(crate) fn rescale(x: f64, min: f64, max: f64, mode: NormalizationMode) -> f64 {
    let range = max - min;
    if range == 0.0 {
        return 0.0;
    }
    match mode {
        NormalizationMode::MinMax => (x - min) / range,
        NormalizationMode::RangeDivide => x / range,
    }
}

pub(crate) fn min_max(values: &[f64]) -> Option<(f64, f64)> {
    let first = *values.first()?;
    Some(
        values
            .iter()
            .fold((first, first), |(lo, hi), &x| (lo.min(x), hi.max(x))),
    )
}

/// Mean computed around the first element, so constant input returns that
/// element exactly.
pub(crate) fn mean(values: &[f64]) -> f64 {
    let Some(&pivot) = values.first() else {
        return f64::NAN;
    };
    pivot + values.iter().map(|x| x - pivot).sum::<f64>() / values.len() as f64
}

fn is_constant(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[0] == w[1])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DescriptiveStats {
    pub n: usize,
    pub mean: f64,
    pub median: f64,
    /// Sample standard deviation (n - 1 denominator); 0 for a single value.
    pub sd: f64,
    pub min: f64,
    pub max: f64,
}

pub fn describe(values: &[f64]) -> Result<DescriptiveStats, AnalyticsError> {
    let (min, max) =
        min_max(values).ok_or_else(|| AnalyticsError::DegenerateInput("no values".into()))?;
    let n = values.len();
    let mean = mean(values);

    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    };

    let sd = if n < 2 || is_constant(values) {
        0.0
    } else {
        let ss: f64 = values.iter().map(|x| (x - mean).powi(2)).sum();
        (ss / (n - 1) as f64).sqrt()
    };
    Ok(DescriptiveStats {
        n,
        mean,
        median,
        sd,
        min,
        max,
    })
}

fn paired(x: &[f64], y: &[f64]) -> Result<(), AnalyticsError> {
    if x.len() != y.len() {
        return Err(AnalyticsError::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(AnalyticsError::DegenerateInput(
            "need at least two paired values".into(),
        ));
    }
    Ok(())
}

fn co_moment(x: &[f64], y: &[f64]) -> f64 {
    let (mx, my) = (mean(x), mean(y));
    x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum()
}

/// Sample covariance (n - 1 denominator).
pub fn covariance(x: &[f64], y: &[f64]) -> Result<f64, AnalyticsError> {
    paired(x, y)?;
    Ok(co_moment(x, y) / (x.len() - 1) as f64)
}

/// Sample Pearson correlation, clamped to `[-1, 1]`.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64, AnalyticsError> {
    paired(x, y)?;
    if is_constant(x) || is_constant(y) {
        return Err(AnalyticsError::DegenerateInput("constant vector".into()));
    }
    let sxy = co_moment(x, y);
    let sxx = co_moment(x, x);
    let syy = co_moment(y, y);
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn normalization_modes() {
        assert_eq!(normalize(&[1.0, 3.0, 5.0], NormalizationMode::MinMax), vec![0.0, 0.5, 1.0]);
        assert_eq!(
            normalize(&[1.0, 3.0, 5.0], NormalizationMode::RangeDivide),
            vec![0.25, 0.75, 1.25]
        );
        assert_eq!(normalize(&[2.0, 2.0, 2.0], NormalizationMode::MinMax), vec![0.0; 3]);
        assert_eq!(normalize(&[2.0, 2.0], NormalizationMode::RangeDivide), vec![0.0; 2]);
        assert!(normalize(&[], NormalizationMode::MinMax).is_empty());
    }

    #[test]
    fn describe_examples() {
        let d = describe(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!((d.mean, d.median, d.sd), (2.0, 2.0, 1.0));
        let d = describe(&[4.0]).unwrap();
        assert_eq!((d.mean, d.median, d.sd), (4.0, 4.0, 0.0));
        assert_eq!(describe(&[2.0, 4.0, 5.0, 4.0]).unwrap().median, 4.0);
        let d = describe(&[0.1, 0.1, 0.1]).unwrap();
        assert_eq!((d.mean, d.sd), (0.1, 0.0));
        assert!(describe(&[]).is_err());
    }

    #[test]
    fn pearson_examples() {
        assert!(close(pearson(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap(), 1.0));
        assert!(close(pearson(&[1.0, 2.0, 3.0, 4.0], &[1.0, 3.0, 2.0, 4.0]).unwrap(), 0.8));
        assert!(matches!(
            pearson(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]),
            Err(AnalyticsError::DegenerateInput(_))
        ));
        assert!(matches!(
            pearson(&[1.0], &[1.0]),
            Err(AnalyticsError::DegenerateInput(_))
        ));
        assert!(matches!(
            pearson(&[1.0, 2.0], &[1.0]),
            Err(AnalyticsError::LengthMismatch { left: 2, right: 1 })
        ));
    }

    #[test]
    fn covariance_examples() {
        assert!(close(covariance(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]).unwrap(), 2.0));
        assert_eq!(covariance(&[3.3, 3.3], &[3.3, 3.3]).unwrap(), 0.0);
        assert!(close(covariance(&[1.0, 2.0], &[2.0, 1.0]).unwrap(), -0.5));
        assert!(covariance(&[1.0], &[2.0]).is_err());
    }

    fn vector() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-1000.0f64..1000.0, 2..50)
    }

    proptest! {
        #[test]
        fn affine_images_correlate_perfectly(x in vector(), a in 0.01f64..100.0, b in -100.0f64..100.0) {
            prop_assume!(!is_constant(&x));
            let pos: Vec<f64> = x.iter().map(|v| a * v + b).collect();
            let neg: Vec<f64> = x.iter().map(|v| -a * v + b).collect();
            prop_assume!(!is_constant(&pos) && !is_constant(&neg));
            prop_assert!((pearson(&x, &pos).unwrap() - 1.0).abs() < 1e-9);
            prop_assert!((pearson(&x, &neg).unwrap() + 1.0).abs() < 1e-9);
        }

        #[test]
        fn covariance_factors_through_correlation(
            (x, y) in (2usize..50).prop_flat_map(|n| (
                prop::collection::vec(-1000.0f64..1000.0, n),
                prop::collection::vec(-1000.0f64..1000.0, n),
            ))
        ) {
            prop_assume!(!is_constant(&x) && !is_constant(&y));
            let r = pearson(&x, &y).unwrap();
            let sx = describe(&x).unwrap().sd;
            let sy = describe(&y).unwrap().sd;
            let cov = covariance(&x, &y).unwrap();
            prop_assert!((cov - r * sx * sy).abs() <= 1e-9 * (1.0 + cov.abs()));
        }

        #[test]
        fn min_max_in_unit_interval_and_order_preserving(x in vector(), divide in any::<bool>()) {
            let mode = if divide { NormalizationMode::RangeDivide } else { NormalizationMode::MinMax };
            let out = normalize(&x, mode);
            if mode == NormalizationMode::MinMax {
                prop_assert!(out.iter().all(|v| (0.0..=1.0).contains(v)));
            }
            for i in 0..x.len() {
                for j in 0..x.len() {
                    if x[i] < x[j] {
                        prop_assert!(out[i] <= out[j]);
                    }
                }
            }
        }

        #[test]
        fn median_within_range(x in vector()) {
            let d = describe(&x).unwrap();
            prop_assert!(d.min <= d.median && d.median <= d.max);
            prop_assert!(d.sd >= 0.0);
        }
    }
}
