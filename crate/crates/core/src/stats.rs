//! Small summary-statistics helpers shared by the Monte Carlo drivers.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanStderr {
    pub mean: f64,
    pub stderr: f64,
    pub count: usize,
}

/// Sample mean and standard error of the mean (n - 1 denominator).
/// A single observation has zero standard error; an empty slice gives NaN.
pub fn mean_stderr(values: &[f64]) -> MeanStderr {
    let count = values.len();
    if count == 0 {
        return MeanStderr {
            mean: f64::NAN,
            stderr: f64::NAN,
            count,
        };
    }
    let mean = values.iter().sum::<f64>() / count as f64;
    if count == 1 {
        return MeanStderr {
            mean,
            stderr: 0.0,
            count,
        };
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (count - 1) as f64;
    MeanStderr {
        mean,
        stderr: (var / count as f64).sqrt(),
        count,
    }
}

/// Binomial proportion with its standard error `sqrt(p(1-p)/n)`.
pub fn proportion(successes: usize, trials: usize) -> (f64, f64) {
    if trials == 0 {
        return (f64::NAN, f64::NAN);
    }
    let p = successes as f64 / trials as f64;
    (p, (p * (1.0 - p) / trials as f64).sqrt())
}

/// Ordinary least squares fit of `y = intercept + slope * x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: usize,
}

pub fn least_squares(xs: &[f64], ys: &[f64]) -> Option<LinearFit> {
    let n = xs.len();
    if n < 2 || n != ys.len() {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        sxy * sxy / (sxx * syy)
    };
    Some(LinearFit {
        slope,
        intercept: my - slope * mx,
        r_squared,
        points: n,
    })
}

/// Rounds to ten significant digits, the precision used for JSON output.
pub fn sig10(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.9e}").parse().unwrap_or(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_and_stderr_of_small_sample() {
        let s = mean_stderr(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(s.mean, 2.5);
        // sample variance 5/3, stderr sqrt(5/12)
        assert!((s.stderr - (5.0f64 / 12.0).sqrt()).abs() < 1e-15);
        assert_eq!(mean_stderr(&[7.0]).stderr, 0.0);
        assert!(mean_stderr(&[]).mean.is_nan());
    }

    #[test]
    fn fit_recovers_exact_line() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys: Vec<f64> = xs.iter().map(|x| 1.5 - 0.25 * x).collect();
        let fit = least_squares(&xs, &ys).unwrap();
        assert!((fit.slope + 0.25).abs() < 1e-14);
        assert!((fit.intercept - 1.5).abs() < 1e-14);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        assert!(least_squares(&[1.0], &[1.0]).is_none());
    }

    #[test]
    fn ten_significant_digits() {
        assert_eq!(sig10(0.179423178532111), 0.1794231785);
        assert_eq!(sig10(1234567.891234), 1234567.891);
        assert_eq!(sig10(0.0), 0.0);
    }
}
