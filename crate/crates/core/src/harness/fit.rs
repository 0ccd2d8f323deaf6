use serde::Serialize;

use crate::error::{Error, Result};

/// Least-squares line through (log x, log y).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: usize,
}

/// Outcome of comparing a fitted exponent with its prediction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScalingFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub predicted_slope: f64,
    pub tolerance: f64,
    pub pass: bool,
}

pub const MIN_R_SQUARED: f64 = 0.98;

impl LogLogFit {
    /// Pass iff |slope − predicted| ≤ tolerance and r² ≥ 0.98.
    pub fn against(&self, predicted_slope: f64, tolerance: f64) -> ScalingFit {
        ScalingFit {
            slope: self.slope,
            intercept: self.intercept,
            r_squared: self.r_squared,
            predicted_slope,
            tolerance,
            pass: (self.slope - predicted_slope).abs() <= tolerance && self.r_squared >= MIN_R_SQUARED,
        }
    }
}

/// Fit log y = intercept + slope·log x. Needs at least 8 positive points.
pub fn fit_power_law(xs: &[f64], ys: &[f64]) -> Result<LogLogFit> {
    if xs.len() != ys.len() {
        return Err(Error::InvalidInput(format!("{} x values but {} y values", xs.len(), ys.len())));
    }
    if xs.len() < 8 {
        return Err(Error::InvalidInput(format!("power-law fit needs >= 8 points, got {}", xs.len())));
    }
    if xs.iter().chain(ys).any(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(Error::InvalidInput("power-law fit needs positive finite data".into()));
    }
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateFit("all x values are equal".into()));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = lx.iter().zip(&ly).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let ss_tot: f64 = ly.iter().map(|y| (y - my).powi(2)).sum();
    // A constant series is fitted exactly by a flat line.
    let r_squared = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    Ok(LogLogFit { slope, intercept, r_squared, points: xs.len() })
}

/// Keep the pairs with x strictly below `cutoff`.
pub fn restrict_below(xs: &[f64], ys: &[f64], cutoff: f64) -> (Vec<f64>, Vec<f64>) {
    xs.iter().zip(ys).filter(|(x, _)| **x < cutoff).map(|(x, y)| (*x, *y)).unzip()
}

/// Spread of a series around its mean, as used for log-corrected counts.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RatioStability {
    pub mean: f64,
    /// max |r/mean − 1|.
    pub max_rel_deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
}

pub fn ratio_stability(ratios: &[f64], tolerance: f64) -> Result<RatioStability> {
    if ratios.is_empty() || ratios.iter().any(|r| !r.is_finite()) {
        return Err(Error::InvalidInput("ratio stability needs finite values".into()));
    }
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let max_rel_deviation = ratios.iter().map(|r| (r / mean - 1.0).abs()).fold(0.0, f64::max);
    Ok(RatioStability { mean, max_rel_deviation, tolerance, pass: max_rel_deviation <= tolerance })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::RngStream;

    fn xs() -> Vec<f64> {
        (0..12).map(|k| 1e-3 * 1.6f64.powi(k)).collect()
    }

    #[test]
    fn exact_power() {
        let x = xs();
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v * v).collect();
        let f = fit_power_law(&x, &y).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-12);
        assert!((f.intercept - 3f64.ln()).abs() < 1e-10);
        assert!((f.r_squared - 1.0).abs() < 1e-12);
        assert!(f.against(2.0, 0.15).pass);
        assert!(!f.against(2.5, 0.15).pass);
    }

    #[test]
    fn noisy_power() {
        let mut rng = RngStream::new(17);
        let x: Vec<f64> = (0..40).map(|k| 1e-4 * 1.2f64.powi(k)).collect();
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v * v * (1.0 + 0.01 * rng.normal())).collect();
        let f = fit_power_law(&x, &y).unwrap();
        assert!((f.slope - 2.0).abs() < 0.05);
    }

    #[test]
    fn constant_series() {
        let x = xs();
        let f = fit_power_law(&x, &vec![4.0; x.len()]).unwrap();
        assert!(f.slope.abs() < 1e-12);
        assert_eq!(f.r_squared, 1.0);
    }

    #[test]
    fn degenerate_and_invalid() {
        let same = vec![0.1; 9];
        assert!(matches!(fit_power_law(&same, &xs()[..9]), Err(Error::DegenerateFit(_))));
        assert!(fit_power_law(&xs()[..7], &xs()[..7]).is_err());
        let mut y = xs();
        y[3] = -1.0;
        assert!(fit_power_law(&xs(), &y).is_err());
    }

    #[test]
    fn low_r_squared_fails() {
        let x = xs();
        let y: Vec<f64> = x.iter().enumerate().map(|(i, v)| v * if i % 2 == 0 { 1.0 } else { 30.0 }).collect();
        let f = fit_power_law(&x, &y).unwrap();
        assert!(!f.against(f.slope, 0.15).pass);
    }

    #[test]
    fn restriction_and_ratios() {
        let (x, y) = restrict_below(&[0.1, 0.2, 0.3], &[1.0, 2.0, 3.0], 0.25);
        assert_eq!((x, y), (vec![0.1, 0.2], vec![1.0, 2.0]));
        let s = ratio_stability(&[0.9, 1.0, 1.1], 0.2).unwrap();
        assert!(s.pass && (s.max_rel_deviation - 0.1).abs() < 1e-12);
        assert!(!ratio_stability(&[0.5, 1.5], 0.2).unwrap().pass);
    }
}
