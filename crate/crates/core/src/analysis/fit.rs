use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_FIT_POINTS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub window: usize,
    /// Gauge factor, slope over intercept.
    pub k: f64,
    /// Intercept: resistance at zero strain (Ω).
    pub r0_fit: f64,
    pub slope: f64,
    pub r_squared: f64,
    pub n_points: usize,
}

/// Ordinary least squares of `r` on `strain`; `k = slope / intercept`.
pub fn fit_gauge_factor(window: usize, r: &[f64], strain: &[f64]) -> Result<FitResult> {
    if r.len() != strain.len() {
        return Err(Error::DegenerateFit(format!(
            "{} resistance samples for {} strain samples",
            r.len(),
            strain.len()
        )));
    }
    let n = r.len();
    if n < MIN_FIT_POINTS {
        return Err(Error::DegenerateFit(format!("{n} points, need at least {MIN_FIT_POINTS}")));
    }
    if r.iter().chain(strain).any(|v| !v.is_finite()) {
        return Err(Error::DegenerateFit("non-finite samples (open channel?)".into()));
    }
    if strain.iter().all(|&x| x == strain[0]) {
        return Err(Error::DegenerateFit("strain has zero variance".into()));
    }
    if r.iter().all(|&y| y == r[0]) {
        return Ok(FitResult {
            window,
            k: 0.0,
            r0_fit: r[0],
            slope: 0.0,
            r_squared: 0.0,
            n_points: n,
        });
    }
    let line = ols(strain, r).ok_or_else(|| Error::DegenerateFit("strain has zero variance".into()))?;
    Ok(FitResult {
        window,
        k: line.slope / line.intercept,
        r0_fit: line.intercept,
        slope: line.slope,
        r_squared: line.r_squared,
        n_points: n,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Least-squares line `y = intercept + slope x`; `None` if `x` is constant.
pub fn ols(x: &[f64], y: &[f64]) -> Option<LinearFit> {
    let n = x.len().min(y.len());
    if n == 0 || x[..n].iter().all(|&v| v == x[0]) {
        return None;
    }
    let (x, y) = (&x[..n], &y[..n]);
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    if !(sxx > 0.0) {
        return None;
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| {
            let e = b - (intercept + slope * a);
            e * e
        })
        .sum();
    let r_squared = if syy > 0.0 { (1.0 - ss_res / syy).clamp(0.0, 1.0) } else { 0.0 };
    Some(LinearFit { slope, intercept, r_squared })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    fn strains(n: usize) -> Vec<f64> {
        (0..n).map(|i| 1e-3 * (1.0 - (i as f64 * 0.3).cos())).collect()
    }

    #[test]
    fn exact_line_is_recovered() {
        let e = strains(200);
        let r: Vec<f64> = e.iter().map(|x| 46.0 * (1.0 + 126.0 * x)).collect();
        let f = fit_gauge_factor(3, &r, &e).unwrap();
        assert!((f.k - 126.0).abs() < 1e-6);
        assert!(f.r_squared > 1.0 - 1e-12);
        assert_relative_eq!(f.r0_fit, 46.0, max_relative = 1e-12);
        assert_eq!((f.window, f.n_points), (3, 200));
    }

    #[test]
    fn five_point_r_squared_by_hand() {
        // x = 1..5, y = [1, 3, 2, 5, 4]: slope 0.8, intercept 0.6,
        // SS_res = 3.6, SS_tot = 10, R² = 0.64
        let line = ols(&[1.0, 2.0, 3.0, 4.0, 5.0], &[1.0, 3.0, 2.0, 5.0, 4.0]).unwrap();
        assert!((line.slope - 0.8).abs() < 1e-12);
        assert!((line.intercept - 0.6).abs() < 1e-12);
        assert!((line.r_squared - 0.64).abs() < 1e-12);
        assert!(ols(&[2.0; 5], &[1.0, 3.0, 2.0, 5.0, 4.0]).is_none());
    }

    #[test]
    fn constant_resistance_gives_zero() {
        let e = strains(50);
        let f = fit_gauge_factor(0, &vec![45.1; 50], &e).unwrap();
        assert_eq!((f.k, f.r_squared), (0.0, 0.0));
    }

    #[test]
    fn degenerate_inputs_are_rejected() {
        assert!(matches!(
            fit_gauge_factor(0, &[1.0; 20], &[2e-3; 20]),
            Err(Error::DegenerateFit(_))
        ));
        assert!(fit_gauge_factor(0, &[1.0; 5], &strains(5)).is_err());
        let mut r = vec![46.0; 20];
        r[3] = f64::NAN;
        assert!(fit_gauge_factor(0, &r, &strains(20)).is_err());
    }

    #[test]
    fn one_percent_noise_stays_within_two_percent() {
        let e = strains(800);
        let clean: Vec<f64> = e.iter().map(|x| 46.0 * (1.0 + 126.0 * x)).collect();
        let span = clean.iter().cloned().fold(f64::MIN, f64::max) - clean.iter().cloned().fold(f64::MAX, f64::min);
        let noise = Normal::new(0.0, 0.01 * span).unwrap();
        for seed in 0..100 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let r: Vec<f64> = clean.iter().map(|y| y + noise.sample(&mut rng)).collect();
            let f = fit_gauge_factor(0, &r, &e).unwrap();
            assert!((f.k / 126.0 - 1.0).abs() < 0.02, "seed {seed}: k = {}", f.k);
            assert!(f.r_squared > 0.95);
        }
    }

    proptest! {
        #[test]
        fn scaling_resistance_keeps_k_and_r_squared(
            scale in 1e-3..1e3f64,
            k in 0.0..300.0f64,
            wiggle in prop::collection::vec(-1e-3..1e-3f64, 40),
        ) {
            let e = strains(40);
            let r: Vec<f64> = e.iter().zip(&wiggle).map(|(x, w)| 46.0 * (1.0 + k * x + w)).collect();
            let scaled: Vec<f64> = r.iter().map(|v| v * scale).collect();
            let a = fit_gauge_factor(0, &r, &e).unwrap();
            let b = fit_gauge_factor(0, &scaled, &e).unwrap();
            prop_assert!((a.k - b.k).abs() <= 1e-9 * a.k.abs().max(1.0));
            prop_assert!((a.r_squared - b.r_squared).abs() <= 1e-9);
        }
    }
}
