//! Growth-rate estimation for transformation curves near zero.
//!
//! A least-squares fit of `log T` against `log t` inside a window estimates
//! the exponent of `T(t) ~ c t^k`. Smooth losses come out quadratic (k = 2,
//! the square-root bound regime), polyhedral losses linear (k = 1). The
//! sandwich constants are the extreme values of `T(t) / t^k` over the window
//! at the rounded exponent, so `c_lower t^k <= T(t) <= C_upper t^k` holds at
//! every window sample by construction.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::transform::TransformCurve;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Quadratic,
    Linear,
    Other,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GrowthReport {
    pub spec_id: String,
    pub exponent: f64,
    /// 95% band from the ordinary-least-squares standard error of the slope.
    pub exponent_ci: (f64, f64),
    pub c_lower: f64,
    #[serde(rename = "C_upper")]
    pub c_upper: f64,
    pub fit_window: (f64, f64),
    pub samples_used: usize,
    pub verdict: Verdict,
}

const QUADRATIC_BAND: (f64, f64) = (1.95, 2.05);
const LINEAR_BAND: (f64, f64) = (0.97, 1.03);

/// Fit the growth exponent of a curve on `(t_min, t_max)`.
pub fn fit_growth(curve: &TransformCurve, window: (f64, f64)) -> Result<GrowthReport, Error> {
    let (t_min, t_max) = window;
    if !(t_min > 0.0 && t_max > t_min) {
        return Err(Error::Parameter(format!(
            "bad fit window ({t_min}, {t_max})"
        )));
    }
    let pts: Vec<(f64, f64)> = curve
        .valid_samples()
        .filter(|&(t, _)| t >= t_min && t <= t_max)
        .collect();
    if pts.len() < 8 {
        return Err(Error::InsufficientSamples(format!(
            "need at least 8 valid samples in the window, found {}",
            pts.len()
        )));
    }
    if let Some(&(t, v)) = pts.iter().find(|&&(_, v)| v <= 0.0) {
        return Err(Error::NonpositiveValues(format!(
            "T({t}) = {v}; raise t_min above the underflow region"
        )));
    }

    let xs: Vec<f64> = pts.iter().map(|&(t, _)| t.ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|&(_, v)| v.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - slope * x - intercept).powi(2))
        .sum();
    let se = if n > 2.0 {
        (ss_res / ((n - 2.0) * sxx)).sqrt()
    } else {
        0.0
    };

    let verdict = if (QUADRATIC_BAND.0..=QUADRATIC_BAND.1).contains(&slope) {
        Verdict::Quadratic
    } else if (LINEAR_BAND.0..=LINEAR_BAND.1).contains(&slope) {
        Verdict::Linear
    } else {
        Verdict::Other
    };

    let k = slope.round();
    let ratios = pts.iter().map(|&(t, v)| v / t.powf(k));
    let c_lower = ratios.clone().fold(f64::INFINITY, f64::min);
    let c_upper = ratios.fold(f64::NEG_INFINITY, f64::max);

    Ok(GrowthReport {
        spec_id: curve.spec_id.clone(),
        exponent: slope,
        exponent_ci: (slope - 1.96 * se, slope + 1.96 * se),
        c_lower,
        c_upper,
        fit_window: window,
        samples_used: pts.len(),
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phi::{Phi, SurrogateSpec};
    use crate::solve::parse_grid;
    use crate::transform::{sample_curve, CurveOptions};

    fn curve(spec: &SurrogateSpec) -> TransformCurve {
        let grid = parse_grid("log:1e-4:0.5:40").unwrap();
        sample_curve(spec, &grid, &CurveOptions::default()).unwrap()
    }

    #[test]
    fn exponential_margin_quadratic_with_half_constant() {
        let c = curve(&SurrogateSpec::margin(Phi::Exponential));
        let r = fit_growth(&c, (1e-3, 1e-1)).unwrap();
        assert_eq!(r.verdict, Verdict::Quadratic);
        assert!((r.exponent - 2.0).abs() < 0.05, "exponent {}", r.exponent);
        // T(t) = 1 - sqrt(1 - t^2) ~ t^2/2, so the lower constant approaches 1/2.
        assert!((r.c_lower - 0.5).abs() < 0.01, "c_lower {}", r.c_lower);
        assert!(r.c_lower > 0.0 && r.c_lower <= r.c_upper);
    }

    #[test]
    fn hinge_margin_linear_exact() {
        let c = curve(&SurrogateSpec::margin(Phi::Hinge));
        let r = fit_growth(&c, (1e-3, 1e-1)).unwrap();
        assert_eq!(r.verdict, Verdict::Linear);
        assert!((r.exponent - 1.0).abs() < 1e-9);
    }

    #[test]
    fn mae_comp_sum_constants_pin_to_inverse_n() {
        let c = curve(&SurrogateSpec::comp_sum(Phi::MaeLinear, 4));
        let r = fit_growth(&c, (1e-3, 1e-1)).unwrap();
        assert_eq!(r.verdict, Verdict::Linear);
        assert!((r.exponent - 1.0).abs() < 1e-9);
        assert!((r.c_lower - 0.25).abs() < 1e-9);
        assert!((r.c_upper - 0.25).abs() < 1e-9);
    }

    #[test]
    fn sandwich_holds_at_every_window_sample() {
        let c = curve(&SurrogateSpec::margin(Phi::Logistic));
        let r = fit_growth(&c, (1e-3, 1e-1)).unwrap();
        let k = r.exponent.round();
        for (t, v) in c
            .valid_samples()
            .filter(|&(t, _)| (1e-3..=1e-1).contains(&t))
        {
            assert!(r.c_lower * t.powf(k) <= v + 1e-15);
            assert!(v <= r.c_upper * t.powf(k) + 1e-15);
        }
    }

    #[test]
    fn window_errors() {
        let c = curve(&SurrogateSpec::margin(Phi::Exponential));
        assert!(matches!(
            fit_growth(&c, (0.4, 0.5)),
            Err(Error::InsufficientSamples(_))
        ));
        assert!(fit_growth(&c, (0.1, 0.01)).is_err());
    }
}
