//! Closed-form bound functions and their validation against sampled curves.
//!
//! Each cataloged surrogate has a concave bound function of one of two
//! shapes, `Gamma(s) = sqrt(k s)` or `Gamma(s) = k s`:
//!
//! | family      | entry                     | Gamma                       |
//! |-------------|---------------------------|-----------------------------|
//! | margin      | exponential, logistic     | sqrt(2 s)                   |
//! | margin      | squared hinge             | sqrt(s)                     |
//! | margin      | hinge                     | s                           |
//! | comp-sum    | sum-exp ratio, neg-log    | sqrt(2 s)                   |
//! | comp-sum    | power family, tau in [1,2)| sqrt(2 n^{tau-1} s)         |
//! | comp-sum    | mae                       | n s                         |
//! | constrained | exponential               | sqrt((4 - 2/(n-1)) s)       |
//! | constrained | square, squared hinge     | sqrt((2 - 1/(n-1)) s)       |
//! | constrained | hinge                     | s                           |
//!
//! The constrained constants carry the factor `2 - 1/(n-1)` from the family's
//! transformation scaling; at n = 2 they reduce to sqrt(2 s), sqrt(s), and s.
//! A bound function is valid for a curve when `Gamma(T(t)) >= t` at every
//! sample; the tightness ratio `Gamma(T(t))/t` approaches 1 for the tight
//! entries as t -> 0.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::phi::{Family, Phi, SurrogateSpec};
use crate::transform::{constrained_scale, TransformCurve};

/// Shape of a closed-form bound function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "k")]
pub enum GammaShape {
    /// `Gamma(s) = sqrt(k s)`
    #[serde(rename = "sqrt-scaled")]
    SqrtScaled(f64),
    /// `Gamma(s) = k s`
    #[serde(rename = "linear-scaled")]
    LinearScaled(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaForm {
    pub spec_id: String,
    pub shape: GammaShape,
}

impl GammaForm {
    pub fn value(&self, s: f64) -> f64 {
        match self.shape {
            GammaShape::SqrtScaled(k) => (k * s).sqrt(),
            GammaShape::LinearScaled(k) => k * s,
        }
    }
}

/// Look up the cataloged bound function for a spec.
///
/// The comp-sum power family is cataloged for `tau` in `[1, 2)`, where the
/// constant is `2 n^{tau-1}`; the exponent `alpha = tau - 1` matches the
/// generalized cross-entropy parameterization `sqrt(2 n^alpha s)`.
pub fn gamma_of(spec: &SurrogateSpec) -> Result<GammaForm, Error> {
    let n = spec.n_classes as f64;
    let shape = match (spec.family, &spec.phi) {
        (Family::Margin, Phi::Exponential) | (Family::Margin, Phi::Logistic) => {
            GammaShape::SqrtScaled(2.0)
        }
        (Family::Margin, Phi::SquaredHinge) => GammaShape::SqrtScaled(1.0),
        (Family::Margin, Phi::Hinge) => GammaShape::LinearScaled(1.0),
        (Family::CompSum, Phi::NegLog) | (Family::CompSum, Phi::SumExpRatio) => {
            GammaShape::SqrtScaled(2.0)
        }
        (Family::CompSum, Phi::MaeLinear) => GammaShape::LinearScaled(n),
        (Family::CompSum, Phi::CompSumPower { tau }) => {
            if (1.0..2.0).contains(tau) {
                GammaShape::SqrtScaled(2.0 * n.powf(tau - 1.0))
            } else {
                return Err(Error::NotFound(format!(
                    "no cataloged bound function for the comp-sum power family with tau = {tau} < 1"
                )));
            }
        }
        (Family::Constrained, Phi::ConstrainedExp) => {
            GammaShape::SqrtScaled(2.0 * constrained_scale(spec.n_classes))
        }
        (Family::Constrained, Phi::ConstrainedSquare)
        | (Family::Constrained, Phi::ConstrainedSquaredHinge) => {
            GammaShape::SqrtScaled(constrained_scale(spec.n_classes))
        }
        (Family::Constrained, Phi::ConstrainedHinge) => GammaShape::LinearScaled(1.0),
        _ => {
            return Err(Error::NotFound(format!(
                "no cataloged bound function for {}",
                spec.id()
            )))
        }
    };
    Ok(GammaForm {
        spec_id: spec.id(),
        shape,
    })
}

/// Per-sample record of a bound-shape validation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundShapePoint {
    pub t: f64,
    #[serde(rename = "T")]
    pub transform_value: f64,
    pub gamma_of_transform: f64,
    pub tightness_ratio: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundShapeReport {
    pub schema: u32,
    pub spec_id: String,
    pub shape: GammaShape,
    /// `Gamma(T(t)) >= t - 1e-9` at every sample.
    pub valid: bool,
    pub min_slack: f64,
    pub points: Vec<BoundShapePoint>,
}

pub const BOUND_VALIDITY_TOL: f64 = 1e-9;

/// Check `Gamma(T(t)) >= t` at every valid sample of the curve and report
/// the tightness ratio at each point.
pub fn validate_bound_shape(
    curve: &TransformCurve,
    form: &GammaForm,
) -> Result<BoundShapeReport, Error> {
    if curve.spec_id != form.spec_id {
        return Err(Error::Precondition(format!(
            "curve spec `{}` does not match bound-function spec `{}`",
            curve.spec_id, form.spec_id
        )));
    }
    let mut points = Vec::new();
    let mut min_slack = f64::INFINITY;
    for (t, v) in curve.valid_samples() {
        let g = form.value(v.max(0.0));
        min_slack = min_slack.min(g - t);
        points.push(BoundShapePoint {
            t,
            transform_value: v,
            gamma_of_transform: g,
            tightness_ratio: g / t,
        });
    }
    if points.is_empty() {
        return Err(Error::InsufficientSamples(
            "curve carries no valid samples".into(),
        ));
    }
    Ok(BoundShapeReport {
        schema: 1,
        spec_id: curve.spec_id.clone(),
        shape: form.shape,
        valid: min_slack >= -BOUND_VALIDITY_TOL,
        min_slack,
        points,
    })
}
