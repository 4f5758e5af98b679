//! The standard spec catalog swept by the dichotomy analysis.
//!
//! Smooth entries are expected to fit a quadratic growth exponent, polyhedral
//! entries a linear one.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::phi::{Family, Phi, Smoothness, SurrogateSpec};

/// Smooth catalog: margin exponential/logistic/squared-hinge; comp-sum
/// neg-log, sum-exp ratio, and power members for n in {2, 3, 5, 10};
/// constrained exponential and square for n in {2, 3, 5}.
pub fn smooth_specs() -> Vec<SurrogateSpec> {
    let mut specs = vec![
        SurrogateSpec::margin(Phi::Exponential),
        SurrogateSpec::margin(Phi::Logistic),
        SurrogateSpec::margin(Phi::SquaredHinge),
    ];
    for n in [2usize, 3, 5, 10] {
        specs.push(SurrogateSpec::comp_sum(Phi::NegLog, n));
        specs.push(SurrogateSpec::comp_sum(Phi::SumExpRatio, n));
        for tau in [0.5, 1.0, 1.5] {
            specs.push(SurrogateSpec::comp_sum_power(tau, n));
        }
    }
    for n in [2usize, 3, 5] {
        specs.push(SurrogateSpec::constrained(Phi::ConstrainedExp, n));
        specs.push(SurrogateSpec::constrained(Phi::ConstrainedSquare, n));
    }
    specs
}

/// Polyhedral catalog: hinge margin, mae comp-sum, constrained hinge.
pub fn polyhedral_specs() -> Vec<SurrogateSpec> {
    let mut specs = vec![SurrogateSpec::margin(Phi::Hinge)];
    for n in [2usize, 3, 5, 10] {
        specs.push(SurrogateSpec::comp_sum(Phi::MaeLinear, n));
    }
    for n in [2usize, 3, 5] {
        specs.push(SurrogateSpec::constrained(Phi::ConstrainedHinge, n));
    }
    specs
}

pub fn full_catalog() -> Vec<SurrogateSpec> {
    let mut specs = smooth_specs();
    specs.extend(polyhedral_specs());
    specs
}

/// Whether a spec's growth is expected quadratic (smooth) or linear
/// (polyhedral).
pub fn expected_quadratic(spec: &SurrogateSpec) -> bool {
    crate::phi::effective_comp_sum_phi(spec).smoothness() != Smoothness::Polyhedral
}

/// JSON schema for specs in configuration files:
/// `{family, phi_id, n, tau?, lambda?}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<u32>,
    pub family: Family,
    pub phi_id: String,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
}

impl SpecConfig {
    pub fn to_spec(&self) -> Result<SurrogateSpec, Error> {
        let phi = Phi::from_id(&self.phi_id, self.tau)?;
        let spec = SurrogateSpec {
            family: self.family,
            phi,
            n_classes: self.n,
            tau_exponent: match phi {
                Phi::CompSumPower { tau } => Some(tau),
                _ => None,
            },
            score_bound: self.lambda,
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_sizes_and_ids_unique() {
        let all = full_catalog();
        let mut ids: Vec<String> = all.iter().map(|s| s.id()).collect();
        let len = ids.len();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), len);
        assert_eq!(smooth_specs().len(), 3 + 4 * 5 + 3 * 2);
        assert_eq!(polyhedral_specs().len(), 1 + 4 + 3);
    }

    #[test]
    fn spec_config_round_trip() {
        let cfg: SpecConfig = serde_json::from_str(
            r#"{"family": "comp-sum", "phi_id": "comp-sum-power", "n": 5, "tau": 1.5}"#,
        )
        .unwrap();
        let spec = cfg.to_spec().unwrap();
        assert_eq!(spec, SurrogateSpec::comp_sum_power(1.5, 5));
        assert!(serde_json::from_str::<SpecConfig>(
            r#"{"family": "margin", "phi_id": "hinge", "n": 2, "junk": 1}"#
        )
        .is_err());
    }

    #[test]
    fn bad_phi_ids_rejected() {
        let cfg = SpecConfig {
            schema: None,
            family: Family::Margin,
            phi_id: "does-not-exist".into(),
            n: 2,
            tau: None,
            lambda: None,
        };
        assert!(cfg.to_spec().is_err());
    }
}
