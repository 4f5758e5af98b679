//! Frozen golden values and oracle cross-checks for the transformation
//! engine. The heavyweight all-family oracle sweep lives in the acceptance
//! suite; this file pins the hand-derived and oracle-derived constants.

mod common;

use common::{oracle_comp_sum, oracle_margin};
use hclab_core::phi::{Phi, SurrogateSpec};
use hclab_core::solve::SolverOptions;
use hclab_core::transform::{transform_binary, transform_comp_sum};

/// Golden value of the n = 3 negative-log transformation at t = 0.5, frozen
/// from a nested grid run at shift step 1e-4 and inner step 1e-6. The value
/// agrees with the shift-free reduction
/// `((1-t)/2) ln(1-t) + ((1+t)/2) ln(1+t)` at t = 1/2.
const NEG_LOG_N3_T_HALF: f64 = 0.13081203594113697;

#[test]
fn golden_neg_log_n3_t_half_oracle_run() {
    let spec = SurrogateSpec::comp_sum(Phi::NegLog, 3);
    let oracle = oracle_comp_sum(&spec, 0.5, 1e-4, 1e-6);
    assert!(
        (oracle - NEG_LOG_N3_T_HALF).abs() < 1e-8,
        "oracle {oracle} vs frozen {NEG_LOG_N3_T_HALF}"
    );
    let refined = transform_comp_sum(&spec, 0.5, &SolverOptions::default()).unwrap();
    assert!(
        (refined.value - NEG_LOG_N3_T_HALF).abs() < 1e-9,
        "refined {} vs frozen {NEG_LOG_N3_T_HALF}",
        refined.value
    );
}

#[test]
fn exponential_margin_half_t_cross_check() {
    // Stationarity by hand: (1-t) e^u = (1+t) e^{-u} gives u = (1/2) ln 3 at
    // t = 1/2 and T = 1 - sqrt(3)/2; the dense grid confirms both.
    let spec = SurrogateSpec::margin(Phi::Exponential);
    let hand = 1.0 - 0.75f64.sqrt();
    let oracle = oracle_margin(&Phi::Exponential, 0.5);
    assert!(
        (oracle - hand).abs() < 1e-9,
        "oracle {oracle} vs hand {hand}"
    );
    let refined = transform_binary(&spec, 0.5, &SolverOptions::default()).unwrap();
    assert!((refined.value - hand).abs() < 1e-10);
    assert!((refined.inner_minimizer - 0.5 * 3f64.ln()).abs() < 1e-8);
}

#[test]
fn hinge_margin_breakpoint_cross_check() {
    // Piecewise evaluation: inf f_t = 1 - t at u = 1 and f_t(0) = 1.
    let spec = SurrogateSpec::margin(Phi::Hinge);
    let oracle = oracle_margin(&Phi::Hinge, 0.3);
    let refined = transform_binary(&spec, 0.3, &SolverOptions::default()).unwrap();
    assert!((oracle - 0.3).abs() < 1e-9);
    assert!((refined.value - 0.3).abs() < 1e-12);
    assert_eq!(refined.inner_minimizer, 1.0);
}

#[test]
fn mae_comp_sum_reduction_cross_check() {
    // The inner objective is affine in u with slope t, so the box supremum
    // is tau * t and the outer infimum lands at tau = 1/n.
    for n in [2usize, 4] {
        let spec = SurrogateSpec::comp_sum(Phi::MaeLinear, n);
        for t in [0.1, 0.6] {
            let oracle = oracle_comp_sum(&spec, t, 1e-3, 1e-5);
            assert!(
                (oracle - t / n as f64).abs() < 1e-7,
                "n={n} t={t}: {oracle}"
            );
        }
    }
}
