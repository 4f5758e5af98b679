//! Exact minimizability-gap computation on discrete instances.
//!
//! For a hypothesis set `H`, a loss, and a finite instance, the quantities of
//! interest are the best-in-class error `E*(H)`, the expectation of the
//! pointwise best-in-class conditional error `E_x[C*(H, x)]`, and their
//! difference, the minimizability gap
//!
//! ```text
//! M(H) = E*(H) - E_x[C*(H, x)]  >=  0.
//! ```
//!
//! With the unrestricted-class Bayes term `E* = E_x[C*(all, x)]` the gap
//! decomposes as `M = A - I`, where `A = E*(H) - E*(all)` is the
//! approximation error and `I = E_x[C*(H, x) - C*(all, x)] >= 0` is the
//! pointwise-infimum difference, so `0 <= M <= A` always.
//!
//! Explicit hypothesis lists make every term a finite sum or minimum and are
//! the exact substrate used by the bound checks; the pointwise-box product
//! class has `M = 0` because the infimum of a sum of independent per-point
//! terms is the sum of the per-point infima.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::instance::{
    conditional_error, conditional_zero_one, expected_error, expected_zero_one, predicted_label,
    DiscreteInstance, HypothesisSet,
};
use crate::phi::{Family, SurrogateSpec};
use crate::pointwise::{bayes_conditional, minimize_conditional_box};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GapReport {
    pub schema: u32,
    pub spec_id: String,
    /// `E*(H)`: best-in-class expected loss.
    pub best_in_class: f64,
    /// `E_x[C*(H, x)]`: expectation of the pointwise best conditional error.
    pub expected_pointwise_inf: f64,
    /// `M(H)`.
    pub mingap: f64,
    /// `A(H) = E*(H) - E*(all)`.
    pub approx_error: Option<f64>,
    /// `I(H) = E_x[C*(H, x) - C*(all, x)]`.
    pub pointwise_diff: Option<f64>,
    /// `E*(all) = E_x[C*(all, x)]`.
    pub bayes_error: Option<f64>,
}

/// Exact gap computation. Explicit lists are evaluated by enumeration, the
/// pointwise box by per-point bounded convex minimization.
pub fn compute_gap(
    instance: &DiscreteInstance,
    hset: &HypothesisSet,
    spec: &SurrogateSpec,
) -> Result<GapReport, Error> {
    instance.validate()?;
    spec.validate()?;
    hset.validate(instance, spec.family)?;
    let (best_in_class, expected_pointwise_inf, mingap) = match hset {
        HypothesisSet::ExplicitList { tables, .. } => {
            let mut best = f64::INFINITY;
            for table in tables {
                best = best.min(expected_error(spec, instance, table)?);
            }
            let mut exp_inf = 0.0;
            for (i, pt) in instance.points.iter().enumerate() {
                let mut c_best = f64::INFINITY;
                for table in tables {
                    c_best = c_best.min(conditional_error(spec, &table[i], &pt.conditional)?);
                }
                exp_inf += pt.weight * c_best;
            }
            (best, exp_inf, best - exp_inf)
        }
        HypothesisSet::PointwiseBox { lambda, grid_step } => {
            // Product class: the best-in-class error factorizes into the sum
            // of per-point infima, so the gap vanishes identically.
            let mut exp_inf = 0.0;
            for pt in &instance.points {
                let m = minimize_conditional_box(spec, &pt.conditional, *lambda, *grid_step)?;
                exp_inf += pt.weight * m.value;
            }
            (exp_inf, exp_inf, 0.0)
        }
    };

    let mut bayes = 0.0;
    for pt in &instance.points {
        bayes += pt.weight * bayes_conditional(spec, &pt.conditional)?;
    }

    Ok(GapReport {
        schema: 1,
        spec_id: spec.id(),
        best_in_class,
        expected_pointwise_inf,
        mingap,
        approx_error: Some(best_in_class - bayes),
        pointwise_diff: Some(expected_pointwise_inf - bayes),
        bayes_error: Some(bayes),
    })
}

/// `f_tau(u) = log(1+u)` at `tau = 1`, `((1+u)^{1-tau} - 1)/(1-tau)` otherwise:
/// the concave non-decreasing map relating the comp-sum power family to its
/// `tau = 0` member, `loss_tau = f_tau(loss_0)`.
pub fn f_tau(tau: f64, u: f64) -> f64 {
    if (tau - 1.0).abs() < 1e-12 {
        (1.0 + u).ln()
    } else {
        ((1.0 + u).powf(1.0 - tau) - 1.0) / (1.0 - tau)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TauGapBound {
    pub tau: f64,
    /// `f_tau(R*_0) - f_tau(C*_0)` with `C*_0 = (n-1) e^{-2 lambda}`.
    pub bound: f64,
    /// Exactly computed gap of the power-family loss at this `tau`.
    pub exact_mingap: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TauGapReport {
    pub schema: u32,
    pub lambda: f64,
    pub n: usize,
    /// Best-in-class expected loss of the `tau = 0` member over the set.
    pub r_star_zero: f64,
    /// `(n-1) e^{-2 lambda}`: the per-point box optimum of the `tau = 0` member.
    pub c_star_zero: f64,
    pub entries: Vec<TauGapBound>,
    pub non_increasing: bool,
    pub dominates_exact: bool,
}

/// Gap upper bounds across the comp-sum power family on a deterministic
/// instance with scores confined to `[-lambda, lambda]^n`.
///
/// For every `tau` the bound is `f_tau(R*_0) - f_tau(C*_0)`, where `R*_0` is
/// the best-in-class expected loss of the `tau = 0` member over the given
/// set, and `C*_0 = (n-1) e^{-2 lambda}` is the per-point box optimum. The
/// sequence is non-increasing in `tau` and dominates the exact gap of every
/// member, provided the per-point images stay inside the box; sets
/// containing the per-point one-hot `+-lambda` rows attain the bound's
/// pointwise term exactly. The pointwise-box product class itself is the
/// degenerate case `R*_0 = C*_0`, where bound and gap are both zero.
pub fn gap_upper_bound_tau(
    instance: &DiscreteInstance,
    hset: &HypothesisSet,
    lambda: f64,
    tau_grid: &[f64],
) -> Result<TauGapReport, Error> {
    instance.validate()?;
    if !instance.is_deterministic() {
        return Err(Error::Precondition(
            "the tau gap bound applies to deterministic conditionals only".into(),
        ));
    }
    if tau_grid.is_empty() || !tau_grid.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::Precondition(
            "tau grid must be non-empty and strictly increasing".into(),
        ));
    }
    if tau_grid[0] < 0.0 || *tau_grid.last().unwrap() >= 2.0 {
        return Err(Error::Precondition("tau grid must lie in [0, 2)".into()));
    }
    let n = instance.n;
    let c_star_zero = (n as f64 - 1.0) * (-2.0 * lambda).exp();
    let zero_spec = SurrogateSpec::comp_sum_power(0.0, n);
    hset.validate(instance, Family::CompSum)?;
    if let HypothesisSet::ExplicitList { tables, .. } = hset {
        for (k, table) in tables.iter().enumerate() {
            for (i, row) in table.iter().enumerate() {
                if row.iter().any(|s| s.abs() > lambda + 1e-12) {
                    return Err(Error::Precondition(format!(
                        "table {k} row {i} leaves the box [-{lambda}, {lambda}] assumed by the bound"
                    )));
                }
            }
        }
    }
    let r_star_zero = match hset {
        HypothesisSet::ExplicitList { tables, .. } => {
            let mut best = f64::INFINITY;
            for table in tables {
                best = best.min(expected_error(&zero_spec, instance, table)?);
            }
            best
        }
        HypothesisSet::PointwiseBox { .. } => c_star_zero,
    };

    let mut entries = Vec::with_capacity(tau_grid.len());
    for &tau in tau_grid {
        let bound = f_tau(tau, r_star_zero) - f_tau(tau, c_star_zero);
        let spec = SurrogateSpec::comp_sum_power(tau, n);
        let exact = compute_gap(instance, hset, &spec)?.mingap;
        entries.push(TauGapBound {
            tau,
            bound,
            exact_mingap: exact,
        });
    }
    let non_increasing = entries.windows(2).all(|w| w[1].bound <= w[0].bound + 1e-12);
    let dominates_exact = entries.iter().all(|e| e.exact_mingap <= e.bound + 1e-9);
    Ok(TauGapReport {
        schema: 1,
        lambda,
        n,
        r_star_zero,
        c_star_zero,
        entries,
        non_increasing,
        dominates_exact,
    })
}

/// Per-point residual of the best-in-class hypothesis against the pointwise
/// best conditional error; the gap is the weighted sum of these residuals.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PointResidual {
    pub point: usize,
    pub conditional_error: f64,
    pub pointwise_best: f64,
    pub residual: f64,
}

/// Per-class decomposition on deterministic instances: the gap equals
/// `sum_k p_k (E[loss(h*) | y = k] - inf_k)`, so a gap below `eps` forces
/// each class term below `eps / p_k`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassResidual {
    pub label: usize,
    pub class_mass: f64,
    pub mean_loss: f64,
    pub class_infimum: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ZeroGapReport {
    pub schema: u32,
    pub spec_id: String,
    pub best_index: usize,
    pub mingap: f64,
    /// The gap vanishes iff every per-point residual does.
    pub zero_gap: bool,
    pub residuals: Vec<PointResidual>,
    /// Present for deterministic instances.
    pub class_residuals: Option<Vec<ClassResidual>>,
}

/// Characterize when the gap vanishes: the best-in-class hypothesis must
/// attain the pointwise best conditional error almost everywhere. On
/// deterministic instances this reduces to attaining the per-label infimum
/// of the loss on each label's support.
pub fn check_zero_gap_conditions(
    instance: &DiscreteInstance,
    hset: &HypothesisSet,
    spec: &SurrogateSpec,
) -> Result<ZeroGapReport, Error> {
    instance.validate()?;
    spec.validate()?;
    hset.validate(instance, spec.family)?;
    let tables = match hset {
        HypothesisSet::ExplicitList { tables, .. } => tables,
        HypothesisSet::PointwiseBox { .. } => return Err(Error::Precondition(
            "the zero-gap characterization needs an explicit list to exhibit the best hypothesis"
                .into(),
        )),
    };
    let mut best_index = 0;
    let mut best_err = f64::INFINITY;
    for (k, table) in tables.iter().enumerate() {
        let e = expected_error(spec, instance, table)?;
        if e < best_err {
            best_err = e;
            best_index = k;
        }
    }
    let star = &tables[best_index];
    let mut residuals = Vec::with_capacity(instance.m());
    let mut mingap = 0.0;
    for (i, pt) in instance.points.iter().enumerate() {
        let ce = conditional_error(spec, &star[i], &pt.conditional)?;
        let mut cbest = f64::INFINITY;
        for table in tables {
            cbest = cbest.min(conditional_error(spec, &table[i], &pt.conditional)?);
        }
        mingap += pt.weight * (ce - cbest);
        residuals.push(PointResidual {
            point: i,
            conditional_error: ce,
            pointwise_best: cbest,
            residual: ce - cbest,
        });
    }

    let class_residuals = if instance.is_deterministic() {
        let mut per_class: Vec<ClassResidual> = Vec::new();
        for label in 0..instance.n {
            let idxs: Vec<usize> = (0..instance.m())
                .filter(|&i| instance.point_label(i) == label)
                .collect();
            if idxs.is_empty() {
                continue;
            }
            let mass: f64 = idxs.iter().map(|&i| instance.points[i].weight).sum();
            let mean_loss = idxs
                .iter()
                .map(|&i| instance.points[i].weight * residuals[i].conditional_error)
                .sum::<f64>()
                / mass;
            let class_inf = idxs
                .iter()
                .map(|&i| instance.points[i].weight * residuals[i].pointwise_best)
                .sum::<f64>()
                / mass;
            per_class.push(ClassResidual {
                label,
                class_mass: mass,
                mean_loss,
                class_infimum: class_inf,
                residual: mean_loss - class_inf,
            });
        }
        Some(per_class)
    } else {
        None
    };

    Ok(ZeroGapReport {
        schema: 1,
        spec_id: spec.id(),
        best_index,
        mingap,
        zero_gap: residuals.iter().all(|r| r.residual <= 1e-12),
        residuals,
        class_residuals,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoverageGap {
    pub point: usize,
    pub missing_labels: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiscreteTargetReport {
    pub schema: u32,
    /// Whether the induced labelings cover every label at every point.
    pub covered: bool,
    pub coverage_gaps: Vec<CoverageGap>,
    pub mingap: f64,
    pub approx_error: f64,
    pub pointwise_diff: f64,
    /// `I = 0` and `M = A` hold whenever coverage does.
    pub identity_holds: bool,
}

/// Zero-one-loss gaps for an explicit list. When the list's induced
/// labelings cover every label at every point, the pointwise-infimum
/// difference vanishes and the gap coincides with the approximation error.
pub fn min_discrete_target(
    instance: &DiscreteInstance,
    hset: &HypothesisSet,
) -> Result<DiscreteTargetReport, Error> {
    instance.validate()?;
    let tables = match hset {
        HypothesisSet::ExplicitList { tables, .. } => tables,
        HypothesisSet::PointwiseBox { .. } => {
            return Err(Error::Precondition(
                "discrete-target gaps are computed on explicit lists".into(),
            ))
        }
    };
    // Infer the family from table width so binary margin tables work too.
    let family = if tables[0][0].len() == 1 {
        Family::Margin
    } else {
        Family::CompSum
    };
    hset.validate(instance, family)?;

    let mut coverage_gaps = Vec::new();
    for i in 0..instance.m() {
        let mut seen = vec![false; instance.n];
        for table in tables {
            seen[predicted_label(&table[i], family)] = true;
        }
        let missing: Vec<usize> = (0..instance.n).filter(|&y| !seen[y]).collect();
        if !missing.is_empty() {
            coverage_gaps.push(CoverageGap {
                point: i,
                missing_labels: missing,
            });
        }
    }
    let covered = coverage_gaps.is_empty();

    let best = tables
        .iter()
        .map(|t| expected_zero_one(instance, t, family))
        .fold(f64::INFINITY, f64::min);
    let mut exp_inf = 0.0;
    let mut bayes = 0.0;
    for (i, pt) in instance.points.iter().enumerate() {
        let cbest = tables
            .iter()
            .map(|t| conditional_zero_one(&t[i], &pt.conditional, family))
            .fold(f64::INFINITY, f64::min);
        exp_inf += pt.weight * cbest;
        let pmax = pt
            .conditional
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        bayes += pt.weight * (1.0 - pmax);
    }
    let mingap = best - exp_inf;
    let approx_error = best - bayes;
    let pointwise_diff = exp_inf - bayes;
    Ok(DiscreteTargetReport {
        schema: 1,
        covered,
        coverage_gaps,
        mingap,
        approx_error,
        pointwise_diff,
        identity_holds: pointwise_diff.abs() <= 1e-12 && (mingap - approx_error).abs() <= 1e-12,
    })
}

/// Zero-one gap quantities of an explicit list (used by the bound checks).
pub(crate) fn zero_one_gap_terms(
    instance: &DiscreteInstance,
    tables: &[crate::instance::ScoreTable],
    family: Family,
) -> (f64, f64) {
    let best = tables
        .iter()
        .map(|t| expected_zero_one(instance, t, family))
        .fold(f64::INFINITY, f64::min);
    let mut exp_inf = 0.0;
    for (i, pt) in instance.points.iter().enumerate() {
        let cbest = tables
            .iter()
            .map(|t| conditional_zero_one(&t[i], &pt.conditional, family))
            .fold(f64::INFINITY, f64::min);
        exp_inf += pt.weight * cbest;
    }
    (best, best - exp_inf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::SupportPoint;
    use crate::phi::Phi;

    fn two_point_conflict() -> (DiscreteInstance, HypothesisSet) {
        // Two deterministic points with conflicting labels; constant
        // hypotheses +0.5 and -0.5.
        let inst = DiscreteInstance::deterministic_binary(&[true, false]);
        let hset = HypothesisSet::explicit(vec![
            vec![vec![0.5], vec![0.5]],
            vec![vec![-0.5], vec![-0.5]],
        ]);
        (inst, hset)
    }

    #[test]
    fn hand_enumerated_logistic_gap() {
        // E(h) = (L+ + L-)/2 for both constants, E_x[C*] = L- with
        // L+- = log(1 + e^{+-1/2}), so M = (L+ - L-)/2 = 1/4 exactly.
        let (inst, hset) = two_point_conflict();
        let spec = SurrogateSpec::margin(Phi::Logistic);
        let rep = compute_gap(&inst, &hset, &spec).unwrap();
        assert!((rep.mingap - 0.25).abs() < 1e-12, "{}", rep.mingap);
        let l_minus = (-0.5f64).exp().ln_1p();
        assert!((rep.expected_pointwise_inf - l_minus).abs() < 1e-12);
    }

    #[test]
    fn pointwise_box_gap_vanishes() {
        let inst = DiscreteInstance::new(
            2,
            vec![
                SupportPoint {
                    weight: 0.3,
                    conditional: vec![0.8, 0.2],
                },
                SupportPoint {
                    weight: 0.7,
                    conditional: vec![0.4, 0.6],
                },
            ],
        )
        .unwrap();
        let hset = HypothesisSet::PointwiseBox {
            lambda: 1.5,
            grid_step: None,
        };
        let rep = compute_gap(&inst, &hset, &SurrogateSpec::margin(Phi::Exponential)).unwrap();
        assert!(rep.mingap.abs() <= 1e-10);
    }

    #[test]
    fn deterministic_box_pointwise_diff_is_exp_minus_lambda() {
        let inst = DiscreteInstance::deterministic_binary(&[true, false, true]);
        for lambda in [0.5, 1.0, 2.0] {
            let hset = HypothesisSet::PointwiseBox {
                lambda,
                grid_step: None,
            };
            let rep = compute_gap(&inst, &hset, &SurrogateSpec::margin(Phi::Exponential)).unwrap();
            assert!(
                (rep.pointwise_diff.unwrap() - (-lambda).exp()).abs() < 1e-9,
                "lambda={lambda}: {}",
                rep.pointwise_diff.unwrap()
            );
        }
    }

    #[test]
    fn symmetric_single_point_gap_is_zero() {
        let inst = DiscreteInstance::new(
            2,
            vec![SupportPoint {
                weight: 1.0,
                conditional: vec![0.5, 0.5],
            }],
        )
        .unwrap();
        let hset = HypothesisSet::explicit(vec![vec![vec![0.7]], vec![vec![-0.7]]]);
        let rep = compute_gap(&inst, &hset, &SurrogateSpec::margin(Phi::Exponential)).unwrap();
        assert!(rep.mingap.abs() < 1e-15);
    }

    #[test]
    fn decomposition_identity_and_ordering() {
        let (inst, hset) = two_point_conflict();
        for spec in [
            SurrogateSpec::margin(Phi::Exponential),
            SurrogateSpec::margin(Phi::Hinge),
            SurrogateSpec::margin(Phi::Logistic),
        ] {
            let rep = compute_gap(&inst, &hset, &spec).unwrap();
            let (m, a, i) = (
                rep.mingap,
                rep.approx_error.unwrap(),
                rep.pointwise_diff.unwrap(),
            );
            assert!(m >= -1e-12);
            assert!(i >= -1e-10, "{}: I = {i}", spec.id());
            assert!((m - (a - i)).abs() <= 1e-10);
            assert!(m <= a + 1e-10);
        }
    }

    #[test]
    fn tau_bound_sequence_monotone_and_dominating() {
        // Deterministic 3-class instance; explicit list containing the
        // per-point one-hot rows plus a deliberately suboptimal constant.
        let inst = DiscreteInstance::deterministic(3, &[0, 1, 2, 0]);
        let lambda = 1.0;
        let one_hot = |y: usize| -> Vec<f64> {
            (0..3)
                .map(|k| if k == y { lambda } else { -lambda })
                .collect()
        };
        let sharp: Vec<Vec<f64>> = (0..4).map(|i| one_hot(inst.point_label(i))).collect();
        let constant: Vec<Vec<f64>> = (0..4).map(|_| one_hot(0)).collect();
        let hset = HypothesisSet::explicit(vec![sharp, constant]);
        let grid: Vec<f64> = (0..20).map(|i| 1.9 * i as f64 / 19.0).collect();
        let rep = gap_upper_bound_tau(&inst, &hset, lambda, &grid).unwrap();
        assert!(rep.non_increasing);
        assert!(rep.dominates_exact);
        assert!((rep.c_star_zero - 2.0 * (-2.0f64).exp()).abs() < 1e-12);
        // tau = 0 member: the bound is exactly R*_0 - C*_0.
        assert!((rep.entries[0].bound - (rep.r_star_zero - rep.c_star_zero)).abs() < 1e-12);
        // tau = 1 member: the log branch of f_tau.
        let one = rep
            .entries
            .iter()
            .find(|e| (e.tau - 1.0).abs() < 1e-9)
            .unwrap();
        let expect = (1.0 + rep.r_star_zero).ln() - (1.0 + rep.c_star_zero).ln();
        assert!((one.bound - expect).abs() < 1e-12);
    }

    #[test]
    fn tau_bound_box_is_degenerate_zero() {
        let inst = DiscreteInstance::deterministic(3, &[0, 1]);
        let hset = HypothesisSet::PointwiseBox {
            lambda: 1.0,
            grid_step: None,
        };
        let grid = [0.0, 0.5, 1.0, 1.5];
        let rep = gap_upper_bound_tau(&inst, &hset, 1.0, &grid).unwrap();
        for e in &rep.entries {
            assert!(e.bound.abs() < 1e-12);
            assert!(e.exact_mingap.abs() < 1e-10);
        }
    }

    #[test]
    fn tau_bound_rejects_stochastic_instances() {
        let inst = DiscreteInstance::new(
            2,
            vec![SupportPoint {
                weight: 1.0,
                conditional: vec![0.6, 0.4],
            }],
        )
        .unwrap();
        let hset = HypothesisSet::PointwiseBox {
            lambda: 1.0,
            grid_step: None,
        };
        assert!(matches!(
            gap_upper_bound_tau(&inst, &hset, 1.0, &[0.0, 1.0]),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn zero_gap_holds_for_pointwise_constant_optimum() {
        // Deterministic instance whose list contains the piecewise +-lambda
        // hypothesis: the gap vanishes and the characterization holds.
        let inst = DiscreteInstance::deterministic_binary(&[true, false]);
        let lambda = 1.0;
        let star = vec![vec![lambda], vec![-lambda]];
        let worse = vec![vec![0.2], vec![0.2]];
        let hset = HypothesisSet::explicit(vec![star, worse]);
        let spec = SurrogateSpec::margin(Phi::Exponential);
        let rep = check_zero_gap_conditions(&inst, &hset, &spec).unwrap();
        assert_eq!(rep.best_index, 0);
        assert!(rep.zero_gap);
        assert!(rep.mingap.abs() < 1e-15);
        for r in &rep.residuals {
            assert!(r.residual.abs() < 1e-15);
        }
    }

    #[test]
    fn perturbed_optimum_bounds_gap_by_class_residuals() {
        // h1 scores (lambda - delta) with the right sign everywhere; h2 is
        // right at point 1 and wrong at point 2, so the per-point infima mix.
        let inst = DiscreteInstance::deterministic_binary(&[true, false]);
        let (lambda, delta) = (1.0, 0.1);
        let h1 = vec![vec![lambda - delta], vec![-(lambda - delta)]];
        let h2 = vec![vec![lambda], vec![lambda]];
        let hset = HypothesisSet::explicit(vec![h1, h2]);
        let spec = SurrogateSpec::margin(Phi::Exponential);
        let rep = check_zero_gap_conditions(&inst, &hset, &spec).unwrap();
        assert_eq!(rep.best_index, 0);
        // M = p * (e^{-(lambda-delta)} - e^{-lambda}) on the positive class.
        let expect = 0.5 * ((-(lambda - delta)).exp() - (-lambda).exp());
        assert!(
            (rep.mingap - expect).abs() < 1e-12,
            "{} vs {expect}",
            rep.mingap
        );
        assert!(!rep.zero_gap);
        let classes = rep.class_residuals.unwrap();
        let total: f64 = classes.iter().map(|c| c.class_mass * c.residual).sum();
        assert!((total - rep.mingap).abs() < 1e-12);
        for c in &classes {
            assert!(c.residual <= rep.mingap / c.class_mass + 1e-12);
        }
    }

    #[test]
    fn discrete_target_identity_under_coverage() {
        let inst = DiscreteInstance::new(
            2,
            vec![
                SupportPoint {
                    weight: 0.5,
                    conditional: vec![0.9, 0.1],
                },
                SupportPoint {
                    weight: 0.5,
                    conditional: vec![0.3, 0.7],
                },
            ],
        )
        .unwrap();
        let hset = HypothesisSet::explicit(vec![
            vec![vec![0.5], vec![0.5]],
            vec![vec![-0.5], vec![-0.5]],
        ]);
        let rep = min_discrete_target(&inst, &hset).unwrap();
        assert!(rep.covered);
        assert!(rep.identity_holds);
        assert!(rep.pointwise_diff.abs() <= 1e-15);
        assert!((rep.mingap - rep.approx_error).abs() <= 1e-15);
    }

    #[test]
    fn discrete_target_reports_missing_coverage() {
        let inst = DiscreteInstance::deterministic_binary(&[true, false]);
        let hset = HypothesisSet::explicit(vec![vec![vec![0.5], vec![0.5]]]);
        let rep = min_discrete_target(&inst, &hset).unwrap();
        assert!(!rep.covered);
        assert_eq!(rep.coverage_gaps.len(), 2);
        assert_eq!(rep.coverage_gaps[0].missing_labels, vec![1]);
    }
}
