//! Catalog of auxiliary loss functions and the surrogate families built on them.
//!
//! Three families are supported:
//!
//! - margin losses, `loss(h, y) = phi(-y h)` for a single real score and a
//!   binary label;
//! - comp-sum losses, `loss(h, y) = phi(softmax_y(h))` applied to the softmax
//!   probability of the true class of an n-vector of scores;
//! - constrained losses, `loss(h, y) = sum_{y' != y} phi(h_{y'})` on score
//!   vectors subject to the zero-sum constraint `sum_y h_y = 0`.
//!
//! Each catalog entry carries analytic first and second derivatives, its kink
//! locations, and regularity metadata so that solvers can choose between the
//! smooth and the polyhedral path.

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Loss family tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "margin")]
    Margin,
    #[serde(rename = "comp-sum")]
    CompSum,
    #[serde(rename = "constrained")]
    Constrained,
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Family::Margin => write!(f, "margin"),
            Family::CompSum => write!(f, "comp-sum"),
            Family::Constrained => write!(f, "constrained"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Smoothness {
    /// Twice continuously differentiable on the whole domain.
    C2Smooth,
    /// Convex piecewise-linear.
    Polyhedral,
    /// Twice differentiable except at finitely many kinks, or smooth but
    /// outside the family's nominal monotonicity assumptions.
    PiecewiseC2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Monotonicity {
    NonDecreasing,
    NonIncreasing,
}

/// Interval on which a catalog function is defined.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub lo: f64,
    pub hi: f64,
    /// Whether the lower endpoint is excluded (values there are a limit).
    pub lo_open: bool,
}

impl Domain {
    pub const REAL_LINE: Domain = Domain {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
        lo_open: false,
    };
    pub const UNIT_OPEN_ZERO: Domain = Domain {
        lo: 0.0,
        hi: 1.0,
        lo_open: true,
    };

    pub fn contains(&self, u: f64) -> bool {
        if self.lo_open {
            u > self.lo && u <= self.hi
        } else {
            u >= self.lo && u <= self.hi
        }
    }
}

/// A scalar auxiliary function with analytic derivatives.
///
/// Margin entries act on the negated margin, comp-sum entries on a softmax
/// probability in `(0, 1]`, constrained entries on a raw score.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Phi {
    /// `e^u`
    Exponential,
    /// `log(1 + e^u)`
    Logistic,
    /// `max(0, 1+u)^2`
    SquaredHinge,
    /// `max(0, 1+u)`
    Hinge,
    /// `-log u` when `tau = 1`, `(u^{tau-1} - 1)/(1 - tau)` otherwise,
    /// for `tau` in `[0, 2)`; `tau = 0` is the sum-exp ratio and values of
    /// `tau` in `(1, 2)` recover the generalized cross-entropy with exponent
    /// `tau - 1`.
    CompSumPower { tau: f64 },
    /// `-log u`
    NegLog,
    /// `(1 - u)/u`
    SumExpRatio,
    /// `1 - u`
    MaeLinear,
    /// `e^u` under the zero-sum score constraint.
    ConstrainedExp,
    /// `max(0, 1+u)^2` under the zero-sum score constraint.
    ConstrainedSquaredHinge,
    /// `(1+u)^2` under the zero-sum score constraint. Smooth, but only
    /// non-decreasing on `[-1, inf)`; cataloged as piecewise-C2 for that
    /// reason.
    ConstrainedSquare,
    /// `max(0, 1+u)` under the zero-sum score constraint.
    ConstrainedHinge,
}

impl Phi {
    /// Stable string id, also used in JSON configuration files.
    pub fn id(&self) -> String {
        match self {
            Phi::Exponential => "exponential".into(),
            Phi::Logistic => "logistic".into(),
            Phi::SquaredHinge => "squared-hinge".into(),
            Phi::Hinge => "hinge".into(),
            Phi::CompSumPower { tau } => format!("comp-sum-power({tau})"),
            Phi::NegLog => "neg-log".into(),
            Phi::SumExpRatio => "sum-exp-ratio".into(),
            Phi::MaeLinear => "mae-linear".into(),
            Phi::ConstrainedExp => "constrained-exp".into(),
            Phi::ConstrainedSquaredHinge => "constrained-squared-hinge".into(),
            Phi::ConstrainedSquare => "constrained-square".into(),
            Phi::ConstrainedHinge => "constrained-hinge".into(),
        }
    }

    pub fn from_id(id: &str, tau: Option<f64>) -> Result<Phi, Error> {
        Ok(match id {
            "exponential" => Phi::Exponential,
            "logistic" => Phi::Logistic,
            "squared-hinge" => Phi::SquaredHinge,
            "hinge" => Phi::Hinge,
            "comp-sum-power" => {
                let tau = tau.ok_or_else(|| {
                    Error::Schema("comp-sum-power requires a tau parameter".into())
                })?;
                if !(0.0..2.0).contains(&tau) {
                    return Err(Error::Schema(format!(
                        "comp-sum-power tau must lie in [0, 2), got {tau}"
                    )));
                }
                Phi::CompSumPower { tau }
            }
            "neg-log" => Phi::NegLog,
            "sum-exp-ratio" => Phi::SumExpRatio,
            "mae-linear" => Phi::MaeLinear,
            "constrained-exp" => Phi::ConstrainedExp,
            "constrained-squared-hinge" => Phi::ConstrainedSquaredHinge,
            "constrained-square" => Phi::ConstrainedSquare,
            "constrained-hinge" => Phi::ConstrainedHinge,
            other => return Err(Error::Schema(format!("unknown phi id `{other}`"))),
        })
    }

    pub fn value(&self, u: f64) -> f64 {
        match self {
            Phi::Exponential | Phi::ConstrainedExp => u.exp(),
            Phi::Logistic => {
                // log(1 + e^u) without overflow for large |u|.
                if u > 0.0 {
                    u + (-u).exp().ln_1p()
                } else {
                    u.exp().ln_1p()
                }
            }
            Phi::SquaredHinge | Phi::ConstrainedSquaredHinge => {
                let v = (1.0 + u).max(0.0);
                v * v
            }
            Phi::Hinge | Phi::ConstrainedHinge => (1.0 + u).max(0.0),
            Phi::ConstrainedSquare => (1.0 + u) * (1.0 + u),
            Phi::NegLog => {
                if u <= 0.0 {
                    f64::INFINITY
                } else {
                    -u.ln()
                }
            }
            Phi::SumExpRatio => {
                if u <= 0.0 {
                    f64::INFINITY
                } else {
                    (1.0 - u) / u
                }
            }
            Phi::MaeLinear => 1.0 - u,
            Phi::CompSumPower { tau } => {
                if (*tau - 1.0).abs() < 1e-15 {
                    return Phi::NegLog.value(u);
                }
                if u <= 0.0 {
                    // Right limit at zero: +inf for tau <= 1, 1/(tau-1) above.
                    return if *tau > 1.0 {
                        1.0 / (tau - 1.0)
                    } else {
                        f64::INFINITY
                    };
                }
                (u.powf(tau - 1.0) - 1.0) / (1.0 - tau)
            }
        }
    }

    /// First derivative; returns the right derivative at kinks.
    pub fn d1(&self, u: f64) -> f64 {
        match self {
            Phi::Exponential | Phi::ConstrainedExp => u.exp(),
            Phi::Logistic => sigmoid(u),
            Phi::SquaredHinge | Phi::ConstrainedSquaredHinge => 2.0 * (1.0 + u).max(0.0),
            Phi::Hinge | Phi::ConstrainedHinge => {
                if u >= -1.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Phi::ConstrainedSquare => 2.0 * (1.0 + u),
            Phi::NegLog => {
                if u <= 0.0 {
                    f64::NEG_INFINITY
                } else {
                    -1.0 / u
                }
            }
            Phi::SumExpRatio => {
                if u <= 0.0 {
                    f64::NEG_INFINITY
                } else {
                    -1.0 / (u * u)
                }
            }
            Phi::MaeLinear => -1.0,
            Phi::CompSumPower { tau } => {
                if (*tau - 1.0).abs() < 1e-15 {
                    return Phi::NegLog.d1(u);
                }
                if u <= 0.0 {
                    return if *tau > 2.0 { 0.0 } else { f64::NEG_INFINITY };
                }
                -u.powf(tau - 2.0)
            }
        }
    }

    /// Second derivative; undefined (NaN) at kinks.
    pub fn d2(&self, u: f64) -> f64 {
        match self {
            Phi::Exponential | Phi::ConstrainedExp => u.exp(),
            Phi::Logistic => {
                let s = sigmoid(u);
                s * (1.0 - s)
            }
            Phi::SquaredHinge | Phi::ConstrainedSquaredHinge => {
                if u == -1.0 {
                    f64::NAN
                } else if u > -1.0 {
                    2.0
                } else {
                    0.0
                }
            }
            Phi::Hinge | Phi::ConstrainedHinge => {
                if u == -1.0 {
                    f64::NAN
                } else {
                    0.0
                }
            }
            Phi::ConstrainedSquare => 2.0,
            Phi::NegLog => {
                if u <= 0.0 {
                    f64::INFINITY
                } else {
                    1.0 / (u * u)
                }
            }
            Phi::SumExpRatio => {
                if u <= 0.0 {
                    f64::INFINITY
                } else {
                    2.0 / (u * u * u)
                }
            }
            Phi::MaeLinear => 0.0,
            Phi::CompSumPower { tau } => {
                if (*tau - 1.0).abs() < 1e-15 {
                    return Phi::NegLog.d2(u);
                }
                if u <= 0.0 {
                    return f64::INFINITY;
                }
                (2.0 - tau) * u.powf(tau - 3.0)
            }
        }
    }

    pub fn domain(&self) -> Domain {
        match self {
            Phi::NegLog | Phi::SumExpRatio | Phi::MaeLinear | Phi::CompSumPower { .. } => {
                Domain::UNIT_OPEN_ZERO
            }
            _ => Domain::REAL_LINE,
        }
    }

    pub fn smoothness(&self) -> Smoothness {
        match self {
            Phi::Exponential | Phi::Logistic | Phi::ConstrainedExp => Smoothness::C2Smooth,
            Phi::NegLog | Phi::SumExpRatio | Phi::CompSumPower { .. } => Smoothness::C2Smooth,
            Phi::Hinge | Phi::MaeLinear | Phi::ConstrainedHinge => Smoothness::Polyhedral,
            Phi::SquaredHinge | Phi::ConstrainedSquaredHinge | Phi::ConstrainedSquare => {
                Smoothness::PiecewiseC2
            }
        }
    }

    pub fn monotonicity(&self) -> Monotonicity {
        match self {
            Phi::Exponential
            | Phi::Logistic
            | Phi::SquaredHinge
            | Phi::Hinge
            | Phi::ConstrainedExp
            | Phi::ConstrainedSquaredHinge
            | Phi::ConstrainedSquare
            | Phi::ConstrainedHinge => Monotonicity::NonDecreasing,
            _ => Monotonicity::NonIncreasing,
        }
    }

    /// Kink locations (points where the second derivative jumps).
    pub fn kinks(&self) -> Vec<f64> {
        match self {
            Phi::SquaredHinge
            | Phi::Hinge
            | Phi::ConstrainedSquaredHinge
            | Phi::ConstrainedHinge => vec![-1.0],
            _ => vec![],
        }
    }

    /// Infimum of the function over its domain (used for limit values of
    /// unbounded inner problems).
    pub fn lower_bound(&self) -> f64 {
        match self {
            Phi::Exponential | Phi::Logistic | Phi::SquaredHinge | Phi::Hinge => 0.0,
            Phi::ConstrainedExp
            | Phi::ConstrainedSquaredHinge
            | Phi::ConstrainedSquare
            | Phi::ConstrainedHinge => 0.0,
            // Comp-sum entries are evaluated on (0, 1]; infimum at u = 1.
            Phi::NegLog => 0.0,
            Phi::SumExpRatio => 0.0,
            Phi::MaeLinear => 0.0,
            Phi::CompSumPower { .. } => 0.0,
        }
    }
}

#[inline]
pub fn sigmoid(u: f64) -> f64 {
    if u >= 0.0 {
        1.0 / (1.0 + (-u).exp())
    } else {
        let e = u.exp();
        e / (1.0 + e)
    }
}

/// Softmax probability of entry `label`, computed with the max-shift so that
/// large score gaps do not overflow.
pub fn softmax_prob(scores: &[f64], label: usize) -> f64 {
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let denom: f64 = scores.iter().map(|&s| (s - max).exp()).sum();
    (scores[label] - max).exp() / denom
}

/// A loss-family instance: family tag, auxiliary function, class count, and
/// the optional parameters used by specific constructions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurrogateSpec {
    pub family: Family,
    pub phi: Phi,
    pub n_classes: usize,
    /// Shift exponent selecting a member of the comp-sum power family.
    pub tau_exponent: Option<f64>,
    /// Score bound for bounded-hypothesis-set constructions.
    pub score_bound: Option<f64>,
}

impl SurrogateSpec {
    pub fn new(family: Family, phi: Phi, n_classes: usize) -> Self {
        SurrogateSpec {
            family,
            phi,
            n_classes,
            tau_exponent: None,
            score_bound: None,
        }
    }

    pub fn margin(phi: Phi) -> Self {
        SurrogateSpec::new(Family::Margin, phi, 2)
    }

    pub fn comp_sum(phi: Phi, n_classes: usize) -> Self {
        SurrogateSpec::new(Family::CompSum, phi, n_classes)
    }

    pub fn comp_sum_power(tau: f64, n_classes: usize) -> Self {
        SurrogateSpec {
            family: Family::CompSum,
            phi: Phi::CompSumPower { tau },
            n_classes,
            tau_exponent: Some(tau),
            score_bound: None,
        }
    }

    pub fn constrained(phi: Phi, n_classes: usize) -> Self {
        SurrogateSpec::new(Family::Constrained, phi, n_classes)
    }

    pub fn id(&self) -> String {
        match self.family {
            Family::Margin => format!("margin:{}", self.phi.id()),
            _ => format!("{}:{}:n={}", self.family, self.phi.id(), self.n_classes),
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.n_classes < 2 {
            return Err(Error::Schema(format!(
                "n_classes must be >= 2, got {}",
                self.n_classes
            )));
        }
        if self.family == Family::Margin && self.n_classes != 2 {
            return Err(Error::Schema(
                "margin family is binary; n_classes must be 2".into(),
            ));
        }
        if let Some(tau) = self.tau_exponent {
            if !(0.0..2.0).contains(&tau) {
                return Err(Error::Schema(format!(
                    "tau exponent must lie in [0, 2), got {tau}"
                )));
            }
        }
        if let Some(l) = self.score_bound {
            if !l.is_finite() || l <= 0.0 {
                return Err(Error::Schema(format!(
                    "score bound must be positive, got {l}"
                )));
            }
        }
        Ok(())
    }
}

/// Binary label used by the margin family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryLabel {
    Plus,
    Minus,
}

impl BinaryLabel {
    pub fn sign(&self) -> f64 {
        match self {
            BinaryLabel::Plus => 1.0,
            BinaryLabel::Minus => -1.0,
        }
    }

    /// Class-index convention: index 0 is the positive class.
    pub fn from_index(idx: usize) -> Result<BinaryLabel, Error> {
        match idx {
            0 => Ok(BinaryLabel::Plus),
            1 => Ok(BinaryLabel::Minus),
            _ => Err(Error::Precondition(format!(
                "binary label index must be 0 or 1, got {idx}"
            ))),
        }
    }
}

/// Tolerance on the zero-sum constraint of the constrained family.
pub const ZERO_SUM_TOL: f64 = 1e-9;

/// Evaluate the surrogate loss of a score vector at a class label.
///
/// Margin family: `scores` has length 1 and `label` indexes `{+1, -1}` as
/// `{0, 1}`. Comp-sum and constrained families: `scores` has length
/// `n_classes` and `label` is a class index.
pub fn eval_loss(spec: &SurrogateSpec, scores: &[f64], label: usize) -> Result<f64, Error> {
    match spec.family {
        Family::Margin => {
            if scores.len() != 1 {
                return Err(Error::Precondition(format!(
                    "margin family expects a single score, got {}",
                    scores.len()
                )));
            }
            let y = BinaryLabel::from_index(label)?;
            Ok(spec.phi.value(-y.sign() * scores[0]))
        }
        Family::CompSum => {
            if scores.len() != spec.n_classes {
                return Err(Error::Precondition(format!(
                    "expected {} scores, got {}",
                    spec.n_classes,
                    scores.len()
                )));
            }
            if label >= spec.n_classes {
                return Err(Error::Precondition(format!("label {label} out of range")));
            }
            let phi = effective_comp_sum_phi(spec);
            let p = softmax_prob(scores, label);
            if !phi.domain().contains(p) {
                return Err(Error::DomainViolation(format!(
                    "softmax probability {p} outside the domain of {}",
                    phi.id()
                )));
            }
            let v = phi.value(p);
            if !v.is_finite() {
                return Err(Error::DomainViolation(format!(
                    "loss value not finite at softmax probability {p} for {}",
                    phi.id()
                )));
            }
            Ok(v)
        }
        Family::Constrained => {
            if scores.len() != spec.n_classes {
                return Err(Error::Precondition(format!(
                    "expected {} scores, got {}",
                    spec.n_classes,
                    scores.len()
                )));
            }
            if label >= spec.n_classes {
                return Err(Error::Precondition(format!("label {label} out of range")));
            }
            let sum: f64 = scores.iter().sum();
            if sum.abs() > ZERO_SUM_TOL {
                return Err(Error::ConstraintViolation(format!(
                    "constrained-family scores must sum to zero, got {sum}"
                )));
            }
            Ok(scores
                .iter()
                .enumerate()
                .filter(|(y, _)| *y != label)
                .map(|(_, &s)| spec.phi.value(s))
                .sum())
        }
    }
}

/// The comp-sum auxiliary function actually evaluated by a spec: the power
/// family when a shift exponent is set, the cataloged entry otherwise.
pub fn effective_comp_sum_phi(spec: &SurrogateSpec) -> Phi {
    match spec.tau_exponent {
        Some(tau) if spec.family == Family::CompSum => Phi::CompSumPower { tau },
        _ => spec.phi,
    }
}

/// One checked regularity hypothesis.
#[derive(Debug, Clone, Serialize)]
pub struct HypothesisCheck {
    pub name: String,
    pub holds: bool,
    pub detail: String,
}

/// Report of which smoothness / sign hypotheses hold on a dense grid.
#[derive(Debug, Clone, Serialize)]
pub struct RegularityReport {
    pub phi_id: String,
    pub family: Family,
    pub smoothness: Smoothness,
    pub kinks: Vec<f64>,
    pub checks: Vec<HypothesisCheck>,
}

impl RegularityReport {
    pub fn all_smooth_hypotheses_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }
}

fn near_kink(phi: &Phi, u: f64) -> bool {
    phi.kinks().iter().any(|&k| (u - k).abs() < 1e-4)
}

/// Check convexity and the per-family derivative sign conditions on a dense
/// sample grid. Polyhedral entries fail the curvature condition by design.
pub fn verify_regularity(phi: &Phi, family: Family) -> RegularityReport {
    let mut checks = Vec::new();
    let grid: Vec<f64> = match family {
        Family::Margin | Family::Constrained => {
            (0..=400).map(|i| -4.0 + 8.0 * i as f64 / 400.0).collect()
        }
        Family::CompSum => (1..=400).map(|i| i as f64 / 400.0).collect(),
    };

    // Convexity via midpoints.
    let mut convex = true;
    for w in grid.windows(2) {
        let (a, b) = (w[0], w[1]);
        let mid = 0.5 * (a + b);
        let (fa, fb, fm) = (phi.value(a), phi.value(b), phi.value(mid));
        if fa.is_finite() && fb.is_finite() && fm > 0.5 * (fa + fb) + 1e-12 {
            convex = false;
            break;
        }
    }
    checks.push(HypothesisCheck {
        name: "convexity".into(),
        holds: convex,
        detail: "midpoint convexity on the sample grid".into(),
    });

    match family {
        Family::Margin => {
            checks.push(HypothesisCheck {
                name: "d1-positive-at-zero".into(),
                holds: phi.d1(0.0) > 0.0,
                detail: format!("phi'(0) = {}", phi.d1(0.0)),
            });
            let d2_ok = phi.smoothness() == Smoothness::Polyhedral || phi.d2(0.0) > 0.0;
            checks.push(HypothesisCheck {
                name: "d2-positive-at-zero".into(),
                holds: phi.smoothness() != Smoothness::Polyhedral && d2_ok,
                detail: if phi.smoothness() == Smoothness::Polyhedral {
                    "polyhedral: curvature condition fails by construction".into()
                } else {
                    format!("phi''(0) = {}", phi.d2(0.0))
                },
            });
        }
        Family::CompSum => {
            let pts: Vec<f64> = (1..=200).map(|i| 0.5 * i as f64 / 200.0).collect();
            let d1_neg = pts.iter().all(|&u| phi.d1(u) < 0.0);
            checks.push(HypothesisCheck {
                name: "d1-negative-on-(0,1/2]".into(),
                holds: d1_neg,
                detail: "first derivative negative on the sampled interval".into(),
            });
            let d2_pos = pts.iter().all(|&u| phi.d2(u) > 0.0);
            checks.push(HypothesisCheck {
                name: "d2-positive-on-(0,1/2]".into(),
                holds: phi.smoothness() != Smoothness::Polyhedral && d2_pos,
                detail: if phi.smoothness() == Smoothness::Polyhedral {
                    "polyhedral: curvature condition fails by construction".into()
                } else {
                    "second derivative positive on the sampled interval".into()
                },
            });
        }
        Family::Constrained => {
            let pts: Vec<f64> = (0..=200).map(|i| 10.0 * i as f64 / 200.0).collect();
            let d1_pos = pts.iter().all(|&u| near_kink(phi, u) || phi.d1(u) > 0.0);
            checks.push(HypothesisCheck {
                name: "d1-positive-on-[0,A]".into(),
                holds: d1_pos,
                detail: "first derivative positive on the sampled interval".into(),
            });
            let d2_pos = pts.iter().all(|&u| near_kink(phi, u) || phi.d2(u) > 0.0);
            checks.push(HypothesisCheck {
                name: "d2-positive-on-[0,A]".into(),
                holds: phi.smoothness() == Smoothness::C2Smooth && d2_pos
                    || (phi.smoothness() == Smoothness::PiecewiseC2 && d2_pos),
                detail: if phi.smoothness() == Smoothness::Polyhedral {
                    "polyhedral: curvature condition fails by construction".into()
                } else {
                    "second derivative positive on the sampled interval".into()
                },
            });
        }
    }

    RegularityReport {
        phi_id: phi.id(),
        family,
        smoothness: phi.smoothness(),
        kinks: phi.kinks(),
        checks,
    }
}

/// Finite-difference step used by the derivative consistency tests.
pub fn fd_step(u: f64) -> f64 {
    1e-5 * (1.0 + u.abs())
}
